"""Fast-decreasing polynomials, symmetrization and numeric checks of the lemma inequalities."""
import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev

from .arcsets import ArcSet, Block
from .equilibrium import density_model_for
from .errors import HypothesisViolated, InvalidArcSet, InvalidParameters, InvalidPolynomial
from .functionals import QuadResult, functional_A, functional_B, renormalize_A
from .models import MarginRecord, ParamSet, QuadSpec
from .protocols import DensityModel, Evaluable
from .trigpoly import ChebyshevComposite, TrigPoly, product, sup_norm
from .tset import TSet, branch_inverse

log = logging.getLogger(__name__)

Interval = Tuple[float, float]

PROFILE_GRID = 100_000
SYMMETRIZATION_COLLAR = 1e-8
LUKASHOV_COLLAR = 1e-6


@dataclass(frozen=True)
class QProfile:
    """q ~ indicator of H with 0 <= q <= 1 and the errors it achieves.

    ``F_hat`` is max(|q - 1| on H, |q| off H and its borders) and ``dq_hat``
    is max |q'| off H and its borders, both measured on a dense grid. The
    fitted constants are filled in by q_ladder.
    """
    H: Interval
    n: int
    q: TrigPoly
    deg_bound: int
    F_hat: float
    dq_hat: float
    border_width: float
    theta: float = 0.25
    C1_hat: Optional[float] = None
    C2_hat: Optional[float] = None
    C3_hat: Optional[float] = None

    @classmethod
    def unit(cls, H: Interval, n: int, params: ParamSet,
             border_width: Optional[float] = None) -> 'QProfile':
        """The degenerate profile q = 1, measured like any other."""
        width = border_width if border_width is not None else _default_border(n, params)
        q = TrigPoly.constant(1.0)
        F_hat, dq_hat = _measure(q, H, width)
        return cls(H=H, n=n, q=q, deg_bound=_degree_cap(n, params), F_hat=F_hat, dq_hat=dq_hat,
                   border_width=width, theta=params.theta)

    @property
    def is_unit(self) -> bool:
        return self.q.degree == 0


def _default_border(n: int, params: ParamSet) -> float:
    return 1 / (2 * float(n) ** params.kappa)


def _degree_cap(n: int, params: ParamSet) -> int:
    return math.floor(3 * float(n) ** (2 * params.theta) + 1e-9)


def _kernel_coefficients(r: int, M: int) -> np.ndarray:
    """Complex Fourier coefficients c_{-r(M-1)}..c_{r(M-1)} of the r-th power of Fejer's kernel."""
    k = np.arange(-(M - 1), M)
    fejer = (M - np.abs(k)) / M
    coeffs = np.array([1.0])
    for _ in range(r):
        coeffs = np.convolve(coeffs, fejer)
    return coeffs


def _measure(q: Evaluable, H: Interval, width: float) -> Tuple[float, float]:
    h1, h2 = H
    center = 0.5 * (h1 + h2)
    grid = np.linspace(center - math.pi, center + math.pi, PROFILE_GRID, endpoint=False)
    grid = np.sort(np.concatenate([grid, [h1, h2, h1 - width, h2 + width]]))
    values = np.asarray(q.eval(grid))
    on_h = (grid >= h1) & (grid <= h2)
    off = (grid <= h1 - width) | (grid >= h2 + width)
    inside = float(np.max(np.abs(values[on_h] - 1))) if np.any(on_h) else 0.0
    outside = float(np.max(np.abs(values[off]))) if np.any(off) else 0.0
    slope = float(np.max(np.abs(np.asarray(q.eval_derivative(grid[off]))))) if np.any(off) else 0.0
    return max(inside, outside), slope


def fast_decreasing_q(H: Interval, n: int, params: ParamSet,
                      border_width: Optional[float] = None) -> QProfile:
    """q = (K * indicator of H widened by half a border) / int K, K = Fejer^r.

    r = ceil(n^theta) and the Fejer order M is the largest one with
    deg q = r(M - 1) <= 3 n^(2 theta).
    """
    h1, h2 = H
    width = border_width if border_width is not None else _default_border(n, params)
    if h2 - h1 < _default_border(n, params) - 1e-12:
        raise InvalidArcSet(
            f"H = [{h1:.6g}, {h2:.6g}] is shorter than one small interval 1/(2 n^kappa)")
    if not 0 < width:
        raise InvalidParameters(f"border width must be positive, got {width}")

    cap = _degree_cap(n, params)
    r = math.ceil(float(n) ** params.theta - 1e-12)
    M = cap // r + 1
    if M < 2:
        raise InvalidParameters(f"degree cap {cap} leaves no room for a kernel of power {r}")
    coeffs = _kernel_coefficients(r, M)
    degree = r * (M - 1)
    c = coeffs[degree:]
    lo, hi = h1 - width / 2, h2 + width / 2

    k = np.arange(1, degree + 1)
    scale = 2 * c[1:] / (2 * math.pi * c[0] * k)
    cos_part = scale * (np.sin(k * hi) - np.sin(k * lo))
    sin_part = scale * (np.cos(k * lo) - np.cos(k * hi))
    q = TrigPoly(np.concatenate([[(hi - lo) / (2 * math.pi)], cos_part]), sin_part, degree=degree)

    F_hat, dq_hat = _measure(q, H, width)
    log.debug("q for H=[%.6g, %.6g], n=%d: r=%d M=%d deg=%d F_hat=%.3e", h1, h2, n, r, M, degree,
              F_hat)
    return QProfile(H=H, n=n, q=q, deg_bound=cap, F_hat=F_hat, dq_hat=dq_hat, border_width=width,
                    theta=params.theta)


def q_ladder(H: Interval, ns: Sequence[int], params: ParamSet) -> List[QProfile]:
    """Profiles along an n ladder.

    C1, C2 come from fitting log F = log C2 - C1 n^theta; C3 = max F^p n^gamma.
    """
    profiles = [fast_decreasing_q(H, n, params) for n in ns]
    x = np.array([float(n) ** params.theta for n in ns])
    logs = np.log(np.array([max(pr.F_hat, 1e-300) for pr in profiles]))
    if len(ns) >= 2:
        slope, intercept = np.polyfit(x, logs, 1)
        c1, c2 = float(-slope), float(math.exp(intercept))
    else:
        c1 = c2 = None
    c3 = max(pr.F_hat ** params.p * float(pr.n) ** params.gamma for pr in profiles)
    return [dataclasses.replace(pr, C1_hat=c1, C2_hat=c2, C3_hat=c3) for pr in profiles]


def profile_for_block(blk: Block, params: ParamSet, unit: bool = False) -> QProfile:
    """A q profile for blk.H that fades out inside its bordering cells."""
    widths = [hi - lo for lo, hi in blk.borders]
    width = min(widths) if widths else _default_border(blk.n, params)
    if unit:
        return QProfile.unit(blk.H, blk.n, params, border_width=width)
    return fast_decreasing_q(blk.H, blk.n, params, border_width=width)


@dataclass(frozen=True)
class SymmetrizedPoly:
    """T_n*(t) = sum_h (T_n q)(t_h) = S(U(t)) with S in the Chebyshev basis."""
    Tstar: ChebyshevComposite
    nstar: int
    S_coeffs: np.ndarray
    fit_residual: float


def _times_q(tn: TrigPoly, q: TrigPoly) -> TrigPoly:
    if q.degree == 0:
        return tn * float(q.cos_coeffs[0])
    return product(tn, q)


def _branch_sum(tset: TSet, tn: Evaluable, q: Evaluable, y: np.ndarray) -> np.ndarray:
    total = np.zeros(y.shape)
    for h in range(len(tset.branches)):
        th = branch_inverse(tset, h, y)
        total += np.asarray(tn.eval(th)) * np.asarray(q.eval(th))
    return total


def symmetrize(tset: TSet, tn: TrigPoly, qp: QProfile) -> SymmetrizedPoly:
    """Sum T_n q over the 2N branch preimages and fit it as S(U) with deg S <= nstar / N."""
    if tn.degree < 1:
        raise InvalidPolynomial("symmetrization needs deg T_n >= 1")
    nstar = tn.degree + qp.q.degree
    deg_s = nstar // tset.N
    count = max(2 * (deg_s + 1), 64)
    y = np.cos((np.arange(count) + 0.5) * math.pi / count) * (1 - SYMMETRIZATION_COLLAR)
    values = _branch_sum(tset, tn, qp.q, y)
    coeffs = chebyshev.chebfit(y, values, deg_s)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    residual = float(np.max(np.abs(chebyshev.chebval(y, coeffs) - values))) / scale
    if residual > 1e-8:
        log.warning("symmetrized polynomial fit residual %.3e (deg S = %d)", residual, deg_s)
    return SymmetrizedPoly(Tstar=ChebyshevComposite(coeffs, tset.U), nstar=nstar,
                           S_coeffs=coeffs, fit_residual=residual)


def branch_consistency(tset: TSet, tn: TrigPoly, qp: QProfile, sym: SymmetrizedPoly,
                       levels: Iterable[float]) -> float:
    """max over levels y and branches h of |T_n*(t_h(y)) - sum_h' (T_n q)(t_h'(y))|."""
    y = np.asarray(list(levels), dtype=float)
    direct = _branch_sum(tset, tn, qp.q, y)
    worst = 0.0
    for h in range(len(tset.branches)):
        th = branch_inverse(tset, h, y)
        worst = max(worst, float(np.max(np.abs(np.asarray(sym.Tstar.eval(th)) - direct))))
    return worst


def lukashov_sup_ratio(tn: Evaluable, n: int, source: Union[TSet, DensityModel],
                       points_per_interval: int = 4000) -> float:
    """max |T_n'| / (n 2 pi w ||T_n||_E) over an interior grid of E."""
    if n < max(tn.degree, 1):
        raise InvalidParameters(f"effective degree {n} is below deg T_n = {tn.degree}")
    if isinstance(source, TSet):
        dens = density_model_for(source)
        pieces: Sequence[Interval] = source.branches
    else:
        dens = source
        pieces = source.arcs.intervals
    norm = sup_norm(tn, dens.arcs.intervals)
    if norm == 0:
        return 0.0
    worst = 0.0
    for lo, hi in pieces:
        t = np.linspace(lo + LUKASHOV_COLLAR, hi - LUKASHOV_COLLAR, points_per_interval)
        ratio = np.abs(np.asarray(tn.eval_derivative(t))) / (
            n * 2 * math.pi * np.asarray(dens.density(t)) * norm)
        worst = max(worst, float(np.max(ratio)))
    return worst


@dataclass(frozen=True)
class NikolskiiRow:
    k: int
    p: float
    value: float
    scaled: float


def nikolskii_value(tc: TrigPoly, interval: Interval, dens: DensityModel, p: float,
                    spec: Optional[QuadSpec] = None) -> float:
    """int_I |T|^p w dt for T normalized by the caller to sup_I |T| = 1."""
    if tc.is_zero:
        raise InvalidPolynomial("the Nikolskii integral of the zero polynomial is meaningless")
    if tc.degree < 1:
        raise InvalidPolynomial("the Nikolskii estimate needs deg T >= 1")
    return functional_B(tc, tc.degree, ArcSet([interval]), dens, p, spec).value


def nikolskii_sweep(ks: Iterable[int], interval: Interval, dens: DensityModel, p: float,
                    spec: Optional[QuadSpec] = None) -> List[NikolskiiRow]:
    """T_k(cos t) = cos kt normalized on I; records value and value * 2^p * k^2."""
    rows = []
    for k in ks:
        tc = TrigPoly(np.eye(k + 1)[k])
        tc = tc * (1 / sup_norm(tc, [interval]))
        value = nikolskii_value(tc, interval, dens, p, spec)
        rows.append(NikolskiiRow(k=k, p=p, value=value, scaled=value * 2 ** p * k * k))
    return rows


def _record(lemma: str, n: int, p: float, lhs: float, rhs: float, error: float,
            seed: Optional[int]) -> MarginRecord:
    return MarginRecord(lemma=lemma, n=n, p=p, lhs=lhs, rhs=rhs, slack=rhs - lhs,
                        quad_error=error, seed=seed)


def _ratio(part: QuadResult, whole: QuadResult) -> float:
    return part.value / whole.value if whole.value > 0 else 0.0


def verify_symmetrization_lemmas(tset: TSet, tn: TrigPoly, blk: Block, qp: QProfile, p: float,
                                 dens: DensityModel, spec: Optional[QuadSpec] = None,
                                 seed: Optional[int] = None) -> List[MarginRecord]:
    """Slacks of the A and B symmetrization inequalities for T_n on block blk.

    A: |(n*/n)^p A(T*, E) - 2N A(T_n, H)|
         <= 2N (4 F^p + a(T_n, H_b)) A(T_n, E) + 8N 3^p (n^(2 theta)/n)^p B(T_n, E)
    B: |B(T*, E) - 2N B(T_n, H)| <= 2N (3 F^p + b(T_n, H_b)) B(T_n, E)
    """
    if tset.branch_containing(*blk.hull) is None:
        raise HypothesisViolated(f"block H={blk.H} and its borders are not inside one branch")
    n = tn.degree
    params_c = 3 ** p * (float(n) ** (2 * qp.theta) / n) ** p
    E = dens.arcs
    H = blk.h_arcs
    two_n = 2 * tset.N

    sym = symmetrize(tset, tn, qp)
    star_n = max(sym.Tstar.degree, 1)
    a_star = functional_A(sym.Tstar, star_n, E, dens, p, spec)
    b_star = functional_B(sym.Tstar, star_n, E, dens, p, spec)
    a_h = functional_A(tn, n, H, dens, p, spec)
    b_h = functional_B(tn, n, H, dens, p, spec)
    a_e = functional_A(tn, n, E, dens, p, spec)
    b_e = functional_B(tn, n, E, dens, p, spec)
    if blk.borders:
        a_b = _ratio(functional_A(tn, n, blk.border_arcs, dens, p, spec), a_e)
        b_b = _ratio(functional_B(tn, n, blk.border_arcs, dens, p, spec), b_e)
    else:
        a_b = b_b = 0.0

    f_p = qp.F_hat ** p
    a_star_n = renormalize_A(a_star.value, star_n, n, p)
    lhs_a = abs(a_star_n - two_n * a_h.value)
    rhs_a = two_n * (4 * f_p + a_b) * a_e.value + two_n * 4 * params_c * b_e.value
    err_a = (renormalize_A(a_star.error, star_n, n, p) + two_n * a_h.error
             + two_n * (4 * f_p + a_b + 1) * a_e.error + two_n * 4 * params_c * b_e.error)

    lhs_b = abs(b_star.value - two_n * b_h.value)
    rhs_b = two_n * (3 * f_p + b_b) * b_e.value
    err_b = b_star.error + two_n * b_h.error + two_n * (3 * f_p + b_b + 1) * b_e.error

    return [_record("symmetrization-A", n, p, lhs_a, rhs_a, err_a, seed),
            _record("symmetrization-B", n, p, lhs_b, rhs_b, err_b, seed)]


def verify_localization(tn: TrigPoly, blk: Block, qp: QProfile, X: ArcSet, params: ParamSet,
                        dens: DensityModel, spec: Optional[QuadSpec] = None,
                        seed: Optional[int] = None) -> List[MarginRecord]:
    """Slacks of the three localization inequalities for T_n q.

    A(T_n q) is normalized with its own degree deg(T_n q), A(T_n) with n.
    """
    p = params.validate(theorem=True).p
    n = tn.degree
    if n < 1:
        raise InvalidPolynomial("localization needs deg T_n >= 1")
    c = 3 ** p * (float(n) ** (2 * params.theta) / n) ** p
    E = dens.arcs
    H = blk.h_arcs
    tq = _times_q(tn, qp.q)
    nq = tq.degree

    aq_h = functional_A(tq, nq, H, dens, p, spec)
    aq_x = functional_A(tq, nq, X, dens, p, spec)
    bq_x = functional_B(tq, nq, X, dens, p, spec)
    a_h = functional_A(tn, n, H, dens, p, spec)
    a_x = functional_A(tn, n, X, dens, p, spec)
    b_x = functional_B(tn, n, X, dens, p, spec)
    a_e = functional_A(tn, n, E, dens, p, spec)
    b_e = functional_B(tn, n, E, dens, p, spec)

    f_p = qp.F_hat ** p

    return [
        _record("localization-H", n, p, abs(aq_h.value - a_h.value),
                (f_p + c) * a_e.value + c * b_e.value,
                aq_h.error + a_h.error + (f_p + c) * a_e.error + c * b_e.error, seed),
        _record("localization-A", n, p, aq_x.value, a_x.value + c * b_e.value,
                aq_x.error + a_x.error + c * b_e.error, seed),
        _record("localization-B", n, p, bq_x.value, b_x.value, bq_x.error + b_x.error, seed),
    ]

