"""Singularity-aware quadrature and the L^p functionals A, B, a, b."""
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Collection, Optional, Tuple

import numpy as np

from . import settings
from .errors import UndefinedRatio
from .models import FunctionalValues, QuadSpec
from .protocols import DensityModel, Evaluable

if TYPE_CHECKING:
    from .arcsets import ArcSet

log = logging.getLogger(__name__)

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(10)
_INITIAL_PANELS = 8
_ABS_FLOOR = 1e-300

Integrand = Callable[[np.ndarray], np.ndarray]
OffsetIntegrand = Callable[[float, int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    converged: bool
    intervals: int = 0


def default_quad_spec() -> QuadSpec:
    return QuadSpec(rel_tol=settings.REL_TOL, max_subdivisions=settings.MAX_SUBDIVISIONS)


def _gauss(g: Integrand, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    values = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    return half * (values @ _WEIGHTS)


def _halves(g: Integrand, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    m = 0.5 * (a + b)
    both = _gauss(g, np.concatenate([a, m]), np.concatenate([m, b]))
    return both[:a.size], both[a.size:]


def _adaptive(g: Integrand, lo: float, hi: float, spec: QuadSpec) -> QuadResult:
    """Bisection driven by the change between a panel and its two halves.

    Every panel compares its Gauss-Legendre value with the sum over its
    halves; panels whose change is above their share of the tolerance are
    halved again. The reported error is twice the summed changes.
    """
    if hi <= lo:
        return QuadResult(0.0, 0.0, True, 0)
    edges = np.linspace(lo, hi, _INITIAL_PANELS + 1)
    a, b = edges[:-1], edges[1:]
    whole = _gauss(g, a, b)
    left, right = _halves(g, a, b)

    while True:
        refined = left + right
        delta = np.abs(refined - whole)
        total = float(refined.sum())
        error = float(delta.sum())
        if error <= spec.rel_tol * abs(total) or error <= _ABS_FLOOR:
            return QuadResult(total, 2 * error, True, a.size)
        if a.size >= spec.max_subdivisions:
            log.warning("quadrature on [%.6g, %.6g] stopped at %d intervals (error %.3e)",
                        lo, hi, a.size, error)
            return QuadResult(total, 2 * error, False, a.size)

        split = delta > spec.rel_tol * abs(total) / a.size
        split[int(np.argmax(delta))] = True
        budget = spec.max_subdivisions - a.size
        if split.sum() > budget:
            order = np.argsort(delta)[::-1][:max(budget, 1)]
            split = np.zeros(a.size, dtype=bool)
            split[order] = True

        keep = ~split
        mid = 0.5 * (a[split] + b[split])
        new_a = np.concatenate([a[split], mid])
        new_b = np.concatenate([mid, b[split]])
        new_whole = np.concatenate([left[split], right[split]])
        new_left, new_right = _halves(g, new_a, new_b)

        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        whole = np.concatenate([whole[keep], new_whole])
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])


def integrate_singular(f: Integrand, interval: Tuple[float, float],
                       singular_endpoints: Collection[str] = (),
                       spec: Optional[QuadSpec] = None,
                       offset_f: Optional[OffsetIntegrand] = None) -> QuadResult:
    """Integrate f over interval, allowing dist^(-1/2) blow-up at flagged ends.

    At a flagged endpoint v the substitution t = v +- u^2 is applied. When
    offset_f is given it is called as offset_f(v, side, delta) to evaluate
    f(v + side*delta) without rounding delta away; otherwise f is used.
    """
    spec = spec or default_quad_spec()
    lo, hi = interval
    flags = set(singular_endpoints)
    unknown = flags - {"lo", "hi"}
    if unknown:
        raise ValueError(f"singular endpoints must be 'lo' or 'hi', got {sorted(unknown)}")
    if not spec.endpoint_substitution or not flags:
        return _adaptive(f, lo, hi, spec)

    if offset_f is None:
        def offset_f(anchor, side, delta):
            return f(anchor + side * delta)

    def substituted(anchor: float, side: int) -> Integrand:
        def g(u):
            return offset_f(anchor, side, u * u) * 2 * u
        return g

    if flags == {"lo", "hi"}:
        mid = 0.5 * (lo + hi)
        pieces = [(lo, 1, mid - lo), (hi, -1, hi - mid)]
    elif "lo" in flags:
        pieces = [(lo, 1, hi - lo)]
    else:
        pieces = [(hi, -1, hi - lo)]

    results = [_adaptive(substituted(anchor, side), 0.0, math.sqrt(length), spec)
               for anchor, side, length in pieces]
    return QuadResult(value=sum(r.value for r in results),
                      error=sum(r.error for r in results),
                      converged=all(r.converged for r in results),
                      intervals=sum(r.intervals for r in results))


def _functional(kind: str, tn: Evaluable, n: int, arcs: 'ArcSet', dens: DensityModel,
                p: float, spec: Optional[QuadSpec]) -> QuadResult:
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if n < max(tn.degree, 1):
        raise ValueError(f"effective degree {n} is below deg T_n = {tn.degree}")
    scale = 1.0 / (n * 2 * math.pi)
    E = dens.arcs

    def value(t, w):
        if kind == "A":
            deriv = np.abs(np.asarray(tn.eval_derivative(t))) * scale
            return np.power(deriv, p) * np.power(w, 1 - p)
        return np.power(np.abs(np.asarray(tn.eval(t))), p) * w

    def plain(t):
        return value(t, dens.density(t))

    def near_endpoint(anchor, side, delta):
        return value(anchor + side * delta, dens.density_offset(anchor, side, delta))

    total = QuadResult(0.0, 0.0, True, 0)
    for lo, hi in arcs:
        index, lo, hi = E.locate(lo, hi)
        flags = []
        if not E.is_full_circle:
            c_lo, c_hi = E.intervals[index]
            if abs(lo - c_lo) <= 1e-10:
                lo, flags = c_lo, flags + ["lo"]
            if abs(hi - c_hi) <= 1e-10:
                hi, flags = c_hi, flags + ["hi"]
        part = integrate_singular(plain, (lo, hi), flags, spec, offset_f=near_endpoint)
        total = QuadResult(total.value + part.value, total.error + part.error,
                           total.converged and part.converged, total.intervals + part.intervals)
    return total


def functional_A(tn: Evaluable, n: int, arcs: 'ArcSet', dens: DensityModel, p: float,
                 spec: Optional[QuadSpec] = None) -> QuadResult:
    """A(T_n, X) = int_X |T_n'/(n 2 pi w)|^p w dt."""
    return _functional("A", tn, n, arcs, dens, p, spec)


def functional_B(tn: Evaluable, n: int, arcs: 'ArcSet', dens: DensityModel, p: float,
                 spec: Optional[QuadSpec] = None) -> QuadResult:
    """B(T_n, X) = int_X |T_n|^p w dt."""
    return _functional("B", tn, n, arcs, dens, p, spec)


def functionals(tn: Evaluable, n: int, arcs: 'ArcSet', dens: DensityModel, p: float,
                spec: Optional[QuadSpec] = None) -> FunctionalValues:
    """A, B, a, b for X = arcs inside E = dens.arcs.

    a and b are None (and the result flagged) when A(E) or B(E) vanish.
    """
    a_x = functional_A(tn, n, arcs, dens, p, spec)
    b_x = functional_B(tn, n, arcs, dens, p, spec)
    same = list(arcs) == list(dens.arcs)
    a_e = a_x if same else functional_A(tn, n, dens.arcs, dens, p, spec)
    b_e = b_x if same else functional_B(tn, n, dens.arcs, dens, p, spec)

    parts = [a_x, b_x] if same else [a_x, b_x, a_e, b_e]
    flagged = not all(r.converged for r in parts)
    a_ratio = a_x.value / a_e.value if a_e.value > 0 else None
    b_ratio = b_x.value / b_e.value if b_e.value > 0 else None
    if b_ratio is None:
        log.warning("B(T_n, E) vanishes; a and b are undefined")
        flagged = True
    return FunctionalValues(A=a_x.value, B=b_x.value, a=a_ratio, b=b_ratio,
                            quad_error=sum(r.error for r in parts), flagged=flagged)


def require_ratios(values: FunctionalValues) -> Tuple[float, float]:
    if values.a is None or values.b is None:
        raise UndefinedRatio("A(T_n, E) or B(T_n, E) is zero")
    return values.a, values.b


def renormalize_A(value: float, n_from: int, n_to: int, p: float) -> float:
    """A computed with effective degree n_from, re-expressed with n_to."""
    return value * (n_from / n_to) ** p


def power_inequality_slacks(a, b, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Slacks of ||a|^p - |b|^p| <= |a-b|^p and |a+b|^p <= |a|^p + |b|^p."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    first = np.abs(a - b) ** p - np.abs(np.abs(a) ** p - np.abs(b) ** p)
    second = np.abs(a) ** p + np.abs(b) ** p - np.abs(a + b) ** p
    return first, second
