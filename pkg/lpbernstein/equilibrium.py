"""Equilibrium densities of arc systems: closed form, collocation and uniform backends."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev

from . import settings
from .arcsets import TWO_PI, ArcSet
from .errors import EndpointSingularity, OutsideSet, SolverFailure
from .protocols import DensityModel
from .tset import TSet, closed_form_values

log = logging.getLogger(__name__)

KERNEL_NODES = 512
VALIDATION_POINTS = 41
NEGATIVE_TOL = 1e-10
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class CollocationSolution:
    """Per arc l, w(t) dt = (g_l(phi)/pi) dphi under t = c_l + r_l cos(phi).

    ``coefficients[l]`` are the cosine (= Chebyshev) coefficients of g_l;
    the mass carried by arc l is coefficients[l][0].
    """
    arcs: ArcSet
    coefficients: Tuple[np.ndarray, ...]
    robin_constant: float
    residual: float
    degree: int

    @property
    def masses(self) -> np.ndarray:
        return np.array([a[0] for a in self.coefficients])


def _arc_frame(lo: float, hi: float) -> Tuple[float, float]:
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


def _kernel(t: np.ndarray, owner: np.ndarray, x: np.ndarray, arcs: ArcSet, M: int) -> np.ndarray:
    """Matrix of (1/pi) int_0^pi log 2|sin((t_i - s_l(phi))/2)| cos(j phi) dphi.

    Row i belongs to angle t_i = c + r x_i on arc owner[i]; columns run over
    (arc l, j = 0..M). The log|t - s| part of the diagonal arc is done
    analytically, the rest with a midpoint rule in phi.
    """
    phi = (np.arange(KERNEL_NODES) + 0.5) * math.pi / KERNEL_NODES
    basis = np.cos(np.outer(phi, np.arange(M + 1))) / KERNEL_NODES
    j = np.arange(1, M + 1)
    blocks = []
    for l, (lo, hi) in enumerate(arcs):
        c, r = _arc_frame(lo, hi)
        d = t[:, None] - (c + r * np.cos(phi))[None, :]
        same = owner == l
        values = np.empty_like(d)
        values[~same] = np.log(2 * np.abs(np.sin(0.5 * d[~same])))
        values[same] = np.log(np.abs(np.sinc(d[same] / TWO_PI)))
        block = values @ basis
        if np.any(same):
            xs = x[same]
            block[same, 0] += math.log(r) - math.log(2)
            block[same, 1:] -= np.cos(np.outer(np.arccos(np.clip(xs, -1, 1)), j)) / j
        blocks.append(block)
    return np.hstack(blocks)


def _points(arcs: ArcSet, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.cos((np.arange(count) + 0.5) * math.pi / count)
    ts, owners, xs = [], [], []
    for l, (lo, hi) in enumerate(arcs):
        c, r = _arc_frame(lo, hi)
        ts.append(c + r * x)
        owners.append(np.full(count, l))
        xs.append(x)
    return np.concatenate(ts), np.concatenate(owners), np.concatenate(xs)


def _solve(arcs: ArcSet, M: int) -> CollocationSolution:
    m = len(arcs)
    t, owner, x = _points(arcs, M + 2)
    K = _kernel(t, owner, x, arcs, M)
    rows = np.hstack([-K, -np.ones((t.size, 1))])
    mass = np.zeros((1, m * (M + 1) + 1))
    mass[0, [l * (M + 1) for l in range(m)]] = 1.0
    system = np.vstack([rows, mass])
    rhs = np.concatenate([np.zeros(t.size), [1.0]])
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)

    coefficients = tuple(solution[l * (M + 1):(l + 1) * (M + 1)] for l in range(m))
    robin = float(solution[-1])

    tv, ov, xv = _points(arcs, VALIDATION_POINTS)
    potential = -_kernel(tv, ov, xv, arcs, M) @ solution[:-1]
    residual = float(np.max(np.abs(potential - robin)))
    return CollocationSolution(arcs=arcs, coefficients=coefficients, robin_constant=robin,
                               residual=residual, degree=M)


def solve_general(arcs: ArcSet, M: int = settings.COLLOCATION_DEGREES[0]) -> CollocationSolution:
    """Equilibrium measure of an arc system by collocation of its log potential.

    The basis degree escalates through settings.COLLOCATION_DEGREES until the
    potential is constant within settings.COLLOCATION_RESIDUAL on a
    validation grid. The full circle gets the exact uniform answer.
    """
    if arcs.is_full_circle:
        uniform = (np.array([1.0]),)
        return CollocationSolution(arcs=arcs, coefficients=uniform, robin_constant=0.0,
                                   residual=0.0, degree=0)

    schedule = [M] + [d for d in settings.COLLOCATION_DEGREES if d > M]
    best: Optional[CollocationSolution] = None
    for degree in schedule:
        candidate = _solve(arcs, degree)
        log.info("collocation on %s with M=%d: residual %.3e", arcs, degree, candidate.residual)
        best = candidate
        if candidate.residual <= settings.COLLOCATION_RESIDUAL:
            break
    else:
        raise SolverFailure(f"collocation on {arcs} did not converge", best.residual, best.degree)

    xv = np.cos((np.arange(VALIDATION_POINTS) + 0.5) * math.pi / VALIDATION_POINTS)
    lowest = min(float(np.min(chebyshev.chebval(xv, a)))
                 for a in best.coefficients)
    scale = max(float(np.max(np.abs(a))) for a in best.coefficients)
    if lowest < -NEGATIVE_TOL * scale:
        raise SolverFailure(f"collocation density on {arcs} is negative ({lowest:.3e})",
                            best.residual, best.degree)
    return best


class UniformDensity:
    """dt/(2 pi) on the full circle."""

    def __init__(self) -> None:
        self.arcs = ArcSet.full_circle()

    def density(self, t) -> np.ndarray:
        return np.full(np.shape(t), 1 / TWO_PI)

    def density_offset(self, anchor: float, side: int, delta) -> np.ndarray:
        return np.full(np.shape(delta), 1 / TWO_PI)

    @property
    def total_mass(self) -> float:
        return 1.0


class TSetDensity:
    """|U'| / (2 pi N sqrt(1 - U^2)), zero off E."""

    def __init__(self, tset: TSet) -> None:
        self.tset = tset
        self.arcs = tset.E

    def density(self, t) -> np.ndarray:
        u = np.asarray(self.tset.U.eval(t))
        values = closed_form_values(self.tset, t, u)
        return np.where(np.abs(u) <= 1 + 1e-10, values, 0.0)

    def density_offset(self, anchor: float, side: int, delta) -> np.ndarray:
        U = self.tset.U
        delta = np.asarray(delta, dtype=float)
        level = 1.0 if float(U.eval(anchor)) > 0 else -1.0
        # 1 - level*U(t) from the increment, so tiny delta keeps its digits
        inward = -level * U.eval_increment(anchor, side * delta.ravel()).reshape(delta.shape)
        gap = np.maximum(inward * (2 - inward), _TINY)
        slope = np.abs(np.asarray(U.eval_derivative(anchor + side * delta)))
        return slope / (TWO_PI * self.tset.N * np.sqrt(gap))

    @property
    def total_mass(self) -> float:
        return 1.0


class CollocationDensity:
    """Reconstruction of a CollocationSolution."""

    def __init__(self, solution: CollocationSolution) -> None:
        self.solution = solution
        self.arcs = solution.arcs

    def _component(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        lifted = np.atleast_1d(self.arcs.lift(t))
        index = np.full(lifted.shape, -1)
        for l, (lo, hi) in enumerate(self.arcs):
            index = np.where((lifted >= lo) & (lifted <= hi), l, index)
        return index, lifted

    def _values(self, l: int, x: np.ndarray, gap: np.ndarray) -> np.ndarray:
        _, r = _arc_frame(*self.arcs.intervals[l])
        return chebyshev.chebval(x, self.solution.coefficients[l]) / (
            math.pi * r * np.sqrt(np.maximum(gap, _TINY)))

    def density(self, t) -> np.ndarray:
        if self.arcs.is_full_circle:
            return np.full(np.shape(t), 1 / TWO_PI)
        index, lifted = self._component(np.asarray(t, dtype=float))
        out = np.zeros(lifted.shape)
        for l, (lo, hi) in enumerate(self.arcs):
            mask = index == l
            if np.any(mask):
                c, r = _arc_frame(lo, hi)
                x = (lifted[mask] - c) / r
                out[mask] = self._values(l, x, (1 - x) * (1 + x))
        return out.reshape(np.shape(t))

    def density_offset(self, anchor: float, side: int, delta) -> np.ndarray:
        delta = np.asarray(delta, dtype=float)
        if self.arcs.is_full_circle:
            return np.full(delta.shape, 1 / TWO_PI)
        ends = [lo if side > 0 else hi for lo, hi in self.arcs]
        l = int(np.argmin([abs((anchor - v + math.pi) % TWO_PI - math.pi) for v in ends]))
        _, r = _arc_frame(*self.arcs.intervals[l])
        inward = delta / r
        x = -side * (1 - inward)
        return self._values(l, x, inward * (2 - inward))

    @property
    def total_mass(self) -> float:
        return float(self.solution.masses.sum())


def density_model_for(source: Union[TSet, ArcSet],
                      M: int = settings.COLLOCATION_DEGREES[0]) -> DensityModel:
    """The natural backend: closed form for T-sets, uniform for the circle, else collocation."""
    if isinstance(source, TSet):
        return UniformDensity() if source.E.is_full_circle else TSetDensity(source)
    if source.is_full_circle:
        return UniformDensity()
    return CollocationDensity(solve_general(source, M))


def density(model: DensityModel, t):
    """Equilibrium density at angles strictly inside E."""
    arcs = model.arcs
    points = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(arcs.contains(points)):
        raise OutsideSet(f"angles outside {arcs}: {points[~arcs.contains(points)]}")
    if any(arcs.is_endpoint(float(s)) for s in points):
        raise EndpointSingularity("the equilibrium density is infinite at the endpoints of E")
    values = np.asarray(model.density(points))
    return float(values[0]) if np.ndim(t) == 0 else values.reshape(np.shape(t))
