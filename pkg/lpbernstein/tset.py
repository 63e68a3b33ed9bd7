"""T-sets E = U^{-1}[-1, 1]: construction, branches and the closed-form density."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from . import settings
from .arcsets import TWO_PI, ArcSet
from .errors import (BranchProximity, EndpointSingularity, InvalidArcSet, InvalidPolynomial,
                     OutsideSet, TSetStructureError)
from .models import PolySpec
from .trigpoly import TrigPoly, as_output

log = logging.getLogger(__name__)

Interval = Tuple[float, float]

TANGENCY_TOL = 1e-10
ENDPOINT_VALUE_TOL = 1e-9
TANGENCY_EXCLUSION = 1e-6
PROXIMITY = 1e-8
SINGULARITY = 1e-14
EXTREMAL_WINDOW = 1e-2
_TINY = np.finfo(float).tiny
BISECTION_STEPS = 64
_MEMBERSHIP_FRACTIONS = np.array([0.3, 0.5, 0.7])


@dataclass(frozen=True)
class TSet:
    """E with its defining polynomial U of degree N.

    ``branches`` are the 2N intervals on which U runs monotonically from
    -1 to 1 or back, in the lifted coordinates of E. ``inner_extremals``
    holds, per component of E, the interior points where |U| = 1.
    """
    U: TrigPoly
    N: int
    E: ArcSet
    branches: Tuple[Interval, ...]
    inner_extremals: Tuple[Tuple[float, ...], ...]

    @classmethod
    def from_spec(cls, spec: PolySpec) -> 'TSet':
        return build(TrigPoly.from_spec(spec))

    def poly_spec(self) -> PolySpec:
        return PolySpec(N=self.N, cos=self.U.cos_coeffs.tolist(), sin=self.U.sin_coeffs.tolist())

    def increasing(self, h: int) -> bool:
        lo, hi = self.branches[h]
        return float(self.U.eval(hi)) > float(self.U.eval(lo))

    def branch_containing(self, lo: float, hi: float, tol: float = 1e-12) -> Optional[int]:
        """Index of a branch holding [lo, hi] (modulo 2*pi), or None."""
        for index, (b_lo, b_hi) in enumerate(self.branches):
            for shift in (0.0, TWO_PI, -TWO_PI):
                if b_lo - tol <= lo + shift and hi + shift <= b_hi + tol:
                    return index
        return None

    def branch_index(self, t: float) -> int:
        found = self.branch_containing(t, t)
        if found is None:
            raise OutsideSet(f"angle {t:.12g} is not in {self.E}")
        return found

    def describe(self) -> dict:
        return {
            "N": self.N,
            "cos": self.U.cos_coeffs.tolist(),
            "sin": self.U.sin_coeffs.tolist(),
            "E": [list(arc) for arc in self.E],
            "branches": [list(b) for b in self.branches],
            "inner_extremals": [list(z) for z in self.inner_extremals],
        }


def _roots(f, grid: np.ndarray, values: np.ndarray) -> List[float]:
    roots = [float(t) for t, v in zip(grid[:-1], values[:-1]) if v == 0.0]
    for i in np.nonzero(values[:-1] * values[1:] < 0)[0]:
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=settings.ANGLE_TOL))
    return roots


def _polish(U: TrigPoly, t: float, level: float) -> float:
    """Newton steps on U(t) = level; endpoint densities are sensitive to its last digits."""
    for _ in range(3):
        slope = float(U.eval_derivative(t))
        if abs(slope) < 1e-8:
            break
        step = (float(U.eval(t)) - level) / slope
        if abs(step) > 1e-9:
            break
        t -= step
    return t


def _dedupe(angles: Sequence[float], tol: float = 1e-9) -> List[float]:
    unique: List[float] = []
    for t in sorted(a % TWO_PI for a in angles):
        if not unique or t - unique[-1] > tol:
            unique.append(t)
    if len(unique) > 1 and unique[0] + TWO_PI - unique[-1] <= tol:
        unique.pop()
    return unique


def _circular_distance(a: float, b: float) -> float:
    return abs((a - b + math.pi) % TWO_PI - math.pi)


def build(U: TrigPoly) -> TSet:
    """Locate crossings U = +-1 and critical points, then assemble E and its branches."""
    if U.degree == 0 or not np.any(U.cos_coeffs[1:]) and not np.any(U.sin_coeffs):
        raise InvalidPolynomial("a T-set needs a nonconstant U")
    N = U.degree
    grid = np.linspace(0.0, TWO_PI, max(64 * N * N, 512) + 1)
    step = grid[1] - grid[0]

    slope = np.asarray(U.eval_derivative(grid))
    critical = _dedupe(_roots(lambda s: float(U.eval_derivative(s)), grid, slope))
    critical_values = [float(U.eval(c)) for c in critical]

    probe = min(1e-4, step / 4) / N
    tangencies = []
    for c, value in zip(critical, critical_values):
        gap = abs(value) - 1
        if gap > TANGENCY_TOL:
            continue
        if gap < -TANGENCY_TOL:
            raise TSetStructureError(
                f"U' vanishes at {c:.12g} where |U| < 1, so U is not monotone on its branch",
                critical_values)
        sides = np.abs(np.asarray(U.eval(np.array([c - probe, c + probe]))))
        if np.all(sides < 1):
            tangencies.append(_polish(U.derivative(), c, 0.0))
        else:
            raise TSetStructureError(
                f"U touches {value:+.0f} at {c:.12g} from outside [-1, 1]", critical_values)

    values = np.asarray(U.eval(grid))
    crossings = []
    for level in (1.0, -1.0):
        found = _roots(lambda s, level=level: float(U.eval(s)) - level, grid, values - level)
        crossings += [_polish(U, c, level) for c in found]
    crossings = [c for c in _dedupe(crossings)
                 if all(_circular_distance(c, z) > TANGENCY_EXCLUSION for z in tangencies)]

    if not crossings:
        peak = float(np.max(np.abs(values)))
        if peak > 1 + TANGENCY_TOL:
            raise TSetStructureError("|U| > 1 on the whole circle, E is empty", critical_values)
        if not tangencies:
            raise TSetStructureError("|U| < 1 on the whole circle without reaching +-1",
                                     critical_values)
        E = ArcSet.full_circle()
        zs = sorted(tangencies)
        branches = [(zs[i], zs[i + 1]) for i in range(len(zs) - 1)] + [(zs[-1], zs[0] + TWO_PI)]
        extremals: Tuple[Tuple[float, ...], ...] = (tuple(zs),)
    else:
        components = []
        for i, lo in enumerate(crossings):
            hi = crossings[i + 1] if i + 1 < len(crossings) else crossings[0] + TWO_PI
            # interior points may sit on an inner extremal where |U| rounds above 1
            inner = np.abs(np.asarray(U.eval(lo + (hi - lo) * _MEMBERSHIP_FRACTIONS)))
            if np.min(inner) <= 1 + TANGENCY_TOL:
                components.append((lo, hi))
        E = ArcSet(components)
        grouped = []
        branches = []
        for lo, hi in E:
            inside = sorted(z for z in (float(E.lift(t)) for t in tangencies) if lo < z < hi)
            grouped.append(tuple(inside))
            cuts = [lo] + inside + [hi]
            branches += list(zip(cuts[:-1], cuts[1:]))
        extremals = tuple(grouped)

    tset = TSet(U=U, N=N, E=E, branches=tuple(branches), inner_extremals=extremals)
    _validate(tset, critical_values)
    log.debug("built T-set of order %d: %s with %d branches", N, E, len(branches))
    return tset


def _validate(tset: TSet, critical_values: List[float]) -> None:
    U = tset.U
    if len(tset.branches) != 2 * tset.N:
        raise TSetStructureError(
            f"found {len(tset.branches)} branches, a T-set of order {tset.N} has {2 * tset.N}",
            critical_values)
    for index, (lo, hi) in enumerate(tset.branches):
        ends = np.asarray(U.eval(np.array([lo, hi])))
        if np.any(np.abs(np.abs(ends) - 1) > ENDPOINT_VALUE_TOL) or ends[0] * ends[1] > 0:
            raise TSetStructureError(
                f"branch {index} [{lo:.12g}, {hi:.12g}] does not run between -1 and 1 "
                f"(end values {ends.tolist()})", critical_values)
        interior = np.linspace(lo, hi, 67)[1:-1]
        signs = np.sign(np.asarray(U.eval_derivative(interior)))
        if not (np.all(signs > 0) or np.all(signs < 0)):
            raise TSetStructureError(f"U is not monotone on branch {index}", critical_values)


def single_arc(beta: float) -> TSet:
    """E = [-beta, beta] via U(t) = (2 cos t - 1 - cos beta)/(1 - cos beta)."""
    if not 0 < beta < math.pi:
        raise InvalidArcSet(f"beta must lie in (0, pi), got {beta}")
    scale = 1 - math.cos(beta)
    return build(TrigPoly([(-1 - math.cos(beta)) / scale, 2 / scale]))


def branch_inverse(tset: TSet, h: int, y):
    """The unique t in branch h with U(t) = y; vectorized over y."""
    if not 0 <= h < len(tset.branches):
        raise IndexError(f"branch {h} out of range 0..{len(tset.branches) - 1}")
    target = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.abs(target) > 1 + 1e-12):
        raise ValueError("branch inverses are defined for |y| <= 1 only")
    target = np.clip(target, -1.0, 1.0)

    b_lo, b_hi = tset.branches[h]
    orient = 1.0 if tset.increasing(h) else -1.0
    lo = np.full(target.shape, b_lo)
    hi = np.full(target.shape, b_hi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = orient * (np.asarray(tset.U.eval(mid)) - target) < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)

    for _ in range(2):
        residual = np.asarray(tset.U.eval(t)) - target
        slope = np.asarray(tset.U.eval_derivative(t))
        safe = np.abs(slope) > 1e-6
        step = np.where(safe, residual / np.where(safe, slope, 1.0), 0.0)
        candidate = np.clip(t - step, b_lo, b_hi)
        better = np.abs(np.asarray(tset.U.eval(candidate)) - target) < np.abs(residual)
        t = np.where(better, candidate, t)
    return float(t[0]) if np.ndim(y) == 0 else t


def branch_map(tset: TSet, t, h: int) -> Tuple[np.ndarray, np.ndarray]:
    """t_h = U_h^{-1}(U(t)) and its derivative U'(t)/U'(t_h)."""
    th = branch_inverse(tset, h, np.clip(np.asarray(tset.U.eval(t)), -1.0, 1.0))
    return th, np.asarray(tset.U.eval_derivative(t)) / np.asarray(tset.U.eval_derivative(th))


def _extremal_offsets(tset: TSet, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest inner extremal point to each angle and the signed offset from it."""
    zs = np.array([z for group in tset.inner_extremals for z in group])
    if zs.size == 0:
        return np.zeros(t.shape), np.full(t.shape, np.inf)
    offsets = (t[:, None] - zs[None, :] + math.pi) % TWO_PI - math.pi
    nearest = np.argmin(np.abs(offsets), axis=1)
    return zs[nearest], offsets[np.arange(t.size), nearest]


def density_closed_form(tset: TSet, t):
    """|U'(t)| / (2 pi N sqrt(1 - U(t)^2)) at angles interior to E.

    The quotient is 0/0 at inner extremal points; the finite limit
    sqrt(|U''|) / (2 pi N) is used there.
    """
    points = np.atleast_1d(np.asarray(t, dtype=float))
    u = np.asarray(tset.U.eval(points))
    if np.any(np.abs(u) > 1 + TANGENCY_TOL):
        raise OutsideSet(f"angles outside E: {points[np.abs(u) > 1 + TANGENCY_TOL]}")
    _, offsets = _extremal_offsets(tset, points)
    if np.any((np.abs(u) >= 1 - SINGULARITY) & (np.abs(offsets) > EXTREMAL_WINDOW)):
        raise EndpointSingularity("|U(t)| = 1 at an endpoint of E: use endpoint-aware quadrature")
    return as_output(closed_form_values(tset, points, u).reshape(np.shape(t)), t)


def closed_form_values(tset: TSet, t, u=None) -> np.ndarray:
    """The closed-form density without checks, accurate up to inner extremal points."""
    points = np.atleast_1d(np.asarray(t, dtype=float))
    U = tset.U
    if u is None:
        u = np.asarray(U.eval(points))
    u = np.atleast_1d(u)
    scale = 2 * math.pi * tset.N
    slope = np.abs(np.asarray(U.eval_derivative(points)))
    gap = np.maximum((1 - u) * (1 + u), _TINY)
    values = slope / (scale * np.sqrt(gap))

    zs, offsets = _extremal_offsets(tset, points)
    near = np.abs(offsets) <= EXTREMAL_WINDOW
    for z in np.unique(zs[near]):
        mask = near & (zs == z)
        level = 1.0 if float(U.eval(z)) > 0 else -1.0
        inward = -level * U.eval_increment(z, offsets[mask])
        local = slope[mask] / (scale * np.sqrt(np.maximum(inward * (2 - inward), _TINY)))
        limit = math.sqrt(abs(float(U.derivative().eval_derivative(z)))) / scale
        values[mask] = np.where(np.abs(offsets[mask]) < 1e-12, limit, local)
    return values.reshape(np.shape(t))


def branch_jacobian_identity(tset: TSet, t: float, h: int) -> float:
    """|w(t_h) t_h'(t) / w(t)|, identically 1 away from branch endpoints."""
    lo, hi = tset.branches[tset.branch_index(t)]
    for shift in (0.0, TWO_PI, -TWO_PI):
        if lo <= t + shift <= hi:
            t = t + shift
            break
    if min(t - lo, hi - t) <= PROXIMITY:
        raise BranchProximity(f"angle {t:.12g} is within {PROXIMITY} of a branch endpoint")
    th, factor = branch_map(tset, t, h)
    b_lo, b_hi = tset.branches[h]
    if min(th - b_lo, b_hi - th) <= PROXIMITY:
        raise BranchProximity(f"image {th:.12g} is within {PROXIMITY} of a branch endpoint")
    return float(abs(density_closed_form(tset, th) * factor / density_closed_form(tset, t)))
