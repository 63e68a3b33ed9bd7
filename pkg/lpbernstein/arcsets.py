"""Arc systems E on the unit circle, small-interval partitions and blocks."""
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from typeguard import typechecked

from .errors import ComponentTooShort, InvalidArcSet, OutsideSet
from .functionals import functionals
from .models import ArcSetSpec, ParamSet, PropertyReport, QuadSpec

if TYPE_CHECKING:
    from .protocols import DensityModel, Evaluable
    from .tset import TSet

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
FULL_CIRCLE_TOL = 1e-12
_TOUCH_TOL = 1e-12

Interval = Tuple[float, float]


class ArcSet:
    """A finite union of closed arcs, stored as angle intervals.

    Intervals are lifted into one window [origin, origin + 2*pi): origin is
    0 when angle 0 lies in a gap, otherwise the midpoint of the largest gap
    (taken in [-pi, pi)). Downstream code never needs modular arithmetic
    once an angle has been lifted.
    """

    def __init__(self, intervals: Iterable[Sequence[float]]) -> None:
        raw = [(float(lo), float(hi)) for lo, hi in intervals]
        if not raw:
            raise InvalidArcSet("an arc set needs at least one interval")
        for lo, hi in raw:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InvalidArcSet(f"interval [{lo}, {hi}] is not finite")
            if not hi > lo:
                raise InvalidArcSet(f"interval [{lo}, {hi}] has no positive length")

        if any(hi - lo >= TWO_PI - FULL_CIRCLE_TOL for lo, hi in raw):
            if len(raw) > 1:
                raise InvalidArcSet("the full circle cannot be combined with other arcs")
            self.origin = 0.0
            self._intervals: Tuple[Interval, ...] = ((0.0, TWO_PI),)
            return

        normalized = sorted((lo % TWO_PI, lo % TWO_PI + (hi - lo)) for lo, hi in raw)
        gaps = []
        for i, (_, hi) in enumerate(normalized):
            next_lo = normalized[(i + 1) % len(normalized)][0]
            if i == len(normalized) - 1:
                next_lo += TWO_PI
            gap = next_lo - hi
            if not gap > 0:
                raise InvalidArcSet(
                    f"arcs {normalized[i]} and {normalized[(i + 1) % len(normalized)]} "
                    "overlap or touch")
            gaps.append((hi, next_lo))

        if any(lo < TWO_PI <= hi or (lo == 0.0) for lo, hi in normalized):
            start, end = max(gaps, key=lambda g: g[1] - g[0])
            origin = (0.5 * (start + end) + math.pi) % TWO_PI - math.pi
        else:
            origin = 0.0
        self.origin = origin
        self._intervals = tuple(sorted((self.lift(lo), self.lift(lo) + hi - lo)
                                       for lo, hi in normalized))

    @classmethod
    def full_circle(cls) -> 'ArcSet':
        return cls([(0.0, TWO_PI)])

    @classmethod
    def from_spec(cls, spec: ArcSetSpec) -> 'ArcSet':
        for arc in spec.arcs:
            if len(arc) != 2:
                raise InvalidArcSet(f"an arc needs exactly two angles, got {arc}")
        return cls(spec.arcs)

    def to_spec(self) -> ArcSetSpec:
        return ArcSetSpec(arcs=[[lo, hi] for lo, hi in self._intervals])

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __repr__(self) -> str:
        return f"ArcSet({list(self._intervals)})"

    @property
    def is_full_circle(self) -> bool:
        lo, hi = self._intervals[0]
        return len(self._intervals) == 1 and hi - lo >= TWO_PI - FULL_CIRCLE_TOL

    @property
    def length(self) -> float:
        return sum(hi - lo for lo, hi in self._intervals)

    @property
    def endpoints(self) -> List[float]:
        if self.is_full_circle:
            return []
        return [v for arc in self._intervals for v in arc]

    def lift(self, t):
        """The representative of t in [origin, origin + 2*pi)."""
        return self.origin + np.mod(np.asarray(t, dtype=float) - self.origin, TWO_PI)

    def contains(self, t, tol: float = 0.0) -> np.ndarray:
        lifted = np.atleast_1d(self.lift(t))
        inside = np.zeros(lifted.shape, dtype=bool)
        for lo, hi in self._intervals:
            inside |= (lifted >= lo - tol) & (lifted <= hi + tol)
            # points just below origin lift to the top of the window
            inside |= (lifted - TWO_PI >= lo - tol) & (lifted - TWO_PI <= hi + tol)
        return inside

    def locate(self, lo: float, hi: float, tol: float = 1e-12) -> Tuple[int, float, float]:
        """Component index and the interval [lo, hi] in this set's coordinates."""
        length = hi - lo
        if not length > 0:
            raise InvalidArcSet(f"interval [{lo}, {hi}] has no positive length")
        if self.is_full_circle:
            return 0, lo, hi
        for index, (c_lo, c_hi) in enumerate(self._intervals):
            start = c_lo + math.fmod(math.fmod(lo - c_lo + tol, TWO_PI) + TWO_PI, TWO_PI) - tol
            if start >= c_lo - tol and start + length <= c_hi + tol:
                return index, start, start + length
        raise OutsideSet(f"interval [{lo}, {hi}] is not contained in {self}")

    def is_endpoint(self, t: float, tol: float = 1e-12) -> bool:
        return any(abs((t - v + math.pi) % TWO_PI - math.pi) <= tol for v in self.endpoints)

    def grid(self, count: int) -> np.ndarray:
        """count interior midpoints spread over E proportionally to arc length."""
        s = (np.arange(count) + 0.5) * self.length / count
        starts = np.cumsum([0.0] + [hi - lo for lo, hi in self._intervals])
        index = np.clip(np.searchsorted(starts, s, side='right') - 1, 0, len(self._intervals) - 1)
        los = np.array([lo for lo, _ in self._intervals])
        return los[index] + s - starts[index]


@dataclass(frozen=True)
class Cell:
    lo: float
    hi: float
    component: int

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Block:
    """H = union of contiguous cells, H_b = the bordering cells on each side."""
    n: int
    indices: Tuple[int, ...]
    H: Interval
    borders: Tuple[Interval, ...]

    @property
    def h_length(self) -> float:
        return self.H[1] - self.H[0]

    @property
    def hull(self) -> Interval:
        los = [self.H[0]] + [lo for lo, _ in self.borders]
        his = [self.H[1]] + [hi for _, hi in self.borders]
        return min(los), max(his)

    @property
    def border_arcs(self) -> Optional[ArcSet]:
        """H_b as an arc set; bordering cells that touch (modulo 2 pi) become one arc."""
        if not self.borders:
            return None
        pieces = sorted(self.borders)
        merged = [pieces[0]]
        for lo, hi in pieces[1:]:
            if abs(lo - merged[-1][1]) <= _TOUCH_TOL:
                merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        if len(merged) > 1 and abs(merged[-1][1] - TWO_PI - merged[0][0]) <= _TOUCH_TOL:
            merged = [(merged[-1][0], merged[0][1] + TWO_PI)] + merged[1:-1]
        return ArcSet(merged)

    @property
    def h_arcs(self) -> ArcSet:
        return ArcSet([self.H])


@dataclass(frozen=True)
class SmallPartition:
    n: int
    params: ParamSet
    cells: Tuple[Cell, ...]
    full_circle: bool = False

    def block(self, start: int, stop: int) -> Block:
        """The block of cells start..stop-1 (one component, contiguous)."""
        if not 0 <= start < stop <= len(self.cells):
            raise InvalidArcSet(f"block [{start}, {stop}) outside 0..{len(self.cells)}")
        chosen = self.cells[start:stop]
        component = chosen[0].component
        if any(c.component != component for c in chosen):
            raise InvalidArcSet(f"block [{start}, {stop}) spans several components")

        borders = []
        covers_all = self.full_circle and stop - start == len(self.cells)
        if start > 0 and self.cells[start - 1].component == component:
            borders.append((self.cells[start - 1].lo, self.cells[start - 1].hi))
        elif start == 0 and self.full_circle and not covers_all:
            last = self.cells[-1]
            borders.append((last.lo - TWO_PI, last.hi - TWO_PI))
        if stop < len(self.cells) and self.cells[stop].component == component:
            borders.append((self.cells[stop].lo, self.cells[stop].hi))
        elif stop == len(self.cells) and self.full_circle and not covers_all:
            first = self.cells[0]
            borders.append((first.lo + TWO_PI, first.hi + TWO_PI))
        if len(borders) == 2 and borders[0] == (borders[1][0] - TWO_PI, borders[1][1] - TWO_PI):
            borders.pop()
        return Block(n=self.n, indices=tuple(range(start, stop)),
                     H=(chosen[0].lo, chosen[-1].hi), borders=tuple(borders))

    @property
    def total_length(self) -> float:
        return sum(c.length for c in self.cells)


@typechecked
def partition_small(arcs: ArcSet, n: int, params: ParamSet, finest: bool = False) -> SmallPartition:
    """Split each component of length L into k equal small intervals.

    The default is k = ceil(L * n^kappa); finest=True takes the largest
    admissible k = floor(2 * L * n^kappa) instead. Either way every cell
    length lies in [1/(2 n^kappa), 1/n^kappa].
    """
    if n < 1:
        raise InvalidArcSet(f"n must be positive, got {n}")
    scale = float(n) ** params.kappa
    shortest, longest = 1 / (2 * scale), 1 / scale
    cells = []
    for index, (lo, hi) in enumerate(arcs):
        length = hi - lo
        if length * scale < 1 - 1e-12:
            raise ComponentTooShort(
                f"component {index} [{lo:.12g}, {hi:.12g}] has length {length:.6g} "
                f"< 1/n^kappa = {longest:.6g}")
        k = max(1, math.ceil(length * scale - 1e-9))
        if finest:
            k = max(k, math.floor(2 * length * scale + 1e-9))
        width = length / k
        if not shortest - 1e-12 <= width <= longest + 1e-12:
            raise ComponentTooShort(
                f"component {index} cannot be cut into cells of admissible length")
        cells.extend(Cell(lo + j * width, lo + (j + 1) * width if j < k - 1 else hi, index)
                     for j in range(k))
    log.debug("partitioned %s into %d small intervals (n=%d)", arcs, len(cells), n)
    return SmallPartition(n=n, params=params, cells=tuple(cells), full_circle=arcs.is_full_circle)


def block_properties(tset: 'TSet', tn: 'Evaluable', blk: Block, params: ParamSet,
                     dens: 'DensityModel', spec: Optional[QuadSpec] = None) -> PropertyReport:
    """Evaluate properties (I), (II-a), (II-b) and (III) of a block."""
    n = blk.n
    containment = tset.branch_containing(*blk.hull) is not None

    if blk.borders:
        values = functionals(tn, max(tn.degree, 1), blk.border_arcs, dens, params.p, spec)
        a_border, b_border = values.a, values.b
    else:
        a_border, b_border = 0.0, 0.0
    bound = float(n) ** (-params.gamma)

    return PropertyReport(
        I=containment,
        IIa=a_border is not None and a_border <= bound,
        IIb=b_border is not None and b_border <= bound,
        III=blk.h_length <= 4 * float(n) ** (params.gamma - params.kappa),
        a_border=a_border,
        b_border=b_border,
        h_length=blk.h_length,
    )
