from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from marshmallow_dataclass import class_schema

from . import settings
from .errors import InvalidParameters


class Family(Enum):
    """Polynomial families a sweep can draw T_n from."""
    RANDOM = "random"
    CHEBYSHEV_COMPOSED = "chebyshev_composed"


@dataclass
class ArcSetSpec:
    """JSON form of an ArcSet: {"arcs": [[lo, hi], ...]} in radians."""
    arcs: List[List[float]]


@dataclass
class PolySpec:
    """JSON form of U_N: cos holds a_0..a_N, sin holds b_1..b_N."""
    N: int
    cos: List[float]
    sin: List[float] = field(default_factory=list)


@dataclass
class ParamSet:
    p: float
    theta: float = 0.25
    kappa: float = 1 / 32
    gamma: float = 1 / 65

    @classmethod
    def for_p(cls, p: float) -> 'ParamSet':
        """The standard choice theta=1/4, kappa=1/32, gamma=min(1/65, p/2)."""
        return cls(p=p, theta=0.25, kappa=1 / 32, gamma=min(1 / 65, p / 2))

    def validate(self, theorem: bool = False) -> 'ParamSet':
        if not self.p > 0:
            raise InvalidParameters(f"p must be positive, got {self.p}")
        if theorem and not self.p < 1:
            raise InvalidParameters(f"theorem runs need 0 < p < 1, got {self.p}")
        if not 0.5 > self.theta > 4 * self.kappa:
            raise InvalidParameters(
                f"need 1/2 > theta > 4*kappa, got theta={self.theta}, kappa={self.kappa}")
        if not 0 < self.gamma < self.kappa / 2:
            raise InvalidParameters(
                f"need 0 < gamma < kappa/2, got gamma={self.gamma}, kappa={self.kappa}")
        if self.p <= 1 and (1 - 2 * self.theta) * self.p < self.gamma:
            raise InvalidParameters(
                f"need (1 - 2*theta)*p >= gamma when p <= 1, got "
                f"{(1 - 2 * self.theta) * self.p} < {self.gamma}")
        return self


@dataclass
class QuadSpec:
    rel_tol: float = settings.REL_TOL
    max_subdivisions: int = settings.MAX_SUBDIVISIONS
    endpoint_substitution: bool = True

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParameters(f"rel_tol must be positive, got {self.rel_tol}")


@dataclass
class FunctionalValues:
    A: float
    B: float
    a: Optional[float]
    b: Optional[float]
    quad_error: float
    flagged: bool = False


@dataclass
class PropertyReport:
    I: bool
    IIa: bool
    IIb: bool
    III: bool
    a_border: Optional[float]
    b_border: Optional[float]
    h_length: float


@dataclass
class ExperimentConfig:
    p_values: List[float]
    n_ladder: List[int]
    name: str = "experiment"
    tset: Optional[PolySpec] = None
    arcs: Optional[ArcSetSpec] = None
    single_arc_beta: Optional[float] = None
    seeds: List[int] = field(default_factory=lambda: list(range(10)))
    family: Family = field(default=Family.RANDOM, metadata={"by_value": True})
    quad: QuadSpec = field(default_factory=QuadSpec)
    collocation_degree: int = 16
    output_dir: str = "out"
    block: Optional[List[int]] = None
    allow_p_ge_1: bool = False

    def validate(self) -> 'ExperimentConfig':
        sources = [s for s in (self.tset, self.arcs, self.single_arc_beta) if s is not None]
        if len(sources) != 1:
            raise InvalidParameters(
                "exactly one of tset, arcs, single_arc_beta must be given")
        if not self.p_values:
            raise InvalidParameters("p_values must not be empty")
        for p in self.p_values:
            if p <= 0 or (p >= 1 and not self.allow_p_ge_1):
                raise InvalidParameters(f"p values must lie in (0, 1), got {p}")
        if not self.n_ladder or any(n < 1 for n in self.n_ladder):
            raise InvalidParameters("n ladder must hold positive integers")
        if any(b <= a for a, b in zip(self.n_ladder, self.n_ladder[1:])):
            raise InvalidParameters(f"n ladder must be strictly increasing: {self.n_ladder}")
        if self.block is not None and (len(self.block) != 2 or self.block[1] <= self.block[0]):
            raise InvalidParameters(f"block must be [start, stop) cell indices: {self.block}")
        return self


@dataclass(order=True)
class SweepRow:
    n: int
    p: float
    seed: Optional[int]
    k: Optional[int]
    A: float
    B: float
    ratio: float
    quad_error: float
    flagged: bool = False
    wall_time: float = 0.0


@dataclass
class SweepSummary:
    name: str
    p: float
    battery_size: int
    n_values: List[int]
    maxima: List[float]
    bound_passed: bool
    trend_passed: bool
    flagged_rows: int = 0

    @property
    def passed(self) -> bool:
        return self.bound_passed and self.trend_passed


@dataclass
class MarginRecord:
    lemma: str
    n: int
    p: float
    lhs: float
    rhs: float
    slack: float
    quad_error: float
    seed: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.slack >= -self.quad_error


arc_set_spec_schema = class_schema(ArcSetSpec)()
poly_spec_schema = class_schema(PolySpec)()
experiment_config_schema = class_schema(ExperimentConfig)()
sweep_row_schema = class_schema(SweepRow)()
sweep_summary_schema = class_schema(SweepSummary)()
margin_record_schema = class_schema(MarginRecord)()
