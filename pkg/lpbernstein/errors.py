from typing import Sequence


class LabError(Exception):
    """Base class for every error raised by this package."""


class InvalidPolynomial(LabError, ValueError):
    """Polynomial coefficients or sample data are malformed."""


class InvalidArcSet(LabError, ValueError):
    """Intervals do not describe a finite union of disjoint arcs."""


class ComponentTooShort(InvalidArcSet):
    """A component of E is shorter than one small interval."""


class InvalidParameters(LabError, ValueError):
    """The (p, theta, kappa, gamma) block violates its constraints."""


class OutsideSet(LabError, ValueError):
    """A point or interval does not lie inside E."""


class TSetStructureError(LabError):
    """A trigonometric polynomial does not generate a valid T-set."""

    def __init__(self, message: str, critical_values: Sequence[float] = ()):
        self.critical_values = list(critical_values)
        if self.critical_values:
            values = ", ".join(f"{v:.12g}" for v in self.critical_values)
            message = f"{message} (critical values of U: {values})"
        super().__init__(message)


class EndpointSingularity(LabError, ValueError):
    """The closed-form density was asked for at an endpoint of E."""


class BranchProximity(LabError, ValueError):
    """A point is too close to a branch endpoint for the branch map."""


class SolverFailure(LabError):
    """The collocation solve did not reach its residual target."""

    def __init__(self, message: str, residual: float, degree: int):
        self.residual = residual
        self.degree = degree
        super().__init__(f"{message} (residual={residual:.3e}, M={degree})")


class HypothesisViolated(LabError, ValueError):
    """A lemma was asked to verify inputs that do not meet its hypothesis."""


class UndefinedRatio(LabError, ValueError):
    """a or b was requested while A(E) or B(E) vanishes."""
