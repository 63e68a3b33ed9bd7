from typing import TYPE_CHECKING, Protocol

import numpy as np

if TYPE_CHECKING:
    from .arcsets import ArcSet


class Evaluable(Protocol):
    """Anything that behaves like a real trigonometric polynomial."""

    @property
    def degree(self) -> int:
        """The (nominal) degree."""

    def eval(self, t) -> np.ndarray:
        """Values at the angles t."""

    def eval_derivative(self, t) -> np.ndarray:
        """Values of the derivative at the angles t."""


class DensityModel(Protocol):
    """The equilibrium density of Gamma_E, whatever computes it."""
    arcs: 'ArcSet'  # The set E the density lives on.

    def density(self, t) -> np.ndarray:
        """Density at interior angles t (no endpoint checks)."""

    @property
    def total_mass(self) -> float:
        """Mass of the represented measure, 1 up to discretization."""

    def density_offset(self, anchor: float, side: int, delta) -> np.ndarray:
        """Density at anchor + side*delta, anchor an endpoint of E, accurate for tiny delta."""
