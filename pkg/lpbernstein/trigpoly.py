"""Real trigonometric polynomials: coefficient algebra and evaluation."""
import logging
import math
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev
from scipy.optimize import brentq
from typeguard import typechecked

from . import settings
from .errors import InvalidArcSet, InvalidPolynomial
from .protocols import Evaluable

log = logging.getLogger(__name__)

Interval = Tuple[float, float]


def as_output(values: np.ndarray, t) -> Union[float, np.ndarray]:
    return float(values) if np.ndim(t) == 0 else values


class TrigPoly:
    """a_0 + sum_k (a_k cos kt + b_k sin kt), k = 1..degree.

    ``cos_coeffs`` holds a_0..a_d, ``sin_coeffs`` holds b_1..b_d. Values
    are immutable after construction.
    """

    def __init__(self, cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = (),
                 degree: Optional[int] = None) -> None:
        a = np.atleast_1d(np.asarray(cos_coeffs, dtype=float))
        b = np.atleast_1d(np.asarray(sin_coeffs, dtype=float))
        if a.ndim != 1 or b.ndim != 1 or a.size == 0:
            raise InvalidPolynomial("coefficients must be non-empty flat sequences")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidPolynomial("coefficients must be finite")

        needed = max(a.size - 1, b.size)
        if degree is None:
            degree = needed
        elif degree < 0:
            raise InvalidPolynomial(f"degree must be nonnegative, got {degree}")
        else:
            nonzero = [k for k in range(1, a.size) if a[k] != 0]
            nonzero += [k for k in range(1, b.size + 1) if b[k - 1] != 0]
            if nonzero and max(nonzero) > degree:
                raise InvalidPolynomial(
                    f"declared degree {degree} is below highest nonzero index {max(nonzero)}")
            needed = degree

        self._degree = int(degree)
        self._cos = np.zeros(self._degree + 1)
        self._sin = np.zeros(self._degree + 1)
        self._cos[:min(a.size, self._degree + 1)] = a[:self._degree + 1]
        self._sin[1:min(b.size, self._degree) + 1] = b[:self._degree]
        self._cos.flags.writeable = False
        self._sin.flags.writeable = False

    @classmethod
    def constant(cls, c: float) -> 'TrigPoly':
        return cls([c])

    @classmethod
    def zero(cls) -> 'TrigPoly':
        return cls([0.0])

    @classmethod
    def from_spec(cls, spec) -> 'TrigPoly':
        """Build from a PolySpec (cos a_0..a_N, sin b_1..b_N)."""
        return cls(spec.cos, spec.sin, degree=spec.N)

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def cos_coeffs(self) -> np.ndarray:
        return self._cos

    @property
    def sin_coeffs(self) -> np.ndarray:
        return self._sin[1:]

    @property
    def is_zero(self) -> bool:
        return not (np.any(self._cos) or np.any(self._sin))

    def eval(self, t):
        """Clenshaw recurrence for the cosine and sine series together."""
        t_arr = np.asarray(t, dtype=float)
        x = np.cos(t_arr)
        a, b = self._cos, self._sin
        if self._degree == 0:
            return as_output(np.full(x.shape, a[0]), t)

        two_x = 2.0 * x
        ua1 = np.zeros(x.shape)
        ua2 = np.zeros(x.shape)
        ub1 = np.zeros(x.shape)
        ub2 = np.zeros(x.shape)
        for k in range(self._degree, 0, -1):
            ua1, ua2 = a[k] + two_x * ua1 - ua2, ua1
            ub1, ub2 = b[k] + two_x * ub1 - ub2, ub1
        values = a[0] + ua1 * x - ua2 + ub1 * np.sin(t_arr)
        return as_output(values, t)

    __call__ = eval

    def derivative(self) -> 'TrigPoly':
        k = np.arange(self._degree + 1)
        return TrigPoly(k * self._sin, (-k * self._cos)[1:], degree=self._degree)

    @cached_property
    def _derivative(self) -> 'TrigPoly':
        return self.derivative()

    def eval_derivative(self, t):
        return self._derivative.eval(t)

    def eval_increment(self, v: float, h) -> np.ndarray:
        """P(v + h) - P(v) without cancellation for tiny h."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        k = np.arange(1, self._degree + 1)
        mid = k[None, :] * (v + 0.5 * h[:, None])
        half = np.sin(0.5 * k[None, :] * h[:, None])
        terms = -2 * self._cos[1:] * np.sin(mid) * half + 2 * self._sin[1:] * np.cos(mid) * half
        return terms.sum(axis=1)

    def to_complex(self) -> np.ndarray:
        """Coefficients c_{-d}..c_d of sum c_k e^{ikt}."""
        d = self._degree
        c = np.zeros(2 * d + 1, dtype=complex)
        c[d] = self._cos[0]
        pos = (self._cos[1:] - 1j * self._sin[1:]) / 2
        c[d + 1:] = pos
        c[:d] = np.conj(pos[::-1])
        return c

    @classmethod
    def from_complex(cls, c: np.ndarray) -> 'TrigPoly':
        d = (len(c) - 1) // 2
        pos = np.asarray(c[d:])
        return cls(np.concatenate([[pos[0].real], 2 * pos[1:].real]), -2 * pos[1:].imag, degree=d)

    def _padded(self, degree: int) -> Tuple[np.ndarray, np.ndarray]:
        a = np.zeros(degree + 1)
        b = np.zeros(degree + 1)
        a[:self._degree + 1] = self._cos
        b[:self._degree + 1] = self._sin
        return a, b

    def __add__(self, other: Union['TrigPoly', float]) -> 'TrigPoly':
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(float(other))
        d = max(self._degree, other._degree)
        a1, b1 = self._padded(d)
        a2, b2 = other._padded(d)
        return TrigPoly(a1 + a2, (b1 + b2)[1:], degree=d)

    __radd__ = __add__

    def __neg__(self) -> 'TrigPoly':
        return TrigPoly(-self._cos, -self._sin[1:], degree=self._degree)

    def __sub__(self, other: Union['TrigPoly', float]) -> 'TrigPoly':
        return self + (-other)

    def __mul__(self, other: Union['TrigPoly', float]) -> 'TrigPoly':
        if isinstance(other, TrigPoly):
            return product(self, other)
        c = float(other)
        return TrigPoly(c * self._cos, c * self._sin[1:], degree=self._degree)

    __rmul__ = __mul__

    def allclose(self, other: 'TrigPoly', atol: float = 1e-12) -> bool:
        d = max(self._degree, other._degree)
        a1, b1 = self._padded(d)
        a2, b2 = other._padded(d)
        return bool(np.allclose(a1, a2, rtol=0, atol=atol)
                    and np.allclose(b1, b2, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return (f"TrigPoly(degree={self._degree}, cos={self._cos.tolist()}, "
                f"sin={self.sin_coeffs.tolist()})")


def sample_angles(m: int) -> np.ndarray:
    """The 2m+1 equispaced angles 2*pi*j/(2m+1)."""
    return 2 * np.pi * np.arange(2 * m + 1) / (2 * m + 1)


def from_samples(values: Sequence[float], m: int) -> TrigPoly:
    """Degree-<=m interpolant of values taken at sample_angles(m)."""
    values = np.asarray(values, dtype=float)
    if m < 0 or values.shape != (2 * m + 1,):
        raise InvalidPolynomial(
            f"expected {2 * m + 1} samples for m={m}, got shape {values.shape}")
    c = np.fft.rfft(values) / (2 * m + 1)
    return TrigPoly(np.concatenate([[c[0].real], 2 * c[1:].real]), -2 * c[1:].imag, degree=m)


def product(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    """Product by exact sampling and coefficient recovery."""
    m = p.degree + q.degree
    t = sample_angles(m)
    return from_samples(p.eval(t) * q.eval(t), m)


def product_by_expansion(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    """Product by product-to-sum, i.e. convolution of complex coefficients."""
    return TrigPoly.from_complex(np.convolve(p.to_complex(), q.to_complex()))


def derivative(p: TrigPoly) -> TrigPoly:
    return p.derivative()


@typechecked
def cheb_compose(k: int, u: TrigPoly) -> TrigPoly:
    """Coefficients of T_k(U(t)) by the three-term Chebyshev recurrence.

    Only usable while |U| stays moderate on the whole circle: off E the
    composite grows like |U|^k and its coefficients swamp the values on E.
    Use ChebyshevComposite for evaluation at high k.
    """
    if k < 0:
        raise InvalidPolynomial(f"Chebyshev index must be nonnegative, got {k}")
    previous, current = TrigPoly.constant(1.0), u
    if k == 0:
        return previous
    for _ in range(k - 1):
        previous, current = current, 2.0 * product(u, current) - previous
    return current


class ChebyshevComposite:
    """S(U(t)) for an algebraic polynomial S given by Chebyshev coefficients.

    Evaluated pointwise, which stays accurate on E = U^{-1}[-1, 1] for any
    degree of S.
    """

    def __init__(self, cheb_coeffs: Sequence[float], u: TrigPoly) -> None:
        self.cheb_coeffs = np.asarray(cheb_coeffs, dtype=float)
        self.u = u
        self._cheb_derivative = chebyshev.chebder(self.cheb_coeffs) if self.cheb_coeffs.size > 1 \
            else np.zeros(1)

    @classmethod
    def chebyshev(cls, k: int, u: TrigPoly) -> 'ChebyshevComposite':
        coeffs = np.zeros(k + 1)
        coeffs[k] = 1.0
        return cls(coeffs, u)

    @property
    def degree(self) -> int:
        return (self.cheb_coeffs.size - 1) * self.u.degree

    def eval(self, t):
        return as_output(chebyshev.chebval(np.asarray(self.u.eval(t)), self.cheb_coeffs), t)

    __call__ = eval

    def eval_derivative(self, t):
        inner = np.asarray(self.u.eval(t))
        outer = chebyshev.chebval(inner, self._cheb_derivative)
        values = outer * np.asarray(self.u.eval_derivative(t))
        return as_output(values, t)

    def to_trigpoly(self) -> TrigPoly:
        m = self.degree
        return from_samples(np.asarray(self.eval(sample_angles(m))), m)


def sup_norm(p: Evaluable, intervals: Iterable[Interval]) -> float:
    """max |P| over a union of closed intervals.

    Each interval is oversampled and every local extremum (a sign change
    of P') is polished with brentq; interval endpoints are included.
    """
    best = -1.0
    for lo, hi in intervals:
        length = hi - lo
        npts = (8 * p.degree + 16) * max(1, math.ceil(length / math.pi))
        t = np.linspace(lo, hi, npts)
        best = max(best, float(np.max(np.abs(p.eval(t)))))
        if p.degree == 0:
            continue
        slope = np.asarray(p.eval_derivative(t))
        for i in np.nonzero(slope[:-1] * slope[1:] < 0)[0]:
            root = brentq(lambda s: float(p.eval_derivative(s)), t[i], t[i + 1],
                          xtol=settings.ANGLE_TOL)
            best = max(best, abs(float(p.eval(root))))
    if best < 0:
        raise InvalidArcSet("sup norm over an empty set")
    return best
