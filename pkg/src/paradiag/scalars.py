"""Exact phase arithmetic for the roots of unity q and zeta, and the Gauss sum.

Conventions fixed here and relied on everywhere else:

* ``q = exp(2*pi*i/d)`` is the primitive d-th root of unity.
* ``zeta`` is a square root of q with ``zeta**(d*d) == 1``.  The branch is
  ``exp(i*pi/d)`` for even d and ``q**((d+1)//2)`` for odd d; both choices
  satisfy the two defining identities, and pinning one makes every
  phase-tagged value in the test suite deterministic.
* ``omega = d**-0.5 * sum(zeta**(j*j) for j in range(d))`` has modulus 1.

Exact scalars of the form ``zeta**a * d**(b/2)`` are kept as integer
exponents in :class:`PhaseExponent`; everything else (sums over Z_d) lives
in ordinary complex floats guarded by :class:`Tolerance`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DimensionError",
    "PhaseExponent",
    "Tolerance",
    "zeta",
    "zeta_exponent_base",
    "omega",
    "sqrt_omega_d",
    "equal_up_to_global_phase",
    "global_phase_deviation",
]


class DimensionError(ValueError):
    """Raised for qudit dimensions the operation cannot accept."""


def _check_dim(d: int, minimum: int = 1) -> None:
    if not isinstance(d, (int, np.integer)) or d < minimum:
        raise DimensionError(f"invalid dimension d={d!r} (need integer >= {minimum})")


def zeta_exponent_base(d: int) -> float:
    """Return beta such that zeta(d) = exp(i*pi*beta); beta = 1/d or (d+1)/d."""
    _check_dim(d)
    if d % 2 == 0:
        return 1.0 / d
    return (d + 1) / d


def zeta(d: int) -> complex:
    """The fixed square root of q = exp(2*pi*i/d) with zeta**(d*d) == 1."""
    return cmath.exp(1j * math.pi * zeta_exponent_base(d))


def omega(d: int) -> complex:
    """Normalized quadratic Gauss sum d**-0.5 * sum_j zeta**(j*j)."""
    _check_dim(d)
    z = zeta(d)
    return sum(z ** (j * j) for j in range(d)) / math.sqrt(d)


def sqrt_omega_d(d: int) -> complex:
    """Principal square root of omega(d)*d, argument in (-pi/2, pi/2].

    This normalizes the braid expansion; a sign flip would only contribute a
    global phase.
    """
    w = omega(d) * d
    r = cmath.sqrt(w)
    if r.real < 0 or (abs(r.real) < 1e-15 and r.imag < 0):
        r = -r
    return r


@dataclass(frozen=True)
class PhaseExponent:
    """Exact scalar zeta**zeta_exp * d**(sqrtd_exp/2), or the absorbing zero.

    ``zeta_exp`` is reduced modulo d*d (the order of zeta divides d*d for
    both branch choices).  ``sqrtd_exp`` may be negative.  Multiplication
    adds exponents; zero absorbs.
    """

    d: int
    zeta_exp: int = 0
    sqrtd_exp: int = 0
    zero_flag: bool = False

    def __post_init__(self) -> None:
        _check_dim(self.d)
        object.__setattr__(self, "zeta_exp", 0 if self.zero_flag else self.zeta_exp % (self.d * self.d))
        if self.zero_flag:
            object.__setattr__(self, "sqrtd_exp", 0)

    @classmethod
    def one(cls, d: int) -> "PhaseExponent":
        return cls(d)

    @classmethod
    def zero(cls, d: int) -> "PhaseExponent":
        return cls(d, zero_flag=True)

    @classmethod
    def from_q_power(cls, d: int, e: int) -> "PhaseExponent":
        """q**e as a PhaseExponent (q = zeta**2)."""
        return cls(d, zeta_exp=2 * e)

    def __mul__(self, other: "PhaseExponent") -> "PhaseExponent":
        if self.d != other.d:
            raise DimensionError("cannot multiply PhaseExponents of different dimension")
        if self.zero_flag or other.zero_flag:
            return PhaseExponent.zero(self.d)
        return PhaseExponent(self.d, self.zeta_exp + other.zeta_exp, self.sqrtd_exp + other.sqrtd_exp)

    def times_zeta(self, e: int) -> "PhaseExponent":
        return self * PhaseExponent(self.d, zeta_exp=e)

    def times_q(self, e: int) -> "PhaseExponent":
        return self * PhaseExponent.from_q_power(self.d, e)

    def times_sqrtd(self, e: int = 1) -> "PhaseExponent":
        return self * PhaseExponent(self.d, sqrtd_exp=e)

    def conjugate(self) -> "PhaseExponent":
        if self.zero_flag:
            return self
        return PhaseExponent(self.d, -self.zeta_exp, self.sqrtd_exp)

    def to_complex(self) -> complex:
        if self.zero_flag:
            return 0j
        # reduce the angle exactly mod 2*pi before exponentiating
        num = (self.d + 1) * self.zeta_exp if self.d % 2 else self.zeta_exp
        angle = Fraction(num, self.d) % 2
        return cmath.exp(1j * math.pi * float(angle)) * self.d ** (self.sqrtd_exp / 2)


@dataclass(frozen=True)
class Tolerance:
    """Absolute comparison tolerance for floating checks."""

    eps: float = 1e-9

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"tolerance must be positive, got {self.eps!r}")


def global_phase_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm of a - c*b where c is the best unit phase read off from b.

    The phase is fixed by the largest-magnitude entry of b, so modulus
    mismatches are reported as genuine deviations rather than rescaled away.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    pivot = b[idx]
    if abs(pivot) == 0.0:
        return float(np.max(np.abs(a)))
    ratio = a[idx] / pivot
    c = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.max(np.abs(a - c * b)))


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: Tolerance = Tolerance()) -> bool:
    """True iff a == c*b entrywise (max norm) for some unit scalar c."""
    return global_phase_deviation(a, b) <= tol.eps
