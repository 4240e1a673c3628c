"""Dense evaluation of layered diagrams on (C^d)^(x strings).

Each string carries C^d.  Charge k on string s acts as clock tails times a
shift,

    c_s(k) = (Zhat^-k)^(x (s-1)) (x) Xhat^k (x) 1 (x) ... ,

which satisfies c_s(k) c_t(l) = q**(k*l) c_t(l) c_s(k) for s < t.  The tail
direction is pinned by requiring the single-qudit dictionary (X = c_2,
Y = c_1^-1, Z = zeta c_1 c_2^-1) to hold exactly; it is a derived constant
of the build, not an input.

Caps and cups are the tensors

    cap = d**(-1/4) * sum_m zeta**(m*m) |m, -m>,      cup = cap^dagger,

so a closed loop evaluates to sqrt(d) and the resolution of the identity
holds on the nose.  The one relation these tensors miss is the zig-zag,
which they satisfy only up to d**(-1/2) per straightening; the evaluator
therefore multiplies by d**(excess/4) where ``excess`` is the turn count
beyond the strand topology's minimum (see ``ir.turn_excess``).  With that
normalization the dense value agrees with the symbolic rewrite value
exactly, not merely up to scale.

Braids are expanded through their charge-sum definition with the principal
branch of 1/sqrt(omega*d).  The operator is finally restricted to the qudit
basis: the images of the charged caps, pairing strings (2i-1, 2i).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..algebra import Operator, StateVector
from ..scalars import sqrt_omega_d, zeta
from .ir import (
    BRAID_NEG,
    BRAID_POS,
    CAP,
    CHARGE,
    CUP,
    MULTICHARGE,
    STRAND,
    Diagram,
    DiagramError,
    turn_excess,
)

__all__ = ["DiagramValue", "evaluate_dense", "pair_isometry", "basis_isometry"]


@dataclass(frozen=True)
class DiagramValue:
    """Evaluated diagram: a d**n_out x d**n_in matrix in the qudit basis."""

    d: int
    n_in: int
    n_out: int
    array: np.ndarray

    def as_operator(self) -> Operator:
        if self.n_in != self.n_out:
            raise DiagramError(f"not square: {self.n_in} qudits in, {self.n_out} out")
        return Operator(self.d, self.n_in, self.array)

    def as_state(self) -> StateVector:
        if self.n_in != 0:
            raise DiagramError("diagram has inputs; not a state")
        return StateVector(self.d, self.n_out, self.array.reshape(-1))

    def scalar(self) -> complex:
        if self.n_in or self.n_out:
            raise DiagramError("diagram has boundary points; not a scalar")
        return complex(self.array.reshape(-1)[0])


@lru_cache(maxsize=None)
def _cap_matrix(d: int) -> np.ndarray:
    z = zeta(d)
    cap = np.zeros((d, d), dtype=complex)
    for m in range(d):
        cap[m, (-m) % d] = z ** ((m * m) % (d * d))
    return cap * d**-0.25


@lru_cache(maxsize=None)
def pair_isometry(d: int) -> np.ndarray:
    """d*d x d isometry whose columns are the charged-cap qudit states.

    Each column is d**(-1/4) times the charged cap tensor (which itself
    carries d**(-1/4)), giving unit-norm, mutually orthogonal states.
    """
    z = zeta(d)
    iso = np.zeros((d * d, d), dtype=complex)
    for k in range(d):
        for m in range(d):
            iso[m * d + ((-m + k) % d), k] = d**-0.5 * z ** ((m * m) % (d * d)) * z ** ((-2 * k * m) % (d * d))
    return iso


@lru_cache(maxsize=None)
def basis_isometry(d: int, n: int) -> np.ndarray:
    """Restriction to the n-qudit basis drawn as charged caps.

    Columns are tensor products of single-pair cap states times the tail
    phase q**(-sum_{i<j} k_i k_j) that the charge order (qudit 1 highest)
    produces when the clock tails of later charges sweep earlier pairs.
    """
    iso = pair_isometry(d)
    full = iso
    for _ in range(n - 1):
        full = np.kron(full, iso)
    z = zeta(d)
    phases = np.ones(d**n, dtype=complex)
    for idx in range(d**n):
        rem, digits = idx, []
        for _ in range(n):
            digits.append(rem % d)
            rem //= d
        digits.reverse()
        e = -sum(digits[i] * digits[j] for i in range(n) for j in range(i + 1, n))
        phases[idx] = z ** ((2 * e) % (d * d))
    return full * phases[np.newaxis, :]


def _apply_charge(tensor: np.ndarray, s: int, k: int, d: int) -> np.ndarray:
    """c_s(k) on the row axes of tensor (shape [d]*width + [cols])."""
    k = k % d
    if k == 0:
        return tensor
    out = np.roll(tensor, k, axis=s - 1)
    if s > 1:
        z = zeta(d)
        qpow = z ** ((2 * (-k) * np.arange(d)) % (d * d))  # q**(-k*m)
        for axis in range(s - 1):
            shape = [1] * tensor.ndim
            shape[axis] = d
            out = out * qpow.reshape(shape)
    return out


def _apply_cap(tensor: np.ndarray, p: int, d: int) -> np.ndarray:
    cap = _cap_matrix(d)
    out = np.multiply.outer(cap, tensor)  # axes (m, mm, old...)
    return np.moveaxis(out, (0, 1), (p - 1, p))


def _apply_cup(tensor: np.ndarray, p: int, d: int) -> np.ndarray:
    cup = _cap_matrix(d).conj()
    return np.tensordot(cup, tensor, axes=([0, 1], [p - 1, p]))


def _apply_braid(tensor: np.ndarray, p: int, d: int, positive: bool) -> np.ndarray:
    norm = 1.0 / sqrt_omega_d(d)
    if not positive:
        norm = np.conj(norm)
    acc = np.zeros_like(tensor)
    for k in range(d):
        if positive:
            term = _apply_charge(tensor, p, k, d)
            term = _apply_charge(term, p + 1, -k, d)
        else:
            term = _apply_charge(tensor, p + 1, k, d)
            term = _apply_charge(term, p, -k, d)
        acc += term
    return acc * norm


def _apply_multicharge(tensor: np.ndarray, items, d: int) -> np.ndarray:
    z = zeta(d)
    twist = 0
    ks = [k for _, k in items]
    for i in range(len(ks)):
        for j in range(i + 1, len(ks)):
            twist -= ks[i] * ks[j]
    out = tensor
    for p, k in reversed(items):  # rightmost charge acts first
        out = _apply_charge(out, p, k, d)
    return out * z ** (twist % (d * d))


def evaluate_dense(diag: Diagram) -> DiagramValue:
    """Slice-by-slice dense value, restricted to the qudit basis.

    The input restriction is applied before the slices run, so the column
    space is d**n_in rather than d**top throughout.
    """
    d = diag.d
    n_in = diag.top // 2
    cols = d**n_in
    if n_in:
        tensor = basis_isometry(d, n_in).reshape([d] * diag.top + [cols])
    else:
        tensor = np.ones((1,), dtype=complex)
    width = diag.top
    for s in diag.slices:
        if s.kind == CHARGE:
            tensor = _apply_charge(tensor, s.pos, s.k, d)
        elif s.kind == CAP:
            tensor = _apply_cap(tensor, s.pos, d)
            width += 2
        elif s.kind == CUP:
            tensor = _apply_cup(tensor, s.pos, d)
            width -= 2
        elif s.kind == BRAID_POS:
            tensor = _apply_braid(tensor, s.pos, d, True)
        elif s.kind == BRAID_NEG:
            tensor = _apply_braid(tensor, s.pos, d, False)
        elif s.kind == MULTICHARGE:
            tensor = _apply_multicharge(tensor, s.items, d)
        elif s.kind == STRAND:
            pass
    mat = tensor.reshape(d**width, cols)
    scale = diag.scale.to_complex() * float(d) ** (turn_excess(diag, close_boundaries=True) / 4)
    n_out = width // 2
    if n_out:
        mat = basis_isometry(d, n_out).conj().T @ mat
    return DiagramValue(d, n_in, n_out, scale * mat)
