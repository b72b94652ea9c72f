"""Fixed photon-number Fock sectors and dense operators acting on them.

Every object here lives on a single sector: ``m`` modes holding exactly ``n``
photons.  Basis states are ordered lexicographically *decreasing*, so the
two-mode, two-photon sector is ``[(2, 0), (1, 1), (0, 2)]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

ATOL_STRUCT = 1e-10
ATOL_PHYS = 1e-9


class BasisMismatchError(ValueError):
    """Raised when a state and an operator live on different sectors."""


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    # lexicographically decreasing: put as many photons as possible in front
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """All occupation vectors of ``m`` modes with ``n`` photons in total."""

    m: int
    n: int
    states: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    index: dict = field(repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def state_index(self, occupation: Sequence[int]) -> int:
        try:
            return self.index[tuple(int(c) for c in occupation)]
        except KeyError:
            raise KeyError(f"{tuple(occupation)} is not in the (m={self.m}, n={self.n}) sector") from None

    def ket(self, occupation: Sequence[int]) -> "BosonicState":
        amps = np.zeros(self.dim, dtype=complex)
        amps[self.state_index(occupation)] = 1.0
        return BosonicState(self, amps)

    def identity(self) -> "LinearOperator":
        return LinearOperator(self, np.eye(self.dim, dtype=complex))


@lru_cache(maxsize=None)
def enumerate_basis(m: int, n: int) -> FockBasis:
    """Return the ``m``-mode, ``n``-photon sector in canonical order.

    The dimension is ``C(n + m - 1, n)``.
    """
    if m < 1:
        raise ValueError(f"mode count must be >= 1, got {m}")
    if n < 0:
        raise ValueError(f"photon count must be >= 0, got {n}")
    states = tuple(_compositions(n, m))
    return FockBasis(m, n, states, {s: i for i, s in enumerate(states)})


def sector_dimension(m: int, n: int) -> int:
    return comb(n + m - 1, n)


def _check_same_basis(a: FockBasis, b: FockBasis) -> None:
    if a != b:
        raise BasisMismatchError(f"basis mismatch: (m={a.m}, n={a.n}) vs (m={b.m}, n={b.n})")


@dataclass(frozen=True, eq=False)
class BosonicState:
    """Normalized amplitude vector over a :class:`FockBasis`."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.basis.dim:
            raise ValueError(f"expected {self.basis.dim} amplitudes, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL_PHYS:
            raise ValueError(f"state is not normalized (norm={norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, basis: FockBasis, amplitudes) -> "BosonicState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(basis, amps / norm)

    def inner(self, other: "BosonicState") -> complex:
        """``<self|other>``."""
        _check_same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.state_index(occupation)])

    def projector(self) -> "LinearOperator":
        return LinearOperator(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))

    def phase(self, alpha: float) -> "BosonicState":
        return BosonicState(self.basis, np.exp(1j * alpha) * self.amplitudes)

    def allclose(self, other: "BosonicState", atol: float = ATOL_PHYS, up_to_phase: bool = False) -> bool:
        _check_same_basis(self.basis, other.basis)
        if up_to_phase:
            return abs(abs(self.inner(other)) - 1.0) <= atol
        return bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0))


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Dense complex ``dim x dim`` matrix over a :class:`FockBasis`."""

    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = self.basis.dim
        if mat.shape != (d, d):
            raise ValueError(f"operator shape {mat.shape} does not match basis dimension {d}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.basis, self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            _check_same_basis(self.basis, other.basis)
            return LinearOperator(self.basis, self.matrix @ other.matrix)
        return NotImplemented

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_basis(self.basis, other.basis)
        return LinearOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_basis(self.basis, other.basis)
        return LinearOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "LinearOperator":
        return LinearOperator(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "LinearOperator":
        return LinearOperator(self.basis, -self.matrix)

    def is_unitary(self, tol: float = ATOL_STRUCT) -> bool:
        return bool(np.allclose(self.matrix.conj().T @ self.matrix, np.eye(self.dim), atol=tol, rtol=0))

    def is_hermitian(self, tol: float = ATOL_STRUCT) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=tol, rtol=0))

    def commutes_with(self, other: "LinearOperator", tol: float = ATOL_STRUCT) -> bool:
        _check_same_basis(self.basis, other.basis)
        comm = self.matrix @ other.matrix - other.matrix @ self.matrix
        return bool(np.allclose(comm, 0, atol=tol))

    def allclose(self, other: "LinearOperator", atol: float = ATOL_STRUCT) -> bool:
        _check_same_basis(self.basis, other.basis)
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0))


def quadratic_operator(basis: FockBasis, i: int, j: int) -> LinearOperator:
    """Matrix of ``a_i^dagger a_j`` on ``basis``.

    Moves one photon from mode ``j`` to mode ``i`` with amplitude
    ``sqrt(n_j (n_i + 1))``; for ``i == j`` this is the number operator.
    """
    for k in (i, j):
        if not 0 <= k < basis.m:
            raise IndexError(f"mode index {k} out of range for {basis.m} modes")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, occ in enumerate(basis.states):
        if occ[j] == 0:
            continue
        if i == j:
            mat[col, col] = occ[i]
            continue
        target = list(occ)
        amp = np.sqrt(target[j])
        target[j] -= 1
        amp *= np.sqrt(target[i] + 1)
        target[i] += 1
        mat[basis.index[tuple(target)], col] = amp
    return LinearOperator(basis, mat)


def number_operator(basis: FockBasis, i: int) -> LinearOperator:
    return quadratic_operator(basis, i, i)


def apply(op: LinearOperator, psi: BosonicState) -> BosonicState:
    """Return ``op @ psi`` without renormalizing.

    Only norm-preserving operators are accepted, since the result must be a
    valid state; non-unitary branch maps go through :func:`apply_unnormalized`.
    """
    _check_same_basis(op.basis, psi.basis)
    return BosonicState(psi.basis, op.matrix @ psi.amplitudes)


def apply_unnormalized(op: LinearOperator, psi: BosonicState) -> np.ndarray:
    _check_same_basis(op.basis, psi.basis)
    return op.matrix @ psi.amplitudes


def expectation(psi: BosonicState, op: LinearOperator) -> complex:
    """``<psi| op |psi>``."""
    _check_same_basis(op.basis, psi.basis)
    return complex(np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes))


def hermitian_expm(generator: np.ndarray, coeff: complex = -1j) -> np.ndarray:
    """``exp(coeff * H)`` for Hermitian ``H`` via its eigendecomposition."""
    evals, evecs = np.linalg.eigh(generator)
    return (evecs * np.exp(coeff * evals)) @ evecs.conj().T
