"""Beam splitters, dispersive parity phases and qutrit encodings on Fock sectors.

Phase convention: a beam splitter with angles ``(theta, phi)`` maps the
annihilation operators as

    U a U^dag = cos(theta/2) a - e^{i phi} sin(theta/2) b
    U b U^dag = e^{-i phi} sin(theta/2) a + cos(theta/2) b

so that ``U|1,1> = (sin(theta) e^{i phi}/sqrt2)|2,0> + cos(theta)|1,1>
- (sin(theta) e^{-i phi}/sqrt2)|0,2>``.  The generator is therefore
``U = exp[(theta/2)(e^{i phi} a^dag b - e^{-i phi} b^dag a)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock_core import (
    ATOL_PHYS,
    BosonicState,
    FockBasis,
    LinearOperator,
    enumerate_basis,
    hermitian_expm,
    number_operator,
    quadratic_operator,
)

TWO_PI = 2.0 * np.pi


def canonical_angles(theta: float, phi: float) -> tuple[float, float]:
    """Fold ``(theta, phi)`` into ``theta in [0, pi]``, ``phi in [0, 2pi)``.

    ``(-theta, phi + pi)`` is the same beam splitter exactly.  Reducing
    ``theta`` modulo ``2pi`` multiplies an ``n``-photon unitary by ``(-1)^n``,
    a global phase.
    """
    theta = float(theta)
    phi = float(phi)
    theta = (theta + np.pi) % TWO_PI - np.pi
    if theta < 0:
        theta, phi = -theta, phi + np.pi
    phi %= TWO_PI
    if np.isclose(phi, TWO_PI, rtol=0, atol=1e-15):
        phi = 0.0
    return theta, phi


@dataclass(frozen=True)
class BeamSplitterParams:
    """Angles of a beam splitter and the mode pairs it mixes.

    Each entry of ``mode_pairs`` is ``(upper, lower)``.  Several pairs model a
    splitter that acts identically on every internal degree of freedom, e.g.
    ``((0, 2), (1, 3))`` for H and V polarizations.
    """

    theta: float
    phi: float = 0.0
    mode_pairs: tuple[tuple[int, int], ...] = ((0, 1),)

    def __post_init__(self):
        pairs = tuple(tuple(int(k) for k in p) for p in self.mode_pairs)
        seen: set[int] = set()
        for p in pairs:
            if len(p) != 2 or p[0] == p[1]:
                raise ValueError(f"invalid mode pair {p}")
            if seen.intersection(p):
                raise ValueError(f"mode pairs overlap: {pairs}")
            seen.update(p)
        object.__setattr__(self, "mode_pairs", pairs)

    def canonical(self) -> "BeamSplitterParams":
        theta, phi = canonical_angles(self.theta, self.phi)
        return BeamSplitterParams(theta, phi, self.mode_pairs)

    def validate_for(self, basis: FockBasis) -> None:
        for p in self.mode_pairs:
            if max(p) >= basis.m or min(p) < 0:
                raise ValueError(f"mode pair {p} invalid for {basis.m} modes")


@dataclass(frozen=True)
class ModeGrouping:
    """Partition of the modes into an upper and a lower transmission line."""

    upper: tuple[int, ...]
    lower: tuple[int, ...]

    def __post_init__(self):
        upper = tuple(int(k) for k in self.upper)
        lower = tuple(int(k) for k in self.lower)
        if not upper or not lower:
            raise ValueError("both groups must be non-empty")
        if set(upper) & set(lower) or len(set(upper)) != len(upper) or len(set(lower)) != len(lower):
            raise ValueError("each mode must be assigned exactly once")
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @classmethod
    def two_mode(cls) -> "ModeGrouping":
        return cls((0,), (1,))

    def validate_for(self, basis: FockBasis) -> None:
        modes = sorted(self.upper + self.lower)
        if modes != list(range(basis.m)):
            raise ValueError(f"grouping {self} does not cover modes 0..{basis.m - 1} exactly once")


def bs_hamiltonian(basis: FockBasis, p: BeamSplitterParams) -> LinearOperator:
    """Hermitian generator ``H`` with ``U_BS = exp(-i H)``.

    ``H = (i theta/2) sum_pairs (e^{i phi} a^dag b - e^{-i phi} b^dag a)``.
    """
    p.validate_for(basis)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for up, low in p.mode_pairs:
        hop = quadratic_operator(basis, up, low).matrix
        mat += np.exp(1j * p.phi) * hop - np.exp(-1j * p.phi) * hop.conj().T
    return LinearOperator(basis, 0.5j * p.theta * mat)


def bs_unitary(basis: FockBasis, p: BeamSplitterParams) -> LinearOperator:
    """Beam-splitter unitary on ``basis`` via eigendecomposition of the generator."""
    h = bs_hamiltonian(basis, p)
    return LinearOperator(basis, hermitian_expm(h.matrix, -1j))


def qutrit_bs_matrix(theta: float, phi: float) -> np.ndarray:
    """Closed-form beam splitter on the ``[(2,0), (1,1), (0,2)]`` sector."""
    c2 = np.cos(theta / 2) ** 2
    s2 = np.sin(theta / 2) ** 2
    t = np.sin(theta) / np.sqrt(2)
    e = np.exp(1j * phi)
    return np.array(
        [
            [c2, e * t, e**2 * s2],
            [-t / e, np.cos(theta), e * t],
            [s2 / e**2, -t / e, c2],
        ],
        dtype=complex,
    )


def prepare_two_photon_state(theta: float, phi: float) -> BosonicState:
    """``U_BS(theta, phi)|1,1>`` written out in closed form."""
    s = np.sin(theta) / np.sqrt(2)
    amps = [s * np.exp(1j * phi), np.cos(theta), -s * np.exp(-1j * phi)]
    return BosonicState.from_unnormalized(enumerate_basis(2, 2), amps)


def unit_vector_angles(v: Sequence[float]) -> tuple[float, float]:
    v = _check_unit(v)
    return float(np.arccos(np.clip(v[2], -1.0, 1.0))), float(np.arctan2(v[1], v[0]))


def _check_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"expected a real 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > ATOL_PHYS:
        raise ValueError(f"vector {v} is not of unit norm")
    return v


def bosonic_state_from_unit_vector(v: Sequence[float]) -> BosonicState:
    """Two-photon analog of the real qutrit vector ``v = (x, y, z)``.

    Spherical components go to ``|2,0>`` (``(x + iy)/sqrt2``), ``|1,1>`` (``z``)
    and ``|0,2>`` (``(-x + iy)/sqrt2``); inner products of real vectors are
    preserved.
    """
    x, y, z = _check_unit(v)
    r2 = np.sqrt(2)
    amps = [(x + 1j * y) / r2, z, (-x + 1j * y) / r2]
    return BosonicState.from_unnormalized(enumerate_basis(2, 2), amps)


def grouped_sz(basis: FockBasis, g: ModeGrouping) -> LinearOperator:
    """``(N_upper - N_lower) / 2`` as a diagonal operator."""
    g.validate_for(basis)
    occ = np.array(basis.states, dtype=float).reshape(basis.dim, basis.m)
    diff = occ[:, list(g.upper)].sum(axis=1) - occ[:, list(g.lower)].sum(axis=1)
    return LinearOperator(basis, np.diag(diff / 2.0))


def parity_unitary(basis: FockBasis, g: ModeGrouping, phase: float = np.pi) -> LinearOperator:
    """``exp(i phase * S_z)`` for the grouped ``S_z``; the dispersive step uses ``phase = pi``."""
    sz = np.diag(grouped_sz(basis, g).matrix).real
    return LinearOperator(basis, np.diag(np.exp(1j * phase * sz)))


def schwinger_spin_ops(n: int) -> tuple[LinearOperator, LinearOperator, LinearOperator]:
    """Spin-``n/2`` operators ``(S_x, S_y, S_z)`` realized on two modes with ``n`` photons."""
    if n < 1:
        raise ValueError("need at least one photon")
    basis = enumerate_basis(2, n)
    ab = quadratic_operator(basis, 0, 1).matrix
    ba = ab.conj().T
    sx = (ab + ba) / 2
    sy = (ab - ba) / 2j
    sz = (number_operator(basis, 0).matrix - number_operator(basis, 1).matrix) / 2
    return LinearOperator(basis, sx), LinearOperator(basis, sy), LinearOperator(basis, sz)
