"""Ideal measurements on photons through dispersive coupling to ancilla qubits.

A measurement is specified by a conjugated parity unitary
``P = U_BS(theta, phi) exp(i pi S_z) U_BS^dag(theta, phi)``.  Coupling to an
ancilla prepared in ``|+>`` acts as

    |psi>|+>  ->  K_+ |psi>|+>  +  K_- |psi>|->,      K_(+/-) = (1 +/- P)/2,

and reading the ancilla out in the ``{|+>, |->}`` basis finishes the
measurement.  Outcome ``+1`` is coincidence (``|+>``), ``-1`` is bunching.

Two independent routes to outcome statistics are provided: a Kraus-operator
tree (:func:`sequential_joint`) and an explicit ancilla register
(:func:`ancilla_joint`).  They must agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .fock_core import (
    ATOL_PHYS,
    BasisMismatchError,
    BosonicState,
    FockBasis,
    LinearOperator,
    apply_unnormalized,
    expectation,
)
from .optics import BeamSplitterParams, ModeGrouping, bs_unitary, parity_unitary

PRUNE_TOL = 1e-12
OUTCOMES = (+1, -1)


class ImpossibleOutcomeError(ValueError):
    pass


@dataclass(frozen=True)
class MeasurementSettings:
    theta: float
    phi: float
    grouping: ModeGrouping
    mode_pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class IdealMeasurement:
    """Dichotomic ideal measurement given by its conjugated parity ``P``."""

    P: LinearOperator
    label: MeasurementSettings | None = None

    @property
    def basis(self) -> FockBasis:
        return self.P.basis


def _default_pairs(g: ModeGrouping) -> tuple[tuple[int, int], ...]:
    if len(g.upper) != len(g.lower):
        raise ValueError("grouping with unequal group sizes needs explicit mode_pairs")
    return tuple(zip(g.upper, g.lower))


@lru_cache(maxsize=4096)
def _conjugated_parity(basis: FockBasis, g: ModeGrouping, theta: float, phi: float, pairs) -> LinearOperator:
    u = bs_unitary(basis, BeamSplitterParams(theta, phi, pairs))
    return u @ parity_unitary(basis, g) @ u.adjoint()


def measurement_from_settings(
    basis: FockBasis,
    grouping: ModeGrouping,
    theta: float,
    phi: float,
    mode_pairs: Sequence[tuple[int, int]] | None = None,
) -> IdealMeasurement:
    """Build ``P = U_BS . exp(i pi S_z) . U_BS^dag`` for the given splitter angles.

    ``mode_pairs`` defaults to pairing ``grouping.upper[k]`` with
    ``grouping.lower[k]``.
    """
    grouping.validate_for(basis)
    pairs = tuple(tuple(p) for p in mode_pairs) if mode_pairs is not None else _default_pairs(grouping)
    P = _conjugated_parity(basis, grouping, float(theta), float(phi), pairs)
    return IdealMeasurement(P, MeasurementSettings(float(theta), float(phi), grouping, pairs))


def kraus_pair(meas: IdealMeasurement) -> tuple[LinearOperator, LinearOperator]:
    ident = meas.basis.identity()
    return (ident + meas.P) * 0.5, (ident - meas.P) * 0.5


def observable_of(meas: IdealMeasurement) -> LinearOperator:
    """Hermitian observable ``A = (P + P^dag)/2``; equal to ``P`` on even sectors."""
    return (meas.P + meas.P.adjoint()) * 0.5


def povm_pair(meas: IdealMeasurement) -> tuple[LinearOperator, LinearOperator]:
    ident = meas.basis.identity()
    a = observable_of(meas)
    return (ident + a) * 0.5, (ident - a) * 0.5


def kraus_for(meas: IdealMeasurement, outcome: int) -> LinearOperator:
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    kp, km = kraus_pair(meas)
    return kp if outcome == 1 else km


def luders_update(psi: BosonicState, meas: IdealMeasurement, outcome: int) -> tuple[float, BosonicState]:
    """Probability of ``outcome`` and the renormalized post-measurement state."""
    if psi.basis != meas.basis:
        raise BasisMismatchError("state and measurement live on different sectors")
    branch = apply_unnormalized(kraus_for(meas, outcome), psi)
    prob = float(np.vdot(branch, branch).real)
    if prob < PRUNE_TOL:
        raise ImpossibleOutcomeError(f"outcome {outcome:+d} has probability {prob:.3g}")
    return prob, BosonicState(psi.basis, branch / np.sqrt(prob))


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of ``+/-1`` outcome strings, one entry per measurement."""

    outcomes: dict

    def __post_init__(self):
        clean = {}
        for key, p in self.outcomes.items():
            p = float(p)
            if p < -PRUNE_TOL or p > 1 + PRUNE_TOL:
                raise ValueError(f"probability {p} for {key} outside [0, 1]")
            clean[tuple(int(a) for a in key)] = min(max(p, 0.0), 1.0)
        total = sum(clean.values())
        if abs(total - 1.0) > ATOL_PHYS:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "outcomes", clean)

    @property
    def length(self) -> int:
        return len(next(iter(self.outcomes)))

    def probability(self, outcome: Sequence[int]) -> float:
        return self.outcomes.get(tuple(outcome), 0.0)

    def full(self) -> dict:
        """All ``2^L`` outcome strings, zeros included, in ``+1``-first order."""
        return {o: self.probability(o) for o in itertools.product(OUTCOMES, repeat=self.length)}

    def marginal(self, positions: Sequence[int]) -> "JointDistribution":
        out: dict = {}
        for o, p in self.outcomes.items():
            key = tuple(o[i] for i in positions)
            out[key] = out.get(key, 0.0) + p
        return JointDistribution(out)

    def allclose(self, other: "JointDistribution", atol: float = ATOL_PHYS) -> bool:
        keys = set(self.outcomes) | set(other.outcomes)
        return all(abs(self.probability(k) - other.probability(k)) <= atol for k in keys)


def sequential_joint(psi: BosonicState, sequence: Sequence[IdealMeasurement]) -> JointDistribution:
    """Joint outcome distribution of measuring ``sequence`` in order (Kraus route).

    ``p(a_1..a_L) = ||K_{a_L} ... K_{a_1} psi||^2``; branches whose weight
    drops below ``1e-12`` are pruned.
    """
    if not sequence:
        raise ValueError("empty measurement sequence")
    for meas in sequence:
        if meas.basis != psi.basis:
            raise BasisMismatchError("measurement and state live on different sectors")
    kraus = [tuple(k.matrix for k in kraus_pair(m)) for m in sequence]
    probs: dict = {}
    stack = [((), psi.amplitudes)]
    while stack:
        prefix, vec = stack.pop()
        depth = len(prefix)
        for outcome, k in zip(OUTCOMES, kraus[depth]):
            branch = k @ vec
            weight = float(np.vdot(branch, branch).real)
            if weight < PRUNE_TOL:
                continue
            key = prefix + (outcome,)
            if depth + 1 == len(sequence):
                probs[key] = weight
            else:
                stack.append((key, branch))
    return JointDistribution(probs)


def correlator(d: JointDistribution) -> float:
    """Mean of the product of outcomes."""
    return float(sum(np.prod(o) * p for o, p in d.outcomes.items()))


# --- explicit ancilla register ---------------------------------------------


@dataclass(frozen=True, eq=False)
class HybridState:
    """Photons tensored with ``k`` ancilla qubits stored in the ``{|+>, |->}`` basis.

    ``amplitudes`` is flat of length ``dim * 2**k``; reshaped it is indexed by
    ``(fock_index, bit_0, ..., bit_{k-1})`` with bit 0 meaning ``|+>``.
    """

    basis: FockBasis
    k: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.basis.dim * 2**self.k:
            raise ValueError("amplitude length does not match dim * 2**k")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL_PHYS:
            raise ValueError(f"hybrid state is not normalized (norm={norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_bosonic(cls, psi: BosonicState) -> "HybridState":
        return cls(psi.basis, 0, psi.amplitudes)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.basis.dim,) + (2,) * self.k)

    def bosonic_density(self) -> np.ndarray:
        """Reduced density matrix of the photons."""
        mat = self.amplitudes.reshape(self.basis.dim, -1)
        return mat @ mat.conj().T

    def ancilla_density(self) -> np.ndarray:
        """Reduced ``2^k x 2^k`` density matrix of the ancillas (photons traced out)."""
        mat = self.amplitudes.reshape(self.basis.dim, -1)
        return mat.T @ mat.conj()

    def _check_index(self, q: int) -> None:
        if not 0 <= q < self.k:
            raise IndexError(f"ancilla {q} does not exist (k={self.k})")


def attach_ancilla(h: HybridState) -> HybridState:
    """Append a fresh ancilla in ``|+>``."""
    t = np.zeros(h.tensor().shape + (2,), dtype=complex)
    t[..., 0] = h.tensor()
    return HybridState(h.basis, h.k + 1, t)


def couple_measurement(h: HybridState, meas: IdealMeasurement, q: int) -> HybridState:
    """Apply ``K_+ (x) 1 + K_- (x) X_q`` to the register.

    ``X_q`` swaps ``|+>`` and ``|->`` of ancilla ``q``; the map is unitary
    whenever ``P`` is.
    """
    h._check_index(q)
    if meas.basis != h.basis:
        raise BasisMismatchError("measurement and hybrid state live on different sectors")
    kp, km = (k.matrix for k in kraus_pair(meas))
    t = np.moveaxis(h.tensor(), q + 1, 1)
    plus, minus = t[:, 0], t[:, 1]
    new_plus = np.tensordot(kp, plus, axes=1) + np.tensordot(km, minus, axes=1)
    new_minus = np.tensordot(km, plus, axes=1) + np.tensordot(kp, minus, axes=1)
    out = np.moveaxis(np.stack([new_plus, new_minus], axis=1), 1, q + 1)
    return HybridState(h.basis, h.k, out)


def readout(h: HybridState, q: int) -> list[tuple[int, float, HybridState]]:
    """Read ancilla ``q`` in the ``{|+>, |->}`` basis.

    Returns ``(outcome, probability, collapsed_state)`` for every outcome with
    probability at least ``1e-12``; the ancilla stays in the register, fixed
    to the observed eigenstate.
    """
    h._check_index(q)
    t = h.tensor()
    results = []
    for bit, outcome in enumerate(OUTCOMES):
        proj = np.zeros_like(t)
        sl = [slice(None)] * t.ndim
        sl[q + 1] = bit
        proj[tuple(sl)] = t[tuple(sl)]
        prob = float(np.vdot(proj, proj).real)
        if prob < PRUNE_TOL:
            continue
        results.append((outcome, prob, HybridState(h.basis, h.k, proj / np.sqrt(prob))))
    return results


def couple_sequence(psi: BosonicState, sequence: Sequence[IdealMeasurement]) -> HybridState:
    """Couple measurement ``i`` of ``sequence`` to its own fresh ancilla ``i``."""
    h = HybridState.from_bosonic(psi)
    for q, meas in enumerate(sequence):
        h = couple_measurement(attach_ancilla(h), meas, q)
    return h


def readout_joint(h: HybridState, order: Iterable[int] | None = None) -> JointDistribution:
    """Read every ancilla in ``order`` and collect the joint distribution.

    Keys are indexed by ancilla number, whatever the readout order.
    """
    order = list(range(h.k)) if order is None else list(order)
    if sorted(order) != list(range(h.k)):
        raise ValueError(f"readout order {order} must be a permutation of 0..{h.k - 1}")
    probs: dict = {}
    stack = [({}, 1.0, h, 0)]
    while stack:
        seen, weight, state, depth = stack.pop()
        if depth == len(order):
            key = tuple(seen[q] for q in range(h.k))
            probs[key] = probs.get(key, 0.0) + weight
            continue
        q = order[depth]
        for outcome, p, collapsed in readout(state, q):
            if weight * p < PRUNE_TOL:
                continue
            stack.append(({**seen, q: outcome}, weight * p, collapsed, depth + 1))
    return JointDistribution(probs)


def ancilla_joint(
    psi: BosonicState, sequence: Sequence[IdealMeasurement], order: Iterable[int] | None = None
) -> JointDistribution:
    """Joint distribution via the ancilla register, read out in ``order``."""
    return readout_joint(couple_sequence(psi, sequence), order)


def ancilla_pair_density(psi: BosonicState, meas_j: IdealMeasurement, meas_k: IdealMeasurement) -> np.ndarray:
    """Two-ancilla state after coupling ``meas_j`` then ``meas_k``.

    Rows and columns are ordered ``|++>, |+->, |-+>, |-->``.
    """
    return couple_sequence(psi, [meas_j, meas_k]).ancilla_density()


SIGMA_X_PM = np.diag([1.0, -1.0])


def sigma_x_correlation(rho: np.ndarray) -> float:
    """``tr(rho sigma_x (x) sigma_x)`` for a two-ancilla state in the ``+/-`` basis."""
    return float(np.trace(rho @ np.kron(SIGMA_X_PM, SIGMA_X_PM)).real)


def partial_transpose_min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the partial transpose over the second qubit."""
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2).min())


def outcome_probabilities(psi: BosonicState, meas: IdealMeasurement) -> tuple[float, float]:
    """``(p_+, p_-)`` from the POVM of a single measurement."""
    a = expectation(psi, observable_of(meas)).real
    return (1 + a) / 2, (1 - a) / 2
