"""Partially distinguishable photon pairs and witness sweeps over distinguishability.

Two spatial lines, each carrying an H and a V polarization mode, give four
modes ordered ``(a_H, a_V, b_H, b_V)``.  The input ``|1_H, 1_eta>`` puts an H
photon in line ``a`` and, in line ``b``, a photon whose polarization has
amplitude ``sqrt(1 - eta^2)`` on H and ``eta`` on V.  Beam splitters act on
both polarizations alike, and the dispersive coupling only sees the photon
number in each line.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock_core import BosonicState, LinearOperator, apply, enumerate_basis, expectation
from .measurement import IdealMeasurement, measurement_from_settings
from .optics import BeamSplitterParams, ModeGrouping, bs_unitary, parity_unitary
from .witnesses import WitnessSpec, evaluate_operator, evaluate_sequential

A_H, A_V, B_H, B_V = range(4)
LINES = ModeGrouping((A_H, A_V), (B_H, B_V))
POLARIZATION_PAIRS = ((A_H, B_H), (A_V, B_V))


def four_mode_basis():
    return enumerate_basis(4, 2)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta


def partial_input_state(eta: float) -> BosonicState:
    """``sqrt(1 - eta^2)|1,0,1,0> + eta|1,0,0,1>``; ``eta = 0`` is indistinguishable."""
    eta = _check_eta(eta)
    basis = four_mode_basis()
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.state_index((1, 0, 1, 0))] = np.sqrt(1.0 - eta**2)
    amps[basis.state_index((1, 0, 0, 1))] = eta
    return BosonicState.from_unnormalized(basis, amps)


def polarization_blind_bs(theta: float, phi: float) -> LinearOperator:
    return bs_unitary(four_mode_basis(), BeamSplitterParams(theta, phi, POLARIZATION_PAIRS))


def grouped_measurement(theta: float, phi: float) -> IdealMeasurement:
    return measurement_from_settings(four_mode_basis(), LINES, theta, phi, POLARIZATION_PAIRS)


def prepared_state(eta: float, theta: float = 0.0, phi: float = 0.0) -> BosonicState:
    """``U_BS(theta, phi)|1_H, 1_eta>`` on the four-mode sector."""
    return apply(polarization_blind_bs(theta, phi), partial_input_state(eta))


def bunching_probability(eta: float, theta: float) -> float:
    """Closed-form ``p_+`` of the coincidence/bunching test after a splitter at ``theta``.

    ``p_+ = (1 - eta^2) cos^2(theta) + eta^2 (1 + cos^2(theta)) / 2`` is the
    coincidence weight; bunching happens with ``1 - p_+``.
    """
    eta = _check_eta(eta)
    c2 = np.cos(theta) ** 2
    return float((1 - eta**2) * c2 + eta**2 * (1 + c2) / 2)


def simulated_coincidence(eta: float, theta: float, phi: float = 0.0) -> float:
    """``p_+`` from the grouped parity expectation on the transformed four-mode state."""
    psi = prepared_state(eta, theta, phi)
    parity = parity_unitary(psi.basis, LINES)
    return float((1 + expectation(psi, parity).real) / 2)


@dataclass(frozen=True)
class SweepRow:
    eta: float
    value: float
    theta: float | None = None
    phi: float | None = None


@dataclass(frozen=True)
class SweepResult:
    spec_name: str
    rows: tuple[SweepRow, ...]
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        etas = [r.eta for r in self.rows]
        if any(b <= a for a, b in zip(etas, etas[1:])):
            raise ValueError("sweep etas must be strictly increasing")
        if not all(np.isfinite(r.value) for r in self.rows):
            raise ValueError("sweep contains non-finite values")

    @property
    def etas(self) -> np.ndarray:
        return np.array([r.eta for r in self.rows])

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])

    def to_csv(self, fmt: str = ".15g") -> str:
        with_angles = any(r.theta is not None for r in self.rows)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["eta", "value", "theta", "phi"] if with_angles else ["eta", "value"])
        for r in self.rows:
            row = [format(r.eta, fmt), format(r.value, fmt)]
            if with_angles:
                row += [format(r.theta, fmt), format(r.phi, fmt)]
            writer.writerow(row)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "spec_name": self.spec_name,
            "grid": dict(self.grid),
            "rows": [
                {"eta": r.eta, "value": r.value, "theta": r.theta, "phi": r.phi}
                for r in self.rows
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepResult":
        rows = tuple(SweepRow(r["eta"], r["value"], r.get("theta"), r.get("phi")) for r in d["rows"])
        return cls(d["spec_name"], rows, d.get("grid", {}))


def witness_at_eta(
    spec: WitnessSpec, eta: float, prep: tuple[float, float] = (0.0, 0.0), sequential: bool = False
) -> float:
    """Witness value on ``U_BS(prep)|1_H, 1_eta>`` with line-parity measurements."""
    psi = prepared_state(eta, *prep)
    meas = [grouped_measurement(s.theta, s.phi) for s in spec.settings]
    if sequential:
        return evaluate_sequential(spec, psi, measurements=meas).value
    return evaluate_operator(spec, psi, measurements=meas).value


def witness_vs_eta(
    spec: WitnessSpec,
    etas: Sequence[float],
    prep: tuple[float, float] = (0.0, 0.0),
    spot_check: int = 1,
    workers: int | None = None,
) -> SweepResult:
    """Sweep the witness over ``etas`` for a fixed preparation.

    ``spot_check`` grid points (evenly spread) are re-evaluated through the
    sequential-measurement route.  Grid points are independent and may be
    evaluated in a thread pool; rows are assembled in grid order.
    """
    etas = [_check_eta(e) for e in etas]

    def point(eta):
        return witness_at_eta(spec, eta, prep)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(point, etas))
    else:
        values = [point(e) for e in etas]
    if spot_check and etas:
        for k in np.linspace(0, len(etas) - 1, min(spot_check, len(etas))).round().astype(int):
            seq = witness_at_eta(spec, etas[k], prep, sequential=True)
            if abs(seq - values[k]) > 1e-8:
                raise RuntimeError(f"route mismatch at eta={etas[k]}: {seq} vs {values[k]}")
    theta, phi = prep
    rows = tuple(SweepRow(e, v, float(theta), float(phi)) for e, v in zip(etas, values))
    grid = {"start": etas[0], "stop": etas[-1], "count": len(etas)} if etas else {}
    return SweepResult(spec.name, rows, grid)
