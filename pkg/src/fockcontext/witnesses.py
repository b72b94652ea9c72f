"""Noncontextuality witnesses and their evaluation on bosonic states.

A witness is a weighted sum of single, pair and triple correlators of
dichotomic observables.  Each observable is given by a measurement setting,
either a real unit 3-vector or a pair of beam-splitter angles.  Values are
normalized so that every noncontextual model scores at most 1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock_core import BosonicState, FockBasis
from .measurement import (
    IdealMeasurement,
    correlator,
    measurement_from_settings,
    observable_of,
    sequential_joint,
)
from .optics import ModeGrouping, unit_vector_angles

MAX_NC_OBSERVABLES = 20


class CompatibilityError(RuntimeError):
    """Operator and sequential evaluation disagree: the observables of a term do not commute."""


@dataclass(frozen=True)
class Setting:
    """One observable: ``vector`` (real unit 3-vector) or ``(theta, phi)``."""

    theta: float
    phi: float
    vector: tuple[float, float, float] | None = None

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "Setting":
        v = np.asarray(v, dtype=float)
        theta, phi = unit_vector_angles(v)
        return cls(theta, phi, tuple(float(x) for x in v))

    def to_dict(self) -> dict:
        if self.vector is not None:
            return {"vector": list(self.vector)}
        return {"theta": self.theta, "phi": self.phi}

    @classmethod
    def from_dict(cls, d: dict) -> "Setting":
        if "vector" in d:
            return cls.from_vector(d["vector"])
        return cls(float(d["theta"]), float(d["phi"]))


@dataclass(frozen=True)
class Term:
    indices: tuple[int, ...]
    coeff: float


@dataclass(frozen=True)
class WitnessSpec:
    name: str
    settings: tuple[Setting, ...]
    terms: tuple[Term, ...]
    normalization: float = 1.0
    nc_bound: float = 1.0

    def __post_init__(self):
        n = len(self.settings)
        for t in self.terms:
            if not t.indices or len(t.indices) > 3:
                raise ValueError(f"term {t.indices} must have 1 to 3 observables")
            if any(not 0 <= i < n for i in t.indices):
                raise ValueError(f"term {t.indices} refers to an undefined setting")

    @property
    def n_observables(self) -> int:
        return len(self.settings)

    def measurements(self, basis: FockBasis, grouping: ModeGrouping | None = None) -> list[IdealMeasurement]:
        grouping = ModeGrouping.two_mode() if grouping is None else grouping
        return [measurement_from_settings(basis, grouping, s.theta, s.phi) for s in self.settings]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "settings": [s.to_dict() for s in self.settings],
            "terms": [{"indices": list(t.indices), "coeff": t.coeff} for t in self.terms],
            "normalization": self.normalization,
            "nc_bound": self.nc_bound,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessSpec":
        return cls(
            name=d["name"],
            settings=tuple(Setting.from_dict(s) for s in d["settings"]),
            terms=tuple(Term(tuple(int(i) for i in t["indices"]), float(t["coeff"])) for t in d["terms"]),
            normalization=float(d["normalization"]),
            nc_bound=float(d["nc_bound"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "WitnessSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class WitnessValue:
    value: float
    route: str
    per_term: tuple[float, ...] = field(default=())


# --- witness definitions ----------------------------------------------------


def _cycle_spec(name: str, n: int) -> WitnessSpec:
    c = np.cos(np.pi / n)
    theta = float(np.arccos(np.sqrt(c / (1 + c))))
    step = np.pi * (n - 1) / n
    settings = tuple(Setting(theta, float((step * j) % (2 * np.pi))) for j in range(n))
    terms = tuple(Term((j, (j + 1) % n), -1.0 / (n - 2)) for j in range(n))
    return WitnessSpec(name, settings, terms)


def kcbs_spec() -> WitnessSpec:
    """Five-cycle witness ``-(1/3) sum_j <A_j A_{j+1}>``.

    Settings sit at ``theta = arccos(5^(-1/4))`` with azimuths ``4 pi j / 5``,
    which makes neighbouring vectors orthogonal and reaches
    ``(4 sqrt5 - 5)/3`` on ``|1,1>``.
    """
    return _cycle_spec("kcbs", 5)


def ncycle_spec(n: int) -> WitnessSpec:
    """Odd ``n``-cycle witness ``-(1/(n-2)) sum_j <A_j A_{j+1}>``."""
    if n < 5 or n % 2 == 0:
        raise ValueError(f"n-cycle witness needs odd n >= 5, got {n}")
    return _cycle_spec(f"{n}-cycle", n)


_R2 = 1 / np.sqrt(2)
_R3 = 1 / np.sqrt(3)

# observables 1..9 then A, B, C, D
YU_OH_VECTORS = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (0, _R2, -_R2),
    (_R2, 0, -_R2),
    (_R2, -_R2, 0),
    (0, _R2, _R2),
    (_R2, 0, _R2),
    (_R2, _R2, 0),
    (-_R3, _R3, _R3),
    (_R3, -_R3, _R3),
    (_R3, _R3, -_R3),
    (_R3, _R3, _R3),
)

_LABEL = {str(i + 1): i for i in range(9)} | {"A": 9, "B": 10, "C": 11, "D": 12}


def _edges(text: str) -> tuple[tuple[int, int], ...]:
    return tuple((_LABEL[a], _LABEL[b]) for a, b in (e.split("-") for e in text.split()))


YU_OH_V1 = tuple(range(9))
YU_OH_V2 = (9, 10, 11, 12)
YU_OH_E1 = _edges("1-4 1-7 2-5 2-8 3-6 3-9 4-7 5-8 6-9")
YU_OH_E2 = _edges("1-2 1-3 2-3 4-A 4-D 5-B 5-D 6-C 6-D 7-B 7-C 8-A 8-C 9-A 9-B")
YU_OH_TRIADS = ((0, 3, 6), (1, 4, 7), (2, 5, 8))


def _yu_oh_settings() -> tuple[Setting, ...]:
    return tuple(Setting.from_vector(v) for v in YU_OH_VECTORS)


def yu_oh_spec() -> WitnessSpec:
    """13-observable state-independent witness; every qutrit state scores 25/24."""
    terms = [Term((j,), -1 / 8) for j in YU_OH_V1 + YU_OH_V2]
    terms += [Term(e, -1 / 16) for e in YU_OH_E1 + YU_OH_E2]
    return WitnessSpec("yu-oh", _yu_oh_settings(), tuple(terms))


def opt3_spec() -> WitnessSpec:
    """Optimized 13-observable witness with triad terms; every qutrit state scores 83/75."""
    terms = [Term((j,), -1 / 25) for j in YU_OH_V1]
    terms += [Term((j,), -2 / 25) for j in YU_OH_V2]
    terms += [Term(e, -1 / 25) for e in YU_OH_E1]
    terms += [Term(e, -2 / 25) for e in YU_OH_E2]
    terms += [Term(t, 3 / 25) for t in YU_OH_TRIADS]
    return WitnessSpec("opt3", _yu_oh_settings(), tuple(terms))


WITNESSES = {
    "kcbs": kcbs_spec,
    "yu-oh": yu_oh_spec,
    "opt3": opt3_spec,
}


def witness_by_name(name: str, n: int | None = None) -> WitnessSpec:
    key = name.lower().replace("_", "-")
    if key in ("ncycle", "n-cycle"):
        return ncycle_spec(5 if n is None else n)
    if key == "yo":
        key = "yu-oh"
    try:
        return WITNESSES[key]()
    except KeyError:
        raise ValueError(f"unknown witness {name!r}; choose from {sorted(WITNESSES) + ['ncycle']}") from None


# --- evaluation -------------------------------------------------------------


def evaluate_operator(
    spec: WitnessSpec,
    psi: BosonicState,
    grouping: ModeGrouping | None = None,
    measurements: Sequence[IdealMeasurement] | None = None,
) -> WitnessValue:
    """Evaluate every term as ``<psi| A_i A_j ... |psi>``."""
    meas = spec.measurements(psi.basis, grouping) if measurements is None else measurements
    obs = [observable_of(m).matrix for m in meas]
    vec = psi.amplitudes
    per_term = []
    for t in spec.terms:
        out = vec
        for i in reversed(t.indices):
            out = obs[i] @ out
        per_term.append(t.coeff * float(np.vdot(vec, out).real))
    return WitnessValue(spec.normalization * sum(per_term), "operator", tuple(per_term))


def evaluate_sequential(
    spec: WitnessSpec,
    psi: BosonicState,
    grouping: ModeGrouping | None = None,
    measurements: Sequence[IdealMeasurement] | None = None,
    check: bool = True,
) -> WitnessValue:
    """Evaluate every term by simulating its measurements in sequence.

    Sequences follow the index order of each term.  With ``check`` set, each
    term is compared with the operator expectation and a
    :class:`CompatibilityError` is raised beyond ``1e-6``.
    """
    meas = spec.measurements(psi.basis, grouping) if measurements is None else measurements
    per_term = []
    for t in spec.terms:
        value = correlator(sequential_joint(psi, [meas[i] for i in t.indices]))
        if check:
            direct = psi.amplitudes
            for i in reversed(t.indices):
                direct = observable_of(meas[i]).matrix @ direct
            # a non-commuting pair shows up as an imaginary part of <A_i A_j>
            direct_value = complex(np.vdot(psi.amplitudes, direct))
            if abs(direct_value - value) > 1e-6:
                raise CompatibilityError(
                    f"term {t.indices}: sequential {value:.9g} vs operator {direct_value:.9g}"
                )
        per_term.append(t.coeff * value)
    return WitnessValue(spec.normalization * sum(per_term), "sequential", tuple(per_term))


def witness_operator(spec: WitnessSpec, basis: FockBasis, grouping: ModeGrouping | None = None) -> np.ndarray:
    """Matrix whose expectation is the witness value (Hermitian when terms commute)."""
    obs = [observable_of(m).matrix for m in spec.measurements(basis, grouping)]
    w = np.zeros((basis.dim, basis.dim), dtype=complex)
    for t in spec.terms:
        prod = np.eye(basis.dim, dtype=complex)
        for i in t.indices:
            prod = prod @ obs[i]
        w += t.coeff * prod
    return spec.normalization * w


def noncontextual_bound(spec: WitnessSpec) -> float:
    """Maximum of the witness over all deterministic ``+/-1`` assignments."""
    n = spec.n_observables
    if n > MAX_NC_OBSERVABLES:
        raise ValueError(f"{n} observables exceeds the exhaustive limit of {MAX_NC_OBSERVABLES}")
    signs = np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int8)
    total = np.zeros(len(signs))
    for t in spec.terms:
        total += t.coeff * np.prod(signs[:, list(t.indices)], axis=1)
    return float(spec.normalization * total.max())


def terms_compatible(spec: WitnessSpec, basis: FockBasis, grouping: ModeGrouping | None = None) -> bool:
    obs = [observable_of(m) for m in spec.measurements(basis, grouping)]
    return all(
        obs[i].commutes_with(obs[j]) for t in spec.terms for i, j in itertools.combinations(t.indices, 2)
    )
