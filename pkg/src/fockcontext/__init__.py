"""Fock-space simulation of contextuality with photons and ancilla-assisted ideal measurements."""

from .fock_core import (
    BosonicState,
    FockBasis,
    LinearOperator,
    apply,
    enumerate_basis,
    expectation,
    quadratic_operator,
)
from .optics import (
    BeamSplitterParams,
    ModeGrouping,
    bosonic_state_from_unit_vector,
    bs_hamiltonian,
    bs_unitary,
    grouped_sz,
    parity_unitary,
    prepare_two_photon_state,
    qutrit_bs_matrix,
    schwinger_spin_ops,
)
from .measurement import (
    HybridState,
    IdealMeasurement,
    JointDistribution,
    ancilla_joint,
    ancilla_pair_density,
    attach_ancilla,
    correlator,
    couple_measurement,
    kraus_pair,
    luders_update,
    measurement_from_settings,
    observable_of,
    readout,
    sequential_joint,
)
from .witnesses import (
    WitnessSpec,
    WitnessValue,
    evaluate_operator,
    evaluate_sequential,
    kcbs_spec,
    ncycle_spec,
    noncontextual_bound,
    opt3_spec,
    yu_oh_spec,
)
from .distinguishability import (
    SweepResult,
    bunching_probability,
    grouped_measurement,
    partial_input_state,
    polarization_blind_bs,
    witness_vs_eta,
)

__version__ = "0.1.0"
