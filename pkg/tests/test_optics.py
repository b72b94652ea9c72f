import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import expm

from fockcontext.fock_core import apply, enumerate_basis
from fockcontext.optics import (
    BeamSplitterParams,
    ModeGrouping,
    bosonic_state_from_unit_vector,
    bs_hamiltonian,
    bs_unitary,
    canonical_angles,
    grouped_sz,
    parity_unitary,
    prepare_two_photon_state,
    qutrit_bs_matrix,
    schwinger_spin_ops,
)

from helpers import angles, random_unit_vector
from oracles import annihilation_between, inner_product_formula, qutrit_vector

TWO = ModeGrouping.two_mode()
SECTORS = [(2, 1), (2, 2), (2, 3), (2, 5), (3, 2), (3, 3), (4, 2)]


def test_hamiltonian_zero_angle(qutrit):
    assert np.allclose(bs_hamiltonian(qutrit, BeamSplitterParams(0.0, 0.7)).matrix, 0)


def test_hamiltonian_balanced(qutrit):
    h = bs_hamiltonian(qutrit, BeamSplitterParams(np.pi / 2, 0.0))
    assert h.is_hermitian()
    assert np.allclose(h.matrix.real, 0)
    # only nearest neighbours in photon transfer are coupled
    assert h.matrix[0, 2] == 0 and h.matrix[2, 0] == 0
    assert abs(h.matrix[0, 1]) == pytest.approx(np.pi / 4 * np.sqrt(2))


def test_hamiltonian_phase_periodic(qutrit):
    h1 = bs_hamiltonian(qutrit, BeamSplitterParams(0.9, 0.4))
    h2 = bs_hamiltonian(qutrit, BeamSplitterParams(0.9, 0.4 + 2 * np.pi))
    assert h1.allclose(h2)


def test_invalid_mode_pair(qutrit):
    with pytest.raises(ValueError):
        bs_hamiltonian(qutrit, BeamSplitterParams(0.3, 0.0, ((0, 2),)))
    with pytest.raises(ValueError):
        BeamSplitterParams(0.3, 0.0, ((1, 1),))


def test_hom_output(qutrit):
    out = apply(bs_unitary(qutrit, BeamSplitterParams(np.pi / 2, 0.0)), qutrit.ket((1, 1)))
    np.testing.assert_allclose(out.amplitudes, [1 / np.sqrt(2), 0, -1 / np.sqrt(2)], atol=1e-12)


def test_zero_angle_is_identity(qutrit):
    assert bs_unitary(qutrit, BeamSplitterParams(0.0, 1.3)).allclose(qutrit.identity())


@pytest.mark.parametrize("m,n", SECTORS)
def test_unitary_matches_expm_oracle(m, n, rng):
    b = enumerate_basis(m, n)
    pairs = ((0, 1),) if m < 4 else ((0, 2), (1, 3))
    for _ in range(5):
        p = BeamSplitterParams(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), pairs)
        u = bs_unitary(b, p)
        assert u.is_unitary()
        np.testing.assert_allclose(u.matrix, expm(-1j * bs_hamiltonian(b, p).matrix), atol=1e-10)


def test_qutrit_closed_form_matches_exponential(qutrit, rng):
    for _ in range(100):
        theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        np.testing.assert_allclose(
            bs_unitary(qutrit, BeamSplitterParams(theta, phi)).matrix, qutrit_bs_matrix(theta, phi), atol=1e-10
        )


def test_qutrit_matrix_middle_column():
    theta, phi = 0.83, 2.1
    col = qutrit_bs_matrix(theta, phi)[:, 1]
    expected = [np.exp(1j * phi) * np.sin(theta) / np.sqrt(2), np.cos(theta), -np.exp(-1j * phi) * np.sin(theta) / np.sqrt(2)]
    np.testing.assert_allclose(col, expected, atol=1e-15)
    np.testing.assert_allclose(qutrit_bs_matrix(0.0, phi), np.eye(3), atol=1e-15)


@pytest.mark.parametrize("m,n", SECTORS)
def test_homomorphism_in_theta(m, n, rng):
    b = enumerate_basis(m, n)
    pairs = ((0, 1),) if m < 4 else ((0, 2), (1, 3))
    for _ in range(3):
        t1, t2, phi = rng.uniform(0, np.pi / 2), rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi)
        lhs = bs_unitary(b, BeamSplitterParams(t1, phi, pairs)) @ bs_unitary(b, BeamSplitterParams(t2, phi, pairs))
        assert lhs.allclose(bs_unitary(b, BeamSplitterParams(t1 + t2, phi, pairs)), atol=1e-9)


def test_single_photon_mode_transformation():
    theta, phi = 1.1, 0.6
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    block = bs_unitary(enumerate_basis(2, 1), BeamSplitterParams(theta, phi)).matrix
    mode_matrix = np.array([[c, -np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]])
    # U a_i^dag U^dag = sum_j conj(M_ij) a_j^dag, so the one-photon block is M^dag
    np.testing.assert_allclose(block, mode_matrix.conj().T, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mode_transformation_lifted(n):
    """U a U^dag = cos(t/2) a - e^{i phi} sin(t/2) b between the n and n-1 photon sectors."""
    theta, phi = 0.77, 1.9
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u_n = bs_unitary(enumerate_basis(2, n), BeamSplitterParams(theta, phi)).matrix
    u_lo = bs_unitary(enumerate_basis(2, n - 1), BeamSplitterParams(theta, phi)).matrix
    a, b = annihilation_between(2, n, 0), annihilation_between(2, n, 1)
    np.testing.assert_allclose(u_lo @ a @ u_n.conj().T, c * a - np.exp(1j * phi) * s * b, atol=1e-12)
    np.testing.assert_allclose(u_lo @ b @ u_n.conj().T, np.exp(-1j * phi) * s * a + c * b, atol=1e-12)


def test_prepare_two_photon_state(qutrit):
    assert prepare_two_photon_state(0.0, 0.4).allclose(qutrit.ket((1, 1)))
    np.testing.assert_allclose(prepare_two_photon_state(np.pi / 2, 0).amplitudes, [2**-0.5, 0, -(2**-0.5)], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(angles)
def test_prepared_state_is_bs_output(ang):
    theta, phi = ang
    b = enumerate_basis(2, 2)
    psi = prepare_two_photon_state(theta, phi)
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12
    out = apply(bs_unitary(b, BeamSplitterParams(theta, phi)), b.ket((1, 1)))
    assert psi.allclose(out, atol=1e-10)


def test_unit_vector_examples(qutrit):
    assert bosonic_state_from_unit_vector([0, 0, 1]).allclose(qutrit.ket((1, 1)))
    np.testing.assert_allclose(bosonic_state_from_unit_vector([1, 0, 0]).amplitudes, [2**-0.5, 0, -(2**-0.5)], atol=1e-15)
    with pytest.raises(ValueError):
        bosonic_state_from_unit_vector([1, 1, 0])


def test_unit_vector_matches_angles(rng):
    for _ in range(20):
        v = random_unit_vector(rng)
        theta, phi = np.arccos(v[2]), np.arctan2(v[1], v[0])
        assert bosonic_state_from_unit_vector(v).allclose(prepare_two_photon_state(theta, phi), atol=1e-12)


def test_inner_products_preserved(rng):
    for _ in range(50):
        t1, p1, t2, p2 = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        u, v = qutrit_vector(t1, p1), qutrit_vector(t2, p2)
        bos = bosonic_state_from_unit_vector(u).inner(bosonic_state_from_unit_vector(v))
        assert bos == pytest.approx(u @ v, abs=1e-12)
        assert bos == pytest.approx(inner_product_formula(t1, p1, t2, p2), abs=1e-12)


def test_grouped_sz(qutrit, four_mode):
    np.testing.assert_allclose(grouped_sz(qutrit, TWO).matrix, np.diag([1, 0, -1]))
    lines = ModeGrouping((0, 1), (2, 3))
    sz = grouped_sz(four_mode, lines)
    i = four_mode.state_index((1, 0, 0, 1))
    assert sz.matrix[i, i] == 0


@pytest.mark.parametrize("m,n,g", [(2, 2, ((0,), (1,))), (2, 5, ((0,), (1,))), (4, 2, ((0, 1), (2, 3))), (4, 3, ((0, 2), (1, 3)))])
def test_grouped_sz_traceless(m, n, g):
    b = enumerate_basis(m, n)
    diag = [(sum(s[k] for k in g[0]) - sum(s[k] for k in g[1])) / 2 for s in b.states]
    assert sum(diag) == 0
    assert np.trace(grouped_sz(b, ModeGrouping(*g)).matrix) == pytest.approx(0)


def test_invalid_grouping(qutrit):
    with pytest.raises(ValueError):
        ModeGrouping((0,), ())
    with pytest.raises(ValueError):
        ModeGrouping((0, 1), (1,))
    with pytest.raises(ValueError):
        grouped_sz(enumerate_basis(3, 2), TWO)


def test_parity_qutrit(qutrit):
    p = parity_unitary(qutrit, TWO)
    np.testing.assert_allclose(p.matrix, np.diag([-1, 1, -1]), atol=1e-15)
    assert p.allclose(qutrit.ket((1, 1)).projector() * 2 - qutrit.identity())


def test_parity_odd_sector_not_hermitian():
    b = enumerate_basis(2, 3)
    p = parity_unitary(b, TWO)
    assert p.is_unitary() and not p.is_hermitian()
    sz = grouped_sz(b, TWO).matrix
    np.testing.assert_allclose(p.matrix, expm(1j * np.pi * sz), atol=1e-12)
    np.testing.assert_allclose(np.diag(p.matrix), [-1j, 1j, -1j, 1j], atol=1e-12)


@pytest.mark.parametrize("m,n,g", [(2, 2, ((0,), (1,))), (2, 4, ((0,), (1,))), (4, 2, ((0, 1), (2, 3)))])
def test_parity_squares_to_identity_even(m, n, g):
    b = enumerate_basis(m, n)
    p = parity_unitary(b, ModeGrouping(*g))
    assert p.is_hermitian()
    assert (p @ p).allclose(b.identity())


def test_parity_does_not_commute_with_balanced_bs(qutrit):
    p = parity_unitary(qutrit, TWO)
    u = bs_unitary(qutrit, BeamSplitterParams(np.pi / 2, 0.0))
    assert not p.commutes_with(u)


@pytest.mark.parametrize("n", range(1, 11))
def test_schwinger_algebra(n):
    sx, sy, sz = schwinger_spin_ops(n)
    for op in (sx, sy, sz):
        assert op.is_hermitian()
        assert op.dim == n + 1
    np.testing.assert_allclose(sx.matrix @ sy.matrix - sy.matrix @ sx.matrix, 1j * sz.matrix, atol=1e-10)
    np.testing.assert_allclose(sy.matrix @ sz.matrix - sz.matrix @ sy.matrix, 1j * sx.matrix, atol=1e-10)
    j = n / 2
    casimir = sx.matrix @ sx.matrix + sy.matrix @ sy.matrix + sz.matrix @ sz.matrix
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(n + 1), atol=1e-10)


def test_schwinger_sz_qutrit(qutrit):
    _, _, sz = schwinger_spin_ops(2)
    assert sz.allclose(grouped_sz(qutrit, TWO))


def test_canonical_angles(qutrit):
    theta, phi = canonical_angles(-0.7, 0.3)
    assert theta == pytest.approx(0.7) and phi == pytest.approx(0.3 + np.pi)
    u1 = bs_unitary(qutrit, BeamSplitterParams(-0.7, 0.3))
    u2 = bs_unitary(qutrit, BeamSplitterParams(theta, phi))
    assert u1.allclose(u2)
    t, p = canonical_angles(4.0, 7.0)
    assert 0 <= t <= np.pi and 0 <= p < 2 * np.pi
    # theta shifted by 2 pi: same unitary up to (-1)^n
    u3 = bs_unitary(enumerate_basis(2, 3), BeamSplitterParams(4.0, 7.0))
    u4 = bs_unitary(enumerate_basis(2, 3), BeamSplitterParams(4.0, 7.0).canonical())
    assert u3.allclose(-u4)
