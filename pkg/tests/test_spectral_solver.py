import numpy as np
import pytest

from app.core.errors import GradedIndexError, ResonanceError
from app.core.model_library import build_jc
from app.core.oracle import compare_spectra, dense_eigenvalues, dense_liouvillian, eigenpair_residual
from app.core.spectral_solver import full_eigensystem, liouville_eigenvalues, prepare_sectors

from tests.conftest import projector


def test_pair_count_covers_whole_liouville_space(symmetric_jc_system):
    assert len(symmetric_jc_system.pairs) == 25
    lower = liouville_eigenvalues(symmetric_jc_system.model)
    assert len(lower) == 17
    assert len(lower) + sum(1 for l, *_ in lower if l > 0) == 25


def test_ground_sector_eigenvalue_is_zero(symmetric_jc_system):
    p = symmetric_jc_system.find(0, 0, 1)
    assert p.eigenvalue == 0
    np.testing.assert_allclose(p.right, projector(5, 0))
    np.testing.assert_allclose(p.left, np.eye(5), atol=1e-12)


def test_symmetric_jc_coherence_eigenvalue(symmetric_jc_system):
    p = symmetric_jc_system.find(0, 1, 1)
    assert p.eigenvalue == pytest.approx(-1.0)
    assert (p.j, p.k) == (1, 1)


def test_first_diagonal_eigenvalues_follow_block_spectrum(symmetric_jc_system):
    eps = symmetric_jc_system.block_eigensystem.eigenvalues[1]
    np.testing.assert_allclose(eps, [-1 - 0.5j, 1 - 0.5j], atol=1e-12)
    for mu in (1, 2):
        assert symmetric_jc_system.find(1, 0, mu).eigenvalue == pytest.approx(-1j * eps[mu - 1])


def test_first_diagonal_vectors(symmetric_jc_system):
    bes = symmetric_jc_system.block_eigensystem
    basis = symmetric_jc_system.basis
    for mu in (1, 2):
        p = symmetric_jc_system.find(1, 0, mu)
        expected = np.zeros((5, 5), dtype=complex)
        expected[basis.block_slice(1), 0] = bes.right[1][:, mu - 1]
        np.testing.assert_allclose(p.right, expected, atol=1e-12)
        # left vector also reaches the (2, 1) block
        np.testing.assert_allclose(p.left[basis.block_slice(1), 0], bes.left[1][:, mu - 1], atol=1e-12)


def test_coherence_right_vector_decays_into_ground(symmetric_jc_system):
    system = symmetric_jc_system
    model, basis, bes = system.model, system.basis, system.block_eigensystem
    R = bes.right[1]
    for mu in range(1, 5):
        p = system.find(0, 1, mu)
        j, k = p.j - 1, p.k - 1
        top = np.outer(R[:, j], R[:, k].conj())
        np.testing.assert_allclose(p.right[basis.block_slice(1), basis.block_slice(1)], top, atol=1e-12)
        ground = sum(
            ch.rate * (ch.operator.block(1) @ R)[0, j] * np.conj((ch.operator.block(1) @ R)[0, k])
            for ch in model.loss_channels
        )
        assert p.right[0, 0] == pytest.approx(ground / p.eigenvalue)


@pytest.mark.parametrize("name", ["jc_system", "tc_system", "dephasing_system"])
def test_eigen_residuals(name, request):
    system = request.getfixturevalue(name)
    superop = dense_liouvillian(system.model)
    for p in system.pairs:
        scale = 1 + abs(p.eigenvalue)
        assert eigenpair_residual(superop, p.eigenvalue, p.right) < 1e-9 * scale
        assert eigenpair_residual(superop, p.eigenvalue, p.left, side="left") < 1e-9 * scale


@pytest.mark.parametrize("name", ["jc_system", "tc_system", "dephasing_system"])
def test_spectrum_matches_dense(name, request):
    system = request.getfixturevalue(name)
    assert compare_spectra(system.eigenvalues, dense_eigenvalues(dense_liouvillian(system.model))) < 1e-8


@pytest.mark.parametrize("name", ["jc_system", "tc_system", "dephasing_system"])
def test_biorthonormal_and_complete(name, request):
    system = request.getfixturevalue(name)
    P = len(system.pairs)
    assert P == system.basis.total_dimension ** 2
    right = system.right_stack.reshape(P, -1)
    left = system.left_stack.reshape(P, -1)
    np.testing.assert_allclose(left.conj() @ right.T, np.eye(P), atol=1e-9)
    np.testing.assert_allclose(right.T @ left.conj(), np.eye(P), atol=1e-9)


@pytest.mark.parametrize("name", ["jc_system", "tc_system", "dephasing_system"])
def test_single_steady_state(name, request):
    system = request.getfixturevalue(name)
    assert np.sum(np.abs(system.eigenvalues) < 1e-9) == 1
    for p in system.pairs:
        if abs(p.eigenvalue) > 1e-9:
            assert abs(np.trace(p.right)) < 1e-9
    rho = system.steady_state()
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
    np.testing.assert_allclose(rho, projector(system.basis.total_dimension, 0), atol=1e-12)


def test_eigenvalues_decay(jc_system):
    assert np.max(jc_system.eigenvalues.real) < 1e-12


def test_adjoint_partner(jc_system):
    p = jc_system.find(1, 1, 2)
    q = jc_system.find(1, 1, 2, adjoint=True)
    assert q.eigenvalue == np.conj(p.eigenvalue)
    np.testing.assert_array_equal(q.right, p.right.conj().T)
    np.testing.assert_array_equal(q.left, p.left.conj().T)
    assert q.adjoint_partner().adjoint is False
    superop = dense_liouvillian(jc_system.model)
    assert eigenpair_residual(superop, q.eigenvalue, q.right) < 1e-9


def test_zero_diagonal_has_no_adjoint_copy(jc_system):
    with pytest.raises(GradedIndexError):
        jc_system.find(0, 1, 1, adjoint=True)


def test_dephasing_labels_come_from_sector_index(dephasing_system):
    p = dephasing_system.find(0, 2, 3)
    assert (p.j, p.k) == (2, 1)


def test_dephasing_path_skips_block_eigensystem(dephasing_model):
    bes, sectors = prepare_sectors(dephasing_model)
    assert bes is None
    assert sectors[(0, 0)].jump is None
    assert sectors[(1, 2)].jump.matrix.shape == (4, 4)


def test_lossless_model_resonates():
    model = build_jc(g=1.0, delta=0.3, kappa=0.0, gamma=0.0, N=2)
    with pytest.raises(ResonanceError) as info:
        full_eigensystem(model)
    assert info.value.exit_code == 2
