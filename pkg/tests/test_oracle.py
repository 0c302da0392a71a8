import numpy as np
import pytest

from app.core.block_eigensolver import block_eigensystem, build_effective_K
from app.core.errors import SizeGuardError, StateValidationError
from app.core.liouville_assembler import assemble_M_superblock, jump_superblock
from app.core.model_library import build_jc
from app.core.oracle import (
    CheckResult,
    dense_eigenvalues,
    dense_liouvillian,
    dense_propagate,
    eigenpair_residual,
    random_state,
    sector_indices,
    superblock_mismatch,
    verification_report,
)


@pytest.fixture(scope="module")
def superop(jc_model):
    return dense_liouvillian(jc_model)


def test_dense_liouvillian_preserves_trace(superop):
    dim = superop.dimension
    trace_row = np.eye(dim).reshape(-1)
    np.testing.assert_allclose(trace_row @ superop.matrix, 0, atol=1e-12)


def test_dense_liouvillian_preserves_hermiticity(superop):
    rho = random_state(superop.dimension, np.random.default_rng(1))
    out = superop.apply(rho)
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_dense_eigenvalues_are_stable(superop):
    eigs = dense_eigenvalues(superop)
    assert eigs.size == 49
    assert np.max(eigs.real) < 1e-10


def test_propagation_conserves_trace(superop):
    rho = random_state(superop.dimension, np.random.default_rng(2))
    assert np.trace(dense_propagate(rho, 2.5, superop)) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(StateValidationError):
        dense_propagate(rho, -1.0, superop)


def test_residual_of_exact_and_perturbed_pair(jc_system, superop):
    p = jc_system.find(0, 1, 2)
    assert eigenpair_residual(superop, p.eigenvalue, p.right) < 1e-10
    bumped = p.right + 1e-3 * np.eye(superop.dimension)
    assert eigenpair_residual(superop, p.eigenvalue, bumped) > 1e-5


def test_residual_of_zero_matrix_is_error(superop):
    with pytest.raises(StateValidationError):
        eigenpair_residual(superop, 0.0, np.zeros((7, 7)))


def test_size_guard(jc_model):
    with pytest.raises(SizeGuardError) as info:
        dense_liouvillian(jc_model, max_dimension=4)
    assert info.value.exit_code == 4


@pytest.mark.parametrize("l,n", [(0, 1), (1, 1), (0, 2), (2, 0), (1, 2)])
def test_sector_indices_reproduce_superblocks(jc_model, superop, l, n):
    rows = sector_indices(jc_model.basis, l, n)
    K = build_effective_K(jc_model)
    np.testing.assert_allclose(
        superop.matrix[np.ix_(rows, rows)], assemble_M_superblock(K, (), jc_model.basis, l, n).matrix, atol=1e-12
    )
    if n >= 1:
        cols = sector_indices(jc_model.basis, l, n)
        lower = sector_indices(jc_model.basis, l, n - 1)
        np.testing.assert_allclose(
            superop.matrix[np.ix_(lower, cols)],
            jump_superblock(jc_model.loss_channels, jc_model.basis, l, n).matrix,
            atol=1e-12,
        )


def test_random_state_is_density_matrix():
    rho = random_state(5, np.random.default_rng(9))
    assert np.trace(rho) == pytest.approx(1.0)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.min(np.linalg.eigvalsh(rho)) > 0


def test_verification_report_passes(tc_system):
    checks = verification_report(tc_system)
    assert [c.name for c in checks] == [
        "superblock match",
        "spectrum match",
        "right eigen-residuals",
        "left eigen-residuals",
        "biorthonormality",
        "completeness",
        "evolution match",
    ]
    assert all(c.passed for c in checks), [c.line() for c in checks]


def test_verification_report_with_impossible_tolerance(jc_system):
    checks = verification_report(jc_system, residual_tol=1e-30, seed=1)
    assert not all(c.passed for c in checks)
    assert checks[-1].passed


def test_check_line_format():
    assert CheckResult("completeness", True, 1.5e-14, 1e-8).line() == "PASS completeness: 1.500e-14 (tolerance 1.0e-08)"
    assert CheckResult("spectrum match", False, 2e-3, 1e-8).line().startswith("FAIL spectrum match")


def test_dense_block_model_matches_eigensystem_tensor_path():
    model = build_jc(0.6, -0.2, 0.4, 0.3, N=2)
    bes = block_eigensystem(build_effective_K(model), model.basis)
    superop = dense_liouvillian(model)
    lam = -1j * (bes.eigenvalues[1][0] - np.conj(bes.eigenvalues[1][1]))
    assert np.min(np.abs(dense_eigenvalues(superop) - lam)) < 1e-10


@pytest.mark.parametrize("name", ["jc_model", "dephasing_model", "tc_model"])
def test_assembled_superblocks_match_dense_slices(name, request):
    model = request.getfixturevalue(name)
    assert superblock_mismatch(model, dense_liouvillian(model)) < 1e-12
