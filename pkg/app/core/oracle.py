"""
Brute-force reference: the full 𝒩² x 𝒩² Liouvillian built from dense operators,
its eigenvalues and matrix-exponential propagation. Vectorization here is the
global row-major flattening of the 𝒩 x 𝒩 density matrix; nothing from the block
machinery is used to build it; `superblock_mismatch` compares the two afterwards.

`verification_report` runs the cross-checks behind the `verify` command.
"""
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from app.core.block_eigensolver import build_effective_K, pair_eigenvalues
from app.core.config import get_settings
from app.core.dynamics import evolve, trace_distance
from app.core.errors import GradedIndexError, SizeGuardError, StateValidationError
from app.core.graded_space import GradedBasis, unvectorize_block, vectorize_block
from app.core.liouville_assembler import assemble_M_superblock, jump_superblock
from app.core.model_library import BlockModel
from app.core.spectral_solver import LiouvilleEigensystem

logger = logging.getLogger(__name__)

EVOLUTION_TIMES = (0.1, 1.0, 10.0)


@dataclass(frozen=True, eq=False)
class DenseSuperoperator:
    matrix: np.ndarray
    dimension: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        flat = vectorize_block(np.asarray(rho, dtype=complex))
        return unvectorize_block(self.matrix @ flat, self.dimension, self.dimension)

    def apply_adjoint(self, rho: np.ndarray) -> np.ndarray:
        """ℒ† under the Hilbert-Schmidt inner product Tr[A†B]."""
        flat = vectorize_block(np.asarray(rho, dtype=complex))
        return unvectorize_block(self.matrix.conj().T @ flat, self.dimension, self.dimension)


def _dissipator(op: np.ndarray, rate: float) -> np.ndarray:
    eye = np.eye(op.shape[0])
    gram = op.conj().T @ op
    return rate * (np.kron(op, op.conj()) - 0.5 * np.kron(gram, eye) - 0.5 * np.kron(eye, gram.T))


def dense_liouvillian(model: BlockModel, max_dimension: int | None = None) -> DenseSuperoperator:
    """ℒ = -i(H ⊗ 1 - 1 ⊗ H*) + Σ_s γ_s D[A_s] + Σ_s κ_s D[C_s] with every operator expanded to 𝒩 x 𝒩 first."""
    guard = max_dimension if max_dimension is not None else get_settings().oracle_max_dimension
    basis = model.basis
    dim = basis.total_dimension
    if dim > guard:
        raise SizeGuardError(f"Hilbert-space dimension {dim} exceeds the dense oracle guard {guard}")
    H = model.hamiltonian.to_dense(basis)
    eye = np.eye(dim)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.conj()))
    for ch in (*model.loss_channels, *model.dephasing_channels):
        if ch.rate:
            L = L + _dissipator(ch.operator.to_dense(basis), ch.rate)
    logger.debug("Dense Liouvillian for %s: %d x %d", model.name, dim * dim, dim * dim)
    return DenseSuperoperator(L, dim)


def dense_eigenvalues(superop: DenseSuperoperator) -> np.ndarray:
    return scipy.linalg.eigvals(superop.matrix)


def dense_propagate(rho0: np.ndarray, t: float, superop: DenseSuperoperator) -> np.ndarray:
    if t < 0:
        raise StateValidationError(f"Propagation time must be >= 0, got {t}")
    flat = vectorize_block(np.asarray(rho0, dtype=complex))
    return unvectorize_block(scipy.linalg.expm(superop.matrix * t) @ flat, superop.dimension, superop.dimension)


def dense_two_time_correlation(
    superop: DenseSuperoperator, rho0: np.ndarray, t: float, t_prime: float, lowering: np.ndarray
) -> complex:
    """<σ⁺(t) σ⁻(t')> by explicit propagation; t' < t via the conjugate of the swapped ordering."""
    if t_prime < t:
        return complex(np.conj(dense_two_time_correlation(superop, rho0, t_prime, t, lowering)))
    sigma_minus = np.asarray(lowering, dtype=complex)
    source = dense_propagate(rho0, t, superop) @ sigma_minus.conj().T
    return complex(np.trace(sigma_minus @ dense_propagate(source, t_prime - t, superop)))


def eigenpair_residual(
    superop: DenseSuperoperator, eigenvalue: complex, rho: np.ndarray, side: Literal["right", "left"] = "right"
) -> float:
    """|ℒρ - λρ| / |ρ| (right) or |ℒ†ρ - λ*ρ| / |ρ| (left), Frobenius norms."""
    rho = np.asarray(rho, dtype=complex)
    norm = np.linalg.norm(rho)
    if norm == 0:
        raise StateValidationError("Residual of a zero matrix is undefined")
    if side == "right":
        diff = superop.apply(rho) - eigenvalue * rho
    else:
        diff = superop.apply_adjoint(rho) - np.conj(eigenvalue) * rho
    return float(np.linalg.norm(diff) / norm)


def sector_indices(basis: GradedBasis, l: int, n: int) -> np.ndarray:
    """Global row-major positions of the entries |n+l, j><n, k|, in (j, k) row-major order."""
    if l < 0 or n < 0 or n + l >= len(basis.dims):
        raise GradedIndexError(f"No sector (l={l}, n={n})")
    starts = np.concatenate(([0], np.cumsum(basis.dims)))
    rows = np.arange(starts[n + l], starts[n + l + 1])
    cols = np.arange(starts[n], starts[n + 1])
    return (rows[:, None] * basis.total_dimension + cols[None, :]).reshape(-1)


def superblock_mismatch(model: BlockModel, superop: DenseSuperoperator) -> float:
    """Largest entry difference between the assembled ℳ and 𝒜 sector blocks and the same slices of the dense ℒ."""
    basis = model.basis
    K = build_effective_K(model)
    worst = 0.0
    for l in range(basis.max_excitation + 1):
        for n in basis.sectors(l):
            idx = sector_indices(basis, l, n)
            block = assemble_M_superblock(K, model.dephasing_channels, basis, l, n).matrix
            worst = max(worst, float(np.max(np.abs(superop.matrix[np.ix_(idx, idx)] - block))))
            if n >= 1:
                lower = sector_indices(basis, l, n - 1)
                jump = jump_superblock(model.loss_channels, basis, l, n).matrix
                worst = max(worst, float(np.max(np.abs(superop.matrix[np.ix_(lower, idx)] - jump))))
    return worst


def compare_spectra(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance under the optimal pairing of two eigenvalue multisets."""
    return pair_eigenvalues(a, b)[1]


def random_state(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random density matrix G G† / Tr."""
    g = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e} (tolerance {self.tolerance:.1e})"


def verification_report(
    system: LiouvilleEigensystem,
    residual_tol: float | None = None,
    evolution_tol: float | None = None,
    seed: int | None = None,
    max_dimension: int | None = None,
) -> list[CheckResult]:
    """Cross-check a block-built eigensystem against the dense Liouvillian."""
    settings = get_settings()
    residual_tol = residual_tol if residual_tol is not None else settings.residual_tolerance
    evolution_tol = evolution_tol if evolution_tol is not None else settings.evolution_tolerance
    rng = np.random.default_rng(seed if seed is not None else settings.verify_seed)
    superop = dense_liouvillian(system.model, max_dimension)
    dim = superop.dimension

    blocks = superblock_mismatch(system.model, superop)
    spectrum = compare_spectra(system.eigenvalues, dense_eigenvalues(superop))
    right = max(
        eigenpair_residual(superop, p.eigenvalue, p.right) / (1 + abs(p.eigenvalue)) for p in system.pairs
    )
    left = max(
        eigenpair_residual(superop, p.eigenvalue, p.left, side="left") / (1 + abs(p.eigenvalue))
        for p in system.pairs
    )
    right_flat = system.right_stack.reshape(len(system.pairs), -1)
    left_flat = system.left_stack.reshape(len(system.pairs), -1)
    gram = left_flat.conj() @ right_flat.T
    biorthonormal = float(np.max(np.abs(gram - np.eye(len(system.pairs)))))

    rho0 = random_state(dim, rng)
    coeff = left_flat.conj() @ rho0.reshape(-1)
    completeness = float(np.max(np.abs((coeff @ right_flat).reshape(dim, dim) - rho0)))
    evolution = max(
        trace_distance(evolve(rho0, t, system), dense_propagate(rho0, t, superop)) for t in EVOLUTION_TIMES
    )

    checks = [
        CheckResult("superblock match", blocks <= residual_tol, blocks, residual_tol),
        CheckResult("spectrum match", spectrum <= residual_tol, spectrum, residual_tol),
        CheckResult("right eigen-residuals", right <= residual_tol, right, residual_tol),
        CheckResult("left eigen-residuals", left <= residual_tol, left, residual_tol),
        CheckResult("biorthonormality", biorthonormal <= residual_tol, biorthonormal, residual_tol),
        CheckResult("completeness", completeness <= residual_tol, completeness, residual_tol),
        CheckResult("evolution match", evolution <= evolution_tol, evolution, evolution_tol),
    ]
    for check in checks:
        logger.debug(check.line())
    return checks
