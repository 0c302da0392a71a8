"""
Diagonalization of the non-Hermitian blocks K^(n) = H^(n) - (i/2) Σ_s γ_s (A_s†A_s)^(n).

Every block is returned as (ε, R, Q) with K R = R diag(ε) and Q† R = 1, eigenvalues
sorted by real part and then imaginary part. The same routine diagonalizes the
superoperator blocks M^(l,n) when dephasing is present.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from app.core.config import get_settings
from app.core.errors import ConfigurationError, DegenerateBlock, ShapeError
from app.core.graded_space import GradedBasis
from app.core.model_library import BlockModel, BlockOperator, OperatorKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BlockEigensystem:
    """Per-block eigenvalues ε^(n), right vectors R^(n) (columns) and dual left vectors Q^(n)."""

    basis: GradedBasis
    eigenvalues: tuple[np.ndarray, ...]
    right: tuple[np.ndarray, ...]
    left: tuple[np.ndarray, ...]

    def __post_init__(self):
        for arrays in (self.eigenvalues, self.right, self.left):
            for arr in arrays:
                arr.setflags(write=False)


def _degeneracy_scale(block: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.max(np.abs(block))) if block.size else 1.0)


def diagonalize_block(
    block: np.ndarray,
    tol_degeneracy: float | None = None,
    label: str = "block",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns (ε, R, Q). Columns of R have unit norm with their largest component
    real and positive; Q is rescaled per column so that Q†R = 1.

    Two eigenvalues collide when their gap is below tol·max(1, |K|_max) times the
    larger eigenvector condition number 1/|q̂†r̂|. Defective blocks, whose computed
    eigenvalues split by roughly the square root of machine precision, are caught
    by the condition-number factor.
    """
    arr = np.asarray(block, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ShapeError(f"{label}: expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{label}: matrix has non-finite entries")
    if arr.shape[0] == 1:
        return arr[0].copy(), np.ones((1, 1), dtype=complex), np.ones((1, 1), dtype=complex)

    tol = tol_degeneracy if tol_degeneracy is not None else get_settings().degeneracy_tolerance
    eps, vl, vr = scipy.linalg.eig(arr, left=True, right=True)
    order = np.lexsort((eps.imag, eps.real))
    eps, vl, vr = eps[order], vl[:, order], vr[:, order]

    vr = vr / np.linalg.norm(vr, axis=0)
    pivots = vr[np.argmax(np.abs(vr), axis=0), np.arange(vr.shape[1])]
    vr = vr * (np.abs(pivots) / pivots)
    vl = vl / np.linalg.norm(vl, axis=0)
    overlaps = np.sum(vl.conj() * vr, axis=0)
    with np.errstate(divide="ignore"):
        condition = 1.0 / np.abs(overlaps)

    scale = _degeneracy_scale(arr, tol)
    d = len(eps)
    for i in range(d):
        for j in range(i + 1, d):
            gap = abs(eps[i] - eps[j])
            if gap <= scale * max(condition[i], condition[j]):
                raise DegenerateBlock(label, (i + 1, j + 1), (complex(eps[i]), complex(eps[j])))

    Q = vl / overlaps.conj()
    logger.debug("Diagonalized %s (d=%d), max condition %.3g", label, d, float(np.max(condition)))
    return eps, vr, Q


def jc_analytic_block(
    n: int,
    g: float,
    delta: float,
    kappa: float,
    gamma: float,
    tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Closed-form eigensystem of the Jaynes-Cummings block n:
        ε_j = (2δ - i(2n-1)κ - iγ)/4 + (-1)^j sqrt(g²n + (2δ + iκ - iγ)²/16)
    R is the complex rotation [[cos θ, -sin θ], [sin θ, cos θ]] with
    tan θ = (2ε_1 + inκ)/(2g√n). K^(n) is complex symmetric, so Rᵀ R = 1 and Q = R*.
    Eigenvalues are in (-1)^j order, not sorted.
    """
    if n < 0:
        raise ConfigurationError(f"Block index must be >= 0, got {n}")
    if n == 0:
        one = np.ones((1, 1), dtype=complex)
        return np.zeros(1, dtype=complex), one, one.copy()

    coupling = g * math.sqrt(n)
    mean = (2 * delta - 1j * (2 * n - 1) * kappa - 1j * gamma) / 4
    root = np.sqrt(complex(coupling**2 + (2 * delta + 1j * kappa - 1j * gamma) ** 2 / 16))
    eps = np.array([mean - root, mean + root])

    tol = tol if tol is not None else get_settings().degeneracy_tolerance
    block_max = max(abs(coupling), abs(n * kappa / 2), abs(delta - 0.5j * ((n - 1) * kappa + gamma)))
    if abs(2 * root) <= tol * max(1.0, block_max):
        raise DegenerateBlock(f"JC K({n})", (1, 2), (complex(eps[0]), complex(eps[1])))

    if coupling == 0:
        # Uncoupled block: ε_1 sits on |n,g> or on |n-1,e>
        on_ground = abs(eps[0] + 0.5j * n * kappa) <= abs(eps[1] + 0.5j * n * kappa)
        R = np.eye(2, dtype=complex) if on_ground else np.array([[0, -1], [1, 0]], dtype=complex)
    else:
        theta = np.arctan((2 * eps[0] + 1j * n * kappa) / (2 * coupling))
        c, s = np.cos(theta), np.sin(theta)
        R = np.array([[c, -s], [s, c]], dtype=complex)
    return eps, R, R.conj()


def build_effective_K(model: BlockModel) -> BlockOperator:
    """K^(n) = H^(n) - (i/2) Σ_s γ_s (A_s^(n))† A_s^(n). Dephasing channels do not enter K."""
    blocks = {}
    for n, h in model.hamiltonian.blocks.items():
        k = np.array(h, dtype=complex)
        for ch in model.loss_channels:
            if ch.rate:
                k = k - 0.5j * ch.rate * ch.operator.gram_block(n)
        blocks[n] = k
    return BlockOperator(OperatorKind.CONSERVING, blocks)


def block_eigensystem(K: BlockOperator, basis: GradedBasis, tol: float | None = None) -> BlockEigensystem:
    """Diagonalize every block of K independently."""
    K.validate(basis)
    eigenvalues, right, left = [], [], []
    for n in range(len(basis.dims)):
        eps, R, Q = diagonalize_block(K.block(n), tol, label=f"K({n})")
        eigenvalues.append(eps)
        right.append(R)
        left.append(Q)
    return BlockEigensystem(basis=basis, eigenvalues=tuple(eigenvalues), right=tuple(right), left=tuple(left))


def transform_lowering_block(operator: BlockOperator, eigensystem: BlockEigensystem, n: int) -> np.ndarray:
    """
    Ã^(n) = Q^(n-1)† A^(n) R^(n), so that A|r_j^n> = Σ_k Ã_kj |r_k^(n-1)>.
    """
    if operator.kind is not OperatorKind.LOWERING:
        raise ShapeError("transform_lowering_block needs a lowering operator")
    if n < 1:
        raise ShapeError("A lowering operator has no block at n=0")
    return eigensystem.left[n - 1].conj().T @ operator.block(n) @ eigensystem.right[n]


def pair_eigenvalues(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Optimal one-to-one matching of two eigenvalue multisets.
    Returns perm with b[perm[i]] paired to a[i], and the largest paired distance.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise ShapeError(f"Cannot pair {a.size} eigenvalues with {b.size}")
    if a.size == 0:
        return np.zeros(0, dtype=int), 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(a.size, dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max())
