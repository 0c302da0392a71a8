"""
Superoperator blocks on the sector (l, n), i.e. the span of |n+l, j><n, k|.

All blocks act on row-major vectorized d_{n+l} x d_n matrices, where
vec(A X B) = (A ⊗ Bᵀ) vec(X). Hence
    K X - X K†    ->  K^(n+l) ⊗ 1 - 1 ⊗ K^(n)*
    A X A†        ->  A^(n+l) ⊗ A^(n)*
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from app.core.block_eigensolver import BlockEigensystem, diagonalize_block, transform_lowering_block
from app.core.errors import ShapeError
from app.core.graded_space import GradedBasis
from app.core.model_library import BlockOperator, Channel

logger = logging.getLogger(__name__)


class BasisTag(str, Enum):
    ORIGINAL = "original"
    EIGEN = "eigen"


@dataclass(frozen=True, eq=False)
class SuperBlock:
    l: int
    n: int
    matrix: np.ndarray
    basis_tag: BasisTag = BasisTag.ORIGINAL

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class SectorTransforms:
    """Eigenvalues λ^(l,n) of M^(l,n) with right (ℛ) and dual left (𝒬) eigenvector matrices."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray


def _check_square(block: SuperBlock, basis: GradedBasis) -> SuperBlock:
    D = basis.pair_shape(block.l, block.n).D
    if block.matrix.shape != (D, D):
        raise ShapeError(f"Superblock ({block.l},{block.n}) has shape {block.matrix.shape}, expected {(D, D)}")
    return block


def assemble_K_superblock(K: BlockOperator, basis: GradedBasis, l: int, n: int) -> SuperBlock:
    """𝒦^(l,n) = -i [K^(n+l) ⊗ 1_{d_n} - 1_{d_{n+l}} ⊗ K^(n)*]."""
    shape = basis.pair_shape(l, n)
    upper, lower = K.block(n + l), K.block(n)
    matrix = -1j * (np.kron(upper, np.eye(shape.cols)) - np.kron(np.eye(shape.rows), lower.conj()))
    return _check_square(SuperBlock(l, n, matrix), basis)


def assemble_C_superblock(channels: Iterable[Channel], basis: GradedBasis, l: int, n: int) -> SuperBlock:
    """𝒞^(l,n) = Σ_s (κ_s/2)[2 C^(n+l) ⊗ C^(n)* - (C†C)^(n+l) ⊗ 1 - 1 ⊗ (C†C)^(n)ᵀ]."""
    shape = basis.pair_shape(l, n)
    matrix = np.zeros((shape.D, shape.D), dtype=complex)
    eye_up, eye_low = np.eye(shape.rows), np.eye(shape.cols)
    for ch in channels:
        if not ch.rate:
            continue
        upper, lower = ch.operator.block(n + l), ch.operator.block(n)
        matrix += 0.5 * ch.rate * (
            2 * np.kron(upper, lower.conj())
            - np.kron(ch.operator.gram_block(n + l), eye_low)
            - np.kron(eye_up, ch.operator.gram_block(n).T)
        )
    return SuperBlock(l, n, matrix)


def assemble_M_superblock(
    K: BlockOperator, dephasing: Iterable[Channel], basis: GradedBasis, l: int, n: int
) -> SuperBlock:
    """ℳ^(l,n) = 𝒦^(l,n) + 𝒞^(l,n): the excitation-preserving part of ℒ on the sector."""
    k = assemble_K_superblock(K, basis, l, n)
    c = assemble_C_superblock(dephasing, basis, l, n)
    return SuperBlock(l, n, k.matrix + c.matrix)


def jump_superblock(channels: Iterable[Channel], basis: GradedBasis, l: int, n: int) -> SuperBlock:
    """𝒜^(l,n) = Σ_s γ_s A^(n+l) ⊗ A^(n)*, mapping sector (l,n) into (l,n-1)."""
    if n < 1:
        raise ShapeError(f"No jump block for sector ({l},{n})")
    rows = basis.pair_shape(l, n - 1).D
    cols = basis.pair_shape(l, n).D
    matrix = np.zeros((rows, cols), dtype=complex)
    for ch in channels:
        if ch.rate:
            matrix += ch.rate * np.kron(ch.operator.block(n + l), ch.operator.block(n).conj())
    return SuperBlock(l, n, matrix)


def tensor_transforms(eigensystem: BlockEigensystem, l: int, n: int) -> SectorTransforms:
    """
    Without dephasing 𝒦^(l,n) is diagonalized by ℛ = R^(n+l) ⊗ R^(n)*, 𝒬 = Q^(n+l) ⊗ Q^(n)*,
    with λ_ν = -i(ε_j^(n+l) - ε_k^(n)*) at ν = d_n(j-1) + k.
    """
    upper, lower = eigensystem.eigenvalues[n + l], eigensystem.eigenvalues[n]
    eigenvalues = -1j * np.subtract.outer(upper, lower.conj()).reshape(-1)
    right = np.kron(eigensystem.right[n + l], eigensystem.right[n].conj())
    left = np.kron(eigensystem.left[n + l], eigensystem.left[n].conj())
    return SectorTransforms(eigenvalues, right, left)


def sector_transforms(block: SuperBlock, tol_degeneracy: float | None = None) -> SectorTransforms:
    """Numerical diagonalization of ℳ^(l,n), used whenever dephasing couples the two sides."""
    eigenvalues, right, left = diagonalize_block(block.matrix, tol_degeneracy, label=f"M({block.l},{block.n})")
    return SectorTransforms(eigenvalues, right, left)


def jump_superblock_tensor(channels: Iterable[Channel], eigensystem: BlockEigensystem, l: int, n: int) -> SuperBlock:
    """Ã^(l,n) = Σ_s γ_s Ã_s^(n+l) ⊗ Ã_s^(n)* with Ã_s^(n) = Q^(n-1)† A_s^(n) R^(n)."""
    if n < 1:
        raise ShapeError(f"No jump block for sector ({l},{n})")
    basis = eigensystem.basis
    matrix = np.zeros((basis.pair_shape(l, n - 1).D, basis.pair_shape(l, n).D), dtype=complex)
    for ch in channels:
        if ch.rate:
            upper = transform_lowering_block(ch.operator, eigensystem, n + l)
            lower = transform_lowering_block(ch.operator, eigensystem, n)
            matrix += ch.rate * np.kron(upper, lower.conj())
    return SuperBlock(l, n, matrix, BasisTag.EIGEN)


def jump_superblock_transformed(jump: SuperBlock, target: SectorTransforms, source: SectorTransforms) -> SuperBlock:
    """Ã^(l,n) = 𝒬^(l,n-1)† 𝒜^(l,n) ℛ^(l,n)."""
    if jump.basis_tag is not BasisTag.ORIGINAL:
        raise ShapeError("Jump block is already in the eigenbasis")
    matrix = target.left.conj().T @ jump.matrix @ source.right
    return SuperBlock(jump.l, jump.n, matrix, BasisTag.EIGEN)


def jump_superblock_eigenbasis(
    channels: Iterable[Channel],
    basis: GradedBasis,
    l: int,
    n: int,
    eigensystem: BlockEigensystem | None = None,
    transforms: dict[tuple[int, int], SectorTransforms] | None = None,
) -> SuperBlock:
    """
    Jump block in the eigenbasis. With sector transforms (the dephasing path) the
    original-basis block is conjugated by them; otherwise the per-block factors
    Ã_s are combined through the Kronecker product.
    """
    channels = tuple(channels)
    if transforms is not None:
        return jump_superblock_transformed(
            jump_superblock(channels, basis, l, n), transforms[(l, n - 1)], transforms[(l, n)]
        )
    if eigensystem is None:
        raise ShapeError("jump_superblock_eigenbasis needs a block eigensystem or sector transforms")
    return jump_superblock_tensor(channels, eigensystem, l, n)
