"""
Eigensystem of the full Liouvillian from block data.

ℒ keeps the diagonal index l = (row excitation) - (column excitation) for l >= 0 and,
inside diagonal l, only lowers n: in sector eigen-coordinates it is block
bidiagonal with diagonal blocks diag(λ^(l,n)) and off-diagonal blocks Ã^(l,n).
For every eigenvalue Λ = λ_μ^(l,m):

    right:  ṽ^(m) = e_μ,  ṽ^(n) = Ã^(l,n+1) ṽ^(n+1) / (Λ - λ^(l,n))          n = m-1 .. 0
    left:   ũ^(m) = e_μ,  ũ^(n) = Ã^(l,n)† ũ^(n-1) / (Λ - λ^(l,n))*          n = m+1 .. N-l

and ρ̂ = Σ_n unvec(ℛ^(l,n) ṽ^(n)), ρ̌ = Σ_n unvec(𝒬^(l,n) ũ^(n)). The pairs satisfy
Tr[ρ̌_a† ρ̂_b] = δ_ab without further normalization. Diagonals l < 0 come from
Hermitian adjoints (ρ̂†, ρ̌†) with eigenvalue λ*.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from types import MappingProxyType
from typing import Literal, Mapping

import numpy as np

from app.core.block_eigensolver import BlockEigensystem, block_eigensystem, build_effective_K
from app.core.config import get_settings
from app.core.errors import GradedIndexError, ResonanceError
from app.core.graded_space import GradedBasis, unflatten_pair, unvectorize_block
from app.core.liouville_assembler import (
    SectorTransforms,
    SuperBlock,
    assemble_M_superblock,
    jump_superblock_eigenbasis,
    sector_transforms,
    tensor_transforms,
)
from app.core.model_library import BlockModel

logger = logging.getLogger(__name__)

Chain = Mapping[int, np.ndarray]


@dataclass(frozen=True, eq=False)
class Sector:
    """Sector (l, n) in eigen-coordinates; `jump` is Ã^(l,n) (absent for n = 0)."""

    l: int
    n: int
    transforms: SectorTransforms
    jump: SuperBlock | None = None

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.transforms.eigenvalues


def prepare_sectors(
    model: BlockModel, degeneracy_tol: float | None = None
) -> tuple[BlockEigensystem | None, dict[tuple[int, int], Sector]]:
    """
    Diagonalize every sector and bring the jump blocks into the eigenbasis.
    Without dephasing the sectors inherit tensor products of the K-block eigensystems;
    with dephasing each ℳ^(l,n) is diagonalized on its own.
    """
    basis = model.basis
    N = basis.max_excitation
    K = build_effective_K(model)
    eigensystem = None
    transforms: dict[tuple[int, int], SectorTransforms] = {}
    if model.has_dephasing:
        for l in range(N + 1):
            for n in basis.sectors(l):
                block = assemble_M_superblock(K, model.dephasing_channels, basis, l, n)
                transforms[(l, n)] = sector_transforms(block, degeneracy_tol)
    else:
        eigensystem = block_eigensystem(K, basis, degeneracy_tol)
        for l in range(N + 1):
            for n in basis.sectors(l):
                transforms[(l, n)] = tensor_transforms(eigensystem, l, n)

    sectors = {}
    for (l, n), tr in transforms.items():
        jump = None
        if n >= 1:
            jump = jump_superblock_eigenbasis(
                model.loss_channels,
                basis,
                l,
                n,
                eigensystem=eigensystem,
                transforms=transforms if model.has_dephasing else None,
            )
        sectors[(l, n)] = Sector(l, n, tr, jump)
    logger.debug("Prepared %d sectors (dephasing=%s)", len(sectors), model.has_dephasing)
    return eigensystem, sectors


def liouville_eigenvalues(model: BlockModel, degeneracy_tol: float | None = None) -> list[tuple[int, int, int, complex]]:
    """All λ_μ^(l,m) for l >= 0 as (l, m, μ, λ); the l > 0 entries also occur conjugated in the full spectrum."""
    _, sectors = prepare_sectors(model, degeneracy_tol)
    return [
        (l, m, mu, complex(lam))
        for (l, m), sector in sorted(sectors.items())
        for mu, lam in enumerate(sector.eigenvalues, start=1)
    ]


def _denominator(
    lam: complex, sector: Sector, m: int, mu: int, tol: float, conjugate: bool = False
) -> np.ndarray:
    gaps = lam - sector.eigenvalues
    bad = np.flatnonzero(np.abs(gaps) < tol * (1 + abs(lam)))
    if bad.size:
        nu = int(bad[0])
        raise ResonanceError(sector.l, m, mu, sector.n, nu + 1, float(abs(gaps[nu])))
    return gaps.conj() if conjugate else gaps


def right_chain(
    l: int, m: int, mu: int, sectors: Mapping[tuple[int, int], Sector], resonance_tol: float | None = None
) -> dict[int, np.ndarray]:
    """Right coefficients ṽ^(l,m;n) for n = m .. 0, starting from e_μ."""
    tol = resonance_tol if resonance_tol is not None else get_settings().resonance_tolerance
    top = sectors[(l, m)]
    lam = top.eigenvalues[mu - 1]
    v = np.zeros(len(top.eigenvalues), dtype=complex)
    v[mu - 1] = 1.0
    chain = {m: v}
    for n in range(m - 1, -1, -1):
        v = (sectors[(l, n + 1)].jump.matrix @ v) / _denominator(lam, sectors[(l, n)], m, mu, tol)
        chain[n] = v
    return chain


def left_chain(
    l: int, m: int, mu: int, sectors: Mapping[tuple[int, int], Sector], resonance_tol: float | None = None
) -> dict[int, np.ndarray]:
    """Left coefficients ũ^(l,m;n) for n = m .. N-l, starting from e_μ."""
    tol = resonance_tol if resonance_tol is not None else get_settings().resonance_tolerance
    top = sectors[(l, m)]
    lam = top.eigenvalues[mu - 1]
    u = np.zeros(len(top.eigenvalues), dtype=complex)
    u[mu - 1] = 1.0
    chain = {m: u}
    n = m + 1
    while (l, n) in sectors:
        sector = sectors[(l, n)]
        u = (sector.jump.matrix.conj().T @ u) / _denominator(lam, sector, m, mu, tol, conjugate=True)
        chain[n] = u
        n += 1
    return chain


def assemble_original_basis(
    chain: Chain,
    sectors: Mapping[tuple[int, int], Sector],
    basis: GradedBasis,
    l: int,
    side: Literal["right", "left"],
) -> np.ndarray:
    """Back-transform each coefficient vector and place it in block (n+l, n) of an 𝒩 x 𝒩 matrix."""
    out = np.zeros((basis.total_dimension,) * 2, dtype=complex)
    for n, coeff in chain.items():
        tr = sectors[(l, n)].transforms
        vec = (tr.right if side == "right" else tr.left) @ coeff
        out[basis.block_slice(n + l), basis.block_slice(n)] = unvectorize_block(vec, basis.dims[n + l], basis.dims[n])
    return out


@dataclass(frozen=True, eq=False)
class LiouvilleEigenpair:
    l: int
    m: int
    mu: int
    j: int
    k: int
    eigenvalue: complex
    right: np.ndarray
    left: np.ndarray
    right_chain: Chain = field(default_factory=dict, repr=False)
    left_chain: Chain = field(default_factory=dict, repr=False)
    adjoint: bool = False

    @property
    def label(self) -> tuple[int, int, int, bool]:
        return self.l, self.m, self.mu, self.adjoint

    def adjoint_partner(self) -> "LiouvilleEigenpair":
        """(ρ̂†, ρ̌†) with eigenvalue λ*, living on diagonal -l."""
        return replace(
            self,
            eigenvalue=complex(np.conj(self.eigenvalue)),
            right=self.right.conj().T,
            left=self.left.conj().T,
            right_chain=MappingProxyType({n: v.conj() for n, v in self.right_chain.items()}),
            left_chain=MappingProxyType({n: u.conj() for n, u in self.left_chain.items()}),
            adjoint=not self.adjoint,
        )


@dataclass(frozen=True, eq=False)
class LiouvilleEigensystem:
    model: BlockModel
    pairs: tuple[LiouvilleEigenpair, ...]
    sectors: Mapping[tuple[int, int], Sector] = field(repr=False)
    block_eigensystem: BlockEigensystem | None = field(default=None, repr=False)

    @property
    def basis(self) -> GradedBasis:
        return self.model.basis

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.eigenvalue for p in self.pairs], dtype=complex)

    @cached_property
    def right_stack(self) -> np.ndarray:
        return np.stack([p.right for p in self.pairs])

    @cached_property
    def left_stack(self) -> np.ndarray:
        return np.stack([p.left for p in self.pairs])

    def find(self, l: int, m: int, mu: int, adjoint: bool = False) -> LiouvilleEigenpair:
        for p in self.pairs:
            if p.label == (l, m, mu, adjoint):
                return p
        raise GradedIndexError(f"No eigenpair (l={l}, m={m}, mu={mu}, adjoint={adjoint})")

    def steady_state(self) -> np.ndarray:
        """Trace-normalized right eigenvector of the eigenvalue closest to zero on the diagonal l = 0."""
        candidates = [p for p in self.pairs if p.l == 0]
        best = min(candidates, key=lambda p: abs(p.eigenvalue))
        return best.right / np.trace(best.right)


def full_eigensystem(
    model: BlockModel,
    degeneracy_tol: float | None = None,
    resonance_tol: float | None = None,
) -> LiouvilleEigensystem:
    """All 𝒩² eigenpairs of ℒ: the lower-diagonal construction plus adjoint partners for l > 0."""
    eigensystem, sectors = prepare_sectors(model, degeneracy_tol)
    basis = model.basis
    pairs = []
    for l in range(basis.max_excitation + 1):
        for m in reversed(basis.sectors(l)):
            sector = sectors[(l, m)]
            for mu in range(1, len(sector.eigenvalues) + 1):
                rc = right_chain(l, m, mu, sectors, resonance_tol)
                lc = left_chain(l, m, mu, sectors, resonance_tol)
                j, k = unflatten_pair(mu, basis.dims[m])
                pair = LiouvilleEigenpair(
                    l=l,
                    m=m,
                    mu=mu,
                    j=j,
                    k=k,
                    eigenvalue=complex(sector.eigenvalues[mu - 1]),
                    right=assemble_original_basis(rc, sectors, basis, l, "right"),
                    left=assemble_original_basis(lc, sectors, basis, l, "left"),
                    right_chain=MappingProxyType(rc),
                    left_chain=MappingProxyType(lc),
                )
                pairs.append(pair)
                if l > 0:
                    pairs.append(pair.adjoint_partner())
    pairs.sort(key=lambda p: (p.l, p.m, p.mu, p.adjoint))
    logger.info("Built %d Liouvillian eigenpairs for %s (dimension %d)", len(pairs), model.name, basis.total_dimension)
    return LiouvilleEigensystem(
        model=model,
        pairs=tuple(pairs),
        sectors=MappingProxyType(sectors),
        block_eigensystem=eigensystem,
    )
