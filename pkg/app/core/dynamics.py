"""
Time evolution, two-time correlations and the atomic emission spectrum from the
spectral decomposition ρ(t) = Σ_λ Tr[ρ̌_λ† ρ₀] e^{λt} ρ̂_λ.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from app.core.block_eigensolver import jc_analytic_block
from app.core.config import get_settings
from app.core.errors import ConfigurationError, DivergentSpectrumError, StateValidationError
from app.core.graded_space import GradedBasis
from app.core.model_library import BlockOperator
from app.core.spectral_solver import LiouvilleEigensystem

logger = logging.getLogger(__name__)

STATE_TOL = 1e-10
# expansion coefficients at or below this are treated as absent
COEFFICIENT_TOL = 1e-12


def coefficients(system: LiouvilleEigensystem, operator: np.ndarray) -> np.ndarray:
    """Tr[ρ̌_λ† X] for every eigenpair; X need not be a state."""
    return np.einsum("pij,ij->p", system.left_stack.conj(), np.asarray(operator, dtype=complex))


def _validate_state(system: LiouvilleEigensystem, rho0: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    dim = system.basis.total_dimension
    if rho.shape != (dim, dim):
        raise StateValidationError(f"Initial state has shape {rho.shape}, expected {(dim, dim)}")
    if not np.all(np.isfinite(rho)):
        raise StateValidationError("Initial state has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
        raise StateValidationError("Initial state is not Hermitian")
    if abs(np.trace(rho) - 1) > STATE_TOL:
        raise StateValidationError(f"Initial state has trace {np.trace(rho).real:.12g}, expected 1")
    return rho


def expand_state(rho0: np.ndarray, system: LiouvilleEigensystem) -> np.ndarray:
    """Coefficients c_λ = Tr[ρ̌_λ† ρ₀] of a validated density matrix, in pair order."""
    return coefficients(system, _validate_state(system, rho0))


def _check_time(t: float) -> float:
    if not math.isfinite(t) or t < 0:
        raise ConfigurationError(f"Time must be finite and >= 0, got {t}")
    return float(t)


def evolve(rho0: np.ndarray, t: float, system: LiouvilleEigensystem) -> np.ndarray:
    """ρ(t) = Σ_λ c_λ e^{λt} ρ̂_λ."""
    c = expand_state(rho0, system)
    weights = c * np.exp(system.eigenvalues * _check_time(t))
    return np.einsum("p,pij->ij", weights, system.right_stack)


def evolve_many(rho0: np.ndarray, times: np.ndarray, system: LiouvilleEigensystem) -> np.ndarray:
    """ρ(t) for every t, stacked along the first axis."""
    c = expand_state(rho0, system)
    times = np.asarray([_check_time(t) for t in np.atleast_1d(times)])
    weights = c[None, :] * np.exp(np.outer(times, system.eigenvalues))
    return np.einsum("tp,pij->tij", weights, system.right_stack)


def two_time_correlation(
    system: LiouvilleEigensystem, rho0: np.ndarray, t: float, t_prime: float, lowering: np.ndarray
) -> complex:
    """
    <σ⁺(t) σ⁻(t')> = Tr[σ⁻ e^{ℒ(t'-t)} (ρ(t) σ⁺)] for t' >= t, with σ⁻ = `lowering` (dense).
    For t' < t the conjugate of the swapped ordering is returned.
    """
    t, t_prime = _check_time(t), _check_time(t_prime)
    if t_prime < t:
        return complex(np.conj(two_time_correlation(system, rho0, t_prime, t, lowering)))
    sigma_minus = np.asarray(lowering, dtype=complex)
    source = evolve(rho0, t, system) @ sigma_minus.conj().T
    d = coefficients(system, source) * np.exp(system.eigenvalues * (t_prime - t))
    traces = np.einsum("ij,pji->p", sigma_minus, system.right_stack)
    return complex(np.sum(d * traces))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    omega: np.ndarray
    s: np.ndarray
    varsigma: float
    S: np.ndarray
    # (λ, λ', T_{λ,λ'}) for every weight kept after pruning
    weights: tuple[tuple[complex, complex, complex], ...] = field(default=(), repr=False)
    # (l, m, μ, adjoint) of every eigenpair in the expansion of ρ₀ or in a kept weight
    contributing: frozenset[tuple[int, int, int, bool]] = frozenset()


def spectral_weights(
    system: LiouvilleEigensystem, rho0: np.ndarray, probe: BlockOperator, prune_ratio: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    T_{λ,λ'} = Tr[ρ̌_λ† ρ₀] Tr[ρ̌_λ'† ρ̂_λ σ⁺] Tr[σ⁻ ρ̂_λ'] as (rows, cols, T) over the kept entries,
    rows and cols indexing `system.pairs`. Entries below prune_ratio·max|T| are dropped.
    """
    ratio = prune_ratio if prune_ratio is not None else get_settings().spectrum_prune_ratio
    sigma_minus = probe.to_dense(system.basis)
    c = expand_state(rho0, system)
    active = np.flatnonzero(np.abs(c) > COEFFICIENT_TOL)
    empty = np.zeros(0, dtype=int), np.zeros(0, dtype=int), np.zeros(0, dtype=complex)
    if active.size == 0:
        return empty
    shifted = system.right_stack[active] @ sigma_minus.conj().T
    overlaps = np.einsum("qij,pij->pq", system.left_stack.conj(), shifted)
    emitted = np.einsum("ij,qji->q", sigma_minus, system.right_stack)
    T = c[active, None] * overlaps * emitted[None, :]
    largest = np.max(np.abs(T))
    if largest == 0:
        return empty
    rows, cols = np.nonzero((np.abs(T) >= ratio * largest) & (T != 0))
    return active[rows], cols, T[rows, cols]


def emission_spectrum(
    system: LiouvilleEigensystem,
    rho0: np.ndarray,
    omega: np.ndarray,
    probe: BlockOperator,
    prune_ratio: float | None = None,
    decay_tol: float = 1e-10,
) -> SpectrumResult:
    """
    s(ω) = Σ T_{λ,λ'} / [(λ - λ' - iω)(λ' + iω)],  ς = Σ T_{λ,λ'} / (-λ),  S = s / (2πς).
    Any kept weight on an eigenvalue with Re λ >= -decay_tol makes the time integrals diverge.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    rows, cols, T = spectral_weights(system, rho0, probe, prune_ratio)
    if T.size == 0:
        raise DivergentSpectrumError("Probe carries no spectral weight for this initial state (ς = 0)")
    lam, lam_p = system.eigenvalues[rows], system.eigenvalues[cols]
    stuck = (lam.real >= -decay_tol) | (lam_p.real >= -decay_tol)
    if np.any(stuck):
        i = int(np.flatnonzero(stuck)[0])
        raise DivergentSpectrumError(
            f"Weight {T[i]:.3g} on non-decaying eigenvalues ({lam[i]:.6g}, {lam_p[i]:.6g})"
        )

    iw = 1j * omega[:, None]
    terms = T[None, :] / ((lam[None, :] - lam_p[None, :] - iw) * (lam_p[None, :] + iw))
    s_complex = terms.sum(axis=1)
    varsigma_complex = np.sum(T / (-lam))

    scale = max(float(np.max(np.abs(s_complex))), 1e-300)
    leak = float(np.max(np.abs(s_complex.imag))) / scale
    if leak > 1e-10:
        logger.warning("Emission spectrum has relative imaginary part %.3g", leak)
    if abs(varsigma_complex.imag) > 1e-10 * max(abs(varsigma_complex), 1e-300):
        logger.warning("Normalization ς has imaginary part %.3g", varsigma_complex.imag)
    varsigma = float(varsigma_complex.real)
    if varsigma <= 0:
        raise DivergentSpectrumError(f"Normalization ς = {varsigma:.6g} is not positive")

    s = s_complex.real
    weights = tuple((complex(a), complex(b), complex(t)) for a, b, t in zip(lam, lam_p, T))
    expanded = np.flatnonzero(np.abs(expand_state(rho0, system)) > COEFFICIENT_TOL)
    contributing = frozenset(system.pairs[i].label for i in np.union1d(expanded, cols))
    logger.debug(
        "Emission spectrum over %d points from %d weights on %d eigenpairs", omega.size, T.size, len(contributing)
    )
    return SpectrumResult(
        omega=omega,
        s=s,
        varsigma=varsigma,
        S=s / (2 * np.pi * varsigma),
        weights=weights,
        contributing=contributing,
    )


def jc_spectrum_closed_form(
    omega: np.ndarray, g: float, delta: float, kappa: float, gamma: float
) -> tuple[np.ndarray, float]:
    """Jaynes-Cummings spectrum for an initially excited atom and empty cavity."""
    omega = np.asarray(omega, dtype=float)
    num = 2 * (2 * omega + 1j * kappa)
    den = 4 * g**2 + (2 * delta - 2 * omega - 1j * gamma) * (2 * omega + 1j * kappa)
    s = np.abs(num / den) ** 2
    total = gamma + kappa
    varsigma = (4 * g**2 * total + kappa * (4 * delta**2 + total**2)) / (
        4 * g**2 * total**2 + gamma * kappa * (4 * delta**2 + total**2)
    )
    return s, float(varsigma)


def jc_spectrum_rotation_form(
    omega: np.ndarray, g: float, delta: float, kappa: float, gamma: float
) -> tuple[np.ndarray, float]:
    """Same spectrum written with the n = 1 block eigenvalues ε_1, ε_2 and mixing angle θ_1."""
    omega = np.asarray(omega, dtype=float)
    eps, R, _ = jc_analytic_block(1, g, delta, kappa, gamma)
    cos2, sin2 = R[0, 0] ** 2, R[1, 0] ** 2
    e1, e2 = eps
    s = np.abs(sin2 / (e1 - omega) + cos2 / (e2 - omega)) ** 2
    varsigma = (
        abs(sin2) ** 2 / (1j * (e1 - e1.conj()))
        + abs(cos2) ** 2 / (1j * (e2 - e2.conj()))
        + 2 * np.real(sin2 * cos2.conj() / (1j * (e1 - e2.conj())))
    )
    return s, float(np.real(varsigma))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.linalg.norm(np.asarray(a) - np.asarray(b), ord="nuc"))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def populations(rho: np.ndarray) -> np.ndarray:
    return np.real(np.diag(rho)).copy()


def cutoff_population(rho: np.ndarray, basis: GradedBasis) -> float:
    """Population of the highest retained block n = N; large values signal truncation error."""
    top = basis.block_slice(basis.max_excitation)
    return float(np.sum(np.real(np.diag(rho)[top])))
