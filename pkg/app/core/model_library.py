"""
Models as block matrices in the graded basis: Hamiltonian blocks H^(n), loss
channels (γ_s, A_s^(n)) and dephasing channels (κ_s, C_s^(n)). ħ = 1.

Builders:
  build_jc, build_jc_dephasing    Jaynes-Cummings with cavity and atomic loss (+ σz dephasing)
  build_tc2                       two-atom Tavis-Cummings, optional XXZ coupling between the atoms
  build_spin_models               M spins, optionally coupled to one oscillator
  build_model                     dispatch by config name (used by the CLI)
"""
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Callable, Mapping, NamedTuple

import numpy as np
from scipy.special import comb

from app.core.errors import ConfigurationError, ShapeError
from app.core.graded_space import GradedBasis, grading_operator

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
MAX_SPINS = 6


class OperatorKind(str, Enum):
    CONSERVING = "conserving"
    LOWERING = "lowering"
    DEPHASING = "dephasing"


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """
    Operator stored block by block. Conserving and dephasing blocks are d_n x d_n;
    lowering blocks map block n to n-1 (d_{n-1} x d_n) and exist for n >= 1 only.
    """

    kind: OperatorKind
    blocks: Mapping[int, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for n, block in self.blocks.items():
            arr = np.array(block, dtype=complex, ndmin=2)
            arr.setflags(write=False)
            frozen[int(n)] = arr
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        object.__setattr__(self, "blocks", MappingProxyType(frozen))

    def block(self, n: int) -> np.ndarray:
        try:
            return self.blocks[n]
        except KeyError:
            raise ShapeError(f"{self.kind.value} operator has no block n={n}") from None

    def validate(self, basis: GradedBasis) -> None:
        if self.kind is OperatorKind.LOWERING:
            if 0 in self.blocks:
                raise ShapeError("A lowering operator has no block at n=0")
            expected = {n: (basis.dims[n - 1], basis.dims[n]) for n in range(1, len(basis.dims))}
        else:
            expected = {n: (d, d) for n, d in enumerate(basis.dims)}
        if set(self.blocks) != set(expected):
            raise ShapeError(f"{self.kind.value} operator blocks {sorted(self.blocks)} != {sorted(expected)}")
        for n, shape in expected.items():
            if self.blocks[n].shape != shape:
                raise ShapeError(f"{self.kind.value} block n={n} has shape {self.blocks[n].shape}, expected {shape}")

    def gram_block(self, n: int) -> np.ndarray:
        """(O†O)^(n), the d_n x d_n block of O†O."""
        if self.kind is OperatorKind.LOWERING and n == 0:
            d = self.blocks[1].shape[0]
            return np.zeros((d, d), dtype=complex)
        b = self.block(n)
        return b.conj().T @ b

    def to_dense(self, basis: GradedBasis) -> np.ndarray:
        """Expand to the full N x N matrix in the global ordering."""
        out = np.zeros((basis.total_dimension,) * 2, dtype=complex)
        for n, b in self.blocks.items():
            rows = basis.block_slice(n - 1 if self.kind is OperatorKind.LOWERING else n)
            out[rows, basis.block_slice(n)] = b
        return out


class Channel(NamedTuple):
    rate: float
    operator: BlockOperator
    name: str = ""


@dataclass(frozen=True, eq=False)
class BlockModel:
    name: str
    basis: GradedBasis
    hamiltonian: BlockOperator
    loss_channels: tuple[Channel, ...] = ()
    dephasing_channels: tuple[Channel, ...] = ()
    params: Mapping[str, float] = field(default_factory=dict)
    # Named lowering operators available as spectrum probes (σ⁻, a, ...)
    operators: Mapping[str, BlockOperator] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "loss_channels", tuple(self.loss_channels))
        object.__setattr__(self, "dephasing_channels", tuple(self.dephasing_channels))
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        object.__setattr__(self, "operators", MappingProxyType(dict(self.operators)))
        self.validate()

    @property
    def cutoff(self) -> int:
        """Largest excitation number kept; population reaching it signals truncation leakage."""
        return self.basis.max_excitation

    @property
    def has_dephasing(self) -> bool:
        return any(ch.rate > 0 for ch in self.dephasing_channels)

    def validate(self) -> None:
        if self.hamiltonian.kind is not OperatorKind.CONSERVING:
            raise ShapeError("Hamiltonian must be a conserving block operator")
        self.hamiltonian.validate(self.basis)
        for n, block in self.hamiltonian.blocks.items():
            if not np.allclose(block, block.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
                raise ConfigurationError(f"Hamiltonian block n={n} is not Hermitian")
        for kind, channels in (
            (OperatorKind.LOWERING, self.loss_channels),
            (OperatorKind.DEPHASING, self.dephasing_channels),
        ):
            for ch in channels:
                if not math.isfinite(ch.rate) or ch.rate < 0:
                    raise ConfigurationError(f"Channel {ch.name or kind.value} has invalid rate {ch.rate} (gain is excluded)")
                if ch.operator.kind is not kind:
                    raise ShapeError(f"Channel {ch.name} must hold a {kind.value} operator")
                ch.operator.validate(self.basis)
        for name, op in self.operators.items():
            op.validate(self.basis)
        self._check_grading()

    def _check_grading(self) -> None:
        """Loss operators lower the excitation number by one, [A, I] = A; the rest commute with I."""
        grading = grading_operator(self.basis)
        shifts = [(self.hamiltonian, 0.0, "Hamiltonian")]
        shifts += [(ch.operator, 1.0, ch.name or "loss") for ch in self.loss_channels]
        shifts += [(ch.operator, 0.0, ch.name or "dephasing") for ch in self.dephasing_channels]
        for op, shift, name in shifts:
            dense = op.to_dense(self.basis)
            if np.max(np.abs(dense @ grading - grading @ dense - shift * dense), initial=0.0) > HERMITIAN_TOL:
                raise ShapeError(f"Operator {name} does not shift the excitation number by {shift:g}")


def _require_rates(**rates: float) -> None:
    for name, value in rates.items():
        if not math.isfinite(value) or value < 0:
            raise ConfigurationError(f"Rate {name} must be a finite nonnegative number, got {value}")


# ---- Jaynes-Cummings ----

def _jc_basis(N: int) -> GradedBasis:
    labels = [("0g",)] + [(f"{n}g", f"{n - 1}e") for n in range(1, N + 1)]
    return GradedBasis(dims=(1,) + (2,) * N, labels=labels)


def _jc_sigma_minus(N: int) -> BlockOperator:
    blocks = {1: [[0.0, 1.0]]}
    for n in range(2, N + 1):
        blocks[n] = [[0.0, 1.0], [0.0, 0.0]]
    return BlockOperator(OperatorKind.LOWERING, blocks)


def _jc_field(N: int) -> BlockOperator:
    blocks = {1: [[1.0, 0.0]]}
    for n in range(2, N + 1):
        blocks[n] = np.diag([math.sqrt(n), math.sqrt(n - 1)])
    return BlockOperator(OperatorKind.LOWERING, blocks)


def _jc_sigma_z(N: int) -> BlockOperator:
    blocks = {0: [[-1.0]]}
    for n in range(1, N + 1):
        blocks[n] = np.diag([-1.0, 1.0])
    return BlockOperator(OperatorKind.DEPHASING, blocks)


def build_jc(g: float, delta: float, kappa: float, gamma: float, N: int) -> BlockModel:
    """H = δσ⁺σ⁻ + g(aσ⁺ + a†σ⁻) with loss channels (γ, σ⁻) and (κ, a); basis |n>|g>, |n-1>|e>."""
    if N < 1:
        raise ConfigurationError(f"Jaynes-Cummings needs cutoff N >= 1, got {N}")
    _require_rates(kappa=kappa, gamma=gamma)
    blocks = {0: [[0.0]]}
    for n in range(1, N + 1):
        c = g * math.sqrt(n)
        blocks[n] = [[0.0, c], [c, delta]]
    sm, a = _jc_sigma_minus(N), _jc_field(N)
    return BlockModel(
        name="jaynes_cummings",
        basis=_jc_basis(N),
        hamiltonian=BlockOperator(OperatorKind.CONSERVING, blocks),
        loss_channels=(Channel(gamma, sm, "sigma_minus"), Channel(kappa, a, "a")),
        params={"g": g, "delta": delta, "kappa": kappa, "gamma": gamma},
        operators={"sigma_minus": sm, "a": a},
    )


def build_jc_dephasing(g: float, delta: float, kappa: float, gamma: float, gamma_z: float, N: int) -> BlockModel:
    """JC plus C ρ = γ_z(σᶻρσᶻ - ρ), i.e. a σᶻ channel of rate γ_z since (σᶻ)² = 1."""
    _require_rates(gamma_z=gamma_z)
    base = build_jc(g, delta, kappa, gamma, N)
    if gamma_z == 0:
        return base
    return BlockModel(
        name="jc_dephasing",
        basis=base.basis,
        hamiltonian=base.hamiltonian,
        loss_channels=base.loss_channels,
        dephasing_channels=(Channel(gamma_z, _jc_sigma_z(N), "sigma_z"),),
        params={**base.params, "gamma_z": gamma_z},
        operators=base.operators,
    )


# ---- Spin configurations shared by TC and the generic builders ----

class _SpinState(NamedTuple):
    photons: int
    spins: tuple[int, ...]  # 1 = excited

    @property
    def excitation(self) -> int:
        return self.photons + sum(self.spins)


def _spin_configurations(M: int, excited: int) -> list[tuple[int, ...]]:
    return sorted(c for c in itertools.product((0, 1), repeat=M) if sum(c) == excited)


def _graded_states(M: int, N: int, oscillator: bool) -> list[list[_SpinState]]:
    blocks = []
    for n in range(N + 1):
        states = []
        for spin_exc in range(0, min(n, M) + 1):
            if not oscillator and spin_exc != n:
                continue
            states.extend(_SpinState(n - spin_exc, c) for c in _spin_configurations(M, spin_exc))
        blocks.append(states)
    return blocks


def _state_label(state: _SpinState, oscillator: bool) -> str:
    spins = "".join("e" if s else "g" for s in state.spins)
    return f"{state.photons}{spins}" if oscillator else spins


Transition = Callable[[_SpinState], list[tuple[_SpinState, float]]]


def _dense_from_transitions(states: list[_SpinState], *rules: Transition) -> np.ndarray:
    """Matrix with entries <target|O|source> collected from per-state rules; targets outside the cutoff drop."""
    index = {s: i for i, s in enumerate(states)}
    out = np.zeros((len(states), len(states)), dtype=complex)
    for col, source in enumerate(states):
        for rule in rules:
            for target, amp in rule(source):
                row = index.get(target)
                if row is not None:
                    out[row, col] += amp
    return out


def _flip(state: _SpinState, site: int, value: int) -> tuple[int, ...]:
    spins = list(state.spins)
    spins[site] = value
    return tuple(spins)


def _lower_spin(site: int) -> Transition:
    def rule(s: _SpinState):
        return [(_SpinState(s.photons, _flip(s, site, 0)), 1.0)] if s.spins[site] else []
    return rule


def _lower_field(s: _SpinState):
    return [(_SpinState(s.photons - 1, s.spins), math.sqrt(s.photons))] if s.photons else []


def _sigma_z(site: int) -> Transition:
    return lambda s: [(s, 2.0 * s.spins[site] - 1.0)]


def _detuning(site: int, value: float) -> Transition:
    return lambda s: [(s, value)] if s.spins[site] else []


def _zz(a: int, b: int, value: float) -> Transition:
    return lambda s: [(s, value * (2.0 * s.spins[a] - 1.0) * (2.0 * s.spins[b] - 1.0))]


def _exchange(a: int, b: int, value: float) -> Transition:
    def rule(s: _SpinState):
        if s.spins[a] != s.spins[b]:
            spins = list(s.spins)
            spins[a], spins[b] = spins[b], spins[a]
            return [(_SpinState(s.photons, tuple(spins)), value)]
        return []
    return rule


def _jaynes_coupling(site: int, value: float) -> Transition:
    """g(aσ⁺ + a†σ⁻) evaluated directly so that no intermediate state leaves the cutoff."""
    def rule(s: _SpinState):
        out = []
        if not s.spins[site] and s.photons:
            out.append((_SpinState(s.photons - 1, _flip(s, site, 1)), value * math.sqrt(s.photons)))
        if s.spins[site]:
            out.append((_SpinState(s.photons + 1, _flip(s, site, 0)), value * math.sqrt(s.photons + 1)))
        return out
    return rule


def _split_blocks(dense: np.ndarray, basis: GradedBasis, kind: OperatorKind) -> BlockOperator:
    """Cut a full matrix into blocks, refusing anything outside the block pattern."""
    pattern = np.zeros(dense.shape, dtype=bool)
    blocks = {}
    for n in range(len(basis.dims)):
        if kind is OperatorKind.LOWERING:
            if n == 0:
                continue
            rows = basis.block_slice(n - 1)
        else:
            rows = basis.block_slice(n)
        cols = basis.block_slice(n)
        pattern[rows, cols] = True
        blocks[n] = dense[rows, cols]
    if np.any(np.abs(dense[~pattern]) > 0):
        raise ConfigurationError(f"Operator does not have the {kind.value} block structure")
    return BlockOperator(kind, blocks)


@dataclass(frozen=True)
class SpinCouplings:
    """Coupling constants keyed by 1-based spin indices; `oscillator` holds g_ℓ and switches the cavity on."""

    detunings: tuple[float, ...] = ()
    zz: Mapping[tuple[int, int], float] = field(default_factory=dict)
    exchange: Mapping[tuple[int, int], float] = field(default_factory=dict)
    oscillator: tuple[float, ...] | None = None


@dataclass(frozen=True)
class SpinRates:
    loss: tuple[float, ...] = ()
    dephasing: tuple[float, ...] = ()
    cavity: float = 0.0


def _padded(values: tuple[float, ...], M: int, what: str) -> list[float]:
    if len(values) > M:
        raise ConfigurationError(f"{what}: {len(values)} values for {M} spins")
    return list(values) + [0.0] * (M - len(values))


def _check_pairs(pairs: Mapping[tuple[int, int], float], M: int, what: str) -> dict[tuple[int, int], float]:
    out = {}
    for (a, b), value in pairs.items():
        if a == b or not (1 <= a <= M and 1 <= b <= M):
            raise ConfigurationError(f"{what} coupling ({a},{b}) is not a pair of distinct spins in 1..{M}")
        key = (min(a, b), max(a, b))
        out[key] = out.get(key, 0.0) + float(value)
    return out


def build_spin_models(M: int, couplings: SpinCouplings, rates: SpinRates, cutoff: int | None = None) -> BlockModel:
    """
    M interacting spins, d_n = C(M, n), or M spins coupled to one oscillator
    (couplings.oscillator set), d_n = sum_{n'<=min(n,M)} C(M, n') with cutoff N.
    Within a block states are ordered by spin excitation, then lexicographically
    by the spin tuple (s_1..s_M) with 1 = excited.
    """
    if not 1 <= M <= MAX_SPINS:
        raise ConfigurationError(f"Number of spins must be in 1..{MAX_SPINS}, got {M}")
    oscillator = couplings.oscillator is not None
    if oscillator:
        if cutoff is None or cutoff < 1:
            raise ConfigurationError("Spins with an oscillator need a cutoff N >= 1")
        N = cutoff
    else:
        if cutoff is not None and cutoff != M:
            raise ConfigurationError(f"Spin-only models have N = M = {M}, got cutoff {cutoff}")
        N = M
    detunings = _padded(couplings.detunings, M, "detunings")
    g = _padded(couplings.oscillator or (), M, "oscillator couplings")
    loss = _padded(rates.loss, M, "loss rates")
    dephasing = _padded(rates.dephasing, M, "dephasing rates")
    _require_rates(cavity=rates.cavity, **{f"loss_{i + 1}": r for i, r in enumerate(loss)},
                   **{f"dephasing_{i + 1}": r for i, r in enumerate(dephasing)})
    zz = _check_pairs(couplings.zz, M, "J")
    exchange = _check_pairs(couplings.exchange, M, "eta")

    graded = _graded_states(M, N, oscillator)
    states = [s for block in graded for s in block]
    basis = GradedBasis(
        dims=tuple(len(b) for b in graded),
        labels=[tuple(_state_label(s, oscillator) for s in b) for b in graded],
    )
    expected = tuple(spin_block_dimension(M, n, oscillator) for n in range(N + 1))
    if basis.dims != expected:
        raise ShapeError(f"Spin basis dims {basis.dims} differ from the binomial count {expected}")

    terms: list[Transition] = [_detuning(i, d) for i, d in enumerate(detunings) if d]
    terms += [_zz(a - 1, b - 1, v) for (a, b), v in zz.items() if v]
    terms += [_exchange(a - 1, b - 1, v) for (a, b), v in exchange.items() if v]
    if oscillator:
        terms += [_jaynes_coupling(i, c) for i, c in enumerate(g) if c]
    hamiltonian = _split_blocks(_dense_from_transitions(states, *terms), basis, OperatorKind.CONSERVING)

    operators = {}
    loss_channels = []
    for i in range(M):
        op = _split_blocks(_dense_from_transitions(states, _lower_spin(i)), basis, OperatorKind.LOWERING)
        operators[f"sigma_minus_{i + 1}"] = op
        loss_channels.append(Channel(loss[i], op, f"sigma_minus_{i + 1}"))
    if oscillator:
        a = _split_blocks(_dense_from_transitions(states, _lower_field), basis, OperatorKind.LOWERING)
        operators["a"] = a
        loss_channels.append(Channel(rates.cavity, a, "a"))
    dephasing_channels = [
        Channel(rate, _split_blocks(_dense_from_transitions(states, _sigma_z(i)), basis, OperatorKind.DEPHASING),
                f"sigma_z_{i + 1}")
        for i, rate in enumerate(dephasing) if rate > 0
    ]

    params = {"M": float(M)}
    params.update({f"delta_{i + 1}": d for i, d in enumerate(detunings)})
    params.update({f"gamma_{i + 1}": r for i, r in enumerate(loss)})
    if oscillator:
        params.update({f"g_{i + 1}": c for i, c in enumerate(g)})
        params["kappa"] = rates.cavity
    logger.debug("Built %d-spin model (oscillator=%s) with dims %s", M, oscillator, basis.dims)
    return BlockModel(
        name="spins_oscillator" if oscillator else "spin_chain",
        basis=basis,
        hamiltonian=hamiltonian,
        loss_channels=tuple(loss_channels),
        dephasing_channels=tuple(dephasing_channels),
        params=params,
        operators=operators,
    )


def spin_block_dimension(M: int, n: int, oscillator: bool) -> int:
    """Closed-form d_n: C(M, n) for spins only, sum_{n'<=min(n,M)} C(M, n') with an oscillator."""
    if not oscillator:
        return int(comb(M, n, exact=True))
    return int(sum(comb(M, k, exact=True) for k in range(0, min(n, M) + 1)))


# ---- Two-atom Tavis-Cummings ----

def build_tc2(
    g1: float,
    g2: float,
    delta1: float,
    delta2: float,
    gamma1: float,
    gamma2: float,
    kappa: float,
    N: int,
    J: float = 0.0,
    eta: float = 0.0,
) -> BlockModel:
    """
    Two two-level atoms in one cavity mode, H = Σ_ℓ δ_ℓσ_ℓ⁺σ_ℓ⁻ + g_ℓ(aσ_ℓ⁺ + a†σ_ℓ⁻),
    optionally with J σ₁ᶻσ₂ᶻ + η(σ₁⁺σ₂⁻ + h.c.). Basis per block:
    |n>gg, |n-1>ge, |n-1>eg, |n-2>ee (atom 1 first); loss (γ₁, σ₁⁻), (γ₂, σ₂⁻), (κ, a).
    """
    if N < 2:
        raise ConfigurationError(f"Two-atom Tavis-Cummings needs cutoff N >= 2, got {N}")
    model = build_spin_models(
        2,
        SpinCouplings(detunings=(delta1, delta2), zz={(1, 2): J}, exchange={(1, 2): eta}, oscillator=(g1, g2)),
        SpinRates(loss=(gamma1, gamma2), cavity=kappa),
        cutoff=N,
    )
    return BlockModel(
        name="tavis_cummings_2",
        basis=model.basis,
        hamiltonian=model.hamiltonian,
        loss_channels=model.loss_channels,
        params={"g1": g1, "g2": g2, "delta1": delta1, "delta2": delta2,
                "gamma1": gamma1, "gamma2": gamma2, "kappa": kappa, "J": J, "eta": eta},
        operators=model.operators,
    )


# ---- Config-facing registry ----

_SPIN_SITE = re.compile(r"^(delta|g|gamma|gamma_z)_(\d+)$")
_SPIN_PAIR = re.compile(r"^(J|eta)_(\d+)_(\d+)$")

_FIXED_PARAMETERS: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    # model: (required, optional)
    "jaynes_cummings": (frozenset({"g", "delta", "kappa", "gamma"}), frozenset()),
    "jc_dephasing": (frozenset({"g", "delta", "kappa", "gamma", "gamma_z"}), frozenset()),
    "tavis_cummings_2": (
        frozenset({"g1", "g2", "delta1", "delta2", "gamma1", "gamma2", "kappa"}),
        frozenset({"J", "eta"}),
    ),
}
MODEL_NAMES = ("jaynes_cummings", "jc_dephasing", "tavis_cummings_2", "spin_chain", "spins_oscillator")


def _spin_count(params: Mapping[str, float]) -> int:
    if "M" not in params:
        raise ConfigurationError("Spin models require parameter 'M'")
    M = params["M"]
    if not float(M).is_integer():
        raise ConfigurationError(f"M must be an integer, got {M}")
    M = int(M)
    if not 1 <= M <= MAX_SPINS:
        raise ConfigurationError(f"M must be in 1..{MAX_SPINS}, got {M}")
    return M


def check_parameters(model: str, params: Mapping[str, float], cutoff: int | None) -> None:
    """Reject unknown or missing parameter names and cutoffs the model cannot use."""
    if model not in MODEL_NAMES:
        raise ConfigurationError(f"Unknown model {model!r}; expected one of {', '.join(MODEL_NAMES)}")
    bad = [k for k, v in params.items() if not math.isfinite(v)]
    if bad:
        raise ConfigurationError(f"Non-finite parameter values: {', '.join(sorted(bad))}")
    if model in _FIXED_PARAMETERS:
        required, optional = _FIXED_PARAMETERS[model]
        missing = required - set(params)
        unknown = set(params) - required - optional
        if missing:
            raise ConfigurationError(f"{model}: missing parameters {', '.join(sorted(missing))}")
        if unknown:
            raise ConfigurationError(f"{model}: unknown parameters {', '.join(sorted(unknown))}")
        if cutoff is None:
            raise ConfigurationError(f"{model}: cutoff is required")
        return
    M = _spin_count(params)
    oscillator = model == "spins_oscillator"
    for key in params:
        if key == "M" or (oscillator and key == "kappa"):
            continue
        site, pair = _SPIN_SITE.match(key), _SPIN_PAIR.match(key)
        if site and (oscillator or site.group(1) != "g") and 1 <= int(site.group(2)) <= M:
            continue
        if pair and int(pair.group(2)) != int(pair.group(3)) and all(1 <= int(pair.group(i)) <= M for i in (2, 3)):
            continue
        raise ConfigurationError(f"{model}: unknown parameter {key!r}")
    if oscillator and cutoff is None:
        raise ConfigurationError("spins_oscillator: cutoff is required")
    if not oscillator and cutoff is not None and cutoff != M:
        raise ConfigurationError(f"spin_chain: cutoff must equal M={M} when given")


def _spin_arguments(params: Mapping[str, float], oscillator: bool) -> tuple[int, SpinCouplings, SpinRates]:
    M = _spin_count(params)

    def per_site(prefix: str) -> tuple[float, ...]:
        return tuple(float(params.get(f"{prefix}_{i}", 0.0)) for i in range(1, M + 1))

    def per_pair(prefix: str) -> dict[tuple[int, int], float]:
        out = {}
        for key, value in params.items():
            m = _SPIN_PAIR.match(key)
            if m and m.group(1) == prefix:
                out[(int(m.group(2)), int(m.group(3)))] = float(value)
        return out

    couplings = SpinCouplings(
        detunings=per_site("delta"),
        zz=per_pair("J"),
        exchange=per_pair("eta"),
        oscillator=per_site("g") if oscillator else None,
    )
    rates = SpinRates(loss=per_site("gamma"), dephasing=per_site("gamma_z"), cavity=float(params.get("kappa", 0.0)))
    return M, couplings, rates


def build_model(model: str, params: Mapping[str, float], cutoff: int | None) -> BlockModel:
    """Build a named model from a flat parameter map (the CLI config format)."""
    check_parameters(model, params, cutoff)
    p = dict(params)
    if model == "jaynes_cummings":
        return build_jc(p["g"], p["delta"], p["kappa"], p["gamma"], cutoff)
    if model == "jc_dephasing":
        return build_jc_dephasing(p["g"], p["delta"], p["kappa"], p["gamma"], p["gamma_z"], cutoff)
    if model == "tavis_cummings_2":
        return build_tc2(p["g1"], p["g2"], p["delta1"], p["delta2"], p["gamma1"], p["gamma2"], p["kappa"],
                         cutoff, J=p.get("J", 0.0), eta=p.get("eta", 0.0))
    oscillator = model == "spins_oscillator"
    M, couplings, rates = _spin_arguments(p, oscillator)
    return build_spin_models(M, couplings, rates, cutoff=cutoff)


def default_probe(model: BlockModel) -> str:
    """Name of the operator whose emission spectrum `spectrum` computes by default."""
    for name in ("sigma_minus", "sigma_minus_1"):
        if name in model.operators:
            return name
    raise ConfigurationError(f"Model {model.name} has no atomic lowering operator to probe")
