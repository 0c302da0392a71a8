"""Command handlers behind the CLI: solve, spectrum, evolve, verify."""
import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from app.core.config import get_settings
from app.core.dynamics import cutoff_population, emission_spectrum, evolve_many, purity
from app.core.errors import ConfigurationError, SizeGuardError
from app.core.model_library import BlockModel, build_model, default_probe
from app.core.oracle import verification_report
from app.core.spectral_solver import LiouvilleEigensystem, full_eigensystem
from app.models.schemas import EigenvalueRecord, RunConfig

logger = logging.getLogger(__name__)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def load_run_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON run configuration (unknown keys are errors)."""
    return RunConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))


@contextmanager
def _open_output(path: str | Path | None):
    if path is None:
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="\n") as fh:
        yield fh
    logger.info("Wrote %s", target)


def _solve(config: RunConfig) -> tuple[BlockModel, LiouvilleEigensystem]:
    model = build_model(config.model, config.params, config.cutoff)
    system = full_eigensystem(
        model, degeneracy_tol=config.tolerances.degeneracy, resonance_tol=config.tolerances.resonance
    )
    return model, system


def eigenvalue_records(system: LiouvilleEigensystem) -> list[EigenvalueRecord]:
    return [
        EigenvalueRecord(
            l=p.l, m=p.m, j=p.j, k=p.k,
            lambda_re=p.eigenvalue.real, lambda_im=p.eigenvalue.imag,
            adjoint_flag=p.adjoint,
        )
        for p in system.pairs
    ]


def initial_state(name: str, model: BlockModel) -> np.ndarray:
    """Projector named `ground` (|0,1>), `excited_atom` (|1,2>) or `n,j`."""
    basis = model.basis
    key = name.strip().lower()
    if key == "ground":
        n, j = 0, 1
    elif key == "excited_atom":
        if basis.max_excitation < 1 or basis.dims[1] < 2:
            raise ConfigurationError(f"Model {model.name} has no state |1,2> for excited_atom")
        n, j = 1, 2
    else:
        try:
            n, j = (int(part) for part in key.split(","))
        except ValueError:
            raise ConfigurationError(f"Unknown initial state {name!r}; use ground, excited_atom or n,j") from None
    idx = basis.index(n, j)
    rho = np.zeros((basis.total_dimension,) * 2, dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def cmd_solve(config: RunConfig, out: str | None = None) -> int:
    model, system = _solve(config)
    records = eigenvalue_records(system)
    path = out or config.output.path
    with _open_output(path) as fh:
        if config.output.format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["l", "m", "j", "k", "lambda_re", "lambda_im", "adjoint_flag"])
            for r in records:
                writer.writerow([r.l, r.m, r.j, r.k, _fmt(r.lambda_re), _fmt(r.lambda_im), str(r.adjoint_flag).lower()])
        else:
            payload = {
                "model": config.model,
                "cutoff": model.cutoff,
                "dimension": model.basis.total_dimension,
                "eigenvalues": [r.model_dump() for r in records],
            }
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_spectrum(
    config: RunConfig,
    omega_min: float,
    omega_max: float,
    points: int,
    out: str | None = None,
    initial: str = "excited_atom",
) -> int:
    if points < 2:
        raise ConfigurationError(f"--points must be >= 2, got {points}")
    if not omega_max > omega_min:
        raise ConfigurationError("--omega-max must be greater than --omega-min")
    model, system = _solve(config)
    probe_name = config.probe or default_probe(model)
    if probe_name not in model.operators:
        raise ConfigurationError(f"Unknown probe {probe_name!r}; model offers {', '.join(sorted(model.operators))}")
    omega = np.linspace(omega_min, omega_max, points)
    result = emission_spectrum(system, initial_state(initial, model), omega, model.operators[probe_name])
    logger.info("Spectrum of %s: ς = %.6g from %d weights", probe_name, result.varsigma, len(result.weights))
    with _open_output(out or config.output.path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "s", "S"])
        for w, s, S in zip(result.omega, result.s, result.S):
            writer.writerow([_fmt(w), _fmt(s), _fmt(S)])
    return 0


def cmd_evolve(config: RunConfig, initial: str, t_max: float, steps: int, out: str | None = None) -> int:
    if steps < 1:
        raise ConfigurationError(f"--steps must be >= 1, got {steps}")
    if not t_max >= 0:
        raise ConfigurationError(f"--t-max must be >= 0, got {t_max}")
    model, system = _solve(config)
    rho0 = initial_state(initial, model)
    times = np.array([0.0]) if t_max == 0 else np.linspace(0.0, t_max, steps + 1)
    states = evolve_many(rho0, times, system)

    leak = max(cutoff_population(rho, model.basis) for rho in states)
    if model.basis.max_excitation > 0 and leak > get_settings().leakage_warning:
        logger.warning("Population of the cutoff block n=%d reaches %.3g; raise the cutoff", model.cutoff, leak)

    basis = model.basis
    columns = [f"pop_{n}_{j}" for n, d in enumerate(basis.dims) for j in range(1, d + 1)]
    with _open_output(out or config.output.path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "trace", "purity", *columns])
        for t, rho in zip(times, states):
            pops = np.real(np.diag(rho))
            writer.writerow([_fmt(t), _fmt(np.trace(rho).real), _fmt(purity(rho)), *(_fmt(p) for p in pops)])
    return 0


def cmd_verify(config: RunConfig, stream: io.TextIOBase | None = None) -> int:
    """Print one PASS/FAIL line per check; 0 when all pass, 1 otherwise."""
    stream = stream or sys.stdout
    model = build_model(config.model, config.params, config.cutoff)
    guard = get_settings().oracle_max_dimension
    if model.basis.total_dimension > guard:
        raise SizeGuardError(f"Hilbert-space dimension {model.basis.total_dimension} exceeds the dense oracle guard {guard}")
    system = full_eigensystem(
        model, degeneracy_tol=config.tolerances.degeneracy, resonance_tol=config.tolerances.resonance
    )
    checks = verification_report(
        system, residual_tol=config.tolerances.residual, evolution_tol=config.tolerances.evolution
    )
    for check in checks:
        print(check.line(), file=stream)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning("Verification failed: %s", ", ".join(failed))
        return 1
    return 0
