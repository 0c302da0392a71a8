#!/usr/bin/env python3
"""
Export the Jaynes-Cummings emission spectrum from the spectral decomposition next to
both closed forms, and report the largest relative deviation.
Usage (from repo root):
  python scripts/export_jc_spectrum.py [--g 1 --delta 0 --kappa 1 --gamma 1] [--cutoff 3]
                                       [--omega-min -5 --omega-max 5 --points 201] [--output FILE]
Output: CSV with columns omega, s_spectral, s_closed, s_rotation (default: jc_spectrum.csv).
"""
import argparse
import csv
import sys
from pathlib import Path

import numpy as np

# Repo root and load .env before any app imports
ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))
_env = ROOT / ".env"
if _env.exists():
    from dotenv import load_dotenv
    load_dotenv(_env, override=True)

from app.api.commands import initial_state
from app.core.dynamics import emission_spectrum, jc_spectrum_closed_form, jc_spectrum_rotation_form
from app.core.errors import SolverError
from app.core.model_library import build_jc
from app.core.spectral_solver import full_eigensystem


def export(
    out_path: Path,
    g: float,
    delta: float,
    kappa: float,
    gamma: float,
    cutoff: int,
    omega: np.ndarray,
) -> float:
    """Write the comparison CSV and return max |s_spectral - s_closed| / s_closed."""
    model = build_jc(g, delta, kappa, gamma, cutoff)
    system = full_eigensystem(model)
    spectral = emission_spectrum(system, initial_state("excited_atom", model), omega, model.operators["sigma_minus"])
    closed, _ = jc_spectrum_closed_form(omega, g, delta, kappa, gamma)
    rotation, _ = jc_spectrum_rotation_form(omega, g, delta, kappa, gamma)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "s_spectral", "s_closed", "s_rotation"])
        for row in zip(omega, spectral.s, closed, rotation):
            writer.writerow([f"{x:.17g}" for x in row])
    return float(np.max(np.abs(spectral.s - closed) / closed))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Compare spectral and closed-form JC emission spectra")
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=0.0)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--cutoff", type=int, default=3, help="Excitation cutoff N of the model")
    ap.add_argument("--omega-min", type=float, default=-5.0)
    ap.add_argument("--omega-max", type=float, default=5.0)
    ap.add_argument("--points", type=int, default=201)
    ap.add_argument("--output", "-o", type=Path, default=Path.cwd() / "jc_spectrum.csv", help="Output CSV")
    args = ap.parse_args(argv)

    omega = np.linspace(args.omega_min, args.omega_max, args.points)
    try:
        deviation = export(args.output, args.g, args.delta, args.kappa, args.gamma, args.cutoff, omega)
    except SolverError as e:
        print(f"Export failed: {e}", file=sys.stderr)
        return e.exit_code
    print(f"Wrote {args.output}")
    print(f"Max relative deviation spectral vs closed form: {deviation:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
