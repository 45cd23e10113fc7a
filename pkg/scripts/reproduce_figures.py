"""
Run the sweep configs in configs/ and render every chart into results/.

    python scripts/reproduce_figures.py            # all sweeps
    python scripts/reproduce_figures.py weak_coupling two_dipole

Sweeps whose CSV already exists are skipped unless --force is given.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from cavity_gauge.plotting import PlotError, render_plot
from cavity_gauge.sweeps import load_config, run_sweep

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"

# sweep name -> plot specs drawn from its CSV
FIGURES = {
    "standard": ["energy_shift"],
    "weak_coupling": ["entropy_weak", "population_weak"],
    "alpha_scan": ["entropy_alpha", "truncation_alpha"],
    "two_dipole": ["negativity_eta", "bell_fidelity_eta"],
    "two_dipole_alpha": ["negativity_alpha"],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("sweeps", nargs="*", default=list(FIGURES))
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    status = 0
    for name in args.sweeps:
        config = load_config(CONFIGS / f"{name}.json")
        csv_path = ROOT / config.csv_path
        if args.force or not csv_path.exists():
            records = run_sweep(config, csv_path=csv_path)
            bad = sum(not r.converged for r in records)
            print(f"{name}: {len(records)} points, {bad} not converged -> {csv_path.relative_to(ROOT)}")
        for plot in FIGURES[name]:
            spec = load_spec(plot)
            try:
                out = render_plot(csv_path, spec)
            except PlotError as exc:
                print(f"  {plot}: {exc}", file=sys.stderr)
                status = 1
                continue
            print(f"  {plot} -> {out.relative_to(ROOT)}")
    return status


def load_spec(name):
    spec = json.loads((CONFIGS / "plots" / f"{name}.json").read_text())
    spec["output"] = str(ROOT / spec["output"])
    return spec


if __name__ == "__main__":
    sys.exit(main())
