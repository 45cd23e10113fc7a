"""
Summarise the cutoffs each (eta, alpha) point needs.

Prints a table of final photon cutoff N and dipole level count L with eta
down the rows and alpha across, which shows where the Coulomb-like gauges
need more levels than the dipole gauge.

    python scripts/cutoff_scan.py configs/alpha_scan.json
"""

import sys

from cavity_gauge.sweeps import convergence_report, load_config, parse_report


def main(path):
    config = load_config(path)
    rows = parse_report(convergence_report(config))
    alphas = sorted({float(r["alpha"]) for r in rows})
    table = {}
    for r in rows:
        cell = f"{r['N_final']}/{r['L_final']}" if r["converged"] == "true" else "--"
        table.setdefault(float(r["eta"]), {})[float(r["alpha"])] = cell
    print("eta \\ alpha " + " ".join(f"{a:>6.2f}" for a in alphas))
    for eta in sorted(table):
        print(f"{eta:>11.3f} " + " ".join(f"{table[eta].get(a, ''):>6}" for a in alphas))


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
