"""
Command line interface.

    cavity-gauge sweep config.json
    cavity-gauge converge config.json
    cavity-gauge plot sweep.csv plotspec.json
    cavity-gauge oracle point.json

Exit codes: 0 success, 2 config error, 3 convergence failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ConvergenceError, ValidationError
from .hamiltonian import jc_gauge
from .perturbation import (
    beta_alpha,
    binary_entropy,
    ret_matrix_element,
    spontaneous_rate,
)
from .plotting import PlotError, render_plot
from .sweeps import convergence_report, load_config, parse_report, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

_POINT_KEYS = {"eta", "alpha", "omega", "omega_m", "omega_eg", "d_eg_sq", "ret"}
_RET_KEYS = {"omega_eg", "d1", "d2", "R_hat", "R"}


def oracle(point: dict) -> dict:
    """Closed-form weak-coupling values for one point, as a JSON-ready dict."""
    unknown = sorted(set(point) - _POINT_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) in point: {', '.join(unknown)}")
    try:
        eta, alpha = float(point["eta"]), float(point["alpha"])
        omega, omega_m = float(point["omega"]), float(point["omega_m"])
    except KeyError as exc:
        raise ConfigError(f"point needs key {exc}") from exc
    try:
        pt = beta_alpha(eta, omega, omega_m, alpha)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    out = {
        "eta": eta,
        "alpha": alpha,
        "omega": omega,
        "omega_m": omega_m,
        "alpha_jc": jc_gauge(omega, omega_m),
        "beta": pt.beta,
        "beta_local": pt.beta_local,
        "s_static": pt.s_static,
        "p": pt.p,
        "population_difference": 2.0 * pt.p - 1.0,
        "entanglement_entropy": binary_entropy(pt.p) if pt.p <= 1 else None,
    }
    if "omega_eg" in point or "d_eg_sq" in point:
        out["spontaneous_rate"] = spontaneous_rate(float(point["omega_eg"]), float(point["d_eg_sq"]))
    if "ret" in point:
        ret = point["ret"]
        unknown = sorted(set(ret) - _RET_KEYS)
        if unknown:
            raise ConfigError(f"unknown key(s) in ret: {', '.join(unknown)}")
        out["ret_matrix_element"] = ret_matrix_element(
            float(ret["omega_eg"]), ret["d1"], ret["d2"], ret["R_hat"], float(ret["R"]))
    return out


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    records = run_sweep(config, csv_path=args.output)
    failed = sum(not r.converged for r in records)
    print(f"{len(records)} points, {failed} not converged")
    return EXIT_CONVERGENCE if failed else EXIT_OK


def _cmd_converge(args) -> int:
    config = load_config(args.config)
    text = convergence_report(config, report_path=args.output)
    if args.output is None and config.report_path is None:
        sys.stdout.write(text)
    failed = sum(row["converged"] != "true" for row in parse_report(text))
    return EXIT_CONVERGENCE if failed else EXIT_OK


def _cmd_plot(args) -> int:
    out = render_plot(args.csv, args.plotspec)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        point = json.loads(Path(args.point).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.point}: invalid JSON ({exc})") from exc
    print(json.dumps(oracle(point), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cavity-gauge", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="run an (eta, alpha) sweep and write CSV")
    s.add_argument("config")
    s.add_argument("-o", "--output", help="CSV path (overrides output.csv)")
    s.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("converge", help="cutoff convergence report for every grid point")
    c.add_argument("config")
    c.add_argument("-o", "--output", help="report path (overrides output.report)")
    c.set_defaults(func=_cmd_converge)

    pl = sub.add_parser("plot", help="render an SVG chart from a sweep CSV")
    pl.add_argument("csv")
    pl.add_argument("plotspec")
    pl.set_defaults(func=_cmd_plot)

    o = sub.add_parser("oracle", help="closed-form weak-coupling values for one point")
    o.add_argument("point")
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValidationError, PlotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
