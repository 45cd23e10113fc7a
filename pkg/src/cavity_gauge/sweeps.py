"""
Configuration-driven (eta, alpha) sweeps, CSV output, and convergence reports.

A sweep solves the dipole once, then for every grid point converges the
cutoffs of ``H_alpha``, takes the ground state, and evaluates the requested
observables. Failed points are kept as rows with ``converged=false`` and blank
observables.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .dipole import DoubleWellParams, DipoleModel, certify_anharmonic, solve_double_well
from .errors import ConfigError, ConvergenceError
from .hamiltonian import ModelConfig, build_alpha_gauge, dipole_labels, jc_gauge, truncate_two_level
from .perturbation import beta_alpha, binary_entropy
from .qinfo import (
    FIDELITY_CONVENTION,
    LOG_CONVENTION,
    bell_states,
    entanglement_entropy,
    fidelity_pure,
    negativity,
    partial_trace,
    population_difference,
    purity,
)
from .spectra import (
    CutoffLimits,
    ENERGY_TOL,
    ENTANGLEMENT_TOL,
    GroundStateResult,
    ONE_DIPOLE_LIMITS,
    TWO_DIPOLE_LIMITS,
    converge_point,
    decoupled_ground_energy,
    ground_state,
    residual,
)

log = logging.getLogger(__name__)

OBSERVABLES = (
    "energy",
    "energy_shift",
    "population_difference",
    "entanglement_entropy",
    "negativity",
    "bell_fidelity",
    "purity",
    "perturbative_overlay",
    "two_level_truncation",
)
TWO_DIPOLE_ONLY = {"negativity", "bell_fidelity"}
ONE_DIPOLE_ONLY = {"perturbative_overlay"}
# observables that are re-evaluated on the two-level truncated model
TRUNCATABLE = ("population_difference", "entanglement_entropy", "negativity", "bell_fidelity", "purity")
CONVERGENCE_OBSERVABLES = (None, "population_difference", "entanglement_entropy", "negativity",
                           "bell_fidelity", "purity")
PERTURBATIVE_COLUMNS = ("pert_beta", "pert_p", "pert_population_difference", "pert_entanglement_entropy")

CORE_COLUMNS = ("eta", "alpha", "E_G", "gap", "converged", "N_final", "L_final",
                "degeneracy_warning", "residual")

DEFAULT_ETA_GRID = {"start": 0.0, "stop": 1.5, "step": 0.05}
DEFAULT_ALPHA_GRID = {"start": 0.0, "stop": 1.0, "step": 0.05}
TWO_DIPOLE_ENERGY_TOL = 1e-5

FLOAT_FORMAT = "{:.11e}"


def format_float(x: float) -> str:
    return FLOAT_FORMAT.format(x + 0.0)


def quantize(x: Optional[float]) -> Optional[float]:
    """Round to the 12 significant digits written to CSV."""
    return None if x is None else float(format_float(x)) + 0.0


# -- configuration ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    model: DoubleWellParams = field(default_factory=DoubleWellParams)
    levels: int = 16
    resonance: bool = True
    omega: Optional[float] = None
    eta_grid: Tuple[float, ...] = ()
    alpha_grid: Tuple[float, ...] = ()
    n_dipoles: int = 1
    observables: Tuple[str, ...] = ("energy", "entanglement_entropy")
    energy_tol: float = ENERGY_TOL
    entanglement_tol: float = ENTANGLEMENT_TOL
    cutoffs: CutoffLimits = ONE_DIPOLE_LIMITS
    convergence_observable: Optional[str] = "entanglement_entropy"
    workers: int = 1
    csv_path: Optional[str] = None
    report_path: Optional[str] = None
    check_anharmonicity: bool = True
    raw: Dict = field(default_factory=dict, compare=False, repr=False)

    def ordered_observables(self) -> Tuple[str, ...]:
        return tuple(o for o in OBSERVABLES if o in self.observables)

    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.raw).encode()).hexdigest()


_TOP_KEYS = {"model", "resonance", "omega", "eta_grid", "alpha_grid", "n_dipoles", "observables",
             "tolerances", "cutoffs", "convergence_observable", "workers", "output",
             "check_anharmonicity"}
_MODEL_KEYS = {"iota", "energy_scale", "grid_halfwidth", "grid_points", "stencil_order", "levels"}
_TOL_KEYS = {"energy", "entanglement"}
_CUTOFF_KEYS = {"n_start", "l_start", "n_step", "l_step", "n_max", "l_max"}
_OUTPUT_KEYS = {"csv", "report"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _reject_unknown(section: str, data: dict, allowed: set):
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be a JSON object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(unknown)}")


def _grid(name: str, spec) -> Tuple[float, ...]:
    if isinstance(spec, dict):
        _reject_unknown(name, spec, {"start", "stop", "step"})
        try:
            start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        except KeyError as exc:
            raise ConfigError(f"{name} range needs start, stop and step") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"{name} range must have step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + k * step, 12) for k in range(count)]
    elif isinstance(spec, list):
        values = spec
    else:
        raise ConfigError(f"{name} must be a list or a start/stop/step object")
    try:
        values = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must contain numbers") from exc
    if not values:
        raise ConfigError(f"{name} is empty")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{name} contains non-finite values")
    return values


def parse_config(data: dict) -> SweepConfig:
    """Validate a config document (see ``docs/config.md``) and build a :class:`SweepConfig`."""
    _reject_unknown("config", data, _TOP_KEYS)
    model_d = dict(data.get("model", {}))
    _reject_unknown("model", model_d, _MODEL_KEYS)
    levels = int(model_d.pop("levels", 16))
    try:
        params = DoubleWellParams(**model_d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc

    n_dipoles = data.get("n_dipoles", 1)
    if n_dipoles not in (1, 2):
        raise ConfigError("n_dipoles must be 1 or 2")

    resonance = data.get("resonance", True)
    omega = data.get("omega")
    if not isinstance(resonance, bool):
        raise ConfigError("resonance must be true or false")
    if resonance and omega is not None:
        raise ConfigError("give either resonance=true or a numeric omega, not both")
    if not resonance:
        if not isinstance(omega, (int, float)) or isinstance(omega, bool) or not omega > 0:
            raise ConfigError("omega must be a positive number when resonance is false")
        omega = float(omega)

    observables = data.get("observables", ["energy", "entanglement_entropy"])
    if not isinstance(observables, list) or not observables:
        raise ConfigError("observables must be a non-empty list")
    unknown = sorted(set(observables) - set(OBSERVABLES))
    if unknown:
        raise ConfigError(f"unknown observable(s): {', '.join(unknown)}")
    if n_dipoles == 1 and TWO_DIPOLE_ONLY & set(observables):
        raise ConfigError(f"{sorted(TWO_DIPOLE_ONLY & set(observables))} need n_dipoles = 2")
    if n_dipoles == 2 and ONE_DIPOLE_ONLY & set(observables):
        raise ConfigError(f"{sorted(ONE_DIPOLE_ONLY & set(observables))} need n_dipoles = 1")

    tol_d = data.get("tolerances", {})
    _reject_unknown("tolerances", tol_d, _TOL_KEYS)
    energy_tol = float(tol_d.get("energy", ENERGY_TOL if n_dipoles == 1 else TWO_DIPOLE_ENERGY_TOL))
    ent_tol = float(tol_d.get("entanglement", ENTANGLEMENT_TOL))
    if not (energy_tol > 0 and ent_tol > 0):
        raise ConfigError("tolerances must be positive")

    base_limits = ONE_DIPOLE_LIMITS if n_dipoles == 1 else TWO_DIPOLE_LIMITS
    cut_d = data.get("cutoffs", {})
    _reject_unknown("cutoffs", cut_d, _CUTOFF_KEYS)
    try:
        limits = replace(base_limits, **{k: int(v) for k, v in cut_d.items()})
    except ValueError as exc:
        raise ConfigError(f"invalid cutoffs: {exc}") from exc
    if limits.l_max > levels:
        raise ConfigError(f"cutoffs.l_max={limits.l_max} exceeds model.levels={levels}")

    default_conv = "entanglement_entropy" if n_dipoles == 1 else "negativity"
    conv = data.get("convergence_observable", default_conv)
    if conv not in CONVERGENCE_OBSERVABLES:
        raise ConfigError(f"convergence_observable must be one of {CONVERGENCE_OBSERVABLES}")
    if conv in TWO_DIPOLE_ONLY and n_dipoles == 1:
        raise ConfigError(f"convergence_observable {conv!r} needs n_dipoles = 2")

    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be a positive integer")

    out_d = data.get("output", {})
    _reject_unknown("output", out_d, _OUTPUT_KEYS)

    check = data.get("check_anharmonicity", True)
    if not isinstance(check, bool):
        raise ConfigError("check_anharmonicity must be true or false")

    return SweepConfig(
        model=params,
        levels=levels,
        resonance=resonance,
        omega=omega,
        eta_grid=_grid("eta_grid", data.get("eta_grid", DEFAULT_ETA_GRID)),
        alpha_grid=_grid("alpha_grid", data.get("alpha_grid", DEFAULT_ALPHA_GRID)),
        n_dipoles=n_dipoles,
        observables=tuple(observables),
        energy_tol=energy_tol,
        entanglement_tol=ent_tol,
        cutoffs=limits,
        convergence_observable=conv,
        workers=workers,
        csv_path=out_d.get("csv"),
        report_path=out_d.get("report"),
        check_anharmonicity=check,
        raw=data,
    )


def load_config(path) -> SweepConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)


def prepare_model(config: SweepConfig) -> Tuple[DipoleModel, float]:
    """Solve the dipole and fix the mode frequency (``omega_m`` under resonance)."""
    model = solve_double_well(config.model, config.levels)
    if config.check_anharmonicity and config.model.potential is None:
        certify_anharmonic(model)
    omega = model.omega_m if config.resonance else config.omega
    return model, omega


# -- observables -------------------------------------------------------------------


def _measure(state: np.ndarray, space, n_dipoles: int, names: Sequence[str]) -> Dict[str, float]:
    labels = list(dipole_labels(n_dipoles))
    out: Dict[str, float] = {}
    rho_m = None
    if set(names) & {"population_difference", "negativity", "bell_fidelity", "purity"}:
        rho_m = partial_trace(state, labels, space)
    for name in names:
        if name == "population_difference":
            out[name] = population_difference(rho_m)
        elif name == "entanglement_entropy":
            out[name] = entanglement_entropy(state, space, labels).entropy
        elif name == "negativity":
            out[name] = negativity(rho_m, "dipole1")
        elif name == "bell_fidelity":
            psi, _ = bell_states(space.dims[0])
            out[name] = fidelity_pure(rho_m, psi)
        elif name == "purity":
            out[name] = purity(rho_m)
    return out


def observable_function(name: Optional[str], n_dipoles: int):
    if name is None:
        return None

    def f(res: GroundStateResult) -> float:
        return _measure(res.state, res.space, n_dipoles, [name])[name]

    return f


def columns_for(config: SweepConfig) -> Tuple[str, ...]:
    cols: List[str] = []
    obs = config.ordered_observables()
    for name in obs:
        if name == "energy":
            continue
        if name == "perturbative_overlay":
            cols.extend(PERTURBATIVE_COLUMNS)
        elif name == "two_level_truncation":
            cols.append("tl_E_G")
            cols.extend(f"tl_{o}" for o in TRUNCATABLE if o in obs)
        else:
            cols.append(name)
    return tuple(cols)


# -- records and points --------------------------------------------------------------


@dataclass
class SweepRecord:
    eta: float
    alpha: float
    E_G: Optional[float]
    gap: Optional[float]
    converged: bool
    N_final: Optional[int]
    L_final: Optional[int]
    degeneracy_warning: bool
    residual: Optional[float] = None
    values: Dict[str, Optional[float]] = field(default_factory=dict)
    cutoff_trace: Tuple[Tuple[int, int, float], ...] = field(default=(), compare=False, repr=False)
    steps: int = field(default=0, compare=False)


@dataclass(frozen=True)
class _Task:
    i: int
    j: int
    eta: float
    alpha: float


_WORKER_STATE: Dict[str, object] = {}


def _init_worker(config: SweepConfig, model: DipoleModel, omega: float, with_observables: bool):
    _WORKER_STATE.update(config=config, model=model, omega=omega, with_observables=with_observables)


def _solve_task(task: _Task) -> Tuple[int, int, SweepRecord]:
    config: SweepConfig = _WORKER_STATE["config"]
    model: DipoleModel = _WORKER_STATE["model"]
    omega: float = _WORKER_STATE["omega"]
    return task.i, task.j, solve_point(config, model, omega, task.eta, task.alpha,
                                       _WORKER_STATE["with_observables"])


def solve_point(
    config: SweepConfig,
    model: DipoleModel,
    omega: float,
    eta: float,
    alpha: float,
    with_observables: bool = True,
) -> SweepRecord:
    cfg = ModelConfig(omega=omega, eta=eta, alpha=alpha, n_dipoles=config.n_dipoles,
                      photon_cutoff=config.cutoffs.n_start, dipole_levels=config.cutoffs.l_start)
    columns = columns_for(config) if with_observables else ()
    try:
        res = converge_point(
            model, cfg, tol=config.energy_tol, limits=config.cutoffs,
            observable=observable_function(config.convergence_observable, config.n_dipoles),
            observable_tol=config.entanglement_tol,
        )
    except ConvergenceError as exc:
        log.warning("eta=%g alpha=%g did not converge: %s", eta, alpha, exc)
        d = exc.diagnostics
        return SweepRecord(eta=eta, alpha=alpha, E_G=None, gap=None, converged=False,
                           N_final=d.get("photon_cutoff"), L_final=d.get("dipole_levels"),
                           degeneracy_warning=False, values={c: None for c in columns},
                           cutoff_trace=tuple(d.get("trace", ())))

    final = cfg.with_cutoffs(res.photon_cutoff, res.dipole_levels)
    H = build_alpha_gauge(model, final)
    values: Dict[str, Optional[float]] = {}
    if with_observables:
        values = _observables(config, model, final, H, res)
    return SweepRecord(
        eta=eta, alpha=alpha, E_G=quantize(res.energy), gap=quantize(res.gap), converged=True,
        N_final=res.photon_cutoff, L_final=res.dipole_levels, degeneracy_warning=res.degenerate,
        residual=quantize(residual(H, res)), values={k: quantize(v) for k, v in values.items()},
        cutoff_trace=res.cutoff_trace, steps=res.steps,
    )


def _observables(config, model, cfg: ModelConfig, H, res: GroundStateResult) -> Dict[str, float]:
    obs = config.ordered_observables()
    values: Dict[str, float] = {}
    measured = [o for o in TRUNCATABLE if o in obs]
    m = _measure(res.state, res.space, config.n_dipoles, measured)
    for name in obs:
        if name == "energy_shift":
            values[name] = res.energy - decoupled_ground_energy(model, cfg)
        elif name == "perturbative_overlay":
            pt = beta_alpha(cfg.eta, cfg.omega, model.omega_m, cfg.alpha)
            values["pert_beta"] = pt.beta
            values["pert_p"] = pt.p
            values["pert_population_difference"] = 2.0 * pt.p - 1.0
            values["pert_entanglement_entropy"] = binary_entropy(pt.p) if pt.p <= 1 else float("nan")
        elif name == "two_level_truncation":
            tl = ground_state(truncate_two_level(H, cfg))
            values["tl_E_G"] = tl.energy
            for o, v in _measure(tl.state, tl.space, config.n_dipoles, measured).items():
                values[f"tl_{o}"] = v
        elif name in m:
            values[name] = m[name]
    return values


def _tasks(config: SweepConfig) -> List[_Task]:
    return [_Task(i, j, eta, alpha)
            for i, eta in enumerate(config.eta_grid)
            for j, alpha in enumerate(config.alpha_grid)]


def _run_points(config: SweepConfig, model, omega, with_observables: bool) -> List[SweepRecord]:
    tasks = _tasks(config)
    if config.workers == 1:
        _init_worker(config, model, omega, with_observables)
        done = [_solve_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker,
                                 initargs=(config, model, omega, with_observables)) as pool:
            done = list(pool.map(_solve_task, tasks))
    done.sort(key=lambda t: (t[0], t[1]))
    return [rec for _, _, rec in done]


# -- CSV -------------------------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(float(v))


def header_lines(config: SweepConfig, model: DipoleModel, omega: float) -> List[str]:
    lines = [
        f"cavity_gauge {__version__} sweep",
        f"config_sha256: {config.config_hash()}",
        f"config: {canonical_json(config.raw)}",
        f"n_dipoles: {config.n_dipoles}",
        f"omega: {format_float(omega)}",
        f"omega_m: {format_float(model.omega_m)}",
        f"alpha_jc: {format_float(jc_gauge(omega, model.omega_m))}",
        f"resonance: {'true' if config.resonance else 'false'}",
        f"iota: {config.model.iota}",
        f"tolerances: energy={config.energy_tol} entanglement={config.entanglement_tol}",
        f"convergence_observable: {config.convergence_observable}",
        "cutoffs: " + " ".join(f"{k}={v}" for k, v in asdict(config.cutoffs).items()),
        f"fidelity: {FIDELITY_CONVENTION}",
        f"log: {LOG_CONVENTION}",
        "floats: 12 significant digits",
    ]
    return ["# " + line for line in lines]


def write_csv(records: Sequence[SweepRecord], columns: Sequence[str], path, header: Sequence[str] = ()):
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(CORE_COLUMNS) + list(columns))
    for r in records:
        row = [_cell(r.eta), _cell(r.alpha), _cell(r.E_G), _cell(r.gap), _cell(r.converged),
               _cell(r.N_final), _cell(r.L_final), _cell(r.degeneracy_warning), _cell(r.residual)]
        row += [_cell(r.values.get(c)) for c in columns]
        writer.writerow(row)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(buf.getvalue().encode("utf-8"))


def _parse_cell(col: str, text: str):
    if text == "":
        return None
    if col in ("converged", "degeneracy_warning"):
        return text == "true"
    if col in ("N_final", "L_final"):
        return int(text)
    return float(text)


def read_csv(path) -> Tuple[List[str], List[str], List[Dict[str, object]]]:
    """Return ``(comment_lines, columns, rows)`` with cells parsed to Python values."""
    comments, body = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            (comments if line.startswith("#") else body).append(line)
    reader = csv.reader(body)
    try:
        columns = next(reader)
    except StopIteration:
        return [c.rstrip("\n") for c in comments], [], []
    rows = [{c: _parse_cell(c, t) for c, t in zip(columns, raw)} for raw in reader if raw]
    return [c.rstrip("\n") for c in comments], columns, rows


def read_records(path) -> List[SweepRecord]:
    _, columns, rows = read_csv(path)
    extra = [c for c in columns if c not in CORE_COLUMNS]
    return [
        SweepRecord(
            eta=row["eta"], alpha=row["alpha"], E_G=row["E_G"], gap=row["gap"],
            converged=row["converged"], N_final=row["N_final"], L_final=row["L_final"],
            degeneracy_warning=row["degeneracy_warning"], residual=row["residual"],
            values={c: row[c] for c in extra},
        )
        for row in rows
    ]


# -- entry points ------------------------------------------------------------------------


def _resolve(path: Optional[str], fallback: Optional[str]) -> Optional[Path]:
    chosen = path if path is not None else fallback
    return Path(chosen) if chosen is not None else None


def run_sweep(config: SweepConfig, csv_path=None) -> List[SweepRecord]:
    """
    Solve every ``(eta, alpha)`` point; write the CSV if a path is configured.

    Rows are ordered by ``(eta index, alpha index)``.
    """
    model, omega = prepare_model(config)
    records = _run_points(config, model, omega, with_observables=True)
    out = _resolve(csv_path, config.csv_path)
    if out is not None:
        write_csv(records, columns_for(config), out, header_lines(config, model, omega))
        log.info("wrote %d rows to %s", len(records), out)
    return records


REPORT_COLUMNS = ("eta", "alpha", "converged", "N_final", "L_final", "steps", "gap",
                  "degeneracy_warning", "cutoff_trace")


def convergence_report(config: SweepConfig, report_path=None) -> str:
    """
    Per-point cutoff record: final ``N`` and ``L``, the ``N:L:E_G`` trace, gap, and
    degeneracy flags. Returned as CSV text and written when a path is configured.
    """
    model, omega = prepare_model(config)
    records = _run_points(config, model, omega, with_observables=False)
    buf = io.StringIO()
    for line in header_lines(config, model, omega):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in records:
        trace = ";".join(f"{n}:{l}:{format_float(e)}" for n, l, e in r.cutoff_trace)
        writer.writerow([_cell(r.eta), _cell(r.alpha), _cell(r.converged), _cell(r.N_final),
                         _cell(r.L_final), str(r.steps), _cell(r.gap),
                         _cell(r.degeneracy_warning), trace])
    text = buf.getvalue()
    out = _resolve(report_path, config.report_path)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(text.encode("utf-8"))
    return text


def parse_report(text: str) -> List[Dict[str, str]]:
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(body))
