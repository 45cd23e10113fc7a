import json

import pytest

from cavity_gauge.cli import main, oracle
from cavity_gauge.errors import ConfigError
from cavity_gauge.plotting import PlotError, nice_ticks, render_plot
from cavity_gauge.sweeps import read_csv

SWEEP = {"eta_grid": [0.0, 0.05, 0.1], "alpha_grid": [0.0, 1.0],
         "observables": ["energy", "entanglement_entropy", "perturbative_overlay"]}


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    cfg = _write(d / "c.json", SWEEP)
    out = d / "s.csv"
    assert main(["sweep", str(cfg), "-o", str(out)]) == 0
    return out


def test_sweep_command(sweep_csv):
    _, columns, rows = read_csv(sweep_csv)
    assert len(rows) == 6
    assert "pert_entanglement_entropy" in columns


def test_plot_is_deterministic(sweep_csv, tmp_path):
    spec = {"x": "eta", "y": "entanglement_entropy", "overlay": "pert_entanglement_entropy",
            "output": str(tmp_path / "a.svg"), "title": "S vs eta"}
    a = render_plot(sweep_csv, spec).read_bytes()
    spec["output"] = str(tmp_path / "b.svg")
    assert main(["plot", str(sweep_csv), str(_write(tmp_path / "p.json", spec))]) == 0
    b = (tmp_path / "b.svg").read_bytes()
    assert a == b
    assert a.startswith(b"<?xml") and b"<polyline" in a and b'stroke-dasharray="1.5,3"' in a


@pytest.mark.parametrize("spec, msg", [
    ({"x": "eta", "y": "negativity"}, "lacks column"),
    ({"x": "eta", "y": "entanglement_entropy", "series": [0.3]}, "no finite"),
    ({"x": "gap", "y": "E_G"}, "x must be"),
    ({"x": "eta", "y": "E_G", "colour": "red"}, "unknown"),
])
def test_plot_errors_write_nothing(sweep_csv, tmp_path, spec, msg):
    spec = dict(spec, output=str(tmp_path / "x.svg"))
    with pytest.raises(PlotError, match=msg):
        render_plot(sweep_csv, spec)
    assert not (tmp_path / "x.svg").exists()
    assert main(["plot", str(sweep_csv), str(_write(tmp_path / "p.json", spec))]) == 2


def test_nice_ticks():
    assert nice_ticks(0, 1.5) == [0.0, 0.5, 1.0, 1.5]
    assert nice_ticks(0, 1) == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


def test_exit_codes(tmp_path, capsys):
    assert main(["sweep", str(_write(tmp_path / "bad.json", {"nope": 1}))]) == 2
    assert "unknown key" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{")
    assert main(["sweep", str(tmp_path / "broken.json")]) == 2
    assert main(["sweep", str(tmp_path / "missing.json")]) == 4
    fail = {"eta_grid": [1.5], "alpha_grid": [0.0], "cutoffs": {"n_max": 20, "l_max": 6}}
    assert main(["sweep", str(_write(tmp_path / "f.json", fail)), "-o", str(tmp_path / "f.csv")]) == 3
    assert main(["converge", str(tmp_path / "f.json"), "-o", str(tmp_path / "r.csv")]) == 3


def test_converge_command_stdout(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {"eta_grid": [0.1], "alpha_grid": [1.0]})
    assert main(["converge", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "cutoff_trace" in out and "10:4:" in out


def test_oracle_command(tmp_path, capsys):
    point = {"eta": 0.1, "alpha": 0.0, "omega": 1.0, "omega_m": 1.0, "omega_eg": 1.0,
             "d_eg_sq": 3.141592653589793 * 3,
             "ret": {"omega_eg": 1.0, "d1": [0, 0, 1], "d2": [0, 0, 1], "R_hat": [1, 0, 0], "R": 2.0}}
    assert main(["oracle", str(_write(tmp_path / "pt.json", point))]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["alpha_jc"] == 0.5
    assert out["beta"] == pytest.approx(0.05)
    assert out["spontaneous_rate"] == pytest.approx(1.0)
    assert "ret_matrix_element" in out


def test_oracle_rejects_bad_points():
    with pytest.raises(ConfigError):
        oracle({"eta": 0.1, "alpha": 0, "omega": 1})
    with pytest.raises(ConfigError):
        oracle({"eta": 0.1, "alpha": 0, "omega": 1, "omega_m": 1, "g": 2})
    with pytest.raises(ConfigError):
        oracle({"eta": 0.1, "alpha": 0, "omega": -1, "omega_m": 1})
