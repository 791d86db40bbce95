import json
import subprocess
import sys

import numpy as np
import pytest

from leo_hybrid.cli import (
    CSV_COLUMNS,
    ResultRow,
    emit_csv,
    emit_plot_script,
    main,
    read_csv,
    run_point,
    run_scenario,
)
from leo_hybrid.scenario import (
    Scenario,
    ScenarioError,
    builtin_scenarios,
    load_scenario,
    parse_scenario,
)

TINY = """\
# small smoke-test scenario
nx = 4
ny = 2
users = 2
rf_chains = 2
ut_gain_dbi = 20
architectures = fully_trps, partially_trps, fully_digital
sweep = power_budget_dbw
sweep_values = 10, 20
mc_samples = 200     ; keeps it fast
mc_validate = true
seed = 17
"""


@pytest.fixture
def tiny_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY, encoding="utf-8")
    return path


def test_parse_conversions():
    sc = parse_scenario(TINY, name="tiny")
    assert sc.name == "tiny" and sc.nt == 8 and sc.users == 2
    assert sc.architectures == ("fully_trps", "partially_trps", "fully_digital")
    assert sc.sweep_values == (10.0, 20.0)
    assert sc.mc_validate is True and sc.mc_samples == 200
    assert sc.point(20.0).power_budget_w == pytest.approx(100.0)
    assert sc.npa.p_max == pytest.approx(10 ** 0.6 * 1e-3)
    assert sc.components.p_rfc == pytest.approx(0.338)
    assert sc.noise == pytest.approx(1.035e-12)


@pytest.mark.parametrize("text,match", [
    ("bogus = 1", "unknown scenario key"),
    ("nx = eight", "cannot parse"),
    ("nx = 0", "positive"),
    ("hi_res_ratio = 1.5", r"\[0, 1\]"),
    ("architectures = fully_magic", "unknown architecture"),
    ("sweep = altitude", "sweep must be one of"),
    ("sweep = rf_chains\nsweep_values = 2.5", "integers"),
    ("mc_validate = maybe", "cannot parse"),
    ("nx = 2\nnx = 3", "malformed"),
])
def test_parse_errors(text, match):
    with pytest.raises(ScenarioError, match=match):
        parse_scenario(text)


def test_builtin_scenarios_load():
    names = builtin_scenarios()
    for fig in ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"):
        assert any(n.startswith(fig) for n in names)
    for n in names:
        assert load_scenario(n).name == n
    with pytest.raises(ScenarioError, match="built-in"):
        load_scenario("no_such_scenario")


def test_paper_scale():
    sc = Scenario().paper_scale()
    assert (sc.nx, sc.ny, sc.users, sc.rf_chains) == (12, 12, 9, 9)


def test_sweep_points():
    sc = Scenario(sweep="rf_chains", sweep_values=(4.0, 8.0))
    assert sc.point(8.0).rf_chains == 8 and isinstance(sc.point(8.0).rf_chains, int)
    sc = Scenario(sweep="hi_res_ratio", sweep_values=(0.0, 1.0))
    assert sc.point(1.0).architecture_spec("fully_trps").n_low == 0


def test_run_scenario_rows(tiny_file):
    sc = load_scenario(str(tiny_file))
    rows = run_scenario(sc)
    assert [(r.sweep_value, r.architecture) for r in rows] == [
        (v, a) for v in (10.0, 20.0) for a in sc.architectures]
    for r in rows:
        assert r.status == "ok", r.status
        assert r.energy_efficiency > 0 and r.mc_sum_rate > 0
        assert r.mc_sum_rate <= r.sum_rate_bound + 3 * r.mc_stderr
    digital = [r for r in rows if r.architecture == "fully_digital"]
    assert all(r.residual == 0 for r in digital)


def test_failed_point_is_recorded():
    sc = Scenario(nx=4, ny=2, users=2, rf_chains=3, architectures=("partially_trps",),
                  sweep="none", sweep_values=())
    point = run_point(sc, 0, "partially_trps", "nonlinear", 0)
    assert point.row.status.startswith("failed: ValueError")
    assert np.isnan(point.row.energy_efficiency)


def test_csv_round_trip_and_header_only(tmp_path, tiny_file):
    rows = run_scenario(load_scenario(str(tiny_file)))
    emit_csv(rows, tmp_path / "r.csv")
    back = read_csv(tmp_path / "r.csv")
    assert back == rows
    lines = (tmp_path / "r.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# units:")
    assert lines[1].split(",") == list(CSV_COLUMNS)
    emit_csv([], tmp_path / "empty.csv")
    lines = (tmp_path / "empty.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2 and read_csv(tmp_path / "empty.csv") == []


def test_float_precision(tmp_path):
    row = ResultRow("s", "fully_trps", "nonlinear", 0, "none", 0.1, 1 / 3, np.pi, float("nan"),
                    float("nan"), 1e-300, 2.0, 0.0, 0.0, 3, True, "ok")
    emit_csv([row], tmp_path / "p.csv")
    back = read_csv(tmp_path / "p.csv")[0]
    assert back.energy_efficiency == 1 / 3 and back.sum_rate_bound == np.pi
    assert np.isnan(back.mc_sum_rate)


def test_plot_script_is_valid(tmp_path):
    emit_plot_script([], tmp_path / "plot.py")
    compile((tmp_path / "plot.py").read_text(encoding="utf-8"), "plot.py", "exec")


def test_plot_script_runs(tmp_path):
    pytest.importorskip("matplotlib")
    rows = [ResultRow("s", a, "nonlinear", 0, "power_budget_dbw", v, 1e6 * v, 1.0,
                      float("nan"), float("nan"), 1.0, 1.0, 0.0, 0.0, 2, True, "ok")
            for a in ("fully_trps", "partially_trps") for v in (10.0, 20.0)]
    emit_csv(rows, tmp_path / "results.csv")
    emit_plot_script(rows, tmp_path / "plot_results.py")
    subprocess.run([sys.executable, str(tmp_path / "plot_results.py")], check=True)
    assert (tmp_path / "plot_results.png").stat().st_size > 0
    emit_csv([], tmp_path / "results.csv")
    subprocess.run([sys.executable, str(tmp_path / "plot_results.py")], check=True)


def test_cli_deterministic_bytes(tmp_path, tiny_file, capsys):
    for out in ("a", "b"):
        assert main(["--scenario", str(tiny_file), "--out", str(tmp_path / out)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["rows"] == 6 and summary["failed"] == 0
    for name in ("results.csv", "trace.csv", "residuals.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "plot_results.py").exists()
    assert (tmp_path / "a" / "timings.csv").exists()


def test_cli_seed_override_and_jobs(tmp_path, tiny_file):
    assert main(["--scenario", str(tiny_file), "--out", str(tmp_path / "a"), "--seed", "5"]) == 0
    assert main(["--scenario", str(tiny_file), "--out", str(tmp_path / "b"), "--seed", "5",
                 "--jobs", "2", "--save-precoders"]) == 0
    assert main(["--scenario", str(tiny_file), "--out", str(tmp_path / "c")]) == 0
    a = (tmp_path / "a" / "results.csv").read_bytes()
    assert a == (tmp_path / "b" / "results.csv").read_bytes()
    assert a != (tmp_path / "c" / "results.csv").read_bytes()
    with np.load(tmp_path / "b" / "precoders.npz") as npz:
        assert len(npz.files) == 6


def test_cli_scenario_error(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nx = -1\n", encoding="utf-8")
    assert main(["--scenario", str(bad), "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "scenario" and "nx" in err["message"]


def test_cli_io_error(tmp_path, tiny_file, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    assert main(["--scenario", str(tiny_file), "--out", str(blocker / "sub")]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "io"


def test_cli_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "leo_hybrid.cli", "--scenario", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr.strip().splitlines()[-1])["error"] == "scenario"
