import json
import math

import numpy as np
import pytest

from levylab import scenarios
from levylab.cli import main
from levylab.medium import Pareto
from levylab.rng import substream
from levylab.scenarios import (SCENARIOS, ConfigError, ScenarioConfig, gap_sum_law,
                               increment_sum_law, run, run_report, validate)
from levylab.stable import sample_stable
from levylab.stats import ks_two_sample
from levylab.walks import DriftedZeta, SymmetricZeta

SMALL_CUSTOM = dict(scenario="custom", t_grid=[10.0, 50.0], replicas=40, seed=3)


def write_config(tmp_path, **fields):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(fields))
    return str(path)


@pytest.mark.parametrize("sid", SCENARIOS)
def test_defaults_are_valid(sid):
    assert validate(ScenarioConfig(sid)) == []


def test_thm9_rejects_lazy_walk():
    problems = validate(ScenarioConfig("thm9", increments={"kind": "lazy", "p0": 0.2}))
    assert "Thm 9 assumes S is a simple symmetric RW" in problems


def test_thm5a_rejects_finite_mean_gaps():
    problems = validate(ScenarioConfig("thm5a", gap={"kind": "pareto", "alpha": 1.5}))
    assert any("Thm 5 requires in particular α ∈ (0,1)" in p for p in problems)


def test_validate_lists_every_violation():
    cfg = ScenarioConfig("thm10", gap={"kind": "pareto", "alpha": 0.5},
                         increments={"kind": "lazy", "p0": 0.2}, a_grid=[1.5])
    problems = validate(cfg)
    assert len(problems) >= 3


def test_validate_bad_law_and_unknown_scenario():
    assert validate(ScenarioConfig("thm1", gap={"kind": "cauchy"}))
    assert validate(ScenarioConfig("thm99"))


def test_unknown_config_field(tmp_path):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json(write_config(tmp_path, scenario="thm1", colour="red"))


def test_run_rejects_invalid(tmp_path):
    with pytest.raises(ConfigError):
        run(ScenarioConfig("thm9", increments={"kind": "lazy", "p0": 0.2},
                           out=str(tmp_path / "o")))
    assert not (tmp_path / "o").exists()


def test_custom_run_writes_summary(tmp_path):
    s = run_report(ScenarioConfig(**SMALL_CUSTOM, out=str(tmp_path / "o")))
    assert s["status"] == "complete" and s["passed"] is True
    assert s["config"]["replicas"] == 40
    assert sorted(s["files"]) == ["X_at_10_rep0.csv", "X_at_50_rep0.csv"]
    assert len(s["estimates"]) == 2


def test_same_config_byte_identical_csvs(tmp_path):
    for d in ("a", "b"):
        run(ScenarioConfig(**SMALL_CUSTOM, out=str(tmp_path / d)))
    for name in ("X_at_10_rep0.csv", "X_at_50_rep0.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_exit_code_follows_verdicts(tmp_path):
    cfg = ScenarioConfig("thm3b", replicas=100, repetitions=1, n_grid=[2000],
                         out=str(tmp_path / "o"))
    code = run(cfg)
    s = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert code == (0 if all(v["passed"] for v in s["verdicts"]) else 1)
    assert s["verdicts"][0]["kind"] == "relative_mean"


def test_gaussian_ks_scenario_small(tmp_path):
    s = run_report(ScenarioConfig("thm1", replicas=200, reference_replicas=200, repetitions=1,
                                  n_grid=[100], out=str(tmp_path / "o")))
    (v,) = s["verdicts"]
    assert v["name"] == "ks_gaussian" and v["kind"] == "ks_p" and v["target"] == 0.01
    assert v["passed"] == (v["estimate"] >= 0.01)
    assert "Y_at_100_medium0.csv" in s["files"]


def test_interrupt_flushes_partial_summary(tmp_path, monkeypatch):
    def body(cfg, report):
        report.verdict("first", True, 1.0, 1.0, None)
        raise KeyboardInterrupt

    monkeypatch.setitem(scenarios.BODIES, "custom", body)
    out = tmp_path / "o"
    code = main(["run", "--scenario", "custom", "--out", str(out)])
    assert code == 1
    s = json.loads((out / "summary.json").read_text())
    assert s["status"] == "interrupted"
    assert [v["name"] for v in s["verdicts"]] == ["first"]


def test_env_var_sets_default_out(tmp_path, monkeypatch):
    monkeypatch.setenv("LEVYLAB_OUT", str(tmp_path / "env"))
    assert ScenarioConfig("thm1").resolved().out == str(tmp_path / "env")
    monkeypatch.delenv("LEVYLAB_OUT")
    assert ScenarioConfig("thm1").resolved().out.endswith("thm1")


def test_cli_unknown_scenario(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--scenario", "thm99", "--out", str(out)]) == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_cli_flags_override_config(tmp_path, capsys):
    path = write_config(tmp_path, **SMALL_CUSTOM, out=str(tmp_path / "json"))
    out = tmp_path / "flag"
    assert main(["run", "--config", path, "--replicas", "7", "--seed", "11",
                 "--out", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["config"]["replicas"] == 7 and s["config"]["seed"] == 11
    assert not (tmp_path / "json").exists()


def test_cli_validate(tmp_path, capsys):
    assert main(["validate", "--config", write_config(tmp_path, scenario="thm9")]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    bad = write_config(tmp_path, scenario="thm9", increments={"kind": "lazy", "p0": 0.2})
    assert main(["validate", "--config", bad]) == 2
    assert "Thm 9 assumes S is a simple symmetric RW" in capsys.readouterr().out


def test_cli_invalid_run_is_usage_error(tmp_path, capsys):
    bad = write_config(tmp_path, scenario="thm9", increments={"kind": "lazy", "p0": 0.2})
    assert main(["run", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_cli_bad_json_and_missing_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["validate", "--config", str(path)]) == 2
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


@pytest.mark.parametrize("table,header", [("mq", "q,m_q"), ("f", "alpha,r,f_alpha"),
                                          ("d", "mu,alpha,q,d"), ("F", "mu,alpha,a,F"),
                                          ("gamma", "alpha,q,gamma")])
def test_cli_constants_tables(table, header, capsys):
    assert main(["constants", "--table", table]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == header and len(lines) > 5
    assert all(math.isfinite(float(x)) for row in lines[1:] for x in row.split(","))


def test_cli_mq_table_values(capsys):
    main(["constants", "--table", "mq"])
    rows = dict(tuple(map(float, r.split(","))) for r in capsys.readouterr().out.splitlines()[1:])
    assert rows[0.0] == pytest.approx(1.0) and rows[2.0] == pytest.approx(1.0)


def test_gap_sum_law_matches_centered_sums():
    # the distance to the limit shrinks like n**(1 - 2/alpha); at n = 1000 it is
    # still about the 1% critical value for 5000 draws
    n = 10_000
    law = Pareto(1.5)
    sums = np.array([(law.sample(substream(31, i), n).sum() - n * law.mean) / n ** (1 / 1.5)
                     for i in range(5000)])
    ref = sample_stable(gap_sum_law(law), substream(32), 5000)
    assert ks_two_sample(sums, ref).pvalue > 0.01


@pytest.mark.parametrize("inc", [SymmetricZeta(1.5), DriftedZeta(1.5, 0.4)])
def test_increment_sum_law_matches_centered_sums(inc):
    n = 2000
    sums = np.array([(inc.sample(substream(33, i), n).sum() - n * inc.drift) / n ** (1 / 1.5)
                     for i in range(5000)])
    ref = sample_stable(increment_sum_law(inc), substream(34), 5000)
    assert ks_two_sample(sums, ref).pvalue > 0.01
