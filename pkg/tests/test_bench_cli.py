"""CLI driver: config handling, output contracts, determinism, exit codes."""

import json

import jsonschema
import pytest

from cmatch.bench_cli import (PRESETS, SUMMARY_SCHEMA, ConfigError,
                              cmd_capacity_merge, cmd_compare, cmd_fluid,
                              cmd_simulate, load_config, main)


def _tiny_simulate_config(out, **overrides):
    cfg = {
        "experiment": "tiny",
        "model_u": {"kind": "regular", "d": 2},
        "model_v": {"kind": "regular", "d": 2},
        "n_values": [200],
        "runs": 2,
        "policies": ["greedy"],
        "seed_base": 0,
        "outputs": str(out),
        "step": 1e-3,
    }
    cfg.update(overrides)
    return cfg


def _write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# ---------------------------------------------------------------------------
# config handling


def test_load_config_requires_something():
    with pytest.raises(ConfigError):
        load_config(None, None, None, None)


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        load_config(None, "nope", None, None)


def test_bad_json_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"experiment": ')
    with pytest.raises(ConfigError, match="line"):
        load_config(str(path), None, None, None)


def test_unknown_field_rejected(tmp_path):
    path = _write_config(tmp_path, {"experiment": "x", "typo_field": 1})
    with pytest.raises(ConfigError, match="typo_field"):
        load_config(path, None, None, None)


def test_bad_distribution_spec_names_field(tmp_path):
    path = _write_config(tmp_path, _tiny_simulate_config(
        tmp_path, model_u={"kind": "gaussian"}))
    with pytest.raises(ConfigError, match="model_u"):
        load_config(path, None, None, None)


def test_overrides_apply(tmp_path):
    path = _write_config(tmp_path, _tiny_simulate_config(tmp_path))
    cfg = load_config(path, None, 99, str(tmp_path / "elsewhere"))
    assert cfg.seed_base == 99
    assert cfg.outputs.endswith("elsewhere")


def test_presets_all_validate():
    for name in PRESETS:
        cfg = load_config(None, name, None, None)
        assert cfg.preset == name


# ---------------------------------------------------------------------------
# subcommands


def test_cmd_fluid_outputs(tmp_path):
    cfg = load_config(None, "fluid-dregular", None, str(tmp_path))
    cfg.step = 1e-3
    out = cmd_fluid(cfg)
    assert len(out["fluid_endpoints"]) == 5
    csvs = sorted(tmp_path.glob("fluid_*.csv"))
    assert len(csvs) == 5
    header = csvs[0].read_text().splitlines()[0]
    assert header.startswith("#") and "model_u=" in header
    summary = json.loads((tmp_path / "summary.json").read_text())
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    endpoints = sorted(summary["fluid_endpoints"].items())
    assert all(v > 0.8 for _, v in endpoints)


def test_cmd_simulate_outputs_and_schema(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(tmp_path / "o")),
                      None, None, None)
    out = cmd_simulate(cfg)
    assert not out["failures"]
    rows = out["results"]
    assert len(rows) == 1 and rows[0]["runs"] == 2
    assert rows[0]["sup_dev"] is not None
    trajs = sorted((tmp_path / "o").glob("traj_*.csv"))
    assert len(trajs) == 2
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    jsonschema.validate(summary, SUMMARY_SCHEMA)


def test_simulate_outputs_are_deterministic(tmp_path):
    cfg_a = load_config(_write_config(tmp_path, _tiny_simulate_config(tmp_path / "a")),
                        None, None, None)
    cfg_b = load_config(_write_config(tmp_path, _tiny_simulate_config(tmp_path / "b")),
                        None, None, None)
    cmd_simulate(cfg_a)
    cmd_simulate(cfg_b)
    for fa in sorted((tmp_path / "a").glob("*.csv")):
        fb = tmp_path / "b" / fa.name
        assert fa.read_bytes() == fb.read_bytes()
    sa = json.loads((tmp_path / "a" / "summary.json").read_text())
    sb = json.loads((tmp_path / "b" / "summary.json").read_text())
    sa.pop("timestamp"), sb.pop("timestamp")
    assert sa == sb


def test_cmd_compare_couples_identical_policies(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", policies=["greedy", "greedy"], runs=3)), None, None, None)
    out = cmd_compare(cfg)
    diffs = out["comparisons"]["200"]["paired_differences"]
    assert diffs == [0.0, 0.0, 0.0]


def test_cmd_compare_reports_sign_test(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", policies=["greedy", "ranking"], runs=4,
        n_values=[500])), None, None, None)
    out = cmd_compare(cfg)
    stats_block = out["comparisons"]["500"]
    assert 0.0 <= stats_block["sign_test_p_greedy_gt_ranking"] <= 1.0
    assert len(stats_block["paired_differences"]) == 4
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    assert len(summary["results"]) == 2


def test_cmd_compare_needs_two_policies(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", policies=["greedy"])), None, None, None)
    with pytest.raises(ConfigError):
        cmd_compare(cfg)


def test_capacity_merge_with_unit_capacity_is_identity(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", merge_capacity=1, n_values=[300], runs=2)),
        None, None, None)
    out = cmd_capacity_merge(cfg)
    rows = {r["variant"]: r for r in out["results"]}
    assert rows["baseline"]["mean"] == rows["merged-x1"]["mean"]


def test_capacity_merge_poisson_improves(tmp_path):
    cfg = load_config(None, "capacity-merge-poisson", None, str(tmp_path / "o"))
    cfg.n_values = [10_000]
    cfg.runs = 3
    cfg.step = 1e-3
    out = cmd_capacity_merge(cfg)
    rows = {r["variant"]: r for r in out["results"]}
    assert rows["merged-x2"]["mean"] >= rows["baseline"]["mean"]
    # Monte Carlo agrees with the fixed-capacity solver prediction
    merged_key = [k for k in out["fluid_endpoints"] if "merged" in k][0]
    assert abs(rows["merged-x2"]["mean"] - out["fluid_endpoints"][merged_key]) <= 0.01
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    jsonschema.validate(summary, SUMMARY_SCHEMA)


def test_merge_warns_on_indivisible_n(tmp_path, capsys):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", merge_capacity=2, n_values=[301], runs=1)),
        None, None, None)
    out = cmd_capacity_merge(cfg)
    assert "warning" in capsys.readouterr().err
    rows = {r["variant"]: r for r in out["results"]}
    assert rows["merged-x2"]["n"] == 150


# ---------------------------------------------------------------------------
# entry point and exit codes


def test_main_success(tmp_path):
    path = _write_config(tmp_path, _tiny_simulate_config(tmp_path / "o"))
    assert main(["simulate", "--config", path]) == 0


def test_main_config_error_is_exit_2(tmp_path):
    assert main(["fluid", "--preset", "no-such-preset"]) == 2
    path = _write_config(tmp_path, {"runs": 0, "experiment": "x"})
    assert main(["simulate", "--config", path]) == 2


def test_main_runtime_failure_is_exit_1(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    path = _write_config(tmp_path, _tiny_simulate_config(blocker))
    assert main(["simulate", "--config", path]) == 1


def test_main_usage_error_is_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# preset behaviour at desk scale


def test_degree_one_runs_match_everyone(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", model_u={"kind": "regular", "d": 1},
        model_v={"kind": "regular", "d": 1}, n_values=[500], runs=3)),
        None, None, None)
    out = cmd_simulate(cfg)
    assert out["results"][0]["mean"] == 1.0
    assert out["results"][0]["stddev"] == 0.0


def test_lookahead_policies_bracket_greedy(tmp_path):
    cfg = load_config(_write_config(tmp_path, _tiny_simulate_config(
        tmp_path / "o", model_u={"kind": "regular", "d": 20},
        model_v={"kind": "regular", "d": 20}, n_values=[4000], runs=6,
        policies=["smallest", "greedy", "highest"])), None, None, None)
    out = cmd_compare(cfg)
    means = {r["policy"]: r["mean"] for r in out["results"]}
    assert means["smallest"] >= means["greedy"] >= means["highest"]


def test_all_presets_complete_at_desk_scale(tmp_path):
    import time
    start = time.perf_counter()
    for name in PRESETS:
        command = {"fluid-dregular": "fluid",
                   "deviation-dregular": "simulate",
                   "greedy-vs-ranking": "compare",
                   "capacity-merge-poisson": "capacity-merge"}[name]
        code = main([command, "--preset", name, "--out", str(tmp_path / name)])
        assert code == 0
        assert (tmp_path / name / "summary.json").exists()
    assert time.perf_counter() - start < 600.0
