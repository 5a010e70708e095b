"""Experiment driver: fluid curves, Monte Carlo trajectories, coupled policy
comparisons and the capacity-merge study, with CSV/JSON emission.

Subcommands: ``fluid | simulate | compare | capacity-merge``. Each accepts
``--config <json>`` and/or ``--preset <name>`` plus ``--seed`` / ``--out``
overrides. Run seeds are ``seed_base + run_index``, so outputs are
reproducible byte for byte (the summary JSON carries the only timestamp).
Exit codes: 0 success, 2 configuration error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import degrees, matching
from .fluid import (CapacityProfile, FluidCurve, solve_G_capless,
                    solve_G_fixed_capacity, solve_G_general_capacity,
                    sup_deviation, write_fluid_csv)
from .matching import GREEDY, POLICIES, RANKING, run_policy, write_trajectory_csv
from .stream import sample_degree_sequences

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["experiment", "results", "fluid_endpoints"],
    "properties": {
        "experiment": {"type": "string"},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "policy", "mean", "stddev", "sup_dev", "runs"],
                "properties": {
                    "n": {"type": "integer"},
                    "policy": {"type": "string"},
                    "mean": {"type": "number"},
                    "stddev": {"type": "number"},
                    "sup_dev": {"type": ["number", "null"]},
                    "runs": {"type": "integer"},
                },
            },
        },
        "fluid_endpoints": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
    },
}


class ConfigError(ValueError):
    """Bad experiment configuration; maps to exit code 2."""


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; see README for the JSON layout."""

    experiment: str = "experiment"
    model_u: dict = field(default_factory=lambda: {"kind": "regular", "d": 2})
    model_v: dict = field(default_factory=lambda: {"kind": "regular", "d": 2})
    models: list | None = None
    n_values: list = field(default_factory=lambda: [1000])
    runs: int = 5
    policies: list = field(default_factory=lambda: [GREEDY])
    capacities: dict = field(default_factory=lambda: {"kind": "none"})
    merge_capacity: int = 2
    seed_base: int = 0
    outputs: str = "out"
    preset: str | None = None
    step: float = 1e-4
    checkpoint_every: int | None = None

    def validate(self) -> "ExperimentConfig":
        if self.runs < 1:
            raise ConfigError("field 'runs' must be >= 1")
        if not self.n_values:
            raise ConfigError("field 'n_values' must be nonempty")
        if any(int(n) < 1 for n in self.n_values):
            raise ConfigError("field 'n_values' entries must be >= 1")
        if self.seed_base < 0:
            raise ConfigError("field 'seed_base' must be >= 0")
        for p in self.policies:
            if p not in POLICIES:
                raise ConfigError(f"field 'policies': unknown policy {p!r}")
        for fieldname in ("model_u", "model_v"):
            try:
                degrees.from_spec(getattr(self, fieldname))
            except ValueError as exc:
                raise ConfigError(f"field '{fieldname}': {exc}") from exc
        _parse_capacities(self.capacities)
        if self.merge_capacity < 1:
            raise ConfigError("field 'merge_capacity' must be >= 1")
        if not 0 < self.step <= 1e-2:
            raise ConfigError("field 'step' must lie in (0, 1e-2]")
        return self


PRESETS = {
    # Fluid curves for regular models of increasing degree.
    "fluid-dregular": {
        "experiment": "fluid-dregular",
        "models": [{"model_u": {"kind": "regular", "d": d},
                    "model_v": {"kind": "regular", "d": d}}
                   for d in (2, 3, 4, 6, 10)],
    },
    # Trajectory deviation from the fluid curve as n grows.
    "deviation-dregular": {
        "experiment": "deviation-dregular",
        "model_u": {"kind": "regular", "d": 4},
        "model_v": {"kind": "regular", "d": 4},
        "n_values": [100, 1000, 10000],
        "runs": 5,
        "policies": ["greedy"],
    },
    # Coupled policy comparison on the 2-regular model.
    "greedy-vs-ranking": {
        "experiment": "greedy-vs-ranking",
        "model_u": {"kind": "regular", "d": 2},
        "model_v": {"kind": "regular", "d": 2},
        "n_values": [10000],
        "runs": 20,
        "policies": ["greedy", "ranking", "smallest", "highest"],
    },
    # Few high-capacity vertices vs many unit-capacity ones.
    "capacity-merge-poisson": {
        "experiment": "capacity-merge-poisson",
        "model_u": {"kind": "poisson", "c": 4},
        "model_v": {"kind": "poisson", "c": 4},
        "n_values": [10000],
        "runs": 5,
        "merge_capacity": 2,
    },
}


def load_config(config_path: str | None, preset: str | None,
                seed: int | None, out: str | None) -> ExperimentConfig:
    data: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; "
                              f"available: {', '.join(sorted(PRESETS))}")
        data.update(copy.deepcopy(PRESETS[preset]))
        data["preset"] = preset
    if config_path is not None:
        try:
            with open(config_path) as fh:
                file_data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config_path!r} is not valid JSON "
                              f"(line {exc.lineno}, column {exc.colno})") from exc
        if not isinstance(file_data, dict):
            raise ConfigError("config root must be a JSON object")
        data.update(file_data)
    if not data:
        raise ConfigError("need --config and/or --preset")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    cfg = ExperimentConfig(**data)
    if seed is not None:
        cfg.seed_base = seed
    if out is not None:
        cfg.outputs = out
    return cfg.validate()


# ---------------------------------------------------------------------------
# shared helpers


def _parse_capacities(spec: dict):
    """Return (kind, payload): ("none", None) | ("fixed", C) |
    ("profile", CapacityProfile)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"field 'capacities' must be a dict with 'kind': {spec!r}")
    kind = spec["kind"]
    if kind == "none":
        return "none", None
    if kind == "fixed":
        if "C" not in spec or int(spec["C"]) < 1:
            raise ConfigError("fixed capacities need integer field 'C' >= 1")
        return "fixed", int(spec["C"])
    if kind == "profile":
        if "p" not in spec:
            raise ConfigError("capacity profile needs field 'p'")
        try:
            return "profile", CapacityProfile.from_fractions(spec["p"])
        except ValueError as exc:
            raise ConfigError(f"field 'capacities.p': {exc}") from exc
    raise ConfigError(f"unknown capacities kind {kind!r}")


def _capacity_arg(kind: str, payload, n: int):
    """Capacity argument for run_policy."""
    if kind == "none":
        return None
    if kind == "fixed":
        return payload
    return matching.capacities_from_profile(payload.fractions, n)


def _solve_for(pmf_u, pmf_v, kind, payload, step) -> FluidCurve:
    if kind == "none":
        return solve_G_capless(pmf_u, pmf_v, step)
    if kind == "fixed":
        return solve_G_fixed_capacity(pmf_u, pmf_v, payload, step)
    return solve_G_general_capacity(pmf_u, pmf_v, payload, step)


def _model_key(curve: FluidCurve) -> str:
    return f"u={curve.model_u}|v={curve.model_v}|cap={curve.capacity}"


def _write_summary(out_dir: Path, experiment: str, results: list,
                   endpoints: dict, extras: dict | None = None) -> Path:
    summary = {
        "experiment": experiment,
        "results": sorted(results, key=lambda r: (r["n"], r["policy"],
                                                  r.get("variant", ""))),
        "fluid_endpoints": endpoints,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if extras:
        summary.update(extras)
    path = out_dir / "summary.json"
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _stats_row(n: int, policy: str, fractions: list, sup_devs: list | None,
               **extra) -> dict:
    row = {
        "n": int(n),
        "policy": policy,
        "mean": float(np.mean(fractions)),
        "stddev": float(np.std(fractions)),
        "sup_dev": (float(np.max(sup_devs)) if sup_devs else None),
        "runs": len(fractions),
    }
    row.update(extra)
    return row


# ---------------------------------------------------------------------------
# subcommands


def cmd_fluid(cfg: ExperimentConfig) -> dict:
    """Solve the fluid curve for each configured model and dump CSVs."""
    out_dir = Path(cfg.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = cfg.models or [{}]
    endpoints = {}
    for entry in entries:
        model_u = entry.get("model_u", cfg.model_u)
        model_v = entry.get("model_v", cfg.model_v)
        cap_spec = entry.get("capacities", cfg.capacities)
        try:
            pmf_u = degrees.from_spec(model_u)
            pmf_v = degrees.from_spec(model_v)
            kind, payload = _parse_capacities(cap_spec)
        except ValueError as exc:
            raise ConfigError(f"field 'models': {exc}") from exc
        curve = _solve_for(pmf_u, pmf_v, kind, payload, cfg.step)
        key = _model_key(curve)
        endpoints[key] = curve.endpoint
        safe = key.replace("=", "-").replace("|", "_").replace(",", "-")
        write_fluid_csv(curve, out_dir / f"fluid_{safe}.csv")
    _write_summary(out_dir, cfg.experiment, [], endpoints)
    return {"fluid_endpoints": endpoints}


def cmd_simulate(cfg: ExperimentConfig) -> dict:
    """Monte Carlo runs per (n, policy) with trajectories and deviations."""
    out_dir = Path(cfg.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    pmf_u = degrees.from_spec(cfg.model_u)
    pmf_v = degrees.from_spec(cfg.model_v)
    kind, payload = _parse_capacities(cfg.capacities)
    curve = _solve_for(pmf_u, pmf_v, kind, payload, cfg.step)
    endpoints = {_model_key(curve): curve.endpoint}

    results = []
    failures = []
    for n in cfg.n_values:
        n = int(n)
        caps = _capacity_arg(kind, payload, n)
        for policy in cfg.policies:
            fractions, sup_devs = [], []
            for r in range(cfg.runs):
                seed = cfg.seed_base + r
                try:
                    seq = sample_degree_sequences(pmf_u, pmf_v, n, seed)
                    traj = run_policy(seq, caps, policy, seed,
                                      checkpoint_every=cfg.checkpoint_every)
                except Exception as exc:  # keep remaining runs alive
                    failures.append({"n": n, "policy": policy, "seed": seed,
                                     "error": f"{type(exc).__name__}: {exc}"})
                    continue
                fractions.append(traj.final_matched / traj.capacity_total)
                sup_devs.append(sup_deviation(traj, curve))
                write_trajectory_csv(
                    traj, out_dir / f"traj_{policy}_n{n}_seed{seed}.csv")
            if fractions:
                results.append(_stats_row(n, policy, fractions, sup_devs))
    extras = {"failures": failures} if failures else None
    _write_summary(out_dir, cfg.experiment, results, endpoints, extras)
    return {"results": results, "failures": failures}


def cmd_compare(cfg: ExperimentConfig) -> dict:
    """Coupled policy comparison: all policies share each run's graph."""
    if len(cfg.policies) < 2:
        raise ConfigError("compare needs at least two policies")
    out_dir = Path(cfg.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    pmf_u = degrees.from_spec(cfg.model_u)
    pmf_v = degrees.from_spec(cfg.model_v)
    kind, payload = _parse_capacities(cfg.capacities)
    curve = _solve_for(pmf_u, pmf_v, kind, payload, cfg.step)
    endpoints = {_model_key(curve): curve.endpoint}

    results = []
    comparisons = {}
    for n in cfg.n_values:
        n = int(n)
        caps = _capacity_arg(kind, payload, n)
        finals = [[] for _ in cfg.policies]
        for r in range(cfg.runs):
            seed = cfg.seed_base + r
            seq = sample_degree_sequences(pmf_u, pmf_v, n, seed)
            for slot, policy in enumerate(cfg.policies):
                traj = run_policy(seq, caps, policy, seed,
                                  checkpoint_every=cfg.checkpoint_every)
                finals[slot].append(traj.final_matched / traj.capacity_total)
        for slot, policy in enumerate(cfg.policies):
            results.append(_stats_row(n, policy, finals[slot], None))
        block = {
            "pair": [cfg.policies[0], cfg.policies[1]],
            "paired_differences": [a - b for a, b in zip(finals[0], finals[1])],
        }
        if GREEDY in cfg.policies and RANKING in cfg.policies:
            g = finals[cfg.policies.index(GREEDY)]
            r_ = finals[cfg.policies.index(RANKING)]
            diffs = [a - b for a, b in zip(g, r_)]
            wins = sum(1 for d in diffs if d > 0)
            ties = sum(1 for d in diffs if d == 0)
            decisive = len(diffs) - ties
            p_value = (stats.binomtest(wins, decisive, 0.5,
                                       alternative="greater").pvalue
                       if decisive else 1.0)
            block.update(greedy_minus_ranking=diffs, greedy_wins=wins,
                         ties=ties,
                         sign_test_p_greedy_gt_ranking=float(p_value))
        comparisons[str(n)] = block
    extras = {"comparisons": comparisons} if comparisons else None
    _write_summary(out_dir, cfg.experiment, results, endpoints, extras)
    return {"results": results, "comparisons": comparisons}


def cmd_capacity_merge(cfg: ExperimentConfig) -> dict:
    """Merge groups of C equal-degree vertices into one vertex of capacity C
    and compare greedy's normalized performance against the baseline."""
    out_dir = Path(cfg.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    c_merge = int(cfg.merge_capacity)
    pmf_u = degrees.from_spec(cfg.model_u)
    pmf_v = degrees.from_spec(cfg.model_v)
    stretched = np.zeros(pmf_u.k_max * c_merge + 1)
    stretched[:: c_merge] = pmf_u.probs
    pmf_u_merged = degrees.explicit(
        stretched, label=f"{pmf_u.label}-merged-x{c_merge}")

    base_curve = solve_G_capless(pmf_u, pmf_v, cfg.step)
    merged_curve = solve_G_fixed_capacity(pmf_u_merged, pmf_v, c_merge, cfg.step)
    endpoints = {_model_key(base_curve): base_curve.endpoint,
                 _model_key(merged_curve): merged_curve.endpoint}

    results = []
    for n in cfg.n_values:
        n = int(n)
        n_merged = n // c_merge
        if n_merged * c_merge != n:
            print(f"warning: n={n} not divisible by C={c_merge}; "
                  f"merged model uses {n_merged} vertices", file=sys.stderr)
        base_fr, base_dev, merged_fr, merged_dev = [], [], [], []
        for r in range(cfg.runs):
            seed = cfg.seed_base + r
            seq = sample_degree_sequences(pmf_u, pmf_v, n, seed)
            traj = run_policy(seq, None, GREEDY, seed)
            base_fr.append(traj.final_matched / traj.capacity_total)
            base_dev.append(sup_deviation(traj, base_curve))
            seq_m = sample_degree_sequences(pmf_u_merged, pmf_v, n_merged, seed)
            traj_m = run_policy(seq_m, c_merge, GREEDY, seed)
            merged_fr.append(traj_m.final_matched / traj_m.capacity_total)
            merged_dev.append(sup_deviation(traj_m, merged_curve))
        results.append(_stats_row(n, GREEDY, base_fr, base_dev,
                                  variant="baseline"))
        results.append(_stats_row(n_merged, GREEDY, merged_fr, merged_dev,
                                  variant=f"merged-x{c_merge}"))
    _write_summary(out_dir, cfg.experiment, results, endpoints)
    return {"results": results, "fluid_endpoints": endpoints}


# ---------------------------------------------------------------------------
# entry point

_COMMANDS = {
    "fluid": cmd_fluid,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "capacity-merge": cmd_capacity_merge,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmatch-bench",
        description="Configuration-model matching experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0].lower())
        p.add_argument("--config", help="experiment config JSON path")
        p.add_argument("--preset", help="named preset "
                       f"({', '.join(sorted(PRESETS))})")
        p.add_argument("--seed", type=int, help="override seed_base")
        p.add_argument("--out", help="override output directory")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.preset, args.seed, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
