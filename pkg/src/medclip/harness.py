"""Experiment harness: config files, theorem-driven parameter resolution,
seeded multi-run execution, aggregation and CSV emission.

Config files are flat INI text (one nesting level: sections of key = value
pairs), chosen for diffability in experiment tracking.  Every field has a
default matching the desk-scale benchmark experiments, so a minimal config
only states what it changes.

CSV schemas (relied on bit-exactly by the plotting frontend):

* zo per-run:      run_id,step,oracle_calls,metric,value
* bandit per-run:  run_id,t,cum_regret,arm,is_optimal
* aggregates:      bucket,mean,std,p05,p95
"""

from __future__ import annotations

import configparser
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bandit import (
    BanditEnvironment,
    BanditSchedule,
    run_bandit,
    run_full_feedback,
    theorem_schedule,
)
from .errors import ConfigError, DivergenceError, NumericalError, ScheduleError
from .estimator import dual_norm_factor, median_size_for, sigma_bound
from .geometry import FeasibleSet, make_setup
from .noise import (
    CauchyNoise,
    GaussianNoise,
    IndependentOracle,
    LevyStableNoise,
    LipschitzOracle,
    MixtureNoise,
    ZeroNoise,
)
from .problems import make_least_squares, make_linear, make_strongly_convex
from .solvers import (
    SgdParams,
    SolverSchedule,
    run_restarted,
    run_sgd_baseline,
    run_smd,
    run_sstm,
)

ZO_HEADER = "run_id,step,oracle_calls,metric,value"
BANDIT_HEADER = "run_id,t,cum_regret,arm,is_optimal"
AGG_HEADER = "bucket,mean,std,p05,p95"

EXPERIMENT_KINDS = ("zo_sstm", "zo_smd", "zo_restarted", "zo_sgd", "bandit", "full_feedback")

DEFAULTS = {
    "experiment": {
        "kind": "zo_sstm",
        "runs": "15",
        "base_seed": "0",
        "out": "results",
        "workers": "1",
        "trace_every": "1",
    },
    "problem": {
        "type": "least_squares",
        "d": "16",
        "l": "200",
        "matrix_seed": "123",
        "planted": "false",
        "mu": "1.0",
        "arms": "3.0,3.5",
        "c": "",
        "radius": "8.0",
    },
    "noise": {
        "mode": "lipschitz",
        "distribution": "levy",
        "alpha": "1.0",
        "scale": "1.0",
        "std": "1.0",
        "mixture_weight": "",
        "asym_distribution": "levy",
        "asym_alpha": "1.0",
        "asym_scale": "1.0",
        "asym_std": "1.0",
    },
    "schedule": {
        "theorem": "true",
        "kappa": "1.0",
        "budget": "100000",
        "K": "",
        "T": "30000",
        "beta": "0.05",
        "R": "0.25",
        "m": "",
        "b": "1",
        "q": "2",
        "tau": "",
        "a": "",
        "L": "",
        "lam": "",
        "nu": "",
        "eps": "",
        "M2": "",
        "momentum": "0.9",
        "setup": "ball",
        "feasible_set": "whole_space",
        "entropy_gamma": "1.0",
        "sc_mu": "",
        "R0": "",
        "k_const": "1.0",
        "bandit_M2": "",
        "bandit_R": "",
    },
}


def load_config(path=None, overrides=None) -> dict:
    """Read an INI config, layering file values over the defaults and the
    optional ``{(section, key): value}`` overrides on top."""
    cfg = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
        for sec in parser.sections():
            if sec not in cfg:
                raise ConfigError(f"unknown config section [{sec}]")
            for key, val in parser.items(sec):
                if key not in cfg[sec]:
                    raise ConfigError(f"unknown config key {key!r} in section [{sec}]")
                cfg[sec][key] = val
    for (sec, key), val in (overrides or {}).items():
        if sec not in cfg or key not in cfg[sec]:
            raise ConfigError(f"unknown config override [{sec}] {key}")
        cfg[sec][key] = str(val)
    kind = cfg["experiment"]["kind"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; choose from {EXPERIMENT_KINDS}")
    return cfg


def save_config(cfg: dict, path) -> None:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    for sec, vals in cfg.items():
        parser[sec] = vals
    with open(path, "w") as fh:
        parser.write(fh)


def _get_float(cfg, sec, key, required=False):
    raw = cfg[sec][key].strip()
    if raw == "":
        if required:
            raise ConfigError(f"config value [{sec}] {key} is required here")
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad float for [{sec}] {key}: {raw!r}") from exc


def _get_int(cfg, sec, key, required=False):
    val = _get_float(cfg, sec, key, required)
    return None if val is None else int(val)


def _get_bool(cfg, sec, key):
    return cfg[sec][key].strip().lower() in ("1", "true", "yes", "on")


def build_noise(cfg, prefix=""):
    sec = cfg["noise"]
    dist = sec[prefix + "distribution"].strip().lower()
    if dist in ("levy", "levy_stable", "stable"):
        return LevyStableNoise(
            alpha=float(sec[prefix + "alpha"]), scale=float(sec[prefix + "scale"])
        )
    if dist == "cauchy":
        return CauchyNoise(scale=float(sec[prefix + "scale"]))
    if dist in ("gaussian", "normal"):
        return GaussianNoise(std=float(sec[prefix + "std"]))
    if dist in ("none", "zero"):
        return ZeroNoise()
    raise ConfigError(f"unknown noise distribution {dist!r}")


def build_noise_spec(cfg):
    base = build_noise(cfg)
    w = cfg["noise"]["mixture_weight"].strip()
    if w == "":
        return base
    return MixtureNoise(weight=float(w), symmetric=base, asymmetric=build_noise(cfg, "asym_"))


def build_problem(cfg):
    sec = cfg["problem"]
    ptype = sec["type"].strip().lower()
    if ptype == "least_squares":
        return make_least_squares(
            d=int(sec["d"]), l=int(sec["l"]), seed=int(sec["matrix_seed"]),
            planted=_get_bool(cfg, "problem", "planted"),
        )
    if ptype == "strongly_convex":
        return make_strongly_convex(
            d=int(sec["d"]), l=int(sec["l"]), mu=float(sec["mu"]),
            seed=int(sec["matrix_seed"]), radius=float(sec["radius"]),
        )
    if ptype == "linear":
        c = np.array([float(v) for v in sec["c"].split(",") if v.strip() != ""])
        if c.size == 0:
            raise ConfigError("linear problem needs a 'c' vector")
        return make_linear(c)
    raise ConfigError(f"unknown problem type {ptype!r}")


def build_oracle(cfg, problem):
    noise = build_noise_spec(cfg)
    mode = cfg["noise"]["mode"].strip().lower()
    if mode == "lipschitz":
        return LipschitzOracle(problem.objective, noise, dim=problem.d)
    if mode == "independent":
        return IndependentOracle(problem.objective, noise)
    raise ConfigError(f"unknown oracle mode {mode!r}")


def build_environment(cfg):
    mu = np.array([float(v) for v in cfg["problem"]["arms"].split(",")])
    mode = "full" if cfg["experiment"]["kind"] == "full_feedback" else "bandit"
    return BanditEnvironment(mu=mu, noise=build_noise_spec(cfg), mode=mode)


def resolve_zo_schedule(cfg, problem, oracle) -> SolverSchedule:
    """Fill the run parameters from theorem formulas, honoring overrides and
    recording provenance for every resolved value."""
    sec = cfg["schedule"]
    prov = {}
    kappa = float(sec["kappa"])
    beta = float(sec["beta"])
    M2 = _get_float(cfg, "schedule", "M2")
    if M2 is None:
        M2 = problem.M2
        prov["M2"] = "problem"
    else:
        prov["M2"] = "override"

    m = _get_int(cfg, "schedule", "m")
    if m is None:
        m = median_size_for(kappa)
        prov["m"] = "formula(ceil(2/kappa)+1)"
    else:
        prov["m"] = "override"
    b = int(sec["b"])
    q = math.inf if sec["q"].strip().lower() in ("inf", "infinity") else float(sec["q"])

    tau = _get_float(cfg, "schedule", "tau")
    if tau is None:
        eps = _get_float(cfg, "schedule", "eps")
        if eps is None:
            raise ConfigError("theorem mode needs either tau or eps to set the smoothing radius")
        tau = eps / (4.0 * M2)
        prov["tau"] = "formula(eps/(4 M2))"
    else:
        prov["tau"] = "override"

    L = _get_float(cfg, "schedule", "L")
    if L is None:
        L = math.sqrt(problem.d) * M2 / tau
        prov["L"] = "formula(sqrt(d) M2 / tau)"
    else:
        prov["L"] = "override"

    K = _get_int(cfg, "schedule", "K")
    if K is None:
        budget = _get_int(cfg, "schedule", "budget", required=True)
        K = max(budget // ((2 * m + 1) * b), 0)
        prov["K"] = "budget"
    else:
        prov["K"] = "override"

    A_log = max(math.log(4.0 * max(K, 1) / beta), 1.0)
    R = float(sec["R"])

    sigma = None
    tail = oracle.assumption_tail
    if m > 2.0 / tail.kappa:
        from .estimator import MedianEstimatorConfig

        est = MedianEstimatorConfig(m=m, b=b, tau=tau, q=q)
        sigma = sigma_bound(est, problem.d, M2, tail, oracle.mode)

    a = _get_float(cfg, "schedule", "a")
    if a is None:
        if sigma is None:
            raise ConfigError("cannot resolve stepsize a: m <= 2/kappa leaves sigma undefined")
        stoch = sigma * K**2 * math.sqrt(A_log) * tau / (math.sqrt(b * problem.d) * M2 * R)
        a = min(A_log**2, stoch)
        prov["a"] = f"formula(min; branch={'A^2' if a == A_log**2 else 'sigma'})"
    else:
        prov["a"] = "override"

    lam = _get_float(cfg, "schedule", "lam")
    nu = _get_float(cfg, "schedule", "nu")
    kind = cfg["experiment"]["kind"]
    if kind == "zo_smd":
        setup = make_setup(sec["setup"], float(sec["entropy_gamma"]))
        fset_kind = sec["feasible_set"].strip().lower()
        fset = FeasibleSet(fset_kind, problem.d, 2.0)
        if lam is None:
            if sigma is None:
                raise ConfigError("cannot resolve lambda: sigma undefined for m <= 2/kappa")
            lam = sigma * dual_norm_factor(problem.d, setup.q) * math.sqrt(max(K, 1))
            prov["lam"] = "formula(sigma a_q sqrt(K))"
        else:
            prov["lam"] = "override"
        if nu is None:
            nu = setup.diameter(fset) / lam
            prov["nu"] = "formula(D/lambda)"
        else:
            prov["nu"] = "override"
    elif lam is not None:
        prov["lam"] = "override(constant)"
    else:
        prov["lam"] = "formula(R/(alpha_{k+1} A))"

    return SolverSchedule(
        K=K, m=m, b=b, tau=tau, q=q, a=a, L=L, R=R, A_log=A_log,
        lam=lam, nu=nu, sigma=sigma, provenance=prov,
    )


def resolve_schedule(cfg):
    """Resolve the experiment's schedule (solver or bandit) from the config.

    Returns (schedule, problem-or-env, oracle-or-None).
    """
    kind = cfg["experiment"]["kind"]
    if kind in ("bandit", "full_feedback"):
        env = build_environment(cfg)
        sched = theorem_schedule(
            env,
            T=int(cfg["schedule"]["T"]),
            kappa=float(cfg["schedule"]["kappa"]),
            M2=_get_float(cfg, "schedule", "bandit_M2"),
            R=_get_float(cfg, "schedule", "bandit_R"),
            m=_get_int(cfg, "schedule", "m") if cfg["schedule"]["m"].strip() else None,
            nu=_get_float(cfg, "schedule", "nu"),
            lam=_get_float(cfg, "schedule", "lam"),
        )
        return sched, env, None
    problem = build_problem(cfg)
    oracle = build_oracle(cfg, problem)
    if kind == "zo_sgd":
        sec = cfg["schedule"]
        m = _get_int(cfg, "schedule", "m")
        if m is None:
            m = median_size_for(float(sec["kappa"]))
        K = _get_int(cfg, "schedule", "K")
        if K is None:
            K = max(_get_int(cfg, "schedule", "budget", required=True) // (2 * m + 1), 0)
        lam = _get_float(cfg, "schedule", "lam")
        params = SgdParams(
            a=_get_float(cfg, "schedule", "a", required=True),
            momentum=float(sec["momentum"]),
            tau=_get_float(cfg, "schedule", "tau", required=True),
            m=m,
            lam=lam if lam is not None else float("inf"),
            K=K,
        )
        return params, problem, oracle
    if kind == "zo_restarted":
        return None, problem, oracle  # per-stage parameters resolve inside the run
    return resolve_zo_schedule(cfg, problem, oracle), problem, oracle


def _fmt(v) -> str:
    return repr(float(v))


def _zo_rows(run_id: int, rec) -> list[str]:
    return [
        f"{run_id},{int(s)},{int(c)},{rec.metric},{_fmt(v)}"
        for s, c, v in zip(rec.steps, rec.oracle_calls, rec.values)
    ]


def _bandit_rows(run_id: int, rec) -> list[str]:
    return [
        f"{run_id},{int(t)},{_fmt(r)},{int(a)},{int(o)}"
        for t, r, a, o in zip(rec.t, rec.cum_regret, rec.arm, rec.is_optimal)
    ]


def run_single(cfg: dict, run_id: int):
    """Execute one seeded run; returns (run_id, header, rows, run_meta)."""
    kind = cfg["experiment"]["kind"]
    seed = int(cfg["experiment"]["base_seed"]) + run_id
    rng = np.random.default_rng(seed)
    sched, target, oracle = resolve_schedule(cfg)
    trace_every = int(cfg["experiment"]["trace_every"])
    if kind == "bandit":
        rec = run_bandit(target, sched, rng)
        meta = {"floor_hits": rec.meta["floor_hits"]}
        return run_id, BANDIT_HEADER, _bandit_rows(run_id, rec), meta
    if kind == "full_feedback":
        rec = run_full_feedback(target, sched, rng)
        ratio = rec.meta["reward_ratio"]
        extra = [f"{run_id},{int(t)},{int(t)},reward_ratio,{_fmt(v)}" for t, v in zip(rec.t, ratio)]
        return run_id, BANDIT_HEADER, _bandit_rows(run_id, rec), {"extra_rows": extra}
    if kind == "zo_sstm":
        rec = run_sstm(target, oracle, sched, rng, trace_every)
    elif kind == "zo_smd":
        setup = make_setup(cfg["schedule"]["setup"], float(cfg["schedule"]["entropy_gamma"]))
        fset = FeasibleSet(cfg["schedule"]["feasible_set"].strip().lower(), target.d, 2.0)
        rec = run_smd(target, oracle, sched, setup, fset, rng, trace_every)
    elif kind == "zo_sgd":
        rec = run_sgd_baseline(target, oracle, sched, rng, trace_every)
    elif kind == "zo_restarted":
        sec = cfg["schedule"]
        mu = _get_float(cfg, "schedule", "sc_mu")
        if mu is None:
            mu = target.mu
        if mu <= 0:
            raise ConfigError("zo_restarted needs a strongly convex problem or sc_mu > 0")
        rec = run_restarted(
            target, oracle, "sstm",
            mu=mu,
            eps=_get_float(cfg, "schedule", "eps", required=True),
            beta=float(sec["beta"]),
            rng=rng,
            R0=_get_float(cfg, "schedule", "R0", required=True),
            kappa=float(sec["kappa"]),
            b=int(sec["b"]),
            m=_get_int(cfg, "schedule", "m"),
            k_const=float(sec["k_const"]),
            trace_every=trace_every,
        )
    else:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    meta = {"final_value": float(rec.values[-1])}
    if "ball_exit_steps" in rec.meta:
        meta["ball_exit_steps"] = rec.meta["ball_exit_steps"]
        meta["max_dist_to_opt"] = rec.meta["max_dist_to_opt"]
    return run_id, ZO_HEADER, _zo_rows(run_id, rec), meta


def _percentile_rows(buckets: dict) -> list[str]:
    rows = []
    for bucket in sorted(buckets):
        vals = np.asarray(buckets[bucket], dtype=float)
        rows.append(
            f"{bucket},{_fmt(np.mean(vals))},{_fmt(np.std(vals))},"
            f"{_fmt(np.percentile(vals, 5))},{_fmt(np.percentile(vals, 95))}"
        )
    return rows


def aggregate_runs(per_run_rows: dict[int, list[str]], header: str) -> dict[str, list[str]]:
    """Bucket per-run rows and compute mean/std/p05/p95 across runs.

    For the zo schema the bucket key is oracle_calls and the metric column
    names the output file; for the bandit schema the key is t and both
    cum_regret and is_optimal are aggregated.
    """
    out: dict[str, dict] = {}
    if header == ZO_HEADER:
        for rows in per_run_rows.values():
            for row in rows:
                _, _, calls, metric, value = row.split(",")
                out.setdefault(metric, {}).setdefault(int(calls), []).append(float(value))
    elif header == BANDIT_HEADER:
        for rows in per_run_rows.values():
            for row in rows:
                _, t, regret, _, opt = row.split(",")
                out.setdefault("cum_regret", {}).setdefault(int(t), []).append(float(regret))
                out.setdefault("is_optimal", {}).setdefault(int(t), []).append(float(opt))
    else:
        raise ConfigError(f"unknown per-run header {header!r}")
    return {metric: _percentile_rows(buckets) for metric, buckets in out.items()}


def run_experiment(cfg: dict, out_dir=None) -> dict:
    """Run n_runs seeded repetitions, write per-run and aggregate CSVs plus a
    metadata file; failed runs are recorded and excluded from aggregates."""
    t_start = time.time()
    kind = cfg["experiment"]["kind"]
    out = Path(out_dir if out_dir is not None else cfg["experiment"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    n_runs = int(cfg["experiment"]["runs"])
    workers = int(cfg["experiment"]["workers"])

    results: dict[int, tuple] = {}
    failures: dict[int, str] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {rid: pool.submit(run_single, cfg, rid) for rid in range(n_runs)}
            for rid, fut in futures.items():
                try:
                    results[rid] = fut.result()
                except (DivergenceError, ScheduleError, NumericalError) as exc:
                    failures[rid] = f"{type(exc).__name__}: {exc}"
    else:
        for rid in range(n_runs):
            try:
                results[rid] = run_single(cfg, rid)
            except (DivergenceError, ScheduleError, NumericalError) as exc:
                failures[rid] = f"{type(exc).__name__}: {exc}"

    header = None
    per_run_rows = {}
    run_meta = {}
    extra_rows = []
    for rid in sorted(results):
        _, header, rows, meta = results[rid]
        per_run_rows[rid] = rows
        extra_rows.extend(meta.pop("extra_rows", []))
        run_meta[rid] = meta
        with open(out / f"run_{rid:03d}.csv", "w") as fh:
            fh.write(header + "\n")
            fh.write("\n".join(rows) + "\n")

    agg_files = []
    if per_run_rows:
        for metric, rows in aggregate_runs(per_run_rows, header).items():
            path = out / f"aggregate_{metric}.csv"
            with open(path, "w") as fh:
                fh.write(AGG_HEADER + "\n")
                fh.write("\n".join(rows) + "\n")
            agg_files.append(path.name)
    if extra_rows:
        with open(out / "full_feedback_metrics.csv", "w") as fh:
            fh.write(ZO_HEADER + "\n")
            fh.write("\n".join(extra_rows) + "\n")

    sched_meta = _schedule_metadata(cfg)
    metadata = {
        "kind": kind,
        "config": cfg,
        "version": __version__,
        "n_runs": n_runs,
        "completed": sorted(results),
        "failures": failures,
        "schedule": sched_meta,
        "run_meta": {str(k): v for k, v in run_meta.items()},
        "aggregates": sorted(agg_files),
        "wall_time_s": round(time.time() - t_start, 3),
    }
    exits = [m.get("ball_exit_steps") for m in run_meta.values() if "ball_exit_steps" in m]
    if exits:
        # soft high-probability containment check: alarm when the fraction of
        # runs leaving B_{2R}(x*) exceeds the schedule's failure budget beta
        frac = sum(1 for e in exits if e > 0) / len(exits)
        metadata["containment"] = {
            "runs_with_exit": sum(1 for e in exits if e > 0),
            "fraction": frac,
            "alarm": frac > float(cfg["schedule"]["beta"]),
        }
    with open(out / "metadata.json", "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True, default=_json_default)
    if results == {} and failures:
        raise NumericalError(f"all {n_runs} runs failed: {failures}")
    return metadata


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    if obj is math.inf:
        return "inf"
    return str(obj)


def _schedule_metadata(cfg):
    kind = cfg["experiment"]["kind"]
    if kind == "zo_restarted":
        return {"resolved": "per-stage (see solver meta)"}
    sched, _, _ = resolve_schedule(cfg)
    if isinstance(sched, (SolverSchedule, BanditSchedule, SgdParams)):
        return asdict(sched)
    return {}


def gridsearch(cfg: dict, grid: dict[str, list[str]], out_dir=None) -> dict:
    """Run every cell of the cartesian grid of schedule overrides; report the
    per-cell median final metric and mark the argmin cell."""
    out = Path(out_dir if out_dir is not None else cfg["experiment"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    keys = sorted(grid)
    cells = [[]]
    for key in keys:
        cells = [cell + [(key, v)] for cell in cells for v in grid[key]]
    summary = []
    for idx, cell in enumerate(cells):
        overrides = {("schedule", k): v for k, v in cell}
        cell_cfg = load_config(None, overrides={**_cfg_as_overrides(cfg), **overrides})
        label = "_".join(f"{k}={v}" for k, v in cell)
        cell_dir = out / f"cell_{idx:03d}_{label}"
        meta = run_experiment(cell_cfg, cell_dir)
        finals = [m["final_value"] for m in meta["run_meta"].values() if "final_value" in m]
        median_final = float(np.median(finals)) if finals else math.nan
        summary.append((idx, dict(cell), median_final))
    best = min(
        (s for s in summary if not math.isnan(s[2])), key=lambda s: s[2], default=None
    )
    path = out / "grid_summary.csv"
    with open(path, "w") as fh:
        fh.write("cell," + ",".join(keys) + ",median_final,is_best\n")
        for idx, params, med in summary:
            flag = int(best is not None and idx == best[0])
            fh.write(
                f"{idx}," + ",".join(params[k] for k in keys) + f",{_fmt(med)},{flag}\n"
            )
    return {"cells": summary, "best": best, "summary_file": str(path)}


def _cfg_as_overrides(cfg):
    return {(sec, key): val for sec, vals in cfg.items() for key, val in vals.items()}


def load_grid(path) -> dict[str, list[str]]:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if not parser.read(path):
        raise ConfigError(f"grid file not found: {path}")
    if "grid" not in parser:
        raise ConfigError("grid file needs a [grid] section")
    return {k: [v.strip() for v in vals.split(",")] for k, vals in parser.items("grid")}


def aggregate_dir(path) -> list[str]:
    """Recompute aggregate CSVs from the per-run files in a directory."""
    out = Path(path)
    run_files = sorted(out.glob("run_*.csv"))
    if not run_files:
        raise ConfigError(f"no per-run CSVs found under {out}")
    per_run = {}
    header = None
    for f in run_files:
        lines = f.read_text().strip().split("\n")
        header = lines[0]
        rid = int(f.stem.split("_")[1])
        per_run[rid] = lines[1:]
    written = []
    for metric, rows in aggregate_runs(per_run, header).items():
        p = out / f"aggregate_{metric}.csv"
        with open(p, "w") as fh:
            fh.write(AGG_HEADER + "\n")
            fh.write("\n".join(rows) + "\n")
        written.append(str(p))
    return written
