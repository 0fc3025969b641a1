"""Experiment runner: JSON configs in, JSON + CSV reports out.

Configs carry a schema_version and are rejected on unknown keys.  Reports
echo the config, list result rows with the fixed CSV columns and a set of
named pass/fail checks; a report passes iff every check does.  Timestamps
and runtimes live in dedicated fields so reports are otherwise
deterministic for a fixed config.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field

from . import instances as inst_mod
from . import sweeps
from .equilibria import BidGrid, bayesian_poa, find_pure_nash, is_bayes_nash, is_pure_nash
from .mechanisms import AuctionInstance, BidProfile, allocate, run_auction, social_welfare
from .smoothness import bound_table, theorem6_da_frontier, theorem6_upa_check
from .welfare import optimal_allocation, poa_ratio

CSV_COLUMNS = ("experiment", "instance", "n", "k", "pricing", "interface",
               "alpha", "lambda", "mu", "margin", "poa", "runtime_ms")

EXPERIMENT_KINDS = ("verify-instance", "sweep-key-lemma", "certify-smoothness",
                    "find-pne", "verify-bne", "bound-table",
                    "theorem6-frontier")

_BASE_KEYS = {"schema_version", "experiment", "seed", "parallelism",
              "output_json", "output_csv"}
_KIND_KEYS = {
    "verify-instance": {"instance", "params"},
    "sweep-key-lemma": {"count", "n_max", "k_max", "alphas",
                        "valuation_class"},
    "certify-smoothness": {"count", "n_max", "k_max", "alphas", "kind",
                           "valuation_class"},
    "find-pne": {"instance_file", "grid", "mode", "cap", "starts",
                 "max_rounds", "check_efficiency"},
    "verify-bne": {"instance", "game_file", "params", "tolerance"},
    "bound-table": set(),
    "theorem6-frontier": {"params"},
}
_RANDOMIZED = {"sweep-key-lemma", "certify-smoothness"}


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2)."""


@dataclass
class ExperimentConfig:
    experiment: str
    options: dict
    seed: int | None = None
    parallelism: int = 1
    output_json: str | None = None
    output_csv: str | None = None

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if data.get("schema_version") != 1:
            raise ConfigError("schema_version must be 1")
        kind = data.get("experiment")
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}")
        allowed = _BASE_KEYS | _KIND_KEYS[kind]
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        seed = data.get("seed")
        if kind in _RANDOMIZED and seed is None:
            raise ConfigError(f"{kind} requires a seed")
        if data.get("mode") == "best_response_dynamics" and seed is None:
            raise ConfigError("best_response_dynamics requires a seed")
        parallelism = int(data.get("parallelism", 1))
        env = os.environ.get("POA_LAB_THREADS")
        if env:
            parallelism = int(env)
        options = {k: v for k, v in data.items() if k not in _BASE_KEYS}
        return ExperimentConfig(kind, options, seed, max(1, parallelism),
                                data.get("output_json"),
                                data.get("output_csv"))


@dataclass
class ExperimentReport:
    config: dict
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add_row(self, **kwargs):
        row = {c: "" for c in CSV_COLUMNS}
        for key, value in kwargs.items():
            if key not in CSV_COLUMNS:
                raise ValueError(f"unknown CSV column {key!r}")
            row[key] = value
        self.rows.append(row)

    def add_check(self, name: str, passed: bool, value=None, detail: str = ""):
        self.checks.append({"name": name, "passed": bool(passed),
                            "value": value, "detail": detail})

    def to_json(self, runtime_ms: float | None = None):
        return {
            "schema_version": 1,
            "config": self.config,
            "rows": self.rows,
            "checks": self.checks,
            "records": self.records,
            "passed": self.passed,
            "meta": {
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
                "runtime_ms": runtime_ms,
            },
        }


def _row_ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000.0, 3)


def _run_instance_file(cfg: ExperimentConfig, report: ExperimentReport,
                       path: str):
    """Run every profile in the file through the auction, emit outcome records."""
    with open(path) as fh:
        data = json.load(fh)
    instance = AuctionInstance.from_json(data)
    opt = optimal_allocation(instance.valuations, instance.k)
    for entry in data.get("profiles", []):
        t0 = time.perf_counter()
        profile = BidProfile.from_json(entry["profile"])
        out = run_auction(profile, instance.tie_break, instance.pricing)
        sw = social_welfare(instance.valuations, out.allocation)
        record = {"role": entry.get("role", ""), "profile": profile.to_json(),
                  "welfare": sw, "opt_value": opt.value}
        record.update(out.to_json())
        report.records.append(record)
        report.add_row(experiment=cfg.experiment, instance=path,
                       n=instance.n, k=instance.k, pricing=instance.pricing,
                       interface=profile.interface,
                       poa=poa_ratio(opt.value, sw) if sw > 0 else "",
                       runtime_ms=_row_ms(t0))
    report.add_check("outcomes_computed", True, len(report.records))


def _run_verify_instance(cfg: ExperimentConfig, report: ExperimentReport):
    instance_id = cfg.options.get("instance")
    if instance_id and (instance_id.endswith(".json")
                        or os.path.exists(instance_id)):
        _run_instance_file(cfg, report, instance_id)
        return
    params = dict(cfg.options.get("params", {}))
    t0 = time.perf_counter()
    try:
        checks = inst_mod.verify_named(instance_id, **params)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    for c in checks:
        report.add_check(c.name, c.passed, c.value, c.detail)
    report.add_row(experiment=cfg.experiment, instance=instance_id,
                   runtime_ms=_row_ms(t0))


def _run_sweep_key_lemma(cfg: ExperimentConfig, report: ExperimentReport):
    count = int(cfg.options.get("count", 1000))
    alphas = tuple(cfg.options.get("alphas", (0.5, 0.87, 1.0, 2.0)))
    vclass = cfg.options.get("valuation_class", "submodular")
    n_max = int(cfg.options.get("n_max", 5))
    k_max = int(cfg.options.get("k_max", 8))
    t0 = time.perf_counter()
    result = sweeps.key_lemma_sweep(count, alphas, vclass, cfg.seed,
                                    n_max, k_max, cfg.parallelism)
    report.add_row(experiment=cfg.experiment, instance=f"{vclass}-sweep",
                   alpha=",".join(str(a) for a in alphas),
                   margin=result.min_margin, runtime_ms=_row_ms(t0))
    report.add_check(f"key_lemma_{vclass}", result.passed, result.min_margin,
                     f"{count} cases, worst case {result.worst_case}")


def _run_certify_smoothness(cfg: ExperimentConfig, report: ExperimentReport):
    count = int(cfg.options.get("count", 200))
    kind = cfg.options.get("kind", "smooth")
    vclass = cfg.options.get("valuation_class", "submodular")
    alphas = tuple(cfg.options.get("alphas", (1.0,)))
    n_max = int(cfg.options.get("n_max", 5))
    k_max = int(cfg.options.get("k_max", 8))
    for alpha in alphas:
        t0 = time.perf_counter()
        cert = sweeps.smoothness_sweep(count, alpha, kind, vclass, cfg.seed,
                                       n_max, k_max, cfg.parallelism)
        report.records.append(cert.to_json())
        report.add_row(experiment=cfg.experiment,
                       instance=f"{kind}-{vclass}",
                       pricing="discriminatory" if kind == "smooth" else "uniform",
                       alpha=alpha, **{"lambda": cert.lam},
                       mu=cert.mu if cert.mu is not None else cert.mu2,
                       margin=cert.margin, poa=cert.implied_poa,
                       runtime_ms=_row_ms(t0))
        report.add_check(f"{kind}_{vclass}_alpha_{alpha}", cert.verified,
                         cert.margin, f"{count} cases")


def _run_find_pne(cfg: ExperimentConfig, report: ExperimentReport):
    path = cfg.options.get("instance_file")
    if not path:
        raise ConfigError("find-pne needs instance_file")
    with open(path) as fh:
        data = json.load(fh)
    instance = AuctionInstance.from_json(data)
    grid = BidGrid.from_json(cfg.options.get("grid", {}))
    mode = cfg.options.get("mode", "exhaustive")
    t0 = time.perf_counter()
    result = find_pure_nash(instance, grid, mode,
                            cap=int(cfg.options.get("cap", 10 ** 8)),
                            seed=cfg.seed or 0,
                            starts=int(cfg.options.get("starts", 20)),
                            max_rounds=int(cfg.options.get("max_rounds", 200)))
    opt = optimal_allocation(instance.valuations, instance.k)
    slack = instance.n * instance.k * grid.tick
    all_efficient = True
    for profile in result.equilibria:
        out = allocate(profile, instance.tie_break)
        sw = social_welfare(instance.valuations, out.allocation)
        regret = is_pure_nash(profile, instance, grid).max_regret
        report.records.append({
            "profile": profile.to_json(), "welfare": sw,
            "max_regret": regret,
            "poa": poa_ratio(opt.value, sw) if sw > 0 else None,
        })
        report.add_row(experiment=cfg.experiment, instance=path,
                       n=instance.n, k=instance.k, pricing=instance.pricing,
                       interface=grid.interface,
                       poa=poa_ratio(opt.value, sw) if sw > 0 else "",
                       margin=sw - (opt.value - slack),
                       runtime_ms=_row_ms(t0))
        if sw < opt.value - slack - 1e-9:
            all_efficient = False
    report.add_check("search_completed", True,
                     len(result.equilibria),
                     "exhaustive" if result.exhaustive else "dynamics (may miss equilibria)")
    if cfg.options.get("check_efficiency", instance.pricing == "discriminatory"):
        report.add_check("pne_welfare_within_grid_slack", all_efficient,
                         len(result.equilibria))


def _run_verify_bne(cfg: ExperimentConfig, report: ExperimentReport):
    tol = float(cfg.options.get("tolerance", 1e-9))
    params = dict(cfg.options.get("params", {}))
    if cfg.options.get("instance") == "appendix-c":
        game, strat = inst_mod.appendix_c_bayesian(**params)
    elif cfg.options.get("game_file"):
        from .equilibria import BayesianGame, Strategy
        with open(cfg.options["game_file"]) as fh:
            data = json.load(fh)
        game = BayesianGame.from_json(data["game"])
        strat = Strategy.from_json(data["strategy"], game.k)
    else:
        raise ConfigError("verify-bne needs instance='appendix-c' or game_file")
    t0 = time.perf_counter()
    rep = is_bayes_nash(game, strat)
    poa = bayesian_poa(game, strat)
    report.add_row(experiment=cfg.experiment,
                   instance=cfg.options.get("instance") or cfg.options.get("game_file"),
                   n=game.n, k=game.k, pricing=game.pricing,
                   interface=game.grid.interface, margin=rep.max_regret,
                   poa=poa, runtime_ms=_row_ms(t0))
    report.add_check("bne_regret", rep.max_regret <= tol, rep.max_regret)


def _run_bound_table(cfg: ExperimentConfig, report: ExperimentReport):
    t0 = time.perf_counter()
    for row in bound_table():
        report.add_row(experiment=cfg.experiment,
                       instance=f"{row.table}/{row.mechanism}/"
                                f"{row.valuation_class}/{row.setting}",
                       pricing=row.mechanism, interface=row.setting,
                       poa=row.value, runtime_ms=_row_ms(t0))
    report.add_check("bound_table_rows", True, len(report.rows))


def _run_theorem6_frontier(cfg: ExperimentConfig, report: ExperimentReport):
    params = dict(cfg.options.get("params", {}))
    k = int(params.get("k", 50))
    mu = float(params.get("mu", 1.0))
    tick = float(params.get("tick", 1e-3))
    t0 = time.perf_counter()
    named = inst_mod.theorem6_da_instance(k, mu)
    frontier = theorem6_da_frontier(named.instance,
                                    named.profile("lower-bound-witness"), mu)
    report.add_row(experiment=cfg.experiment, instance="theorem6-da",
                   n=2, k=k, pricing="discriminatory", mu=mu,
                   margin=frontier["bound"] - frontier["lhs"],
                   runtime_ms=_row_ms(t0))
    report.add_check("da_frontier", frontier["holds"], frontier["lhs"],
                     f"bound {frontier['bound']}")
    t0 = time.perf_counter()
    scan = theorem6_upa_check(tick)
    report.add_row(experiment=cfg.experiment, instance="theorem6-upa",
                   n=2, k=1, pricing="uniform", margin=scan["total"] - 0.5,
                   runtime_ms=_row_ms(t0))
    report.add_check("upa_frontier_exact_half", scan["exact_half"],
                     scan["total"], scan["frontier"])


_RUNNERS = {
    "verify-instance": _run_verify_instance,
    "sweep-key-lemma": _run_sweep_key_lemma,
    "certify-smoothness": _run_certify_smoothness,
    "find-pne": _run_find_pne,
    "verify-bne": _run_verify_bne,
    "bound-table": _run_bound_table,
    "theorem6-frontier": _run_theorem6_frontier,
}


def run(config: ExperimentConfig | dict) -> ExperimentReport:
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    echo = {"experiment": config.experiment, "seed": config.seed,
            **config.options}
    report = ExperimentReport(config=echo)
    t0 = time.perf_counter()
    _RUNNERS[config.experiment](config, report)
    runtime_ms = _row_ms(t0)
    if config.output_json:
        with open(config.output_json, "w") as fh:
            json.dump(report.to_json(runtime_ms), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if config.output_csv:
        write_csv(report.rows, config.output_csv)
    return report


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def bound_table_csv(path) -> None:
    report = run({"schema_version": 1, "experiment": "bound-table"})
    write_csv(report.rows, path)
