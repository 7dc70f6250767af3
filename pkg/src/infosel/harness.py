"""Seeded experiment runner producing CSV result tables.

A config is a JSON object; see ``ExperimentConfig`` for the keys. Each trial
draws its seed from ``(master seed, trial index)`` so trials are independent
of each other and of the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from . import instance as inst_mod
from .algorithms import BudgetError, run_algorithm
from .attack import InfeasibleError, optimal_robust_selection, worst_case_attack
from .bayes import simulate_convergence, synthesize_likelihoods
from .bounds import smallest_c, theorem2_factor, theorem3_factor
from .instance import ProblemInstance, bits_of
from .objectives import MAXPEN, TOTALPEN, Objective
from .ratios import DegenerateRatioError, aggregate, c_gamma_value

log = logging.getLogger(__name__)

MODES = ("rmpis", "mrmpis", "surrogate-cross", "baselines", "bayes")

COLUMNS = [
    "trial", "seed", "n", "m", "K", "A", "beta", "algorithm", "objective",
    "selected_set", "attack_set", "surviving_value", "optimal_value", "ratio",
    "bound_factor", "bound_valid", "eval_count", "note", "time_s",
]
BAYES_COLUMNS = [
    "trial", "seed", "n", "m", "selected_set", "true_state", "T", "epsilon",
    "equiv_size", "within_deviation", "outside_mass", "passed", "time_s",
]
TIMING_COLUMNS = ("time_s",)

_DEFAULT_ALGORITHMS = {
    "rmpis": ["alg1"],
    "mrmpis": ["alg2"],
    "surrogate-cross": ["alg1", "alg2"],
    "baselines": ["alg1", "oblivious", "greedy"],
}
_DEFAULT_OBJECTIVE = {"rmpis": MAXPEN, "mrmpis": TOTALPEN, "surrogate-cross": MAXPEN,
                      "baselines": MAXPEN}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Experiment description.

    ``K`` is a list or ``{"uniform": [lo, hi]}``. ``A`` is a list,
    ``{"uniform": [lo, hi]}`` (``hi <= 0`` means ``K + hi``) or
    ``{"ceil_fraction": f}``. ``beta`` is a list or ``"floor_K_over_A"``.
    """

    mode: str = "rmpis"
    trials: int = 1
    seed: int = 0
    instance: dict = field(default_factory=lambda: {"n": 10, "m": 10})
    K: Any = field(default_factory=lambda: {"uniform": [5, 10]})
    A: Any = field(default_factory=lambda: {"uniform": [1, -1]})
    beta: Any = "floor_K_over_A"
    algorithms: Optional[list] = None
    objective: Optional[str] = None
    optimal: bool = True
    epsilon: float = 0.2
    T: int = 2000
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.algorithms is None and self.mode != "bayes":
            self.algorithms = list(_DEFAULT_ALGORITHMS[self.mode])
        if self.objective is None and self.mode != "bayes":
            self.objective = _DEFAULT_OBJECTIVE[self.mode]
        for key in ("K", "A"):
            v = getattr(self, key)
            if isinstance(v, list) and not v:
                raise ConfigError(f"{key} grid is empty")
        if isinstance(self.beta, list) and not self.beta:
            raise ConfigError("beta grid is empty")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None

    @property
    def columns(self) -> list:
        return BAYES_COLUMNS if self.mode == "bayes" else COLUMNS


def trial_seed(master: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, trial]).generate_state(1, np.uint32)[0])


def _instance_for(cfg: ExperimentConfig, seed: int) -> ProblemInstance:
    spec = cfg.instance
    if "path" in spec:
        return inst_mod.load(spec["path"])
    return inst_mod.random_instance(
        int(spec.get("m", 10)), int(spec.get("n", 10)), seed,
        enforce_unique=bool(spec.get("enforce_unique", False)),
        block_profile=spec.get("block_profile"),
    )


def _draw(spec, rng: np.random.Generator, K: Optional[int] = None) -> list:
    if isinstance(spec, list):
        return [int(x) for x in spec]
    if isinstance(spec, (int, np.integer)):
        return [int(spec)]
    if isinstance(spec, dict) and "uniform" in spec:
        lo, hi = (int(x) for x in spec["uniform"])
        if K is not None and hi <= 0:
            hi = K + hi
        if hi < lo:
            return []
        return [int(rng.integers(lo, hi + 1))]
    if isinstance(spec, dict) and "ceil_fraction" in spec:
        if K is None:
            raise ConfigError("ceil_fraction only applies to A")
        return [int(np.ceil(float(spec["ceil_fraction"]) * K - 1e-9))]
    raise ConfigError(f"cannot interpret grid spec {spec!r}")


def _betas(spec, K: int, A: int) -> list:
    if spec == "floor_K_over_A":
        return [float(K // A) if A > 0 else 1.0]
    if isinstance(spec, (int, float)):
        return [float(spec)]
    return [float(b) for b in spec]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


class _InstanceContext:
    """Per-instance caches shared by all grid points of one trial."""

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.objectives = {k: Objective(instance, k) for k in (MAXPEN, TOTALPEN)}
        self._optima = {}
        self._bundle = None
        self._bundle_error = None
        self._c_gamma = None

    def optimum(self, K, A, kind):
        key = (K, A, kind)
        if key not in self._optima:
            self._optima[key] = optimal_robust_selection(self.instance, K, A, self.objectives[kind])
        return self._optima[key]

    def bundle(self):
        if self._bundle is None and self._bundle_error is None:
            try:
                self._bundle = aggregate(self.instance)
            except DegenerateRatioError as exc:
                self._bundle_error = exc
        return self._bundle

    def c_gamma(self):
        if self._c_gamma is None:
            self._c_gamma = c_gamma_value(self.instance)
        return self._c_gamma


def _bound(ctx: _InstanceContext, algorithm: str, objective: str, K, A, beta):
    if algorithm == "alg1" and objective == MAXPEN:
        b = ctx.bundle()
        if b is None or not 0 < A < K:
            return 0.0, False
        rep = theorem2_factor(b.gamma, b.kappa, b.alpha_check, b.nu_check, beta, smallest_c(K, A))
        return rep.factor, rep.valid
    if algorithm == "alg2" and objective == TOTALPEN:
        if not 0 <= A < K:
            return 0.0, False
        rep = theorem3_factor(ctx.c_gamma(), K, A)
        return rep.factor, rep.valid
    return None, None


def _selection_rows(cfg: ExperimentConfig, trial: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    instance = _instance_for(cfg, seed)
    ctx = _InstanceContext(instance)
    n, m = instance.n, instance.m
    rows = []
    base = {"trial": trial, "seed": seed, "n": n, "m": m}
    for K in _draw(cfg.K, rng):
        for A in _draw(cfg.A, rng, K):
            for algorithm in cfg.algorithms:
                betas = _betas(cfg.beta, K, A) if algorithm == "alg1" else [None]
                for beta in betas:
                    rows.append(_one_row(cfg, ctx, base, K, A, beta, algorithm))
    return rows


def _one_row(cfg, ctx: _InstanceContext, base, K, A, beta, algorithm) -> dict:
    instance = ctx.instance
    row = dict(base, K=K, A=A, beta=beta, algorithm=algorithm, objective=cfg.objective)
    t0 = time.perf_counter()
    # alg2 always optimizes the surrogate; in surrogate-cross mode its set is scored under maxpen
    run_kind = TOTALPEN if algorithm == "alg2" else cfg.objective
    eval_kind = cfg.objective
    try:
        out = run_algorithm(algorithm, instance, K, A, ctx.objectives[run_kind], beta)
        if run_kind != eval_kind:
            attack = worst_case_attack(instance, out.selected, A, ctx.objectives[eval_kind])
        else:
            attack = out.attack
        row.update(selected_set=f"{out.selected:#x}", attack_set=f"{attack.removed:#x}",
                   surviving_value=attack.surviving_value, eval_count=attack.evaluations)
        if cfg.optimal:
            opt = ctx.optimum(K, A, eval_kind)
            row["optimal_value"] = opt.value
            row["ratio"] = attack.surviving_value / opt.value if opt.value > 0 else 1.0
            row["eval_count"] = attack.evaluations + opt.evaluations
        factor, valid = _bound(ctx, algorithm, eval_kind, K, A, beta)
        row["bound_factor"], row["bound_valid"] = factor, valid
    except InfeasibleError as exc:
        row["note"] = f"skipped: {exc}"
    except BudgetError as exc:
        row["note"] = f"skipped: {exc}"
    row["time_s"] = round(time.perf_counter() - t0, 6)
    return row


def _bayes_rows(cfg: ExperimentConfig, trial: int, seed: int) -> list:
    ss = np.random.SeedSequence(seed)
    pick_ss, lik_ss, sim_ss = ss.spawn(3)
    instance = _instance_for(cfg, seed)
    rng = np.random.default_rng(pick_ss)
    I = int(rng.integers(1, 1 << instance.n))
    p = int(rng.integers(0, instance.m))
    t0 = time.perf_counter()
    model = synthesize_likelihoods(instance, cfg.epsilon, lik_ss)
    _, verdict = simulate_convergence(instance, model, I, p, cfg.T, sim_ss)
    return [{
        "trial": trial, "seed": seed, "n": instance.n, "m": instance.m,
        "selected_set": f"{I:#x}", "true_state": p, "T": cfg.T, "epsilon": cfg.epsilon,
        "equiv_size": verdict.equivalent_set.bit_count(),
        "within_deviation": verdict.within_deviation, "outside_mass": verdict.outside_mass,
        "passed": verdict.passed, "time_s": round(time.perf_counter() - t0, 6),
    }]


def _run_trial(args) -> list:
    cfg, trial = args
    seed = trial_seed(cfg.seed, trial)
    if cfg.mode == "bayes":
        return _bayes_rows(cfg, trial, seed)
    return _selection_rows(cfg, trial, seed)


def run_experiment(cfg: Union[ExperimentConfig, dict]) -> list:
    """Run every trial and return result rows ordered by trial index."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    jobs = [(cfg, t) for t in range(cfg.trials)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(j) for j in jobs]
    rows = [r for chunk in results for r in chunk]
    log.info("experiment %s: %d trials, %d rows", cfg.mode, cfg.trials, len(rows))
    return rows


def compare_baselines(cfg: Union[ExperimentConfig, dict, None] = None, **overrides) -> list:
    """Post-attack utility of the robust algorithm and its baselines per K.

    Defaults reproduce the 20-source, attack-budget-5 sweep with beta = floor(K/A).
    """
    base = dict(mode="baselines", trials=1, instance={"n": 20, "m": 10},
                K=[7, 9, 11, 13, 15, 17, 19], A=[5], beta="floor_K_over_A", optimal=False)
    if isinstance(cfg, ExperimentConfig):
        base = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    elif isinstance(cfg, dict):
        base.update(cfg)
    base.update(overrides)
    base["mode"] = "baselines"
    if base.get("algorithms") is None:
        obj = base.get("objective") or MAXPEN
        base["algorithms"] = ["alg1" if obj == MAXPEN else "alg2", "oblivious", "greedy"]
    return run_experiment(ExperimentConfig.from_dict(base))


def to_csv(rows: list, columns: list, *, drop_timing: bool = False) -> str:
    cols = [c for c in columns if not (drop_timing and c in TIMING_COLUMNS)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def write_csv(rows: list, columns: list, path, *, drop_timing: bool = False) -> None:
    Path(path).write_text(to_csv(rows, columns, drop_timing=drop_timing))


def summarize(rows: list) -> dict:
    """Mean ratio and mean surviving value per (algorithm, objective)."""
    groups: dict = {}
    for r in rows:
        if r.get("surviving_value") is None:
            continue
        g = groups.setdefault((r["algorithm"], r["objective"]), {"ratio": [], "value": []})
        g["value"].append(r["surviving_value"])
        if r.get("ratio") is not None:
            g["ratio"].append(r["ratio"])
    out = {}
    for (alg, obj), g in groups.items():
        out[f"{alg}/{obj}"] = {
            "rows": len(g["value"]),
            "mean_value": float(np.mean(g["value"])),
            "mean_ratio": float(np.mean(g["ratio"])) if g["ratio"] else None,
        }
    return out
