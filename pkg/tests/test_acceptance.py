"""Acceptance suite: one test per criterion, each printing a single pass/fail line.

Run ``pytest -m acceptance -s`` for the lines inline, or ``python tests/test_acceptance.py``.
"""

import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from infosel.algorithms import robust_greedy_mrmpis, robust_greedy_rmpis  # noqa: E402
from infosel.attack import optimal_robust_selection, worst_case_attack  # noqa: E402
from infosel.bounds import smallest_c, theorem2_factor, theorem3_factor  # noqa: E402
from infosel.harness import (ExperimentConfig, compare_baselines, run_experiment,  # noqa: E402
                             to_csv)
from infosel.instance import bits_of, random_instance  # noqa: E402
from infosel.objectives import MAXPEN, TOTALPEN, Objective  # noqa: E402
from infosel.ratios import (aggregate, c_gamma_value, exact_bipartite,  # noqa: E402
                            exact_inverse_curvature, exact_submodularity_ratio,
                            exact_superadditivity)

pytestmark = pytest.mark.acceptance

SEED = 2024
TOL = 1e-12
REPORT = []


def report(k, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {k}: {detail}"
    REPORT.append(line)
    print(line)
    return passed


def replication(mode):
    rows = run_experiment(dict(mode=mode, trials=100, seed=SEED, instance={"n": 10, "m": 10},
                               K={"uniform": [5, 10]}, A={"uniform": [1, -1]},
                               beta="floor_K_over_A"))
    assert all(not r.get("note") for r in rows)
    return float(np.mean([r["ratio"] for r in rows]))


def small_budgets(rng, n):
    K = int(rng.integers(2, n + 1))
    A = int(rng.integers(1, K))
    return K, A


def criterion_1():
    mean = replication("rmpis")
    return report(1, mean >= 0.70, f"alg1 mean maxpen ratio {mean:.4f} (need >= 0.70)")


def criterion_2():
    mean = replication("mrmpis")
    return report(2, mean >= 0.74, f"alg2 mean totalpen ratio {mean:.4f} (need >= 0.74)")


def criterion_3():
    violations, worst = 0, np.inf
    for t in range(200):
        rng = np.random.default_rng([SEED, 3, t])
        n = int(rng.integers(3, 9))
        inst = random_instance(int(rng.integers(3, 9)), n, [SEED, 3, t])
        K, A = small_budgets(rng, n)
        value = robust_greedy_mrmpis(inst, K, A).surviving_value
        opt = optimal_robust_selection(inst, K, A, TOTALPEN).value
        factor = theorem3_factor(c_gamma_value(inst), K, A).factor
        violations += value < factor * opt - TOL
        if opt > 0:
            worst = min(worst, value / opt - factor)
    return report(3, violations == 0,
                  f"{violations} violations on 200 instances (min ratio - factor {worst:.4f})")


def criterion_4():
    violations = vacuous = 0
    for t in range(200):
        rng = np.random.default_rng([SEED, 4, t])
        n = int(rng.integers(3, 9))
        inst = random_instance(int(rng.integers(3, 9)), n, [SEED, 4, t], enforce_unique=True)
        K, A = small_budgets(rng, n)
        beta = (1 + K / A) / 2
        b = aggregate(inst)
        rep = theorem2_factor(b.gamma, b.kappa, b.alpha_check, b.nu_check, beta, smallest_c(K, A))
        if not rep.valid:
            vacuous += 1
            continue
        value = robust_greedy_rmpis(inst, K, A, beta).surviving_value
        opt = optimal_robust_selection(inst, K, A, MAXPEN).value
        violations += value < rep.factor * opt - TOL
    return report(4, violations == 0,
                  f"{violations} violations among {200 - vacuous} valid rows, {vacuous} vacuous rows")


def criterion_5():
    violations = 0
    for t in range(50):
        inst = random_instance(int(np.random.default_rng([SEED, 5, t]).integers(3, 9)), 6, [SEED, 5, t])
        g = Objective(inst, TOTALPEN).table()
        for I2 in range(64):
            sub = I2
            while True:
                for j in range(6):
                    if not I2 >> j & 1:
                        violations += g[sub | 1 << j] - g[sub] < g[I2 | 1 << j] - g[I2] - TOL
                if sub == 0:
                    break
                sub = (sub - 1) & I2
    return report(5, violations == 0, f"{violations} diminishing-returns violations on 50 instances")


def criterion_6():
    fails = {"gamma_p": 0, "gamma": 0, "alpha": 0, "nu": 0, "kappa": 0}
    for t in range(50):
        inst = random_instance(int(np.random.default_rng([SEED, 6, t]).integers(3, 9)), 6,
                               [SEED, 6, t], enforce_unique=True)
        b = aggregate(inst)
        table = Objective(inst, MAXPEN).table()
        for p in range(inst.m):
            fails["gamma_p"] += exact_submodularity_ratio(inst, MAXPEN, p) < b.gamma_p[p] - TOL
        fails["gamma"] += exact_submodularity_ratio(inst, table=table) < b.gamma - TOL
        fails["alpha"] += exact_inverse_curvature(inst, table=table) > b.alpha_check + TOL
        fails["nu"] += exact_superadditivity(inst, table=table) < b.nu_check - TOL
        fails["kappa"] += exact_bipartite(inst, table=table) < min(b.kappa, 1.0) - TOL
    total = sum(fails.values())
    return report(6, total == 0, f"{total} violations on 50 instances {fails}")


def criterion_7():
    rows = run_experiment(dict(mode="bayes", trials=20, seed=SEED, instance={"n": 6, "m": 8},
                               epsilon=0.2, T=2000))
    dev = max(r["within_deviation"] for r in rows)
    mass = max(r["outside_mass"] for r in rows)
    ok = all(r["passed"] for r in rows)
    return report(7, ok, f"max within-set deviation {dev:.1e}, max outside mass {mass:.1e} over 20 runs")


def criterion_8():
    mismatches = 0
    for t in range(100):
        rng = np.random.default_rng([SEED, 8, t])
        n = int(rng.integers(2, 9))
        inst = random_instance(int(rng.integers(2, 9)), n, [SEED, 8, t])
        kind = (MAXPEN, TOTALPEN)[t % 2]
        K = int(rng.integers(1, n + 1))
        A = int(rng.integers(0, K + 1))
        I = int(rng.integers(0, 1 << n))
        res = worst_case_attack(inst, I, A, kind)
        removed, value = oracles.attack(inst, set(bits_of(I)), A, kind)
        mismatches += res.removed != oracles.to_mask(removed) or abs(res.surviving_value - value) > TOL
        opt = optimal_robust_selection(inst, K, A, kind)
        sel, value = oracles.optimum(inst, K, A, kind)
        mismatches += opt.selected != oracles.to_mask(sel) or abs(opt.value - value) > TOL
    return report(8, mismatches == 0, f"{mismatches} mismatches against enumeration oracles on 100 instances")


def criterion_9():
    rows = compare_baselines(trials=50, seed=SEED, workers=4)
    Ks = sorted({r["K"] for r in rows})
    means = {(alg, K): np.mean([r["surviving_value"] for r in rows if r["algorithm"] == alg and r["K"] == K])
             for alg in ("alg1", "oblivious", "greedy") for K in Ks}
    weak = [(alg, K) for alg in ("oblivious", "greedy") for K in Ks
            if means["alg1", K] < means[alg, K] - TOL]
    for alg, K in weak:
        warnings.warn(f"alg1 below {alg} at K={K}: {means['alg1', K]:.4f} < {means[alg, K]:.4f}")
    overall = {alg: np.mean([means[alg, K] for K in Ks]) for alg in ("alg1", "oblivious", "greedy")}
    ok = overall["alg1"] >= max(overall["oblivious"], overall["greedy"]) - TOL
    detail = ", ".join(f"{a} {v:.4f}" for a, v in overall.items())
    return report(9, ok, f"mean utility over K: {detail}; per-K warnings {len(weak)}")


def criterion_10():
    identical = True
    for mode in ("rmpis", "mrmpis", "surrogate-cross", "baselines", "bayes"):
        cfg = dict(mode=mode, trials=5, seed=SEED, instance={"n": 8, "m": 8}, T=200,
                   K={"uniform": [3, 8]}, A={"uniform": [1, -1]})
        cols = ExperimentConfig.from_dict(cfg).columns
        a = to_csv(run_experiment(cfg), cols, drop_timing=True)
        b = to_csv(run_experiment(dict(cfg, workers=3)), cols, drop_timing=True)
        identical &= a == b
    return report(10, identical, "byte-identical CSV across reruns for all five modes")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 11)])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
