"""Exact adversary and exact robust optimum by enumeration.

Tie-breaking: among sets whose value is within ``TIE_TOL`` of the extremum,
prefer smaller cardinality, then the smaller integer bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Union

import numpy as np

from .instance import ProblemInstance, bits_of, mask_of
from .objectives import TIE_TOL, Objective

MAX_EVALUATIONS = 10**8


class InfeasibleError(RuntimeError):
    """Brute force would exceed the evaluation cap."""


@dataclass(frozen=True)
class AttackResult:
    removed: int
    surviving_value: float
    evaluations: int


@dataclass(frozen=True)
class RobustOptimum:
    selected: int
    value: float
    attack: AttackResult
    evaluations: int


def _objective(instance, objective: Union[str, Objective]) -> Objective:
    if isinstance(objective, Objective):
        if objective.instance is not instance:
            raise ValueError("objective was built for a different instance")
        return objective
    return Objective(instance, objective)


def removal_sets(I: int, A: int) -> np.ndarray:
    """All subsets of ``I`` with at most ``A`` elements, as an int64 array."""
    members = bits_of(I)
    out = []
    for k in range(min(A, len(members)) + 1):
        for combo in combinations(members, k):
            out.append(mask_of(combo))
    return np.array(out, dtype=np.int64)


def _pick(values: np.ndarray, masks: np.ndarray, minimize: bool) -> int:
    """Index of the extremal value with (cardinality, mask) tie-breaking."""
    best = values.min() if minimize else values.max()
    tied = np.nonzero(values <= best + TIE_TOL)[0] if minimize else np.nonzero(values >= best - TIE_TOL)[0]
    keys = [(int(masks[t]).bit_count(), int(masks[t])) for t in tied]
    return int(tied[min(range(len(tied)), key=keys.__getitem__)])


def worst_case_attack(instance: ProblemInstance, I: int, A: int,
                      objective: Union[str, Objective] = "maxpen") -> AttackResult:
    if A < 0:
        raise ValueError(f"attack budget must be non-negative, got {A}")
    obj = _objective(instance, objective)
    removed = removal_sets(I, A)
    values = obj.batch(I & ~removed)
    k = _pick(values, removed, minimize=True)
    return AttackResult(int(removed[k]), float(values[k]), len(removed))


def robust_value(instance: ProblemInstance, I: int, A: int,
                 objective: Union[str, Objective] = "maxpen") -> float:
    return worst_case_attack(instance, I, A, objective).surviving_value


def count_evaluations(n: int, K: int, A: int, sizes=None) -> int:
    sizes = [min(K, n)] if sizes is None else sizes
    return sum(comb(n, k) * sum(comb(k, a) for a in range(min(A, k) + 1)) for k in sizes)


def optimal_robust_selection(instance: ProblemInstance, K: int, A: int,
                             objective: Union[str, Objective] = "maxpen", *,
                             all_sizes: bool = False) -> RobustOptimum:
    """Exact max over |I| = K (or every |I| <= K with ``all_sizes``) of the worst-case value.

    Restricting to |I| = K loses no value because both the objective and the
    attacker's best response are monotone in I.
    """
    n = instance.n
    if K < 0 or A < 0:
        raise ValueError("budgets must be non-negative")
    K = min(K, n)
    sizes = list(range(K + 1)) if all_sizes else [K]
    total = count_evaluations(n, K, A, sizes)
    if total > MAX_EVALUATIONS:
        raise InfeasibleError(f"brute force needs {total} evaluations (cap {MAX_EVALUATIONS})")
    obj = _objective(instance, objective)
    table = obj.table()

    cand_masks, cand_values = [], []
    for k in sizes:
        if k == 0:
            cand_masks.append(np.zeros(1, dtype=np.int64))
            cand_values.append(np.array([table[0]]))
            continue
        combos = np.array(list(combinations(range(n), k)), dtype=np.int64)
        bitvals = np.left_shift(np.int64(1), combos)
        cands = bitvals.sum(axis=1)
        worst = table[cands].copy()
        for a in range(1, min(A, k) + 1):
            for local in combinations(range(k), a):
                rem = bitvals[:, list(local)].sum(axis=1)
                np.minimum(worst, table[cands & ~rem], out=worst)
        cand_masks.append(cands)
        cand_values.append(worst)
    masks = np.concatenate(cand_masks)
    values = np.concatenate(cand_values)
    idx = _pick_selection(values, masks)
    chosen = int(masks[idx])
    attack = worst_case_attack(instance, chosen, A, obj)
    return RobustOptimum(chosen, attack.surviving_value, attack, total)


def _pick_selection(values: np.ndarray, masks: np.ndarray) -> int:
    # selections prefer larger sets among ties, then the smaller mask
    best = values.max()
    tied = np.nonzero(values >= best - TIE_TOL)[0]
    keys = [(-int(masks[t]).bit_count(), int(masks[t])) for t in tied]
    return int(tied[min(range(len(tied)), key=keys.__getitem__)])
