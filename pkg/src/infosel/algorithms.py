"""Selection algorithms: vanilla greedy, oblivious top-k and the two robust greedy schemes."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .attack import AttackResult, optimal_robust_selection, worst_case_attack
from .instance import ProblemInstance, bits_of, oblivious_count
from .objectives import MAXPEN, TIE_TOL, TOTALPEN, Objective


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class SelectionOutcome:
    selected: int
    method: str
    objective: str
    K: int
    A: int
    beta: Optional[float]
    surviving_value: float
    attack: AttackResult
    optimal_value: Optional[float] = None
    ratio: Optional[float] = None
    bound: Optional[float] = None
    beta_flagged: bool = False

    @property
    def size(self) -> int:
        return self.selected.bit_count()

    def with_optimum(self, optimal_value: float) -> "SelectionOutcome":
        if optimal_value > 0:
            ratio = self.surviving_value / optimal_value
        else:
            # optimum of zero: every selection is optimal
            ratio = 1.0
        return replace(self, optimal_value=optimal_value, ratio=ratio)


def _as_objective(instance, objective) -> Objective:
    if isinstance(objective, Objective):
        return objective
    return Objective(instance, objective)


def _argbest(scores: dict[int, float]) -> int:
    """Smallest index whose score is within TIE_TOL of the maximum."""
    top = max(scores.values())
    return min(v for v, s in scores.items() if s >= top - TIE_TOL)


def vanilla_greedy(instance: ProblemInstance, budget: int, ground: Optional[int] = None,
                   objective: Union[str, Objective] = MAXPEN, start: int = 0) -> int:
    """Add the largest-marginal-gain element of ``ground`` until ``budget`` elements are chosen.

    Zero-gain elements still fill the budget. Returns only the added elements;
    ``start`` is an optional base set the gains are measured against.
    """
    if budget < 0:
        raise BudgetError(f"budget must be non-negative, got {budget}")
    obj = _as_objective(instance, objective)
    remaining = set(bits_of(instance.all_sources if ground is None else ground))
    chosen = 0
    while remaining and chosen.bit_count() < budget:
        base = start | chosen
        scores = {v: obj(base | (1 << v)) for v in remaining}
        v = _argbest(scores)
        chosen |= 1 << v
        remaining.discard(v)
    return chosen


def oblivious_select(instance: ProblemInstance, count: int, ground: Optional[int] = None,
                     objective: Union[str, Objective] = MAXPEN) -> int:
    """The ``count`` elements of ``ground`` with the highest singleton values."""
    obj = _as_objective(instance, objective)
    remaining = set(bits_of(instance.all_sources if ground is None else ground))
    if count > len(remaining):
        raise BudgetError(f"cannot pick {count} elements from a ground set of {len(remaining)}")
    chosen = 0
    for _ in range(count):
        v = _argbest({v: obj(1 << v) for v in remaining})
        chosen |= 1 << v
        remaining.discard(v)
    return chosen


def _finish(instance, selected, method, obj: Objective, K, A, beta, flagged=False) -> SelectionOutcome:
    attack = worst_case_attack(instance, selected, A, obj)
    return SelectionOutcome(selected, method, obj.kind, K, A, beta,
                            attack.surviving_value, attack, beta_flagged=flagged)


def robust_greedy_rmpis(instance: ProblemInstance, K: int, A: int, beta: float,
                        objective: Union[str, Objective] = MAXPEN) -> SelectionOutcome:
    """Oblivious block of ceil(beta*A) best singletons, then greedy on the rest."""
    if K < 0 or A < 0:
        raise BudgetError("budgets must be non-negative")
    K = min(K, instance.n)
    obj = _as_objective(instance, objective)
    size0 = oblivious_count(beta, A)
    if size0 > K:
        raise BudgetError(f"ceil(beta*A) = {size0} exceeds K = {K}")
    D = instance.all_sources
    S0 = oblivious_select(instance, size0, D, obj)
    S1 = vanilla_greedy(instance, K - size0, D & ~S0, obj)
    return _finish(instance, S0 | S1, "alg1", obj, K, A, beta, flagged=beta <= 1)


def robust_greedy_mrmpis(instance: ProblemInstance, K: int, A: int,
                         objective: Union[str, Objective] = TOTALPEN) -> SelectionOutcome:
    """A best singletons, then greedy over the rest scored without them."""
    if not 0 <= A < K <= instance.n:
        raise BudgetError(f"need 0 <= A < K <= n, got A={A}, K={K}, n={instance.n}")
    obj = _as_objective(instance, objective)
    D = instance.all_sources
    A1 = oblivious_select(instance, A, D, obj)
    A2 = vanilla_greedy(instance, K - A, D & ~A1, obj)
    return _finish(instance, A1 | A2, "alg2", obj, K, A, None)


def greedy_baseline(instance, K, A, objective=MAXPEN) -> SelectionOutcome:
    obj = _as_objective(instance, objective)
    sel = vanilla_greedy(instance, min(K, instance.n), instance.all_sources, obj)
    return _finish(instance, sel, "greedy", obj, K, A, None)


def oblivious_baseline(instance, K, A, objective=MAXPEN) -> SelectionOutcome:
    obj = _as_objective(instance, objective)
    sel = oblivious_select(instance, min(K, instance.n), instance.all_sources, obj)
    return _finish(instance, sel, "oblivious", obj, K, A, None)


def optimal_outcome(instance, K, A, objective=MAXPEN) -> SelectionOutcome:
    obj = _as_objective(instance, objective)
    opt = optimal_robust_selection(instance, K, A, obj)
    out = SelectionOutcome(opt.selected, "optimal", obj.kind, K, A, None,
                           opt.value, opt.attack)
    return out.with_optimum(opt.value)


ALGORITHMS = ("alg1", "alg2", "greedy", "oblivious", "optimal")


def run_algorithm(name: str, instance: ProblemInstance, K: int, A: int, objective: str,
                  beta: Optional[float] = None) -> SelectionOutcome:
    if name == "alg1":
        if beta is None:
            raise BudgetError("alg1 needs beta")
        return robust_greedy_rmpis(instance, K, A, beta, objective)
    if name == "alg2":
        return robust_greedy_mrmpis(instance, K, A, objective)
    if name == "greedy":
        return greedy_baseline(instance, K, A, objective)
    if name == "oblivious":
        return oblivious_baseline(instance, K, A, objective)
    if name == "optimal":
        return optimal_outcome(instance, K, A, objective)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
