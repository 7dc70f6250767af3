"""Equivalence sets and the two objective families.

``maxpen`` is the worst-surviving-penalty objective (per hypothesis
``f_p(I) = 1 - max_{j in F_p(I)} xi_pj``, summed into Lambda); ``totalpen`` is the
total-penalty surrogate (``g_p(I) = 1 - sum_{j in F_p(I)} xi_pj``, summed into Gamma).
"""

from __future__ import annotations

import threading
from typing import Optional

import numpy as np

from .instance import ProblemInstance, bits_of

MAXPEN = "maxpen"
TOTALPEN = "totalpen"
OBJECTIVES = (MAXPEN, TOTALPEN)

# values within this distance are treated as tied when selecting extremal sets
TIE_TOL = 1e-12


def _check_p(instance: ProblemInstance, p: int) -> None:
    if not 0 <= p < instance.m:
        raise IndexError(f"hypothesis index {p} out of range for m={instance.m}")


def _check_set(instance: ProblemInstance, I: int) -> None:
    if I < 0 or I >> instance.n:
        raise IndexError(f"source set {I:#x} has bits beyond n={instance.n}")


def equiv_set(instance: ProblemInstance, I: int, p: int) -> int:
    """Bitmask of hypotheses indistinguishable from ``p`` using the sources in ``I``."""
    _check_p(instance, p)
    _check_set(instance, I)
    F = instance.all_hypotheses
    for i in bits_of(I):
        F &= instance.block_masks[i][p]
    return F


def f_value(instance: ProblemInstance, I: int, p: int) -> float:
    row = instance.penalties[p]
    return 1.0 - max(float(row[j]) for j in bits_of(equiv_set(instance, I, p)))


def rho_value(instance: ProblemInstance, I: int, p: int) -> float:
    row = instance.penalties[p]
    total = 0.0
    for j in bits_of(equiv_set(instance, I, p)):
        total += float(row[j])
    return total


def g_value(instance: ProblemInstance, I: int, p: int) -> float:
    return 1.0 - rho_value(instance, I, p)


def lambda_value(instance: ProblemInstance, S: int) -> float:
    total = 0.0
    for p in range(instance.m):
        total += f_value(instance, S, p)
    return total


def gamma_obj_value(instance: ProblemInstance, S: int) -> float:
    total = 0.0
    for p in range(instance.m):
        total += g_value(instance, S, p)
    return total


_PER_HYPOTHESIS = {MAXPEN: f_value, TOTALPEN: g_value}


class Objective:
    """Memoized set function over source bitmasks.

    ``hypothesis=None`` gives the aggregate (Lambda or Gamma); an index gives
    the single-hypothesis term. ``batch`` evaluates a numpy array of masks and
    produces bit-identical values to the scalar path.
    """

    def __init__(self, instance: ProblemInstance, kind: str = MAXPEN,
                 hypothesis: Optional[int] = None, cache: bool = True):
        if kind not in OBJECTIVES:
            raise ValueError(f"unknown objective {kind!r}; expected one of {OBJECTIVES}")
        if hypothesis is not None:
            _check_p(instance, hypothesis)
        self.instance = instance
        self.kind = kind
        self.hypothesis = hypothesis
        self.cache = cache
        self._memo: dict[int, float] = {}
        self._lock = threading.Lock()
        self._table = None
        self.evaluations = 0

    @property
    def n(self) -> int:
        return self.instance.n

    def _hyps(self):
        return range(self.instance.m) if self.hypothesis is None else (self.hypothesis,)

    def _compute(self, S: int) -> float:
        term = _PER_HYPOTHESIS[self.kind]
        total = 0.0
        for p in self._hyps():
            total += term(self.instance, S, p)
        return total

    def __call__(self, S: int) -> float:
        S = int(S)
        if not self.cache:
            _check_set(self.instance, S)
            self.evaluations += 1
            return self._compute(S)
        with self._lock:
            v = self._memo.get(S)
        if v is None:
            _check_set(self.instance, S)
            self.evaluations += 1
            v = self._compute(S)
            with self._lock:
                self._memo[S] = v
        return v

    def batch(self, masks) -> np.ndarray:
        """Vectorized evaluation over an integer array of source masks."""
        inst = self.instance
        masks = np.asarray(masks, dtype=np.int64)
        shape = masks.shape
        flat = masks.reshape(-1)
        m = inst.m
        pen = inst.penalties
        total = np.zeros(flat.shape[0])
        for p in self._hyps():
            F = np.full(flat.shape[0], inst.all_hypotheses, dtype=np.int64)
            for i in range(inst.n):
                sel = ((flat >> i) & 1).astype(bool)
                F = np.where(sel, F & inst.block_masks[i][p], F)
            if self.kind == MAXPEN:
                worst = np.full(flat.shape[0], -np.inf)
                for j in range(m):
                    member = ((F >> j) & 1).astype(bool)
                    worst = np.where(member, np.maximum(worst, pen[p, j]), worst)
                term = 1.0 - worst
            else:
                acc = np.zeros(flat.shape[0])
                for j in range(m):
                    member = ((F >> j) & 1).astype(bool)
                    acc = np.where(member, acc + pen[p, j], acc)
                term = 1.0 - acc
            total = total + term
        self.evaluations += flat.shape[0]
        return total.reshape(shape)

    def table(self) -> np.ndarray:
        """Values of all ``2**n`` subsets, indexed by mask."""
        if self._table is None:
            if self.n > 22:
                raise ValueError(f"refusing to tabulate 2**{self.n} subsets")
            self._table = self.batch(np.arange(1 << self.n, dtype=np.int64))
            self._table.setflags(write=False)
        return self._table


def make_objective(instance: ProblemInstance, kind: str, hypothesis: Optional[int] = None) -> Objective:
    return Objective(instance, kind, hypothesis)
