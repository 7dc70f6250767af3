"""Curvature and submodularity ratios.

Two families live here: closed-form bounds computed from a penalty row
(``gamma_bound``, ``curvature_bounds``, ``c_gp_value``, ``aggregate``) and exact
values obtained by exhaustive enumeration over subsets (``exact_*``). The
closed forms are one-sided bounds on the exact values, not equalities.

Pairwise penalty differences range over all ordered pairs of distinct
hypotheses, including the true hypothesis itself (whose penalty is 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .instance import ProblemInstance, distinct_row_holds
from .objectives import MAXPEN, TOTALPEN, Objective, g_value


class DegenerateRatioError(ValueError):
    """A penalty row violates the distinct-penalty assumption (some difference is 0)."""

    def __init__(self, row: int, xi_min: float = 0.0):
        super().__init__(f"row {row}: penalties not pairwise distinct (min difference {xi_min})")
        self.row = row
        self.xi_min = xi_min


class EnumerationRefused(ValueError):
    """The instance is too large for exhaustive enumeration."""


def _pair_diffs(row) -> tuple[float, float]:
    row = [float(x) for x in row]
    diffs = [abs(a - b) for a, b in combinations(row, 2)]
    return min(diffs), max(diffs)


def penalty_spread(instance: ProblemInstance, p: int) -> tuple[float, float]:
    """(smallest, largest) absolute difference between two entries of row ``p``."""
    return _pair_diffs(instance.penalties[p])


def gamma_bound(instance: ProblemInstance, p: int) -> float:
    lo, hi = penalty_spread(instance, p)
    if lo == 0.0 or not distinct_row_holds(instance.penalties[p], p):
        raise DegenerateRatioError(p, lo)
    return lo / hi


def curvature_bounds(instance: ProblemInstance, p: int) -> tuple[float, float, float]:
    """(inverse curvature, superadditivity, bipartite subadditivity) formulas for row ``p``.

    The bipartite value is returned raw and may exceed 1.
    """
    alpha = 1.0 - gamma_bound(instance, p)
    row = instance.penalties[p]
    top, bottom = float(row.max()), float(row.min())
    nu = (1.0 - top) / (instance.n * (1.0 - bottom))
    kappa = 2.0 * (1.0 - top) / (1.0 - bottom)
    return alpha, nu, kappa


def c_gp_value(instance: ProblemInstance, p: int) -> float:
    """Curvature formula for the total-penalty term of hypothesis ``p``."""
    row = instance.penalties[p]
    top = float(row.max())
    if top == 0.0:
        raise ValueError(f"row {p} is all zero; instance is not row-stochastic")
    D = instance.all_sources
    full = g_value(instance, D, p)
    for i in range(instance.n):
        if g_value(instance, D & ~(1 << i), p) == full:
            return 1.0
    lo, _ = penalty_spread(instance, p)
    return 1.0 - lo / top


@dataclass(frozen=True)
class RatioBundle:
    gamma_p: tuple
    alpha_check_p: tuple
    nu_check_p: tuple
    kappa_p: tuple
    c_gp: tuple
    gamma: float
    alpha_check: float
    nu_check: float
    kappa: float
    c_Gamma: float

    @property
    def kappa_valid_for_guarantee(self) -> bool:
        return 0.0 < self.kappa < 1.0

    def as_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def aggregate(instance: ProblemInstance) -> RatioBundle:
    gam, alp, nus, kap, cgp = [], [], [], [], []
    for p in range(instance.m):
        gam.append(gamma_bound(instance, p))
        a, nu, k = curvature_bounds(instance, p)
        alp.append(a)
        nus.append(nu)
        kap.append(k)
        cgp.append(c_gp_value(instance, p))
    return RatioBundle(
        tuple(gam), tuple(alp), tuple(nus), tuple(kap), tuple(cgp),
        gamma=min(gam), alpha_check=max(alp), nu_check=min(nus),
        kappa=min(kap), c_Gamma=max(cgp),
    )


def c_gamma_value(instance: ProblemInstance) -> float:
    """Aggregate curvature formula; needs no distinctness assumption."""
    return max(c_gp_value(instance, p) for p in range(instance.m))


# --- exact values by enumeration -------------------------------------------

def _table(instance: ProblemInstance, kind: str, hypothesis: Optional[int], cap: int) -> np.ndarray:
    if instance.n > cap:
        raise EnumerationRefused(f"n={instance.n} exceeds enumeration cap {cap}")
    return Objective(instance, kind, hypothesis).table()


def _popcount_bits(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)


def exact_submodularity_ratio(instance: ProblemInstance, kind: str = MAXPEN,
                              hypothesis: Optional[int] = None, *, table=None) -> float:
    """Smallest ratio of summed singleton gains to joint gain over all pairs (A, B).

    Only ``A \\ B`` matters, so pairs are enumerated as (B, D) with D disjoint
    from B. Pairs with zero joint gain are non-binding (0/0 counts as 1).
    """
    f = _table(instance, kind, hypothesis, 12) if table is None else np.asarray(table)
    n = instance.n
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    bits = _popcount_bits(n)
    best = 1.0
    for B in range(size):
        gains = np.array([f[B | (1 << a)] - f[B] for a in range(n)])
        D = masks[(masks & B) == 0]
        num = bits[D] @ gains
        den = f[D | B] - f[B]
        binding = den > 0
        if np.any(binding):
            best = min(best, float(np.min(num[binding] / den[binding])))
    return max(0.0, min(1.0, best))


def exact_inverse_curvature(instance: ProblemInstance, kind: str = MAXPEN,
                            hypothesis: Optional[int] = None, *, table=None) -> float:
    """Smallest alpha in [0, 1] with marginal(i | S-i) >= (1 - alpha) marginal(i | S-i+V).

    Only V \\ S matters. 0/0 triples are skipped; a positive numerator over a
    zero denominator never binds.
    """
    f = _table(instance, kind, hypothesis, 10) if table is None else np.asarray(table)
    n = instance.n
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    worst = np.inf
    for S in range(1, size):
        W = masks[(masks & S) == 0]
        for i in range(n):
            if not S >> i & 1:
                continue
            Si = S & ~(1 << i)
            num = f[S] - f[Si]
            den = f[S | W] - f[Si | W]
            binding = den > 0
            if not np.any(binding):
                continue
            worst = min(worst, float(np.min(num / den[binding])))
    if worst == np.inf:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - worst)))


def exact_superadditivity(instance: ProblemInstance, kind: str = MAXPEN,
                          hypothesis: Optional[int] = None, *, table=None) -> float:
    """Largest nu in [0, 1] with f(S) >= nu * sum of singleton values over S."""
    f = _table(instance, kind, hypothesis, 10) if table is None else np.asarray(table)
    n = instance.n
    singles = np.array([f[1 << i] for i in range(n)])
    sums = _popcount_bits(n) @ singles
    binding = sums > 0
    if not np.any(binding):
        return 1.0
    return float(min(1.0, max(0.0, np.min(f[binding] / sums[binding]))))


def exact_bipartite(instance: ProblemInstance, kind: str = MAXPEN,
                    hypothesis: Optional[int] = None, *, table=None) -> float:
    """Largest kappa in [0, 1] with f(A) + f(B) >= kappa f(A u B) for disjoint A, B."""
    f = _table(instance, kind, hypothesis, 10) if table is None else np.asarray(table)
    n = instance.n
    size = 1 << n
    best = 1.0
    for S in range(1, size):
        if f[S] <= 0:
            continue
        sub = S
        lo = np.inf
        while True:
            lo = min(lo, f[sub] + f[S & ~sub])
            if sub == 0:
                break
            sub = (sub - 1) & S
        best = min(best, lo / f[S])
    return float(max(0.0, best))


def exact_curvature(instance: ProblemInstance, kind: str = TOTALPEN,
                    hypothesis: Optional[int] = None) -> float:
    """Total curvature ``1 - min_e (f(D) - f(D - e)) / f(e)``, skipping elements with f(e) = 0."""
    obj = Objective(instance, kind, hypothesis)
    D = instance.all_sources
    ratios = []
    for e in range(instance.n):
        single = obj(1 << e) - obj(0)
        if single <= 0:
            continue
        ratios.append((obj(D) - obj(D & ~(1 << e))) / single)
    if not ratios:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - min(ratios))))
