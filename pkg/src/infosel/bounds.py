"""Approximation-guarantee factors for the two robust greedy algorithms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class BoundReport:
    factor: float
    valid: bool
    inputs: dict
    flags: dict = field(default_factory=dict)
    limit_case: bool = False


def _p_term(beta: float, nu_check: float, alpha_check: float) -> float:
    x = (beta - 1.0) * nu_check * (1.0 - alpha_check)
    return x / (1.0 + x)


def theorem2_raw(gamma, kappa, alpha_check, nu_check, beta, c) -> float:
    """The factor formula for the maxpen robust greedy, without validity checks."""
    P = _p_term(beta, nu_check, alpha_check)
    e = -math.expm1(-gamma * (1.0 - beta * c) / (1.0 - c))
    return kappa * P * e / (1.0 + P * e)


def theorem2_factor(gamma: float, kappa: float, alpha_check: float, nu_check: float,
                    beta: float, c: float) -> BoundReport:
    """Guarantee factor for the oblivious-then-greedy algorithm on Lambda.

    Returns factor 0 with ``valid=False`` when a parameter condition fails;
    raises only if ``c`` lies outside (0, 1).
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    flags = {
        "kappa_in_(0,1)": 0.0 < kappa < 1.0,
        "gamma_in_(0,1]": 0.0 < gamma <= 1.0,
        "beta_gt_1": beta > 1.0,
        "beta_c_lt_1": beta * c < 1.0,
    }
    inputs = dict(gamma=gamma, kappa=kappa, alpha_check=alpha_check, nu_check=nu_check, beta=beta, c=c)
    valid = all(flags.values())
    factor = theorem2_raw(gamma, kappa, alpha_check, nu_check, beta, c) if valid else 0.0
    return BoundReport(max(0.0, factor), valid, inputs, flags)


def h_func(K: int, A: int) -> Fraction:
    if not 0 <= A < K:
        raise ValueError(f"need 0 <= A < K, got A={A}, K={K}")
    return max(Fraction(1, 1 + A), Fraction(1, K - A))


def theorem3_factor(c_Gamma: float, K: int, A: int) -> BoundReport:
    """Guarantee factor for the robust greedy on the submodular surrogate."""
    if not 0.0 <= c_Gamma <= 1.0:
        raise ValueError(f"curvature must lie in [0, 1], got {c_Gamma}")
    h = float(h_func(K, A))
    inputs = dict(c_Gamma=c_Gamma, K=K, A=A, h=h)
    if c_Gamma == 0.0:
        # (1 - e^{-c}) / c -> 1 and max(1 - c, h) -> 1
        return BoundReport(1.0, True, inputs, {"c_in_(0,1]": False}, limit_case=True)
    factor = max(1.0 - c_Gamma, h) / c_Gamma * -math.expm1(-c_Gamma)
    return BoundReport(factor, True, inputs, {"c_in_(0,1]": True})


def smallest_c(K: int, A: int) -> float:
    """The attack fraction c = A / K used when reporting the maxpen bound."""
    return A / K
