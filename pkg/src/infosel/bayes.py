"""Likelihood synthesis and Bayesian belief recursion over an instance's sources."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .instance import ProblemInstance, bits_of
from .objectives import equiv_set


@dataclass(frozen=True)
class LikelihoodModel:
    """``likelihoods[i]`` has shape (m, r_i): row theta is l_i(. | theta)."""

    likelihoods: tuple
    epsilon: float

    @property
    def n(self) -> int:
        return len(self.likelihoods)

    @property
    def m(self) -> int:
        return self.likelihoods[0].shape[0]


@dataclass(frozen=True)
class BeliefState:
    mu: np.ndarray
    t: int = 0

    @classmethod
    def uniform(cls, m: int) -> "BeliefState":
        return cls(np.full(m, 1.0 / m), 0)


def synthesize_likelihoods(instance: ProblemInstance, epsilon: float = 0.2,
                           rng_seed=None) -> LikelihoodModel:
    """One symbol per block: block b emits symbol b with probability 1 - epsilon.

    ``rng_seed`` permutes the symbol labels per source; it does not affect
    which hypotheses share a vector.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    rng = np.random.default_rng(rng_seed)
    out = []
    for blocks in instance.partitions:
        r = len(blocks)
        table = np.empty((instance.m, r))
        if r == 1:
            table[:] = 1.0
        else:
            perm = rng.permutation(r) if rng_seed is not None else np.arange(r)
            for b, block in enumerate(blocks):
                vec = np.full(r, epsilon / (r - 1))
                vec[perm[b]] = 1.0 - epsilon
                table[list(block)] = vec
        table.setflags(write=False)
        out.append(table)
    return LikelihoodModel(tuple(out), epsilon)


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(p * (np.log(p) - np.log(q))))


def belief_step(model: LikelihoodModel, I: int, belief: BeliefState,
                observation: Mapping[int, int]) -> BeliefState:
    """One Bayes update with the product likelihood of the sources in ``I``.

    ``observation`` maps source index to the observed symbol.
    """
    if I == 0:
        return BeliefState(belief.mu, belief.t + 1)
    with np.errstate(divide="ignore"):
        logmu = np.log(belief.mu)
    for i in bits_of(I):
        logmu = logmu + np.log(model.likelihoods[i][:, observation[i]])
    logmu -= logmu.max()
    mu = np.exp(logmu)
    return BeliefState(mu / mu.sum(), belief.t + 1)


@dataclass(frozen=True)
class ConvergenceVerdict:
    within_deviation: float
    outside_mass: float
    equivalent_set: int
    passed: bool


def sample_observations(model: LikelihoodModel, I: int, p: int, T: int, rng) -> dict:
    """Per selected source, T i.i.d. symbols drawn from l_i(. | theta_p)."""
    return {i: rng.choice(model.likelihoods[i].shape[1], size=T, p=model.likelihoods[i][p])
            for i in bits_of(I)}


def simulate_convergence(instance: ProblemInstance, model: LikelihoodModel, I: int, p: int,
                         T: int, rng_seed=None, tol: float = 1e-3,
                         equal_tol: float = 1e-12) -> tuple[np.ndarray, ConvergenceVerdict]:
    """Run T updates from the uniform prior with data generated under hypothesis ``p``.

    Returns the (T + 1, m) belief trace and a verdict: within-set deviation is
    the largest |mu_t(q) - mu_t(p)| over q in the equivalence set and all t;
    outside mass is the largest final belief outside it.
    """
    rng = np.random.default_rng(rng_seed)
    obs = sample_observations(model, I, p, T, rng)
    m = instance.m
    F = equiv_set(instance, I, p)
    inside = np.array(bits_of(F))
    outside = np.array([q for q in range(m) if not F >> q & 1], dtype=int)
    belief = BeliefState.uniform(m)
    trace = np.empty((T + 1, m))
    trace[0] = belief.mu
    for t in range(T):
        belief = belief_step(model, I, belief, {i: int(o[t]) for i, o in obs.items()})
        trace[t + 1] = belief.mu
    within = float(np.max(np.abs(trace[:, inside] - trace[:, [p]])))
    out_mass = float(trace[-1, outside].max()) if outside.size else 0.0
    verdict = ConvergenceVerdict(within, out_mass, F, within <= equal_tol and out_mass <= tol)
    return trace, verdict


def write_trace(trace: np.ndarray, path, labels: Optional[Sequence[str]] = None) -> None:
    m = trace.shape[1]
    names = list(labels) if labels else [f"theta_{j}" for j in range(m)]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *names])
        for t, row in enumerate(trace):
            w.writerow([t, *(repr(float(x)) for x in row)])
