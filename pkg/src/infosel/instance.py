"""Problem data: hypotheses, sources, penalty matrix and equivalence partitions.

Source subsets and hypothesis subsets are plain ``int`` bitmasks throughout the
package (bit ``i`` set means element ``i`` is present).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

ROW_SUM_TOL = 1e-9


class InstanceError(ValueError):
    """Raised for malformed or invalid problem instances."""


def bits_of(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


def full_mask(k: int) -> int:
    return (1 << k) - 1


def distinct_row_holds(row: Sequence[float], p: int) -> bool:
    """True if the off-diagonal entries of ``row`` are nonzero and pairwise distinct."""
    off = [float(x) for j, x in enumerate(row) if j != p]
    return all(x != 0.0 for x in off) and len(set(off)) == len(off)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """An immutable problem instance.

    ``partitions[i]`` is the partition of hypothesis indices induced by source
    ``i``; the block containing ``p`` is that source's equivalence set for ``p``.
    """

    penalties: np.ndarray
    partitions: tuple
    unique_rows_assumption: bool = False
    hypothesis_labels: Optional[tuple] = None
    source_labels: Optional[tuple] = None
    block_masks: tuple = field(init=False, repr=False)

    def __post_init__(self):
        pen = np.array(self.penalties, dtype=np.float64)
        if pen.ndim != 2 or pen.shape[0] != pen.shape[1]:
            raise InstanceError(f"penalty matrix must be square, got shape {pen.shape}")
        pen.setflags(write=False)
        object.__setattr__(self, "penalties", pen)
        parts = tuple(tuple(tuple(sorted(int(h) for h in b)) for b in blocks) for blocks in self.partitions)
        object.__setattr__(self, "partitions", parts)
        if self.hypothesis_labels is not None:
            object.__setattr__(self, "hypothesis_labels", tuple(self.hypothesis_labels))
        if self.source_labels is not None:
            object.__setattr__(self, "source_labels", tuple(self.source_labels))
        m = pen.shape[0]
        masks = []
        for blocks in parts:
            row = [0] * m
            for b in blocks:
                bm = mask_of(b)
                for h in b:
                    if 0 <= h < m:
                        row[h] = bm
            masks.append(tuple(row))
        object.__setattr__(self, "block_masks", tuple(masks))

    @property
    def m(self) -> int:
        return self.penalties.shape[0]

    @property
    def n(self) -> int:
        return len(self.partitions)

    @property
    def all_sources(self) -> int:
        return full_mask(self.n)

    @property
    def all_hypotheses(self) -> int:
        return full_mask(self.m)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            np.array_equal(self.penalties, other.penalties)
            and self.partitions == other.partitions
            and self.unique_rows_assumption == other.unique_rows_assumption
            and self.hypothesis_labels == other.hypothesis_labels
            and self.source_labels == other.source_labels
        )

    def __hash__(self):
        return hash((self.penalties.tobytes(), self.partitions, self.unique_rows_assumption))

    def to_dict(self) -> dict:
        d = {
            "m": self.m,
            "n": self.n,
            "penalties": [[float(x) for x in row] for row in self.penalties],
            "partitions": [
                {"source": i, "blocks": [list(b) for b in blocks]}
                for i, blocks in enumerate(self.partitions)
            ],
            "unique_rows_assumption": bool(self.unique_rows_assumption),
        }
        if self.hypothesis_labels is not None or self.source_labels is not None:
            d["labels"] = {
                "hypotheses": list(self.hypothesis_labels) if self.hypothesis_labels else None,
                "sources": list(self.source_labels) if self.source_labels else None,
            }
        return d


@dataclass(frozen=True)
class Budgets:
    K: int
    A: int
    beta: Optional[float] = None

    def problems(self, n: int) -> list[str]:
        out = []
        if not (0 <= self.A < self.K <= n):
            out.append(f"budgets must satisfy 0 <= A < K <= n (A={self.A}, K={self.K}, n={n})")
        if self.beta is not None:
            if oblivious_count(self.beta, self.A) > self.K:
                out.append(f"ceil(beta*A) = {oblivious_count(self.beta, self.A)} exceeds K = {self.K}")
            if self.beta <= 1:
                out.append("beta <= 1 gives no nontrivial guarantee")
        return out


def oblivious_count(beta: float, A: int) -> int:
    """``ceil(beta * A)``, robust to representation error such as 2.1 * 10."""
    x = beta * A
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def validate(instance: ProblemInstance) -> list[str]:
    """Return a list of violated invariants; empty means valid."""
    report = []
    pen = instance.penalties
    m = instance.m
    if m < 1:
        report.append("empty hypothesis set")
        return report
    if not np.all(np.isfinite(pen)):
        report.append("non-finite penalty entry")
        return report
    if np.any(pen < 0) or np.any(pen > 1):
        report.append("penalty entry outside [0, 1]")
    if np.any(np.diag(pen) != 0.0):
        bad = [int(i) for i in np.nonzero(np.diag(pen))[0]]
        report.append(f"nonzero diagonal at rows {bad}")
    sums = pen.sum(axis=1)
    bad = [int(i) for i in np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]]
    if bad:
        report.append(f"row sums differ from 1 at rows {bad}")
    for i, blocks in enumerate(instance.partitions):
        seen = []
        for b in blocks:
            if len(b) == 0:
                report.append(f"source {i}: empty block")
            seen.extend(b)
        if sorted(seen) != list(range(m)):
            report.append(f"source {i}: blocks do not partition the {m} hypotheses")
    if instance.unique_rows_assumption:
        bad = [p for p in range(m) if not distinct_row_holds(pen[p], p)]
        if bad:
            report.append(f"Assumption 2 violated at rows {bad}")
    return report


def make_instance(penalties, partitions, *, unique_rows_assumption=False,
                  hypothesis_labels=None, source_labels=None, check=True) -> ProblemInstance:
    inst = ProblemInstance(penalties, tuple(partitions), unique_rows_assumption,
                           hypothesis_labels, source_labels)
    if check:
        report = validate(inst)
        if report:
            raise InstanceError("; ".join(report))
    return inst


def random_penalty_matrix(m: int, rng_seed=None, enforce_unique: bool = False) -> np.ndarray:
    """Zero-diagonal row-stochastic matrix with uniform off-diagonal draws normalized per row."""
    if m < 2:
        raise InstanceError(f"need at least 2 hypotheses for a penalty matrix, got m={m}")
    rng = np.random.default_rng(rng_seed)
    pen = np.zeros((m, m))
    for p in range(m):
        while True:
            draw = rng.random(m - 1)
            if np.any(draw == 0.0):
                continue
            row = draw / draw.sum()
            if not enforce_unique or (len(np.unique(row)) == m - 1 and np.all(row > 0)):
                break
        pen[p, :p] = row[:p]
        pen[p, p + 1:] = row[p:]
    return pen


def random_partition(m: int, rng: np.random.Generator, labels=None) -> tuple:
    """Random partition of ``range(m)``.

    ``labels=None`` or an inclusive ``(lo, hi)`` range: draw a label count r
    (default range ``(2, m)``), give each hypothesis a uniform label, drop empty
    labels. An ``int`` r yields exactly ``min(r, m)`` nonempty blocks, so
    ``r = m`` gives singletons and ``r = 1`` a single block.
    """
    if isinstance(labels, (int, np.integer)):
        r = min(int(labels), m)
        if r < 1:
            raise InstanceError(f"label count must be positive, got {labels}")
        order = rng.permutation(m)
        assign = np.empty(m, dtype=np.int64)
        assign[order[:r]] = np.arange(r)
        assign[order[r:]] = rng.integers(0, r, size=m - r)
    else:
        if labels is None:
            lo, hi = (2, m) if m >= 2 else (1, 1)
        else:
            lo, hi = int(labels[0]), int(labels[1])
        if lo < 1 or hi < lo:
            raise InstanceError(f"invalid label range ({lo}, {hi})")
        r = int(rng.integers(lo, hi + 1))
        assign = rng.integers(0, r, size=m)
    blocks = []
    for lab in range(r):
        b = tuple(int(h) for h in np.nonzero(assign == lab)[0])
        if b:
            blocks.append(b)
    return tuple(sorted(blocks))


def random_equivalence_structure(m: int, n: int, rng_seed=None, block_profile=None) -> tuple:
    if m < 1 or n < 1:
        raise InstanceError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    rng = np.random.default_rng(rng_seed)
    return tuple(random_partition(m, rng, block_profile) for _ in range(n))


def random_instance(m: int, n: int, rng_seed=None, *, enforce_unique=False,
                    block_profile=None) -> ProblemInstance:
    """Random instance; penalty and partition streams are seeded independently from ``rng_seed``."""
    ss = np.random.SeedSequence(rng_seed)
    pen_ss, part_ss = ss.spawn(2)
    pen = random_penalty_matrix(m, np.random.default_rng(pen_ss), enforce_unique)
    parts = random_equivalence_structure(m, n, np.random.default_rng(part_ss), block_profile)
    return make_instance(pen, parts, unique_rows_assumption=enforce_unique)


def from_dict(data: dict) -> ProblemInstance:
    try:
        m = int(data["m"])
        n = int(data["n"])
        pen = data["penalties"]
        parts_raw = data["partitions"]
    except KeyError as exc:
        raise InstanceError(f"instance file missing key {exc.args[0]!r}") from None
    if len(pen) != m or any(len(row) != m for row in pen):
        raise InstanceError(f"penalty matrix is not {m}x{m}")
    if len(parts_raw) != n:
        raise InstanceError(f"expected {n} partitions, got {len(parts_raw)}")
    parts = [None] * n
    for entry in parts_raw:
        i = int(entry["source"])
        if not 0 <= i < n or parts[i] is not None:
            raise InstanceError(f"bad or duplicate source index {i}")
        parts[i] = [list(map(int, b)) for b in entry["blocks"]]
    labels = data.get("labels") or {}
    return make_instance(
        pen,
        parts,
        unique_rows_assumption=bool(data.get("unique_rows_assumption", False)),
        hypothesis_labels=labels.get("hypotheses"),
        source_labels=labels.get("sources"),
    )


def save(instance: ProblemInstance, path: Union[str, Path]) -> None:
    # json writes floats with repr(), which round-trips float64 exactly
    Path(path).write_text(json.dumps(instance.to_dict(), indent=1) + "\n")


def load(path: Union[str, Path]) -> ProblemInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"cannot parse {path}: {exc}") from None
    return from_dict(data)
