"""Brute-force references for tiny instances.

Everything here enumerates: all rule bodies, the exact (rational) sampling
distribution, and the optimal bounded-size rule subset.  Guardrails abort
on inputs too large to enumerate.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dataset import ItemSet, LabeledDataset
from .rules import QualityParams, Rule, jaccard_distance, quality

MAX_ITEMS = 16
MAX_RECORDS = 8
MAX_POOL = 14
MAX_K = 5


class GuardrailExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExactDistribution:
    """Exact probabilities keyed by ``(body bits, head)``."""

    probs: dict[tuple[int, int], Fraction]
    normalizer: int

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.probs.get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self.probs)

    def total_variation(self, counts: Counter | dict) -> float:
        """TV distance between this distribution and empirical ``counts``."""
        n = sum(counts.values())
        keys = set(self.probs) | set(counts)
        return 0.5 * sum(abs(float(self[k]) - counts.get(k, 0) / n) for k in keys)


def enumerate_rules(d: LabeledDataset, head: int) -> list[Rule]:
    """Every rule with a non-empty body and the given head."""
    if d.n_items > MAX_ITEMS:
        raise GuardrailExceeded(f"{d.n_items} items exceeds enumeration limit {MAX_ITEMS}")
    return [Rule.build(ItemSet(bits, d.n_items), head, d) for bits in range(1, 1 << d.n_items)]


def _definitional_measure(body: frozenset, pos: list[frozenset], neg: list[frozenset],
                          cov: list[frozenset], measure: str) -> int:
    n_pos = sum(body <= x for x in pos)
    miss_neg = sum(not body <= x for x in neg)
    miss_cov = sum(not body <= x for x in cov)
    if measure == "pair":
        return n_pos * (miss_neg + miss_cov)
    if measure == "triple":
        return n_pos * miss_neg * miss_cov
    if measure == "frequency":
        return n_pos
    raise ValueError(f"unknown measure {measure!r}")


def exact_sampling_distribution(inp, d: LabeledDataset, head: int,
                                measure: str = "pair") -> ExactDistribution:
    """Normalized measure over all bodies; zero-measure rules are left out.

    ``inp`` is a :class:`dds.sampler.SamplerInput`.  Counts come from set
    inclusion on the raw transactions, not from the sampler's weights.
    """
    if d.n_items > MAX_ITEMS or len(d) > MAX_RECORDS:
        raise GuardrailExceeded("instance too large for exact enumeration")
    txn = [frozenset(r.items()) for r in d.records]
    pos = [txn[i] for i in inp.pos]
    neg = [txn[i] for i in inp.neg]
    cov = [txn[i] for i in inp.cov]
    values = {}
    for size in range(1, d.n_items + 1):
        for items in itertools.combinations(range(d.n_items), size):
            v = _definitional_measure(frozenset(items), pos, neg, cov, measure)
            if v:
                values[(sum(1 << j for j in items), head)] = v
    z = sum(values.values())
    if z == 0:
        raise ValueError("measure is zero for every rule")
    return ExactDistribution({k: Fraction(v, z) for k, v in values.items()}, z)


def _subset_value(subset: Sequence[int], qs: Sequence[float], dist, lam: float) -> float:
    q = sum(qs[i] for i in subset)
    div = sum(dist[i][j] for i, j in itertools.combinations(subset, 2))
    return q + lam * div


def exhaustive_best_subset(pool: Sequence[Rule], k: int, lam: float, d: LabeledDataset,
                           p: QualityParams | None = None) -> tuple[list[Rule], float]:
    """Exact maximizer of ``Q(S) + lam * d(S)`` over all subsets of size at most ``k``."""
    if len(pool) > MAX_POOL or k > MAX_K:
        raise GuardrailExceeded(f"pool {len(pool)} / k {k} exceeds {MAX_POOL} / {MAX_K}")
    if p is None:
        p = QualityParams.from_dataset(d)
    qs = [quality(r, d, p) for r in pool]
    dist = [[jaccard_distance(a, b) for b in pool] for a in pool]
    best, best_f = (), 0.0
    for size in range(1, min(k, len(pool)) + 1):
        for subset in itertools.combinations(range(len(pool)), size):
            f = _subset_value(subset, qs, dist, lam)
            if f > best_f:
                best, best_f = subset, f
    return [pool[i] for i in best], best_f


def body_counts(bodies: Iterable[int], head: int) -> Counter:
    return Counter((b, head) for b in bodies)


def brute_force_cover(body: ItemSet, d: LabeledDataset) -> set[int]:
    """Record indices whose transaction contains ``body`` (set-based, no bit tricks)."""
    items = set(body.items())
    return {i for i, r in enumerate(d.records) if items <= set(r.items())}

