"""Rules, covers, discriminative quality, Jaccard diversity and the objective."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dataset import ItemSet, LabeledDataset, UniverseMismatch


@dataclass(frozen=True)
class Rule:
    """``body -> head`` with the record mask it covers on its dataset.

    Equality and hashing use only ``(body, head)``.
    """

    body: ItemSet
    head: int
    cover: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        if not self.body:
            raise ValueError("rule body must be non-empty")

    @classmethod
    def build(cls, body: ItemSet, head: int, d: LabeledDataset) -> "Rule":
        return cls(body, head, cover(body, d))

    @property
    def key(self) -> tuple[int, int]:
        return self.body.bits, self.head

    @property
    def support(self) -> int:
        return self.cover.bit_count()

    def describe(self, d: LabeledDataset) -> str:
        names = d.item_names
        body = " AND ".join(names[j] for j in self.body)
        return f"IF {body} THEN {d.classes[self.head]}"


@dataclass(frozen=True)
class QualityParams:
    """Class prior of the full training set."""

    class_priors: tuple[float, ...]
    n_records: int
    class_counts: tuple[int, ...]

    def __post_init__(self):
        if abs(math.fsum(self.class_priors) - 1.0) > 1e-12:
            raise ValueError("class priors must sum to 1")
        if any(p <= 0 for p in self.class_priors):
            raise ValueError("every class prior must be positive")

    @classmethod
    def from_dataset(cls, d: LabeledDataset) -> "QualityParams":
        counts = tuple(d.class_counts)
        n = len(d)
        return cls(tuple(c / n for c in counts), n, counts)


def cover(body: ItemSet, d: LabeledDataset) -> int:
    """Record mask of ``{i : body ⊆ records[i]}``."""
    if body.width != d.n_items:
        raise UniverseMismatch(f"body over {body.width} items, dataset has {d.n_items}")
    return cover_bits(body.bits, d)


def cover_bits(body: int, d: LabeledDataset) -> int:
    mask = d.full_mask
    covers = d.item_covers
    while body and mask:
        low = body & -body
        mask &= covers[low.bit_length() - 1]
        body ^= low
    return mask


def quality(r: Rule, d: LabeledDataset, p: QualityParams | None = None) -> float:
    """Discriminative score ``sqrt(|D^y(r)|) * 1[precision > prior] * KL(P_cover || P_D)``.

    Natural log; zero for an empty cover or when the head-class share of the
    cover does not strictly exceed its share of the dataset.
    """
    if p is None:
        p = QualityParams.from_dataset(d)
    return cover_quality(r.cover, r.head, d, p)


def cover_quality(mask: int, head: int, d: LabeledDataset, p: QualityParams) -> float:
    n_cov = mask.bit_count()
    if n_cov == 0:
        return 0.0
    counts = [(mask & m).bit_count() for m in d.class_masks]
    hits = counts[head]
    # strict inequality hits/n_cov > prior, compared in integers
    if hits * p.n_records <= p.class_counts[head] * n_cov:
        return 0.0
    kl = 0.0
    for c, prior in zip(counts, p.class_priors):
        if c:
            frac = c / n_cov
            kl += frac * math.log(frac / prior)
    return math.sqrt(hits) * max(kl, 0.0)


def jaccard(c1: int, c2: int, exact: bool = False) -> float | Fraction:
    """Jaccard distance of two record masks; a Fraction when ``exact``."""
    union = (c1 | c2).bit_count()
    diff = (c1 ^ c2).bit_count()
    if exact:
        return Fraction(diff, union) if union else Fraction(0)
    # single rounding step: |symmetric difference| / |union|
    return diff / union if union else 0.0


def jaccard_distance(r1: Rule, r2: Rule, exact: bool = False) -> float | Fraction:
    """1 - |cover1 ∩ cover2| / |cover1 ∪ cover2|; 0 when both covers are empty."""
    return jaccard(r1.cover, r2.cover, exact)


def diversity(rules: Sequence[Rule]) -> float:
    """Sum of pairwise Jaccard distances over unordered pairs."""
    covers = [r.cover for r in rules]
    return math.fsum(jaccard(a, b) for i, a in enumerate(covers) for b in covers[i + 1:])


def total_quality(rules: Sequence[Rule], d: LabeledDataset, p: QualityParams | None = None) -> float:
    if p is None:
        p = QualityParams.from_dataset(d)
    return math.fsum(quality(r, d, p) for r in rules)


def objective(rules: Sequence[Rule], lam: float, d: LabeledDataset,
              p: QualityParams | None = None) -> float:
    """Max-sum diversification value ``Q(S) + lam * d(S)``."""
    return total_quality(rules, d, p) + lam * diversity(rules)
