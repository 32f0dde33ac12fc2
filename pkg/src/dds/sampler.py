"""Exact two-step sampling of candidate rules.

A record tuple is drawn with probability proportional to the number of rule
bodies it can generate; a body is then drawn uniformly among those.  Because
each rule ``r`` is generated by exactly the tuples whose positive record
contains ``r`` and whose other records do not, the marginal probability of
``r`` is proportional to

* pair measure: ``|D+(r)| * (|D-| - |D-(r)| + |D~| - |D~(r)|)``
* triple measure: ``|D+(r)| * (|D-| - |D-(r)|) * (|D~| - |D~(r)|)``

where ``D+`` are uncovered records of the head class, ``D-`` uncovered
records of other classes and ``D~`` records already covered by selected
rules.  Weights are exact Python integers, so bodies wider than 63 items
keep the target distribution exact.
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .dataset import ItemSet, LabeledDataset
from .rules import Rule, cover_bits

PAIR = "pair"
TRIPLE = "triple"
FREQUENCY = "frequency"


@dataclass(frozen=True)
class SamplerInput:
    """Uncovered positives, uncovered negatives and covered records (indices)."""

    pos: tuple[int, ...]
    neg: tuple[int, ...]
    cov: tuple[int, ...]
    m: int = 200

    def __post_init__(self):
        object.__setattr__(self, "pos", tuple(self.pos))
        object.__setattr__(self, "neg", tuple(self.neg))
        object.__setattr__(self, "cov", tuple(self.cov))
        a, b, c = set(self.pos), set(self.neg), set(self.cov)
        if a & b or a & c or b & c:
            raise ValueError("pos, neg and cov must be pairwise disjoint")
        if self.m < 1:
            raise ValueError("m must be at least 1")


class Entry(NamedTuple):
    """One record tuple and the bodies it generates.

    The bodies form two disjoint blocks.  Block A: a non-empty subset of
    ``core`` joined with any subset of ``rest``.  Block B: non-empty subsets of
    ``left`` and ``right`` joined with any subset of ``both``.  Block B is
    empty except for triples.
    """

    records: tuple[int, ...]
    weight_a: int
    core: int
    rest: int
    weight_b: int = 0
    left: int = 0
    right: int = 0
    both: int = 0

    @property
    def weight(self) -> int:
        return self.weight_a + self.weight_b


@dataclass(frozen=True)
class WeightIndex:
    """Cumulative integer weights over record tuples for O(log n) draws."""

    entries: tuple[Entry, ...]
    cumulative: tuple[int, ...]
    measure: str

    @property
    def total(self) -> int:
        return self.cumulative[-1] if self.cumulative else 0

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_entries(cls, entries: Sequence[Entry], measure: str) -> "WeightIndex":
        kept, cum, s = [], [], 0
        for e in entries:
            if e.weight == 0:
                continue
            s += e.weight
            kept.append(e)
            cum.append(s)
        return cls(tuple(kept), tuple(cum), measure)


def pair_weight(xp: int, xn: int) -> int:
    """Number of non-empty bodies ``r ⊆ xp`` with ``r ⊄ xn``."""
    core = (xp & ~xn).bit_count()
    return ((1 << core) - 1) << (xp & xn).bit_count()


def triple_weight(xp: int, xn: int, xc: int) -> tuple[int, int]:
    """Bodies ``r ⊆ xp`` with ``r ⊄ xn`` and ``r ⊄ xc``, split in two blocks.

    The first term counts bodies meeting ``xp - xn - xc``.  The second counts
    bodies inside ``xn ∪ xc`` that still escape each of them separately,
    i.e. meet both ``xn - xc`` and ``xc - xn``.
    """
    core = xp & ~xn & ~xc
    left = xp & xn & ~xc
    right = xp & xc & ~xn
    both = xp & xn & xc
    a = ((1 << core.bit_count()) - 1) << (xp & ~core).bit_count()
    b = (((1 << left.bit_count()) - 1) * ((1 << right.bit_count()) - 1)) << both.bit_count()
    return a, b


def _pair_entry(i: int, j: int, xp: int, xn: int) -> Entry:
    core = xp & ~xn
    rest = xp & xn
    return Entry((i, j), pair_weight(xp, xn), core, rest)


def _triple_entry(i: int, j: int, k: int, xp: int, xn: int, xc: int) -> Entry:
    core = xp & ~xn & ~xc
    wa, wb = triple_weight(xp, xn, xc)
    return Entry((i, j, k), wa, core, xp & ~core, wb,
                 xp & xn & ~xc, xp & xc & ~xn, xp & xn & xc)


def build_weight_index_pairs(inp: SamplerInput, d: LabeledDataset) -> WeightIndex:
    """Pairs (positive, negative-or-covered) weighted by the bodies they generate.

    With no negative or covered record the measure degenerates; single
    positive records are then weighted by ``2**|x| - 1`` (frequency sampling).
    """
    if not inp.pos:
        raise ValueError("no positive records to sample from")
    bits = d.record_bits
    others = inp.neg + inp.cov
    if not others:
        entries = [Entry((i,), (1 << bits[i].bit_count()) - 1, bits[i], 0) for i in inp.pos]
        return WeightIndex.from_entries(entries, FREQUENCY)
    entries = [_pair_entry(i, j, bits[i], bits[j]) for i in inp.pos for j in others]
    return WeightIndex.from_entries(entries, PAIR)


def build_weight_index_triples(inp: SamplerInput, d: LabeledDataset) -> WeightIndex:
    """Triples (positive, negative, covered) weighted by the bodies they generate."""
    if not inp.pos:
        raise ValueError("no positive records to sample from")
    if not inp.neg or not inp.cov:
        raise ValueError("triple measure vanishes without both negative and covered "
                         "records; use the pair measure")
    bits = d.record_bits
    entries = [
        _triple_entry(i, j, k, bits[i], bits[j], bits[k])
        for i in inp.pos for j in inp.neg for k in inp.cov
    ]
    return WeightIndex.from_entries(entries, TRIPLE)


def build_weight_index(inp: SamplerInput, d: LabeledDataset, measure: str = PAIR) -> WeightIndex:
    if measure == PAIR:
        return build_weight_index_pairs(inp, d)
    if measure == TRIPLE:
        return build_weight_index_triples(inp, d)
    raise ValueError(f"unknown measure {measure!r}")


def _nonempty_subset(mask: int, rng: random.Random) -> int:
    n = mask.bit_length()
    while True:
        s = rng.getrandbits(n) & mask
        if s:
            return s


def _any_subset(mask: int, rng: random.Random) -> int:
    return rng.getrandbits(mask.bit_length()) & mask if mask else 0


def draw_bodies(idx: WeightIndex, m: int, rng: random.Random) -> list[int]:
    """Draw ``m`` rule bodies (as item bitmasks) from the index."""
    if idx.total == 0:
        raise ValueError("weight index is empty; no rule can be sampled")
    cum, entries, total = idx.cumulative, idx.entries, idx.total
    out = []
    for _ in range(m):
        r = rng.randrange(total)
        k = bisect_right(cum, r)
        e = entries[k]
        offset = r - (cum[k - 1] if k else 0)
        # the offset is uniform within the entry, so it also picks the block
        if offset < e.weight_a:
            body = _nonempty_subset(e.core, rng) | _any_subset(e.rest, rng)
        else:
            body = (_nonempty_subset(e.left, rng) | _nonempty_subset(e.right, rng)
                    | _any_subset(e.both, rng))
        out.append(body)
    return out


def sample_rules(idx: WeightIndex, inp: SamplerInput, d: LabeledDataset, head: int,
                 rng_seed: int) -> list[Rule]:
    """Draw ``inp.m`` rules i.i.d. with probability proportional to the index's measure."""
    rng = random.Random(rng_seed)
    width = d.n_items
    return [Rule(ItemSet(b, width), head, cover_bits(b, d))
            for b in draw_bodies(idx, inp.m, rng)]


def subsample_records(indices: Sequence[int], cap: int, rng_seed: int) -> list[int]:
    """Uniform sample of ``min(cap, len(indices))`` indices, in their original order."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    indices = list(indices)
    if len(indices) <= cap:
        return indices
    chosen = set(random.Random(rng_seed).sample(range(len(indices)), cap))
    return [x for k, x in enumerate(indices) if k in chosen]


def measure_value(body: int, inp: SamplerInput, d: LabeledDataset, measure: str = PAIR) -> int:
    """Sampling measure of a body, evaluated from its counts."""
    bits = d.record_bits

    def hits(group):
        return sum(1 for i in group if bits[i] & body == body)

    n_pos = hits(inp.pos)
    if measure == FREQUENCY:
        return n_pos
    miss_neg = len(inp.neg) - hits(inp.neg)
    miss_cov = len(inp.cov) - hits(inp.cov)
    if measure == PAIR:
        return n_pos * (miss_neg + miss_cov)
    if measure == TRIPLE:
        return n_pos * miss_neg * miss_cov
    raise ValueError(f"unknown measure {measure!r}")
