"""Tiny built-in datasets for tests and ``dds selftest``."""
from __future__ import annotations

import random

from .dataset import LabeledDataset
from .sampler import SamplerInput

A, B, C = 0, 1, 2


def t1() -> LabeledDataset:
    """Four records over items A, B, C: {A,B}+, {A,C}+, {A}-, {B,C}-.

    Class 0 is "+", class 1 is "-".
    """
    return LabeledDataset.from_items([[A, B], [A, C], [A], [B, C]], [0, 0, 1, 1], 3,
                                     classes=["+", "-"])


def random_tiny_dataset(rng: random.Random, max_records: int = 6, max_items: int = 6,
                        density: float = 0.5) -> LabeledDataset:
    """Two-class dataset with 3..max_records records; both classes present."""
    n = rng.randint(3, max_records)
    n_items = rng.randint(1, max_items)
    txn = [[j for j in range(n_items) if rng.random() < density] for _ in range(n)]
    labels = [0, 1] + [rng.randint(0, 1) for _ in range(n - 2)]
    rng.shuffle(labels)
    return LabeledDataset.from_items(txn, labels, n_items)


def random_partition(d: LabeledDataset, rng: random.Random, head: int = 0,
                     m: int = 1, need_all: bool = False) -> SamplerInput | None:
    """Random (uncovered pos, uncovered neg, covered) split with ``pos`` non-empty.

    With ``need_all`` every part is non-empty; returns None if that is impossible.
    """
    cov_mask = [rng.random() < 0.4 for _ in range(len(d))]
    pos = [i for i in range(len(d)) if not cov_mask[i] and d.labels[i] == head]
    neg = [i for i in range(len(d)) if not cov_mask[i] and d.labels[i] != head]
    cov = [i for i in range(len(d)) if cov_mask[i]]
    if not pos or (need_all and (not neg or not cov)):
        return None
    return SamplerInput(pos, neg, cov, m)
