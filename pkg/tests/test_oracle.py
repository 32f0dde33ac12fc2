import random
from fractions import Fraction

import pytest

from dds.dataset import LabeledDataset
from dds.fixtures import random_partition, random_tiny_dataset
from dds.oracle import (GuardrailExceeded, enumerate_rules, exact_sampling_distribution,
                        exhaustive_best_subset)
from dds.rules import QualityParams, objective, quality
from dds.sampler import SamplerInput, build_weight_index


def test_enumerate_counts(T1):
    assert len(enumerate_rules(T1, 0)) == 7
    d1 = LabeledDataset.from_items([[0], []], [0, 1], 1)
    assert len(enumerate_rules(d1, 0)) == 1
    assert len(enumerate_rules(T1, 0) + enumerate_rules(T1, 1)) == 14
    wide = LabeledDataset.from_items([[0], [1]], [0, 1], 17)
    with pytest.raises(GuardrailExceeded):
        enumerate_rules(wide, 0)


def test_t1_pair_table(T1):
    exact = exact_sampling_distribution(SamplerInput([0, 1], [2, 3], []), T1, 0, "pair")
    # measure per body, enumerated by hand: A:2 B:1 C:1 AB:2 AC:2 BC:0 ABC:0
    table = {0b001: 2, 0b010: 1, 0b100: 1, 0b011: 2, 0b101: 2}
    assert exact.normalizer == 8
    assert exact.probs == {(b, 0): Fraction(v, 8) for b, v in table.items()}
    assert sum(exact.probs.values()) == 1


def test_single_support():
    d = LabeledDataset.from_items([[0], []], [0, 1], 1)
    exact = exact_sampling_distribution(SamplerInput([0], [1], []), d, 0, "pair")
    assert exact.probs == {(1, 0): Fraction(1)}


def test_all_zero_measure_errors(T1):
    with pytest.raises(ValueError):
        exact_sampling_distribution(SamplerInput([], [2, 3], []), T1, 0, "pair")


def test_normalizer_matches_index_total():
    rng = random.Random(12)
    checked = 0
    while checked < 40:
        d = random_tiny_dataset(rng)
        inp = random_partition(d, rng, need_all=True)
        if inp is None:
            continue
        for measure in ("pair", "triple"):
            total = build_weight_index(inp, d, measure).total
            if total:
                assert exact_sampling_distribution(inp, d, 0, measure).normalizer == total
        checked += 1


def test_exhaustive_small_cases(T1):
    p = QualityParams.from_dataset(T1)
    pool = enumerate_rules(T1, 0)
    best, f = exhaustive_best_subset(pool, 1, 10.0, T1, p)
    assert f == max(quality(r, T1, p) for r in pool)
    a, b = pool[0], pool[3]
    best, f = exhaustive_best_subset([a, b], 2, 1.0, T1, p)
    assert f == max(objective([a], 1.0, T1, p), objective([b], 1.0, T1, p),
                    objective([a, b], 1.0, T1, p))


def test_exhaustive_monotone_in_k():
    rng = random.Random(2)
    for _ in range(20):
        d = random_tiny_dataset(rng, max_items=4)
        rules = enumerate_rules(d, 0) + enumerate_rules(d, 1)
        pool = rng.sample(rules, min(8, len(rules)))
        lam = rng.random()
        values = [exhaustive_best_subset(pool, k, lam, d)[1] for k in range(1, 5)]
        assert values == sorted(values)


def test_exhaustive_guardrails(T1):
    pool = enumerate_rules(T1, 0) + enumerate_rules(T1, 1) + enumerate_rules(T1, 0)[:1]
    with pytest.raises(GuardrailExceeded):
        exhaustive_best_subset(pool, 2, 1.0, T1)
    with pytest.raises(GuardrailExceeded):
        exhaustive_best_subset(pool[:3], 6, 1.0, T1)
