import itertools
import random
from fractions import Fraction

import pytest

from dds.dataset import LabeledDataset
from dds.fixtures import A, B, C, random_partition, random_tiny_dataset
from dds.oracle import body_counts, exact_sampling_distribution
from dds.sampler import (FREQUENCY, PAIR, TRIPLE, SamplerInput, build_weight_index,
                         build_weight_index_pairs, build_weight_index_triples, draw_bodies,
                         measure_value, pair_weight, sample_rules, subsample_records,
                         triple_weight)


def bits(*items):
    return sum(1 << i for i in items)


def count_bodies(xp, *others):
    """Non-empty subsets of xp contained in none of ``others`` (enumeration)."""
    items = [i for i in range(xp.bit_length()) if xp >> i & 1]
    n = 0
    for size in range(1, len(items) + 1):
        for sub in itertools.combinations(items, size):
            b = bits(*sub)
            n += all(b & o != b for o in others)
    return n


def test_pair_index_t1(T1):
    idx = build_weight_index_pairs(SamplerInput([0, 1], [2, 3], []), T1)
    assert [e.weight for e in idx.entries] == [2, 2, 2, 2]
    assert idx.total == 8
    assert idx.measure == PAIR


def test_pair_weight_formula():
    assert pair_weight(bits(A, B, C), 0) == 7
    assert pair_weight(bits(A, B), bits(A, B, C)) == 0
    assert pair_weight(bits(A, B), bits(A)) == 2


def test_pair_subset_records_skipped():
    d = LabeledDataset.from_items([[0], [0, 1], [2]], [0, 1, 1], 3)
    idx = build_weight_index_pairs(SamplerInput([0], [1, 2], []), d)
    assert [e.records for e in idx.entries] == [(0, 2)]


def test_triple_weight_example():
    xp, xn, xc = bits(A, B, C), bits(A), bits(B)
    core_term, straddle = triple_weight(xp, xn, xc)
    # bodies meeting the core {C}: (2^1 - 1) * 2^2
    assert core_term == 4
    # {A, B} escapes {A} and {B} separately without touching C
    assert straddle == 1
    assert core_term + straddle == count_bodies(xp, xn, xc) == 5


def test_triple_zero_core_cases():
    assert triple_weight(bits(A), bits(A, B), bits(C)) == (0, 0)
    assert triple_weight(bits(A, B), bits(A), bits(B)) == (0, 1)
    assert sum(triple_weight(bits(A), 0, 0)) == 1


def test_triple_weight_matches_enumeration():
    rng = random.Random(5)
    for _ in range(500):
        xp, xn, xc = (rng.getrandbits(6) for _ in range(3))
        assert sum(triple_weight(xp, xn, xc)) == count_bodies(xp, xn, xc)
        assert pair_weight(xp, xn) == count_bodies(xp, xn)


def test_triple_requires_negatives_and_covered(T1):
    with pytest.raises(ValueError, match="pair"):
        build_weight_index_triples(SamplerInput([0], [2, 3], []), T1)
    with pytest.raises(ValueError, match="pair"):
        build_weight_index_triples(SamplerInput([0], [], [2]), T1)


def test_pos_required(T1):
    with pytest.raises(ValueError):
        build_weight_index_pairs(SamplerInput([], [2], []), T1)


def test_disjointness_enforced():
    with pytest.raises(ValueError):
        SamplerInput([0, 1], [1], [])


def test_frequency_fallback(T1):
    idx = build_weight_index_pairs(SamplerInput([0, 1], [], []), T1)
    assert idx.measure == FREQUENCY
    assert idx.total == 3 + 3


def test_empty_index_raises():
    d = LabeledDataset.from_items([[0], [0]], [0, 1], 1)
    inp = SamplerInput([0], [1], [])
    idx = build_weight_index_pairs(inp, d)
    assert idx.total == 0
    with pytest.raises(ValueError):
        sample_rules(idx, inp, d, 0, 1)


def test_t1_body_a_probability(T1):
    inp = SamplerInput([0, 1], [2, 3], [])
    exact = exact_sampling_distribution(inp, T1, 0, PAIR)
    assert exact[(bits(A), 0)] == Fraction(1, 4)
    assert exact[(bits(B), 0)] == Fraction(1, 8)
    assert exact[(bits(A, B), 0)] == Fraction(1, 4)
    idx = build_weight_index_pairs(inp, T1)
    draws = draw_bodies(idx, 50_000, random.Random(11))
    assert draws.count(bits(A)) / len(draws) == pytest.approx(0.25, abs=0.01)


def test_single_atom_distribution():
    d = LabeledDataset.from_items([[0], []], [0, 1], 1)
    inp = SamplerInput([0], [1], [], m=50)
    rules = sample_rules(build_weight_index_pairs(inp, d), inp, d, 0, 3)
    assert {r.body.bits for r in rules} == {1}
    assert all(r.head == 0 for r in rules)


@pytest.mark.parametrize("measure", [PAIR, TRIPLE])
def test_distribution_t1_scale(measure):
    rng = random.Random(21)
    checked = 0
    while checked < 5:
        d = random_tiny_dataset(rng)
        inp = random_partition(d, rng, need_all=measure == TRIPLE)
        if inp is None or not (inp.neg or inp.cov):
            continue
        idx = build_weight_index(inp, d, measure)
        if idx.total == 0:
            continue
        counts = body_counts(draw_bodies(idx, 40_000, random.Random(checked)), 0)
        tv = exact_sampling_distribution(inp, d, 0, measure).total_variation(counts)
        assert tv <= 0.03
        checked += 1


def test_sampled_bodies_come_from_their_tuple():
    rng = random.Random(8)
    for _ in range(50):
        d = random_tiny_dataset(rng)
        inp = random_partition(d, rng, need_all=True)
        if inp is None:
            continue
        for measure in (PAIR, TRIPLE):
            idx = build_weight_index(inp, d, measure)
            if not idx.total:
                continue
            r = random.Random(1)
            for _ in range(30):
                x = r.randrange(idx.total)
                k = next(i for i, c in enumerate(idx.cumulative) if x < c)
                e = idx.entries[k]
                body = draw_bodies(type(idx).from_entries([e], measure), 1, r)[0]
                xp, *others = (d.record_bits[i] for i in e.records)
                assert body and body & xp == body
                assert all(body & o != body for o in others)


def test_sampled_rules_cover_an_uncovered_positive():
    rng = random.Random(9)
    for _ in range(30):
        d = random_tiny_dataset(rng)
        inp = random_partition(d, rng)
        if inp is None or not (inp.neg or inp.cov):
            continue
        idx = build_weight_index_pairs(inp, d)
        if not idx.total:
            continue
        pos_mask = sum(1 << i for i in inp.pos)
        for r in sample_rules(idx, SamplerInput(inp.pos, inp.neg, inp.cov, 20), d, 0, 4):
            assert r.cover & pos_mask
            assert measure_value(r.body.bits, inp, d, PAIR) > 0


def test_determinism(T1):
    inp = SamplerInput([0, 1], [2, 3], [], m=100)
    idx = build_weight_index_pairs(inp, T1)
    a = sample_rules(idx, inp, T1, 0, 42)
    b = sample_rules(idx, inp, T1, 0, 42)
    assert [r.key for r in a] == [r.key for r in b]
    assert [r.key for r in a] != [r.key for r in sample_rules(idx, inp, T1, 0, 43)]


def test_wide_records_stay_exact():
    width = 130
    d = LabeledDataset.from_items([list(range(width)), [0]], [0, 1], width)
    inp = SamplerInput([0], [1], [], m=200)
    idx = build_weight_index_pairs(inp, d)
    assert idx.total == (2**129 - 1) * 2
    rules = sample_rules(idx, inp, d, 0, 7)
    assert all(r.body.bits != 1 for r in rules)
    # nearly every body is large: uniform over ~2^130 subsets
    assert sum(len(r.body) for r in rules) / len(rules) == pytest.approx(65, abs=3)


def test_subsample_records():
    assert subsample_records(list(range(10)), 20, 1) == list(range(10))
    got = subsample_records(list(range(1000)), 100, 1)
    assert len(got) == len(set(got)) == 100
    assert got == sorted(got)
    assert subsample_records(list(range(1000)), 100, 1) == got
    with pytest.raises(ValueError):
        subsample_records([1, 2], 0, 1)


def test_subsample_preserves_expected_ratio():
    # E[|D-'| - |D-'(r)|] = cap/|D-| * (|D-| - |D-(r)|)
    n, cap, trials = 40, 10, 4000
    rng = random.Random(3)
    body = 0b11
    neg_bits = [0b11 if rng.random() < 0.35 else 0b01 for _ in range(n)]
    missing = sum(1 for b in neg_bits if b & body != body)
    acc = 0
    for t in range(trials):
        sub = subsample_records(range(n), cap, t)
        acc += sum(1 for i in sub if neg_bits[i] & body != body)
    mean = acc / trials
    expected = cap / n * missing
    # hypergeometric variance bounds the Monte Carlo error well under 0.1
    assert mean == pytest.approx(expected, abs=0.1)
