"""Installation check: sampler and greedy against brute force on tiny fixtures."""
from __future__ import annotations

import random
from itertools import combinations

from .fixtures import random_partition, random_tiny_dataset, t1
from .oracle import body_counts, exact_sampling_distribution, exhaustive_best_subset
from .rules import QualityParams, Rule, jaccard, objective
from .sampler import (PAIR, TRIPLE, SamplerInput, build_weight_index, draw_bodies)
from .selector import greedy


def _instances(seed: int, count: int, need_all: bool):
    rng = random.Random(seed)
    while count:
        d = random_tiny_dataset(rng)
        inp = random_partition(d, rng, need_all=need_all)
        if inp is not None:
            count -= 1
            yield d, inp


def check_weight_sums(n: int = 50, seed: int = 1) -> tuple[bool, str]:
    for measure, need_all in ((PAIR, False), (TRIPLE, True)):
        for d, inp in _instances(seed, n, need_all):
            if measure == PAIR and not (inp.neg or inp.cov):
                continue
            total = build_weight_index(inp, d, measure).total
            try:
                z = exact_sampling_distribution(inp, d, 0, measure).normalizer
            except ValueError:
                z = 0
            if total != z:
                return False, f"{measure}: index total {total} != measure sum {z}"
    return True, f"{n} instances per measure"


def check_distribution(n_samples: int = 40_000, tol: float = 0.03, seed: int = 2) -> tuple[bool, str]:
    d = t1()
    worst = 0.0
    for measure, inp in ((PAIR, SamplerInput([0, 1], [2, 3], [])),
                         (TRIPLE, SamplerInput([0, 1], [2], [3]))):
        idx = build_weight_index(inp, d, measure)
        counts = body_counts(draw_bodies(idx, n_samples, random.Random(seed)), 0)
        tv = exact_sampling_distribution(inp, d, 0, measure).total_variation(counts)
        worst = max(worst, tv)
    return worst <= tol, f"worst total variation {worst:.4f} (tolerance {tol})"


def check_greedy(n: int = 40, seed: int = 3) -> tuple[bool, str]:
    rng = random.Random(seed)
    worst = float("inf")
    for _ in range(n):
        d = random_tiny_dataset(rng, max_records=8, max_items=5)
        p = QualityParams.from_dataset(d)
        rules = [Rule.build(d.itemset([j for j in range(d.n_items) if b >> j & 1]), h, d)
                 for b in range(1, 1 << d.n_items) for h in (0, 1)]
        pool = rng.sample(rules, min(len(rules), 10))
        k = rng.randint(1, 4)
        lam = rng.choice([0.0, 0.5, 2.0])
        _, opt = exhaustive_best_subset(pool, k, lam, d, p)
        got = objective(greedy(pool, k, lam, d, p), lam, d, p)
        if opt > 0:
            worst = min(worst, got / opt)
            if got < 0.5 * opt - 1e-12:
                return False, f"greedy {got:.4f} < half of optimum {opt:.4f}"
    return True, f"worst greedy/optimum ratio {worst:.3f}"


def check_jaccard(n: int = 2000, seed: int = 4) -> tuple[bool, str]:
    rng = random.Random(seed)
    for _ in range(n):
        a, b, c = (rng.getrandbits(10) for _ in range(3))
        if jaccard(a, b) != jaccard(b, a) or jaccard(a, a) != 0:
            return False, "symmetry or identity violated"
        if jaccard(a, c) > jaccard(a, b) + jaccard(b, c) + 1e-12:
            return False, "triangle inequality violated"
    return True, f"{n} random triples"


def run():
    for name, check in (("weight-sum identity", check_weight_sums),
                        ("sampling distribution", check_distribution),
                        ("greedy 2-approximation", check_greedy),
                        ("jaccard metric", check_jaccard)):
        ok, detail = check()
        yield name, ok, detail
