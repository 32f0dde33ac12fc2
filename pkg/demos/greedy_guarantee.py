"""
Greedy against the exhaustive optimum
=====================================

On small pools the best subset of at most ``k`` rules can be found by
enumeration.  The greedy that maximizes ``q(r)/2 + lambda * sum dist(s, r)``
is guaranteed at least half of that optimum; in practice it is far closer.
"""

# %%
import random

from dds.fixtures import random_tiny_dataset
from dds.oracle import enumerate_rules, exhaustive_best_subset
from dds.rules import QualityParams, objective, quality
from dds.selector import greedy

rng = random.Random(0)
ratios = []
for _ in range(100):
    d = random_tiny_dataset(rng, max_records=8, max_items=4)
    p = QualityParams.from_dataset(d)
    rules = enumerate_rules(d, 0) + enumerate_rules(d, 1)
    pool = rng.sample(rules, min(12, len(rules)))
    k = rng.randint(1, 4)
    lam = max(quality(r, d, p) for r in pool)
    _, opt = exhaustive_best_subset(pool, k, lam, d, p)
    if opt > 0:
        ratios.append(objective(greedy(pool, k, lam, d, p), lam, d, p) / opt)

print(f"{len(ratios)} instances; worst ratio {min(ratios):.3f}, "
      f"mean {sum(ratios) / len(ratios):.3f}, optimal in "
      f"{sum(r > 1 - 1e-12 for r in ratios)} cases")
