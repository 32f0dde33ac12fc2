"""
Quality versus diversity
========================

The diversity weight is set from data: 0, the mean, or the max quality of
rules pre-sampled from the full dataset.  Larger weights trade a few more
conditions for rule sets that barely overlap.
"""

# %%
import numpy as np

from dds.dataset import build_dataset, iris_path, label_index, read_table, stratified_split
from dds.metrics import evaluate
from dds.selector import SelectorConfig, fit

header, rows = read_table(iris_path())
target = label_index(header, "class")

print(f"{'mode':7s} {'lambda':>7s} {'rules':>6s} {'conds':>6s} {'bacc':>6s} {'auc':>6s} "
      f"{'div':>6s} {'overlap':>8s}")
for mode in ("none", "perm", "strict"):
    reps, lams = [], []
    for seed in range(3):
        train, test = stratified_split([r[target] for r in rows], 0.3, seed=seed)
        d_train = build_dataset(header, [rows[i] for i in train], "class")
        d_test = build_dataset(header, [rows[i] for i in test], "class",
                               specs=d_train.specs, classes=d_train.classes)
        model, trace = fit(d_train, SelectorConfig(lambda_mode=mode, seed=seed))
        reps.append(evaluate(model, d_test))
        lams.append(trace.lam)
    m = {k: np.mean([getattr(r, k) for r in reps]) for k in reps[0].columns()}
    print(f"{mode:7s} {np.mean(lams):7.3f} {m['n_rules']:6.2f} {m['n_conds']:6.2f} "
          f"{m['bacc']:6.3f} {m['auc']:6.3f} {m['div']:6.3f} {m['overlap']:8.2f}")
