"""Evaluation metrics for rule-set classifiers."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .dataset import LabeledDataset
from .rules import Rule, jaccard

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    n_rules: float
    n_conds: float
    bacc: float
    auc: float
    div: float
    overlap: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def row(self) -> list[str]:
        return [f"{v:g}" if isinstance(v, int) else f"{v:.6g}" for v in asdict(self).values()]

    @classmethod
    def mean(cls, reports: Sequence["EvalReport"]) -> "EvalReport":
        return cls(*(float(np.mean([getattr(r, c) for r in reports])) for c in cls.columns()))


def balanced_accuracy(truth: Sequence[int], pred: Sequence[int]) -> float:
    """Mean per-class recall over the classes present in ``truth``."""
    truth, pred = np.asarray(truth), np.asarray(pred)
    if truth.size == 0:
        raise ValueError("empty input")
    if truth.shape != pred.shape:
        raise ValueError("truth and pred differ in length")
    recalls = [np.mean(pred[truth == c] == c) for c in np.unique(truth)]
    return float(np.mean(recalls))


def binary_auc(is_pos: np.ndarray, scores: np.ndarray) -> float:
    """Mann-Whitney AUC; tied scores count one half."""
    n_pos = int(is_pos.sum())
    n_neg = is_pos.size - n_pos
    ranks = rankdata(scores)
    u = ranks[is_pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def roc_auc_macro(truth: Sequence[int], scores) -> float:
    """Unweighted mean of one-vs-rest AUCs.

    ``scores`` has one column per class.  Classes absent from ``truth`` (or
    with no negatives) are skipped with a warning.
    """
    truth = np.asarray(truth)
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] != truth.size:
        raise ValueError("scores must be an (n_records, n_classes) array")
    aucs = []
    for c in range(scores.shape[1]):
        is_pos = truth == c
        if is_pos.all() or not is_pos.any():
            log.warning("class %d has no positive or no negative examples; skipped", c)
            continue
        aucs.append(binary_auc(is_pos, scores[:, c]))
    if not aucs:
        raise ValueError("no class admits a one-vs-rest AUC")
    return float(np.mean(aucs))


def avg_diversity(rules: Sequence[Rule]) -> float:
    """Mean pairwise Jaccard distance of the rule covers; 1.0 for fewer than two rules."""
    if len(rules) < 2:
        return 1.0
    return float(np.mean([jaccard(a.cover, b.cover) for a, b in combinations(rules, 2)]))


def overlap_count(rules: Sequence[Rule], d: LabeledDataset | None = None) -> int:
    """Records covered by at least two rules."""
    once = twice = 0
    for r in rules:
        twice |= once & r.cover
        once |= r.cover
    return twice.bit_count()


def evaluate(model, d: LabeledDataset) -> EvalReport:
    """Score a :class:`~dds.predictor.RuleSetModel` on ``d``."""
    from .predictor import predict_all, scores_all

    rules = model.rules_on(d)
    n_conds = float(np.mean([len(r.body) for r in rules])) if rules else 0.0
    return EvalReport(
        n_rules=len(rules),
        n_conds=n_conds,
        bacc=balanced_accuracy(d.labels, predict_all(model, d)),
        auc=roc_auc_macro(d.labels, scores_all(model, d)),
        div=avg_diversity(rules),
        overlap=overlap_count(rules, d),
    )
