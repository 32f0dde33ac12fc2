"""Greedy diverse rule-set selection over sampled candidates."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import LabeledDataset
from .rules import QualityParams, Rule, cover_quality, jaccard, objective
from .sampler import (PAIR, TRIPLE, SamplerInput, build_weight_index, sample_rules,
                      subsample_records)

log = logging.getLogger(__name__)

DEFAULT_SEED = 20200914
LAMBDA_MODES = ("none", "perm", "strict")


@dataclass(frozen=True)
class SelectorConfig:
    """Hyper-parameters of the selector.

    Parameters
    ----------
    lambda_mode : "none", "perm", "strict" or an explicit non-negative float.
        The modes set the diversity weight to 0, the mean, or the max quality
        of rules pre-sampled from the full dataset.
    m : rules sampled per class per iteration.
    epsilon : minimum marginal recall a new rule must add to its head class.
    k_max : optional hard cap on the number of rules.
    subsample_cap : optional cap on records per partition fed to the sampler.
    seed : master seed; all randomness derives from it.
    measure : "pair" (default) or "triple" sampling measure.
    default_label : "majority" or "underrepresented".
    """

    lambda_mode: str | float = "strict"
    m: int = 200
    epsilon: float = 0.01
    k_max: int | None = None
    subsample_cap: int | None = None
    seed: int = DEFAULT_SEED
    measure: str = PAIR
    default_label: str = "majority"

    def __post_init__(self):
        if isinstance(self.lambda_mode, str):
            if self.lambda_mode not in LAMBDA_MODES:
                raise ValueError(f"lambda_mode must be one of {LAMBDA_MODES} or a number")
        elif not self.lambda_mode >= 0:
            raise ValueError("explicit lambda must be non-negative")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.k_max is not None and self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.subsample_cap is not None and self.subsample_cap < 1:
            raise ValueError("subsample_cap must be at least 1")
        if self.measure not in (PAIR, TRIPLE):
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.default_label not in ("majority", "underrepresented"):
            raise ValueError(f"unknown default label policy {self.default_label!r}")


@dataclass
class TraceStep:
    rule: Rule
    marginal_quality: float
    marginal_diversity: float
    recall_gain: dict[int, float]
    pool_size: int


@dataclass
class SelectionTrace:
    lam: float = 0.0
    steps: list[TraceStep] = field(default_factory=list)
    objective_first: float = 0.0
    objective_second: float = 0.0
    second_rules: list[Rule] = field(default_factory=list)
    pool: list[Rule] = field(default_factory=list)
    chosen: str = "first"

    def to_jsonl(self, d: LabeledDataset) -> str:
        names = d.item_names
        lines = [json.dumps({"event": "lambda", "value": self.lam})]
        for i, s in enumerate(self.steps):
            lines.append(json.dumps({
                "event": "select", "iteration": i,
                "items": [names[j] for j in s.rule.body],
                "head": d.classes[s.rule.head],
                "marginal_quality": s.marginal_quality,
                "marginal_diversity": s.marginal_diversity,
                "recall_gain": {d.classes[y]: g for y, g in s.recall_gain.items()},
                "pool_size": s.pool_size,
            }, ensure_ascii=False))
        lines.append(json.dumps({
            "event": "result", "objective_first": self.objective_first,
            "objective_second": self.objective_second, "chosen": self.chosen,
        }))
        return "\n".join(lines) + "\n"


def subseed(seed: int, *key: int) -> int:
    """Independent 64-bit seed for the stream identified by ``key``."""
    state = np.random.SeedSequence(entropy=seed, spawn_key=key).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


# stream tags for subseed
_PRESAMPLE, _ITERATION, _SUBSAMPLE = 0, 1, 2


def _sample_for_class(d: LabeledDataset, cfg: SelectorConfig, head: int, covered: int,
                      m: int, key: tuple[int, ...]) -> list[Rule]:
    pos, neg, cov = [], [], []
    for i, y in enumerate(d.labels):
        if covered >> i & 1:
            cov.append(i)
        elif y == head:
            pos.append(i)
        else:
            neg.append(i)
    if not pos:
        return []
    if cfg.subsample_cap is not None:
        cap = cfg.subsample_cap
        pos = subsample_records(pos, cap, subseed(cfg.seed, _SUBSAMPLE, *key, 0))
        neg = subsample_records(neg, cap, subseed(cfg.seed, _SUBSAMPLE, *key, 1))
        cov = subsample_records(cov, cap, subseed(cfg.seed, _SUBSAMPLE, *key, 2))
    inp = SamplerInput(pos, neg, cov, m)
    # triples need both negatives and covered records; degrade to pairs otherwise
    measure = cfg.measure if (neg and cov) else PAIR
    idx = build_weight_index(inp, d, measure)
    if idx.total == 0:
        return []
    return sample_rules(idx, inp, d, head, subseed(cfg.seed, *key))


def calibrate_lambda(d: LabeledDataset, cfg: SelectorConfig,
                     p: QualityParams | None = None) -> float:
    """Diversity weight from the config, estimated from a pre-sample if needed."""
    if not isinstance(cfg.lambda_mode, str):
        return float(cfg.lambda_mode)
    if cfg.lambda_mode == "none":
        return 0.0
    if p is None:
        p = QualityParams.from_dataset(d)
    n_cls = len(d.classes)
    qs = []
    for y in range(n_cls):
        m_y = cfg.m // n_cls + (y < cfg.m % n_cls)
        if m_y == 0:
            continue
        rules = _sample_for_class(d, cfg, y, 0, m_y, (_PRESAMPLE, y))
        qs += [cover_quality(r.cover, r.head, d, p) for r in rules]
    return lambda_from_qualities(qs, cfg.lambda_mode)


def lambda_from_qualities(qs: Sequence[float], mode: str) -> float:
    """0, mean or max of pre-sampled qualities for modes none, perm, strict."""
    if mode == "none":
        return 0.0
    if not qs or max(qs) == 0:
        log.warning("every pre-sampled rule has zero quality; using lambda = 0")
        return 0.0
    if mode == "perm":
        return math.fsum(qs) / len(qs)
    if mode == "strict":
        return max(qs)
    raise ValueError(f"unknown lambda mode {mode!r}")


def _lex_body(r: Rule) -> tuple[int, ...]:
    return r.body.items()


def _rank_key(marginal: float, q: float, r: Rule):
    return (-marginal, -q, _lex_body(r), r.head)


class _Greedy:
    """Incremental state for the non-oblivious greedy: ``0.5 * q(r) + lam * Σ dist(s, r)``."""

    def __init__(self, d: LabeledDataset, p: QualityParams, lam: float):
        self.d, self.p, self.lam = d, p, lam
        self._q: dict[tuple[int, int], float] = {}
        self.selected: list[Rule] = []

    def q(self, r: Rule) -> float:
        v = self._q.get(r.key)
        if v is None:
            v = self._q[r.key] = cover_quality(r.cover, r.head, self.d, self.p)
        return v

    def div(self, r: Rule) -> float:
        return math.fsum(jaccard(s.cover, r.cover) for s in self.selected)

    def best(self, pool: Sequence[Rule]) -> tuple[Rule, float, float] | None:
        chosen = {s.key for s in self.selected}
        best = None
        for r in pool:
            if r.key in chosen:
                continue
            q, dv = self.q(r), self.div(r)
            key = _rank_key(0.5 * q + self.lam * dv, q, r)
            if best is None or key < best[0]:
                best = (key, r, q, dv)
        if best is None:
            return None
        return best[1], best[2], best[3]


def greedy_step(s: Sequence[Rule], pool: Sequence[Rule], lam: float, d: LabeledDataset,
                p: QualityParams | None = None) -> Rule:
    """Rule in ``pool`` maximizing the non-oblivious marginal gain over ``s``.

    Ties go to higher quality, then the lexicographically smallest body.
    """
    if not pool:
        raise ValueError("candidate pool is empty")
    g = _Greedy(d, p or QualityParams.from_dataset(d), lam)
    g.selected = list(s)
    found = g.best(pool)
    if found is None:
        raise ValueError("every candidate is already selected")
    return found[0]


def greedy(pool: Sequence[Rule], k: int, lam: float, d: LabeledDataset,
           p: QualityParams | None = None) -> list[Rule]:
    """Run ``k`` greedy steps over a fixed pool."""
    g = _Greedy(d, p or QualityParams.from_dataset(d), lam)
    for _ in range(k):
        found = g.best(pool)
        if found is None:
            break
        g.selected.append(found[0])
    return g.selected


def _dedupe(rules: Sequence[Rule]) -> list[Rule]:
    return list({r.key: r for r in reversed(rules)}.values())[::-1]


def choose_default_label(d: LabeledDataset, rules: Sequence[Rule], policy: str = "majority") -> int:
    """Majority class, or the class whose records the rules recall worst."""
    counts = d.class_counts
    by_size = sorted(range(len(d.classes)), key=lambda y: (-counts[y], y))
    if policy == "majority":
        return by_size[0]
    n_rules = [0] * len(d.classes)
    recalled = [0] * len(d.classes)
    for r in rules:
        n_rules[r.head] += 1
        recalled[r.head] |= r.cover & d.class_masks[r.head]
    shortfall = [1 - recalled[y].bit_count() / counts[y] for y in range(len(d.classes))]
    return min(by_size, key=lambda y: (-shortfall[y], n_rules[y], by_size.index(y)))


def fit(d: LabeledDataset, cfg: SelectorConfig | None = None):
    """Learn a diverse rule set.

    The first run samples fresh candidates every iteration, one batch per
    class, against the records not yet covered; the greedy winner is added
    until no class has a candidate adding at least ``epsilon`` recall, or
    ``k_max`` is reached.  A second greedy run of the same length over every
    candidate ever sampled follows, and the run with the larger objective is
    returned.

    Returns
    -------
    (RuleSetModel, SelectionTrace)
    """
    from .predictor import RuleSetModel

    cfg = cfg or SelectorConfig()
    if len(d.classes) < 2:
        raise ValueError("need at least two classes")
    p = QualityParams.from_dataset(d)
    lam = calibrate_lambda(d, cfg, p)
    trace = SelectionTrace(lam=lam)
    g = _Greedy(d, p, lam)
    pool_all: dict[tuple[int, int], Rule] = {}
    covered = 0
    it = 0
    while cfg.k_max is None or len(g.selected) < cfg.k_max:
        bests, gains = {}, {}
        for y in range(len(d.classes)):
            cands = _dedupe(_sample_for_class(d, cfg, y, covered, cfg.m, (_ITERATION, it, y)))
            for r in cands:
                pool_all.setdefault(r.key, r)
            found = g.best(cands)
            if found is None:
                continue
            r = found[0]
            bests[y] = found
            gains[y] = (r.cover & ~covered & d.class_masks[y]).bit_count() / d.class_counts[y]
        active = [y for y in bests if gains[y] >= cfg.epsilon]
        if not active:
            break
        y = min(active, key=lambda y: _rank_key(0.5 * bests[y][1] + lam * bests[y][2],
                                                bests[y][1], bests[y][0]))
        r, q, dv = bests[y]
        g.selected.append(r)
        covered |= r.cover
        trace.steps.append(TraceStep(r, 0.5 * q, lam * dv, gains, len(pool_all)))
        it += 1

    first = list(g.selected)
    pool = sorted(pool_all.values(), key=lambda r: (_lex_body(r), r.head))
    second = greedy(pool, len(first), lam, d, p)
    f1, f2 = objective(first, lam, d, p), objective(second, lam, d, p)
    trace.objective_first, trace.objective_second = f1, f2
    trace.second_rules, trace.pool = second, pool
    rules = first
    if f1 < f2:
        rules, trace.chosen = second, "second"
    default = choose_default_label(d, rules, cfg.default_label)
    model = RuleSetModel.from_rules(rules, d, default, p=p)
    return model, trace
