"""Rule-set classifier and its JSON persistence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import FeatureSpec, ItemSet, LabeledDataset, UniverseMismatch, item_names
from .rules import QualityParams, Rule, cover_bits, cover_quality

FORMAT_VERSION = 1
STRATEGIES = ("most_accurate", "highest_quality", "first_match")


@dataclass(frozen=True)
class ModelRule:
    body: ItemSet
    head: int
    precision: float
    quality: float


@dataclass
class RuleSetModel:
    """Selected rules with their training precision, plus a default label."""

    rules: list[ModelRule]
    default_label: int
    classes: tuple[str, ...]
    specs: tuple[FeatureSpec, ...] = ()
    conflict_strategy: str = "most_accurate"
    class_priors: tuple[float, ...] = ()
    n_items: int = 0
    label_column: str = "class"
    missing_token: str = ""
    _names: list[str] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.conflict_strategy not in STRATEGIES:
            raise ValueError(f"conflict_strategy must be one of {STRATEGIES}")
        if not 0 <= self.default_label < len(self.classes):
            raise ValueError("default label out of range")
        if any(not 0.0 <= r.precision <= 1.0 for r in self.rules):
            raise ValueError("rule precision outside [0, 1]")

    @classmethod
    def from_rules(cls, rules: Sequence[Rule], d: LabeledDataset, default_label: int,
                   conflict_strategy: str = "most_accurate",
                   p: QualityParams | None = None) -> "RuleSetModel":
        p = p or QualityParams.from_dataset(d)
        scored = []
        for r in rules:
            n = r.cover.bit_count()
            prec = (r.cover & d.class_masks[r.head]).bit_count() / n if n else 0.0
            scored.append(ModelRule(r.body, r.head, prec, cover_quality(r.cover, r.head, d, p)))
        return cls(scored, default_label, tuple(d.classes), tuple(d.specs), conflict_strategy,
                   p.class_priors, d.n_items, d.label_column, d.missing_token)

    @property
    def item_names(self) -> list[str]:
        if self._names is None:
            self._names = item_names(self.specs) if self.specs else [
                f"i{j}" for j in range(self.n_items)]
        return self._names

    def rules_on(self, d: LabeledDataset) -> list[Rule]:
        """The model's rules with covers recomputed on ``d``."""
        self._check_width(d.n_items)
        return [Rule(r.body, r.head, cover_bits(r.body.bits, d)) for r in self.rules]

    def describe(self) -> str:
        names = self.item_names
        lines = [
            f"IF {' AND '.join(names[j] for j in r.body)} THEN {self.classes[r.head]}"
            f"  (precision {r.precision:.3f}, quality {r.quality:.4f})"
            for r in self.rules
        ]
        lines.append(f"ELSE {self.classes[self.default_label]}")
        return "\n".join(lines)

    def _check_width(self, width: int) -> None:
        if width != self.n_items:
            raise UniverseMismatch(f"model expects {self.n_items} items, got {width}")

    # ---- persistence

    def to_dict(self) -> dict:
        names = self.item_names
        return {
            "format": FORMAT_VERSION,
            "classes": list(self.classes),
            "default_label": self.default_label,
            "conflict_strategy": self.conflict_strategy,
            "label_column": self.label_column,
            "missing_token": self.missing_token,
            "class_priors": list(self.class_priors),
            "n_items": self.n_items,
            "specs": [s.to_dict() for s in self.specs],
            "rules": [
                {"items": [names[j] for j in r.body], "head": r.head,
                 "precision": r.precision, "quality": r.quality}
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RuleSetModel":
        if obj.get("format") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format {obj.get('format')!r}")
        specs = tuple(FeatureSpec.from_dict(s) for s in obj["specs"])
        n_items = obj["n_items"]
        names = item_names(specs) if specs else [f"i{j}" for j in range(n_items)]
        if len(names) != n_items:
            raise ValueError("specs disagree with n_items")
        lookup = {n: j for j, n in enumerate(names)}
        rules = [
            ModelRule(ItemSet.from_items((lookup[n] for n in r["items"]), n_items),
                      r["head"], r["precision"], r["quality"])
            for r in obj["rules"]
        ]
        return cls(rules, obj["default_label"], tuple(obj["classes"]), specs,
                   obj["conflict_strategy"], tuple(obj["class_priors"]), n_items,
                   obj["label_column"], obj["missing_token"])

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RuleSetModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def covering_rules(model: RuleSetModel, x: ItemSet) -> list[int]:
    """Indices of the model rules whose body is contained in ``x``."""
    model._check_width(x.width)
    bits = x.bits
    return [k for k, r in enumerate(model.rules) if r.body.bits & bits == r.body.bits]


def _winner(model: RuleSetModel, hits: list[int]) -> int:
    if model.conflict_strategy == "first_match":
        return hits[0]
    rules = model.rules
    if model.conflict_strategy == "most_accurate":
        key = lambda k: (-rules[k].precision, -rules[k].quality, k)  # noqa: E731
    else:
        key = lambda k: (-rules[k].quality, -rules[k].precision, k)  # noqa: E731
    return min(hits, key=key)


def predict(model: RuleSetModel, x: ItemSet) -> int:
    """Head of the covering rule chosen by the conflict strategy, else the default label."""
    hits = covering_rules(model, x)
    if not hits:
        return model.default_label
    return model.rules[_winner(model, hits)].head


def predict_scores(model: RuleSetModel, x: ItemSet) -> np.ndarray:
    """Per-class scores: best covering-rule precision per class, normalized.

    Records no rule covers get the training class priors.
    """
    hits = covering_rules(model, x)
    scores = np.zeros(len(model.classes))
    for k in hits:
        r = model.rules[k]
        scores[r.head] = max(scores[r.head], r.precision)
    total = scores.sum()
    if total <= 0:
        return np.asarray(model.class_priors, dtype=float)
    return scores / total


def predict_all(model: RuleSetModel, d: LabeledDataset) -> list[int]:
    return [predict(model, x) for x in d.records]


def scores_all(model: RuleSetModel, d: LabeledDataset) -> np.ndarray:
    return np.vstack([predict_scores(model, x) for x in d.records])
