"""Tabular ingestion and binarization into item bitsets.

Every record becomes an :class:`ItemSet`, a fixed-width bitset over the
binary features ("items") produced by binarization.  Numeric columns are cut
into equal-width bins over the observed range, categorical columns are
one-hot encoded, and missing cells map to a dedicated per-feature item.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from functools import cached_property
from bisect import bisect_right
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"
MISSING = "<missing>"


class DatasetError(ValueError):
    """Raised for unusable input tables (missing file, column, or rows)."""


class UniverseMismatch(ValueError):
    """Raised when two itemsets (or an itemset and a dataset) disagree on width."""


@dataclass(frozen=True)
class ItemSet:
    """Bitset over a universe of ``width`` items; bit ``i`` set means item ``i`` present."""

    bits: int
    width: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(f"bits {self.bits:#x} do not fit in width {self.width}")

    @classmethod
    def from_items(cls, items: Iterable[int], width: int) -> "ItemSet":
        bits = 0
        for i in items:
            if not 0 <= i < width:
                raise ValueError(f"item {i} outside universe of size {width}")
            bits |= 1 << i
        return cls(bits, width)

    def _check(self, other: "ItemSet") -> None:
        if self.width != other.width:
            raise UniverseMismatch(f"item universes differ: {self.width} vs {other.width}")

    def __or__(self, other: "ItemSet") -> "ItemSet":
        self._check(other)
        return ItemSet(self.bits | other.bits, self.width)

    def __and__(self, other: "ItemSet") -> "ItemSet":
        self._check(other)
        return ItemSet(self.bits & other.bits, self.width)

    def __sub__(self, other: "ItemSet") -> "ItemSet":
        self._check(other)
        return ItemSet(self.bits & ~other.bits, self.width)

    def issubset(self, other: "ItemSet") -> bool:
        self._check(other)
        return self.bits & other.bits == self.bits

    __le__ = issubset

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, item: int) -> bool:
        return 0 <= item < self.width and bool(self.bits >> item & 1)

    def items(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.bits))


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the positions of set bits in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class FeatureSpec:
    """Binarization recipe for one input column.

    Numeric features own ``len(bin_edges) + 1`` bin items, plus one missing
    item when ``has_missing``.  Categorical features own one item per entry
    of ``categories``; the :data:`MISSING` sentinel is one of them when the
    column had missing cells.
    """

    name: str
    kind: str
    bin_edges: tuple[float, ...] = ()
    categories: tuple[str, ...] = ()
    bounds: tuple[float, float] | None = None
    has_missing: bool = False

    def __post_init__(self):
        if self.kind == NUMERIC:
            if any(a >= b for a, b in zip(self.bin_edges, self.bin_edges[1:])):
                raise ValueError(f"bin edges of {self.name!r} are not strictly ascending")
            if self.bounds is None:
                raise ValueError(f"numeric feature {self.name!r} needs observed bounds")
        elif self.kind == CATEGORICAL:
            if not self.categories or len(set(self.categories)) != len(self.categories):
                raise ValueError(f"categories of {self.name!r} must be non-empty and unique")
        else:
            raise ValueError(f"unknown feature kind {self.kind!r}")

    @property
    def n_items(self) -> int:
        if self.kind == NUMERIC:
            return len(self.bin_edges) + 1 + int(self.has_missing)
        return len(self.categories)

    def item_labels(self) -> list[str]:
        if self.kind == CATEGORICAL:
            return [f"{self.name}={c}" for c in self.categories]
        lo, hi = self.bounds
        if not self.bin_edges:
            labels = [f"{self.name}={_fmt(lo)}"]
        else:
            cuts = [lo, *self.bin_edges, hi]
            labels = [
                f"{self.name}∈[{_fmt(a)},{_fmt(b)}{']' if j == len(cuts) - 2 else ')'}"
                for j, (a, b) in enumerate(zip(cuts, cuts[1:]))
            ]
        if self.has_missing:
            labels.append(f"{self.name}={MISSING}")
        return labels

    def encode(self, value: str, missing_token: str) -> int | None:
        """Offset of the item ``value`` maps to, or None if it maps to no item.

        Numeric values outside the training range clamp to the outer bins;
        unseen categories and unexpected missing cells set no item.
        """
        if self.kind == CATEGORICAL:
            key = MISSING if value == missing_token else value
            try:
                return self.categories.index(key)
            except ValueError:
                return None
        x = _parse_float(value) if value != missing_token else None
        if x is None:
            return len(self.bin_edges) + 1 if self.has_missing else None
        return bisect_right(self.bin_edges, x)

    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        if self.kind == NUMERIC:
            out.update(bin_edges=list(self.bin_edges), bounds=list(self.bounds),
                       has_missing=self.has_missing)
        else:
            out["categories"] = list(self.categories)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "FeatureSpec":
        if obj["kind"] == NUMERIC:
            return cls(obj["name"], NUMERIC, bin_edges=tuple(obj["bin_edges"]),
                       bounds=tuple(obj["bounds"]), has_missing=obj["has_missing"])
        return cls(obj["name"], CATEGORICAL, categories=tuple(obj["categories"]))


def _fmt(x: float) -> str:
    return np.format_float_positional(x, precision=4, trim="-")


def _parse_float(value: str) -> float | None:
    try:
        x = float(value)
    except ValueError:
        return None
    return x if np.isfinite(x) else None


def item_names(specs: Sequence[FeatureSpec]) -> list[str]:
    """Human-readable name of every item, in item-id order."""
    names = [label for spec in specs for label in spec.item_labels()]
    if len(set(names)) != len(names):
        # rounding in the labels collided; fall back to positional suffixes
        names = [f"{n}#{i}" for i, n in enumerate(names)]
    return names


def item_offsets(specs: Sequence[FeatureSpec]) -> list[int]:
    offsets, total = [], 0
    for spec in specs:
        offsets.append(total)
        total += spec.n_items
    return offsets


def item_feature(specs: Sequence[FeatureSpec], item: int) -> tuple[int, int]:
    """Map an item id back to ``(feature index, local offset)``."""
    offsets = item_offsets(specs)
    f = bisect_right(offsets, item) - 1
    if f < 0 or item - offsets[f] >= specs[f].n_items:
        raise IndexError(f"item {item} outside the universe")
    return f, item - offsets[f]


@dataclass(frozen=True)
class LabeledDataset:
    """Binarized records with integer class labels.

    ``labels[i]`` indexes into ``classes``.  Derived bitmask views
    (per-record item bits, per-item record covers, per-class record masks)
    are computed once on first use.
    """

    records: tuple[ItemSet, ...]
    labels: tuple[int, ...]
    classes: tuple[str, ...]
    specs: tuple[FeatureSpec, ...] = ()
    missing_token: str = ""
    label_column: str = "class"
    _n_items: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.records) != len(self.labels):
            raise DatasetError("records and labels differ in length")
        if not self.records:
            raise DatasetError("dataset is empty")
        seen = set(self.labels)
        if any(not 0 <= y < len(self.classes) for y in seen):
            raise DatasetError("label id out of range")
        if len(seen) != len(self.classes):
            missing = [c for y, c in enumerate(self.classes) if y not in seen]
            raise DatasetError(f"classes without records: {missing}")
        widths = {r.width for r in self.records}
        if len(widths) != 1:
            raise UniverseMismatch("records span different item universes")

    @property
    def n_items(self) -> int:
        return self.records[0].width

    def __len__(self) -> int:
        return len(self.records)

    @cached_property
    def record_bits(self) -> list[int]:
        return [r.bits for r in self.records]

    @cached_property
    def item_covers(self) -> list[int]:
        """``item_covers[j]`` is the record mask of records containing item ``j``."""
        covers = [0] * self.n_items
        for i, bits in enumerate(self.record_bits):
            for j in iter_bits(bits):
                covers[j] |= 1 << i
        return covers

    @cached_property
    def class_masks(self) -> list[int]:
        masks = [0] * len(self.classes)
        for i, y in enumerate(self.labels):
            masks[y] |= 1 << i
        return masks

    @cached_property
    def class_counts(self) -> list[int]:
        return [m.bit_count() for m in self.class_masks]

    @property
    def full_mask(self) -> int:
        return (1 << len(self.records)) - 1

    @cached_property
    def item_names(self) -> list[str]:
        if self.specs:
            return item_names(self.specs)
        return [f"i{j}" for j in range(self.n_items)]

    def itemset(self, items: Iterable[int]) -> ItemSet:
        return ItemSet.from_items(items, self.n_items)

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        """Records at ``indices``; every class must still be represented."""
        return LabeledDataset(
            tuple(self.records[i] for i in indices),
            tuple(self.labels[i] for i in indices),
            self.classes, self.specs, self.missing_token, self.label_column,
        )

    @classmethod
    def from_items(cls, transactions: Sequence[Iterable[int]], labels: Sequence[int],
                   n_items: int, classes: Sequence[str] | None = None) -> "LabeledDataset":
        """Build a dataset directly from item-id lists (no binarization metadata)."""
        if classes is None:
            classes = [str(y) for y in range(max(labels) + 1)]
        recs = tuple(ItemSet.from_items(t, n_items) for t in transactions)
        return cls(recs, tuple(labels), tuple(classes))


# --------------------------------------------------------------------------
# CSV handling


def read_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read a UTF-8 CSV with a header row."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise DatasetError(f"{path} has no header row")
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise DatasetError(f"{path}: row {k + 2} has {len(row)} cells, header has {len(header)}")
    return header, rows


def label_index(header: Sequence[str], label_column: str) -> int:
    try:
        return list(header).index(label_column)
    except ValueError:
        raise DatasetError(f"label column {label_column!r} not found in header") from None


def fit_specs(header: Sequence[str], rows: Sequence[Sequence[str]], label_column: str,
              n_bins: int = 5, missing_token: str = "") -> tuple[FeatureSpec, ...]:
    """Learn binarization specs for every non-label column from ``rows``."""
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    target = label_index(header, label_column)
    specs = []
    for c, name in enumerate(header):
        if c == target:
            continue
        values = [row[c] for row in rows]
        present = [v for v in values if v != missing_token]
        has_missing = len(present) < len(values)
        numbers = [_parse_float(v) for v in present]
        if present and all(x is not None for x in numbers):
            lo, hi = min(numbers), max(numbers)
            edges = tuple(float(e) for e in np.linspace(lo, hi, n_bins + 1)[1:-1]) if lo < hi else ()
            specs.append(FeatureSpec(name, NUMERIC, bin_edges=edges, bounds=(lo, hi),
                                     has_missing=has_missing))
        else:
            cats = sorted(set(present))
            if has_missing:
                cats.append(MISSING)
            specs.append(FeatureSpec(name, CATEGORICAL, categories=tuple(cats)))
    return tuple(specs)


def encode_row(specs: Sequence[FeatureSpec], cells: Sequence[str], missing_token: str,
               offsets: Sequence[int] | None = None) -> int:
    """Item bits of one row; ``cells`` holds the feature cells in spec order."""
    if offsets is None:
        offsets = item_offsets(specs)
    bits = 0
    for spec, off, value in zip(specs, offsets, cells):
        j = spec.encode(value, missing_token)
        if j is not None:
            bits |= 1 << (off + j)
    return bits


class Encoder:
    """Maps raw CSV rows onto the item universe described by ``specs``."""

    def __init__(self, specs: Sequence[FeatureSpec], header: Sequence[str],
                 missing_token: str = ""):
        self.specs = tuple(specs)
        self.missing_token = missing_token
        self.width = sum(s.n_items for s in self.specs)
        self._offsets = item_offsets(self.specs)
        try:
            self._columns = [list(header).index(s.name) for s in self.specs]
        except ValueError:
            absent = [s.name for s in self.specs if s.name not in header]
            raise DatasetError(f"columns missing from input: {absent}") from None

    def __call__(self, row: Sequence[str]) -> ItemSet:
        cells = [row[c] for c in self._columns]
        return ItemSet(encode_row(self.specs, cells, self.missing_token, self._offsets),
                       self.width)


def build_dataset(header: Sequence[str], rows: Sequence[Sequence[str]], label_column: str,
                  n_bins: int = 5, missing_token: str = "",
                  specs: Sequence[FeatureSpec] | None = None,
                  classes: Sequence[str] | None = None) -> LabeledDataset:
    """Binarize ``rows``; specs and classes are learned from them unless given."""
    target = label_index(header, label_column)
    if not rows:
        raise DatasetError("dataset has no rows")
    if specs is None:
        specs = fit_specs(header, rows, label_column, n_bins, missing_token)
    if classes is None:
        classes = sorted({row[target] for row in rows})
    class_id = {c: y for y, c in enumerate(classes)}
    encode = Encoder(specs, header, missing_token)
    try:
        labels = tuple(class_id[row[target]] for row in rows)
    except KeyError as exc:
        raise DatasetError(f"unknown class {exc.args[0]!r}") from None
    records = tuple(encode(row) for row in rows)
    return LabeledDataset(records, labels, tuple(classes), tuple(specs),
                          missing_token, label_column)


def ingest_csv(path: str | Path, label_column: str, n_bins: int = 5,
               missing_token: str = "") -> LabeledDataset:
    """Read and binarize a CSV file.

    Parameters
    ----------
    path : path to a UTF-8, comma-separated file with a header row.
    label_column : name of the class column.
    n_bins : number of equal-width bins per numeric column (at least 2).
    missing_token : cell value treated as missing.
    """
    header, rows = read_table(path)
    return build_dataset(header, rows, label_column, n_bins, missing_token)


def class_partition(d: LabeledDataset, positive: int) -> tuple[list[int], list[int]]:
    """One-vs-rest split of record indices."""
    if not 0 <= positive < len(d.classes):
        raise ValueError(f"class id {positive} out of range")
    pos = [i for i, y in enumerate(d.labels) if y == positive]
    neg = [i for i, y in enumerate(d.labels) if y != positive]
    return pos, neg


def stratified_split(labels: Sequence, test_fraction: float,
                     seed: int) -> tuple[list[int], list[int]]:
    """Seeded per-class shuffle split; each class keeps at least one training row."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    rng = random.Random(seed)
    by_class: dict = {}
    for i, y in enumerate(labels):
        by_class.setdefault(y, []).append(i)
    train, test = [], []
    for y in sorted(by_class, key=str):
        idx = by_class[y]
        rng.shuffle(idx)
        n_test = min(round(len(idx) * test_fraction), len(idx) - 1)
        test += idx[:n_test]
        train += idx[n_test:]
    return sorted(train), sorted(test)


def iris_path() -> Path:
    """Location of the bundled 150-row iris table."""
    return Path(str(resources.files("dds") / "data" / "iris.csv"))


def load_iris(n_bins: int = 5) -> LabeledDataset:
    return ingest_csv(iris_path(), "class", n_bins)
