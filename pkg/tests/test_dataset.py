import random

import pytest
from hypothesis import given, strategies as st

from dds.dataset import (MISSING, DatasetError, ItemSet, UniverseMismatch, build_dataset,
                         class_partition, fit_specs, ingest_csv, item_feature, item_offsets,
                         stratified_split)


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_iris_shape(iris):
    assert len(iris) == 150
    assert iris.n_items == 20
    assert len(iris.classes) == 3
    assert all(len(r) == 4 for r in iris.records)


def test_single_categorical_column_one_hot(tmp_path):
    path = write_csv(tmp_path, "x,y\na,0\nb,1\na,1\n")
    d = ingest_csv(path, "y")
    assert d.n_items == 2
    assert all(len(r) == 1 for r in d.records)
    assert d.item_names == ["x=a", "x=b"]


def test_equal_width_edges_zero_to_ten():
    header = ["v", "y"]
    rows = [[str(v), "a" if v % 2 else "b"] for v in range(11)]
    (spec,) = fit_specs(header, rows, "y", n_bins=5)
    assert spec.bin_edges == (2.0, 4.0, 6.0, 8.0)
    assert spec.item_labels()[1] == "v∈[2,4)"
    assert spec.encode("3", "") == 1


def test_equal_width_edges_zero_to_nine():
    # equal width over observed [0, 9]: width 1.8
    header = ["v", "y"]
    rows = [[str(v), "a" if v % 2 else "b"] for v in range(10)]
    (spec,) = fit_specs(header, rows, "y", n_bins=5)
    assert spec.bin_edges == pytest.approx((1.8, 3.6, 5.4, 7.2), abs=1e-12)
    assert spec.encode("3", "") == 1


def test_binning_by_hand_enumeration():
    header = ["v", "y"]
    values = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
    rows = [[str(v), "a"] for v in values] + [["5", "b"]]
    (spec,) = fit_specs(header, rows, "y", n_bins=5)
    expected = {0: 0, 1: 0, 2: 1, 3: 1, 4: 2, 5: 2, 6: 3, 7: 3, 8: 4, 9: 4, 10: 4}
    assert {v: spec.encode(str(v), "") for v in values} == expected


def test_out_of_range_values_clamp():
    header = ["v", "y"]
    rows = [["0", "a"], ["10", "b"]]
    (spec,) = fit_specs(header, rows, "y", n_bins=5)
    assert spec.encode("-100", "") == 0
    assert spec.encode("1e9", "") == 4


def test_missing_values_get_their_own_item(tmp_path):
    path = write_csv(tmp_path, "num,cat,y\n1,a,p\n?,b,q\n3,?,p\n")
    d = ingest_csv(path, "y", n_bins=2, missing_token="?")
    num, cat = d.specs
    assert num.has_missing and num.n_items == 3
    assert cat.categories == ("a", "b", MISSING)
    names = d.item_names
    assert "num=<missing>" in names and "cat=<missing>" in names
    rec1 = [names[j] for j in d.records[1]]
    assert "num=<missing>" in rec1


def test_constant_column_kept_as_one_item(tmp_path):
    path = write_csv(tmp_path, "c,y\n5,a\n5,b\n")
    d = ingest_csv(path, "y")
    assert d.n_items == 1
    assert d.item_names == ["c=5"]


def test_errors(tmp_path):
    with pytest.raises(DatasetError):
        ingest_csv(tmp_path / "absent.csv", "y")
    path = write_csv(tmp_path, "x,y\na,0\n")
    with pytest.raises(DatasetError, match="nope"):
        ingest_csv(path, "nope")
    empty = write_csv(tmp_path, "x,y\n", "empty.csv")
    with pytest.raises(DatasetError):
        ingest_csv(empty, "y")
    with pytest.raises(ValueError):
        ingest_csv(path, "y", n_bins=1)


def test_item_round_trip(iris):
    offsets = item_offsets(iris.specs)
    for item in range(iris.n_items):
        f, local = item_feature(iris.specs, item)
        assert offsets[f] + local == item


def test_binarization_is_label_independent(iris, tmp_path):
    from dds.dataset import iris_path, read_table
    header, rows = read_table(iris_path())
    labels = [r[-1] for r in rows]
    random.Random(0).shuffle(labels)
    shuffled = [r[:-1] + [y] for r, y in zip(rows, labels)]
    d2 = build_dataset(header, shuffled, "class")
    assert d2.records == iris.records


def test_one_bin_item_per_numeric_feature(iris):
    offsets = item_offsets(iris.specs)
    for rec in iris.records:
        for spec, off in zip(iris.specs, offsets):
            inside = [j for j in rec if off <= j < off + spec.n_items]
            assert len(inside) == 1


def test_class_partition(T1, iris):
    assert class_partition(T1, 0) == ([0, 1], [2, 3])
    setosa = iris.classes.index("Iris-setosa")
    pos, neg = class_partition(iris, setosa)
    assert (len(pos), len(neg)) == (50, 100)
    with pytest.raises(ValueError):
        class_partition(T1, 2)


def test_class_partition_all_positive():
    from dds.dataset import LabeledDataset
    d = LabeledDataset.from_items([[0], [0, 1]], [0, 0], 2, classes=["only"])
    assert class_partition(d, 0) == ([0, 1], [])


@given(st.lists(st.integers(0, 5), min_size=1), st.lists(st.integers(0, 5), min_size=1))
def test_itemset_algebra(a, b):
    x, y = ItemSet.from_items(a, 6), ItemSet.from_items(b, 6)
    assert set((x | y).items()) == set(a) | set(b)
    assert set((x & y).items()) == set(a) & set(b)
    assert set((x - y).items()) == set(a) - set(b)
    assert x.issubset(y) == (set(a) <= set(b))
    assert len(x) == len(set(a))


def test_itemset_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        ItemSet(1, 3) | ItemSet(1, 4)


def test_stratified_split_keeps_classes():
    labels = ["a"] * 10 + ["b"] * 5
    train, test = stratified_split(labels, 0.3, seed=1)
    assert sorted(train + test) == list(range(15))
    assert {labels[i] for i in train} == {"a", "b"}
    assert len(test) == 3 + 2
