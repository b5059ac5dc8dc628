import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbridge import (
    NULL,
    Cell,
    Character,
    Logical,
    Null,
    Numeric,
    Record,
    Table,
    Workspace,
    as_bridge_value,
    merge_entries,
    table_from_columns,
    validate,
    validate_workspace,
)
from rbridge.errors import (
    BadColumnKind,
    DuplicateName,
    DuplicatePath,
    InvalidName,
    PrefixConflict,
    RaggedColumns,
)
from rbridge.values import MAX_DEPTH, NA_REAL_BYTES

from conftest import rand_value


# --- validate -----------------------------------------------------------

def test_validate_ok_numeric():
    assert validate(Numeric([2, 3], [1.0] * 6)) == []


def test_validate_dims_product_mismatch():
    out = validate(Numeric([2, 3], [1.0] * 5))
    assert len(out) == 1
    assert "dims product 6 != data length 5" in out[0]


def test_validate_table_column_length():
    t = Table([("x", Numeric([2], [1.0, 2.0]))], nrows=3)
    out = validate(t)
    assert any("columns[0]" in v and "[3]" in v for v in out)


def test_validate_empty_dims_rejected():
    out = validate(Numeric([], []))
    assert any("length >= 1" in v for v in out)


def test_validate_negative_extent():
    assert any("non-negative" in v for v in validate(Numeric([-1], [])))


def test_validate_zero_extent_ok():
    assert validate(Numeric([0], [])) == []
    assert validate(Character([2, 0], [])) == []


def test_validate_record_names():
    r = Record([("ok", NULL), ("2bad", NULL), ("ok", NULL)])
    out = validate(r)
    assert any("2bad" in v for v in out)
    assert any("duplicate" in v for v in out)


def test_validate_paths_point_into_tree():
    w = Workspace([("a", Cell([Numeric([2], [1.0])]))])
    out = validate_workspace(w)
    assert out == ["entries[0].value.elements[0].dims: dims product 2 != data length 1"]


def test_validate_non_value():
    assert any("not a BridgeValue" in v for v in validate(object()))


def test_validate_is_total_over_random_trees():
    rng = random.Random(7)
    for _ in range(200):
        v = rand_value(rng, depth=4, max_elems=10)
        assert validate(v) == []


def test_validate_depth_cap():
    v = Numeric([1], [1.0])
    for _ in range(MAX_DEPTH + 2):
        v = Cell([v])
    out = validate(v)
    assert any("nesting deeper" in s for s in out)


# --- equality semantics ----------------------------------------------------

def test_numeric_nan_equality_is_bitwise():
    a = Numeric([1], [float("nan")])
    b = Numeric([1], [float("nan")])
    assert a == b
    assert Numeric([1], [0.0]) != Numeric([1], [-0.0])


def test_na_bit_pattern_normalizes_to_none():
    import struct

    na = struct.unpack("<d", NA_REAL_BYTES)[0]
    v = Numeric([1], [na])
    assert v.data[0] is None


def test_numeric_rejects_bool_and_str():
    with pytest.raises(TypeError):
        Numeric([1], [True])
    with pytest.raises(TypeError):
        Numeric([1], ["x"])


def test_values_are_immutable_and_hashable():
    v = Numeric([1], [1.0])
    with pytest.raises(Exception):
        v.dims = (2,)
    assert hash(v) == hash(Numeric([1], [1.0]))
    assert hash(Record([("a", v)])) == hash(Record([("a", v)]))


# --- merge_entries ---------------------------------------------------------

def test_merge_single_leaf():
    r = merge_entries([("a", Numeric([1], [1.0]))])
    assert r == Record([("a", Numeric([1], [1.0]))])


def test_merge_nested_tree_matches_hand_construction():
    v1, v2 = Numeric([1], [2.0]), Numeric([1], [0.5])
    got = merge_entries([("fit.coef", v1), ("fit.p", v2)])
    assert got == Record([("fit", Record([("coef", v1), ("p", v2)]))])


def test_merge_prefix_conflict():
    with pytest.raises(PrefixConflict):
        merge_entries([("a", NULL), ("a.b", NULL)])
    with pytest.raises(PrefixConflict):
        merge_entries([("a.b", NULL), ("a", NULL)])


def test_merge_duplicate_path():
    with pytest.raises(DuplicatePath):
        merge_entries([("a.b", NULL), ("a.b", NULL)])


def test_merge_invalid_segment():
    with pytest.raises(InvalidName):
        merge_entries([("a.2x", NULL)])
    with pytest.raises(InvalidName):
        merge_entries([("", NULL)])


def test_merge_sibling_order_is_first_appearance():
    parts = [("b.x", NULL), ("a", NULL), ("b.y", NULL)]
    r = merge_entries(parts)
    assert r.names() == ("b", "a")
    assert r.get("b").names() == ("x", "y")


def _flatten(record, prefix=""):
    """Independent oracle: record tree back to (path, leaf) pairs."""
    out = []
    for name, value in record.entries:
        path = f"{prefix}{name}"
        if isinstance(value, Record):
            out.extend(_flatten(value, path + "."))
        else:
            out.append((path, value))
    return out


_seg = st.text(alphabet="abcd", min_size=1, max_size=3)
_path = st.lists(_seg, min_size=1, max_size=3).map(".".join)


@given(st.dictionaries(_path, st.just(NULL), min_size=0, max_size=6))
def test_merge_flatten_round_trip(d):
    parts = [(p, Numeric([1], [float(i)])) for i, p in enumerate(d)]
    paths = list(d)
    # skip prefix-conflicting draws: a path that is a prefix of another
    for p in paths:
        for q in paths:
            if p != q and q.startswith(p + "."):
                return
    merged = merge_entries(parts)
    assert set(_flatten(merged)) == set(parts)


# --- table_from_columns ---------------------------------------------------

def test_table_from_columns_basic():
    t = table_from_columns(["g"], [Character([2], ["a", "b"])])
    assert t.nrows == 2
    assert validate(t) == []


def test_table_ragged():
    with pytest.raises(RaggedColumns):
        table_from_columns(["a", "b"], [Numeric([3], [1.0] * 3), Numeric([2], [1.0] * 2)])


def test_table_duplicate_name():
    with pytest.raises(DuplicateName):
        table_from_columns(["x", "x"], [Numeric([1], [1.0]), Numeric([1], [2.0])])


def test_table_bad_column_kind():
    with pytest.raises(BadColumnKind):
        table_from_columns(["x"], [Cell([])])
    with pytest.raises(BadColumnKind):
        table_from_columns(["x"], [Numeric([1, 1], [1.0])])


def test_table_invalid_name():
    with pytest.raises(InvalidName):
        table_from_columns(["2x"], [Numeric([1], [1.0])])


def test_table_succeeds_iff_valid():
    rng = random.Random(13)
    for _ in range(100):
        n = rng.randint(0, 3)
        nrows = rng.randint(0, 4)
        names = [f"c{i}" for i in range(n)]
        cols = [Numeric([nrows], [float(j) for j in range(nrows)]) for _ in range(n)]
        t = table_from_columns(names, cols)
        assert validate(t) == []


# --- as_bridge_value ---------------------------------------------------------

def test_scalar_conveniences():
    assert as_bridge_value(1.5) == Numeric([1], [1.5])
    assert as_bridge_value(3) == Numeric([1], [3.0])
    assert as_bridge_value(True) == Logical([1], [True])
    assert as_bridge_value("hi") == Character([1], ["hi"])
    assert as_bridge_value(None) == NULL


def test_list_conveniences():
    assert as_bridge_value([1, 2, None]) == Numeric([3], [1.0, 2.0, None])
    assert as_bridge_value(["a", None]) == Character([2], ["a", None])
    assert as_bridge_value([True, None]) == Logical([2], [True, None])
    assert as_bridge_value([1, "a"]) == Cell([Numeric([1], [1.0]), Character([1], ["a"])])


def test_dict_becomes_record():
    got = as_bridge_value({"a": 1.0, "b": "x"})
    assert got == Record([("a", Numeric([1], [1.0])), ("b", Character([1], ["x"]))])


def test_bridge_values_pass_through():
    v = Table([], 0)
    assert as_bridge_value(v) is v


def test_unrepresentable_type():
    with pytest.raises(TypeError):
        as_bridge_value(object())
