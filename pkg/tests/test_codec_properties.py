"""Property-based round-trip coverage of the codec."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from rbridge import Cell, Character, Logical, Null, Numeric, Record, Table, Workspace
from rbridge import codec
from rbridge.rlang import validate_r_name

from conftest import rand_workspace

names = st.from_regex(r"[a-z][a-z0-9._]{0,5}", fullmatch=True).filter(validate_r_name)

floats = st.one_of(
    st.none(),
    st.floats(allow_nan=True, allow_infinity=True),
)
strings = st.one_of(st.none(), st.text(max_size=8))
logicals = st.one_of(st.none(), st.booleans())


def vector(elem):
    return st.lists(elem, max_size=6).map(lambda xs: (len(xs), xs))


def _array(ctor, elem):
    def build(t):
        n, xs = t
        return ctor((n,), xs)
    return vector(elem).map(build)


def matrix(ctor, elem):
    def build(draw_t):
        (r, c), xs = draw_t
        return ctor((r, c), xs)
    dims = st.tuples(st.integers(0, 3), st.integers(0, 3))
    return dims.flatmap(
        lambda rc: st.lists(elem, min_size=rc[0] * rc[1], max_size=rc[0] * rc[1]).map(
            lambda xs: ((rc[0], rc[1]), xs)
        )
    ).map(build)


arrays = st.one_of(
    _array(Numeric, floats),
    _array(Logical, logicals),
    _array(Character, strings),
    matrix(Numeric, floats),
)


@st.composite
def table_values(draw):
    nrows = draw(st.integers(0, 4))
    ncols = draw(st.integers(0, 3))
    used = set()
    cols = []
    for _ in range(ncols):
        name = draw(names.filter(lambda n: n not in used))
        used.add(name)
        kind = draw(st.sampled_from(["num", "log", "chr"]))
        if kind == "num":
            col = Numeric((nrows,), draw(st.lists(floats, min_size=nrows, max_size=nrows)))
        elif kind == "log":
            col = Logical((nrows,), draw(st.lists(logicals, min_size=nrows, max_size=nrows)))
        else:
            col = Character((nrows,), draw(st.lists(strings, min_size=nrows, max_size=nrows)))
        cols.append((name, col))
    return Table(cols, nrows)


@st.composite
def records(draw, inner):
    used = set()
    entries = []
    for _ in range(draw(st.integers(0, 3))):
        name = draw(names.filter(lambda n: n not in used))
        used.add(name)
        entries.append((name, draw(inner)))
    return Record(entries)


values = st.recursive(
    st.one_of(arrays, st.just(Null()), table_values()),
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(Cell),
        records(inner),
    ),
    max_leaves=8,
)


@st.composite
def workspaces(draw):
    used = set()
    entries = []
    for _ in range(draw(st.integers(0, 4))):
        name = draw(names.filter(lambda n: n not in used))
        used.add(name)
        entries.append((name, draw(values)))
    return Workspace(entries)


@given(workspaces())
@settings(max_examples=150, deadline=None)
def test_decode_encode_round_trip(w):
    encoded = codec.encode(w)
    decoded, warnings = codec.decode(encoded)
    assert decoded == w
    assert warnings == []


@given(workspaces())
@settings(max_examples=100, deadline=None)
def test_encode_decode_encode_is_canonical(w):
    b = codec.encode(w)
    assert codec.encode(codec.decode(b)[0]) == b


def test_round_trip_seeded_generator_agrees():
    rng = random.Random(42)
    for _ in range(100):
        w = rand_workspace(rng, max_entries=4, depth=3, max_elems=30)
        assert codec.decode(codec.encode(w))[0] == w
