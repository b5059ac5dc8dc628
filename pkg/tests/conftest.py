"""Shared fixtures: randomized value generation and live-R detection."""

import random
import string

import pytest

from rbridge import Cell, Character, Logical, Null, Numeric, Record, Table, Workspace
from rbridge.errors import BridgeError
from rbridge.executor import discover_r

_SPECIAL_FLOATS = (0.0, -0.0, 1.0, -1.5, float("inf"), float("-inf"),
                   float("nan"), 1e308, 5e-324, 123456789.25)
_SPECIAL_STRINGS = ("", "a", "hello world", "café", "€☃",
                    "line\nbreak", 'quo"te', "back\\slash", "\U0001f600")


def rand_name(rng: random.Random, taken=(), max_len=8) -> str:
    while True:
        n = rng.randint(1, max_len)
        first = rng.choice(string.ascii_letters)
        rest = "".join(rng.choice(string.ascii_lowercase + string.digits + "._")
                       for _ in range(n - 1))
        name = first + rest
        if name not in taken:
            return name


def _rand_float(rng):
    r = rng.random()
    if r < 0.15:
        return None  # NA
    if r < 0.35:
        return rng.choice(_SPECIAL_FLOATS)
    if r < 0.5:
        return float(rng.randint(-10**9, 10**9))
    return rng.uniform(-1e6, 1e6)


def _rand_string(rng):
    r = rng.random()
    if r < 0.15:
        return None
    if r < 0.6:
        return rng.choice(_SPECIAL_STRINGS)
    return "".join(rng.choice(string.printable[:94]) for _ in range(rng.randint(0, 12)))


def _rand_logical(rng):
    return rng.choice((True, False, None))


def _rand_dims(rng, max_elems):
    if rng.random() < 0.75:
        return (rng.randint(0, max(1, max_elems)),)
    ndims = rng.randint(2, 3)
    cap = max(1, int(max_elems ** (1.0 / ndims)))
    return tuple(rng.randint(0, cap) for _ in range(ndims))


def _prod(dims):
    p = 1
    for d in dims:
        p *= d
    return p


def rand_value(rng: random.Random, depth: int = 5, max_elems: int = 50):
    """One random BridgeValue with nesting depth <= ``depth``."""
    kinds = ["numeric", "logical", "character", "null"]
    if depth > 0:
        kinds += ["cell", "record", "table"]
    kind = rng.choice(kinds)
    if kind == "numeric":
        dims = _rand_dims(rng, max_elems)
        return Numeric(dims, [_rand_float(rng) for _ in range(_prod(dims))])
    if kind == "logical":
        dims = _rand_dims(rng, max_elems)
        return Logical(dims, [_rand_logical(rng) for _ in range(_prod(dims))])
    if kind == "character":
        dims = _rand_dims(rng, max_elems)
        return Character(dims, [_rand_string(rng) for _ in range(_prod(dims))])
    if kind == "null":
        return Null()
    if kind == "cell":
        return Cell([rand_value(rng, depth - 1, max_elems)
                     for _ in range(rng.randint(0, 4))])
    if kind == "record":
        entries, taken = [], set()
        for _ in range(rng.randint(0, 4)):
            name = rand_name(rng, taken)
            taken.add(name)
            entries.append((name, rand_value(rng, depth - 1, max_elems)))
        return Record(entries)
    nrows = rng.randint(0, max(1, max_elems // 4))
    columns, taken = [], set()
    for _ in range(rng.randint(0, 4)):
        name = rand_name(rng, taken)
        taken.add(name)
        ctor = rng.choice((Numeric, Logical, Character))
        gen = {Numeric: _rand_float, Logical: _rand_logical, Character: _rand_string}[ctor]
        columns.append((name, ctor((nrows,), [gen(rng) for _ in range(nrows)])))
    return Table(columns, nrows)


def rand_workspace(rng: random.Random, max_entries: int = 5, depth: int = 5,
                   max_elems: int = 50) -> Workspace:
    entries, taken = [], set()
    for _ in range(rng.randint(0, max_entries)):
        name = rand_name(rng, taken)
        taken.add(name)
        entries.append((name, rand_value(rng, depth, max_elems)))
    return Workspace(entries)


def _find_r():
    try:
        return discover_r()
    except BridgeError:
        return None


@pytest.fixture(scope="session")
def r_info():
    """InterpreterInfo for a real R, or a skip when none is installed."""
    info = _find_r()
    if info is None:
        pytest.skip("no R interpreter discovered on this machine")
    return info


@pytest.fixture(scope="session")
def r_available():
    return _find_r() is not None
