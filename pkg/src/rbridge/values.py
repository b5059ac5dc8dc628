"""The closed algebra of values exchangeable between the host and R.

Seven kinds: Numeric, Logical, Character (N-dimensional arrays), Cell
(ordered unnamed container), Record (ordered named container), Table
(column-oriented frame), and Null. Everything is immutable after
construction and safe to share across threads.

Missing data: a Numeric element is ``None`` for NA (R's real NA is a
specific NaN bit pattern; constructing a float with exactly that pattern
normalizes to ``None``). Logical elements are ``True | False | None`` and
Character elements are ``str | None``.

Numeric equality is bitwise: two arrays are equal iff their IEEE-754
payloads match, so NaNs compare equal to themselves and -0.0 != 0.0.
R integers are widened to doubles on import; values above 2**53 lose
precision.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import (
    BadColumnKind,
    DuplicateName,
    DuplicatePath,
    InvalidName,
    PrefixConflict,
    RaggedColumns,
)
from .rlang import validate_r_name

# R's NA_real_: a NaN with low word 1954, preserved verbatim on the wire.
NA_REAL_BYTES = b"\xa2\x07\x00\x00\x00\x00\xf0\x7f"

# Containers deeper than this are rejected by validate()/the codec so that
# crafted inputs cannot blow the interpreter stack.
MAX_DEPTH = 100


def _pack_double(x: float) -> bytes:
    return struct.pack("<d", x)


def _coerce_numeric_elem(x):
    if x is None:
        return None
    if isinstance(x, bool):
        raise TypeError("logical value in numeric data; use Logical")
    if isinstance(x, (int, float)):
        f = float(x)
        if math.isnan(f) and _pack_double(f) == NA_REAL_BYTES:
            return None
        return f
    raise TypeError(f"numeric data element must be float, int or None, got {type(x).__name__}")


def _coerce_logical_elem(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, int) and x in (0, 1):
        return bool(x)
    raise TypeError(f"logical data element must be bool or None, got {type(x).__name__}")


def _coerce_character_elem(x):
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"character data element must be str or None, got {type(x).__name__}")


def _coerce_dims(dims) -> tuple:
    out = []
    for d in dims:
        if isinstance(d, bool) or not isinstance(d, int):
            raise TypeError(f"dimension extents must be ints, got {type(d).__name__}")
        out.append(d)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Numeric:
    """N-dimensional array of 64-bit floats, row-major; None marks NA."""

    dims: tuple
    data: tuple

    def __init__(self, dims: Sequence[int], data: Sequence):
        object.__setattr__(self, "dims", _coerce_dims(dims))
        object.__setattr__(self, "data", tuple(_coerce_numeric_elem(x) for x in data))

    def _key(self):
        return (self.dims, tuple(None if x is None else _pack_double(x) for x in self.data))

    def __eq__(self, other):
        return isinstance(other, Numeric) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Numeric(dims={list(self.dims)}, data={list(self.data)})"


@dataclass(frozen=True)
class Logical:
    """N-dimensional tri-state array: True, False, or None for NA."""

    dims: tuple
    data: tuple

    def __init__(self, dims: Sequence[int], data: Sequence):
        object.__setattr__(self, "dims", _coerce_dims(dims))
        object.__setattr__(self, "data", tuple(_coerce_logical_elem(x) for x in data))


@dataclass(frozen=True)
class Character:
    """N-dimensional array of UTF-8 strings; None marks NA."""

    dims: tuple
    data: tuple

    def __init__(self, dims: Sequence[int], data: Sequence):
        object.__setattr__(self, "dims", _coerce_dims(dims))
        object.__setattr__(self, "data", tuple(_coerce_character_elem(x) for x in data))


@dataclass(frozen=True)
class Cell:
    """Ordered, unnamed, heterogeneous container (maps to an unnamed R list)."""

    elements: tuple

    def __init__(self, elements: Iterable = ()):
        object.__setattr__(self, "elements", tuple(elements))


@dataclass(frozen=True)
class Record:
    """Ordered (name, value) container (maps to a fully named R list)."""

    entries: tuple

    def __init__(self, entries=()):
        if isinstance(entries, dict):
            entries = entries.items()
        object.__setattr__(self, "entries", tuple((n, v) for n, v in entries))

    def names(self):
        return tuple(n for n, _ in self.entries)

    def get(self, name, default=None):
        for n, v in self.entries:
            if n == name:
                return v
        return default


@dataclass(frozen=True)
class Table:
    """Column-oriented frame: named vector columns of a common length."""

    columns: tuple
    nrows: int

    def __init__(self, columns=(), nrows: int = 0):
        if isinstance(columns, dict):
            columns = columns.items()
        object.__setattr__(self, "columns", tuple((n, v) for n, v in columns))
        object.__setattr__(self, "nrows", nrows)

    def names(self):
        return tuple(n for n, _ in self.columns)


@dataclass(frozen=True)
class Null:
    """R's NULL."""


NULL = Null()

BridgeValue = Union[Numeric, Logical, Character, Cell, Record, Table, Null]

_ARRAY_KINDS = (Numeric, Logical, Character)
_VECTOR_COLUMN_KINDS = (Numeric, Logical, Character)


@dataclass(frozen=True)
class Workspace:
    """Ordered name -> BridgeValue map; the unit of (de)serialization."""

    entries: tuple = field(default=())

    def __init__(self, entries=()):
        if isinstance(entries, dict):
            entries = entries.items()
        object.__setattr__(self, "entries", tuple((n, v) for n, v in entries))

    def names(self):
        return tuple(n for n, _ in self.entries)

    def get(self, name, default=None):
        for n, v in self.entries:
            if n == name:
                return v
        return default

    def set(self, name: str, value) -> "Workspace":
        """Return a workspace with ``name`` bound to ``value`` (replacing)."""
        out = [(n, v) for n, v in self.entries if n != name]
        out.append((name, value))
        return Workspace(out)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


# --- validation ------------------------------------------------------------

def _dims_product(dims) -> int:
    p = 1
    for d in dims:
        p *= d
    return p


def _check_array(v, path, out):
    if len(v.dims) < 1:
        out.append(f"{path}.dims: dims list must have length >= 1")
        return
    if any(d < 0 for d in v.dims):
        out.append(f"{path}.dims: extents must be non-negative")
        return
    p = _dims_product(v.dims)
    if p != len(v.data):
        out.append(f"{path}.dims: dims product {p} != data length {len(v.data)}")


def _check_names(names, path, out, *, what="entry"):
    seen = set()
    for i, n in enumerate(names):
        if not isinstance(n, str) or not n:
            out.append(f"{path}[{i}].name: {what} name must be a non-empty string")
            continue
        if not validate_r_name(n):
            out.append(f"{path}[{i}].name: {n!r} is not a valid R name")
        if n in seen:
            out.append(f"{path}[{i}].name: duplicate {what} name {n!r}")
        seen.add(n)


def _validate_into(v, path, out, depth):
    if depth > MAX_DEPTH:
        out.append(f"{path}: nesting deeper than {MAX_DEPTH}")
        return
    if isinstance(v, _ARRAY_KINDS):
        _check_array(v, path, out)
    elif isinstance(v, Cell):
        for i, e in enumerate(v.elements):
            _validate_into(e, f"{path}.elements[{i}]", out, depth + 1)
    elif isinstance(v, Record):
        _check_names(v.names(), f"{path}.entries", out)
        for i, (_, e) in enumerate(v.entries):
            _validate_into(e, f"{path}.entries[{i}].value", out, depth + 1)
    elif isinstance(v, Table):
        if v.nrows < 0:
            out.append(f"{path}.nrows: must be non-negative")
        _check_names(v.names(), f"{path}.columns", out, what="column")
        for i, (_, col) in enumerate(v.columns):
            cpath = f"{path}.columns[{i}].values"
            if not isinstance(col, _VECTOR_COLUMN_KINDS):
                out.append(f"{cpath}: column must be Numeric, Logical or Character")
                continue
            _check_array(col, cpath, out)
            if col.dims != (v.nrows,):
                out.append(f"{cpath}.dims: column dims {list(col.dims)} != [{v.nrows}]")
    elif isinstance(v, Null):
        pass
    else:
        out.append(f"{path}: not a BridgeValue ({type(v).__name__})")


def validate(v) -> list:
    """Check all value-model invariants; returns violations ([] means ok).

    Total: never raises, any input yields a (possibly empty) violation list.
    """
    out: list = []
    _validate_into(v, "value", out, 0)
    return out


def validate_workspace(w) -> list:
    """Validate a Workspace: name rules plus every value, recursively."""
    out: list = []
    if not isinstance(w, Workspace):
        return [f"entries: not a Workspace ({type(w).__name__})"]
    _check_names(w.names(), "entries", out)
    for i, (_, v) in enumerate(w.entries):
        _validate_into(v, f"entries[{i}].value", out, 0)
    return out


# --- element-wise export merge ----------------------------------------------

def merge_entries(parts) -> Record:
    """Combine (dotted path, value) leaves into a Record tree.

    Sibling order follows first appearance of each path segment. '.' is
    always a separator, so every segment must itself be a valid R name.
    """
    root: dict = {}
    for path, value in parts:
        if not isinstance(path, str) or not path:
            raise InvalidName(f"empty merge path {path!r}")
        segs = path.split(".")
        if not all(validate_r_name(s) for s in segs):
            raise InvalidName(f"merge path {path!r} has an invalid segment")
        node = root
        for i, seg in enumerate(segs[:-1]):
            child = node.get(seg)
            if child is None:
                child = {}
                node[seg] = child
            elif not isinstance(child, dict):
                prefix = ".".join(segs[: i + 1])
                raise PrefixConflict(f"path {path!r} descends through leaf {prefix!r}")
            node = child
        leaf = segs[-1]
        if leaf in node:
            if isinstance(node[leaf], dict):
                raise PrefixConflict(f"path {path!r} is an interior node of another path")
            raise DuplicatePath(f"path {path!r} given twice")
        node[leaf] = value

    def build(d: dict) -> Record:
        return Record([(k, build(v) if isinstance(v, dict) else v) for k, v in d.items()])

    return build(root)


# --- table construction ------------------------------------------------------

def table_from_columns(names: Sequence[str], columns: Sequence) -> Table:
    """Build a Table from parallel name/column sequences, validating shape."""
    names = list(names)
    columns = list(columns)
    if len(names) != len(columns):
        raise RaggedColumns(f"{len(names)} names for {len(columns)} columns")
    seen = set()
    for n in names:
        if not isinstance(n, str) or not validate_r_name(n):
            raise InvalidName(f"column name {n!r} is not a valid R name")
        if n in seen:
            raise DuplicateName(f"duplicate column name {n!r}")
        seen.add(n)
    lengths = []
    for n, col in zip(names, columns):
        if not isinstance(col, _VECTOR_COLUMN_KINDS):
            raise BadColumnKind(f"column {n!r} must be Numeric, Logical or Character")
        if len(col.dims) != 1:
            raise BadColumnKind(f"column {n!r} must be a vector (got dims {list(col.dims)})")
        lengths.append(col.dims[0])
    if lengths and len(set(lengths)) > 1:
        raise RaggedColumns(f"column lengths differ: {lengths}")
    nrows = lengths[0] if lengths else 0
    return Table(list(zip(names, columns)), nrows)


# --- host conveniences --------------------------------------------------------

def as_bridge_value(obj) -> BridgeValue:
    """Map a plain Python value onto the bridge algebra.

    Scalars become length-1 vectors (R has no scalar type distinct from a
    length-1 vector): bool -> Logical, int/float -> Numeric, str ->
    Character, None -> NULL. Flat homogeneous lists (None allowed as NA)
    become vectors; dicts with string keys become Records; any other
    list/tuple becomes a Cell. BridgeValues pass through unchanged.
    """
    if isinstance(obj, (Numeric, Logical, Character, Cell, Record, Table, Null)):
        return obj
    if obj is None:
        return NULL
    if isinstance(obj, bool):
        return Logical((1,), (obj,))
    if isinstance(obj, (int, float)):
        return Numeric((1,), (obj,))
    if isinstance(obj, str):
        return Character((1,), (obj,))
    if isinstance(obj, dict):
        return Record([(str(k), as_bridge_value(v)) for k, v in obj.items()])
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        present = [x for x in items if x is not None]
        if present and all(isinstance(x, bool) for x in present):
            return Logical((len(items),), items)
        if present and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in present):
            return Numeric((len(items),), items)
        if present and all(isinstance(x, str) for x in present):
            return Character((len(items),), items)
        return Cell([as_bridge_value(x) for x in items])
    raise TypeError(f"cannot represent {type(obj).__name__} as a BridgeValue")
