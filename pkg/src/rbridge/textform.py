"""JSON text form of bridge values, for CLI I/O and golden tests.

Strict JSON on the wire: NA is null, non-finite numbers are the string
tokens "NaN", "Infinity", "-Infinity". Finite doubles round-trip exactly
(shortest round-trip decimal); NaN payload bits are canonicalized, which
is the one lossy corner relative to the binary codec.
"""

from __future__ import annotations

import json
import math
import struct

from .errors import TextFormError
from .values import (
    Cell,
    Character,
    Logical,
    Null,
    Numeric,
    Record,
    Table,
    Workspace,
)

_TOKENS = {"NaN": math.nan, "Infinity": math.inf, "-Infinity": -math.inf}


def _num_out(x):
    if x is None:
        return None
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x


def _num_in(x, where):
    if x is None:
        return None
    if isinstance(x, str):
        if x in _TOKENS:
            return _TOKENS[x]
        raise TextFormError(f"{where}: unknown numeric token {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise TextFormError(f"{where}: numeric element must be a number, null or token")
    return float(x)


def value_to_text(v) -> dict:
    """Map a BridgeValue to its JSON-serializable text form."""
    if isinstance(v, Numeric):
        return {"type": "numeric", "dims": list(v.dims), "data": [_num_out(x) for x in v.data]}
    if isinstance(v, Logical):
        return {"type": "logical", "dims": list(v.dims), "data": list(v.data)}
    if isinstance(v, Character):
        return {"type": "character", "dims": list(v.dims), "data": list(v.data)}
    if isinstance(v, Cell):
        return {"type": "cell", "data": [value_to_text(e) for e in v.elements]}
    if isinstance(v, Record):
        return {
            "type": "record",
            "data": [{"name": n, "value": value_to_text(e)} for n, e in v.entries],
        }
    if isinstance(v, Table):
        return {
            "type": "table",
            "nrows": v.nrows,
            "columns": [{"name": n, "value": value_to_text(c)} for n, c in v.columns],
        }
    if isinstance(v, Null):
        return {"type": "null"}
    raise TextFormError(f"not a BridgeValue: {type(v).__name__}")


def _need(obj, key, where):
    if key not in obj:
        raise TextFormError(f"{where}: missing {key!r} field")
    return obj[key]


def _dims_in(obj, where):
    dims = _need(obj, "dims", where)
    if not isinstance(dims, list) or not all(
        isinstance(d, int) and not isinstance(d, bool) for d in dims
    ):
        raise TextFormError(f"{where}: dims must be a list of ints")
    return dims


def _named_list(obj, key, where):
    items = _need(obj, key, where)
    if not isinstance(items, list):
        raise TextFormError(f"{where}: {key} must be a list")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise TextFormError(f"{where}.{key}[{i}]: must be an object")
        name = _need(item, "name", f"{where}.{key}[{i}]")
        if not isinstance(name, str):
            raise TextFormError(f"{where}.{key}[{i}]: name must be a string")
        out.append((name, value_from_text(_need(item, "value", f"{where}.{key}[{i}]"))))
    return out


def value_from_text(obj, where: str = "value"):
    """Parse a text-form object back into a BridgeValue."""
    if not isinstance(obj, dict):
        raise TextFormError(f"{where}: expected an object, got {type(obj).__name__}")
    t = _need(obj, "type", where)
    try:
        if t == "numeric":
            data = _need(obj, "data", where)
            return Numeric(_dims_in(obj, where), [_num_in(x, where) for x in data])
        if t == "logical":
            data = _need(obj, "data", where)
            for x in data:
                if x is not None and not isinstance(x, bool):
                    raise TextFormError(f"{where}: logical element must be true/false/null")
            return Logical(_dims_in(obj, where), data)
        if t == "character":
            data = _need(obj, "data", where)
            for x in data:
                if x is not None and not isinstance(x, str):
                    raise TextFormError(f"{where}: character element must be string/null")
            return Character(_dims_in(obj, where), data)
        if t == "cell":
            data = _need(obj, "data", where)
            if not isinstance(data, list):
                raise TextFormError(f"{where}: cell data must be a list")
            return Cell([value_from_text(e, f"{where}.data[{i}]") for i, e in enumerate(data)])
        if t == "record":
            return Record(_named_list(obj, "data", where))
        if t == "table":
            nrows = _need(obj, "nrows", where)
            if not isinstance(nrows, int) or isinstance(nrows, bool):
                raise TextFormError(f"{where}: nrows must be an int")
            return Table(_named_list(obj, "columns", where), nrows)
        if t == "null":
            return Null()
    except TypeError as e:
        raise TextFormError(f"{where}: {e}") from None
    raise TextFormError(f"{where}: unknown type {t!r}")


def workspace_to_text(w: Workspace) -> dict:
    return {
        "type": "workspace",
        "entries": [{"name": n, "value": value_to_text(v)} for n, v in w.entries],
    }


def workspace_from_text(obj) -> Workspace:
    if not isinstance(obj, dict) or obj.get("type") != "workspace":
        raise TextFormError("expected a workspace object ({'type': 'workspace', ...})")
    return Workspace(_named_list(obj, "entries", "workspace"))


def dumps(obj) -> str:
    """Serialize a text-form dict to strict JSON (trailing newline)."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def loads(text: str):
    """Parse JSON text, mapping parse failures to TextFormError."""
    try:
        return json.loads(text)
    except (ValueError, RecursionError) as e:
        raise TextFormError(f"invalid JSON: {e}") from None
