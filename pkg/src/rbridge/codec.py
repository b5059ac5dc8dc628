"""Bit-exact encoder/decoder for the RBW v1 binary workspace format.

Layout (all integers little-endian, floats IEEE-754 binary64 LE):

  header  magic "RBW1" | u16 version=1 | u16 flags=0 | u32 entry count
  entry   u32 name length | name bytes (UTF-8) | value
  value   u8 tag, then per tag:
    0x01/0x03/0x02  u32 ndims | ndims x u32 extents | payload
                    (f64 each / u8 each 0=F 1=T 2=NA / u32 len + bytes,
                     len 0xFFFFFFFF = NA string)
    0x04 cell       u32 count | count x value
    0x05 record     u32 count | count x (u32 name len | name | value)
    0x06 table      u32 ncols | u32 nrows | ncols x (u32 name len | name |
                    vector value of length nrows)
    0x00 null       nothing

A numeric NA is exactly R's NA_real_ bit pattern (A2 07 00 00 00 00 F0 7F
on the wire) so the R side round-trips missing values with no translation.
Encoding is canonical: the same workspace always yields identical bytes.
The decoder never trusts a declared count further than the bytes that
remain, so truncated or hostile inputs fail with a structured error
instead of a large allocation.
"""

from __future__ import annotations

import struct

from .errors import (
    BadMagic,
    DuplicateEntryName,
    InvalidWorkspace,
    MalformedValue,
    Truncated,
    UnsupportedVersion,
)
from .values import (
    MAX_DEPTH,
    NA_REAL_BYTES,
    Cell,
    Character,
    Logical,
    Null,
    Numeric,
    Record,
    Table,
    Workspace,
    validate_workspace,
)

MAGIC = b"RBW1"
FORMAT_VERSION = 1
FILE_EXTENSION = ".rbw"

TAG_NULL = 0x00
TAG_NUMERIC = 0x01
TAG_CHARACTER = 0x02
TAG_LOGICAL = 0x03
TAG_CELL = 0x04
TAG_RECORD = 0x05
TAG_TABLE = 0x06

_U32_MAX = 0xFFFFFFFF
_NA_STRING_LEN = 0xFFFFFFFF


# --- encoding ---------------------------------------------------------------

def _w_u16(buf: bytearray, v: int) -> None:
    buf += struct.pack("<H", v)


def _w_u32(buf: bytearray, v: int) -> None:
    if v > _U32_MAX:
        raise InvalidWorkspace([f"count {v} exceeds u32 range"])
    buf += struct.pack("<I", v)


def _w_string(buf: bytearray, s: str) -> None:
    b = s.encode("utf-8")
    _w_u32(buf, len(b))
    buf += b


def _w_value(buf: bytearray, v) -> None:
    if isinstance(v, Null):
        buf.append(TAG_NULL)
    elif isinstance(v, Numeric):
        buf.append(TAG_NUMERIC)
        _w_u32(buf, len(v.dims))
        for d in v.dims:
            _w_u32(buf, d)
        for x in v.data:
            buf += NA_REAL_BYTES if x is None else struct.pack("<d", x)
    elif isinstance(v, Character):
        buf.append(TAG_CHARACTER)
        _w_u32(buf, len(v.dims))
        for d in v.dims:
            _w_u32(buf, d)
        for s in v.data:
            if s is None:
                _w_u32(buf, _NA_STRING_LEN)
            else:
                _w_string(buf, s)
    elif isinstance(v, Logical):
        buf.append(TAG_LOGICAL)
        _w_u32(buf, len(v.dims))
        for d in v.dims:
            _w_u32(buf, d)
        buf += bytes(2 if x is None else int(x) for x in v.data)
    elif isinstance(v, Cell):
        buf.append(TAG_CELL)
        _w_u32(buf, len(v.elements))
        for e in v.elements:
            _w_value(buf, e)
    elif isinstance(v, Record):
        buf.append(TAG_RECORD)
        _w_u32(buf, len(v.entries))
        for name, e in v.entries:
            _w_string(buf, name)
            _w_value(buf, e)
    elif isinstance(v, Table):
        buf.append(TAG_TABLE)
        _w_u32(buf, len(v.columns))
        _w_u32(buf, v.nrows)
        for name, col in v.columns:
            _w_string(buf, name)
            _w_value(buf, col)
    else:  # unreachable after validation
        raise InvalidWorkspace([f"not a BridgeValue: {type(v).__name__}"])


def encode(w: Workspace) -> bytes:
    """Serialize a valid Workspace to canonical RBW v1 bytes."""
    violations = validate_workspace(w)
    if violations:
        raise InvalidWorkspace(violations)
    buf = bytearray()
    buf += MAGIC
    _w_u16(buf, FORMAT_VERSION)
    _w_u16(buf, 0)  # flags, reserved
    _w_u32(buf, len(w.entries))
    for name, v in w.entries:
        _w_string(buf, name)
        _w_value(buf, v)
    return bytes(buf)


# --- decoding ---------------------------------------------------------------

class _Reader:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.pos

    def take(self, n: int, what: str) -> bytes:
        if n > self.remaining:
            raise Truncated(self.pos, f"need {n} bytes for {what}, have {self.remaining}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def count(self, what: str, min_unit: int) -> int:
        """Read a u32 count whose items need >= min_unit bytes each."""
        at = self.pos
        n = self.u32(what)
        if n * min_unit > self.remaining:
            raise Truncated(at, f"{what} {n} exceeds remaining {self.remaining} bytes")
        return n

    def string(self, what: str, *, allow_na: bool = False):
        at = self.pos
        n = self.u32(what)
        if n == _NA_STRING_LEN:
            if allow_na:
                return None
            raise MalformedValue(at, f"{what}: NA length where a string is required")
        b = self.take(n, what)
        try:
            return b.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedValue(at, f"{what}: invalid UTF-8 ({e.reason})") from None


def _r_dims(r: _Reader):
    at = r.pos
    ndims = r.count("ndims", 4)
    if ndims < 1:
        raise MalformedValue(at, "ndims must be >= 1")
    dims = struct.unpack(f"<{ndims}I", r.take(4 * ndims, "extents"))
    count = 1
    for d in dims:
        count *= d
    return dims, count


def _r_value(r: _Reader, depth: int):
    if depth > MAX_DEPTH:
        raise MalformedValue(r.pos, f"nesting deeper than {MAX_DEPTH}")
    at = r.pos
    tag = r.u8("value tag")
    if tag == TAG_NULL:
        return Null()
    if tag == TAG_NUMERIC:
        dims, count = _r_dims(r)
        if count * 8 > r.remaining:
            raise Truncated(r.pos, f"numeric payload of {count} elements")
        payload = r.take(8 * count, "numeric payload")
        data = [
            None if payload[i:i + 8] == NA_REAL_BYTES
            else struct.unpack_from("<d", payload, i)[0]
            for i in range(0, 8 * count, 8)
        ]
        return Numeric(dims, data)
    if tag == TAG_CHARACTER:
        dims, count = _r_dims(r)
        if count * 4 > r.remaining:
            raise Truncated(r.pos, f"character payload of {count} elements")
        data = [r.string("string element", allow_na=True) for _ in range(count)]
        return Character(dims, data)
    if tag == TAG_LOGICAL:
        dims, count = _r_dims(r)
        payload = r.take(count, "logical payload")
        data = []
        for i, b in enumerate(payload):
            if b > 2:
                raise MalformedValue(r.pos - count + i, f"logical byte {b:#04x}")
            data.append(None if b == 2 else bool(b))
        return Logical(dims, data)
    if tag == TAG_CELL:
        n = r.count("cell count", 1)
        return Cell([_r_value(r, depth + 1) for _ in range(n)])
    if tag == TAG_RECORD:
        n = r.count("record count", 5)
        entries = []
        for _ in range(n):
            name = r.string("record entry name")
            entries.append((name, _r_value(r, depth + 1)))
        return Record(entries)
    if tag == TAG_TABLE:
        ncols = r.count("table column count", 5)
        nrows = r.u32("table row count")
        columns = []
        for _ in range(ncols):
            name = r.string("column name")
            col_at = r.pos
            col = _r_value(r, depth + 1)
            if not isinstance(col, (Numeric, Logical, Character)):
                raise MalformedValue(col_at, f"table column {name!r} is not a vector kind")
            if col.dims != (nrows,):
                raise MalformedValue(
                    col_at, f"table column {name!r} dims {list(col.dims)} != [{nrows}]"
                )
            columns.append((name, col))
        return Table(columns, nrows)
    raise MalformedValue(at, f"unknown value tag {tag:#04x}")


def _decode_document(data: bytes):
    r = _Reader(data)
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}, expected {MAGIC!r}")
    version = r.u16("version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"RBW version {version} not supported (this codec speaks v1)")
    flags = r.u16("flags")
    if flags != 0:
        raise MalformedValue(r.pos - 2, f"flags must be 0 in v1, got {flags:#06x}")
    n = r.count("entry count", 5)
    entries = []
    spans = []
    seen = set()
    for _ in range(n):
        start = r.pos
        name = r.string("entry name")
        if name in seen:
            raise DuplicateEntryName(f"duplicate entry name {name!r}")
        seen.add(name)
        value = _r_value(r, 0)
        entries.append((name, value))
        spans.append((name, value, start, r.pos))
    if r.remaining:
        raise MalformedValue(r.pos, f"{r.remaining} trailing bytes after last entry")
    return entries, spans


def decode(data: bytes):
    """Parse RBW bytes into (Workspace, warnings).

    Inverse of encode() on canonical input. Warnings are currently only
    produced by the R-side writer (delivered over stderr), so the list is
    normally empty; the slot is part of the API for format evolution.
    """
    entries, _ = _decode_document(bytes(data))
    return Workspace(entries), []


def _describe(value) -> str:
    if isinstance(value, Numeric):
        return f"numeric [{'x'.join(map(str, value.dims))}]"
    if isinstance(value, Logical):
        return f"logical [{'x'.join(map(str, value.dims))}]"
    if isinstance(value, Character):
        return f"character [{'x'.join(map(str, value.dims))}]"
    if isinstance(value, Cell):
        return f"cell ({len(value.elements)} items)"
    if isinstance(value, Record):
        return f"record ({len(value.entries)} fields)"
    if isinstance(value, Table):
        return f"table [{value.nrows} rows x {len(value.columns)} cols]"
    return "null"


def inspect(data: bytes) -> str:
    """Human-readable summary: names, kinds, dims and byte ranges.

    Raises the same structured errors as decode() on malformed input.
    """
    _, spans = _decode_document(bytes(data))
    lines = [f"RBW v1, {len(spans)} entries"]
    for name, value, start, end in spans:
        lines.append(f"{name}: {_describe(value)} @ bytes {start}..{end}")
    return "\n".join(lines)
