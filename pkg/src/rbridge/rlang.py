"""R-language helpers shared by the value model and the script generator."""

from __future__ import annotations

import re

# Words the R parser refuses as plain identifiers.
R_RESERVED_WORDS = frozenset({
    "if", "else", "repeat", "while", "function", "for", "in", "next",
    "break", "TRUE", "FALSE", "NULL", "Inf", "NaN", "NA",
    "NA_integer_", "NA_real_", "NA_character_",
})

# Syntactic name: a letter, or a dot not followed by a digit, then
# letters/digits/dot/underscore. ASCII only: the bridge guards identifiers
# conservatively even though R accepts locale letters in some setups.
_NAME_RE = re.compile(r"^(?:[A-Za-z][A-Za-z0-9._]*|\.(?:[A-Za-z._][A-Za-z0-9._]*)?)$")


def validate_r_name(name: str) -> bool:
    """True iff ``name`` can be used verbatim as an R identifier."""
    if not isinstance(name, str):
        return False
    if name in R_RESERVED_WORDS:
        return False
    return _NAME_RE.match(name) is not None


_SIMPLE_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def escape_r_string(s: str) -> str:
    """Render ``s`` as a double-quoted R string literal parsing back to ``s``.

    Output is pure ASCII: control characters become \\xNN and anything
    non-ASCII becomes \\u{...}, so generated scripts survive non-UTF-8
    locales. NUL cannot exist in an R string and raises ValueError.
    """
    out = ['"']
    for ch in s:
        cp = ord(ch)
        if cp == 0:
            raise ValueError("R strings cannot contain NUL")
        esc = _SIMPLE_ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif cp < 0x20 or cp == 0x7F:
            out.append(f"\\x{cp:02x}")
        elif cp > 0x7E:
            out.append(f"\\u{{{cp:x}}}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)
