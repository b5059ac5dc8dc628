import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbridge.rlang import R_RESERVED_WORDS, escape_r_string, validate_r_name


@pytest.mark.parametrize("name", [
    "fitM", "x", "grp", "dat", "my.var", "a_b", ".hidden", ".", "...",
    "x2", "p.value", "X", "a.b.c",
])
def test_valid_names(name):
    assert validate_r_name(name)


@pytest.mark.parametrize("name", [
    "2x", "", " ", "a b", "a-b", "_x", ".2x", "x!", "\u00e9cole",
    "for", "if", "TRUE", "NA", "NA_real_", "NULL", "function",
])
def test_invalid_names(name):
    assert not validate_r_name(name)


def test_every_reserved_word_rejected():
    for w in R_RESERVED_WORDS:
        assert not validate_r_name(w)


def test_non_string_rejected():
    assert not validate_r_name(42)
    assert not validate_r_name(None)


@pytest.mark.parametrize("raw,expected", [
    ("abc", '"abc"'),
    ("C:\\tmp", '"C:\\\\tmp"'),
    ('say "hi"', '"say \\"hi\\""'),
    ("a\nb", '"a\\nb"'),
    ("tab\there", '"tab\\there"'),
    ("", '""'),
])
def test_escape_examples(raw, expected):
    assert escape_r_string(raw) == expected


def test_escape_control_and_unicode():
    assert escape_r_string("\x01") == '"\\x01"'
    assert escape_r_string("\x7f") == '"\\x7f"'
    assert escape_r_string("caf\u00e9") == '"caf\\u{e9}"'
    assert escape_r_string("\U0001f600") == '"\\u{1f600}"'


def test_escape_rejects_nul():
    with pytest.raises(ValueError):
        escape_r_string("a\x00b")


@given(st.text(min_size=0, max_size=40).filter(lambda s: "\x00" not in s))
def test_escape_output_is_clean_ascii(s):
    out = escape_r_string(s)
    assert out.startswith('"') and out.endswith('"')
    body = out[1:-1]
    # nothing that could terminate the literal or confuse a non-UTF-8 parser
    assert all(0x20 <= ord(c) <= 0x7E for c in body)
    i = 0
    while i < len(body):
        if body[i] == "\\":
            i += 2
            continue
        assert body[i] != '"'
        i += 1


@given(st.text(min_size=0, max_size=40).filter(lambda s: "\x00" not in s))
def test_escape_deterministic(s):
    assert escape_r_string(s) == escape_r_string(s)
