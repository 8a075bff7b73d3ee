from urllib.parse import urljoin

import pytest
from hypothesis import given, strategies as st

from mmt.errors import MalformedUri, NoModuleContext
from mmt.ids import (
    Identifier,
    decode_name,
    encode,
    encode_name,
    parse,
    remove_dot_segments,
    resolve,
    resolve_uri,
)

BASE = Identifier("http://a/b/c/d", ("T", "i"), ("s",))


def test_concrete_syntax_round_trip():
    i = parse("http://cds.omdoc.org/algebra?CGroup/mon?comp")
    assert i.doc == "http://cds.omdoc.org/algebra"
    assert i.module == ("CGroup", "mon")
    assert i.symbol == ("comp",)
    assert encode(i) == "http://cds.omdoc.org/algebra?CGroup/mon?comp"


def test_trailing_separators_dropped():
    assert encode(Identifier("g", ("T",))) == "g?T"
    assert encode(Identifier("", ("T",), ("c",))) == "?T?c"
    assert encode(Identifier("", (), ("c",))) == "??c"


@pytest.mark.parametrize("bad", ["a?b?c?d", "g?T//i", "g?T?c d", "g?T?%zz"])
def test_malformed(bad):
    with pytest.raises(MalformedUri):
        parse(bad)


def test_reserved_characters_are_escaped():
    assert encode_name("a?b/c") == "a%3Fb%2Fc"
    assert encode_name("∀x") == "∀x"
    assert decode_name("a%3Fb") == "a?b"


names = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8)


@given(names)
def test_name_encoding_round_trip(n):
    assert decode_name(encode_name(n)) == n


@given(st.lists(names, min_size=1, max_size=3), st.lists(names, max_size=3))
def test_identifier_round_trip(module, symbol):
    i = Identifier("http://example.org/d", tuple(module), tuple(symbol))
    assert parse(encode(i)) == i


def _r(text):
    return resolve(BASE, parse(text))


# (relative reference, expected absolute identifier)
RESOLUTION = [
    # g non-empty: document resolved by RFC 3986, rest taken verbatim
    ("http://x/y?M?s", "http://x/y?M?s"),
    ("e", "http://a/b/c/e"),
    ("../e?M", "http://a/b/e?M"),
    ("/e?M?s", "http://a/e?M?s"),
    ("//h/e?M", "http://h/e?M"),
    ("./e", "http://a/b/c/e"),
    ("../../../../e", "http://a/e"),
    ("e?M/N?s/t", "http://a/b/c/e?M/N?s/t"),
    # g empty, m non-empty
    ("?M", "http://a/b/c/d?M"),
    ("?M?s", "http://a/b/c/d?M?s"),
    ("?/j", "http://a/b/c/d?T/i/j"),
    ("?/j?s", "http://a/b/c/d?T/i/j?s"),
    ("?M/N", "http://a/b/c/d?M/N"),
    ("?/j/k?u/v", "http://a/b/c/d?T/i/j/k?u/v"),
    # g and m empty, s non-empty
    ("??t", "http://a/b/c/d?T/i?t"),
    ("??/t", "http://a/b/c/d?T/i?s/t"),
    ("??t/u", "http://a/b/c/d?T/i?t/u"),
    ("??/t/u", "http://a/b/c/d?T/i?s/t/u"),
    # everything empty: the base itself
    ("", "http://a/b/c/d?T/i?s"),
    ("?T2", "http://a/b/c/d?T2"),
    ("?T?s", "http://a/b/c/d?T?s"),
]


@pytest.mark.parametrize("rel,expected", RESOLUTION)
def test_resolution_table(rel, expected):
    assert _r(rel) == parse(expected)


def test_symbol_against_document_base_is_rejected():
    with pytest.raises(NoModuleContext):
        resolve(Identifier("http://a/b"), parse("??c"))
    with pytest.raises(NoModuleContext):
        resolve(Identifier("http://a/b"), parse("??/c"))


def test_document_base_still_resolves_modules():
    assert resolve(Identifier("http://a/b"), parse("?T?c")) == parse("http://a/b?T?c")


def test_relative_base_is_rejected():
    with pytest.raises(MalformedUri):
        resolve(Identifier("d", ("T",)), parse("??c"))


def test_dot_segments():
    assert remove_dot_segments("/a/b/c/./../../g") == "/a/g"
    assert remove_dot_segments("mid/content=5/../6") == "mid/6"


RFC_BASE = "http://a/b/c/d;p?q"
RFC_CASES = {
    "g:h": "g:h", "g": "http://a/b/c/g", "./g": "http://a/b/c/g", "g/": "http://a/b/c/g/",
    "/g": "http://a/g", "//g": "http://g", "?y": "http://a/b/c/d;p?y", "g?y": "http://a/b/c/g?y",
    "#s": "http://a/b/c/d;p?q#s", "g#s": "http://a/b/c/g#s", ";x": "http://a/b/c/;x",
    "": "http://a/b/c/d;p?q", ".": "http://a/b/c/", "./": "http://a/b/c/", "..": "http://a/b/",
    "../g": "http://a/b/g", "../..": "http://a/", "../../g": "http://a/g",
    "../../../g": "http://a/g", "/./g": "http://a/g", "g.": "http://a/b/c/g.",
    "g..": "http://a/b/c/g..", "./../g": "http://a/b/g", "g/./h": "http://a/b/c/g/h",
    "g/../h": "http://a/b/c/h", "g;x=1/../y": "http://a/b/c/y",
}


@pytest.mark.parametrize("ref,expected", sorted(RFC_CASES.items()))
def test_rfc3986_examples(ref, expected):
    assert resolve_uri(RFC_BASE, ref) == expected


# urllib drops empty path segments, so the oracle is only consulted without them
segment = st.sampled_from(["a", "b", "..", ".", "c.d", "x;y"])
paths = st.lists(segment, max_size=5).map("/".join)


@given(paths, paths, st.booleans())
def test_rfc3986_agrees_with_urllib(base_path, ref_path, absolute_ref):
    base = "http://host/" + base_path
    ref = ("/" if absolute_ref else "") + ref_path
    assert resolve_uri(base, ref) == urljoin(base, ref)


def test_empty_segments_survive_resolution():
    assert resolve_uri("http://host/", "a//a") == "http://host/a//a"
