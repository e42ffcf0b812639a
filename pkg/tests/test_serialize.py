from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherator.globular import Table
from coherator.serialize import (
    ParseError,
    format_bounds,
    parse,
    parse_bounds,
    parse_presentation,
    parse_term,
    parse_tower,
    serialize,
    serialize_term,
)
from coherator.soa import build_tower, disk
from coherator.theory import FragmentBounds

TINY = FragmentBounds(3, 2, 1, 2)


@pytest.mark.parametrize("mode,stages", [("ic", 3), ("strict", 3), ("fc", 1)])
def test_tower_roundtrip(mode, stages):
    tw = build_tower(mode, stages, TINY if mode != "fc" else FragmentBounds(3, 1, 1, 1))
    text = serialize(tw)
    back = parse_tower(text)
    assert back == tw
    assert serialize(back) == text
    assert parse(text) == tw


def test_catalog_tower_roundtrip(ic_tower):
    text = serialize(ic_tower)
    assert serialize(parse(text)) == text


def test_presentation_roundtrip():
    D = disk(Table.of(1, 0, 1), 1)
    text = serialize(D)
    assert parse_presentation(text) == D
    assert serialize(parse(text)) == text


def test_repeated_builds_are_byte_identical():
    assert serialize(build_tower("strict", 2, TINY)) == serialize(build_tower("strict", 2, TINY))


def test_different_towers_serialize_differently():
    assert serialize(build_tower("ic", 2, TINY)) != serialize(build_tower("ic", 2, FragmentBounds(3, 2, 1, 1)))


def test_bounds_text():
    b = FragmentBounds(3, 2, 1, 1, ((2, 1, 0),))
    assert format_bounds(b) == "3,2,1,1;2:1:0"
    assert parse_bounds(format_bounds(b)) == b
    with pytest.raises(ParseError):
        parse_bounds("3,2,x,1")


def test_term_roundtrip(ic_tower):
    T = ic_tower.last
    for t in T.terms(Table.of(1, 0, 1), 1, 1)[:200]:
        assert parse_term(serialize_term(t), t.arity, T) == t


def test_dangling_reference_names_missing_hash():
    text = serialize(build_tower("fc", 2, FragmentBounds(1, 1, 1, 1)))
    lines = text.split("\n")
    gens = [(i, l.split()[1][2:]) for i, l in enumerate(lines) if l.startswith("gen ")]
    # a generator that some other boundary refers to
    i, missing = next((i, g) for i, g in gens if any(g in l.split("|", 1)[1] for l in lines if l.startswith("gen ")))
    del lines[i]
    with pytest.raises(ParseError) as info:
        parse_tower("\n".join(lines))
    assert "dangling reference" in str(info.value) and missing in str(info.value)
    assert info.value.line > 0 and info.value.col > 0


def test_diagnostics_carry_position():
    text = serialize(build_tower("fc", 1, FragmentBounds(1, 0, 0, 1)))
    with pytest.raises(ParseError) as info:
        parse_tower(text.replace("stage 1 kind=lift", "stage 1 kind=lyft"))
    assert info.value.line == 4
    with pytest.raises(ParseError) as info:
        parse_tower(text.replace("| cell(0,0) | cell(0,1)", "| cell(0,0 | cell(0,1)"))
    assert info.value.line == 7 and info.value.expected
    with pytest.raises(ParseError):
        parse_tower(text.replace("g#b50849fd1e75", "g#000000000000"))
    with pytest.raises(ParseError):
        parse_tower(text.rstrip("\n").rsplit("\n", 1)[0])


@settings(max_examples=8, deadline=None)
@given(st.sampled_from(["ic", "strict"]), st.integers(1, 2), st.integers(1, 3), st.integers(0, 1))
def test_roundtrip_over_bounds(mode, stages, length, depth):
    tw = build_tower(mode, stages, FragmentBounds(length, 2, depth, 1))
    text = serialize(tw)
    assert serialize(parse_tower(text)) == text
