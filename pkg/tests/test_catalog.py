from __future__ import annotations

from coherator.catalog import HEADER, NAMED_CELLS, catalog_tsv, identify_cells
from coherator.soa import build_tower
from coherator.theory import FragmentBounds

NAMES = [label for label, _, _ in NAMED_CELLS]


def named(entries):
    return {e.label: e for e in entries if e.label != "unnamed"}


def test_named_cells_found(ic_tower):
    entries = identify_cells(ic_tower)
    found = named(entries)
    assert list(found) == NAMES
    assert [e.label for e in entries[: len(NAMES)]] == NAMES
    assert found["Z"].stage == 1 and found["Z"].arity == "(0)"
    assert (found["c"].arity, found["c"].source, found["c"].target) == ("(1,0,1)", "v2", "v1")
    assert (found["a"].source, found["a"].target) == ("c(c(x0, x1), x2)", "c(x0, c(x1, x2))")
    assert found["Z_l"].source == "c(Z(v1), x0)" and found["Z_r"].source == "c(x0, Z(v0))"
    assert found["a"].stage == found["Z_l"].stage == 2
    assert {e.convention for e in found.values()} == {"primary"}


def test_unmatched_lifts_are_unnamed(ic_tower):
    entries = identify_cells(ic_tower)
    # a lift over ((1), s, s) has no named role
    assert any(e.label == "unnamed" and e.arity == "(1)" and e.source == e.target == "v0" for e in entries)
    ids = [e.gen_id for e in entries if e.gen_id != "*"]
    assert len(ids) == len(set(ids))


def test_large_layers_are_summarized(ic_tower):
    entries = identify_cells(ic_tower, list_limit=10)
    stars = [e for e in entries if e.arity == "*"]
    assert stars and all(e.label == "unnamed" for e in stars)
    assert list(named(entries)) == NAMES


def test_strict_catalog_collapses_unitors(strict_tower):
    found = named(identify_cells(strict_tower))
    assert set(found) == set(NAMES)
    assert found["Z_l"].gen_id == found["Z_r"].gen_id


def test_stable_under_larger_bounds(ic_tower):
    small = named(identify_cells(build_tower("ic", 2, FragmentBounds(3, 2, 1, 2))))
    big = named(identify_cells(ic_tower))
    assert set(small) == {"Z", "c", "ω"}
    for label, e in small.items():
        assert big[label] == e


def test_tsv_shape(ic_tower):
    text = catalog_tsv(identify_cells(ic_tower))
    lines = text.split("\n")
    assert lines[0].split("\t") == HEADER and lines[-1] == ""
    assert all(len(l.split("\t")) == len(HEADER) for l in lines[:-1])
    assert "\r" not in text
    assert text == catalog_tsv(identify_cells(ic_tower))
