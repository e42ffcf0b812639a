from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherator.globular import (
    Table,
    TableError,
    realize,
    tables_up_to,
    theta_compose,
    theta_hom,
    theta_hom_bruteforce,
    theta_identity,
)

SMALL = tables_up_to(5, 2)


def n_cells(p: Table) -> int:
    return sum(realize(p).counts)


def test_table_validation():
    assert Table.of(1, 0, 1).peaks == (1, 1)
    assert Table.of(2, 1, 2).valleys == (1,)
    for bad in [(1, 0), (0, 1, 0), (1, 1, 1), ()]:
        with pytest.raises(TableError):
            Table(bad)


def test_parse_roundtrip():
    p = Table.of(2, 0, 1)
    assert Table.parse(str(p)) == p
    with pytest.raises(TableError):
        Table.parse("1,0,1")


def test_realize_counts():
    assert realize(Table.of(0)).counts == (1,)
    assert realize(Table.of(1)).counts == (2, 1)
    assert realize(Table.of(1, 0, 1)).counts == (3, 2)
    assert realize(Table.of(2)).counts == (2, 2, 1)
    assert realize(Table.of(2, 1, 2)).counts == (2, 3, 2)


def test_realize_glues_later_arrow_first():
    # the second globe's target is the first globe's source
    P = realize(Table.of(1, 0, 1))
    assert P.src[1][0] == P.tgt[1][1]


def test_globular_identities():
    for p in SMALL:
        P = realize(p)
        for d in range(2, P.dim + 1):
            for i in P.cells(d):
                assert P.src[d - 1][P.src[d][i]] == P.src[d - 1][P.tgt[d][i]]
                assert P.tgt[d - 1][P.src[d][i]] == P.tgt[d - 1][P.tgt[d][i]]


@pytest.mark.parametrize(
    "p,q,n",
    [((1,), (1,), 1), ((0,), (1,), 2), ((1, 0, 1), (1,), 0), ((1,), (1, 0, 1), 2), ((1,), (2,), 2)],
)
def test_theta_spot_values(p, q, n):
    assert len(theta_hom(Table(p), Table(q))) == n


def test_theta_matches_bruteforce_on_small_tables():
    small = [p for p in SMALL if n_cells(p) <= 5]
    for p in small:
        for q in small:
            assert len(theta_hom(p, q)) == theta_hom_bruteforce(p, q), (p, q)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_theta_category_laws(p, q, r):
    for f in theta_hom(p, q):
        assert theta_compose(theta_identity(p), f) == f
        assert theta_compose(f, theta_identity(q)) == f
        for g in theta_hom(q, r):
            assert theta_compose(f, g) in set(theta_hom(p, r))
