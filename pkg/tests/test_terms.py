from __future__ import annotations

import pytest

from coherator.globular import Table
from coherator.terms import (
    App,
    Base,
    Generator,
    TermError,
    boundary_op,
    generators_of,
    identity_tuple,
    iterated_boundary,
    substitute,
)

P1 = Table.of(1)
P101 = Table.of(1, 0, 1)


def composition():
    x0, x1 = identity_tuple(P101)
    return Generator(0, P101, boundary_op(x1, "s"), boundary_op(x0, "t"), layer="R0.0")


def test_generator_id_depends_on_every_field():
    c = composition()
    assert len(c.id) == 12
    other = Generator(0, P101, c.src, c.tgt, layer="R0.1")
    unique = Generator(0, P101, c.src, c.tgt, flavor="unique", layer="R0.0")
    assert len({c.id, other.id, unique.id}) == 3
    assert composition() == c and hash(composition()) == hash(c)


def test_generator_rejects_bad_boundary():
    (x,) = identity_tuple(P1)
    with pytest.raises(TermError):
        Generator(0, P1, x, x)
    with pytest.raises(TermError):
        Generator(0, P1, boundary_op(x, "s"), None)
    with pytest.raises(TermError):
        Generator(0, P1, boundary_op(x, "s"), boundary_op(x, "t"), flavor="other")


def test_base_range_checked():
    with pytest.raises(TermError):
        Base(P1, 1, 1)
    with pytest.raises(TermError):
        boundary_op(Base(P1, 0, 0), "s")


def test_application_boundary_is_substitution():
    c = composition()
    (x,) = identity_tuple(P1)
    with pytest.raises(TermError):
        App(c, (x,))
    x0, x1 = identity_tuple(P101)
    t = App(c, (x0, x1))
    assert boundary_op(t, "s") == boundary_op(x1, "s")
    assert boundary_op(t, "t") == boundary_op(x0, "t")
    assert generators_of(t) == {c}
    assert t.depth == 1


def test_substitute_identity_is_noop():
    c = composition()
    x0, x1 = identity_tuple(P101)
    t = App(c, (x0, x1))
    assert substitute(t, identity_tuple(P101)) == t


def test_iterated_boundary_globularity():
    p = Table.of(2)
    (z,) = identity_tuple(p)
    for side in "st":
        assert iterated_boundary(z, side, 2) == iterated_boundary(boundary_op(z, "t" if side == "s" else "s"), side, 1)
