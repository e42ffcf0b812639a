from __future__ import annotations

import pytest

from coherator.globular import Table
from coherator.report import enumeration_stable
from coherator.soa import (
    AdmissiblePair,
    BoundExhausted,
    admissible_pairs,
    build_tower,
    disk,
    extend_one_step,
    fibrant_replace,
    lookup_lift,
    sphere,
    sphere_disk_inclusion,
    sphere_pair,
    stable_dim,
)
from coherator.terms import Base, boundary_op, identity_tuple
from coherator.theory import FragmentBounds, base_theory, check_morphism

B0 = FragmentBounds(3, 2, 0, 2)


def test_pair_census_at_dimension_zero():
    pairs = admissible_pairs(base_theory(), 0, B0)
    per_arity = {}
    for pr in pairs:
        per_arity[pr.arity] = per_arity.get(pr.arity, 0) + 1
    # every ordered pair of vertices, diagonal included
    assert per_arity == {Table.of(0): 1, Table.of(1): 4, Table.of(1, 0, 1): 9}


def test_pairs_are_parallel(ic_tower):
    b = FragmentBounds(3, 2, 1, 2)
    for pr in admissible_pairs(ic_tower.stages[1], 1, b):
        assert pr.arity.height <= 2
        for side in "st":
            assert boundary_op(pr.f, side) == boundary_op(pr.g, side)


def test_sphere_and_disk():
    p = Table.of(1)
    S = sphere(p, 1)
    f, g = sphere_pair(S)
    assert f.dim == g.dim == 1 and f != g
    assert boundary_op(f, "s") == boundary_op(g, "s")
    D = disk(p, 1)
    assert len(D.generators) == len(S.generators) + 1
    assert check_morphism(sphere_disk_inclusion(p, 1)) == []
    with pytest.raises(ValueError):
        sphere(Table.of(2), 0)


def test_one_step_reaches_fixpoint():
    T, _ = extend_one_step(base_theory(), 0, B0)
    assert len(T.stages[-1].explicit) == 14 and not T.stages[-1].fixpoint
    U, inc = extend_one_step(T, 0, B0)
    assert U.stages[-1].fixpoint and U.generators == T.generators
    assert check_morphism(inc) == []


def test_replacement_over_base_is_lazy_fixpoint():
    T, inc = fibrant_replace(base_theory(), 0, B0)
    st = T.stages[-1]
    assert st.lazy and st.fixpoint and st.tag == "R0.0"
    assert len(T.stage_generators(0)) == 14
    assert check_morphism(inc) == []


def test_build_tower_status_and_limits():
    tw = build_tower("ic", 3, FragmentBounds(3, 2, 1, 2))
    assert [s[:2] for s in tw.status] == [("R0.0", 1), ("R1.0", 2), ("R2.0", 3)]
    assert all(isinstance(s[2], bool) for s in tw.status)
    assert [stable_dim(tw, i) for i in range(4)] == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        build_tower("ic", 4, FragmentBounds(3, 2, 1, 2))
    with pytest.raises(ValueError):
        build_tower("bogus", 1, B0)


def test_fc_tower_has_every_dimension_per_stage():
    tw = build_tower("fc", 2, FragmentBounds(1, 1, 0, 1))
    assert [st.k for st in tw.stages[1].stages if st.kind == "lift"] == [0, 1]
    assert tw.status[0] == ("fc", 1, False)


def test_lookup_lift(ic_tower, strict_tower):
    p = Table.of(0)
    v = Base(p, 0, 0)
    pair = AdmissiblePair(p, 0, v, v)
    assert lookup_lift(ic_tower.last, pair).gen.layer == "R0.0"
    assert lookup_lift(strict_tower.last, pair).gen.layer == "S0.0"
    far = AdmissiblePair(Table.of(1, 0, 1, 0, 1, 0, 1), 0, Base(Table.of(1, 0, 1, 0, 1, 0, 1), 0, 0), Base(Table.of(1, 0, 1, 0, 1, 0, 1), 0, 0))
    with pytest.raises(BoundExhausted):
        lookup_lift(ic_tower.last, far)


def test_tower_equality_and_determinism():
    b = FragmentBounds(3, 2, 1, 2)
    assert build_tower("ic", 2, b) == build_tower("ic", 2, b)
    assert build_tower("ic", 2, b) != build_tower("strict", 2, b)


@pytest.mark.parametrize("mode", ["ic", "strict"])
def test_enumeration_stable_from_next_stage(mode):
    tw = build_tower(mode, 3, FragmentBounds(3, 2, 1, 2))
    for p in [Table.of(0), Table.of(1), Table.of(1, 0, 1)]:
        for m in (0, 1):
            assert enumeration_stable(tw, p, m, 1)
    # before stage m + 1 the enumeration is still growing
    assert tw.stages[0].terms(Table.of(1), 1, 1) != tw.stages[1].terms(Table.of(1), 1, 1)
    assert tw.stages[1].terms(Table.of(1), 2, 1) != tw.stages[2].terms(Table.of(1), 2, 1)
