"""Locate the low-dimensional structure cells (identities, composition,
inverses, associator, unitors) among the lifts of a tower, and list the
remaining generators as unnamed entries."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

from .globular import Table
from .soa import Tower
from .terms import App, Base, CellTerm, Generator, TermError, boundary_op, identity_tuple
from .theory import Presentation

__all__ = ["CatalogEntry", "NAMED_CELLS", "identify_cells", "catalog_tsv", "pretty"]

# label, formula (source => target), dimension index of the pair
NAMED_CELLS = (
    ("Z", "1_0 => 1_0", 0),
    ("c", "s.e1 => t.e0", 0),
    ("ω", "t => s", 0),
    ("a", "c∘(c,1) => c∘(1,c)", 1),
    ("Z_l", "c∘(Z∘t,1) => 1_1", 1),
    ("Z_r", "c∘(1,Z∘s) => 1_1", 1),
)

UNLISTED = "*"


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    stage: int
    arity: str
    source: str
    target: str
    gen_id: str
    convention: str = ""
    formula: str = ""

    def row(self) -> list:
        return [self.label, str(self.stage), self.arity, self.source, self.target, self.gen_id, self.convention, self.formula]


def pretty(t: CellTerm, names: Optional[dict] = None) -> str:
    """Readable term: base cells as ``v``/``x``/``y`` variables indexed by
    cell number, named generators by label, others by short id."""
    names = names or {}
    if isinstance(t, Base):
        return f"{'vxyz'[t.dim] if t.dim < 4 else 'd' + str(t.dim) + '_'}{t.index}"
    head = names.get(t.gen.id, f"g#{t.gen.id[:6]}")
    return head + "(" + ", ".join(pretty(a, names) for a in t.args) + ")"


def _find_lift(T: Presentation, k: int, p: Table, f: CellTerm, g: CellTerm):
    """Generator of ``T`` lifting ``(f, g)``: exact pair in weak mode, the
    canonical class member in strict mode."""
    for i, st in enumerate(T.stages):
        if st.kind != "lift" or st.k != k:
            continue
        ff, gg = f, g
        if T.mode == "strict":
            below = T.prefix(i)
            d = st.bounds.depth_at(k)
            ff, gg = below.class_rep(f, d), below.class_rep(g, d)
        cand = Generator(k, p, ff, gg, st.flavor, st.tag)
        if T.contains(cand):
            return cand
    return None


def _compose(c: Generator, conv: str, a: CellTerm, b: CellTerm) -> CellTerm:
    # "primary": slot 0 is the later arrow; "swapped": the other way round
    return App(c, (a, b) if conv == "primary" else (b, a))


def _candidates(found: dict):
    """Yield ``(label, convention, k, arity, f, g)`` candidates, using the
    already located ``Z``/``c`` for the dimension-1 cells."""
    p0 = Table.of(0)
    p1 = Table.of(1)
    p101 = Table.of(1, 0, 1)
    p5 = Table.of(1, 0, 1, 0, 1)
    v = Base(p0, 0, 0)
    yield "Z", "primary", 0, p0, v, v
    x0, x1 = identity_tuple(p101)
    yield "c", "primary", 0, p101, boundary_op(x1, "s"), boundary_op(x0, "t")
    yield "c", "swapped", 0, p101, boundary_op(x0, "s"), boundary_op(x1, "t")
    (x,) = identity_tuple(p1)
    yield "ω", "primary", 0, p1, boundary_op(x, "t"), boundary_op(x, "s")
    if "c" not in found:
        return
    c, conv = found["c"]
    try:
        y0, y1, y2 = identity_tuple(p5)
        yield "a", conv, 1, p5, _compose(c, conv, _compose(c, conv, y0, y1), y2), _compose(c, conv, y0, _compose(c, conv, y1, y2))
    except TermError:
        pass
    if "Z" not in found:
        return
    Z, _ = found["Z"]
    for label, build in (
        ("Z_l", lambda: _compose(c, conv, App(Z, (boundary_op(x, "t"),)), x)),
        ("Z_r", lambda: _compose(c, conv, x, App(Z, (boundary_op(x, "s"),)))),
    ):
        try:
            yield label, conv, 1, p1, build(), x
        except TermError:
            continue


def identify_cells(tower: Tower, list_limit: Optional[int] = 5000) -> list:
    """Named entries first (fixed label order), then every other generator
    of each lift stage as an unnamed entry.  A stage with more than
    ``list_limit`` generators is summarized by one unnamed row with ``*``
    fields instead of being listed."""
    T = tower.last
    found: dict = {}
    entries = []
    formulas = {label: formula for label, formula, _ in NAMED_CELLS}
    for label, conv, k, p, f, g in _candidates(found):
        if label in found:
            continue
        gen = _find_lift(T, k, p, f, g)
        if gen is not None:
            found[label] = (gen, conv)
    names = {gen.id: label for label, (gen, _) in found.items()}
    named_ids = set(names)
    for label, _, _ in NAMED_CELLS:
        if label not in found:
            continue
        gen, conv = found[label]
        stage = T.stage_index(gen) + 1
        entries.append(
            CatalogEntry(label, stage, str(gen.arity), pretty(gen.src, names), pretty(gen.tgt, names), gen.id, conv, formulas[label])
        )
    for i, st in enumerate(T.stages):
        if st.kind != "lift":
            continue
        if st.lazy and list_limit is not None and _too_big(T, i, list_limit):
            entries.append(CatalogEntry("unnamed", i + 1, UNLISTED, UNLISTED, UNLISTED, UNLISTED, "", f"layer {st.tag} not listed"))
            continue
        gens = sorted(T.stage_generators(i), key=lambda g: (len(g.arity), g.arity.dims, g.id))
        for g in gens:
            if g.id in named_ids:
                continue
            entries.append(CatalogEntry("unnamed", i + 1, str(g.arity), pretty(g.src, names), pretty(g.tgt, names), g.id))
    return entries


def _too_big(T: Presentation, i: int, limit: int) -> bool:
    """Estimate the size of a lazy layer from its term counts without
    building the generators."""
    from .soa import arities

    st = T.stages[i]
    below = T.prefix(i)
    total = 0
    for p in arities(st.k, st.bounds):
        n = len(below.terms(p, st.k, st.bounds.depth_at(st.k)))
        total += n
        if total > limit:
            return True
    return False


HEADER = ["label", "stage", "arity", "source", "target", "generator", "convention", "formula"]


def catalog_tsv(entries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(HEADER)
    for e in entries:
        w.writerow(e.row())
    return buf.getvalue()
