"""Lift-adding extensions: spheres and disks, admissible pairs, one-step and
iterated fibrant replacement, and the towers FC, IC and the strict tower.

Everything is a finite truncation controlled by :class:`FragmentBounds`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .globular import Table, tables_up_to
from .terms import App, Base, CellTerm, Generator, TermError, boundary_op, identity_tuple
from .theory import (
    FragmentBounds,
    Presentation,
    Stage,
    TheoryMorphism,
    base_theory,
    inclusion,
    layer_tag,
)

__all__ = [
    "FragmentBounds",
    "AdmissiblePair",
    "BoundExhausted",
    "sphere",
    "disk",
    "sphere_disk_inclusion",
    "arities",
    "admissible_pairs",
    "extend_one_step",
    "fibrant_replace",
    "Tower",
    "build_tower",
    "lookup_lift",
    "stable_dim",
    "lift_generator",
]


class BoundExhausted(LookupError):
    """A lift needed by a construction lies outside the truncation."""


@dataclass(frozen=True)
class AdmissiblePair:
    arity: Table
    k: int
    f: CellTerm
    g: CellTerm

    def __str__(self):
        return f"({self.arity}, {self.f}, {self.g})"


def sphere(p: Table, k: int) -> Presentation:
    """Base theory plus a free parallel pair ``p -> k``.  For ``k >= 1`` the
    shared boundary is itself a free parallel pair, down to dimension 0."""
    if p.height > k + 1:
        raise ValueError(f"height of {p} exceeds {k + 1}")
    stages = []
    prev: Optional[tuple] = None
    for d in range(k + 1):
        pair = []
        for side in ("s", "t"):
            tag = f"sphere{p}.{k}.{side}"
            if prev is None:
                g = Generator(-1, p, None, None, "free", tag)
            else:
                g = Generator(d - 1, p, App(prev[0], identity_tuple(p)), App(prev[1], identity_tuple(p)), "free", tag)
            pair.append(g)
        prev = tuple(pair)
        stages.append(Stage(d - 1, "free", 0, prev, kind="sphere"))
    return Presentation("weak", tuple(stages))


def sphere_pair(S: Presentation) -> tuple:
    f, g = S.stages[-1].explicit
    return App(f, identity_tuple(f.arity)), App(g, identity_tuple(g.arity))


def disk(p: Table, k: int) -> Presentation:
    S = sphere(p, k)
    f, g = sphere_pair(S)
    delta = Generator(k, p, f, g, "free", f"disk{p}.{k}")
    return S.extend(Stage(k, "free", 0, (delta,), kind="disk"))


def sphere_disk_inclusion(p: Table, k: int) -> TheoryMorphism:
    return inclusion(sphere(p, k), disk(p, k), name=f"j{p},{k}")


def arities(k: int, b: FragmentBounds) -> list:
    return tables_up_to(b.arity_length_at(k), k + 1)


def _representatives(T: Presentation, terms) -> list:
    """One term per equality class, the least in term order."""
    if T.mode == "weak":
        return list(terms)
    seen = set()
    out = []
    for t in terms:
        kk = T.key(t)
        if kk not in seen:
            seen.add(kk)
            out.append(t)
    return out


def admissible_pairs(T: Presentation, k: int, b: FragmentBounds) -> list:
    """Ordered parallel pairs of dimension-``k`` operations (diagonal
    included), over every arity of height ``<= k+1`` within the bounds."""
    out = []
    for p in arities(k, b):
        terms = _representatives(T, T.terms(p, k, b.depth_at(k)))
        if k == 0:
            for f in terms:
                for g in terms:
                    out.append(AdmissiblePair(p, k, f, g))
            continue
        groups: dict = defaultdict(list)
        order = []
        for t in terms:
            bk = (T.key(boundary_op(t, "s")), T.key(boundary_op(t, "t")))
            if bk not in groups:
                order.append(bk)
            groups[bk].append(t)
        # keep the f-major order of the plain double loop
        pos = {t: i for i, t in enumerate(terms)}
        pairs = []
        for bk in order:
            grp = groups[bk]
            for f in grp:
                for g in grp:
                    pairs.append((pos[f], pos[g], f, g))
        pairs.sort(key=lambda x: (x[0], x[1]))
        out.extend(AdmissiblePair(p, k, f, g) for _, _, f, g in pairs)
    return out


def lift_generator(pair: AdmissiblePair, flavor: str, copy: int) -> Generator:
    return Generator(pair.k, pair.arity, pair.f, pair.g, flavor, layer_tag(pair.k, flavor, copy))


def _pair_key(T: Presentation, arity, f, g):
    return (arity, T.key(f), T.key(g))


def _lifted_keys(T: Presentation, i: int) -> set:
    return {_pair_key(T, g.arity, g.src, g.tgt) for g in T.stage_generators(i)}


def _mode_for(T: Presentation, flavor: str) -> str:
    return "strict" if (flavor == "unique" or T.mode == "strict") else "weak"


def extend_one_step(T: Presentation, k: int, b: FragmentBounds, flavor: str = "free", copy: Optional[int] = None):
    """Add one lift per admissible pair at dimension ``k`` that has no lift
    yet in the layer being grown, as an explicit (listed) stage.  With
    ``copy`` unset the step continues the last stage when that stage is a
    ``(k, flavor)`` layer and starts a new layer otherwise.  Returns
    ``(extended, inclusion)``."""
    if k > b.max_dim:
        raise ValueError(f"dimension {k} exceeds max_dim={b.max_dim}")
    last = T.stages[-1] if T.stages else None
    same = last is not None and last.kind == "lift" and (last.k, last.flavor) == (k, flavor)
    continuing = same and (copy is None or copy == last.copy)
    if copy is None:
        copy = last.copy if continuing else len(T.layers(k, flavor))
    done = _lifted_keys(T, len(T.stages) - 1) if continuing else set()
    fresh = []
    for pair in admissible_pairs(T, k, b):
        pk = _pair_key(T, pair.arity, pair.f, pair.g)
        if pk in done:
            continue
        done.add(pk)
        fresh.append(lift_generator(pair, flavor, copy))
    mode = _mode_for(T, flavor)
    if continuing:
        old = T.stage_generators(len(T.stages) - 1)
        stage = Stage(k, flavor, copy, old + tuple(fresh), bounds=b, iterations=last.iterations + 1, fixpoint=not fresh)
        U = Presentation(mode, T.stages[:-1] + (stage,))
    else:
        U = Presentation(mode, T.stages + (Stage(k, flavor, copy, tuple(fresh), bounds=b, fixpoint=False),))
    return U, inclusion(T, U, name=f"eta{k}")


def _quiet_after_lifts(T: Presentation, k: int) -> bool:
    """True when adding dimension-(k+1) lifts cannot create new dimension-k
    operations: no generator of dimension <= k takes arguments above k."""
    for i, st in enumerate(T.stages):
        if st.lazy:
            # a lazy layer at k' adds dimension k'+1 over heights <= k'+1
            continue
        for g in st.explicit:
            if g.dim <= k and g.arity.height > k:
                return False
    return True


def fibrant_replace(T: Presentation, k: int, b: FragmentBounds, flavor: str = "free"):
    """Apply the dimension-``k`` replacement as a fresh layer.

    The layer holds one lift per admissible pair within ``b``.  When the
    theory below has no generator that could feed new lifts back into
    dimension ``k``, one step is already a fixpoint and the layer stays lazy;
    otherwise explicit one-step extensions are iterated until nothing new
    appears or ``max_iterations`` is reached.
    """
    if k > b.max_dim:
        raise ValueError(f"dimension {k} exceeds max_dim={b.max_dim}")
    copy = len(T.layers(k, flavor))
    mode = _mode_for(T, flavor)
    if _quiet_after_lifts(T, k):
        U = Presentation(mode, T.stages + (Stage(k, flavor, copy, None, bounds=b, iterations=1, fixpoint=True),))
        return U, inclusion(T, U, name=f"eta{k}")
    U, _ = extend_one_step(T, k, b, flavor, copy=copy)
    for _ in range(b.max_iterations - 1):
        U, _ = extend_one_step(U, k, b, flavor, copy=copy)
        if U.stages[-1].fixpoint:
            break
    return U, inclusion(T, U, name=f"eta{k}")


@dataclass(eq=False)
class Tower:
    mode: str
    stages: list
    maps: list
    bounds: FragmentBounds
    status: list = field(default_factory=list)

    def signature(self) -> tuple:
        return (self.mode, self.bounds, tuple(T.signature for T in self.stages), tuple(self.status))

    def __eq__(self, other):
        return isinstance(other, Tower) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    @property
    def last(self) -> Presentation:
        return self.stages[-1]

    def __len__(self):
        return len(self.stages)


def build_tower(mode: str, n_stages: int, b: FragmentBounds) -> Tower:
    """``ic``/``strict``: stage ``n`` (from 1) adds the dimension-``(n-1)``
    replacement.  ``fc``: every stage runs one free step at every ``k <=
    max_dim`` at once."""
    mode = mode.lower()
    if mode not in ("fc", "ic", "strict"):
        raise ValueError(f"unknown tower mode {mode!r}")
    if mode != "fc" and n_stages - 1 > b.max_dim:
        raise ValueError(f"{n_stages} stages need max_dim >= {n_stages - 1}")
    T = base_theory("strict" if mode == "strict" else "weak")
    tower = Tower(mode, [T], [], b, [])
    for n in range(1, n_stages + 1):
        prev = tower.stages[-1]
        if mode == "fc":
            U = prev
            fresh_total = 0
            for k in range(b.max_dim + 1):
                done = set()
                for i, st in enumerate(prev.stages):
                    if st.k == k:
                        done |= _lifted_keys(prev, i)
                fresh = []
                for pair in admissible_pairs(prev, k, b):
                    pk = _pair_key(prev, pair.arity, pair.f, pair.g)
                    if pk not in done:
                        done.add(pk)
                        fresh.append(lift_generator(pair, "free", 0))
                fresh_total += len(fresh)
                U = U.extend(Stage(k, "free", 0, tuple(fresh), bounds=b, iterations=n, fixpoint=not fresh))
            tower.status.append(("fc", n, fresh_total == 0))
        else:
            flavor = "unique" if mode == "strict" else "free"
            U, _ = fibrant_replace(prev, n - 1, b, flavor)
            tower.status.append((U.stages[-1].tag, n, U.stages[-1].fixpoint))
        tower.maps.append(inclusion(prev, U, name=f"J{n}"))
        tower.stages.append(U)
    return tower


def lookup_lift(T: Presentation, pair: AdmissiblePair, layer: Optional[str] = None) -> CellTerm:
    """The canonical lift of ``pair`` in ``T``.  Weak mode: the generator
    over exactly that pair from the latest layer (or the named ``layer``).
    Strict mode: the canonical member of the class of lifts."""
    k, p = pair.k, pair.arity
    if T.mode == "strict" and layer is None:
        rep = T.lift_rep(k, p, pair.f, pair.g)
        if rep is None:
            raise BoundExhausted(f"no lift of {pair} within the truncation")
        return rep
    for i in range(len(T.stages) - 1, -1, -1):
        st = T.stages[i]
        if st.kind == "lift" and st.k == k and (layer is None or st.tag == layer):
            f, g = pair.f, pair.g
            if T.mode == "strict":
                below = T.prefix(i)
                f, g = below.class_rep(f, st.bounds.depth_at(k)), below.class_rep(g, st.bounds.depth_at(k))
            cand = Generator(k, p, f, g, st.flavor, st.tag)
            if T.contains(cand):
                return App(cand, identity_tuple(p))
    raise BoundExhausted(f"no lift of {pair} within the truncation")


def stable_dim(tower: Tower, stage: int) -> int:
    if not 0 <= stage < len(tower.stages):
        raise IndexError(stage)
    if tower.mode == "fc":
        return 1
    return stage + 1
