"""Staged presentations of globular theories and their morphisms.

A presentation is the base theory plus an ordered list of stages; every
stage adds generators whose boundaries only mention earlier generators.
Weak presentations are free: two terms are equal iff their normal forms
coincide.  Strict presentations additionally make every stage of flavor
``unique`` uniquely contractible, so a term in an admissible position
(dimension ``m >= 1`` over an arity of height ``<= m``) is determined by its
boundary.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Optional

from .globular import Table, realize
from .terms import (
    App,
    Base,
    Bd,
    CellTerm,
    Generator,
    TermError,
    TupleTerm,
    boundary_op,
    generators_of,
    identity_tuple,
    iterated_boundary,
    substitute,
    term_order_key,
)

__all__ = [
    "FragmentBounds",
    "Stage",
    "layer_tag",
    "Presentation",
    "base_theory",
    "TheoryMorphism",
    "MorphismError",
    "normalize",
    "boundary",
    "equal",
    "mk_tuple",
    "substitute_tuple",
    "apply_morphism",
    "compose",
    "identity_morphism",
    "inclusion",
    "check_morphism",
    "extend_by_universal_property",
    "enumerate_terms",
    "enumerate_tuples",
    "globe_cells",
    "reduce_signed_word",
]


@dataclass(frozen=True)
class FragmentBounds:
    """Truncation of the transfinite constructions: table length of pair
    arities, largest dimension index, generator-nesting depth of pair
    members, and one-step extensions per replacement.

    ``per_dim`` holds ``(k, arity_length, depth)`` overrides for the
    dimension-``k`` pairs; dimensions without an override use the defaults.
    """

    max_arity_length: int = 3
    max_dim: int = 2
    max_depth: int = 1
    max_iterations: int = 2
    per_dim: tuple = ()

    def __post_init__(self):
        # arity length 0 admits no pairs at all: the empty fragment
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if min(self.max_arity_length, self.max_dim, self.max_depth) < 0:
            raise ValueError("max_arity_length, max_dim and max_depth must be non-negative")
        seen = set()
        for entry in self.per_dim:
            k, length, d = entry
            if k in seen:
                raise ValueError(f"dimension {k} overridden twice")
            if k < 0 or length < 0 or d < 0:
                raise ValueError(f"bad per-dimension bound {entry}")
            seen.add(k)
        object.__setattr__(self, "per_dim", tuple(sorted(tuple(e) for e in self.per_dim)))

    def _override(self, k: int):
        for e in self.per_dim:
            if e[0] == k:
                return e
        return None

    def arity_length_at(self, k: int) -> int:
        e = self._override(k)
        return self.max_arity_length if e is None else e[1]

    def depth_at(self, k: int) -> int:
        e = self._override(k)
        return self.max_depth if e is None else e[2]

    def flags(self) -> str:
        out = (
            f"max-arity-len={self.max_arity_length} max-dim={self.max_dim} "
            f"max-depth={self.max_depth} max-iter={self.max_iterations}"
        )
        for k, length, d in self.per_dim:
            out += f" dim-bound={k}:{length}:{d}"
        return out


@dataclass(frozen=True)
class Stage:
    """One block of generators.

    ``kind`` is ``lift`` for fibrant-replacement layers and ``sphere`` /
    ``disk`` for hand-built presentations.  ``copy`` counts earlier layers of
    the same ``(k, flavor)`` so that applying the same replacement twice
    yields distinct lifts.  A lift layer with ``explicit is None`` is lazy:
    it holds one lift per admissible pair of the theory below it within
    ``bounds`` and is only listed on demand.  ``fixpoint`` records whether
    the iteration stopped because nothing new appeared (``True``) or because
    it hit ``max_iterations``.
    """

    k: int
    flavor: str
    copy: int
    explicit: Optional[tuple] = None
    kind: str = "lift"
    bounds: Optional[FragmentBounds] = None
    iterations: int = 1
    fixpoint: bool = True

    def __post_init__(self):
        if self.kind not in ("lift", "sphere", "disk"):
            raise ValueError(f"unknown stage kind {self.kind!r}")
        if self.explicit is None and self.bounds is None:
            raise ValueError("a lazy stage needs bounds")

    @property
    def tag(self) -> str:
        return layer_tag(self.k, self.flavor, self.copy)

    @property
    def lazy(self) -> bool:
        return self.explicit is None

    def signature(self) -> tuple:
        body = ("lazy",) if self.lazy else tuple(g.id for g in self.explicit)
        return (self.k, self.flavor, self.copy, self.kind, body, self.bounds, self.iterations, self.fixpoint)


def layer_tag(k: int, flavor: str, copy: int) -> str:
    return f"{'S' if flavor == 'unique' else 'R'}{k}.{copy}"


@dataclass(frozen=True, eq=False)
class Presentation:
    mode: str = "weak"
    stages: tuple = ()

    def __post_init__(self):
        if self.mode not in ("weak", "strict"):
            raise ValueError(f"unknown mode {self.mode!r}")
        seen: set = set()
        for i, st in enumerate(self.stages):
            if st.lazy:
                continue
            for g in st.explicit:
                for b in (g.src, g.tgt):
                    if b is None:
                        continue
                    for h in generators_of(b):
                        if h.id not in seen and not self.prefix(i).contains(h):
                            raise TermError(f"boundary of g#{g.id} mentions undeclared g#{h.id}")
                seen.add(g.id)

    # structural equality: same mode, same stages in the same order
    def __eq__(self, other):
        return isinstance(other, Presentation) and self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)

    @cached_property
    def signature(self) -> tuple:
        return (self.mode,) + tuple(s.signature() for s in self.stages)

    def extend(self, stage: Stage) -> Presentation:
        return Presentation(self.mode, self.stages + (stage,))

    @cached_property
    def _prefixes(self) -> dict:
        return {}

    def prefix(self, i: int) -> Presentation:
        """The presentation made of the first ``i`` stages."""
        if i == len(self.stages):
            return self
        memo = self._prefixes
        if i not in memo:
            memo[i] = Presentation(self.mode, self.stages[:i])
        return memo[i]

    @cached_property
    def _materialized(self) -> dict:
        return {}

    def stage_generators(self, i: int) -> tuple:
        st = self.stages[i]
        if not st.lazy:
            return st.explicit
        memo = self._materialized
        if i not in memo:
            from .soa import admissible_pairs, lift_generator

            below = self.prefix(i)
            memo[i] = tuple(
                lift_generator(pair, st.flavor, st.copy) for pair in admissible_pairs(below, st.k, st.bounds)
            )
        return memo[i]

    @property
    def generators(self) -> tuple:
        return tuple(g for i in range(len(self.stages)) for g in self.stage_generators(i))

    @cached_property
    def tag_index(self) -> dict:
        out = {}
        for i, s in enumerate(self.stages):
            if s.kind == "lift":
                out[s.tag] = i
        return out

    @cached_property
    def _member(self) -> dict:
        return {}

    @cached_property
    def _explicit_ids(self) -> dict:
        return {g.id: i for i, s in enumerate(self.stages) if not s.lazy for g in s.explicit}

    def stage_index(self, g: Generator) -> Optional[int]:
        """Index of the stage holding ``g``, or ``None``."""
        memo = self._member
        if g.id in memo:
            return memo[g.id]
        found = self._explicit_ids.get(g.id)
        if found is None:
            i = self.tag_index.get(g.layer)
            if i is not None and self.stages[i].lazy and self._lazy_member(i, g):
                found = i
        memo[g.id] = found
        return found

    def contains(self, g: Generator) -> bool:
        return self.stage_index(g) is not None

    __contains__ = contains

    def _lazy_member(self, i: int, g: Generator) -> bool:
        st = self.stages[i]
        b = st.bounds
        p = g.arity
        if (g.k, g.flavor) != (st.k, st.flavor) or g.src is None:
            return False
        if len(p) > b.arity_length_at(st.k) or p.height > st.k + 1:
            return False
        depth = b.depth_at(st.k)
        if g.src.depth > depth or g.tgt.depth > depth:
            return False
        below = self.prefix(i)
        for t in (g.src, g.tgt):
            if not all(below.contains(h) for h in generators_of(t)):
                return False
        if st.k >= 1:
            for side in ("s", "t"):
                if not below.equal(boundary_op(g.src, side), boundary_op(g.tgt, side)):
                    return False
        if below.mode == "strict":
            # lifts are indexed by the least member of each class
            return below.class_rep(g.src, depth) == g.src and below.class_rep(g.tgt, depth) == g.tgt
        return True

    def gens_of_dim(self, m: int) -> tuple:
        memo = self._materialized
        key = ("dim", m)
        if key not in memo:
            out = []
            for i, s in enumerate(self.stages):
                if s.k + 1 == m:
                    out.extend(self.stage_generators(i))
            memo[key] = tuple(sorted(out, key=lambda g: g.id))
        return memo[key]

    @cached_property
    def unique_ks(self) -> frozenset:
        if self.mode != "strict":
            return frozenset()
        return frozenset(s.k for s in self.stages if s.flavor == "unique" and s.kind == "lift")

    def layers(self, k: int, flavor: Optional[str] = None) -> list:
        return [s for s in self.stages if s.k == k and s.kind == "lift" and (flavor is None or s.flavor == flavor)]

    def class_rep(self, t: CellTerm, depth: int) -> CellTerm:
        """Least term (in term order) equal to ``t`` among the terms of
        nesting depth ``<= depth`` (``t`` itself if none is smaller)."""
        if self.mode == "weak":
            return t
        memo = self._materialized
        key = ("reps", t.arity, t.dim, depth)
        if key not in memo:
            reps: dict = {}
            for u in self.terms(t.arity, t.dim, depth):
                reps.setdefault(self.key(u), u)
            memo[key] = reps
        return memo[key].get(self.key(t), t)

    # ------------------------------------------------------------------
    # equality

    @cached_property
    def _keys(self) -> dict:
        return {}

    def key(self, t: CellTerm):
        """Equality key: equal terms have equal keys."""
        if self.mode == "weak":
            return t
        memo = self._keys
        hit = memo.get(t)
        if hit is not None:
            return hit
        out = self._strict_key(t)
        memo[t] = out
        return out

    def admissible_position(self, p: Table, m: int) -> bool:
        return m >= 1 and (m - 1) in self.unique_ks and p.height <= m

    def _strict_key(self, t: CellTerm):
        p, m = t.arity, t.dim
        if self.admissible_position(p, m):
            return ("L", p, self.key(boundary_op(t, "s")), self.key(boundary_op(t, "t")))
        if m == 1 and 0 in self.unique_ks:
            word = self._word(t)
            if word is not None:
                return ("W", p) + word
        if isinstance(t, Base):
            return ("B", p, t.dim, t.index)
        return ("A", self._gen_key(t.gen), tuple(self.key(a) for a in t.args))

    def _gen_key(self, g: Generator):
        q = g.arity
        if g.src is not None and self.admissible_position(q, g.dim):
            return self.key(App(g, identity_tuple(q)))
        return ("G", g.id)

    def _word(self, t: CellTerm):
        """Reduced free-groupoid word of a 1-cell term over the 1-skeleton of
        its arity, as ``(start vertex, letters)``; ``None`` when the term
        mentions a dimension-1 generator that is not a unique lift."""
        if isinstance(t, Base):
            P = realize(t.arity)
            return (P.src[1][t.index], ((t.index, 1),))
        g = t.gen
        q = g.arity
        if g.flavor != "unique" or q.height > 1 or g.src is None:
            return None
        a, b = g.src, g.tgt
        if not (isinstance(a, Base) and isinstance(b, Base)):
            return None
        Q = realize(q)
        start = self._vertex_image(q, a.index, t.args)
        letters: list = []
        for edge, sign in _tree_path(q, a.index, b.index):
            j = Q.reps[1][edge][0]
            sub = self._word(t.args[j])
            if sub is None:
                return None
            seq = sub[1] if sign > 0 else tuple((e, -s) for e, s in reversed(sub[1]))
            letters.extend(seq)
        return (start, reduce_signed_word(letters))

    @staticmethod
    def _vertex_image(q: Table, v: int, args: tuple) -> int:
        j, side, r = realize(q).reps[0][v]
        img = args[j] if side == "top" else iterated_boundary(args[j], side, r)
        if not isinstance(img, Base):
            raise TermError(f"0-cell image {img} is not a base cell")
        return img.index

    def equal(self, a: CellTerm, b: CellTerm) -> bool:
        if a.arity != b.arity or a.dim != b.dim:
            return False
        if self.mode == "weak":
            return a == b
        return self.key(a) == self.key(b)

    # ------------------------------------------------------------------
    # enumeration

    @cached_property
    def _enum(self) -> dict:
        return {}

    def terms(self, p: Table, m: int, depth: int) -> tuple:
        memo = self._enum
        k = (p, m, depth)
        if k not in memo:
            memo[k] = self._enumerate(p, m, depth)
        return memo[k]

    def _enumerate(self, p: Table, m: int, depth: int) -> tuple:
        P = realize(p)
        out: list = [Base(p, m, i) for i in P.cells(m)]
        if depth >= 1:
            for g in self.gens_of_dim(m):
                for sigma in self.tuples(p, g.arity, depth - 1):
                    out.append(App(g, sigma))
        out.sort(key=term_order_key)
        return tuple(out)

    def tuples(self, p: Table, q: Table, depth: int) -> list:
        """All valley-compatible component lists ``p -> q`` of depth ``<= depth``."""
        peaks, valleys = q.peaks, q.valleys
        cands = [self.terms(p, n, depth) for n in peaks]
        results: list = []

        # index each candidate list by its target boundary at the valley to its left
        indexed = []
        for j in range(1, len(peaks)):
            v = valleys[j - 1]
            idx: dict = defaultdict(list)
            for c in cands[j]:
                idx[self.key(iterated_boundary(c, "t", peaks[j] - v))].append(c)
            indexed.append(idx)

        def extend(prefix):
            j = len(prefix)
            if j == len(peaks):
                results.append(tuple(prefix))
                return
            v = valleys[j - 1]
            need = self.key(iterated_boundary(prefix[-1], "s", peaks[j - 1] - v))
            for c in indexed[j - 1].get(need, ()):
                prefix.append(c)
                extend(prefix)
                prefix.pop()

        for c in cands[0]:
            extend([c])
        return results

    # ------------------------------------------------------------------
    # strict-mode canonical representatives

    def lift_rep(self, k: int, p: Table, f: CellTerm, g: CellTerm) -> Optional[CellTerm]:
        """Canonical lift of the pair ``(f, g)`` at dimension ``k`` over ``p``
        in a strict presentation: the top cell of ``p`` when it is one,
        otherwise the lift from the earliest unique layer; ``None`` outside
        the truncation."""
        m = k + 1
        kf, kg = self.key(f), self.key(g)
        if len(p) == 1 and p.peaks[0] == m:
            top = Base(p, m, 0)
            if self.key(boundary_op(top, "s")) == kf and self.key(boundary_op(top, "t")) == kg:
                return top
        for i, st in enumerate(self.stages):
            if st.kind != "lift" or st.k != k or st.flavor != "unique":
                continue
            below = self.prefix(i)
            d = st.bounds.depth_at(k) if st.bounds else max(f.depth, g.depth)
            cand = Generator(k, p, below.class_rep(f, d), below.class_rep(g, d), "unique", st.tag)
            if self.contains(cand):
                return App(cand, identity_tuple(p))
        return None

    @cached_property
    def _gen_rep(self) -> dict:
        return {}

    def generator_rep(self, g: Generator) -> CellTerm:
        """Canonical member, over ``g.arity``, of the class of ``g``."""
        memo = self._gen_rep
        if g.id in memo:
            return memo[g.id]
        rep: CellTerm = App(g, identity_tuple(g.arity))
        if self.mode == "strict" and g.flavor == "unique" and g.src is not None:
            found = self.lift_rep(g.k, g.arity, g.src, g.tgt)
            if found is not None:
                rep = found
        memo[g.id] = rep
        return rep


def base_theory(mode: str = "weak") -> Presentation:
    return Presentation(mode, ())


def _tree_path(q: Table, a: int, b: int) -> list:
    """Edges (with direction sign) on the unique path from vertex ``a`` to
    ``b`` in the 1-skeleton of ``realize(q)``, which must be a tree."""
    Q = realize(q)
    adj: dict = defaultdict(list)
    for e in Q.cells(1):
        adj[Q.src[1][e]].append((Q.tgt[1][e], e, 1))
        adj[Q.tgt[1][e]].append((Q.src[1][e], e, -1))
    prev: dict = {a: None}
    todo = deque([a])
    while todo:
        v = todo.popleft()
        for w, e, s in adj[v]:
            if w not in prev:
                prev[w] = (v, e, s)
                todo.append(w)
    if b not in prev:
        raise TermError(f"vertices {a}, {b} of {q} are not connected")
    path = []
    v = b
    while prev[v] is not None:
        u, e, s = prev[v]
        path.append((e, s))
        v = u
    return path[::-1]


def reduce_signed_word(letters: Iterable) -> tuple:
    out: list = []
    for e, s in letters:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return tuple(out)


# ----------------------------------------------------------------------
# kernel operations


def normalize(T: Presentation, t) -> CellTerm:
    """Evaluate boundary operators and check every generator is declared.
    In strict mode each unique-flavor generator is replaced by the canonical
    member of its class."""
    if isinstance(t, Bd):
        inner = normalize(T, t.term)
        if t.side not in ("s", "t"):
            raise TermError(f"unknown boundary operator {t.side!r}")
        return boundary_op(inner, t.side)
    if isinstance(t, Base):
        return t
    if t.gen not in T:
        raise TermError(f"undeclared generator g#{t.gen.id}")
    args = tuple(normalize(T, a) for a in t.args)
    if T.mode == "strict" and t.gen.flavor == "unique":
        return substitute(T.generator_rep(t.gen), args)
    return App(t.gen, args)


def boundary(T: Presentation, t: CellTerm) -> tuple:
    if t.dim < 1:
        raise TermError(f"dimension-0 term {t} has no boundary")
    t = normalize(T, t)
    return normalize(T, boundary_op(t, "s")), normalize(T, boundary_op(t, "t"))


def equal(T: Presentation, a: CellTerm, b: CellTerm) -> bool:
    return T.equal(a, b)


def mk_tuple(T: Presentation, source: Table, target: Table, components) -> TupleTerm:
    comps = tuple(components)
    peaks, valleys = target.peaks, target.valleys
    if len(comps) != len(peaks):
        raise TermError(f"{target} needs {len(peaks)} components, got {len(comps)}")
    for j, (c, n) in enumerate(zip(comps, peaks)):
        if c.arity != source or c.dim != n:
            raise TermError(f"component {j} is not an operation {source} -> {n}")
    for j, v in enumerate(valleys):
        left = iterated_boundary(comps[j], "s", peaks[j] - v)
        right = iterated_boundary(comps[j + 1], "t", peaks[j + 1] - v)
        if not T.equal(left, right):
            raise TermError(f"valley {j} mismatch: s-side {left} != t-side {right}")
    return TupleTerm(source, target, comps)


def substitute_tuple(T: Presentation, t: CellTerm, sigma: TupleTerm) -> CellTerm:
    if t.arity != sigma.target:
        raise TermError(f"cannot substitute a tuple into {sigma.target} into a term over {t.arity}")
    return normalize(T, substitute(t, sigma.components))


def globe_cells(p: Table, m: int) -> tuple:
    return tuple(Base(p, m, i) for i in realize(p).cells(m))


def enumerate_terms(T: Presentation, p: Table, m: int, depth: int) -> tuple:
    return T.terms(p, m, depth)


def enumerate_tuples(T: Presentation, p: Table, q: Table, depth: int) -> list:
    return T.tuples(p, q, depth)


# ----------------------------------------------------------------------
# morphisms


class MorphismError(ValueError):
    pass


@dataclass(eq=False)
class TheoryMorphism:
    """Identity on the base theory; ``rule`` sends each source generator to a
    term over its arity in the target."""

    source: Presentation
    target: Presentation
    rule: Callable[[Generator], CellTerm]
    name: str = "F"
    _img: dict = field(default_factory=dict, repr=False)
    _app: dict = field(default_factory=dict, repr=False)

    def image(self, g: Generator) -> CellTerm:
        hit = self._img.get(g.id)
        if hit is None:
            if g not in self.source:
                raise MorphismError(f"{self.name}: g#{g.id} is not a generator of the source")
            hit = self.rule(g)
            self._img[g.id] = hit
        return hit

    def __call__(self, t: CellTerm) -> CellTerm:
        return apply_morphism(self, t)

    def assignment(self) -> dict:
        return {g.id: self.image(g) for g in self.source.generators}


def apply_morphism(F: TheoryMorphism, t: CellTerm) -> CellTerm:
    if isinstance(t, Base):
        return t
    memo = F._app
    hit = memo.get(t)
    if hit is None:
        args = tuple(apply_morphism(F, a) for a in t.args)
        hit = substitute(F.image(t.gen), args)
        memo[t] = hit
    return hit


def identity_morphism(T: Presentation) -> TheoryMorphism:
    return TheoryMorphism(T, T, lambda g: App(g, identity_tuple(g.arity)), "id")


def inclusion(S: Presentation, T: Presentation, name: str = "incl") -> TheoryMorphism:
    def rule(g):
        if g not in T:
            raise MorphismError(f"{name}: g#{g.id} missing from target")
        return App(g, identity_tuple(g.arity))

    return TheoryMorphism(S, T, rule, name)


def compose(F: TheoryMorphism, G: TheoryMorphism, name: Optional[str] = None) -> TheoryMorphism:
    """``G`` after ``F``."""
    return TheoryMorphism(F.source, G.target, lambda g: apply_morphism(G, F.image(g)), name or f"{G.name}.{F.name}")


def check_morphism(F: TheoryMorphism, gens: Optional[Iterable] = None) -> list:
    """Boundary preservation on the given generators (default: all).
    Returns a list of human-readable failures."""
    failures = []
    T = F.target
    for g in F.source.generators if gens is None else gens:
        try:
            u = F.image(g)
        except (MorphismError, TermError) as exc:
            failures.append(f"g#{g.id}: {exc}")
            continue
        if u.arity != g.arity or u.dim != g.dim:
            failures.append(f"g#{g.id}: image {u} has the wrong type")
            continue
        missing = [h.id for h in generators_of(u) if h not in T]
        if missing:
            failures.append(f"g#{g.id}: image mentions undeclared {missing}")
            continue
        if g.src is None:
            continue
        for side, b in (("s", g.src), ("t", g.tgt)):
            want = apply_morphism(F, b)
            got = boundary_op(u, side)
            if not T.equal(got, want):
                failures.append(f"g#{g.id}: {side}-boundary {got} != {want}")
    return failures


def extend_by_universal_property(
    T: Presentation,
    D: Presentation,
    base: TheoryMorphism,
    lift_choice: Callable,
    name: str = "F'",
) -> TheoryMorphism:
    """Extend ``base`` (defined on ``T`` minus its last stage) to all of ``T``
    by sending each last-stage lift over ``(f, g)`` to
    ``lift_choice(g, F f, F g)``; the chosen term must have that boundary."""
    n_last = len(T.stages) - 1

    def rule(g):
        if T.stage_index(g) != n_last:
            return base.image(g)
        ff, fg = apply_morphism(base, g.src), apply_morphism(base, g.tgt)
        u = lift_choice(g, ff, fg)
        for side, want in (("s", ff), ("t", fg)):
            got = boundary_op(u, side)
            if not D.equal(got, want):
                raise MorphismError(
                    f"{name}: lift chosen for g#{g.id} violates {side}-boundary: {got} != {want}"
                )
        return u

    F = TheoryMorphism(T, D, rule, name)
    return F
