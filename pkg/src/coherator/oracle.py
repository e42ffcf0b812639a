"""Independent hom-set counts for the strict theory over height-1 arities,
free-groupoid word reduction, and a congruence-closure route to strict
equality used to cross-check the canonical keys of strict presentations.

Nothing here consults ``Presentation.key``: the oracle counts come from the
recursion vertices / ordered vertex pairs / parallel pairs, and the
saturation works on a finite universe of terms with union-find.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .distributive import LawCheckReport, Verdict
from .globular import Table, realize
from .terms import App, Base, CellTerm, Generator, boundary_op, identity_tuple
from .theory import FragmentBounds, Presentation

__all__ = [
    "OracleScopeError",
    "WordError",
    "StrictHomTable",
    "strict_hom_table",
    "strict_hom_count",
    "parallel_pairs_tally",
    "parallel_pairs_filter",
    "free_reduce",
    "strict_reduce_word",
    "parse_word",
    "format_word",
    "tree_path",
    "oracle_word",
    "Saturation",
    "saturate",
    "class_count",
    "crosscheck_strict",
]


class OracleScopeError(ValueError):
    """Arity outside the oracle's scope (height above 1)."""


class WordError(ValueError):
    """A word that does not compose in the 1-skeleton."""


def _check_scope(p: Table) -> None:
    if p.height > 1:
        raise OracleScopeError(f"oracle covers height <= 1 only, got {p} of height {p.height}")


def _assert_tree(p: Table) -> None:
    P = realize(p)
    nv = P.counts[0]
    ne = P.counts[1] if P.dim >= 1 else 0
    if ne != nv - 1:
        raise AssertionError(f"1-skeleton of {p} is not a tree: {nv} vertices, {ne} edges")
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(ne):
        a, b = find(P.src[1][e]), find(P.tgt[1][e])
        if a == b:
            raise AssertionError(f"1-skeleton of {p} has a cycle")
        parent[a] = b


# ----------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class StrictHomTable:
    """Cells of the free strict groupoid on ``realize(arity)``, level by
    level.  Level 0: vertices.  Level 1: ordered vertex pairs (the reduced
    word is the tree path).  Level m+1: parallel pairs of level m."""

    arity: Table
    counts: tuple
    cells: tuple  # per level: tuple of (source, target) pairs, level 0 plain ints

    def representatives(self, level: int) -> tuple:
        if level == 1:
            return tuple(format_word(self.arity, tree_path(self.arity, a, b)) or f"id{a}" for a, b in self.cells[1])
        return tuple(map(str, self.cells[level]))


def strict_hom_table(p: Table, top: int) -> StrictHomTable:
    _check_scope(p)
    _assert_tree(p)
    levels = tuple(tuple(_level_cells(p, m)) for m in range(top + 1))
    return StrictHomTable(p, tuple(len(c) for c in levels), levels)


def strict_hom_count(p: Table, n: int) -> int:
    if n < 0:
        raise ValueError("dimension must be non-negative")
    _check_scope(p)
    # one morphism per ordered vertex pair needs a tree-shaped 1-skeleton
    _assert_tree(p)
    if n == 0:
        return realize(p).counts[0]
    return parallel_pairs_tally(p, n - 1)


def _level_cells(p: Table, m: int) -> list:
    """Explicit cells of level ``m`` as nested boundary pairs."""
    nv = realize(p).counts[0]
    cells: list = list(range(nv))
    for level in range(1, m + 1):
        if level == 1:
            cells = [(a, b) for a in cells for b in cells]
        else:
            cells = [(x, y) for x in cells for y in cells if _src(x) == _src(y) and _tgt(x) == _tgt(y)]
    return cells


def _src(cell):
    return cell[0]


def _tgt(cell):
    return cell[1]


def parallel_pairs_tally(p: Table, m: int) -> int:
    """Parallel pairs of level-``m`` cells, via a tally over boundaries."""
    cells = _level_cells(p, m)
    if m == 0:
        return len(cells) ** 2
    tally = Counter((_src(c), _tgt(c)) for c in cells)
    return sum(v * v for v in tally.values())


def parallel_pairs_filter(p: Table, m: int) -> int:
    """Same count by testing every ordered pair."""
    cells = _level_cells(p, m)
    if m == 0:
        return len(cells) ** 2
    return sum(1 for x in cells for y in cells if _src(x) == _src(y) and _tgt(x) == _tgt(y))


# ----------------------------------------------------------------------
# words


_LETTER = re.compile(r"^([a-z])(\^-1)?$")


def _edge_name(e: int) -> str:
    return chr(ord("a") + e)


def parse_word(text: str) -> list:
    """``"b.a^-1"`` -> ``[(1, 1), (0, -1)]``; the empty string is the empty word."""
    text = text.strip()
    if not text:
        return []
    out = []
    for part in text.split("."):
        m = _LETTER.match(part.strip())
        if not m:
            raise WordError(f"bad letter {part!r}; expected e.g. a or a^-1")
        out.append((ord(m.group(1)) - ord("a"), -1 if m.group(2) else 1))
    return out


def format_word(p: Optional[Table], word) -> str:
    return ".".join(_edge_name(e) + ("^-1" if s < 0 else "") for e, s in word)


def free_reduce(word) -> tuple:
    """Cancel adjacent ``e e^-1`` and ``e^-1 e`` until none is left."""
    out: list = []
    for e, s in word:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return tuple(out)


def strict_reduce_word(p: Table, word, start: Optional[int] = None) -> tuple:
    """Reduce a word read left to right along the 1-skeleton of
    ``realize(p)``.  Returns ``(start, end, reduced)``; raises
    :class:`WordError` when consecutive letters do not meet."""
    _check_scope(p)
    P = realize(p)
    ne = P.counts[1] if P.dim >= 1 else 0
    word = list(word)
    if not word:
        if start is None:
            raise WordError("the empty word needs a start vertex")
        return start, start, ()
    here = start
    first = None
    for e, s in word:
        if not 0 <= e < ne:
            raise WordError(f"no edge {_edge_name(e)} in {p}")
        a, b = (P.src[1][e], P.tgt[1][e]) if s > 0 else (P.tgt[1][e], P.src[1][e])
        if here is not None and a != here:
            raise WordError(f"letter {format_word(p, [(e, s)])} starts at vertex {a}, not {here}")
        if first is None:
            first = a
        here = b
    return first, here, free_reduce(word)


def tree_path(p: Table, a: int, b: int) -> tuple:
    """Reduced word from vertex ``a`` to ``b`` (the unique tree path)."""
    P = realize(p)
    adj = defaultdict(list)
    for e in P.cells(1):
        adj[P.src[1][e]].append((P.tgt[1][e], (e, 1)))
        adj[P.tgt[1][e]].append((P.src[1][e], (e, -1)))
    prev = {a: None}
    todo = [a]
    while todo:
        v = todo.pop()
        for w, letter in adj[v]:
            if w not in prev:
                prev[w] = (v, letter)
                todo.append(w)
    if b not in prev:
        raise WordError(f"vertices {a}, {b} of {p} are not connected")
    path = []
    v = b
    while prev[v] is not None:
        v, letter = prev[v][0], prev[v][1]
        path.append(letter)
    return tuple(reversed(path))


def oracle_word(t: CellTerm) -> tuple:
    """The reduced word a dimension-1 term must have in the strict theory:
    the tree path between its boundary vertices."""
    if t.dim != 1:
        raise ValueError("oracle words are for dimension-1 terms")
    _check_scope(t.arity)
    s, e = boundary_op(t, "s"), boundary_op(t, "t")
    if not (isinstance(s, Base) and isinstance(e, Base)):
        raise ValueError(f"boundary of {t} is not made of base vertices")
    return (s.index, e.index, tree_path(t.arity, s.index, e.index))


# ----------------------------------------------------------------------
# congruence closure


@dataclass
class Saturation:
    """Union-find classes on a finite universe of terms, with the class
    count after each round (non-increasing)."""

    universe: dict  # (arity, dim) -> tuple of terms
    parent: dict = field(default_factory=dict)
    rounds: list = field(default_factory=list)

    def find(self, t):
        root = t
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while t != root:
            nxt = self.parent.get(t, t)
            self.parent[t] = root
            t = nxt
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def n_classes(self, arity: Table, dim: int) -> int:
        return len({self.find(t) for t in self.universe[(arity, dim)]})


def _admissible(T: Presentation, p: Table, m: int) -> bool:
    # lifts are unique: a dimension-(m-1) unique layer exists and p fits it
    return m >= 1 and p.height <= m and any(
        st.kind == "lift" and st.flavor == "unique" and st.k == m - 1 for st in T.stages
    )


def saturate(T: Presentation, arities, top: int, depth: int, max_rounds: int = 20) -> Saturation:
    """Close the terms of depth ``<= depth`` and dimension ``<= top`` over
    ``arities`` (plus the arities of every generator they mention) under:
    two terms in a uniquely contractible position with identified
    boundaries are identified, and applications of identified operations
    to identified arguments are identified."""
    arities = list(dict.fromkeys(arities))
    todo = list(arities)
    seen = set(arities)
    universe: dict = {}
    while todo:
        p = todo.pop(0)
        for d in range(top + 1):
            terms = T.terms(p, d, depth)
            universe[(p, d)] = terms
            for t in terms:
                if isinstance(t, App) and t.gen.arity not in seen:
                    seen.add(t.gen.arity)
                    todo.append(t.gen.arity)
    S = Saturation(universe)
    for q in list(seen):
        for d in range(top + 1):
            if (q, d) not in universe:
                universe[(q, d)] = T.terms(q, d, max(depth, 1))

    member = {k: set(v) for k, v in universe.items()}

    def op_rep(g: Generator):
        t = App(g, identity_tuple(g.arity))
        return S.find(t) if t in member.get((g.arity, g.dim), ()) else ("gen", g.id)

    def count():
        return sum(len({S.find(t) for t in ts}) for ts in universe.values())

    S.rounds.append(count())
    for _ in range(max_rounds):
        changed = False
        for (p, d), terms in sorted(universe.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if d >= 1 and _admissible(T, p, d):
                groups = defaultdict(list)
                for t in terms:
                    s, e = boundary_op(t, "s"), boundary_op(t, "t")
                    if s in member[(p, d - 1)] and e in member[(p, d - 1)]:
                        groups[(S.find(s), S.find(e))].append(t)
                for grp in groups.values():
                    for u in grp[1:]:
                        changed |= S.union(grp[0], u)
            sig: dict = {}
            for t in terms:
                if isinstance(t, App):
                    k = (op_rep(t.gen), tuple(S.find(a) for a in t.args))
                    if k in sig:
                        changed |= S.union(sig[k], t)
                    else:
                        sig[k] = t
        S.rounds.append(count())
        if not changed:
            break
    return S


def class_count(T: Presentation, p: Table, n: int, depth: int) -> int:
    """Strict-equality classes among the terms ``p -> n`` of depth ``<= depth``."""
    return len({T.key(t) for t in T.terms(p, n, depth)})


def crosscheck_strict(T: Presentation, p: Table, n: int, depth: int, b: Optional[FragmentBounds] = None) -> LawCheckReport:
    """Compare class counts of ``T`` at ``p -> n`` with the oracle.  The
    count is deemed converged when it is unchanged at ``depth - 1``."""
    b = b or FragmentBounds()
    report = LawCheckReport("strict-crosscheck", (str(p), n, depth), b, T.mode)
    want = strict_hom_count(p, n)
    got = class_count(T, p, n, depth)
    prev = class_count(T, p, n, depth - 1) if depth >= 1 else None
    converged = prev == got
    note = f"classes={got} oracle={want} previous-depth={prev}"
    report.verdicts.append(Verdict("class-count", "-", "-", str(p), got == want, str(got), str(want), note))
    if not converged:
        report.notes.append(f"not converged: depth {depth - 1} gives {prev}, depth {depth} gives {got}")
        report.inconclusive = True
    for st in T.stages:
        if st.kind == "lift":
            report.truncation.append((st.tag, "fixpoint" if st.fixpoint else f"bound(iterations={st.iterations})"))
    return report
