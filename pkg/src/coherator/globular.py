"""Globe-category combinatorics: tables of dimensions, their pasting-diagram
realizations, and brute-force enumeration of maps between them.

A table ``(n1, v1, n2, ..., n_{k+1})`` is realized by taking one globe per
peak ``n_i`` and gluing the ``v_i``-dimensional *source* boundary of globe
``i`` to the ``v_i``-dimensional *target* boundary of globe ``i+1``.  With
this convention a tuple ``[x0, x1]`` over ``(1,0,1)`` is a composable pair
with ``s(x0) == t(x1)``, i.e. ``x0`` is the later arrow.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

__all__ = [
    "TableError",
    "Table",
    "PastingDiagram",
    "ThetaMor",
    "realize",
    "height",
    "theta_hom",
    "theta_hom_bruteforce",
    "theta_compose",
    "theta_identity",
    "tables_up_to",
]


class TableError(ValueError):
    """Malformed table of dimensions."""


_TABLE_RE = re.compile(r"^\(\s*\d+(\s*,\s*\d+)*\s*\)$")


@dataclass(frozen=True, order=True)
class Table:
    dims: tuple[int, ...]

    def __post_init__(self):
        d = self.dims
        if not isinstance(d, tuple) or not d:
            raise TableError(f"empty table {d!r}")
        if any((not isinstance(x, int)) or x < 0 for x in d):
            raise TableError(f"table entries must be naturals: {d!r}")
        if len(d) % 2 == 0:
            raise TableError(f"table must have odd length: {d!r}")
        for i in range(1, len(d), 2):
            if not (d[i - 1] > d[i] < d[i + 1]):
                raise TableError(f"zigzag violated at valley {i // 2}: {d!r}")

    @classmethod
    def of(cls, *dims: int) -> Table:
        return cls(tuple(dims))

    @classmethod
    def parse(cls, text: str) -> Table:
        text = text.strip()
        if not _TABLE_RE.match(text):
            raise TableError(f"cannot parse table {text!r}")
        return cls(tuple(int(x) for x in text[1:-1].split(",")))

    @property
    def peaks(self) -> tuple[int, ...]:
        return self.dims[0::2]

    @property
    def valleys(self) -> tuple[int, ...]:
        return self.dims[1::2]

    @property
    def height(self) -> int:
        return max(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.dims)) + ")"

    def __repr__(self) -> str:
        return f"Table{self}"


def height(p: Table) -> int:
    return p.height


# A globe cell is (peak index, dimension, side) with side in {"s", "t", "top"}.
_GlobeCell = tuple[int, int, str]


@dataclass(frozen=True)
class PastingDiagram:
    """Finite globular set.

    ``counts[d]`` is the number of d-cells; ``src[d]``/``tgt[d]`` map the
    d-cells (d >= 1) to (d-1)-cells.  ``reps[d][i]`` is a representative
    ``(peak, side, r)`` of the cell: it equals ``side^r`` applied to the top
    cell of globe ``peak`` (``r == 0`` and side ``"top"`` for the top cell).
    """

    table: Table
    counts: tuple[int, ...]
    src: tuple[tuple[int, ...], ...]
    tgt: tuple[tuple[int, ...], ...]
    reps: tuple[tuple[tuple[int, str, int], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.counts) - 1

    def cells(self, d: int) -> range:
        if d < 0 or d > self.dim:
            return range(0)
        return range(self.counts[d])

    def peak_cell(self, j: int) -> int:
        """Index of the top cell of globe ``j`` (at dimension of that peak)."""
        n = self.table.peaks[j]
        return self.reps[n].index((j, "top", 0))

    def dump(self) -> str:
        lines = [f"diagram {self.table}"]
        for d in range(self.dim + 1):
            for i in range(self.counts[d]):
                if d == 0:
                    lines.append(f"  cell({d},{i})")
                else:
                    lines.append(
                        f"  cell({d},{i}) : cell({d - 1},{self.src[d][i]}) -> cell({d - 1},{self.tgt[d][i]})"
                    )
        return "\n".join(lines)


def _globe_boundary(c: _GlobeCell) -> tuple[_GlobeCell, _GlobeCell]:
    j, d, _ = c
    return (j, d - 1, "s"), (j, d - 1, "t")


@lru_cache(maxsize=None)
def realize(p: Table) -> PastingDiagram:
    """Glue one globe per peak along the valleys of ``p``."""
    peaks, valleys = p.peaks, p.valleys
    parent: dict[_GlobeCell, _GlobeCell] = {}

    def find(c):
        while parent.get(c, c) != c:
            c = parent[c]
        return c

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        # keep the earlier globe's cell as root
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra

    def glue(a, b):
        union(a, b)
        if a[1] > 0:
            (sa, ta), (sb, tb) = _globe_boundary(a), _globe_boundary(b)
            glue(sa, sb)
            glue(ta, tb)

    for j, v in enumerate(valleys):
        glue((j, v, "s"), (j + 1, v, "t"))

    order: list[_GlobeCell] = []
    for j, n in enumerate(peaks):
        for d in range(n):
            order.append((j, d, "s"))
            order.append((j, d, "t"))
        order.append((j, n, "top"))

    hgt = p.height
    index: dict[_GlobeCell, int] = {}
    reps: list[list[tuple[int, str, int]]] = [[] for _ in range(hgt + 1)]
    for c in order:
        root = find(c)
        if root in index:
            continue
        j, d, side = c
        index[root] = len(reps[d])
        reps[d].append((j, side, 0 if side == "top" else peaks[j] - d))

    def idx(c):
        return index[find(c)]

    src: list[tuple[int, ...]] = [()]
    tgt: list[tuple[int, ...]] = [()]
    for d in range(1, hgt + 1):
        s_row, t_row = [], []
        for j, side, r in reps[d]:
            cell = (j, d, side) if side != "top" else (j, d, "top")
            s, t = _globe_boundary(cell)
            s_row.append(idx(s))
            t_row.append(idx(t))
        src.append(tuple(s_row))
        tgt.append(tuple(t_row))
    return PastingDiagram(
        table=p,
        counts=tuple(len(r) for r in reps),
        src=tuple(src),
        tgt=tuple(tgt),
        reps=tuple(tuple(r) for r in reps),
    )


@dataclass(frozen=True)
class ThetaMor:
    """Globular map ``realize(source) -> realize(target)``."""

    source: Table
    target: Table
    images: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        parts = ["[" + ",".join(map(str, row)) + "]" for row in self.images]
        return f"{self.source} -> {self.target} : " + " ".join(parts)


def _commutes(P: PastingDiagram, Q: PastingDiagram, images) -> bool:
    for d in range(1, P.dim + 1):
        for x in P.cells(d):
            y = images[d][x]
            if images[d - 1][P.src[d][x]] != Q.src[d][y]:
                return False
            if images[d - 1][P.tgt[d][x]] != Q.tgt[d][y]:
                return False
    return True


@lru_cache(maxsize=None)
def theta_hom(p: Table, q: Table) -> tuple[ThetaMor, ...]:
    """All globular maps realize(p) -> realize(q), in lexicographic order of
    their image rows.  Backtracking from the top dimension down: once a
    d-cell is placed, the images of its boundary are forced."""
    P, Q = realize(p), realize(q)
    if P.dim > Q.dim:
        return ()
    cells = [(d, x) for d in range(P.dim, -1, -1) for x in P.cells(d)]
    found: list[tuple[tuple[int, ...], ...]] = []
    img: dict[tuple[int, int], int] = {}

    def place(d, x, y, trail) -> bool:
        key = (d, x)
        if key in img:
            return img[key] == y
        img[key] = y
        trail.append(key)
        if d > 0:
            if not place(d - 1, P.src[d][x], Q.src[d][y], trail):
                return False
            if not place(d - 1, P.tgt[d][x], Q.tgt[d][y], trail):
                return False
        return True

    def search(pos: int):
        if pos == len(cells):
            found.append(tuple(tuple(img[(d, x)] for x in P.cells(d)) for d in range(P.dim + 1)))
            return
        d, x = cells[pos]
        if (d, x) in img:
            search(pos + 1)
            return
        for y in Q.cells(d):
            trail: list = []
            if place(d, x, y, trail):
                search(pos + 1)
            for key in trail:
                del img[key]

    search(0)
    return tuple(ThetaMor(p, q, rows) for rows in sorted(found))


def theta_hom_bruteforce(p: Table, q: Table) -> int:
    """Count maps by trying every dimensionwise function (no pruning)."""
    P, Q = realize(p), realize(q)
    if P.dim > Q.dim:
        return 0
    choices = [itertools.product(Q.cells(d), repeat=P.counts[d]) for d in range(P.dim + 1)]
    return sum(1 for images in itertools.product(*map(list, choices)) if _commutes(P, Q, images))


def theta_identity(p: Table) -> ThetaMor:
    P = realize(p)
    return ThetaMor(p, p, tuple(tuple(P.cells(d)) for d in range(P.dim + 1)))


def theta_compose(f: ThetaMor, g: ThetaMor) -> ThetaMor:
    """``g`` after ``f``; requires ``f.target == g.source``."""
    if f.target != g.source:
        raise ValueError(f"cannot compose {f.source}->{f.target} with {g.source}->{g.target}")
    rows = tuple(tuple(g.images[d][y] for y in row) for d, row in enumerate(f.images))
    return ThetaMor(f.source, g.target, rows)


def tables_up_to(max_len: int, max_height: int) -> list[Table]:
    """Every table with at most ``max_len`` entries, all ``<= max_height``,
    sorted by (length, entries)."""
    out: list[Table] = []
    for length in range(1, max_len + 1, 2):
        for dims in itertools.product(range(max_height + 1), repeat=length):
            try:
                out.append(Table(dims))
            except TableError:
                continue
    return out
