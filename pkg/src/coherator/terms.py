"""Terms for operations ``p -> m`` of a freely extended theory.

A term is either a base cell of ``realize(p)`` or a generator applied to a
tuple of terms (one per peak of the generator's arity).  Boundary operators
are applied eagerly, so every term built through this module is already in
normal form: ``s(g[sigma])`` rewrites to ``src(g)[sigma]`` and never stays
symbolic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Union

from .globular import Table, realize

__all__ = [
    "TermError",
    "Generator",
    "Base",
    "App",
    "Bd",
    "CellTerm",
    "TupleTerm",
    "base",
    "identity_tuple",
    "boundary_op",
    "iterated_boundary",
    "substitute",
    "depth",
    "size",
    "generators_of",
    "term_order_key",
]


class TermError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Generator:
    """A formally added operation ``arity -> k+1``.

    ``src``/``tgt`` are normal terms of dimension ``k`` over ``arity``; they
    are ``None`` only for dimension-0 sphere generators.  ``layer`` names the
    extension that created the generator (e.g. ``R1.0`` for the first
    application of the dimension-1 fibrant replacement).
    """

    k: int
    arity: Table
    src: Optional["CellTerm"]
    tgt: Optional["CellTerm"]
    flavor: str = "free"
    layer: str = "R"
    id: str = field(init=False)

    def __post_init__(self):
        if self.flavor not in ("free", "unique"):
            raise TermError(f"unknown flavor {self.flavor!r}")
        if (self.src is None) != (self.tgt is None):
            raise TermError("generator needs both boundary terms or neither")
        if self.src is not None:
            for b in (self.src, self.tgt):
                if b.dim != self.k or b.arity != self.arity:
                    raise TermError(f"boundary {b} is not an operation {self.arity} -> {self.k}")
        elif self.k != -1:
            raise TermError("only dimension-0 generators may omit their boundary")
        desc = f"{self.layer}|{self.k}|{self.arity}|{self.src}|{self.tgt}|{self.flavor}"
        object.__setattr__(self, "id", hashlib.sha256(desc.encode()).hexdigest()[:12])

    @property
    def dim(self) -> int:
        return self.k + 1

    @property
    def boundary(self):
        return (self.src, self.tgt)

    def __eq__(self, other):
        return isinstance(other, Generator) and other.id == self.id

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"g#{self.id}"


@dataclass(frozen=True)
class Base:
    arity: Table
    dim: int
    index: int

    def __post_init__(self):
        P = realize(self.arity)
        if self.index not in P.cells(self.dim):
            raise TermError(f"no cell({self.dim},{self.index}) in {self.arity}")

    def __hash__(self):
        return hash((self.arity, self.dim, self.index))

    def __str__(self):
        return f"cell({self.dim},{self.index})"

    @property
    def depth(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return 0


@dataclass(frozen=True)
class App:
    gen: Generator
    args: tuple

    def __post_init__(self):
        peaks = self.gen.arity.peaks
        if len(self.args) != len(peaks):
            raise TermError(f"{self.gen!r} expects {len(peaks)} arguments, got {len(self.args)}")
        p = self.args[0].arity
        for a, n in zip(self.args, peaks):
            if a.arity != p or a.dim != n:
                raise TermError(f"argument {a} does not fit peak of dimension {n}")

    @cached_property
    def _hash(self) -> int:
        return hash((self.gen.id, self.args))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"g#{self.gen.id}[" + "; ".join(map(str, self.args)) + "]"

    @property
    def arity(self) -> Table:
        return self.args[0].arity

    @property
    def dim(self) -> int:
        return self.gen.dim

    @cached_property
    def depth(self) -> int:
        return 1 + max(a.depth for a in self.args)

    @cached_property
    def size(self) -> int:
        return 1 + sum(a.size for a in self.args)


@dataclass(frozen=True)
class Bd:
    """Unevaluated boundary ``s(t)`` / ``t(t)``; only produced by the parser."""

    side: str
    term: object

    def __str__(self):
        return f"{self.side}({self.term})"


CellTerm = Union[Base, App]


@dataclass(frozen=True)
class TupleTerm:
    """Map ``source -> target``: one term over ``source`` per peak of ``target``."""

    source: Table
    target: Table
    components: tuple

    def __str__(self):
        return "[" + ", ".join(map(str, self.components)) + "]"


def base(arity: Table, dim: int, index: int) -> Base:
    return Base(arity, dim, index)


@lru_cache(maxsize=None)
def identity_tuple(q: Table) -> tuple:
    Q = realize(q)
    return tuple(Base(q, n, Q.peak_cell(j)) for j, n in enumerate(q.peaks))


@lru_cache(maxsize=None)
def boundary_op(t: CellTerm, side: str) -> CellTerm:
    """``s(t)`` or ``t(t)`` in normal form."""
    if t.dim < 1:
        raise TermError(f"dimension-0 term {t} has no boundary")
    if isinstance(t, Base):
        P = realize(t.arity)
        table = P.src if side == "s" else P.tgt
        return Base(t.arity, t.dim - 1, table[t.dim][t.index])
    b = t.gen.src if side == "s" else t.gen.tgt
    if b is None:
        raise TermError(f"{t.gen!r} has no declared boundary")
    return substitute(b, t.args)


def iterated_boundary(t: CellTerm, side: str, r: int) -> CellTerm:
    # globularity: only the outermost operator of an iterated boundary matters
    for _ in range(r):
        t = boundary_op(t, side)
    return t


@lru_cache(maxsize=None)
def substitute(t: CellTerm, sigma: tuple) -> CellTerm:
    """Precompose ``t`` (over ``q``) with the tuple ``sigma`` (over some ``p``,
    one component per peak of ``q``)."""
    if isinstance(t, Base):
        peaks = t.arity.peaks
        if len(sigma) != len(peaks):
            raise TermError(f"arity mismatch substituting into {t} over {t.arity}")
        j, side, r = realize(t.arity).reps[t.dim][t.index]
        comp = sigma[j]
        if comp.dim != peaks[j]:
            raise TermError(f"component {comp} does not fit peak {j} of {t.arity}")
        return comp if side == "top" else iterated_boundary(comp, side, r)
    return App(t.gen, tuple(substitute(a, sigma) for a in t.args))


def depth(t: CellTerm) -> int:
    return t.depth


def size(t: CellTerm) -> int:
    return t.size


def generators_of(t: CellTerm) -> set:
    out: set = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            out.add(u.gen)
            stack.extend(u.args)
    return out


def term_order_key(t: CellTerm):
    if isinstance(t, Base):
        return (0, t.index, "", ())
    return (1, 0, t.gen.id, tuple(term_order_key(a) for a in t.args))
