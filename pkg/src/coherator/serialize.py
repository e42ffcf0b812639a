"""Canonical text format for presentations and towers, and its parser.

Presentation::

    presentation mode=weak stages=2
    stage 1 kind=lift k=0 flavor=free copy=0 lazy=yes bounds=3,2,1,2 iterations=1 fixpoint=yes
    stage 2 kind=sphere k=-1 flavor=free copy=0 lazy=no bounds=- iterations=1 fixpoint=yes
    gen g#0123456789ab stage=2 layer=sphere(1).0.s k=-1 arity=(1) flavor=free | - | -
    end

Lazy stages list no generators: they are determined by the stages below
and their bounds.  A tower wraps the presentation of its last stage::

    tower mode=ic bounds=3,2,1,2 cuts=0,1,2
    status R0.0 1 fixpoint
    presentation ...
    end

Terms are written ``cell(d,i)`` and ``g#id[arg; arg]``; the parser also
accepts ``s(term)`` and ``t(term)``.
"""

from __future__ import annotations

import re
from typing import Callable, Optional

from .globular import Table, TableError
from .soa import Tower
from .terms import App, Base, Bd, CellTerm, Generator, TermError, boundary_op
from .theory import FragmentBounds, Presentation, Stage, inclusion, normalize

__all__ = [
    "ParseError",
    "serialize_term",
    "serialize_presentation",
    "serialize_tower",
    "serialize",
    "parse_term",
    "parse_presentation",
    "parse_tower",
    "parse",
    "format_bounds",
    "parse_bounds",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected
        where = f"line {line}, column {col}: " if line else ""
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{tail}")


# ----------------------------------------------------------------------
# writing


def serialize_term(t: CellTerm) -> str:
    if isinstance(t, Base):
        return f"cell({t.dim},{t.index})"
    return f"g#{t.gen.id}[" + "; ".join(serialize_term(a) for a in t.args) + "]"


def format_bounds(b: Optional[FragmentBounds]) -> str:
    if b is None:
        return "-"
    out = f"{b.max_arity_length},{b.max_dim},{b.max_depth},{b.max_iterations}"
    for k, length, d in b.per_dim:
        out += f";{k}:{length}:{d}"
    return out


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def serialize_presentation(T: Presentation) -> str:
    lines = [f"presentation mode={T.mode} stages={len(T.stages)}"]
    for i, st in enumerate(T.stages, start=1):
        lines.append(
            f"stage {i} kind={st.kind} k={st.k} flavor={st.flavor} copy={st.copy} lazy={_yn(st.lazy)} "
            f"bounds={format_bounds(st.bounds)} iterations={st.iterations} fixpoint={_yn(st.fixpoint)}"
        )
        if st.lazy:
            continue
        for g in st.explicit:
            src = "-" if g.src is None else serialize_term(g.src)
            tgt = "-" if g.tgt is None else serialize_term(g.tgt)
            lines.append(f"gen g#{g.id} stage={i} layer={g.layer} k={g.k} arity={g.arity} flavor={g.flavor} | {src} | {tgt}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_tower(tower: Tower) -> str:
    cuts = ",".join(str(len(T.stages)) for T in tower.stages)
    lines = [f"tower mode={tower.mode} bounds={format_bounds(tower.bounds)} cuts={cuts}"]
    for tag, n, fix in tower.status:
        lines.append(f"status {tag} {n} {'fixpoint' if fix else 'bound'}")
    return "\n".join(lines) + "\n" + serialize_presentation(tower.last)


def serialize(x) -> str:
    if isinstance(x, Tower):
        return serialize_tower(x)
    if isinstance(x, Presentation):
        return serialize_presentation(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ----------------------------------------------------------------------
# reading terms


class _TermParser:
    def __init__(self, text: str, arity: Table, resolve: Callable, line: int = 0, col0: int = 1):
        self.s = text
        self.i = 0
        self.arity = arity
        self.resolve = resolve
        self.line = line
        self.col0 = col0

    def error(self, msg, expected=""):
        raise ParseError(msg, self.line, self.col0 + self.i, expected)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] == " ":
            self.i += 1

    def eat(self, tok: str):
        self.ws()
        if not self.s.startswith(tok, self.i):
            found = self.s[self.i : self.i + 8] or "end of input"
            self.error(f"unexpected {found!r}", repr(tok))
        self.i += len(tok)

    def number(self) -> int:
        self.ws()
        m = re.compile(r"\d+").match(self.s, self.i)
        if not m:
            self.error("missing number", "a natural number")
        self.i = m.end()
        return int(m.group())

    def term(self):
        self.ws()
        start = self.i
        if self.s.startswith("cell(", self.i):
            self.i += 5
            d = self.number()
            self.eat(",")
            idx = self.number()
            self.eat(")")
            try:
                return Base(self.arity, d, idx)
            except TermError as exc:
                self.i = start
                self.error(str(exc))
        if self.s.startswith("g#", self.i):
            self.i += 2
            m = re.compile(r"[0-9a-f]{12}").match(self.s, self.i)
            if not m:
                self.error("malformed generator hash", "12 hex digits")
            gid = m.group()
            g = self.resolve(gid)
            if g is None:
                self.i = start
                self.error(f"dangling reference g#{gid}: no generator with this hash is declared before this line")
            self.i = m.end()
            self.eat("[")
            args = [self.term()]
            self.ws()
            while self.s.startswith(";", self.i):
                self.i += 1
                args.append(self.term())
                self.ws()
            self.eat("]")
            try:
                return App(g, tuple(args))
            except TermError as exc:
                self.i = start
                self.error(str(exc))
        for side in ("s", "t"):
            if self.s.startswith(side + "(", self.i):
                self.i += 2
                inner = self.term()
                self.eat(")")
                return Bd(side, inner)
        self.error(f"unexpected {self.s[self.i:self.i + 8] or 'end of input'!r}", "cell(d,i), g#<hash>[...], s(...) or t(...)")

    def parse(self):
        t = self.term()
        self.ws()
        if self.i != len(self.s):
            self.error(f"trailing text {self.s[self.i:self.i + 8]!r}", "end of term")
        return t


def parse_term(text: str, arity: Table, T: Optional[Presentation] = None, line: int = 0, col: int = 1) -> CellTerm:
    """Parse a term over ``arity``.  Generators are looked up in ``T``; with
    ``T`` given, boundary operators are evaluated and the result is
    normalized."""
    index = _GenIndex(T) if T is not None else _GenIndex(Presentation())
    t = _TermParser(text, arity, index.get, line, col).parse()
    if T is not None:
        try:
            return normalize(T, t)
        except TermError as exc:
            raise ParseError(str(exc), line, col) from None
    return t


def _evaluate(t):
    """Resolve ``s(...)``/``t(...)`` without membership checks."""
    if isinstance(t, Bd):
        return boundary_op(_evaluate(t.term), t.side)
    if isinstance(t, App):
        return App(t.gen, tuple(_evaluate(a) for a in t.args))
    return t


class _GenIndex:
    """Id lookup over a presentation, materializing lazy stages on demand."""

    def __init__(self, T: Presentation, extra: Optional[dict] = None):
        self.T = T
        self.extra = extra if extra is not None else {}
        self.done = 0
        self.found: dict = {}

    def get(self, gid: str):
        if gid in self.extra:
            return self.extra[gid]
        while gid not in self.found and self.done < len(self.T.stages):
            for g in self.T.stage_generators(self.done):
                self.found[g.id] = g
            self.done += 1
        return self.found.get(gid)


# ----------------------------------------------------------------------
# reading presentations and towers


_FIELD = re.compile(r"(\w+)=(\S+)")


def _fields(text: str, line: int, required) -> dict:
    out = {m.group(1): (m.group(2), m.start(2) + 1) for m in _FIELD.finditer(text)}
    for name in required:
        if name not in out:
            raise ParseError(f"missing field {name}=", line, len(text) + 1, f"{name}=<value>")
    return out


def parse_bounds(text: str, line: int = 0, col: int = 1) -> Optional[FragmentBounds]:
    if text == "-":
        return None
    parts = text.split(";")
    try:
        L, D, depth, it = (int(x) for x in parts[0].split(","))
        per = tuple(tuple(int(y) for y in p.split(":")) for p in parts[1:])
        return FragmentBounds(L, D, depth, it, per)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad bounds {text!r}: {exc}", line, col, "L,D,depth,iter[;k:L:depth...]") from None


def _int(fields, name, line) -> int:
    v, col = fields[name]
    try:
        return int(v)
    except ValueError:
        raise ParseError(f"{name} must be an integer, got {v!r}", line, col, "an integer") from None


def _flag(fields, name, line) -> bool:
    v, col = fields[name]
    if v not in ("yes", "no"):
        raise ParseError(f"{name} must be yes or no, got {v!r}", line, col, "yes|no")
    return v == "yes"


def _table(v: str, line: int, col: int) -> Table:
    try:
        return Table.parse(v)
    except TableError as exc:
        raise ParseError(str(exc), line, col, "a table like (1,0,1)") from None


def _parse_presentation_lines(lines, start: int):
    """Parse from ``lines[start]`` (0-based) up to ``end``; returns the
    presentation and the index after ``end``."""
    n = start
    if n >= len(lines) or not lines[n].startswith("presentation "):
        raise ParseError("expected a presentation header", n + 1, 1, "presentation mode=... stages=N")
    head = _fields(lines[n], n + 1, ("mode", "stages"))
    mode = head["mode"][0]
    if mode not in ("weak", "strict"):
        raise ParseError(f"unknown mode {mode!r}", n + 1, head["mode"][1], "weak|strict")
    n_stages = _int(head, "stages", n + 1)
    n += 1
    stages: list = []
    pending: Optional[dict] = None
    gens: list = []
    T = Presentation(mode, ())
    index = _GenIndex(T, {})

    def close_stage():
        nonlocal T, pending, gens, index
        if pending is None:
            return
        explicit = None if pending["lazy"] else tuple(gens)
        try:
            st = Stage(
                pending["k"],
                pending["flavor"],
                pending["copy"],
                explicit,
                kind=pending["kind"],
                bounds=pending["bounds"],
                iterations=pending["iterations"],
                fixpoint=pending["fixpoint"],
            )
            T = T.extend(st)
        except (ValueError, TermError) as exc:
            raise ParseError(str(exc), pending["line"], 1) from None
        stages.append(st)
        extra = dict(index.extra)
        index = _GenIndex(T, extra)
        pending, gens = None, []

    while n < len(lines):
        text = lines[n]
        ln = n + 1
        if text == "end":
            close_stage()
            if len(stages) != n_stages:
                raise ParseError(f"header announced {n_stages} stages, found {len(stages)}", ln, 1)
            return T, n + 1
        if text.startswith("stage "):
            close_stage()
            f = _fields(text, ln, ("kind", "k", "flavor", "copy", "lazy", "bounds", "iterations", "fixpoint"))
            m = re.match(r"stage (\d+) ", text)
            if not m or int(m.group(1)) != len(stages) + 1:
                raise ParseError("stage numbers must count up from 1", ln, 7, str(len(stages) + 1))
            for name, allowed in (("kind", ("lift", "sphere", "disk")), ("flavor", ("free", "unique"))):
                if f[name][0] not in allowed:
                    raise ParseError(f"unknown {name} {f[name][0]!r}", ln, f[name][1], " or ".join(allowed))
            pending = {
                "line": ln,
                "kind": f["kind"][0],
                "k": _int(f, "k", ln),
                "flavor": f["flavor"][0],
                "copy": _int(f, "copy", ln),
                "lazy": _flag(f, "lazy", ln),
                "bounds": parse_bounds(f["bounds"][0], ln, f["bounds"][1]),
                "iterations": _int(f, "iterations", ln),
                "fixpoint": _flag(f, "fixpoint", ln),
            }
        elif text.startswith("gen "):
            if pending is None or pending["lazy"]:
                raise ParseError("generator line outside an explicit stage", ln, 1)
            parts = text.split(" | ")
            if len(parts) != 3:
                raise ParseError("generator line needs '| source | target'", ln, len(text) + 1, "' | '")
            f = _fields(parts[0], ln, ("stage", "layer", "k", "arity", "flavor"))
            m = re.match(r"gen g#([0-9a-f]{12}) ", parts[0])
            if not m:
                raise ParseError("malformed generator id", ln, 5, "g#<12 hex digits>")
            arity = _table(f["arity"][0], ln, f["arity"][1])
            k = _int(f, "k", ln)
            col_src = len(parts[0]) + 4
            col_tgt = col_src + len(parts[1]) + 3

            def term(s, col):
                if s == "-":
                    return None
                return _evaluate(_TermParser(s, arity, index.get, ln, col).parse())

            src, tgt = term(parts[1], col_src), term(parts[2], col_tgt)
            try:
                g = Generator(k, arity, src, tgt, f["flavor"][0], f["layer"][0])
            except TermError as exc:
                raise ParseError(str(exc), ln, col_src) from None
            if g.id != m.group(1):
                raise ParseError(f"declared id g#{m.group(1)} but the line hashes to g#{g.id}", ln, 5)
            gens.append(g)
            index.extra[g.id] = g
        elif text.strip():
            raise ParseError(f"unexpected line {text[:20]!r}", ln, 1, "stage, gen or end")
        n += 1
    raise ParseError("missing 'end'", len(lines) + 1, 1, "end")


def parse_presentation(text: str) -> Presentation:
    lines = text.split("\n")
    T, n = _parse_presentation_lines(lines, 0)
    _expect_eof(lines, n)
    return T


def _expect_eof(lines, n):
    for j in range(n, len(lines)):
        if lines[j].strip():
            raise ParseError("text after 'end'", j + 1, 1, "end of file")


def parse_tower(text: str) -> Tower:
    lines = text.split("\n")
    if not lines or not lines[0].startswith("tower "):
        raise ParseError("expected a tower header", 1, 1, "tower mode=... bounds=... cuts=...")
    f = _fields(lines[0], 1, ("mode", "bounds", "cuts"))
    mode = f["mode"][0]
    if mode not in ("fc", "ic", "strict"):
        raise ParseError(f"unknown tower mode {mode!r}", 1, f["mode"][1], "fc|ic|strict")
    b = parse_bounds(f["bounds"][0], 1, f["bounds"][1])
    try:
        cuts = [int(x) for x in f["cuts"][0].split(",")]
    except ValueError:
        raise ParseError("bad cuts list", 1, f["cuts"][1], "comma-separated integers") from None
    status = []
    n = 1
    while n < len(lines) and lines[n].startswith("status "):
        parts = lines[n].split()
        if len(parts) != 4 or parts[3] not in ("fixpoint", "bound"):
            raise ParseError("malformed status line", n + 1, 1, "status <tag> <stage> fixpoint|bound")
        status.append((parts[1], int(parts[2]), parts[3] == "fixpoint"))
        n += 1
    last, n = _parse_presentation_lines(lines, n)
    _expect_eof(lines, n)
    if cuts[-1] != len(last.stages) or cuts != sorted(cuts):
        raise ParseError("cuts do not match the presentation", 1, f["cuts"][1])
    stages = [last.prefix(c) for c in cuts]
    maps = [inclusion(stages[i], stages[i + 1], name=f"J{i + 1}") for i in range(len(stages) - 1)]
    return Tower(mode, stages, maps, b, status)


def parse(text: str):
    if text.startswith("tower "):
        return parse_tower(text)
    return parse_presentation(text)
