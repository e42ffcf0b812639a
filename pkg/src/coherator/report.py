"""Stage-by-stage hom-set counts and the figures written next to the
tab-separated outputs of the command line."""

from __future__ import annotations

import csv
import io
import os
from collections import Counter

from .globular import Table
from .soa import Tower

__all__ = ["stage_counts", "enumeration_stable", "counts_tsv", "plot_stage_counts", "plot_catalog"]


def _count(T, p: Table, m: int, depth: int) -> int:
    terms = T.terms(p, m, depth)
    if T.mode == "strict":
        return len({T.key(t) for t in terms})
    return len(terms)


def stage_counts(tower: Tower, arities, dims, depth: int) -> list:
    """Rows ``(stage, arity, dim, count)``: number of operations (strict:
    classes) ``arity -> dim`` of depth ``<= depth`` at each stage."""
    rows = []
    for s, T in enumerate(tower.stages):
        for p in arities:
            for m in dims:
                rows.append((s, str(p), m, _count(T, p, m, depth)))
    return rows


def enumeration_stable(tower: Tower, p: Table, m: int, depth: int) -> bool:
    """True when the operations ``p -> m`` are literally the same at every
    stage from ``m + 1`` on (vacuous if the tower is shorter)."""
    ref = None
    for s in range(m + 1, len(tower.stages)):
        terms = tower.stages[s].terms(p, m, depth)
        if ref is None:
            ref = terms
        elif terms != ref:
            return False
    return True


def counts_tsv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["stage", "arity", "dim", "count"])
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: str) -> None:
    # no timestamp or version in the metadata, so reruns give identical files
    fig.savefig(path, dpi=100, metadata={"Software": None})


def plot_stage_counts(rows, path: str, title: str = "operations per stage") -> str:
    plt = _pyplot()
    series: dict = {}
    for stage, arity, dim, count in rows:
        series.setdefault((arity, dim), []).append((stage, count))
    fig, ax = plt.subplots(figsize=(6, 4))
    for (arity, dim), pts in sorted(series.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", label=f"{arity} -> {dim}")
    ax.set_xlabel("stage")
    ax.set_ylabel("count")
    ax.set_yscale("symlog")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    _save(fig, path)
    plt.close(fig)
    return path


def plot_catalog(entries, path: str) -> str:
    """Listed generators per (stage, arity), with the named cells marked."""
    plt = _pyplot()
    counts = Counter((e.stage, e.arity) for e in entries if e.arity != "*")
    named = [e for e in entries if e.label != "unnamed"]
    keys = sorted(counts, key=lambda k: (k[0], len(k[1]), k[1]))
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(keys)), 4))
    xs = range(len(keys))
    ax.bar(xs, [counts[k] for k in keys], color="0.7")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{s}:{a}" for s, a in keys], rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("listed generators")
    pos = {k: i for i, k in enumerate(keys)}
    labels: dict = {}
    for e in named:
        labels.setdefault((e.stage, e.arity), []).append(e.label)
    for key, names in labels.items():
        i = pos.get(key)
        if i is not None:
            ax.annotate("\n".join(names), (i, counts[key]), ha="center", va="bottom", fontsize=8)
    ax.set_title("catalog by stage and arity")
    fig.tight_layout()
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    _save(fig, path)
    plt.close(fig)
    return path
