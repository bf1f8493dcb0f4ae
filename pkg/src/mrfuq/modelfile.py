"""Plain-text model file format.

Canonical layout (one field per line, single spaces, ``#`` comments and
blank lines allowed when parsing but not emitted):

    mrfmodel 1
    nodes 4
    cards 2 2 2 2
    labels S L A C          # optional
    edges 0-1 1-2 1-3 2-3
    clique 0 1
    weight 1.5
    features 1.0 1.0 0.0 1.0
    clique 1 2 3
    weight 1.0
    features ... (8 values)

Clique blocks must appear in canonical clique order and match the graph's
maximal cliques; feature tables are flat in mixed-radix order with the
clique's lowest node least significant.  ``serialize(parse(text))`` is the
identity on canonical files.
"""

from __future__ import annotations

import numpy as np

from .errors import ModelFormatError
from .graphs import UndirectedGraph, maximal_cliques
from .models import Factor, LogLinearModel


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize(model: LogLinearModel, labels: list[str] | None = None) -> str:
    lines = ["mrfmodel 1", f"nodes {model.n_nodes}"]
    lines.append("cards " + " ".join(str(int(c)) for c in model.cards))
    if labels is not None:
        if len(labels) != model.n_nodes:
            raise ModelFormatError("one label required per node")
        lines.append("labels " + " ".join(labels))
    lines.append("edges " + " ".join(f"{i}-{j}" for i, j in sorted(model.graph.edges)))
    for f in model.factors:
        lines.append("clique " + " ".join(str(v) for v in f.clique))
        lines.append(f"weight {_fmt(f.weight)}")
        lines.append("features " + " ".join(_fmt(x) for x in f.table))
    return "\n".join(lines) + "\n"


class _Cursor:
    def __init__(self, text: str):
        self.rows = [
            (i + 1, line.strip())
            for i, line in enumerate(text.splitlines())
            if line.strip() and not line.strip().startswith("#")
        ]
        self.pos = 0

    def peek(self) -> tuple[int, str] | None:
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def take(self, key: str) -> tuple[int, list[str]]:
        row = self.peek()
        if row is None:
            raise ModelFormatError(f"unexpected end of file, expected '{key}'")
        line_no, line = row
        parts = line.split()
        if parts[0] != key:
            raise ModelFormatError(f"expected '{key}', found '{parts[0]}'", line_no)
        self.pos += 1
        return line_no, parts[1:]


def parse(text: str) -> tuple[LogLinearModel, list[str] | None]:
    """Parse a model file; returns the model and the optional node labels."""
    cur = _Cursor(text)

    line_no, args = cur.take("mrfmodel")
    if args != ["1"]:
        raise ModelFormatError(f"unsupported format version {args}", line_no)

    line_no, args = cur.take("nodes")
    try:
        n = int(args[0])
    except (IndexError, ValueError):
        raise ModelFormatError("nodes expects one integer", line_no) from None

    line_no, args = cur.take("cards")
    try:
        cards = [int(a) for a in args]
    except ValueError:
        raise ModelFormatError("cards expects integers", line_no) from None
    if len(cards) != n:
        raise ModelFormatError(f"expected {n} cardinalities, got {len(cards)}", line_no)

    labels: list[str] | None = None
    row = cur.peek()
    if row is not None and row[1].split()[0] == "labels":
        line_no, args = cur.take("labels")
        if len(args) != n:
            raise ModelFormatError(f"expected {n} labels, got {len(args)}", line_no)
        labels = args

    line_no, args = cur.take("edges")
    edges = []
    for tok in args:
        try:
            i, j = tok.split("-")
            edges.append((int(i), int(j)))
        except ValueError:
            raise ModelFormatError(f"bad edge token '{tok}'", line_no) from None
    try:
        graph = UndirectedGraph(n, edges)
    except Exception as exc:
        raise ModelFormatError(str(exc), line_no) from None

    expected = maximal_cliques(graph)
    factors = []
    for clique in expected:
        line_no, args = cur.take("clique")
        try:
            got = tuple(int(a) for a in args)
        except ValueError:
            raise ModelFormatError("clique expects node ids", line_no) from None
        if got != clique:
            raise ModelFormatError(
                f"expected clique {' '.join(map(str, clique))} "
                f"(canonical order), got {' '.join(map(str, got))}",
                line_no,
            )
        line_no, args = cur.take("weight")
        try:
            (weight,) = (float(a) for a in args)
        except ValueError:
            raise ModelFormatError("weight expects one real number", line_no) from None
        line_no, args = cur.take("features")
        size = int(np.prod([cards[v] for v in clique]))
        try:
            table = np.array([float(a) for a in args], dtype=float)
        except ValueError:
            raise ModelFormatError("features expects real numbers", line_no) from None
        if table.shape != (size,):
            raise ModelFormatError(
                f"clique {got} needs {size} feature values, got {table.shape[0]}",
                line_no,
            )
        factors.append(Factor(clique, weight, table))

    row = cur.peek()
    if row is not None:
        raise ModelFormatError(f"unexpected trailing content '{row[1]}'", row[0])
    return LogLinearModel(graph, cards, factors), labels


def load(path: str) -> tuple[LogLinearModel, list[str] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(path: str, model: LogLinearModel, labels: list[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(model, labels))
