"""Text formats: edge lists, bipartite graphs, spectra, JSON sidecars.

Edge list format:  first non-comment line is ``n m``; each of the next
``m`` lines is one edge as space-separated ascending vertex indices.
Lines starting with ``#`` are comments.  The writer emits edges in
lexicographic order, so write -> read is the identity on the canonical
representation.

Bipartite format:  ``BIPARTITE m n_right e`` followed by ``e`` lines of
``left right`` pairs, sorted left-major.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable

from .core import Hypergraph
from .errors import InputError, ParseError
from .field import BipartiteGraph


def edge_list_to_string(H: Hypergraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        for row in comment.splitlines():
            lines.append(f"# {row}")
    lines.append(f"{H.n} {H.num_edges}")
    for e in H.edges:
        lines.append(" ".join(map(str, e)))
    return "\n".join(lines) + "\n"


def write_edge_list(H: Hypergraph, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(edge_list_to_string(H, comment))


def parse_edge_list(text: str) -> Hypergraph:
    header = None
    edges = []
    expected = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno)
        if header is None:
            if len(values) != 2:
                raise ParseError("header must be 'n m'", lineno)
            header = values
            expected = values[1]
            continue
        edges.append((lineno, values))
    if header is None:
        raise ParseError("missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise ParseError(f"header promised {m} edges, found {len(edges)}")
    try:
        return Hypergraph(n, [vals for _, vals in edges])
    except InputError as exc:
        # locate the offending line for the diagnostic
        for lineno, vals in edges:
            try:
                Hypergraph(n, [vals])
            except InputError:
                raise ParseError(str(exc), lineno) from exc
        raise ParseError(str(exc)) from exc


def read_edge_list(path) -> Hypergraph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def bipartite_to_string(G: BipartiteGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        for row in comment.splitlines():
            lines.append(f"# {row}")
    e = sum(len(row) for row in G.adjacency)
    lines.append(f"BIPARTITE {G.m} {G.n_right} {e}")
    for left, row in enumerate(G.adjacency):
        for right in row:
            lines.append(f"{left} {right}")
    return "\n".join(lines) + "\n"


def write_bipartite(G: BipartiteGraph, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(bipartite_to_string(G, comment))


def parse_bipartite(text: str) -> BipartiteGraph:
    header = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if header is None:
            if len(toks) != 4 or toks[0] != "BIPARTITE":
                raise ParseError("header must be 'BIPARTITE m n_right e'", lineno)
            try:
                header = tuple(int(t) for t in toks[1:])
            except ValueError:
                raise ParseError("non-integer header field", lineno)
            continue
        if len(toks) != 2:
            raise ParseError("expected 'left right' pair", lineno)
        try:
            left, right = int(toks[0]), int(toks[1])
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno)
        if header and not (0 <= left < header[0] and 0 <= right < header[1]):
            raise ParseError(f"pair {left} {right} out of range", lineno)
        pairs.append((left, right))
    if header is None:
        raise ParseError("missing BIPARTITE header")
    m, n_right, e = header
    if len(pairs) != e:
        raise ParseError(f"header promised {e} pairs, found {len(pairs)}")
    rows = [[] for _ in range(m)]
    for left, right in pairs:
        rows[left].append(right)
    return BipartiteGraph(m, n_right, rows)


def read_bipartite(path) -> BipartiteGraph:
    with open(path) as fh:
        return parse_bipartite(fh.read())


def spectrum_to_csv(eigenvalues: Iterable[float], group_tol: float = 1e-6) -> str:
    """Render a descending eigenvalue multiset as ``eigenvalue,multiplicity``
    rows, clustering values closer than ``group_tol``."""
    values = sorted(eigenvalues, reverse=True)
    lines = ["eigenvalue,multiplicity"]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and abs(values[j + 1] - values[i]) <= group_tol:
            j += 1
        cluster = values[i : j + 1]
        mean = sum(cluster) / len(cluster)
        if abs(mean) <= group_tol:
            mean = 0.0
        lines.append(f"{mean:.12g},{len(cluster)}")
        i = j + 1
    return "\n".join(lines) + "\n"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc


def _json_default(value):
    from fractions import Fraction

    if isinstance(value, Fraction):
        return {"numerator": value.numerator, "denominator": value.denominator}
    if isinstance(value, Hypergraph):
        return {"n": value.n, "edges": [list(e) for e in value.edges]}
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"not JSON serializable: {type(value)!r}")
