"""Hypergraph representation and structural statistics.

Vertices are integers in ``[0, n)``.  Edges are sorted tuples, kept
deduplicated and in lexicographic order so that every derived artifact
(files, traces, witnesses) is reproducible bit for bit.  A parallel
bitmask list is cached for small vertex counts because intersection
loops are the hot path of most downstream algorithms.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError

MASK_THRESHOLD_DEFAULT = 128


def _mask(edge) -> int:
    m = 0
    for v in edge:
        m |= 1 << v
    return m


class Hypergraph:
    """Immutable hypergraph on vertex set ``[0, n)``.

    Parameters
    ----------
    n : int
        Number of vertices (isolated vertices are allowed).
    edges : iterable of iterables of int
        Vertex subsets, each of size at least 2.  Duplicate edges are
        collapsed; the number collapsed is kept in
        :attr:`duplicates_collapsed`.
    mask_threshold : int, optional
        Largest ``n`` for which per-edge bitmasks are precomputed.
    """

    __slots__ = ("_n", "_edges", "_uniform_k", "_dups", "_masks")

    def __init__(self, n, edges=(), mask_threshold=MASK_THRESHOLD_DEFAULT):
        n = int(n)
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        canon = set()
        dups = 0
        for edge in edges:
            e = tuple(sorted(int(v) for v in edge))
            if len(e) < 2:
                raise InputError(f"edge {e} has size < 2")
            for a, b in zip(e, e[1:]):
                if a == b:
                    raise InputError(f"edge {e} repeats a vertex")
            if e[0] < 0 or e[-1] >= n:
                raise InputError(f"edge {e} leaves [0, {n})")
            if e in canon:
                dups += 1
            else:
                canon.add(e)
        self._n = n
        self._edges = tuple(sorted(canon))
        self._dups = dups
        sizes = {len(e) for e in self._edges}
        self._uniform_k = sizes.pop() if len(sizes) == 1 else None
        self._masks = (
            tuple(_mask(e) for e in self._edges) if n <= mask_threshold else None
        )

    @classmethod
    def from_rows(cls, n, rows) -> "Hypergraph":
        """Vectorized constructor for a uniform hypergraph.

        ``rows`` is an integer array of shape ``(m, k)`` whose rows are
        strictly increasing.  Validation, deduplication, and the
        lexicographic sort all run in numpy; intended for instances with
        millions of incidences where the generic path is too slow.
        """
        arr = np.asarray(rows)
        if arr.ndim != 2:
            raise InputError("rows must be a 2-D array")
        m, k = arr.shape
        if k < 2:
            raise InputError("edge size < 2")
        if m:
            if not np.issubdtype(arr.dtype, np.integer):
                raise InputError("rows must be integers")
            if int(arr.min()) < 0 or int(arr.max()) >= n:
                raise InputError(f"vertex outside [0, {n})")
            if np.any(np.diff(arr, axis=1) <= 0):
                raise InputError("rows must be strictly increasing")
            uniq = np.unique(arr, axis=0)
        else:
            uniq = arr
        obj = cls.__new__(cls)
        obj._n = int(n)
        obj._edges = tuple(map(tuple, uniq.tolist()))
        obj._dups = m - len(obj._edges)
        obj._uniform_k = k if obj._edges else None
        obj._masks = (
            tuple(_mask(e) for e in obj._edges)
            if n <= MASK_THRESHOLD_DEFAULT
            else None
        )
        return obj

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def uniform_k(self) -> Optional[int]:
        """Common edge size, or None when edges have mixed sizes."""
        return self._uniform_k

    @property
    def duplicates_collapsed(self) -> int:
        return self._dups

    @property
    def masks(self) -> Optional[tuple]:
        """Per-edge bitmasks, present only when ``n`` is small."""
        return self._masks

    def edge_masks(self) -> tuple:
        """Bitmasks for all edges, computing them if not cached."""
        if self._masks is not None:
            return self._masks
        return tuple(_mask(e) for e in self._edges)

    def vertex_degrees(self) -> list:
        deg = [0] * self._n
        for e in self._edges:
            for v in e:
                deg[v] += 1
        return deg

    def __eq__(self, other):
        return (
            isinstance(other, Hypergraph)
            and self._n == other._n
            and self._edges == other._edges
        )

    def __hash__(self):
        return hash((self._n, self._edges))

    def __repr__(self):
        k = self._uniform_k
        shape = f"{k}-uniform" if k else "mixed"
        return f"Hypergraph(n={self._n}, edges={len(self._edges)}, {shape})"


@dataclass(frozen=True)
class LinkResult:
    """Link of a vertex set: residues of size >= 2 form a hypergraph;
    residues of size <= 1 are only counted, never stored as edges."""

    link: Hypergraph
    small_edge_count: int

    @property
    def degree(self) -> int:
        """Number of host edges containing the linked set."""
        return self.link.num_edges + self.small_edge_count


@dataclass(frozen=True)
class DegreeReport:
    max_i_degree: dict
    codegree_max: int
    average_degree: Fraction
    max_degree: int


@dataclass(frozen=True)
class CycleCensus:
    """Counts of unordered edge pairs by exact intersection size."""

    counts: dict
    k: int

    @property
    def is_linear(self) -> bool:
        return all(self.counts.get(j, 0) == 0 for j in range(2, self.k))


@dataclass(frozen=True)
class RegularityReport:
    uniform_ok: bool
    regular_ok: bool
    edge_size_bounds: tuple
    degree_bounds: tuple
    uniform_witness: Optional[tuple]  # (edge, size) violating the size band
    regular_witness: Optional[tuple]  # (vertex, degree) violating the band

    @property
    def ok(self) -> bool:
        return self.uniform_ok and self.regular_ok


def link(H: Hypergraph, S) -> LinkResult:
    """Link of a vertex set ``S``: residues ``E - S`` over edges ``E ⊇ S``.

    The residues of size >= 2 are returned as a hypergraph on the same
    vertex universe; smaller residues are tallied in
    ``small_edge_count`` so that ``degree`` equals the number of host
    edges containing ``S``.
    """
    S = tuple(sorted(set(int(v) for v in S)))
    if not S:
        raise InputError("linked set must be nonempty")
    if S[0] < 0 or S[-1] >= H.n:
        raise InputError(f"linked set {S} leaves [0, {H.n})")
    sset = set(S)
    residues = []
    small = 0
    for e in H.edges:
        if sset <= set(e):
            r = tuple(v for v in e if v not in sset)
            if len(r) >= 2:
                residues.append(r)
            else:
                small += 1
    return LinkResult(link=Hypergraph(H.n, residues), small_edge_count=small)


def shadow(H: Hypergraph, i: int) -> Hypergraph:
    """i-th shadow: all (k-i)-subsets of edges, deduplicated."""
    if not H.edges:
        return Hypergraph(H.n, ())
    k = H.uniform_k
    if k is None:
        raise InputError("shadow requires a uniform hypergraph")
    if i < 1 or k - i < 2:
        raise InputError(f"shadow index {i} needs 1 <= i <= k-2 (k={k})")
    sub = set()
    for e in H.edges:
        sub.update(itertools.combinations(e, k - i))
    return Hypergraph(H.n, sub)


def degree_profile(H: Hypergraph) -> DegreeReport:
    """Maximum i-degrees, maximum codegree, and average degree.

    ``max_i_degree[i]`` is the largest number of edges containing a
    common i-set, for 1 <= i <= k-1.  ``codegree_max`` is the largest
    number of (k-1)-sets whose union with either of two fixed distinct
    vertices is an edge.  ``average_degree`` is exact.
    """
    if not H.edges:
        return DegreeReport({}, 0, Fraction(0), 0)
    k = H.uniform_k
    if k is None:
        raise InputError("degree_profile requires a uniform hypergraph")
    max_i = {}
    for i in range(1, k):
        c = Counter()
        for e in H.edges:
            for s in itertools.combinations(e, i):
                c[s] += 1
        max_i[i] = max(c.values())
    # codegree: bucket (k-1)-subsets by the vertex completing them to an edge
    extensions = {}
    for e in H.edges:
        for idx in range(k):
            s = e[:idx] + e[idx + 1 :]
            extensions.setdefault(s, []).append(e[idx])
    pair_codegree = Counter()
    for exts in extensions.values():
        if len(exts) >= 2:
            for u, v in itertools.combinations(sorted(exts), 2):
                pair_codegree[(u, v)] += 1
    gamma = max(pair_codegree.values()) if pair_codegree else 0
    avg = Fraction(k * H.num_edges, H.n) if H.n else Fraction(0)
    return DegreeReport(max_i, gamma, avg, max_i[1])


def cycle_census(H: Hypergraph) -> CycleCensus:
    """Count unordered edge pairs by exact intersection size j < k."""
    if not H.edges:
        return CycleCensus({}, 0)
    k = H.uniform_k
    if k is None:
        raise InputError("cycle_census requires a uniform hypergraph")
    counts = {j: 0 for j in range(k)}
    masks = H.edge_masks()
    m = len(masks)
    for a in range(m):
        ma = masks[a]
        for b in range(a + 1, m):
            counts[(ma & masks[b]).bit_count()] += 1
    return CycleCensus(counts, k)


def cartesian_product(H: Hypergraph, factors: Sequence[Hypergraph]) -> Hypergraph:
    """Product of ``H`` on [n) with one factor hypergraph per vertex.

    All factors share a vertex count ``m``; the result lives on
    ``n * m`` vertices with ``(i, v)`` flattened to ``i * m + v``.  Its
    edges are the column copies ``E × {v}`` of edges of ``H`` plus the
    per-row copies ``{i} × e`` of edges of each factor.
    """
    if len(factors) != H.n:
        raise InputError(f"need exactly {H.n} factors, got {len(factors)}")
    if not factors:
        return Hypergraph(0, ())
    m = factors[0].n
    for f in factors:
        if f.n != m:
            raise InputError("factors must share one vertex count")
    edges = []
    for e in H.edges:
        for v in range(m):
            edges.append(tuple(i * m + v for i in e))
    for i, f in enumerate(factors):
        base = i * m
        for e in f.edges:
            edges.append(tuple(base + v for v in e))
    out = Hypergraph(H.n * m, edges)
    expected = H.num_edges * m + sum(f.num_edges for f in factors)
    if out.num_edges != expected:
        raise InputError("product edges collided; factors are inconsistent")
    return out


def induced(H: Hypergraph, U) -> Hypergraph:
    """Induced sub-hypergraph on ``U``, relabeled to [0, |U|) by rank."""
    U = sorted(set(int(v) for v in U))
    if U and (U[0] < 0 or U[-1] >= H.n):
        raise InputError(f"vertex set leaves [0, {H.n})")
    pos = {v: i for i, v in enumerate(U)}
    uset = set(U)
    edges = [tuple(pos[v] for v in e) for e in H.edges if uset.issuperset(e)]
    return Hypergraph(len(U), edges)


def regularity_audit(H: Hypergraph, C: float, d1: float, d2: float) -> RegularityReport:
    """Check (C, d1)-uniformity of edge sizes and (C, d2)-regularity of degrees.

    Uniform means every edge size lies in ``[d1/C, C*d1]``; regular means
    every vertex degree (isolated vertices included) lies in
    ``[d2/C, C*d2]``.  First violations are reported as witnesses.
    """
    if C < 1 or d1 <= 0 or d2 <= 0:
        raise InputError("need C >= 1 and positive d1, d2")
    size_lo, size_hi = d1 / C, C * d1
    deg_lo, deg_hi = d2 / C, C * d2
    uniform_ok, uniform_witness = True, None
    for e in H.edges:
        if not (size_lo <= len(e) <= size_hi):
            uniform_ok, uniform_witness = False, (e, len(e))
            break
    regular_ok, regular_witness = True, None
    for v, d in enumerate(H.vertex_degrees()):
        if not (deg_lo <= d <= deg_hi):
            regular_ok, regular_witness = False, (v, d)
            break
    return RegularityReport(
        uniform_ok,
        regular_ok,
        (size_lo, size_hi),
        (deg_lo, deg_hi),
        uniform_witness,
        regular_witness,
    )
