"""Bipartite graphs from polynomials over prime fields.

The central object is the graph whose left vertices are the q**l
polynomials of degree < l over GF(q), whose right vertices are the q**2
points (x, y), and whose edges join P to every point of its graph
y = P(x).  Distinct polynomials of degree < l agree on at most l - 1
points, which makes the graph K_{2,l}-free, (q, q**(l-1))-biregular,
and gives it a completely known spectrum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, UnsupportedModulusError

_POPCNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint16)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldPoly:
    """Polynomial over GF(q), ``coeffs[j]`` the coefficient of x**j."""

    q: int
    coeffs: tuple

    def __post_init__(self):
        if not is_prime(self.q):
            raise UnsupportedModulusError(f"modulus {self.q} is not prime")
        if not self.coeffs:
            raise InputError("need at least one coefficient")
        if any(not (0 <= c < self.q) for c in self.coeffs):
            raise InputError("coefficients must lie in [0, q)")


def poly_eval(p: FieldPoly, x: int) -> int:
    """Evaluate by Horner's rule in GF(q)."""
    if not (0 <= x < p.q):
        raise InputError(f"point {x} outside GF({p.q})")
    acc = 0
    for c in reversed(p.coeffs):
        acc = (acc * x + c) % p.q
    return acc


class BipartiteGraph:
    """Immutable bipartite graph: per-left-vertex sorted neighbor tuples."""

    __slots__ = ("_m", "_n_right", "_adj")

    def __init__(self, m, n_right, adjacency):
        m, n_right = int(m), int(n_right)
        if m < 0 or n_right < 0:
            raise InputError("side sizes must be nonnegative")
        if len(adjacency) != m:
            raise InputError(f"need {m} adjacency rows, got {len(adjacency)}")
        rows = []
        for row in adjacency:
            r = tuple(sorted(set(int(v) for v in row)))
            if len(r) != len(tuple(row)):
                raise InputError("duplicate right vertex in a row")
            if r and (r[0] < 0 or r[-1] >= n_right):
                raise InputError(f"right vertex outside [0, {n_right})")
            rows.append(r)
        self._m, self._n_right, self._adj = m, n_right, tuple(rows)

    @classmethod
    def from_neighbor_matrix(cls, n_right, matrix) -> "BipartiteGraph":
        """Fast path: rows are strictly increasing right-vertex indices."""
        arr = np.asarray(matrix)
        if arr.ndim != 2 or not np.issubdtype(arr.dtype, np.integer):
            raise InputError("matrix must be 2-D integer")
        if arr.size:
            if int(arr.min()) < 0 or int(arr.max()) >= n_right:
                raise InputError(f"right vertex outside [0, {n_right})")
            if np.any(np.diff(arr, axis=1) <= 0):
                raise InputError("rows must be strictly increasing")
        obj = cls.__new__(cls)
        obj._m = arr.shape[0]
        obj._n_right = int(n_right)
        obj._adj = tuple(map(tuple, arr.tolist()))
        return obj

    @property
    def m(self) -> int:
        return self._m

    @property
    def n_right(self) -> int:
        return self._n_right

    @property
    def adjacency(self) -> tuple:
        return self._adj

    @property
    def edge_count(self) -> int:
        return sum(len(r) for r in self._adj)

    def left_degrees(self) -> list:
        return [len(r) for r in self._adj]

    def right_degrees(self) -> list:
        deg = [0] * self._n_right
        for row in self._adj:
            for v in row:
                deg[v] += 1
        return deg

    def biadjacency(self) -> np.ndarray:
        B = np.zeros((self._m, self._n_right), dtype=np.float64)
        for i, row in enumerate(self._adj):
            B[i, list(row)] = 1.0
        return B

    def __eq__(self, other):
        return (
            isinstance(other, BipartiteGraph)
            and self._m == other._m
            and self._n_right == other._n_right
            and self._adj == other._adj
        )

    def __hash__(self):
        return hash((self._m, self._n_right, self._adj))

    def __repr__(self):
        return (
            f"BipartiteGraph(m={self._m}, n_right={self._n_right}, "
            f"edges={self.edge_count})"
        )


def left_poly(index: int, q: int, l: int) -> FieldPoly:
    """Polynomial at a given left index of build_polynomial_graph.

    The index is the coefficient vector read as a base-q numeral with
    the highest power most significant, so the constant term is the
    least significant digit.
    """
    if not (0 <= index < q**l):
        raise InputError(f"index {index} outside [0, q**l)")
    digits = []
    rem = index
    for _ in range(l):
        digits.append(rem % q)
        rem //= q
    return FieldPoly(q, tuple(digits))


def build_polynomial_graph(q: int, l: int) -> BipartiteGraph:
    """Bipartite graph of the q**l polynomials of degree < l over GF(q).

    Left vertex i is the polynomial ``left_poly(i, q, l)``; right vertex
    ``x * q + y`` is the point (x, y); edges join P to the points of
    y = P(x).  The result is (q, q**(l-1))-biregular.
    """
    if not is_prime(q):
        raise UnsupportedModulusError(f"modulus {q} is not prime")
    if l < 1:
        raise InputError("polynomial length must be >= 1")
    # coefficient rows in lexicographic order, highest power most
    # significant (row i encodes left_poly(i))
    coeffs = np.array(list(itertools.product(range(q), repeat=l)), dtype=np.int64)
    x = np.arange(q, dtype=np.int64)
    values = np.zeros((q**l, q), dtype=np.int64)
    for j in range(l):  # Horner over the short axis
        values = (values * x[None, :] + coeffs[:, j][:, None]) % q
    neighbors = x[None, :] * q + values  # sorted: x is the major key
    return BipartiteGraph.from_neighbor_matrix(q * q, neighbors)


@dataclass(frozen=True)
class K2LWitness:
    left_pair: tuple
    common: tuple  # l common right neighbors


def k2l_free_check(G: BipartiteGraph, l: int) -> Optional[K2LWitness]:
    """Exhaustively look for two left vertices with >= l common neighbors.

    Returns a witness carrying l of the common neighbors, or None.
    """
    if l < 1:
        raise InputError("l must be >= 1")
    m = G.m
    if m < 2:
        return None
    width = (G.n_right + 7) // 8
    packed = np.zeros((m, width), dtype=np.uint8)
    for i, row in enumerate(G.adjacency):
        for v in row:
            packed[i, v >> 3] |= 1 << (v & 7)
    for i in range(m - 1):
        both = packed[i] & packed[i + 1 :]
        counts = _POPCNT8[both].sum(axis=1)
        hits = np.nonzero(counts >= l)[0]
        if hits.size:
            j = i + 1 + int(hits[0])
            common = tuple(sorted(set(G.adjacency[i]) & set(G.adjacency[j])))
            return K2LWitness((i, j), common[:l])
    return None


@dataclass(frozen=True)
class MixingReport:
    edge_count: int
    expected: float
    discrepancy: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.discrepancy <= self.bound + 1e-12


def mixing_discrepancy(G: BipartiteGraph, X, Y, lambda2: float) -> MixingReport:
    """Compare e(X, Y) against the expander mixing prediction.

    For a left-regular graph with degree d1, the edge count between
    X (left) and Y (right) satisfies
    ``|e(X,Y) - d1*|X|*|Y|/n_right| <= lambda2 * sqrt(|X|*|Y|)``.
    """
    degs = set(G.left_degrees())
    if len(degs) > 1:
        raise InputError("mixing bound needs a left-regular graph")
    d1 = degs.pop() if degs else 0
    X = sorted(set(int(v) for v in X))
    Y = sorted(set(int(v) for v in Y))
    if X and (X[0] < 0 or X[-1] >= G.m):
        raise InputError("X leaves the left side")
    if Y and (Y[0] < 0 or Y[-1] >= G.n_right):
        raise InputError("Y leaves the right side")
    yset = set(Y)
    e = sum(sum(1 for v in G.adjacency[i] if v in yset) for i in X)
    expected = d1 * len(X) * len(Y) / G.n_right if G.n_right else 0.0
    disc = abs(e - expected)
    bound = lambda2 * (len(X) * len(Y)) ** 0.5
    return MixingReport(e, expected, disc, bound)
