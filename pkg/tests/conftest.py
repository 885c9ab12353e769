"""Shared brute-force references and instance generators.

Everything here is deliberately naive: independent implementations used
to cross-check the real ones.  Keep them slow and obvious.
"""

from __future__ import annotations

import itertools
import random

from omitlab.core import Hypergraph


def brute_alpha(H: Hypergraph) -> int:
    """Largest independent set by scanning all vertex subsets (n <= 20)."""
    assert H.n <= 20
    masks = [0] * H.num_edges
    for i, e in enumerate(H.edges):
        for v in e:
            masks[i] |= 1 << v
    best = 0
    for s in range(1 << H.n):
        if all((s & m) != m for m in masks):
            best = max(best, s.bit_count())
    return best


def brute_matching(H: Hypergraph) -> int:
    """Maximum matching by exhaustive edge subsets (few edges only)."""
    assert H.num_edges <= 16
    edges = [frozenset(e) for e in H.edges]
    best = 0
    for r in range(len(edges), 0, -1):
        if r <= best:
            break
        for combo in itertools.combinations(edges, r):
            total = sum(len(e) for e in combo)
            if len(frozenset.union(*combo)) == total:
                best = max(best, r)
                break
    return best


def brute_omitting(H: Hypergraph, l: int):
    """First pair of edges meeting in exactly l vertices, else None."""
    for a, b in itertools.combinations(range(H.num_edges), 2):
        if len(set(H.edges[a]) & set(H.edges[b])) == l:
            return (a, b)
    return None


def brute_sunflower(H: Hypergraph, l: int, lam: int):
    """lam edges whose pairwise intersections all equal one l-set."""
    for combo in itertools.combinations(range(H.num_edges), lam):
        inters = {
            frozenset(H.edges[a]) & frozenset(H.edges[b])
            for a, b in itertools.combinations(combo, 2)
        }
        if len(inters) == 1 and len(next(iter(inters))) == l:
            return combo
    return None


def brute_fan(H: Hypergraph):
    """Apex x, k edges pairwise meeting at exactly {x}, and a crossing
    edge avoiding x that meets each of the k edges exactly once."""
    k = H.uniform_k
    if not k or k < 2:
        return None
    edges = [set(e) for e in H.edges]
    for x in range(H.n):
        through = [i for i, e in enumerate(edges) if x in e]
        crossing = [i for i, e in enumerate(edges) if x not in e]
        if len(through) < k or not crossing:
            continue
        for petals in itertools.combinations(through, k):
            ok = all(
                edges[a] & edges[b] == {x}
                for a, b in itertools.combinations(petals, 2)
            )
            if not ok:
                continue
            for c in crossing:
                if all(len(edges[c] & edges[p]) == 1 for p in petals):
                    return (x, petals, c)
    return None


def random_uniform(n: int, k: int, m: int, rng: random.Random) -> Hypergraph:
    """m distinct k-edges drawn uniformly (m capped at C(n,k))."""
    pool = list(itertools.combinations(range(n), k))
    rng.shuffle(pool)
    return Hypergraph(n, [list(e) for e in pool[: min(m, len(pool))]])


def pair_in_subset_probability(n: int, i: int) -> float:
    """P(two fixed vertices both land in a uniform i-subset of [n])."""
    return (i * (i - 1)) / (n * (n - 1))
