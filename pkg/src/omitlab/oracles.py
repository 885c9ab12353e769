"""Exact desk-scale oracles with self-certifying witnesses.

Every detector returns either None or a Witness that re-validates
against the instance; every maximizer returns the optimum plus a
witness achieving it.  Budgets count node expansions so overruns fail
loudly instead of silently truncating the search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .core import Hypergraph, degree_profile
from .errors import InputError, OracleTimeoutError

DEFAULT_BUDGET = 5_000_000
MAX_EXACT_VERTICES = 64


@dataclass(frozen=True)
class Witness:
    """Certificate for an oracle answer.

    ``vertices`` holds kind-specific vertex tuples (e.g. the sunflower
    core, or the independent set), ``edges`` the indices of the edges
    involved, in the host's canonical edge order.
    """

    kind: str
    vertices: tuple = ()
    edges: tuple = ()

    def edge_values(self, H: Hypergraph) -> tuple:
        return tuple(H.edges[i] for i in self.edges)

    def to_json(self, H: Hypergraph) -> dict:
        return {
            "kind": self.kind,
            "vertices": [list(v) for v in self.vertices],
            "edge_indices": list(self.edges),
            "edge_values": [list(e) for e in self.edge_values(H)],
        }

    def revalidate(self, H: Hypergraph) -> bool:
        check = _REVALIDATORS.get(self.kind)
        return bool(check and check(self, H))


def _tuple_mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget):
        self.left = budget

    def spend(self, amount=1):
        self.left -= amount
        if self.left < 0:
            raise OracleTimeoutError("node-expansion budget exhausted")


def _check_independent(w: Witness, H: Hypergraph) -> bool:
    s = set(w.vertices[0])
    if len(s) != len(w.vertices[0]) or any(not (0 <= v < H.n) for v in s):
        return False
    return not any(s.issuperset(e) for e in H.edges)


def _check_matching(w: Witness, H: Hypergraph) -> bool:
    seen = set()
    for i in w.edges:
        e = set(H.edges[i])
        if e & seen:
            return False
        seen |= e
    return True


def _check_sunflower(w: Witness, H: Hypergraph) -> bool:
    core = set(w.vertices[0])
    chosen = [set(H.edges[i]) for i in w.edges]
    if len(set(w.edges)) != len(w.edges) or len(chosen) < 2:
        return False
    for a, b in itertools.combinations(chosen, 2):
        if a & b != core:
            return False
    return all(core <= e for e in chosen)


def _check_omitting_pair(w: Witness, H: Hypergraph) -> bool:
    i, j = w.edges
    inter = set(H.edges[i]) & set(H.edges[j])
    return i != j and tuple(sorted(inter)) == w.vertices[0]


def _check_fan(w: Witness, H: Hypergraph) -> bool:
    (apex,), crossing = w.vertices
    e_idx, spoke_idx = w.edges[0], w.edges[1:]
    crossing = set(crossing)
    if set(H.edges[e_idx]) != crossing or apex in crossing:
        return False
    spokes = [set(H.edges[i]) for i in spoke_idx]
    if len(spokes) != len(crossing):
        return False
    for a, b in itertools.combinations(spokes, 2):
        if a & b != {apex}:
            return False
    met = set()
    for s in spokes:
        hit = s & crossing
        if len(hit) != 1:
            return False
        met |= hit
    return met == crossing and all(apex in s for s in spokes)


_REVALIDATORS = {
    "independent-set": _check_independent,
    "matching": _check_matching,
    "sunflower": _check_sunflower,
    "omitting-pair": _check_omitting_pair,
    "fan": _check_fan,
}


def max_independent_set_exact(
    H: Hypergraph,
    budget: int = DEFAULT_BUDGET,
    max_n: int = MAX_EXACT_VERTICES,
):
    """Exact independence number with a witness set.

    Branch and bound on the complement (a minimum vertex cover of the
    edge set): branch on the vertices of an uncovered edge, lower-bound
    the remaining cover by a greedy disjoint-edge matching, and seed the
    incumbent with a greedy max-degree cover.  Vertices are explored in
    degree-descending order, ties lexicographic.
    """
    if H.n > max_n:
        raise InputError(f"{H.n} vertices exceeds the exact-oracle cap {max_n}")
    if not H.edges:
        w = Witness("independent-set", (tuple(range(H.n)),))
        return H.n, w
    masks = list(H.edge_masks())
    degs = H.vertex_degrees()

    # greedy cover for the incumbent
    cover = 0
    remaining = [m for m in masks]
    while remaining:
        counts = {}
        for m in remaining:
            mm = m
            while mm:
                b = mm & -mm
                counts[b] = counts.get(b, 0) + 1
                mm ^= b
        best_bit = max(counts, key=lambda b: (counts[b], -b.bit_length()))
        cover |= best_bit
        remaining = [m for m in remaining if not m & best_bit]
    best_cover_size = cover.bit_count()
    best_cover = cover

    budget_box = _Budget(budget)

    def matching_bound(uncovered) -> int:
        used = 0
        count = 0
        for m in uncovered:
            if not m & used:
                used |= m
                count += 1
        return count

    def order_bits(mask_int):
        bits = []
        mm = mask_int
        while mm:
            b = mm & -mm
            bits.append(b)
            mm ^= b
        bits.sort(key=lambda b: (-degs[b.bit_length() - 1], b.bit_length()))
        return bits

    def dfs(cover_mask, size, uncovered):
        nonlocal best_cover_size, best_cover
        budget_box.spend()
        if not uncovered:
            if size < best_cover_size:
                best_cover_size, best_cover = size, cover_mask
            return
        if size + matching_bound(uncovered) >= best_cover_size:
            return
        # branch on the edge with fewest vertices (strongest constraint)
        pivot = min(uncovered, key=lambda m: (m.bit_count(), m))
        for b in order_bits(pivot):
            new_cover = cover_mask | b
            rest = [m for m in uncovered if not m & b]
            dfs(new_cover, size + 1, rest)

    dfs(0, 0, masks)
    alpha = H.n - best_cover_size
    ind = tuple(v for v in range(H.n) if not (best_cover >> v) & 1)
    w = Witness("independent-set", (ind,))
    if len(ind) != alpha or not w.revalidate(H):
        raise AssertionError("independent-set witness failed revalidation")
    return alpha, w


def _matching_bb(masks, budget_box: _Budget, target: Optional[int] = None):
    """Shared branch-and-bound core: best matching over edge bitmasks."""
    m = len(masks)
    best = 0
    best_pick: tuple = ()

    def free_count(used, start):
        return sum(1 for i in range(start, m) if not masks[i] & used)

    def dfs(i, used, picked):
        nonlocal best, best_pick
        budget_box.spend()
        if len(picked) > best:
            best, best_pick = len(picked), tuple(picked)
        if target is not None and best >= target:
            return True
        if i >= m:
            return False
        if len(picked) + free_count(used, i) <= best:
            return False
        for j in range(i, m):
            if not masks[j] & used:
                picked.append(j)
                if dfs(j + 1, used | masks[j], picked):
                    return True
                picked.pop()
        return False

    dfs(0, 0, [])
    return best, best_pick


def matching_number_exact(
    H: Hypergraph,
    budget: int = DEFAULT_BUDGET,
    target: Optional[int] = None,
):
    """Exact matching number with a witness, by include/exclude search
    over edges in lexicographic order.

    ``target`` stops the search as soon as a matching of that size is
    found (used by the sunflower detector); the return value is then
    min(nu, target).
    """
    best, best_pick = _matching_bb(list(H.edge_masks()), _Budget(budget), target)
    w = Witness("matching", (), best_pick)
    if not w.revalidate(H):
        raise AssertionError("matching witness failed revalidation")
    return best, w


def contains_sunflower(
    H: Hypergraph, l: int, lam: int, budget: int = DEFAULT_BUDGET
) -> Optional[Witness]:
    """Find lam edges whose pairwise intersections all equal one l-set.

    Cores are enumerated as l-subsets of edges; for each core the
    petals must form a disjoint system, which is an exact matching
    question on the residues.  Cores with fewer than lam incident edges
    are skipped outright.
    """
    if lam < 2:
        raise InputError("need lam >= 2 (single-edge sunflowers are vacuous)")
    if l < 0:
        raise InputError("need l >= 0")
    if not H.edges:
        return None
    k = H.uniform_k
    if k is None:
        raise InputError("sunflower detector requires a uniform hypergraph")
    if l >= k:
        raise InputError("core size must be below the edge size")
    by_core: dict = {}
    for idx, e in enumerate(H.edges):
        for s in itertools.combinations(e, l):
            by_core.setdefault(s, []).append(idx)
    budget_box = _Budget(budget)
    for core in sorted(by_core):
        incident = by_core[core]
        if len(incident) < lam:
            continue
        budget_box.spend()
        cset = set(core)
        residues = [tuple(v for v in H.edges[i] if v not in cset) for i in incident]
        if l == k - 1:
            # residues are single vertices; distinct edges give distinct ones
            chosen = incident[:lam]
        else:
            res_masks = [_tuple_mask(r) for r in residues]
            size, pick = _matching_bb(res_masks, budget_box, target=lam)
            if size < lam:
                continue
            chosen = [incident[pos] for pos in pick[:lam]]
        witness = Witness("sunflower", (core,), tuple(chosen))
        if not witness.revalidate(H):
            raise AssertionError("sunflower witness failed revalidation")
        return witness
    return None


def omitting_check(H: Hypergraph, l: int) -> Optional[Witness]:
    """Find two edges meeting in exactly l vertices, or return None.

    Candidate pairs are bucketed by shared l-subsets (a pair meeting in
    exactly l shares one), then verified exactly; this matches the
    quadratic scan's answer while staying near-linear on systems that
    are actually omitting.  l = 0 falls back to the direct scan.
    """
    if l < 0:
        raise InputError("need l >= 0")
    edges = H.edges
    m = len(edges)
    if m < 2:
        return None
    masks = H.edge_masks()
    if l == 0:
        for i in range(m):
            for j in range(i + 1, m):
                if not masks[i] & masks[j]:
                    return Witness("omitting-pair", ((),), (i, j))
        return None
    buckets: dict = {}
    for idx, e in enumerate(edges):
        if len(e) < l:
            continue
        for s in itertools.combinations(e, l):
            buckets.setdefault(s, []).append(idx)
    seen = set()
    for s in sorted(buckets):
        group = buckets[s]
        if len(group) < 2:
            continue
        for a_pos in range(len(group)):
            for b_pos in range(a_pos + 1, len(group)):
                i, j = group[a_pos], group[b_pos]
                if (i, j) in seen:
                    continue
                seen.add((i, j))
                inter = masks[i] & masks[j]
                if inter.bit_count() == l:
                    common = tuple(v for v in edges[i] if (inter >> v) & 1)
                    return Witness("omitting-pair", (common,), (i, j))
    return None


def contains_fan(H: Hypergraph, budget: int = DEFAULT_BUDGET) -> Optional[Witness]:
    """Search for k spokes through an apex, pairwise meeting only there,
    each hitting a k-th edge (the crossing edge, apex excluded) exactly
    once.  Exhaustive over apexes and crossing edges with backtracking
    over which spoke covers which crossing vertex.
    """
    k = H.uniform_k
    if k is None:
        if not H.edges:
            return None
        raise InputError("fan detector requires a uniform hypergraph")
    if k < 2:
        raise InputError("need k >= 2")
    budget_box = _Budget(budget)
    masks = H.edge_masks()
    by_vertex: dict = {}
    for idx, e in enumerate(H.edges):
        for v in e:
            by_vertex.setdefault(v, []).append(idx)
    for apex in range(H.n):
        through = by_vertex.get(apex, [])
        if len(through) < k:
            continue
        apex_bit = 1 << apex
        for e_idx, crossing in enumerate(H.edges):
            if apex in crossing:
                continue
            cross_mask = masks[e_idx]
            candidates = []
            feasible = True
            for u in crossing:
                u_bit = 1 << u
                cand = [
                    i
                    for i in through
                    if masks[i] & cross_mask == u_bit
                ]
                if not cand:
                    feasible = False
                    break
                candidates.append((u, cand))
            if not feasible:
                continue
            candidates.sort(key=lambda t: len(t[1]))

            def assign(pos, used_mask, picked):
                budget_box.spend()
                if pos == len(candidates):
                    return list(picked)
                _, cand = candidates[pos]
                for i in cand:
                    body = masks[i] ^ apex_bit
                    if body & used_mask:
                        continue
                    picked.append(i)
                    out = assign(pos + 1, used_mask | body, picked)
                    if out is not None:
                        return out
                    picked.pop()
                return None

            picked = assign(0, 0, [])
            if picked is not None:
                w = Witness(
                    "fan", ((apex,), tuple(crossing)), (e_idx, *sorted(picked))
                )
                if not w.revalidate(H):
                    raise AssertionError("fan witness failed revalidation")
                return w
    return None


@dataclass(frozen=True)
class IndecompResult:
    indecomposable: bool
    i0: Optional[int]  # smallest split index when decomposable
    witness: Optional[Witness]
    thresholds: tuple  # lam_i actually tested, by i


def indecomposability_check(
    H: Hypergraph,
    k0: int,
    lam: int,
    budget: int = DEFAULT_BUDGET,
    lambda_base: Optional[int] = None,
) -> IndecompResult:
    """Detect the doubly-exponential sunflower ladder.

    H of size k' is indecomposable at level k0 when k' = k0 or no
    sunflower with core k' - i and lam_i = lambda_base**(2**(i-1))
    petals exists for any i <= k' - k0.  ``lambda_base`` defaults to
    k' * lam; a decomposition of a larger host passes the host's own
    base so shrunken members keep the original ladder.
    """
    if k0 < 2:
        raise InputError("need k0 >= 2")
    if lam < 2:
        raise InputError("need lam >= 2")
    if not H.edges:
        return IndecompResult(True, None, None, ())
    kp = H.uniform_k
    if kp is None:
        raise InputError("detector requires a uniform hypergraph")
    if kp < k0:
        raise InputError(f"edge size {kp} below the floor {k0}")
    if kp == k0:
        return IndecompResult(True, None, None, ())
    base = lambda_base if lambda_base is not None else kp * lam
    tested = []
    for i in range(1, kp - k0 + 1):
        lam_i = base ** (2 ** (i - 1))
        tested.append(lam_i)
        if lam_i <= H.num_edges:  # cheap skip: need lam_i petals
            w = contains_sunflower(H, kp - i, lam_i, budget)
            if w is not None:
                return IndecompResult(False, i, w, tuple(tested))
    return IndecompResult(True, None, None, tuple(tested))


@dataclass(frozen=True)
class AuditReport:
    """Degree/cycle audit against thresholds parameterized by t."""

    t: float
    epsilon: float
    degree_ok: bool
    degree_value: int
    degree_cap: float
    cycle_ok: dict  # j -> bool
    cycle_values: dict  # j -> count
    cycle_caps: dict  # j -> cap

    @property
    def ok(self) -> bool:
        return self.degree_ok and all(self.cycle_ok.values())


def dlr_audit(
    H: Hypergraph,
    t: Optional[float] = None,
    epsilon: float = 0.1,
    lam: Optional[float] = None,
    l: Optional[int] = None,
) -> AuditReport:
    """Check the two hypotheses of the container-style counting bound:
    max degree at most t**(k-1), and for each 2 <= j <= k-1 the number
    of edge pairs meeting in exactly j vertices at most
    n * t**(2k - j - 1 - epsilon).

    Pass t directly, or pass (lam, l) to use the standard instantiation
    t = lam**(1/(k-1)) * n**((l-1)/(k-1)).
    """
    if not H.edges:
        t = float(t) if t is not None else 1.0
        return AuditReport(t, epsilon, True, 0, t, {}, {}, {})
    k = H.uniform_k
    if k is None:
        raise InputError("audit requires a uniform hypergraph")
    if t is None:
        if lam is None or l is None:
            raise InputError("pass t, or both lam and l")
        t = float(lam) ** (1.0 / (k - 1)) * float(H.n) ** ((l - 1) / (k - 1))
    if t <= 0:
        raise InputError("t must be positive")
    from .core import cycle_census

    prof = degree_profile(H)
    degree_value = prof.max_degree
    degree_cap = t ** (k - 1)
    census = cycle_census(H).counts
    cycle_ok = {}
    cycle_values = {}
    cycle_caps = {}
    for j in range(2, k):
        cap = H.n * t ** (2 * k - j - 1 - epsilon)
        val = census.get(j, 0)
        cycle_ok[j] = val <= cap
        cycle_values[j] = val
        cycle_caps[j] = cap
    return AuditReport(
        float(t),
        epsilon,
        degree_value <= degree_cap,
        degree_value,
        degree_cap,
        cycle_ok,
        cycle_values,
        cycle_caps,
    )
