"""Hypergraph constructions: sunflowers, fans, grid systems, regular
linear packings, and the point-sampled polynomial-graph pipeline that
produces k-uniform systems in which no two edges meet in exactly l
vertices.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import Hypergraph, cycle_census, degree_profile
from .errors import ConstructionError, InputError, SamplingError, VerificationError
from .field import BipartiteGraph, build_polynomial_graph, is_prime
from .seeds import substream


def sunflower(k: int, l: int, lam: int) -> Hypergraph:
    """Sunflower with lam petals: edges of size k sharing a fixed l-core.

    Vertices [0, l) form the core; petal i occupies the next k - l
    vertices in order, so the layout is canonical.
    """
    if not (1 <= l < k):
        raise InputError("need 1 <= l < k")
    if lam < 1:
        raise InputError("need at least one petal")
    core = tuple(range(l))
    edges = []
    for i in range(lam):
        start = l + i * (k - l)
        edges.append(core + tuple(range(start, start + k - l)))
    return Hypergraph(l + lam * (k - l), edges)


def fan(k: int) -> Hypergraph:
    """k + 1 edges: k edges through an apex, pairwise meeting only there,
    plus one edge avoiding the apex that meets each of them exactly once.

    Canonical layout: apex 0, petal i on [1 + i(k-1), 1 + (i+1)(k-1)),
    and the crossing edge picks the first vertex of each petal.  At
    k = 2 this is the triangle.
    """
    if k < 2:
        raise InputError("need k >= 2")
    edges = []
    for i in range(k):
        start = 1 + i * (k - 1)
        edges.append((0,) + tuple(range(start, start + k - 1)))
    edges.append(tuple(1 + i * (k - 1) for i in range(k)))
    return Hypergraph(1 + k * (k - 1), edges)


def l_construction(m: int, n: int, k: int) -> Hypergraph:
    """Grid system on [m] x [n]: edges pick columns x_1 < ... < x_{k-1},
    rows y_1 > y_2, and consist of (x_1, y_1) plus (x_i, y_2) for all i.

    Vertex (x, y) with 1-based coordinates flattens to (x-1)*n + (y-1).
    The edge count is C(m, k-1) * C(n, 2); m < k-1 or n < 2 give the
    empty hypergraph on m*n vertices, which is legal.
    """
    if k < 3:
        raise InputError("need k >= 3")
    if m < 1 or n < 1:
        raise InputError("need m, n >= 1")

    def flat(x, y):
        return (x - 1) * n + (y - 1)

    edges = []
    for xs in itertools.combinations(range(1, m + 1), k - 1):
        for y2 in range(1, n + 1):
            for y1 in range(y2 + 1, n + 1):
                edge = [flat(xs[0], y1)] + [flat(x, y2) for x in xs]
                edges.append(edge)
    H = Hypergraph(m * n, edges)
    expected = math.comb(m, k - 1) * math.comb(n, 2)
    if H.num_edges != expected:
        raise VerificationError(
            f"grid system has {H.num_edges} edges, expected {expected}"
        )
    return H


# -- regular linear packings -------------------------------------------------

LEVEL_ATTEMPTS = 200
RESTARTS = 5
SWAP_FACTOR = 50


def _pairs(edge) -> list:
    return list(itertools.combinations(edge, 2))


def _matching_from_perm(perm, k) -> list:
    edges = []
    for i in range(len(perm) // k):
        edges.append(tuple(sorted(perm[i * k : (i + 1) * k])))
    return edges


def _violations(edges, covered) -> int:
    total = 0
    for e in edges:
        for p in _pairs(e):
            if p in covered:
                total += 1
    return total


def regular_linear(
    n: int,
    k: int,
    d: int,
    seed: int = 0,
    level_attempts: int = LEVEL_ATTEMPTS,
    restarts: int = RESTARTS,
    swap_factor: int = SWAP_FACTOR,
) -> Hypergraph:
    """Randomized search for a d-regular linear k-uniform hypergraph.

    Builds one perfect matching per level: a random permutation is
    chopped into n/k blocks, then repaired by hill-climbing swaps on the
    count of vertex pairs already covered by earlier levels.  Linearity
    and exact d-regularity are verified before returning; exhausting the
    retry budget raises ConstructionError carrying the level reached.
    """
    if k < 2:
        raise InputError("need k >= 2")
    if n % k != 0:
        raise InputError(f"{k} must divide {n}")
    if d < 0:
        raise InputError("degree must be nonnegative")
    if n == 0:
        if d > 0:
            raise InputError("no vertices to carry positive degree")
        return Hypergraph(0, ())
    if d > (n - 1) // (k - 1):
        raise InputError(
            f"degree {d} exceeds the linearity ceiling {(n - 1) // (k - 1)}"
        )
    if d == 0:
        return Hypergraph(n, ())

    rng = substream(seed, "regular-linear")
    blocks = n // k
    max_swaps = swap_factor * n
    reached = 1
    for _ in range(restarts):
        edges = _matching_from_perm(list(range(n)), k)  # level 1: lex matching
        covered = set()
        for e in edges:
            covered.update(_pairs(e))
        ok = True
        for level in range(2, d + 1):
            reached = max(reached, level)
            placed = None
            for _ in range(level_attempts):
                perm = list(rng.permutation(n))
                new_edges = _matching_from_perm(perm, k)
                bad = _violations(new_edges, covered)
                swaps = 0
                while bad > 0 and swaps < max_swaps:
                    a = int(rng.integers(n))
                    b = int(rng.integers(n))
                    if a == b or a // k == b // k:
                        swaps += 1
                        continue
                    ba, bb = a // k, b // k
                    before = _violations(
                        [new_edges[ba], new_edges[bb]], covered
                    )
                    perm[a], perm[b] = perm[b], perm[a]
                    cand_a = tuple(sorted(perm[ba * k : (ba + 1) * k]))
                    cand_b = tuple(sorted(perm[bb * k : (bb + 1) * k]))
                    after = _violations([cand_a, cand_b], covered)
                    if after < before:
                        new_edges[ba], new_edges[bb] = cand_a, cand_b
                        bad += after - before
                    else:
                        perm[a], perm[b] = perm[b], perm[a]
                    swaps += 1
                if bad == 0:
                    placed = new_edges
                    break
            if placed is None:
                ok = False
                break
            edges.extend(placed)
            for e in placed:
                covered.update(_pairs(e))
        if ok:
            H = Hypergraph(n, edges)
            degs = H.vertex_degrees()
            if any(deg != d for deg in degs):
                raise VerificationError("packing is not exactly regular")
            if not cycle_census(H).is_linear:
                raise VerificationError("packing is not linear")
            return H
    raise ConstructionError(
        f"no {d}-regular linear packing on {n} vertices within budget",
        level=reached,
    )


# -- incidence hypergraphs and point sampling ---------------------------------


def incidence_hypergraph(G: BipartiteGraph) -> Hypergraph:
    """Neighbor sets of left vertices as edges on the right vertex set.

    Left vertices of degree < 2 are rejected; identical neighborhoods
    collapse (the count is available as ``duplicates_collapsed``).
    """
    if any(len(row) < 2 for row in G.adjacency):
        raise InputError("every left vertex needs degree >= 2")
    if G.m and all(len(row) == len(G.adjacency[0]) for row in G.adjacency):
        arr = np.array(G.adjacency, dtype=np.int64)
        return Hypergraph.from_rows(G.n_right, arr)
    return Hypergraph(G.n_right, G.adjacency)


@dataclass(frozen=True)
class SubsampleResult:
    kept: tuple  # surviving vertices, ascending
    p: float
    vertex_window: Optional[tuple]
    trace_window: Optional[tuple]
    rejected_rounds: int
    trace_min: int
    trace_max: int


def subsample_vertices(
    H: Hypergraph,
    p: float,
    vertex_window: Optional[tuple] = None,
    trace_window: Optional[tuple] = None,
    seed: int = 0,
    max_retries: int = 1000,
) -> SubsampleResult:
    """Bernoulli(p) vertex sample, jointly resampled until |U| lies in
    ``vertex_window`` and every edge trace |E ∩ U| lies in
    ``trace_window`` (either window may be None for unconstrained).

    Raises SamplingError when ``max_retries`` rounds all miss.
    """
    if not (0.0 <= p <= 1.0):
        raise InputError("p must lie in [0, 1]")
    rng = substream(seed, "subsample")
    if H.edges:
        flat = np.fromiter(
            itertools.chain.from_iterable(H.edges), dtype=np.int64,
            count=sum(len(e) for e in H.edges),
        )
        offsets = np.cumsum([0] + [len(e) for e in H.edges[:-1]])
    else:
        flat = offsets = None
    for attempt in range(max_retries):
        mask = rng.random(H.n) < p
        size = int(mask.sum())
        if vertex_window is not None and not (
            vertex_window[0] <= size <= vertex_window[1]
        ):
            continue
        if flat is not None:
            traces = np.add.reduceat(mask[flat].astype(np.int64), offsets)
            tmin, tmax = int(traces.min()), int(traces.max())
        else:
            tmin, tmax = 0, 0
        if trace_window is not None and flat is not None:
            if tmin < trace_window[0] or tmax > trace_window[1]:
                continue
        kept = tuple(int(v) for v in np.nonzero(mask)[0])
        return SubsampleResult(
            kept, p, vertex_window, trace_window, attempt, tmin, tmax
        )
    raise SamplingError(
        f"windows missed in {max_retries} rounds "
        f"(vertex={vertex_window}, trace={trace_window})"
    )


# -- fitting families of stars -------------------------------------------------


@dataclass(frozen=True)
class FittingFamily:
    """One member k-graph per base edge, plus the bijections onto them.

    Member i lives on [0, m_i) with m_i the size of base edge i;
    ``bijections[i][j]`` is the image of the j-th smallest vertex of
    base edge i.
    """

    base: Hypergraph
    k: int
    l: int
    members: tuple
    bijections: tuple


def fitting_family_star(
    H: Hypergraph,
    k: int,
    l: int,
    seed: int = 0,
    small: str = "error",
) -> FittingFamily:
    """Fit each base edge with the star of k-sets through a fixed
    (l+1)-core: member i has every k-subset of [m_i] containing
    {0, ..., l}, carried onto the edge by a seeded random bijection.

    ``small`` controls base edges with m_i < k: ``"error"`` rejects
    them, ``"empty"`` assigns the empty member (used by the sampled
    pipeline, where undersized traces are expected at desk scale).
    """
    if l < 1:
        raise InputError("need l >= 1")
    if k < l + 1:
        raise InputError("need k >= l + 1 so the core fits inside an edge")
    if small not in ("error", "empty"):
        raise InputError("small must be 'error' or 'empty'")
    members = []
    bijections = []
    core = tuple(range(l + 1))
    for i, edge in enumerate(H.edges):
        m_i = len(edge)
        perm = tuple(int(x) for x in substream(seed, "psi", i).permutation(m_i))
        bijections.append(perm)
        if m_i < k:
            if small == "error":
                raise InputError(
                    f"base edge {i} has size {m_i} < k={k}; no k-subsets exist"
                )
            members.append(Hypergraph(m_i, ()))
            continue
        rest = [v for v in range(m_i) if v > l]
        star = [
            tuple(sorted(core + tail))
            for tail in itertools.combinations(rest, k - l - 1)
        ]
        members.append(Hypergraph(m_i, star))
    return FittingFamily(H, k, l, tuple(members), tuple(bijections))


def realize(fam: FittingFamily) -> Hypergraph:
    """Union of the member edges carried back onto the base vertex set.

    Each member edge g of member i becomes the preimage of g under the
    member's bijection, a k-subset of base edge i.  Coincidences across
    base edges deduplicate; compare ``num_edges`` with the member total
    to count them.
    """
    edges = set()
    for i, member in enumerate(fam.members):
        base_edge = fam.base.edges[i]
        perm = fam.bijections[i]
        pos_of = {image: j for j, image in enumerate(perm)}
        for g in member.edges:
            edges.add(tuple(sorted(base_edge[pos_of[v]] for v in g)))
    return Hypergraph(fam.base.n, edges)


def p_tau(m_i: int, l: int, tau: int) -> Fraction:
    """Probability that a uniform tau-subset of [m_i] contains the fixed
    (l+1)-core: C(m_i - l - 1, tau - l - 1) / C(m_i, tau)."""
    if not (l + 1 <= tau <= m_i):
        raise InputError("need l + 1 <= tau <= m_i")
    return Fraction(math.comb(m_i - l - 1, tau - l - 1), math.comb(m_i, tau))


def tau_default(n: int, l: int) -> int:
    """Desk-scale witness-set size: ceil(100 * (log n)**(1/l))."""
    if n < 2:
        raise InputError("need n >= 2")
    return math.ceil(100.0 * math.log(n) ** (1.0 / l))


# -- the omitting-system pipeline ----------------------------------------------


def smallest_feasible_q(l: int, k: int) -> int:
    """Smallest prime q whose lower trace band q**((l-1)/(l+1))/2 reaches k.

    This is the preflight calculator: below it, even in-band traces are
    too small to host any k-subset through the core.
    """
    if l < 2:
        raise InputError("preflight needs l >= 2 (l = 1 traces do not grow)")
    if k < l + 1:
        raise InputError("need k >= l + 1")
    q = max(2, math.ceil((2 * k) ** ((l + 1) / (l - 1))))
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class OmittingBuild:
    hypergraph: Hypergraph
    record: dict


def omitting_system(
    q: int,
    l: int,
    k: int,
    seed: int = 0,
    max_retries: int = 200,
) -> OmittingBuild:
    """Sampled polynomial-graph pipeline for a k-graph in which no two
    edges meet in exactly l vertices.

    Stages: polynomial bipartite graph over GF(q); its incidence
    q-graph on the q**2 points; a Bernoulli vertex sample at
    p = q**(-2/(l+1)) gated on the |U| band [p q**2 / 2, 3 p q**2 / 2];
    a fitting family of stars over the edge traces; realization.  Edges
    from one base trace share the (l+1)-core preimage, edges from
    different traces meet in at most l - 1 vertices, so intersections
    of size exactly l never occur --- verified before returning.

    Per-edge trace bands cannot all hold simultaneously at buildable
    scales (the miss probability per trace is a constant), so traces
    are not resampled against a band; undersized traces (< k) get empty
    members and are counted in the record.  The record also carries the
    in-band fraction so the concentration regime can be audited.
    """
    if l < 1:
        raise InputError("need l >= 1")
    if k < l + 1:
        raise InputError("need k >= l + 1")
    if not is_prime(q):
        raise InputError(f"modulus {q} is not prime")
    t0 = time.perf_counter()
    p = float(q) ** (-2.0 / (l + 1))
    graph = build_polynomial_graph(q, l)
    host = incidence_hypergraph(graph)
    mu_size = p * q * q
    vertex_window = (math.floor(mu_size / 2.0), math.ceil(3.0 * mu_size / 2.0))
    sample = subsample_vertices(
        host, p, vertex_window=vertex_window, trace_window=None,
        seed=seed, max_retries=max_retries,
    )
    kept = sample.kept
    pos = {v: i for i, v in enumerate(kept)}
    kept_mask = np.zeros(host.n, dtype=bool)
    kept_mask[list(kept)] = True
    traces = []
    tiny = 0
    for e in host.edges:
        t = tuple(pos[v] for v in e if kept_mask[v])
        if len(t) >= 2:
            traces.append(t)
        else:
            tiny += 1
    base = Hypergraph(len(kept), traces)
    mu_trace = p * q
    band = (mu_trace / 2.0, 3.0 * mu_trace / 2.0)
    sizes = [len(e) for e in base.edges]
    in_band = sum(1 for s in sizes if band[0] <= s <= band[1])
    fam = fitting_family_star(base, k, l, seed=seed, small="empty")
    small_members = sum(1 for mem in fam.members if mem.num_edges == 0)
    member_total = sum(mem.num_edges for mem in fam.members)
    if member_total == 0:
        raise InputError(
            f"no trace reached size k={k}; q={q} is below the workable range"
        )
    result = realize(fam)
    from .oracles import omitting_check  # local import to avoid a cycle

    witness = omitting_check(result, l)
    if witness is not None:
        raise VerificationError(f"omitting check failed: {witness}")
    preflight_met = l >= 2 and q >= smallest_feasible_q(l, k)
    record = {
        "construction": "omitting-system",
        "q": q,
        "l": l,
        "k": k,
        "seed": seed,
        "p": p,
        "vertex_window": list(vertex_window),
        "sample_size": len(kept),
        "rejected_rounds": sample.rejected_rounds,
        "trace_band": list(band),
        "trace_min": min(sizes) if sizes else 0,
        "trace_max": max(sizes) if sizes else 0,
        "trace_in_band_fraction": in_band / len(sizes) if sizes else 0.0,
        "traces_below_two": tiny,
        "empty_members": small_members,
        "member_edge_total": member_total,
        "realized_edges": result.num_edges,
        "realize_collisions": member_total - result.num_edges,
        "preflight_met": preflight_met,
        "omitting_check": "pass",
        "elapsed_s": time.perf_counter() - t0,
    }
    return OmittingBuild(result, record)


def random_omitting_system(
    n: int, k: int, l: int, target_edges: int, seed: int = 0,
    max_attempts_factor: int = 200,
) -> Hypergraph:
    """Greedy rejection sampler: random k-sets enter unless they meet a
    chosen edge in exactly l vertices.  Used for adversarial grids and
    trend experiments; the omitting property is guaranteed by the
    acceptance test itself.
    """
    if not (0 <= l < k):
        raise InputError("need 0 <= l < k")
    if n < k:
        raise InputError("need n >= k")
    rng = substream(seed, "random-omitting")
    chosen = set()
    chosen_sets = []
    attempts = 0
    limit = max_attempts_factor * max(target_edges, 1)
    while len(chosen) < target_edges and attempts < limit:
        attempts += 1
        cand = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
        if cand in chosen:
            continue
        cset = set(cand)
        if any(len(cset & s) == l for s in chosen_sets):
            continue
        chosen.add(cand)
        chosen_sets.append(cset)
    return Hypergraph(n, chosen)
