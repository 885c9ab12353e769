"""Randomized and structural processes over hypergraphs.

The centerpiece is the two-rule random greedy independent-set process:
pick a live vertex uniformly; edges of size >= 3 through it shrink by
one vertex; vertices paired with it by a size-2 edge leave together
with every edge through them.  The other routines split, decompose, and
repair hypergraphs so that the greedy's output can be certified on both
sides of a split.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Hypergraph,
    cartesian_product,
    cycle_census,
    degree_profile,
    induced,
    link,
    shadow,
)
from .errors import InputError, VerificationError
from .seeds import spawn_seed, substream


@dataclass(frozen=True)
class GreedyTrace:
    """Record of one greedy run.

    ``steps[i]`` is (step index, chosen vertex, live vertices before the
    pick, live edges before the pick).
    """

    steps: tuple
    independent_set: tuple
    i_max: int
    completed: bool


def _is_independent(H: Hypergraph, vertices) -> bool:
    s = set(vertices)
    return not any(s.issuperset(e) for e in H.edges)


def _is_maximal(H: Hypergraph, vertices) -> bool:
    s = set(vertices)
    for u in range(H.n):
        if u in s:
            continue
        su = s | {u}
        if not any(su.issuperset(e) for e in H.edges):
            return False
    return True


def greedy_independent_set(
    H: Hypergraph, seed: int = 0, stop_at: Optional[int] = None
) -> GreedyTrace:
    """Run the two-rule random greedy process.

    At each step a uniform live vertex v joins the set.  Edges of the
    working hypergraph through v of size >= 3 shrink by v; a vertex u
    with {u, v} a working edge is deleted along with every edge through
    it.  Stops when no live vertex remains, or after ``stop_at`` picks.
    The result is checked independent (and maximal, on runs that
    exhaust the live set) against the input before returning.
    """
    if stop_at is not None and stop_at < 0:
        raise InputError("stop_at must be nonnegative")
    rng = substream(seed, "greedy")
    live = list(range(H.n))
    work = set(H.edge_masks())
    chosen = []
    steps = []
    while live and (stop_at is None or len(chosen) < stop_at):
        pick = live[int(rng.integers(len(live)))]
        steps.append((len(chosen), pick, len(live), len(work)))
        chosen.append(pick)
        vbit = 1 << pick
        neighbors = 0
        for e in work:
            if e & vbit and e.bit_count() == 2:
                neighbors |= e ^ vbit
        gone = neighbors | vbit
        new_work = set()
        for e in work:
            if e & neighbors:
                continue
            if e & vbit:
                new_work.add(e ^ vbit)
            else:
                new_work.add(e)
        work = new_work
        live = [u for u in live if not (gone >> u) & 1]
    completed = not live
    result = tuple(sorted(chosen))
    if not _is_independent(H, result):
        raise VerificationError("greedy produced a dependent set")
    if completed and not _is_maximal(H, result):
        raise VerificationError("greedy terminated on a non-maximal set")
    return GreedyTrace(tuple(steps), result, len(chosen), completed)


@dataclass(frozen=True)
class ProbeEstimate:
    mean: float
    std_error: float
    benchmark: float
    trials: int
    reached: int  # smallest step index actually reached across trials


def containment_probe(
    H: Hypergraph, G: Hypergraph, i: int, trials: int = 1000, seed: int = 0
) -> ProbeEstimate:
    """Estimate how many edges of G survive inside the greedy set I(i).

    Each trial runs the greedy on H for i steps and counts edges of G
    fully contained in the output.  The benchmark is the independent
    uniform heuristic (i/n)**k' * |G|.
    """
    if H.n != G.n:
        raise InputError("H and G must share a vertex set")
    if i < 0:
        raise InputError("step index must be nonnegative")
    kG = G.uniform_k
    if kG is None and G.edges:
        raise InputError("probe target must be uniform")
    g_masks = G.edge_masks()
    counts = []
    reached = i
    for t in range(trials):
        trace = greedy_independent_set(H, spawn_seed(seed, "probe", t), stop_at=i)
        reached = min(reached, trace.i_max)
        s = 0
        for v in trace.independent_set:
            s |= 1 << v
        counts.append(sum(1 for m in g_masks if m & s == m))
    arr = np.array(counts, dtype=np.float64)
    mean = float(arr.mean()) if trials else 0.0
    se = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    bench = (i / H.n) ** kG * G.num_edges if H.n and G.edges else 0.0
    return ProbeEstimate(mean, se, bench, trials, reached)


# -- decomposition ------------------------------------------------------------


@dataclass(frozen=True)
class DecomposedMember:
    hypergraph: Hypergraph
    k: Optional[int]  # edge size; None only for an empty input
    provenance: tuple  # chain of split decisions


@dataclass(frozen=True)
class DecompositionResult:
    family: tuple
    k0: int
    lam: int
    lambda_base: int


def decompose(H: Hypergraph, k0: int, lam: int, budget: int = 5_000_000
              ) -> DecompositionResult:
    """Split H into at most 2**(k - k0) indecomposable members.

    While some member of size k' > k0 contains a sunflower with core
    size k' - i and lambda_i = (k * lam)**(2**(i-1)) petals (k the
    original size), split it at the smallest such i into the
    (k'-i)-sets of degree >= lambda_i and the edges avoiding them.
    Verifies the family bound, member indecomposability, and that every
    input edge contains a member edge.
    """
    from .oracles import indecomposability_check

    if k0 < 2:
        raise InputError("need k0 >= 2, lower sizes are not hypergraph edges")
    if lam < 2:
        raise InputError("need lam >= 2")
    k = H.uniform_k
    if H.edges and k is None:
        raise InputError("decompose requires a uniform hypergraph")
    if not H.edges:
        member = DecomposedMember(H, k, ("input",))
        return DecompositionResult((member,), k0, lam, 0)
    if k < k0:
        raise InputError(f"edge size {k} below the floor {k0}")
    base = k * lam
    done = []
    work = [DecomposedMember(H, k, ("input",))]
    rounds = 0
    cap = 4 ** max(k, 2)
    while work:
        rounds += 1
        if rounds > cap:
            raise VerificationError("decomposition failed to terminate")
        member = work.pop()
        G, kp = member.hypergraph, member.k
        if not G.edges or kp == k0:
            done.append(member)
            continue
        res = indecomposability_check(G, k0, lam, budget, lambda_base=base)
        if res.indecomposable:
            done.append(member)
            continue
        i0 = res.i0
        lam_i = base ** (2 ** (i0 - 1))
        size = kp - i0
        deg = {}
        for e in G.edges:
            for s in itertools.combinations(e, size):
                deg[s] = deg.get(s, 0) + 1
        heavy = sorted(s for s, d in deg.items() if d >= lam_i)
        heavy_set = set(heavy)
        low = [
            e
            for e in G.edges
            if not any(s in heavy_set for s in itertools.combinations(e, size))
        ]
        tag = f"split k'={kp} i0={i0} lam_i={lam_i}"
        work.append(
            DecomposedMember(
                Hypergraph(G.n, heavy), size, member.provenance + (tag + " heavy",)
            )
        )
        work.append(
            DecomposedMember(
                Hypergraph(G.n, low), kp, member.provenance + (tag + " low",)
            )
        )
    done.sort(key=lambda m: (-(m.k or 0), m.provenance))
    family = tuple(done)
    if len(family) > 2 ** (k - k0):
        raise VerificationError(
            f"family size {len(family)} exceeds 2**(k-k0) = {2 ** (k - k0)}"
        )
    for member in family:
        res = indecomposability_check(
            member.hypergraph, k0, lam, budget, lambda_base=base
        )
        if not res.indecomposable:
            raise VerificationError("member is still decomposable")
    member_edges = [
        (set(e), m.hypergraph) for m in family for e in m.hypergraph.edges
    ]
    for e in H.edges:
        es = set(e)
        if not any(me <= es for me, _ in member_edges):
            raise VerificationError(f"input edge {e} contains no member edge")
    return DecompositionResult(family, k0, lam, base)


# -- degree split --------------------------------------------------------------


@dataclass(frozen=True)
class SplitResult:
    high: Hypergraph  # (k-1)-sets of degree >= threshold
    low: Hypergraph  # edges avoiding all of them
    threshold: float


def degree_split(H: Hypergraph, threshold: Optional[float] = None) -> SplitResult:
    """Split a k-graph by shadow degree.

    ``high`` collects the (k-1)-subsets of edges whose degree reaches
    the threshold; ``low`` keeps the edges containing none of them.
    The default threshold is n**((k-3)/(k-1)) / (log n)**(4/5).
    """
    k = H.uniform_k
    if k is None or k < 3:
        raise InputError("degree split requires a uniform hypergraph with k >= 3")
    if threshold is None:
        if H.n < 3:
            raise InputError("default threshold needs n >= 3")
        threshold = H.n ** ((k - 3) / (k - 1)) / math.log(H.n) ** 0.8
    if threshold <= 0:
        raise InputError("threshold must be positive")
    deg = {}
    for e in H.edges:
        for s in itertools.combinations(e, k - 1):
            deg[s] = deg.get(s, 0) + 1
    heavy = sorted(s for s, d in deg.items() if d >= threshold)
    heavy_set = set(heavy)
    low = [
        e
        for e in H.edges
        if not any(s in heavy_set for s in itertools.combinations(e, k - 1))
    ]
    return SplitResult(Hypergraph(H.n, heavy), Hypergraph(H.n, low), float(threshold))


# -- probabilistic deletion -----------------------------------------------------


@dataclass(frozen=True)
class DeletionResult:
    best_set: tuple
    best_size: int
    mean_expected: float  # mean of |I| - sum of surviving edge counts
    mean_repaired: float
    trials: int
    p: float


def deletion_lower_bound(
    family: Sequence[Hypergraph],
    p: float,
    trials: int = 100,
    seed: int = 0,
) -> DeletionResult:
    """Sample-and-repair floor for simultaneous independence.

    Each trial samples vertices independently at rate p, then walks the
    members' edges in order, deleting the lowest-index vertex of any
    edge still fully inside the sample.  The repaired set is verified
    independent in every member; the best one over the trials is
    returned along with the first-moment statistic
    mean(|I| - sum_i |edges of member i inside I|).
    """
    if not family:
        raise InputError("need at least one member")
    n = family[0].n
    if any(m.n != n for m in family):
        raise InputError("members must share a vertex count")
    if not (0.0 <= p <= 1.0):
        raise InputError("p must lie in [0, 1]")
    if trials < 1:
        raise InputError("need at least one trial")
    member_masks = [m.edge_masks() for m in family]
    best_set: tuple = ()
    expected_stats = []
    repaired_sizes = []
    for t in range(trials):
        rng = substream(seed, "deletion", t)
        sample_mask = 0
        for v in np.nonzero(rng.random(n) < p)[0]:
            sample_mask |= 1 << int(v)
        surviving = sum(
            sum(1 for e in masks if e & sample_mask == e) for masks in member_masks
        )
        expected_stats.append(sample_mask.bit_count() - surviving)
        current = sample_mask
        for masks in member_masks:
            for e in masks:
                if e & current == e:
                    current ^= e & -e  # drop the lowest-index vertex
        for masks in member_masks:
            for e in masks:
                if e & current == e:
                    raise VerificationError("repair left a surviving edge")
        repaired_sizes.append(current.bit_count())
        if current.bit_count() > len(best_set):
            best_set = tuple(
                v for v in range(n) if (current >> v) & 1
            )
    return DeletionResult(
        best_set,
        len(best_set),
        float(np.mean(expected_stats)),
        float(np.mean(repaired_sizes)),
        trials,
        p,
    )


# -- greedy matching -----------------------------------------------------------


@dataclass(frozen=True)
class MatchingResult:
    edges: tuple  # indices into the host's canonical edge order
    size: int
    floor: Optional[float]  # m / prod (i+1) lam_i, when context given


def greedy_matching(
    H: Hypergraph, lambda_context: Optional[Sequence[int]] = None
) -> MatchingResult:
    """First-fit maximal matching over the canonical edge order.

    With ``lambda_context`` = (lam_1, ..., lam_{k-1}) the result also
    carries the floor m / prod_{i=1}^{k-1} (i+1) * lam_i that the
    first-fit matching must clear on hypergraphs free of the
    corresponding sunflower ladder.
    """
    used = 0
    picked = []
    for idx, e in enumerate(H.edge_masks()):
        if not e & used:
            used |= e
            picked.append(idx)
    floor = None
    if lambda_context is not None:
        k = H.uniform_k
        if k is None:
            raise InputError("floor context requires a uniform hypergraph")
        if len(lambda_context) != k - 1:
            raise InputError(f"need k-1 = {k - 1} lambda values")
        denom = 1
        for i, lam_i in enumerate(lambda_context, start=1):
            denom *= (i + 1) * lam_i
        floor = H.num_edges / denom
    return MatchingResult(tuple(picked), len(picked), floor)


# -- regularized product pipeline ------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    common_set: tuple
    column: int
    column_set: tuple
    greedy_size: int
    target_steps: int
    shortfall: bool
    repairs: int
    m: int
    D: int
    p: float


def _cycle_spans(G: Hypergraph, j: int) -> list:
    """Vertex spans of edge pairs meeting in exactly j vertices."""
    spans = set()
    masks = G.edge_masks()
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            inter = masks[a] & masks[b]
            if inter.bit_count() == j:
                spans.add(masks[a] | masks[b])
    return sorted(spans)


def product_pipeline(
    H: Hypergraph,
    G: Hypergraph,
    D: int,
    m: Optional[int] = None,
    seed: int = 0,
    c: float = 0.5,
    k1: Optional[int] = None,
) -> PipelineResult:
    """Find one set independent in both H and G via vertex blow-up.

    Every vertex of H gets a regular linear pad lifting its degree to
    D; the greedy runs on the padded product for about
    c * ((log nm) / D)**(1/(k1-1)) * nm steps; surviving spans of
    G-edge pairs inside the output are repaired away, which leaves the
    trace of G linear on every column; the densest column is restricted
    to G and finished with a low-degree-first greedy pass.  The result
    is verified independent in both inputs.
    """
    from .constructions import regular_linear

    if H.n != G.n:
        raise InputError("H and G must share a vertex set")
    n = H.n
    if not H.edges and not G.edges:
        return PipelineResult(
            tuple(range(n)), 0, tuple(range(n)), n, n, False, 0, 1, D, 1.0
        )
    k1 = k1 if k1 is not None else H.uniform_k
    if k1 is None:
        raise InputError("pass k1 explicitly when H is empty")
    if k1 < 2:
        raise InputError("need k1 >= 2")
    degrees = H.vertex_degrees()
    if max(degrees, default=0) > D:
        raise InputError(f"D={D} below the maximum degree of H")
    if D < 1:
        raise InputError("need D >= 1")
    if m is None:
        m = 4 * D + 1
        m += (-m) % k1  # smallest multiple of k1 exceeding 4D
    if m % k1:
        raise InputError(f"k1={k1} must divide m={m}")
    k2 = G.uniform_k
    if G.edges and k2 is None:
        raise InputError("G must be uniform")

    pads = [
        regular_linear(m, k1, D - degrees[v], seed=spawn_seed(seed, "pad", v))
        for v in range(n)
    ]
    padded = cartesian_product(H, pads)
    nm = n * m
    p = min(1.0, c * (math.log(nm) / D) ** (1.0 / (k1 - 1)))
    target = max(1, math.floor(p * nm))
    trace = greedy_independent_set(padded, spawn_seed(seed, "grow"), stop_at=target)
    shortfall = trace.i_max < target and trace.completed
    current = 0
    for v in trace.independent_set:
        current |= 1 << v

    repairs = 0
    if G.edges and k2 and k2 >= 3:
        span_masks = []
        for j in range(2, k2):
            for span in _cycle_spans(G, j):
                span_masks.append(span)
        lifted = []
        for span in sorted(set(span_masks)):
            vs = [u for u in range(n) if (span >> u) & 1]
            for col in range(m):
                lifted.append(_tuple_mask_cols(vs, col, m))
        for s in lifted:
            if s & current == s:
                current ^= s & -s
                repairs += 1

    col_counts = [0] * m
    mask = current
    while mask:
        b = mask & -mask
        col_counts[(b.bit_length() - 1) % m] += 1
        mask ^= b
    column = max(range(m), key=lambda j: (col_counts[j], -j))
    col_set = [
        u for u in range(n) if (current >> (u * m + column)) & 1
    ]

    # the column restriction of G is linear after span repair; finish it
    # with a lowest-degree-first greedy pass
    residual = induced(G, col_set)
    order = sorted(range(residual.n), key=lambda v: (residual.vertex_degrees()[v], v))
    res_masks = residual.edge_masks()
    acc = 0
    for v in order:
        cand = acc | (1 << v)
        if not any(e & cand == e for e in res_masks):
            acc = cand
    final = tuple(sorted(col_set[v] for v in range(residual.n) if (acc >> v) & 1))

    if not _is_independent(H, final):
        raise VerificationError("pipeline output dependent in H")
    if not _is_independent(G, final):
        raise VerificationError("pipeline output dependent in G")
    return PipelineResult(
        final,
        column,
        tuple(sorted(col_set)),
        trace.i_max,
        target,
        shortfall,
        repairs,
        m,
        D,
        p,
    )


def _tuple_mask_cols(vertices, col: int, m: int) -> int:
    out = 0
    for u in vertices:
        out |= 1 << (u * m + col)
    return out
