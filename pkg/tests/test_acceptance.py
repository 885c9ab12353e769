"""Acceptance gate.

One test per criterion; each prints a single pass line so a verbose run
reads as a checklist.  Budgets and tolerances are asserted, not logged.
"""

import math
import random
import time
from itertools import combinations

import numpy as np

from conftest import brute_alpha, random_uniform
from omitlab.constructions import (
    fan,
    l_construction,
    omitting_system,
    random_omitting_system,
    regular_linear,
    smallest_feasible_q,
    sunflower,
)
from omitlab.core import Hypergraph, cycle_census
from omitlab.errors import ConstructionError
from omitlab.experiments import run_experiment
from omitlab.field import build_polynomial_graph, k2l_free_check, mixing_discrepancy
from omitlab.oracles import (
    contains_fan,
    contains_sunflower,
    indecomposability_check,
    max_independent_set_exact,
    omitting_check,
)
from omitlab.processes import (
    decompose,
    deletion_lower_bound,
    greedy_independent_set,
    greedy_matching,
)
from omitlab.seeds import substream
from omitlab.spectral import polynomial_graph_reference_spectrum, spectrum

SPECTRUM_GRID = ((3, 2), (5, 2), (7, 2), (3, 3))


def _is_valid_greedy_output(H, vertices):
    masks = H.edge_masks()
    chosen = 0
    for v in vertices:
        chosen |= 1 << v
    for em in masks:
        if em and not (em & ~chosen):
            return False  # an edge survived
    for v in range(H.n):
        if chosen >> v & 1:
            continue
        grown = chosen | 1 << v
        if all(em & ~grown for em in masks):
            return False  # not maximal
    return True


def _disjoint_union(A, B):
    shifted = [[v + A.n for v in e] for e in B.edges]
    return Hypergraph(A.n + B.n, list(A.edges) + shifted)


def test_criterion_01_spectrum_certificate():
    start = time.monotonic()
    worst = 0.0
    for q, l in SPECTRUM_GRID:
        G = build_polynomial_graph(q, l)
        got = np.sort(np.asarray(spectrum(G).eigenvalues))[::-1]
        want = np.sort(np.asarray(polynomial_graph_reference_spectrum(q, l)))[::-1]
        assert got.shape == want.shape
        worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.monotonic() - start
    assert worst <= 1e-8
    assert elapsed < 10.0
    print(f"criterion 1: PASS (max eigenvalue error {worst:.2e}, {elapsed:.2f}s)")


def test_criterion_02_regularity_and_zarankiewicz():
    start = time.monotonic()
    for q, l in SPECTRUM_GRID:
        G = build_polynomial_graph(q, l)
        assert set(G.left_degrees()) == {q}
        assert set(G.right_degrees()) == {q ** (l - 1)}
        assert k2l_free_check(G, l) is None
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    print(f"criterion 2: PASS (4 graphs biregular and K(2,l)-free, {elapsed:.2f}s)")


def test_criterion_03_mixing():
    start = time.monotonic()
    G = build_polynomial_graph(7, 2)
    lam = spectrum(G).lambda2
    rng = substream(0, "acceptance-mixing")
    violations = 0
    for _ in range(1000):
        X = [i for i in range(G.m) if rng.random() < 0.5]
        Y = [j for j in range(G.n_right) if rng.random() < 0.5]
        if not X or not Y:
            continue
        if not mixing_discrepancy(G, X, Y, lam).within_bound:
            violations += 1
    elapsed = time.monotonic() - start
    assert violations == 0
    assert elapsed < 5.0
    print(f"criterion 3: PASS (1000 pairs, 0 violations, lambda2={lam:.4f}, {elapsed:.2f}s)")


def test_criterion_04_omitting_certificate():
    q = smallest_feasible_q(2, 3)
    worst = 0.0
    for seed in range(10):
        start = time.monotonic()
        build = omitting_system(q, 2, 3, seed=seed)
        assert omitting_check(build.hypergraph, 2) is None
        elapsed = time.monotonic() - start
        worst = max(worst, elapsed)
        assert elapsed < 60.0
    print(f"criterion 4: PASS (10 builds at q={q}, slowest {worst:.1f}s)")


def test_criterion_05_ramsey_certificate():
    start = time.monotonic()
    for t, k in ((5, 3), (6, 3), (7, 3), (6, 4)):
        m = t // 2
        n = (t - 1) // (2 * (k - 2))
        L = l_construction(m, n, k)
        assert contains_fan(L) is None
        alpha, _ = max_independent_set_exact(L)
        assert alpha <= t - 1  # certifies r > m * n
    for k in (3, 4):
        for m in range(1, 6):
            for n in range(1, 5):
                L = l_construction(m, n, k)
                alpha, _ = max_independent_set_exact(L)
                assert alpha < m + (k - 2) * n
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    print(f"criterion 5: PASS (4 certificates + 40 alpha bounds, {elapsed:.1f}s)")


def test_criterion_06_greedy_validity_and_uniformity():
    rng = random.Random(606)
    instances = [
        sunflower(3, 1, 5),
        fan(3),
        l_construction(4, 3, 3),
        regular_linear(12, 3, 3, seed=0),
        random_omitting_system(14, 3, 2, 12, seed=1),
        Hypergraph(12, []),
    ]
    while len(instances) < 20:
        n = rng.randint(10, 16)
        k = rng.choice([2, 3])
        instances.append(random_uniform(n, k, rng.randint(8, 24), rng))
    for H in instances:
        for seed in range(1000):
            trace = greedy_independent_set(H, seed=seed)
            assert _is_valid_greedy_output(H, trace.independent_set)

    empty = Hypergraph(20, [])
    hits = 0
    for seed in range(1000):
        trace = greedy_independent_set(empty, seed=seed, stop_at=5)
        picked = set(trace.independent_set)
        hits += 0 in picked and 1 in picked
    p = (5 * 4) / (20 * 19)
    se = math.sqrt(p * (1 - p) / 1000)
    assert abs(hits / 1000 - p) <= 4 * se
    print(f"criterion 6: PASS (20000 valid runs; pair frequency {hits / 1000:.4f} vs {p:.4f})")


def test_criterion_07_decomposition_invariants():
    start = time.monotonic()
    rng = random.Random(707)
    instances = []
    for i in range(15):
        k = 3 + i % 4
        l = 1 + i % (k - 1)
        n = rng.choice([24, 30, 36, 40])
        instances.append(random_omitting_system(n, k, l, rng.randint(8, 14), seed=i))
    for k in (3, 4, 5, 6):
        # a core exactly at the first threshold, alone and beside bystanders
        fat = sunflower(k, k - 1, 2 * k)
        instances.append(fat)
        instances.append(_disjoint_union(fat, regular_linear(3 * k, k, 1, seed=k)))
        if len(instances) < 30:
            instances.append(_disjoint_union(fat, sunflower(k, 1, 2)))
    instances = instances[:30]
    assert len(instances) == 30

    for idx, H in enumerate(instances):
        k = H.uniform_k
        res = decompose(H, 2, 2)
        assert 1 <= len(res.family) <= 2 ** (k - 2)
        for member in res.family:
            check = indecomposability_check(member.hypergraph, 2, 2, lambda_base=res.lambda_base)
            assert check.indecomposable
        member_edges = [set(e) for m in res.family for e in m.hypergraph.edges]
        for e in H.edges:
            assert any(f <= set(e) for f in member_edges)
        dele = deletion_lower_bound([m.hypergraph for m in res.family], 0.6, trials=10, seed=idx)
        survivors = set(dele.best_set)
        for e in H.edges:
            assert not set(e) <= survivors
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    print(f"criterion 7: PASS (30 instances, 0 failures, {elapsed:.1f}s)")


def _verified_lambda_context(H):
    # smallest petal counts the sunflower oracle certifies as absent
    k = H.uniform_k
    lams = []
    for i in range(1, k):
        lam = 2
        while lam <= 64 and contains_sunflower(H, k - i, lam) is not None:
            lam += 1
        assert lam <= 64
        lams.append(lam)
    return lams


def test_criterion_08_matching_floor():
    rng = random.Random(808)
    instances = []
    for seed in range(5):
        instances.append(regular_linear(9, 3, 2, seed=seed))
        instances.append(regular_linear(15, 3, 3, seed=seed))
        instances.append(regular_linear(16, 4, 2, seed=seed))
    for seed in range(10):
        instances.append(random_omitting_system(rng.randint(12, 20), 3, 2, rng.randint(8, 16), seed=seed))
    for seed in range(5):
        instances.append(random_uniform(rng.randint(10, 14), 4, rng.randint(6, 14), rng))
    assert len(instances) == 30

    for H in instances:
        lams = _verified_lambda_context(H)
        result = greedy_matching(H, lambda_context=lams)
        floor = H.num_edges
        for i, lam in enumerate(lams, start=1):
            floor /= (i + 1) * lam
        assert result.floor == floor or abs(result.floor - floor) < 1e-12
        assert result.size >= floor
    print("criterion 8: PASS (30 instances clear the matching floor)")


def test_criterion_09_regular_linear_builder():
    grid = [(9, 3, d) for d in (1, 2, 3, 4)] + [(16, 4, 2), (12, 3, 3)]
    for n, k, d in grid:
        built = None
        for seed in range(5):
            start = time.monotonic()
            try:
                H = regular_linear(n, k, d, seed=seed)
            except ConstructionError:
                continue
            elapsed = time.monotonic() - start
            assert elapsed < 10.0
            assert H.uniform_k == k
            assert set(H.vertex_degrees()) == {d}
            assert cycle_census(H).is_linear
            built = H
            break
        assert built is not None, f"no seed built ({n},{k},{d})"
    print("criterion 9: PASS (6 parameter triples built and verified)")


def test_criterion_10_oracle_cross_validation():
    rng = random.Random(1010)
    for idx in range(200):
        if idx % 20 == 19:
            n = rng.randint(15, 18)
            m = rng.randint(4, 12)
        else:
            n = rng.randint(6, 14)
            m = rng.randint(1, 16)
        k = rng.choice([2, 3, 3, 4])
        if k > n:
            k = 2
        H = random_uniform(n, k, m, rng)
        size, w = max_independent_set_exact(H)
        assert size == brute_alpha(H)
        assert w.revalidate(H)

    disagreements = 0
    for idx in range(1000):
        n = rng.randint(5, 10)
        k = rng.choice([3, 4])
        H = random_uniform(n, k, rng.randint(2, 12), rng)
        l = rng.randint(1, k - 1)
        if (omitting_check(H, l) is None) != (contains_sunflower(H, l, 2) is None):
            disagreements += 1
    assert disagreements == 0
    print("criterion 10: PASS (200 alpha matches, 1000 omitting agreements)")


def test_criterion_11_trend_tables():
    grids = (
        ("greedy-scaling", dict(sizes=(12, 24), trials=5)),
        ("omitting-alpha", dict(qs=(7, 11), trials=2)),
        ("decompose-deletion", dict(sizes=(20, 30), trials=5)),
    )
    for kind, kw in grids:
        first = run_experiment(kind, seed=42, **kw)
        second = run_experiment(kind, seed=42, **kw)
        csv = first.table.to_csv()
        assert csv == second.table.to_csv()
        header, *rows = [ln for ln in csv.splitlines() if ln]
        ratio_col = header.split(",").index("ratio")
        for row in rows:
            ratio = float(row.split(",")[ratio_col])
            assert math.isfinite(ratio) and ratio > 0
    print("criterion 11: PASS (3 trend tables deterministic, ratios finite and positive)")
