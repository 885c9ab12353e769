"""Reproducible parameter sweeps.

Each experiment kind expands a parameter grid into independent cells,
runs every cell under its own seed substream, and collects rows in grid
order, so the output table is identical for any --jobs value.  Tables
pair each measured quantity with its analytic benchmark and the ratio
between them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constructions import omitting_system, random_omitting_system, regular_linear, sunflower
from .core import Hypergraph
from .errors import InputError
from .field import build_polynomial_graph, mixing_discrepancy
from .oracles import max_independent_set_exact
from .processes import decompose, deletion_lower_bound, greedy_independent_set
from .records import BoundTable
from .seeds import spawn_seed, substream
from .spectral import polynomial_graph_reference_spectrum, spectrum


def greedy_benchmark(n: int, d: float, k: int) -> float:
    """Independence scale n / d**(1/(k-1)) for degree-d k-graphs."""
    return n / d ** (1.0 / (k - 1))


def alpha_benchmark(n: int, l: int) -> float:
    """Independence scale n**((l+1)/(2l)) * (log n)**(1/l)."""
    return n ** ((l + 1) / (2 * l)) * math.log(n) ** (1.0 / l)


def deletion_benchmark(n: int, l: int) -> float:
    """Deletion-method scale n**((l+1)/(3l-1))."""
    return n ** ((l + 1) / (3 * l - 1))


def _run_cells(cells, fn, jobs: int):
    if jobs <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


def _ratio_summary(rows) -> dict:
    # an empty grid is legal: no min/max to report, just the cell count
    summary = {"cells": len(rows)}
    if rows:
        ratios = [r[-1] for r in rows]
        summary["min_ratio"] = min(ratios)
        summary["max_ratio"] = max(ratios)
    return summary


@dataclass(frozen=True)
class ExperimentResult:
    kind: str
    table: BoundTable
    summary: dict


def _greedy_scaling(seed: int, jobs: int, sizes=(12, 24, 48, 96), k: int = 3,
                    d: int = 3, trials: int = 20) -> ExperimentResult:
    cells = list(enumerate(sizes))

    def cell(item):
        idx, n = item
        H = regular_linear(n, k, d, seed=spawn_seed(seed, "build", idx))
        outs = [
            greedy_independent_set(H, spawn_seed(seed, "run", idx, t)).independent_set
            for t in range(trials)
        ]
        arr = np.array([len(s) for s in outs], dtype=np.float64)
        mean = float(arr.mean())
        se = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        bench = greedy_benchmark(n, d, k)
        return (n, k, d, trials, mean, se, bench, mean / bench)

    rows = _run_cells(cells, cell, jobs)
    table = BoundTable.build(
        ("n", "k", "d", "trials", "mean_size", "std_error", "benchmark", "ratio"),
        rows,
    )
    return ExperimentResult("greedy-scaling", table, _ratio_summary(rows))


def _omitting_alpha(seed: int, jobs: int, qs=(7, 11, 13), l: int = 2, k: int = 3,
                    trials: int = 3) -> ExperimentResult:
    cells = [(qi, q, t) for qi, q in enumerate(qs) for t in range(trials)]

    def cell(item):
        qi, q, t = item
        build = omitting_system(q, l, k, seed=spawn_seed(seed, "omit", qi, t))
        H = build.hypergraph
        alpha, _ = max_independent_set_exact(H)
        bench = alpha_benchmark(H.n, l)
        return (q, l, k, t, H.n, H.num_edges, alpha, bench, alpha / bench)

    rows = _run_cells(cells, cell, jobs)
    table = BoundTable.build(
        ("q", "l", "k", "trial", "n", "edges", "alpha", "benchmark", "ratio"),
        rows,
    )
    return ExperimentResult("omitting-alpha", table, _ratio_summary(rows))


def _decompose_deletion(seed: int, jobs: int, sizes=(20, 30, 40), k: int = 3,
                        l: int = 2, k0: int = 2, lam: int = 2, petals: int = 8,
                        trials: int = 20, delta: float = 0.5) -> ExperimentResult:
    cells = list(enumerate(sizes))

    def cell(item):
        idx, n = item
        base = random_omitting_system(
            n, k, l, target_edges=2 * n, seed=spawn_seed(seed, "inst", idx)
        )
        planted = sunflower(k, k - 1, petals)  # heavy (k-1)-core forces a split
        H = Hypergraph(n, base.edges + planted.edges)
        family = decompose(H, k0, lam).family
        p = min(1.0, delta * n ** (-(2 * l - 2) / (3 * l - 1)))
        result = deletion_lower_bound(
            [m.hypergraph for m in family],
            p,
            trials=trials,
            seed=spawn_seed(seed, "del", idx),
        )
        bench = deletion_benchmark(n, l)
        return (
            n,
            k,
            H.num_edges,
            len(family),
            p,
            trials,
            result.best_size,
            result.mean_repaired,
            bench,
            result.best_size / bench,
        )

    rows = _run_cells(cells, cell, jobs)
    table = BoundTable.build(
        (
            "n",
            "k",
            "edges",
            "members",
            "p",
            "trials",
            "best_size",
            "mean_repaired",
            "benchmark",
            "ratio",
        ),
        rows,
    )
    return ExperimentResult("decompose-deletion", table, _ratio_summary(rows))


def _spectrum_sweep(seed: int, jobs: int, qs=(2, 3, 5, 7), l: int = 2
                    ) -> ExperimentResult:
    cells = list(qs)

    def cell(q):
        G = build_polynomial_graph(q, l)
        rep = spectrum(G)
        ref = sorted(polynomial_graph_reference_spectrum(q, l), reverse=True)
        got = sorted(rep.eigenvalues, reverse=True)
        match = len(ref) == len(got) and all(
            abs(a - b) <= 1e-6 for a, b in zip(ref, got)
        )
        ratio = rep.lambda2 / math.sqrt(q)
        return (q, l, G.m, G.n_right, rep.lambda2, ratio, match, rep.gram_residual)

    rows = _run_cells(cells, cell, jobs)
    table = BoundTable.build(
        ("q", "l", "left", "right", "lambda2", "ratio", "reference_match", "residual"),
        rows,
    )
    return ExperimentResult(
        "spectrum-sweep",
        table,
        {"cells": len(rows), "all_match": all(r[6] for r in rows)},
    )


def _mixing_sweep(seed: int, jobs: int, qs=(3, 5, 7), l: int = 2, pairs: int = 200
                  ) -> ExperimentResult:
    cells = list(enumerate(qs))

    def cell(item):
        idx, q = item
        G = build_polynomial_graph(q, l)
        lam2 = float(q ** ((l - 1) / 2))
        rng = substream(seed, "mix", idx)
        worst = 0.0
        total = 0.0
        ok = True
        for _ in range(pairs):
            X = np.nonzero(rng.random(G.m) < 0.5)[0].tolist()
            Y = np.nonzero(rng.random(G.n_right) < 0.5)[0].tolist()
            rep = mixing_discrepancy(G, X, Y, lam2)
            ok = ok and rep.within_bound
            ratio = rep.discrepancy / rep.bound if rep.bound else 0.0
            worst = max(worst, ratio)
            total += ratio
        return (q, l, pairs, worst, total / pairs if pairs else 0.0, ok)

    rows = _run_cells(cells, cell, jobs)
    table = BoundTable.build(
        ("q", "l", "pairs", "max_ratio", "mean_ratio", "within_bound"), rows
    )
    return ExperimentResult(
        "mixing-sweep",
        table,
        {"cells": len(rows), "all_within": all(r[5] for r in rows)},
    )


_KINDS = {
    "greedy-scaling": _greedy_scaling,
    "omitting-alpha": _omitting_alpha,
    "decompose-deletion": _decompose_deletion,
    "spectrum-sweep": _spectrum_sweep,
    "mixing-sweep": _mixing_sweep,
}

EXPERIMENT_KINDS = tuple(sorted(_KINDS))


def run_experiment(kind: str, seed: int = 0, jobs: int = 1, **overrides
                   ) -> ExperimentResult:
    """Run one experiment kind; identical inputs give identical tables."""
    if kind not in _KINDS:
        raise InputError(
            f"unknown experiment kind {kind!r}; choose from {', '.join(EXPERIMENT_KINDS)}"
        )
    if jobs < 1:
        raise InputError("jobs must be >= 1")
    return _KINDS[kind](seed, jobs, **overrides)
