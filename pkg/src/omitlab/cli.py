"""Command-line interface.

Every run verifies its outputs before writing them and leaves a JSON
record next to the artifacts.  Exit codes: 0 success, 2 a verification
failed, 3 a search budget ran out, 4 bad input (parse errors, invalid
parameters, usage).
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .constructions import (
    fan,
    incidence_hypergraph,
    l_construction,
    omitting_system,
    regular_linear,
    smallest_feasible_q,
    sunflower,
)
from .core import Hypergraph, cycle_census, degree_profile, regularity_audit
from .errors import (
    BudgetExceededError,
    InputError,
    OracleTimeoutError,
    ParseError,
    SolverError,
    VerificationError,
)
from .experiments import EXPERIMENT_KINDS, run_experiment
from .field import build_polynomial_graph, k2l_free_check, mixing_discrepancy
from .formats import (
    bipartite_to_string,
    edge_list_to_string,
    read_bipartite,
    read_edge_list,
    read_json,
    spectrum_to_csv,
    write_json,
)
from .oracles import (
    contains_fan,
    contains_sunflower,
    matching_number_exact,
    max_independent_set_exact,
    omitting_check,
)
from .processes import decompose, greedy_independent_set
from .records import RunRecord, Stopwatch
from .seeds import spawn_seed, substream
from .spectral import polynomial_graph_reference_spectrum, spectrum


class _Parser(argparse.ArgumentParser):
    # usage problems are input problems: exit 4, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(4, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument(
        "--budget",
        type=int,
        default=5_000_000,
        help="node-expansion budget for exact searches",
    )
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    p.add_argument(
        "--out-dir",
        default="omitlab-out",
        help="artifact directory (the OMITLAB_OUT environment variable wins)",
    )
    return p


def _out_dir(args) -> Path:
    out = os.environ.get("OMITLAB_OUT") or args.out_dir
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@contextmanager
def _locked(out: Path):
    lock = out / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise InputError(
            f"run directory {out} is locked; remove stale {lock} if no run is active"
        )
    os.close(fd)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def _require(args, kind: str, names) -> dict:
    got = {}
    for name in names:
        value = getattr(args, name.replace("-", "_"))
        if value is None:
            raise InputError(f"construct {kind} requires --{name}")
        got[name] = value
    return got


def _write_artifacts(out: Path, record: RunRecord, files: dict) -> None:
    # everything is built and verified before the first byte is written
    for name, text in files.items():
        (out / name).write_text(text, encoding="ascii")
        record.add_artifact(out / name)
    record.write(out / f"{record.command}-record.json")


def cmd_construct(args) -> int:
    kind = args.kind
    out = _out_dir(args)
    record = RunRecord(f"construct-{kind}", {}, seed=args.seed)
    with Stopwatch(record):
        if kind == "sunflower":
            p = _require(args, kind, ("k", "l", "lam"))
            H = sunflower(p["k"], p["l"], p["lam"])
            w = contains_sunflower(H, p["l"], p["lam"], budget=args.budget)
            if w is None:
                raise VerificationError("built sunflower not detected")
            name = f"sunflower-k{p['k']}-l{p['l']}-lam{p['lam']}"
            record.verification["sunflower_detected"] = True
        elif kind == "fan":
            p = _require(args, kind, ("k",))
            H = fan(p["k"])
            if contains_fan(H, budget=args.budget) is None:
                raise VerificationError("built fan not detected")
            name = f"fan-k{p['k']}"
            record.verification["fan_detected"] = True
        elif kind == "l":
            p = _require(args, kind, ("m", "n", "k"))
            H = l_construction(p["m"], p["n"], p["k"])
            if args.verify:
                if contains_fan(H, budget=args.budget) is not None:
                    raise VerificationError("grid system contains a fan")
                record.verification["fan_free"] = True
            name = f"l-m{p['m']}-n{p['n']}-k{p['k']}"
        elif kind == "linear-regular":
            p = _require(args, kind, ("n", "k", "d"))
            H = regular_linear(p["n"], p["k"], p["d"], seed=args.seed)
            name = f"linear-regular-n{p['n']}-k{p['k']}-d{p['d']}-s{args.seed}"
            record.verification["regular_and_linear"] = True
        elif kind == "omitting":
            p = _require(args, kind, ("q", "l", "k"))
            build = omitting_system(p["q"], p["l"], p["k"], seed=args.seed)
            H = build.hypergraph
            record.parameters["build"] = build.record
            name = f"omitting-q{p['q']}-l{p['l']}-k{p['k']}-s{args.seed}"
            record.verification["omitting_checked"] = True
            record.verification["preflight_q"] = smallest_feasible_q(p["l"], p["k"])
        elif kind == "incidence":
            p = _require(args, kind, ("q", "l"))
            H = incidence_hypergraph(build_polynomial_graph(p["q"], p["l"]))
            name = f"incidence-q{p['q']}-l{p['l']}"
            record.verification["uniform_k"] = H.uniform_k
        else:  # polygraph; argparse choices admit nothing else
            p = _require(args, kind, ("q", "l"))
            G = build_polynomial_graph(p["q"], p["l"])
            if args.verify:
                if k2l_free_check(G, p["l"]) is not None:
                    raise VerificationError("polynomial graph has a dense pair")
                record.verification["k2l_free"] = True
            H = None
            name = f"polygraph-q{p['q']}-l{p['l']}"
        record.parameters.update(p)
        if H is None:
            files = {f"{name}.bip": bipartite_to_string(G, comment=name)}
            summary = (
                f"wrote {name}.bip (left={G.m}, right={G.n_right}, "
                f"edges={G.edge_count})"
            )
        else:
            files = {f"{name}.edges": edge_list_to_string(H, comment=name)}
            summary = f"wrote {name}.edges (n={H.n}, edges={H.num_edges})"
    with _locked(out):
        _write_artifacts(out, record, files)
    print(summary)
    return 0


def cmd_analyze(args) -> int:
    H = read_edge_list(args.file)
    record = RunRecord("analyze", {"file": str(args.file)})
    out = _out_dir(args)
    with Stopwatch(record):
        report = {"n": H.n, "edges": H.num_edges, "uniform_k": H.uniform_k}
        if H.edges and H.uniform_k:
            prof = degree_profile(H)
            census = cycle_census(H)
            report["max_degree"] = prof.max_degree
            report["max_i_degree"] = {str(i): d for i, d in prof.max_i_degree.items()}
            report["codegree_max"] = prof.codegree_max
            report["average_degree"] = str(prof.average_degree)
            report["cycle_census"] = {str(j): c for j, c in census.counts.items()}
            report["linear"] = census.is_linear
        if args.omitting is not None:
            w = omitting_check(H, args.omitting)
            report["omits"] = w is None
            if w is not None:
                report["omitting_violation"] = w.to_json(H)
        if args.sunflower is not None:
            l, lam = args.sunflower
            w = contains_sunflower(H, l, lam, budget=args.budget)
            report["sunflower_found"] = w is not None
            if w is not None:
                report["sunflower_witness"] = w.to_json(H)
        if args.fan:
            w = contains_fan(H, budget=args.budget)
            report["fan_found"] = w is not None
            if w is not None:
                report["fan_witness"] = w.to_json(H)
        if args.regularity:
            c, d1, d2 = args.regularity
            audit = regularity_audit(H, c, d1, d2)
            report["regularity_ok"] = audit.ok
            report["degree_bounds"] = list(audit.degree_bounds)
        record.verification = report
        with _locked(out):
            write_json(report, out / "analyze-report.json")
            record.add_artifact(out / "analyze-report.json")
            record.write(out / "analyze-record.json")
    for key in ("n", "edges", "uniform_k", "max_degree", "codegree_max", "linear",
                "omits", "sunflower_found", "fan_found", "regularity_ok"):
        if key in report:
            print(f"{key}: {report[key]}")
    return 0


def cmd_greedy(args) -> int:
    H = read_edge_list(args.file)
    out = _out_dir(args)
    record = RunRecord(
        "greedy",
        {"file": str(args.file), "steps": args.steps, "trials": args.trials},
        seed=args.seed,
    )
    with Stopwatch(record):
        if args.trials == 1:
            trace = greedy_independent_set(H, args.seed, stop_at=args.steps)
            lines = ["step,vertex,live_vertices,live_edges"]
            lines += [f"{i},{v},{nv},{ne}" for i, v, nv, ne in trace.steps]
            files = {"greedy-trace.csv": "\n".join(lines) + "\n"}
            record.verification = {
                "independent": True,
                "size": len(trace.independent_set),
                "completed": trace.completed,
            }
            summary = f"greedy set size {len(trace.independent_set)} " \
                      f"(completed={trace.completed})"
        else:
            sizes = []
            for t in range(args.trials):
                tr = greedy_independent_set(
                    H, spawn_seed(args.seed, "trial", t), stop_at=args.steps
                )
                sizes.append(len(tr.independent_set))
            lines = ["trial,size"] + [f"{t},{s}" for t, s in enumerate(sizes)]
            files = {"greedy-sizes.csv": "\n".join(lines) + "\n"}
            record.verification = {
                "independent": True,
                "mean_size": sum(sizes) / len(sizes),
            }
            summary = f"mean greedy size {sum(sizes) / len(sizes):.3f} over {args.trials} trials"
        with _locked(out):
            _write_artifacts(out, record, files)
    print(summary)
    return 0


def cmd_alpha(args) -> int:
    H = read_edge_list(args.file)
    out = _out_dir(args)
    record = RunRecord("alpha", {"file": str(args.file)})
    with Stopwatch(record):
        alpha, witness = max_independent_set_exact(H, budget=args.budget)
        if not witness.revalidate(H):
            raise VerificationError("witness failed revalidation")
        record.verification = {
            "alpha": alpha,
            "witness": list(witness.vertices[0]),
            "revalidated": True,
        }
        if args.matching:
            nu, _ = matching_number_exact(H, budget=args.budget)
            record.verification["matching_number"] = nu
        with _locked(out):
            record.write(out / "alpha-record.json")
    print(f"alpha = {alpha}")
    if args.matching:
        print(f"matching number = {record.verification['matching_number']}")
    return 0


def cmd_decompose(args) -> int:
    H = read_edge_list(args.file)
    out = _out_dir(args)
    record = RunRecord(
        "decompose", {"file": str(args.file), "k0": args.k0, "lam": args.lam}
    )
    with Stopwatch(record):
        result = decompose(H, args.k0, args.lam, budget=args.budget)
        files = {}
        members = []
        for idx, member in enumerate(result.family):
            name = f"member-{idx}.edges"
            files[name] = edge_list_to_string(
                member.hypergraph, comment=" / ".join(member.provenance)
            )
            members.append(
                {
                    "file": name,
                    "k": member.k,
                    "edges": member.hypergraph.num_edges,
                    "provenance": list(member.provenance),
                }
            )
        record.verification = {
            "members": members,
            "family_size": len(result.family),
            "family_cap": 2 ** ((H.uniform_k or args.k0) - args.k0),
            "lambda_base": result.lambda_base,
            "indecomposable": True,
            "containment": True,
        }
        with _locked(out):
            _write_artifacts(out, record, files)
    print(f"family of {len(result.family)} members (cap "
          f"{record.verification['family_cap']})")
    return 0


def cmd_ramsey_fan(args) -> int:
    t, k = args.t, args.k
    if k < 3:
        raise InputError("fan bounds need k >= 3")
    if t < k:
        raise InputError("need t >= k")
    m = t // 2
    n = (t - 1) // (2 * (k - 2))
    upper = t * (t - 1) + 1
    out = _out_dir(args)
    record = RunRecord("ramsey-fan", {"t": t, "k": k, "m": m, "n": n})
    with Stopwatch(record):
        H = l_construction(m, n, k)
        # an edgeless witness certifies nothing: fall back to the trivial bound
        lower = m * n if H.num_edges else 0
        record.verification = {"lower_exclusive": lower, "upper": upper}
        files = {}
        if lower:
            if args.verify:
                try:
                    if contains_fan(H, budget=args.budget) is not None:
                        raise VerificationError("witness contains a fan")
                    alpha, _ = max_independent_set_exact(H, budget=args.budget)
                except OracleTimeoutError as exc:
                    print(f"lower: r > {lower} (unverified); upper: {upper}")
                    print(
                        f"refusing to certify: {exc}; rerun with a larger --budget",
                        file=sys.stderr,
                    )
                    return 3
                if alpha > t - 1:
                    raise VerificationError(
                        f"witness has independence number {alpha} >= t"
                    )
                record.verification["fan_free"] = True
                record.verification["alpha"] = alpha
                record.verification["certified"] = True
            name = f"ramsey-fan-t{t}-k{k}"
            files[f"{name}.edges"] = edge_list_to_string(H, comment=name)
        else:
            record.verification["degenerate"] = True
        with _locked(out):
            _write_artifacts(out, record, files)
    print(f"lower: r > {lower}; upper: {upper}")
    return 0


def cmd_spectrum(args) -> int:
    out = _out_dir(args)
    if args.file is not None:
        G = read_bipartite(args.file)
        params = {"file": str(args.file)}
        reference = None
    else:
        if args.q is None or args.l is None:
            raise InputError("spectrum needs either --file or both --q and --l")
        G = build_polynomial_graph(args.q, args.l)
        params = {"q": args.q, "l": args.l}
        reference = (
            polynomial_graph_reference_spectrum(args.q, args.l) if args.l >= 2 else None
        )
    record = RunRecord("spectrum", params)
    with Stopwatch(record):
        rep = spectrum(G, tol=args.tol)
        if reference is not None:
            got = sorted(rep.eigenvalues, reverse=True)
            want = sorted(reference, reverse=True)
            if len(got) != len(want) or any(
                abs(a - b) > 1e-6 for a, b in zip(got, want)
            ):
                raise VerificationError("spectrum disagrees with the closed form")
            record.verification["reference_match"] = True
        record.verification.update(
            {
                "lambda2": rep.lambda2,
                "zero_multiplicity": rep.zero_multiplicity,
                "gram_residual": rep.gram_residual,
            }
        )
        with _locked(out):
            # eigenvalue text is not bit-stable across platforms, so the
            # CSV is written but kept out of the record's digest map
            (out / "spectrum.csv").write_text(
                spectrum_to_csv(rep.eigenvalues), encoding="ascii"
            )
            record.write(out / "spectrum-record.json")
    print(f"lambda2 = {rep.lambda2:.6g} (zeros: {rep.zero_multiplicity})")
    return 0


def cmd_mixing(args) -> int:
    out = _out_dir(args)
    G = build_polynomial_graph(args.q, args.l)
    lam2 = float(args.q ** ((args.l - 1) / 2))
    record = RunRecord(
        "mixing", {"q": args.q, "l": args.l, "pairs": args.pairs}, seed=args.seed
    )
    with Stopwatch(record):
        rng = substream(args.seed, "mixing")
        rows = ["pair,set_x,set_y,discrepancy,bound,ratio"]
        worst = 0.0
        for i in range(args.pairs):
            X = np.nonzero(rng.random(G.m) < 0.5)[0].tolist()
            Y = np.nonzero(rng.random(G.n_right) < 0.5)[0].tolist()
            rep = mixing_discrepancy(G, X, Y, lam2)
            if not rep.within_bound:
                raise VerificationError(
                    f"pair {i} breaks the mixing bound: "
                    f"{rep.discrepancy} > {rep.bound}"
                )
            ratio = rep.discrepancy / rep.bound if rep.bound else 0.0
            worst = max(worst, ratio)
            rows.append(
                f"{i},{len(X)},{len(Y)},{rep.discrepancy:.12g},{rep.bound:.12g},{ratio:.12g}"
            )
        record.verification = {"pairs": args.pairs, "max_ratio": worst, "within": True}
        with _locked(out):
            _write_artifacts(out, record, {"mixing.csv": "\n".join(rows) + "\n"})
    print(f"max discrepancy ratio {worst:.4f} over {args.pairs} pairs")
    return 0


def cmd_experiment(args) -> int:
    out = _out_dir(args)
    kind = args.kind
    seed, jobs = args.seed, args.jobs
    overrides = {}
    if args.config is not None:
        cfg = read_json(args.config)
        if not isinstance(cfg, dict):
            raise InputError("experiment config must be a JSON object")
        cfg_kind = cfg.pop("kind", None)
        if cfg_kind is not None and kind is not None and cfg_kind != kind:
            raise InputError(f"--kind {kind} contradicts config kind {cfg_kind}")
        kind = kind or cfg_kind
        seed = cfg.pop("seed", seed)
        jobs = cfg.pop("jobs", jobs)
        cfg.pop("budget", None)  # reserved; sweeps read their own budgets
        params = cfg.pop("params", {})
        if not isinstance(params, dict):
            raise InputError("config params must be a JSON object")
        if cfg:
            raise InputError(f"unknown config keys: {sorted(cfg)}")
        overrides.update(
            {k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}
        )
    if kind is None:
        raise InputError("experiment needs --kind or a config file naming one")
    if kind not in EXPERIMENT_KINDS:
        raise InputError(f"unknown experiment kind {kind!r}")
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.sizes is not None:
        overrides["sizes"] = tuple(args.sizes)
    if args.qs is not None:
        overrides["qs"] = tuple(args.qs)
    if args.pairs is not None:
        overrides["pairs"] = args.pairs
    record = RunRecord(f"experiment-{kind}", dict(overrides), seed=seed)
    with Stopwatch(record):
        result = run_experiment(kind, seed=seed, jobs=jobs, **overrides)
        record.verification = result.summary
        with _locked(out):
            _write_artifacts(out, record, {f"{kind}.csv": result.table.to_csv()})
    print(f"{kind}: {result.summary}")
    return 0


def _int_list(text: str):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _int_pair(text: str):
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected two integers, got {text!r}")
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="omitlab",
        description="constructions, processes, and spectra for hypergraphs "
        "omitting an intersection size",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("construct", parents=[common], help="build and verify an instance")
    p.add_argument(
        "kind",
        choices=(
            "sunflower",
            "fan",
            "l",
            "linear-regular",
            "polygraph",
            "incidence",
            "omitting",
        ),
    )
    for flag in ("k", "l", "lam", "m", "n", "d", "q"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--verify", action="store_true", help="run the expensive checks too")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", parents=[common], help="degrees, cycles, regularity")
    p.add_argument("file")
    p.add_argument(
        "--omitting", type=int, metavar="L",
        help="check that no two edges meet in exactly this size",
    )
    p.add_argument(
        "--sunflower", type=_int_pair, metavar="L,LAM",
        help="search for LAM edges through a common L-set",
    )
    p.add_argument("--fan", action="store_true", help="search for a fan")
    p.add_argument(
        "--regularity",
        nargs=3,
        type=float,
        metavar=("C", "D1", "D2"),
        help="audit (C, d1, d2)-regularity",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("greedy", parents=[common], help="random greedy independent set")
    p.add_argument("file")
    p.add_argument("--steps", type=int, help="stop after this many picks")
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("alpha", parents=[common], help="exact independence number")
    p.add_argument("file")
    p.add_argument("--matching", action="store_true", help="also report the matching number")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("decompose", parents=[common], help="split into indecomposable members")
    p.add_argument("file")
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--lam", type=int, required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ramsey-fan", parents=[common], help="fan Ramsey number bounds")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_ramsey_fan)

    p = sub.add_parser("spectrum", parents=[common], help="bipartite spectrum")
    p.add_argument("--q", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--file", help="read a bipartite graph instead of building one")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("mixing", parents=[common], help="edge-distribution discrepancy")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--pairs", type=int, default=100)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("experiment", parents=[common], help="parameter sweeps")
    p.add_argument(
        "config", nargs="?",
        help="JSON file with kind, seed, jobs, and a params map; "
        "grid flags below override params",
    )
    p.add_argument("--kind", choices=EXPERIMENT_KINDS)
    p.add_argument("--trials", type=int)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--qs", type=_int_list)
    p.add_argument("--pairs", type=int)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (VerificationError, SolverError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 4
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
