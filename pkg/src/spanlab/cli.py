"""Batch command line front door.

Subcommands: gen, enumerate, spread, density, fragment, pipeline, threshold.
Every randomized subcommand requires --seed, and each output embeds its full
configuration so identical invocations produce byte-identical files.

Exit codes: 0 success, 1 verification failure (a claim produced violation
witnesses or a spread check failed), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import density as density_mod
from .copyfamily import (
    BudgetError,
    count_copies_formula,
    dump_family,
    enumerate_copies,
)
from .fragmentation import (
    estimate_bad_pair_expectation,
    initial_state,
    run_pipeline,
)
from .spreadness import minimal_superspread_constant, verify_superspread
from .structures import (
    KIND_C4,
    KIND_KRS,
    ParameterError,
    StructureSpec,
    UnsupportedRegimeError,
    build_structure,
    c4_spec,
    graph_to_json,
    krs_spec,
)
from .threshold import default_node_budget, estimate_threshold


def _spec_from_args(parser, args) -> StructureSpec:
    try:
        if args.kind == KIND_C4:
            return c4_spec(args.n)
        if args.r is None or args.s is None:
            parser.error("krs structures need --r and --s")
        return krs_spec(args.r, args.s, args.n)
    except ParameterError as exc:
        parser.error(str(exc))


def _add_spec_args(sub):
    sub.add_argument("--kind", choices=[KIND_C4, KIND_KRS], required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--r", type=int, default=None)
    sub.add_argument("--s", type=int, default=None)


def _write_or_print(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_gen(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    g = build_structure(spec)
    _write_or_print(graph_to_json(g), args.out)
    return 0


def _cmd_enumerate(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    try:
        family = enumerate_copies(spec, budget=args.budget)
    except BudgetError as exc:
        print(f"refused: {exc} (required budget {exc.required})", file=sys.stderr)
        return 1
    print(len(family))
    try:
        formula = count_copies_formula(spec)
        if formula != len(family):
            print(
                f"note: closed-form count {formula} != enumerated {len(family)}; "
                "small-n symmetry coincidence, enumeration is exact",
                file=sys.stderr,
            )
    except UnsupportedRegimeError:
        pass
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dump_family(family))
    return 0


def _cmd_spread(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    family = enumerate_copies(spec, budget=args.budget)
    if args.measure_constant:
        c = minimal_superspread_constant(
            family, args.alpha, args.delta, args.exponent, seed=args.seed
        )
        payload = {
            "spec": spec.label(),
            "alpha": args.alpha,
            "delta": args.delta,
            "exponent": args.exponent,
            "minimal_constant": c,
            "q_at_n": c * spec.n**args.exponent,
            "seed": args.seed,
        }
        _write_or_print(json.dumps(payload, sort_keys=True), args.out)
        return 0
    if args.q is None:
        parser.error("spread check needs --q (or use --measure-constant)")
    report = verify_superspread(
        family, args.q, args.alpha, args.delta, seed=args.seed
    )
    payload = json.loads(report.to_json())
    payload["spec"] = spec.label()
    payload["seed"] = args.seed
    _write_or_print(json.dumps(payload, sort_keys=True), args.out)
    return 0 if report.verdict else 1


def _cmd_density(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    try:
        verdict = density_mod.verify_density_lemma(
            args.claim, spec, budget=args.budget, samples=args.samples, seed=args.seed
        )
    except ParameterError as exc:
        parser.error(str(exc))
    _write_or_print(verdict.to_json(), args.out)
    return 0 if verdict.passed else 1


def _cmd_fragment(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    family = enumerate_copies(spec, budget=args.budget)
    state = initial_state(family)
    est = estimate_bad_pair_expectation(
        state.entries,
        family.ground_m,
        args.w,
        args.k,
        args.trials,
        args.seed,
        round_constant=args.round_constant,
    )
    payload = json.loads(est.to_json())
    payload["config"] = {
        "spec": spec.label(),
        "seed": args.seed,
        "trials": args.trials,
    }
    _write_or_print(json.dumps(payload, sort_keys=True), args.out)
    return 0


def _cmd_pipeline(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    family = enumerate_copies(spec, budget=args.budget)
    successes = 0
    lines = []
    for run in range(args.runs):
        result = run_pipeline(
            spec,
            args.K,
            args.alpha,
            args.q,
            seed=f"{args.seed}:{run}",
            family=family,
            p_override=args.p_override,
        )
        successes += result.success
        lines.append(result.transcript().rstrip("\n"))
    if args.transcript:
        with open(args.transcript, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    print(f"{successes}/{args.runs}")
    return 0


def _cmd_threshold(parser, args) -> int:
    spec = _spec_from_args(parser, args)
    try:
        grid = [float(x) for x in args.grid.split(",")]
    except ValueError:
        parser.error("grid must be comma-separated floats")
    est = estimate_threshold(
        spec,
        grid,
        args.trials,
        args.seed,
        node_budget=args.node_budget,
        workers=args.workers,
    )
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(est.to_csv())
    if args.svg:
        _render_svg(est, args.svg)
    _write_or_print(est.to_json(), args.json_out)
    return 0


def _render_svg(est, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(est.p_grid, est.freq, marker="o")
    ax.axhline(0.5, linestyle=":", linewidth=0.8)
    if est.first_moment_p is not None:
        ax.axvline(est.first_moment_p, linestyle="--", linewidth=0.8, label="first moment p")
        ax.legend()
    ax.set_xlabel("p")
    ax.set_ylabel("containment frequency")
    ax.set_title(est.spec_label)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanlab",
        description="spanning-structure laboratory: construction, enumeration, "
        "spread checks, density oracles, fragmentation, thresholds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a structure as JSON")
    _add_spec_args(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("enumerate", help="enumerate all copies in K_n")
    _add_spec_args(p)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--out", default=None, help="family dump path")

    p = sub.add_parser("spread", help="verify spread properties of the copy family")
    _add_spec_args(p)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--measure-constant", action="store_true")
    p.add_argument("--exponent", type=float, default=None)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("density", help="run one brute-force density claim")
    _add_spec_args(p)
    p.add_argument("--claim", choices=sorted(density_mod.CLAIM_CHECKS), required=True)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("fragment", help="estimate the mean number of bad pairs")
    _add_spec_args(p)
    p.add_argument("--w", type=int, required=True, help="pairs exposed per draw")
    p.add_argument("--k", type=int, required=True, help="fragment size bound")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--round-constant", type=float, default=None)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--out", default=None)

    p = sub.add_parser("pipeline", help="run the fragmentation/sprinkle pipeline")
    _add_spec_args(p)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--p-override", type=float, default=None)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--transcript", default=None, help="JSON-lines transcript path")

    p = sub.add_parser("threshold", help="Monte Carlo containment frequencies")
    _add_spec_args(p)
    p.add_argument("--grid", required=True, help="comma-separated probabilities")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--node-budget", type=int, default=default_node_budget())
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--json-out", default=None)

    return parser


_COMMANDS = {
    "gen": _cmd_gen,
    "enumerate": _cmd_enumerate,
    "spread": _cmd_spread,
    "density": _cmd_density,
    "fragment": _cmd_fragment,
    "pipeline": _cmd_pipeline,
    "threshold": _cmd_threshold,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](parser, args)
    except (ParameterError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
