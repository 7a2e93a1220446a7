"""Command-line front end.

Exit codes: 0 success, 1 internal invariant violation, 2 usage or input
error. Exact rationals are printed as ``p/q`` strings, never floats.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .constructions import CONSTRUCTION_NAMES, ConstructionError, catalog_json, construct, write_instance
from .constructions import _atomic_write
from .core import Election, ElectionFormatError, parse_election, parse_rational, serialize_election
from .distortion import SOLVERS, distortion_of_outcome, worst_case_ratio
from .metric import MetricError, consistent_with, minimal_alpha, parse_metric, phi_k, random_l1_instance, serialize_metric
from .rules import EmptyMatchableSetError, Lottery, RuleReport, run_rule

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
CSV_HEADER = ("instance", "rule", "winner", "lottery", "status", "value", "millis")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_election(path: str) -> Election:
    return parse_election(_read(path))


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an integer or p/q rational, got {text!r}") from None


def _alpha_arg(text: str) -> Fraction:
    alpha = _rational_arg(text)
    if not 0 <= alpha <= 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1], got {text}")
    return alpha


def _lottery_json(lot: Lottery) -> dict:
    return {str(c): str(p) for c, p in enumerate(lot.probs)}


def _report_json(report: RuleReport) -> dict:
    doc = {"rule": report.rule, "winner": report.winner, "lottery": _lottery_json(report.lottery)}
    if report.certificates:
        doc["matchable"] = list(report.matchable)
        certs = {}
        for c, cert in sorted(report.certificates.items()):
            entry: dict = {"matchable": cert.matchable}
            if cert.matching is not None:
                entry["matching"] = [[i, cand, str(w)] for (i, cand), w in sorted(cert.matching.items())]
            if cert.violating_set is not None:
                entry["violating_set"] = sorted(cert.violating_set)
            certs[str(c)] = entry
        doc["certificates"] = certs
    return doc


def _print_report(report: RuleReport, out) -> None:
    print(f"rule: {report.rule}", file=out)
    if report.winner is not None:
        print(f"winner: {report.winner}", file=out)
    print("lottery: " + " ".join(f"{c}:{p}" for c, p in enumerate(report.lottery.probs)), file=out)
    if report.certificates:
        print("matchable: " + " ".join(map(str, report.matchable)), file=out)
        for c, cert in sorted(report.certificates.items()):
            if cert.matchable:
                edges = " ".join(f"({i},{cand})={w}" for (i, cand), w in sorted(cert.matching.items()))
                print(f"  candidate {c}: matchable; matching {edges}", file=out)
            else:
                voters = ",".join(map(str, sorted(cert.violating_set)))
                print(f"  candidate {c}: not matchable; Hall-violating voters {{{voters}}}", file=out)


def _rule(name: str, e: Election, alpha: Fraction) -> RuleReport:
    try:
        return run_rule(name, e, alpha, read_text=_read)
    except EmptyMatchableSetError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None


def cmd_analyze(args, out) -> int:
    e = _load_election(args.election)
    report = _rule(args.rule, e, args.alpha)
    sample = None
    if args.sample:
        rng = np.random.default_rng(args.seed)
        probs = [float(p) for p in report.lottery.probs]
        sample = int(rng.choice(len(probs), p=probs))
    if args.json:
        doc = _report_json(report)
        doc["alpha"] = str(args.alpha)
        if sample is not None:
            doc["sample"] = {"seed": args.seed, "winner": sample}
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        _print_report(report, out)
        if sample is not None:
            print(f"sampled winner (seed {args.seed}): {sample}", file=out)
    return EXIT_OK


def cmd_distortion(args, out) -> int:
    e = _load_election(args.election)
    if args.candidate is not None:
        if not 0 <= args.candidate < e.m:
            raise UsageError(f"candidate {args.candidate} out of range for m={e.m}")
        outcome = Lottery.degenerate(e.m, args.candidate)
    else:
        outcome = _rule(args.rule, e, args.alpha).lottery
    if args.reference is not None:
        if not 0 <= args.reference < e.m:
            raise UsageError(f"reference {args.reference} out of range for m={e.m}")
        res = worst_case_ratio(e, outcome, args.reference, args.alpha, solver=args.solver)
    else:
        res = distortion_of_outcome(e, outcome, args.alpha, solver=args.solver)
    if args.json:
        doc = res.to_dict()
        doc["alpha"] = str(args.alpha)
        doc["solver"] = res.solver
        doc["outcome"] = _lottery_json(outcome)
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        print(f"status: {res.status}", file=out)
        if res.value is not None:
            print(f"value: {res.value}", file=out)
        print(f"reference: {res.reference}", file=out)
    return EXIT_OK


def cmd_construct(args, out) -> int:
    if args.list:
        out.write(catalog_json())
        return EXIT_OK
    if args.name is None:
        raise UsageError("construction name required (or --list)")
    if args.name not in CONSTRUCTION_NAMES:
        sys.stderr.write(catalog_json())
        raise UsageError(f"unknown construction {args.name!r}")
    if args.out is None:
        raise UsageError("--out DIR is required")
    params = {"alpha": args.alpha, "m": args.m, "k": args.k}
    try:
        inst = construct(args.name, **params)
    except ConstructionError as exc:
        raise UsageError(str(exc)) from None
    try:
        paths = write_instance(inst, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write to {args.out}: {exc.strerror}") from None
    for p in paths:
        print(p, file=out)
    return EXIT_OK


def cmd_random(args, out) -> int:
    for flag in ("n", "m", "dim"):
        if getattr(args, flag) < 1:
            raise UsageError(f"--{flag} must be at least 1")
    d, e = random_l1_instance(args.n, args.m, args.dim, args.seed)
    alpha = minimal_alpha(d, e)
    info = {
        "n": args.n,
        "m": args.m,
        "dim": args.dim,
        "seed": args.seed,
        "minimal_alpha": str(alpha),
        "alpha_cap": str(args.alpha_cap),
        "decisive_at_cap": alpha <= args.alpha_cap,
        "consistent": consistent_with(d, e),
    }
    if not info["consistent"]:
        raise AssertionError("induced profile is inconsistent with its own metric")
    try:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, "election.elec"), serialize_election(e))
        _atomic_write(os.path.join(args.out, "instance.metric"), serialize_metric(d))
        _atomic_write(os.path.join(args.out, "info.json"), json.dumps(info, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write to {args.out}: {exc.strerror}") from None
    print(json.dumps(info, sort_keys=True), file=out)
    return EXIT_OK


def _instance_election_path(path: str) -> str:
    if os.path.isdir(path):
        return os.path.join(path, "election.elec")
    return path


def _batch_rows(task):
    """Run every rule on one instance; never raises, failures become rows."""
    path, rules, alpha, timing = task
    rows = []
    try:
        e = _load_election(_instance_election_path(path))
    except (UsageError, ElectionFormatError, ValueError) as exc:
        return [(path, r, "", "", "error", str(exc), "") for r in rules]
    for rule in rules:
        start = time.perf_counter()
        try:
            report = run_rule(rule, e, alpha, read_text=_read)
            res = distortion_of_outcome(e, report.lottery, alpha)
            winner = "" if report.winner is None else str(report.winner)
            lottery = " ".join(str(p) for p in report.lottery.probs)
            value = "" if res.value is None else str(res.value)
            row = [path, rule, winner, lottery, res.status, value]
        except Exception as exc:  # recorded per row by contract
            row = [path, rule, "", "", "error", f"{type(exc).__name__}: {exc}"]
        millis = f"{(time.perf_counter() - start) * 1000:.0f}" if timing else ""
        rows.append(tuple(row + [millis]))
    return rows


def _threads() -> int:
    raw = os.environ.get("MVOTE_THREADS", "")
    if not raw:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"MVOTE_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("MVOTE_THREADS must be at least 1")
    return value


def cmd_batch(args, out) -> int:
    paths = sorted(set(glob.glob(args.instances)))
    if not paths:
        raise UsageError(f"no instances match {args.instances!r}")
    rules = sorted({r.strip() for r in args.rules.split(",") if r.strip()})
    if not rules:
        raise UsageError("--rules must name at least one rule")
    tasks = [(p, rules, args.alpha, args.timing) for p in paths]
    workers = min(_threads(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_batch_rows, tasks))
    else:
        chunks = [_batch_rows(t) for t in tasks]
    rows = sorted((row for chunk in chunks for row in chunk), key=lambda r: (r[0], r[1]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    try:
        _atomic_write(args.csv, buf.getvalue())
    except OSError as exc:
        raise UsageError(f"cannot write {args.csv}: {exc.strerror}") from None
    errors = sum(1 for r in rows if r[4] == "error")
    print(f"{len(rows)} rows, {errors} errors -> {args.csv}", file=out)
    return EXIT_INTERNAL if errors == len(rows) else EXIT_OK


def cmd_fairness(args, out) -> int:
    d = parse_metric(_read(args.metric))
    if not 0 <= args.candidate < d.m:
        raise UsageError(f"candidate {args.candidate} out of range for m={d.m}")
    ks = [args.k] if args.k is not None else list(range(1, d.n + 1))
    rows = []
    for k in ks:
        if not 1 <= k <= d.n:
            raise UsageError(f"--k must lie in [1, {d.n}]")
        phis = [phi_k(d, c, k) for c in range(d.m)]
        low = min(phis)
        argmin = phis.index(low)
        mine = phis[args.candidate]
        if low > 0:
            ratio = str(mine / low)
        elif mine == 0:
            ratio = "1"
        else:
            ratio = None
        rows.append({"k": k, "phi": str(mine), "min_phi": str(low), "argmin": argmin, "ratio": ratio})
    if args.json:
        print(json.dumps({"candidate": args.candidate, "rows": rows}, sort_keys=True), file=out)
    else:
        for r in rows:
            ratio = "unbounded" if r["ratio"] is None else r["ratio"]
            print(f"k={r['k']} phi={r['phi']} min={r['min_phi']} (candidate {r['argmin']}) ratio={ratio}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvote", description="Voting rules and metric distortion certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run a rule on an election")
    p.add_argument("--election", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--alpha", type=_alpha_arg, default=Fraction(1))
    p.add_argument("--json", action="store_true")
    p.add_argument("--sample", action="store_true", help="draw a winner from the lottery")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("distortion", help="worst-case ratio of an outcome")
    p.add_argument("--election", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--candidate", type=int)
    group.add_argument("--rule")
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--reference", type=int)
    p.add_argument("--solver", choices=SOLVERS, default="exact")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("construct", help="write a named instance to a directory")
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.add_argument("--alpha", type=_alpha_arg)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--list", action="store_true", help="print the catalog as JSON")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("random", help="sample a random L1 instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha-cap", type=_alpha_arg, default=Fraction(1))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("batch", help="run rules over many instances into a CSV")
    p.add_argument("--instances", required=True, help="glob of election files or construct directories")
    p.add_argument("--rules", required=True, help="comma-separated rule names")
    p.add_argument("--alpha", type=_alpha_arg, default=Fraction(1))
    p.add_argument("--csv", required=True)
    p.add_argument("--timing", action="store_true", help="fill the millis column (makes output vary)")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("fairness", help="phi_k report for a candidate over a metric")
    p.add_argument("--metric", required=True)
    p.add_argument("--candidate", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fairness)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ElectionFormatError, MetricError) as exc:
        print(f"mvote: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EmptyMatchableSetError, AssertionError) as exc:
        print(f"mvote: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
