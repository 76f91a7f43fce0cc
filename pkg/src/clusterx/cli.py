"""Command-line entry point: ``clusterx {check,approx,oracle,clusters} PROBLEM.json``.

Exit codes: 0 success, 2 condition failure without ``--force``, 3 validation
error, 4 oracle guard exceeded.  Reports are JSON on standard output.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import classical, oracle, quantum
from .hypergraph import GraphValidationError
from .linalg import OperatorError
from .polymer import (
    ConditionError,
    GuardError,
    enumerate_clusters,
    polymers_by_size,
    truncation_order,
)
from .problem_file import ProblemFile, SchemaError, load
from .report import ApproximationReport, complex_pair

EXIT_OK, EXIT_CONDITION, EXIT_INVALID, EXIT_GUARD = 0, 2, 3, 4


def check(pf: ProblemFile):
    objs = pf.build()
    if pf.problem == "ising":
        return classical.check_ising(*objs)
    if pf.problem == "hardcore":
        return classical.check_hardcore(*objs)
    return quantum.check_conditions(*objs)


def universe(pf: ProblemFile):
    objs = pf.build()
    return {
        "amplitude": quantum.amplitude_universe,
        "expectation": quantum.expectation_universe,
        "partition": quantum.partition_universe,
        "thermal": quantum.partition_universe,
        "ising": classical.ising_universe,
        "hardcore": classical.hardcore_universe,
    }[pf.problem](*objs)


def approximate(pf: ProblemFile, epsilon: float, force: bool = False, order: int | None = None):
    objs = pf.build()
    fn = {
        "amplitude": quantum.approximate_amplitude,
        "expectation": quantum.approximate_expectation,
        "partition": quantum.approximate_partition,
        "thermal": quantum.approximate_thermal,
        "ising": classical.approximate_ising,
        "hardcore": classical.approximate_hardcore,
    }[pf.problem]
    return fn(*objs, epsilon, force=force, order=order)


def exact(pf: ProblemFile) -> ApproximationReport:
    objs = pf.build()
    t0 = time.perf_counter()
    value = {
        "amplitude": oracle.exact_amplitude,
        "expectation": oracle.exact_expectation,
        "partition": oracle.exact_partition,
        "thermal": oracle.exact_thermal,
        "ising": oracle.exact_ising,
        "hardcore": oracle.exact_independence_poly,
    }[pf.problem](*objs)
    extra = {}
    if pf.problem == "thermal":
        extra["numerator"] = complex_pair(oracle.exact_thermal_numerator(*objs))
    if pf.problem == "ising":
        extra["unnormalized"] = complex_pair(value * 2 ** pf.graph.order)
    return ApproximationReport(value, None, 0, None, time.perf_counter() - t0, mode="oracle",
                               extra=extra)


def diagnostics(pf: ProblemFile, epsilon: float, order: int | None, cluster_size: int) -> dict:
    u = universe(pf)
    m = order if order is not None else truncation_order(pf.graph.order, epsilon)
    top = max(m - 1, 1)
    patches = u.patches(top) or []
    patch_sizes: dict[int, int] = {}
    for p in patches:
        k = bin(p).count("1")
        patch_sizes[k] = patch_sizes.get(k, 0) + 1
    cluster_sizes: dict[int, int] = {}
    for c in enumerate_clusters(u, min(top, cluster_size)):
        cluster_sizes[c.total_size] = cluster_sizes.get(c.total_size, 0) + 1
    return {
        "truncation_order": m,
        "polymers_by_size": {str(k): v for k, v in polymers_by_size(u, top).items()},
        "patches_by_size": {str(k): v for k, v in sorted(patch_sizes.items())},
        "clusters_by_size": {str(k): v for k, v in sorted(cluster_sizes.items())},
        "clusters_counted_up_to": min(top, cluster_size),
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusterx",
                                description="Truncated cluster expansions with exact oracles.")
    p.add_argument("command", choices=["check", "approx", "oracle", "clusters"])
    p.add_argument("problem", help="problem file (JSON)")
    p.add_argument("--epsilon", type=float, default=1e-3, help="target multiplicative error")
    p.add_argument("--order", type=int, default=None, help="override the truncation order m")
    p.add_argument("--force", action="store_true", help="proceed despite a failed condition")
    p.add_argument("--compare", action="store_true", help="also run the oracle and report the error")
    p.add_argument("--cluster-size", type=int, default=4,
                   help="largest total size for explicit cluster counts (clusters command)")
    p.add_argument("--no-timing", action="store_true", help="omit elapsed times from the report")
    return p


def run(argv=None) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report)."""
    args = build_parser().parse_args(argv)
    timing = not args.no_timing
    try:
        if not 0 < args.epsilon <= 1:
            raise SchemaError(f"--epsilon must lie in (0, 1], got {args.epsilon}")
        if args.order is not None and args.order < 1:
            raise SchemaError(f"--order must be >= 1, got {args.order}")
        pf = load(args.problem)
        out: dict = {"command": args.command, "problem": pf.problem}
        if args.command == "check":
            rep = check(pf)
            out["condition"] = rep.to_dict()
            code = EXIT_OK if rep.passed or args.force else EXIT_CONDITION
            return code, out
        if args.command == "clusters":
            out.update(diagnostics(pf, args.epsilon, args.order, args.cluster_size))
            return EXIT_OK, out
        if args.command == "oracle":
            out.update(exact(pf).to_dict(timing))
            return EXIT_OK, out
        rep = check(pf)
        if not rep.passed and not args.force:
            out["condition"] = rep.to_dict()
            out["error"] = "condition failed; rerun with --force to proceed"
            return EXIT_CONDITION, out
        value, report = approximate(pf, args.epsilon, force=args.force, order=args.order)
        out.update(report.to_dict(timing))
        out["epsilon"] = args.epsilon
        if args.compare:
            ref = exact(pf)
            out["oracle_value"] = complex_pair(ref.value)
            out["relative_error"] = (abs(value - ref.value) / abs(ref.value)
                                     if ref.value != 0 else abs(value - ref.value))
            out["within_epsilon"] = bool(abs(value - ref.value) <= args.epsilon * abs(ref.value))
        return EXIT_OK, out
    except (SchemaError, GraphValidationError, OperatorError, FileNotFoundError) as exc:
        return EXIT_INVALID, {"command": args.command, "error": str(exc), "kind": "validation"}
    except ConditionError as exc:
        return EXIT_CONDITION, {"command": args.command, "error": str(exc), "kind": "condition"}
    except GuardError as exc:
        return EXIT_GUARD, {"command": args.command, "error": str(exc), "kind": "guard"}


def main(argv=None) -> int:
    code, out = run(argv)
    if "error" in out:
        print(f"clusterx: {out['error']}", file=sys.stderr)
    print(json.dumps(out, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
