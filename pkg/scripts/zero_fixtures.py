"""Evaluate the zero constructions: GHZ observables and the thermal two-vertex family.

    python scripts/zero_fixtures.py --ghz 2:1 2:2 3:2 --deltas 1 2 5
"""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass, field

from clusterx.hypergraph import causal_intersection_hypergraph
from clusterx.linalg import spectral_norm
from clusterx.oracle import exact_expectation, exact_partition, exact_thermal_numerator
from clusterx.quantum import check_conditions, ghz_counterexample, thermal_counterexample


@dataclass
class ZeroFixturesConfig:
    ghz: list[tuple[int, int]] = field(default_factory=lambda: [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)])
    deltas: list[int] = field(default_factory=lambda: [1, 2, 3, 5, 8])
    out: str | None = None


def ghz_row(k: int, d: int) -> dict:
    c, obs = ghz_counterexample(k, d)
    norm = spectral_norm(next(iter(obs.ops.values())).minus_identity())
    cig = causal_intersection_hypergraph(c.graph)
    rep = check_conditions(c, obs)
    return {"k": k, "d": d, "qubits": c.graph.order, "norm": norm,
            "tan": math.tan(math.pi / (2 * k ** d)), "norm_cap": 2 / k ** d,
            "cone_degree": cig.max_degree, "cone_rank": cig.rank,
            "bound": rep.bound, "condition_pass": rep.passed,
            "oracle_abs": abs(exact_expectation(c, obs))}


def thermal_row(delta: int) -> dict:
    s, obs = thermal_counterexample(delta)
    rep = check_conditions(s, obs)
    return {"delta": delta, "beta_imag": s.beta.imag, "bound": rep.bound,
            "condition_pass": rep.passed,
            "numerator_abs": abs(exact_thermal_numerator(s, obs)),
            "denominator_abs": abs(exact_partition(s))}


def run(cfg: ZeroFixturesConfig) -> dict:
    return {"config": asdict(cfg),
            "ghz": [ghz_row(k, d) for k, d in cfg.ghz],
            "thermal": [thermal_row(delta) for delta in cfg.deltas]}


def _pair(text: str) -> tuple[int, int]:
    k, d = text.split(":")
    return int(k), int(d)


def parse_args(argv=None) -> ZeroFixturesConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ghz", nargs="+", type=_pair, default=ZeroFixturesConfig().ghz, metavar="K:D")
    p.add_argument("--deltas", nargs="+", type=int, default=ZeroFixturesConfig().deltas)
    p.add_argument("--out", default=None)
    return ZeroFixturesConfig(**vars(p.parse_args(argv)))


def main(argv=None) -> None:
    cfg = parse_args(argv)
    result = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(result, fh, indent=2)
    for r in result["ghz"]:
        print(f"GHZ k={r['k']} d={r['d']}: |<O>| = {r['oracle_abs']:.2e}, "
              f"||O_v - I|| = {r['norm']:.6f} vs bound {r['bound']:.6f}")
    for r in result["thermal"]:
        print(f"thermal delta={r['delta']}: |Z^Psi| = {r['numerator_abs']:.2e}, |Z| = {r['denominator_abs']:.4f}")


if __name__ == "__main__":
    main()
