"""Truncation error |T_m - log Z| against the tail bound |G| e^{-m/2} on conditioned instances.

    python scripts/tail_bound_sweep.py --instances 5 --m-max 14 --out tail.json
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from clusterx.classical import hardcore_universe, ising_universe
from clusterx.instances import (
    conditioned_circuit,
    conditioned_hardcore,
    conditioned_ising,
    conditioned_observables,
    conditioned_spin_system,
    low_cone_circuit_graph,
    random_circuit,
    random_multigraph,
    simple_graph,
    thermal_observables,
)
from clusterx.oracle import (
    exact_amplitude,
    exact_expectation,
    exact_independence_poly,
    exact_ising,
    exact_partition,
    exact_thermal_numerator,
)
from clusterx.polymer import graded_cluster_sums
from clusterx.quantum import amplitude_universe, expectation_universe, partition_universe

KINDS = ("amplitude", "expectation", "partition", "thermal", "ising", "hardcore")


@dataclass
class TailSweepConfig:
    seed: int = 0
    instances: int = 3
    kinds: list[str] = field(default_factory=lambda: list(KINDS))
    m_min: int = 2
    m_max: int = 14
    scale: float = 0.9
    min_vertices: int = 4
    max_vertices: int = 8
    out: str | None = None


def series(rng, kind: str, cfg: TailSweepConfig) -> list[tuple[str, object, int, complex]]:
    """(series name, universe, |G|, exact value) for one random conditioned instance."""
    n = int(rng.integers(cfg.min_vertices, cfg.max_vertices + 1))
    if kind == "amplitude":
        c = conditioned_circuit(rng, random_multigraph(rng, n, n, rank=3), cfg.scale)
        return [(kind, amplitude_universe(c), n, exact_amplitude(c))]
    if kind == "expectation":
        c = random_circuit(rng, low_cone_circuit_graph(rng, n))
        obs = conditioned_observables(rng, c, cfg.scale)
        return [(kind, expectation_universe(c, obs), n, exact_expectation(c, obs))]
    if kind in ("partition", "thermal"):
        g = random_multigraph(rng, n, n, rank=3)
        s = conditioned_spin_system(rng, g, cfg.scale)
        out = [("partition", partition_universe(s), n, exact_partition(s))]
        if kind == "thermal":
            obs = thermal_observables(rng, g)
            out = [("thermal_numerator", partition_universe(s, obs), n, exact_thermal_numerator(s, obs)),
                   ("thermal_denominator",) + out[0][1:]]
        return out
    if kind == "ising":
        s = conditioned_ising(rng, random_multigraph(rng, n, n + 2), cfg.scale)
        return [(kind, ising_universe(s), n, exact_ising(s))]
    if kind == "hardcore":
        h = conditioned_hardcore(rng, simple_graph(rng, n, n + 2), cfg.scale)
        return [(kind, hardcore_universe(h), n, exact_independence_poly(h))]
    raise ValueError(f"unknown problem kind {kind!r}")


def run(cfg: TailSweepConfig) -> dict:
    if not 1 <= cfg.m_min <= cfg.m_max:
        raise ValueError("need 1 <= m_min <= m_max")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for kind in cfg.kinds:
        for i in range(cfg.instances):
            for name, u, order, exact in series(rng, kind, cfg):
                res = graded_cluster_sums(u, cfg.m_max - 1)
                target = cmath.log(exact)
                for m in range(cfg.m_min, cfg.m_max + 1):
                    err = abs(res.truncated(m) - target)
                    bound = order * math.exp(-m / 2)
                    rows.append({"kind": kind, "series": name, "instance": i, "vertices": order, "m": m,
                                 "error": err, "bound": bound, "ratio": err / bound})
    summary = {}
    for r in rows:
        s = summary.setdefault(r["kind"], {"max_ratio": 0.0, "rows": 0})
        s["max_ratio"] = max(s["max_ratio"], r["ratio"])
        s["rows"] += 1
    return {"config": asdict(cfg), "summary": summary, "rows": rows,
            "all_within_bound": all(r["error"] <= r["bound"] for r in rows)}


def parse_args(argv=None) -> TailSweepConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--kinds", nargs="+", choices=KINDS, default=list(KINDS))
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=14)
    p.add_argument("--scale", type=float, default=0.9)
    p.add_argument("--min-vertices", type=int, default=4)
    p.add_argument("--max-vertices", type=int, default=8)
    p.add_argument("--out", default=None, help="write the full result as JSON")
    return TailSweepConfig(**vars(p.parse_args(argv)))


def main(argv=None) -> None:
    cfg = parse_args(argv)
    result = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(result, fh, indent=2)
    for kind, s in result["summary"].items():
        print(f"{kind:12s} max error/bound = {s['max_ratio']:.3e} over {s['rows']} points")
    print("all within bound:", result["all_within_bound"])


if __name__ == "__main__":
    main()
