"""Connected-subgraph counts per pivot against (e D (r-1))^m / 2 on random bounded-degree hosts.

    python scripts/cluster_counts.py --hosts 20 --max-size 6 --out counts.json
"""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from clusterx.hypergraph import enumerate_connected_subgraphs
from clusterx.instances import random_multigraph


@dataclass
class ClusterCountsConfig:
    seed: int = 0
    hosts: int = 20
    min_vertices: int = 4
    max_vertices: int = 8
    max_degree: int = 3
    rank: int = 3
    max_size: int = 6
    out: str | None = None


def count_host(g, max_size: int) -> dict[int, int]:
    """Largest per-pivot count of connected edge subsets of each size."""
    worst: dict[int, int] = {}
    for pivot in g.vertex_ids:
        counts: dict[int, int] = {}
        for sub in enumerate_connected_subgraphs(g, pivot, max_size):
            counts[len(sub)] = counts.get(len(sub), 0) + 1
        for m, c in counts.items():
            worst[m] = max(worst.get(m, 0), c)
    return worst


def run(cfg: ClusterCountsConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.hosts):
        n = int(rng.integers(cfg.min_vertices, cfg.max_vertices + 1))
        g = random_multigraph(rng, n, 2 * n, max_degree=cfg.max_degree, rank=cfg.rank)
        d, r = g.max_degree, max(2, g.rank)
        for m, c in sorted(count_host(g, cfg.max_size).items()):
            bound = (math.e * d * (r - 1)) ** m / 2
            rows.append({"host": i, "vertices": n, "edges": g.size, "max_degree": d, "rank": r,
                         "m": m, "count": c, "bound": bound, "ratio": c / bound})
    return {"config": asdict(cfg), "rows": rows,
            "max_ratio": max((r["ratio"] for r in rows), default=0.0),
            "all_within_bound": all(r["count"] <= r["bound"] for r in rows)}


def parse_args(argv=None) -> ClusterCountsConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, default in asdict(ClusterCountsConfig()).items():
        kind = str if f == "out" else int
        p.add_argument("--" + f.replace("_", "-"), type=kind, default=default)
    return ClusterCountsConfig(**vars(p.parse_args(argv)))


def main(argv=None) -> None:
    cfg = parse_args(argv)
    result = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(result, fh, indent=2)
    print(f"{len(result['rows'])} (host, size) points, max count/bound = {result['max_ratio']:.3e}")
    print("all within bound:", result["all_within_bound"])


if __name__ == "__main__":
    main()
