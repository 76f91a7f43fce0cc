"""Write a corpus of problem files: the named fixtures plus random conditioned instances.

    python scripts/make_problems.py --out-dir problems --per-type 2 --seed 0
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from clusterx.classical import HardCoreSpec, IsingSpec
from clusterx.cli import check
from clusterx.hypergraph import MultiHypergraph
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
from clusterx.linalg import LocalOperator, pauli_string
from clusterx.problem_file import (
    ProblemFile,
    from_circuit,
    from_hardcore,
    from_ising,
    from_spin_system,
    parse_problem,
)
from clusterx.quantum import SpinSystemSpec, ghz_counterexample, thermal_counterexample

PROBLEMS = ("amplitude", "expectation", "partition", "thermal", "ising", "hardcore")


@dataclass
class MakeProblemsConfig:
    out_dir: str = "problems"
    seed: int = 0
    per_type: int = 2
    scale: float = 0.9
    max_vertices: int = 8


def named_fixtures() -> dict[str, ProblemFile]:
    edge = MultiHypergraph.from_edges([("a", "b")])
    cycle6 = MultiHypergraph.from_edges([(f"v{i}", f"v{(i + 1) % 6}") for i in range(6)])
    path3 = MultiHypergraph.from_edges([("a", "b"), ("b", "c")])
    out = {
        "single_edge_amplitude": parse_problem({
            "format_version": 1,
            "problem": "amplitude",
            "graph": {
                "vertices": [{"id": "a", "dim": 2}, {"id": "b", "dim": 2}],
                "edges": [{"label": 1, "vertices": ["a", "b"],
                           "operator": {"kind": "pauli_rotation", "angle": 0.02, "pauli": "XX"}}],
            },
        }),
        "single_edge_partition": from_spin_system(
            SpinSystemSpec(edge, {1: LocalOperator(("a", "b"), pauli_string("ZZ"))}, 0.005)),
        "ghz_counterexample": from_circuit(*ghz_counterexample(2, 2)),
        "cycle6_ising": from_ising(IsingSpec.uniform(cycle6, 0.005)),
        "path3_hardcore": from_hardcore(HardCoreSpec(path3, 0.01)),
        "single_edge_ising": from_ising(IsingSpec.uniform(edge, 0.01)),
    }
    for delta in (1, 2, 5):
        out[f"thermal_counterexample_{delta}"] = from_spin_system(*thermal_counterexample(delta))
    return out


def random_problem(rng, kind: str, cfg: MakeProblemsConfig) -> ProblemFile:
    n = int(rng.integers(4, cfg.max_vertices + 1))
    if kind == "expectation":
        c = random_circuit(rng, low_cone_circuit_graph(rng, n))
        return from_circuit(c, conditioned_observables(rng, c, cfg.scale))
    if kind == "ising":
        return from_ising(conditioned_ising(rng, random_multigraph(rng, n, n + 2), cfg.scale))
    if kind == "hardcore":
        return from_hardcore(conditioned_hardcore(rng, simple_graph(rng, n, n + 2), cfg.scale))
    g = random_multigraph(rng, n, n, rank=3)
    if kind == "amplitude":
        return from_circuit(conditioned_circuit(rng, g, cfg.scale))
    s = conditioned_spin_system(rng, g, cfg.scale)
    return from_spin_system(s, thermal_observables(rng, g) if kind == "thermal" else None)


def run(cfg: MakeProblemsConfig) -> list[dict]:
    """Write every problem file and return one manifest row per file."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    files = dict(named_fixtures())
    for kind in PROBLEMS:
        for i in range(cfg.per_type):
            files[f"random_{kind}_{i}"] = random_problem(rng, kind, cfg)
    manifest = []
    for name, pf in files.items():
        path = out / f"{name}.json"
        pf.save(path)
        manifest.append({"name": name, "path": str(path), "problem": pf.problem,
                         "vertices": pf.graph.order, "edges": pf.graph.size,
                         "condition_pass": check(pf).passed})
    (out / "manifest.json").write_text(json.dumps({"config": asdict(cfg), "files": manifest}, indent=2))
    return manifest


def parse_args(argv=None) -> MakeProblemsConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default=MakeProblemsConfig.out_dir)
    p.add_argument("--seed", type=int, default=MakeProblemsConfig.seed)
    p.add_argument("--per-type", type=int, default=MakeProblemsConfig.per_type)
    p.add_argument("--scale", type=float, default=MakeProblemsConfig.scale)
    p.add_argument("--max-vertices", type=int, default=MakeProblemsConfig.max_vertices)
    return MakeProblemsConfig(**vars(p.parse_args(argv)))


def main(argv=None) -> None:
    for row in run(parse_args(argv)):
        print(f"{row['path']}: {row['problem']}, {row['vertices']} vertices, "
              f"condition {'pass' if row['condition_pass'] else 'fail'}")


if __name__ == "__main__":
    main()
