"""Strict JSON problem files: parsing, validation, serialisation and construction.

Complex numbers are always ``[re, im]`` pairs.  Operators are either dense
row-major matrices of pairs or named constructs::

    {"kind": "pauli_rotation", "angle": 0.1, "pauli": "XX"}     # exp(-i angle P)
    {"kind": "identity_plus", "coefficient": [0.0, 0.4], "pauli": "Z"}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from numbers import Real
from pathlib import Path
from typing import Any

import numpy as np

from .classical import HardCoreSpec, IsingSpec
from .hypergraph import GraphValidationError, MultiHypergraph
from .linalg import LocalOperator, identity_plus, pauli_rotation
from .quantum import CircuitSpec, SpinSystemSpec, VertexObservables

FORMAT_VERSION = 1
PROBLEMS = ("amplitude", "expectation", "partition", "thermal", "ising", "hardcore")


class SchemaError(ValueError):
    """A problem file does not match the schema."""


# -- scalar helpers ----------------------------------------------------------------

def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool) and math.isfinite(x)


def parse_complex(x, where: str) -> complex:
    if not (isinstance(x, list) and len(x) == 2 and all(_is_number(t) for t in x)):
        raise SchemaError(f"{where}: expected a complex number as [re, im], got {x!r}")
    return complex(float(x[0]), float(x[1]))


def dump_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _keys(obj, where: str, required: set, optional: set = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = required - obj.keys()
    if missing:
        raise SchemaError(f"{where}: missing field(s) {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {sorted(unknown)}")


# -- operators -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """An operator as written in a problem file, with its dense matrix."""

    source: Any          # the JSON form, kept for faithful round trips
    matrix: np.ndarray

    def to_json(self):
        return self.source


def parse_operator(obj, where: str, arity: int) -> OperatorSpec:
    if isinstance(obj, list):
        rows = [[parse_complex(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)]
                if isinstance(row, list) else _bad_row(where, i) for i, row in enumerate(obj)]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise SchemaError(f"{where}: dense operator must be a non-empty square matrix")
        return OperatorSpec(obj, np.array(rows, dtype=complex))
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"{where}: expected a dense matrix or a named construct")
    kind = obj["kind"]
    if kind == "pauli_rotation":
        _keys(obj, where, {"kind", "angle", "pauli"})
        if not _is_number(obj["angle"]):
            raise SchemaError(f"{where}.angle: expected a real number")
        pauli = _pauli(obj["pauli"], f"{where}.pauli", arity)
        return OperatorSpec(obj, pauli_rotation(float(obj["angle"]), pauli))
    if kind == "identity_plus":
        _keys(obj, where, {"kind", "coefficient", "pauli"})
        coef = parse_complex(obj["coefficient"], f"{where}.coefficient")
        pauli = _pauli(obj["pauli"], f"{where}.pauli", arity)
        return OperatorSpec(obj, identity_plus(coef, pauli))
    raise SchemaError(f"{where}.kind: unknown operator kind {kind!r}")


def _bad_row(where: str, i: int):
    raise SchemaError(f"{where}[{i}]: expected a row of [re, im] pairs")


def _pauli(p, where: str, arity: int) -> str:
    if not isinstance(p, str) or not p or any(c not in "IXYZ" for c in p):
        raise SchemaError(f"{where}: expected a string over I, X, Y, Z")
    if len(p) != arity:
        raise SchemaError(f"{where}: Pauli string {p!r} has length {len(p)}, support has {arity} vertices")
    return p


def dense_operator(m: np.ndarray) -> OperatorSpec:
    m = np.asarray(m, dtype=complex)
    return OperatorSpec([[dump_complex(z) for z in row] for row in m], m)


# -- problem file -----------------------------------------------------------------------

@dataclass(eq=False)
class ProblemFile:
    problem: str
    graph: MultiHypergraph
    edge_operators: dict = field(default_factory=dict)    # label -> OperatorSpec
    couplings: dict = field(default_factory=dict)         # label -> float
    vertex_operators: dict = field(default_factory=dict)  # vertex -> OperatorSpec
    beta: complex | None = None
    activity: complex | None = None
    format_version: int = FORMAT_VERSION

    # -- building library objects --------------------------------------------
    def circuit(self) -> CircuitSpec:
        return CircuitSpec(self.graph, {lab: LocalOperator(self.graph.edge_vertices[lab], op.matrix)
                                        for lab, op in self.edge_operators.items()})

    def spin_system(self) -> SpinSystemSpec:
        return SpinSystemSpec(self.graph, {lab: LocalOperator(self.graph.edge_vertices[lab], op.matrix)
                                           for lab, op in self.edge_operators.items()}, self.beta)

    def observables(self) -> VertexObservables:
        mode = "thermal" if self.problem == "thermal" else "expectation"
        obs = VertexObservables({v: LocalOperator((v,), op.matrix)
                                 for v, op in self.vertex_operators.items()}, mode)
        obs.check_graph(self.graph)
        return obs

    def ising(self) -> IsingSpec:
        return IsingSpec(self.graph, dict(self.couplings), self.beta)

    def hardcore(self) -> HardCoreSpec:
        return HardCoreSpec(self.graph, self.activity)

    def build(self) -> tuple:
        """Library objects for this problem: (spec,) or (spec, observables)."""
        p = self.problem
        if p == "amplitude":
            return (self.circuit(),)
        if p == "expectation":
            return self.circuit(), self.observables()
        if p == "partition":
            return (self.spin_system(),)
        if p == "thermal":
            return self.spin_system(), self.observables()
        if p == "ising":
            return (self.ising(),)
        return (self.hardcore(),)

    # -- serialisation ---------------------------------------------------------
    def to_dict(self) -> dict:
        edges = []
        for lab, vs in self.graph.edges:
            e = {"label": lab, "vertices": list(vs)}
            if lab in self.edge_operators:
                e["operator"] = self.edge_operators[lab].to_json()
            if lab in self.couplings:
                e["coupling"] = self.couplings[lab]
            edges.append(e)
        out = {
            "format_version": self.format_version,
            "problem": self.problem,
            "graph": {"vertices": [{"id": v, "dim": d} for v, d in self.graph.vertices],
                      "edges": edges},
        }
        if self.vertex_operators:
            out["vertex_operators"] = {str(v): op.to_json() for v, op in self.vertex_operators.items()}
        if self.beta is not None:
            out["beta"] = dump_complex(self.beta)
        if self.activity is not None:
            out["activity"] = dump_complex(self.activity)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")


_EDGE_FIELDS = {
    "amplitude": ({"operator"}, set()),
    "expectation": ({"operator"}, set()),
    "partition": ({"operator"}, set()),
    "thermal": ({"operator"}, set()),
    "ising": ({"coupling"}, set()),
    "hardcore": (set(), set()),
}
_TOP_FIELDS = {
    "amplitude": set(),
    "expectation": {"vertex_operators"},
    "partition": {"beta"},
    "thermal": {"beta", "vertex_operators"},
    "ising": {"beta"},
    "hardcore": {"activity"},
}


def parse_problem(obj) -> ProblemFile:
    """Validate a decoded JSON object and build a :class:`ProblemFile`."""
    if not isinstance(obj, dict):
        raise SchemaError("problem file: expected a top-level object")
    problem = obj.get("problem")
    if problem not in PROBLEMS:
        raise SchemaError(f"problem: expected one of {list(PROBLEMS)}, got {problem!r}")
    _keys(obj, "problem file", {"format_version", "problem", "graph"} | _TOP_FIELDS[problem])
    if obj["format_version"] != FORMAT_VERSION or isinstance(obj["format_version"], bool):
        raise SchemaError(f"format_version: expected {FORMAT_VERSION}, got {obj['format_version']!r}")

    g = obj["graph"]
    _keys(g, "graph", {"vertices", "edges"})
    if not isinstance(g["vertices"], list) or not isinstance(g["edges"], list):
        raise SchemaError("graph: vertices and edges must be arrays")
    vertices = []
    for i, v in enumerate(g["vertices"]):
        _keys(v, f"graph.vertices[{i}]", {"id", "dim"})
        if not isinstance(v["id"], (str, int)) or isinstance(v["id"], bool):
            raise SchemaError(f"graph.vertices[{i}].id: expected a string or integer")
        if not isinstance(v["dim"], int) or isinstance(v["dim"], bool):
            raise SchemaError(f"graph.vertices[{i}].dim: expected an integer")
        vertices.append((v["id"], v["dim"]))
    if len({str(v) for v, _ in vertices}) != len(vertices):
        raise SchemaError("graph.vertices: vertex ids must be distinct as strings")

    required, optional = _EDGE_FIELDS[problem]
    edges, edge_ops, couplings = [], {}, {}
    for i, e in enumerate(g["edges"]):
        where = f"graph.edges[{i}]"
        _keys(e, where, {"label", "vertices"} | required, optional)
        lab = e["label"]
        if not isinstance(lab, int) or isinstance(lab, bool):
            raise SchemaError(f"{where}.label: expected an integer")
        if not isinstance(e["vertices"], list):
            raise SchemaError(f"{where}.vertices: expected an array")
        edges.append((lab, tuple(e["vertices"])))
        if "operator" in e:
            edge_ops[lab] = parse_operator(e["operator"], f"{where}.operator (edge {lab})",
                                           len(e["vertices"]))
        if "coupling" in e:
            if not _is_number(e["coupling"]):
                raise SchemaError(f"{where}.coupling (edge {lab}): expected a real number")
            couplings[lab] = float(e["coupling"])
    graph = MultiHypergraph(tuple(vertices), tuple(edges))

    vertex_ops = {}
    if "vertex_operators" in obj:
        vo = obj["vertex_operators"]
        if not isinstance(vo, dict):
            raise SchemaError("vertex_operators: expected an object")
        by_name = {str(v): v for v in graph.vertex_ids}
        for key, op in vo.items():
            if key not in by_name:
                raise SchemaError(f"vertex_operators: unknown vertex {key!r}")
            vertex_ops[by_name[key]] = parse_operator(op, f"vertex_operators[{key!r}]", 1)
    beta = parse_complex(obj["beta"], "beta") if "beta" in obj else None
    activity = parse_complex(obj["activity"], "activity") if "activity" in obj else None
    pf = ProblemFile(problem, graph, edge_ops, couplings, vertex_ops, beta, activity)
    pf.build()  # dimension, unitarity, norm and PSD checks
    return pf


def loads(text: str) -> ProblemFile:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return parse_problem(obj)


def _reject_constant(name):
    raise SchemaError(f"non-finite number {name} is not allowed")


def load(path) -> ProblemFile:
    return loads(Path(path).read_text(encoding="utf-8"))


# -- construction from library objects ---------------------------------------------

def from_circuit(c: CircuitSpec, obs: VertexObservables | None = None) -> ProblemFile:
    ops = {lab: dense_operator(op.matrix) for lab, op in c.gates.items()}
    if obs is None:
        return ProblemFile("amplitude", c.graph, ops)
    vops = {v: dense_operator(op.matrix) for v, op in obs.ops.items()}
    return ProblemFile("expectation", c.graph, ops, vertex_operators=vops)


def from_spin_system(s: SpinSystemSpec, obs: VertexObservables | None = None) -> ProblemFile:
    ops = {lab: dense_operator(op.matrix) for lab, op in s.interactions.items()}
    if obs is None:
        return ProblemFile("partition", s.graph, ops, beta=s.beta)
    vops = {v: dense_operator(op.matrix) for v, op in obs.ops.items()}
    return ProblemFile("thermal", s.graph, ops, vertex_operators=vops, beta=s.beta)


def from_ising(s: IsingSpec) -> ProblemFile:
    return ProblemFile("ising", s.graph, couplings=dict(s.couplings), beta=s.beta)


def from_hardcore(h: HardCoreSpec) -> ProblemFile:
    return ProblemFile("hardcore", h.graph, activity=h.activity)


__all__ = [
    "FORMAT_VERSION", "PROBLEMS", "SchemaError", "OperatorSpec", "ProblemFile",
    "parse_problem", "parse_operator", "parse_complex", "dump_complex", "dense_operator",
    "loads", "load", "from_circuit", "from_spin_system", "from_ising", "from_hardcore",
    "GraphValidationError",
]
