import copy
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterx.classical import HardCoreSpec, IsingSpec
from clusterx.cli import main, run
from clusterx.hypergraph import MultiHypergraph
from clusterx.instances import (
    conditioned_circuit,
    conditioned_observables,
    conditioned_spin_system,
    random_multigraph,
    thermal_observables,
)
from clusterx.linalg import LocalOperator, pauli_string
from clusterx.problem_file import (
    SchemaError,
    from_circuit,
    from_hardcore,
    from_ising,
    from_spin_system,
    loads,
    parse_problem,
)
from clusterx.quantum import SpinSystemSpec, ghz_counterexample, thermal_counterexample

AMPLITUDE = {
    "format_version": 1,
    "problem": "amplitude",
    "graph": {
        "vertices": [{"id": "a", "dim": 2}, {"id": "b", "dim": 2}],
        "edges": [{"label": 1, "vertices": ["a", "b"],
                   "operator": {"kind": "pauli_rotation", "angle": 0.02, "pauli": "XX"}}],
    },
}


def write(tmp_path, obj, name="p.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def same_problem(a, b):
    assert a.problem == b.problem and a.graph == b.graph
    assert a.beta == b.beta and a.activity == b.activity and a.couplings == b.couplings
    for x, y in ((a.edge_operators, b.edge_operators), (a.vertex_operators, b.vertex_operators)):
        assert set(x) == set(y)
        for k in x:
            assert np.array_equal(x[k].matrix, y[k].matrix)


class TestExamples:
    def test_approx_single_edge(self, tmp_path):
        code, out = run(["approx", write(tmp_path, AMPLITUDE), "--epsilon", "1e-4", "--compare"])
        assert code == 0
        assert out["value"][0] == pytest.approx(0.99980, abs=1e-5) and out["value"][1] == pytest.approx(0)
        assert out["truncation_order"] == math.ceil(2 * math.log(2 * 2 / 1e-4))
        assert out["condition_pass"] and out["within_epsilon"]
        assert out["relative_error"] <= 1e-4

    def test_check_ghz_fails(self, tmp_path):
        pf = from_circuit(*ghz_counterexample(2, 2))
        code, out = run(["check", write(tmp_path, pf.dumps())])
        assert code == 2 and out["condition"]["pass"] is False

    def test_oracle_thermal_counterexample(self, tmp_path):
        pf = from_spin_system(*thermal_counterexample(2))
        code, out = run(["oracle", write(tmp_path, pf.dumps())])
        assert code == 0 and out["mode"] == "oracle" and out["truncation_order"] is None
        assert abs(complex(*out["value"])) <= 1e-10

    def test_clusters(self, tmp_path):
        code, out = run(["clusters", write(tmp_path, AMPLITUDE), "--cluster-size", "3"])
        assert code == 0
        assert out["polymers_by_size"] == {"1": 1}
        assert out["clusters_by_size"] == {"1": 1, "2": 1, "3": 1}

    def test_main_prints_json(self, tmp_path, capsys):
        assert main(["approx", write(tmp_path, AMPLITUDE), "--no-timing"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert "elapsed" not in out and out["problem"] == "amplitude"

    def test_entry_point(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "clusterx.cli", "check", write(tmp_path, AMPLITUDE)],
                             capture_output=True, text=True)
        assert res.returncode == 0 and json.loads(res.stdout)["condition"]["pass"]


class TestExitCodes:
    def test_condition_and_force(self, tmp_path):
        bad = copy.deepcopy(AMPLITUDE)
        bad["graph"]["edges"][0]["operator"]["angle"] = 0.5
        path = write(tmp_path, bad)
        code, out = run(["approx", path])
        assert code == 2 and "--force" in out["error"]
        code, out = run(["approx", path, "--force", "--compare"])
        assert code == 0 and out["forced"] and not out["condition_pass"]
        assert run(["check", path, "--force"])[0] == 0

    def test_guard(self, tmp_path):
        g = MultiHypergraph.from_edges([(f"v{i}", f"v{i + 1}") for i in range(12)])
        s = SpinSystemSpec(g, {lab: LocalOperator(vs, pauli_string("ZZ")) for lab, vs in g.edges}, 1e-4)
        code, out = run(["oracle", write(tmp_path, from_spin_system(s).dumps())])
        assert code == 4 and out["kind"] == "guard"

    def test_missing_file(self, tmp_path):
        assert run(["approx", str(tmp_path / "nope.json")])[0] == 3

    def test_bad_flags(self, tmp_path):
        path = write(tmp_path, AMPLITUDE)
        assert run(["approx", path, "--epsilon", "0"])[0] == 3
        assert run(["approx", path, "--order", "0"])[0] == 3

    def test_order_override(self, tmp_path):
        code, out = run(["approx", write(tmp_path, AMPLITUDE), "--order", "3"])
        assert code == 0 and out["truncation_order"] == 3


def mutate(fn):
    obj = copy.deepcopy(AMPLITUDE)
    fn(obj)
    return obj


class TestSchema:
    @pytest.mark.parametrize("obj, msg", [
        (mutate(lambda o: o.update(extra=1)), "extra"),
        (mutate(lambda o: o.update(format_version=2)), "format_version"),
        (mutate(lambda o: o.update(problem="magic")), "problem"),
        (mutate(lambda o: o["graph"]["edges"][0].update(color="red")), "color"),
        (mutate(lambda o: o["graph"]["edges"][0].update(vertices=["a", "z"])), "z"),
        (mutate(lambda o: o["graph"]["edges"][0]["operator"].update(pauli="X")), "pauli"),
        (mutate(lambda o: o["graph"]["edges"][0]["operator"].update(pauli="XQ")), "pauli"),
        (mutate(lambda o: o["graph"]["edges"][0].pop("operator")), "operator"),
        (mutate(lambda o: o["graph"]["edges"][0].update(operator=[[[1, 0], [0, 0]], [[0, 0], [1, 0]]])), "edge 1"),
        (mutate(lambda o: o["graph"]["edges"][0].update(coupling=0.5)), "coupling"),
        (mutate(lambda o: o.update(beta=[0.1, 0])), "beta"),
        (mutate(lambda o: o["graph"]["vertices"][0].update(dim="2")), "dim"),
    ])
    def test_rejections(self, tmp_path, obj, msg):
        code, out = run(["check", write(tmp_path, obj)])
        assert code == 3
        assert msg in out["error"]

    def test_non_unitary(self, tmp_path):
        obj = mutate(lambda o: o["graph"]["edges"][0].update(
            operator={"kind": "identity_plus", "coefficient": [0.5, 0], "pauli": "ZZ"}))
        code, out = run(["check", write(tmp_path, obj)])
        assert code == 3 and "edge 1" in out["error"]

    def test_complex_as_string(self):
        obj = {"format_version": 1, "problem": "hardcore",
               "graph": {"vertices": [{"id": "a", "dim": 2}], "edges": []}, "activity": "0.1+0j"}
        with pytest.raises(SchemaError, match="activity"):
            parse_problem(obj)

    def test_not_json(self, tmp_path):
        assert run(["check", write(tmp_path, "{not json")])[0] == 3

    def test_ising_coupling_too_large(self, tmp_path):
        pf = from_ising(IsingSpec.uniform(MultiHypergraph.from_edges([("a", "b")]), 0.01))
        obj = pf.to_dict()
        obj["graph"]["edges"][0]["coupling"] = 1.5
        code, out = run(["check", write(tmp_path, obj)])
        assert code == 3 and "edge 1" in out["error"]


def corpus(rng):
    g = random_multigraph(rng, 4, 4, rank=3)
    c = conditioned_circuit(rng, g)
    s = conditioned_spin_system(rng, g)
    return [
        from_circuit(c),
        from_circuit(c, conditioned_observables(rng, c)),
        from_spin_system(s),
        from_spin_system(s, thermal_observables(rng, g)),
        from_ising(IsingSpec(random_multigraph(rng, 5, 5), {i: 0.5 for i in range(1, 6)}, 0.3j)),
        from_hardcore(HardCoreSpec(MultiHypergraph.from_edges([("a", "b"), ("b", "c")]), 0.1 - 0.2j)),
    ]


class TestRoundTrip:
    def test_corpus(self, rng):
        for pf in corpus(rng):
            same_problem(pf, loads(pf.dumps()))
            assert loads(pf.dumps()).dumps() == pf.dumps()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_random(self, seed):
        rng = np.random.default_rng(seed)
        for pf in corpus(rng):
            same_problem(pf, loads(pf.dumps()))

    def test_named_constructs_survive(self):
        pf = parse_problem(AMPLITUDE)
        assert pf.to_dict()["graph"]["edges"][0]["operator"]["kind"] == "pauli_rotation"
        same_problem(pf, loads(pf.dumps()))


class TestCompareAndDeterminism:
    def test_compare_corpus(self, rng, tmp_path):
        for i, pf in enumerate(corpus(rng)):
            path = write(tmp_path, pf.dumps(), f"{i}.json")
            code, out = run(["approx", path, "--compare", "--epsilon", "1e-3", "--force"])
            assert code == 0 and out["relative_error"] <= 1e-3, out["problem"]

    def test_reports_deterministic(self, rng, tmp_path, monkeypatch):
        path = write(tmp_path, corpus(rng)[2].dumps())
        outs = []
        for threads in ("1", "4", "1"):
            monkeypatch.setenv("CLUSTERX_THREADS", threads)
            outs.append(json.dumps(run(["approx", path, "--no-timing", "--force"])[1], sort_keys=True))
        assert outs[0] == outs[1] == outs[2]
