import cmath
import math

import numpy as np
import pytest

from clusterx.hypergraph import MultiHypergraph, causal_intersection_hypergraph
from clusterx.instances import (
    conditioned_observables,
    random_circuit,
    random_hermitian,
    random_multigraph,
    random_psd,
    random_unitary,
)
from clusterx.linalg import (
    LocalOperator,
    OperatorError,
    apply_gate,
    embed,
    expm_hermitian,
    hermitian_eig,
    identity_plus,
    pauli_rotation,
    pauli_string,
    spectral_norm,
)
from clusterx.oracle import (
    circuit_state,
    exact_amplitude,
    exact_expectation,
    exact_partition,
    exact_thermal,
    exact_thermal_numerator,
)
from clusterx.polymer import ConditionError, brute_force_Z, graded_cluster_sums
from clusterx.quantum import (
    CircuitSpec,
    SpinSystemSpec,
    VertexObservables,
    amplitude_bound,
    amplitude_universe,
    amplitude_weight,
    approximate_amplitude,
    approximate_expectation,
    approximate_partition,
    approximate_thermal,
    check_conditions,
    expectation_universe,
    expectation_weight,
    ghz_circuit,
    ghz_counterexample,
    partition_bound,
    partition_universe,
    partition_weight,
    thermal_counterexample,
    thermal_weight,
    xx_rotation_circuit,
)

EDGE = MultiHypergraph.from_edges([("a", "b")])
ZZ = pauli_string("ZZ")


def identity_obs(g, mode="expectation"):
    return VertexObservables({v: LocalOperator((v,), np.eye(d)) for v, d in g.vertices}, mode)


class TestKernels:
    def test_spectral_norm(self):
        assert spectral_norm(np.eye(3)) == pytest.approx(1)
        assert spectral_norm(2 * np.eye(2)) == pytest.approx(2)
        u = LocalOperator(("a",), pauli_rotation(0.1, "X"))
        assert spectral_norm(u.minus_identity()) == pytest.approx(2 * math.sin(0.05), abs=1e-12)
        assert spectral_norm(u.minus_identity()) == pytest.approx(0.0999583, abs=1e-7)
        with pytest.raises(OperatorError):
            spectral_norm(np.ones((2, 3)))

    def test_apply_gate_examples(self):
        dims = {"a": 2, "b": 2}
        psi = np.array([1, 0, 0, 0], dtype=complex)
        same = apply_gate(psi, ["a", "b"], dims, LocalOperator(("a", "b"), np.eye(4)))
        assert np.array_equal(same, psi)
        x = apply_gate(np.array([1, 0], dtype=complex), ["a"], dims, LocalOperator(("a",), pauli_string("X")))
        assert np.allclose(x, [0, 1])
        out = apply_gate(psi, ["a", "b"], dims, LocalOperator(("a", "b"), pauli_rotation(0.3, "XX")))
        assert np.allclose(out, [math.cos(0.3), 0, 0, -1j * math.sin(0.3)], atol=1e-15)

    def test_apply_gate_order_and_norm(self, rng):
        dims = {"a": 2, "b": 3, "c": 2}
        psi = rng.normal(size=12) + 1j * rng.normal(size=12)
        u = LocalOperator(("c", "a"), random_unitary(rng, 4))
        out = apply_gate(psi, ["a", "b", "c"], dims, u)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(psi))
        # dense reference with explicit permutation
        t = psi.reshape(2, 3, 2).transpose(2, 0, 1).reshape(4, 3)
        ref = (u.matrix @ t).reshape(2, 2, 3).transpose(1, 2, 0).reshape(12)
        assert np.allclose(out, ref)

    def test_apply_gate_support_mismatch(self):
        with pytest.raises(OperatorError):
            apply_gate(np.ones(2), ["a"], {"a": 2, "z": 2}, LocalOperator(("z",), np.eye(2)))

    def test_dimension_mismatch(self):
        with pytest.raises(OperatorError):
            LocalOperator(("a", "b"), np.eye(2)).check_dims({"a": 2, "b": 2})

    def test_flags(self):
        assert LocalOperator(("a",), pauli_string("Y")).is_unitary()
        assert LocalOperator(("a",), pauli_string("Y")).is_self_adjoint()
        assert not LocalOperator(("a",), identity_plus(1j, "Z")).is_self_adjoint()
        assert LocalOperator(("a",), np.diag([2, 0])).is_psd()
        assert not LocalOperator(("a",), pauli_string("Z")).is_psd()

    def test_eigendecomposition_residual(self, rng):
        for d in (2, 4, 8, 16):
            h = random_hermitian(rng, d)
            vals, vecs = hermitian_eig(h)
            assert np.abs(h @ vecs - vecs * vals).max() <= 1e-10

    def test_exponential_against_series(self, rng):
        # eigen route against a plain power series at small size
        for beta in (0.3, 0.7j, 0.2 - 0.5j):
            h = random_hermitian(rng, 4)
            series = np.eye(4, dtype=complex)
            term = np.eye(4, dtype=complex)
            for k in range(1, 40):
                term = term @ (-beta * h) / k
                series = series + term
            assert np.abs(expm_hermitian(h, -beta) - series).max() <= 1e-12

    def test_embed_matches_apply(self, rng):
        dims = {"a": 2, "b": 3, "c": 2}
        op = LocalOperator(("c", "b"), rng.normal(size=(6, 6)))
        ref = apply_gate(np.eye(12, dtype=complex), ["a", "b", "c"], dims, op)
        assert np.array_equal(embed(op, ["a", "b", "c"], dims), ref)


class TestSpecs:
    def test_non_unitary_gate(self):
        with pytest.raises(OperatorError, match="edge 1"):
            CircuitSpec(EDGE, {1: LocalOperator(("a", "b"), 2 * np.eye(4))})

    def test_missing_gate(self):
        with pytest.raises(OperatorError, match="edge 1"):
            CircuitSpec(EDGE, {})

    def test_wrong_support(self):
        with pytest.raises(OperatorError):
            CircuitSpec(EDGE, {1: LocalOperator(("b", "a"), np.eye(4))})

    def test_interaction_norm(self):
        with pytest.raises(OperatorError, match="norm"):
            SpinSystemSpec(EDGE, {1: LocalOperator(("a", "b"), 2 * ZZ)}, 0.1)

    def test_interaction_hermitian(self):
        with pytest.raises(OperatorError, match="self-adjoint"):
            SpinSystemSpec(EDGE, {1: LocalOperator(("a", "b"), 1j * ZZ / 2)}, 0.1)

    def test_thermal_normalisation(self):
        with pytest.raises(OperatorError, match="trace"):
            VertexObservables({"a": LocalOperator(("a",), np.diag([1, 0]))}, "thermal")
        with pytest.raises(OperatorError, match="PSD"):
            VertexObservables({"a": LocalOperator(("a",), np.diag([3, -1]))}, "thermal")


class TestAmplitude:
    def test_single_edge(self):
        c = xx_rotation_circuit(EDGE, 0.3)
        w = amplitude_weight(c, frozenset({1}))
        assert w == pytest.approx(math.cos(0.3) - 1, abs=1e-15)
        assert w == pytest.approx(-0.0446635, abs=1e-7)

    def test_identity_gate(self):
        c = CircuitSpec(EDGE, {1: LocalOperator(("a", "b"), np.eye(4))})
        assert amplitude_weight(c, frozenset({1})) == 0

    def test_diagonal_phases(self):
        g = MultiHypergraph.from_edges([("a", "b"), ("b", "c")])
        d = np.diag([1, 1, 1, cmath.exp(0.7j)])
        c = CircuitSpec(g, {1: LocalOperator(("a", "b"), d), 2: LocalOperator(("b", "c"), d)})
        assert amplitude_weight(c, frozenset({1, 2})) == 0

    def test_weight_state_consistency(self, rng):
        for _ in range(10):
            u = random_unitary(rng, 4)
            c = CircuitSpec(EDGE, {1: LocalOperator(("a", "b"), u)})
            assert abs(amplitude_weight(c, frozenset({1})) - (exact_amplitude(c) - 1)) <= 1e-12

    def test_identity_circuit(self):
        g = MultiHypergraph.from_edges([("a", "b"), ("b", "c")])
        c = CircuitSpec(g, {lab: LocalOperator(vs, np.eye(4)) for lab, vs in g.edges})
        assert approximate_amplitude(c)[0] == 1

    def test_single_gate(self):
        c = xx_rotation_circuit(EDGE, 0.02)
        v, rep = approximate_amplitude(c, 1e-4)
        assert abs(v - math.cos(0.02)) <= 1e-4 * math.cos(0.02)
        assert rep.condition.passed and rep.truncation_order >= 1

    def test_path8(self):
        g = MultiHypergraph.from_edges([(f"q{i}", f"q{i + 1}") for i in range(7)])
        c = xx_rotation_circuit(g, 0.02)
        v, _ = approximate_amplitude(c, 1e-3)
        ex = exact_amplitude(c)
        assert abs(v - ex) <= 1e-3 * abs(ex)

    def test_condition_refusal(self):
        c = xx_rotation_circuit(EDGE, 0.5)
        with pytest.raises(ConditionError):
            approximate_amplitude(c)
        v, rep = approximate_amplitude(c, force=True)
        assert rep.forced


class TestExpectation:
    def test_identity_observables(self, path3):
        c = xx_rotation_circuit(path3, 0.4)
        obs = identity_obs(path3)
        for gamma in [frozenset({1}), frozenset({1, 2}), frozenset({1, 2, 3})]:
            assert expectation_weight(c, obs, gamma) == 0
        assert approximate_expectation(c, obs)[0] == 1

    def test_edgeless(self):
        g = MultiHypergraph((("a", 2), ("b", 2), ("c", 2)))
        c = CircuitSpec(g, {})
        coef = 0.004
        obs = VertexObservables({v: LocalOperator((v,), identity_plus(coef, "Z")) for v in "abc"})
        assert expectation_weight(c, obs, frozenset({1})) == pytest.approx(coef)
        v, _ = approximate_expectation(c, obs, 1e-3)
        assert abs(v - (1 + coef) ** 3) <= 1e-3 * (1 + coef) ** 3

    def test_ghz_singleton(self):
        c, obs = ghz_counterexample(2, 2)
        for lab in causal_intersection_hypergraph(c.graph).labels:
            assert abs(expectation_weight(c, obs, frozenset({lab}))) <= 1e-12

    def test_random_depth2(self, rng):
        g = MultiHypergraph.from_edges([("q0", "q1"), ("q2", "q3"), ("q4", "q5"), ("q1", "q2"), ("q3", "q4")])
        c = random_circuit(rng, g)
        obs = conditioned_observables(rng, c)
        assert check_conditions(c, obs).passed
        v, _ = approximate_expectation(c, obs, 1e-3)
        ex = exact_expectation(c, obs)
        assert abs(v - ex) <= 1e-3 * abs(ex)


class TestPartition:
    def test_beta_zero_weights(self, triangle):
        s = SpinSystemSpec(triangle, {lab: LocalOperator(vs, ZZ) for lab, vs in triangle.edges}, 0)
        for gamma in [frozenset({1}), frozenset({1, 2}), frozenset({1, 2, 3})]:
            assert partition_weight(s, gamma) == 0
        assert approximate_partition(s)[0] == 1

    def test_single_edge_weight(self):
        s = SpinSystemSpec(EDGE, {1: LocalOperator(("a", "b"), ZZ)}, 0.05)
        w = partition_weight(s, frozenset({1}))
        assert w == pytest.approx(math.cosh(0.05) - 1, abs=1e-15)
        assert w == pytest.approx(0.0012503, abs=1e-7)

    def test_weight_bound(self, rng):
        for _ in range(5):
            g = random_multigraph(rng, 5, 5, rank=3)
            beta = 0.3 * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            s = SpinSystemSpec(g, {lab: LocalOperator(vs, random_hermitian(rng, 2 ** len(vs)))
                                   for lab, vs in g.edges}, beta)
            u = partition_universe(s)
            for p in u.polymers(g.size):
                assert abs(u.weight(p)) <= (math.exp(abs(beta)) - 1) ** len(p) + 1e-15

    def test_single_edge_approx(self):
        s = SpinSystemSpec(EDGE, {1: LocalOperator(("a", "b"), ZZ)}, 0.005)
        v, _ = approximate_partition(s)
        assert abs(v - math.cosh(0.005)) <= 1e-3 * math.cosh(0.005)

    def test_cube(self, rng):
        edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4),
                 (0, 4), (1, 5), (2, 6), (3, 7)]
        g = MultiHypergraph.from_edges(edges)
        s = SpinSystemSpec(g, {lab: LocalOperator(vs, random_hermitian(rng, 4)) for lab, vs in g.edges},
                           0.006)
        assert check_conditions(s).passed
        v, _ = approximate_partition(s, 1e-3)
        ex = exact_partition(s)
        assert abs(v - ex) <= 1e-3 * abs(ex)


class TestThermal:
    def test_identity_psi_matches_partition(self, rng):
        g = random_multigraph(rng, 4, 4)
        s = SpinSystemSpec(g, {lab: LocalOperator(vs, random_hermitian(rng, 2 ** len(vs)))
                               for lab, vs in g.edges}, 0.2 + 0.1j)
        obs = identity_obs(g, "thermal")
        for gamma in partition_universe(s).polymers(g.size):
            assert abs(thermal_weight(s, obs, gamma) - partition_weight(s, gamma)) <= 1e-14

    def test_identity_psi_gives_one(self, triangle):
        s = SpinSystemSpec(triangle, {lab: LocalOperator(vs, ZZ) for lab, vs in triangle.edges}, 0.003)
        assert approximate_thermal(s, identity_obs(triangle, "thermal"))[0] == 1

    def test_beta_zero(self, rng, triangle):
        s = SpinSystemSpec(triangle, {lab: LocalOperator(vs, ZZ) for lab, vs in triangle.edges}, 0)
        obs = VertexObservables({v: LocalOperator((v,), random_psd(rng, 2)) for v in "abc"}, "thermal")
        assert thermal_weight(s, obs, frozenset({1, 2})) == pytest.approx(0, abs=1e-15)
        assert approximate_thermal(s, obs)[0] == pytest.approx(1, abs=1e-15)

    def test_two_site(self):
        s = SpinSystemSpec(EDGE, {1: LocalOperator(("a", "b"), ZZ)}, 0.005)
        obs = VertexObservables({v: LocalOperator((v,), np.diag([2, 0])) for v in "ab"}, "thermal")
        v, rep = approximate_thermal(s, obs, 1e-3)
        ex = exact_thermal(s, obs)
        assert abs(v - ex) <= 1e-3 * abs(ex)
        assert rep.extra["numerator_clusters"] >= 1

    @pytest.mark.parametrize("delta", [1, 2, 5])
    def test_counterexample_numerator(self, delta):
        s, obs = thermal_counterexample(delta)
        assert abs(exact_thermal_numerator(s, obs)) <= 1e-10
        assert abs(exact_partition(s)) > 0.1
        assert abs(exact_thermal(s, obs)) <= 1e-10
        assert s.graph.max_degree == delta
        assert not check_conditions(s, obs).passed

    def test_counterexample_cluster_sum(self):
        # the polymer representation reproduces the vanishing numerator exactly
        s, obs = thermal_counterexample(2)
        u = partition_universe(s, obs)
        assert abs(brute_force_Z(u, s.graph.size)) <= 1e-10


class TestFixtures:
    def test_ghz_zero(self):
        c, obs = ghz_counterexample(2, 2)
        assert c.graph.order == 4 and c.graph.rank == 2
        assert abs(exact_expectation(c, obs)) <= 1e-10
        n = spectral_norm(obs.ops["q0"].minus_identity())
        assert n == pytest.approx(math.tan(math.pi / 8), abs=1e-12)
        assert n == pytest.approx(0.414214, abs=1e-6) and n <= 0.5

    def test_ghz_small(self):
        c, obs = ghz_counterexample(2, 1)
        assert np.allclose(obs.ops["q0"].matrix, np.eye(2) + 1j * pauli_string("Z"))
        assert abs(exact_expectation(c, obs)) <= 1e-12

    @pytest.mark.parametrize("k, d", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2)])
    def test_ghz_state(self, k, d):
        c = ghz_circuit(k, d)
        psi = circuit_state(c).amplitudes
        want = np.zeros_like(psi)
        want[0] = want[-1] = 1 / math.sqrt(2)
        assert np.allclose(psi, want, atol=1e-12)
        cig = causal_intersection_hypergraph(c.graph)
        assert cig.rank <= k ** d and c.graph.rank == k

    def test_ghz_condition_fails(self):
        c, obs = ghz_counterexample(2, 2)
        rep = check_conditions(c, obs)
        assert not rep.passed
        assert all(it.observed == pytest.approx(math.tan(math.pi / 8)) for it in rep.items)


class TestConditions:
    def test_bounds(self):
        assert amplitude_bound(2, 2) == pytest.approx(0.0248935, abs=1e-7)
        assert partition_bound(3, 2) == pytest.approx(0.0061052, abs=1e-7)

    def test_report_structure(self, triangle):
        c = xx_rotation_circuit(triangle, 0.001)
        rep = check_conditions(c)
        assert rep.problem == "amplitude" and len(rep.items) == 3 and rep.passed
        assert rep.bound == pytest.approx(amplitude_bound(2, 2))
        s = SpinSystemSpec(triangle, {lab: LocalOperator(vs, ZZ) for lab, vs in triangle.edges}, 0.1)
        rep = check_conditions(s)
        assert rep.problem == "partition" and not rep.passed
        assert rep.items[0].observed == pytest.approx(0.1)


def _small_graphs(rng, count):
    for _ in range(count):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 5))
        yield random_multigraph(rng, n, m, rank=3)


class TestPolymerRepresentation:
    """Sum over admissible polymer sets equals the exact value (no truncation)."""

    def test_amplitude(self, rng):
        for g in _small_graphs(rng, 6):
            c = random_circuit(rng, g)
            assert abs(brute_force_Z(amplitude_universe(c), g.size) - exact_amplitude(c)) <= 1e-10

    def test_expectation(self, rng):
        for g in _small_graphs(rng, 6):
            c = random_circuit(rng, g)
            obs = VertexObservables({v: LocalOperator((v,), random_hermitian(rng, 2) + np.eye(2))
                                     for v in g.vertex_ids})
            u = expectation_universe(c, obs)
            assert abs(brute_force_Z(u, g.order) - exact_expectation(c, obs)) <= 1e-10

    def test_partition_and_thermal(self, rng):
        for g in _small_graphs(rng, 6):
            beta = complex(*rng.normal(size=2))
            s = SpinSystemSpec(g, {lab: LocalOperator(vs, random_hermitian(rng, 2 ** len(vs)))
                                   for lab, vs in g.edges}, beta)
            assert abs(brute_force_Z(partition_universe(s), g.size) - exact_partition(s)) <= 1e-10
            obs = VertexObservables({v: LocalOperator((v,), random_psd(rng, 2)) for v in g.vertex_ids},
                                    "thermal")
            num = brute_force_Z(partition_universe(s, obs), g.size)
            assert abs(num - exact_thermal_numerator(s, obs)) <= 1e-10


class TestDeterminism:
    def test_workers(self, rng):
        g = random_multigraph(rng, 6, 7)
        s = SpinSystemSpec(g, {lab: LocalOperator(vs, random_hermitian(rng, 4)) for lab, vs in g.edges},
                           0.004)
        a = graded_cluster_sums(partition_universe(s), 10, workers=1).graded
        b = graded_cluster_sums(partition_universe(s), 10, workers=4).graded
        assert np.array_equal(a, b)
