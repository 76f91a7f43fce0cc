import json
import math

import pytest
from cluster_counts import ClusterCountsConfig
from cluster_counts import parse_args as counts_args
from cluster_counts import run as run_counts
from hypothesis import given, settings
from hypothesis import strategies as st
from make_problems import MakeProblemsConfig
from make_problems import run as run_make
from tail_bound_sweep import KINDS, TailSweepConfig
from tail_bound_sweep import parse_args as tail_args
from tail_bound_sweep import run as run_tail
from zero_fixtures import ZeroFixturesConfig
from zero_fixtures import parse_args as zero_args
from zero_fixtures import run as run_zero

from clusterx.cli import run as cli_run
from clusterx.problem_file import load


class TestMakeProblems:
    def test_corpus(self, tmp_path):
        rows = run_make(MakeProblemsConfig(out_dir=str(tmp_path), per_type=1, seed=3))
        names = {r["name"] for r in rows}
        assert {"single_edge_amplitude", "ghz_counterexample", "thermal_counterexample_2"} <= names
        assert {r["problem"] for r in rows if r["name"].startswith("random_")} == set(KINDS)
        for r in rows:
            pf = load(r["path"])
            assert pf.problem == r["problem"]
            # random instances sit inside the condition, the zero fixtures outside it
            if r["name"].startswith("random_"):
                assert r["condition_pass"]
        fails = {r["name"] for r in rows if not r["condition_pass"]}
        assert fails == {"ghz_counterexample", "thermal_counterexample_1", "thermal_counterexample_2",
                         "thermal_counterexample_5"}
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 3 and len(manifest["files"]) == len(rows)

    def test_files_approximate(self, tmp_path):
        rows = run_make(MakeProblemsConfig(out_dir=str(tmp_path), per_type=1, seed=5))
        for r in rows:
            if r["condition_pass"]:
                code, out = cli_run(["approx", r["path"], "--compare"])
                assert code == 0 and out["within_epsilon"], r["name"]

    def test_same_seed_same_files(self, tmp_path):
        a = run_make(MakeProblemsConfig(out_dir=str(tmp_path / "a"), per_type=1, seed=7))
        b = run_make(MakeProblemsConfig(out_dir=str(tmp_path / "b"), per_type=1, seed=7))
        for x, y in zip(a, b):
            with open(x["path"]) as fx, open(y["path"]) as fy:
                assert fx.read() == fy.read()


class TestTailSweep:
    def test_parse(self):
        cfg = tail_args(["--instances", "1", "--kinds", "ising", "hardcore", "--m-max", "8"])
        assert cfg == TailSweepConfig(instances=1, kinds=["ising", "hardcore"], m_max=8)

    def test_bad_range(self):
        with pytest.raises(ValueError):
            run_tail(TailSweepConfig(m_min=5, m_max=4))

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 2 ** 31), st.sampled_from(KINDS))
    def test_within_bound(self, seed, kind):
        res = run_tail(TailSweepConfig(seed=seed, instances=1, kinds=[kind], m_max=10, max_vertices=6))
        assert res["all_within_bound"]
        assert res["summary"][kind]["rows"] >= 9
        for r in res["rows"]:
            assert r["bound"] == pytest.approx(r["vertices"] * math.exp(-r["m"] / 2))


class TestClusterCounts:
    def test_parse(self):
        assert counts_args(["--hosts", "3", "--rank", "2"]) == ClusterCountsConfig(hosts=3, rank=2)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2 ** 31), st.integers(2, 3), st.integers(2, 4))
    def test_within_bound(self, seed, rank, degree):
        res = run_counts(ClusterCountsConfig(seed=seed, hosts=2, rank=rank, max_degree=degree, max_size=5))
        assert res["all_within_bound"] and res["max_ratio"] <= 1
        assert all(r["rank"] <= max(2, rank) and r["max_degree"] <= degree for r in res["rows"])


class TestZeroFixtures:
    def test_default(self):
        res = run_zero(ZeroFixturesConfig(ghz=[(2, 1), (2, 2), (3, 2)], deltas=[1, 2, 5]))
        for r in res["ghz"]:
            assert r["oracle_abs"] <= 1e-10
            assert r["norm"] == pytest.approx(r["tan"], abs=1e-12) and r["norm"] <= r["norm_cap"] + 1e-12
            assert r["cone_degree"] <= r["k"] ** r["d"] and r["cone_rank"] <= r["k"] ** r["d"]
            assert not r["condition_pass"]
        for r in res["thermal"]:
            assert r["numerator_abs"] <= 1e-10 and r["denominator_abs"] > 0.1
            assert r["beta_imag"] == pytest.approx(math.pi / r["delta"])

    def test_parse(self):
        cfg = zero_args(["--ghz", "2:2", "3:1", "--deltas", "4"])
        assert cfg.ghz == [(2, 2), (3, 1)] and cfg.deltas == [4]
