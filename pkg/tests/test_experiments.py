"""Monte Carlo experiment harness: determinism, checks, degenerate cases."""

import json
from fractions import Fraction

import pytest

from flipdyn import (
    Coloring,
    ConstructionSpec,
    ExperimentConfig,
    Graph,
    InputError,
    estimate_gamma_empirical,
    run_coupling_experiment,
    run_stage_experiment,
)
from flipdyn.graphs import write_pair_file

F = Fraction


def cfg(**kw):
    base = dict(seed=17, replicas=300, construction=ConstructionSpec(2, 3, 6))
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_exactly_one_source(self):
        with pytest.raises(InputError):
            ExperimentConfig(seed=1, replicas=10)
        with pytest.raises(InputError):
            ExperimentConfig(
                seed=1,
                replicas=10,
                construction=ConstructionSpec(2, 3, 6),
                pair_file="x.txt",
            )

    def test_replica_floor(self):
        with pytest.raises(InputError):
            ExperimentConfig(
                seed=1, replicas=0, construction=ConstructionSpec(2, 3, 6)
            )

    def test_pair_file_requires_tau(self, tmp_path):
        path = str(tmp_path / "one.txt")
        g = Graph(2, [(0, 1)])
        write_pair_file(path, g, Coloring((0, 1), 4))
        with pytest.raises(InputError):
            ExperimentConfig(seed=1, replicas=10, pair_file=path).resolve_pair()


class TestCouplingExperiment:
    def test_checks_pass_and_counts_add_up(self):
        rep = run_coupling_experiment(cfg())
        assert rep.ok
        assert rep.checks["terminating_mass_in_interval"]
        assert rep.checks["excursion_within_width"]
        assert rep.counts["completed"] + rep.counts["exceeded_cap"] == 300

    def test_deterministic_across_worker_counts(self):
        texts = set()
        jsons = set()
        for workers in (1, 2, 4):
            rep = run_coupling_experiment(cfg(workers=workers))
            texts.add(rep.to_text())
            jsons.add(rep.to_json())
        assert len(texts) == 1 and len(jsons) == 1

    def test_seed_changes_output(self):
        a = run_coupling_experiment(cfg(seed=1)).to_json()
        b = run_coupling_experiment(cfg(seed=2)).to_json()
        assert a != b

    def test_csv_rows(self, tmp_path):
        path = str(tmp_path / "rows.csv")
        run_coupling_experiment(cfg(replicas=80), csv_path=path)
        lines = open(path).read().splitlines()
        assert lines[0] == "replica,t_stop,final_distance,exceeded_cap,n_bad_pre,n_good_pre"
        assert len(lines) == 81
        assert lines[1].split(",")[0] == "0"
        # CSV bytes are part of the deterministic surface.
        path2 = str(tmp_path / "rows2.csv")
        run_coupling_experiment(cfg(replicas=80, workers=3), csv_path=path2)
        assert open(path).read() == open(path2).read()

    def test_pair_file_source(self, tmp_path):
        path = str(tmp_path / "pair.txt")
        g = Graph(2, [(0, 1)])
        sigma = Coloring((0, 2), 5)
        write_pair_file(path, g, sigma, sigma.recolor({0: 1}))
        rep = run_coupling_experiment(
            ExperimentConfig(seed=5, replicas=200, pair_file=path)
        )
        assert rep.ok
        assert rep.params["n"] == 2 and rep.params["k"] == 5

    def test_degenerate_single_vertex(self, tmp_path):
        # n = 1, k = 2: both moves coalesce at the first step, so
        # T_stop = 1 and final distance 0 in every replica.
        path = str(tmp_path / "tiny.txt")
        write_pair_file(path, Graph(1, []), Coloring((0,), 2), Coloring((1,), 2))
        rep = run_coupling_experiment(
            ExperimentConfig(seed=3, replicas=500, pair_file=path)
        )
        assert rep.metrics["t_stop"].mean == 1.0
        assert rep.metrics["t_stop"].se == 0.0
        assert rep.metrics["final_distance"].mean == 0.0
        assert rep.exact["terminating_mass"] == "1/1"

    def test_k_floor(self):
        with pytest.raises(InputError):
            run_coupling_experiment(
                ExperimentConfig(
                    seed=1, replicas=10, construction=ConstructionSpec(2, 3, 4)
                )
            )

    def test_step_cap_counts_not_fatal(self):
        rep = run_coupling_experiment(cfg(step_cap=1, replicas=100))
        assert rep.counts["exceeded_cap"] + rep.counts["completed"] == 100
        assert rep.counts["exceeded_cap"] > 0

    def test_json_shape(self):
        rep = run_coupling_experiment(cfg(replicas=100))
        data = json.loads(rep.to_json())
        assert data["kind"] == "couple"
        assert set(data) == {"kind", "params", "metrics", "exact", "checks", "counts", "ok"}
        assert data["metrics"]["t_stop"]["n"] == 100


class TestStageExperiment:
    def test_checks_pass(self):
        config = ExperimentConfig(
            seed=9, replicas=400, construction=ConstructionSpec(1, 2, 6)
        )
        rep = run_stage_experiment(config, 2)
        assert rep.ok
        assert rep.exact["mass_to_good"] == "8/21"
        assert rep.exact["mass_terminating"] == "1/6"
        assert rep.checks["bad_to_good_mass"]
        assert rep.checks["good_end_probability"]

    def test_requires_bad_color(self):
        config = ExperimentConfig(
            seed=9, replicas=10, construction=ConstructionSpec(2, 3, 6)
        )
        with pytest.raises(InputError):
            run_stage_experiment(config, 2)  # Sing on the path build

    def test_step_cap_one_kills_good_end(self, tmp_path):
        # One step can at best reach the Good stage, never GoodEnd.
        config = ExperimentConfig(
            seed=9,
            replicas=200,
            construction=ConstructionSpec(1, 2, 6),
            step_cap=1,
        )
        rep = run_stage_experiment(config, 2)
        if "p_good_end" in rep.metrics:
            assert rep.metrics["p_good_end"].mean == 0.0

    def test_csv(self, tmp_path):
        path = str(tmp_path / "st.csv")
        config = ExperimentConfig(
            seed=9, replicas=64, construction=ConstructionSpec(1, 2, 6), workers=2
        )
        run_stage_experiment(config, 2, csv_path=path)
        lines = open(path).read().splitlines()
        assert lines[0] == "replica,good_end,steps,exceeded_cap"
        assert len(lines) == 65


class TestGammaExperiment:
    def test_ratio_below_bound(self):
        config = ExperimentConfig(
            seed=21, replicas=400, construction=ConstructionSpec(1, 6, 11)
        )
        rep = estimate_gamma_empirical(config)
        assert rep.ok
        assert rep.checks["ratio_below_gamma_bound"]
        assert rep.exact["gamma_bound"] == "324110697521/18421764312"
        assert rep.metrics["bad_good_ratio"].mean >= 0

    def test_deterministic(self, tmp_path):
        config = ExperimentConfig(
            seed=21, replicas=128, construction=ConstructionSpec(1, 6, 11)
        )
        a = str(tmp_path / "a.csv")
        b = str(tmp_path / "b.csv")
        ra = estimate_gamma_empirical(config, csv_path=a).to_json()
        rb = estimate_gamma_empirical(
            ExperimentConfig(
                seed=21,
                replicas=128,
                construction=ConstructionSpec(1, 6, 11),
                workers=4,
            ),
            csv_path=b,
        ).to_json()
        assert ra == rb
        assert open(a).read() == open(b).read()
