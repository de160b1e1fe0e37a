"""Experiment configs, the run registry, artifacts on disk, and the CLI."""

import dataclasses
import json
import math
from pathlib import Path

import numpy as np
import pytest

from pathwise_hj import cli
from pathwise_hj import experiments as ex
from pathwise_hj.paths import PiecewiseLinearPath, RngSeed, teeth


def run(scenario, out, *, parameters=None, resolution=None, seed=0, figures=False):
    cfg = ex.default_config(
        scenario,
        parameters=parameters,
        resolution=resolution,
        seed=seed,
        output_dir=out,
    )
    return ex.execute(cfg, render_figures=figures)


class TestConfigRoundTrip:
    def test_parse_inverts_render(self):
        for name in ex.SCENARIOS:
            cfg = ex.default_config(name, seed=3, output_dir="runs/x")
            assert ex.parse_config(ex.render_config(cfg)) == cfg

    def test_render_is_a_fixed_point(self):
        cfg = ex.default_config("limit", seed=1)
        echo = ex.render_config(cfg)
        assert ex.render_config(ex.parse_config(echo)) == echo

    def test_one_element_list_survives(self):
        text = "[run]\nscenario = limit\n[parameters]\nt_probes = 1.0\n"
        cfg = ex.parse_config(text)
        assert cfg.parameters["t_probes"] == (1.0,)
        assert ex.parse_config(ex.render_config(cfg)) == cfg
        cfg2 = ex.default_config("solve", parameters={"sample_times": 1.5})
        assert cfg2.parameters["sample_times"] == (1.5,)

    def test_comments_and_blanks_ignored(self):
        text = (
            "# leading comment\n\n[run]\n# inner\nscenario = paths\n\n"
            "[parameters]\nkind = zero\n"
        )
        cfg = ex.parse_config(text)
        assert cfg.scenario == "paths"
        assert cfg.parameters["kind"] == "zero"

    def test_seed_stream_round_trip(self):
        text = "[run]\nscenario = paths\nseed = 4\nseed_stream = 9\n"
        cfg = ex.parse_config(text)
        assert cfg.seed == RngSeed(4, 9)
        echo = ex.render_config(cfg)
        assert "seed_stream = 9" in echo
        assert ex.parse_config(echo).seed == RngSeed(4, 9)

    def test_executed_echo_reparses_to_same_config(self, tmp_path):
        cfg = ex.default_config(
            "paths",
            parameters={"kind": "zero", "duration": 1.5},
            output_dir=tmp_path,
        )
        ex.execute(cfg, render_figures=False)
        echoed = ex.parse_config((tmp_path / "config_echo.txt").read_text())
        assert echoed == cfg


class TestConfigErrors:
    def err(self, text):
        with pytest.raises(ex.ConfigError) as info:
            ex.parse_config(text)
        return str(info.value)

    def test_assignment_before_section(self):
        assert "line 1" in self.err("x = 1\n")

    def test_unknown_section(self):
        msg = self.err("[run]\nscenario = paths\n[weird]\n")
        assert "line 3" in msg and "weird" in msg

    def test_missing_equals(self):
        assert "line 4" in self.err("[run]\nscenario = limit\n[parameters]\nalpha\n")

    def test_duplicate_key(self):
        msg = self.err(
            "[run]\nscenario = limit\n[parameters]\nalpha = 0.5\nalpha = 0.6\n"
        )
        assert "line 5" in msg and "duplicate" in msg

    def test_empty_list_element(self):
        msg = self.err("[run]\nscenario = limit\n[parameters]\nn_list = 2,,4\n")
        assert "empty element" in msg

    def test_unknown_run_key(self):
        assert "unknown [run] keys" in self.err("[run]\nscenario = paths\nfoo = 1\n")

    def test_missing_scenario(self):
        assert "must name a scenario" in self.err("[run]\nseed = 1\n")

    def test_unknown_scenario(self):
        assert "unknown scenario" in self.err("[run]\nscenario = quux\n")

    def test_non_integer_seed(self):
        assert "seed" in self.err("[run]\nscenario = paths\nseed = abc\n")

    def test_unknown_parameter_names_scenario(self):
        with pytest.raises(ex.ConfigError, match="blowup"):
            ex.default_config("blowup", parameters={"bogus": 1})

    def test_int_key_rejects_float(self):
        with pytest.raises(ex.ConfigError, match="integer"):
            ex.default_config("blowup", resolution={"dual_nodes": 2049.5})

    def test_float_key_accepts_int(self):
        cfg = ex.default_config("blowup", parameters={"horizon": 1})
        assert cfg.parameters["horizon"] == 1.0
        assert isinstance(cfg.parameters["horizon"], float)

    def test_scalar_key_rejects_list(self):
        with pytest.raises(ex.ConfigError, match="single value"):
            ex.default_config("blowup", parameters={"alpha": (0.1, 0.2)})

    def test_list_element_type_enforced(self):
        with pytest.raises(ex.ConfigError):
            ex.default_config("blowup", parameters={"n_list": (2, 3.5)})


class TestScenarioValidation:
    def test_blowup_needs_room_to_grow(self):
        with pytest.raises(ex.ConfigError, match="alpha \\+ beta"):
            ex.default_config("blowup", parameters={"alpha": 0.5, "beta": 0.5})

    def test_blowup_horizon_must_fit_teeth(self):
        with pytest.raises(ex.ConfigError, match="even"):
            ex.default_config("blowup", parameters={"horizon": 1.3})

    def test_brownian_sample_floor(self):
        with pytest.raises(ex.ConfigError, match="50"):
            ex.default_config("brownian", resolution={"samples": 10})

    def test_brownian_tail_bound_finiteness(self):
        with pytest.raises(ex.ConfigError, match="lam"):
            ex.default_config("brownian", parameters={"lam": 1.0})

    def test_walks_beta_window(self):
        with pytest.raises(ex.ConfigError, match="beta"):
            ex.default_config("walks", parameters={"beta": 0.4})

    def test_walks_driver_must_outlast_walk(self):
        with pytest.raises(ex.ConfigError, match="driver_horizon"):
            ex.default_config("walks", parameters={"driver_horizon": 1.0})

    def test_crossval_dyadic_refinement(self):
        with pytest.raises(ex.ConfigError, match="dyadic"):
            ex.default_config("crossval", resolution={"fd_nodes": (129, 200, 400)})

    def test_crossval_sandwich_nodes_odd(self):
        with pytest.raises(ex.ConfigError, match="odd"):
            ex.default_config("crossval", resolution={"sandwich_nodes": 128})

    def test_stability_trial_floor(self):
        with pytest.raises(ex.ConfigError, match="10"):
            ex.default_config("stability", resolution={"trials": 5})

    def test_solve_engine_names(self):
        with pytest.raises(ex.ConfigError, match="engine"):
            ex.default_config("solve", parameters={"engine": "spectral"})

    def test_paths_kind_names(self):
        with pytest.raises(ex.ConfigError, match="kind"):
            ex.default_config("paths", parameters={"kind": "fractal"})

    def test_norms_source_names(self):
        with pytest.raises(ex.ConfigError, match="source"):
            ex.default_config("norms", parameters={"source": "psd"})

    def test_norms_file_source_needs_path(self):
        with pytest.raises(ex.ConfigError, match="file"):
            ex.default_config("norms", parameters={"source": "file"})

    def test_norms_teeth_duration_even(self):
        with pytest.raises(ex.ConfigError, match="even"):
            ex.default_config("norms", parameters={"duration": 3.0})


class TestRunArtifact:
    def art(self, tmp_path):
        return ex.RunArtifact("demo", tmp_path, RngSeed(0, 0))

    def test_comparator_modes(self, tmp_path):
        a = self.art(tmp_path)
        assert a.check("w", "", 1.05, 1.0, tolerance=0.1)
        assert not a.check("w2", "", 1.2, 1.0, tolerance=0.1)
        assert a.check("am", "", 0.9, 1.0, mode="at_most")
        assert not a.check("am2", "", 1.2, 1.0, mode="at_most")
        assert a.check("al", "", 1.1, 1.0, mode="at_least")
        assert a.check("ls", "", 0.999, 1.0, mode="less")
        assert not a.check("ls2", "", 1.0, 1.0, mode="less")
        assert a.check("eq", "", 0.0, 0.0, mode="exact")
        assert not a.check("eq2", "", 1e-300, 0.0, mode="exact")
        assert not a.passed

    def test_passed_over_empty_assertions(self, tmp_path):
        assert self.art(tmp_path).passed

    def test_table_cells(self, tmp_path):
        a = self.art(tmp_path)
        a.add_table("t.csv", ["a", "b", "c", "d"], [[1, 0.5, True, "x"]])
        assert (tmp_path / "t.csv").read_text() == "a,b,c,d\n1,0.5,true,x\n"
        assert a.tables == ["t.csv"]

    def test_summary_omits_output_dir(self, tmp_path):
        a = self.art(tmp_path)
        a.check("ok", "trivially true", 0.0, 0.0, mode="exact")
        s = a.summary()
        assert str(tmp_path) not in json.dumps(s)
        assert s["passed"] is True
        assert s["seed"] == {"seed": 0, "stream": 0}


class TestDeterminism:
    def test_identical_runs_in_two_directories(self, tmp_path):
        params = {"n_list": (2, 3, 4), "slope_tolerance": 2.0}
        res = {"dual_nodes": 257, "primal_nodes": 129}
        arts = [
            run("blowup", tmp_path / d, parameters=params, resolution=res)
            for d in ("a", "b")
        ]
        for name in ("summary.json", "growth.csv", "config_echo.txt"):
            f1 = (tmp_path / "a" / name).read_bytes()
            f2 = (tmp_path / "b" / name).read_bytes()
            if name == "config_echo.txt":
                assert f1 != f2  # the echo names its own output directory
            else:
                assert f1 == f2
        assert arts[0].metrics == arts[1].metrics

    def test_seed_moves_random_scenarios(self, tmp_path):
        digests = []
        for seed in (0, 1):
            a = run(
                "paths",
                tmp_path / f"s{seed}",
                parameters={"kind": "brownian", "duration": 1.0},
                resolution={"steps": 256},
                seed=seed,
            )
            digests.append(a.metrics["digest"])
        assert digests[0] != digests[1]

    def test_summary_file_matches_summary_dict(self, tmp_path):
        a = run("paths", tmp_path, parameters={"kind": "zero"})
        on_disk = json.loads((tmp_path / "summary.json").read_text())
        assert on_disk == a.summary()


class TestGeneratorScenarios:
    def test_paths_teeth_run(self, tmp_path):
        a = run("paths", tmp_path, parameters={"kind": "teeth", "duration": 2.0})
        assert a.passed and a.tables == ["path.csv", "metrics.csv"]
        assert a.metrics["sup_norm"] == 1.0
        assert a.metrics["total_variation"] == 2.0
        W = PiecewiseLinearPath.from_csv(tmp_path / "path.csv")
        ref = teeth(2)
        assert np.array_equal(W.times, ref.times)
        assert np.array_equal(W.values, ref.values)

    def test_norms_on_saved_path(self, tmp_path):
        run("paths", tmp_path / "gen", parameters={"kind": "teeth"})
        a = run(
            "norms",
            tmp_path / "est",
            parameters={"source": "file", "file": str(tmp_path / "gen" / "path.csv")},
            resolution={"steps": 64},
        )
        assert a.passed
        assert a.metrics["sup_norm"] == 1.0
        assert a.metrics["total_variation"] == 2.0
        assert math.isinf(a.metrics["p_alpha_norm"]) or a.metrics["p_alpha_norm"] > 0

    def test_norms_missing_file_is_a_config_error(self, tmp_path):
        cfg = ex.default_config(
            "norms",
            parameters={"source": "file", "file": str(tmp_path / "nope.csv")},
            output_dir=tmp_path,
        )
        with pytest.raises(ex.ConfigError):
            ex.execute(cfg, render_figures=False)

    def test_norms_table_shape(self, tmp_path):
        a = run(
            "norms",
            tmp_path,
            parameters={"source": "teeth", "n_max": 5},
            resolution={"steps": 64},
        )
        lines = (tmp_path / "norms.csv").read_text().splitlines()
        assert lines[0] == "n,band,count,scaled_count"
        assert len(lines) == 6
        assert "p_variation" in a.metrics

    def test_solve_zero_path_keeps_initial_condition(self, tmp_path):
        a = run(
            "solve",
            tmp_path,
            parameters={"path": "zero", "sample_times": (0.5, 1.0)},
            resolution={"dual_nodes": 257, "x_nodes": 129, "h_nodes": 129},
        )
        assert a.passed
        meta = json.loads((tmp_path / "metadata.json").read_text())
        assert len(meta["snapshots"]) == 2
        first = np.loadtxt(tmp_path / meta["snapshots"][0]["file"], delimiter=",", skiprows=1)
        last = np.loadtxt(tmp_path / meta["snapshots"][1]["file"], delimiter=",", skiprows=1)
        assert np.array_equal(first, last)
        assert np.allclose(last[:, 1], np.abs(last[:, 0]), atol=1e-12)

    def test_solve_fd_engine_records_cfl(self, tmp_path):
        a = run(
            "solve",
            tmp_path,
            parameters={"engine": "fd", "path": "teeth", "sample_times": (1.0,)},
            resolution={"x_nodes": 129, "h_nodes": 129, "path_steps": 128},
        )
        meta = json.loads((tmp_path / "metadata.json").read_text())
        assert meta["engine"] == "fd"
        assert meta["cfl_used"] > 0 and meta["steps"] >= 1
        assert a.metrics["path_digest"] == meta["path_digest"]


class TestStudyScenarios:
    def test_limit_defaults_pass(self, tmp_path):
        a = run("limit", tmp_path)
        assert a.passed, [r for r in a.assertions if not r["passed"]]
        errs = a.metrics["sup_errors"]
        assert all(b < x for x, b in zip(errs, errs[1:]))
        names = {r["name"] for r in a.assertions}
        assert {
            "errors-strictly-decreasing",
            "final-error",
            "far-field-cone",
            "plateau-doubling",
        } <= names

    def test_blowup_slope_tracks_exponent(self, tmp_path):
        a = run(
            "blowup",
            tmp_path,
            parameters={"n_list": (2, 3, 4, 5, 6, 7, 8)},
            resolution={"dual_nodes": 1025, "primal_nodes": 257},
        )
        assert a.passed
        assert a.metrics["target_slope"] == 0.5
        assert abs(a.metrics["fitted_slope"] - 0.5) <= 0.1

    def test_brownian_small_run(self, tmp_path):
        a = run(
            "brownian",
            tmp_path,
            resolution={"samples": 50, "walks": 100, "n_levels": 4, "dt_exponent": 8},
        )
        by_name = {r["name"]: r for r in a.assertions}
        assert by_name["tail-frequency"]["passed"]
        assert by_name["first-epoch-mean"]["passed"]
        assert set(a.tables) == {"path_norms.csv", "quantiles.csv", "walk_tail.csv"}

    def test_walks_small_run_structure(self, tmp_path):
        # statistical gap checks need the production sample budget; a tiny
        # ensemble only exercises plumbing and the exact zero-driver identity
        a = run(
            "walks",
            tmp_path,
            parameters={"n_list": (2, 4), "x_probes": (0.0,)},
            resolution={
                "samples": 10,
                "dt_exponent": 10,
                "dual_nodes": 129,
                "primal_nodes": 257,
            },
        )
        by_name = {r["name"]: r for r in a.assertions}
        assert by_name["zero-driver"]["passed"]
        assert by_name["zero-driver"]["mode"] == "exact"
        assert "quantile_gap_2" in a.metrics and "quantile_gap_4" in a.metrics
        assert {"ensembles.csv", "gaps.csv"} <= set(a.tables)

    def test_crossval_small_run(self, tmp_path):
        a = run(
            "crossval",
            tmp_path,
            resolution={
                "fd_nodes": (65, 129, 257),
                "h_nodes": 65,
                "dual_nodes": 1025,
                "sandwich_nodes": 129,
                "probe_nodes": 21,
            },
        )
        by_name = {r["name"]: r for r in a.assertions}
        for name in (
            "zero-path-exact",
            "conjugate-closed-form",
            "errors-decrease",
        ):
            assert by_name[name]["passed"], name
        orders = a.metrics["orders"]
        assert orders[-1] > 0.5

    def test_stability_small_run(self, tmp_path):
        a = run(
            "stability",
            tmp_path,
            resolution={"trials": 10, "dual_nodes": 513, "h_nodes": 257},
        )
        by_name = {r["name"]: r for r in a.assertions}
        assert by_name["identical-paths"]["passed"]
        assert by_name["identical-paths"]["mode"] == "exact"
        assert by_name["convex-easy-bound"]["passed"]
        assert set(a.tables) == {"sweep.csv", "trials.csv", "convex.csv"}


class TestFigures:
    def test_paths_figure_rendered(self, tmp_path):
        a = run("paths", tmp_path, parameters={"kind": "teeth"}, figures=True)
        assert a.figures == ["path.png"]
        assert (tmp_path / "path.png").stat().st_size > 0
        assert json.loads((tmp_path / "summary.json").read_text())["figures"] == [
            "path.png"
        ]

    def test_figures_off_by_request(self, tmp_path):
        a = run("paths", tmp_path, parameters={"kind": "teeth"}, figures=False)
        assert a.figures == []
        assert not list(tmp_path.glob("*.png"))


class TestCli:
    def test_list_scenarios(self, capsys):
        assert cli.main(["--list-scenarios"]) == 0
        out = capsys.readouterr().out
        for name in ex.SCENARIOS:
            assert name in out

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["--version"])
        assert info.value.code == 0
        assert "pathwise-hj" in capsys.readouterr().out

    def test_no_work_requested(self, capsys):
        assert cli.main([]) == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_scenario(self, capsys):
        assert cli.main(["quux"]) == 2
        assert "unknown scenario" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.main(["--config", str(tmp_path / "absent.cfg")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_default_run_with_overrides(self, tmp_path, capsys):
        code = cli.main(
            ["paths", "--out", str(tmp_path), "--seed", "7", "--no-figures"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "wrote" in out and "summary.json" in out
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["seed"] == {"seed": 7, "stream": 0}
        assert summary["figures"] == []

    def test_config_file_run_and_cli_precedence(self, tmp_path, capsys):
        cfg_text = (
            "[run]\nscenario = paths\nseed = 3\n"
            "[parameters]\nkind = zero\nduration = 1.0\n"
        )
        cfg_file = tmp_path / "job.cfg"
        cfg_file.write_text(cfg_text)
        code = cli.main(
            [
                "--config",
                str(cfg_file),
                "--seed",
                "5",
                "--out",
                str(tmp_path / "out"),
                "--no-figures",
            ]
        )
        assert code == 0
        capsys.readouterr()
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["seed"]["seed"] == 5

    def test_scenario_mismatch_with_config(self, tmp_path, capsys):
        cfg_file = tmp_path / "job.cfg"
        cfg_file.write_text("[run]\nscenario = limit\n")
        assert cli.main(["blowup", "--config", str(cfg_file)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_failing_assertions_exit_one(self, tmp_path, capsys):
        cfg_file = tmp_path / "job.cfg"
        cfg_file.write_text(
            "[run]\nscenario = blowup\n"
            "[parameters]\nn_list = 2, 3\nslope_tolerance = 1e-6\n"
            "[resolution]\ndual_nodes = 257\nprimal_nodes = 129\n"
        )
        code = cli.main(
            ["--config", str(cfg_file), "--out", str(tmp_path / "o"), "--no-figures"]
        )
        assert code == 1
        out = capsys.readouterr().out
        assert "FAIL growth-exponent" in out

    def test_per_assertion_lines(self, tmp_path, capsys):
        cfg = ex.default_config(
            "blowup",
            parameters={"n_list": (2, 3, 4), "slope_tolerance": 2.0},
            resolution={"dual_nodes": 257, "primal_nodes": 129},
            output_dir=tmp_path,
        )
        cfg_file = tmp_path / "job.cfg"
        cfg_file.write_text(ex.render_config(cfg))
        assert cli.main(["--config", str(cfg_file), "--no-figures"]) == 0
        out = capsys.readouterr().out
        assert "PASS growth-exponent" in out


class TestPublicWrappers:
    def test_run_blowup_signature(self, tmp_path):
        a = ex.run_blowup(
            0.25,
            0.25,
            (2, 3, 4),
            output_dir=tmp_path,
            resolution={"dual_nodes": 257, "primal_nodes": 129},
        )
        assert isinstance(a, ex.RunArtifact)
        assert "fitted_slope" in a.metrics

    def test_run_stability_trials_argument(self, tmp_path):
        a = ex.run_stability(
            10,
            0,
            output_dir=tmp_path,
            resolution={"dual_nodes": 513, "h_nodes": 257},
        )
        rows = (tmp_path / "trials.csv").read_text().splitlines()
        assert len(rows) == 11
        assert a.summary()["scenario"] == "stability"
