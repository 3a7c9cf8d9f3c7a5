"""Command-line interface: outputs, determinism, exit codes."""

import filecmp

import numpy as np

from condensity import (
    NoiseModel,
    demo_measure,
    exact_moments,
    read_moment_csv,
    reciprocal_moments,
    sample_moments,
    write_measure_file,
    write_moment_csv,
)
from condensity.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main


def run(*args):
    return main([str(a) for a in args])


class TestSimulate:
    def test_zero_noise_single_file_matches_exact(self, tmp_path):
        out = tmp_path / "run"
        assert run("simulate", "--sigma", 0, "--realizations", 1, "--n", 16,
                   "--out", out) == EXIT_OK
        noiseless = read_moment_csv(out / "moments_noiseless.csv")
        realization = read_moment_csv(out / "moments_r00000.csv")
        np.testing.assert_array_equal(noiseless.values, realization.values)
        want = exact_moments(demo_measure(), 16).values
        np.testing.assert_array_equal(noiseless.values, want)

    def test_file_count_and_rows(self, tmp_path):
        out = tmp_path / "run"
        assert run("simulate", "--realizations", 3, "--n", 21, "--out", out) == EXIT_OK
        files = sorted(p.name for p in out.iterdir())
        assert files == [
            "measure.txt", "moments_noiseless.csv",
            "moments_r00000.csv", "moments_r00001.csv", "moments_r00002.csv",
        ]
        assert len((out / "moments_r00002.csv").read_text().splitlines()) == 22

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("simulate", "--seed", 42, "--realizations", 2, "--n", 12,
                       "--out", out) == EXIT_OK
        for name in ("measure.txt", "moments_noiseless.csv", "moments_r00001.csv"):
            assert filecmp.cmp(a / name, b / name, shallow=False)

    def test_matches_library_sampling(self, tmp_path):
        out = tmp_path / "run"
        assert run("simulate", "--seed", 9, "--sigma", 0.2, "--realizations", 1,
                   "--n", 10, "--out", out) == EXIT_OK
        got = read_moment_csv(out / "moments_r00000.csv")
        want = sample_moments(demo_measure(), 10, NoiseModel(sigma=0.2, seed=9), 0)
        np.testing.assert_array_equal(got.values, want.values)


class TestTransform:
    def test_twice_recovers_input(self, tmp_path):
        out = tmp_path / "run"
        assert run("simulate", "--realizations", 1, "--n", 20, "--out", out) == EXIT_OK
        src = out / "moments_r00000.csv"
        assert run("transform", src, "--out", out) == EXIT_OK
        mid = out / "moments_r00000_transformed.csv"
        assert run("transform", mid, "--out", out) == EXIT_OK
        back = read_moment_csv(out / "moments_r00000_transformed_transformed.csv")
        orig = read_moment_csv(src)
        err = np.max(np.abs(back.values - orig.values)) / np.max(np.abs(orig.values))
        assert err <= 1e-8

    def test_geometric_input(self, tmp_path):
        from condensity import MomentSequence

        a = 0.3 - 0.1j
        src = tmp_path / "geo.csv"
        write_moment_csv(MomentSequence([1.0, a, 0.0, 0.0, 0.0]), src)
        assert run("transform", src, "--out", tmp_path) == EXIT_OK
        got = read_moment_csv(tmp_path / "geo_transformed.csv")
        want = np.array([(-a) ** k for k in range(5)])
        np.testing.assert_allclose(got.values, want, atol=1e-15)

    def test_equals_library_call(self, tmp_path):
        out = tmp_path / "run"
        assert run("simulate", "--realizations", 1, "--n", 18, "--seed", 3,
                   "--out", out) == EXIT_OK
        src = out / "moments_r00000.csv"
        assert run("transform", src, "--out", out) == EXIT_OK
        got = read_moment_csv(out / "moments_r00000_transformed.csv")
        want = reciprocal_moments(read_moment_csv(src))
        np.testing.assert_array_equal(got.values, want.values)


class TestFitDensity:
    def test_outputs_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("fit-density", "--realizations", 150, "--n", 16,
                       "--seed", 7, "--out", out) == EXIT_OK
        for name in ("expansions.csv", "density_fit.csv"):
            assert filecmp.cmp(a / name, b / name, shallow=False)
        header = (a / "density_fit.csv").read_text().splitlines()[0]
        assert header == "k,status,alpha,beta,l2_one_term,l2_full_series"
        dump_header = (a / "expansions.csv").read_text().splitlines()[0]
        assert dump_header.startswith("k,alpha,beta,tau,b0,")
        # one table row per diagonal index of the default pencil (16/2 - 2)
        assert len((a / "density_fit.csv").read_text().splitlines()) == 1 + 6

    def test_needs_hundred_realizations(self, tmp_path):
        assert run("fit-density", "--realizations", 50, "--n", 16,
                   "--out", tmp_path / "x") == EXIT_CONFIG


class TestEstimate:
    def test_zeros_outputs(self, tmp_path):
        out = tmp_path / "run"
        assert run("estimate-zeros", "--n", 16, "--grid-size", 21, "--order", 4,
                   "--out", out) == EXIT_OK
        for name in ("zeros_grid_normalized.csv", "zeros_grid_raw.csv",
                     "zeros_heatmap.pgm", "zeros_modes.csv"):
            assert (out / name).exists()
        header = (out / "zeros_modes.csv").read_text().splitlines()[0]
        assert header == "rank,re,im"

    def test_montecarlo_single_realization_equals_single_mode(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("estimate-zeros", "--n", 16, "--grid-size", 15, "--order", 3,
                   "--seed", 4, "--out", a) == EXIT_OK
        assert run("montecarlo", "--kind", "zero", "--realizations", 1, "--n", 16,
                   "--grid-size", 15, "--order", 3, "--seed", 4, "--out", b) == EXIT_OK
        assert (a / "zeros_grid_normalized.csv").read_text() == \
            (b / "montecarlo_grid_normalized.csv").read_text()

    def test_pole_run_finds_the_node(self, tmp_path):
        from condensity import AtomicMeasure

        node = -0.2 + 0.4j
        mfile = tmp_path / "single.txt"
        write_measure_file(AtomicMeasure(weights=[1.0], nodes=[node]), mfile)
        out = tmp_path / "run"
        assert run("estimate-poles", "--measure", mfile, "--n", 8, "--sigma", 0.01,
                   "--order", 1, "--grid-size", 61, "--out", out) == EXIT_OK
        rows = (out / "poles_modes.csv").read_text().splitlines()[1:]
        modes = [complex(float(r.split(",")[1]), float(r.split(",")[2])) for r in rows]
        cell = 2.4 / 60
        assert min(abs(m - node) for m in modes) <= 2 * cell * np.sqrt(2)

    def test_sigma_zero_is_config_error(self, tmp_path):
        assert run("estimate-zeros", "--sigma", 0, "--n", 16,
                   "--out", tmp_path / "x") == EXIT_CONFIG


class TestCompare:
    def test_consumes_dump_and_reproduces_l2(self, tmp_path):
        out = tmp_path / "run"
        assert run("fit-density", "--realizations", 150, "--n", 16, "--seed", 7,
                   "--out", out) == EXIT_OK
        assert run("compare", "--realizations", 150, "--n", 16, "--seed", 7,
                   "--out", out) == EXIT_OK
        fit_rows = (out / "density_fit.csv").read_text().splitlines()[1:]
        cmp_rows = (out / "comparison.csv").read_text().splitlines()[1:]
        assert len(fit_rows) == len(cmp_rows)
        for fr, cr in zip(fit_rows, cmp_rows):
            f = fr.split(",")
            c = cr.split(",")
            assert f[0] == c[0]
            assert f[4:6] == c[1:3]  # same L2 columns from the same seed

    def test_missing_dump_is_config_error(self, tmp_path):
        assert run("compare", "--out", tmp_path / "empty") == EXIT_CONFIG


class TestConfigHandling:
    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\n"
            "n = 12\n"
            "sigma = 0.1\n"
            "realizations = 2\n"
            f"out = {tmp_path / 'from_config'}\n"
        )
        assert run("simulate", "--config", cfg) == EXIT_OK
        assert (tmp_path / "from_config" / "moments_r00001.csv").exists()
        override = tmp_path / "override"
        assert run("simulate", "--config", cfg, "--realizations", 1,
                   "--out", override) == EXIT_OK
        assert not (override / "moments_r00001.csv").exists()

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("frobnicate = 3\n")
        assert run("simulate", "--config", cfg) == EXIT_CONFIG

    def test_missing_measure_file(self, tmp_path):
        assert run("simulate", "--measure", tmp_path / "nope.txt",
                   "--out", tmp_path / "x") == EXIT_CONFIG

    def test_numeric_failure_exit_code(self, tmp_path):
        from condensity import MomentSequence

        src = tmp_path / "dead.csv"
        write_moment_csv(MomentSequence([0.0, 1.0, 2.0, 3.0]), src)
        assert run("transform", src, "--out", tmp_path) == EXIT_NUMERIC

    def test_io_failure_exit_code(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("i am a file")
        assert run("simulate", "--n", 8, "--realizations", 1,
                   "--out", blocker / "sub") == EXIT_IO
