"""Command-line interface: outputs, formats, config handling, determinism."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from pipfract.cli import main
from pipfract.render import read_ppm


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **kwargs):
    return runner.invoke(main, args, catch_exceptions=False, **kwargs)


def parse_csv(text):
    lines = text.strip().splitlines()
    header, rows = lines[0], lines[1:]
    return header, [tuple(part for part in line.split(",")) for line in rows]


SMALL = ["--universe-bound", "1000000000"]


class TestCacheCommand:
    def test_million_summary(self, runner, tmp_path):
        res = invoke(runner, SMALL + ["cache", "--limit", "1000000",
                                      "--path", str(tmp_path / "c.pipc")])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert payload["count"] == 78498
        assert payload["max"] == 999983

    def test_trivial_summary(self, runner, tmp_path):
        res = invoke(runner, SMALL + ["cache", "--limit", "2",
                                      "--path", str(tmp_path / "c.pipc")])
        assert json.loads(res.output) == {
            "count": 1, "max": 2, "checkpoints": 0,
            "stride": 10000000, "path": str(tmp_path / "c.pipc"),
        }

    def test_unwritable_path_fails_with_diagnostic(self, runner):
        res = runner.invoke(main, SMALL + ["cache", "--limit", "100",
                                           "--path", "/nonexistent-dir/c.pipc"])
        assert res.exit_code != 0
        assert "nonexistent-dir" in res.stderr

    def test_threads_flag_changes_no_output_byte(self, runner, tmp_path):
        outs = []
        for threads in ("1", "2"):
            path = tmp_path / f"t{threads}.pipc"
            res = invoke(runner, SMALL + ["--threads", threads, "--checkpoint-stride",
                                          "997", "cache", "--limit", "500000",
                                          "--path", str(path)])
            payload = json.loads(res.output)
            del payload["path"]
            outs.append((json.dumps(payload), path.read_bytes()))
        assert outs[0] == outs[1]


class TestPipCommand:
    def test_order_two_column(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "2", "-s", "0", "-i", "1:20"])
        header, rows = parse_csv(res.output)
        assert header == "i,value"
        assert [int(v) for _, v in rows] == [
            3, 5, 11, 17, 31, 41, 59, 67, 83, 109,
            127, 157, 179, 191, 211, 241, 277, 283, 331, 353,
        ]

    def test_shifted_column(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "2", "-s", "1", "-i", "1:5"])
        _, rows = parse_csv(res.output)
        assert [int(v) for _, v in rows] == [7, 13, 19, 37, 43]

    def test_identity_row(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "0", "-s", "0", "-i", "1:3"])
        _, rows = parse_csv(res.output)
        assert rows == [("1", "1"), ("2", "2"), ("3", "3")]

    def test_json_format(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "1", "-i", "1:5", "--format", "json"])
        assert json.loads(res.output) == [2, 3, 5, 7, 11]

    def test_csv_round_trip(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "3", "-i", "7:31"])
        _, rows = parse_csv(res.output)
        idx = [int(i) for i, _ in rows]
        vals = [int(v) for _, v in rows]
        assert idx == list(range(7, 32))
        res2 = invoke(runner, SMALL + ["pip", "-k", "3", "-i", "7:31", "--format", "json"])
        assert json.loads(res2.output) == vals

    def test_out_of_universe_fails(self, runner):
        res = runner.invoke(main, ["--universe-bound", "1000", "pip", "-k", "2",
                                   "-i", "1:100"])
        assert res.exit_code != 0
        assert "universe" in res.stderr

    def test_deterministic_bytes(self, runner):
        outs = [invoke(runner, SMALL + ["pip", "-k", "2", "-i", "1:50"]).output
                for _ in range(2)]
        assert outs[0] == outs[1]


class TestDalethCommand:
    def test_second_difference_of_primes(self, runner):
        res = invoke(runner, SMALL + ["daleth", "-h", "1", "-n", "2", "-s", "0",
                                      "-k", "1", "-i", "1:3"])
        _, rows = parse_csv(res.output)
        assert [int(v) for _, v in rows] == [1, 0, 2]

    def test_sign_filter(self, runner):
        res = invoke(runner, SMALL + ["daleth", "-h", "1", "-n", "2", "-s", "0",
                                      "-k", "1", "-i", "1:3", "--filter", "sign"])
        _, rows = parse_csv(res.output)
        assert [int(v) for _, v in rows] == [1, 0, 1]

    def test_order_zero_returns_raw_pips(self, runner):
        res = invoke(runner, SMALL + ["daleth", "-n", "0", "-k", "1", "-i", "1:5"])
        _, rows = parse_csv(res.output)
        assert [int(v) for _, v in rows] == [2, 3, 5, 7, 11]

    def test_quant256_filter(self, runner):
        res = invoke(runner, SMALL + ["daleth", "-n", "2", "-k", "1", "-i", "1:100",
                                      "--filter", "quant256"])
        _, rows = parse_csv(res.output)
        vals = [int(v) for _, v in rows]
        assert min(vals) == 0 and max(vals) == 255


class TestStatsCommands:
    def test_corr_single_order(self, runner):
        res = invoke(runner, SMALL + ["stats", "corr", "--k", "1:1", "--T", "100"])
        payload = json.loads(res.output)
        assert payload["matrix"] == [[1.0]]

    def test_corr_small_matrix(self, runner):
        res = invoke(runner, SMALL + ["stats", "corr", "--k", "1:3", "--T", "400"])
        payload = json.loads(res.output)
        m = np.array(payload["matrix"])
        assert m.shape == (3, 3)
        assert np.array_equal(m, m.T)
        assert (np.diag(m) == 1).all()

    def test_rolling_sign_variance(self, runner):
        res = invoke(runner, SMALL + ["stats", "rolling", "--k", "1", "--T", "400",
                                      "--w", "100", "--y", "100", "--filter", "sign"])
        header, rows = parse_csv(res.output)
        assert header == "i,mean,variance"
        assert [int(i) for i, _, _ in rows] == [100, 200, 300, 400]
        for _, _, var in rows:
            assert 0.8 < float(var) < 1.1

    def test_hist(self, runner):
        res = invoke(runner, SMALL + ["stats", "hist", "--k", "1", "--T", "2000",
                                      "--lo", "-51", "--hi", "51"])
        header, rows = parse_csv(res.output)
        assert header == "center,count"
        assert len(rows) == 102
        total = sum(float(c) for _, c in rows)
        assert 0 < total <= 2000

    def test_laplace(self, runner):
        res = invoke(runner, SMALL + ["stats", "laplace", "--k", "1", "--T", "500"])
        payload = json.loads(res.output)
        assert payload["laplace"]["kind"] == "laplace"
        assert payload["laplace"]["b"] > 0
        assert payload["gaussian"]["sigma"] > 0

    def test_zeros_with_fit(self, runner):
        res = invoke(runner, SMALL + ["stats", "zeros", "--n", "2", "--k", "1:3",
                                      "--T", "3000,20000,60000"])
        payload = json.loads(res.output)
        assert payload["k"] == [1, 2, 3]
        assert len(payload["counts"]) == 3
        assert payload["fit"]["kind"] == "exponential"
        assert payload["fit"]["B"] < 0

    def test_outliers_small_grid(self, runner):
        res = invoke(runner, SMALL + ["stats", "outliers", "--imax", "30", "--k", "1:4"])
        payload = json.loads(res.output)
        assert payload["total"] == len(payload["positions"])


class TestRenderCommand:
    def test_single_block(self, runner, tmp_path):
        out = tmp_path / "one.ppm"
        res = invoke(runner, SMALL + ["render", "-k", "1:1", "-i", "2:2",
                                      "--style", "sign3", "--out", str(out),
                                      "--band-width", "2", "--row-height", "3",
                                      "--gap", "5"])
        meta = json.loads(res.output)
        assert meta["width"] == 2 and meta["height"] == 3
        img = read_ppm(out)
        assert img.shape == (3, 2, 3)
        # second difference of primes at i=2 is 0 (triple 3,5,7): red block
        assert (img == np.array([255, 0, 0], dtype=np.uint8)).all()

    def test_meta_reports_pip_endpoints(self, runner, tmp_path):
        out = tmp_path / "g.ppm"
        res = invoke(runner, SMALL + ["render", "-k", "1:2", "-i", "1:20",
                                      "--style", "jet256", "--out", str(out)])
        meta = json.loads(res.output)
        assert [row["k"] for row in meta["rows"]] == [2, 1]
        assert meta["rows"][0]["q_first"] == 3 and meta["rows"][0]["q_last"] == 353
        assert meta["rows"][1]["q_first"] == 2 and meta["rows"][1]["q_last"] == 71

    def test_geometry_default(self, runner, tmp_path):
        out = tmp_path / "g.ppm"
        res = invoke(runner, SMALL + ["render", "-k", "1:2", "-i", "1:30",
                                      "--out", str(out)])
        meta = json.loads(res.output)
        assert meta["width"] == 30
        assert meta["height"] == 2 * (40 + 8) - 8

    def test_out_of_universe_row_names_failing_index(self, runner, tmp_path):
        res = runner.invoke(main, ["--universe-bound", "1000", "render",
                                   "-k", "2:2", "-i", "1:100",
                                   "--out", str(tmp_path / "x.ppm")])
        assert res.exit_code != 0
        assert "index 40" in res.stderr  # first index whose chain leaves the universe

    def test_render_deterministic(self, runner, tmp_path):
        blobs = []
        for run in range(2):
            out = tmp_path / f"d{run}.ppm"
            invoke(runner, SMALL + ["render", "-k", "1:3", "-i", "1:40",
                                    "--style", "jet256", "--out", str(out)])
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


class TestConfigHandling:
    def test_config_file_sets_universe(self, runner, tmp_path):
        cfg = tmp_path / "pipfract.cfg"
        cfg.write_text("universe_bound = 1000\n# comment\nthreads = 1\n")
        res = runner.invoke(main, ["--config", str(cfg), "pip", "-k", "2",
                                   "-i", "1:100"])
        assert res.exit_code != 0  # config universe too small for q^2(100)

    def test_flag_overrides_config(self, runner, tmp_path):
        cfg = tmp_path / "pipfract.cfg"
        cfg.write_text("universe_bound = 1000\n")
        res = invoke(runner, ["--config", str(cfg), "--universe-bound", "100000000",
                              "pip", "-k", "2", "-i", "1:100"])
        assert res.exit_code == 0

    def test_env_var_points_at_cache(self, runner, tmp_path):
        path = tmp_path / "c.pipc"
        invoke(runner, SMALL + ["--checkpoint-stride", "100", "cache",
                                "--limit", "100000", "--path", str(path)])
        res = invoke(runner, SMALL + ["pip", "-k", "1", "-i", "1000:1005"],
                     env={"PIPFRACT_CACHE": str(path)})
        _, rows = parse_csv(res.output)
        assert [int(v) for _, v in rows] == [7919, 7927, 7933, 7937, 7949, 7951]

    def test_bad_config_key_rejected(self, runner, tmp_path):
        cfg = tmp_path / "pipfract.cfg"
        cfg.write_text("bogus = 1\n")
        res = runner.invoke(main, ["--config", str(cfg), "pip", "-k", "1", "-i", "1:2"])
        assert res.exit_code != 0

    def test_cached_and_uncached_agree(self, runner, tmp_path):
        path = tmp_path / "c.pipc"
        invoke(runner, SMALL + ["--checkpoint-stride", "50", "cache",
                                "--limit", "200000", "--path", str(path)])
        with_cache = invoke(runner, SMALL + ["--cache", str(path), "pip", "-k", "2",
                                             "-i", "1:200"]).output
        without = invoke(runner, SMALL + ["pip", "-k", "2", "-i", "1:200"]).output
        assert with_cache == without


class TestRangeParsing:
    def test_bare_number_is_singleton(self, runner):
        res = invoke(runner, SMALL + ["pip", "-k", "1", "-i", "5"])
        _, rows = parse_csv(res.output)
        assert rows == [("5", "11")]

    def test_reversed_range_rejected(self, runner):
        res = runner.invoke(main, SMALL + ["pip", "-k", "1", "-i", "5:3"])
        assert res.exit_code != 0

    def test_malformed_range_rejected(self, runner):
        res = runner.invoke(main, SMALL + ["pip", "-k", "1", "-i", "1:2:3"])
        assert res.exit_code != 0
