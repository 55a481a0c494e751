import json

import numpy as np
import pytest

import sarfima.cli as cli
from sarfima import (SarfimaSpec, SeasonalComponent, SimConfig, WhittleFit,
                     WhittleTemplate, build_band_plan, estimate_to_json,
                     gph_estimate, periodogram, sample_acf_pacf, simulate,
                     spec_to_json, whittle_estimate, whittle_fit_to_json)
from sarfima.pipeline import acf_to_csv


@pytest.fixture()
def spec_file(tmp_path, two_period_spec):
    path = tmp_path / "spec.json"
    path.write_text(spec_to_json(two_period_spec))
    return str(path)


@pytest.fixture()
def series_file(tmp_path, two_period_spec):
    x = simulate(SimConfig(spec=two_period_spec, n=1080, seed=505))
    path = tmp_path / "x.csv"
    path.write_text("x\n" + "".join(f"{float(v)!r}\n" for v in x))
    return str(path), x


class TestSimulateVerb:
    def test_writes_series_and_sidecar(self, tmp_path, spec_file, two_period_spec):
        out = str(tmp_path / "sim.csv")
        rc = cli.dispatch(["simulate", "--spec", spec_file, "--n", "200",
                           "--seed", "505", "--out", out])
        assert rc == 0
        lines = (tmp_path / "sim.csv").read_text().splitlines()
        assert lines[0] == "x"
        x = simulate(SimConfig(spec=two_period_spec, n=200, seed=505))
        assert lines[1:] == [repr(float(v)) for v in x]
        meta = json.loads((tmp_path / "sim.csv.meta.json").read_text())
        assert meta["seed"] == 505 and meta["n"] == 200
        assert meta["method"] == "exact_dl"
        assert meta["grid_exponent"] is not None
        assert meta["spec"]["components"][0]["period"] == 1

    def test_seed_required(self, tmp_path, spec_file, capsys):
        rc = cli.dispatch(["simulate", "--spec", spec_file, "--n", "100",
                           "--out", str(tmp_path / "y.csv")])
        assert rc == 1
        err = capsys.readouterr().err
        assert err.startswith("error: bad-arguments:")
        assert "--seed" in err

    def test_nonstationary_spec_fails_validation(self, tmp_path, capsys):
        bad = SarfimaSpec(components=(SeasonalComponent(4, 0.3),))
        doc = json.loads(spec_to_json(bad))
        doc["components"][0]["d"] = 0.7
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(doc))
        rc = cli.dispatch(["simulate", "--spec", str(p), "--n", "100",
                           "--seed", "1", "--out", str(tmp_path / "z.csv")])
        assert rc == 1
        assert "error: nonstationary-spec:" in capsys.readouterr().err


class TestPeriodogramVerb:
    def test_golden_output(self, tmp_path, series_file):
        path, x = series_file
        out = str(tmp_path / "pg.csv")
        assert cli.dispatch(["periodogram", "--in", path, "--out", out]) == 0
        golden = str(tmp_path / "golden.csv")
        periodogram(x).to_csv(golden)
        assert open(out, "rb").read() == open(golden, "rb").read()

    def test_missing_file(self, tmp_path, capsys):
        rc = cli.dispatch(["periodogram", "--in", str(tmp_path / "nope.csv"),
                           "--out", str(tmp_path / "o.csv")])
        assert rc == 1
        assert "error: io-error:" in capsys.readouterr().err

    def test_headerless_csv_rejected(self, tmp_path, capsys):
        p = tmp_path / "raw.csv"
        p.write_text("1.0\n2.0\n3.0\n")
        rc = cli.dispatch(["periodogram", "--in", str(p),
                           "--out", str(tmp_path / "o.csv")])
        assert rc == 1
        assert "error: malformed-csv:" in capsys.readouterr().err


class TestEstimateGphVerb:
    def test_stdout_matches_library_json(self, series_file, capsys):
        path, x = series_file
        rc = cli.dispatch(["estimate-gph", "--in", path, "--s1", "1",
                           "--s2", "4", "--alpha", "0.5"])
        assert rc == 0
        pg = periodogram(x)
        plan = build_band_plan(1080, 1, 4, int(1080 ** 0.5))
        est = gph_estimate(pg, plan, 1, 4)
        assert capsys.readouterr().out == estimate_to_json(est) + "\n"

    def test_single_period_gph_T(self, series_file, capsys):
        path, _ = series_file
        rc = cli.dispatch(["estimate-gph", "--in", path, "--s1", "4", "--gph-T"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["method"] == "gph_single" and doc["m"] == 134

    def test_divisor_violation_exit_code(self, series_file, capsys):
        path, _ = series_file
        rc = cli.dispatch(["estimate-gph", "--in", path, "--s1", "12",
                           "--s2", "5", "--alpha", "0.5"])
        assert rc == 1
        err = capsys.readouterr().err
        assert err.startswith("error: s2-not-divisor:")

    def test_exactly_one_bandwidth_flag(self, series_file, capsys):
        path, _ = series_file
        rc = cli.dispatch(["estimate-gph", "--in", path, "--s1", "4",
                           "--alpha", "0.5", "--m", "30"])
        assert rc == 1
        assert "error: bad-arguments:" in capsys.readouterr().err

    def test_out_file(self, tmp_path, series_file):
        path, _ = series_file
        out = str(tmp_path / "est.json")
        rc = cli.dispatch(["estimate-gph", "--in", path, "--s1", "1",
                           "--s2", "4", "--m", "30", "--out", out])
        assert rc == 0
        doc = json.loads(open(out).read())
        assert doc["m"] == 30


class TestEstimateWhittleVerb:
    def test_periods_shorthand(self, series_file, capsys):
        path, x = series_file
        rc = cli.dispatch(["estimate-whittle", "--in", path, "--periods", "1,4"])
        assert rc == 0
        fit = whittle_estimate(x, WhittleTemplate.pure([1, 4]))
        assert capsys.readouterr().out == whittle_fit_to_json(fit) + "\n"

    def test_template_file(self, tmp_path, series_file, two_period_spec, capsys):
        path, _ = series_file
        tdoc = {"spec": json.loads(spec_to_json(two_period_spec)),
                "free_d": [True, True], "d_box": 0.49}
        tpath = tmp_path / "template.json"
        tpath.write_text(json.dumps(tdoc))
        rc = cli.dispatch(["estimate-whittle", "--in", path,
                           "--template", str(tpath)])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] is True

    def test_template_and_periods_conflict(self, tmp_path, series_file, capsys):
        path, _ = series_file
        rc = cli.dispatch(["estimate-whittle", "--in", path,
                           "--periods", "4", "--template", "t.json"])
        assert rc == 1
        assert "error: bad-arguments:" in capsys.readouterr().err

    def test_nonconvergence_exits_2(self, series_file, capsys, monkeypatch):
        path, _ = series_file

        def fake(series, template):
            return WhittleFit(d_hat=np.array([0.0]),
                              short_memory={"ar": [], "ma": [], "sigma2": 1.0},
                              objective=0.0, converged=False, iterations=999,
                              periods=(4,))

        monkeypatch.setattr(cli, "whittle_estimate", fake)
        rc = cli.dispatch(["estimate-whittle", "--in", path, "--periods", "4"])
        assert rc == 2
        captured = capsys.readouterr()
        assert "error: non-convergence:" in captured.err
        # the (unconverged) fit document is still emitted for inspection
        assert json.loads(captured.out)["converged"] is False


class TestFilterScanAcfVerbs:
    def test_filter_round_trip(self, tmp_path, series_file):
        path, x = series_file
        mid = str(tmp_path / "resid.csv")
        back = str(tmp_path / "back.csv")
        assert cli.dispatch(["filter", "--in", path, "--d", "0.1,0.3",
                             "--periods", "1,4", "--out", mid]) == 0
        # leading-dash values need the --flag=value spelling
        assert cli.dispatch(["filter", "--in", mid, "--d=-0.1,-0.3",
                             "--periods", "1,4", "--out", back]) == 0
        restored = np.array([float(v) for v in
                             open(back).read().splitlines()[1:]])
        assert np.max(np.abs(restored - x)) < 1e-7

    def test_scan_golden(self, tmp_path, series_file):
        from sarfima import bandwidth_scan, scan_to_csv
        path, x = series_file
        out = str(tmp_path / "scan.csv")
        assert cli.dispatch(["scan", "--in", path, "--s1", "1", "--s2", "4",
                             "--alphas", "0.4,0.5,0.6", "--out", out]) == 0
        golden = str(tmp_path / "golden.csv")
        scan_to_csv(bandwidth_scan(x, 1, 4, [0.4, 0.5, 0.6]), golden)
        assert open(out, "rb").read() == open(golden, "rb").read()

    def test_acf_golden(self, tmp_path, series_file):
        path, x = series_file
        out = str(tmp_path / "acf.csv")
        assert cli.dispatch(["acf", "--in", path, "--max-lag", "12",
                             "--out", out]) == 0
        golden = str(tmp_path / "golden.csv")
        acf_to_csv(sample_acf_pacf(x, 12), golden)
        assert open(out, "rb").read() == open(golden, "rb").read()


class TestMcVerb:
    def test_summary_and_dump(self, tmp_path):
        out = str(tmp_path / "mc.csv")
        dump = str(tmp_path / "reps.csv")
        rc = cli.dispatch(["mc", "--design", "table1", "--seed", "7",
                           "--reps", "4", "--out", out,
                           "--dump-estimates", dump])
        assert rc == 0
        lines = open(out).read().splitlines()
        assert lines[0] == "estimator,param,mean,mse,corr"
        assert len(lines) == 5  # four single-parameter estimators
        dlines = open(dump).read().splitlines()
        assert dlines[0] == "rep,estimator,param,value"
        assert len(dlines) == 1 + 4 * 4

    def test_unknown_design(self, tmp_path, capsys):
        rc = cli.dispatch(["mc", "--design", "table7", "--seed", "1",
                           "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "bad-arguments" in capsys.readouterr().err

    def test_seed_required(self, tmp_path, capsys):
        rc = cli.dispatch(["mc", "--design", "table1",
                           "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "--seed" in capsys.readouterr().err


class TestParsing:
    def test_unknown_verb(self, capsys):
        assert cli.dispatch(["frobnicate"]) == 1
        assert "error: bad-arguments:" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.dispatch(["--help"])
        assert exc.value.code == 0
