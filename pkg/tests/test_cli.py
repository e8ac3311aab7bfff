"""Command-line interface: contracts on output files, exit codes, config
merging, and byte-level reproducibility."""

import json
import math

import pytest

from threshnet.cli import main


def run(args):
    return main(args)


def test_triangles_report(tmp_path):
    out = tmp_path / "t.json"
    code = run(["triangles", "--dist", "uniform:0,1", "--theta", "1", "--n", "2000",
                "--seed", "7", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert set(["triangles", "triangle_density", "limit_triangle_probability"]) <= set(report)
    assert report["limit_triangle_probability"] == pytest.approx(0.25, abs=1e-8)
    assert abs(report["triangle_density"] - 0.25) < 0.05


def test_limits_degree_pmf_table(tmp_path):
    out = tmp_path / "pmf.csv"
    code = run(["limits", "--dist", "uniform:0,1", "--theta", "1",
                "--table", "degree-pmf", "--n", "9", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,pmf"
    assert len(lines) == 11
    for line in lines[1:]:
        _, pmf = line.split(",")
        assert abs(float(pmf) - 0.1) < 1e-9


def test_spatial_mixture_mean(tmp_path):
    out = tmp_path / "s.json"
    code = run(["spatial", "--mode", "mixture", "--d", "2", "--beta", "2",
                "--theta", "1", "--lambda", "1", "--r", "3", "--dist", "uniform:0,1",
                "--R", "800", "--seed", "3", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["mean_identity"] == pytest.approx(math.pi, abs=1e-8)
    se = report["stderr"]
    assert abs(report["mean"] - math.pi) < 3 * se


def test_report_json_roundtrip(tmp_path):
    out = tmp_path / "d.json"
    run(["degree", "--dist", "uniform:0,1", "--theta", "1", "--n", "100",
         "--R", "50", "--seed", "5", "--out", str(out)])
    report = json.loads(out.read_text())
    assert report["R"] == 50
    assert report["seed"] == 5
    assert report["gof"]["name"] == "ks_vs_limit_degree_cdf"
    # re-parsed report matches the in-memory campaign exactly
    from threshnet import stats as tstats

    rep = tstats.run_replicates(
        "degree", {"dist": "uniform:0,1", "theta": 1.0, "n": 100}, 50, 5
    )
    assert report["mean"] == rep.mean
    assert report["variance"] == rep.variance
    assert report["config"] == rep.config
    # the plot-ready tables appear next to the report
    assert (tmp_path / "d_ecdf.csv").exists()
    assert (tmp_path / "d_hist.csv").exists()
    ecdf_lines = (tmp_path / "d_ecdf.csv").read_text().splitlines()
    assert ecdf_lines[0] == "value,ecdf"
    assert len(ecdf_lines) == 51


def test_byte_identical_reruns(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    args = ["pair", "--dist", "uniform:0,1", "--theta", "1", "--n", "100",
            "--R", "60", "--seed", "11"]
    run(args + ["--out", str(out1)])
    run(args + ["--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_pair_report_fields(tmp_path):
    out = tmp_path / "p.json"
    run(["pair", "--dist", "uniform:0,1", "--theta", "1", "--n", "200",
         "--R", "200", "--seed", "2", "--out", str(out)])
    report = json.loads(out.read_text())
    assert report["limit_corr_given_edge"] == pytest.approx(-0.5, abs=1e-6)
    assert report["split_support"] is True
    assert report["columns"] == ["d1_over_n", "d2_over_n", "edge"]


def test_motif_command(tmp_path):
    out = tmp_path / "m.json"
    code = run(["motif", "--dist", "uniform:0,1", "--theta", "1", "--n", "40",
                "--motif", "k=4;edges=1-2,2-3,3-4,4-1", "--seed", "4",
                "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["symmetry_count"] == 8
    assert report["ordered_tuples"] % 8 == 0


def test_usage_error_no_partial_output(tmp_path):
    out = tmp_path / "x.json"
    code = run(["degree", "--dist", "uniform:0,1", "--theta", "1",
                "--out", str(out)])  # missing --n/--R
    assert code == 1
    assert not out.exists()


def test_unknown_command_usage_error():
    assert run(["frobnicate"]) == 1


def test_bad_dist_spec_usage_error(tmp_path):
    out = tmp_path / "x.json"
    code = run(["degree", "--dist", "gauss:0,1", "--theta", "1", "--n", "10",
                "--R", "2", "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_capacity_error_exit_code(tmp_path):
    out = tmp_path / "m.json"
    code = run(["motif", "--dist", "uniform:0,1", "--theta", "1", "--n", "500",
                "--motif", "k=4;edges=1-2,2-3,3-4,4-1", "--seed", "1",
                "--work-cap", "1000", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "dist": "uniform:0,1", "theta": 1.0, "n": 100, "R": 30, "seed": 9,
    }))
    out1 = tmp_path / "c1.json"
    run(["degree", "--config", str(cfg), "--out", str(out1)])
    report1 = json.loads(out1.read_text())
    assert report1["R"] == 30
    out2 = tmp_path / "c2.json"
    run(["degree", "--config", str(cfg), "--R", "10", "--out", str(out2)])
    report2 = json.loads(out2.read_text())
    assert report2["R"] == 10  # flag wins


def test_csv_sample_output(tmp_path):
    out = tmp_path / "d.csv"
    run(["degree", "--dist", "uniform:0,1", "--theta", "1", "--n", "50",
         "--R", "20", "--seed", "1", "--format", "csv", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == "value"
    assert len(lines) == 21


def test_limits_other_tables(tmp_path):
    out = tmp_path / "cdf.csv"
    run(["limits", "--dist", "uniform:0,1", "--theta", "1", "--table", "limit-cdf",
         "--grid", "21", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == "t,cdf" and len(lines) == 22
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert vals == sorted(vals) and vals[-1] == 1.0

    out = tmp_path / "h1.csv"
    run(["limits", "--dist", "uniform:0,1", "--theta", "1", "--table", "h1",
         "--grid", "16", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == "x,h1" and len(lines) == 17

    out = tmp_path / "summary.json"
    run(["limits", "--dist", "uniform:0,1", "--theta", "1", "--table", "summary",
         "--out", str(out)])
    summary = json.loads(out.read_text())
    assert summary["edge_probability"] == pytest.approx(0.5, abs=1e-9)
    assert summary["triangle_kernel_variance"] == pytest.approx(1 / 30, abs=1e-6)
    assert summary["split_support"] is True


def test_clt_check_command(tmp_path):
    out = tmp_path / "c.json"
    code = run(["clt-check", "--dist", "point:0.5", "--theta", "-1", "--d", "2",
                "--beta", "2", "--lambda", "1", "--r", "100", "--Cr", "5000",
                "--R", "300", "--seed", "6", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["gof"]["name"] == "ks_vs_standard_normal"
    assert report["gof"]["stat"] < 0.1
