import json

import numpy as np
import pytest

from latnet.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


# -- describe ---------------------------------------------------------------

def test_describe_zachary(tmp_path, capsys):
    rc, out, _ = run(capsys, "describe", "--input", "zachary",
                     "--output-dir", str(tmp_path))
    assert rc == 0
    assert "density,0.139" in out
    assert "transitivity,0.256" in out
    assert "assortativity,-0.476" in out
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert abs(stats["density"] - 0.139) < 0.0005
    assert (tmp_path / "stats.csv").exists()


def test_describe_missing_file(tmp_path, capsys):
    rc, _, err = run(capsys, "describe", "--input", "no/such/file.txt",
                     "--output-dir", str(tmp_path))
    assert rc == 2
    assert "not found" in err


def test_describe_edgeless_graph(tmp_path, capsys):
    src = tmp_path / "empty.txt"
    src.write_text("# nodes: 4\n")
    rc, out, _ = run(capsys, "describe", "--input", str(src),
                     "--output-dir", str(tmp_path))
    assert rc == 0
    assert "density,0.000" in out


# -- fit --------------------------------------------------------------------

def test_fit_writes_samples_and_rhat(tmp_path, capsys):
    rc, out, _ = run(capsys, "fit", "--input", "florentine",
                     "--model", "distance", "--k", "2",
                     "--iters", "200", "--burn-in", "50", "--chains", "2",
                     "--output-dir", str(tmp_path))
    assert rc == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["model"] == "distance"
    assert manifest["config"]["n_iter"] == 200
    assert "rhat" in manifest
    assert (tmp_path / "rhat.csv").exists()
    assert (tmp_path / "interaction_probs.csv").exists()
    assert (tmp_path / "positions_mean.csv").exists()
    assert "in_sample_auc," in out


def test_fit_class_exports_partition(tmp_path, capsys):
    rc, _, _ = run(capsys, "fit", "--input", "florentine",
                   "--model", "class", "--k", "3",
                   "--iters", "200", "--burn-in", "50",
                   "--output-dir", str(tmp_path))
    assert rc == 0
    assert (tmp_path / "co_membership.csv").exists()
    lines = (tmp_path / "partition.csv").read_text().splitlines()
    assert lines[0] == "actor,cluster"
    assert len(lines) == 16  # header + 15 actors


def test_fit_eigen_exports_lambda(tmp_path, capsys):
    rc, _, _ = run(capsys, "fit", "--input", "florentine",
                   "--model", "eigen", "--k", "2",
                   "--iters", "200", "--burn-in", "50",
                   "--output-dir", str(tmp_path))
    assert rc == 0
    lines = (tmp_path / "lambda_summary.csv").read_text().splitlines()
    assert len(lines) == 3  # header + 2 components


def test_fit_rejects_k_zero(tmp_path, capsys):
    rc, _, err = run(capsys, "fit", "--input", "florentine",
                     "--model", "distance", "--k", "0",
                     "--output-dir", str(tmp_path))
    assert rc == 2


def test_fit_seed_reproducible(tmp_path, capsys):
    args = ("fit", "--input", "florentine", "--model", "distance", "--k", "2",
            "--iters", "120", "--burn-in", "20", "--seed", "7")
    run(capsys, *args, "--output-dir", str(tmp_path / "a"))
    run(capsys, *args, "--output-dir", str(tmp_path / "b"))
    a = (tmp_path / "a" / "samples_chain0.csv").read_bytes()
    b = (tmp_path / "b" / "samples_chain0.csv").read_bytes()
    assert a == b


# -- config file ------------------------------------------------------------

def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": "florentine", "model": "eigen",
                               "k": 2, "n_iter": 100, "burn_in": 20}))
    rc, _, _ = run(capsys, "fit", "--config", str(cfg), "--model", "distance",
                   "--output-dir", str(tmp_path / "out"))
    assert rc == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["model"] == "distance"  # flag beat the config value
    assert manifest["config"]["n_iter"] == 100  # config beat the default


def test_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    rc, _, err = run(capsys, "fit", "--config", str(cfg),
                     "--output-dir", str(tmp_path))
    assert rc == 2


def test_missing_input_is_config_error(tmp_path, capsys):
    rc, _, err = run(capsys, "fit", "--model", "distance",
                     "--output-dir", str(tmp_path))
    assert rc == 2
    assert "input" in err


def test_outdir_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LATNET_OUTDIR", str(tmp_path / "envout"))
    rc, _, _ = run(capsys, "describe", "--input", "zachary")
    assert rc == 0
    assert (tmp_path / "envout" / "stats.json").exists()


# -- cv ---------------------------------------------------------------------

def test_cv_output_and_determinism(tmp_path, capsys):
    args = ("cv", "--input", "florentine", "--model", "distance", "--k", "2",
            "--iters", "200", "--burn-in", "50", "--chains", "1",
            "--n-folds", "3", "--seed", "4")
    rc, out1, _ = run(capsys, *args, "--output-dir", str(tmp_path / "a"))
    rc2, out2, _ = run(capsys, *args, "--output-dir", str(tmp_path / "b"))
    assert rc == rc2 == 0
    assert out1 == out2
    data = json.loads((tmp_path / "a" / "cv.json").read_text())
    assert len(data["auc_per_fold"]) == 3
    assert "auc_mean," in out1


def test_cv_rejects_single_fold(tmp_path, capsys):
    rc, _, err = run(capsys, "cv", "--input", "florentine", "--n-folds", "1",
                     "--output-dir", str(tmp_path))
    assert rc == 2
    assert "n_folds" in err


# -- gof --------------------------------------------------------------------

def test_gof_from_saved_samples(tmp_path, capsys):
    fitdir = tmp_path / "fit"
    run(capsys, "fit", "--input", "florentine", "--model", "eigen", "--k", "2",
        "--iters", "300", "--burn-in", "100", "--output-dir", str(fitdir))
    rc, out, _ = run(capsys, "gof", "--input", "florentine",
                     "--samples-dir", str(fitdir),
                     "--output-dir", str(tmp_path / "gof"))
    assert rc == 0
    assert "waic," in out and "dic," in out
    rep = json.loads((tmp_path / "gof" / "report.json").read_text())
    assert np.isfinite(rep["waic"])
    ppc = (tmp_path / "gof" / "ppc.csv").read_text().splitlines()
    assert ppc[0] == "stat,observed,mean,q025,q975,q005,q995"
    assert len(ppc) == 4  # exactly the three default statistics


def test_gof_requires_samples_or_refit(tmp_path, capsys):
    rc, _, err = run(capsys, "gof", "--input", "florentine",
                     "--output-dir", str(tmp_path))
    assert rc == 2
    assert "refit" in err


def test_gof_refit(tmp_path, capsys):
    rc, out, _ = run(capsys, "gof", "--input", "florentine", "--refit",
                     "--model", "distance", "--k", "2", "--iters", "200",
                     "--burn-in", "50", "--output-dir", str(tmp_path))
    assert rc == 0
    assert "waic," in out


# -- compare ----------------------------------------------------------------

def test_compare_single_cell(tmp_path, capsys):
    rc, out, _ = run(capsys, "compare", "--input", "florentine",
                     "--models", "distance", "--k-list", "2",
                     "--iters", "200", "--burn-in", "50",
                     "--output-dir", str(tmp_path))
    assert rc == 0
    rows = (tmp_path / "comparison.csv").read_text().splitlines()
    assert len(rows) == 2  # header + one cell
    assert "best,distance" in out


def test_compare_tie_breaks_to_smaller_k(tmp_path, capsys, monkeypatch):
    # force identical WAIC for every fit: smaller K must win
    import latnet.cli as cli_mod

    class FakeReport:
        waic = 100.0

    monkeypatch.setattr(cli_mod, "information_criteria",
                        lambda s, n: FakeReport())
    rc, out, _ = run(capsys, "compare", "--input", "florentine",
                     "--models", "distance", "--k-list", "4,2",
                     "--iters", "60", "--burn-in", "10",
                     "--output-dir", str(tmp_path))
    assert rc == 0
    assert "best,distance,K=2" in out
