import os
import subprocess
import sys

import numpy as np
import pytest

from discbench.bench import read_records
from discbench.cli import main
from discbench.data import FeatureDataset, read_feature_file, write_feature_file
from discbench.synthetic import make_gaussian_dataset


@pytest.fixture()
def feature_files(tmp_path):
    rng = np.random.default_rng(0)
    means = rng.normal(scale=3.0, size=(3, 6))
    train = make_gaussian_dataset(3, 30, 6, means=means, seed=0)
    test = make_gaussian_dataset(3, 25, 6, means=means, seed=1)
    train_path = tmp_path / "train.fzf"
    test_path = tmp_path / "test.fzf"
    write_feature_file(train, train_path)
    write_feature_file(test, test_path)
    return str(train_path), str(test_path)


def run_cli(*argv):
    return main(list(argv))


def test_help_exits_zero_and_documents_defaults(capsys):
    with pytest.raises(SystemExit) as info:
        run_cli("run", "--help")
    assert info.value.code == 0
    text = capsys.readouterr().out
    assert "results.csv" in text
    assert "default: 7" in text  # lfda neighbors
    assert "full,pca,lda" in text


def test_run_writes_expected_rows(feature_files, tmp_path, capsys):
    train, test = feature_files
    out = str(tmp_path / "out.csv")
    code = run_cli(
        "run", "--train", train, "--test", test,
        "--methods", "full,lda", "--seeds", "0,1", "--out", out,
        "--no-timing",
    )
    assert code == 0
    records = read_records(out)
    assert len(records) == 4
    assert {r.method for r in records} == {"full", "lda"}
    assert {r.seed for r in records} == {0, 1}
    assert all(r.status == "ok" for r in records)
    assert all(r.total_seconds == 0.0 for r in records)
    stdout = capsys.readouterr().out
    assert "method" in stdout and "lda" in stdout


def test_unknown_method_exit_1_lists_valid(feature_files, tmp_path, capsys):
    train, test = feature_files
    code = run_cli(
        "run", "--train", train, "--test", test,
        "--methods", "full,umap", "--out", str(tmp_path / "o.csv"),
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "umap" in err
    assert "dsb" in err  # the valid roster is listed


def test_missing_train_flag_exit_1(capsys):
    assert run_cli("run", "--test", "x.fzf") == 1
    assert "required" in capsys.readouterr().err


def test_train_test_shape_mismatch_exit_1(feature_files, tmp_path, capsys):
    train, _ = feature_files
    other = make_gaussian_dataset(3, 20, 9, seed=2)
    other_path = tmp_path / "other.fzf"
    write_feature_file(other, other_path)
    code = run_cli("run", "--train", train, "--test", str(other_path))
    assert code == 1
    assert "disagree" in capsys.readouterr().err


def test_config_file_with_flag_precedence(feature_files, tmp_path):
    train, test = feature_files
    out = tmp_path / "cfg.csv"
    config = tmp_path / "bench.cfg"
    config.write_text(
        f"train = {train}\n"
        f"test = {test}\n"
        "methods = lda  # flag overrides this below\n"
        "seeds = 0\n"
        f"out = {out}\n"
        "timing = off\n"
    )
    code = run_cli("run", "--config", str(config))
    assert code == 0
    assert [r.method for r in read_records(out)] == ["lda"]

    code = run_cli("run", "--config", str(config), "--methods", "pca")
    assert code == 0
    assert [r.method for r in read_records(out)][-1] == "pca"


def test_no_timing_runs_are_byte_identical(feature_files, tmp_path):
    train, test = feature_files
    paths = [str(tmp_path / f"r{i}.csv") for i in (0, 1)]
    for path in paths:
        code = run_cli(
            "run", "--train", train, "--test", test,
            "--methods", "lda,pca", "--seeds", "0,1,2",
            "--out", path, "--no-timing",
        )
        assert code == 0
    with open(paths[0], "rb") as a, open(paths[1], "rb") as b:
        assert a.read() == b.read()


def test_default_out_is_results_csv_appending(feature_files, tmp_path, monkeypatch):
    train, test = feature_files
    monkeypatch.chdir(tmp_path)
    for _ in range(2):
        code = run_cli(
            "run", "--train", train, "--test", test,
            "--methods", "full", "--seeds", "0", "--no-timing",
        )
        assert code == 0
    records = read_records(tmp_path / "results.csv")
    assert len(records) == 2  # appended, one header


def test_exit_2_when_a_trial_fails(feature_files, tmp_path):
    train, test = feature_files
    out = str(tmp_path / "fail.csv")
    code = run_cli(
        "run", "--train", train, "--test", test,
        "--methods", "lda", "--seeds", "0", "--out-dim", "50",
        "--out", out, "--no-timing",
    )
    assert code == 2
    records = read_records(out)
    assert records[0].status == "error:fit"


def test_sweep_dims_requires_dims(feature_files, capsys):
    train, test = feature_files
    code = run_cli("sweep-dims", "--train", train, "--test", test)
    assert code == 1
    assert "dims" in capsys.readouterr().err


def test_sweep_dims_rows(feature_files, tmp_path):
    train, test = feature_files
    out = str(tmp_path / "dims.csv")
    code = run_cli(
        "sweep-dims", "--train", train, "--test", test,
        "--methods", "pca", "--dims", "1,2", "--seeds", "0",
        "--out", out, "--no-timing",
    )
    assert code == 0
    records = read_records(out)
    assert [r.out_dim for r in records] == [1, 2]


def test_sweep_fraction_rows(feature_files, tmp_path):
    train, test = feature_files
    out = str(tmp_path / "frac.csv")
    code = run_cli(
        "sweep-fraction", "--train", train, "--test", test,
        "--methods", "lda", "--fractions", "0.5,1.0", "--repeats", "1",
        "--seeds", "0", "--out", out, "--no-timing",
    )
    assert code == 0
    records = read_records(out)
    assert [r.fraction for r in records] == [0.5, 1.0]


def test_significance_command(feature_files, tmp_path, capsys):
    train, test = feature_files
    out = str(tmp_path / "sig_in.csv")
    assert run_cli(
        "run", "--train", train, "--test", test,
        "--methods", "lda,pca,full", "--seeds", "0,1,2",
        "--out", out, "--no-timing",
    ) == 0
    capsys.readouterr()
    report = str(tmp_path / "report.csv")
    code = run_cli("significance", "--results", out, "--out", report)
    assert code == 0
    stdout = capsys.readouterr().out
    assert "wilcoxon" in stdout
    lines = open(report).read().splitlines()
    assert lines[0].startswith("method,baseline")
    assert len(lines) == 3  # pca and full vs lda


def test_significance_missing_baseline_exit_1(tmp_path, capsys):
    out = str(tmp_path / "nolda.csv")
    from discbench.bench import write_records
    from test_bench import record

    write_records(out, [record("pca", seed=s) for s in range(3)])
    code = run_cli("significance", "--results", out)
    assert code == 1
    assert "baseline" in capsys.readouterr().err


def test_pareto_command(feature_files, tmp_path, capsys):
    train, test = feature_files
    out = str(tmp_path / "pareto_in.csv")
    assert run_cli(
        "run", "--train", train, "--test", test,
        "--methods", "lda,full", "--seeds", "0",
        "--out", out,
    ) == 0
    capsys.readouterr()
    code = run_cli("pareto", "--results", out)
    assert code == 0
    stdout = capsys.readouterr().out
    assert "pareto" in stdout
    assert "yes" in stdout


def test_missing_results_file_exit_1(tmp_path, capsys):
    code = run_cli("pareto", "--results", str(tmp_path / "absent.csv"))
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_invalid_threads_env_exit_1(monkeypatch, capsys):
    monkeypatch.setenv("DISCBENCH_THREADS", "many")
    assert main(["pareto", "--results", "x.csv"]) == 1
    assert "DISCBENCH_THREADS" in capsys.readouterr().err


def test_threads_env_caps_blas_pools_at_import():
    env = dict(os.environ)
    env["DISCBENCH_THREADS"] = "2"
    env.pop("OMP_NUM_THREADS", None)
    script = (
        "import discbench.cli, os; "
        "print(os.environ['OMP_NUM_THREADS'], os.environ['MKL_NUM_THREADS'])"
    )
    proc = subprocess.run(
        [sys.executable, "-c", script],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.split() == ["2", "2"]


def test_synthetic_feature_script_writes_valid_files(tmp_path):
    script = os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "scripts",
        "make_synthetic_features.py",
    )
    proc = subprocess.run(
        [
            sys.executable, script,
            "--out-dir", str(tmp_path),
            "--classes", "3", "--dim", "8", "--nuisance-dims", "2",
            "--per-class", "5", "--test-per-class", "4",
        ],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    train = read_feature_file(tmp_path / "train.fzf")
    test = read_feature_file(tmp_path / "test.fzf")
    assert train.n_samples == 15 and train.n_features == 8
    assert test.n_samples == 12 and test.num_classes == 3
