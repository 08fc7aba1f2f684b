"""End-to-end checks of the command-line interface.

Each test drives ``phaserec.cli.main`` with a tiny config in a temp
directory and inspects exit codes, CSV tables, and the manifest.
"""

import json

import numpy as np
import pytest

from phaserec.cli import (
    DEFAULT_SEED,
    LEVEL_LINE_HEADER,
    PEIERLS_HEADER,
    RECONSTRUCT_HEADER,
    SAMPLE_HEADER,
    SINE_GORDON_HEADER,
    SWEEP_HEADER,
    VERIFY_DETAILS_HEADER,
    VERIFY_HEADER,
    main,
)
from phaserec.experiments import read_csv, validate_manifest


def run_cli(tmp_path, command, cfg_text, *extra, name="run"):
    cfg = tmp_path / f"{name}.cfg"
    cfg.write_text(cfg_text)
    out = tmp_path / name
    code = main(
        [command, "--config", str(cfg), "--out", str(out), *extra]
    )
    return code, out


def load_manifest(out):
    manifest = json.loads((out / "manifest.json").read_text())
    validate_manifest(manifest)
    return manifest


def test_sample_smoke(tmp_path):
    code, out = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 5\n", "--seed", "7"
    )
    assert code == 0
    header, rows = read_csv(out / "samples.csv", SAMPLE_HEADER)
    assert header == SAMPLE_HEADER
    assert len(rows) == 5
    assert [r[0] for r in rows] == ["0", "1", "2", "3", "4"]
    manifest = load_manifest(out)
    assert manifest["command"] == "sample"
    assert manifest["seed"] == 7
    assert manifest["outputs"] == ["samples.csv"]
    assert manifest["diagnostics"]["green_center"] > 0


def test_sample_deterministic_across_runs_and_threads(tmp_path):
    cfg = "n = 3\nn_samples = 12\nseed = 11\n"
    blobs = []
    for i, threads in enumerate(["1", "1", "4"]):
        _, out = run_cli(
            tmp_path, "sample", cfg, "--threads", threads, name=f"r{i}"
        )
        blobs.append((out / "samples.csv").read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]


def test_sample_different_seeds_differ(tmp_path):
    _, out1 = run_cli(tmp_path, "sample", "n = 2\nn_samples = 3\n", "--seed", "1", name="a")
    _, out2 = run_cli(tmp_path, "sample", "n = 2\nn_samples = 3\n", "--seed", "2", name="b")
    assert (out1 / "samples.csv").read_bytes() != (out2 / "samples.csv").read_bytes()


def test_reconstruct_exact_in_frozen_regime(tmp_path):
    code, out = run_cli(
        tmp_path,
        "reconstruct",
        "n = 2\nT = 0.25\nburn_in = 40\nthinning = 2\nn_samples = 20\n",
        "--seed",
        "3",
    )
    assert code == 0
    header, rows = read_csv(out / "field.csv", RECONSTRUCT_HEADER)
    assert len(rows) == 25
    manifest = load_manifest(out)
    assert manifest["diagnostics"]["converged"] is True
    assert manifest["diagnostics"]["rmse_interior"] < 1e-8
    # per-row |recon - truth| agrees with the abs_error column
    for r in rows:
        assert abs(float(r[5]) - float(r[3])) == pytest.approx(float(r[7]))


def test_reconstruct_nonconverged_still_exits_zero(tmp_path):
    code, out = run_cli(
        tmp_path,
        "reconstruct",
        "n = 2\nT = 30\nburn_in = 2\nthinning = 1\nn_samples = 4\n",
        "--seed",
        "5",
    )
    assert code == 0
    manifest = load_manifest(out)
    assert manifest["diagnostics"]["converged"] in (True, False)


def test_sweep_columns_and_frozen_ratio(tmp_path):
    code, out = run_cli(
        tmp_path,
        "sweep",
        "Ts = 0.25\nns = 2\nn_disorder = 3\nn_pairs = 1\nsweeps = 15\ninit2 = ground\n",
        "--seed",
        "9",
    )
    assert code == 0
    header, rows = read_csv(out / "sweep.csv", SWEEP_HEADER)
    assert header[:5] == ["T", "n", "ratio", "stderr", "rhat"]
    assert len(rows) == 1
    # frozen regime: coupled lifts agree exactly, the ratio is exactly 0
    assert float(rows[0][2]) == 0.0
    assert float(rows[0][3]) == 0.0


def test_peierls_frozen_survival_all_zero(tmp_path):
    code, out = run_cli(
        tmp_path,
        "peierls",
        "T = 0.25\nn = 4\nn_samples = 10\nsweeps = 10\ninit2 = ground\nL_max = 6\n",
        "--seed",
        "13",
    )
    assert code == 0
    header, rows = read_csv(out / "peierls.csv", PEIERLS_HEADER)
    assert len(rows) == 6
    assert all(float(r[1]) == 0.0 for r in rows)
    manifest = load_manifest(out)
    assert manifest["diagnostics"]["n_nonempty"] == 0
    assert manifest["diagnostics"]["rule_margin"] == "inf"


def test_theta_check_passes_and_writes_tables(tmp_path, capsys):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("")
    out = tmp_path / "theta"
    code = main(["theta-check", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr().out
    assert "primal-dual" in captured
    _, jrows = read_csv(out / "jacobi_grid.csv", None)
    assert {r[0] for r in jrows} == {"primal-dual", "jacobi"}
    _, rrows = read_csv(out / "riemann_instances.csv", None)
    assert len(rrows) == 3
    manifest = load_manifest(out)
    assert manifest["diagnostics"]["max_jacobi_gap"] < 1e-10


def test_sine_gordon_free_field_reduction(tmp_path):
    code, out = run_cli(
        tmp_path,
        "sine-gordon",
        "beta = 0.5\nz = 0\nns = 3\nn_disorder = 4\nburn_in = 0\nthinning = 2\nn_samples = 30\n",
        "--seed",
        "17",
    )
    assert code == 0
    header, rows = read_csv(out / "sine_gordon.csv", SINE_GORDON_HEADER)
    assert len(rows) == 1
    assert rows[0][0] == "3"
    assert float(rows[0][1]) > 0


def test_level_line_frozen_exact(tmp_path):
    code, out = run_cli(
        tmp_path,
        "level-line",
        "T = 0.25\nn = 2\nn_reps = 2\nburn_in = 40\nthinning = 2\nn_samples = 20\n",
        "--seed",
        "19",
    )
    assert code == 0
    header, rows = read_csv(out / "level_lines.csv", LEVEL_LINE_HEADER)
    kinds = {r[1] for r in rows}
    assert kinds == {"true", "recon"}
    manifest = load_manifest(out)
    assert manifest["diagnostics"]["mean_hausdorff"] == 0.0
    assert manifest["diagnostics"]["all_converged"] is True


def test_level_line_rejects_ambiguous_period(tmp_path):
    code, _ = run_cli(
        tmp_path,
        "level-line",
        "T = 30\nn = 2\nn_reps = 1\nlam = 1.0\n",
        "--seed",
        "21",
    )
    assert code == 2


def test_verify_quick(tmp_path, capsys):
    cfg = tmp_path / "v.cfg"
    cfg.write_text("")
    out = tmp_path / "verify"
    code = main(
        ["verify", "--config", str(cfg), "--out", str(out), "--quick", "--seed", "2026"]
    )
    assert code == 0
    captured = capsys.readouterr().out
    header, rows = read_csv(out / "verify.csv", VERIFY_HEADER)
    assert len(rows) == 12
    statuses = {int(r[0]): r[2] for r in rows}
    for number in (1, 2, 3, 5, 9, 12):
        assert statuses[number] == "pass"
        assert f"criterion {number:2d}" in captured
    for number in (4, 6, 7, 8, 10, 11):
        assert statuses[number] == "skipped"
    _, details = read_csv(out / "verify_details.csv", VERIFY_DETAILS_HEADER)
    assert all(r[4] in ("pass", "fail", "info") for r in details)
    assert not any(r[4] == "fail" for r in details)


def test_verify_quick_deterministic(tmp_path):
    cfg = tmp_path / "v.cfg"
    cfg.write_text("")
    blobs = []
    for i in range(2):
        out = tmp_path / f"verify{i}"
        code = main(
            ["verify", "--config", str(cfg), "--out", str(out), "--quick"]
        )
        assert code == 0
        blobs.append(
            (out / "verify.csv").read_bytes()
            + (out / "verify_details.csv").read_bytes()
        )
    assert blobs[0] == blobs[1]


def test_verify_uses_default_seed(tmp_path):
    out = tmp_path / "verify"
    code = main(["verify", "--out", str(out), "--quick"])
    assert code == 0
    manifest = load_manifest(out)
    assert manifest["seed"] == DEFAULT_SEED


def test_missing_seed_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n = 2\nn_samples = 3\n")
    code = main(["sample", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_seed_flag_overrides_config_key(tmp_path):
    _, out_flag = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 3\nseed = 1\n", "--seed", "2", name="f"
    )
    _, out_two = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 3\nseed = 2\n", name="g"
    )
    assert (out_flag / "samples.csv").read_bytes() == (out_two / "samples.csv").read_bytes()
    assert load_manifest(out_flag)["seed"] == 2


def test_negative_seed_rejected(tmp_path, capsys):
    code, _ = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 3\n", "--seed", "-4"
    )
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_unknown_config_key_rejected(tmp_path, capsys):
    code, _ = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 3\nbogus = 1\n", "--seed", "1"
    )
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_malformed_config_rejected(tmp_path, capsys):
    code, _ = run_cli(
        tmp_path, "sample", "n == 2\n", "--seed", "1"
    )
    assert code == 2


def test_bad_value_type_rejected(tmp_path, capsys):
    code, _ = run_cli(
        tmp_path, "sample", "n = 2.5\nn_samples = 3\n", "--seed", "1"
    )
    assert code == 2
    assert "n" in capsys.readouterr().err


def test_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--bogus"])
    assert exc.value.code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_env_var_thread_override(tmp_path, monkeypatch):
    monkeypatch.setenv("PHASEREC_THREADS", "3")
    _, out = run_cli(tmp_path, "sample", "n = 2\nn_samples = 4\n", "--seed", "1")
    assert load_manifest(out)["threads"] == 3


def test_threads_flag_beats_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("PHASEREC_THREADS", "3")
    _, out = run_cli(
        tmp_path, "sample", "n = 2\nn_samples = 4\n", "--seed", "1", "--threads", "2"
    )
    assert load_manifest(out)["threads"] == 2


def test_manifest_hash_matches_config(tmp_path):
    from phaserec.experiments import config_hash

    cfg_text = "n = 2\nn_samples = 3\n"
    _, out = run_cli(tmp_path, "sample", cfg_text, "--seed", "1")
    manifest = load_manifest(out)
    assert manifest["config_hash"] == config_hash(
        {"n": "2", "n_samples": "3"}
    )


def test_task_seed_column_traceable(tmp_path):
    from phaserec.experiments import task_seed

    _, out = run_cli(tmp_path, "sample", "n = 2\nn_samples = 3\n", "--seed", "41")
    _, rows = read_csv(out / "samples.csv", SAMPLE_HEADER)
    for i, r in enumerate(rows):
        assert int(r[-1]) == task_seed(41, i)
