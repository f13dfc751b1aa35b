import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pedcc.cli import main
from pedcc.io import read_point_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    doc = json.loads(out)
    assert set(doc) == {"command", "params", "results"}
    assert doc["params"]["rng"] == "numpy-PCG64"
    return code, doc, err


def floats_in_text(out):
    vals = {}
    for line in out.splitlines():
        for token in line.split():
            if "=" in token:
                key, val = token.split("=", 1)
                try:
                    vals[key] = float(val)
                except ValueError:
                    pass
    return vals


@pytest.fixture
def analytic10(tmp_path, capsys):
    path = tmp_path / "a10.txt"
    assert run(capsys, "generate", "--k", "10", "--n", "1000", "--seed", "1",
               "--method", "analytic", "--out", str(path))[0] == 0
    return path


def test_generate_analytic(analytic10, capsys):
    s = read_point_set(analytic10)
    assert s.points.shape == (10, 1000)
    assert s.max_cosine_deviation() <= 1e-10


def test_generate_summary_line(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", "--k", "10", "--n", "1000", "--seed", "1",
                       "--out", str(tmp_path / "x.txt"))
    assert code == 0
    assert floats_in_text(out)["max_cosine_deviation"] <= 1e-10


def test_generate_k_too_large(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "--k", "5", "--n", "3", "--method", "analytic",
                       "--out", str(tmp_path / "x.txt"))
    assert code == 2
    assert "k" in err
    assert not (tmp_path / "x.txt").exists()


def test_generate_no_rotate_k2(tmp_path, capsys):
    path = tmp_path / "k2.txt"
    assert run(capsys, "generate", "--k", "2", "--n", "4", "--seed", "0", "--no-rotate",
               "--out", str(path))[0] == 0
    np.testing.assert_array_equal(read_point_set(path).points, [[0, 0, 0, -1], [0, 0, 0, 1]])


def test_generate_bad_charge_flags(tmp_path, capsys):
    code, _, _ = run(capsys, "generate", "--k", "4", "--n", "3", "--method", "iterative",
                     "--damping", "1.5", "--out", str(tmp_path / "x.txt"))
    assert code == 2


def test_generate_unwritable_path(tmp_path, capsys):
    code, _, _ = run(capsys, "generate", "--k", "3", "--n", "3",
                     "--out", str(tmp_path / "missing" / "x.txt"))
    assert code == 2


def test_verify_analytic(analytic10, capsys):
    code, doc, _ = run_json(capsys, "verify", "--in", str(analytic10))
    assert code == 0
    assert doc["results"]["pass"] is True
    assert doc["results"]["max_pairwise_cosine_deviation"] <= 1e-10


def test_verify_iterative_is_diagnostic(tmp_path, capsys):
    path = tmp_path / "it.txt"
    assert run(capsys, "generate", "--k", "10", "--n", "1000", "--method", "iterative",
               "--out", str(path))[0] == 0
    code, doc, _ = run_json(capsys, "verify", "--in", str(path))
    assert code == 1
    assert doc["results"]["max_pairwise_cosine_deviation"] > 1e-8


def test_verify_truncated(analytic10, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(analytic10.read_text().splitlines()[:5]) + "\n")
    code, _, err = run(capsys, "verify", "--in", str(bad))
    assert code == 2
    assert "k=10" in err


def test_verify_missing_file(tmp_path, capsys):
    assert run(capsys, "verify", "--in", str(tmp_path / "nope.txt"))[0] == 2


def test_verify_beyond_simplex(tmp_path, capsys):
    path = tmp_path / "over.txt"
    assert run(capsys, "generate", "--k", "6", "--n", "3", "--method", "iterative",
               "--max-iters", "50", "--out", str(path))[0] == 0
    code, doc, _ = run_json(capsys, "verify", "--in", str(path))
    assert code == 1
    assert doc["results"]["relative_error"] is None


def test_distances_analytic(analytic10, capsys):
    code, out, _ = run(capsys, "distances", "--in", str(analytic10))
    assert code == 0
    lines = out.splitlines()[1:]
    entries = [c for i, ln in enumerate(lines) for c in ln.split("|")[1].split()[i + 1:]]
    assert len(entries) == 45 and set(entries) == {"-0.11"}
    _, out4, _ = run(capsys, "distances", "--in", str(analytic10), "--dp", "4")
    assert "-0.1111" in out4 and "-0.1112" not in out4


def test_distances_antipodal(tmp_path, capsys):
    path = tmp_path / "k2.txt"
    run(capsys, "generate", "--k", "2", "--n", "4", "--out", str(path))
    code, out, _ = run(capsys, "distances", "--in", str(path))
    assert code == 0
    assert out.split().count("-1.00") == 1


def test_distances_json(analytic10, capsys):
    code, doc, _ = run_json(capsys, "distances", "--in", str(analytic10), "--dp", "4")
    t = np.array(doc["results"]["table"])
    iu = np.triu_indices(10, 1)
    np.testing.assert_allclose(t[iu], -1 / 9, atol=1e-10)
    assert set(np.array(doc["results"]["rounded"])[iu]) == {-0.1111}


@pytest.mark.parametrize("ks,dims", [("50,100,150,200", "300"), ("100", "200,300,400,500")])
def test_bench_grid_shapes(capsys, ks, dims):
    code, doc, _ = run_json(capsys, "bench", "--ks", ks, "--dims", dims, "--iters", "3")
    assert code == 0
    assert len(doc["results"]) == 8
    assert all(r["speedup"] > 0 for r in doc["results"])
    assert {r["method"] for r in doc["results"]} == {"analytic", "iterative"}


def test_bench_text(capsys):
    code, out, _ = run(capsys, "bench", "--ks", "3", "--dims", "5", "--iters", "5")
    assert code == 0
    assert "speedup" in out and out.strip().endswith("x")


def test_bench_bad_list(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--ks", "a,b", "--dims", "5"])
    assert exc.value.code == 2


def test_train_toy_default(capsys):
    code, doc, _ = run_json(capsys, "train-toy")
    assert code == 0
    (rep,) = doc["results"]
    assert rep["mean_subspace_angle_deg"] <= 5.0
    assert rep["final_test_accuracy"] >= 0.95


def test_train_toy_epochs_zero(capsys):
    code, doc, _ = run_json(capsys, "train-toy", "--epochs", "0")
    assert code == 0
    assert abs(doc["results"][0]["final_test_accuracy"] - 1 / 3) <= 0.15


def test_train_toy_dim_sweep(capsys):
    code, out, err = run(capsys, "train-toy", "--dim-sweep", "2,9,64", "--k", "10",
                         "--epochs", "5", "--per-class", "20")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert [int(r.split()[0]) for r in rows] == [2, 9, 64]
    assert "warning" in err and "feature_dim=2" in err


def test_train_toy_nonfinite(capsys):
    code, _, err = run(capsys, "train-toy", "--lr", "1e308", "--epochs", "2")
    assert code == 3
    assert "non-finite" in err


def test_train_toy_invalid(capsys):
    assert run(capsys, "train-toy", "--k", "1")[0] == 2
    assert run(capsys, "train-toy", "--dim-sweep", "1,4")[0] == 2


def test_json_matches_text_generate_verify(analytic10, tmp_path, capsys):
    _, out, _ = run(capsys, "verify", "--in", str(analytic10))
    _, doc, _ = run_json(capsys, "verify", "--in", str(analytic10))
    text = floats_in_text(out)
    for key in ("max_pairwise_cosine_deviation", "centroid_sum_norm", "frame_sum",
                "predicted", "relative_error"):
        assert abs(text[key] - doc["results"][key]) <= 1e-12


def test_json_matches_text_train(capsys):
    argv = ("train-toy", "--epochs", "3")
    _, out, _ = run(capsys, *argv)
    _, doc, _ = run_json(capsys, *argv)
    text = floats_in_text(out)
    rep = doc["results"][0]
    for key in ("final_train_accuracy", "final_test_accuracy", "mean_subspace_angle_deg",
                "initial_subspace_angle_deg", "loss_first", "loss_last"):
        assert math.isclose(text[key], rep[key], abs_tol=1e-12)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pedcc", "generate", "--k", "3", "--n", "2",
         "--out", str(tmp_path / "t.txt")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "k=3 n=2" in proc.stdout
