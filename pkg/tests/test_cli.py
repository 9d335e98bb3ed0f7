import json

import numpy as np
import pytest

from mmisomap import cli, synth

from properties import as_test, prop_cli_deterministic

test_cli_deterministic = as_test(prop_cli_deterministic, examples=20)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def strips(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "z.csv"
    P = synth.gen_two_strips(1200, 0)
    synth.save_csv(path, P.coords, P.labels)
    return path


def test_generate(capsys, tmp_path):
    out = tmp_path / "z.csv"
    code, text, _ = run(capsys, "generate", "three-strips", "--n", 1600, "--seed", 7,
                        "--out", out)
    assert code == 0
    assert "n=1600" in text and "dim=3" in text and "M=3" in text
    P = synth.load_csv(out)
    assert P.coords.shape == (1600, 3) and P.n_labels == 3


def test_generate_deterministic(capsys, tmp_path):
    for name in ("a.csv", "b.csv"):
        run(capsys, "generate", "three-strips", "--n", 1600, "--seed", 7,
            "--out", tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_generate_bad_size(capsys, tmp_path):
    code, _, err = run(capsys, "generate", "three-strips", "--n", 1601, "--out",
                       tmp_path / "z.csv")
    assert code == 2 and "divisible" in err


def test_generate_unwritable(capsys, tmp_path):
    code, _, _ = run(capsys, "generate", "two-strips", "--n", 10, "--out",
                     tmp_path / "missing" / "z.csv")
    assert code == 4


def test_embed_m_isomap_report(capsys, tmp_path, strips):
    out, rep, plots = tmp_path / "y.csv", tmp_path / "r.json", tmp_path / "plots"
    code, text, _ = run(capsys, "embed", "m-isomap", "--in", strips, "--k", 8, "--d", 2,
                        "--out", out, "--report", rep, "--plot-data", plots)
    assert code == 0 and "M=2" in text
    report = json.loads(rep.read_text(encoding="utf-8"))
    assert report["schema"] == 1
    assert report["M"] == 2 and report["manifold_sizes"] == [600, 600]
    assert report["k_used"] == 8 and report["per_manifold_k"] == [8, 8]
    assert report["inter_edges"] == {"1-2": 8}
    assert report["max_orthonormality_error"] < 1e-8
    assert isinstance(report["warnings"], list)
    assert {"kcc_graph", "manifold_isomap", "skeleton", "composition", "total"} <= \
        set(report["timings"])
    Y = synth.load_csv(out)
    assert Y.coords.shape == (1200, 2) and Y.n_labels == 2
    assert sorted(p.name for p in plots.iterdir()) == ["manifold_1.csv", "manifold_2.csv"]
    assert synth.load_csv(plots / "manifold_1.csv").coords.shape == (600, 2)


def test_embed_isomap_disconnected(capsys, tmp_path, strips):
    code, _, err = run(capsys, "embed", "isomap", "--in", strips, "--k", 8, "--d", 2,
                       "--out", tmp_path / "y.csv")
    assert code == 3 and "graph has 2 components" in err


def test_embed_dc_original_fails(capsys, tmp_path, strips):
    code, _, err = run(capsys, "embed", "dc", "--in", strips, "--k", 8, "--d", 2,
                       "--out", tmp_path / "y.csv")
    assert code == 3 and "insufficient clusters" in err


def test_embed_dc_revised_reports_fictitious(capsys, tmp_path, strips):
    rep = tmp_path / "r.json"
    code, _, _ = run(capsys, "embed", "dc-revised", "--in", strips, "--k", 8, "--d", 2,
                     "--out", tmp_path / "y.csv", "--report", rep, "--beta", 2)
    assert code == 0
    report = json.loads(rep.read_text(encoding="utf-8"))
    assert len(report["fictitious_clusters"]) == 1
    fc = report["fictitious_clusters"][0]
    assert fc["gamma"] == 1.0 and 0.5 < fc["ratio"] < 2
    cats = [w["category"] for w in report["warnings"]]
    assert "FictitiousClusterWarning" in cats


@pytest.mark.parametrize("method", ["pca", "mds", "kcc"])
def test_embed_simple_methods(capsys, tmp_path, strips, method):
    out = tmp_path / "y.csv"
    args = ["embed", method, "--in", strips, "--d", 2, "--out", out]
    if method == "kcc":
        args += ["--k", 8]
    code, _, _ = run(capsys, *args)
    assert code == 0
    P = synth.load_csv(out)
    assert P.coords.shape == (1200, 2)
    assert (P.labels is not None) == (method == "kcc")


def test_evaluate_procrustes_self(capsys, tmp_path, strips):
    out = tmp_path / "y.csv"
    run(capsys, "embed", "pca", "--in", strips, "--d", 2, "--out", out)
    result = tmp_path / "m.json"
    code, text, _ = run(capsys, "evaluate", out, "--reference", out, "--mode", "procrustes",
                        "--out", result)
    assert code == 0
    assert json.loads(text)["procrustes_residual"] == 0.0
    assert json.loads(result.read_text())["procrustes_residual"] == 0.0


def test_evaluate_preservation_of_mds(capsys, tmp_path):
    pts = tmp_path / "p.csv"
    synth.save_csv(pts, np.random.default_rng(0).standard_normal((40, 3)))
    out, dist = tmp_path / "y.csv", tmp_path / "d.csv"
    code, _, _ = run(capsys, "embed", "mds", "--in", pts, "--d", 3, "--out", out,
                     "--save-distances", dist)
    assert code == 0
    code, text, _ = run(capsys, "evaluate", out, "--reference", dist,
                        "--mode", "preservation")
    result = json.loads(text)
    assert code == 0 and result["reference_kind"] == "geodesic"
    assert result["max_relative_error"] < 1e-8
    code, text, _ = run(capsys, "evaluate", out, "--reference", pts,
                        "--mode", "residual-variance")
    assert code == 0 and json.loads(text)["residual_variance"] < 1e-12


def test_evaluate_misaligned(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    synth.save_csv(a, np.zeros((3, 2)))
    synth.save_csv(b, np.zeros((4, 2)))
    code, _, err = run(capsys, "evaluate", a, "--reference", b, "--mode", "procrustes")
    assert code == 2 and "rows" in err


def test_usage_errors(capsys, tmp_path, strips):
    out = tmp_path / "y.csv"
    assert run(capsys, "embed", "kcc", "--in", strips, "--d", 2, "--out", out)[0] == 2
    assert run(capsys, "embed", "isomap", "--in", strips, "--k", 5000, "--out", out)[0] == 2
    assert run(capsys, "embed", "pca", "--in", strips, "--save-distances",
               tmp_path / "d.csv", "--out", out)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["embed", "bogus", "--in", "x", "--out", "y"])
    assert exc.value.code == 2


def test_io_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "embed", "pca", "--in", tmp_path / "none.csv",
                     "--out", tmp_path / "y.csv")
    assert code == 4
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    code, _, err = run(capsys, "embed", "pca", "--in", bad, "--out", tmp_path / "y.csv")
    assert code == 4 and "row 2" in err


def test_figure_output(capsys, tmp_path, strips):
    pytest.importorskip("matplotlib")
    fig = tmp_path / "f.png"
    code, _, _ = run(capsys, "embed", "m-isomap", "--in", strips, "--k", 8,
                     "--out", tmp_path / "y.csv", "--figure", fig)
    assert code == 0 and fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
