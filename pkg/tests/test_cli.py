import hashlib
from pathlib import Path

import numpy as np
import pytest

from graphreps.cli import main, parse_gadget, parse_range
from graphreps.graph import complete_graph, tree_ball, write_graph

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def table(text):
    """Data rows of a CSV with manifest comments."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_parsers():
    assert parse_gadget("theta:12,2").edge_count == 28
    assert parse_gadget("cycle:3").edge_count == 6
    assert parse_gadget("edge").edge_count == 1
    assert parse_range("4..8") == [4, 5, 6, 7, 8]
    assert parse_range("1,3") == [1, 3]


@pytest.mark.parametrize("argv", [["regime", "--gadget", "wheel"], ["critical-points", "--d", "x..y"], ["verify", "nope"],
                                  ["sample", "--gadget", "edge", "--model", "loop"], []])
def test_usage_errors_exit_3(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 3


def test_gadget_curve_defaults(capsys):
    code, out = run(capsys, "gadget-curve")
    assert code == 0
    assert out.startswith("# command: gadget-curve")
    header, rows = table(out)
    assert header == ["x", "value"] and len(rows) == 501
    vals = {round(float(x), 6): float(v) for x, v in rows}
    assert vals[0.85] >= 0.27 and vals[0.965] <= 0.245


@pytest.mark.parametrize("model", ["bern", "rc"])
def test_gadget_curve_monotone_models(model, capsys):
    _, out = run(capsys, "gadget-curve", "--model", model, "--gadget", "theta:3,2", "--xmin", "0", "--grid", "101")
    vals = np.array([float(v) for _, v in table(out)[1]])
    assert np.all(np.diff(vals) > 0)


def test_gadget_curve_cap_error(tmp_path, capsys):
    path = tmp_path / "fat.graph"
    path.write_text("vertices 2\nterminals 0 1\n" + "edge 0 1\n" * 26)
    code = main(["gadget-curve", "--graph", str(path), "--grid", "3"])
    assert code == 3
    assert "cycle rank 25" in capsys.readouterr().err


def test_regime_non_unique(capsys):
    code, out = run(capsys, "regime", "--grid", "2000", "--tol", "1e-7")
    assert code == 1
    assert "# threshold: 0.25" in out and "# transition: non-unique" in out
    header, rows = table(out)
    assert header == ["lo", "hi"] and len(rows) == 1


def test_regime_unique_cycle(capsys):
    code, out = run(capsys, "regime", "--gadget", "cycle:1", "--d", "6", "--tol", "1e-12")
    assert code == 0
    lo, hi = map(float, table(out)[1][0])
    assert lo == pytest.approx(0.5, abs=1e-9) and hi == 1.0


def test_regime_threshold_convention(capsys):
    _, out = run(capsys, "regime", "--gadget", "edge", "--model", "bern", "--d", "5", "--threshold-convention", "dplus1")
    assert float(table(out)[1][0][0]) == pytest.approx(1 / 6, abs=1e-8)


def test_critical_points(capsys):
    code, out = run(capsys, "critical-points", "--d", "3..8", "--n", "1")
    assert code == 0
    header, rows = table(out)
    assert header == ["model", "d", "n", "x_c_closed", "x_c_numeric", "abs_diff", "ordering", "reason"]
    for r in rows:
        row = dict(zip(header, r))
        if row["model"] == "loop" and row["x_c_closed"] != "NA":
            assert float(row["x_c_closed"]) == pytest.approx((int(row["d"]) - 2) ** -0.5)
        if row["abs_diff"] != "NA":
            assert float(row["abs_diff"]) < 1e-9
        if int(row["d"]) >= 4:
            assert row["ordering"] == "strict"
    assert any(r[0] == "loop" and r[1] == "3" and r[3] == "NA" and r[7] for r in rows)


@pytest.mark.parametrize(
    "name,argv",
    [
        ("critical_points.csv", ["critical-points", "--d", "4..8", "--n", "1..4"]),
        ("gadget_curve.csv", ["gadget-curve"]),
        ("regime.csv", ["regime"]),
    ],
)
def test_golden(name, argv, capsys):
    _, out = run(capsys, *argv)
    assert out == (GOLDEN / name).read_text()


def test_verify_halving_prints_iterate(capsys):
    code, out = run(capsys, "verify", "halving")
    assert code == 0
    assert repr(2 ** (-1 / 16)) in out


def test_verify_exact(capsys):
    code, out = run(capsys, "verify", "exact")
    assert code == 0 and "FAIL" not in out


def test_sample_ueg_tree(tmp_path, capsys):
    path = tmp_path / "tree.graph"
    write_graph(tree_ball(3, 2), path)
    code, out = run(capsys, "sample", "--graph", str(path), "--model", "ueg", "--samples", "20")
    assert code == 0
    header, rows = table(out)
    assert header == ["index", "config_hex"] and len(rows) == 20
    assert all(int(h, 16) == 0 for _, h in rows)
    assert hashlib.sha256(path.read_bytes()).hexdigest() in out


def test_sample_loop_triangle(tmp_path, capsys):
    path = tmp_path / "tri.graph"
    write_graph(complete_graph(3), path)
    _, out = run(capsys, "sample", "--graph", str(path), "--model", "loop", "--x", "0.5", "--samples", "20000",
                 "--thin", "2", "--burnin", "100")
    full = np.mean([h == "7" for _, h in table(out)[1]])
    assert abs(full - 1 / 9) < 0.015


@pytest.mark.parametrize("model", ["rc", "current", "current2", "bern"])
def test_sample_other_models(model, capsys):
    code, out = run(capsys, "sample", "--gadget", "theta:2,1", "--model", model, "--x", "0.5", "--p", "0.5",
                    "--samples", "50", "--burnin", "10")
    assert code == 0 and len(table(out)[1]) == 50


def test_sample_reproducible_file(tmp_path, capsys):
    argv = ["sample", "--gadget", "theta:2,2", "--model", "loop", "--x", "0.7", "--samples", "300", "--seed", "11"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(a.with_name("a2.csv"))])
    main(argv + ["--seed", "12", "--out", str(b)])
    body = lambda p: [ln for ln in p.read_text().splitlines() if not ln.startswith("# output") and not ln.startswith("# flags")]
    assert body(a) == body(a.with_name("a2.csv"))
    assert body(a) != body(b)
    first = hashlib.sha256(a.read_bytes()).hexdigest()
    main(argv + ["--out", str(a)])
    assert hashlib.sha256(a.read_bytes()).hexdigest() == first


def test_out_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GRAPHREPS_OUT_DIR", str(tmp_path))
    assert main(["critical-points", "--d", "5", "--n", "1"]) == 0
    assert (tmp_path / "critical-points.csv").exists()
    assert capsys.readouterr().out == ""
