import csv
import json
import os

from gridroots.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def write_json(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_solve2d_diag(tmp_path, capsys):
    inst = write_json(tmp_path, "decoupled.json",
                      {"family": "separable", "seed": 3, "d": 2})
    code, out = run(capsys, "solve2d", "--mode", "diag", "--instance", inst,
                    "--delta", "2^-8")
    assert code == 0
    doc = json.loads(out)
    assert doc["delta"] == "2^-8"
    assert doc["evaluations"] > 0
    assert len(doc["root_index"]) == 2


def test_solve2d_trace_and_modes(tmp_path, capsys):
    inst = write_json(tmp_path, "stair.json", {"family": "staircase-2d", "seed": 1})
    code, out = run(capsys, "solve2d", "--instance", inst, "--delta", "2^-5", "--trace")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "diag"
    assert doc["trace"]["case"] in ("direct", "zipper")
    assert doc["trace"]["evaluations"] == doc["evaluations"]


def test_solve1d_and_solvend(tmp_path, capsys):
    inst1 = write_json(tmp_path, "walk.json", {"family": "walk-1d", "seed": 5})
    code, out = run(capsys, "solve1d", "--instance", inst1, "--delta", "2^-10")
    assert code == 0
    assert json.loads(out)["evaluations"] <= 12

    inst3 = write_json(tmp_path, "r3.json", {"family": "recursive-3d", "seed": 2})
    code, out = run(capsys, "solvend", "--instance", inst3, "--delta", "2^-5")
    assert code == 0
    assert len(json.loads(out)["root_index"]) == 3


def test_cake_solve(tmp_path, capsys):
    inst = write_json(tmp_path, "three_uniform.json", {
        "agents": [{"type": "piecewise_constant", "breakpoints": ["0", "1"],
                    "densities": ["1"]}] * 3,
        "groups": [1, 1, 1],
        "r": "2^-8",
    })
    code, out = run(capsys, "cake", "--instance", inst)
    assert code == 0
    doc = json.loads(out)
    assert doc["verified"] is True
    assert len(doc["allocation"]["cuts"]) == 2
    assert doc["valuation_queries"] > 0


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, out = run(capsys, "solve2d", "--instance", str(bad))
    assert code == 2
    assert "error" in json.loads(out)


def test_hypothesis_violation_exits_1(tmp_path, capsys):
    # component 1 never switches: a continuity/switching failure surfaces
    n = 4
    values = [[[(-1 if i < 2 else (0 if i == 2 else 1)), 1] for j in range(n + 1)]
              for i in range(n + 1)]
    inst = write_json(tmp_path, "broken.json", {"family": "table-2d", "values": values})
    code, out = run(capsys, "solve2d", "--mode", "diag", "--instance", inst)
    assert code == 1
    doc = json.loads(out)
    assert doc["error"]["type"] == "SwitchingViolation"
    assert "hypothesis" in doc["error"]


def test_verify_properties(tmp_path, capsys):
    inst = write_json(tmp_path, "mono.json", {"family": "random-monotone-2d", "seed": 0})
    for prop in ("delta-continuity", "positive-switching", "monotone-profile"):
        code, out = run(capsys, "verify", "--property", prop, "--instance", inst,
                        "--delta", "2^-4")
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True and doc["mode"] == "exhaustive"
    inst3 = write_json(tmp_path, "r3.json", {"family": "recursive-3d", "seed": 1})
    code, out = run(capsys, "verify", "--property", "lattice-claims",
                    "--instance", inst3, "--delta", "2^-3")
    assert code == 0 and json.loads(out)["ok"] is True


def test_verify_reports_violations_with_exit_0(tmp_path, capsys):
    inst = write_json(tmp_path, "sw.json", {"family": "switching-necessary"})
    code, out = run(capsys, "verify", "--property", "positive-switching",
                    "--instance", inst, "--delta", "2^-4")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is False and doc["violations"]


def test_bench_row_counts_and_determinism(tmp_path, capsys):
    out1 = str(tmp_path / "bench1.csv")
    out2 = str(tmp_path / "bench2.csv")
    for out in (out1, out2):
        code = main(["bench", "--family", "random-monotone-2d",
                     "--deltas", "2^-4..2^-8", "--seed", "1", "--reps", "2",
                     "--out", out])
        assert code == 0
    rows1 = list(csv.DictReader(open(out1)))
    rows2 = list(csv.DictReader(open(out2)))
    assert len(rows1) == 5 * 2
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_time"} for r in rows]
    assert strip(rows1) == strip(rows2)


def test_bench_cake_family(tmp_path, capsys):
    out = str(tmp_path / "cake.csv")
    code = main(["bench", "--family", "cake-random", "--deltas", "2^-6,2^-7",
                 "--agents", "3", "--reps", "1", "--out", out])
    assert code == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 2
    assert all(int(r["evaluations"]) > 0 for r in rows)


def test_report_renders_figures(tmp_path, capsys):
    bench = str(tmp_path / "bench.csv")
    assert main(["bench", "--family", "random-monotone-2d",
                 "--deltas", "2^-4..2^-10", "--reps", "2", "--out", bench]) == 0
    outdir = str(tmp_path / "figs")
    code, out = run(capsys, "report", "--bench", bench, "--out-dir", outdir)
    assert code == 0
    written = json.loads(out)["written"]
    assert any(p.endswith("random-monotone-2d-scaling.png") for p in written)
    assert os.path.exists(os.path.join(outdir, "fits.csv"))
    fits = list(csv.DictReader(open(os.path.join(outdir, "fits.csv"))))
    assert fits and 1.0 <= float(fits[0]["exponent"]) <= 3.0


def test_output_to_file(tmp_path, capsys):
    inst = write_json(tmp_path, "sep.json", {"family": "separable", "seed": 0, "d": 2})
    out = str(tmp_path / "root.json")
    code = main(["solve2d", "--instance", inst, "--delta", "2^-4", "--out", out])
    assert code == 0
    assert json.loads(open(out).read())["delta"] == "2^-4"


def test_seed_flag_overrides_instance_seed(tmp_path, capsys):
    inst = write_json(tmp_path, "sep.json", {"family": "separable", "seed": 0, "d": 2})
    code, out0 = run(capsys, "solve2d", "--instance", inst, "--delta", "2^-6")
    assert code == 0
    code, out9 = run(capsys, "solve2d", "--instance", inst, "--delta", "2^-6",
                     "--seed", "9")
    assert code == 0
    assert json.loads(out9)["seed"] == 9
    assert json.loads(out0)["root_index"] != json.loads(out9)["root_index"]


def test_solvend_pure_1d_base_flag(tmp_path, capsys):
    inst = write_json(tmp_path, "r3.json", {"family": "recursive-3d", "seed": 4})
    code, out = run(capsys, "solvend", "--instance", inst, "--delta", "2^-4",
                    "--pure-1d-base")
    assert code == 0
    assert len(json.loads(out)["root_index"]) == 3


def test_verify_dd_instance_profile(tmp_path, capsys):
    inst = write_json(tmp_path, "dd.json", {"family": "dd-insufficient", "seed": 1})
    code, out = run(capsys, "verify", "--property", "monotone-profile",
                    "--instance", inst, "--delta", "2^-3")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert len(doc["details"]["declared"]) == 7
