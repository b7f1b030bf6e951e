import csv
import io
import json
import os
from pathlib import Path

import jsonschema
import pytest

from fosterlab.cli import SCHEMA, main, to_csv
from fosterlab.graph import load_edge_list

ROOT = Path(__file__).resolve().parent
GOLDEN = ROOT / "golden"
SCHEMA_DOC = json.loads((ROOT.parent / "docs" / "output-schema-v1.json").read_text())
UPDATE = os.environ.get("FOSTERLAB_UPDATE_GOLDEN") == "1"

K4 = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"
C4 = "0 1\n1 2\n2 3\n3 0\n"
WEIGHTED_P3 = "0 1 1\n1 2 3\n"
TRIANGLE = "0 1\n1 2\n2 0\n"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name, text in [("k4.el", K4), ("c4.el", C4), ("wp3.el", WEIGHTED_P3), ("tri.el", TRIANGLE),
                       ("split.el", "0 1\n2 3\n"), ("bad.el", "0 1\n1 x\n")]:
        Path(name).write_text(text)
    from fosterlab.checks import petersen_graph
    from fosterlab.graph import save_edge_list

    save_edge_list(petersen_graph(), "petersen.el")
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    record = json.loads(out)
    jsonschema.validate(record, SCHEMA_DOC)
    assert record["schema"] == SCHEMA
    return code, record


def stable(record):
    out = dict(record)
    out.pop("wall_time_s")
    out.pop("version")
    return out


def check_golden(name, record):
    path = GOLDEN / f"{name}.json"
    got = json.dumps(stable(record), indent=2, sort_keys=True) + "\n"
    if UPDATE or not path.exists():
        path.write_text(got)
    assert got == path.read_text()


def test_lattice_square_ball(workdir, capsys):
    code, out, _ = run(capsys, "lattice", "--family", "square", "--ball", "3", "--out", "sq.el")
    assert code == 0 and "n=25" in out
    assert load_edge_list("sq.el").n == 25


def test_lattice_hexagonal_torus_golden(workdir, capsys):
    code, rec = run_json(capsys, "lattice", "--family", "hexagonal", "--torus", "4", "--out", "hex.el")
    assert code == 0
    assert (rec["results"]["n"], rec["results"]["m"]) == (32, 48)
    g = load_edge_list("hex.el")
    assert (g.n, g.m) == (32, 48)
    check_golden("lattice_hexagonal_torus4", rec)


def test_lattice_to_stdout(workdir, capsys):
    code, out, err = run(capsys, "lattice", "--family", "triangular", "--ball", "1")
    assert code == 0 and "n=7" in err
    assert out.startswith("# scalar: exact")


@pytest.mark.parametrize(
    "argv",
    [
        ["lattice", "--family", "square", "--torus", "2"],
        ["lattice", "--family", "square"],
        ["lattice", "--family", "square", "--ball", "2", "--torus", "4"],
        ["lattice", "--family", "kagome", "--ball", "2"],
        ["resist"],
        ["resist", "--file", "c4.el", "--i", "0"],
        ["sumrule", "--r", "2"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(workdir, capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_resist_exact_golden(workdir, capsys):
    code, rec = run_json(capsys, "resist", "--file", "k4.el", "--i", "0", "--j", "1", "--exact")
    assert code == 0 and rec["results"]["value"] == "1/2"
    check_golden("resist_k4_exact", rec)


def test_resist_cg(workdir, capsys):
    code, rec = run_json(capsys, "resist", "--file", "c4.el", "--i", "0", "--j", "1")
    assert code == 0 and rec["results"]["value"] == pytest.approx(0.75, abs=1e-10)


def test_resist_lattice_with_closed_form(workdir, capsys):
    code, rec = run_json(capsys, "resist", "--family", "square", "--pair", "1,0")
    assert code == 0
    assert rec["results"]["value"] == pytest.approx(0.5, abs=1e-3)
    assert rec["results"]["closed_form"]["expression"] == "1/2"
    assert rec["provenance"][0]["expression"] == "1/2"


def test_resist_hexagonal_distance_two(workdir, capsys):
    code, out, _ = run(capsys, "resist", "--family", "hexagonal", "--pair", "d2")
    assert code == 0 and "closed form 1 = 1" in out


def test_resist_nonconvergence_exit_3(workdir, capsys):
    code, _, err = run(capsys, "resist", "--family", "square", "--pair", "2,1", "--max-iter", "2")
    assert code == 3 and "numerical" in err


def test_resist_weighted_file_needs_flag(workdir, capsys):
    assert run(capsys, "resist", "--file", "wp3.el", "--i", "0", "--j", "2", "--exact")[0] == 4
    code, out, _ = run(capsys, "resist", "--file", "wp3.el", "--i", "0", "--j", "2", "--exact", "--weighted")
    assert code == 0 and "4/3" in out


def test_bad_file_exit_4(workdir, capsys):
    code, _, err = run(capsys, "resist", "--file", "bad.el", "--i", "0", "--j", "1")
    assert code == 4 and "line 2" in err
    assert run(capsys, "resist", "--file", "missing.el", "--i", "0", "--j", "1")[0] == 4


def test_sumrule_petersen_golden(workdir, capsys):
    code, rec = run_json(capsys, "sumrule", "--file", "petersen.el", "--r", "4", "--exact")
    assert code == 0 and rec["results"]["residual"] == "0/1"
    check_golden("sumrule_petersen_r4", rec)


def test_sumrule_hitting_identity(workdir, capsys):
    code, rec = run_json(capsys, "sumrule", "--file", "k4.el", "--r", "3", "--identity", "hitting")
    assert code == 0 and rec["results"]["lhs"] == "7/3"


def test_sumrule_float_mode(workdir, capsys):
    code, rec = run_json(capsys, "sumrule", "--file", "wp3.el", "--r", "3", "--float", "--weighted")
    assert code == 0 and rec["results"]["kind"] == "float"


def test_sumrule_lattices(workdir, capsys):
    code, rec = run_json(capsys, "sumrule", "--family", "triangular", "--r", "4")
    assert code == 0 and rec["results"]["rhs"] == 528
    code, rec = run_json(capsys, "sumrule", "--family", "square", "--r", "3", "--nondegenerate")
    assert code == 0 and rec["results"]["rhs"] == 26


def test_sumrule_missed_tolerance_exit_3(workdir, capsys):
    code, rec = run_json(capsys, "sumrule", "--family", "square", "--r", "3", "--sizes", "8,9,10", "--rel-tol", "0")
    assert code == 3 and rec["results"]["passed"] is False


def test_hittime_triangle(workdir, capsys):
    code, rec = run_json(capsys, "hittime", "--file", "tri.el", "--i", "0", "--j", "1", "--seed", "1")
    assert code == 0 and rec["results"]["z"] <= 3 and rec["results"]["exact"] == "2"


def test_hittime_single_edge(workdir, capsys):
    Path("edge.el").write_text("0 1\n")
    code, rec = run_json(capsys, "hittime", "--file", "edge.el", "--i", "0", "--j", "1", "--replications", "100")
    assert code == 0 and rec["results"]["mean"] == 1 and rec["results"]["stderr"] == 0


def test_hittime_commute(workdir, capsys):
    code, rec = run_json(capsys, "hittime", "--file", "c4.el", "--i", "0", "--j", "2", "--commute",
                         "--replications", "20000")
    assert code == 0 and rec["results"]["commute"]["expected_commute"] == "8/1"


def test_hittime_disconnected_exit_4(workdir, capsys):
    assert run(capsys, "hittime", "--file", "split.el", "--i", "0", "--j", "3")[0] == 4


def test_hittime_step_cap_exit_3(workdir, capsys):
    code = run(capsys, "hittime", "--file", "petersen.el", "--i", "0", "--j", "5", "--step-cap", "1",
               "--replications", "10")[0]
    assert code == 3


def test_hittime_is_reproducible(workdir, capsys):
    argv = ["hittime", "--file", "petersen.el", "--i", "0", "--j", "7", "--seed", "3", "--replications", "5000"]
    _, a = run_json(capsys, *argv)
    _, b = run_json(capsys, *argv)
    assert a["results"] == b["results"]


def test_csv_keeps_full_precision(workdir, capsys):
    code, out, _ = run(capsys, "resist", "--file", "c4.el", "--i", "0", "--j", "1", "--csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    code, rec = run_json(capsys, "resist", "--file", "c4.el", "--i", "0", "--j", "1")
    assert float(row["value"]) == rec["results"]["value"]


def test_to_csv_round_trips_floats():
    values = [0.1, 1 / 3, 2.0**-40, 123456.789e10]
    text = to_csv([{"x": v} for v in values])
    assert [float(r["x"]) for r in csv.DictReader(io.StringIO(text))] == values


def test_demo_quick_json(capsys):
    code, rec = run_json(capsys, "demo", "--quick")
    assert code == 0 and rec["passed"]
    assert all(c["passed"] for c in rec["results"])
    assert len(rec["provenance"]) == 14


def test_demo_quick_text(capsys):
    code, out, _ = run(capsys, "demo", "--quick")
    assert code == 0
    assert out.count("[PASS]") == 27 and "[FAIL]" not in out


def test_demo_failure_exits_3(capsys, monkeypatch):
    from fosterlab import checks

    monkeypatch.setattr(checks, "run_all", lambda quick, progress: [checks.Check("forced", False)])
    assert run(capsys, "demo", "--quick")[0] == 3


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "fosterlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
