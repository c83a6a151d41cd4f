"""Command-line interface: outputs, formats and exit codes."""

import csv
import io
import json
import subprocess
import sys

import pytest

from rydvdw.cli import main
from test_species import H_INI


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eigs_golden(capsys):
    code, out, _ = run(capsys, "eigs", "--channel", "p1/2->s1/2+s1/2")
    assert code == 0
    r = rows(out)
    by_m = {}
    for x in r:
        by_m.setdefault(x["M"], []).append(float(x["D"]))
    # D counts both atom assignments: twice the single-assignment Gram value 16/81
    assert sorted(by_m["0"]) == pytest.approx([0.0, 32 / 81], abs=1e-6)
    assert by_m["1"] == pytest.approx([8 / 81], abs=1e-6)


def test_eigs_coupled_basis_same_spectrum(capsys):
    _, a, _ = run(capsys, "eigs", "--channel", "d5/2->p3/2+f")
    _, b, _ = run(capsys, "eigs", "--channel", "d5/2->p3/2+f", "--basis", "coupled")
    da = sorted(float(x["D"]) for x in rows(a))
    db = sorted(float(x["D"]) for x in rows(b))
    assert da == pytest.approx(db, abs=1e-5)


@pytest.mark.parametrize("argv", [["eigs", "--channel", "junk"],
                                  ["c6", "--state", "70x1/2"],
                                  ["c6", "--species", "Xx", "--state", "70s1/2"],
                                  ["radial", "--transition", "s1/2->d5/2", "--n", "50"]])
def test_bad_input_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and "error" in err


def test_missing_subcommand(capsys):
    assert main([]) != 0


def test_c6_values(capsys):
    code, out, _ = run(capsys, "c6", "--species", "Rb", "--state", "70s1/2", "--top", "4")
    assert code == 0
    pairs = [r for r in rows(out) if r["kind"] == "pair"]
    assert [float(r["C6_GHz_um6"]) for r in pairs] == pytest.approx([799, 589, 543, 437], rel=0.05)


def test_repeat_is_byte_identical(capsys):
    argv = ["defects", "--species", "Cs", "--family", "p->dd", "--n", "68", "70"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a


def test_json_output(capsys):
    code, out, _ = run(capsys, "defects", "--species", "Rb", "--family", "s->pp", "--n", "70", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert {"n", "delta_id", "n_s", "n_t", "defect_MHz", "C6_GHz_um6"} <= set(data[0])
    keys = [(r["delta_id"], r["n_s"], r["n_t"]) for r in data]
    assert len(keys) == len(set(keys))


def test_output_file(tmp_path, capsys):
    target = tmp_path / "curves.csv"
    code, out, _ = run(capsys, "potential", "--c3", "1.98", "--delta", "-0.0074",
                       "--channel", "d5/2->p3/2+f", "--points", "5", "-o", str(target))
    assert code == 0 and out == ""
    r = rows(target.read_text())
    assert {"R_um", "V_plus_MHz", "V_minus_MHz"} <= set(r[0])


def test_radial_both_methods(capsys):
    code, out, _ = run(capsys, "radial", "--species", "Rb", "--transition", "s1/2->p3/2",
                       "--n", "70", "--method", "both", "--max-dn", "0")
    assert code == 0
    vals = {r["method"]: float(r["me_a0"]) for r in rows(out)}
    assert vals["semiclassical"] == pytest.approx(vals["numerov"], rel=0.01)


def test_blockade_report(capsys):
    code, out, _ = run(capsys, "blockade", "--state", "70s1/2", "--geometry", "3d", "--sigma", "5",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["B_MHz"] > 0 and rep["flags"] == []


def test_blockade_pair_scan(capsys):
    code, out, _ = run(capsys, "blockade", "--state", "70s1/2", "--geometry", "pair", "--R", "9.2",
                       "--theta-steps", "5")
    r = rows(out)
    assert code == 0 and len(r) == 5
    assert float(r[0]["B_MHz"]) == pytest.approx((9.77 / 9.2) ** 6, rel=0.10)


def test_dynamics_report(capsys):
    code, out, _ = run(capsys, "dynamics", "--ratio", "20", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["P2_sim"] == pytest.approx(rep["P2_formula"], rel=0.10)


def test_species_file_option(tmp_path, capsys):
    path = tmp_path / "h2.ini"
    path.write_text(H_INI)
    code, out, _ = run(capsys, "radial", "--species-file", str(path), "--transition", "p1/2->s1/2",
                       "--n", "10", "--max-dn", "0")
    assert code == 0 and rows(out)


def test_species_file_missing(tmp_path, capsys):
    code, _, err = run(capsys, "c6", "--species-file", str(tmp_path / "none.ini"), "--state", "70s1/2")
    assert code == 2 and "error" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rydvdw", "eigs", "--channel", "s1/2->p1/2+p1/2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("channel,M,index,D")
