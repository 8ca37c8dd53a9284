import json
import subprocess
import sys

from lensspec import cli, orbifold


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_isospectral_flagship(capsys):
    code, out, _ = run(capsys, "isospectral", "L(11;1,2,3)", "L(11;1,2,4)")
    assert code == 0 and out == "true cutoff=76\n"


def test_isometric(capsys):
    assert run(capsys, "isometric", "L(7;1,2)", "L(7;1,4)")[1] == "true\n"
    assert run(capsys, "isometric", "L(11;1,2,3)", "L(11;1,2,4)")[1] == "false\n"


def test_density_csv(capsys):
    code, out, _ = run(capsys, "density", "3", "50", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["n,x,non_unique,total,density", "3,50,40,990,0.95960"]


def test_heuristic_stamp(capsys):
    _, out, _ = run(capsys, "isospectral", "L(11;1,2,3)", "L(11;1,2,4)", "--cutoff-override", "20")
    assert out.strip().endswith("HEURISTIC")
    _, out, _ = run(capsys, "search", "3", "11", "--cutoff-override", "10")
    assert all("HEURISTIC" in line for line in out.splitlines())
    _, out, _ = run(capsys, "search", "3", "11")
    assert "HEURISTIC" not in out and "L(11;1,2,3) ~ L(11;1,2,4)" in out


def test_json_envelope(capsys):
    _, out, _ = run(capsys, "spectrum", "L(2;1,1)", "--max-k", "3", "--format", "json")
    env = json.loads(out)
    assert set(env) == {"command", "config", "result", "certificates"}
    assert env["command"] == "spectrum" and env["result"]["mults"] == [1, 0, 9, 0]


def test_malformed_literal_exit_code(capsys):
    code, out, err = run(capsys, "isometric", "L(11;1,2", "L(7;1,2)")
    assert code == 2 and out == "" and "malformed" in err


def test_invariant_violation_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise orbifold.InvariantViolation("synthetic")
    monkeypatch.setattr(orbifold, "small_order_uniqueness", boom)
    code, _, err = run(capsys, "orbifold", "unique", "5", "2", "10")
    assert code == 3 and "synthetic" in err


def test_boolean_answers_do_not_change_exit_code(capsys):
    code, out, _ = run(capsys, "isospectral", "L(8;1,3)", "L(8;1,1)")
    assert code == 0 and out.startswith("false")


def test_table2_identical_across_job_counts(capsys):
    args = ["table2", "--nmin", "3", "--nmax", "5", "--q", "11", "--q", "13", "--format", "json"]
    _, one, _ = run(capsys, *args, "--jobs", "1")
    _, two, _ = run(capsys, *args, "--jobs", "2")
    assert one == two
    assert json.loads(one)["result"]["grid"][0] == ["pair", "pair"]


def test_table1_small(capsys):
    _, out, _ = run(capsys, "table1", "--nmax", "4", "--qmax", "13", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "q,q0,n,members"
    assert '11,5,3,"[1, 2, 3], [1, 2, 4]"' in lines


def test_workdir_resume(capsys, tmp_path):
    args = ["search", "4", "13", "--workdir", str(tmp_path)]
    _, first, _ = run(capsys, *args)
    assert (tmp_path / "manifold_n4_q13.json").exists()
    _, second, _ = run(capsys, *args)
    assert first == second


def test_tower_build_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "tower", "build", "11", "1", "12", "1,2,8", "1", "--format", "json")
    assert code == 0
    path = tmp_path / "tower.json"
    path.write_text(out)
    code, out, _ = run(capsys, "tower", "verify", "--input", str(path), "--full-depth", "0")
    assert code == 0 and out.splitlines()[-1] == "ok"
    assert "level 1 q=1452 predicate=true congruence=true full: skipped" in out


def test_dd_check_table(capsys):
    code, out, _ = run(capsys, "dd-check", "11", "1", "1,3,6", "--table", "8", "--format", "json")
    res = json.loads(out)["result"]
    assert [p["r"] for p in res["predicates"] if p["reversible"]] == [1, 2, 4, 7, 8]
    assert res["pair"]["isospectral"] and not res["pair"]["isometric"]


def test_orbifold_commands(capsys, tmp_path):
    _, out, _ = run(capsys, "orbifold", "gassmann", "5", "--format", "json")
    env = json.loads(out)
    assert env["result"]["almost_conjugate"] and env["certificates"]["verified"]
    gfile = tmp_path / "g.txt"
    gfile.write_text("# antipodal map on R^4\n(-1 -2 | -3 -4)\n")
    _, out, _ = run(capsys, "orbifold", "spectrum", str(gfile), "3")
    assert out == "1 0 9 0\n"
    assert run(capsys, "orbifold", "unique", "5", "3", "50")[1] == "true\n"


def test_misc_commands(capsys):
    assert run(capsys, "k0", "L(2;1,1)")[1] == "none\n"
    assert run(capsys, "eigen-equiv", "L(6;1,2,3)", "L(5;1,1,2)")[1] == "true\n"
    assert run(capsys, "finite-part", "2", "3/10")[1] == "N=2471 (q=6, K=18)\n"
    assert run(capsys, "extend", "L(11;1,2,3)", "1")[1] == "L(11;1,2,3,1,2,3,4,5)\n"
    assert "agree=28" in run(capsys, "example54", "10")[1]
    assert run(capsys, "enumerate", "2", "7")[1] == "L(7;1,1)\nL(7;1,2)\n"


def test_console_script_and_version():
    out = subprocess.run([sys.executable, "-m", "lensspec.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("lensspec ")
    out = subprocess.run([sys.executable, "-m", "lensspec.cli", "isometric", "L(7;1,2)", "L(7;1,4)"],
                         capture_output=True, text=True)
    assert out.stdout == "true\n"
