import json

import pytest

from conftest import Q_NEWICK
from tropdissim.cli import main
from tropdissim.dissimilarity import distance_matrix
from tropdissim.tree import random_tree


@pytest.fixture
def qfile(tmp_path):
    p = tmp_path / "q.nwk"
    p.write_text(Q_NEWICK + "\n")
    return str(p)


@pytest.fixture
def q3file(tmp_path):
    p = tmp_path / "q3.nwk"
    p.write_text("(0:1,1:2,(2:1,3:1):1);\n")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dissim_csv(capsys, qfile):
    code, out, _ = run(capsys, "dissim", "--newick", qfile, "--m", "2")
    assert code == 0
    assert out.splitlines() == ["sigma,value", "0-1,2", "0-2,3", "0-3,3", "1-2,3", "1-3,3", "2-3,2"]


def test_dissim_rooted_json(capsys, qfile):
    code, out, _ = run(capsys, "dissim", "--newick", qfile, "--m", "2", "--rooted", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"0-1-2": "4", "0-1-3": "4", "0-2-3": "4"}


def test_dissim_bad_m(capsys, qfile):
    code, _, err = run(capsys, "dissim", "--newick", qfile, "--m", "99")
    assert code == 3 and "m must be" in err


def test_parse_error_exit(capsys, tmp_path):
    p = tmp_path / "bad.nwk"
    p.write_text("(0:1,1:1")
    code, _, err = run(capsys, "dissim", "--newick", str(p), "--m", "2")
    assert code == 2 and "position" in err
    code, _, _ = run(capsys, "dissim", "--newick", str(tmp_path / "missing.nwk"), "--m", "2")
    assert code == 2


def test_usage_error_exit(capsys):
    with pytest.raises(SystemExit) as info:
        main(["dissim", "--m", "x"])
    assert info.value.code == 3


def test_check_grassmannian_q(capsys, qfile):
    code, out, _ = run(capsys, "check", "grassmannian", "--m", "2", "--newick", qfile)
    rep = json.loads(out)
    assert code == 0
    assert rep["families"] == {"three_term(m=2)": {"relations_tested": 1, "member": 1,
                                                   "vacuous": 0, "nonmember": 0}}
    assert "wall_time" not in rep


def test_check_flag_q(capsys, qfile):
    code, out, _ = run(capsys, "check", "flag", "--sizes", "1,2", "--newick", qfile)
    rep = json.loads(out)
    assert code == 0
    inc = rep["families"]["exchange(a=1,b=2)"]
    assert inc["relations_tested"] == inc["member"] == 1
    assert all(f["nonmember"] == 0 for f in rep["families"].values())


def test_check_random_batch(capsys):
    code, out, _ = run(capsys, "check", "grassmannian", "--m", "3", "--random",
                       "--leaves", "7", "--trees", "100", "--seed", "5")
    rep = json.loads(out)
    assert code == 0 and rep["violations"] == []
    fam = rep["families"]["three_term(m=3)"]
    assert fam["member"] + fam["vacuous"] + fam["nonmember"] == fam["relations_tested"] * 100


def test_check_rooted_grassmannian(capsys):
    code, out, _ = run(capsys, "check", "rooted-grassmannian", "--m", "2", "--random",
                       "--leaves", "6", "--trees", "10")
    assert code == 0
    assert set(json.loads(out)["families"]) == {"three_term(m=2)", "exchange(a=2,b=2)"}


def test_check_violation_exit(capsys, tmp_path, monkeypatch):
    import tropdissim.cli as cli
    real = cli.dissimilarity_vector

    def skewed(tree, m):
        vec = real(tree, m)
        entries = dict(vec.entries)
        entries[(0, 1)] += 3
        return type(vec)(vec.m, entries)

    monkeypatch.setattr(cli, "dissimilarity_vector", skewed)
    p = tmp_path / "q.nwk"
    p.write_text(Q_NEWICK)
    code, out, _ = run(capsys, "check", "grassmannian", "--m", "2", "--newick", str(p))
    rep = json.loads(out)
    assert code == 4
    (v,) = rep["violations"]
    assert v["evaluations"] == ["7", "6", "6"] and v["count"] == 1


def test_check_deterministic_and_parallel(capsys):
    args = ["check", "flag", "--sizes", "1,2,3", "--random", "--leaves", "6", "--trees", "12",
            "--seed", "3"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args, "--jobs", "2")
    assert a == b == c


def test_check_timing_flag(capsys, qfile):
    _, out, _ = run(capsys, "check", "grassmannian", "--m", "2", "--newick", qfile, "--timing")
    assert "wall_time" in json.loads(out)


def test_check_bad_m(capsys, qfile):
    code, _, _ = run(capsys, "check", "grassmannian", "--m", "9", "--newick", qfile)
    assert code == 3


def test_tableaux(capsys, q3file):
    code, out, err = run(capsys, "tableaux", "--shape", "2,1", "--n", "3")
    assert code == 0 and len(json.loads(out)) == 8 and "8 tableaux" in err
    code, out, _ = run(capsys, "tableaux", "--shape", "2,1", "--n", "3", "--newick", q3file)
    rows = json.loads(out)
    # q3: d01=3, d02=d03=3; pairs 0-1-2: 5, 0-1-3: 5, 0-2-3: 4
    first = rows[0]
    assert first["columns"] == [[1, 2], [1]] and first["d0T"] == "8"
    code, out, _ = run(capsys, "tableaux", "--shape", "1", "--n", "2")
    assert len(json.loads(out)) == 2


def test_tableaux_bounds(capsys):
    code, _, _ = run(capsys, "tableaux", "--shape", "13", "--n", "2")
    assert code == 3


def test_reconstruct(capsys, tmp_path):
    p = tmp_path / "d.csv"
    p.write_text(",0,1,2,3\n0,0,2,3,3\n1,2,0,3,3\n2,3,3,0,2\n3,3,3,2,0\n")
    code, out, _ = run(capsys, "reconstruct", "--distances", str(p))
    assert code == 0 and out.strip() == "(0:1,1:1,(2:1,3:1):1);"

    p.write_text("0,1,2,3\n0,5,3,3\n5,0,3,3\n3,3,0,2\n3,3,2,0\n")
    code, _, err = run(capsys, "reconstruct", "--distances", str(p))
    assert code == 5 and "[0, 1, 2, 3]" in err

    p.write_text("0,1,2\n0,2,2\n2,0,2\n2,2,0\n")
    code, out, _ = run(capsys, "reconstruct", "--distances", str(p))
    assert code == 0 and out.strip() == "(0:1,1:1,2:1);"

    p.write_text("0,1\n0,zz\n")
    code, _, _ = run(capsys, "reconstruct", "--distances", str(p))
    assert code == 2


def test_reconstruct_random_csv(capsys, tmp_path):
    from tropdissim.newick import to_newick
    t = random_tree(7, 11, 8)
    p = tmp_path / "d.csv"
    p.write_text(distance_matrix(t).to_csv())
    code, out, _ = run(capsys, "reconstruct", "--distances", str(p))
    assert code == 0 and out.strip() == to_newick(t)


def test_newick_and_random(capsys, qfile):
    code, out, _ = run(capsys, "newick", qfile)
    assert out.strip() == "(0:1,1:1,(2:1,3:1):1);"
    _, a, _ = run(capsys, "random", "--leaves", "5", "--seed", "2")
    _, b, _ = run(capsys, "random", "--leaves", "5", "--seed", "2")
    assert a == b


def test_selftest(capsys):
    code, out, err = run(capsys, "selftest", "--trees", "5")
    assert code == 0 and "0 failures" in err
    rep = json.loads(out)
    assert rep["valuation_mismatches"] == []


def test_selftest_corruption(capsys):
    code, out, _ = run(capsys, "selftest", "--trees", "1", "--inject-corruption")
    assert code == 4
    rep = json.loads(out)
    assert sum(len(f["failures"]) for f in rep["classical"].values()) == 1
