import json
import subprocess
import sys

import pytest

from kmnil.cli import main

from conftest import A2, A11, A22, HYP2


@pytest.fixture
def mfile(tmp_path):
    def write(M, name="g.json"):
        p = tmp_path / name
        p.write_text(json.dumps({"matrix": M}))
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_classify_outputs(capsys, mfile):
    code, out = run(capsys, "classify", "--matrix", mfile(A2))
    data = json.loads(out)
    assert code == 0 and data["type"] == "finite" and data["label"] == "A2" and data["autA"] == 2
    code, out = run(capsys, "classify", "--matrix", mfile(A11))
    data = json.loads(out)
    assert (data["type"], data["label"], data["marks"], data["epsilon"]) == ("affine", "A1~1", [1, 1], 0)
    code, out = run(capsys, "classify", "--matrix", mfile(HYP2))
    assert json.loads(out)["type"] == "indefinite"
    code, out = run(capsys, "classify", "--matrix", mfile(A22))
    assert json.loads(out)["epsilon"] == 1


def test_input_errors_exit_2(capsys, mfile, tmp_path):
    assert main(["classify", "--matrix", mfile([[2, 1], [-1, 2]])]) == 2
    assert "PositiveOffDiagonal" in capsys.readouterr().err
    assert main(["classify", "--matrix", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1,2")
    assert main(["classify", "--matrix", str(bad)]) == 2
    assert main(["der", "--matrix", mfile(A2), "--height", "3", "--beta", "[1]"]) == 2
    assert main(["der", "--matrix", mfile(A2), "--height", "1", "--beta", "[0,0]"]) == 2
    assert main(["nonsense"]) == 2


def test_der_command(capsys, mfile):
    code, out = run(capsys, "der", "--matrix", mfile(A2), "--height", "3", "--beta", "[-1,1]")
    data = json.loads(out)
    assert code == 0 and data["outer"] == 1 and data["status"] == "pass"


def test_cap_error_exit_3(capsys, mfile):
    assert main(["der", "--matrix", mfile(HYP2), "--height", "6", "--beta", "[2,2]"]) == 3


def test_moody_command(capsys, mfile):
    code, out = run(capsys, "moody", "--matrix", mfile(HYP2), "--height", "8", "--jobs", "2")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_borel_command(capsys, mfile):
    code, out = run(capsys, "borel", "--matrix", mfile(A11), "--height", "4", "--beta", "[0,0]")
    data = json.loads(out)
    assert code == 0 and data["dim"] == 5


def test_h1_command_table(capsys, mfile):
    code, out = run(capsys, "h1", "--matrix", mfile(A2), "--height", "4", "--format", "table")
    assert code == 0 and "total" in out and "status: pass" in out


def test_identities(capsys):
    code, out = run(capsys, "identities")
    data = json.loads(out)
    assert code == 4 and data["summary"]["vandermonde"]["failures"] == 210
    code, out = run(capsys, "identities", "--paper-domain")
    assert code == 0
    code, out = run(capsys, "identities", "--r1", "2", "--k0", "1")
    data = json.loads(out)
    assert code == 0 and data["cases"][0]["lhs"] == "1/3"
    code, out = run(capsys, "identities", "--r1", "1", "--k0", "0")
    assert code == 0


def test_build_and_cache(capsys, mfile, tmp_path):
    cache = tmp_path / "cache"
    m = mfile(A11)
    code, out = run(capsys, "build", "--matrix", m, "--height", "6", "--cache", str(cache))
    data = json.loads(out)
    assert code == 0 and data["degrees"]["[1,1]"] == data["degrees"]["[2,2]"] == data["degrees"]["[3,3]"] == 1
    path = data["cache"]
    first = open(path, "rb").read()
    run(capsys, "build", "--matrix", m, "--height", "6", "--cache", str(cache))
    assert open(path, "rb").read() == first
    # later commands read the cache
    code, out = run(capsys, "borel", "--matrix", m, "--height", "6", "--cache", str(cache))
    assert code == 0
    data = json.loads(first)
    data["version"] = 99
    open(path, "w").write(json.dumps(data))
    assert main(["borel", "--matrix", m, "--height", "6", "--cache", str(cache)]) == 5


def test_build_a2_table(capsys, mfile):
    code, out = run(capsys, "build", "--matrix", mfile(A2), "--height", "3")
    assert json.loads(out)["dims_by_height"] == [2, 1, 0]


def test_module_entry_point(mfile):
    res = subprocess.run([sys.executable, "-m", "kmnil", "classify", "--matrix", mfile(A2)], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["label"] == "A2"
