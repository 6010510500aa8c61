import json
import subprocess
import sys

import pytest

from coarse_complex import fixtures as F
from coarse_complex.cli import main
from coarse_complex.hodge import laplacian
from coarse_complex.io import format_complex, operator_to_json


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    P = F.cp2_pair()
    T = F.trivial_pair()
    glue = lambda Q: json.dumps(sorted([a, b] for a, b in Q.identification.items()))
    return {
        "torus": write("torus.cx", format_complex(F.torus())),
        "c3": write("c3.cx", format_complex(F.circle(3))),
        "rp2": write("rp2.cx", format_complex(F.rp2())),
        "core1": write("core1.cx", format_complex(P.core1)),
        "core0": write("core0.cx", format_complex(P.core0)),
        "glue": write("glue.json", glue(P)),
        "d4": write("d4.cx", format_complex(T.core1)),
        "d4glue": write("d4glue.json", glue(T)),
        "lap": write("lap.json", json.dumps(operator_to_json(laplacian(F.circle(3), 0)))),
        "X": write("x.ms", "2\n0 1\n1 0\n"),
        "Y": write("y.ms", "2\n0 3\n3 0\n"),
        "bad": write("bad.ms", "3\n0 1 5\n1 0 1\n5 1 0\n"),
        "geo": write("sq.cx", "vertex 0 0 0\nvertex 1 1 0\nvertex 2 0 1\nsimplex 0 1 2\n"),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_betti_torus(files, capsys):
    assert run(capsys, "betti", "--q", "1", files["torus"])[:2] == (0, "2\n")


def test_pair_signature_cp2(files, capsys):
    code, out, _ = run(capsys, "pair-signature", "--core1", files["core1"], "--core0", files["core0"],
                       "--glue", files["glue"])
    assert (code, out) == (0, "1\n")


def test_unknown_command_exits_2():
    proc = subprocess.run([sys.executable, "-m", "coarse_complex.cli", "frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr


def test_parse_error_exits_2(files, capsys):
    code, _, err = run(capsys, "gh", files["bad"], files["X"])
    assert code == 2 and "line" in err


def test_non_orientable_exits_2(files, capsys):
    assert run(capsys, "duality-check", files["rp2"])[0] == 2


def test_bad_tolerance(files, capsys):
    assert run(capsys, "betti", "--tol", "0", files["torus"])[0] == 2


def test_json_schema_and_determinism(files, capsys):
    _, first, _ = run(capsys, "--json", "spectrum", "--q", "1", files["c3"])
    _, second, _ = run(capsys, "spectrum", "--json", "--q", "1", files["c3"])
    assert first == second
    doc = json.loads(first)
    assert set(doc) == {"schema_version", "command", "inputs", "result", "tolerances", "timings"}
    assert doc["timings"] == {}
    assert doc["result"]["gap"] == pytest.approx(3)


def test_timings_flag(files, capsys):
    _, out, _ = run(capsys, "--json", "--timings", "betti", files["torus"])
    assert "total_seconds" in json.loads(out)["timings"]


def test_fractions_serialised(files, capsys):
    _, out, _ = run(capsys, "--json", "gh", files["X"], files["Y"])
    res = json.loads(out)["result"]
    assert res["upper"] == 1 and isinstance(res["lower"], str) and "/" in res["lower"]


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["dl", "{X}", "{Y}"], "1.09861228867\n"),
        (["dltop", "{X}", "{Y}"], "1.09861228867\n"),
        (["hausdorff", "--x", "0", "--y", "1", "{X}"], "1\n"),
        (["classify-map", "--map", "0,1", "{X}", "{Y}"], "C: 2\ndil: 3\n"),
    ],
)
def test_metric_commands(files, capsys, argv, expected):
    argv = [a.format(**files) for a in argv]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == expected


def test_other_commands_succeed(files, capsys):
    cases = [
        ["subdivide-check", files["c3"]],
        ["locality", "--operator", files["lap"], files["c3"]],
        ["duality-check", files["torus"]],
        ["gap-trend", "--family", "triangles", "--q", "0", "--sizes", "1,2"],
        ["uniformity-check", "--theta0", "0.1", "--c1", "1", "--c2", "0.1", "--c", "3", files["geo"]],
        ["bordism-compare", "--a-core1", files["core1"], "--a-core0", files["core0"], "--a-glue", files["glue"],
         "--b-core1", files["d4"], "--b-core0", files["d4"], "--b-glue", files["d4glue"]],
    ]
    for argv in cases:
        code, out, err = run(capsys, *argv)
        assert code == 0, (argv, err)
    assert out == "distinguished\n"


def test_unknown_family(capsys):
    assert run(capsys, "gap-trend", "--family", "nope", "--sizes", "1,2")[0] == 2


def test_sample_inputs(capsys):
    from pathlib import Path

    data = Path(__file__).resolve().parents[1] / "data"
    assert run(capsys, "betti", "--q", "1", str(data / "torus.cx"))[:2] == (0, "2\n")
    code, out, _ = run(capsys, "pair-signature", "--core1", str(data / "cp2_core1.cx"),
                       "--core0", str(data / "cp2_core0.cx"), "--glue", str(data / "cp2_glue.json"))
    assert (code, out) == (0, "1\n")
    code, out, _ = run(capsys, "pair-signature", "--core1", str(data / "d4.cx"),
                       "--core0", str(data / "d4.cx"), "--glue", str(data / "d4_glue.json"))
    assert (code, out) == (0, "0\n")
