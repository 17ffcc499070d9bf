import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfineq.cli import InstanceError, main, parse_instance, parse_k_range, serialize_instance
from cfineq.forge import exactly_equal

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, data, name="inst.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


@pytest.mark.parametrize(
    "fname,extra,code",
    [
        ("cosh_vs_5exp_half.json", [], 0),
        ("cos_vs_zero.json", [], 1),
        ("boundary_exp_minus.json", ["--fuel", "30"], 2),
        ("sqrt2_vs_pi.json", [], 0),
    ],
)
def test_decide_exit_codes(capsys, fname, extra, code):
    got, out, _ = run(capsys, "decide", "ultimate-ineq", INSTANCES / fname, *extra)
    assert got == code
    report = json.loads(out)
    assert report["verdict"] == ["true", "false", "exhausted"][code]
    again, out2, _ = run(capsys, "decide", "ultimate-ineq", INSTANCES / fname, *extra)
    assert again == code and json.loads(out2)["final_precision"] == report["final_precision"]


def test_decide_equality_and_trace(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "decide", "equality", INSTANCES / "boundary_exp_minus.json", "--trace", trace)
    assert code == 0 and json.loads(out)["question"] == "f differs from g"
    code, _, _ = run(capsys, "decide", "ultimate-ineq", INSTANCES / "boundary_exp_minus.json", "--fuel", "7", "--trace", trace)
    assert code == 2
    records = [json.loads(x) for x in trace.read_text().splitlines()]
    assert [r["N"] for r in records] == list(range(7))
    assert all(r["fired"] is None for r in records)


def test_roots(capsys):
    code, out, _ = run(capsys, "roots", INSTANCES / "quadratic_roots.json", "-p", "30")
    lines = out.strip().splitlines()
    assert code == 0 and sorted(x.split()[0] for x in lines) == ["1", "2"]
    code, out, _ = run(capsys, "roots", INSTANCES / "cos_vs_zero.json", "--block", "g")
    assert code == 0 and out.strip() == "[]"


def test_coeff(capsys):
    code, out, _ = run(capsys, "coeff", INSTANCES / "boundary_exp_minus.json", "--m1", "1")
    assert code == 0
    assert "G = -2" in out and "(-1)^(n-m1) G = 2" in out
    code, out, _ = run(capsys, "coeff", INSTANCES / "cosh_vs_5exp_half.json", "--m1", "1")
    assert code == 0 and out.splitlines()[0].startswith("G = -2")
    code, _, err = run(capsys, "coeff", INSTANCES / "cosh_vs_5exp_half.json", "--m1", "5")
    assert code == 3 and "--m1" in err


def test_forge_equal(capsys, tmp_path):
    code, out, _ = run(capsys, "forge", "equal", INSTANCES / "near_equal.json", "--eps", "1/10000")
    assert code == 0
    data = json.loads(out)
    assert data["meta"]["within_bound"] is True
    f, g = parse_instance(data)
    assert exactly_equal(f, g)
    far = write(tmp_path, {"f": {"order": 1, "coefficients": ["-1"], "initial": ["1"], "roots": ["1"]},
                           "g": {"order": 1, "coefficients": ["3"], "initial": ["9"], "roots": ["-3"]}})
    code, _, err = run(capsys, "forge", "equal", far, "--eps", "1/2")
    assert code == 1 and "hypothesis" in err


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--family", "shared-dominant-coefficient", "--k", "1..3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["k"] for r in rows] == ["1", "2", "3"]
    assert all(r["outcome"] == "true" for r in rows)
    code, out, _ = run(capsys, "bench", "--family", "identically-equal", "--k", "5..4")
    assert out.strip() == "k,outcome,iterations,precision,wall_time,flag"
    code, out, _ = run(capsys, "bench", "--family", "identically-equal", "--k", "6..6", "--fuel", "1")
    (row,) = csv.DictReader(io.StringIO(out))
    assert row["outcome"] == "exhausted" and row["flag"] == "exhausted"


def test_k_range_parsing():
    assert list(parse_k_range("2..4")) == [2, 3, 4]
    with pytest.raises(InstanceError):
        parse_k_range("7")


@pytest.mark.parametrize(
    "payload,needle",
    [
        ('{"f": {"order": 1, "coefficients": [0.5], "initial": ["1"]}}', "float"),
        ('{"f": {"order": 2, "coefficients": ["1", "2"], "initial": ["1"]}}', "f.initial"),
        ('{"f": {"order": 1, "coefficients": ["x"], "initial": ["1"]}}', "f.coefficients[0]"),
        ('{"f": {"order": 1, "coefficients": ["1"], "initial": ["1"]', "1:"),
        ('{"h": {}}', "unknown keys"),
        ('{"f": {"order": 1, "coefficients": ["5"], "initial": ["1"], "roots": ["1"]}}', "disagree"),
    ],
)
def test_diagnostics(capsys, tmp_path, payload, needle):
    code, _, err = run(capsys, "decide", "ultimate-ineq", write(tmp_path, payload))
    assert code == 3 and needle in err


number = st.one_of(
    st.integers(-50, 50),
    st.fractions(-20, 20, max_denominator=30).map(str),
    st.sampled_from(["sqrt2", "-pi", "e", "sqrt(7)", "0.125", "-1e-3"]),
)


@st.composite
def blocks(draw):
    n = draw(st.integers(0, 3))
    return {"order": n, "coefficients": draw(st.lists(number, min_size=n, max_size=n)),
            "initial": draw(st.lists(number, min_size=n, max_size=n))}


@given(blocks(), blocks())
def test_round_trip(f, g):
    once = serialize_instance(*parse_instance({"f": f, "g": g}))
    twice = serialize_instance(*parse_instance(json.loads(json.dumps(once))))
    assert once == twice


def test_round_trip_with_roots_and_complex():
    data = {"f": {"order": 2, "coefficients": ["1", "0"], "initial": ["1", "0"],
                  "roots": [{"re": "0", "im": "1"}, {"re": "0", "im": "-1"}]}}
    once = serialize_instance(*parse_instance(data))
    assert serialize_instance(*parse_instance(once)) == once
    assert once["f"]["roots"] == [{"re": "0", "im": "1"}, {"re": "0", "im": "-1"}]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cfineq", "decide", "ultimate-ineq", str(INSTANCES / "cos_vs_zero.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 1 and json.loads(proc.stdout)["verdict"] == "false"
