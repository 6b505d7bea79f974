import json
import os
import subprocess
import sys

import pytest

from kwitness import formats
from kwitness.cli import main
from kwitness.complexes import free_module
from kwitness.matrix import Matrix
from kwitness.nil import NilMulticomplex
from kwitness.rings import INTEGERS

from conftest import Z


def write_instance(path, N):
    formats.write_json_file(path, formats.instance_to_json(N))
    return str(path)


@pytest.fixture
def n0(tmp_path):
    N = NilMulticomplex.build(free_module(INTEGERS, 2), {(): Z([[0, 1], [0, 0]])})
    return write_instance(tmp_path / "n0.json", N)


def test_validate(n0, tmp_path, capsys):
    assert main(["validate", n0]) == 0
    bad = NilMulticomplex.build(free_module(INTEGERS, 2), {(): Matrix.identity(INTEGERS, 2)})
    assert main(["validate", write_instance(tmp_path / "id.json", bad)]) == 1
    assert "nilpotency" in capsys.readouterr().out
    trunc = tmp_path / "t.json"
    trunc.write_text(open(n0).read()[:40])
    assert main(["validate", str(trunc)]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_reduce_and_verify(n0, tmp_path):
    out = str(tmp_path / "c.json")
    assert main(["reduce", n0, "--out", out]) == 0
    assert main(["verify", out]) == 0
    assert main(["reduce", n0, "--strategy", "paper-min-index", "--out", out]) == 0
    assert main(["verify", out]) == 0


def test_reduce_failure_report(diag121, tmp_path, capsys):
    N = NilMulticomplex.build(diag121, {(1,): Z([[0, 1], [0, 0]])})
    path = write_instance(tmp_path / "d.json", N)
    out = str(tmp_path / "f.json")
    assert main(["reduce", path, "--out", out]) == 1
    assert "sub line at direction 1" in capsys.readouterr().out
    report = json.load(open(out))
    assert report["annotation"]["failures"]
    # the report re-validates as an instance
    assert main(["validate", out]) == 0


def test_reduce_zero_and_invalid(tmp_path):
    zero = write_instance(tmp_path / "z.json", NilMulticomplex.build(free_module(INTEGERS, 3)))
    assert main(["reduce", zero, "--out", str(tmp_path / "c.json")]) == 0
    cert = json.load(open(tmp_path / "c.json"))
    assert [s["kind"] for s in cert["steps"]] == ["Isomorphism"]
    bad = write_instance(tmp_path / "b.json", NilMulticomplex.build(
        free_module(INTEGERS, 1), {(): Z([[1]])}))
    assert main(["reduce", bad, "--out", str(tmp_path / "c2.json")]) == 2


def test_verify_rejections(n0, tmp_path):
    out = tmp_path / "c.json"
    assert main(["reduce", n0, "--out", str(out)]) == 0
    cert = json.loads(out.read_text())
    tampered = json.loads(json.dumps(cert))
    m = tampered["steps"][0]["inclusion"][0]["matrix"]
    m[0][0] = str(int(m[0][0]) + 1)
    (tmp_path / "t.json").write_text(json.dumps(tampered))
    assert main(["verify", str(tmp_path / "t.json")]) == 1
    empty = dict(cert, steps=[], claim={"target": cert["claim"]["target"], "coefficients": []})
    (tmp_path / "e.json").write_text(json.dumps(empty))
    assert main(["verify", str(tmp_path / "e.json")]) == 1
    (tmp_path / "g.json").write_text("{")
    assert main(["verify", str(tmp_path / "g.json")]) == 2
    assert main(["verify", n0]) == 2


def test_gen(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "--seed", "7", "--dim", "1", "--count", "5", "--out", str(a)]) == 0
    assert main(["gen", "--seed", "7", "--dim", "1", "--count", "5", "--out", str(b)]) == 0
    names = sorted(os.listdir(a))
    assert len(names) == 5 and names == sorted(os.listdir(b))
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
        assert main(["validate", str(a / n)]) == 0


def test_gen_rejects_bad_flags(tmp_path):
    out = str(tmp_path / "g")
    assert main(["gen", "--seed", "7", "--dim", "3", "--out", out]) == 2
    assert main(["gen", "--seed", "7", "--dim", "1", "--count", "0", "--out", out]) == 2
    assert main(["gen", "--seed", "x", "--dim", "1", "--out", out]) == 2
    assert main(["bogus"]) == 2
    assert main([]) == 2


def test_threads_variable(tmp_path, monkeypatch):
    out = str(tmp_path / "g")
    monkeypatch.setenv("KWITNESS_THREADS", "zero")
    assert main(["gen", "--seed", "1", "--dim", "0", "--out", out]) == 2
    monkeypatch.setenv("KWITNESS_THREADS", "0")
    assert main(["gen", "--seed", "1", "--dim", "0", "--out", out]) == 2


def _run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "kwitness", *args], capture_output=True,
                          text=True, env={**os.environ, **(env or {})})


def test_subprocess_exit_codes_and_parallel_determinism(tmp_path):
    one, two = tmp_path / "one", tmp_path / "two"
    r1 = _run("gen", "--seed", "3", "--dim", "2", "--count", "4", "--out", str(one))
    r2 = _run("gen", "--seed", "3", "--dim", "2", "--count", "4", "--out", str(two),
              env={"KWITNESS_THREADS": "2"})
    assert r1.returncode == r2.returncode == 0
    for n in sorted(os.listdir(one)):
        assert (one / n).read_bytes() == (two / n).read_bytes()
    assert _run("gen", "--seed", "3", "--dim", "3", "--out", str(one)).returncode == 2
    assert _run("verify", str(tmp_path / "nope.json")).returncode == 2


def test_selftest_linalg():
    r = _run("selftest", "--suite", "linalg", "--seed", "1")
    assert r.returncode == 0, r.stdout + r.stderr
    assert "suite linalg: PASS" in r.stdout


@pytest.mark.parametrize("suite", ["nil0", "tamper"])
def test_selftest_suites(suite, capsys):
    assert main(["selftest", "--suite", suite, "--seed", "1"]) == 0
    assert f"suite {suite}: PASS" in capsys.readouterr().out
