from __future__ import annotations

import json
import struct

import numpy as np
import pytest

import certbound.transform as transform
from certbound.certify import MAGIC, Certificate, read_certificate, verify, write_certificate
from certbound.codec import Alphabet
from certbound.engine import RunConfig, compute_bound
from certbound.errors import InvalidInputError, StructuralError
from certbound.fixedpoint import FxScale, FxVector
from certbound.transform import Problem

from conftest import reference_T

P = 100_000


def worked(r_num=50005):
    return Certificate(Problem.EDIT, 2, 1, P, r_num, np.array([50000, 150000], dtype=np.int64))


def computed(problem, k, h, iterations=20):
    return compute_bound(RunConfig(Problem(problem), Alphabet(k, h), FxScale(P), iterations)).certificate


@pytest.mark.parametrize("r_num,valid", [(50005, True), (25000, True), (24999, False), (10**6, True), (0, False)])
def test_worked_certificate(r_num, valid):
    assert bool(verify(worked(r_num))) is valid


def test_witness_is_first_failing_ordinal():
    verdict = verify(worked(24999))
    assert verdict.witness == 0
    assert not verdict.valid


@pytest.mark.parametrize("fmt", ["json", "binary"])
def test_roundtrip_small(tmp_path, fmt):
    cert = worked()
    path = tmp_path / f"c.{fmt}"
    write_certificate(cert, path, fmt)
    back = read_certificate(path)
    assert back == cert
    assert back.problem is Problem.EDIT


def test_roundtrip_million_entries_byte_identical(tmp_path):
    cert = computed("edit", 2, 11, 12)
    assert cert.values.shape[0] >= 10**6
    a, b = tmp_path / "a.lkcb", tmp_path / "b.lkcb"
    write_certificate(cert, a)
    write_certificate(read_certificate(a), b)
    assert a.read_bytes() == b.read_bytes()
    j = tmp_path / "c.json"
    write_certificate(cert, j, "json")
    assert read_certificate(j) == cert


def test_json_keeps_large_integers_exact(tmp_path):
    cert = worked()
    cert.values = np.array([2**62 + 1, -(2**62) - 3], dtype=np.int64)
    cert.r_num = 2**61 + 7
    path = tmp_path / "c.json"
    write_certificate(cert, path, "json")
    assert read_certificate(path) == cert


def _binary(tmp_path, cert):
    path = tmp_path / "c.lkcb"
    write_certificate(cert, path)
    return path, bytearray(path.read_bytes())


def test_rejects_unknown_version(tmp_path):
    path, raw = _binary(tmp_path, worked())
    raw[4:8] = struct.pack("<I", 2)
    path.write_bytes(bytes(raw))
    with pytest.raises(StructuralError, match="version"):
        read_certificate(path)
    jpath = tmp_path / "c.json"
    write_certificate(worked(), jpath, "json")
    doc = json.loads(jpath.read_text())
    doc["format_version"] = 9
    jpath.write_text(json.dumps(doc))
    with pytest.raises(StructuralError, match="version"):
        read_certificate(jpath)


def test_rejects_unknown_problem_tag(tmp_path):
    path, raw = _binary(tmp_path, worked())
    raw[8] = 7
    path.write_bytes(bytes(raw))
    with pytest.raises(StructuralError, match="tag"):
        read_certificate(path)


@pytest.mark.parametrize("cut", [3, 20, -8, -1])
def test_rejects_truncation(tmp_path, cut):
    path, raw = _binary(tmp_path, worked())
    path.write_bytes(bytes(raw[:cut]))
    with pytest.raises(StructuralError):
        read_certificate(path)


def test_rejects_length_mismatch(tmp_path):
    cert = worked()
    cert.values = np.array([1, 2, 3], dtype=np.int64)
    path = tmp_path / "c.lkcb"
    write_certificate(cert, path)
    with pytest.raises(StructuralError, match="canonical pairs"):
        read_certificate(path)
    with pytest.raises(StructuralError):
        verify(cert)


def test_rejects_garbage_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"format_version": 1, "problem": "edit"}')
    with pytest.raises(StructuralError):
        read_certificate(path)
    path.write_text("not json")
    with pytest.raises(StructuralError):
        read_certificate(path)
    assert not path.read_bytes().startswith(MAGIC)


def test_unknown_write_format(tmp_path):
    with pytest.raises(InvalidInputError):
        write_certificate(worked(), tmp_path / "x", "yaml")


def test_verifier_ignores_transform_plans(monkeypatch):
    good, bad = computed("edit", 3, 3), computed("lcs", 3, 3)
    bad.r_num += 2000

    def boom(*args, **kwargs):
        raise AssertionError("verify must not touch the transform module")

    monkeypatch.setattr(transform, "build_plan", boom)
    monkeypatch.setattr(transform.TransformPlan, "apply", boom)
    monkeypatch.setattr(transform, "pair_rule", boom)
    assert verify(good)
    assert not verify(bad)


def test_corrupted_plan_cannot_rescue_invalid_certificate():
    # every successor redirected to the all-equal pair, which carries a huge value
    pl = transform.build_plan(Alphabet(3, 3), Problem.LCS, transform.Backend.DENSE)
    for name in ("both", "left", "right"):
        arr = pl.arrays[name]
        arr[arr >= 0] = 0
    values = np.zeros(pl.size, dtype=np.int64)
    values[0] = 100 * P
    cert = Certificate(Problem.LCS, 3, 3, P, P // 2, values)  # claims gamma_3 >= 1
    v = FxVector(FxScale(P), values)
    shifted = FxVector(FxScale(P), values - cert.r_num)
    assert (pl.apply(v, shifted).values >= values + cert.r_num).all()
    assert not verify(cert)


@pytest.mark.parametrize("problem,k,h", [("edit", 3, 3), ("edit", 2, 4), ("lcs", 3, 3), ("lcs", 2, 4)])
def test_single_value_tamper_flips_verdict(problem, k, h):
    cert = computed(problem, k, h)
    assert verify(cert)
    sign = -1 if problem == "edit" else 1
    original = cert.values.copy()
    for o in range(len(original)):
        cert.values = original.copy()
        cert.values[o] += sign * 10 * P
        assert not verify(cert), o


@pytest.mark.parametrize("problem,k,h", [("edit", 2, 2), ("edit", 3, 2), ("lcs", 2, 2), ("lcs", 3, 2)])
def test_accepted_certificate_satisfies_exact_inequality(problem, k, h):
    cert = computed(problem, k, h, 30)
    assert verify(cert)
    v = cert.values
    exact = reference_T(problem, k, h, v, v - cert.r_num, P, exact=True)
    for o, e in enumerate(exact):
        if problem == "edit":
            assert e <= int(v[o]) + cert.r_num
        else:
            assert e >= int(v[o]) + cert.r_num


def test_threads_agree():
    cert = computed("lcs", 4, 3)
    for threads in (1, 2, 5):
        assert verify(cert, threads=threads)
    cert.r_num += P
    assert {verify(cert, threads=t).witness for t in (1, 2, 5)} == {verify(cert).witness}


def test_bound_is_twice_rate():
    assert worked().bound * 10000 == 10001
