"""Certificates (problem, k, h, p, r, v) and their independent verifier.

A certificate claims T(v, v - r) <= v + r (edit) or >= v + r (lcs) on the
fixed-point grid.  The verifier below does not use a TransformPlan: it
unranks every canonical pair, rebuilds the successor windows from the
digits, and evaluates T with the conservative rounding of the problem.
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numba as nb
import numpy as np

from .codec import Alphabet, growth_table, relabel, rgs_rank, rgs_unrank
from .errors import InvalidInputError, StructuralError
from .fixedpoint import ceil_div, check_headroom
from .transform import Problem

FORMAT_VERSION = 1
MAGIC = b"LKCB"
_HEADER = struct.Struct("<4sIBIIQqQ")
_PROBLEM_TAGS = {Problem.EDIT: 0, Problem.LCS: 1}


@dataclass(eq=False)
class Certificate:
    problem: Problem
    k: int
    h: int
    p: int
    r_num: int
    values: np.ndarray
    format_version: int = FORMAT_VERSION

    def __eq__(self, other) -> bool:
        if not isinstance(other, Certificate):
            return NotImplemented
        return (
            (self.problem, self.k, self.h, self.p, self.r_num, self.format_version)
            == (other.problem, other.k, other.h, other.p, other.r_num, other.format_version)
            and np.array_equal(self.values, other.values)
        )

    @property
    def bound(self) -> Fraction:
        """2r: an upper bound on alpha_k (edit) or a lower bound on gamma_k (lcs)."""
        return Fraction(2 * self.r_num, self.p)

    def check_structure(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise StructuralError(f"unsupported format version {self.format_version}")
        if not isinstance(self.problem, Problem):
            raise StructuralError(f"unknown problem {self.problem!r}")
        try:
            alphabet = Alphabet(self.k, self.h)
        except InvalidInputError as exc:
            raise StructuralError(str(exc)) from None
        if self.p < 1:
            raise StructuralError("scale p must be positive")
        values = self.values
        if not isinstance(values, np.ndarray) or values.dtype != np.int64 or values.ndim != 1:
            raise StructuralError("values must be a 1-d int64 array")
        expected = int(growth_table(self.k, alphabet.length)[alphabet.length, 0])
        if values.shape[0] != expected:
            raise StructuralError(
                f"k={self.k}, h={self.h} has {expected} canonical pairs, certificate has {values.shape[0]}"
            )


@dataclass(frozen=True)
class Verdict:
    valid: bool
    witness: int | None = None

    def __bool__(self) -> bool:
        return self.valid


# --- verification kernel -----------------------------------------------------

@nb.njit(cache=True, nogil=True)
def _present(w, n, mark, pres):
    """Distinct letters of w[:n] into pres; mark[] is left all zero."""
    m = 0
    for i in range(n):
        x = w[i]
        if mark[x] == 0:
            mark[x] = 1
            pres[m] = x
            m += 1
    for i in range(m):
        mark[pres[i]] = 0
    return m


@nb.njit(cache=True, nogil=True)
def _absent(pres, m, skip, k):
    """Smallest letter < k that is neither in pres[:m] nor equal to skip."""
    for x in range(k):
        if x == skip:
            continue
        found = False
        for i in range(m):
            if pres[i] == x:
                found = True
                break
        if not found:
            return x
    return -1


@nb.njit(cache=True, nogil=True)
def _verify_range(k, h, flag, p, r, table, values, lo, hi):
    L = 2 * h
    kk = k * k
    d = np.empty(L, dtype=np.int64)
    w = np.empty(L, dtype=np.int64)
    rel = np.empty(L, dtype=np.int64)
    scratch = np.full(k, -1, dtype=np.int64)
    mark = np.zeros(k, dtype=np.int64)
    pres = np.empty(L + 2, dtype=np.int64)
    tmp = np.empty(L, dtype=np.int64)
    for o in range(lo, hi):
        rgs_unrank(o, L, table, d)
        # window (s c, t c'): s = d[1:h], t = d[h+1:]
        for i in range(h - 1):
            w[i] = d[1 + i]
            w[h + i] = d[h + 1 + i]
        # letters of s and t, read from the window without its free slots
        for i in range(h - 1):
            tmp[i] = d[1 + i]
            tmp[h - 1 + i] = d[h + 1 + i]
        m = _present(tmp, L - 2, mark, pres)
        f1 = _absent(pres, m, -1, k)
        f2 = _absent(pres, m, f1, k) if f1 >= 0 else -1
        sb = np.int64(0)
        for ci in range(m + 1):
            if ci < m:
                c = pres[ci]
                wc = np.int64(1)
            else:
                if f1 < 0:
                    break
                c = f1
                wc = np.int64(k - m)
            w[h - 1] = c
            for cj in range(m + 2):
                if cj < m:
                    c2 = pres[cj]
                    wc2 = np.int64(1)
                elif cj == m:
                    if f1 < 0:
                        break
                    c2 = f1
                    wc2 = np.int64(k - m) if ci < m else np.int64(1)
                else:
                    if ci < m or f2 < 0:
                        break
                    c2 = f2
                    wc2 = np.int64(k - m - 1)
                w[L - 1] = c2
                relabel(w, L, scratch, rel)
                sb += wc * wc2 * values[rgs_rank(rel, L, table)]
        sb -= kk * r
        target = values[o] + r
        if d[0] == d[h]:
            if flag == 0:
                if ceil_div(sb, kk) > target:
                    return o
            else:
                if p + sb // kk < target:
                    return o
            continue
        # (s c, b t)
        for i in range(h):
            w[h + i] = d[h + i]
        for i in range(h - 1):
            tmp[i] = d[1 + i]
        for i in range(h):
            tmp[h - 1 + i] = d[h + i]
        m = _present(tmp, L - 1, mark, pres)
        f1 = _absent(pres, m, -1, k)
        sl = np.int64(0)
        for ci in range(m + 1):
            if ci < m:
                c = pres[ci]
                wc = np.int64(1)
            else:
                if f1 < 0:
                    break
                c = f1
                wc = np.int64(k - m)
            w[h - 1] = c
            relabel(w, L, scratch, rel)
            sl += wc * values[rgs_rank(rel, L, table)]
        # (a s, t c)
        for i in range(h):
            w[i] = d[i]
        for i in range(h - 1):
            w[h + i] = d[h + 1 + i]
        for i in range(h):
            tmp[i] = d[i]
        for i in range(h - 1):
            tmp[h + i] = d[h + 1 + i]
        m = _present(tmp, L - 1, mark, pres)
        f1 = _absent(pres, m, -1, k)
        sr = np.int64(0)
        for ci in range(m + 1):
            if ci < m:
                c = pres[ci]
                wc = np.int64(1)
            else:
                if f1 < 0:
                    break
                c = f1
                wc = np.int64(k - m)
            w[L - 1] = c
            relabel(w, L, scratch, rel)
            sr += wc * values[rgs_rank(rel, L, table)]
        if flag == 0:
            if p + min(ceil_div(sl, k), ceil_div(sr, k), ceil_div(sb, kk)) > target:
                return o
        else:
            if max(sl // k, sr // k) < target:
                return o
    return -1


def verify(cert: Certificate, threads: int = 1) -> Verdict:
    """Exact integer check of T(v, v - r) against v + r; reports the first failing ordinal."""
    cert.check_structure()
    k, h = cert.k, cert.h
    values = cert.values
    check_headroom(values, k * k, abs(cert.r_num) + cert.p)
    if abs(cert.r_num) * k * k >= 1 << 62:
        raise StructuralError("r_num too large for exact 64-bit verification")
    table = growth_table(k, 2 * h)
    n = values.shape[0]
    threads = max(1, int(threads))
    bounds = np.linspace(0, n, threads + 1).astype(np.int64)
    results = [-1] * threads
    flag = cert.problem.flag

    def chunk(i, lo, hi):
        results[i] = _verify_range(k, h, flag, cert.p, cert.r_num, table, values, lo, hi)

    if threads == 1:
        chunk(0, 0, n)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for f in [pool.submit(chunk, i, int(bounds[i]), int(bounds[i + 1])) for i in range(threads)]:
                f.result()
    bad = [x for x in results if x >= 0]
    if bad:
        return Verdict(False, int(min(bad)))
    return Verdict(True)


# --- serialization -----------------------------------------------------------

def write_certificate(cert: Certificate, path: str | Path, fmt: str = "binary") -> None:
    path = Path(path)
    if fmt == "json":
        doc = {
            "format_version": cert.format_version,
            "problem": cert.problem.value,
            "k": cert.k,
            "h": cert.h,
            "p": cert.p,
            "r_num": str(cert.r_num),
            "values": [str(x) for x in cert.values.tolist()],
        }
        path.write_text(json.dumps(doc) + "\n")
    elif fmt == "binary":
        header = _HEADER.pack(MAGIC, cert.format_version, _PROBLEM_TAGS[cert.problem], cert.k, cert.h,
                              cert.p, cert.r_num, cert.values.shape[0])
        with open(path, "wb") as fh:
            fh.write(header)
            cert.values.astype("<i8", copy=False).tofile(fh)
    else:
        raise InvalidInputError(f"unknown certificate format {fmt!r}")


def _read_binary(path: Path) -> Certificate:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise StructuralError("truncated certificate header")
        _, version, tag, k, h, p, r_num, count = _HEADER.unpack(head)
        if version != FORMAT_VERSION:
            raise StructuralError(f"unsupported format version {version}")
        problems = {v: key for key, v in _PROBLEM_TAGS.items()}
        if tag not in problems:
            raise StructuralError(f"unknown problem tag {tag}")
        values = np.fromfile(fh, dtype="<i8")
    if values.shape[0] != count:
        raise StructuralError(f"header announces {count} values, file holds {values.shape[0]}")
    cert = Certificate(problems[tag], k, h, p, r_num, values.astype(np.int64, copy=False), version)
    cert.check_structure()
    return cert


def _read_json(path: Path) -> Certificate:
    try:
        doc = json.loads(path.read_text())
        version = int(doc["format_version"])
        if version != FORMAT_VERSION:
            raise StructuralError(f"unsupported format version {version}")
        try:
            problem = Problem(doc["problem"])
        except ValueError:
            raise StructuralError(f"unknown problem tag {doc['problem']!r}") from None
        values = np.array([int(x) for x in doc["values"]], dtype=np.int64)
        cert = Certificate(problem, int(doc["k"]), int(doc["h"]), int(doc["p"]), int(doc["r_num"]),
                           values, version)
    except StructuralError:
        raise
    except (KeyError, TypeError, ValueError, OverflowError) as exc:
        raise StructuralError(f"malformed JSON certificate: {exc}") from None
    cert.check_structure()
    return cert


def read_certificate(path: str | Path) -> Certificate:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
    if magic == MAGIC:
        return _read_binary(path)
    return _read_json(path)
