"""Ground truth at small scale: exact dynamic programs and exhaustive expectations.

Nothing here feeds the certified path; it exists to cross-check the
transformation and to give context for the bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numba as nb
import numpy as np

from .codec import Alphabet, CanonicalSpace, code_to_digits
from .errors import CapacityError, InvalidInputError
from .transform import Problem

ENUMERATION_LIMIT = 10**8
_CHUNK = 1 << 16


def _as_digits(word: str | Sequence[int]) -> list[int]:
    if isinstance(word, str):
        return [ord(ch) - ord("a") for ch in word]
    return [int(x) for x in word]


def edit_distance(u: str | Sequence, v: str | Sequence) -> int:
    """Levenshtein distance (unit-cost substitutions, insertions, deletions)."""
    prev = list(range(len(v) + 1))
    for i, a in enumerate(u, 1):
        cur = [i] + [0] * len(v)
        for j, b in enumerate(v, 1):
            cur[j] = prev[j - 1] if a == b else 1 + min(prev[j - 1], prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def lcs(u: str | Sequence, v: str | Sequence) -> int:
    prev = [0] * (len(v) + 1)
    for a in u:
        cur = [0] * (len(v) + 1)
        for j, b in enumerate(v, 1):
            cur[j] = prev[j - 1] + 1 if a == b else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


@nb.njit(cache=True)
def edit_distance_arr(a, la, b, lb):
    row = np.empty(lb + 1, dtype=np.int64)
    for j in range(lb + 1):
        row[j] = j
    for i in range(1, la + 1):
        diag = row[0]
        row[0] = i
        for j in range(1, lb + 1):
            up = row[j]
            if a[i - 1] == b[j - 1]:
                row[j] = diag
            else:
                row[j] = 1 + min(diag, up, row[j - 1])
            diag = up
    return row[lb]


@nb.njit(cache=True)
def lcs_arr(a, la, b, lb):
    row = np.zeros(lb + 1, dtype=np.int64)
    for i in range(1, la + 1):
        diag = 0
        for j in range(1, lb + 1):
            up = row[j]
            if a[i - 1] == b[j - 1]:
                row[j] = diag + 1
            else:
                row[j] = max(up, row[j - 1])
            diag = up
    return row[lb]


# --- exact expectations over all continuations -------------------------------

@dataclass(frozen=True)
class ExactExpectation:
    """Unreduced fraction numerator / k^(2n)."""

    numerator: int
    denominator: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator} = {float(self.value):.10g}"


def _split_values(problem: Problem, s, t, xs, ys, n_max, lcs_split):
    """Per-row best value over splits i + j = n, for every n <= n_max.

    xs, ys: (rows, n_max) letter arrays.  Returns (n_max + 1, rows).
    """
    rows = xs.shape[0]
    A = np.concatenate([np.broadcast_to(np.array(s, dtype=np.int64), (rows, len(s))), xs], axis=1)
    B = np.concatenate([np.broadcast_to(np.array(t, dtype=np.int64), (rows, len(t))), ys], axis=1)
    la, lb = A.shape[1], B.shape[1]
    D = np.empty((la + 1, lb + 1, rows), dtype=np.int64)
    edit = problem is Problem.EDIT
    for i in range(la + 1):
        for j in range(lb + 1):
            if i == 0 or j == 0:
                D[i, j] = (i + j) if edit else 0
                continue
            eq = A[:, i - 1] == B[:, j - 1]
            if edit:
                alt = 1 + np.minimum(np.minimum(D[i - 1, j - 1], D[i - 1, j]), D[i, j - 1])
                D[i, j] = np.where(eq, D[i - 1, j - 1], alt)
            else:
                D[i, j] = np.where(eq, D[i - 1, j - 1] + 1, np.maximum(D[i - 1, j], D[i, j - 1]))
    out = np.empty((n_max + 1, rows), dtype=np.int64)
    reduce = np.minimum if (edit or lcs_split == "min") else np.maximum
    for n in range(n_max + 1):
        best = D[len(s), len(t) + n].copy()
        for i in range(1, n + 1):
            best = reduce(best, D[len(s) + i, len(t) + n - i])
        out[n] = best
    return out


def expected_split_values(problem: Problem | str, s, t, n_max: int, k: int,
                          lcs_split: str = "max") -> list[ExactExpectation]:
    """Exact V_n(s, t) (edit) or W_n(s, t) (lcs) for n = 0..n_max.

    V_n(s, t) = E[min_{i+j=n} d_e(s x_1..x_i, t y_1..y_j)] over uniform letters;
    W_n uses LCS and, by default, the maximum over splits (``lcs_split``).
    One enumeration over all (x, y) in A^n_max x A^n_max serves every n,
    since the value at n only reads the first n letters.
    """
    problem = Problem(problem)
    s, t = _as_digits(s), _as_digits(t)
    if any(not 0 <= d < k for d in s + t):
        raise InvalidInputError(f"letters must lie in [0, {k})")
    total = k ** (2 * n_max)
    if total > ENUMERATION_LIMIT:
        raise CapacityError(f"k^(2n) = {total} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    sums = [0] * (n_max + 1)
    powers = k ** np.arange(2 * n_max - 1, -1, -1, dtype=np.int64)
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        letters = (idx[:, None] // powers[None, :]) % k
        vals = _split_values(problem, s, t, letters[:, :n_max], letters[:, n_max:], n_max, lcs_split)
        for n in range(n_max + 1):
            sums[n] += int(vals[n].sum())
    out = []
    for n in range(n_max + 1):
        scale = k ** (2 * (n_max - n))
        assert sums[n] % scale == 0
        out.append(ExactExpectation(sums[n] // scale, k ** (2 * n)))
    return out


def exact_expected_min(problem: Problem | str, s, t, n: int, k: int,
                       lcs_split: str = "max") -> ExactExpectation:
    return expected_split_values(problem, s, t, n, k, lcs_split)[n]


# --- the Facts behind T, checked on exact values ----------------------------

@dataclass
class FactReport:
    k: int
    h: int
    n_max: int
    checked: int = 0
    violations: list[tuple[str, int, tuple, tuple]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def fact_soundness(problem: Problem | str, k: int, h: int, n_max: int,
                   lcs_split: str = "max") -> FactReport:
    """Check the one-step bounds behind T on exact V_n / W_n for every canonical pair.

    edit: V_n(as, at) <= avg V_{n-2}(sc, tc');
          V_n(as, bt) <= 1 + min(avg V_{n-1}(sc, bt), avg V_{n-1}(as, tc), avg V_{n-2}(sc, tc')).
    lcs:  W_n(as, at) >= 1 + avg W_{n-2}(sc, tc');
          W_n(as, bt) >= max(avg W_{n-1}(sc, bt), avg W_{n-1}(as, tc)).
    """
    problem = Problem(problem)
    alphabet = Alphabet(k, h)
    table: dict[tuple, list[Fraction]] = {}
    for code in range(alphabet.n_pairs):
        d = code_to_digits(code, k, 2 * h)
        u, v = tuple(d[:h]), tuple(d[h:])
        table[(u, v)] = [e.value for e in expected_split_values(problem, u, v, n_max, k, lcs_split)]
    report = FactReport(k, h, n_max)
    letters = range(k)
    for _, rep in CanonicalSpace(alphabet):
        d = code_to_digits(rep, k, 2 * h)
        u, v = tuple(d[:h]), tuple(d[h:])
        a, s, b, t = u[0], u[1:], v[0], v[1:]
        for n in range(2, n_max + 1):
            both = sum(table[(s + (c,), t + (c2,))][n - 2] for c, c2 in product(letters, letters)) / k**2
            here = table[(u, v)][n]
            report.checked += 1
            if a == b:
                ok = here <= both if problem is Problem.EDIT else here >= 1 + both
                name = "same-letter"
            else:
                left = sum(table[(s + (c,), v)][n - 1] for c in letters) / k
                right = sum(table[(u, t + (c,))][n - 1] for c in letters) / k
                if problem is Problem.EDIT:
                    ok = here <= 1 + min(left, right, both)
                else:
                    ok = here >= max(left, right)
                name = "diff-letter"
            if not ok:
                report.violations.append((name, n, u, v))
    return report


# --- decomposition inequalities ------------------------------------------------

@dataclass
class DecompositionReport:
    cases: int
    edit_violations: int
    lcs_violations: int
    first_violation: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.edit_violations == 0 and self.lcs_violations == 0


@nb.njit(cache=True)
def _decomposition_batch(letters, lengths):
    """letters: (cases, 4, maxlen); lengths: (cases, 4) for u, v, u', v'."""
    n = letters.shape[0]
    maxlen = letters.shape[2]
    uv = np.empty(2 * maxlen, dtype=np.int64)
    uv2 = np.empty(2 * maxlen, dtype=np.int64)
    bad_edit = 0
    bad_lcs = 0
    first = -1
    for i in range(n):
        lu, lv, lu2, lv2 = lengths[i, 0], lengths[i, 1], lengths[i, 2], lengths[i, 3]
        for j in range(lu):
            uv[j] = letters[i, 0, j]
        for j in range(lv):
            uv[lu + j] = letters[i, 1, j]
        for j in range(lu2):
            uv2[j] = letters[i, 2, j]
        for j in range(lv2):
            uv2[lu2 + j] = letters[i, 3, j]
        whole = edit_distance_arr(uv, lu + lv, uv2, lu2 + lv2)
        parts = edit_distance_arr(letters[i, 0], lu, letters[i, 2], lu2) + edit_distance_arr(
            letters[i, 1], lv, letters[i, 3], lv2)
        if whole > parts:
            bad_edit += 1
            if first < 0:
                first = i
        whole = lcs_arr(uv, lu + lv, uv2, lu2 + lv2)
        parts = lcs_arr(letters[i, 0], lu, letters[i, 2], lu2) + lcs_arr(letters[i, 1], lv, letters[i, 3], lv2)
        if whole < parts:
            bad_lcs += 1
            if first < 0:
                first = i
    return bad_edit, bad_lcs, first


def _report(letters, lengths) -> DecompositionReport:
    be, bl, first = _decomposition_batch(letters, lengths)
    witness = None
    if first >= 0:
        witness = tuple(tuple(letters[first, w, : lengths[first, w]].tolist()) for w in range(4))
    return DecompositionReport(letters.shape[0], int(be), int(bl), witness)


def decomposition_checks(samples: int, max_len: int, k: int, seed: int = 0) -> DecompositionReport:
    """Random check of d_e(uv, u'v') <= d_e(u, u') + d_e(v, v') and LCS(uv, u'v') >= LCS(u, u') + LCS(v, v')."""
    rng = np.random.default_rng(seed)
    letters = rng.integers(0, k, size=(samples, 4, max(max_len, 1)), dtype=np.int64)
    lengths = rng.integers(0, max_len + 1, size=(samples, 4), dtype=np.int64)
    return _report(letters, lengths)


def decomposition_exhaustive(k: int, max_len: int) -> DecompositionReport:
    words = [w for n in range(max_len + 1) for w in product(range(k), repeat=n)]
    quads = list(product(words, repeat=4))
    letters = np.zeros((len(quads), 4, max(max_len, 1)), dtype=np.int64)
    lengths = np.zeros((len(quads), 4), dtype=np.int64)
    for i, q in enumerate(quads):
        for w, word in enumerate(q):
            letters[i, w, : len(word)] = word
            lengths[i, w] = len(word)
    return _report(letters, lengths)


# --- Monte Carlo context -------------------------------------------------------

@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    exact: Fraction | None = None


@nb.njit(cache=True)
def _mc_batch(xs, ys, flag):
    out = np.empty(xs.shape[0], dtype=np.int64)
    n = xs.shape[1]
    for i in range(xs.shape[0]):
        if flag == 0:
            out[i] = edit_distance_arr(xs[i], n, ys[i], n)
        else:
            out[i] = lcs_arr(xs[i], n, ys[i], n)
    return out


def mc_estimate(problem: Problem | str, k: int, n: int, samples: int = 10_000, seed: int = 0) -> MCEstimate:
    """Mean of d_e/n or LCS/n for two uniform length-n strings.

    When k^(2n) <= samples every pair is enumerated and the exact mean is
    returned; otherwise pairs are drawn from numpy's PCG64 generator seeded
    with ``seed``.
    """
    problem = Problem(problem)
    if n < 1 or samples < 1:
        raise InvalidInputError("n and samples must be positive")
    flag = problem.flag
    total = k ** (2 * n)
    if total <= samples:
        idx = np.arange(total, dtype=np.int64)
        powers = k ** np.arange(2 * n - 1, -1, -1, dtype=np.int64)
        letters = (idx[:, None] // powers[None, :]) % k
        vals = _mc_batch(np.ascontiguousarray(letters[:, :n]), np.ascontiguousarray(letters[:, n:]), flag)
        exact = Fraction(int(vals.sum()), total * n)
        return MCEstimate(float(exact), 0.0, total, exact)
    rng = np.random.default_rng(seed)
    acc = []
    left = samples
    batch = max(1, min(samples, (1 << 22) // (2 * n)))
    while left:
        m = min(batch, left)
        xs = rng.integers(0, k, size=(m, n), dtype=np.int64)
        ys = rng.integers(0, k, size=(m, n), dtype=np.int64)
        acc.append(_mc_batch(xs, ys, flag))
        left -= m
    vals = np.concatenate(acc) / n
    stderr = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MCEstimate(float(vals.mean()), stderr, samples)


__all__ = [
    "edit_distance", "lcs", "ExactExpectation", "expected_split_values", "exact_expected_min",
    "fact_soundness", "FactReport", "decomposition_checks", "decomposition_exhaustive",
    "DecompositionReport", "mc_estimate", "MCEstimate",
]
