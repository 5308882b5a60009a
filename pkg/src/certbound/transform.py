"""One step of the window recurrence, T(v_{n-1}, v_{n-2}), for edit distance and LCS.

For a canonical pair (a.s, b.t) the window slides by one letter: the first
letter is dropped and a fresh random letter is appended.

edit, a == b:  ceil( sum_{c,c'} v2(sc, tc') / k^2 )
edit, a != b:  p + min( ceil(sum_c v1(sc, bt) / k), ceil(sum_c v1(as, tc) / k),
                        ceil(sum_{c,c'} v2(sc, tc') / k^2) )
lcs,  a == b:  p + floor( sum_{c,c'} v2(sc, tc') / k^2 )
lcs,  a != b:  max( floor(sum_c v1(sc, bt) / k), floor(sum_c v1(as, tc) / k) )

Three storage layouts compute the same numbers:

* ``binary``: k = 2 only, successors derived from the packed bits on every pass.
* ``dense``: every successor ordinal stored (k^2 + 2k per pair).
* ``sparse``: letters absent from the window are interchangeable, so each sum
  is stored as a multiset of (ordinal, multiplicity) with O(h^2) keys no
  matter how large k is.  The multisets depend only on the suffix pair
  (s, t), (s, bt) or (as, t), so they are stored once per suffix class and
  every pair points at its three suffix classes.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from . import capacity
from .codec import (
    Alphabet,
    CanonicalSpace,
    first_occurrence,
    growth_table,
    relabel,
    rgs_rank,
    rgs_unrank,
)
from .errors import InvalidConfigError, InvalidInputError
from .fixedpoint import FxScale, FxVector, ceil_div, check_headroom

EDIT_FLAG = 0
LCS_FLAG = 1


class Problem(enum.Enum):
    EDIT = "edit"
    LCS = "lcs"

    @property
    def flag(self) -> int:
        return EDIT_FLAG if self is Problem.EDIT else LCS_FLAG


class Backend(enum.Enum):
    BINARY = "binary"
    DENSE = "dense"
    SPARSE = "sparse"


class RuleKind(enum.Enum):
    SAME_LETTER = "same"
    DIFF_LETTER = "diff"


@dataclass(frozen=True)
class PairRule:
    kind: RuleKind
    succ_both: list[int]
    succ_left: list[int] = field(default_factory=list)
    succ_right: list[int] = field(default_factory=list)


def pair_rule(space: CanonicalSpace, ordinal: int) -> PairRule:
    """Successor lists of one canonical pair, computed letter by letter."""
    k, h = space.alphabet.k, space.alphabet.h
    rep = space.representative(ordinal)
    digits = [0] * (2 * h)
    code = rep
    for i in range(2 * h - 1, -1, -1):
        code, digits[i] = divmod(code, k)
    u, v = digits[:h], digits[h:]
    a, s, b, t = u[0], u[1:], v[0], v[1:]

    def ordinal_of(x, y):
        rel, _ = first_occurrence(x + y, k)
        return int(rgs_rank(np.array(rel, dtype=np.int64), 2 * h, space.table))

    both = [ordinal_of(s + [c], t + [c2]) for c in range(k) for c2 in range(k)]
    if a == b:
        return PairRule(RuleKind.SAME_LETTER, both)
    left = [ordinal_of(s + [c], v) for c in range(k)]
    right = [ordinal_of(u, t + [c]) for c in range(k)]
    return PairRule(RuleKind.DIFF_LETTER, both, left, right)


def both_multiset(k: int, s, t) -> dict[tuple[int, ...], int]:
    """Compressed multiset {canonical (sc, tc') digits: multiplicity} over all k^2 letter pairs."""
    rel, _ = first_occurrence(list(s) + list(t), k)
    s, t = rel[: len(s)], rel[len(s) :]
    m = len(set(rel))
    out: dict[tuple[int, ...], int] = {}

    def add(c, c2, mult):
        if mult > 0:
            key = tuple(first_occurrence(s + [c] + t + [c2], k)[0])
            out[key] = out.get(key, 0) + mult

    for c in range(m):
        for c2 in range(m):
            add(c, c2, 1)
        add(c, m, k - m)
    if k > m:
        for c2 in range(m + 1):
            add(m, c2, k - m)
        add(m, m + 1, (k - m) * (k - m - 1))
    return out


# --- kernels -----------------------------------------------------------------

@nb.njit(cache=True, nogil=True)
def _binary_apply(h, flag, p, v1, v2, lo, hi, out):
    full = (np.int64(1) << (2 * h)) - 1
    top = 2 * h - 1
    hmask = (np.int64(1) << h) - 1
    smask = (np.int64(1) << (h - 1)) - 1
    for o in range(lo, hi):
        u = o >> h
        v = o & hmask
        s = u & smask
        t = v & smask
        both = np.int64(0)
        for c in range(2):
            x = ((s << 1) | c) << h
            for c2 in range(2):
                code = x | (t << 1) | c2
                if code >> top:
                    code ^= full
                both += v2[code]
        same = (v >> (h - 1)) == 0
        if flag == 0:
            vb = ceil_div(both, 4)
            if same:
                out[o] = vb
                continue
            left = np.int64(0)
            right = np.int64(0)
            for c in range(2):
                code = (((s << 1) | c) << h) | v
                if code >> top:
                    code ^= full
                left += v1[code]
                code = (u << h) | (t << 1) | c
                if code >> top:
                    code ^= full
                right += v1[code]
            best = min(ceil_div(left, 2), ceil_div(right, 2), vb)
            out[o] = p + best
        else:
            if same:
                out[o] = p + both // 4
                continue
            left = np.int64(0)
            right = np.int64(0)
            for c in range(2):
                code = (((s << 1) | c) << h) | v
                if code >> top:
                    code ^= full
                left += v1[code]
                code = (u << h) | (t << 1) | c
                if code >> top:
                    code ^= full
                right += v1[code]
            out[o] = max(left // 2, right // 2)


@nb.njit(cache=True, nogil=True)
def _dense_build(k, h, table, lo, hi, both, left, right):
    L = 2 * h
    d = np.empty(L, dtype=np.int64)
    w = np.empty(L, dtype=np.int64)
    rel = np.empty(L, dtype=np.int64)
    scratch = np.full(k, -1, dtype=np.int64)
    for o in range(lo, hi):
        rgs_unrank(o, L, table, d)
        # (s c, t c')
        for i in range(h - 1):
            w[i] = d[1 + i]
            w[h + i] = d[h + 1 + i]
        for c in range(k):
            w[h - 1] = c
            for c2 in range(k):
                w[L - 1] = c2
                relabel(w, L, scratch, rel)
                both[o, c * k + c2] = rgs_rank(rel, L, table)
        if d[0] == d[h]:
            for c in range(k):
                left[o, c] = -1
                right[o, c] = -1
            continue
        # (s c, b t)
        for i in range(h):
            w[h + i] = d[h + i]
        for c in range(k):
            w[h - 1] = c
            relabel(w, L, scratch, rel)
            left[o, c] = rgs_rank(rel, L, table)
        # (a s, t c)
        for i in range(h):
            w[i] = d[i]
        for i in range(h - 1):
            w[h + i] = d[h + 1 + i]
        for c in range(k):
            w[L - 1] = c
            relabel(w, L, scratch, rel)
            right[o, c] = rgs_rank(rel, L, table)


@nb.njit(cache=True, nogil=True)
def _dense_apply(k, flag, p, both, left, right, v1, v2, lo, hi, out):
    kk = k * k
    for o in range(lo, hi):
        sb = np.int64(0)
        for j in range(kk):
            sb += v2[both[o, j]]
        if left[o, 0] < 0:
            if flag == 0:
                out[o] = ceil_div(sb, kk)
            else:
                out[o] = p + sb // kk
            continue
        sl = np.int64(0)
        sr = np.int64(0)
        for j in range(k):
            sl += v1[left[o, j]]
            sr += v1[right[o, j]]
        if flag == 0:
            out[o] = p + min(ceil_div(sl, k), ceil_div(sr, k), ceil_div(sb, kk))
        else:
            out[o] = max(sl // k, sr // k)


@nb.njit(cache=True, nogil=True)
def _sparse_keys(k, h, table, sub_table, lo, hi, bkey, lkey, rkey):
    L = 2 * h
    d = np.empty(L, dtype=np.int64)
    w = np.empty(L, dtype=np.int64)
    rel = np.empty(L, dtype=np.int64)
    scratch = np.full(k, -1, dtype=np.int64)
    for o in range(lo, hi):
        rgs_unrank(o, L, table, d)
        for i in range(h - 1):
            w[i] = d[1 + i]
            w[h - 1 + i] = d[h + 1 + i]
        relabel(w, L - 2, scratch, rel)
        bkey[o] = rgs_rank(rel, L - 2, sub_table[0])
        if d[0] == d[h]:
            lkey[o] = -1
            rkey[o] = -1
            continue
        for i in range(h):
            w[h - 1 + i] = d[h + i]
        relabel(w, L - 1, scratch, rel)
        lkey[o] = rgs_rank(rel, L - 1, sub_table[1])
        for i in range(h):
            w[i] = d[i]
        for i in range(h - 1):
            w[h + i] = d[h + 1 + i]
        relabel(w, L - 1, scratch, rel)
        rkey[o] = rgs_rank(rel, L - 1, sub_table[1])


@nb.njit(cache=True, nogil=True)
def _both_count(k, m):
    n = m * m
    if k > m:
        n += m + m + 1
        if k > m + 1:
            n += 1
    return n


@nb.njit(cache=True, nogil=True)
def _single_count(k, m):
    return m + 1 if k > m else m


@nb.njit(cache=True, nogil=True)
def _sort_segment(ords, mults, a, b):
    for i in range(a + 1, b):
        ko = ords[i]
        km = mults[i]
        j = i - 1
        while j >= a and ords[j] > ko:
            ords[j + 1] = ords[j]
            mults[j + 1] = mults[j]
            j -= 1
        ords[j + 1] = ko
        mults[j + 1] = km


@nb.njit(cache=True, nogil=True)
def _suffix_counts(mode, k, h, sub_len, sub_table, lo, hi, counts):
    x = np.empty(max(sub_len, 1), dtype=np.int64)
    for j in range(lo, hi):
        m = rgs_unrank(j, sub_len, sub_table, x)
        if mode == 0:
            counts[j] = _both_count(k, m)
        else:
            counts[j] = _single_count(k, m)


@nb.njit(cache=True, nogil=True)
def _suffix_fill(mode, k, h, sub_len, sub_table, table, offsets, lo, hi, ords, mults):
    """mode 0: (s c, t c') from suffix (s, t); 1: (s c, b t) from (s, bt); 2: (a s, t c) from (as, t)."""
    L = 2 * h
    x = np.empty(max(sub_len, 1), dtype=np.int64)
    w = np.empty(L, dtype=np.int64)
    rel = np.empty(L, dtype=np.int64)
    scratch = np.full(max(k, L + 2), -1, dtype=np.int64)
    for j in range(lo, hi):
        m = rgs_unrank(j, sub_len, sub_table, x)
        pos = offsets[j]
        if mode == 0:
            for i in range(h - 1):
                w[i] = x[i]
                w[h + i] = x[h - 1 + i]
            for c in range(m + 1):
                if c == m and k <= m:
                    break
                mc = 1 if c < m else k - m
                w[h - 1] = c
                top = m + 1 if c < m else m + 2
                for c2 in range(top):
                    if c < m:
                        mc2 = 1 if c2 < m else k - m
                    else:
                        mc2 = 1 if c2 <= m else k - m - 1
                    if mc2 <= 0:
                        continue
                    w[L - 1] = c2
                    relabel(w, L, scratch, rel)
                    ords[pos] = rgs_rank(rel, L, table)
                    mults[pos] = mc * mc2
                    pos += 1
        else:
            if mode == 1:
                for i in range(h - 1):
                    w[i] = x[i]
                for i in range(h):
                    w[h + i] = x[h - 1 + i]
                slot = h - 1
            else:
                for i in range(L - 1):
                    w[i] = x[i]
                slot = L - 1
            for c in range(m + 1):
                if c == m and k <= m:
                    break
                w[slot] = c
                relabel(w, L, scratch, rel)
                ords[pos] = rgs_rank(rel, L, table)
                mults[pos] = 1 if c < m else k - m
                pos += 1
        _sort_segment(ords, mults, offsets[j], pos)


@nb.njit(cache=True, nogil=True)
def _suffix_sums(offsets, ords, mults, vec, lo, hi, out):
    for j in range(lo, hi):
        acc = np.int64(0)
        for e in range(offsets[j], offsets[j + 1]):
            acc += mults[e] * vec[ords[e]]
        out[j] = acc


@nb.njit(cache=True, nogil=True)
def _sparse_combine(k, flag, p, bkey, lkey, rkey, sb, sl, sr, lo, hi, out):
    kk = k * k
    for o in range(lo, hi):
        b = sb[bkey[o]]
        if lkey[o] < 0:
            if flag == 0:
                out[o] = ceil_div(b, kk)
            else:
                out[o] = p + b // kk
            continue
        l = sl[lkey[o]]
        r = sr[rkey[o]]
        if flag == 0:
            out[o] = p + min(ceil_div(l, k), ceil_div(r, k), ceil_div(b, kk))
        else:
            out[o] = max(l // k, r // k)


# --- orchestration -----------------------------------------------------------

def run_chunks(kernel, n: int, threads: int, *args) -> None:
    """Call ``kernel(*args, lo, hi, ...)`` over disjoint ranges covering [0, n).

    ``args`` must contain the literal placeholder ``RANGE`` where lo, hi go.
    """
    threads = max(1, int(threads))
    idx = next(i for i, a in enumerate(args) if a is RANGE)
    before, after = args[:idx], args[idx + 1 :]
    if threads == 1 or n < 2 * threads:
        kernel(*before, 0, n, *after)
        return
    bounds = np.linspace(0, n, threads + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(kernel, *before, int(lo), int(hi), *after)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


RANGE = object()


def _ord_dtype(size: int):
    return np.int32 if size < (1 << 31) else np.int64


class TransformPlan:
    """Successor structure of T for one alphabet, problem and backend."""

    def __init__(self, alphabet: Alphabet, problem: Problem, backend: Backend, space: CanonicalSpace):
        self.alphabet = alphabet
        self.problem = problem
        self.backend = backend
        self.space = space
        self.size = space.size
        self.arrays: dict[str, np.ndarray] = {}

    @property
    def nbytes(self) -> int:
        return sum(a.nbytes for a in self.arrays.values())

    def rule(self, ordinal: int) -> PairRule:
        if self.backend is Backend.DENSE:
            k = self.alphabet.k
            both = self.arrays["both"][ordinal].tolist()
            left = self.arrays["left"][ordinal]
            if left[0] < 0:
                return PairRule(RuleKind.SAME_LETTER, both)
            return PairRule(RuleKind.DIFF_LETTER, both, left.tolist(), self.arrays["right"][ordinal].tolist())
        return pair_rule(self.space, ordinal)

    def suffix_multiset(self, which: str, key: int) -> list[tuple[int, int]]:
        """Sparse backend: sorted (ordinal, multiplicity) entries of one suffix class."""
        off = self.arrays[f"{which}_off"]
        lo, hi = off[key], off[key + 1]
        return list(zip(self.arrays[f"{which}_ord"][lo:hi].tolist(), self.arrays[f"{which}_mult"][lo:hi].tolist()))

    def apply(self, v1: FxVector, v2: FxVector, threads: int = 1, out: np.ndarray | None = None,
              check: bool = True) -> FxVector:
        """T(v1, v2) where v1 is the n-1 vector and v2 the n-2 vector."""
        if len(v1) != self.size or len(v2) != self.size:
            raise InvalidInputError(f"vectors must have length {self.size}")
        if v1.scale != v2.scale:
            raise InvalidInputError("vectors carry different scales")
        k = self.alphabet.k
        p = v1.scale.p
        if check:
            check_headroom(v1.values, k, p)
            check_headroom(v2.values, k * k, p)
        if out is None:
            out = np.empty(self.size, dtype=np.int64)
        flag = self.problem.flag
        a = self.arrays
        if self.backend is Backend.BINARY:
            run_chunks(_binary_apply, self.size, threads, self.alphabet.h, flag, p,
                       v1.values, v2.values, RANGE, out)
        elif self.backend is Backend.DENSE:
            run_chunks(_dense_apply, self.size, threads, k, flag, p, a["both"], a["left"], a["right"],
                       v1.values, v2.values, RANGE, out)
        else:
            sb = np.empty(a["both_off"].shape[0] - 1, dtype=np.int64)
            sl = np.empty(a["left_off"].shape[0] - 1, dtype=np.int64)
            sr = np.empty(a["right_off"].shape[0] - 1, dtype=np.int64)
            run_chunks(_suffix_sums, sb.shape[0], threads, a["both_off"], a["both_ord"], a["both_mult"],
                       v2.values, RANGE, sb)
            run_chunks(_suffix_sums, sl.shape[0], threads, a["left_off"], a["left_ord"], a["left_mult"],
                       v1.values, RANGE, sl)
            run_chunks(_suffix_sums, sr.shape[0], threads, a["right_off"], a["right_ord"], a["right_mult"],
                       v1.values, RANGE, sr)
            run_chunks(_sparse_combine, self.size, threads, k, flag, p, a["bkey"], a["lkey"], a["rkey"],
                       sb, sl, sr, RANGE, out)
        return FxVector(v1.scale, out)


def estimate_plan_bytes(alphabet: Alphabet, backend: Backend) -> int:
    """Upper estimate of plan storage, excluding the iteration vectors."""
    k, h = alphabet.k, alphabet.h
    size = CanonicalSpace(alphabet).size
    isz = np.dtype(_ord_dtype(size)).itemsize
    if backend is Backend.BINARY:
        return 0
    if backend is Backend.DENSE:
        return size * (k * k + 2 * k) * isz
    # sparse: three keys per pair plus suffix multisets bounded by their class counts
    nb_ = int(growth_table(k, 2 * h - 2)[2 * h - 2, 0])
    nl = int(growth_table(k, 2 * h - 1)[2 * h - 1, 0])
    m = min(k, 2 * h)
    per_entry = isz + 8
    return 3 * size * isz + nb_ * (m + 2) ** 2 * per_entry + 2 * nl * (m + 1) * per_entry


def build_plan(alphabet: Alphabet, problem: Problem, backend: Backend, threads: int = 1,
               budget: int | None = None) -> TransformPlan:
    problem = Problem(problem)
    backend = Backend(backend)
    k, h = alphabet.k, alphabet.h
    if backend is Backend.BINARY and k != 2:
        raise InvalidConfigError("binary backend requires k = 2")
    space = CanonicalSpace(alphabet)
    plan = TransformPlan(alphabet, problem, backend, space)
    if backend is Backend.BINARY:
        return plan
    capacity.require(estimate_plan_bytes(alphabet, backend), budget,
                     f"{backend.value} plan for k={k}, h={h}")
    dt = _ord_dtype(space.size)
    n = space.size
    if backend is Backend.DENSE:
        both = np.empty((n, k * k), dtype=dt)
        left = np.empty((n, k), dtype=dt)
        right = np.empty((n, k), dtype=dt)
        run_chunks(_dense_build, n, threads, k, h, space.table, RANGE, both, left, right)
        plan.arrays.update(both=both, left=left, right=right)
        return plan

    sub_tables = np.zeros((2, 2 * h + 1, 2 * h + 2), dtype=np.int64)
    tb, tl = growth_table(k, 2 * h - 2), growth_table(k, 2 * h - 1)
    sub_tables[0, : tb.shape[0], : tb.shape[1]] = tb
    sub_tables[1, : tl.shape[0], : tl.shape[1]] = tl
    bkey = np.empty(n, dtype=dt)
    lkey = np.empty(n, dtype=dt)
    rkey = np.empty(n, dtype=dt)
    run_chunks(_sparse_keys, n, threads, k, h, space.table, sub_tables, RANGE, bkey, lkey, rkey)
    plan.arrays.update(bkey=bkey, lkey=lkey, rkey=rkey)
    mult_dt = np.int32 if k * k < (1 << 31) else np.int64
    for mode, name, sub_len in ((0, "both", 2 * h - 2), (1, "left", 2 * h - 1), (2, "right", 2 * h - 1)):
        st = sub_tables[0 if mode == 0 else 1]
        count = int(st[sub_len, 0])
        counts = np.empty(count, dtype=np.int64)
        run_chunks(_suffix_counts, count, threads, min(mode, 1), k, h, sub_len, st, RANGE, counts)
        offsets = np.zeros(count + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        ords = np.empty(int(offsets[-1]), dtype=dt)
        mults = np.empty(int(offsets[-1]), dtype=mult_dt)
        run_chunks(_suffix_fill, count, threads, mode, k, h, sub_len, st, space.table, offsets, RANGE,
                   ords, mults)
        plan.arrays.update({f"{name}_off": offsets, f"{name}_ord": ords, f"{name}_mult": mults})
    return plan


def resolve_backend(alphabet: Alphabet, requested: str | Backend, budget: int | None = None) -> Backend:
    """'auto': binary for k = 2, dense when it fits the budget, sparse otherwise."""
    if requested != "auto":
        return Backend(requested)
    if alphabet.k == 2:
        return Backend.BINARY
    if budget is None:
        budget = capacity.default_budget()
    if estimate_plan_bytes(alphabet, Backend.DENSE) <= budget:
        return Backend.DENSE
    return Backend.SPARSE
