"""Packing, enumeration and canonical forms of window pairs.

A pair (u, v) of length-h strings over letters 0..k-1 is packed as the
2h-digit base-k number ``uv`` (most significant digit first).  Two pairs
that differ by a joint renaming of the alphabet are equivalent; the class
representative is the lexicographically smallest image, which is exactly
the first-occurrence relabeling of ``uv``.  Those representatives are the
restricted growth strings of length 2h using at most k letters, so their
ascending order can be ranked and unranked with a small counting table
instead of a lookup over all k**(2h) codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numba as nb
import numpy as np

from . import capacity
from .errors import InvalidInputError

U64_LIMIT = 1 << 64


@dataclass(frozen=True)
class Alphabet:
    k: int
    h: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidInputError(f"alphabet size must be >= 2, got {self.k}")
        if self.h < 1:
            raise InvalidInputError(f"window length must be >= 1, got {self.h}")
        if self.k ** (2 * self.h) > U64_LIMIT:
            raise InvalidInputError(
                f"k={self.k}, h={self.h}: k^(2h) does not fit in 64 bits"
            )

    @property
    def length(self) -> int:
        return 2 * self.h

    @property
    def n_pairs(self) -> int:
        return self.k ** (2 * self.h)


class CanonicalIndex(NamedTuple):
    ordinal: int
    class_rep: int


# --- letters and digits ----------------------------------------------------

def _letters(word: str | Sequence[int], k: int) -> list[int]:
    if isinstance(word, str):
        digits = [ord(ch) - ord("a") for ch in word]
    else:
        digits = [int(d) for d in word]
    for d in digits:
        if not 0 <= d < k:
            raise InvalidInputError(f"letter {d!r} outside alphabet of size {k}")
    return digits


def digits_to_code(digits: Sequence[int], k: int) -> int:
    code = 0
    for d in digits:
        code = code * k + d
    return code


def code_to_digits(code: int, k: int, length: int) -> list[int]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        code, out[i] = divmod(code, k)
    return out


def encode_pair(u: str | Sequence[int], v: str | Sequence[int], alphabet: Alphabet) -> int:
    """Pack (u, v) into one base-k integer; ``u`` supplies the high digits."""
    du, dv = _letters(u, alphabet.k), _letters(v, alphabet.k)
    if len(du) != alphabet.h or len(dv) != alphabet.h:
        raise InvalidInputError(
            f"both strings must have length {alphabet.h}, got {len(du)} and {len(dv)}"
        )
    return digits_to_code(du + dv, alphabet.k)


def _check_code(code: int, alphabet: Alphabet) -> None:
    if not 0 <= code < alphabet.n_pairs:
        raise InvalidInputError(f"code {code} outside [0, {alphabet.n_pairs})")


def decode_digits(code: int, alphabet: Alphabet) -> tuple[tuple[int, ...], tuple[int, ...]]:
    _check_code(code, alphabet)
    d = code_to_digits(code, alphabet.k, alphabet.length)
    return tuple(d[: alphabet.h]), tuple(d[alphabet.h :])


def decode_pair(code: int, alphabet: Alphabet) -> tuple[str, str]:
    if alphabet.k > 26:
        raise InvalidInputError("string form needs k <= 26; use decode_digits")
    u, v = decode_digits(code, alphabet)
    return "".join(chr(97 + d) for d in u), "".join(chr(97 + d) for d in v)


# --- canonical form ----------------------------------------------------------

def first_occurrence(digits: Sequence[int], k: int) -> tuple[list[int], tuple[int, ...]]:
    """Relabel letters in order of first appearance.

    Returns the relabeled digits and the permutation ``perm`` with
    ``perm[old] = new``; letters absent from ``digits`` receive the unused
    labels in ascending order.
    """
    perm = [-1] * k
    nxt = 0
    out = []
    for d in digits:
        if perm[d] < 0:
            perm[d] = nxt
            nxt += 1
        out.append(perm[d])
    for letter in range(k):
        if perm[letter] < 0:
            perm[letter] = nxt
            nxt += 1
    return out, tuple(perm)


def canonicalize_binary(code: int, h: int) -> int:
    """k = 2: the class of a pair is {code, ~code}; keep the one with top bit 0."""
    mask = (1 << (2 * h)) - 1
    if code >> (2 * h - 1):
        return code ^ mask
    return code


def canonicalize(code: int, alphabet: Alphabet) -> tuple[int, tuple[int, ...]]:
    _check_code(code, alphabet)
    if alphabet.k == 2:
        rep = canonicalize_binary(code, alphabet.h)
        return rep, ((0, 1) if rep == code else (1, 0))
    digits = code_to_digits(code, alphabet.k, alphabet.length)
    relabeled, perm = first_occurrence(digits, alphabet.k)
    return digits_to_code(relabeled, alphabet.k), perm


def apply_permutation(code: int, perm: Sequence[int], alphabet: Alphabet) -> int:
    digits = code_to_digits(code, alphabet.k, alphabet.length)
    return digits_to_code([perm[d] for d in digits], alphabet.k)


# --- ranking of restricted growth strings ----------------------------------

def growth_table(k: int, length: int) -> np.ndarray:
    """Completion counts ``f[rem, m]``.

    ``f[rem, m]`` is the number of ways to append ``rem`` further digits to a
    restricted growth string that already uses ``m`` letters, never using
    more than ``k`` letters.  Only entries with ``rem + m <= length`` are
    reachable and filled.
    """
    f = np.zeros((length + 1, length + 2), dtype=np.int64)
    prev = {m: 1 for m in range(length + 2)}
    for m in range(length + 1):
        f[0, m] = 1
    for rem in range(1, length + 1):
        cur = {}
        for m in range(0, length + 1 - rem + 1):
            val = m * prev[m] + (prev[m + 1] if m < k else 0)
            cur[m] = val
            if m + rem <= length:
                if val >= 1 << 63:
                    raise InvalidInputError(f"class count overflow for k={k}, length={length}")
                f[rem, m] = val
        prev = cur
    return f


def class_count(k: int, length: int) -> int:
    return int(growth_table(k, length)[length, 0])


@nb.njit(cache=True, nogil=True)
def rgs_rank(digits, length, table):
    r = 0
    m = 0
    for i in range(length):
        d = digits[i]
        rem = length - i - 1
        if d < m:
            r += d * table[rem, m]
        else:
            r += m * table[rem, m]
            m += 1
    return r


@nb.njit(cache=True, nogil=True)
def rgs_unrank(ordinal, length, table, out):
    m = 0
    for i in range(length):
        rem = length - i - 1
        blk = table[rem, m]
        if ordinal < m * blk:
            d = ordinal // blk
            ordinal -= d * blk
        else:
            d = m
            ordinal -= m * blk
            m += 1
        out[i] = d
    return m


@nb.njit(cache=True, nogil=True)
def relabel(digits, length, scratch, out):
    """First-occurrence relabeling of digits[:length] into out; returns the
    number of distinct letters.  ``scratch`` must be all -1 on entry and is
    restored before returning."""
    nxt = 0
    for i in range(length):
        d = digits[i]
        if scratch[d] < 0:
            scratch[d] = nxt
            nxt += 1
        out[i] = scratch[d]
    for i in range(length):
        scratch[digits[i]] = -1
    return nxt


@nb.njit(cache=True, nogil=True)
def _representatives(k, length, table, out):
    buf = np.empty(length, dtype=np.int64)
    for o in range(out.shape[0]):
        rgs_unrank(o, length, table, buf)
        code = np.uint64(0)
        for i in range(length):
            code = code * np.uint64(k) + np.uint64(buf[i])
        out[o] = code


@nb.njit(cache=True, nogil=True)
def _ordinals_of(codes, k, length, table, out):
    digits = np.empty(length, dtype=np.int64)
    rel = np.empty(length, dtype=np.int64)
    scratch = np.full(k, -1, dtype=np.int64)
    kk = np.uint64(k)
    for j in range(codes.shape[0]):
        c = codes[j]
        for i in range(length - 1, -1, -1):
            digits[i] = np.int64(c % kk)
            c = c // kk
        relabel(digits, length, scratch, rel)
        out[j] = rgs_rank(rel, length, table)


class CanonicalSpace:
    """Ordinal space of canonical pairs for one alphabet, in ascending code order."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.table = growth_table(alphabet.k, alphabet.length)
        self.size = int(self.table[alphabet.length, 0])

    def __len__(self) -> int:
        return self.size

    def ordinal(self, code: int) -> int:
        """Ordinal of the class containing ``code`` (any member, not only the rep)."""
        rep, _ = canonicalize(code, self.alphabet)
        if self.alphabet.k == 2:
            return rep
        digits = np.array(code_to_digits(rep, self.alphabet.k, self.alphabet.length), dtype=np.int64)
        return int(rgs_rank(digits, self.alphabet.length, self.table))

    def ordinals(self, codes: np.ndarray) -> np.ndarray:
        codes = np.ascontiguousarray(codes, dtype=np.uint64)
        out = np.empty(codes.shape[0], dtype=np.int64)
        _ordinals_of(codes, self.alphabet.k, self.alphabet.length, self.table, out)
        return out

    def representative(self, ordinal: int) -> int:
        if not 0 <= ordinal < self.size:
            raise InvalidInputError(f"ordinal {ordinal} outside [0, {self.size})")
        buf = np.empty(self.alphabet.length, dtype=np.int64)
        rgs_unrank(ordinal, self.alphabet.length, self.table, buf)
        return digits_to_code(buf.tolist(), self.alphabet.k)

    @cached_property
    def representatives(self) -> np.ndarray:
        out = np.empty(self.size, dtype=np.uint64)
        _representatives(self.alphabet.k, self.alphabet.length, self.table, out)
        return out

    def __iter__(self) -> Iterator[CanonicalIndex]:
        for o, rep in enumerate(self.representatives.tolist()):
            yield CanonicalIndex(o, rep)


def enumerate_canonical(alphabet: Alphabet, budget: int | None = None) -> CanonicalSpace:
    """Build the canonical index space, materializing the representative codes."""
    space = CanonicalSpace(alphabet)
    capacity.require(8 * space.size, budget, f"canonical index for k={alphabet.k}, h={alphabet.h}")
    space.representatives  # noqa: B018 - materialize
    return space
