from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np
import pytest

from certbound.codec import code_to_digits, digits_to_code

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- brute-force reference, independent of the ranking machinery ---------------

@lru_cache(maxsize=None)
def brute_classes(k: int, h: int):
    """(sorted representatives, {any code: ordinal}) by trying every permutation."""
    perms = list(permutations(range(k)))
    rep_of = {}
    for code in range(k ** (2 * h)):
        d = code_to_digits(code, k, 2 * h)
        rep_of[code] = min(digits_to_code([p[x] for x in d], k) for p in perms)
    reps = sorted(set(rep_of.values()))
    ordinal = {r: i for i, r in enumerate(reps)}
    return reps, {c: ordinal[r] for c, r in rep_of.items()}


def reference_T(problem: str, k: int, h: int, v1, v2, p: int, exact: bool = False, member=None):
    """T(v1, v2) straight from the recurrence, with k^2 explicit letter pairs.

    exact=True returns Fractions without rounding (the real-valued T).
    ``member(rep) -> code`` chooses which class member to expand (default: the rep).
    """
    reps, ordinal = brute_classes(k, h)
    out = []
    for rep in reps:
        code = member(rep) if member else rep
        d = code_to_digits(code, k, 2 * h)
        u, v = d[:h], d[h:]
        a, s, b, t = u[0], u[1:], v[0], v[1:]

        def o(x, y):
            return ordinal[digits_to_code(x + y, k)]

        sb = sum(int(v2[o(s + [c], t + [c2])]) for c in range(k) for c2 in range(k))
        if a != b:
            sl = sum(int(v1[o(s + [c], v)]) for c in range(k))
            sr = sum(int(v1[o(u, t + [c])]) for c in range(k))
        if exact:
            B = Fraction(sb, k * k)
            if a == b:
                out.append(B if problem == "edit" else p + B)
            elif problem == "edit":
                out.append(p + min(Fraction(sl, k), Fraction(sr, k), B))
            else:
                out.append(max(Fraction(sl, k), Fraction(sr, k)))
            continue
        up = lambda x, y: -((-x) // y)  # noqa: E731
        if problem == "edit":
            if a == b:
                out.append(up(sb, k * k))
            else:
                out.append(p + min(up(sl, k), up(sr, k), up(sb, k * k)))
        else:
            if a == b:
                out.append(p + sb // (k * k))
            else:
                out.append(max(sl // k, sr // k))
    return out if exact else np.array(out, dtype=np.int64)
