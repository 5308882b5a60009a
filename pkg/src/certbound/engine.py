"""Fixed-point search: iterate w_n = T(w_{n-1}, w_{n-2}) from zero and certify a rate."""

from __future__ import annotations

import logging
import resource
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numba as nb
import numpy as np

from .certify import Certificate, verify
from .codec import Alphabet
from .errors import FixedPointOverflowError, InvalidConfigError, NoCertificateError
from .fixedpoint import FxScale, FxVector, I64_MAX
from .transform import Backend, Problem, TransformPlan, build_plan, resolve_backend

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    problem: Problem
    alphabet: Alphabet
    scale: FxScale = field(default_factory=FxScale)
    iterations: int = 50
    backend: Backend | str = "auto"
    threads: int = 1
    budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        if self.iterations < 2:
            raise InvalidConfigError(f"iterations must be >= 2, got {self.iterations}")
        if self.threads < 1:
            raise InvalidConfigError("threads must be >= 1")

    def resolved_backend(self) -> Backend:
        return resolve_backend(self.alphabet, self.backend, self.budget)


@dataclass(frozen=True)
class RateProposal:
    r_num: int
    delta_min_num: int
    delta_max_num: int


@dataclass
class IterationResult:
    w_last: FxVector
    w_prev: FxVector
    deltas: list[tuple[int, int]]


@dataclass
class BoundResult:
    certificate: Certificate
    proposal: RateProposal
    backend: Backend
    elapsed: float

    @property
    def bound(self) -> Fraction:
        return self.certificate.bound


@nb.njit(cache=True, nogil=True)
def _extremes(new, old):
    """(min, max) of new - old and (min, max) of new, in one pass."""
    dmin = new[0] - old[0]
    dmax = dmin
    vmin = new[0]
    vmax = new[0]
    for i in range(new.shape[0]):
        x = new[i]
        dd = x - old[i]
        if dd < dmin:
            dmin = dd
        if dd > dmax:
            dmax = dd
        if x < vmin:
            vmin = x
        if x > vmax:
            vmax = x
    return dmin, dmax, vmin, vmax


def _rss_mb() -> float:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def iterate(config: RunConfig, plan: TransformPlan | None = None) -> IterationResult:
    """Return w_n and w_{n-1} for n = config.iterations, starting from w_0 = w_1 = 0.

    Three buffers rotate, so at most three vectors are alive at once.
    """
    if plan is None:
        plan = build_plan(config.alphabet, config.problem, config.resolved_backend(),
                          threads=config.threads, budget=config.budget)
    size = plan.size
    scale = config.scale
    k = config.alphabet.k
    limit = I64_MAX // (k * k) - scale.p
    bufs = [np.zeros(size, dtype=np.int64) for _ in range(3)]
    prev2, prev, spare = bufs
    deltas: list[tuple[int, int]] = []
    start = time.perf_counter()
    for n in range(2, config.iterations + 1):
        out = plan.apply(FxVector(scale, prev), FxVector(scale, prev2), threads=config.threads,
                         out=spare, check=False).values
        dmin, dmax, vmin, vmax = _extremes(out, prev)
        if max(abs(int(vmin)), abs(int(vmax))) > limit:
            raise FixedPointOverflowError(f"iteration {n}: values reach {vmax}, too close to int64 range")
        deltas.append((int(dmin), int(dmax)))
        log.info("iter %d dmin=%.6f dmax=%.6f elapsed=%.1fs rss=%.0fMB", n, dmin / scale.p,
                 dmax / scale.p, time.perf_counter() - start, _rss_mb())
        prev2, prev, spare = prev, out, prev2
    del spare, bufs
    return IterationResult(FxVector(scale, prev), FxVector(scale, prev2), deltas)


def propose_rate(w_last: FxVector, w_prev: FxVector, problem: Problem | str) -> RateProposal:
    """Edit: r = max(w_n - w_{n-1}) + eps.  LCS: r = min(w_n - w_{n-1}) - eps."""
    problem = Problem(problem)
    dmin, dmax, _, _ = _extremes(w_last.values, w_prev.values)
    eps = w_last.scale.eps_num
    if problem is Problem.EDIT:
        r = int(dmax) + eps
    else:
        r = int(dmin) - eps
    return RateProposal(r, int(dmin), int(dmax))


def compute_bound(config: RunConfig) -> BoundResult:
    """Iterate, propose r, verify; raises NoCertificateError if the check fails."""
    start = time.perf_counter()
    backend = config.resolved_backend()
    plan = build_plan(config.alphabet, config.problem, backend, threads=config.threads,
                      budget=config.budget)
    log.info("plan %s for k=%d h=%d: %d pairs, %.1f MB", backend.value, config.alphabet.k,
             config.alphabet.h, plan.size, plan.nbytes / 2**20)
    result = iterate(config, plan)
    del plan
    proposal = propose_rate(result.w_last, result.w_prev, config.problem)
    values = result.w_last.values
    del result
    cert = Certificate(config.problem, config.alphabet.k, config.alphabet.h, config.scale.p,
                       proposal.r_num, values)
    verdict = verify(cert, threads=config.threads)
    if not verdict:
        raise NoCertificateError(
            f"no certificate at this configuration (first violation at ordinal {verdict.witness}); "
            "raise iterations or h",
            witness=verdict.witness,
        )
    return BoundResult(cert, proposal, backend, time.perf_counter() - start)
