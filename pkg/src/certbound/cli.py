"""Command line: compute, verify, oracle, table."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import capacity
from .certify import Certificate, read_certificate, verify, write_certificate
from .codec import Alphabet
from .engine import RunConfig, compute_bound
from .errors import (
    CapacityError,
    CertboundError,
    InvalidInputError,
    NoCertificateError,
    StructuralError,
)
from .fixedpoint import FxScale
from .recipes import RECIPES, at_least_as_strong, select
from .transform import Problem

EXIT_OK = 0
EXIT_INVALID_CERT = 2
EXIT_CAPACITY = 3
EXIT_USAGE = 64
EXIT_STRUCTURE = 65
EXIT_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def decimal_string(value: Fraction, round_up: bool, places: int = 12) -> str:
    """Exact decimal when the denominator is 2^a 5^b, else rounded toward the safe side."""
    den = value.denominator
    for f in (2, 5):
        while den % f == 0:
            den //= f
    if den == 1:
        exact = Decimal(value.numerator) / Decimal(value.denominator)
        text = format(exact.normalize(), "f")
        return text
    scale = 10**places
    num = value * scale
    q = -((-num.numerator) // num.denominator) if round_up else num.numerator // num.denominator
    return format((Decimal(q) / scale).normalize(), "f")


def bound_text(cert: Certificate) -> str:
    return decimal_string(cert.bound, round_up=cert.problem is Problem.EDIT)


def _budget(args) -> int | None:
    if getattr(args, "mem_gb", None) is not None:
        return int(args.mem_gb * capacity.GB)
    return None


# --- compute / verify ----------------------------------------------------------

def cmd_compute(args) -> int:
    alphabet = Alphabet(args.k, args.h)
    config = RunConfig(Problem(args.problem), alphabet, FxScale(args.scale, args.eps_num), args.iters,
                       args.backend, args.threads, _budget(args))
    try:
        result = compute_bound(config)
    except NoCertificateError as exc:
        print(f"no certificate: first violation at ordinal {exc.witness}", file=sys.stderr)
        return EXIT_INVALID_CERT
    cert = result.certificate
    out = Path(args.out or f"{args.problem}_k{args.k}_h{args.h}.{'json' if args.format == 'json' else 'lkcb'}")
    write_certificate(cert, out, args.format)
    if read_certificate(out) != cert:
        print(f"certificate written to {out} does not read back identically", file=sys.stderr)
        return EXIT_STRUCTURE
    sign = "<=" if cert.problem is Problem.EDIT else ">="
    print(f"bound {sign} {bound_text(cert)}")
    print(f"certificate: {out} (backend {result.backend.value}, r_num {cert.r_num}/{cert.p}, "
          f"{result.elapsed:.1f}s)", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = read_certificate(args.cert)
    except OSError as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    verdict = verify(cert, threads=args.threads)
    if not verdict:
        print(f"INVALID: first violation at ordinal {verdict.witness}")
        return EXIT_INVALID_CERT
    if cert.problem is Problem.EDIT:
        print(f"VALID: alpha_{cert.k} <= {bound_text(cert)}")
    else:
        print(f"VALID: gamma_{cert.k} >= {bound_text(cert)}")
    return EXIT_OK


# --- oracle ------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    from . import oracle

    if args.oracle_cmd == "distance":
        print(oracle.edit_distance(args.u, args.v))
    elif args.oracle_cmd == "lcs":
        print(oracle.lcs(args.u, args.v))
    elif args.oracle_cmd == "expected":
        print(oracle.exact_expected_min(args.problem, args.s, args.t, args.n, args.k))
    elif args.oracle_cmd == "decomposition":
        rep = oracle.decomposition_checks(args.samples, args.max_len, args.k, args.seed)
        print(f"cases={rep.cases} edit_violations={rep.edit_violations} lcs_violations={rep.lcs_violations}")
        if not rep.ok:
            print(f"first violation: {rep.first_violation}")
            return 1
    elif args.oracle_cmd == "mc":
        est = oracle.mc_estimate(args.problem, args.k, args.n, args.samples, args.seed)
        if est.exact is not None:
            print(f"{est.exact.numerator}/{est.exact.denominator} = {decimal_string(est.exact, True)} (exact)")
        else:
            print(f"{est.mean:.6f} +- {est.stderr:.6f} ({est.samples} samples, seed {args.seed})")
    return EXIT_OK


# --- table -------------------------------------------------------------------------

def cmd_table(args) -> int:
    rows = select(args.recipe, args.max_h, args.max_k)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["problem", "k", "h", "iters", "bound", "paper_bound", "ok"])
    for row in rows:
        try:
            config = RunConfig(Problem(row.problem), Alphabet(row.k, row.h), FxScale(row.p), row.iterations,
                               row.backend, args.threads, _budget(args))
            result = compute_bound(config)
        except (CapacityError, InvalidInputError, NoCertificateError) as exc:
            logging.getLogger(__name__).warning("k=%d h=%d skipped: %s", row.k, row.h, exc)
            writer.writerow([row.problem, row.k, row.h, row.iterations, "", row.expected, "skipped"])
            sys.stdout.flush()
            continue
        text = bound_text(result.certificate)
        ok = at_least_as_strong(row.problem, Decimal(text), row.expected)
        writer.writerow([row.problem, row.k, row.h, row.iterations, text, row.expected, str(ok).lower()])
        sys.stdout.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="certbound", description="Certified bounds on average edit distance and LCS constants.")
    parser.add_argument("-q", "--quiet", action="store_true", help="no progress lines on stderr")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="search for and write a certificate")
    p.add_argument("--problem", choices=["edit", "lcs"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--scale", type=int, default=100_000)
    p.add_argument("--eps-num", type=int, default=5)
    p.add_argument("--backend", choices=["binary", "dense", "sparse", "auto"], default="auto")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mem-gb", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["json", "binary"], default="binary")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="check a certificate file")
    p.add_argument("--cert", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact and Monte-Carlo reference computations")
    osub = p.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    for name in ("distance", "lcs"):
        q = osub.add_parser(name)
        q.add_argument("u")
        q.add_argument("v")
    q = osub.add_parser("expected")
    q.add_argument("--problem", choices=["edit", "lcs"], required=True)
    q.add_argument("--s", default="")
    q.add_argument("--t", default="")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q = osub.add_parser("decomposition")
    q.add_argument("--samples", type=int, default=100_000)
    q.add_argument("--max-len", type=int, default=12)
    q.add_argument("--k", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q = osub.add_parser("mc")
    q.add_argument("--problem", choices=["edit", "lcs"], required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--samples", type=int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table", help="reproduce a published table as CSV")
    p.add_argument("--recipe", choices=sorted(RECIPES), required=True)
    p.add_argument("--max-h", type=int, default=None)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mem-gb", type=float, default=None)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.quiet:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(message)s")
    try:
        return args.func(args)
    except StructuralError as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
