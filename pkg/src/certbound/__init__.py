"""Certified bounds on the average edit distance and LCS constants of random strings."""

from .certify import Certificate, read_certificate, verify, write_certificate
from .codec import Alphabet, CanonicalSpace, canonicalize, decode_pair, encode_pair, enumerate_canonical
from .engine import RunConfig, compute_bound, iterate, propose_rate
from .fixedpoint import FxScale, FxVector
from .transform import Backend, Problem, build_plan

__all__ = [
    "Alphabet", "CanonicalSpace", "canonicalize", "decode_pair", "encode_pair", "enumerate_canonical",
    "FxScale", "FxVector", "Backend", "Problem", "build_plan", "RunConfig", "compute_bound", "iterate",
    "propose_rate", "Certificate", "read_certificate", "verify", "write_certificate",
]

__version__ = "0.1.0"
