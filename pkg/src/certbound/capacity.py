"""Memory budget handling."""

from __future__ import annotations

import os

from .errors import CapacityError

ENV_VAR = "CERTBOUND_MEM_GB"
DEFAULT_GB = 8.0
GB = 1 << 30


def default_budget() -> int:
    """Budget in bytes: $CERTBOUND_MEM_GB if set, else 8 GB."""
    raw = os.environ.get(ENV_VAR)
    gb = float(raw) if raw else DEFAULT_GB
    return int(gb * GB)


def require(nbytes: int, budget: int | None, what: str) -> None:
    if budget is None:
        budget = default_budget()
    if nbytes > budget:
        raise CapacityError(
            f"{what} needs {nbytes / GB:.2f} GB, budget is {budget / GB:.2f} GB",
            required_bytes=nbytes,
        )
