"""Desk-scale size guards, raisable through ``TROPDISSIM_MAX_N``."""

from __future__ import annotations

import os

ENV_VAR = "TROPDISSIM_MAX_N"


def limit(default: int) -> int:
    """Return *default*, or the env override when that is larger."""
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return default
    try:
        override = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    return max(default, override)


class BoundsError(ValueError):
    """A requested size exceeds a desk bound."""
