"""Utility helpers for renewal_opt."""

import logging
from typing import Iterable, Optional

import numpy as np

from renewal_opt.exceptions import ValidationError

__all__ = ["as_vector", "check_length"]

logger = logging.getLogger("renewal_opt.utils")


def as_vector(values: Iterable[float], name: str = "vector") -> np.ndarray:
    """Return a 1-D float64 copy of values, rejecting non-finite entries."""
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        error_msg = f"{name} contains non-finite entries: {arr.tolist()}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    return arr


def check_length(vec: np.ndarray, expected: int, name: str, context: Optional[str] = None) -> None:
    """Raise ValidationError when vec does not have the expected length."""
    if len(vec) != expected:
        where = f" ({context})" if context else ""
        error_msg = f"{name} has length {len(vec)}, expected {expected}{where}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
