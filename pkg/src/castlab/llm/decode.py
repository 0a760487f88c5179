"""Response parsing and sample aggregation for LLM forecasts."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import (
    EmptyListError,
    LengthMismatchError,
    NoNumbersFoundError,
    TooFewValuesError,
)
from .prompts import ScalingConfig

_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")

# Characters allowed between numbers of one uninterrupted answer run.
_RUN_GAP_RE = re.compile(r"[^\s,]")


@dataclass(frozen=True)
class DecodingConfig:
    """Sampling hyperparameters for completion requests."""

    temperature: float = 1.0
    top_p: float = 0.8
    num_samples: int = 5
    max_attempts_per_sample: int = 3

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError("top_p must lie in (0, 1]")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if self.max_attempts_per_sample < 1:
            raise ValueError("max_attempts_per_sample must be >= 1")


def _numeric_runs(text: str) -> list[list[float]]:
    """Group numeric tokens into runs uninterrupted by anything but
    whitespace and commas (so prose, colons, or ``2)`` markers break runs)."""
    matches = list(_NUMBER_RE.finditer(text))
    runs: list[list[float]] = []
    prev_end: int | None = None
    for m in matches:
        if prev_end is None or _RUN_GAP_RE.search(text[prev_end : m.start()]):
            runs.append([])
        runs[-1].append(float(m.group()))
        prev_end = m.end()
    return runs


def decode_response(text: str, expected_count: int, scaling: ScalingConfig) -> np.ndarray:
    """Extract exactly ``expected_count`` forecast values from a raw response.

    Numeric tokens are parsed in order. When prose interleaves, the final
    uninterrupted run of at least ``expected_count`` numbers is used (so a
    reasoned answer followed by the numeric continuation decodes to the
    continuation); if no such run exists, all parsed numbers count, keeping
    the last ``expected_count``. The inverse affine scaling is applied.
    """
    normalized = text.replace("−", "-")
    runs = _numeric_runs(normalized)
    if not runs:
        raise NoNumbersFoundError("response contains no numbers")
    chosen: list[float] | None = None
    for run in runs:
        if len(run) >= expected_count:
            chosen = run
    if chosen is not None:
        values = chosen[:expected_count]
    else:
        flat = [v for run in runs for v in run]
        if len(flat) < expected_count:
            raise TooFewValuesError(found=len(flat), expected=expected_count)
        values = flat[-expected_count:]
    return scaling.invert(np.asarray(values, dtype=np.float64))


def aggregate_median(forecasts: Sequence[Sequence[float] | np.ndarray]) -> np.ndarray:
    """Elementwise median across equal-length forecast samples.

    The middle order statistic for an odd sample count; the mean of the two
    middle values for an even count.
    """
    if len(forecasts) == 0:
        raise EmptyListError("no forecasts to aggregate")
    lengths = {len(np.asarray(f).ravel()) for f in forecasts}
    if len(lengths) != 1:
        raise LengthMismatchError(f"forecast lengths differ: {sorted(lengths)}")
    stacked = np.vstack([np.asarray(f, dtype=np.float64).ravel() for f in forecasts])
    return np.median(stacked, axis=0)
