"""Information-rate and throughput metrics for selection-matrix spelling.

A selection consists of flashing every row and column of the matrix NRS
times; a selection's duration is the stimulus/inter-stimulus train plus a
fixed pre-selection pause and either a post-selection pause or, when word
predictions were on display, the longer prediction-reading pause.

Throughput metrics: output characters per minute (OCM), selections per
minute (SM), intensifications per selection and repetition (ISR), selection
accuracy (AC) and error rate per spelled character (EC).  Channel metrics:
Shannon entropy, the noisy-channel bit rate, and Monte-Carlo estimates of
the per-selection information rate produced by :mod:`polyspell.rates`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class TimingConfig:
    """Stimulus timing parameters, in seconds (NRS is a repetition count)."""

    sd_s: float = 0.125  # single stimulus duration
    isi_s: float = 0.125  # inter-stimulus interval
    pre_s: float = 3.0  # pause before the stimulation train
    post_s: float = 3.0  # pause after a plain selection
    ppd_s: float = 10.0  # prediction-reading pause replacing post_s
    nrs: int = 12  # row/column stimulation repetitions per selection

    def __post_init__(self) -> None:
        for name in ("sd_s", "isi_s", "pre_s", "post_s", "ppd_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.nrs < 1:
            raise ValueError("nrs must be at least 1")


def intensifications(dims: tuple[int, int], nrs: int) -> int:
    """Row/column flashes in one selection of a ``rows x cols`` matrix."""
    rows, cols = dims
    if rows < 1 or cols < 1 or nrs < 1:
        raise ValueError("dimensions and nrs must be positive")
    return (rows + cols) * nrs

def selection_time(
    dims: tuple[int, int], timing: TimingConfig, prediction_phase: bool = False
) -> float:
    """Duration of one selection, in seconds.

    ``prediction_phase`` selects the prediction-reading pause instead of the
    plain post-selection pause.
    """
    n_i = intensifications(dims, timing.nrs)
    pause = timing.ppd_s if prediction_phase else timing.post_s
    return n_i * timing.sd_s + (n_i - 1) * timing.isi_s + timing.pre_s + pause


def entropy(probabilities: Iterable[float]) -> float:
    """Shannon entropy in bits of a full probability distribution."""
    probs = list(probabilities)
    if any(p < 0 for p in probs):
        raise ValueError("probabilities must be non-negative")
    if abs(sum(probs) - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    return -sum(p * math.log2(p) for p in probs if p > 0)


def bit_rate(n: int, p: float) -> float:
    """Per-selection bit rate of an ``n``-symbol channel with accuracy ``p``,
    errors spread uniformly over the other ``n - 1`` symbols."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be within [0, 1]")
    rate = math.log2(n)
    if 0.0 < p:
        rate += p * math.log2(p)
    if p < 1.0:
        rate += (1 - p) * math.log2((1 - p) / (n - 1))
    return rate


def isr(total_intensifications: int, selections: int, nrs: int) -> float:
    """Intensifications per selection and repetition."""
    if total_intensifications < 1 or selections < 1 or nrs < 1:
        raise ValueError("isr requires positive counts")
    return total_intensifications / (selections * nrs)


def ocm(characters: int, seconds: float) -> float:
    """Output characters per minute."""
    if characters < 0:
        raise ValueError("characters must be non-negative")
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    return characters * 60.0 / seconds


def sm(selections: int, seconds: float) -> float:
    """Selections per minute."""
    if selections < 0:
        raise ValueError("selections must be non-negative")
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    return selections * 60.0 / seconds


def ac(correct: int, total: int) -> float:
    """Selection accuracy: correct selections over all selections."""
    if total < 1:
        raise ValueError("total must be at least 1")
    if not 0 <= correct <= total:
        raise ValueError("correct must be within [0, total]")
    return correct / total


def ec(errors: int, length: int) -> float:
    """Errors per character of the spelled text."""
    if length < 1:
        raise ValueError("length must be at least 1")
    if errors < 0:
        raise ValueError("errors must be non-negative")
    return errors / length


def mean_exact(values: Sequence[float]) -> float:
    """Mean that returns the common value exactly when all inputs are equal
    (so constant-rate aggregates stay bit-exact), else a compensated mean."""
    if not values:
        raise ValueError("mean of empty sequence")
    first = values[0]
    if all(v == first for v in values):
        return first
    return math.fsum(values) / len(values)
