"""Power-law degree sequences for network benchmarks.

Degrees are drawn i.i.d. from P(d) proportional to d^(-exponent) on
{1, ..., d_max} by inverse CDF on the normalized mass function, so the
sequence is a deterministic function of (n, exponent, d_max, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import MarginTargets, for_degrees
from .sampling import substream_generator


@dataclass(frozen=True)
class DegreeSequenceSpec:
    n: int
    exponent: float = 2.5
    seed: int = 0
    d_max: int | None = None  # defaults to n - 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.exponent <= 1:
            raise ValueError("exponent must be > 1")
        if self.d_max is not None and self.d_max < 1:
            raise ValueError("d_max must be >= 1")


def degree_distribution(spec: DegreeSequenceSpec) -> np.ndarray:
    """Normalized mass function over degrees 1..d_max."""
    d_max = spec.d_max if spec.d_max is not None else max(spec.n - 1, 1)
    mass = np.arange(1, d_max + 1, dtype=float) ** (-spec.exponent)
    return mass / mass.sum()


def generate_degrees(spec: DegreeSequenceSpec) -> np.ndarray:
    """n integer degrees, i.i.d. from the truncated power law."""
    cdf = np.cumsum(degree_distribution(spec))
    u = substream_generator(spec.seed).random(spec.n)
    idx = np.searchsorted(cdf, u, side="right")
    return (np.minimum(idx, cdf.size - 1) + 1).astype(np.int64)


def ensure_even_total(degrees: np.ndarray, seed: int) -> np.ndarray:
    """Increment one uniformly chosen degree if the total is odd.

    Exact-margin randomization of an unweighted undirected graph needs a
    graphical degree sequence, which requires an even total; model fitting
    itself has no parity requirement.
    """
    degrees = np.asarray(degrees).copy()
    if int(degrees.sum()) % 2 == 1:
        rng = substream_generator(seed, index=1)
        degrees[int(rng.integers(degrees.size))] += 1
    return degrees


def degree_targets(spec: DegreeSequenceSpec, even_total: bool = False) -> MarginTargets:
    d = generate_degrees(spec)
    if even_total:
        d = ensure_even_total(d, spec.seed)
    return for_degrees(d.astype(float))
