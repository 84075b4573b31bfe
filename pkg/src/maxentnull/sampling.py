"""Independent random matrices from a fitted model, deterministically seeded.

Sample index k of a run draws from its own stream: the 64-bit stream key is
seed XOR splitmix64(k), used as the key of a Philox-4x64 counter-based
generator.  Philox plus the fixed uniform-double conversion makes the k-th
sample a pure function of (model, seed, k), independent of how many samples
are requested and reproducible across platforms.  This derivation is part
of the output format and must not change.

Cells are drawn independently by inverse CDF from one uniform
u in (0, 1] per admissible cell, visited in row-major order (upper
triangle only for undirected structures, mirrored afterwards):

    binary:       1 if u <= p with p = e^theta / (1 + e^theta)
    integers:     floor(log(u) / theta)
    reals:        log(u) / theta

Frozen cells (theta = -inf) come out 0, and excluded diagonals are never
visited, so samples satisfy the structural invariants exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .cells import cell_mean
from .matrix import DataMatrix, ValueDomain
from .model import MaxEntModel

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer; the fixed hash behind sub-stream derivation."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def substream_key(seed: int, index: int = 0) -> int:
    return (int(seed) & _MASK64) ^ splitmix64(int(index))


def substream_generator(seed: int, index: int = 0) -> np.random.Generator:
    """Philox generator for sub-stream `index` of the run seeded `seed`."""
    return np.random.Generator(np.random.Philox(key=substream_key(seed, index)))


@dataclass(frozen=True)
class SampleSpec:
    count: int
    seed: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")


def _admissible_mask(model: MaxEntModel) -> np.ndarray:
    if model.structure.is_undirected:
        mask = np.triu(np.ones((model.n, model.n), dtype=bool))
    else:
        mask = np.ones((model.m, model.n), dtype=bool)
    if model.structure.excludes_diagonal():
        np.fill_diagonal(mask, False)
    return mask


def _draw_values(theta: np.ndarray, u: np.ndarray, domain: ValueDomain) -> np.ndarray:
    if domain is ValueDomain.BINARY:
        return (u <= cell_mean(theta, domain)).astype(np.int64)
    ratio = np.log(u) / theta  # >= 0; exactly 0 at frozen cells
    if domain is ValueDomain.NONNEG_INT:
        return np.floor(ratio).astype(np.int64)
    return ratio


def sample_dense(model: MaxEntModel, seed: int, index: int) -> np.ndarray:
    """The index-th sample as a dense array (mirrored for undirected)."""
    rng = substream_generator(seed, index)
    mask = _admissible_mask(model)
    theta = model.theta_dense()[mask]
    u = 1.0 - rng.random(theta.size)
    values = _draw_values(theta, u, model.domain)
    out = np.zeros((model.m, model.n))
    out[mask] = values
    if model.structure.is_undirected:
        lower = np.tril_indices(model.n, k=-1)
        out[lower] = out.T[lower]
    return out


def sample_one(model: MaxEntModel, seed: int, index: int) -> DataMatrix:
    dense = sample_dense(model, seed, index)
    if model.structure.is_undirected:
        ii, jj = np.nonzero(np.triu(dense != 0))
    else:
        ii, jj = np.nonzero(dense)
    discrete = model.domain.is_discrete
    entries = {
        (int(i), int(j)): (int(dense[i, j]) if discrete else float(dense[i, j]))
        for i, j in zip(ii, jj)
    }
    return DataMatrix(model.structure, model.domain, model.m, model.n,
                      entries, validate=False)


def sample(model: MaxEntModel, spec: SampleSpec) -> Iterator[DataMatrix]:
    """Lazily yield spec.count independent samples."""
    for k in range(spec.count):
        yield sample_one(model, spec.seed, k)
