"""Randomization assessment of closed-itemset counts against the model.

The original matrix and n_samples model samples are mined at the same
support threshold; counts are aggregated by itemset size.  Per size (and
globally over the total count) the report carries quartiles of the sample
counts and the empirical p-value

    p = (1 + #{samples with count >= observed}) / (1 + n_samples),

which is never zero.  Everything is a deterministic function of
(data, model, min_support, n_samples, seed): sample k is mined on the
k-th sub-stream of the seed and results are merged in index order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import formats
from .itemsets import mine_closed
from .matrix import DataMatrix
from .model import MaxEntModel
from .sampling import sample_one


@dataclass
class AssessmentReport:
    min_support: int
    n_samples: int
    seed: int
    original_counts: dict[int, int]
    sample_counts: list[dict[int, int]]
    summary: dict[int, dict[str, float]]  # per size: min q1 median q3 max
    p_values: dict  # int size -> p, plus "global"


def _quartiles(values: np.ndarray) -> dict[str, float]:
    lo, q1, med, q3, hi = np.percentile(values, [0, 25, 50, 75, 100])
    return {"min": float(lo), "q1": float(q1), "median": float(med),
            "q3": float(q3), "max": float(hi)}


def _empirical_p(sample_stats: np.ndarray, observed: float, n: int) -> float:
    return float((1 + int((sample_stats >= observed).sum())) / (1 + n))


def assess(
    data: DataMatrix,
    model: MaxEntModel,
    min_support: int,
    n_samples: int,
    seed: int,
) -> AssessmentReport:
    """Mine the data and n_samples model samples; summarize by size."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    original = mine_closed(data, min_support).counts_by_size
    per_sample: list[dict[int, int]] = []
    for k in range(n_samples):
        sampled = sample_one(model, seed, k)
        per_sample.append(mine_closed(sampled, min_support).counts_by_size)

    sizes = sorted(set(original) | {s for c in per_sample for s in c})
    summary: dict[int, dict[str, float]] = {}
    p_values: dict = {}
    for size in sizes:
        stats = np.array([c.get(size, 0) for c in per_sample], dtype=float)
        summary[size] = _quartiles(stats)
        p_values[size] = _empirical_p(stats, original.get(size, 0), n_samples)
    totals = np.array([sum(c.values()) for c in per_sample], dtype=float)
    p_values["global"] = _empirical_p(totals, sum(original.values()), n_samples)
    return AssessmentReport(min_support, n_samples, seed, original,
                            per_sample, summary, p_values)


def report_to_payload(report: AssessmentReport) -> dict:
    return {
        "min_support": report.min_support,
        "n_samples": report.n_samples,
        "seed": report.seed,
        "original": {str(k): v for k, v in report.original_counts.items()},
        "samples_summary": {str(k): v for k, v in report.summary.items()},
        "p_values": {str(k): v for k, v in report.p_values.items()},
    }


def report_to_json(report: AssessmentReport) -> str:
    return formats.canonical_json(report_to_payload(report))


def save_report(report: AssessmentReport, path) -> None:
    formats.write_text(path, report_to_json(report) + "\n")
