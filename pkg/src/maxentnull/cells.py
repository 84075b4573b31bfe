"""Per-cell distributions of the fitted model.

Each matrix cell is an independent exponential-family variable with natural
parameter theta (the sum of the cell's row and column multipliers) and
normalizer Z(theta) = sum_{v in domain} exp(v * theta):

    domain          Z(theta)              distribution
    {0,1}           1 + e^theta           Bernoulli(e^theta / (1 + e^theta))
    {0,1,2,...}     1 / (1 - e^theta)     geometric on {0,1,...}, theta < 0
    [0, inf)        -1 / theta            exponential with rate -theta, theta < 0

mean = dlogZ/dtheta and variance = d^2 logZ/dtheta^2.  For the unbounded
domains theta must be strictly negative or Z diverges; theta = -inf is the
degenerate point-mass-at-zero limit and is accepted by mean/variance.
All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .matrix import ValueDomain


def _as_result(x, scalar: bool):
    return float(x) if scalar else x


def check_feasible(theta, domain: ValueDomain) -> None:
    """Raise unless the normalizer is finite at theta (-inf allowed)."""
    if domain is ValueDomain.BINARY:
        return
    if np.any(np.asarray(theta) >= 0):
        raise InfeasibleError(
            f"theta must be < 0 for domain {domain.value}: normalizer diverges"
        )


def cell_log_norm(theta, domain: ValueDomain):
    """log Z(theta). Requires finite feasible theta."""
    t = np.asarray(theta, dtype=float)
    check_feasible(t, domain)
    if domain is ValueDomain.BINARY:
        out = np.logaddexp(0.0, t)
    elif domain is ValueDomain.NONNEG_INT:
        out = -np.log(-np.expm1(t))
    else:
        out = -np.log(-t)
    return _as_result(out, t.ndim == 0)


def cell_mean(theta, domain: ValueDomain):
    """Expected cell value at natural parameter theta."""
    t = np.asarray(theta, dtype=float)
    check_feasible(t, domain)
    if domain is ValueDomain.BINARY:
        out = np.exp(-np.logaddexp(0.0, -t))  # sigmoid, stable for all theta
    elif domain is ValueDomain.NONNEG_INT:
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(-t)
    else:
        out = -1.0 / t
    return _as_result(out, t.ndim == 0)


def cell_variance(theta, domain: ValueDomain):
    """Variance of the cell value at theta."""
    t = np.asarray(theta, dtype=float)
    check_feasible(t, domain)
    if domain is ValueDomain.BINARY:
        p = np.exp(-np.logaddexp(0.0, -t))
        out = p * (1.0 - p)
    elif domain is ValueDomain.NONNEG_INT:
        with np.errstate(over="ignore"):
            mu = 1.0 / np.expm1(-t)
        out = mu * (1.0 + mu)
    else:
        out = 1.0 / (t * t)
    return _as_result(out, t.ndim == 0)


def cell_entropy(theta, domain: ValueDomain):
    """Per-cell entropy log Z - theta * mean (differential for the real
    domain). Requires finite theta."""
    t = np.asarray(theta, dtype=float)
    out = cell_log_norm(t, domain) - t * cell_mean(t, domain)
    return _as_result(out, t.ndim == 0)


def cell_log_prob(value, theta, domain: ValueDomain):
    """log P(value) at theta (log-density for the real domain).

    Requires finite theta; values outside the domain give -inf only in the
    binary case where P(v) is a genuine two-point mass.
    """
    v = np.asarray(value, dtype=float)
    t = np.asarray(theta, dtype=float)
    out = v * t - cell_log_norm(t, domain)
    return _as_result(out, out.ndim == 0)


@dataclass(frozen=True)
class CellDistribution:
    """One cell's distribution: natural parameter plus value domain."""

    theta: float
    domain: ValueDomain

    def __post_init__(self):
        check_feasible(self.theta, self.domain)

    def mean(self) -> float:
        return cell_mean(self.theta, self.domain)

    def variance(self) -> float:
        return cell_variance(self.theta, self.domain)

    def entropy(self) -> float:
        return cell_entropy(self.theta, self.domain)

    def log_prob(self, value) -> float:
        return cell_log_prob(value, self.theta, self.domain)
