"""Margin-preserving randomization by repeated local swaps.

A swap picks rows (i, k) and columns (j, l), adds delta to cells (i, j)
and (k, l) and subtracts it from (i, l) and (k, j).  Row and column sums
are untouched; the swap is allowed when all four new values stay inside
the value domain.  Binary matrices admit only delta = +/-1 on the two
checkerboard 2x2 patterns (the classic swap / edge rewire); unbounded
integer and real domains admit a whole range of deltas, from which the
chain draws uniformly (the real case is the addition-mask move).

Structure handling: proposals touching the diagonal of a no-self-loop
network are rejected.  Undirected chains apply the mirrored swap (rows
(j, l), columns (i, k)) in the same atomic step, so symmetry is preserved
exactly; when index sets overlap, the per-cell effects accumulate (e.g. a
diagonal cell can move by 2*delta) and allowedness is checked jointly on
the folded set of affected cells.

Rejected proposals consume a step, so a chain's length is well defined.
Burn-in and thinning are the caller's responsibility; something on the
order of 10x the nonzero count for burn-in and the nonzero count for
thinning is a reasonable default for mixing-sensitive uses.

Because the fitted model's log-probability depends on the data only
through its margins, an allowed swap never changes it;
:func:`verify_invariance` turns that statement into a measured bound.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrix import DataMatrix, Structure, ValueDomain
from .model import MaxEntModel
from .sampling import substream_generator

DELTA_MODES = ("unit", "integer", "real")

_DEFAULT_MODE = {
    ValueDomain.BINARY: "unit",
    ValueDomain.NONNEG_INT: "integer",
    ValueDomain.NONNEG_REAL: "real",
}

_MODE_DOMAIN = {
    "unit": ValueDomain.BINARY,
    "integer": ValueDomain.NONNEG_INT,
    "real": ValueDomain.NONNEG_REAL,
}


def default_delta_mode(domain: ValueDomain) -> str:
    return _DEFAULT_MODE[domain]


@dataclass(frozen=True)
class SwapOp:
    """One swap: rows (i, k), columns (j, l), magnitude delta."""

    rows: tuple[int, int]
    cols: tuple[int, int]
    delta: float | int

    def __post_init__(self):
        if self.rows[0] == self.rows[1] or self.cols[0] == self.cols[1]:
            raise ValueError("swap needs two distinct rows and two distinct columns")


@dataclass(frozen=True)
class ChainSpec:
    steps: int
    seed: int
    delta_mode: str

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.delta_mode not in DELTA_MODES:
            raise ValueError(f"delta_mode must be one of {DELTA_MODES}")


@dataclass
class ChainStats:
    accepted: int = 0
    rejected: int = 0


def _cell_coefficients(rows, cols, structure: Structure) -> dict[tuple[int, int], int]:
    """Net per-stored-cell delta coefficients of the (mirrored) swap."""
    i, k = rows
    j, l = cols
    raw: dict[tuple[int, int], int] = {}
    moves = [(i, j, 1), (k, l, 1), (i, l, -1), (k, j, -1)]
    if structure.is_undirected:
        moves += [(j, i, 1), (l, k, 1), (j, k, -1), (l, i, -1)]
    for r, c, s in moves:
        raw[(r, c)] = raw.get((r, c), 0) + s
    if not structure.is_undirected:
        return {cell: s for cell, s in raw.items() if s}
    folded: dict[tuple[int, int], int] = {}
    for (r, c), s in raw.items():
        if r > c:
            continue
        if r != c and raw.get((c, r)) != s:
            raise AssertionError("mirror fold out of sync")
        if s:
            folded[(r, c)] = s
    return folded


def _touches_excluded_diagonal(coeffs, structure: Structure) -> bool:
    return structure.excludes_diagonal() and any(r == c for r, c in coeffs)


def swap_allowed(op: SwapOp, data: DataMatrix) -> bool:
    """True iff applying op keeps every affected value inside the domain
    and respects the structure (no touching an excluded diagonal)."""
    coeffs = _cell_coefficients(op.rows, op.cols, data.structure)
    if _touches_excluded_diagonal(coeffs, data.structure):
        return False
    for (r, c), s in coeffs.items():
        if not data.domain.contains(data.get(r, c) + s * op.delta):
            return False
    return True


def _apply_to_entries(entries, coeffs, delta, discrete: bool):
    for (r, c), s in coeffs.items():
        v = entries.get((r, c), 0) + s * delta
        v = int(v) if discrete else v
        if v == 0:
            entries.pop((r, c), None)
        else:
            entries[(r, c)] = v


def apply_swap(data: DataMatrix, op: SwapOp) -> DataMatrix:
    """Apply an allowed swap, returning the new matrix."""
    if not swap_allowed(op, data):
        raise ValueError(f"swap {op} is not allowed for this matrix")
    entries = dict(data.entries)
    coeffs = _cell_coefficients(op.rows, op.cols, data.structure)
    _apply_to_entries(entries, coeffs, op.delta, data.domain.is_discrete)
    return data.replace_entries(entries, validate=False)


def _distinct_pair(rng, size: int) -> tuple[int, int]:
    a = int(rng.integers(size))
    b = int(rng.integers(size - 1))
    if b >= a:
        b += 1
    return a, b


def _integer_delta_bounds(values, coeffs):
    lo, hi = None, None
    for v, s in zip(values, coeffs):
        if s > 0:
            b = -(v // s)
            lo = b if lo is None else max(lo, b)
        else:
            b = v // (-s)
            hi = b if hi is None else min(hi, b)
    return lo, hi


def _propose(entries, data: DataMatrix, mode: str, rng) -> tuple | None:
    """Draw a proposal; returns (coeffs, delta) or None when rejected."""
    i, k = _distinct_pair(rng, data.m)
    j, l = _distinct_pair(rng, data.n)
    coeffs = _cell_coefficients((i, k), (j, l), data.structure)
    if _touches_excluded_diagonal(coeffs, data.structure):
        return None
    cells = list(coeffs)
    values = [entries.get(cell, 0) for cell in cells]
    signs = [coeffs[cell] for cell in cells]
    if mode == "unit":
        for delta in (1, -1):
            if all(v + s * delta in (0, 1) for v, s in zip(values, signs)):
                return SwapOp((i, k), (j, l), delta), coeffs
        return None
    if mode == "integer":
        lo, hi = _integer_delta_bounds(values, signs)
        count = hi - lo + 1 - (1 if lo <= 0 <= hi else 0)
        if count <= 0:
            return None
        idx = int(rng.integers(count))
        delta = lo + idx
        if delta >= 0 and lo <= 0:
            delta += 1
        return SwapOp((i, k), (j, l), delta), coeffs
    lo = max(-v / s for v, s in zip(values, signs) if s > 0)
    hi = min(v / -s for v, s in zip(values, signs) if s < 0)
    if hi <= lo:
        return None
    delta = lo + (hi - lo) * float(rng.random())
    return SwapOp((i, k), (j, l), delta), coeffs


def _check_mode(data: DataMatrix, mode: str) -> None:
    if _MODE_DOMAIN[mode] is not data.domain:
        raise ValueError(
            f"delta_mode {mode!r} applies to domain {_MODE_DOMAIN[mode].value}, "
            f"matrix domain is {data.domain.value}"
        )


def run_chain(data: DataMatrix, chain: ChainSpec) -> tuple[DataMatrix, ChainStats]:
    """Run chain.steps proposals; every proposal consumes one step."""
    _check_mode(data, chain.delta_mode)
    rng = substream_generator(chain.seed)
    entries = dict(data.entries)
    stats = ChainStats()
    discrete = data.domain.is_discrete
    for _ in range(chain.steps):
        proposal = _propose(entries, data, chain.delta_mode, rng)
        if proposal is None:
            stats.rejected += 1
            continue
        op, coeffs = proposal
        _apply_to_entries(entries, coeffs, op.delta, discrete)
        stats.accepted += 1
    return data.replace_entries(entries, validate=False), stats


def randomize(data: DataMatrix, chain: ChainSpec) -> DataMatrix:
    """Randomized matrix with exactly the margins and structure of data."""
    return run_chain(data, chain)[0]


def propose_and_apply(data: DataMatrix, chain: ChainSpec) -> DataMatrix:
    """A single proposal step (rejected proposals return the matrix as is)."""
    result, _ = run_chain(data, ChainSpec(1, chain.seed, chain.delta_mode))
    return result


def sample_allowed_swaps(
    data: DataMatrix, count: int, seed: int, delta_mode: str,
    max_proposals: int | None = None,
) -> list[SwapOp]:
    """Collect `count` accepted swaps of a running chain (each allowed for
    the matrix state it was applied to)."""
    _check_mode(data, delta_mode)
    rng = substream_generator(seed)
    entries = dict(data.entries)
    discrete = data.domain.is_discrete
    ops: list[SwapOp] = []
    budget = max_proposals if max_proposals is not None else 1000 * count
    while len(ops) < count:
        if budget <= 0:
            raise RuntimeError(
                f"could not find {count} allowed swaps (matrix may admit none)"
            )
        budget -= 1
        proposal = _propose(entries, data, delta_mode, rng)
        if proposal is None:
            continue
        op, coeffs = proposal
        _apply_to_entries(entries, coeffs, op.delta, discrete)
        ops.append(op)
    return ops


def verify_invariance(
    model: MaxEntModel, data: DataMatrix, swaps
) -> float:
    """Apply the swaps in sequence; return max |log_prob change| per swap.

    Raises if any swap is disallowed for the matrix state it meets.
    """
    current = data.replace_entries(dict(data.entries), validate=False)
    before = model.log_prob(current)
    worst = 0.0
    for op in swaps:
        if not swap_allowed(op, current):
            raise ValueError(f"swap {op} not allowed at this point of the sequence")
        coeffs = _cell_coefficients(op.rows, op.cols, current.structure)
        entries = dict(current.entries)
        _apply_to_entries(entries, coeffs, op.delta, current.domain.is_discrete)
        current = current.replace_entries(entries, validate=False)
        after = model.log_prob(current)
        worst = max(worst, abs(after - before))
        before = after
    return worst
