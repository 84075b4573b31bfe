"""Fitted model: per-cell distributions parameterized by grouped multipliers.

The joint distribution factorizes over admissible cells.  Cell (i, j) has
natural parameter theta determined by one multiplier per distinct-target
group, so storage is O(#groups) and any cell evaluates in O(1):

    database / directed:  theta_ij = a_i + b_j   (row and column multipliers)
    undirected, i < j:    theta_ij = lam_i + lam_j
    undirected, i == j:   theta_ii = lam_i

The undirected diagonal uses lam_i, not 2*lam_i: a self-loop contributes
its value once to the degree sum_j D(i,j), so lam_i is the coefficient of
D(i,i) in sum_i lam_i * d_i(D).  This keeps the log-probability a function
of the margins alone, which is what makes margin-preserving swaps leave it
invariant.

Rows or columns with target zero are frozen: their multiplier is -inf and
their cells carry point mass at value 0.  Networks declared without
self-loops exclude the diagonal entirely ("admissible" cells are all
others).  For undirected structures each unordered pair is one cell,
counted once, so log_prob is a genuine log-probability over symmetric
matrices (log-density for the real domain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import formats
from .cells import CellDistribution, cell_entropy, cell_log_norm, cell_mean
from .errors import InfeasibleError, InputFormatError
from .matrix import (
    DataMatrix,
    MarginTargets,
    Structure,
    StructureKind,
    ValueDomain,
    for_degrees,
)

MODEL_FILE_VERSION = 1


@dataclass(frozen=True)
class ModelGroup:
    """One multiplier shared by the listed rows/columns/nodes (0-based)."""

    target: float
    lam: float
    members: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class FitInfo:
    iterations: int
    grad_norm: float  # normalized squared gradient norm at the final iterate
    solver: str


def _expand_lam(groups, size, what) -> np.ndarray:
    out = np.full(size, np.nan)
    for g in groups:
        for i in g.members:
            if not 0 <= i < size or not np.isnan(out[i]):
                raise ValueError(f"{what} groups do not partition range({size})")
            out[i] = g.lam
    if np.isnan(out).any():
        raise ValueError(f"{what} groups do not cover range({size})")
    return out


def _top_two(values: np.ndarray):
    v = np.sort(values)
    return v[-1], (v[-2] if v.size > 1 else -math.inf)


@dataclass
class MaxEntModel:
    """Fitted multipliers plus enough structure to evaluate any cell."""

    domain: ValueDomain
    structure: Structure
    m: int
    n: int
    row_groups: tuple[ModelGroup, ...]
    col_groups: tuple[ModelGroup, ...] | None  # None for undirected
    fit_info: FitInfo

    def __post_init__(self):
        if self.structure.is_undirected:
            if self.col_groups is not None:
                raise ValueError("undirected models carry a single multiplier vector")
            if self.m != self.n:
                raise ValueError("undirected models must be square")
            lam = _expand_lam(self.row_groups, self.n, "node")
            object.__setattr__(self, "_row_lam", lam)
            object.__setattr__(self, "_col_lam", lam)
        else:
            if self.col_groups is None:
                raise ValueError("database/directed models need column groups")
            object.__setattr__(
                self, "_row_lam", _expand_lam(self.row_groups, self.m, "row")
            )
            object.__setattr__(
                self, "_col_lam", _expand_lam(self.col_groups, self.n, "column")
            )
        if np.any(np.isposinf(self._row_lam)) or np.any(np.isposinf(self._col_lam)):
            raise ValueError("+inf multipliers are not representable")
        if self.domain is not ValueDomain.BINARY:
            mt = self.max_theta()
            if mt >= 0:
                raise InfeasibleError(
                    f"max cell parameter {mt} >= 0: normalizer diverges for "
                    f"domain {self.domain.value}"
                )

    # -- basic cell access ------------------------------------------------

    @property
    def row_lam(self) -> np.ndarray:
        return self._row_lam

    @property
    def col_lam(self) -> np.ndarray:
        return self._col_lam

    def theta(self, i: int, j: int) -> float:
        """Natural parameter of cell (i, j); -inf for frozen or excluded cells."""
        if i == j and self.structure.excludes_diagonal():
            return -math.inf
        if self.structure.is_undirected and i == j:
            return float(self._row_lam[i])
        return float(self._row_lam[i] + self._col_lam[j])

    def cell(self, i: int, j: int) -> CellDistribution:
        """The cell's distribution, in O(1) from the group multipliers."""
        return CellDistribution(self.theta(i, j), self.domain)

    def max_theta(self) -> float:
        """Largest natural parameter over admissible, non-frozen cells."""
        rl = self._row_lam[np.isfinite(self._row_lam)]
        cl = self._col_lam[np.isfinite(self._col_lam)]
        if self.structure.is_undirected:
            if rl.size == 0:
                return -math.inf
            top1, top2 = _top_two(rl)
            best = top1 + top2 if rl.size > 1 else -math.inf
            if self.structure.self_loops:
                best = max(best, top1)
            return float(best)
        if rl.size == 0 or cl.size == 0:
            return -math.inf
        if not self.structure.excludes_diagonal():
            return float(rl.max() + cl.max())
        # diagonal excluded: maximize rl[u] + cl[v] over node pairs u != v
        ru = int(np.nanargmax(np.where(np.isfinite(self._row_lam), self._row_lam, -np.inf)))
        cv = int(np.nanargmax(np.where(np.isfinite(self._col_lam), self._col_lam, -np.inf)))
        if ru != cv:
            return float(self._row_lam[ru] + self._col_lam[cv])
        r1, r2 = _top_two(rl)
        c1, c2 = _top_two(cl)
        return float(max(r1 + c2, r2 + c1))

    def theta_dense(self) -> np.ndarray:
        """Full (m, n) parameter matrix; excluded/frozen cells get -inf.

        Materializes m*n floats -- meant for sampling and small-model
        inspection, not for evaluating margins of very large networks.
        """
        with np.errstate(invalid="ignore"):
            t = self._row_lam[:, None] + self._col_lam[None, :]
        if self.structure.is_undirected:
            np.fill_diagonal(t, self._row_lam)
        if self.structure.excludes_diagonal():
            np.fill_diagonal(t, -np.inf)
        return t

    def mean_matrix(self) -> np.ndarray:
        """Dense matrix of expected cell values (see theta_dense caveat)."""
        return cell_mean(self.theta_dense(), self.domain)

    # -- grouped whole-matrix sums -----------------------------------------

    def _finite_groups(self, groups):
        vals = np.array([g.lam for g in groups])
        mult = np.array([float(g.multiplicity) for g in groups])
        keep = np.isfinite(vals)
        return vals[keep], mult[keep]

    def _safe(self, theta):
        """Mask non-negative parameters of fictitious cells.

        In a feasible model every *real* cell of an unbounded domain has
        theta < 0, so a non-negative entry in these grouped formulas can
        only belong to a zero-weight term: the subtracted self-pair of a
        node whose group is a singleton, or an excluded diagonal whose
        block holds no other cell.  A placeholder keeps the normalizer
        evaluable there, and the placeholder contributions cancel.
        """
        if self.domain is ValueDomain.BINARY:
            return theta
        theta = np.asarray(theta, dtype=float)
        return np.where(theta < 0, theta, -1.0)

    def _sum_over_cells(self, f) -> float:
        """Sum f(theta) over admissible cells with finite theta."""
        rl, rm = self._finite_groups(self.row_groups)
        if self.structure.is_undirected:
            if rl.size == 0:
                return 0.0
            block = f(self._safe(rl[:, None] + rl[None, :]))
            total = 0.5 * (rm @ block @ rm - rm @ f(self._safe(2.0 * rl)))
            if self.structure.self_loops:
                total += rm @ f(rl)
            return float(total)
        cl, cm = self._finite_groups(self.col_groups)
        if rl.size == 0 or cl.size == 0:
            return 0.0
        total = rm @ f(self._safe(rl[:, None] + cl[None, :])) @ cm
        if self.structure.excludes_diagonal():
            both = np.isfinite(self._row_lam) & np.isfinite(self._col_lam)
            if both.any():
                total -= f(self._safe(self._row_lam[both] + self._col_lam[both])).sum()
        return float(total)

    def log_norm_total(self) -> float:
        return self._sum_over_cells(lambda t: cell_log_norm(t, self.domain))

    def entropy(self) -> float:
        """Total entropy, summed per cell (differential for the real domain).

        Frozen and excluded cells are deterministic and contribute zero.
        """
        return self._sum_over_cells(lambda t: cell_entropy(t, self.domain))

    def expected_margins(self) -> MarginTargets:
        """Expected row/column sums (degrees) cell-by-cell.

        The undirected diagonal, when admissible, counts once toward the
        degree, matching how margins of a data matrix are computed.
        """
        dom = self.domain
        if self.structure.is_undirected:
            lam = self._row_lam
            rl, rm = self._finite_groups(self.row_groups)
            deg = np.zeros(self.n)
            finite = np.isfinite(lam)
            if rl.size:
                base = cell_mean(self._safe(lam[finite, None] + rl[None, :]), dom) @ rm
                corr = cell_mean(self._safe(2.0 * lam[finite]), dom)
                if self.structure.self_loops:
                    corr -= cell_mean(lam[finite], dom)
                deg[finite] = base - corr
            return for_degrees(deg)
        rl, rm = self._finite_groups(self.row_groups)
        cl, cm = self._finite_groups(self.col_groups)
        rows = np.zeros(self.m)
        cols = np.zeros(self.n)
        rfin = np.isfinite(self._row_lam)
        cfin = np.isfinite(self._col_lam)
        if rl.size and cl.size:
            rows[rfin] = cell_mean(
                self._safe(self._row_lam[rfin, None] + cl[None, :]), dom
            ) @ cm
            cols[cfin] = rm @ cell_mean(
                self._safe(rl[:, None] + self._col_lam[None, cfin]), dom
            )
            if self.structure.excludes_diagonal():
                both = rfin & cfin
                diag = cell_mean(
                    self._safe(self._row_lam[both] + self._col_lam[both]), dom
                )
                rows[both] -= diag
                cols[both] -= diag
        return MarginTargets(rows, cols)

    # -- data log-probability ----------------------------------------------

    def _check_data(self, data: DataMatrix) -> None:
        if (data.m, data.n) != (self.m, self.n):
            raise ValueError(
                f"data is {data.m}x{data.n}, model is {self.m}x{self.n}"
            )
        if data.structure != self.structure:
            raise ValueError("data and model structure differ")
        if data.domain != self.domain:
            raise ValueError("data and model domain differ")

    def log_prob(self, data: DataMatrix) -> float:
        """log P(data) under the model (log-density for the real domain).

        Nonzero values in frozen cells have probability zero, giving -inf.
        Each unordered pair of an undirected matrix contributes once.
        """
        self._check_data(data)
        dot = 0.0
        for (i, j), v in data.entries.items():
            t = self.theta(i, j)
            if t == -math.inf:
                return -math.inf
            dot += v * t
        return dot - self.log_norm_total()


def log_prob(model: MaxEntModel, data: DataMatrix) -> float:
    return model.log_prob(data)


def expected_margins(model: MaxEntModel) -> MarginTargets:
    return model.expected_margins()


def entropy(model: MaxEntModel) -> float:
    return model.entropy()


# -- model file ------------------------------------------------------------


def _groups_payload(groups) -> list:
    return [
        {
            "target": float(g.target),
            "lambda": float(g.lam),
            "members": [i + 1 for i in g.members],
        }
        for g in groups
    ]


def model_to_payload(model: MaxEntModel) -> dict:
    payload = {
        "version": MODEL_FILE_VERSION,
        "domain": model.domain.value,
        "structure": model.structure.kind.value,
        "self_loops": model.structure.self_loops,
        "m": model.m,
        "n": model.n,
        "row_groups": _groups_payload(model.row_groups),
        "fit": {
            "iterations": model.fit_info.iterations,
            "grad_norm": float(model.fit_info.grad_norm),
            "solver": model.fit_info.solver,
        },
    }
    if model.col_groups is not None:
        payload["col_groups"] = _groups_payload(model.col_groups)
    return payload


def model_to_json(model: MaxEntModel) -> str:
    return formats.canonical_json(model_to_payload(model))


def _groups_from_payload(raw, what) -> tuple[ModelGroup, ...]:
    groups = []
    try:
        for item in raw:
            members = tuple(int(i) - 1 for i in item["members"])
            groups.append(
                ModelGroup(float(item["target"]), float(item["lambda"]), members)
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed {what} in model file: {exc}") from exc
    return tuple(groups)


def model_from_payload(payload: dict) -> MaxEntModel:
    try:
        if payload["version"] != MODEL_FILE_VERSION:
            raise InputFormatError(
                f"unsupported model file version {payload['version']!r}"
            )
        domain = ValueDomain(payload["domain"])
        kind = StructureKind(payload["structure"])
        structure = Structure(kind, bool(payload["self_loops"]) if kind is not StructureKind.DATABASE else False)
        m, n = int(payload["m"]), int(payload["n"])
        fit_raw = payload["fit"]
        fit_info = FitInfo(
            int(fit_raw["iterations"]),
            float(fit_raw["grad_norm"]),
            str(fit_raw["solver"]),
        )
        row_groups = _groups_from_payload(payload["row_groups"], "row_groups")
        col_groups = (
            _groups_from_payload(payload["col_groups"], "col_groups")
            if "col_groups" in payload
            else None
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(f"malformed model file: {exc}") from exc
    try:
        return MaxEntModel(domain, structure, m, n, row_groups, col_groups, fit_info)
    except ValueError as exc:
        raise InputFormatError(f"inconsistent model file: {exc}") from exc


def model_from_json(text: str) -> MaxEntModel:
    return model_from_payload(formats.parse_json(text))


def save_model(model: MaxEntModel, path) -> None:
    formats.write_text(path, model_to_json(model) + "\n")


def load_model(path) -> MaxEntModel:
    return model_from_json(formats.read_text(path))
