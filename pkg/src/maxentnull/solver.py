"""Fitting the multipliers: convex dual minimization over grouped variables.

With the normalization multiplier eliminated analytically, the dual is

    L(a, b) = sum_cells log Z(a_i + b_j) - sum_i a_i r_i - sum_j b_j c_j,

smooth and convex; its gradient in a_i is (expected row sum i) - r_i, so
the minimizer matches the target margins.  Rows or columns sharing a
target share a multiplier, collapsing the sum over cells to one term per
group pair weighted by the number of cells in the block: cost O(R*C) per
evaluation for R row groups and C column groups, independent of m*n.

Grouping rules per structure:

* databases and directed networks with self-loops: rows and columns group
  independently by target value;
* directed networks without self-loops: nodes group by the *pair* of
  (out-target, in-target).  Value-only grouping is unsound here because
  two rows with equal out-targets but different in-targets lose different
  diagonal cells and need different multipliers;
* undirected networks: nodes group by degree target, one multiplier each;
  the cell for the unordered pair {i, j} has parameter lam_i + lam_j and
  the diagonal, when admissible, has parameter lam_i.

Zero targets are peeled off before solving: their rows/columns are frozen
at point mass zero (multiplier -inf), which avoids driving multipliers to
-infinity numerically.  Saturated binary targets (e.g. a column present in
every row) are kept in the solve; the optimum then lies at infinity and
the iteration walks up the exponential tail until the stopping rule fires,
which costs a few dozen extra iterations and needs no special casing.

Two methods: Newton (damped, Tikhonov 1e-10 to absorb the row+c/col-c
gauge null direction) and gradient descent preconditioned by the inverse
Hessian diagonal (Jacobi, damped by 2/3 -- see PGD_STEP0), both with
backtracking line search enforcing sufficient decrease and, for the
unbounded domains, feasibility of every admissible cell parameter.
Iterations stop when ||g||^2 / #groups < tol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cells import cell_log_norm, cell_mean, cell_variance
from .errors import InfeasibleError
from .matrix import (
    MarginTargets,
    Structure,
    ValueDomain,
    bin_margin_vector,
    group_values,
)
from .model import FitInfo, MaxEntModel, ModelGroup

TIKHONOV_DAMPING = 1e-10
MIN_STEP = 1e-30

STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max_iter_reached"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`fit`.

    tol is the threshold on the squared gradient norm divided by the
    number of multiplier groups.  max_bins, when set, replaces each side's
    targets by bin averages before grouping (see matrix.bin_targets).
    """

    method: str = "newton"  # "newton" | "pgd"
    tol: float = 1e-12
    max_iter: int = 1000
    ls_shrink: float = 0.5
    ls_c1: float = 1e-4
    max_bins: int | None = None

    def __post_init__(self):
        if self.method not in ("newton", "pgd"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be > 0 and max_iter >= 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    dual: float
    grad_sq_norm: float  # ||g||^2 / #groups
    step: float


@dataclass
class FitTrace:
    records: list[TraceRecord] = field(default_factory=list)
    status: str = STATUS_MAX_ITER


def trace_to_csv(trace: FitTrace) -> str:
    lines = ["iteration,dual,grad_sq_norm,step"]
    for r in trace.records:
        lines.append(f"{r.iteration},{r.dual!r},{r.grad_sq_norm!r},{r.step!r}")
    return "".join(line + "\n" for line in lines)


# -- problem representations -------------------------------------------------


class BipartiteProblem:
    """Grouped dual for databases and directed networks.

    Variables are concat(a, b) over R row groups and C column groups.
    weights[g, h] counts admissible cells in the block (excluded diagonal
    cells of a no-self-loop directed network are subtracted; the pair
    grouping guarantees whole blocks are affected uniformly).
    """

    def __init__(self, domain, row_values, row_mult, col_values, col_mult,
                 weights, row_members, col_members, frozen_rows, frozen_cols,
                 m, n):
        self.domain = domain
        self.row_values = np.asarray(row_values, dtype=float)
        self.row_mult = np.asarray(row_mult, dtype=float)
        self.col_values = np.asarray(col_values, dtype=float)
        self.col_mult = np.asarray(col_mult, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.row_members = row_members
        self.col_members = col_members
        self.frozen_rows = frozen_rows
        self.frozen_cols = frozen_cols
        self.m = m
        self.n = n
        self._has_empty_block = bool(np.any(self.weights == 0))
        self._rt = self.row_mult * self.row_values
        self._ct = self.col_mult * self.col_values

    @property
    def n_vars(self) -> int:
        return self.row_values.size + self.col_values.size

    def split(self, lams):
        return lams[: self.row_values.size], lams[self.row_values.size:]

    def _theta(self, lams):
        a, b = self.split(lams)
        theta = a[:, None] + b[None, :]
        if self._has_empty_block:
            theta = np.where(self.weights > 0, theta, -1.0)
        return theta

    def max_theta(self, lams) -> float:
        a, b = self.split(lams)
        if a.size == 0 or b.size == 0:
            return -math.inf
        theta = a[:, None] + b[None, :]
        return float(np.max(np.where(self.weights > 0, theta, -np.inf)))

    def feasible(self, lams) -> bool:
        if self.domain is ValueDomain.BINARY:
            return True
        return self.max_theta(lams) < 0

    def dual_value(self, lams) -> float:
        a, b = self.split(lams)
        s = float((self.weights * cell_log_norm(self._theta(lams), self.domain)).sum())
        return s - float(self._rt @ a) - float(self._ct @ b)

    def gradient(self, lams) -> np.ndarray:
        wm = self.weights * cell_mean(self._theta(lams), self.domain)
        return np.concatenate([wm.sum(axis=1) - self._rt, wm.sum(axis=0) - self._ct])

    def hessian(self, lams) -> np.ndarray:
        v = self.weights * cell_variance(self._theta(lams), self.domain)
        r, c = self.row_values.size, self.col_values.size
        h = np.zeros((r + c, r + c))
        h[:r, :r] = np.diag(v.sum(axis=1))
        h[r:, r:] = np.diag(v.sum(axis=0))
        h[:r, r:] = v
        h[r:, :r] = v.T
        return h

    def hessian_diag(self, lams) -> np.ndarray:
        v = self.weights * cell_variance(self._theta(lams), self.domain)
        return np.concatenate([v.sum(axis=1), v.sum(axis=0)])

    def group_margins(self, lams):
        """Expected margin per member row / per member column, by group."""
        wm = self.weights * cell_mean(self._theta(lams), self.domain)
        return wm.sum(axis=1) / self.row_mult, wm.sum(axis=0) / self.col_mult

    def dual_abs_scale(self, lams) -> float:
        """Sum of absolute dual contributions: the rounding noise of a dual
        evaluation is of order eps times this, not eps times the value."""
        a, b = self.split(lams)
        s = float(np.abs(self.weights * cell_log_norm(self._theta(lams), self.domain)).sum())
        return s + float(np.abs(self._rt * a).sum() + np.abs(self._ct * b).sum())

    def cell_count(self) -> float:
        return float(self.weights.sum())

    def target_total(self) -> float:
        return float(self._rt.sum())

    def init_lams(self) -> np.ndarray:
        return np.full(self.n_vars, _init_value(self))


class SymmetricProblem:
    """Grouped dual for undirected networks: one multiplier per degree group.

    pair_weights[k, l] = M_k * M_l for k != l and M_k * (M_k - 1) on the
    diagonal, so that half its weighted sum ranges over unordered pairs.
    """

    def __init__(self, domain, values, mult, self_loops, members, frozen, n):
        self.domain = domain
        self.values = np.asarray(values, dtype=float)
        self.mult = np.asarray(mult, dtype=float)
        self.self_loops = self_loops
        self.members = members
        self.frozen_rows = frozen
        self.frozen_cols = frozen
        self.m = n
        self.n = n
        w = np.outer(self.mult, self.mult)
        np.fill_diagonal(w, self.mult * (self.mult - 1.0))
        self.pair_weights = w
        self._t = self.mult * self.values

    @property
    def n_vars(self) -> int:
        return self.values.size

    def _theta(self, lams):
        theta = lams[:, None] + lams[None, :]
        if np.any(self.pair_weights == 0):
            theta = np.where(self.pair_weights > 0, theta, -1.0)
        return theta

    def max_theta(self, lams) -> float:
        if lams.size == 0:
            return -math.inf
        best = -math.inf
        if lams.size > 1:
            top = np.sort(lams)[-2:]
            best = float(top[0] + top[1])
        within = lams[self.mult >= 2]
        if within.size:
            best = max(best, 2.0 * float(within.max()))
        if self.self_loops:
            best = max(best, float(lams.max()))
        return best

    def feasible(self, lams) -> bool:
        if self.domain is ValueDomain.BINARY:
            return True
        return self.max_theta(lams) < 0

    def dual_value(self, lams) -> float:
        s = 0.5 * float(
            (self.pair_weights * cell_log_norm(self._theta(lams), self.domain)).sum()
        )
        if self.self_loops:
            s += float(self.mult @ cell_log_norm(lams, self.domain))
        return s - float(self._t @ lams)

    def gradient(self, lams) -> np.ndarray:
        g = (self.pair_weights * cell_mean(self._theta(lams), self.domain)).sum(axis=1)
        if self.self_loops:
            g = g + self.mult * cell_mean(lams, self.domain)
        return g - self._t

    def hessian(self, lams) -> np.ndarray:
        v = self.pair_weights * cell_variance(self._theta(lams), self.domain)
        h = v.copy()
        np.fill_diagonal(h, v.sum(axis=1) + np.diag(v))
        if self.self_loops:
            h[np.diag_indices_from(h)] += self.mult * cell_variance(lams, self.domain)
        return h

    def hessian_diag(self, lams) -> np.ndarray:
        v = self.pair_weights * cell_variance(self._theta(lams), self.domain)
        d = v.sum(axis=1) + np.diag(v)
        if self.self_loops:
            d = d + self.mult * cell_variance(lams, self.domain)
        return d

    def group_margins(self, lams):
        e = (self.pair_weights * cell_mean(self._theta(lams), self.domain)).sum(axis=1)
        if self.self_loops:
            e = e + self.mult * cell_mean(lams, self.domain)
        return e / self.mult, None

    def dual_abs_scale(self, lams) -> float:
        s = 0.5 * float(
            np.abs(self.pair_weights * cell_log_norm(self._theta(lams), self.domain)).sum()
        )
        if self.self_loops:
            s += float(np.abs(self.mult * cell_log_norm(lams, self.domain)).sum())
        return s + float(np.abs(self._t * lams).sum())

    def cell_count(self) -> float:
        c = 0.5 * float(self.pair_weights.sum())
        if self.self_loops:
            c += float(self.mult.sum())
        return c

    def target_total(self) -> float:
        return float(self._t.sum())

    def init_lams(self) -> np.ndarray:
        return np.full(self.n_vars, _init_value(self))


def _init_value(problem) -> float:
    """Feasible starting multiplier matching the global mean cell value.

    Binary starts at 0 (always feasible); the unbounded domains start at
    the value whose shared theta reproduces mean s/A over the A admissible
    cells with total target s.
    """
    if problem.domain is ValueDomain.BINARY:
        return 0.0
    s = problem.target_total()
    a = problem.cell_count()
    if problem.domain is ValueDomain.NONNEG_INT:
        return 0.5 * math.log(s / (s + a))
    return -a / (2.0 * s)


# -- building problems -------------------------------------------------------


def _group_arrays(values: np.ndarray, indices: np.ndarray, group: bool):
    """Group `values` (parallel to original `indices`), ascending by value."""
    if not group:
        order = np.argsort(indices)
        vals = values[order]
        members = [(int(indices[i]),) for i in order]
        return vals, np.ones(len(vals)), members
    groups = group_values(values)
    vals = np.array([g.value for g in groups])
    mult = np.array([float(g.multiplicity) for g in groups])
    members = [tuple(int(indices[i]) for i in g.members) for g in groups]
    return vals, mult, members


def _check_binary_caps(row_t, col_t, structure: Structure, domain: ValueDomain):
    if domain is not ValueDomain.BINARY:
        return
    row_active = row_t > 0
    col_active = col_t > 0
    n_row_active = int(row_active.sum())
    n_col_active = int(col_active.sum())
    if structure.is_undirected:
        cap = n_row_active if structure.self_loops else n_row_active - 1
        bad = np.flatnonzero(row_active & (row_t > cap))
        if bad.size:
            raise InfeasibleError(
                f"binary degree target {row_t[bad[0]]} at node {bad[0]} exceeds "
                f"the {cap} reachable cells"
            )
        return
    row_cap = np.full(row_t.shape, float(n_col_active))
    col_cap = np.full(col_t.shape, float(n_row_active))
    if structure.excludes_diagonal():
        row_cap -= col_active.astype(float)
        col_cap -= row_active.astype(float)
    for name, t, cap, active in (
        ("row", row_t, row_cap, row_active),
        ("column", col_t, col_cap, col_active),
    ):
        bad = np.flatnonzero(active & (t > cap))
        if bad.size:
            i = bad[0]
            raise InfeasibleError(
                f"binary {name} target {t[i]} at index {i} exceeds the "
                f"{cap[i]:g} reachable cells"
            )


def build_problem(
    targets: MarginTargets,
    domain: ValueDomain,
    structure: Structure,
    max_bins: int | None = None,
    group: bool = True,
):
    """Validate targets against the structure and build the grouped dual."""
    row_t = targets.row_targets
    col_t = targets.col_targets
    if structure.is_network and row_t.size != col_t.size:
        raise InfeasibleError("network targets need one value per node and side")
    if structure.is_undirected and not np.array_equal(row_t, col_t):
        raise InfeasibleError("undirected networks take a single degree vector")
    _check_binary_caps(row_t, col_t, structure, domain)

    if structure.is_undirected:
        n = row_t.size
        active = np.flatnonzero(row_t > 0)
        frozen = tuple(int(i) for i in np.flatnonzero(row_t == 0))
        vals = row_t[active]
        if max_bins is not None and vals.size:
            vals = bin_margin_vector(vals, max_bins)
        values, mult, members = _group_arrays(vals, active, group)
        return SymmetricProblem(domain, values, mult, structure.self_loops,
                                members, frozen, n)

    m, n = row_t.size, col_t.size
    row_active = np.flatnonzero(row_t > 0)
    col_active = np.flatnonzero(col_t > 0)
    frozen_rows = tuple(int(i) for i in np.flatnonzero(row_t == 0))
    frozen_cols = tuple(int(j) for j in np.flatnonzero(col_t == 0))
    rv = row_t[row_active]
    cv = col_t[col_active]
    if max_bins is not None:
        if rv.size:
            rv = bin_margin_vector(rv, max_bins)
        if cv.size:
            cv = bin_margin_vector(cv, max_bins)

    if not structure.excludes_diagonal():
        row_values, row_mult, row_members = _group_arrays(rv, row_active, group)
        col_values, col_mult, col_members = _group_arrays(cv, col_active, group)
        weights = np.outer(row_mult, col_mult)
        return BipartiteProblem(domain, row_values, row_mult, col_values,
                                col_mult, weights, row_members, col_members,
                                frozen_rows, frozen_cols, m, n)

    # Directed without self-loops: group nodes by (out, in) target pair so
    # every block of the cell grid, diagonal exclusion included, is uniform
    # across a group.
    rfull = _expand_active(row_t, row_active, rv)
    cfull = _expand_active(col_t, col_active, cv)
    if group:
        pairs: dict[tuple[float, float], list[int]] = {}
        for i in range(n):
            pairs.setdefault((float(rfull[i]), float(cfull[i])), []).append(i)
        classes = [(k[0], k[1], pairs[k]) for k in sorted(pairs)]
    else:
        classes = [(float(rfull[i]), float(cfull[i]), [i]) for i in range(n)]
    row_classes = [c for c in classes if c[0] > 0]
    col_classes = [c for c in classes if c[1] > 0]
    row_values = np.array([c[0] for c in row_classes])
    col_values = np.array([c[1] for c in col_classes])
    row_mult = np.array([float(len(c[2])) for c in row_classes])
    col_mult = np.array([float(len(c[2])) for c in col_classes])
    row_members = [tuple(c[2]) for c in row_classes]
    col_members = [tuple(c[2]) for c in col_classes]
    weights = np.outer(row_mult, col_mult)
    col_pos = {id(c): h for h, c in enumerate(col_classes)}
    for g, c in enumerate(row_classes):
        h = col_pos.get(id(c))
        if h is not None:
            weights[g, h] -= len(c[2])
    return BipartiteProblem(domain, row_values, row_mult, col_values, col_mult,
                            weights, row_members, col_members,
                            frozen_rows, frozen_cols, m, n)


def _expand_active(full_t, active_idx, active_vals) -> np.ndarray:
    """Scatter (possibly binned) active values back onto the full index range."""
    out = np.zeros(full_t.shape)
    out[active_idx] = active_vals
    return out


# -- public dual pieces -------------------------------------------------------


def _check_lams(lams, problem) -> np.ndarray:
    lams = np.asarray(lams, dtype=float)
    if lams.shape != (problem.n_vars,):
        raise ValueError(f"expected {problem.n_vars} multipliers, got {lams.shape}")
    if not problem.feasible(lams):
        raise InfeasibleError(
            f"max cell parameter {problem.max_theta(lams)} >= 0 for domain "
            f"{problem.domain.value}"
        )
    return lams


def dual_value(lams, problem) -> float:
    """Eliminated-normalizer dual objective at the given group multipliers."""
    return problem.dual_value(_check_lams(lams, problem))


def dual_gradient(lams, problem) -> np.ndarray:
    """Gradient over group multipliers: group g's component sums
    (expected margin - target) over its member rows/columns."""
    return problem.gradient(_check_lams(lams, problem))


def dual_hessian(lams, problem) -> np.ndarray:
    """Symmetric PSD Hessian over group multipliers (block entries are
    summed cell variances)."""
    return problem.hessian(_check_lams(lams, problem))


# -- fit ----------------------------------------------------------------------


# The preconditioned-gradient backtracking starts below 1: on these duals
# the operator diag(H)^-1 H has an eigenvalue of exactly 2 along the
# all-ones direction (each Hessian row sums to twice its diagonal), so a
# full Jacobi step flips that error mode forever instead of shrinking it;
# starting at 2/3 bounds every mode's contraction factor by 1/3.
PGD_STEP0 = 2.0 / 3.0


def _direction(problem, lams, grad, method: str):
    """Descent direction and the step size to start backtracking from.

    The Newton system is solved after symmetric diagonal scaling: group
    multiplicities can differ by four orders of magnitude, and the raw
    Hessian is then too ill-conditioned for a reliable solve near the
    optimum.  Scaling makes the Tikhonov term a relative damping, which
    also absorbs the gauge null direction.  If the computed step still
    fails to be a descent direction, fall back to the preconditioned
    gradient step.
    """
    hd = np.maximum(problem.hessian_diag(lams), TIKHONOV_DAMPING)
    if method == "newton":
        h = problem.hessian(lams)
        scale = np.sqrt(hd)
        hs = h / np.outer(scale, scale)
        hs[np.diag_indices_from(hs)] += TIKHONOV_DAMPING
        try:
            d = np.linalg.solve(hs, -(grad / scale)) / scale
            if float(grad @ d) < 0:
                return d, 1.0
        except np.linalg.LinAlgError:
            pass
    return -grad / hd, PGD_STEP0


def _line_search(problem, lams, dual0, grad, direction, config, alpha0=1.0):
    """Backtrack until the trial point is feasible and Armijo-decreases.

    Returns (new lams, new dual, step) or None when the step underflows.
    The acceptance test carries an epsilon scaled to the summation width
    of a dual evaluation: near the optimum true decreases drop below the
    rounding noise of the dual, and rejecting those steps would stall the
    iteration just short of the gradient tolerance.
    """
    gd = float(grad @ direction)
    noise = np.finfo(float).eps * max(problem.dual_abs_scale(lams), 1.0)
    alpha = alpha0
    while alpha >= MIN_STEP:
        trial = lams + alpha * direction
        if problem.feasible(trial):
            dv = problem.dual_value(trial)
            if dv <= dual0 + config.ls_c1 * alpha * gd + 16.0 * noise:
                return trial, dv, alpha, dual0 - dv > 16.0 * noise
        alpha *= config.ls_shrink
    return None


def _gradient_norm_search(problem, lams, grad, direction, config, alpha0):
    """Backtrack on ||gradient|| instead of the dual.

    Once the remaining dual decrease drops below one ulp of the dual's
    magnitude, the Armijo test carries no information; the gradient is
    still computed at full precision, so the endgame accepts steps that
    shrink it (the stationarity residual) by a sufficient factor.
    """
    gnorm = float(np.linalg.norm(grad))
    alpha = alpha0
    while alpha >= 2.0 ** -40:
        trial = lams + alpha * direction
        if problem.feasible(trial):
            if float(np.linalg.norm(problem.gradient(trial))) <= (
                1.0 - config.ls_c1 * alpha
            ) * gnorm:
                return trial, problem.dual_value(trial), alpha
        alpha *= config.ls_shrink
    return None


def _fit_step(problem, lams, dual0, grad, config):
    """One accepted step: dual-decrease search first, gradient-norm
    endgame when dual progress is no longer measurable."""
    direction, alpha0 = _direction(problem, lams, grad, config.method)
    accepted = _line_search(problem, lams, dual0, grad, direction, config, alpha0)
    if accepted is not None and accepted[3]:
        return accepted[:3]
    hd = np.maximum(problem.hessian_diag(lams), TIKHONOV_DAMPING)
    candidates = [(direction, alpha0), (-grad / hd, PGD_STEP0)]
    for d, a0 in candidates:
        result = _gradient_norm_search(problem, lams, grad, d, config, a0)
        if result is not None:
            return result
    return accepted[:3] if accepted is not None else None


def fit(
    targets: MarginTargets,
    domain: ValueDomain,
    structure: Structure,
    config: SolverConfig | None = None,
) -> tuple[MaxEntModel, FitTrace]:
    """Fit multipliers so expected margins match the targets.

    Returns the model together with the iteration trace.  Status
    "max_iter_reached" returns the best iterate found; obviously
    unreachable targets raise InfeasibleError up front.
    """
    config = config or SolverConfig()
    problem = build_problem(targets, domain, structure, config.max_bins)
    trace = FitTrace()

    if problem.n_vars == 0:
        trace.status = STATUS_CONVERGED
        info = FitInfo(0, 0.0, config.method)
        return _assemble_model(problem, None, structure, domain, info), trace

    if problem.cell_count() == 0:
        raise InfeasibleError(
            "targets are positive but the structure admits no cells"
        )
    lams = problem.init_lams()
    if not problem.feasible(lams):
        raise InfeasibleError("no feasible starting point for these targets")

    dual0 = problem.dual_value(lams)
    step = 0.0
    iterations = 0
    gsq = math.inf
    for it in range(config.max_iter + 1):
        grad = problem.gradient(lams)
        gsq = float(grad @ grad) / problem.n_vars
        trace.records.append(TraceRecord(it, dual0, gsq, step))
        if gsq < config.tol:
            trace.status = STATUS_CONVERGED
            iterations = it
            break
        if it == config.max_iter:
            trace.status = STATUS_MAX_ITER
            iterations = it
            break
        result = _fit_step(problem, lams, dual0, grad, config)
        if result is None:
            trace.status = STATUS_MAX_ITER
            iterations = it
            break
        lams, dual0, step = result

    info = FitInfo(iterations, gsq, config.method)
    return _assemble_model(problem, lams, structure, domain, info), trace


def _gauge_normalize(problem, lams) -> np.ndarray:
    """Shift row multipliers by +c and column multipliers by -c (which
    leaves every cell parameter unchanged) so the two group sums agree."""
    a, b = problem.split(lams)
    if a.size == 0 or b.size == 0:
        return lams
    c = (b.sum() - a.sum()) / (a.size + b.size)
    return np.concatenate([a + c, b - c])


def _model_groups(values, lams, members, frozen) -> tuple[ModelGroup, ...]:
    groups = [
        ModelGroup(float(v), float(l), tuple(mem))
        for v, l, mem in zip(values, lams, members)
    ]
    if frozen:
        groups.append(ModelGroup(0.0, -math.inf, tuple(frozen)))
    groups.sort(key=lambda g: (g.target, g.members[0] if g.members else -1))
    return tuple(groups)


def _assemble_model(problem, lams, structure, domain, info) -> MaxEntModel:
    if isinstance(problem, SymmetricProblem):
        vals = problem.values if lams is not None else []
        ls = lams if lams is not None else []
        row_groups = _model_groups(vals, ls, problem.members, problem.frozen_rows)
        return MaxEntModel(domain, structure, problem.n, problem.n,
                           row_groups, None, info)
    if lams is None:
        a = b = np.array([])
    else:
        a, b = problem.split(_gauge_normalize(problem, lams))
    row_groups = _model_groups(problem.row_values, a, problem.row_members,
                               problem.frozen_rows)
    col_groups = _model_groups(problem.col_values, b, problem.col_members,
                               problem.frozen_cols)
    return MaxEntModel(domain, structure, problem.m, problem.n,
                       row_groups, col_groups, info)
