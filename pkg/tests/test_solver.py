import math

import numpy as np
import pytest

from maxentnull import (
    InfeasibleError,
    MarginTargets,
    SolverConfig,
    ValueDomain,
    build_problem,
    compute_margins,
    database,
    directed,
    dual_gradient,
    dual_hessian,
    dual_value,
    fit,
    for_degrees,
    from_dense,
    undirected,
)
from maxentnull.solver import STATUS_CONVERGED, STATUS_MAX_ITER, trace_to_csv

B, I, R = ValueDomain.BINARY, ValueDomain.NONNEG_INT, ValueDomain.NONNEG_REAL


def random_targets(rng, m, n, domain):
    """Margins of a random matrix, so they are always realizable."""
    if domain is B:
        dense = (rng.random((m, n)) < rng.uniform(0.2, 0.7)).astype(float)
    elif domain is I:
        dense = rng.poisson(1.2, size=(m, n)).astype(float)
    else:
        dense = rng.exponential(1.0, size=(m, n)) * (rng.random((m, n)) < 0.7)
    return compute_margins(from_dense(dense, domain))


def feasible_point(rng, problem, domain):
    x = rng.normal(0, 0.4, problem.n_vars)
    if domain is B:
        return x
    # pull everything strictly negative, then verify
    x = x - (problem.max_theta(x) if problem.max_theta(x) > -0.2 else 0) - 0.3
    assert problem.feasible(x)
    return x


class TestDualValue:
    def test_single_cell(self):
        problem = build_problem(MarginTargets([0.5], [0.5]), B, database())
        assert dual_value(np.zeros(2), problem) == pytest.approx(math.log(2))

    def test_2x2_all_zero(self):
        problem = build_problem(MarginTargets([1, 1], [1, 1]), B, database())
        assert dual_value(np.zeros(2), problem) == pytest.approx(4 * math.log(2))
        # one group per side with multiplicity 2: still 4 cells
        assert problem.n_vars == 2

    def test_grouped_equals_ungrouped(self):
        rng = np.random.default_rng(3)
        for domain in (B, I, R):
            targets = random_targets(rng, 8, 6, domain)
            grouped = build_problem(targets, domain, database())
            plain = build_problem(targets, domain, database(), group=False)
            xg = feasible_point(rng, grouped, domain)
            # expand group multipliers onto singleton layout, preserving order
            expand = np.zeros(plain.n_vars)
            ra, ca = grouped.split(xg)
            pos = {i: k for k, mem in enumerate(grouped.row_members) for i in mem}
            rows_plain = [mem[0] for mem in plain.row_members]
            cols_plain = [mem[0] for mem in plain.col_members]
            cpos = {j: k for k, mem in enumerate(grouped.col_members) for j in mem}
            expand[: len(rows_plain)] = [ra[pos[i]] for i in rows_plain]
            expand[len(rows_plain):] = [ca[cpos[j]] for j in cols_plain]
            a = dual_value(xg, grouped)
            b = dual_value(expand, plain)
            assert a == pytest.approx(b, rel=1e-12)

    def test_infeasible_raises(self):
        problem = build_problem(MarginTargets([1.0], [1.0]), I, database())
        with pytest.raises(InfeasibleError):
            dual_value(np.zeros(1 + 1), problem)


class TestDualGradient:
    def test_matched_cell_gives_zero(self):
        problem = build_problem(MarginTargets([0.5], [0.5]), B, database())
        np.testing.assert_allclose(dual_gradient(np.zeros(2), problem), 0.0)

    @pytest.mark.parametrize("domain", [B, I, R])
    def test_finite_differences(self, domain):
        rng = np.random.default_rng(7)
        targets = random_targets(rng, 7, 5, domain)
        problem = build_problem(targets, domain, database())
        for _ in range(20):
            x = feasible_point(rng, problem, domain)
            g = dual_gradient(x, problem)
            h = 1e-6
            fd = np.zeros_like(g)
            for idx in range(x.size):
                e = np.zeros_like(x)
                e[idx] = h
                fd[idx] = (dual_value(x + e, problem) - dual_value(x - e, problem)) / (2 * h)
            np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-5)

    def test_zero_at_fit_optimum(self):
        rng = np.random.default_rng(8)
        targets = random_targets(rng, 6, 6, B)
        model, trace = fit(targets, B, database())
        assert trace.status == STATUS_CONVERGED
        em = model.expected_margins()
        np.testing.assert_allclose(em.row_targets, targets.row_targets, atol=1e-6)


class TestDualHessian:
    def test_2x2_bernoulli_block_values(self):
        problem = build_problem(
            MarginTargets([1.0, 0.5], [0.75, 0.75]), B, database(), group=False
        )
        h = dual_hessian(np.zeros(4), problem)
        # every cross row/col entry is var = 0.25; row diagonals sum two cells
        assert h[0, 2] == pytest.approx(0.25)
        assert h[1, 3] == pytest.approx(0.25)
        assert h[0, 0] == pytest.approx(0.5)
        assert h[2, 2] == pytest.approx(0.5)
        assert h[0, 1] == 0.0 and h[2, 3] == 0.0

    @pytest.mark.parametrize("domain", [B, I, R])
    def test_matches_gradient_differences(self, domain):
        rng = np.random.default_rng(9)
        targets = random_targets(rng, 5, 4, domain)
        problem = build_problem(targets, domain, database())
        for _ in range(10):
            x = feasible_point(rng, problem, domain)
            hess = dual_hessian(x, problem)
            step = 1e-6
            fd = np.zeros_like(hess)
            for idx in range(x.size):
                e = np.zeros_like(x)
                e[idx] = step
                fd[:, idx] = (
                    dual_gradient(x + e, problem) - dual_gradient(x - e, problem)
                ) / (2 * step)
            np.testing.assert_allclose(hess, fd, rtol=1e-4, atol=1e-4)

    @pytest.mark.parametrize("domain", [B, I, R])
    def test_positive_semidefinite(self, domain):
        rng = np.random.default_rng(10)
        targets = random_targets(rng, 6, 5, domain)
        problem = build_problem(targets, domain, database())
        for _ in range(10):
            x = feasible_point(rng, problem, domain)
            eigs = np.linalg.eigvalsh(dual_hessian(x, problem))
            assert eigs.min() >= -1e-10


class TestFit:
    def test_2x2_symmetric_margins(self):
        model, trace = fit(MarginTargets([1, 1], [1, 1]), B, database())
        assert trace.status == STATUS_CONVERGED
        np.testing.assert_allclose(model.mean_matrix(), 0.5, atol=1e-7)

    def test_2x2_derived_means(self):
        model, _ = fit(MarginTargets([1.5, 0.5], [1.0, 1.0]), B, database())
        expected = np.array([[0.75, 0.75], [0.25, 0.25]])
        np.testing.assert_allclose(model.mean_matrix(), expected, atol=1e-6)

    def test_trace_dual_non_increasing(self):
        # tolerance covers the rounding noise of a dual evaluation, which
        # scales with the summation width rather than the value
        rng = np.random.default_rng(21)
        targets = random_targets(rng, 20, 15, I)
        for method in ("newton", "pgd"):
            _, trace = fit(targets, I, database(), SolverConfig(method=method))
            duals = [r.dual for r in trace.records]
            for a, b in zip(duals, duals[1:]):
                assert b <= a + 1e-12 * max(1.0, abs(a))

    def test_trace_csv_shape(self):
        _, trace = fit(MarginTargets([1.0], [1.0]), B, database())
        csv = trace_to_csv(trace)
        assert csv.splitlines()[0] == "iteration,dual,grad_sq_norm,step"
        assert len(csv.splitlines()) == len(trace.records) + 1

    def test_zero_targets_freeze_cells(self):
        targets = MarginTargets([2.0, 0.0], [1.0, 1.0, 0.0])
        for domain in (B, I, R):
            model, trace = fit(targets, domain, database())
            assert trace.status == STATUS_CONVERGED
            means = model.mean_matrix()
            np.testing.assert_allclose(means[1, :], 0.0, atol=0)
            np.testing.assert_allclose(means[:, 2], 0.0, atol=0)
            em = model.expected_margins()
            np.testing.assert_allclose(em.row_targets, [2.0, 0.0], rtol=1e-6)

    def test_saturated_column_converges(self):
        # one column present in every row, like an always-on item
        rng = np.random.default_rng(22)
        dense = (rng.random((40, 8)) < 0.4).astype(int)
        dense[:, 0] = 1
        targets = compute_margins(from_dense(dense, B))
        model, trace = fit(targets, B, database())
        assert trace.status == STATUS_CONVERGED
        em = model.expected_margins()
        rel = np.abs(em.col_targets - targets.col_targets) / np.maximum(
            targets.col_targets, 1.0
        )
        assert rel.max() < 1e-6

    def test_all_zero_targets(self):
        model, trace = fit(MarginTargets([0.0, 0.0], [0.0]), R, database())
        assert trace.status == STATUS_CONVERGED
        assert model.fit_info.iterations == 0
        np.testing.assert_allclose(model.mean_matrix(), 0.0)

    def test_gauge_invariance(self):
        rng = np.random.default_rng(23)
        targets = random_targets(rng, 8, 8, B)
        model, _ = fit(targets, B, database())
        # the reported gauge balances the group sums
        a = [g.lam for g in model.row_groups if math.isfinite(g.lam)]
        b = [g.lam for g in model.col_groups if math.isfinite(g.lam)]
        assert sum(a) == pytest.approx(sum(b), abs=1e-9)
        # shifting the gauge by hand leaves every cell mean unchanged
        problem = build_problem(targets, B, database())
        x = np.concatenate([np.zeros(len(problem.row_values)),
                            np.zeros(len(problem.col_values))])
        shift = np.concatenate([np.full(len(problem.row_values), 0.7),
                                np.full(len(problem.col_values), -0.7)])
        assert dual_gradient(x, problem) @ shift == pytest.approx(0.0, abs=1e-9)

    def test_gauge_shift_leaves_cell_means_unchanged(self):
        from maxentnull import MaxEntModel, ModelGroup

        rng = np.random.default_rng(26)
        targets = random_targets(rng, 6, 5, B)
        model, _ = fit(targets, B, database())
        shift = 0.37
        rows = tuple(
            ModelGroup(g.target, g.lam + shift if math.isfinite(g.lam) else g.lam,
                       g.members)
            for g in model.row_groups
        )
        cols = tuple(
            ModelGroup(g.target, g.lam - shift if math.isfinite(g.lam) else g.lam,
                       g.members)
            for g in model.col_groups
        )
        shifted = MaxEntModel(B, model.structure, model.m, model.n,
                              rows, cols, model.fit_info)
        np.testing.assert_allclose(shifted.mean_matrix(), model.mean_matrix(),
                                   atol=1e-12)

    def test_newton_and_pgd_agree(self):
        rng = np.random.default_rng(24)
        for domain in (B, I, R):
            targets = random_targets(rng, 9, 7, domain)
            tight = dict(tol=1e-20, max_iter=4000)
            m1, t1 = fit(targets, domain, database(), SolverConfig("newton", **tight))
            m2, t2 = fit(targets, domain, database(), SolverConfig("pgd", **tight))
            np.testing.assert_allclose(
                m1.mean_matrix(), m2.mean_matrix(), atol=1e-8
            )

    def test_max_iter_status(self):
        rng = np.random.default_rng(25)
        targets = random_targets(rng, 30, 30, B)
        model, trace = fit(targets, B, database(), SolverConfig(max_iter=1))
        assert trace.status == STATUS_MAX_ITER
        assert model is not None  # best iterate still returned

    def test_infeasible_binary_target_rejected(self):
        with pytest.raises(InfeasibleError):
            fit(MarginTargets([4.0], [2.0, 1.0, 1.0]), B, database())

    def test_saturated_row_target_is_allowed(self):
        # a row target equal to the column count is reachable (all ones)
        model, trace = fit(MarginTargets([3.0, 0.0], [1.0, 1.0, 1.0]), B, database())
        assert trace.status == STATUS_CONVERGED
        np.testing.assert_allclose(model.mean_matrix()[0], 1.0, atol=1e-5)

    def test_margin_mismatch_rejected(self):
        with pytest.raises(InfeasibleError):
            fit(MarginTargets([2.0], [1.0]), B, database())

    def test_target_exceeding_active_cells_rejected(self):
        # row needs 3 ones but only 2 columns have nonzero targets
        with pytest.raises(InfeasibleError):
            fit(MarginTargets([3.0, 1.0], [2.0, 2.0, 0.0]), B, database())


class TestNetworkFits:
    def test_undirected_margin_fidelity(self):
        rng = np.random.default_rng(30)
        n = 25
        dense = (rng.random((n, n)) < 0.2).astype(float)
        dense = np.triu(dense, 1)
        dense = dense + dense.T
        data = from_dense(dense, B, undirected(False))
        targets = compute_margins(data)
        model, trace = fit(targets, B, undirected(False))
        assert trace.status == STATUS_CONVERGED
        got = model.expected_margins().degrees
        np.testing.assert_allclose(got, targets.degrees, atol=2e-6)

    def test_undirected_with_self_loops(self):
        degrees = for_degrees([3.0, 2.0, 2.0, 1.0])
        model, trace = fit(degrees, I, undirected(True))
        assert trace.status == STATUS_CONVERGED
        got = model.expected_margins().degrees
        np.testing.assert_allclose(got, degrees.degrees, rtol=1e-6)

    def test_directed_no_loops_margin_fidelity(self):
        # nodes with equal out-targets but different in-targets: the grouped
        # solve must still match margins per node, not per value class
        rng = np.random.default_rng(31)
        n = 12
        dense = (rng.random((n, n)) < 0.4).astype(float)
        np.fill_diagonal(dense, 0)
        data = from_dense(dense, B, directed(False))
        targets = compute_margins(data)
        model, trace = fit(targets, B, directed(False))
        assert trace.status == STATUS_CONVERGED
        em = model.expected_margins()
        np.testing.assert_allclose(em.row_targets, targets.row_targets, atol=1e-6)
        np.testing.assert_allclose(em.col_targets, targets.col_targets, atol=1e-6)

    def test_directed_with_loops(self):
        rng = np.random.default_rng(32)
        n = 10
        dense = rng.poisson(0.8, size=(n, n)).astype(float)
        data = from_dense(dense, I, directed(True))
        targets = compute_margins(data)
        model, trace = fit(targets, I, directed(True))
        assert trace.status == STATUS_CONVERGED
        em = model.expected_margins()
        np.testing.assert_allclose(
            em.row_targets, targets.row_targets, rtol=1e-6, atol=1e-9
        )

    def test_undirected_binary_degree_cap(self):
        with pytest.raises(InfeasibleError):
            fit(for_degrees([4.0, 2.0, 1.0, 1.0]), B, undirected(False))

    def test_saturated_star_degrees(self):
        # hub connected to every leaf almost surely, leaves mutually unlinked
        model, trace = fit(for_degrees([3.0, 1.0, 1.0, 1.0]), B, undirected(False))
        assert trace.status == STATUS_CONVERGED
        means = model.mean_matrix()
        np.testing.assert_allclose(means[0, 1:], 1.0, atol=1e-5)
        np.testing.assert_allclose(means[1, 2:], 0.0, atol=1e-5)


class TestBinnedFit:
    def test_bins_shrink_groups_and_match_binned_targets(self):
        rng = np.random.default_rng(33)
        degrees = np.sort(rng.integers(1, 40, size=200)).astype(float)
        targets = for_degrees(degrees)
        config = SolverConfig(max_bins=5)
        model, trace = fit(targets, I, undirected(False), config)
        assert trace.status == STATUS_CONVERGED
        assert len(model.row_groups) <= 5
        # expected degrees match the *binned* targets, and totals agree
        em = model.expected_margins().degrees
        assert em.sum() == pytest.approx(degrees.sum(), rel=1e-6)

    def test_binned_directed_without_loops(self):
        # binning happens per side before the pair grouping
        rng = np.random.default_rng(34)
        n = 40
        dense = rng.poisson(1.1, size=(n, n)).astype(float)
        np.fill_diagonal(dense, 0)
        targets = compute_margins(from_dense(dense, I, directed(False)))
        model, trace = fit(targets, I, directed(False), SolverConfig(max_bins=4))
        assert trace.status == STATUS_CONVERGED
        binned_rows = {g.target for g in model.row_groups if g.multiplicity}
        assert len(binned_rows) <= 5  # 4 bins plus a possible frozen group
        em = model.expected_margins()
        assert em.row_targets.sum() == pytest.approx(
            targets.row_targets.sum(), rel=1e-6
        )


class TestDeterminism:
    def test_fit_is_bit_reproducible(self):
        rng = np.random.default_rng(35)
        targets = random_targets(rng, 40, 25, I)
        (m1, t1), (m2, t2) = (fit(targets, I, database()) for _ in range(2))
        assert m1 == m2
        assert [(r.dual, r.grad_sq_norm, r.step) for r in t1.records] == \
               [(r.dual, r.grad_sq_norm, r.step) for r in t2.records]
