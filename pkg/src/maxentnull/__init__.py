"""Explicit maximum-entropy null models for databases and networks.

Fit per-cell exponential-family models (Bernoulli / geometric /
exponential) whose expected row and column sums match given targets,
sample matrices from them, randomize matrices with exact-margin swap
chains, mine closed frequent itemsets, and assess mining results against
the model.
"""

from .assessment import AssessmentReport, assess, report_to_json, save_report
from .cells import (
    CellDistribution,
    cell_entropy,
    cell_log_norm,
    cell_log_prob,
    cell_mean,
    cell_variance,
)
from .degrees import (
    DegreeSequenceSpec,
    degree_targets,
    ensure_even_total,
    generate_degrees,
)
from .errors import InfeasibleError, InputFormatError
from .itemsets import ClosedItemsetResult, mine_closed
from .matrix import (
    DataMatrix,
    GroupedTargets,
    MarginTargets,
    Structure,
    StructureKind,
    TargetGroup,
    ValueDomain,
    bin_targets,
    compute_margins,
    database,
    directed,
    expand_groups,
    for_degrees,
    from_dense,
    group_targets,
    group_values,
    undirected,
)
from .model import (
    FitInfo,
    MaxEntModel,
    ModelGroup,
    entropy,
    expected_margins,
    load_model,
    log_prob,
    model_from_json,
    model_to_json,
    save_model,
)
from .sampling import SampleSpec, sample, sample_dense, sample_one
from .solver import (
    FitTrace,
    SolverConfig,
    build_problem,
    dual_gradient,
    dual_hessian,
    dual_value,
    fit,
)
from .swaps import (
    ChainSpec,
    SwapOp,
    apply_swap,
    propose_and_apply,
    randomize,
    run_chain,
    sample_allowed_swaps,
    swap_allowed,
    verify_invariance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
