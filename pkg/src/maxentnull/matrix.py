"""Data model for matrices representing databases and networks.

A database with m transactions over n items, a directed network on n nodes,
or an undirected network on n nodes is stored as a sparse matrix D whose
values live in one of three domains: {0,1}, the non-negative integers, or
the non-negative reals.  Row and column sums of D (degrees, for networks)
are the margins; fitted models constrain their expectations.

Indexing is 0-based in memory.  Serialized artifacts (model files, mining
results) present row/column indices 1-based; the file-format readers and
writers in :mod:`maxentnull.formats` do the shifting.

Undirected matrices store only the upper triangle including the diagonal
and mirror on read.  An undirected self-loop D(i,i) contributes its value
once to the degree d_i = sum_j D(i,j); note that this differs from the
graph-theory convention in which a loop counts twice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import InitVar, dataclass

import numpy as np

from .errors import InfeasibleError

# Relative tolerance on sum(row targets) == sum(col targets).
MARGIN_TOTAL_RTOL = 1e-9


class ValueDomain(enum.Enum):
    """Set of admissible matrix values."""

    BINARY = "binary"
    NONNEG_INT = "nonneg_int"
    NONNEG_REAL = "nonneg_real"

    def contains(self, value) -> bool:
        if not math.isfinite(value) or value < 0:
            return False
        if self is ValueDomain.BINARY:
            return value in (0, 1)
        if self is ValueDomain.NONNEG_INT:
            return value == int(value)
        return True

    @property
    def is_discrete(self) -> bool:
        return self is not ValueDomain.NONNEG_REAL


class StructureKind(enum.Enum):
    DATABASE = "database"
    DIRECTED = "directed"
    UNDIRECTED = "undirected"


@dataclass(frozen=True)
class Structure:
    """Matrix structure: rectangular database or square adjacency matrix.

    ``self_loops`` is meaningful for networks only; databases must leave it
    False.  Undirected matrices are symmetric; self_loops=False pins the
    diagonal to zero.
    """

    kind: StructureKind
    self_loops: bool = False

    def __post_init__(self):
        if self.kind is StructureKind.DATABASE and self.self_loops:
            raise ValueError("self_loops only applies to network structures")

    @property
    def is_network(self) -> bool:
        return self.kind is not StructureKind.DATABASE

    @property
    def is_undirected(self) -> bool:
        return self.kind is StructureKind.UNDIRECTED

    def excludes_diagonal(self) -> bool:
        return self.is_network and not self.self_loops


def database() -> Structure:
    return Structure(StructureKind.DATABASE)


def directed(self_loops: bool = False) -> Structure:
    return Structure(StructureKind.DIRECTED, self_loops)


def undirected(self_loops: bool = False) -> Structure:
    return Structure(StructureKind.UNDIRECTED, self_loops)


def _normalize_value(value, domain: ValueDomain):
    if not domain.contains(value):
        raise ValueError(f"value {value!r} is outside domain {domain.value}")
    return int(value) if domain.is_discrete else float(value)


@dataclass
class DataMatrix:
    """Sparse matrix over a declared value domain and structure.

    ``entries`` maps (row, col) to a nonzero value; absent cells are zero.
    For undirected structures only keys with row <= col are stored.
    Instances are treated as immutable after construction; operations that
    transform a matrix return a new one.
    """

    structure: Structure
    domain: ValueDomain
    m: int
    n: int
    entries: dict[tuple[int, int], float | int]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        if self.structure.is_network and self.m != self.n:
            raise ValueError("network adjacency matrices must be square")
        if self.m < 0 or self.n < 0:
            raise ValueError("negative dimensions")
        if not validate:
            return
        clean: dict[tuple[int, int], float | int] = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.m and 0 <= j < self.n):
                raise ValueError(f"cell ({i},{j}) outside {self.m}x{self.n}")
            if self.structure.is_undirected and i > j:
                raise ValueError(
                    f"undirected matrices store the upper triangle only, got ({i},{j})"
                )
            if i == j and self.structure.excludes_diagonal():
                raise ValueError(f"diagonal cell ({i},{i}) with self_loops=False")
            if v == 0:
                continue
            clean[(i, j)] = _normalize_value(v, self.domain)
        self.entries = clean

    def get(self, i: int, j: int):
        """Value at (i, j); mirrors across the diagonal for undirected."""
        if self.structure.is_undirected and i > j:
            i, j = j, i
        return self.entries.get((i, j), 0)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def row_sums(self) -> np.ndarray:
        r = np.zeros(self.m)
        for (i, j), v in self.entries.items():
            r[i] += v
            if self.structure.is_undirected and i != j:
                r[j] += v
        return r

    def col_sums(self) -> np.ndarray:
        if self.structure.is_undirected:
            return self.row_sums()
        c = np.zeros(self.n)
        for (_, j), v in self.entries.items():
            c[j] += v
        return c

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.m, self.n))
        for (i, j), v in self.entries.items():
            dense[i, j] = v
            if self.structure.is_undirected and i != j:
                dense[j, i] = v
        return dense

    def replace_entries(self, entries: dict, validate: bool = True) -> "DataMatrix":
        return DataMatrix(self.structure, self.domain, self.m, self.n, entries, validate)


def from_dense(
    array,
    domain: ValueDomain,
    structure: Structure | None = None,
) -> DataMatrix:
    """Build a DataMatrix from a dense array, dropping zeros."""
    a = np.asarray(array)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    structure = structure or database()
    m, n = a.shape
    entries = {}
    for i in range(m):
        j0 = i if structure.is_undirected else 0
        for j in range(j0, n):
            v = a[i, j]
            if v != 0:
                entries[(i, j)] = v
    if structure.is_undirected and not np.array_equal(a, a.T):
        raise ValueError("undirected adjacency matrix must be symmetric")
    return DataMatrix(structure, domain, m, n, entries)


@dataclass(frozen=True)
class MarginTargets:
    """Expected row and column sums.

    For undirected networks the row and column targets coincide (one degree
    vector); use :func:`for_degrees`.  Construction checks that the two
    totals agree to relative tolerance 1e-9 -- a matrix cannot have
    inconsistent margin totals -- and that every target is non-negative.
    """

    row_targets: np.ndarray
    col_targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_targets", np.asarray(self.row_targets, dtype=float))
        object.__setattr__(self, "col_targets", np.asarray(self.col_targets, dtype=float))
        for name, t in (("row", self.row_targets), ("col", self.col_targets)):
            if t.ndim != 1:
                raise ValueError(f"{name} targets must be a vector")
            if t.size and (not np.all(np.isfinite(t)) or t.min() < 0):
                raise ValueError(f"{name} targets must be finite and non-negative")
        rs, cs = float(self.row_targets.sum()), float(self.col_targets.sum())
        if abs(rs - cs) > MARGIN_TOTAL_RTOL * max(rs, cs, 1.0):
            raise InfeasibleError(
                f"row total {rs!r} and column total {cs!r} disagree beyond "
                f"relative tolerance {MARGIN_TOTAL_RTOL:g}"
            )

    @property
    def total(self) -> float:
        return float(self.row_targets.sum())

    @property
    def degrees(self) -> np.ndarray:
        """The single degree vector, for undirected-network targets."""
        return self.row_targets


def for_degrees(degrees) -> MarginTargets:
    d = np.asarray(degrees, dtype=float)
    return MarginTargets(d, d)


def compute_margins(data: DataMatrix) -> MarginTargets:
    """Row and column sums of the matrix (degrees, for undirected networks)."""
    return MarginTargets(data.row_sums(), data.col_sums())


@dataclass(frozen=True)
class TargetGroup:
    """Rows (or columns) sharing one target value, hence one multiplier."""

    value: float
    members: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class GroupedTargets:
    """Targets compressed by distinct value, ascending; for undirected
    networks only ``row_groups`` is populated."""

    row_groups: tuple[TargetGroup, ...]
    col_groups: tuple[TargetGroup, ...] = ()


def group_values(values) -> tuple[TargetGroup, ...]:
    """Exact-equality grouping, ascending by value."""
    v = np.asarray(values, dtype=float)
    groups = []
    for value in np.unique(v):
        members = tuple(int(i) for i in np.flatnonzero(v == value))
        groups.append(TargetGroup(float(value), members))
    return tuple(groups)


def group_targets(targets: MarginTargets) -> GroupedTargets:
    return GroupedTargets(
        group_values(targets.row_targets), group_values(targets.col_targets)
    )


def expand_groups(groups: tuple[TargetGroup, ...], size: int) -> np.ndarray:
    """Inverse of grouping: per-index target vector. Groups must partition
    range(size)."""
    out = np.full(size, np.nan)
    for g in groups:
        for i in g.members:
            if not 0 <= i < size or not np.isnan(out[i]):
                raise ValueError("groups do not partition the index range")
            out[i] = g.value
    if np.isnan(out).any():
        raise ValueError("groups do not cover the index range")
    return out


def _bin_side(groups: tuple[TargetGroup, ...], max_bins: int) -> tuple[TargetGroup, ...]:
    if len(groups) <= max_bins:
        return groups
    total = sum(g.multiplicity for g in groups)
    binned = []
    pos = 0
    remaining = total
    for b in range(max_bins, 0, -1):
        take = [groups[pos]]
        pos += 1
        acc = take[0].multiplicity
        # leave at least one group per remaining bin
        while pos < len(groups) - (b - 1) and acc < remaining / b:
            take.append(groups[pos])
            acc += groups[pos].multiplicity
            pos += 1
        members = tuple(sorted(i for g in take for i in g.members))
        value = sum(g.value * g.multiplicity for g in take) / acc
        binned.append(TargetGroup(value, members))
        remaining -= acc
        if pos == len(groups):
            break
    return tuple(binned)


def bin_targets(grouped: GroupedTargets, max_bins: int) -> GroupedTargets:
    """Merge groups into at most max_bins contiguous bins per side.

    Bins cover contiguous ranges of the ascending target values with
    roughly equal total multiplicity, and each bin's value is the
    multiplicity-weighted mean of its members, so the weighted total
    sum(multiplicity * value) is preserved exactly.
    """
    if max_bins < 1:
        raise ValueError("max_bins must be >= 1")
    return GroupedTargets(
        _bin_side(grouped.row_groups, max_bins),
        _bin_side(grouped.col_groups, max_bins) if grouped.col_groups else (),
    )


def bin_margin_vector(values: np.ndarray, max_bins: int) -> np.ndarray:
    """Replace each target by its bin average (per-index view of binning)."""
    groups = _bin_side(group_values(values), max_bins)
    return expand_groups(groups, len(values))
