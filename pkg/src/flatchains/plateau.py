"""Exact mass minimization with prescribed boundary on box windows.

The competitor space {M : dM = B, M supported in the window} is searched
as {M0 - dQ}: a feasible base chain M0 is built constructively by sweeping
the boundary data toward the window's corner (iterated prism homotopy),
and Q ranges over the window's (m+1)-cells.  On a box window this
parameterizes every competitor, because a boundaryless m-chain in a box
fills by the same sweep.  Minimization reuses the exact shared engine, so
optima come with the same determinism and certificate guarantees as the
flat norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .cells import Cell, Window
from .chains import (
    Chain,
    boundary,
    chain_to_records,
    columns,
    mass,
    multiplicity_cells,
    prism,
    project,
    restrict,
)
from .errors import Infeasible, InvalidInput, SearchSpaceExceeded
from .flatnorm import SolverLimits, _fraction_str
from .groups import BoundedIntGroup, NormedGroup, StiReport, sti_gap
from .solver import EngineSpec, canonical_values, collect_optima, minimize

_MAX_INT_VALUES = 512


@dataclass
class PlateauProblem:
    """Prescribed-boundary mass minimization data.

    ``boundary_chain`` has dimension m-1 and must itself be boundaryless;
    competitors are m-chains supported on the window's m-cells.  For the
    integer model, competitor coefficients are capped by
    ``coefficient_bound`` (default max(2 * max |B|, 4)).
    """

    boundary_chain: Chain
    window: Window
    dim: Optional[int] = None
    coefficient_bound: Optional[int] = None

    def __post_init__(self):
        b = self.boundary_chain
        if self.dim is None:
            self.dim = b.dim + 1
        if self.dim != b.dim + 1 and not b.is_zero():
            raise InvalidInput("problem dim must be boundary dim + 1")
        if self.window.ambient != b.ambient:
            raise InvalidInput("window and boundary ambient dimensions differ")
        if b.dim >= 1 and not boundary(b).is_zero():
            raise InvalidInput("boundary data must be a cycle")
        for cell in b.support():
            if not self.window.contains_cell(cell) or not self._has_coface(cell):
                raise InvalidInput(
                    f"boundary cell {cell.base}|{cell.axes} is not a face of"
                    " any window cell"
                )
        if isinstance(b.group, BoundedIntGroup) and self.coefficient_bound is None:
            max_b = max((abs(c) for _, c in b.items()), default=0)
            self.coefficient_bound = min(max(2 * max_b, 4), b.group.bound)

    @property
    def group(self) -> NormedGroup:
        return self.boundary_chain.group

    def _has_coface(self, cell: Cell) -> bool:
        for axis in range(1, cell.ambient + 1):
            if axis in cell.axes:
                continue
            up = tuple(sorted(cell.axes + (axis,)))
            if self.window.contains_cell(Cell(cell.base, up)):
                return True
            if self.window.contains_cell(Cell(cell.base, up).shifted(axis, -1)):
                return True
        return False


@dataclass
class GraphnessReport:
    """Column analysis of a chain over one projection axis.

    The chain is a graph of multiplicity g when every nonempty column of
    transverse cells consists of exactly one cell carrying +-g.  Cells
    extended along the axis (walls over the boundary data) are tallied
    separately and do not decide graphness.
    """

    axis: int
    multiplicity: object
    is_graph: bool
    column_count: int
    multi_cell_columns: int
    off_multiplicity_columns: int
    wall_cells: int

    def to_json(self, group: NormedGroup) -> dict:
        return {
            "axis": self.axis,
            "multiplicity": group.format_element(self.multiplicity),
            "is_graph": self.is_graph,
            "columns": self.column_count,
            "multi_cell_columns": self.multi_cell_columns,
            "off_multiplicity_columns": self.off_multiplicity_columns,
            "wall_cells": self.wall_cells,
        }


@dataclass
class PlateauResult:
    optimal_mass: Fraction
    minimizer: Chain
    certificate: str
    complete: bool
    bound_certified: bool          # integer model: larger coefficients ruled out
    graphness: Optional[GraphnessReport] = None
    minimizer_count: Optional[int] = None

    def to_json(self) -> dict:
        out = {
            "optimal_mass": _fraction_str(self.optimal_mass),
            "minimizer": chain_to_records(self.minimizer),
            "certificate": self.certificate,
            "graphness": (
                self.graphness.to_json(self.minimizer.group)
                if self.graphness
                else None
            ),
        }
        if self.minimizer_count is not None:
            out["minimizer_count"] = self.minimizer_count
        return out


def cone_fill(boundary_chain: Chain, window: Window) -> Chain:
    """A chain in the window whose boundary is the given cycle.

    Sweeps the cycle axis by axis toward the window's low corner; the
    telescoping homotopy identity makes the total sweep a filling.  For
    0-dimensional data the group elements must sum to zero, otherwise no
    filling exists in any window and Infeasible is raised.
    """
    current = boundary_chain
    group = boundary_chain.group
    filled = Chain.zero(group, boundary_chain.dim + 1, boundary_chain.ambient)
    for axis in range(1, boundary_chain.ambient + 1):
        floor = window.lo[axis - 1]
        filled = filled + prism(current, axis, floor)
        current = project(current, axis, level=floor)
    if not current.is_zero():
        raise Infeasible(
            "boundary data has nonzero total multiplicity; no chain in the"
            " window bounds it"
        )
    return filled


def _filling_values(problem: PlateauProblem, base: Chain):
    """Coefficient search set for the filling difference Q.

    Integer model: a feasible competitor differs from the base by dQ, and
    integrating that difference across the window bounds each Q
    coefficient by extent * (competitor bound + max base coefficient).
    """
    group = problem.group
    if not isinstance(group, BoundedIntGroup):
        return canonical_values(group)
    max_base = max((abs(c) for _, c in base.items()), default=0)
    per_cell = problem.coefficient_bound + max_base
    d = problem.window.ambient
    if problem.dim + 1 == d:
        extent = min(problem.window.extent(a) for a in range(1, d + 1))
    else:
        extent = math.prod(problem.window.extent(a) for a in range(1, d + 1))
    bound = max(per_cell * max(extent, 1), 1)
    if 2 * bound + 1 > _MAX_INT_VALUES:
        raise SearchSpaceExceeded(
            f"filling coefficient range +-{bound} exceeds the configured limit"
        )
    return canonical_values(group, bound)


def graphness_report(chain: Chain, axis: int, multiplicity) -> GraphnessReport:
    group = chain.group
    neg = group.neg(multiplicity)
    cols, walls = columns(chain, axis)
    multi = sum(1 for cells in cols.values() if len(cells) > 1)
    off = sum(
        1
        for cells in cols.values()
        if len(cells) == 1 and cells[0][1] not in (multiplicity, neg)
    )
    return GraphnessReport(
        axis=axis,
        multiplicity=multiplicity,
        is_graph=bool(cols) and multi == 0 and off == 0,
        column_count=len(cols),
        multi_cell_columns=multi,
        off_multiplicity_columns=off,
        wall_cells=sum(1 for _ in walls),
    )


def _bound_certified(problem: PlateauProblem, optimum: Fraction, minimizer: Chain) -> bool:
    """Rule out competitors with coefficients beyond the configured bound.

    Valid for full-dimensional competitors (m + 1 = d), where the
    projection along any axis is the same for every feasible chain: a
    competitor holding a coefficient above the bound pays that coefficient
    on top of (or inside) the projected column masses, which already total
    the projection mass.
    """
    group = problem.group
    if not isinstance(group, BoundedIntGroup):
        return True
    if problem.dim >= problem.window.ambient:
        return True  # no filling cells: the competitor is unique
    if problem.dim + 1 != problem.window.ambient:
        return False
    big = group.scale * (problem.coefficient_bound + 1)
    for axis in range(1, problem.window.ambient + 1):
        proj = project(minimizer, axis)
        total = mass(proj)
        if optimum > total + big:
            continue
        if any(optimum > (total - group.norm(c)) + big for _, c in proj.items()):
            continue
        return True
    return False


def solve(
    problem: PlateauProblem,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
    graph_axis: Optional[int] = None,
    graph_multiplicity=None,
) -> PlateauResult:
    """Exact mass minimizer for the prescribed boundary.

    Returns the optimal chain whose filling-difference assignment is
    lexicographically least among the optima; deterministic for any
    thread count.
    """
    limits = limits or SolverLimits()
    group = problem.group
    m = problem.dim
    base = cone_fill(problem.boundary_chain, problem.window)
    if m + 1 <= problem.window.ambient:
        variables = problem.window.sorted_cells(m + 1)
    else:
        variables = []
    if len(variables) > limits.max_cells:
        raise SearchSpaceExceeded(
            f"{len(variables)} filling cells exceed the configured max of"
            f" {limits.max_cells}"
        )
    spec = EngineSpec(
        group=group,
        base=base,
        variables=variables,
        values=_filling_values(problem, base),
        include_filling_mass=False,
        remainder_bound=problem.coefficient_bound,
    )
    outcome = minimize(
        spec,
        mode=mode,
        threads=limits.threads,
        time_budget_ms=limits.time_budget_ms,
        exhaustive_cap=limits.exhaustive_cap,
    )
    if outcome.value is None:
        if outcome.complete:
            raise Infeasible(
                "no chain within the coefficient bound has the prescribed boundary"
            )
        raise SearchSpaceExceeded("time budget exhausted before any feasible chain")
    minimizer = outcome.remainder
    assert boundary(minimizer) == problem.boundary_chain
    if m < problem.window.ambient:
        for axis in range(1, problem.window.ambient + 1):
            assert mass(minimizer) >= mass(project(minimizer, axis))
    graphness = None
    if graph_axis is not None and graph_multiplicity is not None:
        graphness = graphness_report(minimizer, graph_axis, graph_multiplicity)
    return PlateauResult(
        optimal_mass=outcome.value,
        minimizer=minimizer,
        certificate=outcome.certificate,
        complete=outcome.complete,
        bound_certified=_bound_certified(problem, outcome.value, minimizer),
        graphness=graphness,
    )


def enumerate_minimizers(
    problem: PlateauProblem,
    limit: int = 100,
    limits: Optional[SolverLimits] = None,
) -> Tuple[List[Chain], bool]:
    """All mass minimizers in deterministic lexicographic order.

    Returns (chains, truncated): at most ``limit`` distinct minimizing
    chains sorted by their serialization key, and whether the list was cut.
    """
    limits = limits or SolverLimits()
    best = solve(problem, limits=limits)
    base = cone_fill(problem.boundary_chain, problem.window)
    m = problem.dim
    if m + 1 <= problem.window.ambient:
        variables = problem.window.sorted_cells(m + 1)
    else:
        variables = []
    spec = EngineSpec(
        group=problem.group,
        base=base,
        variables=variables,
        values=_filling_values(problem, base),
        include_filling_mass=False,
        remainder_bound=problem.coefficient_bound,
    )
    seen = {}
    for result in collect_optima(spec, best.optimal_mass):
        seen[result.remainder.key()] = result.remainder
    ordered = [seen[key] for key in sorted(seen)]
    truncated = len(ordered) > limit
    return ordered[:limit], truncated


@dataclass
class LambdaReport:
    """Outcome of checking (1 - lambda*r) |M|_K <= |M|_K + dQ over a window."""

    lam: Fraction
    radius: Optional[int]
    restricted_mass: Fraction
    best_competitor_mass: Fraction
    threshold: Fraction
    ok: bool
    worst_ratio: Optional[Fraction]
    violating_filling: Optional[Chain]


def lambda_certificate(
    chain: Chain,
    lam,
    radius: Optional[int],
    region: Callable[[Cell], bool],
    window: Window,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
) -> LambdaReport:
    """Verify the almost-minimality inequality over a finite filling space.

    The check minimizes |M|_K + dQ| over every filling Q supported on the
    window's (m+1)-cells within barycenter Chebyshev distance ``radius``
    of the support of M (no restriction when radius is None), and compares
    the minimum against (1 - lambda*radius) * |M|_K|.
    """
    limits = limits or SolverLimits()
    lam = Fraction(lam)
    if lam != 0 and radius is None:
        raise InvalidInput("a positive lambda needs an explicit radius")
    restricted = restrict(chain, region)
    m = chain.dim
    if m + 1 <= chain.ambient:
        variables = window.sorted_cells(m + 1)
    else:
        variables = []
    if radius is not None and variables:
        support = [cell.barycenter() for cell in chain.support()]

        def near(cell: Cell) -> bool:
            b = cell.barycenter()
            return any(
                max(abs(x - y) for x, y in zip(b, s)) < radius for s in support
            )

        variables = [cell for cell in variables if near(cell)]
    if len(variables) > limits.max_cells:
        raise SearchSpaceExceeded(
            f"{len(variables)} filling cells exceed the configured max of"
            f" {limits.max_cells}"
        )
    group = chain.group
    int_bound = None
    if isinstance(group, BoundedIntGroup):
        max_coef = max((abs(c) for _, c in chain.items()), default=0)
        int_bound = max(2 * max_coef, 4)
    spec = EngineSpec(
        group=group,
        base=restricted,
        variables=variables,
        values=canonical_values(group, int_bound),
        include_filling_mass=False,
    )
    outcome = minimize(
        spec,
        mode=mode,
        threads=limits.threads,
        time_budget_ms=limits.time_budget_ms,
        exhaustive_cap=limits.exhaustive_cap,
    )
    restricted_mass = mass(restricted)
    factor = 1 - lam * (radius if radius is not None else 0)
    threshold = factor * restricted_mass
    ok = outcome.value >= threshold
    ratio = None
    if restricted_mass > 0:
        ratio = outcome.value / restricted_mass
    violating = None
    if not ok and outcome.filling is not None:
        violating = -outcome.filling  # |M + d(-Q)| attains the minimum
    return LambdaReport(
        lam=lam,
        radius=radius,
        restricted_mass=restricted_mass,
        best_competitor_mass=outcome.value,
        threshold=threshold,
        ok=ok,
        worst_ratio=ratio,
        violating_filling=violating,
    )


@dataclass
class ColumnTrace:
    footprint: tuple
    coefficients: list
    column_mass: Fraction
    sums_to_multiplicity: bool
    contains_multiplicity: bool
    tight: bool


@dataclass
class ProjectionBoundReport:
    multiplicity: object
    axis: int
    sti: StiReport
    plane_cells: int
    chain_mass: Fraction
    plane_mass: Fraction               # |g| * area of the projected region
    lower_bound: Optional[Fraction]    # (|g| + gap) * area, when gap finite
    applicable: bool                   # no cell carries +-g
    holds: Optional[bool]
    columns: List[ColumnTrace]


def projection_bound(chain: Chain, axis: int, multiplicity) -> ProjectionBoundReport:
    """The projection mass bound for chains without multiplicity-g cells.

    Requires the pushforward along ``axis`` to equal g times its support
    region; per column the coefficients are nonzero and sum to g, so when
    none equals +-g the pair (first, rest) witnesses column mass at least
    |g| + gap.
    """
    from .errors import ProjectionMismatch

    group = chain.group
    proj = project(chain, axis)
    for _, coef in proj.items():
        if coef != multiplicity:
            raise ProjectionMismatch(
                "projection is not a constant multiple of its support"
            )
    sti = sti_gap(group, multiplicity)
    area = proj.cell_count()
    applicable = not multiplicity_cells(chain, multiplicity)
    g_norm = group.norm(multiplicity)
    gap = sti.gap
    lower = None
    if gap != math.inf:
        lower = (g_norm + gap) * area
    elif area == 0:
        lower = Fraction(0)
    total = mass(chain)
    holds = total >= lower if lower is not None else None
    neg_g = group.neg(multiplicity)
    traces = []
    cols, _ = columns(chain, axis)
    for footprint in sorted(cols):
        cells = cols[footprint]
        coefs = [c for _, c in cells]
        col_sum = group.zero()
        col_mass = Fraction(0)
        for c in coefs:
            col_sum = group.add(col_sum, c)
            col_mass += group.norm(c)
        bound = g_norm + gap if gap != math.inf else None
        traces.append(
            ColumnTrace(
                footprint=footprint,
                coefficients=coefs,
                column_mass=col_mass,
                sums_to_multiplicity=col_sum == multiplicity,
                contains_multiplicity=any(c in (multiplicity, neg_g) for c in coefs),
                tight=bound is not None and col_mass == bound,
            )
        )
    return ProjectionBoundReport(
        multiplicity=multiplicity,
        axis=axis,
        sti=sti,
        plane_cells=area,
        chain_mass=total,
        plane_mass=g_norm * area,
        lower_bound=lower,
        applicable=applicable,
        holds=holds,
        columns=traces,
    )
