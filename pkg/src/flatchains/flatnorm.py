"""Exact flat norms on box windows.

``flat_norm`` computes F(M; K) = min over fillings Q supported on the
(m+1)-cells of K of |M - dQ| + |Q|; ``flat_seminorm`` localizes both terms
to an open subregion U.  Minima are exact, with a certificate naming the
search strategy, and ties between optimal fillings are broken by the
lexicographically smallest assignment vector (cells in lexicographic
order, coefficients in canonical order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Optional, Union

from .cells import Cell, Window, ball_region, cellset_region
from .chains import Chain, boundary, chain_to_records, mass, restrict
from .errors import InvalidInput, SearchSpaceExceeded, WindowTooSmall
from .groups import BoundedIntGroup, NormedGroup
from .solver import EngineSpec, canonical_values, minimize

Region = Union[Callable[[Cell], bool], Window, Iterable[Cell]]


@dataclass
class SolverLimits:
    """Configured ceilings for the exact searches."""

    max_cells: int = 64
    coefficient_bound: Optional[int] = None
    threads: int = 1
    time_budget_ms: Optional[int] = None
    exhaustive_cap: int = 10_000


@dataclass
class FlatNormResult:
    value: Fraction
    filling: Optional[Chain]
    remainder: Chain
    certificate: str   # "exhaustive" | "bnb" | "incomplete"
    window: Window
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "value": _fraction_str(self.value),
            "Q": chain_to_records(self.filling) if self.filling else [],
            "remainder": chain_to_records(self.remainder),
            "certificate": self.certificate,
        }


def _fraction_str(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_region(region: Region) -> Callable[[Cell], bool]:
    if region is None:
        return lambda cell: True
    if isinstance(region, Window):
        return region.contains_cell
    if callable(region):
        return region
    return cellset_region(region)


def _q_bound(group: NormedGroup, base: Chain, limits: SolverLimits, localized: bool):
    """Coefficient bound for the integer-model filling search.

    Defaults to max(2 * max |base coefficient|, 4) clamped by the model
    bound; for the global norm it is additionally clamped by
    floor(mass(base)/scale), since any filling cell heavier than the whole
    chain is strictly worse than Q = 0.
    """
    if not isinstance(group, BoundedIntGroup):
        return None
    if limits.coefficient_bound is not None:
        return min(int(limits.coefficient_bound), group.bound)
    max_coef = max((abs(c) for _, c in base.items()), default=0)
    bound = min(max(2 * max_coef, 4), group.bound)
    if not localized:
        certified = int(mass(base) / group.scale)
        bound = min(bound, certified)
    return bound


def _run(
    base: Chain,
    window: Window,
    limits: SolverLimits,
    mode: str,
    face_mask=None,
    cell_mask=None,
    cutoff=None,
) -> FlatNormResult:
    group = base.group
    m = base.dim
    if m + 1 <= base.ambient:
        variables = window.sorted_cells(m + 1)
    else:
        variables = []
    if face_mask is not None:
        keep = []
        for cell in variables:
            if (cell_mask is None or cell_mask(cell)) or any(
                face_mask(face) for _, face in cell.faces()
            ):
                keep.append(cell)
        # cells affecting no masked term are pinned to 0, their lex minimum
        variables = keep
    if len(variables) > limits.max_cells:
        raise SearchSpaceExceeded(
            f"{len(variables)} filling cells exceed the configured max of"
            f" {limits.max_cells}"
        )
    values = canonical_values(group, _q_bound(group, base, limits, face_mask is not None))
    spec = EngineSpec(
        group=group,
        base=base,
        variables=variables,
        values=values,
        include_filling_mass=True,
        face_mask=face_mask,
        cell_mask=cell_mask,
    )
    outcome = minimize(
        spec,
        mode=mode,
        threads=limits.threads,
        time_budget_ms=limits.time_budget_ms,
        exhaustive_cap=limits.exhaustive_cap,
        cutoff=cutoff,
    )
    return FlatNormResult(
        value=outcome.value,
        filling=outcome.filling,
        remainder=outcome.remainder,
        certificate=outcome.certificate,
        window=window,
        complete=outcome.complete,
    )


def flat_norm(
    chain: Chain,
    window: Optional[Window] = None,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
) -> FlatNormResult:
    """F(M; K), exactly.

    With ``window=None`` this computes the unrelative F(M) on a box one
    step larger than the support's bounding box, and the result records
    that window.
    """
    limits = limits or SolverLimits()
    if window is None:
        if chain.is_zero():
            window = Window((0,) * chain.ambient, (1,) * chain.ambient)
        else:
            window = Window.bounding(chain.support(), margin=1)
    missing = [cell for cell in chain.support() if not window.contains_cell(cell)]
    if missing:
        raise WindowTooSmall(f"support cell {min(missing)} outside the window")
    return _run(chain, window, limits, mode)


def flat_seminorm(
    chain: Chain,
    u_region: Region,
    window: Window,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
) -> Fraction:
    """F_U(M; K): both the remainder and the filling are weighed inside U only."""
    result = flat_seminorm_result(chain, u_region, window, mode, limits)
    return result.value


def flat_seminorm_result(
    chain: Chain,
    u_region: Region,
    window: Window,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
) -> FlatNormResult:
    limits = limits or SolverLimits()
    u = as_region(u_region)
    return _run(chain, window, limits, mode, face_mask=u, cell_mask=u)


def seminorm_value(chain: Chain, filling: Chain, u_region: Region) -> Fraction:
    """Objective of one explicit competitor: |(M - dQ)|_U + |Q|_U.

    Independent of the solver; used as an upper-bound oracle in tests.
    """
    u = as_region(u_region)
    remainder = chain - boundary(filling) if filling and not filling.is_zero() else chain
    return mass(restrict(remainder, u)) + (
        mass(restrict(filling, u)) if filling else Fraction(0)
    )


def axis_planes(dimension: int, m: int):
    """The axis subsets spanning the coordinate m-planes of Z^dimension."""
    return list(combinations(range(1, dimension + 1), m))


def plane_chain(
    group: NormedGroup,
    coefficient,
    point,
    axes,
    radius,
    ambient: int,
) -> Chain:
    """g times the coordinate plane through ``point`` spanned by ``axes``,
    restricted to the open ball B(point, radius) by barycenter."""
    inside = ball_region(point, radius)
    items = []
    spans = []
    for axis in range(1, ambient + 1):
        if axis in axes:
            spans.append(range(point[axis - 1] - radius, point[axis - 1] + radius))
        else:
            spans.append((point[axis - 1],))
    from itertools import product as _product

    for base in _product(*spans):
        cell = Cell(tuple(base), tuple(axes))
        if inside(cell):
            items.append((cell, coefficient))
    return Chain.from_cells(group, items, dim=len(axes), ambient=ambient)


def plane_distance(
    chain: Chain,
    point,
    radius: int,
    coefficient,
    mode: str = "auto",
    limits: Optional[SolverLimits] = None,
) -> Fraction:
    """Distance of M to the nearest multiplicity-g coordinate plane at p.

    min over axis-aligned oriented m-planes P through p of
    F_{B(p,r)}(M - g[P cap B(p,r)]; box(p,r)) / r^m, all exact.
    """
    if radius < 1:
        raise InvalidInput("radius must be at least 1")
    group = chain.group
    d = chain.ambient
    m = chain.dim
    point = tuple(int(c) for c in point)
    if len(point) != d:
        raise InvalidInput("point does not match the ambient dimension")
    window = Window(
        tuple(p - radius for p in point), tuple(p + radius for p in point)
    )
    ball = ball_region(point, radius)
    limits = limits or SolverLimits()
    best = None
    orientations = [coefficient]
    neg = group.neg(coefficient)
    if neg != coefficient:
        orientations.append(neg)
    for axes in axis_planes(d, m):
        for oriented in orientations:
            plane = plane_chain(group, oriented, point, axes, radius, d)
            diff = restrict(chain, window.contains_cell) - plane
            # the best plane so far caps the search under every later plane
            result = _run(
                diff, window, limits, mode,
                face_mask=ball, cell_mask=ball, cutoff=best,
            )
            if result.value is not None and (best is None or result.value < best):
                best = result.value
    return best / Fraction(radius) ** m
