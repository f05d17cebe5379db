"""Sparse group-valued chains on the unit lattice.

A chain is a finite map from cells of one dimension to nonzero group
elements.  All masses are exact rationals: a unit m-cell carries unit
m-dimensional measure, so mass is simply the sum of coefficient norms.
Chains are immutable values; every operation returns a new chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Optional, Tuple

from .cells import Cell
from .errors import DimensionZero, InvalidInput
from .groups import NormedGroup

# unit-ball volumes for the density ratio, by dimension
_OMEGA = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


class Chain:
    __slots__ = ("group", "dim", "ambient", "_coeffs")

    def __init__(self, group: NormedGroup, dim: int, ambient: int, coeffs=None):
        self.group = group
        self.dim = int(dim)
        self.ambient = int(ambient)
        if not 0 <= self.dim <= self.ambient:
            raise InvalidInput(f"chain dim {dim} outside 0..{ambient}")
        if self.ambient > 3:
            raise InvalidInput("ambient dimensions above 3 are not supported")
        clean: Dict[Cell, object] = {}
        for cell, coef in (coeffs or {}).items():
            if cell.dim != self.dim or cell.ambient != self.ambient:
                raise InvalidInput(
                    f"cell {cell} does not match chain shape ({self.dim}, {self.ambient})"
                )
            if not group.is_zero(coef):
                clean[cell] = coef
        self._coeffs = clean

    @staticmethod
    def zero(group, dim, ambient) -> "Chain":
        return Chain(group, dim, ambient, {})

    @staticmethod
    def from_cells(group, items, dim=None, ambient=None) -> "Chain":
        """Build from (cell, coefficient) pairs, accumulating duplicates."""
        items = list(items)
        if not items:
            if dim is None or ambient is None:
                raise InvalidInput("empty chain needs explicit dim and ambient")
            return Chain.zero(group, dim, ambient)
        if dim is None:
            dim = items[0][0].dim
        if ambient is None:
            ambient = items[0][0].ambient
        acc: Dict[Cell, object] = {}
        for cell, coef in items:
            if cell in acc:
                acc[cell] = group.add(acc[cell], coef)
            else:
                acc[cell] = coef
        return Chain(group, dim, ambient, acc)

    def coefficient(self, cell: Cell):
        return self._coeffs.get(cell, self.group.zero())

    def items(self):
        """Coefficients in lexicographic cell order (deterministic)."""
        return sorted(self._coeffs.items())

    def support(self):
        return frozenset(self._coeffs)

    def cell_count(self) -> int:
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Chain)
            and self.group is other.group
            and self.dim == other.dim
            and self.ambient == other.ambient
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.dim, self.ambient, tuple(self.items())))

    def _compatible(self, other: "Chain"):
        if (
            self.group is not other.group
            or self.dim != other.dim
            or self.ambient != other.ambient
        ):
            raise InvalidInput("chains are not compatible")

    def __add__(self, other: "Chain") -> "Chain":
        self._compatible(other)
        acc = dict(self._coeffs)
        for cell, coef in other._coeffs.items():
            acc[cell] = self.group.add(acc.get(cell, self.group.zero()), coef)
        return Chain(self.group, self.dim, self.ambient, acc)

    def __neg__(self) -> "Chain":
        return Chain(
            self.group,
            self.dim,
            self.ambient,
            {cell: self.group.neg(c) for cell, c in self._coeffs.items()},
        )

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def key(self):
        """Serialization-order key used for deterministic tie-breaking."""
        return tuple(
            (cell.base, cell.axes, self.group.element_key(coef))
            for cell, coef in self.items()
        )

    def __repr__(self):
        inside = ", ".join(f"{coef!r}*{cell.base}{cell.axes}" for cell, coef in self.items())
        return f"Chain[dim={self.dim}]({inside})"


def boundary(chain: Chain) -> Chain:
    """Cubical boundary, extended linearly over the coefficient group."""
    if chain.dim == 0:
        raise DimensionZero("0-chains have no boundary")
    group = chain.group
    acc: Dict[Cell, object] = {}
    for cell, coef in chain._coeffs.items():
        for sign, face in cell.faces():
            value = group.signed(sign, coef)
            if face in acc:
                acc[face] = group.add(acc[face], value)
            else:
                acc[face] = value
    return Chain(group, chain.dim - 1, chain.ambient, acc)


def mass(chain: Chain) -> Fraction:
    group = chain.group
    return sum((group.norm(c) for c in chain._coeffs.values()), Fraction(0))


def restrict(chain: Chain, region: Callable[[Cell], bool]) -> Chain:
    """The portion of the chain inside a region (cell predicate)."""
    return Chain(
        chain.group,
        chain.dim,
        chain.ambient,
        {cell: c for cell, c in chain._coeffs.items() if region(cell)},
    )


def project(chain: Chain, axis: int, level: int = 0) -> Chain:
    """Pushforward under orthogonal projection along one axis.

    Cells extended along ``axis`` have degenerate image and vanish; the
    rest collapse onto the plane at ``level`` with coefficients of each
    column added in the group.  Mass never increases (triangle inequality).
    """
    if chain.dim >= chain.ambient:
        raise InvalidInput("projection requires dim < ambient dimension")
    if not 1 <= axis <= chain.ambient:
        raise InvalidInput(f"axis {axis} outside 1..{chain.ambient}")
    group = chain.group
    acc: Dict[Cell, object] = {}
    for cell, coef in chain._coeffs.items():
        if axis in cell.axes:
            continue
        base = list(cell.base)
        base[axis - 1] = level
        image = Cell(tuple(base), cell.axes)
        if image in acc:
            acc[image] = group.add(acc[image], coef)
        else:
            acc[image] = coef
    return Chain(group, chain.dim, chain.ambient, acc)


def prism(chain: Chain, axis: int, floor: int) -> Chain:
    """The sweep of a chain along one axis down to ``floor``.

    For a cell not extended along the axis, the prism is the signed stack
    of one-higher-dimensional cells between the floor and the cell; cells
    extended along the axis contribute nothing.  Together with projection
    this is a chain homotopy:  d(prism(C)) + prism(dC) = C - project(C).
    """
    if not 1 <= axis <= chain.ambient:
        raise InvalidInput(f"axis {axis} outside 1..{chain.ambient}")
    if chain.dim >= chain.ambient:
        raise InvalidInput("prism requires dim < ambient dimension")
    group = chain.group
    acc: Dict[Cell, object] = {}
    for cell, coef in chain._coeffs.items():
        if axis in cell.axes:
            continue
        if cell.base[axis - 1] < floor:
            raise InvalidInput("cell below the sweep floor")
        position = sum(1 for a in cell.axes if a < axis)
        signed = coef if position % 2 == 0 else group.neg(coef)
        new_axes = tuple(sorted(cell.axes + (axis,)))
        for t in range(floor, cell.base[axis - 1]):
            base = list(cell.base)
            base[axis - 1] = t
            swept = Cell(tuple(base), new_axes)
            if swept in acc:
                acc[swept] = group.add(acc[swept], signed)
            else:
                acc[swept] = signed
    return Chain(group, chain.dim + 1, chain.ambient, acc)


def columns(chain: Chain, axis: int):
    """Cells of the chain grouped by projection footprint along ``axis``.

    Cells extended along the axis (degenerate image) are returned
    separately as the second component.
    """
    cols: Dict[tuple, list] = {}
    degenerate = []
    for cell, coef in chain.items():
        if axis in cell.axes:
            degenerate.append((cell, coef))
        else:
            cols.setdefault(cell.footprint(axis), []).append((cell, coef))
    return cols, degenerate


def multiplicity_cells(chain: Chain, g) -> frozenset:
    """Cells carrying exactly coefficient g or -g."""
    group = chain.group
    neg_g = group.neg(g)
    return frozenset(
        cell for cell, coef in chain._coeffs.items() if coef == g or coef == neg_g
    )


def density_ratio(chain: Chain, point, radius) -> float:
    """Mass in the Euclidean ball around ``point`` over omega_m * r^m.

    The ball membership of a cell is decided by its barycenter, exactly;
    the returned ratio is a float because omega_2 and omega_3 involve pi.
    """
    if radius <= 0:
        raise InvalidInput("radius must be positive")
    m = chain.dim
    if m not in _OMEGA:
        raise InvalidInput(f"density ratio needs dim in 1..3, got {m}")
    center = tuple(Fraction(c) for c in point)
    r2 = Fraction(radius) ** 2
    inside = Fraction(0)
    for cell, coef in chain._coeffs.items():
        b = cell.barycenter()
        if sum((x - c) ** 2 for x, c in zip(b, center)) < r2:
            inside += chain.group.norm(coef)
    return float(inside) / (_OMEGA[m] * float(radius) ** m)


@dataclass(frozen=True)
class RegionMeasure:
    """The measure induced by a chain: cell -> norm of its coefficient."""

    weights: tuple

    @staticmethod
    def of(chain: Chain) -> "RegionMeasure":
        return RegionMeasure(
            tuple((cell, chain.group.norm(c)) for cell, c in chain.items())
        )

    def total(self) -> Fraction:
        return sum((w for _, w in self.weights), Fraction(0))

    def __call__(self, region: Callable[[Cell], bool]) -> Fraction:
        return sum((w for cell, w in self.weights if region(cell)), Fraction(0))


# --- serialization -------------------------------------------------------

def chain_to_records(chain: Chain) -> list:
    """JSON-ready cell records, sorted lexicographically for stable bytes."""
    return [
        {
            "base": list(cell.base),
            "axes": list(cell.axes),
            "coef": chain.group.format_element(coef),
        }
        for cell, coef in chain.items()
    ]


def chain_from_records(
    group: NormedGroup, records, dim: Optional[int] = None, ambient: Optional[int] = None
) -> Chain:
    items = []
    for record in records:
        if not isinstance(record, dict):
            raise InvalidInput(f"bad cell record {record!r}")
        base = tuple(int(v) for v in record.get("base", ()))
        axes = tuple(int(a) for a in record.get("axes", ()))
        coef = group.parse_element(record.get("coef"))
        items.append((Cell(base, axes), coef))
    return Chain.from_cells(group, items, dim=dim, ambient=ambient)
