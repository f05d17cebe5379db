"""Oriented axis-aligned lattice cubes and box windows.

A cell is the closed unit cube spanned from ``base`` along the axes in
``axes`` (1-based, strictly increasing).  The canonical orientation is the
increasing-axes order; a reversed orientation is expressed by negating the
chain coefficient, so no orientation bit is stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Optional

from .errors import InvalidInput


@dataclass(frozen=True, order=True)
class Cell:
    base: tuple
    axes: tuple

    def __post_init__(self):
        if not all(isinstance(b, int) for b in self.base):
            raise InvalidInput(f"cell base must be integers: {self.base!r}")
        d = len(self.base)
        if any(not 1 <= a <= d for a in self.axes):
            raise InvalidInput(f"axes {self.axes!r} outside 1..{d}")
        if any(x >= y for x, y in zip(self.axes, self.axes[1:])):
            raise InvalidInput(f"axes must be strictly increasing: {self.axes!r}")

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def ambient(self) -> int:
        return len(self.base)

    def translated(self, offset) -> "Cell":
        return Cell(tuple(b + o for b, o in zip(self.base, offset)), self.axes)

    def shifted(self, axis: int, steps: int) -> "Cell":
        base = list(self.base)
        base[axis - 1] += steps
        return Cell(tuple(base), self.axes)

    def faces(self):
        """Signed codimension-1 faces.

        Returns [(sign, face_cell), ...] so that the boundary of ``g * self``
        is ``sum sign∘g * face``: the a-th axis (position i in sorted order)
        contributes (-1)^i * (upper - lower).
        """
        out = []
        for i, a in enumerate(self.axes):
            sign = 1 if i % 2 == 0 else -1
            rest = self.axes[:i] + self.axes[i + 1 :]
            out.append((sign, Cell(self.base, rest).shifted(a, 1)))
            out.append((-sign, Cell(self.base, rest)))
        return out

    def barycenter(self):
        half = Fraction(1, 2)
        return tuple(
            b + (half if (i + 1) in self.axes else 0) for i, b in enumerate(self.base)
        )

    def interval(self, axis: int):
        lo = self.base[axis - 1]
        return (lo, lo + 1) if axis in self.axes else (lo, lo)

    def footprint(self, axis: int):
        """Identity of the cell's column under projection along ``axis``."""
        base = list(self.base)
        base[axis - 1] = 0
        return (tuple(base), self.axes)

    def key(self):
        return (self.base, self.axes)


def cell_from_record(record: dict) -> Cell:
    try:
        base = tuple(int(v) for v in record["base"])
        axes = tuple(int(a) for a in record.get("axes", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad cell record {record!r}") from exc
    return Cell(base, axes)


def cell_key_str(cell: Cell) -> str:
    """Stable text key used in level-function JSON maps."""
    base = ",".join(str(b) for b in cell.base)
    axes = ",".join(str(a) for a in cell.axes)
    return f"[{base}|{axes}]"


def cell_from_key_str(text: str) -> Cell:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")) or "|" not in s:
        raise InvalidInput(f"bad cell key {text!r}")
    base_part, axes_part = s[1:-1].split("|", 1)
    base = tuple(int(v) for v in base_part.split(",") if v.strip() != "")
    axes = tuple(int(v) for v in axes_part.split(",") if v.strip() != "")
    return Cell(base, axes)


def chebyshev_cell_distance(c1: Cell, c2: Cell) -> int:
    """Integer Chebyshev gap between two cells viewed as closed boxes."""
    if c1.ambient != c2.ambient:
        raise InvalidInput("cells live in different ambient dimensions")
    gap = 0
    for axis in range(1, c1.ambient + 1):
        lo1, hi1 = c1.interval(axis)
        lo2, hi2 = c2.interval(axis)
        gap = max(gap, lo2 - hi1, lo1 - hi2)
    return gap


@dataclass(frozen=True)
class Window:
    """A finite lattice box [lo, hi]; closed under taking faces.

    A cell belongs to the window iff its closed extent lies inside the box.
    ``u_cells``, when present, designates an open subregion used by the
    localized seminorm.
    """

    lo: tuple
    hi: tuple
    u_cells: Optional[frozenset] = None

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise InvalidInput("window lo/hi dimension mismatch")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise InvalidInput(f"empty window {self.lo}..{self.hi}")

    @property
    def ambient(self) -> int:
        return len(self.lo)

    def contains_cell(self, cell: Cell) -> bool:
        if cell.ambient != self.ambient:
            return False
        for axis in range(1, self.ambient + 1):
            lo, hi = cell.interval(axis)
            if lo < self.lo[axis - 1] or hi > self.hi[axis - 1]:
                return False
        return True

    def cells(self, dim: int) -> Iterator[Cell]:
        """All cells of one dimension inside the box, in lexicographic order."""
        d = self.ambient
        for axes in combinations(range(1, d + 1), dim):
            ranges = []
            for axis in range(1, d + 1):
                top = self.hi[axis - 1] - (1 if axis in axes else 0)
                ranges.append(range(self.lo[axis - 1], top + 1))
            for base in product(*ranges):
                yield Cell(tuple(base), axes)
        return

    def sorted_cells(self, dim: int):
        return sorted(self.cells(dim))

    def extent(self, axis: int) -> int:
        return self.hi[axis - 1] - self.lo[axis - 1]

    def grown(self, margin: int) -> "Window":
        return Window(
            tuple(l - margin for l in self.lo),
            tuple(h + margin for h in self.hi),
        )

    @staticmethod
    def bounding(cells: Iterable[Cell], margin: int = 0) -> "Window":
        cells = list(cells)
        if not cells:
            raise InvalidInput("cannot bound an empty cell set")
        d = cells[0].ambient
        lo, hi = [], []
        for axis in range(1, d + 1):
            los = [c.interval(axis)[0] for c in cells]
            his = [c.interval(axis)[1] for c in cells]
            lo.append(min(los) - margin)
            hi.append(max(his) + margin)
        return Window(tuple(lo), tuple(hi))


def box_region(lo, hi):
    """Predicate keeping cells whose closed extent lies in [lo, hi]."""
    window = Window(tuple(lo), tuple(hi))
    return window.contains_cell


def ball_region(center, radius):
    """Predicate keeping cells whose barycenter is inside the open
    Euclidean ball B(center, radius); decided in exact arithmetic."""
    center = tuple(Fraction(c) for c in center)
    r2 = Fraction(radius) ** 2

    def inside(cell: Cell) -> bool:
        b = cell.barycenter()
        if len(b) != len(center):
            return False
        return sum((x - c) ** 2 for x, c in zip(b, center)) < r2

    return inside


def cellset_region(cells: Iterable[Cell]):
    chosen = frozenset(cells)
    return lambda cell: cell in chosen
