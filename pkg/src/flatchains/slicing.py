"""Slicing by integer sublevel sets of Lipschitz-1 level functions.

A level function assigns an integer to every cell it covers; it is
Lipschitz-1 across incidences when a cell and any of its faces never
differ by two or more.  Slicing restricts a chain to {f <= s}; the defect
D[s] = (dQ)|{f<=s} - d(Q|{f<=s}) collects the boundary created by the cut
and obeys sum_s |D[s]| <= 2 * dim(Q) * |Q|: each cell/face incidence
straddles at most one cut level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional

from .cells import Cell, cell_from_key_str, cell_key_str, chebyshev_cell_distance
from .chains import Chain, boundary, mass, restrict
from .errors import InvalidInput, LevelFunctionNotLipschitz


class LevelFunction:
    """Integer levels on cells, checked Lipschitz-1 across incidences."""

    def __init__(self, levels: Dict[Cell, int], check: bool = True):
        self._levels = {cell: int(v) for cell, v in levels.items()}
        if check:
            self.check_lipschitz()

    def __contains__(self, cell: Cell) -> bool:
        return cell in self._levels

    def value(self, cell: Cell) -> int:
        try:
            return self._levels[cell]
        except KeyError:
            raise InvalidInput(
                f"level function undefined on cell {cell.base}|{cell.axes}"
            ) from None

    def check_lipschitz(self):
        """Across every defined cell/face incidence, levels differ by <= 1."""
        for cell, level in self._levels.items():
            if cell.dim == 0:
                continue
            for _, face in cell.faces():
                other = self._levels.get(face)
                if other is not None and abs(other - level) >= 2:
                    raise LevelFunctionNotLipschitz(
                        f"levels {level} and {other} differ by"
                        f" {abs(other - level)} across an incidence"
                    )

    def require(self, cells: Iterable[Cell], faces_too: bool = False):
        for cell in cells:
            self.value(cell)
            if faces_too and cell.dim > 0:
                for _, face in cell.faces():
                    self.value(face)

    def sublevel(self, s: int):
        return lambda cell: self.value(cell) <= s

    def min_level(self) -> int:
        return min(self._levels.values())

    def max_level(self) -> int:
        return max(self._levels.values())

    def items(self):
        return sorted(self._levels.items())

    @staticmethod
    def chebyshev_to(marked: Iterable[Cell], domain: Iterable[Cell]) -> "LevelFunction":
        """Distance-to-marked-cells level function; Lipschitz-1 because a
        face of a cell lies inside it, so distances differ by at most 1."""
        marked = list(marked)
        if not marked:
            raise InvalidInput("need at least one marked cell")
        levels = {
            cell: min(chebyshev_cell_distance(cell, target) for target in marked)
            for cell in domain
        }
        return LevelFunction(levels)

    def to_json(self) -> dict:
        return {cell_key_str(cell): level for cell, level in self.items()}

    @staticmethod
    def from_json(mapping: dict) -> "LevelFunction":
        return LevelFunction(
            {cell_from_key_str(k): int(v) for k, v in mapping.items()}
        )


def slice_chain(chain: Chain, level: LevelFunction, s: int) -> Chain:
    """M restricted to the sublevel set {f <= s}."""
    level.require(chain.support())
    return restrict(chain, level.sublevel(s))


@dataclass
class SliceProfile:
    """Per-level slices of dQ and the cut defects for one filling Q."""

    level: LevelFunction
    lo: int
    hi: int
    sublevels: Dict[int, Chain]   # (dQ) restricted to {f <= s}
    defects: Dict[int, Chain]     # (dQ)|{f<=s} - d(Q|{f<=s})
    total_defect: Fraction
    defect_bound: Fraction        # 2 * dim(Q) * |Q|
    certified: bool               # total_defect <= defect_bound

    def defect_mass(self, s: int) -> Fraction:
        return mass(self.defects[s]) if s in self.defects else Fraction(0)

    def structural_check(self, filling: Chain) -> bool:
        """Every defect face must sit on the s/s+1 interface: it bounds a
        filling cell whose level is on the other side of the cut."""
        for s, defect in self.defects.items():
            for face in defect.support():
                fl = self.level.value(face)
                witnessed = False
                for cell in filling.support():
                    if face not in [f for _, f in cell.faces()]:
                        continue
                    cl = self.level.value(cell)
                    if {fl, cl} == {s, s + 1}:
                        witnessed = True
                        break
                if not witnessed:
                    return False
        return True


def slicing_defect(filling: Chain, level: LevelFunction, lo: int, hi: int) -> SliceProfile:
    """Defect chains of one filling across the integer levels [lo, hi]."""
    if lo > hi:
        raise InvalidInput("empty level range")
    level.require(filling.support(), faces_too=True)
    if filling.is_zero():
        zero = Chain.zero(filling.group, max(filling.dim - 1, 0), filling.ambient)
        return SliceProfile(
            level=level,
            lo=lo,
            hi=hi,
            sublevels={s: zero for s in range(lo, hi + 1)},
            defects={},
            total_defect=Fraction(0),
            defect_bound=Fraction(0),
            certified=True,
        )
    bq = boundary(filling)
    sublevels = {}
    defects = {}
    total = Fraction(0)
    for s in range(lo, hi + 1):
        keep = level.sublevel(s)
        cut = restrict(bq, keep)
        sublevels[s] = cut
        defect = cut - boundary(restrict(filling, keep))
        if not defect.is_zero():
            defects[s] = defect
            total += mass(defect)
    bound = 2 * filling.dim * mass(filling)
    return SliceProfile(
        level=level,
        lo=lo,
        hi=hi,
        sublevels=sublevels,
        defects=defects,
        total_defect=total,
        defect_bound=bound,
        certified=total <= bound,
    )
