"""Exact minimization engine shared by the flat-norm and Plateau solvers.

The engine minimizes, over assignments of coefficients to a fixed list of
(m+1)-cells (the filling Q),

    sum_faces |base_f - (dQ)_f|  [masked by the face region]
    + sum_cells |q_c|            [masked by the cell region, optional]

by depth-first branch and bound with an admissible lower bound, or by
plain exhaustive enumeration on small spaces.  All masses are scaled to a
common integer denominator, so every comparison is integer-exact.

Determinism contract: the optimum value and the tie-broken witness (the
lexicographically smallest optimal assignment vector, variables in cell
order, coefficients in canonical order with 0 first) are identical for
any thread count.  A subtree is pruned only when it provably contains no
assignment strictly smaller in (value, key) order than the incumbent, so
the shared-incumbent parallel search reduces to the sequential answer.
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from .cells import Cell
from .chains import Chain
from .errors import SearchSpaceExceeded
from .groups import BoundedIntGroup, NormedGroup

_COLLECT_CAP = 20000


@dataclass
class EngineSpec:
    group: NormedGroup
    base: Chain                      # dim m; the chain being filled against
    variables: Sequence[Cell]        # candidate (m+1)-cells for the filling
    values: Sequence                 # coefficient search set, canonical order
    include_filling_mass: bool = True
    face_mask: Optional[Callable[[Cell], bool]] = None
    cell_mask: Optional[Callable[[Cell], bool]] = None
    remainder_bound: Optional[int] = None  # abs cap on remainder coefficients


@dataclass
class EngineResult:
    value: Optional[Fraction]
    assignment: Optional[tuple]      # value indices per variable
    filling: Optional[Chain]         # None when no (m+1)-cells exist
    remainder: Chain
    complete: bool
    certificate: str                 # "exhaustive" | "bnb" | "incomplete"
    nodes: int
    feasible: bool = True


class _Incumbent:
    """Thread-safe (value, key) minimum over offered leaf assignments."""

    def __init__(self):
        self._lock = threading.Lock()
        self.value = None
        self.key = None

    def offer(self, value, key):
        with self._lock:
            if (
                self.value is None
                or value < self.value
                or (value == self.value and key < self.key)
            ):
                self.value = value
                self.key = key

    def snapshot(self):
        return self.value, self.key


def canonical_values(group: NormedGroup, int_bound: Optional[int] = None):
    """Coefficient search set in canonical order (zero first).

    Finite groups contribute every element; the integer model contributes
    [-int_bound, int_bound] (default: the group's own bound).
    """
    if isinstance(group, BoundedIntGroup):
        bound = group.bound if int_bound is None else int(int_bound)
        values = list(range(-bound, bound + 1))
        return sorted(values, key=lambda v: (v != 0, abs(v), v))
    return sorted(group.elements(), key=group.element_key)


class _Search:
    """One search worker over a fully preprocessed problem."""

    def __init__(self, spec: EngineSpec, incumbent: _Incumbent, deadline=None,
                 cutoff: Optional[int] = None):
        self.spec = spec
        self.incumbent = incumbent
        self.deadline = deadline
        self.cutoff = cutoff  # scaled; prune whole subtrees proven >= cutoff
        group = spec.group
        if isinstance(group, BoundedIntGroup):
            # raw arithmetic: partial sums may transiently exceed the model
            # bound, which is not an overflow of any chain coefficient
            self.add = lambda x, y: x + y
            self.neg = lambda x: -x
            self.norm_frac = lambda x: group.scale * abs(x)
        else:
            self.add = group.add
            self.neg = group.neg
            self.norm_frac = group.norm
        self.zero = group.zero()
        self.values = list(spec.values)
        if not self.values or self.values[0] != self.zero:
            raise SearchSpaceExceeded("value set must start with the zero element")
        self.variables = list(spec.variables)
        n = len(self.variables)

        face_index = {}
        self.faces: List[Cell] = []
        self.face_incidents: List[list] = []
        self.var_deltas: List[list] = [[] for _ in range(n)]
        for i, cell in enumerate(self.variables):
            for sign, face in cell.faces():
                f = face_index.get(face)
                if f is None:
                    f = len(self.faces)
                    face_index[face] = f
                    self.faces.append(face)
                    self.face_incidents.append([])
                self.face_incidents[f].append((i, sign))
                self.var_deltas[i].append((f, sign))
        self.var_signs = [dict(deltas) for deltas in self.var_deltas]

        # scale every norm to one integer denominator
        if isinstance(group, BoundedIntGroup):
            self.denom = group.scale.denominator
        else:
            self.denom = math.lcm(
                *(group.norm(e).denominator for e in group.elements())
            )
        self._norm_cache = {}

        self.face_base = []
        mask_f = spec.face_mask
        self.const_value = 0
        self.const_overflow = False
        for cell, coef in spec.base.items():
            if cell not in face_index:
                if self._too_big(coef):
                    self.const_overflow = True
                if mask_f is None or mask_f(cell):
                    self.const_value += self.norm_int(coef)
        self.face_base = [spec.base.coefficient(face) for face in self.faces]
        self.face_in_u = [
            True if mask_f is None else bool(mask_f(face)) for face in self.faces
        ]
        mask_c = spec.cell_mask
        self.var_mass: List[list] = []
        for cell in self.variables:
            counted = spec.include_filling_mass and (mask_c is None or mask_c(cell))
            self.var_mass.append(
                [self.norm_int(v) if counted else 0 for v in self.values]
            )

        self.assignment = [-1] * n
        self.partial = [self.zero] * len(self.faces)
        self.remaining = [len(inc) for inc in self.face_incidents]
        self.solo: List[list] = [[] for _ in range(n)]
        for f, count in enumerate(self.remaining):
            if count == 1:
                self.solo[self.face_incidents[f][0][0]].append(f)
        self.committed = self.const_value
        self.lb_contrib: List[Optional[int]] = [0] * n
        self.lb_total = 0
        self.inf_count = 0
        for j in range(n):
            self._set_contrib(j, self._recompute(j))
        self.nodes = 0
        self.timed_out = False

    # -- helpers -----------------------------------------------------------

    def norm_int(self, x) -> int:
        cached = self._norm_cache.get(x)
        if cached is None:
            value = self.norm_frac(x) * self.denom
            cached = int(value)
            assert cached == value
            self._norm_cache[x] = cached
        return cached

    def _too_big(self, coef) -> bool:
        bound = self.spec.remainder_bound
        return bound is not None and abs(coef) > bound

    def _recompute(self, j: int) -> Optional[int]:
        """Cheapest settlement of the faces only variable j still touches.
        None when every value violates the remainder bound."""
        solo = self.solo[j]
        vm = self.var_mass[j]
        if not solo:
            return 0
        signs = self.var_signs[j]
        add, neg, norm_int = self.add, self.neg, self.norm_int
        too_big = self.spec.remainder_bound is not None
        bound = self.spec.remainder_bound
        best = None
        for v_idx, value in enumerate(self.values):
            cost = vm[v_idx]
            if best is not None and cost >= best:
                if cost > 0:
                    break  # masses are nondecreasing in canonical order
                continue
            ok = True
            for f in solo:
                contrib = value if signs[f] > 0 else neg(value)
                rem = add(self.face_base[f], neg(add(self.partial[f], contrib)))
                if too_big and abs(rem) > bound:
                    ok = False
                    break
                if self.face_in_u[f]:
                    cost += norm_int(rem)
                    if best is not None and cost >= best:
                        ok = False
                        break
            if ok and (best is None or cost < best):
                best = cost
                if best == 0:
                    break
        return best

    def _set_contrib(self, j: int, value: Optional[int]):
        old = self.lb_contrib[j]
        if old is None:
            self.inf_count -= 1
        else:
            self.lb_total -= old
        if value is None:
            self.inf_count += 1
        else:
            self.lb_total += value
        self.lb_contrib[j] = value
        return old

    # -- incremental assignment ----------------------------------------

    def assign(self, i: int, v_idx: int):
        value = self.values[v_idx]
        saved_committed = self.committed
        saved_own = self._set_contrib(i, 0)
        pushes = []
        dead = False
        add, neg = self.add, self.neg
        for f, sign in self.var_deltas[i]:
            self.partial[f] = add(self.partial[f], value if sign > 0 else neg(value))
            self.remaining[f] -= 1
            left = self.remaining[f]
            if left == 0:
                rem = add(self.face_base[f], neg(self.partial[f]))
                if self._too_big(rem):
                    dead = True
                if self.face_in_u[f]:
                    self.committed += self.norm_int(rem)
            elif left == 1:
                for j, _ in self.face_incidents[f]:
                    if self.assignment[j] < 0 and j != i:
                        self.solo[j].append(f)
                        pushes.append(j)
                        break
        self.committed += self.var_mass[i][v_idx]
        self.assignment[i] = v_idx
        saved_contribs = []
        for j in dict.fromkeys(pushes):
            saved_contribs.append((j, self._set_contrib(j, self._recompute(j))))
        return (i, v_idx, saved_committed, pushes, saved_contribs, saved_own, dead)

    def unassign(self, record):
        i, v_idx, saved_committed, pushes, saved_contribs, saved_own, _ = record
        value = self.values[v_idx]
        add, neg = self.add, self.neg
        self.assignment[i] = -1
        for j, old in reversed(saved_contribs):
            self._set_contrib(j, old)
        for j in reversed(pushes):
            self.solo[j].pop()
        for f, sign in self.var_deltas[i]:
            self.partial[f] = add(self.partial[f], neg(value) if sign > 0 else value)
            self.remaining[f] += 1
        self.committed = saved_committed
        self._set_contrib(i, saved_own)

    def lower_bound(self):
        if self.inf_count:
            return math.inf
        return self.committed + self.lb_total

    # -- search drivers --------------------------------------------------

    def _tick(self) -> bool:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0:
            if time.monotonic() > self.deadline:
                self.timed_out = True
        return self.timed_out

    def _promising(self, bound, depth, v_idx) -> bool:
        inc_value, inc_key = self.incumbent.snapshot()
        if inc_value is None:
            return True
        if bound > inc_value:
            return False
        if bound == inc_value:
            for t in range(depth + 1):
                mine = self.assignment[t] if t < depth else v_idx
                theirs = inc_key[t]
                if mine != theirs:
                    return mine < theirs
        return True

    def dfs(self, depth: int):
        if self._tick():
            return
        n = len(self.variables)
        if depth == n:
            if self.cutoff is None or self.committed < self.cutoff:
                self.incumbent.offer(self.committed, tuple(self.assignment))
            return
        children = []
        for v_idx in range(len(self.values)):
            record = self.assign(depth, v_idx)
            if not record[6]:
                bound = self.lower_bound()
                if bound != math.inf and (self.cutoff is None or bound < self.cutoff):
                    children.append((bound, v_idx))
            self.unassign(record)
        if len(children) > 1:
            children.sort()
        for bound, v_idx in children:
            if self.timed_out:
                return
            if not self._promising(bound, depth, v_idx):
                continue
            record = self.assign(depth, v_idx)
            self.dfs(depth + 1)
            self.unassign(record)

    def enumerate_all(self, depth: int):
        if self._tick():
            return
        n = len(self.variables)
        if depth == n:
            if self.cutoff is None or self.committed < self.cutoff:
                self.incumbent.offer(self.committed, tuple(self.assignment))
            return
        for v_idx in range(len(self.values)):
            record = self.assign(depth, v_idx)
            if not record[6]:
                self.enumerate_all(depth + 1)
            self.unassign(record)

    def collect(self, depth: int, target: int, out: list):
        if len(out) > _COLLECT_CAP:
            raise SearchSpaceExceeded("too many optimal assignments to enumerate")
        n = len(self.variables)
        if depth == n:
            if self.committed == target:
                out.append(tuple(self.assignment))
            return
        for v_idx in range(len(self.values)):
            record = self.assign(depth, v_idx)
            if not record[6] and self.lower_bound() <= target:
                self.collect(depth + 1, target, out)
            self.unassign(record)

    # -- reconstruction ---------------------------------------------------

    def realize(self, assignment: tuple):
        """Build (value, filling Q, remainder base - dQ) for an assignment."""
        spec = self.spec
        group = spec.group
        q_items = {}
        partial = {}
        for i, v_idx in enumerate(assignment):
            value = self.values[v_idx]
            if value != self.zero:
                q_items[self.variables[i]] = value
            for f, sign in self.var_deltas[i]:
                partial[f] = self.add(
                    partial.get(f, self.zero), value if sign > 0 else self.neg(value)
                )
        rem_items = {}
        for f, face in enumerate(self.faces):
            rem = self.add(self.face_base[f], self.neg(partial.get(f, self.zero)))
            if rem != self.zero:
                rem_items[face] = rem
        covered = set(self.faces)
        for cell, coef in self.spec.base.items():
            if cell not in covered:
                rem_items[cell] = coef
        m = spec.base.dim
        if m + 1 <= spec.base.ambient:
            filling = Chain(group, m + 1, spec.base.ambient, q_items)
        else:
            filling = None  # no filling dimension exists; q_items is empty
        remainder = Chain(group, m, spec.base.ambient, rem_items)
        value = Fraction(self.scaled_value_of(assignment), self.denom)
        return value, filling, remainder

    def scaled_value_of(self, assignment: tuple) -> int:
        """Recompute the scaled objective from scratch (search-independent)."""
        total = self.const_value
        partial = {}
        for i, v_idx in enumerate(assignment):
            value = self.values[v_idx]
            for f, sign in self.var_deltas[i]:
                partial[f] = self.add(
                    partial.get(f, self.zero), value if sign > 0 else self.neg(value)
                )
            total += self.var_mass[i][v_idx]
        for f in range(len(self.faces)):
            if self.face_in_u[f]:
                rem = self.add(
                    self.face_base[f], self.neg(partial.get(f, self.zero))
                )
                total += self.norm_int(rem)
        return total


def _empty_result(search: _Search) -> EngineResult:
    value, filling, remainder = search.realize(())
    return EngineResult(
        value=value,
        assignment=(),
        filling=filling,
        remainder=remainder,
        complete=True,
        certificate="exhaustive",
        nodes=1,
    )


def minimize(
    spec: EngineSpec,
    mode: str = "auto",
    threads: int = 1,
    time_budget_ms: Optional[int] = None,
    exhaustive_cap: int = 10_000,
    cutoff=None,
) -> EngineResult:
    """Minimize the filling objective; exact with a stated certificate.

    ``mode`` is ``auto`` (exhaustive when the assignment space is at most
    ``exhaustive_cap``, branch and bound otherwise), or explicitly
    ``exhaustive`` / ``bnb``.  With a ``cutoff``, assignments of value at
    least the cutoff are discarded: a ``None`` value in the result then
    means every assignment is at least the cutoff.
    """
    deadline = None
    if time_budget_ms is not None:
        deadline = time.monotonic() + time_budget_ms / 1000.0
    incumbent = _Incumbent()
    scaled_cutoff = None
    probe = _Search(spec, incumbent, deadline)
    if cutoff is not None:
        scaled = Fraction(cutoff) * probe.denom
        scaled_cutoff = math.ceil(scaled)
        probe.cutoff = scaled_cutoff
    n = len(probe.variables)
    if probe.const_overflow:
        return EngineResult(
            value=None,
            assignment=None,
            filling=None,
            remainder=spec.base,
            complete=True,
            certificate="exhaustive",
            nodes=0,
            feasible=False,
        )
    if n == 0:
        return _empty_result(probe)
    k = len(probe.values)
    space = k**n if n * math.log(k) < 64 else math.inf
    if mode == "auto":
        mode = "exhaustive" if space <= exhaustive_cap else "bnb"
    if mode not in ("exhaustive", "bnb"):
        raise SearchSpaceExceeded(f"unknown solver mode {mode!r}")

    searches = [probe]
    if mode == "exhaustive":
        probe.enumerate_all(0)
    elif threads <= 1:
        probe.dfs(0)
    else:
        first_children = []
        for v_idx in range(k):
            record = probe.assign(0, v_idx)
            dead = record[6]
            probe.unassign(record)
            if not dead:
                first_children.append(v_idx)

        def run_branch(v_idx):
            worker = _Search(spec, incumbent, deadline, cutoff=scaled_cutoff)
            record = worker.assign(0, v_idx)
            if not record[6]:
                worker.dfs(1)
            worker.unassign(record)
            return worker

        with ThreadPoolExecutor(max_workers=threads) as pool:
            searches = list(pool.map(run_branch, first_children))

    nodes = sum(s.nodes for s in searches)
    timed_out = any(s.timed_out for s in searches)
    value, key = incumbent.snapshot()
    if value is None:
        return EngineResult(
            value=None,
            assignment=None,
            filling=None,
            remainder=spec.base,
            complete=not timed_out,
            certificate="incomplete" if timed_out else mode,
            nodes=nodes,
            feasible=False,
        )
    checked_value, filling, remainder = probe.realize(key)
    assert checked_value == Fraction(value, probe.denom), "objective mismatch"
    certificate = "incomplete" if timed_out else mode
    return EngineResult(
        value=checked_value,
        assignment=key,
        filling=filling,
        remainder=remainder,
        complete=not timed_out,
        certificate=certificate,
        nodes=nodes,
    )


def collect_optima(spec: EngineSpec, target: Fraction) -> list:
    """All assignments attaining ``target``, realized as engine results."""
    incumbent = _Incumbent()
    search = _Search(spec, incumbent, None)
    if search.const_overflow:
        return []
    scaled = Fraction(target) * search.denom
    if scaled.denominator != 1:
        return []
    scaled = int(scaled)
    found: list = []
    if not search.variables:
        value, filling, remainder = search.realize(())
        if value != target:
            return []
        return [
            EngineResult(
                value=value,
                assignment=(),
                filling=filling,
                remainder=remainder,
                complete=True,
                certificate="exhaustive",
                nodes=1,
            )
        ]
    search.collect(0, scaled, found)
    results = []
    for assignment in found:
        value, filling, remainder = search.realize(assignment)
        results.append(
            EngineResult(
                value=value,
                assignment=assignment,
                filling=filling,
                remainder=remainder,
                complete=True,
                certificate="exhaustive",
                nodes=search.nodes,
            )
        )
    return results
