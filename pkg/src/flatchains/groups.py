"""Normed abelian coefficient groups with exact rational norms.

Two models are provided:

* :class:`FiniteProductGroup` -- Z_{n_1} x ... x Z_{n_k} with an explicit
  norm table, validated exhaustively.
* :class:`BoundedIntGroup` -- the integers with |n| = scale * abs(n),
  clamped to [-N, N] for chain computations so that every search the
  solvers run stays finite.  Overflow is a reported error, never a wrap.

Group elements are plain values: a tuple of residues for finite products,
an ``int`` for the integer model.  All norms are :class:`fractions.Fraction`;
the gap computed by :func:`sti_gap` in particular must be decided exactly
because everything downstream branches on ``gap == 0`` versus ``gap > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Union

from .errors import (
    CoefficientOverflow,
    EmptyGroup,
    InvalidInput,
    NormAxiomViolation,
    TrivialGroup,
    ZeroElement,
)

Element = Union[tuple, int]

DEFAULT_INT_BOUND = 16


def parse_fraction(text) -> Fraction:
    """Parse a decimal-free rational string like ``"3"`` or ``"5/2"``."""
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    s = str(text).strip()
    if "." in s or "e" in s or "E" in s:
        raise InvalidInput(f"rational strings must be decimal-free: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad rational string {text!r}") from exc


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class NormedGroup:
    """Common interface of the two coefficient-group models."""

    def zero(self) -> Element:
        raise NotImplementedError

    def add(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def neg(self, x: Element) -> Element:
        raise NotImplementedError

    def norm(self, x: Element) -> Fraction:
        raise NotImplementedError

    def sub(self, x: Element, y: Element) -> Element:
        return self.add(x, self.neg(y))

    def is_zero(self, x: Element) -> bool:
        return x == self.zero()

    def signed(self, sign: int, x: Element) -> Element:
        """Apply an orientation sign (+1 or -1) to a coefficient."""
        return x if sign > 0 else self.neg(x)

    def element_key(self, x: Element):
        """Deterministic sort key; 0 sorts first, then by (norm, value)."""
        raise NotImplementedError

    def contains(self, x: Element) -> bool:
        raise NotImplementedError

    def format_element(self, x: Element) -> str:
        raise NotImplementedError

    def parse_element(self, text) -> Element:
        raise NotImplementedError

    def label(self) -> str:
        raise NotImplementedError

    def describe(self) -> dict:
        """JSON-ready description matching the group-spec file format."""
        raise NotImplementedError


class FiniteProductGroup(NormedGroup):
    """Z_{n_1} x ... x Z_{n_k} with an explicit rational norm table."""

    kind = "finite"

    def __init__(self, orders: Iterable[int], norms: dict):
        self.orders = tuple(int(n) for n in orders)
        if not self.orders or any(n < 1 for n in self.orders):
            raise EmptyGroup("orders must be a nonempty list of positive integers")
        self._norms = {tuple(k): Fraction(v) for k, v in norms.items()}
        self._zero = tuple(0 for _ in self.orders)
        self._norms[self._zero] = Fraction(0)

    def zero(self):
        return self._zero

    def order(self) -> int:
        return math.prod(self.orders)

    def elements(self):
        return [tuple(e) for e in product(*(range(n) for n in self.orders))]

    def nonzero_elements(self):
        return [e for e in self.elements() if e != self._zero]

    def contains(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == len(self.orders)
            and all(isinstance(r, int) and 0 <= r < n for r, n in zip(x, self.orders))
        )

    def _check(self, x):
        if not self.contains(x):
            raise InvalidInput(f"{x!r} is not an element of {self.label()}")
        return x

    def add(self, x, y):
        self._check(x)
        self._check(y)
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x):
        self._check(x)
        return tuple((-a) % n for a, n in zip(x, self.orders))

    def norm(self, x):
        self._check(x)
        try:
            return self._norms[x]
        except KeyError:
            raise InvalidInput(f"norm table has no entry for {x!r}") from None

    def element_key(self, x):
        return (0 if x == self._zero else 1, self.norm(x), x)

    def format_element(self, x):
        return "(" + ",".join(str(r) for r in x) + ")"

    def parse_element(self, text):
        if isinstance(text, (list, tuple)):
            residues = tuple(int(r) for r in text)
        else:
            s = str(text).strip()
            if not (s.startswith("(") and s.endswith(")")):
                raise InvalidInput(f"bad residue tuple {text!r}")
            inner = s[1:-1].strip()
            parts = [p for p in inner.split(",") if p.strip() != ""]
            residues = tuple(int(p) for p in parts)
        if len(residues) != len(self.orders):
            raise InvalidInput(
                f"expected {len(self.orders)} residues, got {text!r}"
            )
        return self._check(residues)

    def label(self):
        return "x".join(f"Z_{n}" for n in self.orders)

    def describe(self):
        norms = {
            self.format_element(e): format_fraction(self._norms[e])
            for e in self.nonzero_elements()
        }
        return {"kind": "finite", "orders": list(self.orders), "norms": norms}


class BoundedIntGroup(NormedGroup):
    """Bounded-integer model of Z: |n| = scale * abs(n), n in [-bound, bound].

    The bound only constrains chain coefficients; it exists so that the
    exact solvers search a finite set.  ``add`` raises
    :class:`CoefficientOverflow` instead of wrapping.
    """

    kind = "int"

    def __init__(self, scale: Fraction = Fraction(1), bound: int = DEFAULT_INT_BOUND):
        self.scale = Fraction(scale)
        self.bound = int(bound)
        if self.scale <= 0:
            raise NormAxiomViolation("positivity", 1, "scale must be positive")
        if self.bound < 1:
            raise TrivialGroup("bound must be at least 1")

    def zero(self):
        return 0

    def contains(self, x):
        return isinstance(x, int) and abs(x) <= self.bound

    def _check(self, x):
        if not isinstance(x, int):
            raise InvalidInput(f"{x!r} is not an integer coefficient")
        if abs(x) > self.bound:
            raise CoefficientOverflow(
                f"coefficient {x} outside [-{self.bound}, {self.bound}];"
                " raise the model bound"
            )
        return x

    def add(self, x, y):
        self._check(x)
        self._check(y)
        return self._check(x + y)

    def neg(self, x):
        self._check(x)
        return -x

    def norm(self, x):
        self._check(x)
        return self.scale * abs(x)

    def element_key(self, x):
        return (0 if x == 0 else 1, self.scale * abs(x), x)

    def format_element(self, x):
        return str(x)

    def parse_element(self, text):
        try:
            value = int(str(text).strip())
        except ValueError as exc:
            raise InvalidInput(f"bad integer coefficient {text!r}") from exc
        return self._check(value)

    def label(self):
        if self.scale == 1:
            return f"Z[bound={self.bound}]"
        return f"Z[scale={format_fraction(self.scale)},bound={self.bound}]"

    def describe(self):
        return {
            "kind": "int",
            "scale": format_fraction(self.scale),
            "bound": self.bound,
        }


@dataclass(frozen=True)
class StiReport:
    """Strong-triangle-inequality diagnosis for one group element.

    ``gap`` is inf{|a|+|b| : a,b != 0, a+b = g} - |g|; ``math.inf`` when no
    two-part decomposition of ``g`` into nonzero summands exists.  ``holds``
    is True exactly when the gap is strictly positive.
    """

    element: Element
    gap: object  # Fraction or math.inf
    witness: Optional[tuple]
    holds: bool

    @property
    def is_infinite(self) -> bool:
        return self.gap == math.inf

    def gap_str(self) -> str:
        return "inf" if self.is_infinite else format_fraction(self.gap)


def _decompositions(group: NormedGroup, g: Element):
    """All pairs (a, b) with a + b = g and a, b nonzero.

    For the integer model the search runs over abs(a) <= max(2*abs(g), 4),
    which suffices: |a| + |g - a| >= |a| = scale*abs(a), so any pair outside
    that range already exceeds the best pair inside it (a = -1, b = g + 1
    costs scale*(abs(g) + 2) <= scale*max(2*abs(g), 4)).
    """
    zero = group.zero()
    if isinstance(group, FiniteProductGroup):
        for a in group.nonzero_elements():
            b = group.sub(g, a)
            if b != zero:
                yield a, b
    else:
        limit = max(2 * abs(g), 4)
        for a in range(-limit, limit + 1):
            if a == 0:
                continue
            b = g - a
            if b != 0:
                yield a, b


def _raw_norm(group: NormedGroup, x: Element) -> Fraction:
    # sti_gap over the integer model reasons about Z itself, so norms of
    # decomposition parts are taken without the chain-coefficient clamp.
    if isinstance(group, BoundedIntGroup):
        return group.scale * abs(x)
    return group.norm(x)


def sti_gap(group: NormedGroup, g: Element) -> StiReport:
    """Gap of the strong triangle inequality at ``g``.

    gap = inf {|a| + |b| : a, b != 0, a + b = g} - |g|, with witness the
    pair attaining the infimum (ties broken by smallest (|a|+|b|, a, b)
    in canonical element order); +infinity when g admits no decomposition.
    """
    if group.is_zero(g):
        raise ZeroElement("sti_gap requires a nonzero element")
    g_norm = _raw_norm(group, g)
    best = None
    for a, b in _decompositions(group, g):
        cost = _raw_norm(group, a) + _raw_norm(group, b)
        if isinstance(group, BoundedIntGroup):
            key = (cost, (abs(a), a), (abs(b), b))
        else:
            key = (cost, group.element_key(a), group.element_key(b))
        if best is None or key < best[0]:
            best = (key, (a, b))
    if best is None:
        return StiReport(element=g, gap=math.inf, witness=None, holds=True)
    gap = best[0][0] - g_norm
    return StiReport(element=g, gap=gap, witness=best[1], holds=gap > 0)


def min_nonzero_norm(group: NormedGroup) -> Fraction:
    """Smallest norm over nonzero elements; strictly positive by validation."""
    if isinstance(group, BoundedIntGroup):
        return group.scale
    nonzero = group.nonzero_elements()
    if not nonzero:
        raise TrivialGroup(f"{group.label()} has no nonzero element")
    return min(group.norm(e) for e in nonzero)


def _validate_finite(group: FiniteProductGroup) -> FiniteProductGroup:
    elements = group.elements()
    zero = group.zero()
    for e in elements:
        if e not in group._norms:
            raise NormAxiomViolation(
                "positivity", e, f"missing norm entry for {group.format_element(e)}"
            )
        n = group._norms[e]
        if e == zero:
            if n != 0:
                raise NormAxiomViolation("positivity", e, "|0| must be 0")
        elif n <= 0:
            raise NormAxiomViolation("positivity", e)
    for x in elements:
        for y in elements:
            if group._norms[group.add(x, y)] > group._norms[x] + group._norms[y]:
                raise NormAxiomViolation("triangle", (x, y))
    for e in elements:
        if group._norms[group.neg(e)] != group._norms[e]:
            raise NormAxiomViolation("symmetry", e)
    return group


def validate_group(spec) -> NormedGroup:
    """Build a coefficient group from a spec and verify every norm axiom.

    ``spec`` is either an already-built group or a JSON-style dict:
    ``{"kind": "finite", "orders": [...], "norms": {"(r1,...,rk)": "p/q"}}``
    or ``{"kind": "int", "scale": "p/q", "bound": N}``.  Finite-product
    validation is exhaustive over all element pairs.
    """
    if isinstance(spec, FiniteProductGroup):
        return _validate_finite(spec)
    if isinstance(spec, BoundedIntGroup):
        return spec  # axioms are structural for |n| = c*abs(n), c > 0
    if not isinstance(spec, dict):
        raise InvalidInput(f"cannot interpret group spec {spec!r}")
    kind = spec.get("kind")
    if kind == "finite":
        orders = spec.get("orders")
        if not orders:
            raise EmptyGroup("finite group spec needs nonempty 'orders'")
        shell = FiniteProductGroup(orders, {})
        raw = spec.get("norms", {})
        norms = {}
        for key, value in raw.items():
            norms[shell.parse_element(key)] = parse_fraction(value)
        return _validate_finite(FiniteProductGroup(orders, norms))
    if kind == "int":
        scale = parse_fraction(spec.get("scale", "1"))
        bound = int(spec.get("bound", DEFAULT_INT_BOUND))
        return BoundedIntGroup(scale=scale, bound=bound)
    raise InvalidInput(f"unknown group kind {kind!r}")


def cyclic_group(order: int, norms: Iterable) -> FiniteProductGroup:
    """Convenience: Z_order with norms for elements 1..order-1, validated."""
    values = list(norms)
    if len(values) != order - 1:
        raise InvalidInput(f"need {order - 1} norm values for Z_{order}")
    table = {(i + 1,): parse_fraction(v) for i, v in enumerate(values)}
    return _validate_finite(FiniteProductGroup((order,), table))
