"""Seeded random generators shared by the chain/solver property tests."""

import random
from itertools import combinations

from flatchains.cells import Cell
from flatchains.chains import Chain
from flatchains.groups import BoundedIntGroup


def random_nonzero(group, rng):
    if isinstance(group, BoundedIntGroup):
        v = 0
        while v == 0:
            v = rng.randint(-min(group.bound, 5), min(group.bound, 5))
        return v
    choices = group.nonzero_elements()
    return rng.choice(choices)


def random_element(group, rng):
    if isinstance(group, BoundedIntGroup):
        return rng.randint(-min(group.bound, 5), min(group.bound, 5))
    return rng.choice(group.elements())


def random_cell(rng, dim, ambient, span=4):
    axes = tuple(sorted(rng.sample(range(1, ambient + 1), dim)))
    base = tuple(rng.randint(-span, span) for _ in range(ambient))
    return Cell(base, axes)


def random_chain(group, rng, dim=None, ambient=None, max_cells=6, span=4):
    if ambient is None:
        ambient = rng.randint(1, 3)
    if dim is None:
        dim = rng.randint(0, ambient)
    n = rng.randint(0, max_cells)
    items = [(random_cell(rng, dim, ambient, span), random_nonzero(group, rng)) for _ in range(n)]
    return Chain.from_cells(group, items, dim=dim, ambient=ambient)


def random_chain_in(group, rng, window, dim, max_cells=4):
    """Random sparse chain supported inside a window."""
    pool = window.sorted_cells(dim)
    n = rng.randint(0, min(max_cells, len(pool)))
    cells = rng.sample(pool, n)
    items = [(cell, random_nonzero(group, rng)) for cell in cells]
    return Chain.from_cells(group, items, dim=dim, ambient=window.ambient)
