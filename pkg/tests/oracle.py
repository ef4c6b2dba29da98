"""Independent reference evaluators used by the tests.

Nothing here calls into the engine's normalizer or window code; membership is
recomputed from scratch with plain Python sets and loops.
"""

from __future__ import annotations

import random
from math import lcm

from lsc.setcalc import (
    Compl,
    Dilate,
    Empty,
    Finite,
    Full,
    Inter,
    Quotient,
    Residue,
    ShiftDown,
    ShiftUp,
    Union,
)


def brute_members(e, H: int) -> set[int]:
    """Members of ``e`` in ``1..H``, evaluated bottom-up on explicit sets."""
    universe = range(1, H + 1)
    if isinstance(e, Empty):
        return set()
    if isinstance(e, Full):
        return set(universe)
    if isinstance(e, Finite):
        return {x for x in e.elements if x <= H}
    if isinstance(e, Residue):
        return {n for n in universe if n % e.m == e.r % e.m}
    if isinstance(e, Union):
        out = set()
        for p in e.parts:
            out |= brute_members(p, H)
        return out
    if isinstance(e, Inter):
        out = set(universe)
        for p in e.parts:
            out &= brute_members(p, H)
        return out
    if isinstance(e, Compl):
        return set(universe) - brute_members(e.inner, H)
    if isinstance(e, ShiftDown):
        inner = brute_members(e.inner, H + e.n)
        return {n for n in universe if n + e.n in inner}
    if isinstance(e, ShiftUp):
        inner = brute_members(e.inner, H)
        return {n + e.n for n in inner if n + e.n <= H}
    if isinstance(e, Dilate):
        inner = brute_members(e.inner, H // e.k)
        return {e.k * n for n in inner}
    if isinstance(e, Quotient):
        inner = brute_members(e.inner, H * e.k)
        return {n for n in universe if e.k * n in inner}
    raise TypeError(e)


def coarse_bounds(e) -> tuple[int, int]:
    """Generous (preperiod, period) bounds derived from the syntax alone."""
    if isinstance(e, (Empty, Full)):
        return 0, 1
    if isinstance(e, Finite):
        return max(e.elements, default=0), 1
    if isinstance(e, Residue):
        return 0, e.m
    if isinstance(e, (Union, Inter)):
        pre, per = 0, 1
        for p in e.parts:
            a, b = coarse_bounds(p)
            pre, per = max(pre, a), lcm(per, b)
        return pre, per
    a, b = coarse_bounds(e.inner)
    if isinstance(e, Compl):
        return a, b
    if isinstance(e, ShiftDown):
        return a, b
    if isinstance(e, ShiftUp):
        return a + e.n, b
    if isinstance(e, Dilate):
        return e.k * a, e.k * b
    return a, b  # quotient: period divides b, preperiod shrinks


def random_periodic_expr(rng: random.Random, depth: int = 4, max_modulus: int = 12):
    """Random expression over residues, finite sets, shifts, dilations and quotients."""
    if depth <= 1 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.7:
            m = rng.randint(1, max_modulus)
            return Residue(rng.randrange(m), m)
        if roll < 0.85:
            return Finite(rng.sample(range(1, 30), rng.randint(0, 4)))
        return rng.choice([Empty(), Full()])
    kind = rng.choice(["union", "inter", "compl", "down", "up", "dilate", "quot"])
    sub = lambda: random_periodic_expr(rng, depth - 1, max_modulus)  # noqa: E731
    if kind == "union":
        return Union((sub(), sub()))
    if kind == "inter":
        return Inter((sub(), sub()))
    if kind == "compl":
        return Compl(sub())
    if kind == "down":
        return ShiftDown(rng.randint(1, 5), sub())
    if kind == "up":
        return ShiftUp(rng.randint(1, 5), sub())
    if kind == "dilate":
        return Dilate(rng.randint(2, 3), sub())
    return Quotient(rng.randint(2, 3), sub())


def brute_profile(e):
    """Brute-force answers for an eventually periodic expression.

    Returns ``(infinite, cofinite, gap)`` where ``gap`` is the largest of the
    first member and the consecutive differences (``None`` when finite).  The
    scan covers ``1 .. pre + 10 * period`` for the syntactic bounds.
    """
    pre, per = coarse_bounds(e)
    H = pre + 10 * per
    members = sorted(brute_members(e, H))
    tail = [n for n in members if pre < n <= pre + per]
    infinite = bool(tail)
    cofinite = len(tail) == per
    if not infinite:
        return False, False, None
    gap = members[0]
    for a, b in zip(members, members[1:]):
        gap = max(gap, b - a)
    return True, cofinite, gap


def brute_gap(members) -> int:
    members = sorted(members)
    g = members[0]
    for a, b in zip(members, members[1:]):
        g = max(g, b - a)
    return g
