"""Return-time sets of words and cyclic rotations, and recurrence statistics."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm, prod
from typing import Sequence

import numpy as np

from lsc.certify import max_gap, syndetic_gap
from lsc.errors import InputError
from lsc.schedules import Schedule
from lsc.setcalc import (
    Empty,
    Inter,
    Residue,
    Return,
    SetExpr,
    Thick,
    Window,
    eventually_periodic_normalize,
    inter,
    union,
    window,
)
from lsc.wordspec import FIBONACCI, THUE_MORSE, Periodic, Sturmian, Substitution, expand

__all__ = [
    "FIBONACCI",
    "THUE_MORSE",
    "Periodic",
    "Sturmian",
    "Substitution",
    "expand",
    "return_set",
    "uniform_recurrence_profile",
    "CyclicSystem",
    "joint_return",
    "dyn_thick_from_returns",
    "cylinder_cover_check",
]


def return_set(word, pattern: str, N: int, base: int = 0) -> tuple[Return, Window]:
    """The integers at which ``pattern`` occurs in ``word``, with their window on ``1..N``."""
    if len(pattern) > N:
        raise InputError("pattern is longer than the inspected prefix")
    alphabet = set(word.alphabet)
    stray = set(pattern) - alphabet
    if stray:
        raise InputError(f"pattern letters {sorted(stray)} are not in the alphabet")
    expr = Return(word, pattern, base)
    return expr, window(expr, N)


def _positions(prefix: str, n: int) -> dict[str, list[int]]:
    pos: dict[str, list[int]] = {}
    for i in range(len(prefix) - n + 1):
        pos.setdefault(prefix[i : i + n], []).append(i)
    return pos


def _window_need(p: list[int], n: int, N: int) -> int:
    """Least ``W`` such that every length-``W`` window of a length-``N`` prefix
    holds a full occurrence starting at one of ``p``."""
    need = max(p[0] + n, N - p[-1])
    if len(p) > 1:
        need = max(need, max(b - a for a, b in zip(p, p[1:])) + n - 1)
    return need


@dataclass(frozen=True)
class RecurrenceProfile:
    """``own[n-1]`` bounds windows for the cylinder of the word's own length-``n``
    prefix; ``every[n-1]`` does so for all length-``n`` factors at once."""

    n_max: int
    prefix_length: int
    own: tuple[int, ...]
    every: tuple[int, ...]
    flagged: tuple[str, ...]

    def W(self, n: int) -> int:
        return self.own[n - 1]

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.own, self.own[1:])) and all(
            a <= b for a, b in zip(self.every, self.every[1:])
        )


def uniform_recurrence_profile(word, n_max: int, N: int) -> RecurrenceProfile:
    """Window bounds for factors of length ``1..n_max`` on the length-``N`` prefix.

    Factors that occur only once in the prefix are flagged.
    """
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    if N < 20 * n_max:
        raise InputError(f"prefix length must be at least 20 * n_max = {20 * n_max}")
    prefix = word if isinstance(word, str) else expand(word, N)
    prefix = prefix[:N]
    if len(prefix) < N:
        raise InputError("word shorter than the requested prefix")
    own, every, flagged = [], [], []
    for n in range(1, n_max + 1):
        pos = _positions(prefix, n)
        own.append(_window_need(pos[prefix[:n]], n, N))
        every.append(max(_window_need(p, n, N) for p in pos.values()))
        flagged.extend(sorted(u for u, p in pos.items() if len(p) == 1))
    return RecurrenceProfile(n_max, N, tuple(own), tuple(every), tuple(flagged))


@dataclass(frozen=True)
class CyclicSystem:
    """Rotation ``x -> x + 1`` on ``Z_m`` started at ``start`` with target set ``targets``."""

    m: int
    start: int
    targets: frozenset

    def __init__(self, m: int, start: int, targets):
        if m < 1:
            raise InputError("modulus must be >= 1")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "start", start % m)
        object.__setattr__(self, "targets", frozenset(t % m for t in targets))
        if not self.targets:
            raise InputError("target set must be nonempty")

    def return_expr(self) -> SetExpr:
        return union(*(Residue((u - self.start) % self.m, self.m) for u in sorted(self.targets)))


@dataclass(frozen=True)
class JointReturn:
    expr: SetExpr
    window: Window
    gap: int | None
    empty: bool
    coprime_law: bool | None


def joint_return(systems: Sequence[CyclicSystem], N: int) -> JointReturn:
    """``{n : start_i + n in U_i (mod m_i) for all i}`` on ``1..N`` with its gap.

    For pairwise coprime moduli with singleton targets the set must be a single
    residue class modulo the product, with gap equal to that product; this is
    checked on the exact tier and reported as ``coprime_law``.
    """
    if not systems:
        raise InputError("need at least one system")
    expr = inter(*(s.return_expr() for s in systems))
    win = window(expr, N)
    v = syndetic_gap(expr, N)
    empty = not v.certified
    gap = v.certificate.gap if v.certified else None
    law = None
    mods = [s.m for s in systems]
    if all(len(s.targets) == 1 for s in systems) and all(
        gcd(a, b) == 1 for a, b in itertools.combinations(mods, 2)
    ):
        M = prod(mods)
        members = win.members()
        r = int(members[0]) % M if len(members) else 0
        law = (
            not empty
            and gap == lcm(*mods)
            and eventually_periodic_normalize(expr) == eventually_periodic_normalize(Residue(r, M))
        )
    return JointReturn(expr, win, gap, empty, law)


@dataclass(frozen=True)
class Construction:
    expr: SetExpr
    assumptions: tuple[str, ...]


def dyn_thick_from_returns(returns: Sequence[SetExpr], schedules: Sequence[Schedule | None]) -> Construction:
    """``⋃_i (R_i ∩ Thick(H_i))``; a ``None`` schedule leaves ``R_i`` unrestricted.

    The underlying systems are assumed pairwise disjoint and minimal; that
    hypothesis is recorded, not checked.
    """
    if len(returns) != len(schedules):
        raise InputError("need one schedule per return set")
    if not returns:
        return Construction(Empty(), ())
    parts = [R if H is None else Inter((R, Thick(H))) for R, H in zip(returns, schedules)]
    note = ("user-asserted: the systems behind the return sets are minimal and pairwise disjoint",)
    return Construction(union(*parts), note)


@dataclass(frozen=True)
class CoverReport:
    covered: bool
    violating: str | None
    factors_checked: int


def cylinder_cover_check(word, patterns: Sequence[str], n: int, N: int) -> CoverReport:
    """Does every length-``n`` factor of the length-``N`` prefix start with a pattern?

    Factors are inspected in order of first occurrence; the first uncovered
    one is returned.
    """
    if not patterns:
        raise InputError("need at least one pattern")
    if n < max(len(p) for p in patterns):
        raise InputError("n must be at least the longest pattern length")
    prefix = expand(word, N)
    seen = set()
    for i in range(N - n + 1):
        u = prefix[i : i + n]
        if u in seen:
            continue
        seen.add(u)
        if not any(u.startswith(p) for p in patterns):
            return CoverReport(False, u, len(seen))
    return CoverReport(True, None, len(seen))


def max_gap_of(win: Window) -> int:
    """Largest gap of the members of ``win`` (first member counts as a gap)."""
    return max_gap(win.members())


def count_occurrences(word, pattern: str, N: int) -> int:
    return int(np.count_nonzero(window(Return(word, pattern, 1), N).bits))
