"""Expression algebra over subsets of N = {1, 2, 3, ...}.

Expressions are immutable, hashable trees.  Three evaluators are provided:

* :func:`member` answers a single membership query by plain recursion;
* :func:`window` materializes membership on ``1..N`` as a numpy bit table;
* :func:`eventually_periodic_normalize` computes an exact normal form for
  expressions free of ``Thick`` and ``Return`` nodes.

The first two are implemented independently of each other so that each can
serve as an oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable

import numpy as np

from lsc.errors import InputError
from lsc.schedules import Schedule
from lsc.wordspec import expand, factor, occurrences


class SetExpr:
    """Base class; supports ``a | b``, ``a & b`` and ``~a``."""

    __slots__ = ()

    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Inter((self, other))

    def __invert__(self):
        return Compl(self)

    def __contains__(self, n):
        return member(self, n)


@dataclass(frozen=True)
class Empty(SetExpr):
    pass


@dataclass(frozen=True)
class Full(SetExpr):
    pass


@dataclass(frozen=True)
class Finite(SetExpr):
    elements: tuple[int, ...]

    def __init__(self, elements: Iterable[int] = ()):
        items = tuple(sorted(set(int(e) for e in elements)))
        if items and items[0] < 1:
            raise InputError(f"finite sets live in N; got {items[0]}")
        object.__setattr__(self, "elements", items)


@dataclass(frozen=True)
class Residue(SetExpr):
    """``{x in N : x = r mod m}``."""

    r: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InputError("modulus must be >= 1")
        if not 0 <= self.r < self.m:
            raise InputError(f"residue {self.r} not in [0, {self.m})")


@dataclass(frozen=True)
class Thick(SetExpr):
    schedule: Schedule


@dataclass(frozen=True)
class Return(SetExpr):
    """Integers ``n`` such that ``pattern`` occurs in ``word`` at index ``n - base``.

    With ``base = 0`` an occurrence at word index ``i`` is reported as the
    integer ``i`` (so index 0 is dropped); with ``base = 1`` it is reported
    as ``i + 1``.
    """

    word: object
    pattern: str
    base: int = 0

    def __post_init__(self):
        if not self.pattern:
            raise InputError("pattern must be nonempty")
        if self.base not in (0, 1):
            raise InputError("base flag must be 0 or 1")


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple[SetExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Inter(SetExpr):
    parts: tuple[SetExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Compl(SetExpr):
    inner: SetExpr


def _check_step(name, k):
    if k < 1:
        raise InputError(f"{name} parameter must be >= 1")


@dataclass(frozen=True)
class ShiftDown(SetExpr):
    """``A - n = {m : m + n in A}``."""

    n: int
    inner: SetExpr

    def __post_init__(self):
        _check_step("shift", self.n)


@dataclass(frozen=True)
class ShiftUp(SetExpr):
    """``(A + n) ∩ N``."""

    n: int
    inner: SetExpr

    def __post_init__(self):
        _check_step("shift", self.n)


@dataclass(frozen=True)
class Dilate(SetExpr):
    """``kA = {k a : a in A}``."""

    k: int
    inner: SetExpr

    def __post_init__(self):
        _check_step("dilation", self.k)


@dataclass(frozen=True)
class Quotient(SetExpr):
    """``A / k = {m : k m in A}``."""

    k: int
    inner: SetExpr

    def __post_init__(self):
        _check_step("quotient", self.k)


def children(expr: SetExpr) -> tuple[SetExpr, ...]:
    if isinstance(expr, (Union, Inter)):
        return expr.parts
    if isinstance(expr, (Compl, ShiftDown, ShiftUp, Dilate, Quotient)):
        return (expr.inner,)
    return ()


def walk(expr: SetExpr):
    yield expr
    for c in children(expr):
        yield from walk(c)


def member(expr: SetExpr, n: int) -> bool:
    """Is ``n`` in the set denoted by ``expr``?"""
    if n < 1:
        raise InputError("membership is defined for n >= 1")
    return _member(expr, n)


def _member(e: SetExpr, n: int) -> bool:
    if isinstance(e, Residue):
        return n % e.m == e.r
    if isinstance(e, Finite):
        return n in e.elements
    if isinstance(e, Full):
        return True
    if isinstance(e, Empty):
        return False
    if isinstance(e, Union):
        return any(_member(p, n) for p in e.parts)
    if isinstance(e, Inter):
        return all(_member(p, n) for p in e.parts)
    if isinstance(e, Compl):
        return not _member(e.inner, n)
    if isinstance(e, ShiftDown):
        return _member(e.inner, n + e.n)
    if isinstance(e, ShiftUp):
        return n > e.n and _member(e.inner, n - e.n)
    if isinstance(e, Dilate):
        return n % e.k == 0 and _member(e.inner, n // e.k)
    if isinstance(e, Quotient):
        return _member(e.inner, n * e.k)
    if isinstance(e, Thick):
        return e.schedule.contains(n)
    if isinstance(e, Return):
        i = n - e.base
        if i < 0:
            return False
        return factor(e.word, i, len(e.pattern)) == e.pattern
    raise TypeError(f"not a set expression: {e!r}")


@dataclass(frozen=True, eq=False)
class Window:
    """Membership of the integers ``1..N``; ``bits[i]`` is the verdict for ``i + 1``."""

    N: int
    bits: np.ndarray

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bits) + 1

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.N and bool(self.bits[n - 1])

    def __eq__(self, other):
        return isinstance(other, Window) and self.N == other.N and np.array_equal(self.bits, other.bits)

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __repr__(self):
        m = self.members()
        shown = ", ".join(str(int(x)) for x in m[:12]) + (", ..." if len(m) > 12 else "")
        return f"Window(N={self.N}, members={{{shown}}})"


def window(expr: SetExpr, N: int) -> Window:
    """Materialize ``expr`` on ``1..N``."""
    if N < 1:
        raise InputError("window length must be >= 1")
    return Window(N, _bits(expr, N).copy())


def _bits(expr: SetExpr, length: int) -> np.ndarray:
    if length <= 0:
        return np.zeros(0, dtype=bool)
    cap = 64
    while cap < length:
        cap *= 2
    return _bits_cached(expr, cap)[:length]


@lru_cache(maxsize=1024)
def _bits_cached(e: SetExpr, L: int) -> np.ndarray:
    out = _compute_bits(e, L)
    out.setflags(write=False)
    return out


def _compute_bits(e: SetExpr, L: int) -> np.ndarray:
    if isinstance(e, Empty):
        return np.zeros(L, dtype=bool)
    if isinstance(e, Full):
        return np.ones(L, dtype=bool)
    if isinstance(e, Finite):
        out = np.zeros(L, dtype=bool)
        idx = [x - 1 for x in e.elements if x <= L]
        out[idx] = True
        return out
    if isinstance(e, Residue):
        return np.arange(1, L + 1, dtype=np.int64) % e.m == e.r
    if isinstance(e, Thick):
        out = np.zeros(L, dtype=bool)
        for lo, hi in e.schedule.intervals(L):
            out[lo - 1 : min(hi, L)] = True
        return out
    if isinstance(e, Return):
        p = len(e.pattern)
        word = expand(e.word, L + p)
        hit = occurrences(word, e.pattern)
        # integer n <-> word index n - base
        out = np.zeros(L, dtype=bool)
        if e.base == 0:
            out[:] = hit[1 : L + 1]
        else:
            out[:] = hit[:L]
        return out
    if isinstance(e, Union):
        out = np.zeros(L, dtype=bool)
        for p in e.parts:
            out |= _bits(p, L)
        return out
    if isinstance(e, Inter):
        out = np.ones(L, dtype=bool)
        for p in e.parts:
            out &= _bits(p, L)
        return out
    if isinstance(e, Compl):
        return ~_bits(e.inner, L)
    if isinstance(e, ShiftDown):
        return _bits(e.inner, L + e.n)[e.n :].copy()
    if isinstance(e, ShiftUp):
        out = np.zeros(L, dtype=bool)
        if L > e.n:
            out[e.n :] = _bits(e.inner, L - e.n)
        return out
    if isinstance(e, Dilate):
        out = np.zeros(L, dtype=bool)
        sub = _bits(e.inner, L // e.k)
        out[e.k - 1 :: e.k] = sub
        return out
    if isinstance(e, Quotient):
        return _bits(e.inner, e.k * L)[e.k - 1 :: e.k].copy()
    raise TypeError(f"not a set expression: {e!r}")


@dataclass(frozen=True)
class PeriodicForm:
    """Exact description: ``n <= preperiod`` looked up in ``head``; beyond it
    ``n`` is a member iff ``n mod period`` is in ``residues``."""

    preperiod: int
    head: frozenset
    period: int
    residues: frozenset

    def member(self, n: int) -> bool:
        if n <= self.preperiod:
            return n in self.head
        return n % self.period in self.residues

    @property
    def is_finite(self) -> bool:
        return not self.residues

    @property
    def is_cofinite(self) -> bool:
        return len(self.residues) == self.period


def _periodic_bounds(e: SetExpr) -> tuple[int, int] | None:
    """Upper bounds ``(pre, p)`` such that membership is ``p``-periodic for ``n > pre``."""
    if isinstance(e, (Empty, Full)):
        return 0, 1
    if isinstance(e, Finite):
        return (e.elements[-1] if e.elements else 0), 1
    if isinstance(e, Residue):
        return 0, e.m
    if isinstance(e, (Union, Inter)):
        pre, p = 0, 1
        for c in e.parts:
            b = _periodic_bounds(c)
            if b is None:
                return None
            pre, p = max(pre, b[0]), lcm(p, b[1])
        return pre, p
    if isinstance(e, (Compl, ShiftDown, ShiftUp, Dilate, Quotient)):
        b = _periodic_bounds(e.inner)
        if b is None:
            return None
        pre, p = b
        if isinstance(e, Compl):
            return pre, p
        if isinstance(e, ShiftDown):
            return max(0, pre - e.n), p
        if isinstance(e, ShiftUp):
            return pre + e.n, p
        if isinstance(e, Dilate):
            return e.k * pre, e.k * p
        return pre // e.k, p // gcd(e.k, p)
    return None


def _divisors(p: int) -> list[int]:
    small = [d for d in range(1, int(p**0.5) + 1) if p % d == 0]
    return sorted(set(small + [p // d for d in small]))


@lru_cache(maxsize=512)
def eventually_periodic_normalize(expr: SetExpr) -> PeriodicForm | None:
    """Exact normal form with minimal period and preperiod, or ``None`` when
    ``expr`` contains a ``Thick`` or ``Return`` node."""
    bounds = _periodic_bounds(expr)
    if bounds is None:
        return None
    pre, p = bounds
    bits = _bits(expr, pre + 2 * p)
    tail = bits[pre : pre + p]
    # tail[i] is membership of pre + 1 + i
    for d in _divisors(p):
        if np.array_equal(tail, np.roll(tail, -d)):
            p = d
            break
    tail = bits[pre : pre + p]
    while pre > 0 and bits[pre - 1] == bits[pre - 1 + p]:
        pre -= 1
    head = frozenset(int(n) for n in np.flatnonzero(bits[:pre]) + 1)
    residues = frozenset(int(n) % p for n in range(pre + 1, pre + p + 1) if bits[n - 1])
    return PeriodicForm(pre, head, p, residues)


def difference_set_window(S: SetExpr, S2: SetExpr, N: int) -> Window:
    """``S - S2`` on ``1..N``: ``d`` is a member iff ``s2 + d in S`` for some
    ``s2 in S2`` with ``s2 <= 2N``."""
    if N < 1:
        raise InputError("window length must be >= 1")
    horizon = 2 * N
    a = _bits(S, horizon + N).astype(np.float64)
    b = _bits(S2, horizon).astype(np.float64)
    if not b.any() or not a.any():
        return Window(N, np.zeros(N, dtype=bool))
    # count[d] = sum_s b[s] * a[s + d]; a correlation computed by FFT
    size = 1
    while size < len(a) + len(b):
        size *= 2
    fa = np.fft.rfft(a, size)
    fb = np.fft.rfft(b[::-1], size)
    corr = np.fft.irfft(fa * fb, size)
    # corr[k] = sum_s b[s] a[k - (len(b) - 1) + s]
    shift = len(b) - 1
    counts = corr[shift + 1 : shift + 1 + N]
    return Window(N, np.rint(counts) > 0.5)


def union(*parts: SetExpr) -> SetExpr:
    if not parts:
        return Empty()
    return parts[0] if len(parts) == 1 else Union(parts)


def inter(*parts: SetExpr) -> SetExpr:
    if not parts:
        return Full()
    return parts[0] if len(parts) == 1 else Inter(parts)


def shifted_union(A: SetExpr, N: int) -> SetExpr:
    """``A ∪ (A-1) ∪ ... ∪ (A-N)``."""
    return union(A, *(ShiftDown(i, A) for i in range(1, N + 1)))


def minus_finite(S: SetExpr, F: Iterable[int]) -> SetExpr:
    """``S - F = ⋃_{f in F} (S - f)``; ``S - 0`` is ``S`` itself."""
    parts = [S if f == 0 else ShiftDown(f, S) for f in sorted(set(F))]
    return union(*parts)


def contains_thick_or_return(expr: SetExpr) -> bool:
    return any(isinstance(e, (Thick, Return)) for e in walk(expr))


__all__ = [
    "SetExpr",
    "Empty",
    "Full",
    "Finite",
    "Residue",
    "Thick",
    "Return",
    "Union",
    "Inter",
    "Compl",
    "ShiftDown",
    "ShiftUp",
    "Dilate",
    "Quotient",
    "Window",
    "PeriodicForm",
    "member",
    "window",
    "eventually_periodic_normalize",
    "difference_set_window",
    "union",
    "inter",
    "shifted_union",
    "minus_finite",
]
