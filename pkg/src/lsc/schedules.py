"""Finitely described sequences of disjoint intervals.

A schedule yields intervals ``I_0, I_1, ...`` (0-based index) with
``hi_j + 1 < lo_{j+1}``.  The union of the intervals of a schedule whose
lengths are unbounded is a thick set.  Built-in kinds (``Geometric``,
``Separated``, ``Stride``) additionally promise nondecreasing lengths with
``|I_j| >= j``; every kind is validated lazily and the first violation
raises :class:`~lsc.errors.StructuralError`.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from lsc.errors import InputError, StructuralError

Interval = tuple[int, int]

LENGTH_MAPS = {
    "lin": lambda j: j + 1,
    "sq": lambda j: j * j + 1,
    "exp2": lambda j: 2**j,
}

_SEP_RE = re.compile(r"^(lin|sq)(\d*)$")


def length_map(name: str):
    try:
        return LENGTH_MAPS[name]
    except KeyError:
        raise InputError(f"unknown length map {name!r}; expected one of {sorted(LENGTH_MAPS)}") from None


def separation_map(name: str):
    """Return ``d -> sep(d)`` for ``linK`` (K*d) or ``sqK`` (K*d*d); K defaults to 1."""
    m = _SEP_RE.match(name)
    if not m:
        raise InputError(f"unknown separation map {name!r}; expected linK or sqK")
    scale = int(m.group(2) or 1)
    if scale < 1:
        raise InputError("separation scale must be positive")
    if m.group(1) == "lin":
        return lambda d: scale * d
    return lambda d: scale * d * d


class Schedule:
    """Common behaviour; subclasses implement :meth:`_generate`."""

    monotone = True

    def _generate(self) -> Iterator[Interval]:
        raise NotImplementedError

    def iter_intervals(self) -> Iterator[Interval]:
        """Yield validated intervals in order (possibly forever)."""
        prev = None
        for j, (lo, hi) in enumerate(self._generate()):
            if lo < 1 or hi < lo:
                raise StructuralError(f"interval {j} = [{lo}, {hi}] is empty or not in N")
            if prev is not None:
                plo, phi = prev
                if not phi + 1 < lo:
                    raise StructuralError(
                        f"intervals {j - 1} and {j} overlap or touch: [{plo}, {phi}], [{lo}, {hi}]"
                    )
                if self.monotone and hi - lo < phi - plo:
                    raise StructuralError(f"interval {j} is shorter than interval {j - 1}")
            if self.monotone and hi - lo + 1 < j:
                raise StructuralError(f"interval {j} has length {hi - lo + 1} < {j}")
            prev = (lo, hi)
            yield lo, hi

    def intervals(self, upto: int) -> tuple[Interval, ...]:
        """All intervals whose left end is at most ``upto``."""
        cap = 1
        while cap < upto:
            cap *= 2
        ivs = _intervals_cached(self, cap)
        k = bisect.bisect_right(ivs, (upto, float("inf")))
        return ivs[:k]

    def interval(self, j: int) -> Interval | None:
        """The ``j``-th interval, or ``None`` when a finite schedule has fewer."""
        for i, iv in enumerate(self.iter_intervals()):
            if i == j:
                return iv
        return None

    def contains(self, n: int) -> bool:
        ivs = self.intervals(n)
        return bool(ivs) and ivs[-1][0] <= n <= ivs[-1][1]


@lru_cache(maxsize=512)
def _intervals_cached(schedule: Schedule, cap: int) -> tuple[Interval, ...]:
    out = []
    for lo, hi in schedule.iter_intervals():
        if lo > cap:
            break
        out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class Geometric(Schedule):
    """``I_j = [anchor * base**j, anchor * base**j + len(j) - 1]``."""

    base: int
    anchor: int = 1
    lengths: str = "lin"

    def __post_init__(self):
        if self.base < 2:
            raise InputError("geometric base must be >= 2")
        if self.anchor < 1:
            raise InputError("geometric anchor must be >= 1")
        length_map(self.lengths)

    def _generate(self):
        size = length_map(self.lengths)
        lo = self.anchor
        j = 0
        while True:
            yield lo, lo + size(j) - 1
            lo *= self.base
            j += 1


@dataclass(frozen=True)
class Explicit(Schedule):
    """A finite list of intervals given verbatim; only disjointness is enforced."""

    spans: tuple[Interval, ...]
    monotone = False

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple((int(a), int(b)) for a, b in self.spans))

    def _generate(self):
        yield from self.spans


@dataclass(frozen=True)
class Layout:
    """Placement rule shared by all cells of a separated family.

    Intervals are produced in rounds; round ``t`` gives every cell
    ``(row, col)`` (1-based) one interval of length ``len(t)``, visiting cells
    by anti-diagonal.  Each new interval starts at
    ``max(prev_hi + 1 + sep(m), ratio * prev_hi + 1)`` where ``m`` is the
    largest row or column index placed so far.
    """

    rows: int
    cols: int
    sep: str = "lin10"
    start: int = 1
    ratio: int = 2
    lengths: str = "lin"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError("layout needs at least one row and one column")
        if self.start < 1 or self.ratio < 1:
            raise InputError("layout start and ratio must be positive")
        separation_map(self.sep)
        length_map(self.lengths)

    def cells(self) -> list[tuple[int, int]]:
        return sorted(
            ((i, j) for i in range(1, self.rows + 1) for j in range(1, self.cols + 1)),
            key=lambda c: (c[0] + c[1], c[0]),
        )

    def placements(self) -> Iterator[tuple[tuple[int, int], Interval]]:
        """Yield ``(cell, interval)`` in global left-to-right order, forever."""
        sep = separation_map(self.sep)
        size = length_map(self.lengths)
        order = self.cells()
        prev_hi = None
        top = 0
        t = 0
        while True:
            for cell in order:
                top = max(top, *cell)
                if prev_hi is None:
                    lo = self.start
                else:
                    lo = max(prev_hi + 1 + sep(top), self.ratio * prev_hi + 1)
                hi = lo + size(t) - 1
                prev_hi = hi
                yield cell, (lo, hi)
            t += 1


@lru_cache(maxsize=128)
def _layout_prefix(layout: Layout, cap: int) -> tuple[tuple[tuple[int, int], Interval], ...]:
    out = []
    for cell, iv in layout.placements():
        if iv[0] > cap:
            break
        out.append((cell, iv))
    return tuple(out)


def layout_upto(layout: Layout, upto: int):
    """Every placement of ``layout`` whose interval starts at or below ``upto``."""
    cap = 1
    while cap < upto:
        cap *= 2
    return [p for p in _layout_prefix(layout, cap) if p[1][0] <= upto]


@dataclass(frozen=True)
class Separated(Schedule):
    """The intervals of one cell ``(row, col)`` of a :class:`Layout`."""

    layout: Layout
    row: int = 1
    col: int = 1

    def __post_init__(self):
        if not (1 <= self.row <= self.layout.rows and 1 <= self.col <= self.layout.cols):
            raise InputError(f"cell ({self.row}, {self.col}) outside the layout")

    def _generate(self):
        me = (self.row, self.col)
        for cell, iv in self.layout.placements():
            if cell == me:
                yield iv


@dataclass(frozen=True)
class Stride(Schedule):
    """Every ``step``-th interval of ``parent`` starting from index ``offset``."""

    parent: Schedule
    offset: int
    step: int = 2
    monotone: bool = field(default=True, init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.step < 1 or self.offset < 0:
            raise InputError("stride needs step >= 1 and offset >= 0")
        object.__setattr__(self, "monotone", self.parent.monotone)

    def _generate(self):
        for j, iv in enumerate(self.parent.iter_intervals()):
            if j >= self.offset and (j - self.offset) % self.step == 0:
                yield iv
