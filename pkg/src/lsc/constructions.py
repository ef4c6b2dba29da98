"""Builders for large sets and the algorithms that take them apart.

All infinite unions are truncated to a caller-chosen number of branches;
every certificate produced here is relative to that truncation and to the
window it was checked on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod
from typing import Callable, Sequence

import numpy as np

from lsc import certify
from lsc.certify import ThickCert, Verdict, _OutOfBudget, ip_search, piecewise_syndetic, runs, syndetic_gap
from lsc.errors import CarveError, InputError, StructuralError
from lsc.schedules import Explicit, Layout, Schedule, Separated, Stride, layout_upto, separation_map
from lsc.setcalc import (
    Compl,
    Finite,
    Inter,
    Residue,
    SetExpr,
    Thick,
    _bits,
    union,
    window,
)

MAX_SCAN_INTERVALS = 10_000


def residue_thick_union(k: int, schedules: Sequence[Schedule]) -> SetExpr:
    """``⋃_{i<k} (Residue(i, k) ∩ Thick(H_i))``."""
    if k < 2:
        raise InputError("modulus k must be >= 2")
    if len(schedules) != k:
        raise InputError(f"need exactly {k} schedules, got {len(schedules)}")
    return union(*(Inter((Residue(i, k), Thick(h))) for i, h in enumerate(schedules)))


def prop41_F_witness(k: int, schedules: Sequence[Schedule], ell: int) -> tuple[int, ...]:
    """Finite ``F`` inside :func:`residue_thick_union` that meets every residue class mod ``k``.

    For ``i = 0..k-1`` in turn, picks the first interval ``I_i`` of ``H_i``
    longer than ``ell`` and lying strictly to the right of ``I_{i-1}``, and
    keeps its elements congruent to ``i`` mod ``k``.
    """
    if ell < 1:
        raise InputError("ell must be >= 1")
    if k < 2 or len(schedules) != k:
        raise InputError("need k >= 2 and k schedules")
    F: list[int] = []
    right = 0
    for i, h in enumerate(schedules):
        for count, (lo, hi) in enumerate(h.iter_intervals()):
            if count >= MAX_SCAN_INTERVALS:
                raise StructuralError(f"schedule {i} has no interval longer than {ell} in reach")
            if hi - lo + 1 > ell and lo > right:
                F.extend(x for x in range(lo, hi + 1) if x % k == i)
                right = hi
                break
        else:
            raise StructuralError(f"schedule {i} ran out before an interval longer than {ell}")
    return tuple(F)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeResidueParams:
    """Branches ``(p_i N + c_i) ∩ H_i``.

    With ``non_ip`` set, every ``c_i`` must avoid ``0 mod p_i`` and every
    schedule must be a cell of one shared :class:`Layout` with ``ratio >= 2``,
    so that intervals of different branches are spaced by construction.
    """

    primes: tuple[int, ...]
    residues: tuple[int, ...]
    schedules: tuple[Schedule, ...]
    non_ip: bool = False

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        object.__setattr__(self, "schedules", tuple(self.schedules))
        if not (len(self.primes) == len(self.residues) == len(self.schedules)):
            raise InputError("primes, residues and schedules must have equal length")
        if len(set(self.primes)) != len(self.primes):
            raise InputError("primes must be distinct")
        for p in self.primes:
            if not is_prime(p):
                raise InputError(f"{p} is not prime")
        object.__setattr__(self, "residues", tuple(c % p for c, p in zip(self.residues, self.primes)))
        if self.non_ip:
            for c, p in zip(self.residues, self.primes):
                if c == 0:
                    raise InputError(f"non-IP flag needs c_i not divisible by p_i (p={p})")
            layouts = {getattr(h, "layout", None) for h in self.schedules}
            if not all(isinstance(h, Separated) for h in self.schedules) or len(layouts) != 1:
                raise InputError("non-IP flag needs separated schedules sharing one layout")
            if next(iter(layouts)).ratio < 2:
                raise InputError("non-IP flag needs a layout with ratio >= 2")


def prime_residue_union(params: PrimeResidueParams, truncation: int | None = None) -> SetExpr:
    """Union of the first ``truncation`` branches (all of them by default)."""
    n = len(params.primes) if truncation is None else truncation
    if n < 1 or n > len(params.primes):
        raise InputError(f"truncation must lie in 1..{len(params.primes)}")
    return union(
        *(
            Inter((Residue(c, p), Thick(h)))
            for p, c, h in zip(params.primes[:n], params.residues[:n], params.schedules[:n])
        )
    )


def non_ip_layout(branches: int, start: int = 16, sep: str = "lin10") -> Layout:
    """One row of ``branches`` cells with doubling placement.

    Any interval then starts above twice the end of the previous one, so for
    ``x < y`` in the union ``x + y`` can only land in ``y``'s own interval;
    while ``start`` exceeds every interval length in range, no ``{x, y, x+y}``
    fits.
    """
    return Layout(1, branches, sep=sep, start=start, ratio=2)


def crt_cover_witness(primes: Sequence[int], residues: Sequence[int]) -> int:
    """Least ``n >= 1`` with ``n + i = a_i (mod p_i)`` for ``i = 1..k``."""
    if len(primes) != len(residues) or not primes:
        raise InputError("need one residue per modulus")
    for a, b in itertools.combinations(primes, 2):
        if gcd(a, b) != 1:
            raise InputError(f"moduli {a} and {b} are not coprime")
    x, m = 0, 1
    for i, (p, a) in enumerate(zip(primes, residues), start=1):
        target = (a - i) % p
        # x + m t = target (mod p)
        t = ((target - x) * pow(m, -1, p)) % p
        x, m = x + m * t, m * p
    return x if x > 0 else m


@dataclass(frozen=True)
class SeparatedFamily:
    layout: Layout

    @property
    def cells(self) -> list[tuple[int, int]]:
        return self.layout.cells()

    def cell(self, i: int, j: int) -> Separated:
        return Separated(self.layout, i, j)

    def separation_bounds(self, upto: int) -> dict[int, tuple[float, int]]:
        """For each truncation ``d``, the observed minimum of ``t - s > 0``
        over ``t in T_a``, ``s in T_b`` (``a != b``, max index ``> d``) on
        ``1..upto``, paired with ``sep(d)``.  An empty minimum is ``inf``."""
        sep = separation_map(self.layout.sep)
        top = max(self.layout.rows, self.layout.cols)
        placed = layout_upto(self.layout, upto)
        placed = [(c, (lo, min(hi, upto))) for c, (lo, hi) in placed]
        # minimal positive difference for each ordered pair of cells
        pair_min: dict[tuple, int] = {}
        last_hi: dict[tuple, int] = {}
        for cell, (lo, hi) in placed:
            for other, ohi in last_hi.items():
                if other != cell:
                    key = (cell, other)
                    pair_min[key] = min(pair_min.get(key, lo - ohi), lo - ohi)
            last_hi[cell] = hi
        out = {}
        for d in range(0, top + 1):
            vals = [v for (a, b), v in pair_min.items() if max(*a, *b) > d]
            out[d] = (min(vals) if vals else float("inf"), sep(d))
        return out

    def verify(self, upto: int) -> bool:
        return all(obs >= need for obs, need in self.separation_bounds(upto).values())


def separated_thick_family(
    rows: int, cols: int, sep: str = "lin10", *, start: int = 1, ratio: int = 2, lengths: str = "lin"
) -> SeparatedFamily:
    """Doubly indexed thick sets ``T_{i,j}`` whose mutual distances grow with the index."""
    return SeparatedFamily(Layout(rows, cols, sep=sep, start=start, ratio=ratio, lengths=lengths))


def assemble_rows(family: SeparatedFamily, primes: Sequence[int]) -> list[SetExpr]:
    """``B_i = ⋃_{j >= i} (T_{i,j} ∩ Residue(1, p_j))`` for each row ``i``."""
    lay = family.layout
    if len(primes) < lay.cols:
        raise InputError(f"need {lay.cols} primes")
    out = []
    for i in range(1, lay.rows + 1):
        parts = [Inter((Thick(family.cell(i, j)), Residue(1 % primes[j - 1], primes[j - 1]))) for j in range(i, lay.cols + 1)]
        out.append(union(*parts))
    return out


@dataclass(frozen=True)
class SplitResult:
    A1: SetExpr
    A2: SetExpr
    window: int
    disjoint: bool
    exhaustive: bool
    certificates: tuple[Verdict, ...] = ()
    pieces: tuple = ()

    @property
    def ok(self) -> bool:
        return self.disjoint and self.exhaustive


def _check_split(A, A1, A2, N):
    w1, w2, w = window(A1, N), window(A2, N), window(A, N)
    return not (w1.bits & w2.bits).any(), bool(np.array_equal(w1.bits | w2.bits, w.bits))


def split_thick(schedule: Schedule, L: int = 4, horizon: int = 10**9, check_window: int = 10**5) -> SplitResult:
    """Split ``Thick(schedule)`` into its odd- and even-indexed intervals (0-based)."""
    A = Thick(schedule)
    A1 = Thick(Stride(schedule, 1, 2))
    A2 = Thick(Stride(schedule, 0, 2))
    certs = (certify.thick_to_level(A1, L, horizon), certify.thick_to_level(A2, L, horizon))
    disjoint, exhaustive = _check_split(A, A1, A2, check_window)
    return SplitResult(A1, A2, check_window, disjoint, exhaustive, certs)


def interval_extractor(N: int, remaining: np.ndarray):
    """Leftmost ``N`` consecutive integers inside ``remaining`` (``remaining[n]`` for ``n``)."""
    starts, lengths = runs(remaining[1:])
    for lo, ln in zip(starts, lengths):
        if ln >= N:
            return list(range(int(lo), int(lo) + N))
    return None


def fs_extractor(N: int, remaining: np.ndarray):
    """All finite sums of the least ``N`` generators found inside ``remaining``."""
    try:
        gens = ip_search(remaining, N, len(remaining) - 1)
    except _OutOfBudget:
        return None
    if gens is None:
        return None
    return sorted(certify.finite_sums(gens))


def _part_cert(pieces, R):
    spans = [(p[0], p[-1]) for p in pieces if p and p[-1] - p[0] + 1 == len(p)]
    wit = certify._leftmost([a for a, _ in spans], [b - a + 1 for a, b in spans], R)
    if wit is None:
        return certify.unknown(R, "carved pieces are not intervals of every length")
    return certify.certified(ThickCert(R, wit))


def split_by_filtration(
    A: SetExpr,
    rounds: int,
    carve: Callable = interval_extractor,
    bound: int = 10**5,
) -> SplitResult:
    """Carve finite pieces ``A'_1, A'_2, ...`` of growing order from ``A`` and
    deal them alternately to two parts; the remainder joins the first part.

    Rounds ``1..rounds + 1`` are carved so that each part holds a witness for
    every order up to ``rounds``.  A failed carve raises :class:`CarveError`
    naming the round.
    """
    if rounds < 1:
        raise InputError("rounds must be >= 1")
    remaining = np.concatenate(([False], _bits(A, bound)))
    parts: tuple[list, list] = ([], [])
    for n in range(1, rounds + 2):
        piece = carve(n, remaining)
        if piece is None:
            raise CarveError(n, f"no piece of order {n} inside the remaining set below {bound}")
        piece = sorted(int(x) for x in piece)
        if not remaining[piece].all():
            raise CarveError(n, "extractor returned elements outside the remaining set")
        remaining[piece] = False
        parts[(n - 1) % 2].append(piece)
    taken2 = Finite(x for p in parts[1] for x in p)
    A1 = Inter((A, Compl(taken2)))
    A2 = taken2
    disjoint, exhaustive = _check_split(A, A1, A2, bound)
    certs = ()
    if carve is interval_extractor:
        certs = (_part_cert(parts[0], rounds), _part_cert(parts[1], rounds))
    return SplitResult(A1, A2, bound, disjoint, exhaustive, certs, (tuple(map(tuple, parts[0])), tuple(map(tuple, parts[1]))))


@dataclass(frozen=True)
class Decomposition:
    B: SetExpr
    G: Explicit
    ell: int
    intervals: tuple[tuple[int, int], ...]
    certificate: Verdict
    window: int


def _clusters(members: np.ndarray, ell: int) -> list[tuple[int, int]]:
    if len(members) == 0:
        return []
    cut = np.flatnonzero(np.diff(members) > ell)
    lo_idx = np.concatenate(([0], cut + 1))
    hi_idx = np.concatenate((cut, [len(members) - 1]))
    return [(int(members[a]), int(members[b])) for a, b in zip(lo_idx, hi_idx)]


def _greedy(clusters, min_length):
    chosen: list[tuple[int, int]] = []
    for lo, hi in clusters:
        if chosen:
            plo, phi = chosen[-1]
            if hi - lo <= phi - plo or lo <= phi + len(chosen):
                continue
        chosen.append((lo, hi))
    if not chosen or chosen[-1][1] - chosen[-1][0] + 1 < min_length:
        return None
    return chosen


def structure_decompose(A: SetExpr, S: SetExpr, N: int, ell_max: int, *, level: int = 3) -> Decomposition:
    """Find the least ``ell`` and intervals ``I_1 < I_2 < ...`` of ``1..N`` on
    which ``A ∩ S`` meets every subinterval of length ``ell``; return
    ``B = (A ∩ G) ∪ (N \\ G)`` with ``G = ⋃ I_i`` and a window syndeticity
    verdict for ``B ∩ S``.

    Each ``I_i`` is the span of a run of members of ``A ∩ S`` with gaps at
    most ``ell``; lengths strictly increase and ``min I_{i+1} > max I_i + i``.
    An ``ell`` qualifies when the longest chosen interval has length at least
    ``2 ell``.
    """
    AS = Inter((A, S))
    ps = piecewise_syndetic(AS, ell_max, level, N)
    if not ps.certified:
        raise InputError("A ∩ S is not certified piecewise syndetic on the window")
    members = np.flatnonzero(_bits(AS, N)) + 1
    for ell in range(1, ell_max + 1):
        chosen = _greedy(_clusters(members, ell), 2 * ell)
        if chosen is None:
            continue
        G = Explicit(tuple(chosen))
        B = union(Inter((A, Thick(G))), Compl(Thick(G)))
        cert = syndetic_gap(Inter((B, S)), N)
        return Decomposition(B, G, ell, tuple(chosen), cert, N)
    raise InputError(f"no qualifying ell <= {ell_max}")


@dataclass(frozen=True)
class ProbeReport:
    probe: int
    match: int | None
    verdict: Verdict | None = None


def robustly_syndetic_check(collection: Sequence[SetExpr], probes: Sequence[SetExpr], N: int) -> list[ProbeReport]:
    """For each probe, the first collection member whose intersection with
    it is certified syndetic on ``1..N``."""
    out = []
    for pi, A in enumerate(probes):
        found = None
        for bi, B in enumerate(collection):
            v = syndetic_gap(Inter((A, B)), N)
            if v.certified:
                found = ProbeReport(pi, bi, v)
                break
        out.append(found or ProbeReport(pi, None))
    return out


def crt_modulus(primes: Sequence[int]) -> int:
    return prod(primes)
