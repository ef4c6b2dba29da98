"""Three-valued deciders that return checkable certificates.

Every decider first tries the exact tier (:func:`eventually_periodic_normalize`)
and otherwise works on a finite window.  A ``Certified`` verdict always
carries a finite witness that :func:`revalidate` can replay against
:func:`~lsc.setcalc.member`.  ``Refuted`` verdicts carry ``RefutedUpTo``;
its ``exact`` flag tells a genuine refutation from an exhausted search.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from lsc.errors import InputError
from lsc.setcalc import (
    Full,
    Inter,
    SetExpr,
    ShiftDown,
    Thick,
    _bits,
    eventually_periodic_normalize,
    inter,
    member,
    minus_finite,
    shifted_union,
)

DEFAULT_BUDGET = 10**7


class Status(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {"certified": 0, "refuted": 1, "unknown": 2}[self.value]


@dataclass(frozen=True)
class SyndeticCert:
    gap: int
    checked_window: int
    exact: bool = False


@dataclass(frozen=True)
class ThickCert:
    level: int
    witnesses: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PsCert:
    shift: int
    inner: ThickCert


@dataclass(frozen=True)
class IpCert:
    generators: tuple[int, ...]


@dataclass(frozen=True)
class RefutedUpTo:
    bound: int
    exact: bool = False


@dataclass(frozen=True)
class Unknown:
    bound: int
    reason: str = ""


@dataclass(frozen=True)
class DtCert:
    """``S - F`` is thick to the recorded level, with ``F`` drawn from ``A``."""

    F: tuple[int, ...]
    inner: ThickCert


@dataclass(frozen=True)
class PrCert:
    """The largest gap of ``S \\ (S - F)`` on ``1..window`` exceeds ``threshold``."""

    F: tuple[int, ...]
    gap: int
    threshold: int
    window: int


@dataclass(frozen=True)
class ShiftCert:
    n: int
    inner: PsCert


@dataclass(frozen=True)
class BrauerCert:
    x: int
    y: int
    values: tuple[int, ...]


@dataclass(frozen=True)
class PrefixCert:
    M: int
    interval: tuple[int, int]


@dataclass(frozen=True)
class Verdict:
    status: Status
    certificate: object
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def exact_refutation(self) -> bool:
        return self.refuted and getattr(self.certificate, "exact", False)


def certified(cert, note="") -> Verdict:
    return Verdict(Status.CERTIFIED, cert, note)


def refuted(bound, exact=False, note="") -> Verdict:
    return Verdict(Status.REFUTED, RefutedUpTo(int(bound), exact), note)


def unknown(bound, reason="") -> Verdict:
    return Verdict(Status.UNKNOWN, Unknown(int(bound), reason), reason)


class Budget:
    """Counter of search-node expansions, capped by ``LSC_SEARCH_BUDGET``."""

    def __init__(self, limit: int | None = None):
        if limit is None:
            limit = int(os.environ.get("LSC_SEARCH_BUDGET", DEFAULT_BUDGET))
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> bool:
        self.used += k
        return self.used <= self.limit

    @property
    def exhausted(self) -> bool:
        return self.used > self.limit


def _first_in_order(fn: Callable, items: Iterable, workers: int = 1, batch: int = 64):
    """Return ``(item, result)`` for the first item (in iteration order) whose
    ``fn`` result is truthy, or ``(None, results)`` with every result seen.

    With ``workers > 1`` items are evaluated concurrently in batches, but the
    winner is still the earliest item in the input order.
    """
    seen = []
    it = iter(items)
    if workers <= 1:
        for item in it:
            res = fn(item)
            if res:
                return item, res
            seen.append(res)
        return None, seen
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            chunk = list(itertools.islice(it, batch))
            if not chunk:
                return None, seen
            for item, res in zip(chunk, pool.map(fn, chunk)):
                if res:
                    return item, res
                seen.append(res)


# ---------------------------------------------------------------- helpers


def runs(bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Starts (1-based) and lengths of the maximal runs of ``True`` in ``bits``."""
    padded = np.concatenate(([0], bits.astype(np.int8), [0]))
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return starts + 1, ends - starts


def _leftmost(starts: Sequence[int], lengths: Sequence[int], L: int):
    """Leftmost interval of each length ``1..L`` inside the given runs, or None."""
    if len(lengths) == 0:
        return None
    best = np.maximum.accumulate(np.asarray(lengths))
    out = []
    for ell in range(1, L + 1):
        k = int(np.searchsorted(best, ell))
        if k == len(best):
            return None
        lo = int(starts[k])
        out.append((lo, lo + ell - 1))
    return tuple(out)


def max_gap(members: np.ndarray, N: int | None = None) -> int:
    """Largest of: the first member, consecutive differences, and (when
    ``N`` is given) ``N + 1 - last``.  Empty input yields ``N + 1``."""
    if len(members) == 0:
        return (N or 0) + 1
    g = int(members[0])
    if len(members) > 1:
        g = max(g, int(np.diff(members).max()))
    if N is not None:
        g = max(g, N + 1 - int(members[-1]))
    return g


def _schedule_runs(expr: SetExpr, bound: int):
    ivs = expr.schedule.intervals(bound)
    starts = [lo for lo, _ in ivs]
    lengths = [min(hi, bound) - lo + 1 for lo, hi in ivs]
    return starts, lengths


# ---------------------------------------------------------------- syndetic


def syndetic_gap(A: SetExpr, N: int) -> Verdict:
    """Gap bound of ``A``: exact when ``A`` is eventually periodic, otherwise
    relative to the window ``1..N``."""
    if N < 1:
        raise InputError("window must be >= 1")
    form = eventually_periodic_normalize(A)
    if form is not None:
        if form.is_finite:
            return refuted(N, exact=True, note="finite set")
        span = form.preperiod + 2 * form.period
        members = np.flatnonzero(_bits(A, span)) + 1
        return certified(SyndeticCert(max_gap(members), span, exact=True))
    bits = _bits(A, N)
    members = np.flatnonzero(bits) + 1
    if len(members) == 0:
        return unknown(N, "no members in window")
    g = max_gap(members)
    if N - int(members[-1]) >= g:
        return unknown(N, "trailing gap exceeds interior gaps")
    half = members[members <= N // 2]
    if len(half) == 0 or max_gap(half) != g:
        return unknown(N, "gaps still growing across the window")
    return certified(SyndeticCert(g, N, exact=False))


# ---------------------------------------------------------------- thick


def _thick_from_bits(bits: np.ndarray, L: int):
    starts, lengths = runs(bits)
    return _leftmost(starts, lengths, L)


def thick_to_level(A: SetExpr, L: int, bound: int) -> Verdict:
    """Leftmost witness interval of every length ``1..L`` below ``bound``.

    On the exact tier the answer is about thickness itself: certified iff
    ``A`` is cofinite, refuted otherwise, independent of ``bound``.
    """
    if L < 1:
        raise InputError("level must be >= 1")
    form = eventually_periodic_normalize(A)
    if form is not None:
        if not form.is_cofinite:
            return refuted(bound, exact=True, note="eventually periodic and not cofinite")
        span = form.preperiod + form.period + L
        wit = _thick_from_bits(_bits(A, span), L)
        return certified(ThickCert(L, wit))
    budget = Budget()
    limit = min(bound, budget.limit)
    if isinstance(A, Thick):
        wit = _leftmost(*_schedule_runs(A, limit), L)
    else:
        wit = _thick_from_bits(_bits(A, limit), L)
    if wit is None:
        return unknown(limit, f"no interval of length {L} found below {limit}")
    return certified(ThickCert(L, wit))


# ---------------------------------------------------------------- piecewise syndetic


def _cyclic_tail_gap(form) -> int:
    res = sorted(form.residues)
    p = form.period
    gaps = [b - a for a, b in zip(res, res[1:])] + [res[0] + p - res[-1]]
    return max(gaps)


def piecewise_syndetic(A: SetExpr, shift_bound: int, L: int, bound: int) -> Verdict:
    """Least ``N <= shift_bound`` with ``A ∪ (A-1) ∪ ... ∪ (A-N)`` thick to level ``L``."""
    if shift_bound < 0:
        raise InputError("shift bound must be >= 0")
    form = eventually_periodic_normalize(A)
    if form is not None:
        if form.is_finite:
            return refuted(shift_bound, exact=True, note="finite set")
        need = _cyclic_tail_gap(form) - 1
        if need > shift_bound:
            return refuted(shift_bound, note=f"needs shift {need}")
        inner = thick_to_level(shifted_union(A, need), L, bound)
        return certified(PsCert(need, inner.certificate))
    limit = min(bound, Budget().limit)
    if isinstance(A, Thick):
        wit = _leftmost(*_schedule_runs(A, limit), L)
        if wit is not None:
            return certified(PsCert(0, ThickCert(L, wit)))
    base = _bits(A, limit + shift_bound)
    acc = base[:limit].copy()
    for n in range(0, shift_bound + 1):
        if n:
            acc |= base[n : n + limit]
        wit = _thick_from_bits(acc, L)
        if wit is not None:
            return certified(PsCert(n, ThickCert(L, wit)))
    return unknown(limit, f"no shift up to {shift_bound} reaches level {L}")


# ---------------------------------------------------------------- IP


def ip_search(a: np.ndarray, depth: int, bound: int, budget: Budget | None = None):
    """Least ``x_1 < ... < x_depth`` whose nonempty subset sums are pairwise
    distinct, at most ``bound`` and all flagged in ``a`` (``a[n]`` is the
    membership of ``n``; ``a[0]`` is ignored).  Returns ``None`` when none exist.

    Raises ``_OutOfBudget`` when ``budget`` runs out.
    """
    budget = budget or Budget()

    def extend(gens: tuple[int, ...], sums: list[int]):
        last = gens[-1] if gens else 0
        top = bound - sums[-1]
        if top <= last:
            return None
        xs = np.arange(last + 1, top + 1)
        ok = a[xs].copy()
        for s in sums[1:]:
            ok &= a[xs + s]
        # x + s = t would repeat an existing sum
        for x in {t - s for s in sums for t in sums if t > s}:
            if last < x <= top:
                ok[x - last - 1] = False
        for x in xs[ok]:
            x = int(x)
            if not budget.spend(1 + len(sums)):
                raise _OutOfBudget
            new = sorted(sums + [s + x for s in sums])
            if len(set(new)) != len(new):
                continue
            cand = gens + (x,)
            if len(cand) == depth:
                return cand
            found = extend(cand, new)
            if found:
                return found
        return None

    return extend((), [0])


def ip_witness(A: SetExpr, depth: int, bound: int) -> Verdict:
    """Depth-first search for ``x_1 < ... < x_d`` whose ``2^d - 1`` nonempty
    subset sums are pairwise distinct members of ``A`` not exceeding ``bound``.

    Generators are tried in increasing order, so the first hit is the
    lexicographically least tuple.
    """
    if depth < 1:
        raise InputError("depth must be >= 1")
    a = np.concatenate(([False], _bits(A, bound)))
    try:
        gens = ip_search(a, depth, bound)
    except _OutOfBudget:
        return unknown(bound, "search budget exhausted")
    if gens is None:
        return refuted(bound)
    return certified(IpCert(gens))


class _OutOfBudget(Exception):
    pass


def finite_sums(gens: Sequence[int]) -> list[int]:
    out = []
    for r in range(1, len(gens) + 1):
        for combo in itertools.combinations(gens, r):
            out.append(sum(combo))
    return out


# ---------------------------------------------------------------- dynamical syndeticity


def _check_subset(F, B, what="B"):
    for f in F:
        if f < 1 or not member(B, f):
            raise InputError(f"{f} is not a member of {what}")


def ds_certificate(B: SetExpr, F: Sequence[int], N: int) -> Verdict:
    """Syndetic verdict for ``⋂_{f in F} (B - f)``."""
    F = sorted(set(int(f) for f in F))
    _check_subset(F, B)
    return syndetic_gap(inter(*(ShiftDown(f, B) for f in F)) if F else Full(), N)


def dcs_certificate(B: SetExpr, F: Sequence[int], N: int) -> Verdict:
    """Syndetic verdict for ``B ∩ ⋂_{f in F} (B - f)``."""
    F = sorted(set(int(f) for f in F))
    _check_subset(F, B)
    return syndetic_gap(inter(B, *(ShiftDown(f, B) for f in F)), N)


# ---------------------------------------------------------------- F searches


def candidate_sets(A: SetExpr, fbound: int, max_size: int) -> Iterator[tuple[int, ...]]:
    """Finite subsets of ``A ∩ [1, fbound]`` ordered by max element, then size,
    then lexicographically."""
    pool = [int(x) for x in np.flatnonzero(_bits(A, fbound)) + 1]
    for idx, m in enumerate(pool):
        below = pool[:idx]
        for size in range(1, max_size + 1):
            for combo in itertools.combinations(below, size - 1):
                yield combo + (m,)


@dataclass
class _DtProbe:
    S: SetExpr
    L: int
    bound: int
    s_bits: np.ndarray | None = None
    exact: bool = False

    def __call__(self, F):
        if self.exact:
            v = thick_to_level(minus_finite(self.S, F), self.L, self.bound)
        else:
            acc = np.zeros(self.bound, dtype=bool)
            for f in F:
                acc |= self.s_bits[1 + f : 1 + f + self.bound]
            wit = _thick_from_bits(acc, self.L)
            v = certified(ThickCert(self.L, wit)) if wit else unknown(self.bound)
        return v if v.certified else None if not v.exact_refutation else False


def dt_check(
    A: SetExpr,
    S: SetExpr,
    fbound: int,
    L: int,
    bound: int,
    *,
    max_size: int = 3,
    candidates: Iterable[Sequence[int]] | None = None,
    workers: int = 1,
    ps_shift: int | None = None,
) -> Verdict:
    """Search ``F ⊆ A ∩ [1, fbound]`` with ``S - F`` thick to level ``L``.

    ``candidates`` overrides the built-in enumeration (each is still checked
    to lie in ``A``).
    """
    ps = piecewise_syndetic(S, fbound if ps_shift is None else ps_shift, L, bound)
    if not ps.certified:
        return unknown(bound, "S is not certified piecewise syndetic")
    if candidates is None:
        cands = candidate_sets(A, fbound, max_size)
    else:
        cands = [tuple(sorted(set(int(f) for f in F))) for F in candidates]
        for F in cands:
            _check_subset(F, A, "A")
    exact = eventually_periodic_normalize(S) is not None
    probe = _DtProbe(S, L, bound, exact=exact)
    if not exact:
        probe.s_bits = np.concatenate(([False], _bits(S, bound + max(fbound, _max_of(cands)) + 1)))
    budget = Budget()
    limited = _limited(cands, budget, bound)
    F, res = _first_in_order(probe, limited, workers)
    if F is not None:
        return certified(DtCert(tuple(F), res.certificate))
    if budget.exhausted:
        return unknown(bound, "search budget exhausted")
    if res and all(r is False for r in res):
        return refuted(fbound, note="every candidate F refuted on the exact tier")
    return unknown(bound, "no candidate F certified")


def _max_of(cands) -> int:
    if isinstance(cands, list) and cands:
        return max(max(F) for F in cands if F)
    return 0


def _limited(items, budget: Budget, cost: int):
    for it in items:
        if not budget.spend(max(1, cost // 1000)):
            return
        yield it


def pr_check(
    A: SetExpr,
    S: SetExpr,
    fbound: int,
    N: int,
    threshold: int | None = None,
    *,
    max_size: int = 3,
    candidates: Iterable[Sequence[int]] | None = None,
    workers: int = 1,
) -> Verdict:
    """Search ``F ⊆ A ∩ [1, fbound]`` for which ``S \\ (S - F)`` restricted to
    ``1..N`` has largest gap above ``threshold`` (default ``ceil(N / 10)``).

    Gaps are measured over ``{0} ∪ X ∪ {N + 1}``, so an empty ``X`` has gap
    ``N + 1``.
    """
    if threshold is None:
        threshold = math.ceil(N / 10)
    pre = syndetic_gap(S, N)
    if not pre.certified:
        return unknown(N, "S is not certified syndetic")
    if candidates is None:
        cands = candidate_sets(A, fbound, max_size)
    else:
        cands = [tuple(sorted(set(int(f) for f in F))) for F in candidates]
        for F in cands:
            _check_subset(F, A, "A")
    top = fbound if candidates is None else max([fbound] + [max(F) for F in cands if F])
    s = np.concatenate(([False], _bits(S, N + top + 1)))
    s_win = s[1 : N + 1]

    def probe(F):
        covered = np.zeros(N, dtype=bool)
        for f in F:
            covered |= s[1 + f : N + 1 + f]
        X = np.flatnonzero(s_win & ~covered) + 1
        pts = np.concatenate(([0], X, [N + 1]))
        g = int(np.diff(pts).max())
        return g if g > threshold else None

    budget = Budget()
    F, g = _first_in_order(probe, _limited(cands, budget, N), workers)
    if F is not None:
        return certified(PrCert(tuple(F), g, threshold, N))
    if budget.exhausted:
        return unknown(N, "search budget exhausted")
    return refuted(fbound)


def pr_gap(S: SetExpr, F: Sequence[int], N: int) -> int:
    """Largest gap of ``(S \\ (S - F)) ∩ [1, N]`` over ``{0} ∪ X ∪ {N + 1}``."""
    s = _bits(S, N)
    covered = _bits(minus_finite(S, F), N)
    X = np.flatnonzero(s & ~covered) + 1
    return int(np.diff(np.concatenate(([0], X, [N + 1]))).max())


# ---------------------------------------------------------------- shift correlation


def shift_correlation(B: SetExpr, n_bound: int, L: int, bound: int, shift_bound: int = 16) -> Verdict:
    """Least ``n <= n_bound`` such that ``B ∩ (B - n)`` is piecewise syndetic."""
    for n in range(1, n_bound + 1):
        v = piecewise_syndetic(Inter((B, ShiftDown(n, B))), shift_bound, L, bound)
        if v.certified:
            return certified(ShiftCert(n, v.certificate))
    return unknown(bound, f"no n <= {n_bound} certified")


# ---------------------------------------------------------------- Brauer configurations


@dataclass(frozen=True)
class Poly:
    """Polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def check(self):
        """Raise unless ``p(0) = 0`` and ``p`` takes integer values on integers."""
        if self(0) != 0:
            raise InputError(f"polynomial {self} does not vanish at 0")
        # integer values on degree + 1 consecutive integers imply integer-valued
        for t in range(0, self.degree + 2):
            if self(t).denominator != 1:
                raise InputError(f"polynomial {self} is not integer-valued at {t}")

    def __str__(self):
        terms = [f"{c}*y^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def brauer_search(A: SetExpr, polys: Sequence[Poly], bound: int) -> Verdict:
    """Least ``(y, x)`` with ``x, y`` and every ``x + p_i(y)`` in ``A ∩ [1, bound]``."""
    polys = [p if isinstance(p, Poly) else Poly(tuple(p)) for p in polys]
    for p in polys:
        p.check()
    a = np.concatenate(([False], _bits(A, bound)))
    xs = np.arange(1, bound + 1)
    budget = Budget()
    for y in range(1, bound + 1):
        if not a[y]:
            continue
        if not budget.spend(bound):
            return unknown(bound, "search budget exhausted")
        ok = a[1:].copy()
        vals = [int(p(y)) for p in polys]
        for v in vals:
            tgt = xs + v
            inside = (tgt >= 1) & (tgt <= bound)
            ok &= inside
            ok[inside] &= a[tgt[inside]]
        hits = np.flatnonzero(ok)
        if len(hits):
            x = int(hits[0]) + 1
            return certified(BrauerCert(x, y, tuple(x + v for v in vals)))
    return refuted(bound)


# ---------------------------------------------------------------- compactness prefix


def compactness_prefix(N: int, B: SetExpr, m_bound: int) -> Verdict:
    """Least ``M <= m_bound`` such that ``B ∩ [1, M]`` contains ``N`` consecutive integers."""
    if N < 1:
        raise InputError("N must be >= 1")
    if isinstance(B, Thick):
        starts, lengths = _schedule_runs(B, m_bound)
    else:
        starts, lengths = runs(_bits(B, m_bound))
    for lo, ln in zip(starts, lengths):
        if ln >= N:
            lo = int(lo)
            return certified(PrefixCert(lo + N - 1, (lo, lo + N - 1)))
    form = eventually_periodic_normalize(B)
    exact = False
    if form is not None and m_bound >= form.preperiod + 2 * form.period + N:
        exact = True
    return refuted(m_bound, exact=exact)


# ---------------------------------------------------------------- replay


def _all_members(expr, lo, hi):
    return all(member(expr, n) for n in range(lo, hi + 1))


def _revalidate_thick(expr, cert: ThickCert) -> bool:
    lengths = sorted(hi - lo + 1 for lo, hi in cert.witnesses)
    if len(lengths) < cert.level or any(ln < i + 1 for i, ln in enumerate(lengths)):
        return False
    return all(_all_members(expr, lo, hi) for lo, hi in cert.witnesses)


def revalidate(expr: SetExpr, cert, *, source: SetExpr | None = None) -> bool:
    """Replay ``cert`` against :func:`member`.

    ``expr`` is the set the certificate speaks about.  For ``DtCert`` and
    ``PrCert`` it is ``S`` and ``source`` must be the set ``F`` is drawn
    from.
    """
    if isinstance(cert, Verdict):
        cert = cert.certificate
    if isinstance(cert, SyndeticCert):
        prev = 0
        for n in range(1, cert.checked_window + 1):
            if member(expr, n):
                if n - prev > cert.gap:
                    return False
                prev = n
        return prev > 0
    if isinstance(cert, ThickCert):
        return _revalidate_thick(expr, cert)
    if isinstance(cert, PsCert):
        return _revalidate_thick(shifted_union(expr, cert.shift), cert.inner)
    if isinstance(cert, IpCert):
        sums = finite_sums(cert.generators)
        return len(set(sums)) == len(sums) and all(member(expr, s) for s in sums)
    if isinstance(cert, DtCert):
        if source is not None and not all(member(source, f) for f in cert.F):
            return False
        return _revalidate_thick(minus_finite(expr, cert.F), cert.inner)
    if isinstance(cert, PrCert):
        if source is not None and not all(member(source, f) for f in cert.F):
            return False
        X = [
            n
            for n in range(1, cert.window + 1)
            if member(expr, n) and not any(member(expr, n + f) for f in cert.F)
        ]
        pts = [0] + X + [cert.window + 1]
        g = max(b - a for a, b in zip(pts, pts[1:]))
        return g == cert.gap and g > cert.threshold
    if isinstance(cert, ShiftCert):
        return revalidate(Inter((expr, ShiftDown(cert.n, expr))), cert.inner)
    if isinstance(cert, BrauerCert):
        return all(member(expr, v) for v in (cert.x, cert.y, *cert.values))
    if isinstance(cert, PrefixCert):
        lo, hi = cert.interval
        return hi == cert.M and _all_members(expr, lo, hi)
    raise TypeError(f"cannot replay {type(cert).__name__}")
