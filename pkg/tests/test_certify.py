import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsc.certify import (
    BrauerCert,
    DtCert,
    IpCert,
    Poly,
    PrCert,
    PrefixCert,
    PsCert,
    ShiftCert,
    Status,
    SyndeticCert,
    ThickCert,
    brauer_search,
    candidate_sets,
    compactness_prefix,
    dcs_certificate,
    ds_certificate,
    dt_check,
    finite_sums,
    ip_witness,
    max_gap,
    piecewise_syndetic,
    pr_check,
    pr_gap,
    revalidate,
    runs,
    shift_correlation,
    syndetic_gap,
    thick_to_level,
)
from lsc.constructions import prop41_F_witness, residue_thick_union
from lsc.errors import InputError
from lsc.schedules import Explicit, Geometric
from lsc.setcalc import Finite, Full, Inter, Residue, Return, Thick, Union, window
from lsc.wordspec import FIBONACCI, expand

from oracle import brute_gap, brute_members

GEOM = Thick(Geometric(10))
GEOM_SQ = Thick(Geometric(10, 1, "sq"))


# -- syndetic


def test_syndetic_examples():
    v = syndetic_gap(Residue(1, 3), 1000)
    assert v.certified and v.certificate.gap == 3 and v.certificate.exact
    assert syndetic_gap(Finite([1, 2, 3]), 100).exact_refutation
    six = syndetic_gap(Inter((Residue(0, 2), Residue(0, 3))), 1000)
    assert six.certificate.gap == brute_gap(brute_members(Inter((Residue(0, 2), Residue(0, 3))), 600)) == 6


def test_syndetic_window_tier():
    fib = syndetic_gap(Return(FIBONACCI, "a"), 10**4)
    assert fib.certified and not fib.certificate.exact and fib.certificate.gap == 2
    # gaps grow with the schedule: no honest bound on a window
    assert syndetic_gap(GEOM, 10**4).status is Status.UNKNOWN


def test_max_gap_and_runs():
    assert max_gap([]) == 1
    assert max_gap([3, 4, 9]) == 5
    assert max_gap([3, 4], N=10) == 7
    starts, lengths = runs(np.array([1, 1, 0, 1, 0, 1, 1, 1], dtype=bool))
    assert starts.tolist() == [1, 4, 6] and lengths.tolist() == [2, 1, 3]


# -- thick


def test_thick_examples():
    v = thick_to_level(Full(), 5, 100)
    assert v.certified and v.certificate.witnesses == ((1, 1), (1, 2), (1, 3), (1, 4), (1, 5))
    assert thick_to_level(Residue(0, 2), 2, 100).exact_refutation


def test_thick_geometric_witness_is_leftmost():
    v = thick_to_level(GEOM, 4, 10**5)
    assert v.certified
    assert v.certificate.witnesses[-1] == (1000, 1003)
    # oracle: enumerate schedule intervals and take the first long enough
    for ell, (lo, hi) in enumerate(v.certificate.witnesses, start=1):
        first = next((a, b) for a, b in Geometric(10).iter_intervals() if b - a + 1 >= ell)
        assert (lo, hi) == (first[0], first[0] + ell - 1)
    assert revalidate(GEOM, v)


def test_thick_unknown_below_horizon():
    assert thick_to_level(GEOM, 6, 10**4).status is Status.UNKNOWN


@given(st.integers(1, 6))
def test_thick_level_monotone(L):
    v = thick_to_level(GEOM, 6, 10**6)
    w = thick_to_level(GEOM, L, 10**6)
    assert v.certified and w.certified
    assert w.certificate.witnesses == v.certificate.witnesses[:L]


# -- piecewise syndetic


def test_ps_examples():
    v = piecewise_syndetic(Residue(0, 2), 1, 5, 100)
    assert v.certified and v.certificate.shift == 1
    assert piecewise_syndetic(Finite([7]), 10, 3, 100).exact_refutation
    w = piecewise_syndetic(Inter((Residue(0, 3), GEOM)), 3, 3, 10**5)
    assert w.certified and w.certificate.shift in (2, 3)
    assert revalidate(Inter((Residue(0, 3), GEOM)), w)


def test_ps_shift_bound_too_small_is_not_exact():
    v = piecewise_syndetic(Residue(0, 5), 2, 3, 100)
    assert v.refuted and not v.exact_refutation


# -- IP


def test_ip_examples():
    v = ip_witness(Residue(0, 2), 3, 100)
    assert v.certified and v.certificate.generators == (2, 4, 8)
    assert sorted(finite_sums((2, 4, 8))) == [2, 4, 6, 8, 10, 12, 14]
    r = ip_witness(Residue(1, 2), 2, 10**3)
    assert r.refuted and r.certificate.bound == 10**3


def test_ip_depth_monotone():
    deep = ip_witness(Residue(0, 3), 3, 1000).certificate.generators
    for d in (1, 2):
        assert revalidate(Residue(0, 3), IpCert(deep[:d]))


def test_ip_refutation_agrees_with_double_loop():
    A = Finite([1, 2, 4, 7, 11, 16, 22])
    members = set(A.elements)
    brute = any(x + y in members for x, y in itertools.combinations(sorted(members), 2))
    assert ip_witness(A, 2, 30).certified == brute


def test_ip_budget(monkeypatch):
    monkeypatch.setenv("LSC_SEARCH_BUDGET", "5")
    assert ip_witness(Residue(1, 2), 3, 2000).status is Status.UNKNOWN


# -- dynamical syndeticity


def test_ds_examples():
    v = ds_certificate(Residue(0, 2), [2, 4], 100)
    assert v.certificate.gap == 2
    assert ds_certificate(Finite([1, 2]), [1], 100).exact_refutation
    with pytest.raises(InputError):
        ds_certificate(Residue(0, 2), [3], 100)


def _fib_intersection_gap(F, base, N):
    word = expand(FIBONACCI, N + max(F) + 2)
    members = [n for n in range(1, N + 1) if all(word[n + f - base] == "a" for f in F)]
    return brute_gap(members)


def test_ds_fibonacci_matches_prefix_scan():
    B = Return(FIBONACCI, "a")
    first_two = window(B, 10).members()[:2].tolist()
    v = ds_certificate(B, first_two, 10**4)
    assert v.certified and v.certificate.gap == _fib_intersection_gap(first_two, 0, 10**4)
    shifted = Return(FIBONACCI, "a", 1)
    w = ds_certificate(shifted, [1, 3], 10**4)
    assert w.certified and w.certificate.gap <= 3
    assert w.certificate.gap == _fib_intersection_gap([1, 3], 1, 10**4)


def test_dcs_examples():
    assert dcs_certificate(Residue(0, 2), [2], 100).certificate.gap == 2
    assert dcs_certificate(Residue(1, 2), [1, 3], 100).exact_refutation
    B = Return(FIBONACCI, "ab")
    smallest = int(window(B, 10).members()[0])
    assert dcs_certificate(B, [smallest], 10**4).certified


# -- F searches


def test_candidate_order():
    got = list(candidate_sets(Full(), 3, 2))
    assert got == [(1,), (2,), (1, 2), (3,), (1, 3), (2, 3)]


def test_dt_examples():
    v = dt_check(Full(), Residue(0, 3), 10, 4, 1000)
    assert v.certified and v.certificate.F == (1, 2, 3)
    assert revalidate(Residue(0, 3), v, source=Full())
    r = dt_check(Residue(0, 2), Residue(1, 2), 30, 3, 1000)
    assert r.refuted and not r.exact_refutation


def test_dt_prop41_construction():
    H = [Geometric(4, 1), Geometric(4, 2)]
    A = residue_thick_union(2, H)
    F = prop41_F_witness(2, H, 2)
    v = dt_check(A, Residue(0, 2), max(F), 4, 10**5, candidates=[F])
    assert v.certified and revalidate(Residue(0, 2), v, source=A)
    with pytest.raises(InputError):
        dt_check(A, Residue(0, 2), 100, 4, 10**5, candidates=[(3,)])


def test_dt_parallel_matches_serial():
    S = Union((Residue(0, 7), Residue(3, 7)))
    serial = dt_check(Full(), S, 12, 4, 1000)
    for workers in (2, 5):
        assert dt_check(Full(), S, 12, 4, 1000, workers=workers) == serial


def test_pr_examples():
    v = pr_check(Full(), Residue(0, 3), 10, 1000)
    assert v.certified and v.certificate.F == (3,)
    assert v.certificate.threshold == 100 and v.certificate.gap == 1001
    assert revalidate(Residue(0, 3), v, source=Full())
    assert pr_check(Residue(1, 2), Residue(0, 2), 30, 1000).refuted
    assert pr_gap(Residue(0, 3), [3], 1000) == 1001
    assert pr_gap(Residue(0, 2), [1], 10) == 2


def test_pr_requires_syndetic_target():
    assert pr_check(Full(), GEOM, 5, 1000).status is Status.UNKNOWN


# -- shift correlation, Brauer, prefix


def test_shift_correlation_examples():
    assert shift_correlation(Residue(0, 2), 5, 3, 100).certificate.n == 2
    assert shift_correlation(Full(), 5, 3, 100).certificate.n == 1
    B = Inter((Residue(0, 3), GEOM_SQ))
    v = shift_correlation(B, 5, 3, 10**4)
    assert v.certified and v.certificate.n == 3
    assert revalidate(B, v)


def test_brauer_examples():
    assert brauer_search(Full(), [Poly((0, 0, 1))], 10).certificate == BrauerCert(1, 1, (2,))
    assert brauer_search(Residue(0, 3), [Poly((0, 1))], 100).certificate == BrauerCert(3, 3, (6,))


def test_brauer_matches_double_loop():
    A = Residue(0, 2)
    polys = [Poly((0, 1)), Poly((0, 1, 1))]
    v = brauer_search(A, polys, 200)
    brute = next(
        (x, y)
        for y in range(1, 201)
        for x in range(1, 201)
        if x % 2 == 0 and y % 2 == 0 and (x + y) % 2 == 0 and (x + y * y + y) % 2 == 0 and x + y * y + y <= 200
    )
    assert (v.certificate.x, v.certificate.y) == brute
    assert revalidate(A, v)


def test_polynomial_checks():
    Poly((0, Fraction(1, 2), Fraction(1, 2))).check()  # y(y+1)/2
    with pytest.raises(InputError):
        Poly((1, 1)).check()
    with pytest.raises(InputError):
        Poly((0, Fraction(1, 2))).check()


def test_prefix_examples():
    assert compactness_prefix(3, Full(), 100).certificate == PrefixCert(3, (1, 3))
    assert compactness_prefix(2, Residue(0, 2), 100).exact_refutation
    assert compactness_prefix(3, GEOM, 10**4).certificate.M == 102


# -- replay


def test_revalidate_rejects_forged_certificates():
    assert not revalidate(Residue(0, 3), SyndeticCert(2, 30, True))
    assert not revalidate(Residue(0, 2), ThickCert(2, ((2, 2), (2, 3))))
    assert not revalidate(Residue(1, 2), IpCert((1, 3)))
    assert not revalidate(Residue(0, 2), PsCert(0, ThickCert(1, ((1, 1),))))
    assert not revalidate(Residue(0, 3), DtCert((1, 2), ThickCert(2, ((3, 3), (3, 4)))), source=Full())
    assert not revalidate(Residue(0, 3), PrCert((3,), 5, 1, 30))
    assert not revalidate(Residue(0, 2), ShiftCert(1, PsCert(0, ThickCert(1, ((2, 2),)))))


@given(st.lists(st.integers(1, 12), min_size=1, max_size=3), st.integers(0, 11))
def test_duality_on_common_window(moduli, r):
    S = Union(tuple(Residue(r % k, k) for k in moduli))
    syn = syndetic_gap(S, 10**4)
    assert syn.certified
    g = syn.certificate.gap
    H = Thick(Explicit(((500, 500 + g),)))
    thick = thick_to_level(H, g + 1, 10**4)
    assert thick.certified
    assert window(Inter((S, H)), 10**4).bits.any()
