import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsc.errors import InputError, StructuralError
from lsc.schedules import Explicit, Geometric, Layout, Separated, Stride, layout_upto, separation_map


def take(schedule, n):
    return list(itertools.islice(schedule.iter_intervals(), n))


def test_geometric_intervals():
    assert take(Geometric(10), 4) == [(1, 1), (10, 11), (100, 102), (1000, 1003)]
    assert take(Geometric(10, 1, "sq"), 4) == [(1, 1), (10, 11), (100, 104), (1000, 1009)]
    assert take(Geometric(4, 2, "exp2"), 3) == [(2, 2), (8, 9), (32, 35)]


def test_lookup_helpers():
    g = Geometric(10)
    assert g.interval(3) == (1000, 1003)
    assert g.intervals(150) == ((1, 1), (10, 11), (100, 102))
    assert g.contains(1002) and not g.contains(1004)
    assert Explicit(((3, 4),)).interval(5) is None


@pytest.mark.parametrize(
    "spans",
    [((5, 9), (9, 12)), ((5, 9), (10, 12)), ((0, 3),), ((4, 2),)],
)
def test_explicit_rejects_bad_spans(spans):
    with pytest.raises(StructuralError):
        take(Explicit(spans), 5)


def test_explicit_allows_shrinking_lengths():
    assert take(Explicit(((1, 10), (20, 21))), 5) == [(1, 10), (20, 21)]


def test_bad_parameters():
    with pytest.raises(InputError):
        Geometric(1)
    with pytest.raises(InputError):
        Geometric(10, 1, "cubic")
    with pytest.raises(InputError):
        separation_map("log3")
    with pytest.raises(InputError):
        Separated(Layout(2, 2), 3, 1)
    with pytest.raises(InputError):
        Stride(Geometric(10), -1)


def test_separation_maps():
    assert separation_map("lin10")(3) == 30
    assert separation_map("sq2")(3) == 18
    assert separation_map("lin")(4) == 4


def test_stride_interleaves_parent():
    g = Geometric(10)
    odd, even = take(Stride(g, 1), 3), take(Stride(g, 0), 3)
    assert odd == [(10, 11), (1000, 1003), (100000, 100005)]
    assert even == [(1, 1), (100, 102), (10000, 10004)]


def test_layout_round_robin_and_growth():
    lay = Layout(2, 2, sep="lin10", start=1, ratio=2)
    placed = layout_upto(lay, 10**6)
    assert [c for c, _ in placed[:4]] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    for (_, (_, phi)), (_, (lo, _)) in zip(placed, placed[1:]):
        assert lo >= 2 * phi + 1
    cells = {c: take(Separated(lay, *c), 3) for c in lay.cells()}
    assert all(len(v) == 3 for v in cells.values())
    assert [hi - lo + 1 for lo, hi in cells[(1, 1)]] == [1, 2, 3]


@given(st.integers(2, 12), st.integers(1, 50), st.sampled_from(["lin", "sq", "exp2"]))
def test_geometric_validation_matches_brute_check(base, anchor, lengths):
    size = {"lin": lambda j: j + 1, "sq": lambda j: j * j + 1, "exp2": lambda j: 2**j}[lengths]
    raw = [(anchor * base**j, anchor * base**j + size(j) - 1) for j in range(8)]
    valid = all(a[1] + 1 < b[0] for a, b in zip(raw, raw[1:]))
    if valid:
        assert take(Geometric(base, anchor, lengths), 8) == raw
    else:
        with pytest.raises(StructuralError):
            take(Geometric(base, anchor, lengths), 8)
