import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from math import comb

from ringtc.fock import (
    ModeWindow,
    enumerate_sector,
    reachable_k_range,
    sector_dimension,
    sector_span_after_annihilation,
)
from oracles import composition_count


def test_two_particle_k0_window_1():
    basis = enumerate_sector(2, 0, ModeWindow(-1, 1))
    assert basis.states == [(0, 2, 0), (1, 0, 1)]
    assert basis.dim == 2


def test_three_particle_k3():
    basis = enumerate_sector(3, 3, ModeWindow(0, 2))
    assert basis.states == [(0, 3, 0), (1, 1, 1)]


def test_large_sector_dimension_matches_oracle():
    w = ModeWindow(-2, 4)
    dim = enumerate_sector(50, 50, w).dim
    assert dim == composition_count(50, 50, -2, 4)
    assert sector_dimension(50, 50, w) == dim


@pytest.mark.parametrize("n,window", [(4, ModeWindow(-1, 2)), (6, ModeWindow(-2, 2))])
def test_total_dimension_sums_to_unconstrained(n, window):
    lo, hi = reachable_k_range(n, window)
    total = sum(sector_dimension(n, k, window) for k in range(lo, hi + 1))
    assert total == comb(n + window.size - 1, window.size - 1)


def test_every_state_satisfies_constraints():
    w = ModeWindow(-2, 4)
    basis = enumerate_sector(7, 9, w)
    occ = basis.occupations
    assert (occ.sum(axis=1) == 7).all()
    assert (occ @ w.modes == 9).all()
    assert (occ >= 0).all()


def test_deterministic_and_lexicographic():
    w = ModeWindow(-2, 3)
    a = enumerate_sector(5, 2, w)
    b = enumerate_sector(5, 2, w)
    assert a is b  # memoized
    rows = [tuple(r) for r in a.occupations]
    assert rows == sorted(rows)


def test_index_is_inverse_of_ordering():
    basis = enumerate_sector(5, 3, ModeWindow(-2, 4))
    for i, state in enumerate(basis.states):
        assert basis.index[state] == i
        assert basis.index_of(state) == i


def test_lookup_rows_batch():
    basis = enumerate_sector(6, 4, ModeWindow(-2, 4))
    rows = basis.occupations[::3]
    assert (basis.lookup_rows(rows) == np.arange(basis.dim)[::3]).all()
    missing = rows.copy()
    missing[0, 0] += 1  # violates the particle-number constraint
    assert basis.lookup_rows(missing)[0] == -1


def test_empty_sector_vs_invalid_window():
    empty = enumerate_sector(3, 100, ModeWindow(-2, 4))
    assert empty.dim == 0
    with pytest.raises(ValueError):
        ModeWindow(2, -2)


def test_annihilation_span():
    assert sector_span_after_annihilation(50, ModeWindow(-2, 4)) == list(range(46, 53))
    assert sector_span_after_annihilation(0, ModeWindow(0, 0)) == [0]
    assert sector_span_after_annihilation(2, ModeWindow(-1, 1)) == [1, 2, 3]


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=0, max_value=8),
    l_min=st.integers(min_value=-4, max_value=0),
    width=st.integers(min_value=0, max_value=5),
    k_off=st.integers(min_value=-3, max_value=3),
)
def test_enumeration_properties(n, l_min, width, k_off):
    window = ModeWindow(l_min, l_min + width)
    k = n * l_min + k_off
    dim = sector_dimension(n, k, window)
    assert dim == composition_count(n, k, l_min, l_min + width)
    basis = enumerate_sector(n, k, window)
    assert basis.dim == dim
    if dim:
        occ = basis.occupations
        assert (occ.sum(axis=1) == n).all()
        assert (occ @ window.modes == k).all()
        rows = [tuple(r) for r in occ]
        assert len(set(rows)) == dim  # no duplicates
        assert rows == sorted(rows)
