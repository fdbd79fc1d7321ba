#!/usr/bin/env python3
"""
Testes da rede ℤ^d: janelas, interior, vetores esparsos e lotes
"""

import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import (EmptyInteriorError, LatticeError, StateBatch, StateVector, Window, basis_vector,
                     inner, interior)


def test_window_points_are_lexicographic():
    w = Window((0, -1), (1, 1))
    pts = w.points()
    assert pts.tolist() == [[0, -1], [0, 0], [0, 1], [1, -1], [1, 0], [1, 1]]
    assert w.size == 6
    assert w.shape == (2, 3)


def test_window_rejects_inverted_bounds():
    with pytest.raises(LatticeError):
        Window((2,), (1,))


def test_window_contains_and_describe():
    w = Window.cube(2, 3)
    assert (3, -3) in w
    assert (4, 0) not in w
    assert (0, 0, 0) not in w
    assert w.describe() == '[-3,3]^2'
    assert basis_vector((3, -3)).support_in(w)
    assert not StateVector.from_dict({(0, 0): 1.0, (4, 0): 1.0}, 2).support_in(w)
    assert Window((0, -8), (8, 8)).describe() == '[0,8] x [-8,8]'


def test_sample_is_distinct_and_reproducible():
    w = Window.cube(3, 4)
    a = w.sample(50, np.random.default_rng(7))
    b = w.sample(50, np.random.default_rng(7))
    assert a.shape == (50, 3)
    assert np.array_equal(a, b)
    assert np.unique(a, axis=0).shape[0] == 50
    assert np.all(w.contains(a))


def test_sample_larger_than_window_returns_all_points():
    w = Window.cube(1, 2)
    assert w.sample(100, np.random.default_rng(0)).shape == (5, 1)


def test_interior_shrinks_by_margins():
    inner_w = interior(Window.cube(2, 5), [(1, 0), (0, 2)])
    assert inner_w.lo == (-4, -5)
    assert inner_w.hi == (5, 3)


def test_interior_empty_raises():
    with pytest.raises(EmptyInteriorError):
        interior(Window.cube(1, 1), [(2, 1)])


def test_state_vector_coalesces_repeated_rows():
    v = StateVector.from_arrays(np.array([[0, 1], [0, 1], [2, 2]]), np.array([1.0, 2.0, 1j]))
    assert len(v) == 2
    assert v.amplitude((0, 1)) == 3.0
    assert v.amplitude((5, 5)) == 0j


def test_state_vector_difference_and_norm():
    a = StateVector.from_dict({(0,): 1.0, (1,): 1.0}, 1)
    b = StateVector.from_dict({(0,): 1.0}, 1)
    assert (a - b).to_dict() == {(1,): 1.0}
    assert a.norm() == pytest.approx(np.sqrt(2.0))


def test_inner_conjugates_first_argument():
    a = StateVector.from_dict({(0, 0): 1j}, 2)
    b = StateVector.from_dict({(0, 0): 1.0, (1, 0): 5.0}, 2)
    assert inner(a, b) == pytest.approx(-1j)
    assert inner(basis_vector((3,)), basis_vector((4,))) == 0j


def test_batch_norms_and_leaks():
    batch = StateBatch(np.array([0, 0, 1]), np.array([[0], [9], [1]]), np.array([3.0, 4.0, 1.0]), 1)
    assert batch.norms(2).tolist() == pytest.approx([5.0, 1.0])
    assert batch.leaks(Window.cube(1, 2)).tolist() == [0]
    assert batch.vector(1).to_dict() == {(1,): 1.0}


def test_batch_difference_cancels_equal_states():
    pts = np.array([[0, 0], [1, 2]])
    a = StateBatch.from_points(pts)
    diff = a.difference(StateBatch.from_points(pts))
    assert diff.norms(2).tolist() == [0.0, 0.0]
