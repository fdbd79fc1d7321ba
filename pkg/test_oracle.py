#!/usr/bin/env python3
"""
Testes dos oráculos densos e do conjunto de regressão
"""

import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import Window
from shiftop import QParam
from constructions import generator_ops
from oracle import (REGRESSION_SET, OracleError, RegressionEntry, chain_safe_columns, dense_matrix,
                    evaluate_entry, run_regression, safe_columns)

Q = QParam.from_pi_fraction(0.3, 1, 8)


def test_dense_matrix_of_shift_is_truncated():
    z = generator_ops(Q)['z'].operator
    window = Window.cube(1, 2)
    matrix = dense_matrix(z, window)
    expected = np.zeros((5, 5))
    for k in range(4):
        expected[k + 1, k] = 1.0
    assert np.array_equal(matrix, expected)


def test_dense_matrix_selected_columns():
    N_hat = generator_ops(Q)['N_hat'].operator
    matrix = dense_matrix(N_hat, Window.cube(1, 2), np.array([0, 4]))
    assert matrix.shape == (5, 2)
    assert matrix[0, 0] == -2
    assert matrix[4, 1] == 2


def test_safe_columns_follow_the_chain():
    z = generator_ops(Q)['z'].operator
    window = Window.cube(1, 2)
    assert safe_columns(z, window).tolist() == [True, True, True, True, False]
    assert chain_safe_columns([z, z], window).tolist() == [True, True, True, False, False]


def test_regression_set_covers_every_kind():
    kinds = {entry.kind for entry in REGRESSION_SET}
    assert kinds == {'compose', 'adjoint', 'sum', 'embed', 'qexp'}
    assert len(REGRESSION_SET) >= 20


def test_regression_matches_engine():
    deviations = run_regression(Q, radius=2, samples=1024)
    assert set(deviations) == {entry.name for entry in REGRESSION_SET}
    assert max(deviations.values()) < 1e-10


def test_regression_name_filter():
    deviations = run_regression(Q, radius=2, samples=1024, names=['F(n)', 'X*'])
    assert set(deviations) == {'F(n)', 'X*'}


def test_unknown_entry_kind():
    with pytest.raises(OracleError):
        evaluate_entry(RegressionEntry('nada', 'bogus', lambda q: ()), Q)
