#!/usr/bin/env python3
"""
Testes do catálogo de operadores: geradores, X, Y, Δ, SU_q(2), τ e mapas escalares
"""

import cmath
import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import StateBatch, Window, basis_vector
from shiftop import QParam
from qexp import QExpDomainError, band_cutoff
from constructions import (coassociativity_sides, comult_ops, comult_word, contraction_ops, expand_slot,
                           generator_ops, operator_catalog, self_test_catalog, suq2_generators, tau,
                           x_ops)

Q = QParam.from_pi_fraction(0.3, 1, 8)
SAMPLES = 1024


def test_x_on_origin():
    X = x_ops(Q)['X'].operator
    out = X.apply(basis_vector((0, 0, 0, 0)))
    assert out.to_dict().keys() == {(-1, -1, -1, 1)}
    assert out.amplitude((-1, -1, -1, 1)) == pytest.approx(Q.q)


def test_y_shifts_third_coordinate():
    Y = x_ops(Q)['Y'].operator
    assert Y.apply(basis_vector((2, -1, 0, 4))).to_dict() == {(2, -1, 1, 4): 1.0}


def test_delta_n_on_origin():
    delta_n = comult_ops(Q)['delta_n'].operator
    out = delta_n.apply(basis_vector((0, 0, 0, 0)))
    assert set(out.to_dict()) == {(0, 1, 1, 0), (-1, 0, 0, 1)}
    assert out.amplitude((0, 1, 1, 0)) == pytest.approx(1.0)
    assert out.amplitude((-1, 0, 0, 1)) == pytest.approx(1.0)


def test_gamma_and_alpha_action():
    su = suq2_generators(Q)
    out = su['gamma'].apply(basis_vector((2, 0)))
    assert out.amplitude((2, -1)) == pytest.approx(Q.qbar ** 2)
    assert len(su['gamma'].apply(basis_vector((-1, 0)))) == 0
    out = su['alpha'].apply(basis_vector((3, 1)))
    assert out.amplitude((2, 1)) == pytest.approx(np.sqrt(1 - Q.modulus ** 6))


def test_tau_conjugates_by_v():
    n = generator_ops(Q)['n'].operator
    out = tau(n, 1, (1,)).apply(basis_vector((0, 0)))
    assert out.amplitude((0, 1)) == pytest.approx(Q.q)
    back = tau(tau(n, 2, (1,)), -2, (1,))
    x = basis_vector((1, -3))
    assert (back.apply(x) - n.apply(x)).norm() < 1e-15


def test_comult_words_expand_to_three_terms():
    words = comult_word('n')
    assert len(words) == 2
    assert len(expand_slot(words, 1)) == 3
    assert len(expand_slot(words, 2)) == 3


def test_coassociativity_on_probes():
    lhs, rhs, closed = coassociativity_sides(Q, 'n')
    points = Window.cube(6, 2).sample(40, np.random.default_rng(3))
    batch = StateBatch.from_points(points)
    for other in (rhs, closed):
        diff = lhs.apply_batch(batch).difference(other.apply_batch(batch))
        assert diff.norms(len(points)).max() < 1e-12


def test_scalar_maps():
    maps = contraction_ops(Q)
    lam = Q.modulus ** 2 * cmath.exp(0.4j)
    assert maps['g_minus_theta'](maps['g_theta'](lam)) == pytest.approx(lam)
    assert maps['g_theta'](Q.q * lam) == pytest.approx(Q.modulus * maps['g_theta'](lam))
    assert maps['f_gamma'](Q.q) == pytest.approx(Q.qbar)
    assert maps['f_alpha'](1 / Q.q) == 0.0
    with pytest.raises(QExpDomainError):
        maps['g_theta'](0.5)


def test_catalog_self_test():
    M = band_cutoff(-8, 8, 1e-10, Q, SAMPLES)
    catalog = operator_catalog(Q, M, SAMPLES)
    assert {'v', 'n', 'X', 'Y', 'F', 'Psi', 'delta_n', 'W_boson', 'alpha', 'V_hat'} <= set(catalog)
    assert catalog['F'].banded
    assert not catalog['X'].banded
    deviations = self_test_catalog(catalog, np.random.default_rng(11), count=30)
    assert max(deviations.values()) < 1e-12
