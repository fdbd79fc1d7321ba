#!/usr/bin/env python3
"""
Testes da exponencial quântica F_|q| e das linhas de Fourier F_m(|q|^n)
"""

import cmath
import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import basis_vector
from shiftop import LinearForm, QParam, ShiftOperator, q_power
from qexp import (BandCutoffError, NormalityError, QExpDomainError, QExpError, band_cutoff, fourier_cache,
                  fourier_coeffs, fourier_table, grid_exponent, qexp_of_operator, qexp_value, scaled_qexp,
                  series_coeffs)

Q = QParam.from_pi_fraction(0.3, 1, 8)
SAMPLES = 1024


def _n() -> ShiftOperator:
    return ShiftOperator.monomial(Q, 2, shift=(0, 1), coeff=q_power(LinearForm.of(2, {0: 1})))


def test_grid_exponent():
    assert grid_exponent(0.3 ** 3, 0.3) == 3
    assert grid_exponent(0.3 ** -2 * 1j, 0.3) == -2
    assert grid_exponent(0j, 0.3) is None
    with pytest.raises(QExpDomainError):
        grid_exponent(0.5, 0.3)


@pytest.mark.parametrize('n', range(-3, 4))
def test_qexp_value_is_unimodular_and_conjugate_symmetric(n):
    z = 0.3 ** n * cmath.exp(0.7j)
    value = qexp_value(z, Q)
    assert abs(value) == pytest.approx(1.0, abs=1e-12)
    assert value * qexp_value(z.conjugate(), Q) == pytest.approx(1.0, abs=1e-12)
    assert qexp_value(z.conjugate(), Q) == pytest.approx(value.conjugate(), abs=1e-12)


def test_qexp_value_special_points():
    assert qexp_value(0j, Q) == 1
    for k in range(3):
        assert qexp_value(-(0.3 ** (-2 * k)), Q) == -1


def test_qexp_functional_equation():
    z = 0.3 * cmath.exp(0.7j)
    lhs = qexp_value(0.3 ** 2 * z, Q)
    rhs = qexp_value(z, Q) * (1 + z) / (1 + z.conjugate())
    assert abs(lhs - rhs) < 1e-12


def test_fourier_coeffs_requires_enough_samples():
    with pytest.raises(QExpError):
        fourier_coeffs(0, 100, 64, Q)


def test_fourier_row_is_zero_outside_band():
    row = fourier_coeffs(1, 10, SAMPLES, Q)
    assert row.coeff(11) == 0.0
    assert row.coeff(-11) == 0.0
    assert row.imag_residue < 1e-10


def test_fourier_table_symmetry_parseval_reconstruction():
    table = fourier_table(-3, 3, 40, Q, SAMPLES)
    assert table.symmetry_deviation(8) < 1e-9
    assert table.parseval_deviation() < 1e-9
    assert table.reconstruction_deviation(16) < 1e-9
    frame = table.to_frame()
    assert list(frame.columns) == ['n', 'm', 'F']
    assert len(frame) == 7 * 81


def test_fourier_table_rows_in_parallel_match_serial():
    serial = fourier_table(-1, 1, 10, Q, SAMPLES)
    parallel = fourier_table(-1, 1, 10, Q, SAMPLES, workers=3)
    assert np.allclose(serial.values, parallel.values)


def test_band_cutoff_bounds_tail():
    M = band_cutoff(-2, 2, 1e-10, Q, SAMPLES)
    assert 0 < M < fourier_cache(Q.modulus, SAMPLES).band
    cache = fourier_cache(Q.modulus, SAMPLES)
    for n in range(-2, 3):
        row = cache.row(n)
        assert all(abs(row.coeff(m)) < 1e-10 for m in range(M, cache.band + 1))
        assert all(abs(row.coeff(-m)) < 1e-10 for m in range(M, cache.band + 1))


def test_band_cutoff_cap():
    with pytest.raises(BandCutoffError):
        band_cutoff(-2, 2, 1e-10, Q, SAMPLES, cap=1)


@pytest.mark.parametrize('n', [-3, -1, 0, 1, 2, 4])
def test_series_coeffs_satisfy_functional_equation(n):
    # F(x^{n+2}w)(1 + x^n/w) = F(x^n w)(1 + x^n w), coeficiente a coeficiente
    x = 0.3
    m = np.arange(-15, 16)
    upper, upper_w = series_coeffs(n + 2, np.concatenate((m, m + 1)), x)
    lower, lower_w = series_coeffs(n, np.concatenate((m, m - 1)), x)
    k = m.size
    gap = upper[:k] + x ** n * upper[k:] - lower[:k] - x ** n * lower[k:]
    scale = upper_w[:k] + x ** n * upper_w[k:] + lower_w[:k] + x ** n * lower_w[k:]
    assert np.all(np.abs(gap) <= 1e-11 * scale)


def test_series_coeffs_keep_relative_accuracy_far_out():
    values, weight = series_coeffs(2, np.array([-12]), 0.3)
    assert 0 < abs(values[0]) < 1e-60
    assert weight[0] == pytest.approx(abs(values[0]), rel=1e-6)
    row = fourier_coeffs(2, 40, SAMPLES, Q)
    assert row.coeff(-12) == pytest.approx(values[0], rel=1e-10)


@pytest.mark.parametrize('n', [-2, 1, 3])
def test_series_coeffs_reconstruct_qexp(n):
    m = np.arange(-60, 61)
    values, _ = series_coeffs(n, m, Q.modulus)
    for phi in (0.3, 1.7, -2.9):
        w = cmath.exp(1j * phi)
        total = sum(v * w ** k for v, k in zip(values, m))
        assert abs(total - qexp_value(Q.modulus ** n * w, Q)) < 1e-12


def test_band_cutoff_weights_tail_by_window_growth():
    plain = band_cutoff(-2, 2, 1e-10, Q, SAMPLES)
    bound = Q.modulus ** -7
    weighted = band_cutoff(-2, 2, 1e-10, Q, SAMPLES, coeff_bound=bound)
    assert weighted >= plain
    cache = fourier_cache(Q.modulus, SAMPLES)
    for n in range(-2, 3):
        row = cache.row(n)
        assert all(abs(row.coeff(m)) * bound < 1e-10 for m in range(weighted, cache.band + 1))
        assert all(abs(row.coeff(-m)) * bound < 1e-10 for m in range(weighted, cache.band + 1))
    with pytest.raises(QExpError):
        band_cutoff(-2, 2, 1e-10, Q, SAMPLES, coeff_bound=0.5)


def test_qexp_of_n_matches_fourier_coefficients():
    M = band_cutoff(0, 2, 1e-12, Q, SAMPLES)
    banded = qexp_of_operator(_n(), M, SAMPLES)
    assert banded.term_count == 2 * M + 1
    out = banded.operator.apply(basis_vector((1, 0)))
    row = fourier_cache(Q.modulus, SAMPLES).row(1)
    for m in (-2, 0, 3):
        assert out.amplitude((1, m)) == pytest.approx(row.coeff(m) * cmath.exp(1j * m * Q.angle), abs=1e-14)


def test_qexp_of_n_is_unitary_on_probe():
    M = band_cutoff(0, 2, 1e-12, Q, SAMPLES)
    F = qexp_of_operator(_n(), M, SAMPLES).operator
    x = basis_vector((1, 0))
    back = F.apply(F.H.apply(x, 1e-16), 1e-16)
    assert (back - x).norm() < 1e-8


def test_scaled_qexp_zero_is_identity():
    op = scaled_qexp(_n(), 0j, 5, SAMPLES)
    assert op.apply(basis_vector((2, 2))).to_dict() == {(2, 2): 1.0}


def test_qexp_requires_monomial():
    with pytest.raises(NormalityError):
        qexp_of_operator(_n() + _n(), 3, SAMPLES)
