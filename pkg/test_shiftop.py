#!/usr/bin/env python3
"""
Testes da álgebra de operadores monomiais: ação, composição, adjunto e pernas
"""

import cmath
import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import StateVector, Window, basis_vector
from shiftop import (FactorDomainError, LegMapError, LinearForm, NonUnimodularError, OperatorProduct, QParam,
                     QParamError, QuadraticForm, ShiftOperator, eval_coeff, embed_legs, function_factor,
                     modulus_power, q_power, registered_factors, sign_power, tensor, zeta_power)

Q = QParam.from_pi_fraction(0.3, 1, 8)


def _n(q: QParam = Q) -> ShiftOperator:
    return ShiftOperator.monomial(q, 2, shift=(0, 1), coeff=q_power(LinearForm.of(2, {0: 1})))


def _v(q: QParam = Q) -> ShiftOperator:
    return ShiftOperator.monomial(q, 2, shift=(-1, 0))


def test_qparam_validates_modulus():
    with pytest.raises(QParamError):
        QParam(1.0, 0.0)
    with pytest.raises(QParamError):
        QParam(float('nan'), 0.0)
    q = QParam.from_complex(0.3j)
    assert q.modulus == pytest.approx(0.3)
    assert q.zeta == pytest.approx(-1.0)


def test_monomial_action_on_basis_vector():
    out = _n().apply(basis_vector((2, 0)))
    assert out.to_dict().keys() == {(2, 1)}
    assert out.amplitude((2, 1)) == pytest.approx(Q.q ** 2)


def test_negative_exponents_are_exact():
    out = _n().apply(basis_vector((-3, 5)))
    assert out.amplitude((-3, 6)) == pytest.approx(Q.q ** -3, rel=1e-13)


def test_compose_matches_sequential_application():
    v, n = _v(), _n()
    x = StateVector.from_dict({(1, 0): 1.0, (0, 2): 0.5j}, 2)
    direct = (v @ n).apply(x)
    sequential = v.apply(n.apply(x))
    assert (direct - sequential).norm() < 1e-15


def test_commutation_vnv_star():
    v, n = _v(), _n()
    lhs = v @ n @ v.H
    x = basis_vector((4, -1))
    assert (lhs.apply(x) - (n * Q.q).apply(x)).norm() < 1e-15


def test_adjoint_is_inverse_shift_with_conjugate_coefficient():
    n = _n()
    out = (n.H @ n).apply(basis_vector((2, 3)))
    assert out.amplitude((2, 3)) == pytest.approx(Q.modulus ** 4)


def test_shear_matrix_and_unimodularity():
    W = ShiftOperator.monomial(Q, 2, matrix=((1, 0), (1, 1)))
    assert W.apply(basis_vector((3, 1))).to_dict() == {(3, 4): 1.0}
    assert W.H.apply(basis_vector((3, 4))).to_dict() == {(3, 1): 1.0}
    with pytest.raises(NonUnimodularError):
        ShiftOperator.monomial(Q, 2, matrix=((2, 0), (0, 1)))


def test_zeta_power_quadratic_phase():
    Z = ShiftOperator.monomial(Q, 4, coeff=zeta_power(QuadraticForm.of(4, {(1, 3): -1})))
    out = Z.apply(basis_vector((0, 2, 0, 3)))
    assert out.amplitude((0, 2, 0, 3)) == pytest.approx(cmath.exp(-2j * Q.angle * 6))


def test_modulus_power_and_eval_coeff():
    c = modulus_power(LinearForm.of(2, {1: 1}))
    assert eval_coeff(c, (0, -2), Q) == pytest.approx(Q.modulus ** -2)


def test_embed_legs_places_operator():
    v = _v()
    v2 = embed_legs(v, (3, 4), 4)
    assert v2.apply(basis_vector((0, 0, 1, 1))).to_dict() == {(0, 0, 0, 1): 1.0}
    with pytest.raises(LegMapError):
        embed_legs(v, (1, 1), 4)
    with pytest.raises(LegMapError):
        embed_legs(v, (4, 5), 4)


def test_tensor_of_v_and_n():
    out = tensor(_v(), _n()).apply(basis_vector((0, 0, 2, 0)))
    assert out.amplitude((-1, 0, 2, 1)) == pytest.approx(Q.q ** 2)


def test_sum_and_scale_coalesce():
    one = ShiftOperator.identity(1, Q)
    op = one + one * 2.0 - one
    assert op.apply(basis_vector((7,))).amplitude((7,)) == pytest.approx(2.0)
    zero = ShiftOperator(1, (), Q)
    assert len(zero.apply(basis_vector((0,)))) == 0


def test_indicator_masks_sqrt_domain():
    i_form = LinearForm.of(2, {0: 1})
    ind = function_factor('indicator_ge0', [i_form])
    alpha = ShiftOperator.monomial(Q, 2, shift=(-1, 0), coeff=ind.times(function_factor('sqrt1m', [i_form])))
    assert len(alpha.apply(basis_vector((-2, 0)))) == 0
    out = alpha.apply(basis_vector((1, 0)))
    assert out.amplitude((0, 0)) == pytest.approx(np.sqrt(1 - Q.modulus ** 2))
    bare = ShiftOperator.monomial(Q, 2, coeff=function_factor('sqrt1m', [i_form]))
    with pytest.raises(FactorDomainError):
        bare.apply(basis_vector((-1, 0)))


def test_margin_bounds_displacement():
    W = ShiftOperator.monomial(Q, 2, matrix=((1, 0), (1, 1)))
    m = W.margin(Window.cube(2, 3))
    assert m.tolist() == [[0, 0], [3, 3]]


def test_product_expands_to_composition():
    v, n = _v(), _n()
    prod = OperatorProduct((v, n, v.H))
    x = StateVector.from_dict({(1, 0): 1.0, (-2, 3): 0.5j}, 2)
    assert (prod.apply(x) - prod.expand().apply(x)).norm() < 1e-15
    assert (prod.H.apply(x) - (v @ n.H @ v.H).apply(x)).norm() < 1e-15


def test_sign_power_alternates():
    op = ShiftOperator.monomial(Q, 1, coeff=sign_power(LinearForm.of(1, {0: 1})))
    assert op.apply(basis_vector((3,))).amplitude((3,)) == -1.0
    assert op.apply(basis_vector((-2,))).amplitude((-2,)) == 1.0


def test_registered_factors():
    assert {'sqrt1m', 'qpoch', 'indicator_ge0', 'linear'} <= set(registered_factors())
