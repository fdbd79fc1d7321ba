"""
Catálogo de operadores do E_q(2) trançado sobre ℓ²(ℤ)^{⊗d}.

Espaços e coordenadas (base 0 nos comentários de fórmulas, pernas base 1 em embed_legs):

    L = ℓ²(ℤ)⊗ℓ²(ℤ), índice (i, j)     v e_{i,j} = e_{i−1,j},  n e_{i,j} = q^i e_{i,j+1}
    H = ℓ²(ℤ),         índice p          z e_p = e_{p+1},        N̂ e_p = p e_p

Cada NamedOperator guarda a assinatura de pernas, a fórmula de referência e,
quando o operador não tem banda, uma função que devolve a ação na base usada
no autoteste.
"""

import cmath
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_SAMPLES
from lattice import StateBatch, Window
from shiftop import (LinearForm, Operator, OperatorProduct, QParam, QuadraticForm,
                     ShiftOperator, embed_legs, function_factor, modulus_power, phase_power,
                     q_power, qbar_power, zeta_power)
from qexp import grid_exponent, scaled_qexp

Reference = Callable[[Tuple[int, ...]], Dict[Tuple[int, ...], complex]]

SHEAR = ((1, 0), (1, 1))


class SelfTestError(Exception):
    """A ação de um operador do catálogo diverge da fórmula documentada."""


@dataclass(frozen=True)
class NamedOperator:
    """
    Operador do catálogo.

    Args:
        name: Nome curto (usado por list-ops e pelas verificações)
        legs: Assinatura de pernas, ex. ('L', 'L') ou ('H', 'L', 'H', 'L')
        operator: ShiftOperator ou OperatorProduct
        formula: Ação na base, como escrita na construção
        reference: x -> {alvo: coeficiente}; None para operadores com banda
    """

    name: str
    legs: Tuple[str, ...]
    operator: Operator
    formula: str
    reference: Optional[Reference] = None

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def banded(self) -> bool:
        factors = self.operator.factors if isinstance(self.operator, OperatorProduct) else (self.operator,)
        return any(t.coeff.has_band_factor() for f in factors for t in f.terms)

    def self_test(self, rng: np.random.Generator, count: int = 100, radius: int = 6,
                  tol: float = 1e-12) -> float:
        """
        Compara a ação em `count` índices aleatórios com a referência.

        Returns:
            Maior desvio encontrado (0.0 quando não há referência)

        Raises:
            SelfTestError: se o desvio passa de tol
        """
        if self.reference is None:
            return 0.0
        points = Window.cube(self.dim, radius).sample(count, rng)
        actual = self.operator.apply_batch(StateBatch.from_points(points))
        tags, coords, amps = [], [], []
        for tag, x in enumerate(points):
            for target, value in self.reference(tuple(int(c) for c in x)).items():
                tags.append(tag)
                coords.append(target)
                amps.append(value)
        expected = StateBatch(np.array(tags, dtype=np.int64),
                              np.array(coords, dtype=np.int64).reshape(-1, self.dim),
                              np.array(amps, dtype=complex), self.dim)
        scale = np.maximum(expected.coalesced(prune=0.0).norms(len(points)), 1.0)
        worst = float((actual.difference(expected).norms(len(points)) / scale).max(initial=0.0))
        if worst > tol:
            raise SelfTestError(f"{self.name}: desvio {worst:.3g} da fórmula '{self.formula}'")
        return worst

    def describe(self) -> str:
        kind = 'banda' if self.banded else 'exato'
        return f"{self.name:<14} {'⊗'.join(self.legs):<10} d={self.dim:<2} {kind:<6} {self.formula}"


@dataclass(frozen=True)
class ScalarMap:
    """Função ℂ̄^|q| → ℂ com validação do domínio."""

    name: str
    func: Callable[[complex], complex]
    modulus: float
    formula: str

    def __call__(self, lam: complex) -> complex:
        grid_exponent(lam, self.modulus)
        return complex(self.func(complex(lam)))


def _qp(q: QParam, e: int) -> complex:
    return q.modulus ** e * cmath.exp(1j * q.angle * e)


def _zp(q: QParam, e: int) -> complex:
    return cmath.exp(2j * q.angle * e)


def _form(dim: int, terms: Optional[Dict[int, int]] = None, const: int = 0) -> LinearForm:
    return LinearForm.of(dim, terms, const)


def _shift_op(q: QParam, dim: int, shift=None, coeff=None, matrix=None) -> ShiftOperator:
    return ShiftOperator.monomial(q, dim, matrix, shift, coeff)


def on_L_legs(op: Operator, slots: Sequence[int], count: int) -> Operator:
    """Coloca op (definido em len(slots) cópias de L) nas pernas L `slots` de L^{⊗count}."""
    legs = [c for s in slots for c in (2 * s - 1, 2 * s)]
    return embed_legs(op, legs, 2 * count)


def _named(name, legs, op, formula, reference=None) -> NamedOperator:
    return NamedOperator(name, tuple(legs), op, formula, reference)


# --- geradores -------------------------------------------------------------

def generator_ops(q: QParam) -> Dict[str, NamedOperator]:
    """Geradores de E_q(2) em L, de C(𝕋) em H e as peças W, U, U_β."""
    i_form = _form(2, {0: 1})
    v = _shift_op(q, 2, (-1, 0))
    n = _shift_op(q, 2, (0, 1), q_power(i_form))
    n_inv = _shift_op(q, 2, (0, -1), q_power(-i_form))
    abs_n = _shift_op(q, 2, coeff=modulus_power(i_form))
    P = _shift_op(q, 2, coeff=zeta_power(_form(2, {1: -1})))
    Q_L = _shift_op(q, 2, coeff=modulus_power(_form(2, {1: 1})))
    z = _shift_op(q, 1, (1,))
    N_hat = _shift_op(q, 1, coeff=function_factor('linear', [_form(1, {0: 1})]))
    P_prime = _shift_op(q, 1, coeff=zeta_power(_form(1, {0: -1})))
    W = _shift_op(q, 2, matrix=SHEAR)
    U = _shift_op(q, 3, matrix=((1, 0, 0), (0, 1, 0), (0, 1, 1)))
    U_beta = _shift_op(q, 3, coeff=zeta_power(QuadraticForm.of(3, {(2, 1): -1})))
    return {
        'v': _named('v', 'L', v, 'e_{i,j} ↦ e_{i−1,j}', lambda x: {(x[0] - 1, x[1]): 1.0}),
        'n': _named('n', 'L', n, 'e_{i,j} ↦ q^i e_{i,j+1}',
                    lambda x: {(x[0], x[1] + 1): _qp(q, x[0])}),
        'n_inv': _named('n_inv', 'L', n_inv, 'e_{i,j} ↦ q^{−i} e_{i,j−1}',
                        lambda x: {(x[0], x[1] - 1): _qp(q, -x[0])}),
        'abs_n': _named('abs_n', 'L', abs_n, 'e_{i,j} ↦ |q|^i e_{i,j}',
                        lambda x: {x: q.modulus ** x[0]}),
        'P': _named('P', 'L', P, 'e_{i,j} ↦ ζ^{−j} e_{i,j}', lambda x: {x: _zp(q, -x[1])}),
        'Q_L': _named('Q_L', 'L', Q_L, 'e_{i,j} ↦ |q|^j e_{i,j}', lambda x: {x: q.modulus ** x[1]}),
        'z': _named('z', 'H', z, 'e_p ↦ e_{p+1}', lambda x: {(x[0] + 1,): 1.0}),
        'N_hat': _named('N_hat', 'H', N_hat, 'e_p ↦ p e_p', lambda x: {x: float(x[0])}),
        'P_prime': _named('P_prime', 'H', P_prime, "P' = Ṽ: e_p ↦ ζ^{−p} e_p",
                          lambda x: {x: _zp(q, -x[0])}),
        'W': _named('W', 'HH', W, 'e_k⊗e_l ↦ e_k⊗e_{l+k}', lambda x: {(x[0], x[1] + x[0]): 1.0}),
        'U': _named('U', 'LH', U, 'e_{i,j}⊗e_p ↦ e_{i,j}⊗e_{p+j}',
                    lambda x: {(x[0], x[1], x[2] + x[1]): 1.0}),
        'U_beta': _named('U_beta', 'LH', U_beta, 'e_{k,l}⊗e_p ↦ ζ^{−pl} e_{k,l}⊗e_p',
                         lambda x: {x: _zp(q, -x[2] * x[1])}),
    }


def braiding_ops(q: QParam) -> Dict[str, NamedOperator]:
    """Z, a troca Σ, a trança Ψ = Σ∘Z e Z̃ em L⊗L (índice (i, j, k, l))."""
    Z = _shift_op(q, 4, coeff=zeta_power(QuadraticForm.of(4, {(1, 3): -1})))
    Sigma = _shift_op(q, 4, matrix=((0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0)))
    Z_tilde = _shift_op(q, 4, coeff=zeta_power(QuadraticForm.of(4, {(1, 3): 1})))
    return {
        'Z': _named('Z', 'LL', Z, 'e_{i,j}⊗e_{k,l} ↦ ζ^{−jl} e_{i,j}⊗e_{k,l}',
                    lambda x: {x: _zp(q, -x[1] * x[3])}),
        'Sigma': _named('Sigma', 'LL', Sigma, 'e_{i,j}⊗e_{k,l} ↦ e_{k,l}⊗e_{i,j}',
                        lambda x: {(x[2], x[3], x[0], x[1]): 1.0}),
        'Psi': _named('Psi', 'LL', Sigma @ Z, 'e_{i,j}⊗e_{k,l} ↦ ζ^{−jl} e_{k,l}⊗e_{i,j}',
                      lambda x: {(x[2], x[3], x[0], x[1]): _zp(q, -x[1] * x[3])}),
        'Z_tilde': _named('Z_tilde', ('L*', 'L'), Z_tilde, 'ē_{i,j}⊗e_{k,l} ↦ ζ^{jl} ē_{i,j}⊗e_{k,l}',
                          lambda x: {x: _zp(q, x[1] * x[3])}),
    }


# --- X, Y e a exponencial quântica ----------------------------------------------

def _factor_ops(q: QParam):
    g = generator_ops(q)
    return (g['v'].operator, g['n'].operator, g['n_inv'].operator, g['P'].operator,
            g['P_prime'].operator, g['W'].operator)


def x_operator(q: QParam) -> ShiftOperator:
    """X = n⁻¹vP ⊗ vn, um único monômio normal."""
    v, n, n_inv, P, _, _ = _factor_ops(q)
    return embed_legs(n_inv @ v @ P, (1, 2), 4) @ embed_legs(v @ n, (3, 4), 4)


def x_tilde_operator(q: QParam) -> ShiftOperator:
    """X̃ ē_{i,j}⊗e_{k,l} = −|q|^{k−i+1}Ph(q)^{k−i} ē_{i+1,j+1}⊗e_{k+1,l+1}."""
    diff = _form(4, {2: 1, 0: -1})
    coeff = modulus_power(diff.shifted(1)).times(phase_power(diff)).scaled(-1.0)
    return _shift_op(q, 4, (1, 1, 1, 1), coeff)


def y_operator(q: QParam) -> ShiftOperator:
    """Y = W₁₃W₂₃ sobre as coordenadas (i, j, k, l)."""
    W = _factor_ops(q)[5]
    return embed_legs(W, (1, 3), 4) @ embed_legs(W, (2, 3), 4)


def x_ops(q: QParam) -> Dict[str, NamedOperator]:
    def x_ref(x):
        i, j, k, l = x
        return {(i - 1, j - 1, k - 1, l + 1): _zp(q, -j) * _qp(q, k - i + 1)}

    def x_tilde_ref(x):
        i, j, k, l = x
        value = -(q.modulus ** (k - i + 1)) * cmath.exp(1j * q.angle * (k - i))
        return {(i + 1, j + 1, k + 1, l + 1): value}

    def y_ref(x):
        i, j, k, l = x
        return {(i, j, k + i + j, l): 1.0}

    return {
        'X': _named('X', 'LL', x_operator(q), 'n⁻¹vP⊗vn: ζ^{−j}q^{k−i+1} e_{i−1,j−1}⊗e_{k−1,l+1}', x_ref),
        'X_tilde': _named('X_tilde', ('L*', 'L'), x_tilde_operator(q),
                          '−|q|^{k−i+1}Ph(q)^{k−i} ē_{i+1,j+1}⊗e_{k+1,l+1}', x_tilde_ref),
        'Y': _named('Y', 'LL', y_operator(q), 'e_{i,j}⊗e_{k,l} ↦ e_{i,j}⊗e_{k+i+j,l}', y_ref),
        'Y_tilde': _named('Y_tilde', ('L*', 'L'), y_operator(q), 'ē_{i,j}⊗e_{k,l} ↦ ē_{i,j}⊗e_{k+i+j,l}', y_ref),
    }


def t_operator(q: QParam, lam: complex, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """T(λ) = F_q(λX)."""
    return scaled_qexp(x_operator(q), lam, M, samples)


def f_lambda(q: QParam, lam: complex, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """𝔽^λ = F_q(λX)·Y; λ = 1 dá 𝔽 e λ = 0 dá Y."""
    return t_operator(q, lam, M, samples) @ y_operator(q)


def _six_leg_normal(q: QParam, middle: ShiftOperator) -> ShiftOperator:
    v, n, n_inv, P, _, _ = _factor_ops(q)
    return (embed_legs(n_inv @ v @ P, (1, 2), 6) @ embed_legs(middle, (3, 4), 6)
            @ embed_legs(v @ n, (5, 6), 6))


def t_prime_operator(q: QParam, lam: complex, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """T′(λ) = F_q(λ·n⁻¹vP⊗P⊗vn)·Y₁₃ em L^{⊗3}."""
    P = _factor_ops(q)[3]
    rotated = scaled_qexp(_six_leg_normal(q, P), lam, M, samples)
    return rotated @ on_L_legs(y_operator(q), (1, 3), 3)


def lemma_operator(q: QParam, lam: complex, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """F_q(λ·n⁻¹vP⊗v²P⊗vn) em L^{⊗3}."""
    v, _, _, P, _, _ = _factor_ops(q)
    return scaled_qexp(_six_leg_normal(q, v @ v @ P), lam, M, samples)


def f_tilde_operator(q: QParam, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """𝔽̃ = F_q(X̃)*·Z̃²·Ỹ."""
    Z_tilde = braiding_ops(q)['Z_tilde'].operator
    return scaled_qexp(x_tilde_operator(q), 1.0, M, samples).adjoint() @ Z_tilde @ Z_tilde @ y_operator(q)


def f_ops(q: QParam, M: int, samples: int = DEFAULT_SAMPLES) -> Dict[str, NamedOperator]:
    return {
        'F': _named('F', 'LL', f_lambda(q, 1.0, M, samples), 'F_q(X)·Y'),
        'F_tilde': _named('F_tilde', ('L*', 'L'), f_tilde_operator(q, M, samples), 'F_q(X̃)*·Z̃²·Ỹ'),
        'T_prime': _named('T_prime', 'LLL', t_prime_operator(q, q.q, M, samples),
                          "F_q(q·n⁻¹vP⊗P⊗vn)·Y₁₃"),
    }


# --- comultiplicação ----------------------------------------------------------

GENERATOR_WORDS = ('v', 'v*', 'n', 'n*')

COMULT_RULES: Dict[str, Tuple[Tuple[str, str], ...]] = {
    'v': (('v', 'v'),),
    'v*': (('v*', 'v*'),),
    'n': (('n', 'v*'), ('v', 'n')),
}

Word = Tuple[Tuple[str, int], ...]


def embedded_generator(q: QParam, gen: str, slot: int, count: int) -> ShiftOperator:
    """
    J_slot(gen) em L^{⊗count}: n recebe P nas pernas anteriores, v não.

    Args:
        gen: 'v', 'v*', 'n' ou 'n*'
        slot: Perna L (base 1)
        count: Número de pernas L
    """
    if gen not in GENERATOR_WORDS:
        raise KeyError(f"Gerador desconhecido: {gen}")
    v, n, _, P, _, _ = _factor_ops(q)
    base = gen.rstrip('*')
    op = on_L_legs(v if base == 'v' else n, (slot,), count)
    if base == 'n':
        for k in range(1, slot):
            op = on_L_legs(P, (k,), count) @ op
    return op.adjoint() if gen.endswith('*') else op


def comult_word(gen: str) -> List[Word]:
    """Δ(gen) como soma de palavras j₁(a)j₂(b)."""
    return [((a, 1), (b, 2)) for a, b in COMULT_RULES[gen]]


def expand_slot(words: Sequence[Word], slot: int) -> List[Word]:
    """
    Aplica Δ ao fator `slot` de cada palavra; fatores seguintes sobem uma posição.
    """
    result: List[Word] = []
    for word in words:
        partial: List[Word] = [()]
        for gen, s in word:
            if s < slot:
                partial = [w + ((gen, s),) for w in partial]
            elif s > slot:
                partial = [w + ((gen, s + 1),) for w in partial]
            else:
                partial = [w + ((a, s), (b, s + 1)) for w in partial for a, b in COMULT_RULES[gen]]
        result.extend(partial)
    return result


def word_operator(q: QParam, words: Sequence[Word], count: int) -> ShiftOperator:
    total = None
    for word in words:
        op = ShiftOperator.identity(2 * count, q)
        for gen, s in word:
            op = op @ embedded_generator(q, gen, s, count)
        total = op if total is None else total + op
    return total


def coassociativity_sides(q: QParam, gen: str = 'n') -> Tuple[ShiftOperator, ShiftOperator, ShiftOperator]:
    """((Δ⊠id)Δ(gen), (id⊠Δ)Δ(gen), forma fechada) em L^{⊗3}."""
    words = comult_word(gen)
    lhs = word_operator(q, expand_slot(words, 1), 3)
    rhs = word_operator(q, expand_slot(words, 2), 3)
    closed = {
        'n': [(('n', 1), ('v*', 2), ('v*', 3)), (('v', 1), ('n', 2), ('v*', 3)),
              (('v', 1), ('v', 2), ('n', 3))],
        'v': [(('v', 1), ('v', 2), ('v', 3))],
    }[gen]
    return lhs, rhs, word_operator(q, closed, 3)


def comult_ops(q: QParam) -> Dict[str, NamedOperator]:
    v, n, _, P, _, _ = _factor_ops(q)
    j1_v = on_L_legs(v, (1,), 2)
    j1_n = on_L_legs(n, (1,), 2)
    j2_v = on_L_legs(v, (2,), 2)
    j2_n = on_L_legs(P, (1,), 2) @ on_L_legs(n, (2,), 2)
    delta_n = j1_n @ j2_v.adjoint() + j1_v @ j2_n

    def delta_n_ref(x):
        i, j, k, l = x
        out = {(i, j + 1, k + 1, l): _qp(q, i)}
        out[(i - 1, j, k, l + 1)] = out.get((i - 1, j, k, l + 1), 0) + _zp(q, -j) * _qp(q, k)
        return out

    ops = {
        'j1_v': _named('j1_v', 'LL', j1_v, 'v⊗1', lambda x: {(x[0] - 1,) + x[1:]: 1.0}),
        'j1_n': _named('j1_n', 'LL', j1_n, 'n⊗1',
                       lambda x: {(x[0], x[1] + 1, x[2], x[3]): _qp(q, x[0])}),
        'j2_v': _named('j2_v', 'LL', j2_v, '1⊗v', lambda x: {(x[0], x[1], x[2] - 1, x[3]): 1.0}),
        'j2_n': _named('j2_n', 'LL', j2_n, 'P⊗n',
                       lambda x: {(x[0], x[1], x[2], x[3] + 1): _zp(q, -x[1]) * _qp(q, x[2])}),
        'delta_v': _named('delta_v', 'LL', j1_v @ j2_v, 'Δ(v) = v⊗v',
                          lambda x: {(x[0] - 1, x[1], x[2] - 1, x[3]): 1.0}),
        'delta_n': _named('delta_n', 'LL', delta_n, 'Δ(n) = n⊗v* ∔ vP⊗n', delta_n_ref),
    }
    for k in (1, 2, 3):
        ops[f'J{k}_n'] = _named(f'J{k}_n', 'LLL', embedded_generator(q, 'n', k, 3),
                                f'J_{k}(n) = P^{{⊗{k - 1}}}⊗n⊗1')
    return ops


# --- bosonização ----------------------------------------------------------------

def boson_generators(q: QParam) -> Dict[str, ShiftOperator]:
    """z̃ = j_C(z), ṽ = j_B(v), ñ = j_B(n) em H⊗L (índice (p, i, j))."""
    v, n, _, _, P_prime, _ = _factor_ops(q)
    z = generator_ops(q)['z'].operator
    return {
        'z': embed_legs(z, (1,), 3),
        'v': embed_legs(v, (2, 3), 3),
        'n': embed_legs(P_prime, (1,), 3) @ embed_legs(n, (2, 3), 3),
    }


def boson_multunit(q: QParam, M: int, samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """𝒲 = W₁₄W₃₄·F_q(n⁻¹vP⊗P′⊗vn)₂₃₄₅₆·W₂₅W₃₅ em (H⊗L)^{⊗2}."""
    v, n, n_inv, P, P_prime, W = _factor_ops(q)
    normal = (embed_legs(n_inv @ v @ P, (2, 3), 6) @ embed_legs(P_prime, (4,), 6)
              @ embed_legs(v @ n, (5, 6), 6))
    middle = scaled_qexp(normal, 1.0, M, samples)
    return (embed_legs(W, (1, 4), 6) @ embed_legs(W, (3, 4), 6) @ middle
            @ embed_legs(W, (2, 5), 6) @ embed_legs(W, (3, 5), 6))


def boson_multunit_direct(q: QParam, M: int, samples: int = DEFAULT_SAMPLES) -> OperatorProduct:
    """𝒲 = 𝕎₁₃U₂₃V̂*₃₄𝔽₂₄V̂₃₄ nas pernas (H, L, H, L), sem a redução."""
    yd = yd_ops(q)
    U = generator_ops(q)['U'].operator
    V_hat = embed_legs(yd['V_hat'].operator, (4, 5, 6), 6)
    return OperatorProduct((embed_legs(yd['W_dual'].operator, (1, 4), 6),
                            embed_legs(U, (2, 3, 4), 6),
                            V_hat.adjoint(),
                            embed_legs(f_lambda(q, 1.0, M, samples), (2, 3, 5, 6), 6),
                            V_hat))


def boson_comult_closed(q: QParam) -> Dict[str, ShiftOperator]:
    """Δ_C(z̃) = z̃⊗z̃, Δ_C(ṽ) = ṽ⊗ṽ, Δ_C(ñ) = ñ⊗z̃ṽ* ∔ ṽ⊗ñ."""
    b = boson_generators(q)
    left = {k: embed_legs(op, (1, 2, 3), 6) for k, op in b.items()}
    right = {k: embed_legs(op, (4, 5, 6), 6) for k, op in b.items()}
    return {
        'z': left['z'] @ right['z'],
        'v': left['v'] @ right['v'],
        'n': left['n'] @ right['z'] @ right['v'].adjoint() + left['v'] @ right['n'],
    }


def boson_ops(q: QParam, M: int, samples: int = DEFAULT_SAMPLES) -> Dict[str, NamedOperator]:
    b = boson_generators(q)
    closed = boson_comult_closed(q)
    ops = {
        'z_C': _named('z_C', 'HL', b['z'], 'z̃ = z⊗1', lambda x: {(x[0] + 1, x[1], x[2]): 1.0}),
        'v_B': _named('v_B', 'HL', b['v'], 'ṽ = 1⊗v', lambda x: {(x[0], x[1] - 1, x[2]): 1.0}),
        'n_B': _named('n_B', 'HL', b['n'], "ñ = P'⊗n",
                      lambda x: {(x[0], x[1], x[2] + 1): _zp(q, -x[0]) * _qp(q, x[1])}),
        'W_boson': _named('W_boson', 'HLHL', boson_multunit(q, M, samples),
                          "W₁₄W₃₄·F_q(n⁻¹vP⊗P'⊗vn)₂₃₄₅₆·W₂₅W₃₅"),
    }
    for key, op in closed.items():
        ops[f'delta_C_{key}'] = _named(f'delta_C_{key}', 'HLHL', op, f'Δ_C({key}̃) forma fechada')
    return ops


# --- SU_q(2) e contração ----------------------------------------------------------

def contraction_ops(q: QParam) -> Dict[str, ScalarMap]:
    """g_θ, g_{−θ}, f_α e f_γ."""
    log_q = math.log(q.modulus)

    def g(theta: float) -> Callable[[complex], complex]:
        def func(lam: complex) -> complex:
            if lam == 0:
                return 0j
            return lam * cmath.exp(-1j * theta * math.log(abs(lam)) / log_q)
        return func

    def f_alpha(lam: complex) -> complex:
        size = abs(lam)
        return math.sqrt(max(0.0, 1.0 - size * size)) if size <= 1.0 + 1e-12 else 0.0

    def f_gamma(lam: complex) -> complex:
        return lam.conjugate() if abs(lam) <= 1.0 + 1e-12 else 0j

    return {
        'g_theta': ScalarMap('g_theta', g(q.angle), q.modulus, 'λ e^{−iθ log_|q| |λ|}'),
        'g_minus_theta': ScalarMap('g_minus_theta', g(-q.angle), q.modulus, 'λ e^{iθ log_|q| |λ|}'),
        'f_alpha': ScalarMap('f_alpha', f_alpha, q.modulus, '√(1−|λ|²)χ(λ)'),
        'f_gamma': ScalarMap('f_gamma', f_gamma, q.modulus, 'λ̄χ(λ)'),
    }


def tau(op: Operator, k: int, i_coords: Sequence[int]) -> Operator:
    """
    τ^k = Ad(v^k) aplicado em cada perna L, dada pela coordenada i (base 1).

    Para k < 0 usa v^{−k} = (v*)^{|k|}, exato.
    """
    shift = [0] * op.dim
    for c in i_coords:
        shift[c - 1] = -k
    Vk = ShiftOperator.monomial(op.q, op.dim, shift=shift)
    if isinstance(op, OperatorProduct):
        return OperatorProduct((Vk, op, Vk.adjoint()))
    return Vk @ op @ Vk.adjoint()


def suq2_generators(q: QParam, depth: int = 0) -> Dict[str, ShiftOperator]:
    """
    α, γ, t e t^{1/2} em L, restritos a i ≥ 0 (subespaço de SU_q(2)).

    Args:
        depth: Profundidade do produto de Pochhammer (0 = até a cauda < 1e−16)
    """
    i_form = _form(2, {0: 1})
    ind = function_factor('indicator_ge0', [i_form])
    return {
        'alpha': _shift_op(q, 2, (-1, 0), ind.times(function_factor('sqrt1m', [i_form]))),
        'gamma': _shift_op(q, 2, (0, -1), qbar_power(i_form).times(ind)),
        't': _shift_op(q, 2, coeff=ind.times(function_factor('qpoch', [i_form], (depth, 1, 1)))),
        't_half': _shift_op(q, 2, coeff=ind.times(function_factor('qpoch', [i_form], (depth, 1, 2)))),
    }


def suq2_comult(q: QParam) -> Dict[str, ShiftOperator]:
    """j₁, j₂ de α e γ e as imagens Δ_SU(α), Δ_SU(γ) em L⊗L."""
    s = suq2_generators(q)
    P = _factor_ops(q)[3]
    j1_a = on_L_legs(s['alpha'], (1,), 2)
    j2_a = on_L_legs(s['alpha'], (2,), 2)
    j1_g = on_L_legs(s['gamma'], (1,), 2)
    j2_g = on_L_legs(P.adjoint(), (1,), 2) @ on_L_legs(s['gamma'], (2,), 2)
    return {
        'j1_alpha': j1_a, 'j2_alpha': j2_a, 'j1_gamma': j1_g, 'j2_gamma': j2_g,
        'delta_alpha': j1_a @ j2_a - (j1_g.adjoint() @ j2_g) * q.q,
        'delta_gamma': j1_g @ j2_a + j1_a.adjoint() @ j2_g,
    }


def suq2_y_element(q: QParam, r_max: int) -> ShiftOperator:
    """Y = Σ_{r≤r_max} ∏_{s≤r}(1−|q|^{2s})⁻¹ (−q j₁(γ*)j₂(γ))^r (j₁(v)j₂(v))^{−r}."""
    c = suq2_comult(q)
    v = _factor_ops(q)[0]
    base = c['j1_gamma'].adjoint() @ c['j2_gamma']
    vv_inv = (on_L_legs(v, (1,), 2) @ on_L_legs(v, (2,), 2)).adjoint()
    step = base @ vv_inv
    power = ShiftOperator.identity(4, q)
    total = power
    weight = 1.0 + 0j
    for r in range(1, r_max + 1):
        weight *= -q.q / (1.0 - q.modulus ** (2 * r))
        power = power @ step
        total = total + power * weight
    return total


def suq2_ops(q: QParam, depth: int = 0, r_max: int = 12) -> Dict[str, NamedOperator]:
    s = suq2_generators(q, depth)
    c = suq2_comult(q)
    maps = contraction_ops(q)

    def alpha_ref(x):
        i, j = x
        return {(i - 1, j): maps['f_alpha'](_qp(q, i))} if i >= 0 else {}

    def gamma_ref(x):
        i, j = x
        return {(i, j - 1): maps['f_gamma'](_qp(q, i))} if i >= 0 else {}

    def pochhammer(i: int, power: float) -> float:
        prod, k = 1.0, 1
        while True:
            term = q.modulus ** (2 * k + 2 * i)
            if (depth == 0 and term < 1e-16) or (depth and k > depth):
                break
            prod *= 1.0 - term
            k += 1
        return prod ** power

    ops = {
        'alpha': _named('alpha', 'L', s['alpha'], 'α = v f_α(n): √(1−|q|^{2i}) e_{i−1,j}', alpha_ref),
        'gamma': _named('gamma', 'L', s['gamma'], 'γ = f_γ(n): q̄^i e_{i,j−1}', gamma_ref),
        't': _named('t', 'L', s['t'], '∏_k (1−|q|^{2k}γ*γ)',
                    lambda x: {x: pochhammer(x[0], 1.0)} if x[0] >= 0 else {}),
        't_half': _named('t_half', 'L', s['t_half'], 't^{1/2}',
                         lambda x: {x: pochhammer(x[0], 0.5)} if x[0] >= 0 else {}),
        'Y_SU': _named('Y_SU', 'LL', suq2_y_element(q, r_max), 'Σ_r c_r(−q j₁(γ*)j₂(γ))^r(v⊗v)^{−r}'),
    }
    for key in ('j2_gamma', 'delta_alpha', 'delta_gamma'):
        ops[key] = _named(key, 'LL', c[key], {'j2_gamma': 'P*⊗γ',
                                              'delta_alpha': 'j₁(α)j₂(α) − q j₁(γ)*j₂(γ)',
                                              'delta_gamma': 'j₁(γ)j₂(α) + j₁(α)*j₂(γ)'}[key])
    return ops


# --- Yetter–Drinfeld ------------------------------------------------------------

def yd_ops(q: QParam) -> Dict[str, NamedOperator]:
    V = _shift_op(q, 3, coeff=zeta_power(QuadraticForm.of(3, {(2, 1): -1})))
    V_hat = _shift_op(q, 3, coeff=zeta_power(QuadraticForm.of(3, {(0, 2): 1})))
    R_prime = _shift_op(q, 2, coeff=zeta_power(QuadraticForm.of(2, {(0, 1): -1})))
    W_dual = _shift_op(q, 2, matrix=SHEAR)
    return {
        'V': _named('V', 'LH', V, 'e_{i,j}⊗e_p ↦ ζ^{−pj} e_{i,j}⊗e_p', lambda x: {x: _zp(q, -x[2] * x[1])}),
        'V_hat': _named('V_hat', 'HL', V_hat, 'e_p⊗e_{i,j} ↦ ζ^{pj} e_p⊗e_{i,j}',
                        lambda x: {x: _zp(q, x[0] * x[2])}),
        'R_prime': _named('R_prime', 'HH', R_prime, "e_p⊗e_s ↦ ζ^{−ps} e_p⊗e_s",
                          lambda x: {x: _zp(q, -x[0] * x[1])}),
        'W_dual': _named('W_dual', 'HH', W_dual, 'e_p⊗e_s ↦ e_p⊗e_{s+p}',
                         lambda x: {(x[0], x[1] + x[0]): 1.0}),
    }


def operator_catalog(q: QParam, M: int, samples: int = DEFAULT_SAMPLES, depth: int = 0,
                     r_max: int = 12) -> Dict[str, NamedOperator]:
    """Todos os operadores nomeados, sem repetir nomes."""
    catalog: Dict[str, NamedOperator] = {}
    for group in (generator_ops(q), braiding_ops(q), x_ops(q), f_ops(q, M, samples),
                  comult_ops(q), boson_ops(q, M, samples), suq2_ops(q, depth, r_max), yd_ops(q)):
        catalog.update(group)
    return catalog


def self_test_catalog(catalog: Dict[str, NamedOperator], rng: np.random.Generator,
                      count: int = 100) -> Dict[str, float]:
    """Executa o autoteste de cada operador com referência."""
    deviations = {}
    for name, op in catalog.items():
        deviations[name] = op.self_test(rng, count)
    tested = sum(1 for op in catalog.values() if op.reference is not None)
    logging.info(f"Autoteste do catálogo: {tested} operadores conferidos, "
                 f"desvio máximo {max(deviations.values(), default=0.0):.3g}")
    return deviations
