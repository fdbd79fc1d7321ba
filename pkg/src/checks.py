"""
Catálogo das identidades verificadas, registradas em verify pelo decorador identity_check.

Cada função recebe o CheckContext e devolve a lista de casos. Pernas L ocupam
pares de coordenadas (i, j); pernas H uma coordenada.
"""

import cmath
import math
import os
import sys
from typing import List

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from lattice import StateBatch, Window
from shiftop import LinearForm, OperatorProduct, QParam, ShiftOperator, embed_legs, modulus_power, phase_power
from qexp import fourier_cache, fourier_table, qexp_value
from constructions import (boson_comult_closed, boson_generators, boson_multunit, boson_multunit_direct,
                           braiding_ops, coassociativity_sides, comult_ops, contraction_ops, f_lambda,
                           f_tilde_operator, generator_ops, lemma_operator, on_L_legs, suq2_comult,
                           suq2_generators, suq2_y_element, t_operator, t_prime_operator, tau,
                           x_operator, y_operator, yd_ops)
from oracle import run_regression
from verify import (Case, CheckContext, DecayCase, IdentityCase, Measurement, SkipCheck, ToleranceClass,
                    identity_check, residual)

EXACT = ToleranceClass.EXACT
BANDED = ToleranceClass.BANDED


def _gens(q: QParam):
    return {k: v.operator for k, v in generator_ops(q).items()}


def _identity(q: QParam, dim: int) -> ShiftOperator:
    return ShiftOperator.identity(dim, q)


def _zero(q: QParam, dim: int) -> ShiftOperator:
    return ShiftOperator(dim, (), q)


def _F(ctx: CheckContext, lam: complex = 1.0) -> ShiftOperator:
    return f_lambda(ctx.q, lam, ctx.band, ctx.samples)


def _lam_label(lam: complex) -> str:
    return f"λ={lam.real:.4g}{lam.imag:+.4g}i"


@identity_check('C0', 'oracle_equivalence', 'dense-matrix oracles vs shift engine', ToleranceClass.SCALAR,
                dim=1, radius=3)
def oracle_equivalence(ctx: CheckContext) -> List[Case]:
    deviations = run_regression(ctx.q, ctx.radius, ctx.samples)
    return [Measurement(name, value, ctx.config.tol_oracle, 1) for name, value in deviations.items()]


@identity_check('C1', 'pentagon_W', 'W₂₃W₁₂ = W₁₂W₁₃W₂₃', EXACT, dim=3)
def pentagon_W(ctx: CheckContext) -> List[Case]:
    W = _gens(ctx.q)['W']
    W12, W13, W23 = (embed_legs(W, legs, 3) for legs in ((1, 2), (1, 3), (2, 3)))
    return [IdentityCase('pentágono', W23 @ W12, W12 @ W13 @ W23)]


@identity_check('C2', 'relations', 'vnv* = qn; ṽñṽ* = qñ; z̃ñz̃* = ζñ; z*N̂z = N̂+1', EXACT, dim=2)
def relations(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    g = _gens(q)
    v, n, abs_n = g['v'], g['n'], g['abs_n']
    b = boson_generators(q)
    zt, vt, nt = b['z'], b['v'], b['n']
    z, N_hat, P_prime = g['z'], g['N_hat'], g['P_prime']
    return [
        IdentityCase('vnv* = qn', v @ n @ v.H, n * q.q),
        IdentityCase('vn*v* = q̄n*', v @ n.H @ v.H, n.H * q.qbar),
        IdentityCase('v|n|v* = |q||n|', v @ abs_n @ v.H, abs_n * q.modulus),
        IdentityCase('ṽñṽ* = qñ', vt @ nt @ vt.H, nt * q.q),
        IdentityCase('z̃ñz̃* = ζñ', zt @ nt @ zt.H, nt * q.zeta),
        IdentityCase('z̃ṽ = ṽz̃', zt @ vt, vt @ zt),
        IdentityCase('z*N̂z = N̂+1', z.H @ N_hat @ z, N_hat + _identity(q, 1)),
        IdentityCase("zṼ = ζṼz", z @ P_prime, (P_prime @ z) * q.zeta),
    ]


@identity_check('C3', 'heisenberg_Z', 'Z₁₂ = U*₂βU*₁αU₂βU₁α', EXACT, dim=5)
def heisenberg_Z(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    g = _gens(q)
    U1a = embed_legs(g['U'], (1, 2, 5), 5)
    U2b = embed_legs(g['U_beta'], (3, 4, 5), 5)
    Z = embed_legs(braiding_ops(q)['Z'].operator, (1, 2, 3, 4), 5)
    return [IdentityCase('Z via par de Heisenberg', Z, U2b.H @ U1a.H @ U2b @ U1a)]


@identity_check('C4', 'qexp_unitarity', 'F_q(X)F_q(X)* = 1', BANDED, dim=4)
def qexp_unitarity(ctx: CheckContext) -> List[Case]:
    T = t_operator(ctx.q, 1.0, ctx.band, ctx.samples)
    one = _identity(ctx.q, 4)
    return [IdentityCase('F(X)F(X)*', OperatorProduct((T, T.H)), one, banded=True),
            IdentityCase('F(X)*F(X)', OperatorProduct((T.H, T)), one, banded=True)]


@identity_check('C5', 'fourier_symmetry', 'F_m(|q|^n) = (−|q|)^m F_{−m}(|q|^{n−m})', ToleranceClass.TABLE,
                dim=1, radius=6)
def fourier_symmetry(ctx: CheckContext) -> List[Case]:
    q, config = ctx.q, ctx.config
    x = q.modulus
    cache = fourier_cache(x, ctx.samples)
    worst = 0.0
    for n in range(-6, 7):
        row = cache.row(n)
        for m in range(-40, 41):
            rhs = (-x) ** m * cache.row(n - m).coeff(-m)
            worst = max(worst, abs(row.coeff(m) - rhs) / max(1.0, x ** m))
    table = fourier_table(-6, 6, 40, q, ctx.samples, config.workers)
    singular = max(abs(qexp_value(-(x ** (-2 * k)), q) + 1.0) for k in range(4))
    return [
        Measurement('simetria |m| ≤ 40, n ∈ [−6,6]', worst, config.tol_table, 13 * 81),
        Measurement('Parseval por linha', table.parseval_deviation(), config.tol_banded, 13),
        Measurement('reconstrução em 32 ângulos', table.reconstruction_deviation(32), config.tol_banded, 13),
        Measurement('F(−|q|^{−2k}) = −1', singular, config.tol_exact, 4),
    ]


@identity_check('C6', 'U_invariance', '𝔽₁₂U₁₃U₂₃ = U₁₃U₂₃𝔽₁₂', BANDED, dim=5)
def U_invariance(ctx: CheckContext) -> List[Case]:
    U = _gens(ctx.q)['U']
    UU = embed_legs(U, (1, 2, 5), 5) @ embed_legs(U, (3, 4, 5), 5)
    F12 = embed_legs(_F(ctx), (1, 2, 3, 4), 5)
    return [IdentityCase('invariância por U', OperatorProduct((F12, UU)), OperatorProduct((UU, F12)),
                         banded=True)]


def _braided_pentagon_case(ctx: CheckContext, lam: complex, label: str) -> IdentityCase:
    F = _F(ctx)
    Fl = F if lam == 1.0 else _F(ctx, lam)
    Psi23 = on_L_legs(braiding_ops(ctx.q)['Psi'].operator, (2, 3), 3)
    F23 = on_L_legs(F, (2, 3), 3)
    Fl12 = on_L_legs(Fl, (1, 2), 3)
    return IdentityCase(label, OperatorProduct((F23, Fl12)),
                        OperatorProduct((Fl12, Psi23, Fl12, Psi23.H, F23)), banded=True)


@identity_check('C7', 'braided_pentagon', '𝔽₂₃𝔽₁₂ = 𝔽₁₂Ψ₂₃𝔽₁₂Ψ*₂₃𝔽₂₃', BANDED, dim=6)
def braided_pentagon(ctx: CheckContext) -> List[Case]:
    return [_braided_pentagon_case(ctx, 1.0, 'pentágono trançado')]


@identity_check('C8', 'corep_family', '𝔽₂₃𝔽^λ₁₂ = 𝔽^λ₁₂Ψ₂₃𝔽^λ₁₂Ψ*₂₃𝔽₂₃', BANDED, dim=6)
def corep_family(ctx: CheckContext) -> List[Case]:
    return [_braided_pentagon_case(ctx, lam, _lam_label(lam)) for lam in ctx.config.lambda_values()]


@identity_check('C9', 'lemma_pentagon', 'F(X)₂₃T(λ)₁₂ = T(λ)₁₂F(λn⁻¹vP⊗v²P⊗vn)F(X)₂₃', BANDED, dim=6)
def lemma_pentagon(ctx: CheckContext) -> List[Case]:
    q, M, samples = ctx.q, ctx.band, ctx.samples
    FX23 = on_L_legs(t_operator(q, 1.0, M, samples), (2, 3), 3)
    cases = []
    for lam in ctx.config.lambda_values():
        T12 = on_L_legs(t_operator(q, lam, M, samples), (1, 2), 3)
        lemma = lemma_operator(q, lam, M, samples)
        cases.append(IdentityCase(_lam_label(lam), OperatorProduct((FX23, T12)),
                                  OperatorProduct((T12, lemma, FX23)), banded=True))
    return cases


@identity_check('C10', 'tprime', "(𝔽^λ)*₁₂𝔽₂₃𝔽^λ₁₂𝔽*₂₃ = Ψ₂₃𝔽^λ₁₂Ψ*₂₃ = T′(λ)", BANDED, dim=6)
def tprime(ctx: CheckContext) -> List[Case]:
    q, M, samples = ctx.q, ctx.band, ctx.samples
    Psi23 = on_L_legs(braiding_ops(q)['Psi'].operator, (2, 3), 3)
    F23 = on_L_legs(_F(ctx), (2, 3), 3)
    # quatro fatores com banda: amostra reduzida em cada λ
    commutator_count = max(4, ctx.config.banded_probes // 4)
    cases = []
    for lam in ctx.config.lambda_values():
        Fl12 = on_L_legs(_F(ctx, lam), (1, 2), 3)
        Tp = t_prime_operator(q, lam, M, samples)
        cases.append(IdentityCase(f"Ψ𝔽^λΨ* = T′, {_lam_label(lam)}",
                                  OperatorProduct((Psi23, Fl12, Psi23.H)), Tp, banded=True))
        cases.append(IdentityCase(f"comutador = T′, {_lam_label(lam)}",
                                  OperatorProduct((Fl12.H, F23, Fl12, F23.H)), Tp, banded=True,
                                  sample_count=commutator_count))
    return cases


def _matrix_elements(op, sources: np.ndarray, targets: np.ndarray, prune: float,
                     chunk: int = 2048) -> np.ndarray:
    """⟨e_target|op|e_source⟩ para cada par, em blocos."""
    values = np.zeros(sources.shape[0], dtype=complex)
    for start in range(0, sources.shape[0], chunk):
        src = sources[start:start + chunk]
        tgt = targets[start:start + chunk]
        out = op.apply_batch(StateBatch.from_points(src), prune)
        hit = np.all(out.coords == tgt[out.tags], axis=1)
        values[start:start + chunk] = np.bincount(out.tags[hit], weights=out.amps[hit].real,
                                                  minlength=len(src)) \
            + 1j * np.bincount(out.tags[hit], weights=out.amps[hit].imag, minlength=len(src))
    return values


@identity_check('C11', 'manageability', '⟨x⊗u|Z*𝔽|y⊗v⟩ = ⟨ȳ⊗u|(1⊗Q_L)𝔽̃Z̃*(1⊗Q_L⁻¹)|x̄⊗v⟩', BANDED,
                dim=4, radius=4)
def manageability(ctx: CheckContext) -> List[Case]:
    q, M, samples = ctx.q, ctx.band, ctx.samples
    x = q.modulus
    R = ctx.radius
    axis = np.arange(-R, R + 1)
    grid = np.stack(np.meshgrid(axis, axis, axis, axis, axis, indexing='ij'), axis=-1).reshape(-1, 5)
    i, j, k, l, b = grid.T
    s = i + l - b
    t = j + l - b
    a = k + b - l - i - j
    # forma fechada com as três restrições δ já impostas
    cache = fourier_cache(x, samples)
    closed = np.array([
        (-x) ** (ll - bb) * cmath.exp(2j * q.angle * jj * bb)
        * cmath.exp(1j * q.angle * (bb - ll) * (ss - kk))
        * cache.row(int(kk - ss + 1)).coeff(int(bb - ll))
        for jj, kk, ll, bb, ss in zip(j, k, l, b, s)])
    braid = braiding_ops(q)
    lhs_op = OperatorProduct((braid['Z'].operator.H, _F(ctx)))
    lhs = _matrix_elements(lhs_op, np.stack([s, t, a, b], axis=1), np.stack([i, j, k, l], axis=1),
                           ctx.config.banded_prune)
    QL = embed_legs(_gens(q)['Q_L'], (3, 4), 4)
    QL_inv = ShiftOperator.monomial(q, 4, coeff=modulus_power(LinearForm.of(4, {3: -1})))
    rhs_op = OperatorProduct((QL, f_tilde_operator(q, M, samples), braid['Z_tilde'].operator.H, QL_inv))
    rhs = _matrix_elements(rhs_op, np.stack([i, j, a, b], axis=1), np.stack([s, t, k, l], axis=1),
                           ctx.config.banded_prune)
    tol = ctx.config.tol_banded
    count = grid.shape[0]
    return [
        Measurement('Z*𝔽 vs forma fechada', float(np.max(np.abs(lhs - closed))), tol, count),
        Measurement('lado 𝔽̃ vs forma fechada', float(np.max(np.abs(rhs - closed))), tol, count),
        Measurement('Z*𝔽 vs lado 𝔽̃', float(np.max(np.abs(lhs - rhs))), tol, count),
    ]


@identity_check('C12', 'QL_invariance', '𝔽(Q_L⊗Q_L)𝔽* = Q_L⊗Q_L; U(Q_L⊗1)U* = Q_L⊗1', BANDED, dim=4)
def QL_invariance(ctx: CheckContext) -> List[Case]:
    g = _gens(ctx.q)
    QQ = embed_legs(g['Q_L'], (1, 2), 4) @ embed_legs(g['Q_L'], (3, 4), 4)
    F = _F(ctx)
    QL3 = embed_legs(g['Q_L'], (1, 2), 3)
    return [IdentityCase('𝔽(Q_L⊗Q_L)𝔽*', OperatorProduct((F, QQ, F.H)), QQ, banded=True),
            IdentityCase('U(Q_L⊗1)U*', g['U'] @ QL3 @ g['U'].H, QL3)]


@identity_check('C13', 'comult_n', '𝔽(n⊗1)𝔽* = n⊗v* ∔ vP⊗n', BANDED, dim=4)
def comult_n(ctx: CheckContext) -> List[Case]:
    c = comult_ops(ctx.q)
    F = _F(ctx)
    return [IdentityCase('Δ(n)', OperatorProduct((F, c['j1_n'].operator, F.H)), c['delta_n'].operator,
                         banded=True)]


@identity_check('C14', 'comult_v', '𝔽(v⊗1)𝔽* = v⊗v', BANDED, dim=4)
def comult_v(ctx: CheckContext) -> List[Case]:
    c = comult_ops(ctx.q)
    F = _F(ctx)
    return [IdentityCase('Δ(v)', OperatorProduct((F, c['j1_v'].operator, F.H)), c['delta_v'].operator,
                         banded=True)]


@identity_check('C15', 'coassoc_generators', '(Δ⊠id)Δ(n) = (id⊠Δ)Δ(n) = ΣJ₁J₂J₃', EXACT, dim=6,
                aliases=('coassoc', 'coassociativity_generators'))
def coassoc_generators(ctx: CheckContext) -> List[Case]:
    cases = []
    for gen in ('n', 'v'):
        lhs, rhs, closed = coassociativity_sides(ctx.q, gen)
        cases.append(IdentityCase(f'{gen}: (Δ⊠id)Δ = (id⊠Δ)Δ', lhs, rhs))
        cases.append(IdentityCase(f'{gen}: forma fechada', lhs, closed))
    return cases


@identity_check('C16', 'yd_compat', 'V₁₂U₁₃𝕎₂₃ = 𝕎₂₃U₁₃V₁₂', EXACT, dim=4)
def yd_compat(ctx: CheckContext) -> List[Case]:
    yd = yd_ops(ctx.q)
    V12 = embed_legs(yd['V'].operator, (1, 2, 3), 4)
    U13 = embed_legs(_gens(ctx.q)['U'], (1, 2, 4), 4)
    W23 = embed_legs(yd['W_dual'].operator, (3, 4), 4)
    return [IdentityCase('Yetter–Drinfeld', V12 @ U13 @ W23, W23 @ U13 @ V12)]


def _boson_leg(op, a: int, b: int):
    coords = tuple(range(3 * a - 2, 3 * a + 1)) + tuple(range(3 * b - 2, 3 * b + 1))
    return embed_legs(op, coords, 9)


@identity_check('C17', 'boson_pentagon', '𝒲₂₃𝒲₁₂ = 𝒲₁₂𝒲₁₃𝒲₂₃', BANDED, dim=9, radius=3)
def boson_pentagon(ctx: CheckContext) -> List[Case]:
    W = boson_multunit(ctx.q, ctx.band, ctx.samples)
    W12, W13, W23 = (_boson_leg(W, a, b) for a, b in ((1, 2), (1, 3), (2, 3)))
    return [IdentityCase('pentágono bosônico', OperatorProduct((W23, W12)),
                         OperatorProduct((W12, W13, W23)), banded=True)]


@identity_check('C18', 'boson_comult', 'Δ_C(x) = 𝒲(x⊗1)𝒲*', BANDED, dim=6)
def boson_comult(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    W = boson_multunit(q, ctx.band, ctx.samples)
    gens = boson_generators(q)
    closed = boson_comult_closed(q)
    return [IdentityCase(f'Δ_C({key})', OperatorProduct((W, embed_legs(gens[key], (1, 2, 3), 6), W.H)),
                         closed[key], banded=True)
            for key in ('z', 'v', 'n')]


@identity_check('C19', 'equivariance_tau', '(τ^k⊠τ^k)∘Δ = Δ∘τ^k', EXACT, dim=4)
def equivariance_tau(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    c = comult_ops(q)
    g = _gens(q)
    cases = []
    for k in range(-2, 3):
        cases.append(IdentityCase(f'τ^{k}(v) = v', tau(g['v'], k, (1,)), g['v']))
        cases.append(IdentityCase(f'τ^{k}(n) = q^{k}n', tau(g['n'], k, (1,)), g['n'] * q.q ** k))
        cases.append(IdentityCase(f'Δ(v), k={k}', tau(c['delta_v'].operator, k, (1, 3)), c['delta_v'].operator))
        cases.append(IdentityCase(f'Δ(n), k={k}', tau(c['delta_n'].operator, k, (1, 3)),
                                  c['delta_n'].operator * q.q ** k))
    return cases


@identity_check('C20', 'contraction_generators', 'τ^l(α) → v, τ^l(γ) → 0', ToleranceClass.DECAY, dim=2)
def contraction_generators(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    su = suq2_generators(q, ctx.config.pochhammer_depth)
    v = _gens(q)['v']
    probes_alpha = np.array([[2, 0], [3, 1], [4, -2]])
    probes_gamma = np.array([[0, 0], [1, 3], [2, -1]])
    x = q.modulus
    return [
        DecayCase('τ^l(α) → v', lambda l: tau(su['alpha'], l, (1,)), v, probes_alpha, x ** 2),
        DecayCase('τ^l(γ) → 0', lambda l: tau(su['gamma'], l, (1,)), _zero(q, 2), probes_gamma, x),
        DecayCase('τ^l(v) = v', lambda l: tau(v, l, (1,)), v, probes_alpha, None),
    ]


@identity_check('C21', 'contraction_t_Y', 'α^k v^{−k} → t^{1/2}; (τ^l⊠τ^l)Y → 1', ToleranceClass.DECAY, dim=2)
def contraction_t_Y(ctx: CheckContext) -> List[Case]:
    q, config = ctx.q, ctx.config
    su = suq2_generators(q, config.pochhammer_depth)
    v = _gens(q)['v']
    power = _identity(q, 2)
    for _ in range(config.k_limit):
        power = su['alpha'] @ power @ v.H
    window = Window((0, -8), (8, 8))
    limit = residual(power, su['t_half'], None, window.points(), config.prune, check_leaks=False)
    Y = suq2_y_element(q, config.r_max)
    probes_Y = np.array([[0, 0, 0, 0], [1, 1, 0, -1], [2, 0, 1, 0]])
    probes_t = np.array([[0, 0], [1, 2], [3, -1]])
    x = q.modulus
    return [
        Measurement(f'α^{config.k_limit}v^{{−{config.k_limit}}} = t^{{1/2}}', limit, config.tol_oracle,
                    window.size),
        DecayCase('(τ^l⊠τ^l)Y → 1', lambda l: tau(Y, l, (1, 3)), _identity(q, 4), probes_Y, x ** 2),
        DecayCase('|q|^{−l}((τ^l⊠τ^l)Y − 1)', lambda l: tau(Y, l, (1, 3)), _identity(q, 4), probes_Y, x,
                  weight=lambda l: x ** (-l)),
        DecayCase('τ^l(t^{1/2}) → 1', lambda l: tau(su['t_half'], l, (1,)), _identity(q, 2), probes_t, x ** 2),
    ]


@identity_check('C22', 'g_theta', 'g_θ(qλ) = |q|g_θ(λ); g_{−θ}∘g_θ = id', ToleranceClass.SCALAR, dim=1)
def g_theta(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    maps = contraction_ops(q)
    g, g_inv = maps['g_theta'], maps['g_minus_theta']
    grid = [0j] + [q.modulus ** r * cmath.exp(2j * math.pi * a / 8) for r in range(-3, 4) for a in range(8)]
    scaling = max(abs(g(q.q * lam) - q.modulus * g(lam)) for lam in grid)
    inverse = max(abs(g_inv(g(lam)) - lam) for lam in grid)
    tol = ctx.config.tol_exact
    return [Measurement('g_θ(qλ) = |q|g_θ(λ)', scaling, tol, len(grid)),
            Measurement('g_{−θ}(g_θ(λ)) = λ', inverse, tol, len(grid))]


@identity_check('C23', 'pentagon_Y', 'Y₂₃Y₁₂ = Y₁₂Y₁₃Y₂₃', EXACT, dim=6)
def pentagon_Y(ctx: CheckContext) -> List[Case]:
    Y = y_operator(ctx.q)
    Y12, Y13, Y23 = (on_L_legs(Y, slots, 3) for slots in ((1, 2), (1, 3), (2, 3)))
    return [IdentityCase('pentágono de Y', Y23 @ Y12, Y12 @ Y13 @ Y23)]


@identity_check('C24', 'Y_vn_commute', 'Y(vn⊗1) = (vn⊗1)Y', EXACT, dim=4)
def Y_vn_commute(ctx: CheckContext) -> List[Case]:
    g = _gens(ctx.q)
    vn = on_L_legs(g['v'] @ g['n'], (1,), 2)
    Y = y_operator(ctx.q)
    return [IdentityCase('Y comuta com vn⊗1', Y @ vn, vn @ Y)]


@identity_check('C25', 'suq2_relations', 'α*α+γ*γ = 1, αα*+|q|²γγ* = 1, αγ = q̄γα, γ*γ = γγ*', EXACT, dim=2)
def suq2_relations(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    su = suq2_generators(q, ctx.config.pochhammer_depth)
    alpha, gamma = su['alpha'], su['gamma']
    one = _identity(q, 2)
    R = ctx.radius
    window = Window((0, -R), (R, R))
    return [
        IdentityCase('α*α+γ*γ = 1', alpha.H @ alpha + gamma.H @ gamma, one, window=window),
        IdentityCase('αα*+|q|²γγ* = 1', alpha @ alpha.H + (gamma @ gamma.H) * q.modulus ** 2, one, window=window),
        IdentityCase('αγ = q̄γα', alpha @ gamma, (gamma @ alpha) * q.qbar, window=window),
        IdentityCase('γ*γ = γγ*', gamma.H @ gamma, gamma @ gamma.H, window=window),
    ]


@identity_check('C26', 'suq2_comult_isometry', 'Δ(α)*Δ(α) + Δ(γ)*Δ(γ) = 1', EXACT, dim=4)
def suq2_comult_isometry(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    c = suq2_comult(q)
    da, dg = c['delta_alpha'], c['delta_gamma']
    R = ctx.radius
    window = Window((0, -R, 0, -R), (R, R, R, R))
    return [IdentityCase('isometria de Δ_SU', da.H @ da + dg.H @ dg, _identity(q, 4), window=window)]


@identity_check('C27', 'boson_reduction', '𝕎₁₃U₂₃V̂*₃₄𝔽₂₄V̂₃₄ = W₁₄W₃₄F(n⁻¹vP⊗P′⊗vn)W₂₅W₃₅', BANDED, dim=6)
def boson_reduction(ctx: CheckContext) -> List[Case]:
    q, M, samples = ctx.q, ctx.band, ctx.samples
    return [IdentityCase('𝒲 direto = 𝒲 reduzido', boson_multunit_direct(q, M, samples),
                         boson_multunit(q, M, samples), banded=True)]


@identity_check('C28', 'induced_corep', 'R′₂₃U₁₂R′*₂₃ = U₁₂V₁₃', EXACT, dim=4)
def induced_corep(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    yd = yd_ops(q)
    R23 = embed_legs(yd['R_prime'].operator, (3, 4), 4)
    U12 = embed_legs(_gens(q)['U'], (1, 2, 3), 4)
    V13 = embed_legs(yd['V'].operator, (1, 2, 4), 4)
    return [IdentityCase('corepresentação induzida', R23 @ U12 @ R23.H, U12 @ V13)]


@identity_check('C29', 'real_q_degeneration', 'θ = 0: Ψ = Σ', EXACT, dim=4)
def real_q_degeneration(ctx: CheckContext) -> List[Case]:
    if abs(math.sin(ctx.q.angle)) > 1e-12:
        raise SkipCheck(f"q não real ({ctx.q.describe()})")
    braid = braiding_ops(ctx.q)
    return [IdentityCase('Ψ = Σ', braid['Psi'].operator, braid['Sigma'].operator),
            IdentityCase('Z = 1', braid['Z'].operator, _identity(ctx.q, 4))]


@identity_check('C30', 'qexp_identity', 'F(R⁻¹S)·R·F(R⁻¹S)* = R ∔ S', BANDED, dim=4)
def qexp_identity(ctx: CheckContext) -> List[Case]:
    q = ctx.q
    c = comult_ops(q)
    R = c['j1_n'].operator @ c['j2_v'].operator.H
    S = c['j1_v'].operator @ c['j2_n'].operator
    T = t_operator(q, 1.0, ctx.band, ctx.samples)
    ph_n = ShiftOperator.monomial(q, 2, shift=(0, 1), coeff=phase_power(LinearForm.of(2, {0: 1})))
    ph_R = on_L_legs(ph_n, (1,), 2) @ c['j2_v'].operator.H
    abs_S = ShiftOperator.monomial(q, 4, coeff=modulus_power(LinearForm.of(4, {2: 1})))
    return [IdentityCase('Ph(R)|S|Ph(R)* = |q|⁻¹|S|', ph_R @ abs_S @ ph_R.H, abs_S * (1.0 / q.modulus)),
            IdentityCase('regra da soma', OperatorProduct((T, R, T.H)), R + S, banded=True)]
