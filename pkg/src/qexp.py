"""
Função exponencial quântica F_|q| sobre ℂ̄^|q| = {λ : |λ| ∈ |q|^ℤ} ∪ {0}.

    F(z) = ∏_{k≥0} (1 + |q|^{2k} z̄) / (1 + |q|^{2k} z)

e F(z) = −1 nos pontos singulares z = −|q|^{−2k}. Cada fator é conj(u)/u com
u = 1 + |q|^{2k}z, logo F(z) = exp(−2i·Σ_k arg u_k) e o valor é unimodular.
Na circunferência |z| = |q|^n a restrição tem série de Fourier real
F(z) = Σ_m F_m(|q|^n)·Ph(z)^m, que define F_q(N) para N normal.
"""

import cmath
import logging
import math
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_M_CAP, DEFAULT_SAMPLES
from shiftop import (BAND_FACTOR, CoeffExpr, FactorSpec, LinearForm, MonomialTerm, QParam, ShiftOperator,
                     function_factor, register_factor, term_power)

GRID_TOL = 1e-9
PRODUCT_TOL = 1e-17
IMAG_TOL = 1e-10
SERIES_DIGITS = 40
SERIES_MAX_DEPTH = 400
# Σ|termos| acima disto: a série cancela e a FFT é mais precisa
SERIES_WEIGHT_LIMIT = 1.0


class QExpError(Exception):
    """Erro base da exponencial quântica."""


class QExpDomainError(QExpError):
    """Argumento fora de ℂ̄^|q|."""


class FourierAccuracyError(QExpError):
    """Coeficientes de Fourier com parte imaginária acima da tolerância."""


class BandCutoffError(QExpError):
    """Banda necessária acima do limite configurado."""


class NormalityError(QExpError):
    """O monômio não define um operador normal utilizável por F_q."""


def grid_exponent(value: complex, modulus: float) -> Optional[int]:
    """
    Expoente n com |value| = |q|^n.

    Returns:
        n inteiro, ou None quando value = 0

    Raises:
        QExpDomainError: se |value| não está na grade |q|^ℤ
    """
    size = abs(complex(value))
    if size == 0.0:
        return None
    n = int(round(math.log(size) / math.log(modulus)))
    if abs(size - modulus ** n) > GRID_TOL * modulus ** n:
        raise QExpDomainError(f"|z|={size:.6g} fora da grade |q|^ℤ com |q|={modulus}")
    return n


def qexp_value(z: complex, q: QParam, tol: float = 1e-12) -> complex:
    """
    Avalia F_|q|(z) pelo produto infinito.

    Args:
        z: Ponto de ℂ̄^|q|
        q: Parâmetro de deformação (só |q| é usado)
        tol: Tolerância da verificação de unimodularidade

    Returns:
        Valor unimodular; exatamente −1 nos pontos singulares
    """
    z = complex(z)
    n = grid_exponent(z, q.modulus)
    if n is None:
        return 1 + 0j
    if n <= 0 and n % 2 == 0 and z.real < 0 and abs(z.imag) <= GRID_TOL * abs(z):
        return -1 + 0j
    total = 0.0
    w = z
    x2 = q.modulus ** 2
    while abs(w) >= PRODUCT_TOL:
        total += cmath.phase(1 + w)
        w *= x2
    value = cmath.exp(-2j * total)
    if not cmath.isfinite(value) or abs(abs(value) - 1.0) > tol:
        raise QExpError(f"Produto não convergiu em z={z}")
    return value


def _qexp_on_circle(n: int, samples: int, modulus: float) -> np.ndarray:
    # Grade deslocada φ_j = 2π(j+½)/N: nunca toca φ = π quando N é par
    phi = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
    w = modulus ** n * np.exp(1j * phi)
    total = np.zeros(samples)
    x2 = modulus ** 2
    scale = modulus ** n
    while scale >= PRODUCT_TOL:
        total += np.angle(1.0 + w)
        w = w * x2
        scale *= x2
    values = np.exp(-2j * total)
    if not np.all(np.isfinite(values)):
        raise QExpError(f"Produto não convergiu na circunferência |z|=|q|^{n}")
    return values


def _series_depth(p: float) -> int:
    """Menor L com p^{L(L−1)/2} < 10^−SERIES_DIGITS."""
    depth = 2
    while depth * (depth - 1) / 2 * math.log10(p) > -SERIES_DIGITS and depth < SERIES_MAX_DEPTH:
        depth += 1
    return depth


def series_coeffs(n: int, ms: np.ndarray, modulus: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    F_m(|q|^n) pela série dupla de Euler, com precisão relativa em cada coeficiente.

    Para n >= 1, com x = |q|, p = x² e r = x^n:

        F_m = Σ_{l >= max(0,−m)} (−1)^{m+l} x^{n(m+2l) + l(l−1)} / ((p;p)_{m+l} (p;p)_l)

    Para n <= 0 usa F(x^n w) = w^{n−1} F(x^{2−n} w), isto é,
    F_m(x^n) = F_{m−n+1}(x^{2−n}).

    Returns:
        (valores, Σ|termos|); a segunda mede o cancelamento da soma alternada
    """
    ms = np.asarray(ms, dtype=np.int64)
    if n < 1:
        return series_coeffs(2 - n, ms - n + 1, modulus)
    p = modulus ** 2
    depth = _series_depth(p)
    ls = np.maximum(0, -ms)[:, None] + np.arange(depth)[None, :]
    js = ms[:, None] + ls
    top = int(max(js.max(initial=0), ls.max(initial=0))) + 1
    log_poch = np.concatenate(([0.0], np.cumsum(np.log1p(-p ** np.arange(1, top + 1)))))
    exponent = n * (js + ls) + ls * (ls - 1)
    magnitude = np.exp(exponent * math.log(modulus) - log_poch[js] - log_poch[ls])
    sign = np.where(js % 2 == 0, 1.0, -1.0)
    return (sign * magnitude).sum(axis=1), magnitude.sum(axis=1)


@dataclass(frozen=True)
class FourierRow:
    """Coeficientes F_m(|q|^n) para |m| <= band."""

    n: int
    band: int
    values: np.ndarray
    imag_residue: float

    def coeff(self, m: int) -> float:
        if abs(m) > self.band:
            return 0.0
        return float(self.values[m + self.band])


def fourier_coeffs(n: int, M: int, samples: int, q: QParam) -> FourierRow:
    """
    Coeficientes de Fourier da restrição de F à circunferência |z| = |q|^n.

    A FFT tem precisão absoluta ~1e−16. Onde a série de Euler não cancela
    (Σ|termos| <= SERIES_WEIGHT_LIMIT) o valor vem dela, com precisão relativa.

    Args:
        n: Expoente do raio
        M: Limite da banda |m| <= M
        samples: Pontos da regra do trapézio deslocada (>= 4M+4)
        q: Parâmetro de deformação

    Returns:
        FourierRow com valores reais

    Raises:
        FourierAccuracyError: se a parte imaginária passa de IMAG_TOL
    """
    if samples < 4 * M + 4:
        raise QExpError(f"samples={samples} insuficiente para M={M} (mínimo {4 * M + 4})")
    values = _qexp_on_circle(n, samples, q.modulus)
    spectrum = np.fft.fft(values) / samples
    m = np.arange(-M, M + 1)
    coeffs = np.exp(-1j * np.pi * m / samples) * spectrum[m % samples]
    imag = float(np.max(np.abs(coeffs.imag)))
    if imag > IMAG_TOL:
        raise FourierAccuracyError(f"Parte imaginária {imag:.3g} em F_m(|q|^{n})")
    exact, weight = series_coeffs(n, m, q.modulus)
    real = np.where(weight <= SERIES_WEIGHT_LIMIT, exact, coeffs.real)
    real.setflags(write=False)
    return FourierRow(n, M, real, imag)


class FourierCache:
    """
    Linhas completas de coeficientes por raio, calculadas sob demanda.

    Compartilhada entre threads; cada linha é calculada uma vez por (|q|, samples).
    """

    def __init__(self, modulus: float, samples: int):
        self.modulus = modulus
        self.samples = samples
        self.band = (samples - 4) // 4
        self._rows: Dict[int, FourierRow] = {}
        self._lock = threading.Lock()

    def row(self, n: int) -> FourierRow:
        with self._lock:
            cached = self._rows.get(n)
        if cached is not None:
            return cached
        row = fourier_coeffs(n, self.band, self.samples, QParam(self.modulus, 0.0))
        with self._lock:
            return self._rows.setdefault(n, row)

    def values(self, m: int, ns: np.ndarray) -> np.ndarray:
        if abs(m) > self.band:
            raise BandCutoffError(f"|m|={abs(m)} acima da banda da cache ({self.band})")
        out = np.empty(ns.shape[0])
        for n in np.unique(ns):
            out[ns == n] = self.row(int(n)).values[m + self.band]
        return out


_CACHES: Dict[Tuple[float, int], FourierCache] = {}
_CACHES_LOCK = threading.Lock()


def fourier_cache(modulus: float, samples: int = DEFAULT_SAMPLES) -> FourierCache:
    with _CACHES_LOCK:
        key = (float(modulus), int(samples))
        if key not in _CACHES:
            _CACHES[key] = FourierCache(float(modulus), int(samples))
        return _CACHES[key]


def _qexp_fourier(args: List[np.ndarray], params: Tuple[int, ...], modulus: float) -> np.ndarray:
    m, samples = params
    return fourier_cache(modulus, samples).values(m, args[0])


register_factor(FactorSpec(BAND_FACTOR, _qexp_fourier, BAND_FACTOR))


@dataclass(frozen=True)
class FourierTable:
    """
    Tabela F_m(|q|^n) para n_lo <= n <= n_hi e |m| <= band.
    """

    modulus: float
    n_lo: int
    n_hi: int
    band: int
    samples: int
    values: np.ndarray
    imag_residue: float

    def coeff(self, m: int, n: int) -> float:
        if abs(m) > self.band or not self.n_lo <= n <= self.n_hi:
            raise KeyError((m, n))
        return float(self.values[n - self.n_lo, m + self.band])

    def symmetry_deviation(self, m_max: Optional[int] = None) -> float:
        """max |F_m(|q|^n) − (−|q|)^m F_{−m}(|q|^{n−m})| sobre os pares dentro da tabela."""
        m_max = self.band if m_max is None else min(m_max, self.band)
        worst = 0.0
        for n in range(self.n_lo, self.n_hi + 1):
            for m in range(-m_max, m_max + 1):
                if not self.n_lo <= n - m <= self.n_hi:
                    continue
                lhs = self.coeff(m, n)
                rhs = (-self.modulus) ** m * self.coeff(-m, n - m)
                worst = max(worst, abs(lhs - rhs))
        return worst

    def parseval_deviation(self) -> float:
        return float(np.max(np.abs(np.sum(self.values ** 2, axis=1) - 1.0)))

    def reconstruction_deviation(self, angles: int = 32) -> float:
        """Compara Σ_m F_m e^{imφ} com o produto em `angles` ângulos por linha."""
        q = QParam(self.modulus, 0.0)
        m = np.arange(-self.band, self.band + 1)
        phi = 2.0 * np.pi * (np.arange(angles) + 0.25) / angles
        worst = 0.0
        for n in range(self.n_lo, self.n_hi + 1):
            series = np.exp(1j * np.outer(phi, m)) @ self.values[n - self.n_lo]
            direct = np.array([qexp_value(self.modulus ** n * cmath.exp(1j * p), q) for p in phi])
            worst = max(worst, float(np.max(np.abs(series - direct))))
        return worst

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for n in range(self.n_lo, self.n_hi + 1):
            for m in range(-self.band, self.band + 1):
                rows.append({'n': n, 'm': m, 'F': self.coeff(m, n)})
        return pd.DataFrame(rows, columns=['n', 'm', 'F'])


def fourier_table(n_lo: int, n_hi: int, M: int, q: QParam, samples: int = DEFAULT_SAMPLES,
                  workers: int = 1) -> FourierTable:
    """Monta a FourierTable, linhas em paralelo quando workers > 1."""
    if n_lo > n_hi:
        raise QExpError(f"Faixa de n vazia: [{n_lo}, {n_hi}]")
    ns = list(range(n_lo, n_hi + 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: fourier_coeffs(n, M, samples, q), ns))
    else:
        rows = [fourier_coeffs(n, M, samples, q) for n in ns]
    values = np.stack([r.values for r in rows])
    values.setflags(write=False)
    return FourierTable(q.modulus, n_lo, n_hi, M, samples, values,
                        max(r.imag_residue for r in rows))


def band_cutoff(n_lo: int, n_hi: int, eps_band: float, q: QParam,
                samples: int = DEFAULT_SAMPLES, cap: int = DEFAULT_M_CAP,
                coeff_bound: float = 1.0) -> int:
    """
    Banda M além da qual todo |F_m(|q|^n)|·coeff_bound fica abaixo de eps_band na faixa de n.

    `coeff_bound` majora o peso que a janela aplica a cada coeficiente
    descartado (tipicamente |q|^−(R+1) para raio R).

    Raises:
        BandCutoffError: se M passa do limite `cap`
    """
    if eps_band <= 0:
        raise QExpError(f"eps_band precisa ser positivo, recebido {eps_band}")
    if coeff_bound < 1.0:
        raise QExpError(f"coeff_bound precisa ser >= 1, recebido {coeff_bound}")
    cache = fourier_cache(q.modulus, samples)
    m = np.arange(-cache.band, cache.band + 1)
    worst = -1
    for n in range(n_lo, n_hi + 1):
        large = np.abs(m[np.abs(cache.row(n).values) * coeff_bound >= eps_band])
        if large.size:
            worst = max(worst, int(large.max()))
    M = worst + 1
    if M > cap:
        raise BandCutoffError(f"Banda M={M} acima do limite {cap} (|q|={q.modulus})")
    logging.info(f"Banda escolhida M={M} para n em [{n_lo}, {n_hi}], eps={eps_band:g}, "
                 f"peso={coeff_bound:.3g}, {q.describe()}")
    return M


@dataclass(frozen=True)
class BandedQExp:
    """
    F_q(N) truncado: Σ_{|m|<=band} F_m(|N|)·Ph(N)^m.

    Args:
        operator: ShiftOperator com 2·band+1 termos
        band: Limite M
        modulus_form: n(x) com |N|e_x = |q|^{n(x)}e_x
        phase_term: Termo unimodular Ph(N)
    """

    operator: ShiftOperator
    band: int
    modulus_form: LinearForm
    phase_term: MonomialTerm

    @property
    def term_count(self) -> int:
        return len(self.operator.terms)


def _is_unimodular_coeff(coeff: CoeffExpr) -> bool:
    return (not coeff.factors and coeff.modulus.is_zero
            and abs(abs(coeff.kappa) - 1.0) <= 1e-12)


def qexp_of_normal(modulus_form: LinearForm, phase_term: MonomialTerm, M: int, q: QParam,
                   samples: int = DEFAULT_SAMPLES) -> BandedQExp:
    """
    Monta F_q(N) para o monômio normal N = |N|·Ph(N).

    Args:
        modulus_form: Forma n(x) de |N| = |q|^{n(x)}
        phase_term: Termo unimodular de Ph(N)
        M: Limite da banda
        q: Parâmetro de deformação
        samples: Pontos de quadratura das linhas de Fourier

    Raises:
        NormalityError: se Ph(N) não é unimodular ou não preserva |N|
    """
    if not _is_unimodular_coeff(phase_term.coeff):
        raise NormalityError("Coeficiente de Ph(N) não é unimodular")
    if modulus_form.substitute(phase_term.A, phase_term.b) != modulus_form:
        raise NormalityError("|N| não é invariante pelo mapa de Ph(N)")
    terms = []
    for m in range(-M, M + 1):
        power = term_power(phase_term, m)
        band = function_factor(BAND_FACTOR, [modulus_form], (m, samples))
        terms.append(power.with_coeff(power.coeff.times(band)))
    return BandedQExp(ShiftOperator(phase_term.dim, tuple(terms), q), M, modulus_form, phase_term)


def split_normal(term: MonomialTerm, q: QParam) -> Tuple[LinearForm, MonomialTerm]:
    """
    Separa um monômio sem fatores em (forma de |N|, termo Ph(N)).

    Raises:
        NormalityError: se o expoente de |q| não é inteiro ou κ sai da grade
    """
    coeff = term.coeff
    if coeff.factors:
        raise NormalityError("Monômio com fatores de função não tem polar simples")
    if any(a % 2 for a in coeff.modulus.coeffs) or coeff.modulus.const % 2:
        raise NormalityError("Expoente de |q| semi-inteiro")
    try:
        shift = grid_exponent(coeff.kappa, q.modulus)
    except QExpDomainError as e:
        raise NormalityError(str(e)) from e
    if shift is None:
        raise NormalityError("Monômio nulo")
    half = LinearForm(tuple(a // 2 for a in coeff.modulus.coeffs), coeff.modulus.const // 2 + shift)
    unit = coeff.kappa / abs(coeff.kappa)
    phase_coeff = CoeffExpr(unit, coeff.sign, LinearForm.zero(term.dim), coeff.phase)
    return half, term.with_coeff(phase_coeff)


def scaled_qexp(normal: ShiftOperator, lam: complex, M: int,
                samples: int = DEFAULT_SAMPLES) -> ShiftOperator:
    """
    F_q(λN) para um monômio N; λ = 0 dá a identidade.

    Raises:
        QExpDomainError: se λ está fora de ℂ̄^|q|
    """
    if len(normal.terms) != 1:
        raise NormalityError("F_q(λN) exige N monomial")
    q = normal.q
    if grid_exponent(lam, q.modulus) is None:
        return ShiftOperator.identity(normal.dim, q)
    form, phase = split_normal(normal.terms[0].scaled(lam), q)
    return qexp_of_normal(form, phase, M, q, samples).operator


def qexp_of_operator(normal: ShiftOperator, M: int, samples: int = DEFAULT_SAMPLES) -> BandedQExp:
    if len(normal.terms) != 1:
        raise NormalityError("F_q(N) exige N monomial")
    form, phase = split_normal(normal.terms[0], normal.q)
    return qexp_of_normal(form, phase, M, normal.q, samples)
