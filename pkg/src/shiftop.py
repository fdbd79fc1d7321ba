"""
Operadores como somas finitas de termos monomiais afins sobre ℓ²(ℤ)^{⊗d}.

Um termo age por e_x ↦ c(x)·e_{Ax+b}, com A inteira e unimodular, e

    c(x) = κ·(−1)^{σ(x)}·|q|^{ℓ(x)/2}·e^{iθ·φ(x)/2}·∏_j f_j(args_j(x))

onde σ, ℓ são formas lineares inteiras, φ é forma quadrática inteira e os f_j
são fatores registrados. Os expoentes de |q| e da fase são guardados dobrados,
de modo que |q|^{1/2}, Ph(q)^m = e^{imθ} e ζ^{jl} = e^{2iθjl} são exatos.
"""

import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_PRUNE
from lattice import (DimensionMismatchError, StateBatch, StateVector, Window,
                     as_index, IndexLike)

BAND_FACTOR = 'qexp_fourier'


class ShiftOpError(Exception):
    """Erro base da álgebra de operadores monomiais."""


class QParamError(ShiftOpError):
    """Parâmetro de deformação fora de 0 < |q| < 1."""


class LegMapError(ShiftOpError):
    """Mapa de pernas não injetivo ou fora do alcance."""


class NonUnimodularError(ShiftOpError):
    """Matriz de índices com |det| diferente de 1."""


class FactorDomainError(ShiftOpError):
    """Fator de função avaliado fora do seu domínio."""


class UnknownFactorError(ShiftOpError):
    """Nome de fator não registrado."""


@dataclass(frozen=True)
class QParam:
    """
    Parâmetro de deformação q = |q|·e^{iθ}.

    Args:
        modulus: |q|, com 0 < |q| < 1
        angle: θ = arg q em radianos
    """

    modulus: float
    angle: float

    def __post_init__(self):
        mod = float(self.modulus)
        ang = float(self.angle)
        if not (math.isfinite(mod) and math.isfinite(ang)):
            raise QParamError(f"Parâmetro q não finito: |q|={mod}, θ={ang}")
        if not 0.0 < mod < 1.0:
            raise QParamError(f"É preciso 0 < |q| < 1, recebido |q|={mod}")
        object.__setattr__(self, 'modulus', mod)
        object.__setattr__(self, 'angle', ang)

    @classmethod
    def from_pi_fraction(cls, modulus: float, num: int, den: int) -> 'QParam':
        """θ = π·num/den."""
        if den == 0:
            raise QParamError("Denominador nulo no ângulo")
        return cls(modulus, math.pi * num / den)

    @classmethod
    def from_complex(cls, value: complex) -> 'QParam':
        return cls(abs(value), math.atan2(value.imag, value.real))

    @property
    def phase(self) -> complex:
        """Ph(q) = e^{iθ}."""
        return complex(math.cos(self.angle), math.sin(self.angle))

    @property
    def q(self) -> complex:
        return self.modulus * self.phase

    @property
    def qbar(self) -> complex:
        return self.q.conjugate()

    @property
    def zeta(self) -> complex:
        """ζ = q/q̄ = e^{2iθ}."""
        return complex(math.cos(2 * self.angle), math.sin(2 * self.angle))

    def describe(self) -> str:
        return f"|q|={self.modulus:g}, θ={self.angle / math.pi:.6g}π"


def _as_int_tuple(values) -> Tuple[int, ...]:
    return tuple(int(v) for v in values)


def _legs0(legs: Sequence[int], dim: int, big: int) -> List[int]:
    legs0 = [int(leg) - 1 for leg in legs]
    if len(legs0) != dim:
        raise LegMapError(f"Mapa de pernas com {len(legs0)} entradas para d={dim}")
    if len(set(legs0)) != len(legs0):
        raise LegMapError(f"Mapa de pernas não injetivo: {list(legs)}")
    if any(leg < 0 or leg >= big for leg in legs0):
        raise LegMapError(f"Pernas {list(legs)} fora de 1..{big}")
    return legs0


@dataclass(frozen=True)
class LinearForm:
    """Forma afim inteira x ↦ a·x + c."""

    coeffs: Tuple[int, ...]
    const: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', _as_int_tuple(self.coeffs))
        object.__setattr__(self, 'const', int(self.const))

    @classmethod
    def zero(cls, dim: int) -> 'LinearForm':
        return cls((0,) * dim, 0)

    @classmethod
    def of(cls, dim: int, terms: Optional[Dict[int, int]] = None, const: int = 0) -> 'LinearForm':
        """Forma a partir de {coordenada (base 0): coeficiente}."""
        coeffs = [0] * dim
        for k, a in (terms or {}).items():
            coeffs[k] += a
        return cls(tuple(coeffs), const)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return self.const == 0 and not any(self.coeffs)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return points @ np.array(self.coeffs, dtype=np.int64) + self.const

    def substitute(self, A: np.ndarray, b: np.ndarray) -> 'LinearForm':
        """Forma x ↦ f(Ax + b)."""
        a = np.array(self.coeffs, dtype=np.int64)
        return LinearForm(tuple((A.T @ a).tolist()), int(a @ b) + self.const)

    def embed(self, legs0: Sequence[int], big: int) -> 'LinearForm':
        coeffs = [0] * big
        for k, leg in enumerate(legs0):
            coeffs[leg] = self.coeffs[k]
        return LinearForm(tuple(coeffs), self.const)

    def scaled(self, k: int) -> 'LinearForm':
        return LinearForm(tuple(k * a for a in self.coeffs), k * self.const)

    def shifted(self, c: int) -> 'LinearForm':
        return LinearForm(self.coeffs, self.const + c)

    def __add__(self, other: 'LinearForm') -> 'LinearForm':
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          self.const + other.const)

    def __neg__(self) -> 'LinearForm':
        return self.scaled(-1)


@dataclass(frozen=True)
class QuadraticForm:
    """Forma inteira x ↦ xᵀQx + l·x + c (Q não precisa ser simétrica)."""

    matrix: Tuple[Tuple[int, ...], ...]
    linear: LinearForm

    def __post_init__(self):
        matrix = tuple(_as_int_tuple(row) for row in self.matrix)
        if len(matrix) != self.linear.dim or any(len(row) != len(matrix) for row in matrix):
            raise ShiftOpError("Forma quadrática com dimensões inconsistentes")
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def zero(cls, dim: int) -> 'QuadraticForm':
        return cls(((0,) * dim,) * dim, LinearForm.zero(dim))

    @classmethod
    def of(cls, dim: int, pairs: Optional[Dict[Tuple[int, int], int]] = None,
           linear: Optional[LinearForm] = None) -> 'QuadraticForm':
        """Forma a partir de {(a, b): coeficiente de x_a·x_b} (coordenadas base 0)."""
        rows = [[0] * dim for _ in range(dim)]
        for (a, b), c in (pairs or {}).items():
            rows[a][b] += c
        return cls(tuple(tuple(r) for r in rows), linear or LinearForm.zero(dim))

    @classmethod
    def from_linear(cls, form: LinearForm) -> 'QuadraticForm':
        return cls(((0,) * form.dim,) * form.dim, form)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def is_zero(self) -> bool:
        return self.linear.is_zero and not any(any(row) for row in self.matrix)

    def _array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.dim, self.dim)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        Q = self._array()
        values = self.linear.evaluate(points)
        if np.any(Q):
            values = values + np.einsum('ki,ij,kj->k', points, Q, points)
        return values

    def substitute(self, A: np.ndarray, b: np.ndarray) -> 'QuadraticForm':
        """Forma x ↦ φ(Ax + b)."""
        Q = self._array()
        lin = np.array(self.linear.coeffs, dtype=np.int64)
        new_q = A.T @ Q @ A
        new_lin = A.T @ ((Q + Q.T) @ b) + A.T @ lin
        new_const = int(b @ Q @ b) + int(lin @ b) + self.linear.const
        return QuadraticForm(tuple(tuple(r) for r in new_q.tolist()),
                             LinearForm(tuple(new_lin.tolist()), new_const))

    def embed(self, legs0: Sequence[int], big: int) -> 'QuadraticForm':
        rows = [[0] * big for _ in range(big)]
        for a, la in enumerate(legs0):
            for b, lb in enumerate(legs0):
                rows[la][lb] = self.matrix[a][b]
        return QuadraticForm(tuple(tuple(r) for r in rows), self.linear.embed(legs0, big))

    def scaled(self, k: int) -> 'QuadraticForm':
        return QuadraticForm(tuple(tuple(k * v for v in row) for row in self.matrix),
                             self.linear.scaled(k))

    def __add__(self, other: 'QuadraticForm') -> 'QuadraticForm':
        rows = tuple(tuple(a + b for a, b in zip(r1, r2))
                     for r1, r2 in zip(self.matrix, other.matrix))
        return QuadraticForm(rows, self.linear + other.linear)

    def __neg__(self) -> 'QuadraticForm':
        return self.scaled(-1)


@dataclass(frozen=True)
class FunctionFactor:
    """Fator f(args(x); params) de um coeficiente, identificado pelo nome registrado."""

    name: str
    args: Tuple[LinearForm, ...]
    params: Tuple[int, ...] = ()

    def substitute(self, A: np.ndarray, b: np.ndarray) -> 'FunctionFactor':
        return FunctionFactor(self.name, tuple(a.substitute(A, b) for a in self.args), self.params)

    def embed(self, legs0: Sequence[int], big: int) -> 'FunctionFactor':
        return FunctionFactor(self.name, tuple(a.embed(legs0, big) for a in self.args), self.params)

    def conjugate(self) -> 'FunctionFactor':
        return FunctionFactor(factor_spec(self.name).conjugate, self.args, self.params)


@dataclass(frozen=True)
class FactorSpec:
    """
    Entrada do registro de fatores.

    Args:
        name: Nome usado em FunctionFactor
        func: (argumentos inteiros, parâmetros, |q|) -> valores
        conjugate: Nome do fator conjugado
        indicator: Se True o fator vale 0/1 e é avaliado antes dos demais
    """

    name: str
    func: Callable[[List[np.ndarray], Tuple[int, ...], float], np.ndarray]
    conjugate: str
    indicator: bool = False


_FACTORS: Dict[str, FactorSpec] = {}


def register_factor(spec: FactorSpec) -> None:
    _FACTORS[spec.name] = spec


def factor_spec(name: str) -> FactorSpec:
    try:
        return _FACTORS[name]
    except KeyError:
        raise UnknownFactorError(f"Fator não registrado: {name}") from None


def registered_factors() -> List[str]:
    return sorted(_FACTORS)


def _sqrt1m(args: List[np.ndarray], params: Tuple[int, ...], modulus: float) -> np.ndarray:
    a = args[0]
    if np.any(a < 0):
        raise FactorDomainError(f"sqrt1m fora do domínio (argumento {int(a.min())} < 0)")
    return np.sqrt(1.0 - np.power(modulus, 2.0 * a))


def _qpoch(args: List[np.ndarray], params: Tuple[int, ...], modulus: float) -> np.ndarray:
    # params = (K, num, den): (∏_{k=1}^{K} (1 − |q|^{2k+2a}))^{num/den}; K = 0 vai até cauda < 1e−16
    depth, num, den = params
    a = args[0]
    if np.any(a < 0):
        raise FactorDomainError(f"qpoch fora do domínio (argumento {int(a.min())} < 0)")
    values = np.ones(a.shape[0])
    for value in np.unique(a):
        prod = 1.0
        k = 1
        while True:
            term = modulus ** (2 * k + 2 * int(value))
            if depth == 0 and term < 1e-16:
                break
            prod *= 1.0 - term
            if depth and k >= depth:
                break
            k += 1
        values[a == value] = prod ** (num / den)
    return values


def _indicator_ge0(args: List[np.ndarray], params: Tuple[int, ...], modulus: float) -> np.ndarray:
    return (args[0] >= 0).astype(float)


def _linear(args: List[np.ndarray], params: Tuple[int, ...], modulus: float) -> np.ndarray:
    return args[0].astype(float)


register_factor(FactorSpec('sqrt1m', _sqrt1m, 'sqrt1m'))
register_factor(FactorSpec('qpoch', _qpoch, 'qpoch'))
register_factor(FactorSpec('indicator_ge0', _indicator_ge0, 'indicator_ge0', indicator=True))
register_factor(FactorSpec('linear', _linear, 'linear'))


@dataclass(frozen=True)
class CoeffExpr:
    """
    Coeficiente simbólico de um termo monomial.

    Args:
        kappa: Constante complexa κ
        sign: Forma σ, contribui (−1)^{σ(x)}
        modulus: Forma ℓ (expoente dobrado), contribui |q|^{ℓ(x)/2}
        phase: Forma quadrática φ (expoente dobrado), contribui e^{iθφ(x)/2}
        factors: Fatores de função registrados
    """

    kappa: complex
    sign: LinearForm
    modulus: LinearForm
    phase: QuadraticForm
    factors: Tuple[FunctionFactor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kappa', complex(self.kappa))
        dims = {self.sign.dim, self.modulus.dim, self.phase.dim}
        dims.update(a.dim for f in self.factors for a in f.args)
        if len(dims) != 1:
            raise DimensionMismatchError(f"Formas de coeficiente com dimensões {sorted(dims)}")

    @classmethod
    def constant(cls, dim: int, kappa: complex = 1.0) -> 'CoeffExpr':
        return cls(kappa, LinearForm.zero(dim), LinearForm.zero(dim), QuadraticForm.zero(dim))

    @property
    def dim(self) -> int:
        return self.sign.dim

    def evaluate(self, points: np.ndarray, q: QParam) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        values = np.zeros(points.shape[0], dtype=complex)
        mask = np.ones(points.shape[0], dtype=bool)
        regular = []
        for f in self.factors:
            spec = factor_spec(f.name)
            args = [a.evaluate(points) for a in f.args]
            if spec.indicator:
                mask &= spec.func(args, f.params, q.modulus) > 0
            else:
                regular.append((spec, f))
        if not mask.any() or self.kappa == 0:
            return values
        pts = points[mask]
        val = np.full(pts.shape[0], self.kappa, dtype=complex)
        if not self.sign.is_zero:
            val *= np.where(np.mod(self.sign.evaluate(pts), 2) == 0, 1.0, -1.0)
        if not self.modulus.is_zero:
            val *= np.power(q.modulus, self.modulus.evaluate(pts) / 2.0)
        if not self.phase.is_zero:
            val *= np.exp(0.5j * q.angle * self.phase.evaluate(pts))
        for spec, f in regular:
            val *= spec.func([a.evaluate(pts) for a in f.args], f.params, q.modulus)
        values[mask] = val
        return values

    def times(self, other: 'CoeffExpr') -> 'CoeffExpr':
        return CoeffExpr(self.kappa * other.kappa, self.sign + other.sign,
                         self.modulus + other.modulus, self.phase + other.phase,
                         self.factors + other.factors)

    def substitute(self, A: np.ndarray, b: np.ndarray) -> 'CoeffExpr':
        """Coeficiente x ↦ c(Ax + b)."""
        return CoeffExpr(self.kappa, self.sign.substitute(A, b), self.modulus.substitute(A, b),
                         self.phase.substitute(A, b), tuple(f.substitute(A, b) for f in self.factors))

    def conjugate(self) -> 'CoeffExpr':
        return CoeffExpr(self.kappa.conjugate(), self.sign, self.modulus, -self.phase,
                         tuple(f.conjugate() for f in self.factors))

    def embed(self, legs0: Sequence[int], big: int) -> 'CoeffExpr':
        return CoeffExpr(self.kappa, self.sign.embed(legs0, big), self.modulus.embed(legs0, big),
                         self.phase.embed(legs0, big), tuple(f.embed(legs0, big) for f in self.factors))

    def scaled(self, lam: complex) -> 'CoeffExpr':
        return CoeffExpr(self.kappa * lam, self.sign, self.modulus, self.phase, self.factors)

    def has_band_factor(self) -> bool:
        return any(f.name == BAND_FACTOR for f in self.factors)

    def band_orders(self) -> Tuple[int, ...]:
        return tuple(f.params[0] for f in self.factors if f.name == BAND_FACTOR)


def q_power(form: LinearForm) -> CoeffExpr:
    """q^{f(x)}."""
    d = form.dim
    return CoeffExpr(1.0, LinearForm.zero(d), form.scaled(2), QuadraticForm.from_linear(form.scaled(2)))


def qbar_power(form: LinearForm) -> CoeffExpr:
    """q̄^{f(x)}."""
    d = form.dim
    return CoeffExpr(1.0, LinearForm.zero(d), form.scaled(2), QuadraticForm.from_linear(form.scaled(-2)))


def modulus_power(form: LinearForm) -> CoeffExpr:
    """|q|^{f(x)}."""
    d = form.dim
    return CoeffExpr(1.0, LinearForm.zero(d), form.scaled(2), QuadraticForm.zero(d))


def _as_quadratic(form: Union[LinearForm, QuadraticForm]) -> QuadraticForm:
    return form if isinstance(form, QuadraticForm) else QuadraticForm.from_linear(form)


def phase_power(form: Union[LinearForm, QuadraticForm]) -> CoeffExpr:
    """Ph(q)^{f(x)} = e^{iθ f(x)}."""
    form = _as_quadratic(form)
    d = form.dim
    return CoeffExpr(1.0, LinearForm.zero(d), LinearForm.zero(d), form.scaled(2))


def zeta_power(form: Union[LinearForm, QuadraticForm]) -> CoeffExpr:
    """ζ^{f(x)} = e^{2iθ f(x)}."""
    form = _as_quadratic(form)
    d = form.dim
    return CoeffExpr(1.0, LinearForm.zero(d), LinearForm.zero(d), form.scaled(4))


def sign_power(form: LinearForm) -> CoeffExpr:
    """(−1)^{f(x)}."""
    d = form.dim
    return CoeffExpr(1.0, form, LinearForm.zero(d), QuadraticForm.zero(d))


def function_factor(name: str, args: Sequence[LinearForm], params: Sequence[int] = ()) -> CoeffExpr:
    factor_spec(name)
    d = args[0].dim
    base = CoeffExpr.constant(d)
    return CoeffExpr(1.0, base.sign, base.modulus, base.phase,
                     (FunctionFactor(name, tuple(args), tuple(int(p) for p in params)),))


def eval_coeff(c: CoeffExpr, x: IndexLike, q: QParam) -> complex:
    """Valor do coeficiente no ponto x."""
    idx = as_index(x)
    if idx.dim != c.dim:
        raise DimensionMismatchError(f"Ponto de dimensão {idx.dim} para coeficiente de dimensão {c.dim}")
    return complex(c.evaluate(idx.as_array().reshape(1, -1), q)[0])


def _int_det(rows: Sequence[Sequence[int]]) -> int:
    # Bareiss: eliminação sem frações
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _int_inverse(A: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(A.astype(float))).astype(np.int64)
    if not np.array_equal(A @ inv, np.eye(A.shape[0], dtype=np.int64)):
        raise NonUnimodularError("Inversa inteira não encontrada")
    return inv


@dataclass(frozen=True)
class MonomialTerm:
    """
    Termo e_x ↦ coeff(x)·e_{Ax+b}.

    Args:
        matrix: Matriz A (d×d, inteira, |det A| = 1)
        shift: Vetor b
        coeff: Coeficiente simbólico
    """

    matrix: Tuple[Tuple[int, ...], ...]
    shift: Tuple[int, ...]
    coeff: CoeffExpr

    def __post_init__(self):
        matrix = tuple(_as_int_tuple(row) for row in self.matrix)
        shift = _as_int_tuple(self.shift)
        d = len(shift)
        if len(matrix) != d or any(len(row) != d for row in matrix) or self.coeff.dim != d:
            raise DimensionMismatchError("Termo monomial com dimensões inconsistentes")
        if abs(_int_det(matrix)) != 1:
            raise NonUnimodularError(f"|det A| != 1 para A={matrix}")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'shift', shift)

    @classmethod
    def build(cls, dim: int, matrix=None, shift=None, coeff: Optional[CoeffExpr] = None) -> 'MonomialTerm':
        A = np.eye(dim, dtype=np.int64) if matrix is None else np.asarray(matrix, dtype=np.int64)
        b = np.zeros(dim, dtype=np.int64) if shift is None else np.asarray(shift, dtype=np.int64)
        return cls(tuple(tuple(r) for r in A.tolist()), tuple(b.tolist()),
                   coeff if coeff is not None else CoeffExpr.constant(dim))

    @classmethod
    def identity(cls, dim: int) -> 'MonomialTerm':
        return cls.build(dim)

    @property
    def dim(self) -> int:
        return len(self.shift)

    @property
    def A(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.dim, self.dim)

    @property
    def b(self) -> np.ndarray:
        return np.array(self.shift, dtype=np.int64)

    def act(self, points: np.ndarray) -> np.ndarray:
        return points @ self.A.T + self.b

    def compose(self, other: 'MonomialTerm') -> 'MonomialTerm':
        """self ∘ other: primeiro other, depois self."""
        A1, b1, A2, b2 = self.A, self.b, other.A, other.b
        coeff = other.coeff.times(self.coeff.substitute(A2, b2))
        return MonomialTerm.build(self.dim, A1 @ A2, A1 @ b2 + b1, coeff)

    def adjoint(self) -> 'MonomialTerm':
        Ainv = _int_inverse(self.A)
        binv = -Ainv @ self.b
        return MonomialTerm.build(self.dim, Ainv, binv, self.coeff.conjugate().substitute(Ainv, binv))

    def embed(self, legs0: Sequence[int], big: int) -> 'MonomialTerm':
        A = np.eye(big, dtype=np.int64)
        b = np.zeros(big, dtype=np.int64)
        idx = np.array(legs0)
        A[np.ix_(idx, idx)] = self.A
        b[idx] = self.b
        return MonomialTerm.build(big, A, b, self.coeff.embed(legs0, big))

    def scaled(self, lam: complex) -> 'MonomialTerm':
        return MonomialTerm(self.matrix, self.shift, self.coeff.scaled(lam))

    def with_coeff(self, coeff: CoeffExpr) -> 'MonomialTerm':
        return MonomialTerm(self.matrix, self.shift, coeff)

    def image_box(self, lo: np.ndarray, hi: np.ndarray, displacement: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        """Caixa envolvente de {Ax + b} (ou de {(A−I)x + b}) para x na caixa [lo, hi]."""
        A = self.A - np.eye(self.dim, dtype=np.int64) if displacement else self.A
        low = np.minimum(A * lo, A * hi).sum(axis=1) + self.b
        high = np.maximum(A * lo, A * hi).sum(axis=1) + self.b
        return low, high


def term_power(term: MonomialTerm, m: int) -> MonomialTerm:
    """Potência m-ésima (m < 0 usa o adjunto, que é o inverso para termos unimodulares)."""
    base = term if m >= 0 else term.adjoint()
    result = MonomialTerm.identity(term.dim)
    for _ in range(abs(m)):
        result = base.compose(result)
    return result


@dataclass(frozen=True)
class ShiftOperator:
    """
    Soma finita de termos monomiais afins em d coordenadas.

    Args:
        dim: Número de coordenadas d
        terms: Termos; a ordem não altera a ação
        q: Parâmetro de deformação usado na avaliação dos coeficientes
    """

    dim: int
    terms: Tuple[MonomialTerm, ...]
    q: QParam

    def __post_init__(self):
        terms = tuple(self.terms)
        if any(t.dim != self.dim for t in terms):
            raise DimensionMismatchError(f"Termos com dimensões diferentes de d={self.dim}")
        object.__setattr__(self, 'terms', terms)

    @classmethod
    def identity(cls, dim: int, q: QParam) -> 'ShiftOperator':
        return cls(dim, (MonomialTerm.identity(dim),), q)

    @classmethod
    def monomial(cls, q: QParam, dim: int, matrix=None, shift=None,
                 coeff: Optional[CoeffExpr] = None) -> 'ShiftOperator':
        return cls(dim, (MonomialTerm.build(dim, matrix, shift, coeff),), q)

    def _check(self, other: 'Operator') -> None:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Operadores com d={self.dim} e d={other.dim}")
        if other.q != self.q:
            raise ShiftOpError("Operadores construídos com parâmetros q diferentes")

    def apply_batch(self, batch: StateBatch, prune: float = DEFAULT_PRUNE) -> StateBatch:
        if batch.dim != self.dim:
            raise DimensionMismatchError(f"Lote de dimensão {batch.dim} para operador de d={self.dim}")
        tags, coords, amps = [], [], []
        for term in self.terms:
            values = term.coeff.evaluate(batch.coords, self.q) * batch.amps
            keep = np.abs(values) > prune
            if not keep.any():
                continue
            tags.append(batch.tags[keep])
            coords.append(term.act(batch.coords[keep]))
            amps.append(values[keep])
        if not tags:
            return StateBatch(np.zeros(0, dtype=np.int64), np.zeros((0, self.dim), dtype=np.int64),
                              np.zeros(0, dtype=complex), self.dim)
        out = StateBatch(np.concatenate(tags), np.concatenate(coords), np.concatenate(amps), self.dim)
        return out.coalesced(prune)

    def apply(self, v: StateVector, prune: float = DEFAULT_PRUNE) -> StateVector:
        if v.dim != self.dim:
            raise DimensionMismatchError(f"Vetor de dimensão {v.dim} para operador de d={self.dim}")
        return self.apply_batch(StateBatch.from_vectors([v]), prune).vector(0)

    def compose(self, other: 'ShiftOperator') -> 'ShiftOperator':
        self._check(other)
        return ShiftOperator(self.dim, tuple(t1.compose(t2) for t1 in self.terms for t2 in other.terms),
                             self.q)

    def adjoint(self) -> 'ShiftOperator':
        return ShiftOperator(self.dim, tuple(t.adjoint() for t in self.terms), self.q)

    def add(self, other: 'ShiftOperator') -> 'ShiftOperator':
        self._check(other)
        return ShiftOperator(self.dim, self.terms + other.terms, self.q)

    def scale(self, lam: complex) -> 'ShiftOperator':
        return ShiftOperator(self.dim, tuple(t.scaled(lam) for t in self.terms), self.q)

    def embed(self, legs: Sequence[int], big: int) -> 'ShiftOperator':
        legs0 = _legs0(legs, self.dim, big)
        return ShiftOperator(big, tuple(t.embed(legs0, big) for t in self.terms), self.q)

    def structural(self) -> 'ShiftOperator':
        """Colapsa bandas F_m para m = 0; usado só para escolher sondas."""
        kept = tuple(t for t in self.terms if all(m == 0 for m in t.coeff.band_orders()))
        return ShiftOperator(self.dim, kept or (MonomialTerm.identity(self.dim),), self.q)

    def image_box(self, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        boxes = [t.image_box(lo, hi) for t in self.terms]
        return (np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0))

    def margin(self, window: Window) -> np.ndarray:
        """Margens (baixa, alta) por coordenada: deslocamento máximo dos termos sobre a janela."""
        if window.dim != self.dim:
            raise DimensionMismatchError(f"Janela de dimensão {window.dim} para operador de d={self.dim}")
        low = np.zeros(self.dim, dtype=np.int64)
        high = np.zeros(self.dim, dtype=np.int64)
        for term in self.terms:
            dmin, dmax = term.image_box(window.lo_array, window.hi_array, displacement=True)
            low = np.maximum(low, -dmin)
            high = np.maximum(high, dmax)
        return np.stack([low, high], axis=1)

    def __matmul__(self, other: 'Operator') -> 'Operator':
        if isinstance(other, OperatorProduct):
            return OperatorProduct((self,) + other.factors)
        return self.compose(other)

    def __add__(self, other: 'ShiftOperator') -> 'ShiftOperator':
        return self.add(other)

    def __sub__(self, other: 'ShiftOperator') -> 'ShiftOperator':
        return self.add(other.scale(-1.0))

    def __mul__(self, lam: complex) -> 'ShiftOperator':
        return self.scale(lam)

    __rmul__ = __mul__

    @property
    def H(self) -> 'ShiftOperator':
        return self.adjoint()


@dataclass(frozen=True)
class OperatorProduct:
    """
    Produto não avaliado A₁A₂…A_r, aplicado da direita para a esquerda.

    Evita a explosão de termos de compose quando vários fatores têm banda larga.
    """

    factors: Tuple['Operator', ...]

    def __post_init__(self):
        flat: List[ShiftOperator] = []
        for f in self.factors:
            flat.extend(f.factors if isinstance(f, OperatorProduct) else (f,))
        if not flat:
            raise ShiftOpError("Produto vazio")
        for f in flat[1:]:
            flat[0]._check(f)
        object.__setattr__(self, 'factors', tuple(flat))

    @property
    def dim(self) -> int:
        return self.factors[0].dim

    @property
    def q(self) -> QParam:
        return self.factors[0].q

    def apply_batch(self, batch: StateBatch, prune: float = DEFAULT_PRUNE) -> StateBatch:
        for f in reversed(self.factors):
            batch = f.apply_batch(batch, prune)
        return batch

    def apply(self, v: StateVector, prune: float = DEFAULT_PRUNE) -> StateVector:
        return self.apply_batch(StateBatch.from_vectors([v]), prune).vector(0)

    def adjoint(self) -> 'OperatorProduct':
        return OperatorProduct(tuple(f.adjoint() for f in reversed(self.factors)))

    def embed(self, legs: Sequence[int], big: int) -> 'OperatorProduct':
        return OperatorProduct(tuple(f.embed(legs, big) for f in self.factors))

    def structural(self) -> 'OperatorProduct':
        return OperatorProduct(tuple(f.structural() for f in self.factors))

    def expand(self) -> ShiftOperator:
        result = self.factors[-1]
        for f in reversed(self.factors[:-1]):
            result = f.compose(result)
        return result

    def image_box(self, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        for f in reversed(self.factors):
            lo, hi = f.image_box(lo, hi)
        return lo, hi

    def margin(self, window: Window) -> np.ndarray:
        lo, hi = self.image_box(window.lo_array, window.hi_array)
        low = np.maximum(0, window.lo_array - lo)
        high = np.maximum(0, hi - window.hi_array)
        return np.stack([low, high], axis=1)

    def __matmul__(self, other: 'Operator') -> 'OperatorProduct':
        return OperatorProduct((self, other))

    @property
    def H(self) -> 'OperatorProduct':
        return self.adjoint()


Operator = Union[ShiftOperator, OperatorProduct]


def apply(op: Operator, v: StateVector, prune: float = DEFAULT_PRUNE) -> StateVector:
    """Ação exata de op sobre v (sem recorte por janela)."""
    return op.apply(v, prune)


def compose(op1: ShiftOperator, op2: ShiftOperator) -> ShiftOperator:
    """op1 ∘ op2, termo a termo."""
    return op1.compose(op2)


def adjoint(op: Operator) -> Operator:
    return op.adjoint()


def add(op1: ShiftOperator, op2: ShiftOperator) -> ShiftOperator:
    return op1.add(op2)


def scale(op: ShiftOperator, lam: complex) -> ShiftOperator:
    return op.scale(lam)


def embed_legs(op: Operator, legs: Sequence[int], big: int) -> Operator:
    """
    Coloca op nas coordenadas `legs` (numeradas a partir de 1) de um espaço com `big` coordenadas.

    Raises:
        LegMapError: se o mapa não é injetivo ou sai de 1..big
    """
    return op.embed(legs, big)


def margin(op: Operator, window: Window) -> np.ndarray:
    return op.margin(window)


def tensor(*ops: ShiftOperator) -> ShiftOperator:
    """Produto tensorial de operadores em coordenadas consecutivas."""
    big = sum(op.dim for op in ops)
    result = ShiftOperator.identity(big, ops[0].q)
    start = 1
    for op in ops:
        result = result.compose(op.embed(range(start, start + op.dim), big))
        start += op.dim
    return result
