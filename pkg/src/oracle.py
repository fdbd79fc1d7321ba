"""
Oráculos densos para conferir o motor de deslocamentos em janelas pequenas.

As matrizes são montadas coluna a coluna a partir da ação na base; produtos e
adjuntos são então feitos com álgebra linear densa do numpy, sem passar pela
composição simbólica de termos.
"""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_SAMPLES
from lattice import StateBatch, StateVector, Window
from shiftop import Operator, QParam, ShiftOperator, embed_legs
from qexp import band_cutoff, qexp_of_operator, qexp_value, split_normal
from constructions import (braiding_ops, comult_ops, generator_ops, x_operator,
                           x_ops)

ORACLE_TOL = 1e-10


class OracleError(Exception):
    """Expressão do conjunto de regressão mal formada."""


def _flat(window: Window, coords: np.ndarray) -> np.ndarray:
    return np.ravel_multi_index(tuple((coords - window.lo_array).T), window.shape)


def dense_matrix(op: Operator, window: Window, columns: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Matriz (size × len(columns)) da compressão de op à janela.

    Args:
        op: Operador com op.dim == window.dim
        window: Janela; linhas e colunas em ordem lexicográfica
        columns: Índices planos das colunas desejadas (padrão: todas)
    """
    points = window.points()
    if columns is None:
        columns = np.arange(window.size)
    out = op.apply_batch(StateBatch.from_points(points[columns]))
    inside = window.contains(out.coords)
    matrix = np.zeros((window.size, len(columns)), dtype=complex)
    np.add.at(matrix, (_flat(window, out.coords[inside]), out.tags[inside]), out.amps[inside])
    return matrix


def safe_columns(op: Operator, window: Window) -> np.ndarray:
    """Máscara das colunas cuja imagem inteira fica dentro da janela."""
    out = op.apply_batch(StateBatch.from_points(window.points()))
    mask = np.ones(window.size, dtype=bool)
    mask[out.leaks(window)] = False
    return mask


def chain_safe_columns(factors: Sequence[Operator], window: Window) -> np.ndarray:
    """
    Colunas x para as quais cada passo de factors[0]·…·factors[-1] fica na janela.

    Nessas colunas o produto das compressões coincide com a compressão do produto.
    """
    mask = safe_columns(factors[-1], window)
    if len(factors) == 1:
        return mask
    rest = chain_safe_columns(factors[:-1], window)
    out = factors[-1].apply_batch(StateBatch.from_points(window.points()))
    inside = window.contains(out.coords)
    bad = out.tags[inside][~rest[_flat(window, out.coords[inside])]]
    mask[np.unique(bad)] = False
    return mask


def qexp_orbit_oracle(normal: ShiftOperator, x0: Sequence[int], M: int) -> StateVector:
    """
    F_q(N)e_{x0} pela decomposição espectral do deslocamento cíclico numa órbita.

    Na órbita x_r = Ph(N)^r x0 o monômio normal age como |N|(x0)·g_{r+1}/g_r·S, com
    S o deslocamento; truncando a órbita num ciclo de tamanho ímpar K ≥ 4M+5, F é
    calculado por autovalores do circulante e o valor do produto infinito.

    Args:
        normal: Monômio normal N
        x0: Ponto inicial
        M: Banda usada pelo motor (define o tamanho da órbita)
    """
    q = normal.q
    form, phase = split_normal(normal.terms[0], q)
    x0 = np.asarray(x0, dtype=np.int64).reshape(1, -1)
    radius = q.modulus ** float(form.evaluate(x0)[0])
    c0 = complex(phase.coeff.evaluate(x0, q)[0])
    x1 = phase.act(x0)
    if np.array_equal(x1, x0):
        return StateVector.from_arrays(x0, np.array([qexp_value(radius * c0, q)]))
    half = 2 * M + 2
    size = 2 * half + 1
    inverse = phase.adjoint()
    points = {0: x0}
    gauge = {0: 1 + 0j}
    for r in range(half):
        points[r + 1] = phase.act(points[r])
        gauge[r + 1] = gauge[r] * complex(phase.coeff.evaluate(points[r], q)[0])
        points[-r - 1] = inverse.act(points[-r])
        gauge[-r - 1] = gauge[-r] / complex(phase.coeff.evaluate(points[-r - 1], q)[0])
    shift = np.roll(np.eye(size), 1, axis=0)
    eigvals, eigvecs = np.linalg.eig(shift)
    values = np.array([qexp_value(radius * w / abs(w), q) for w in eigvals])
    fmat = eigvecs @ np.diag(values) @ np.linalg.inv(eigvecs)
    column = fmat[:, half]
    coords = np.concatenate([points[r] for r in range(-half, half + 1)])
    amps = np.array([column[r + half] * gauge[r] for r in range(-half, half + 1)])
    return StateVector.from_arrays(coords, amps)


@dataclass(frozen=True)
class RegressionEntry:
    """
    Expressão do conjunto de regressão.

    kind: 'compose' (a∘b), 'adjoint' (a*), 'sum' (a+b), 'embed' (a∘b em pernas
    maiores) ou 'qexp' (F(a)e_x contra o oráculo de órbita).
    """

    name: str
    kind: str
    build: Callable[[QParam], Tuple]


def _g(q: QParam, name: str) -> ShiftOperator:
    return generator_ops(q)[name].operator


REGRESSION_SET: Tuple[RegressionEntry, ...] = (
    RegressionEntry('v∘n', 'compose', lambda q: (_g(q, 'v'), _g(q, 'n'))),
    RegressionEntry('n∘v', 'compose', lambda q: (_g(q, 'n'), _g(q, 'v'))),
    RegressionEntry('v∘v*', 'compose', lambda q: (_g(q, 'v'), _g(q, 'v').adjoint())),
    RegressionEntry('P∘n', 'compose', lambda q: (_g(q, 'P'), _g(q, 'n'))),
    RegressionEntry('W∘W', 'compose', lambda q: (_g(q, 'W'), _g(q, 'W'))),
    RegressionEntry('n*', 'adjoint', lambda q: (_g(q, 'n'),)),
    RegressionEntry('(P∘n)*', 'adjoint', lambda q: (_g(q, 'P') @ _g(q, 'n'),)),
    RegressionEntry('n+v', 'sum', lambda q: (_g(q, 'n'), _g(q, 'v'))),
    RegressionEntry('U∘U_β', 'compose', lambda q: (_g(q, 'U'), _g(q, 'U_beta'))),
    RegressionEntry('N̂+z', 'sum', lambda q: (_g(q, 'N_hat'), _g(q, 'z'))),
    RegressionEntry('Z∘Z', 'compose', lambda q: (braiding_ops(q)['Z'].operator,) * 2),
    RegressionEntry('Σ∘Z', 'compose', lambda q: (braiding_ops(q)['Sigma'].operator,
                                                 braiding_ops(q)['Z'].operator)),
    RegressionEntry('Ψ*', 'adjoint', lambda q: (braiding_ops(q)['Psi'].operator,)),
    RegressionEntry('(P⊗n)*', 'adjoint', lambda q: (comult_ops(q)['j2_n'].operator,)),
    RegressionEntry('X∘Y', 'compose', lambda q: (x_ops(q)['X'].operator, x_ops(q)['Y'].operator)),
    RegressionEntry('X*', 'adjoint', lambda q: (x_operator(q),)),
    RegressionEntry('Δ(n) partes', 'sum', lambda q: (comult_ops(q)['j1_n'].operator @ comult_ops(q)['j2_v'].operator.adjoint(),
                                                    comult_ops(q)['j1_v'].operator @ comult_ops(q)['j2_n'].operator)),
    RegressionEntry('(v∘n)₁₃', 'embed', lambda q: (_g(q, 'v'), _g(q, 'n'), (1, 3), 3)),
    RegressionEntry('F(n)', 'qexp', lambda q: (_g(q, 'n'), (1, 0))),
    RegressionEntry('F(X)', 'qexp', lambda q: (x_operator(q), (0, 0, 0, 0))),
)


def _compare_product(a: Operator, b: Operator, ab: Operator, window: Window) -> float:
    cols = np.flatnonzero(chain_safe_columns([a, b], window))
    if cols.size == 0:
        raise OracleError(f"Nenhuma coluna segura em {window.describe()}")
    expected = dense_matrix(a, window) @ dense_matrix(b, window, cols)
    return float(np.max(np.abs(dense_matrix(ab, window, cols) - expected)))


def evaluate_entry(entry: RegressionEntry, q: QParam, radius: int = 3, M: Optional[int] = None,
                   samples: int = DEFAULT_SAMPLES) -> float:
    """Maior desvio por entrada entre o motor e o oráculo denso."""
    parts = entry.build(q)
    if entry.kind == 'compose':
        a, b = parts
        return _compare_product(a, b, a @ b, Window.cube(a.dim, radius))
    if entry.kind == 'embed':
        a, b, legs, big = parts
        ea, eb = embed_legs(a, legs, big), embed_legs(b, legs, big)
        return _compare_product(ea, eb, embed_legs(a @ b, legs, big), Window.cube(big, radius))
    if entry.kind == 'adjoint':
        (a,) = parts
        window = Window.cube(a.dim, radius)
        return float(np.max(np.abs(dense_matrix(a.adjoint(), window) - dense_matrix(a, window).conj().T)))
    if entry.kind == 'sum':
        a, b = parts
        window = Window.cube(a.dim, radius)
        return float(np.max(np.abs(dense_matrix(a + b, window)
                                   - dense_matrix(a, window) - dense_matrix(b, window))))
    if entry.kind == 'qexp':
        normal, x0 = parts
        start = np.asarray(x0, dtype=np.int64).reshape(1, -1)
        if M is None:
            n0 = int(split_normal(normal.terms[0], q)[0].evaluate(start)[0])
            M = band_cutoff(n0, n0, ORACLE_TOL * 1e-3, q, samples)
        engine = qexp_of_operator(normal, M, samples).operator.apply(
            StateVector.from_arrays(start, np.ones(1, dtype=complex)))
        oracle = qexp_orbit_oracle(normal, x0, M)
        return (engine - oracle).norm()
    raise OracleError(f"Tipo de entrada desconhecido: {entry.kind}")


def run_regression(q: QParam, radius: int = 3, samples: int = DEFAULT_SAMPLES,
                   names: Optional[Sequence[str]] = None) -> Dict[str, float]:
    """Avalia o conjunto de regressão; devolve desvio por nome de expressão."""
    results = {}
    for entry in REGRESSION_SET:
        if names is not None and entry.name not in names:
            continue
        results[entry.name] = evaluate_entry(entry, q, radius, samples=samples)
    worst = max(results.values(), default=0.0)
    logging.info(f"Regressão dos oráculos: {len(results)} expressões, desvio máximo {worst:.3g}")
    return results
