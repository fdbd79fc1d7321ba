"""
Índices de rede, janelas de truncamento e vetores de estado esparsos sobre ℓ²(ℤ)^{⊗d}.

Cada coordenada de um índice corresponde a uma perna ℓ²(ℤ) do produto tensorial;
e_{i,j} ∈ ℓ²(ℤ)⊗ℓ²(ℤ) é o índice (i, j) com d = 2.
"""

import os
import sys
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_PRUNE


class LatticeError(Exception):
    """Erro base das operações sobre a rede."""


class DimensionMismatchError(LatticeError):
    """Objetos com dimensões d diferentes foram combinados."""


class EmptyInteriorError(LatticeError):
    """O interior seguro de uma janela ficou vazio."""


class WindowLeakError(LatticeError):
    """Uma sonda produziu amplitude fora da janela original."""


@dataclass(frozen=True)
class LatticeIndex:
    """Ponto de ℤ^d."""

    coords: Tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords:
            raise LatticeError("Índice de rede precisa de ao menos uma coordenada")
        object.__setattr__(self, 'coords', coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __getitem__(self, k: int) -> int:
        return self.coords[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)


IndexLike = Union[LatticeIndex, Sequence[int]]


def as_index(idx: IndexLike) -> LatticeIndex:
    if isinstance(idx, LatticeIndex):
        return idx
    return LatticeIndex(tuple(idx))


@dataclass(frozen=True)
class Window:
    """
    Caixa retangular de truncamento ∏_k [lo_k, hi_k].

    Args:
        lo: Limites inferiores por coordenada
        hi: Limites superiores por coordenada
    """

    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise LatticeError(f"Limites de janela inconsistentes: lo={lo}, hi={hi}")
        if any(a > b for a, b in zip(lo, hi)):
            raise LatticeError(f"Janela vazia: lo={lo}, hi={hi}")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @classmethod
    def cube(cls, dim: int, radius: int) -> 'Window':
        """Janela [−radius, radius]^dim."""
        return cls((-radius,) * dim, (radius,) * dim)

    @classmethod
    def from_bounds(cls, dim: int, lo: int, hi: int) -> 'Window':
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        total = 1
        for s in self.shape:
            total *= s
        return total

    @property
    def lo_array(self) -> np.ndarray:
        return np.array(self.lo, dtype=np.int64)

    @property
    def hi_array(self) -> np.ndarray:
        return np.array(self.hi, dtype=np.int64)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Máscara booleana dos pontos (K×d) que pertencem à janela."""
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        return np.all((points >= self.lo_array) & (points <= self.hi_array), axis=1)

    def __contains__(self, idx: IndexLike) -> bool:
        idx = as_index(idx)
        if idx.dim != self.dim:
            return False
        return bool(self.contains(idx.as_array())[0])

    def points(self) -> np.ndarray:
        """Todos os pontos da janela em ordem lexicográfica."""
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(self.lo, self.hi)]
        grid = np.meshgrid(*axes, indexing='ij')
        return np.stack([g.reshape(-1) for g in grid], axis=1)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """
        Amostra uniforme sem repetição de pontos da janela.

        Args:
            count: Número de pontos desejado
            rng: Gerador pseudoaleatório (semente fixada pelo chamador)

        Returns:
            Matriz (min(count, size) × d) de pontos distintos
        """
        if count >= self.size:
            return self.points()
        chosen = np.empty((0, self.dim), dtype=np.int64)
        while chosen.shape[0] < count:
            draw = rng.integers(self.lo_array, self.hi_array + 1, size=(2 * count, self.dim))
            merged = np.concatenate([chosen, draw])
            _, first = np.unique(merged, axis=0, return_index=True)
            chosen = merged[np.sort(first)]
        return chosen[:count]

    def describe(self) -> str:
        if len(set(self.lo)) == 1 and len(set(self.hi)) == 1:
            return f"[{self.lo[0]},{self.hi[0]}]^{self.dim}"
        return " x ".join(f"[{a},{b}]" for a, b in zip(self.lo, self.hi))


def interior(window: Window, margins) -> Window:
    """
    Encolhe a janela pelas margens (baixa, alta) de cada coordenada.

    Args:
        window: Janela original
        margins: Sequência de pares inteiros não negativos, um por coordenada

    Returns:
        Janela em que qualquer mapa de índices com deslocamento limitado pelas
        margens permanece dentro da janela original
    """
    margins = np.asarray(margins, dtype=np.int64).reshape(-1, 2)
    if margins.shape[0] != window.dim:
        raise DimensionMismatchError(
            f"Margens para {margins.shape[0]} coordenadas, janela tem {window.dim}")
    if np.any(margins < 0):
        raise LatticeError(f"Margens negativas: {margins.tolist()}")
    lo = window.lo_array + margins[:, 0]
    hi = window.hi_array - margins[:, 1]
    if np.any(lo > hi):
        raise EmptyInteriorError(
            f"Interior vazio de {window.describe()} com margens {margins.tolist()}")
    return Window(tuple(lo.tolist()), tuple(hi.tolist()))


def _row_keys(rows: np.ndarray) -> Optional[np.ndarray]:
    # Codificação mista em um único int64 quando a caixa envolvente cabe em 62 bits
    mins = rows.min(axis=0)
    spans = rows.max(axis=0) - mins + 1
    total = 1
    for s in spans.tolist():
        total *= int(s)
    if total >= 2 ** 62:
        return None
    strides = np.ones(rows.shape[1], dtype=np.int64)
    for k in range(rows.shape[1] - 2, -1, -1):
        strides[k] = strides[k + 1] * spans[k + 1]
    return (rows - mins) @ strides


def coalesce_rows(rows: np.ndarray, amps: np.ndarray,
                  prune: float = DEFAULT_PRUNE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Soma amplitudes de linhas repetidas e descarta as que ficam abaixo do limiar.

    Args:
        rows: Matriz inteira K×c (coordenadas, eventualmente com etiqueta)
        amps: Amplitudes complexas, uma por linha
        prune: Limiar; amplitudes com módulo <= prune são removidas

    Returns:
        Tupla (linhas únicas em ordem lexicográfica, amplitudes somadas)
    """
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1]), amps.astype(complex)
    keys = _row_keys(rows)
    if keys is None:
        uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    else:
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        uniq = rows[first]
    inverse = np.asarray(inverse).reshape(-1)
    real = np.bincount(inverse, weights=amps.real, minlength=uniq.shape[0])
    imag = np.bincount(inverse, weights=amps.imag, minlength=uniq.shape[0])
    summed = real + 1j * imag
    keep = np.abs(summed) > prune
    return uniq[keep], summed[keep]


@dataclass(frozen=True)
class StateVector:
    """
    Vetor esparso de ℓ²(ℤ)^{⊗d}: linhas de coordenadas únicas e suas amplitudes.
    """

    coords: np.ndarray
    amps: np.ndarray
    dim: int

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.int64).reshape(-1, self.dim)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if coords.shape[0] != amps.shape[0]:
            raise LatticeError("Número de coordenadas e amplitudes difere")
        coords.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, 'coords', coords)
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def from_arrays(cls, coords: np.ndarray, amps: np.ndarray, dim: Optional[int] = None,
                    prune: float = DEFAULT_PRUNE) -> 'StateVector':
        coords = np.asarray(coords, dtype=np.int64)
        if dim is None:
            dim = coords.shape[1]
        coords = coords.reshape(-1, dim)
        uniq, summed = coalesce_rows(coords, np.asarray(amps, dtype=complex).reshape(-1), prune)
        return cls(uniq, summed, dim)

    @classmethod
    def from_dict(cls, mapping: Dict[Tuple[int, ...], complex], dim: int) -> 'StateVector':
        if not mapping:
            return cls.zero(dim)
        coords = np.array(list(mapping.keys()), dtype=np.int64).reshape(-1, dim)
        amps = np.array(list(mapping.values()), dtype=complex)
        return cls.from_arrays(coords, amps, dim)

    @classmethod
    def zero(cls, dim: int) -> 'StateVector':
        return cls(np.zeros((0, dim), dtype=np.int64), np.zeros(0, dtype=complex), dim)

    def __len__(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def amplitude(self, idx: IndexLike) -> complex:
        target = as_index(idx).as_array()
        hit = np.all(self.coords == target, axis=1)
        return complex(self.amps[hit].sum()) if hit.any() else 0j

    def to_dict(self) -> Dict[Tuple[int, ...], complex]:
        return {tuple(int(c) for c in row): complex(a) for row, a in zip(self.coords, self.amps)}

    def scale(self, lam: complex) -> 'StateVector':
        return StateVector.from_arrays(self.coords, self.amps * lam, self.dim)

    def __add__(self, other: 'StateVector') -> 'StateVector':
        _check_dims(self.dim, other.dim)
        return StateVector.from_arrays(np.concatenate([self.coords, other.coords]),
                                       np.concatenate([self.amps, other.amps]), self.dim)

    def __sub__(self, other: 'StateVector') -> 'StateVector':
        return self + other.scale(-1.0)

    def support_in(self, window: Window) -> bool:
        _check_dims(self.dim, window.dim)
        return bool(np.all(window.contains(self.coords)))


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"Dimensões incompatíveis: {a} != {b}")


def basis_vector(idx: IndexLike) -> StateVector:
    """Vetor unitário e_idx."""
    idx = as_index(idx)
    return StateVector(idx.as_array().reshape(1, -1), np.ones(1, dtype=complex), idx.dim)


def inner(a: StateVector, b: StateVector) -> complex:
    """
    Produto interno ⟨a|b⟩, conjugando o PRIMEIRO argumento.

    Raises:
        DimensionMismatchError: se as dimensões diferem
    """
    _check_dims(a.dim, b.dim)
    if len(a) == 0 or len(b) == 0:
        return 0j
    merged = np.concatenate([a.coords, b.coords])
    _, inverse = np.unique(merged, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    size = int(inverse.max()) + 1
    va = np.zeros(size, dtype=complex)
    vb = np.zeros(size, dtype=complex)
    va[inverse[:len(a)]] = a.amps
    vb[inverse[len(a):]] = b.amps
    return complex(np.vdot(va, vb))


@dataclass(frozen=True)
class StateBatch:
    """
    Vários estados avaliados de uma vez: cada linha carrega a etiqueta da sonda de origem.
    """

    tags: np.ndarray
    coords: np.ndarray
    amps: np.ndarray
    dim: int

    def __post_init__(self):
        tags = np.asarray(self.tags, dtype=np.int64).reshape(-1)
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, self.dim)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if not (tags.shape[0] == coords.shape[0] == amps.shape[0]):
            raise LatticeError("Lote com tamanhos inconsistentes")
        object.__setattr__(self, 'tags', tags)
        object.__setattr__(self, 'coords', coords)
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def from_points(cls, points: np.ndarray) -> 'StateBatch':
        """Um vetor da base por ponto, etiquetado pela posição na lista."""
        points = np.asarray(points, dtype=np.int64)
        return cls(np.arange(points.shape[0]), points, np.ones(points.shape[0], dtype=complex),
                   points.shape[1])

    @classmethod
    def from_vectors(cls, vectors: Sequence[StateVector]) -> 'StateBatch':
        dim = vectors[0].dim
        for vec in vectors:
            _check_dims(dim, vec.dim)
        tags = np.concatenate([np.full(len(vec), t, dtype=np.int64) for t, vec in enumerate(vectors)])
        coords = np.concatenate([vec.coords for vec in vectors]).reshape(-1, dim)
        amps = np.concatenate([vec.amps for vec in vectors])
        return cls(tags, coords, amps, dim)

    def __len__(self) -> int:
        return self.amps.shape[0]

    def coalesced(self, prune: float = DEFAULT_PRUNE) -> 'StateBatch':
        rows = np.concatenate([self.tags[:, None], self.coords], axis=1)
        uniq, summed = coalesce_rows(rows, self.amps, prune)
        return StateBatch(uniq[:, 0], uniq[:, 1:], summed, self.dim)

    def difference(self, other: 'StateBatch') -> 'StateBatch':
        _check_dims(self.dim, other.dim)
        merged = StateBatch(np.concatenate([self.tags, other.tags]),
                            np.concatenate([self.coords, other.coords]),
                            np.concatenate([self.amps, -other.amps]), self.dim)
        return merged.coalesced(prune=0.0)

    def norms(self, count: int) -> np.ndarray:
        """Norma de cada estado etiquetado 0..count−1."""
        sq = np.bincount(self.tags, weights=np.abs(self.amps) ** 2, minlength=count)
        return np.sqrt(sq[:count])

    def vector(self, tag: int) -> StateVector:
        hit = self.tags == tag
        return StateVector.from_arrays(self.coords[hit], self.amps[hit], self.dim)

    def leaks(self, window: Window) -> np.ndarray:
        """Etiquetas com amplitude fora da janela."""
        outside = ~window.contains(self.coords)
        return np.unique(self.tags[outside])
