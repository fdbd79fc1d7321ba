"""
Medição de resíduos em interiores seguros e registro das verificações nomeadas.

Cada verificação devolve casos: identidades entre operadores (medidas em sondas da
base), medições escalares já prontas ou famílias com decaimento geométrico.
"""

import logging
import os
import sys
import threading
import time
import traceback
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import DEFAULT_PRUNE, TOOL_VERSION
from lattice import (DimensionMismatchError, EmptyInteriorError, StateBatch, Window, WindowLeakError,
                     interior)
from shiftop import Operator, QParam
from qexp import band_cutoff
from run_config import RunConfig

SCHEMA_VERSION = 1
DECAY_FLOOR = 1e-15
CHUNK_EXACT = 512
CHUNK_BANDED = 4


class VerifyError(Exception):
    """Erro base do motor de verificação."""


class CheckNotFoundError(VerifyError):
    """Nome ou código de verificação desconhecido."""


class SkipCheck(VerifyError):
    """A verificação não se aplica à configuração atual."""


class ToleranceClass(str, Enum):
    EXACT = 'EXACT'
    BANDED = 'BANDED'
    DECAY = 'DECAY'
    TABLE = 'TABLE'
    SCALAR = 'SCALAR'


@dataclass(frozen=True)
class IdentityCase:
    """
    Identidade lhs = rhs medida em sondas da base.

    Args:
        label: Rótulo do caso dentro da verificação
        lhs: Lado esquerdo
        rhs: Lado direito
        banded: Usa tolerância e poda de operadores com banda
        window: Janela própria (senão a da verificação)
        probes: Sondas fixas (senão a política de sondagem)
        sample_count: Quantidade de sondas aleatórias para casos com banda
    """

    label: str
    lhs: Operator
    rhs: Operator
    banded: bool = False
    window: Optional[Window] = None
    probes: Optional[np.ndarray] = None
    sample_count: Optional[int] = None


@dataclass(frozen=True)
class Measurement:
    """Resíduo já calculado (tabelas, escalares, oráculos)."""

    label: str
    residual: float
    tolerance: float
    probes: int = 0


@dataclass(frozen=True)
class DecayCase:
    """
    Família l ↦ op_l que deve convergir para target com razão geométrica esperada.

    Args:
        expected_ratio: Razão esperada; None exige resíduos nulos
        weight: Fator l ↦ w_l multiplicando o resíduo (ex. |q|^{−l})
    """

    label: str
    family: Callable[[int], Operator]
    target: Operator
    probes: np.ndarray
    expected_ratio: Optional[float]
    weight: Optional[Callable[[int], float]] = None


Case = Union[IdentityCase, Measurement, DecayCase]


@dataclass(frozen=True)
class DecayFit:
    ls: Tuple[int, ...]
    residuals: Tuple[float, ...]
    ratio: Optional[float]
    exact: bool
    monotone_violations: int

    def to_dict(self) -> Dict[str, Any]:
        return {'l': list(self.ls), 'residuals': list(self.residuals), 'ratio': self.ratio,
                'exact': self.exact, 'monotone_violations': self.monotone_violations}


@dataclass
class CaseResult:
    label: str
    residual: float
    tolerance: float
    probes: int
    passed: bool
    window: str = ''
    decay: Optional[DecayFit] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {'label': self.label, 'residual': self.residual, 'tolerance': self.tolerance,
               'probes': self.probes, 'passed': self.passed, 'window': self.window}
        if self.decay is not None:
            out['decay'] = self.decay.to_dict()
        return out


@dataclass
class CheckResult:
    """Resultado agregado de uma verificação: pass ⇔ todos os casos passam."""

    code: str
    name: str
    anchor: str
    tolerance_class: str
    window: str
    probes: int
    residual: float
    tolerance: float
    passed: bool
    elapsed: float
    skipped: bool = False
    error: Optional[str] = None
    cases: List[CaseResult] = field(default_factory=list)

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        out = {
            'code': self.code, 'name': self.name, 'anchor': self.anchor,
            'tolerance_class': self.tolerance_class, 'window': self.window, 'probes': self.probes,
            'residual': self.residual, 'tolerance': self.tolerance, 'passed': self.passed,
            'skipped': self.skipped, 'error': self.error,
            'cases': [c.to_dict() for c in self.cases],
        }
        if include_timings:
            out['elapsed'] = self.elapsed
        return out


@dataclass(frozen=True)
class IdentityCheck:
    code: str
    name: str
    anchor: str
    tolerance_class: ToleranceClass
    dim: int
    radius: int
    build: Callable[['CheckContext'], List[Case]]

    @property
    def order(self) -> int:
        return int(self.code[1:])


_REGISTRY: Dict[str, IdentityCheck] = {}
_ALIASES: Dict[str, str] = {}

DEFAULT_RADIUS = {ToleranceClass.EXACT: 8, ToleranceClass.BANDED: 6, ToleranceClass.DECAY: 8,
                  ToleranceClass.TABLE: 6, ToleranceClass.SCALAR: 8}


def identity_check(code: str, name: str, anchor: str, tolerance_class: ToleranceClass,
                   dim: int = 0, radius: Optional[int] = None, aliases: Sequence[str] = ()):
    """Decorador que registra uma verificação; `aliases` são nomes alternativos aceitos por find_check."""
    def decorator(build):
        _REGISTRY[name] = IdentityCheck(code, name, anchor, tolerance_class, dim,
                                        DEFAULT_RADIUS[tolerance_class] if radius is None else radius,
                                        build)
        for alias in aliases:
            _ALIASES[alias] = name
        return build
    return decorator


def registered_checks() -> List[IdentityCheck]:
    return sorted(_REGISTRY.values(), key=lambda c: c.order)


def find_check(key: str) -> IdentityCheck:
    """Busca por nome (pentagon_W), apelido ou código (C1)."""
    key = _ALIASES.get(key, key)
    if key in _REGISTRY:
        return _REGISTRY[key]
    for check in _REGISTRY.values():
        if check.code.lower() == key.lower():
            return check
    raise CheckNotFoundError(f"Verificação desconhecida: {key}")


_BAND_CACHE: Dict[Tuple, int] = {}
_BAND_LOCK = threading.Lock()


def band_for_radius(config: RunConfig, radius: int) -> int:
    """
    M de band_cutoff para n em [−(2R+3), 2R+3], calculado uma vez por configuração.

    O coeficiente descartado entra multiplicado por até |q|^−(R+1) na janela,
    então o corte usa esse peso.
    """
    key = (config.q_mod, config.eps_band, config.samples, config.m_cap, radius)
    with _BAND_LOCK:
        if key in _BAND_CACHE:
            return _BAND_CACHE[key]
    span = 2 * radius + 3
    weight = config.q_mod ** -(radius + 1)
    M = band_cutoff(-span, span, config.eps_band, config.q_param(), config.samples, config.m_cap,
                    coeff_bound=weight)
    with _BAND_LOCK:
        return _BAND_CACHE.setdefault(key, M)


class CheckContext:
    """Configuração, q, janela e gerador aleatório de uma verificação."""

    def __init__(self, config: RunConfig, check: IdentityCheck):
        self.config = config
        self.check = check
        self.q: QParam = config.q_param()
        self.rng = np.random.default_rng(config.seed + zlib.crc32(check.name.encode()))

    def window(self, dim: Optional[int] = None) -> Window:
        return self.config.window_for(self.check.name, dim or self.check.dim, self.check.radius)

    @property
    def radius(self) -> int:
        w = self.window(max(self.check.dim, 1))
        return max(max(abs(v) for v in w.lo), max(abs(v) for v in w.hi))

    @property
    def band(self) -> int:
        return band_for_radius(self.config, self.radius)

    @property
    def samples(self) -> int:
        return self.config.samples


def _structural_safe(ops: Sequence[Operator], points: np.ndarray, window: Window) -> np.ndarray:
    keep = np.ones(points.shape[0], dtype=bool)
    batch = StateBatch.from_points(points)
    for op in ops:
        keep[op.apply_batch(batch).leaks(window)] = False
    return keep


def select_probes(ops: Sequence[Operator], window: Window, rng: np.random.Generator,
                  limit: int, sample: int, count: Optional[int] = None) -> np.ndarray:
    """
    Escolhe sondas cujas imagens estruturais ficam na janela.

    Usa o interior retangular quando existe: todos os pontos se forem até `limit`,
    senão `sample` sorteados. Com interior vazio, sorteia na janela e filtra.

    Args:
        ops: Operadores da identidade
        window: Janela de truncamento
        rng: Gerador com semente fixa
        limit: Máximo de pontos para usar o interior inteiro
        sample: Tamanho da amostra
        count: Número fixo de sondas (verificações com banda)

    Raises:
        EmptyInteriorError: se nenhuma sonda sobrevive
    """
    structural = [op.structural() for op in ops]
    margins = np.zeros((window.dim, 2), dtype=np.int64)
    for op in structural:
        margins = np.maximum(margins, op.margin(window))
    want = count if count is not None else sample
    exhaustive = False
    try:
        inner = interior(window, margins)
        exhaustive = count is None and inner.size <= limit
        candidates = inner.points() if exhaustive else inner.sample(4 * want, rng)
    except EmptyInteriorError:
        candidates = window.sample(min(window.size, 40 * want), rng)
    keep = _structural_safe(structural, candidates, window)
    if not keep.any():
        raise EmptyInteriorError(f"Nenhuma sonda segura em {window.describe()}")
    chosen = candidates[keep]
    return chosen if exhaustive else chosen[:want]


def residual(lhs: Operator, rhs: Operator, window: Optional[Window], probes: np.ndarray,
             prune: float = DEFAULT_PRUNE, check_leaks: bool = True, workers: int = 1,
             chunk: int = CHUNK_EXACT) -> float:
    """
    max_e ‖lhs·e − rhs·e‖ / max(1, ‖rhs·e‖) sobre as sondas.

    Pesos como ζ^{±1} e |q|^{−k} fazem ‖rhs·e‖ crescer com a janela;
    o denominador mede o erro na precisão relativa da máquina.

    Raises:
        WindowLeakError: se check_leaks e alguma imagem sai da janela
    """
    if lhs.dim != rhs.dim:
        raise DimensionMismatchError(f"Lados com d={lhs.dim} e d={rhs.dim}")
    probes = np.asarray(probes, dtype=np.int64).reshape(-1, lhs.dim)

    def run(points: np.ndarray) -> float:
        batch = StateBatch.from_points(points)
        left = lhs.apply_batch(batch, prune)
        right = rhs.apply_batch(batch, prune)
        if check_leaks and window is not None:
            leaked = np.union1d(left.leaks(window), right.leaks(window))
            if leaked.size:
                raise WindowLeakError(
                    f"Sonda {points[leaked[0]].tolist()} produziu amplitude fora de {window.describe()}")
        count = points.shape[0]
        scale = np.maximum(1.0, right.norms(count))
        return float((left.difference(right).norms(count) / scale).max(initial=0.0))

    chunks = [probes[s:s + chunk] for s in range(0, probes.shape[0], chunk)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(run, chunks))
    else:
        values = [run(c) for c in chunks]
    return max(values, default=0.0)


def fit_decay(ls: Sequence[int], residuals: Sequence[float]) -> DecayFit:
    """Ajuste de mínimos quadrados de log r_l; resíduos abaixo de DECAY_FLOOR encerram o ajuste."""
    usable_l, usable_r = [], []
    for l, r in zip(ls, residuals):
        if r < DECAY_FLOOR:
            break
        usable_l.append(l)
        usable_r.append(r)
    violations = sum(1 for a, b in zip(residuals, residuals[1:]) if b > a)
    exact = all(r < DECAY_FLOOR for r in residuals)
    ratio = None
    if len(usable_l) >= 2:
        slope = np.polyfit(np.array(usable_l, dtype=float), np.log(np.array(usable_r)), 1)[0]
        ratio = float(np.exp(slope))
    return DecayFit(tuple(int(l) for l in ls), tuple(float(r) for r in residuals), ratio, exact, violations)


def decay_sequence(family: Callable[[int], Operator], target: Operator, probes: np.ndarray,
                   l_range: Iterable[int], prune: float = DEFAULT_PRUNE,
                   weight: Optional[Callable[[int], float]] = None) -> DecayFit:
    """Resíduos r_l = w_l·max_e ‖family(l)e − target·e‖ e a razão geométrica ajustada."""
    ls = list(l_range)
    values = []
    for l in ls:
        r = residual(family(l), target, None, probes, prune, check_leaks=False)
        values.append(r * (weight(l) if weight else 1.0))
    return fit_decay(ls, values)


def _evaluate(ctx: CheckContext, case: Case, workers: int) -> CaseResult:
    config = ctx.config
    if isinstance(case, Measurement):
        return CaseResult(case.label, case.residual, case.tolerance, case.probes,
                          case.residual <= case.tolerance)
    if isinstance(case, DecayCase):
        fit = decay_sequence(case.family, case.target, case.probes,
                             range(config.l_min, config.l_max + 1), config.prune, case.weight)
        if case.expected_ratio is None:
            passed = fit.exact
            value = max(fit.residuals, default=0.0)
            tol = DECAY_FLOOR
        else:
            passed = fit.ratio is not None and \
                abs(fit.ratio - case.expected_ratio) <= config.decay_band * case.expected_ratio
            value = abs(fit.ratio - case.expected_ratio) / case.expected_ratio if fit.ratio else float('inf')
            tol = config.decay_band
        return CaseResult(case.label, value, tol, len(case.probes), passed, decay=fit)
    window = case.window or ctx.window(case.lhs.dim)
    if case.probes is not None:
        probes = np.asarray(case.probes, dtype=np.int64).reshape(-1, case.lhs.dim)
    elif case.banded:
        count = config.boson_probes if ctx.check.name == 'boson_pentagon' else config.banded_probes
        if case.sample_count is not None:
            count = min(count, case.sample_count)
        probes = select_probes([case.lhs, case.rhs], window, ctx.rng, config.probe_limit,
                               config.probe_sample, count)
    else:
        probes = select_probes([case.lhs, case.rhs], window, ctx.rng, config.probe_limit,
                               config.probe_sample)
    if case.banded:
        value = residual(case.lhs, case.rhs, window, probes, config.banded_prune, check_leaks=False,
                         workers=workers, chunk=CHUNK_BANDED)
        tol = config.tol_banded
    else:
        value = residual(case.lhs, case.rhs, window, probes, config.prune, check_leaks=True,
                         workers=workers, chunk=CHUNK_EXACT)
        tol = config.tol_exact
    return CaseResult(case.label, value, tol, int(probes.shape[0]), value <= tol, window.describe())


def run_check(name: str, config: RunConfig, workers: Optional[int] = None) -> CheckResult:
    """
    Executa uma verificação; falhas de construção viram resultado com erro.

    Raises:
        CheckNotFoundError: se o nome não está registrado
    """
    check = find_check(name)
    workers = config.workers if workers is None else workers
    ctx = CheckContext(config, check)
    start = time.perf_counter()
    logging.info(f"Iniciando verificação {check.code} {check.name}")
    base = dict(code=check.code, name=check.name, anchor=check.anchor,
                tolerance_class=check.tolerance_class.value)
    try:
        cases = [_evaluate(ctx, case, workers) for case in check.build(ctx)]
    except SkipCheck as e:
        logging.info(f"Verificação {check.name} ignorada: {e}")
        return CheckResult(window='', probes=0, residual=0.0, tolerance=0.0, passed=True,
                           elapsed=time.perf_counter() - start, skipped=True, error=str(e), **base)
    except Exception as e:
        logging.error(f"Erro na verificação {check.name}: {e}\n{traceback.format_exc()}")
        return CheckResult(window='', probes=0, residual=float('nan'), tolerance=0.0, passed=False,
                           elapsed=time.perf_counter() - start, error=f"{type(e).__name__}: {e}", **base)
    elapsed = time.perf_counter() - start
    worst = max(cases, key=lambda c: c.residual / c.tolerance if c.tolerance else c.residual)
    result = CheckResult(window=worst.window, probes=sum(c.probes for c in cases),
                         residual=max(c.residual for c in cases), tolerance=worst.tolerance,
                         passed=all(c.passed for c in cases), elapsed=elapsed, cases=cases, **base)
    status = 'OK' if result.passed else 'FALHOU'
    logging.info(f"Verificação {check.code} {check.name}: {status}, resíduo {result.residual:.3g}, "
                 f"{result.probes} sondas, {elapsed:.2f}s")
    return result


@dataclass
class Report:
    """Relatório de uma execução da suíte."""

    config: Dict[str, Any]
    results: List[CheckResult]
    elapsed: float
    tool_version: str = TOOL_VERSION
    schema_version: int = SCHEMA_VERSION

    @property
    def summary(self) -> Dict[str, int]:
        return {
            'total': len(self.results),
            'passed': sum(1 for r in self.results if r.passed and not r.skipped),
            'failed': sum(1 for r in self.results if not r.passed),
            'skipped': sum(1 for r in self.results if r.skipped),
            'errors': sum(1 for r in self.results if r.error and not r.skipped),
        }

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        out = {
            'schema_version': self.schema_version,
            'tool_version': self.tool_version,
            'config': self.config,
            'summary': self.summary,
            'results': [r.to_dict(include_timings) for r in self.results],
        }
        if include_timings:
            out['elapsed'] = self.elapsed
        return out


def run_suite(config: RunConfig, names: Optional[Sequence[str]] = None) -> Report:
    """
    Executa as verificações selecionadas em paralelo; resultados ordenados pelo código.

    A suíte continua quando uma verificação falha ou levanta erro.
    """
    keys = list(names or config.checks or [c.name for c in registered_checks()])
    checks = [find_check(k) for k in keys]
    start = time.perf_counter()
    logging.info(f"Executando {len(checks)} verificações com {config.workers} workers, "
                 f"{config.q_param().describe()}")
    if config.workers > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda c: run_check(c.name, config, workers=1), checks))
    else:
        results = [run_check(c.name, config) for c in checks]
    results.sort(key=lambda r: int(r.code[1:]))
    report = Report(config.echo(), results, time.perf_counter() - start)
    s = report.summary
    logging.info(f"Suíte concluída: {s['passed']} ok, {s['failed']} falhas, {s['skipped']} ignoradas "
                 f"em {report.elapsed:.1f}s")
    return report
