"""
Configuração de uma execução: arquivo chave=valor lido com python-dotenv.

Exemplo de arquivo:

    q_mod=0.5
    q_arg_pi=1/8
    eps_band=1e-10
    lambdas=q;q^2;1@1/3
    window.boson_pentagon=3
    window.pentagon_W=-8:8
"""

import cmath
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import (DEFAULT_BANDED_PROBES, DEFAULT_BANDED_PRUNE, DEFAULT_BOSON_PROBES, DEFAULT_EPS_BAND,
                    DEFAULT_M_CAP, DEFAULT_PROBE_LIMIT, DEFAULT_PROBE_SAMPLE, DEFAULT_PRUNE,
                    DEFAULT_Q_ARG_PI, DEFAULT_Q_MODULUS, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_WORKERS,
                    REPORT_DIR)
from lattice import Window
from shiftop import QParam, QParamError
from qexp import QExpDomainError, grid_exponent


class ConfigError(Exception):
    """Arquivo ou valor de configuração inválido."""


def parse_pi_fraction(text: str) -> float:
    """'a/b' (ou decimal) como múltiplo de π, devolvido em radianos."""
    try:
        return math.pi * float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Ângulo inválido '{text}': {e}") from e


def parse_lambda(text: str, q: QParam) -> complex:
    """
    Converte uma entrada da lista de λ.

    Formatos: '0', 'q', 'q^k', 'r@a/b' (= |q|^r e^{iπa/b}).

    Raises:
        ConfigError: se o formato é desconhecido ou λ está fora de ℂ̄^|q|
    """
    token = text.strip()
    try:
        if token == '0':
            value = 0j
        elif token == 'q':
            value = q.q
        elif token.startswith('q^'):
            value = q.q ** int(token[2:])
        elif '@' in token:
            power, angle = token.split('@', 1)
            value = q.modulus ** int(power) * cmath.exp(1j * parse_pi_fraction(angle))
        else:
            raise ConfigError(f"λ em formato desconhecido: '{text}'")
        grid_exponent(value, q.modulus)
    except (ValueError, QExpDomainError) as e:
        raise ConfigError(f"λ inválido '{text}': {e}") from e
    return value


def _parse_window(text: str) -> Tuple[int, int]:
    try:
        if ':' in text:
            lo, hi = (int(v) for v in text.split(':', 1))
        else:
            hi = int(text)
            lo = -hi
    except ValueError as e:
        raise ConfigError(f"Janela inválida '{text}': {e}") from e
    if lo > hi:
        raise ConfigError(f"Janela vazia '{text}'")
    return lo, hi


@dataclass(frozen=True)
class RunConfig:
    """
    Parâmetros de uma execução da suíte.

    Todos os campos têm padrão vindo de config.py; `load` só substitui o que o
    arquivo informa.
    """

    q_mod: float = DEFAULT_Q_MODULUS
    q_angle: float = field(default_factory=lambda: parse_pi_fraction(DEFAULT_Q_ARG_PI))
    q_angle_label: str = f"{DEFAULT_Q_ARG_PI}π"
    eps_band: float = DEFAULT_EPS_BAND
    samples: int = DEFAULT_SAMPLES
    m_cap: int = DEFAULT_M_CAP
    prune: float = DEFAULT_PRUNE
    banded_prune: float = DEFAULT_BANDED_PRUNE
    lambdas: Tuple[str, ...] = ('q', 'q^2', '1@1/3')
    r_max: int = 12
    pochhammer_depth: int = 0
    l_min: int = 1
    l_max: int = 8
    k_limit: int = 40
    tol_exact: float = 1e-12
    tol_banded: float = 1e-8
    tol_table: float = 1e-9
    tol_oracle: float = 1e-10
    decay_band: float = 0.1
    probe_limit: int = DEFAULT_PROBE_LIMIT
    probe_sample: int = DEFAULT_PROBE_SAMPLE
    banded_probes: int = DEFAULT_BANDED_PROBES
    boson_probes: int = DEFAULT_BOSON_PROBES
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    out_dir: str = REPORT_DIR
    checks: Tuple[str, ...] = ()
    windows: Tuple[Tuple[str, Tuple[int, int]], ...] = ()

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigError: na primeira violação encontrada
        """
        try:
            q = self.q_param()
        except QParamError as e:
            raise ConfigError(str(e)) from e
        for name in ('eps_band', 'tol_exact', 'tol_banded', 'tol_table', 'tol_oracle', 'decay_band'):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} precisa ser positivo, recebido {getattr(self, name)}")
        if self.samples < 16 or self.samples % 2:
            raise ConfigError(f"samples precisa ser par e >= 16, recebido {self.samples}")
        if self.l_min < 1 or self.l_min >= self.l_max:
            raise ConfigError(f"Faixa l inválida: [{self.l_min}, {self.l_max}]")
        for name in ('m_cap', 'r_max', 'k_limit', 'probe_limit', 'probe_sample', 'banded_probes',
                     'boson_probes', 'workers'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} precisa ser >= 1, recebido {getattr(self, name)}")
        if self.pochhammer_depth < 0:
            raise ConfigError("pochhammer_depth não pode ser negativo")
        for name, (lo, hi) in self.windows:
            if lo > hi:
                raise ConfigError(f"Janela vazia para {name}: [{lo}, {hi}]")
        for token in self.lambdas:
            parse_lambda(token, q)

    def q_param(self) -> QParam:
        return QParam(self.q_mod, self.q_angle)

    def lambda_values(self) -> List[complex]:
        q = self.q_param()
        return [parse_lambda(t, q) for t in self.lambdas]

    def window_for(self, check: str, dim: int, default_radius: int) -> Window:
        for name, (lo, hi) in self.windows:
            if name == check:
                return Window.from_bounds(dim, lo, hi)
        return Window.cube(dim, default_radius)

    def with_overrides(self, **changes: Any) -> 'RunConfig':
        """Cópia com campos trocados; None é ignorado."""
        changes = {k: v for k, v in changes.items() if v is not None}
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"Campos desconhecidos: {sorted(unknown)}")
        return replace(self, **changes)

    def echo(self) -> Dict[str, Any]:
        out = asdict(self)
        out['lambdas'] = list(self.lambdas)
        out['checks'] = list(self.checks)
        out['windows'] = {name: [lo, hi] for name, (lo, hi) in self.windows}
        out['q'] = self.q_param().describe()
        return out


_FLOAT_KEYS = {'q_mod', 'eps_band', 'prune', 'banded_prune', 'tol_exact', 'tol_banded', 'tol_table',
               'tol_oracle', 'decay_band'}
_INT_KEYS = {'samples', 'm_cap', 'r_max', 'pochhammer_depth', 'l_min', 'l_max', 'k_limit', 'probe_limit',
             'probe_sample', 'banded_probes', 'boson_probes', 'seed', 'workers'}


def config_from_mapping(values: Mapping[str, Optional[str]]) -> RunConfig:
    """
    Monta a RunConfig a partir de pares chave=valor já lidos.

    Raises:
        ConfigError: chave desconhecida ou valor ilegível
    """
    kwargs: Dict[str, Any] = {}
    windows: Dict[str, Tuple[int, int]] = {}
    q_re = q_im = None
    for key, raw in values.items():
        key = key.strip()
        text = (raw or '').strip()
        try:
            if key in _FLOAT_KEYS:
                kwargs[key] = float(text)
            elif key in _INT_KEYS:
                kwargs[key] = int(text)
            elif key == 'q_arg_pi':
                kwargs['q_angle'] = parse_pi_fraction(text)
                kwargs['q_angle_label'] = f"{text}π"
            elif key == 'q_arg':
                kwargs['q_angle'] = float(text)
                kwargs['q_angle_label'] = f"{text} rad"
            elif key == 'q_re':
                q_re = float(text)
            elif key == 'q_im':
                q_im = float(text)
            elif key == 'lambdas':
                kwargs['lambdas'] = tuple(t.strip() for t in text.split(';') if t.strip())
            elif key == 'checks':
                kwargs['checks'] = tuple(t.strip() for t in text.split(',') if t.strip())
            elif key == 'out_dir':
                kwargs['out_dir'] = text
            elif key.startswith('window.'):
                windows[key[len('window.'):]] = _parse_window(text)
            else:
                raise ConfigError(f"Chave desconhecida: {key}")
        except ValueError as e:
            raise ConfigError(f"Valor inválido para {key}: '{text}'") from e
    if q_re is not None or q_im is not None:
        value = complex(q_re or 0.0, q_im or 0.0)
        kwargs['q_mod'] = abs(value)
        kwargs['q_angle'] = math.atan2(value.imag, value.real)
        kwargs['q_angle_label'] = f"{kwargs['q_angle']:.12g} rad"
    if windows:
        kwargs['windows'] = tuple(sorted(windows.items()))
    return RunConfig(**kwargs)


def load_config(path: Optional[str] = None) -> RunConfig:
    """
    Lê o arquivo de configuração; sem caminho devolve os padrões.

    Raises:
        ConfigError: arquivo ausente ou inválido
    """
    if path is None:
        return RunConfig()
    if not os.path.isfile(path):
        raise ConfigError(f"Arquivo de configuração não encontrado: {path}")
    config = config_from_mapping(dotenv_values(path))
    logging.info(f"Configuração carregada de {path}: {config.q_param().describe()}, "
                 f"eps_band={config.eps_band:g}, samples={config.samples}")
    return config
