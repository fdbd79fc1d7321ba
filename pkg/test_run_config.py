#!/usr/bin/env python3
"""
Testes da configuração de execução (arquivo chave=valor)
"""

import math
import sys
import os

import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from shiftop import QParam
from run_config import ConfigError, RunConfig, config_from_mapping, load_config, parse_lambda, parse_pi_fraction


def test_defaults_are_valid():
    config = RunConfig()
    assert 0 < config.q_mod < 1
    assert config.q_angle == pytest.approx(math.pi / 8)
    assert len(config.lambda_values()) == 3
    assert config.echo()['q'] == config.q_param().describe()


def test_parse_pi_fraction():
    assert parse_pi_fraction('1/3') == pytest.approx(math.pi / 3)
    assert parse_pi_fraction('0') == 0.0
    with pytest.raises(ConfigError):
        parse_pi_fraction('um terço')


def test_parse_lambda_formats():
    q = QParam.from_pi_fraction(0.5, 1, 8)
    assert parse_lambda('0', q) == 0j
    assert parse_lambda('q', q) == pytest.approx(q.q)
    assert parse_lambda('q^-2', q) == pytest.approx(q.q ** -2)
    assert abs(parse_lambda('2@1/2', q)) == pytest.approx(0.25)
    with pytest.raises(ConfigError):
        parse_lambda('0.3', q)
    with pytest.raises(ConfigError):
        parse_lambda('lambda', q)


def test_invalid_modulus_is_config_error():
    with pytest.raises(ConfigError):
        RunConfig(q_mod=1.5)


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        RunConfig(samples=15)
    with pytest.raises(ConfigError):
        RunConfig(l_min=5, l_max=5)
    with pytest.raises(ConfigError):
        RunConfig(tol_exact=0.0)
    with pytest.raises(ConfigError):
        RunConfig(lambdas=('q', '0.7'))


def test_mapping_parses_keys_and_windows():
    config = config_from_mapping({
        'q_mod': '0.3', 'q_arg_pi': '1/4', 'samples': '1024', 'lambdas': 'q; q^2',
        'checks': 'pentagon_W, C2', 'window.boson_pentagon': '3', 'window.pentagon_W': '-2:5',
    })
    assert config.q_mod == 0.3
    assert config.q_angle == pytest.approx(math.pi / 4)
    assert config.lambdas == ('q', 'q^2')
    assert config.checks == ('pentagon_W', 'C2')
    assert config.window_for('boson_pentagon', 9, 6).lo == (-3,) * 9
    assert config.window_for('pentagon_W', 3, 8).hi == (5, 5, 5)
    assert config.window_for('relations', 2, 8).hi == (8, 8)


def test_mapping_from_complex_q():
    config = config_from_mapping({'q_re': '0', 'q_im': '0.4'})
    assert config.q_mod == pytest.approx(0.4)
    assert config.q_angle == pytest.approx(math.pi / 2)


def test_mapping_rejects_unknown_and_bad_values():
    with pytest.raises(ConfigError):
        config_from_mapping({'slack_channel': 'x'})
    with pytest.raises(ConfigError):
        config_from_mapping({'samples': 'muitos'})
    with pytest.raises(ConfigError):
        config_from_mapping({'window.pentagon_W': '5:1'})


def test_with_overrides():
    config = RunConfig().with_overrides(q_mod=0.3, seed=None)
    assert config.q_mod == 0.3
    assert config.seed == RunConfig().seed
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(colour='blue')


def test_load_config_file(tmp_path):
    path = tmp_path / 'run.env'
    path.write_text('q_mod=0.3\nq_arg_pi=1/8\neps_band=1e-9\nwindow.pentagon_W=4\n')
    config = load_config(str(path))
    assert config.q_mod == 0.3
    assert config.eps_band == 1e-9
    assert config.windows == (('pentagon_W', (-4, 4)),)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'nao_existe.env'))
