#!/usr/bin/env python3
"""
Testes da linha de comando: list, check, fourier, run e códigos de saída
"""

import json
import sys
import os

import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from main import EXIT_OK, EXIT_USAGE, main

FAST = ['--q-mod', '0.3', '--samples', '1024', '--workers', '1']


@pytest.fixture(autouse=True)
def _workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_list_shows_registered_checks(capsys):
    assert main(['list']) == EXIT_OK
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) >= 22
    assert any('pentagon_W' in l for l in lines)
    assert lines[0].startswith('C0')


def test_unknown_check_is_usage_error():
    assert main(['check', 'no_such_check']) == EXIT_USAGE


def test_missing_config_file_is_usage_error(tmp_path):
    assert main(['list', '--config', str(tmp_path / 'nada.env')]) == EXIT_USAGE


def test_invalid_modulus_is_usage_error():
    assert main(['list', '--q-mod', '1.5']) == EXIT_USAGE


def test_check_pentagon(capsys):
    assert main(['check', 'pentagon_W', '--window', '3'] + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert 'pentagon_W' in out
    assert 'OK' in out


def test_check_by_code(capsys):
    assert main(['check', 'C25'] + FAST) == EXIT_OK
    assert 'suq2_relations' in capsys.readouterr().out


def test_fourier_writes_csv(tmp_path, capsys):
    out_dir = tmp_path / 'out'
    code = main(['fourier', '--n-lo', '-1', '--n-hi', '1', '--m-max', '10', '--out', str(out_dir)] + FAST)
    assert code == EXIT_OK
    csv = (out_dir / 'fourier.csv').read_text().splitlines()
    assert csv[0] == 'n,m,F'
    assert len(csv) == 1 + 3 * 21
    assert 'Parseval' in capsys.readouterr().out


def test_run_writes_reports(tmp_path):
    config = tmp_path / 'run.env'
    config.write_text('q_mod=0.3\nsamples=1024\nworkers=1\nchecks=pentagon_W,relations,real_q_degeneration\n')
    out_dir = tmp_path / 'reports'
    assert main(['run', '--config', str(config), '--out', str(out_dir)]) == EXIT_OK
    data = json.loads((out_dir / 'report.json').read_text())
    assert data['summary']['total'] == 3
    assert data['summary']['skipped'] == 1
    assert [r['code'] for r in data['results']] == ['C1', 'C2', 'C29']
    assert '| C1 | pentagon_W |' in (out_dir / 'report.md').read_text()


def test_list_ops_self_test(capsys):
    assert main(['list-ops', '--self-test'] + FAST) == EXIT_OK
    out = capsys.readouterr().out
    assert 'W_boson' in out
    assert 'Autoteste' in out


def test_sweep_writes_table(tmp_path, capsys):
    config = tmp_path / 'sweep.env'
    config.write_text('samples=1024\nworkers=1\nchecks=pentagon_W,real_q_degeneration\n')
    out_dir = tmp_path / 'sweep'
    code = main(['sweep', '--q-mods', '0.3,0.5', '--q-args-pi', '0,1/8', '--config', str(config),
                 '--out', str(out_dir)])
    assert code == EXIT_OK
    rows = (out_dir / 'sweep.csv').read_text().splitlines()
    assert rows[0] == 'q,code,check,residual,passed,skipped'
    assert len(rows) == 1 + 4 * 2
    assert 'sweep:' in capsys.readouterr().out


def test_run_into_regular_file_is_usage_error(tmp_path, capsys):
    config = tmp_path / 'run.env'
    config.write_text('q_mod=0.3\nsamples=1024\nworkers=1\nchecks=pentagon_W\n')
    target = tmp_path / 'ocupado'
    target.write_text('não é diretório')
    assert main(['run', '--config', str(config), '--out', str(target)]) == EXIT_USAGE
    assert 'erro:' in capsys.readouterr().err
