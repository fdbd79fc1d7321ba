#!/usr/bin/env python3
"""
Testes da medição de resíduos, do ajuste de decaimento e da execução das verificações
"""

import sys
import os

import numpy as np
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from lattice import EmptyInteriorError, Window, WindowLeakError
from shiftop import QParam, ShiftOperator
from constructions import generator_ops, suq2_generators, tau
from run_config import RunConfig
from verify import (CheckNotFoundError, decay_sequence, find_check, fit_decay, registered_checks, residual,
                    run_check, run_suite, select_probes)
import checks  # noqa: F401

Q = QParam.from_pi_fraction(0.3, 1, 8)


def _config(**changes) -> RunConfig:
    base = dict(q_mod=0.3, samples=1024, workers=1, banded_probes=6)
    base.update(changes)
    return RunConfig(**base)


def test_residual_calibration():
    v = generator_ops(Q)['v'].operator
    window = Window.cube(2, 3)
    probes = select_probes([v], window, np.random.default_rng(0), 2000, 500)
    assert residual(v, v * 1.000001, window, probes) == pytest.approx(1e-6, rel=1e-5)
    assert residual(v, v, window, probes) == 0.0


def test_residual_reports_leaks():
    v = generator_ops(Q)['v'].operator
    window = Window.cube(2, 1)
    with pytest.raises(WindowLeakError):
        residual(v, v, window, window.points())
    assert residual(v, v, window, window.points(), check_leaks=False) == 0.0


def test_residual_in_parallel_chunks():
    n = generator_ops(Q)['n'].operator
    window = Window.cube(2, 6)
    probes = select_probes([n], window, np.random.default_rng(0), 2000, 500)
    serial = residual(n, n * 1.001, window, probes, chunk=16)
    parallel = residual(n, n * 1.001, window, probes, workers=3, chunk=16)
    assert serial == pytest.approx(parallel)


def test_select_probes_uses_interior():
    v = generator_ops(Q)['v'].operator
    probes = select_probes([v], Window.cube(2, 3), np.random.default_rng(0), 2000, 500)
    assert probes.shape == (42, 2)
    assert probes[:, 0].min() == -2
    limited = select_probes([v], Window.cube(2, 3), np.random.default_rng(0), 2000, 500, count=5)
    assert limited.shape == (5, 2)


def test_select_probes_without_safe_points():
    z = generator_ops(Q)['z'].operator
    with pytest.raises(EmptyInteriorError):
        select_probes([z], Window.cube(1, 0), np.random.default_rng(0), 2000, 500)


def test_fit_decay_geometric():
    fit = fit_decay([1, 2, 3, 4], [1e-2, 1e-3, 1e-4, 1e-5])
    assert fit.ratio == pytest.approx(0.1)
    assert not fit.exact
    assert fit.monotone_violations == 0


def test_fit_decay_exact_and_floor():
    fit = fit_decay([1, 2, 3], [0.0, 0.0, 0.0])
    assert fit.exact
    assert fit.ratio is None
    truncated = fit_decay([1, 2, 3, 4], [1e-3, 1e-4, 0.0, 1e-5])
    assert truncated.ratio == pytest.approx(0.1)
    assert truncated.monotone_violations == 1


def test_decay_sequences_of_contraction():
    su = suq2_generators(Q)
    v = generator_ops(Q)['v'].operator
    zero = ShiftOperator(2, (), Q)
    gamma_fit = decay_sequence(lambda l: tau(su['gamma'], l, (1,)), zero, np.array([[0, 0], [1, 3]]),
                               range(1, 9))
    assert gamma_fit.ratio == pytest.approx(0.3, rel=1e-6)
    v_fit = decay_sequence(lambda l: tau(v, l, (1,)), v, np.array([[0, 0]]), range(1, 5))
    assert v_fit.exact


def test_registry_lookup():
    names = [c.name for c in registered_checks()]
    assert len(names) >= 22
    assert names[0] == 'oracle_equivalence'
    assert find_check('c1').name == 'pentagon_W'
    assert find_check('braided_pentagon').code == 'C7'
    assert find_check('coassoc_generators').code == 'C15'
    assert find_check('coassociativity_generators').name == 'coassoc_generators'
    assert find_check('coassoc').name == 'coassoc_generators'
    with pytest.raises(CheckNotFoundError):
        find_check('no_such_check')


def test_run_check_pentagon():
    result = run_check('pentagon_W', _config(windows=(('pentagon_W', (-4, 4)),)))
    assert result.passed
    assert result.error is None
    assert result.window == '[-4,4]^3'
    assert result.residual <= 1e-12
    assert result.probes > 0


def test_run_check_contraction_generators():
    result = run_check('contraction_generators', _config())
    assert result.passed, [c.to_dict() for c in result.cases]
    ratios = {c.label: c.decay.ratio for c in result.cases}
    assert ratios['τ^l(γ) → 0'] == pytest.approx(0.3, rel=1e-3)
    assert ratios['τ^l(α) → v'] == pytest.approx(0.09, rel=0.05)


def test_run_check_banded_unitarity():
    result = run_check('qexp_unitarity', _config())
    assert result.passed, result.error
    assert result.tolerance_class == 'BANDED'
    assert result.probes == 12


def test_complex_q_skips_real_degeneration():
    result = run_check('real_q_degeneration', _config())
    assert result.skipped
    assert result.passed


def test_run_suite_report():
    report = run_suite(_config(workers=2), names=['real_q_degeneration', 'pentagon_W', 'relations'])
    assert [r.code for r in report.results] == ['C1', 'C2', 'C29']
    assert report.summary['skipped'] == 1
    assert report.all_passed
    data = report.to_dict(include_timings=False)
    assert 'elapsed' not in data
    assert all('elapsed' not in r for r in data['results'])
    assert data['config']['q_mod'] == 0.3


def test_residual_is_relative_to_image_norm():
    # ‖n·e_{−6,0}‖ = 0.3^{−6}
    n = generator_ops(Q)['n'].operator
    window = Window.cube(2, 6)
    edge = np.array([[-6, 0]])
    assert residual(n, n * (1 + 1e-10), window, edge) == pytest.approx(1e-10, rel=1e-4)


@pytest.mark.parametrize('q_mod', [0.3, 0.5, 0.7])
def test_exact_relations_pass_across_moduli(q_mod):
    result = run_check('relations', _config(q_mod=q_mod))
    assert result.passed, [c.to_dict() for c in result.cases if not c.passed]


def test_tprime_checks_commutator_for_every_lambda():
    config = _config(banded_probes=4)
    result = run_check('tprime', config)
    labels = [c.label for c in result.cases]
    assert len(labels) == 2 * len(config.lambda_values())
    assert sum(l.startswith('comutador') for l in labels) == len(config.lambda_values())
    assert result.passed, [c.to_dict() for c in result.cases if not c.passed]


@pytest.mark.parametrize('name', ['comult_n', 'comult_v'])
def test_banded_residual_is_truncation_bound_at_default_q(name):
    loose = run_check(name, RunConfig(workers=1, banded_probes=4, eps_band=1e-10))
    tight = run_check(name, RunConfig(workers=1, banded_probes=4, eps_band=5e-11))
    assert loose.error is None and tight.error is None
    assert loose.residual <= 1e-8
    assert tight.residual <= loose.residual + 1e-12
