#!/usr/bin/env python3
"""
Testes da gravação de relatórios e da notificação no Slack
"""

import json
import sys
import os

import pandas as pd
import pytest

# Adiciona o diretório src ao path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

import notifier
from notifier import build_payload, format_summary, notify_report, retry_delay, send_to_slack
from report_store import ReportStore, render_markdown, sweep_frame
from verify import CaseResult, CheckResult, Report


def _result(code: str, name: str, passed: bool = True, skipped: bool = False, error=None) -> CheckResult:
    case = CaseResult('caso', 0.0 if passed else 1e-3, 1e-12, 10, passed, '[-4,4]^2')
    return CheckResult(code, name, 'A = B', 'EXACT', '[-4,4]^2', 10, case.residual, 1e-12, passed, 0.5,
                       skipped=skipped, error=error, cases=[case])


def _report(*results: CheckResult) -> Report:
    return Report({'q': '|q|=0.5, θ=0.125π', 'q_mod': 0.5}, list(results), 1.5)


class _Response:
    def __init__(self, status_code: int, headers=None):
        self.status_code = status_code
        self.text = 'ok' if status_code == 200 else 'erro'
        self.headers = headers or {}


def test_save_and_load_report(tmp_path):
    store = ReportStore(str(tmp_path / 'out'))
    report = _report(_result('C1', 'pentagon_W'), _result('C2', 'relations', passed=False))
    paths = store.save_report(report, include_timings=False)
    assert set(paths) == {'json', 'md'}
    data = store.load_report()
    assert data['summary'] == {'total': 2, 'passed': 1, 'failed': 1, 'skipped': 0, 'errors': 0}
    assert 'elapsed' not in data
    assert data['results'][1]['cases'][0]['residual'] == 1e-3
    with open(paths['json']) as f:
        assert json.load(f)['schema_version'] == 1


def test_load_report_missing(tmp_path):
    assert ReportStore(str(tmp_path)).load_report() is None


def test_markdown_lists_every_check():
    report = _report(_result('C1', 'pentagon_W'),
                     _result('C29', 'real_q_degeneration', skipped=True, error='q não real'),
                     _result('C7', 'braided_pentagon', passed=False, error='BandCutoffError: M'))
    text = render_markdown(report)
    assert '| C1 | pentagon_W | A = B |' in text
    assert 'ignorada' in text
    assert '- C7 braided_pentagon: BandCutoffError: M' in text
    assert 'real_q_degeneration: q não real' not in text


def test_sweep_frame_and_csv(tmp_path):
    reports = {'a': _report(_result('C1', 'pentagon_W')), 'b': _report(_result('C1', 'pentagon_W', False))}
    frame = sweep_frame(reports)
    assert list(frame.columns) == ['q', 'code', 'check', 'residual', 'passed', 'skipped']
    assert frame['passed'].tolist() == [True, False]
    path = ReportStore(str(tmp_path)).save_sweep(frame)
    assert pd.read_csv(path).shape == (2, 6)


def test_format_summary_lists_failures():
    report = _report(_result('C1', 'pentagon_W'), _result('C2', 'relations', passed=False))
    text = format_summary(report)
    assert text.startswith(':x:')
    assert 'C2 relations' in text
    assert 'C1 pentagon_W' not in text


def test_send_to_slack_posts_blocks(monkeypatch):
    calls = []

    def fake_post(url, json=None, timeout=None):
        calls.append((url, json))
        return _Response(200)

    monkeypatch.setattr(notifier.requests, 'post', fake_post)
    payload = build_payload(_report(_result('C1', 'pentagon_W'), _result('C2', 'relations', passed=False)))
    assert send_to_slack(payload, 'https://hooks.example/x') == (True, None)
    url, sent = calls[0]
    assert url == 'https://hooks.example/x'
    assert sent['text'].startswith(':x:')
    assert sent['blocks'][0]['type'] == 'header'
    assert '*falhas*\n1' in [f['text'] for f in sent['blocks'][1]['fields']]
    assert '`C2` relations' in sent['blocks'][2]['text']['text']


def test_payload_without_failures_has_no_failure_block():
    payload = build_payload(_report(_result('C1', 'pentagon_W')))
    assert len(payload['blocks']) == 2
    assert payload['text'].startswith(':white_check_mark:')


def test_payload_truncates_long_failure_list():
    results = [_result(f"C{i}", f"check_{i}", passed=False) for i in range(1, 15)]
    text = build_payload(_report(*results))['blocks'][2]['text']['text']
    assert text.count('•') == notifier.MAX_LISTED
    assert text.endswith('… e mais 4')


def test_send_to_slack_reads_retry_after(monkeypatch):
    monkeypatch.setattr(notifier.requests, 'post',
                        lambda *a, **k: _Response(429, {'Retry-After': '7'}))
    assert send_to_slack({'text': 'x'}, 'https://hooks.example/x') == (False, 7.0)


def test_send_to_slack_network_error(monkeypatch):
    def fail(*a, **k):
        raise notifier.requests.ConnectionError('sem rede')

    monkeypatch.setattr(notifier.requests, 'post', fail)
    assert send_to_slack({'text': 'x'}, 'https://hooks.example/x') == (False, None)


def test_notify_retries_then_gives_up(monkeypatch):
    attempts = []
    monkeypatch.setattr(notifier.requests, 'post', lambda *a, **k: attempts.append(1) or _Response(500))
    monkeypatch.setattr(notifier.time, 'sleep', lambda s: None)
    assert not notify_report(_report(_result('C1', 'pentagon_W')), 'https://hooks.example/x', attempts=3)
    assert len(attempts) == 3


def test_notify_honours_retry_after(monkeypatch):
    responses = [_Response(429, {'Retry-After': '3'}), _Response(200)]
    sleeps = []
    monkeypatch.setattr(notifier.requests, 'post', lambda *a, **k: responses.pop(0))
    monkeypatch.setattr(notifier.time, 'sleep', sleeps.append)
    assert notify_report(_report(_result('C1', 'pentagon_W')), 'https://hooks.example/x', attempts=3)
    assert sleeps == [3.0]


def test_notify_without_webhook():
    assert not notify_report(_report(_result('C1', 'pentagon_W')), None)


def test_retry_delay_bounds():
    assert 1.0 <= retry_delay(1) <= 2.0
    assert 15.0 <= retry_delay(10) <= notifier.MAX_DELAY
    assert retry_delay(1, retry_after=120) == notifier.MAX_DELAY
    assert retry_delay(2, retry_after=0.5) == 0.5


def test_save_report_raises_on_unwritable_dir(tmp_path):
    store = ReportStore(str(tmp_path / 'out'))
    os.rmdir(store.out_dir)
    (tmp_path / 'out').write_text('arquivo comum')
    with pytest.raises(OSError):
        store.save_report(_report(_result('C1', 'pentagon_W')))
