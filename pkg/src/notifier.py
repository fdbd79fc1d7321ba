import logging
import os
import random
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

import requests

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import SLACK_WEBHOOK_URL
from verify import Report

SLACK_TIMEOUT = 10
MAX_DELAY = 30.0
MAX_LISTED = 10


def format_summary(report: Report, title: str = 'Suíte E_q(2) trançado') -> str:
    """
    Monta a mensagem curta com o resumo da execução.

    Args:
        report: Relatório da suíte
        title: Primeira linha da mensagem

    Returns:
        Texto com contagens e a lista das verificações que falharam
    """
    s = report.summary
    status = ':white_check_mark:' if report.all_passed else ':x:'
    lines = [
        f"{status} *{title}* ({report.config.get('q', '')})",
        f"ok: {s['passed']} | falhas: {s['failed']} | ignoradas: {s['skipped']} | {report.elapsed:.0f}s",
    ]
    for r in report.results:
        if not r.passed:
            detail = r.error or f"resíduo {r.residual:.3g} > {r.tolerance:.3g}"
            lines.append(f"• {r.code} {r.name}: {detail}")
    return '\n'.join(lines)


def build_payload(report: Report, title: str = 'Suíte E_q(2) trançado') -> Dict[str, Any]:
    """
    Mensagem do webhook: `text` para clientes sem blocos e blocos com
    cabeçalho, contagens e até MAX_LISTED verificações com falha.
    """
    s = report.summary
    failed = [r for r in report.results if not r.passed and not r.skipped]
    blocks: List[Dict[str, Any]] = [
        {'type': 'header', 'text': {'type': 'plain_text', 'text': f"{title} ({report.config.get('q', '')})"}},
        {'type': 'section', 'fields': [
            {'type': 'mrkdwn', 'text': f"*ok*\n{s['passed']}/{s['total']}"},
            {'type': 'mrkdwn', 'text': f"*falhas*\n{s['failed']}"},
            {'type': 'mrkdwn', 'text': f"*ignoradas*\n{s['skipped']}"},
            {'type': 'mrkdwn', 'text': f"*tempo*\n{report.elapsed:.0f}s"},
        ]},
    ]
    if failed:
        listed = [f"• `{r.code}` {r.name}: {r.error or f'resíduo {r.residual:.3g} > {r.tolerance:.3g}'}"
                  for r in failed[:MAX_LISTED]]
        if len(failed) > MAX_LISTED:
            listed.append(f"… e mais {len(failed) - MAX_LISTED}")
        blocks.append({'type': 'section', 'text': {'type': 'mrkdwn', 'text': '\n'.join(listed)}})
    return {'text': format_summary(report, title), 'blocks': blocks}


def send_to_slack(payload: Dict[str, Any], webhook_url: str) -> Tuple[bool, Optional[float]]:
    """
    Posta o payload no webhook.

    Returns:
        (entregue, Retry-After em segundos quando o Slack responde 429)
    """
    try:
        response = requests.post(webhook_url, json=payload, timeout=SLACK_TIMEOUT)
    except requests.RequestException as e:
        logging.error(f"Falha de rede ao notificar o Slack: {e}")
        return False, None
    if response.status_code == 200:
        return True, None
    retry_after = None
    if response.status_code == 429:
        try:
            retry_after = float(response.headers.get('Retry-After', ''))
        except ValueError:
            retry_after = None
    logging.warning(f"Slack recusou a notificação: status={response.status_code}, body={response.text[:200]}")
    return False, retry_after


def retry_delay(attempt: int, retry_after: Optional[float] = None, cap: float = MAX_DELAY) -> float:
    """Espera antes da tentativa attempt+1: o Retry-After do Slack ou 2^attempt com jitter, limitado a cap."""
    if retry_after is not None:
        return min(max(retry_after, 0.0), cap)
    return min(2.0 ** attempt, cap) * random.uniform(0.5, 1.0)


def notify_report(report: Report, webhook_url: Optional[str] = SLACK_WEBHOOK_URL, attempts: int = 3,
                  title: str = 'Suíte E_q(2) trançado') -> bool:
    """Envia o resumo com retentativas; nunca levanta exceção."""
    if not webhook_url:
        logging.warning("SLACK_WEBHOOK_URL não configurada; notificação ignorada")
        return False
    payload = build_payload(report, title)
    for attempt in range(1, attempts + 1):
        delivered, retry_after = send_to_slack(payload, webhook_url)
        if delivered:
            logging.info(f"Resumo entregue ao Slack na tentativa {attempt}")
            return True
        if attempt < attempts:
            delay = retry_delay(attempt, retry_after)
            logging.info(f"Nova tentativa de notificação em {delay:.1f}s")
            time.sleep(delay)
    logging.error(f"Notificação falhou após {attempts} tentativas")
    return False
