import json
import os
import logging
import sys
from typing import Any, Dict, List, Optional

import pandas as pd

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from config import REPORT_DIR
from verify import Report
from qexp import FourierTable


class ReportStore:
    """
    Grava os artefatos de uma execução em um diretório: report.json, report.md,
    fourier.csv e sweep.csv.
    """

    def __init__(self, out_dir: str = REPORT_DIR):
        self.out_dir = out_dir
        self._ensure_out_dir()

    def _ensure_out_dir(self) -> None:
        """Garante que o diretório de saída existe."""
        os.makedirs(self.out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def save_report(self, report: Report, include_timings: bool = True) -> Dict[str, str]:
        """
        Salva o relatório JSON e o resumo Markdown.

        Returns:
            Caminhos gravados por tipo ('json', 'md')

        Raises:
            OSError: se algum arquivo não pode ser gravado
        """
        paths = {'json': self.path('report.json'), 'md': self.path('report.md')}
        try:
            with open(paths['json'], 'w') as f:
                json.dump(report.to_dict(include_timings), f, indent=2, ensure_ascii=False, default=_jsonable)
            with open(paths['md'], 'w') as f:
                f.write(render_markdown(report))
        except OSError as e:
            logging.error(f"Erro ao salvar relatório em {self.out_dir}: {e}")
            raise
        logging.info(f"Relatório salvo em {paths['json']} e {paths['md']}")
        return paths

    def load_report(self) -> Optional[Dict[str, Any]]:
        """Lê o report.json do diretório, se existir."""
        try:
            with open(self.path('report.json'), 'r') as f:
                return json.load(f)
        except (json.JSONDecodeError, FileNotFoundError) as e:
            logging.error(f"Erro ao ler relatório: {e}")
            return None

    def save_fourier(self, table: FourierTable) -> str:
        path = self.path('fourier.csv')
        table.to_frame().to_csv(path, index=False)
        logging.info(f"Tabela de Fourier salva em {path} ({table.n_hi - table.n_lo + 1} linhas de n)")
        return path

    def save_sweep(self, frame: pd.DataFrame) -> str:
        path = self.path('sweep.csv')
        frame.to_csv(path, index=False)
        logging.info(f"Varredura salva em {path}")
        return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, 'item'):
        return value.item()
    return str(value)


def _fmt(value: float) -> str:
    return '—' if value != value else f"{value:.3g}"


def render_markdown(report: Report) -> str:
    """Resumo legível: uma linha por verificação, com a âncora da identidade."""
    s = report.summary
    lines = [
        '# Relatório de verificação',
        '',
        f"- versão: {report.tool_version} (schema {report.schema_version})",
        f"- q: {report.config.get('q', '')}",
        f"- total: {s['total']}, ok: {s['passed']}, falhas: {s['failed']}, ignoradas: {s['skipped']}",
        f"- tempo total: {report.elapsed:.1f}s",
        '',
        '| código | verificação | identidade | classe | janela | sondas | resíduo | tolerância | status |',
        '|---|---|---|---|---|---|---|---|---|',
    ]
    for r in report.results:
        status = 'ignorada' if r.skipped else ('ok' if r.passed else 'FALHOU')
        lines.append(f"| {r.code} | {r.name} | {r.anchor} | {r.tolerance_class} | {r.window} | {r.probes} "
                     f"| {_fmt(r.residual)} | {_fmt(r.tolerance)} | {status} |")
    failures: List[str] = [f"- {r.code} {r.name}: {r.error}" for r in report.results if r.error and not r.skipped]
    if failures:
        lines += ['', '## Erros', ''] + failures
    return '\n'.join(lines) + '\n'


def sweep_frame(reports: Dict[str, Report]) -> pd.DataFrame:
    """Tabela longa (q, código, verificação, resíduo, status) de uma varredura."""
    rows = []
    for label, report in reports.items():
        for r in report.results:
            rows.append({'q': label, 'code': r.code, 'check': r.name, 'residual': r.residual,
                         'passed': r.passed, 'skipped': r.skipped})
    return pd.DataFrame(rows, columns=['q', 'code', 'check', 'residual', 'passed', 'skipped'])
