import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import LOG_FILE, LOG_LEVEL, SLACK_WEBHOOK_URL
from run_config import ConfigError, RunConfig, load_config, parse_pi_fraction
from verify import CheckNotFoundError, CheckResult, Report, band_for_radius, find_check, registered_checks, \
    run_check, run_suite
from report_store import ReportStore, sweep_frame
from notifier import notify_report
from qexp import QExpError, fourier_table
from shiftop import ShiftOpError
from constructions import SelfTestError, operator_catalog, self_test_catalog
import checks  # noqa: F401  (registra as verificações)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def setup_logging(log_file: str = LOG_FILE, level: str = LOG_LEVEL) -> None:
    """Log em arquivo e na saída padrão, com o nome da thread."""
    log_dir = os.path.dirname(log_file)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s [%(threadName)s] %(levelname)s %(module)s: %(message)s',
        handlers=[logging.FileHandler(log_file), logging.StreamHandler(sys.stdout)],
    )


def print_result(result: CheckResult) -> None:
    status = 'IGNORADA' if result.skipped else ('OK' if result.passed else 'FALHOU')
    print(f"{result.code:<4} {result.name:<24} {status:<8} resíduo={result.residual:.3g} "
          f"tol={result.tolerance:.3g} sondas={result.probes} {result.elapsed:.2f}s")
    for case in result.cases:
        mark = 'ok' if case.passed else 'X'
        extra = ''
        if case.decay is not None:
            ratio = case.decay.ratio
            extra = ' exato' if case.decay.exact else f" razão={ratio:.4g}" if ratio else ''
        print(f"       [{mark}] {case.label}: {case.residual:.3g} (tol {case.tolerance:.3g}){extra}")
    if result.error:
        print(f"       erro: {result.error}")


def print_report(report: Report) -> None:
    for result in report.results:
        print_result(result)
    s = report.summary
    print(f"\nTotal: {s['total']} | ok: {s['passed']} | falhas: {s['failed']} | ignoradas: {s['skipped']} "
          f"| {report.elapsed:.1f}s")


def _overrides(args: argparse.Namespace) -> Dict:
    changes = {'q_mod': getattr(args, 'q_mod', None), 'samples': getattr(args, 'samples', None),
               'eps_band': getattr(args, 'eps_band', None), 'workers': getattr(args, 'workers', None),
               'seed': getattr(args, 'seed', None)}
    if getattr(args, 'q_arg_pi', None) is not None:
        changes['q_angle'] = parse_pi_fraction(args.q_arg_pi)
        changes['q_angle_label'] = f"{args.q_arg_pi}π"
    if getattr(args, 'out', None):
        changes['out_dir'] = args.out
    return changes


def cmd_run(args: argparse.Namespace, config: RunConfig) -> int:
    store = ReportStore(config.out_dir)
    report = run_suite(config)
    print_report(report)
    paths = store.save_report(report)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    if args.notify:
        notify_report(report, SLACK_WEBHOOK_URL)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def cmd_check(args: argparse.Namespace, config: RunConfig) -> int:
    check = find_check(args.name)
    if args.window is not None:
        config = config.with_overrides(windows=tuple(w for w in config.windows if w[0] != check.name)
                                       + ((check.name, (-args.window, args.window)),))
    result = run_check(check.name, config)
    print_result(result)
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_list(args: argparse.Namespace, config: RunConfig) -> int:
    for check in registered_checks():
        print(f"{check.code:<4} {check.name:<24} {check.tolerance_class.value:<7} {check.anchor}")
    return EXIT_OK


def cmd_list_ops(args: argparse.Namespace, config: RunConfig) -> int:
    q = config.q_param()
    catalog = operator_catalog(q, band_for_radius(config, 3), config.samples, config.pochhammer_depth,
                               config.r_max)
    for op in catalog.values():
        print(op.describe())
    if args.self_test:
        deviations = self_test_catalog(catalog, np.random.default_rng(config.seed))
        print(f"\nAutoteste: desvio máximo {max(deviations.values(), default=0.0):.3g}")
    return EXIT_OK


def cmd_fourier(args: argparse.Namespace, config: RunConfig) -> int:
    q = config.q_param()
    table = fourier_table(args.n_lo, args.n_hi, args.m_max, q, config.samples, config.workers)
    path = ReportStore(config.out_dir).save_fourier(table)
    print(table.to_frame().pivot(index='m', columns='n', values='F').to_string(float_format=lambda v: f"{v:.3e}"))
    print(f"\nsimetria: {table.symmetry_deviation():.3g} | Parseval: {table.parseval_deviation():.3g}")
    print(f"fourier: {path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    mods = [float(v) for v in args.q_mods.split(',')]
    angles = [v.strip() for v in args.q_args_pi.split(',')]
    reports: Dict[str, Report] = {}
    for mod in mods:
        for angle in angles:
            point = config.with_overrides(q_mod=mod, q_angle=parse_pi_fraction(angle),
                                          q_angle_label=f"{angle}π")
            label = point.q_param().describe()
            logging.info(f"Varredura: {label}")
            reports[label] = run_suite(point)
            if args.notify:
                notify_report(reports[label], SLACK_WEBHOOK_URL, title=f"Varredura {label}")
    frame = sweep_frame(reports)
    print(frame.pivot(index='code', columns='q', values='residual').to_string(float_format=lambda v: f"{v:.2e}"))
    path = ReportStore(config.out_dir).save_sweep(frame)
    print(f"\nsweep: {path}")
    return EXIT_OK if all(r.all_passed for r in reports.values()) else EXIT_FAILED


def _add_q_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', type=str, help='Arquivo chave=valor de configuração')
    parser.add_argument('--q-mod', type=float, help='|q| (0 < |q| < 1)')
    parser.add_argument('--q-arg-pi', type=str, help='arg q como fração de π, ex. 1/8')
    parser.add_argument('--samples', type=int, help='Pontos de quadratura das linhas de Fourier')
    parser.add_argument('--eps-band', type=float, help='Corte da banda de Fourier')
    parser.add_argument('--workers', type=int, help='Threads de execução')
    parser.add_argument('--seed', type=int, help='Semente das sondas')
    parser.add_argument('--out', type=str, help='Diretório de saída')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Verificação numérica do grupo quântico E_q(2) trançado')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Executa a suíte completa')
    _add_q_options(run)
    run.add_argument('--notify', action='store_true', help='Envia o resumo ao Slack')

    check = sub.add_parser('check', help='Executa uma verificação')
    check.add_argument('name', type=str, help='Nome ou código (ex. pentagon_W ou C1)')
    check.add_argument('--window', type=int, help='Meia largura R da janela [−R,R]^d')
    _add_q_options(check)

    lst = sub.add_parser('list', help='Lista as verificações registradas')
    _add_q_options(lst)

    ops = sub.add_parser('list-ops', help='Lista o catálogo de operadores')
    ops.add_argument('--self-test', action='store_true', help='Confere cada operador com sua fórmula')
    _add_q_options(ops)

    fourier = sub.add_parser('fourier', help='Exporta a tabela F_m(|q|^n)')
    fourier.add_argument('--n-lo', type=int, default=-3)
    fourier.add_argument('--n-hi', type=int, default=3)
    fourier.add_argument('--m-max', type=int, default=20)
    _add_q_options(fourier)

    sweep = sub.add_parser('sweep', help='Executa a suíte numa grade de q')
    sweep.add_argument('--q-mods', type=str, default='0.3,0.5,0.7')
    sweep.add_argument('--q-args-pi', type=str, default='0,1/8,1/3')
    sweep.add_argument('--notify', action='store_true', help='Envia cada resumo ao Slack')
    _add_q_options(sweep)
    return parser


COMMANDS = {
    'run': cmd_run,
    'check': cmd_check,
    'list': cmd_list,
    'list-ops': cmd_list_ops,
    'fourier': cmd_fourier,
    'sweep': cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()
    try:
        config = load_config(args.config).with_overrides(**_overrides(args))
        return COMMANDS[args.command](args, config)
    except (ConfigError, CheckNotFoundError) as e:
        logging.error(f"Erro de configuração: {e}")
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logging.error(f"Erro de E/S em {args.command}: {e}")
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (QExpError, ShiftOpError, SelfTestError) as e:
        logging.error(f"Erro na execução de {args.command}: {e}")
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
