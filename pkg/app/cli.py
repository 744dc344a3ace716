"""Command line entry point: ``python -m app <command> [options]``.

Exit codes: 0 success, 2 protocol aborted, 3 reference mismatch or theorem
violation, 64 usage error.
"""

import argparse
import io
import json
import logging
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import MQPCError
from app.core.rng import RandomStream
from app.models.protocol import RunConfig
from app.models.security import CSV_FIELDS, AttackExperimentResult
from app.services.channel.factory import create_eavesdropper
from app.services.export.local import report_exporter
from app.services.metrics_service import (
    efficiency_closed_form,
    efficiency_from_transcript,
)
from app.services.protocol.golden import golden_walkthrough, walkthrough_report
from app.services.protocol.protocol_engine import load_run_config, run_from_config
from app.services.security.attack_lab import attack_experiment
from app.services.security.entangle_audit import audit_report
from app.utils.logging_utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ABORTED = 2
EXIT_MISMATCH = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        report_exporter.write_jsonl(text, out)


def _emit_json(payload: Any, out: str | None) -> None:
    if out is None:
        sys.stdout.write(json.dumps(payload, indent=2) + '\n')
    else:
        report_exporter.write_json(payload, out)


def cmd_demo(args: argparse.Namespace) -> int:
    report = walkthrough_report(golden_walkthrough())
    if args.format == 'json':
        _emit_json(report, args.out)
    else:
        lines = [f'd = {report["d"]}', f'p = {tuple(report["p"])}']
        for name in ('v', 'k', 'm1', 'm2', 'r2', 'q', 'r1', 'r', 'M'):
            value = report[name]
            lines.append(
                f'{name} = {tuple(value) if isinstance(value, list) else value}'
            )
        lines.append(f'announcement: {report["announcement"]}')
        lines.extend(f'MISMATCH {item}' for item in report['mismatches'])
        _emit('\n'.join(lines) + '\n', args.out)
    return EXIT_OK if report['matches_reference'] else EXIT_MISMATCH


def _run_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return load_run_config(args.config)
    if args.p is None:
        raise UsageError('run needs --config or --p')
    return RunConfig(
        d=args.d,
        n=args.n if args.n is not None else len(args.p),
        L=args.L,
        seed=args.seed,
        p=args.p,
        attack=args.attack,
        attack_params={'probe_dim': args.probe_dim},
    )


def cmd_run(args: argparse.Namespace) -> int:
    result = run_from_config(_run_config(args))
    summary = result.summary()
    transcript = result.transcript.to_jsonl()
    if args.format == 'json':
        _emit_json(summary, args.out)
    elif args.out is not None:
        report_exporter.write_jsonl(transcript, args.out)
    else:
        sys.stdout.write(transcript)
    status = sys.stderr if args.format == 'json' else sys.stdout
    if result.completed:
        status.write(f'announcement: {summary["announcement"]}\n')
        return EXIT_OK
    aborted = summary['aborted']
    status.write(
        f'aborted at step {aborted["step"]} on channel {aborted["channel"]}\n'
    )
    return EXIT_ABORTED


def cmd_attack(args: argparse.Namespace) -> int:
    rng = RandomStream(args.seed)
    results: list[AttackExperimentResult] = []
    for d in args.d:
        for L in args.L:
            stream = rng.child(f'attack:{d}:{L}')
            model = create_eavesdropper(
                args.attack,
                d=d,
                params={'probe_dim': args.probe_dim},
                rng=stream.child('attack-unitary'),
            )
            results.append(
                attack_experiment(model, d, L, args.trials, stream, exact=args.exact)
            )

    if args.format == 'json':
        _emit_json([r.model_dump() for r in results], args.out)
    elif args.out is not None:
        report_exporter.write_csv((r.csv_row() for r in results), CSV_FIELDS, args.out)
    else:
        buffer = io.StringIO()
        buffer.write(','.join(CSV_FIELDS) + '\n')
        for r in results:
            row = r.csv_row()
            buffer.write(','.join(str(row[f]) for f in CSV_FIELDS) + '\n')
        sys.stdout.write(buffer.getvalue())

    if args.check and not all(r.within(4) for r in results):
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    report = audit_report(
        args.d, args.probe_dim, args.samples, RandomStream(args.seed)
    )
    _emit_json(report.model_dump(), args.out)
    return EXIT_OK if report.violations == 0 else EXIT_MISMATCH


def cmd_efficiency(args: argparse.Namespace) -> int:
    rng = RandomStream(args.seed)
    d = args.d
    rows = []
    exit_code = EXIT_OK
    for n in args.n_values:
        stream = rng.child(f'efficiency:{n}')
        p = [int(stream.integers(0, d // 2 + 1)) for _ in range(n)]
        result = run_from_config(
            RunConfig(d=d, n=n, L=args.L, seed=args.seed, p=p)
        )
        closed = efficiency_closed_form(n)
        measured = efficiency_from_transcript(result.transcript)
        if measured.fraction != closed.fraction:
            exit_code = EXIT_MISMATCH
        rows.append(
            {'n': n, 'closed_form': closed.model_dump(), **measured.model_dump()}
        )
    _emit_json(rows, args.out)
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog='mqpc', description='MQPC protocol simulator and security lab'
    )
    parser.add_argument('--log-level', default=None)
    commands = parser.add_subparsers(dest='command', required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--seed', type=int, default=settings.DEFAULT_SEED)
        sub.add_argument('--out', default=None)
        sub.add_argument(
            '--format', choices=('json', 'csv', 'text'), default='text'
        )

    demo = commands.add_parser('demo', help='four-user d=11 walkthrough')
    common(demo)
    demo.set_defaults(handler=cmd_demo)

    run = commands.add_parser('run', help='execute one protocol run')
    common(run)
    run.add_argument('--config', default=None)
    run.add_argument('--d', type=int, default=11)
    run.add_argument('--n', type=int, default=None)
    run.add_argument('--L', type=int, default=settings.DEFAULT_DECOYS)
    run.add_argument('--p', type=int, nargs='+', default=None)
    run.add_argument('--attack', default='honest')
    run.add_argument('--probe-dim', type=int, default=2)
    run.set_defaults(handler=cmd_run)

    attack = commands.add_parser('attack', help='Monte Carlo detection rates')
    common(attack)
    attack.add_argument('--attack', required=True)
    attack.add_argument('--d', type=int, nargs='+', default=[11])
    attack.add_argument('--L', type=int, nargs='+', default=[1])
    attack.add_argument('--trials', type=int, default=settings.DEFAULT_TRIALS)
    attack.add_argument('--probe-dim', type=int, default=2)
    attack.add_argument('--exact', action='store_true')
    attack.add_argument('--check', action='store_true')
    attack.set_defaults(handler=cmd_attack)

    audit = commands.add_parser('audit', help='entangling attack audit')
    common(audit)
    audit.add_argument('--d', type=int, default=2)
    audit.add_argument('--probe-dim', type=int, default=2)
    audit.add_argument('--samples', type=int, default=100)
    audit.set_defaults(handler=cmd_audit)

    efficiency = commands.add_parser('efficiency', help='qudit efficiency')
    common(efficiency)
    efficiency.add_argument(
        '--n', dest='n_values', type=int, nargs='+', default=list(range(2, 11))
    )
    efficiency.add_argument('--d', type=int, default=11)
    efficiency.add_argument('--L', type=int, default=settings.DEFAULT_DECOYS)
    efficiency.set_defaults(handler=cmd_efficiency)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        setup_logging(args.log_level)
        return args.handler(args)
    except UsageError as e:
        sys.stderr.write(f'{parser.prog}: usage error: {e}\n')
        return EXIT_USAGE
    except (MQPCError, ValidationError, OSError) as e:
        sys.stderr.write(f'{parser.prog}: {e}\n')
        return EXIT_USAGE


if __name__ == '__main__':
    raise SystemExit(main())
