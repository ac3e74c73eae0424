"""Command-line entry point: ``game <subcommand> ...``.

Progress goes to stderr through the logger; stdout carries exactly one JSON
status line per invocation.
"""

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

from src.cli.schema import ExitCode, StatusLine
from src.cli.services import commands
from src.config import settings
from src.utils.errors import EmbeddingFileError, GameError, ManifestError, SnapshotError
from src.utils.logger import logger

log = logger(__name__)

VALIDATION_ERRORS = (ManifestError, SnapshotError, EmbeddingFileError)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="game", description="Generational adversarial MAP-Elites runs and analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="start a run from a manifest or preset")
    run.add_argument("--manifest", required=True, help="manifest path or preset name")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--out", type=Path, default=None, help="run directory")
    run.add_argument("--jobs", type=int, default=settings.jobs)
    run.add_argument("--stop-after", type=int, default=None, help="stop after this generation")

    resume = sub.add_parser("resume", help="continue an interrupted run")
    resume.add_argument("--run", type=Path, required=True)
    resume.add_argument("--jobs", type=int, default=settings.jobs)
    resume.add_argument("--stop-after", type=int, default=None)

    tournament = sub.add_parser("tournament", help="intergenerational or top-K tournament with ELO")
    tournament.add_argument("--runs", type=Path, nargs="+", required=True)
    tournament.add_argument("--out", type=Path, required=True)
    tournament.add_argument("--top-k", type=int, default=None)
    tournament.add_argument("--seed", type=int, default=0)
    tournament.add_argument("--jobs", type=int, default=settings.jobs)

    metrics = sub.add_parser("metrics", help="per-generation metrics CSV")
    metrics.add_argument("--runs", type=Path, nargs="+", required=True)
    metrics.add_argument("--out", type=Path, default=None)
    metrics.add_argument("--jobs", type=int, default=settings.jobs)

    project = sub.add_parser("project", help="pooled 2-D PCA projection of the intergenerational tournament behaviors")
    project.add_argument("--runs", type=Path, nargs="+", required=True)
    project.add_argument("--out", type=Path, required=True)
    project.add_argument("--jobs", type=int, default=settings.jobs)

    replay = sub.add_parser("replay", help="re-simulate one tournament duel into a trace file")
    replay.add_argument("--run", type=Path, required=True)
    replay.add_argument("--generation", type=int, required=True)
    replay.add_argument("--row", type=int, default=0)
    replay.add_argument("--col", type=int, default=0)
    replay.add_argument("--out", type=Path, required=True)

    validate = sub.add_parser("validate", help="check an artifact file or run directory")
    validate.add_argument("--path", type=Path, required=True)
    return parser


def _dispatch(args: argparse.Namespace) -> StatusLine:
    handlers: Dict[str, Callable[[], dict]] = {
        "run": lambda: commands.cmd_run(args.manifest, args.overrides, args.out, args.jobs, args.stop_after),
        "resume": lambda: commands.cmd_resume(args.run, args.jobs, args.stop_after),
        "tournament": lambda: commands.cmd_tournament(args.runs, args.out, args.top_k, args.jobs, args.seed),
        "metrics": lambda: commands.cmd_metrics(args.runs, args.out, args.jobs),
        "project": lambda: commands.cmd_project(args.runs, args.out, args.jobs),
        "replay": lambda: commands.cmd_replay(args.run, args.generation, args.row, args.col, args.out),
    }
    if args.command == "validate":
        reports = commands.cmd_validate(args.path)
        violations = [v for r in reports for v in r.violations]
        return StatusLine(
            command="validate",
            status="ok" if not violations else "invalid",
            exit_code=ExitCode.OK if not violations else ExitCode.VALIDATION,
            result={"checked": [r.path for r in reports], "violations": violations},
        )
    return StatusLine(command=args.command, result=handlers[args.command]())


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = next((a for a in argv if not a.startswith("-")), "")
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise _UsageError("--jobs must be at least 1")
        status = _dispatch(args)
    except _UsageError as exc:
        status = StatusLine(command=command, status="error", exit_code=ExitCode.USAGE, error=str(exc))
    except VALIDATION_ERRORS as exc:
        log.error("%s", exc)
        status = StatusLine(command=command, status="error", exit_code=ExitCode.VALIDATION, error=str(exc))
    except (GameError, OSError) as exc:
        log.error("%s", exc)
        status = StatusLine(command=command, status="error", exit_code=ExitCode.RUNTIME, error=str(exc))
    print(status.model_dump_json(), flush=True)
    return int(status.exit_code)


if __name__ == "__main__":
    raise SystemExit(main())
