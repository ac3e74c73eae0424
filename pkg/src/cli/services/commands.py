"""One function per subcommand. Each returns the ``result`` payload of the
status line and raises a ``GameError`` on failure."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.analysis.services.elo import elo
from src.analysis.services.report import generation_samples, grid_tournament, metric_rows, pooled_grid
from src.analysis.services.tournament import intergenerational, play, top_k
from src.cli.schema import ValidationReport
from src.config import settings
from src.domains.schema import Side
from src.domains.services.registry import build_domain, default_domain
from src.evolve.schema import GenerationRecord, GenerationsLog
from src.evolve.services.evaluator import Evaluator
from src.evolve.services.game import GameState, fresh_state, resume_state, run_game
from src.storage.services.artifacts import (
    DuelTrace,
    TournamentFile,
    load_tournament,
    load_trace,
    save_trace,
    save_tournament,
    write_elo_csv,
    write_matrix_csv,
    write_projection_csv,
)
from src.storage.services.embeddings import read_external_embeddings
from src.storage.services.manifest import load_manifest
from src.storage.services.metrics import export_metrics
from src.storage.services.runs import (
    METRICS_FILE,
    LoadedRun,
    create_run,
    is_complete,
    lineage_records,
    load_run,
    mark_complete,
    read_run_manifest,
)
from src.storage.services.snapshot import (
    decode_snapshot,
    list_snapshots,
    save_snapshot,
    snapshot_checksum,
    snapshot_domain_name,
    snapshot_violations,
)
from src.utils import rng as streams
from src.utils.errors import GameError, TournamentError
from src.utils.logger import log_context, logger

log = logger(__name__)


def _finish_run(loaded: LoadedRun, jobs: int) -> None:
    config = loaded.manifest.evolve
    with Evaluator(loaded.domain, config.descriptor, jobs) as evaluator:
        rows = metric_rows([loaded.log], [loaded.run_id], loaded.domain, evaluator)
    export_metrics(loaded.run_dir / METRICS_FILE, rows)
    mark_complete(loaded.run_dir)
    log.info("run %s complete", loaded.run_id)


def _continue(run_dir: Path, state: Optional[GameState], book: GenerationsLog, jobs: int, stop_after: Optional[int]) -> Dict[str, Any]:
    manifest = read_run_manifest(run_dir)
    domain = build_domain(manifest.domain)
    config = manifest.evolve

    def on_generation(record: GenerationRecord) -> None:
        save_snapshot(run_dir, record, domain)

    with log_context(run=run_dir.name):
        book = run_game(config, domain, jobs, state, stop_after, on_generation, book)
        done = len(book.generations) >= config.n_gen
        if done:
            _finish_run(LoadedRun(run_dir, manifest, domain, book), jobs)
    return {
        "run_dir": str(run_dir),
        "generations": len(book.generations),
        "complete": done,
        "checksums": {p.stem: f"{snapshot_checksum(p):016x}" for p in list_snapshots(run_dir)},
    }


def default_run_dir(manifest_name: str, seed: int) -> Path:
    return settings.runs_dir / f"{Path(manifest_name).stem}-seed{seed}"


def cmd_run(
    manifest_name: str,
    overrides: Sequence[str] = (),
    out_dir: Optional[Path] = None,
    jobs: int = 1,
    stop_after: Optional[int] = None,
) -> Dict[str, Any]:
    manifest = load_manifest(manifest_name, overrides)
    run_dir = create_run(out_dir or default_run_dir(manifest_name, manifest.evolve.master_seed), manifest)
    log.info("run %s: %s, %d generations", run_dir.name, manifest.domain.name, manifest.evolve.n_gen)
    return _continue(run_dir, None, GenerationsLog(), jobs, stop_after)


def cmd_resume(run_dir: Path, jobs: int = 1, stop_after: Optional[int] = None) -> Dict[str, Any]:
    if is_complete(run_dir):
        loaded = load_run(run_dir)
        return {"run_dir": str(run_dir), "generations": len(loaded.log.generations), "complete": True}
    loaded = load_run(run_dir)
    last = loaded.log.last()
    if last is None:
        state = fresh_state(loaded.manifest.evolve, loaded.domain)
    else:
        state = resume_state(last, lineage_records(loaded.log))
    log.info("resuming %s after generation %d", loaded.run_id, state.generation)
    return _continue(loaded.run_dir, state, loaded.log, jobs, stop_after)


def _load_compatible(run_dirs: Sequence[Path]) -> List[LoadedRun]:
    if not run_dirs:
        raise TournamentError("no runs given")
    runs = [load_run(d) for d in run_dirs]
    first = runs[0].manifest.domain
    for run in runs[1:]:
        if run.manifest.domain != first:
            raise TournamentError(f"domain of {run.run_dir} differs from {runs[0].run_dir}")
    return runs


def cmd_tournament(
    run_dirs: Sequence[Path], out_dir: Path, k: Optional[int] = None, jobs: int = 1, seed: int = 0
) -> Dict[str, Any]:
    runs = _load_compatible(run_dirs)
    domain = runs[0].domain
    out_dir.mkdir(parents=True, exist_ok=True)
    with Evaluator(domain, runs[0].manifest.evolve.descriptor, jobs) as evaluator:
        tournament = intergenerational([r.log for r in runs], evaluator)
        if k is not None:
            rows, cols = top_k(tournament, k)
            tournament = play(rows, cols, evaluator)
    matrix = tournament.index_matrix()
    labels, sides = tournament.by_index()
    table = elo(matrix, rng=streams.derive_rng(seed, streams.ELO))
    stored = TournamentFile(domain.name, matrix, [e.label for e in tournament.rows], [e.label for e in tournament.cols])
    save_tournament(out_dir / "tournament.gtrn", stored)
    write_matrix_csv(out_dir / "matrix.csv", stored)
    write_elo_csv(out_dir / "elo.csv", table, labels, sides)
    return {"out": str(out_dir), "rows": matrix.shape[0], "cols": matrix.shape[1], "best": labels[table.ranking()[0]]}


def cmd_metrics(run_dirs: Sequence[Path], out: Optional[Path] = None, jobs: int = 1) -> Dict[str, Any]:
    runs = _load_compatible(run_dirs)
    if out is None:
        if len(runs) != 1:
            raise GameError("--out is required for more than one run")
        out = runs[0].run_dir / METRICS_FILE
    with Evaluator(runs[0].domain, runs[0].manifest.evolve.descriptor, jobs) as evaluator:
        rows = metric_rows([r.log for r in runs], [r.run_id for r in runs], runs[0].domain, evaluator)
    export_metrics(out, rows)
    return {"out": str(out), "rows": len(rows)}


def cmd_project(run_dirs: Sequence[Path], out_dir: Path, jobs: int = 1) -> Dict[str, Any]:
    """One PCA over the intergenerational tournament of every given run, each
    run projected onto it. One-sided runs project their archive elites."""
    runs = _load_compatible(run_dirs)
    logs = [r.log for r in runs]
    with Evaluator(runs[0].domain, runs[0].manifest.evolve.descriptor, jobs) as evaluator:
        tournament = grid_tournament(logs, evaluator)
    grid = pooled_grid(logs, tournament)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for index, run in enumerate(runs):
        keys: List[str] = []
        fitnesses: List[float] = []
        blocks = []
        for record in run.log.generations:
            points, fitness, record_keys = generation_samples(record, index, tournament)
            blocks.append(grid.projection.project(points))
            fitnesses.extend(fitness.tolist())
            keys.extend(record_keys)
        path = out_dir / f"{run.run_id}_projection.csv"
        write_projection_csv(path, grid.projection, keys, fitnesses, np.concatenate(blocks))
        files.append(str(path))
    return {
        "files": files,
        "explained_variance": [float(v) for v in grid.projection.explained_variance],
        "degenerate": grid.projection.degenerate,
    }


def cmd_replay(run_dir: Path, generation: int, row: int, col: int, out: Path) -> Dict[str, Any]:
    """Re-simulate one bootstrap-tournament duel of a generation."""
    loaded = load_run(run_dir)
    if not 1 <= generation <= len(loaded.log.generations):
        raise GameError(f"{run_dir} has no generation {generation}")
    record = loaded.log.generations[generation - 1]
    if not (0 <= row < len(record.new_tasks) and 0 <= col < len(record.tasks)):
        raise GameError(f"no duel ({row}, {col}) in generation {generation}")
    mine, theirs = record.new_tasks.solutions[row], record.tasks.solutions[col]
    red, blue = (mine, theirs) if record.new_tasks.side is Side.RED else (theirs, mine)
    outcome = loaded.domain.evaluate(red.genome, blue.genome)
    domain = loaded.domain
    save_trace(out, DuelTrace(domain.name, domain.encode(red.genome), domain.encode(blue.genome), outcome))
    return {
        "out": str(out),
        "fitness_red": outcome.fitness_red,
        "fitness_blue": outcome.fitness_blue,
        "winner": outcome.winner.value if outcome.winner else None,
    }


def _validate_snapshot(path: Path) -> List[str]:
    data = path.read_bytes()
    try:
        name = snapshot_domain_name(data)
        manifest_path = path.parent / "manifest.json"
        domain = build_domain(read_run_manifest(path.parent).domain) if manifest_path.exists() else default_domain(name)
        record = decode_snapshot(data, domain, check=False)
    except GameError as exc:
        return [f"{path}: {exc}"]
    return [f"{path}: {p}" for p in snapshot_violations(record)]


def _validate_file(path: Path) -> ValidationReport:
    suffix = path.suffix.lower()
    report = ValidationReport(path=str(path), kind=suffix.lstrip(".") or "file")
    try:
        if suffix == ".gsnp":
            report.violations.extend(_validate_snapshot(path))
        elif suffix == ".gtrc":
            load_trace(path)
        elif suffix == ".gtrn":
            load_tournament(path)
        elif suffix == ".gemb":
            read_external_embeddings(path)
        elif suffix == ".json":
            load_manifest(path)
        else:
            report.violations.append(f"{path}: unknown artifact type")
    except GameError as exc:
        report.violations.append(f"{path}: {exc}")
    return report


def cmd_validate(path: Path) -> List[ValidationReport]:
    if not path.exists():
        raise GameError(f"{path} does not exist")
    if not path.is_dir():
        return [_validate_file(path)]
    reports = []
    for child in sorted(path.iterdir()):
        if child.suffix.lower() in (".gsnp", ".gtrc", ".gtrn", ".gemb", ".json"):
            reports.append(_validate_file(child))
    return reports
