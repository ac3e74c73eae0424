import csv
from pathlib import Path
from typing import Dict, List, Sequence, Union

from src.analysis.services.report import MetricRow
from src.storage.services.artifacts import fmt
from src.utils.errors import SnapshotError

HEADER = ["run_id", "generation", "metric", "value"]


def export_metrics(path: Union[str, Path], rows: Sequence[MetricRow]) -> Path:
    """One row per (run, generation, metric), in the order given."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(HEADER)
            for row in rows:
                out.writerow([row.run_id, row.generation, row.metric, fmt(row.value)])
        tmp.replace(path)
    except OSError as exc:
        raise SnapshotError(f"cannot write metrics to {path}: {exc}") from exc
    return path


def read_metrics(path: Union[str, Path]) -> List[Dict[str, Union[str, int, float]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != HEADER:
            raise SnapshotError(f"{path} is not a metrics file")
        return [
            {"run_id": r["run_id"], "generation": int(r["generation"]), "metric": r["metric"], "value": float(r["value"])}
            for r in reader
        ]
