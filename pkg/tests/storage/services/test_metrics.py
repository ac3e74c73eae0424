import pytest

from src.analysis.services.report import MetricRow
from src.storage.services.metrics import HEADER, export_metrics, read_metrics
from src.utils.errors import SnapshotError


def test_rows_come_back_in_order(tmp_path):
    rows = [MetricRow("a", 1, "coverage", 0.1 + 0.2), MetricRow("a", 2, "coverage", 1e-300), MetricRow("b", 1, "elites", 8.0)]
    path = export_metrics(tmp_path / "metrics.csv", rows)
    assert path.read_text().splitlines()[0] == ",".join(HEADER)
    assert read_metrics(path) == [
        {"run_id": "a", "generation": 1, "metric": "coverage", "value": 0.1 + 0.2},
        {"run_id": "a", "generation": 2, "metric": "coverage", "value": 1e-300},
        {"run_id": "b", "generation": 1, "metric": "elites", "value": 8.0},
    ]


def test_foreign_csv_is_refused(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(SnapshotError):
        read_metrics(path)


def test_unwritable_destination(tmp_path):
    with pytest.raises(SnapshotError):
        export_metrics(tmp_path / "missing" / "metrics.csv", [])
