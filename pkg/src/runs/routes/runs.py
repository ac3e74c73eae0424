from typing import List

from fastapi import APIRouter

from src.runs.schema import MetricRowOut, RunDetail, RunSummary, SnapshotSummary
from src.runs.services.runs import (
    get_generation_service,
    get_metrics_service,
    get_run_service,
    list_runs_service,
)

router = APIRouter(prefix="/runs", tags=["Runs"])


@router.get("", response_model=List[RunSummary])
def list_runs():
    return list_runs_service()


@router.get("/{run_id}", response_model=RunDetail)
def get_run(run_id: str):
    return get_run_service(run_id)


@router.get("/{run_id}/generations/{generation}", response_model=SnapshotSummary)
def get_generation(run_id: str, generation: int):
    return get_generation_service(run_id, generation)


@router.get("/{run_id}/metrics", response_model=List[MetricRowOut])
def get_metrics(run_id: str):
    return get_metrics_service(run_id)
