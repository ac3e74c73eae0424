from enum import IntEnum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ExitCode(IntEnum):
    OK = 0
    USAGE = 2
    VALIDATION = 3
    RUNTIME = 4


class StatusLine(BaseModel):
    """The single JSON line every command prints on stdout."""

    command: str
    status: str = "ok"
    exit_code: int = ExitCode.OK
    error: Optional[str] = None
    result: Dict[str, Any] = Field(default_factory=dict)


class ValidationReport(BaseModel):
    path: str
    kind: str
    violations: List[str] = Field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations
