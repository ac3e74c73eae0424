"""Exception hierarchy shared by every feature package.

The cli maps these to exit codes; the HTTP routes map them to status codes.
"""

from typing import Optional


class GameError(Exception):
    """Base class for all errors raised by this package."""


class ArchiveError(GameError):
    pass


class BehaviorError(GameError):
    pass


class DomainError(GameError):
    pass


class EvaluationError(GameError):
    def __init__(self, message: str, generation: Optional[int] = None, index: Optional[int] = None):
        self.generation = generation
        self.index = index
        where = []
        if generation is not None:
            where.append(f"generation={generation}")
        if index is not None:
            where.append(f"evaluation={index}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ManifestError(GameError):
    pass


class SnapshotError(GameError):
    pass


class ChecksumError(SnapshotError):
    pass


class EmbeddingFileError(GameError):
    pass


class TournamentError(GameError):
    pass
