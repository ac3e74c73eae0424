"""Little-endian, length-prefixed binary framing shared by every artifact.

A file is ``magic | u32 version | body | u64 FNV-1a of everything before``.
Equal values always encode to identical bytes.
"""

import struct
from typing import List, Optional, Tuple

import numpy as np

from src.archive.schema import BehaviorVector, DistanceKind, Elite
from src.utils.checksum import fnv1a64
from src.utils.errors import BehaviorError, ChecksumError, SnapshotError

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_I64 = struct.Struct("<q")
_F64 = struct.Struct("<d")

_KINDS = (DistanceKind.COSINE, DistanceKind.EUCLIDEAN)


class Writer:
    def __init__(self, magic: bytes, version: int):
        self.buffer = bytearray(magic)
        self.u32(version)

    def u8(self, v: int) -> None:
        self.buffer += _U8.pack(v)

    def u32(self, v: int) -> None:
        self.buffer += _U32.pack(v)

    def u64(self, v: int) -> None:
        self.buffer += _U64.pack(v)

    def i64(self, v: int) -> None:
        self.buffer += _I64.pack(v)

    def f64(self, v: float) -> None:
        self.buffer += _F64.pack(v)

    def flag(self, v: bool) -> None:
        self.u8(1 if v else 0)

    def text(self, v: str) -> None:
        data = v.encode("utf-8")
        self.u32(len(data))
        self.buffer += data

    def array(self, values: np.ndarray, dtype: str = "<f8") -> None:
        """Shape-prefixed array of any rank."""
        arr = np.ascontiguousarray(values, dtype=dtype)
        self.u8(arr.ndim)
        for n in arr.shape:
            self.u32(n)
        self.buffer += arr.tobytes()

    def ids(self, values: List[int]) -> None:
        self.u32(len(values))
        for v in values:
            self.u64(v)

    def behavior(self, b: BehaviorVector) -> None:
        self.u8(_KINDS.index(b.distance_kind))
        self.array(b.values)

    def elite(self, e: Elite) -> None:
        self.u64(e.solution_id)
        self.f64(e.fitness)
        self.i64(e.size)
        self.behavior(e.behavior)

    def optional_elite(self, e: Optional[Elite]) -> None:
        self.flag(e is not None)
        if e is not None:
            self.elite(e)

    def finish(self) -> bytes:
        return bytes(self.buffer) + _U64.pack(fnv1a64(bytes(self.buffer)))


class Reader:
    def __init__(self, data: bytes, magic: bytes, version: int, what: str = "file"):
        if len(data) < len(magic) + _U32.size + _U64.size:
            raise ChecksumError(f"{what} is truncated")
        body, trailer = data[:-_U64.size], data[-_U64.size :]
        if _U64.unpack(trailer)[0] != fnv1a64(body):
            raise ChecksumError(f"{what} checksum mismatch (truncated or corrupted)")
        if body[: len(magic)] != magic:
            raise SnapshotError(f"{what} has bad magic {body[:len(magic)]!r}, expected {magic!r}")
        self.data = body
        self.offset = len(magic)
        self.what = what
        found = self.u32()
        if found != version:
            raise SnapshotError(f"{what} version {found} is not supported, this build reads version {version}")

    def _take(self, n: int) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise SnapshotError(f"{self.what} ends early at byte {self.offset}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def _unpack(self, s: struct.Struct):
        return s.unpack(self._take(s.size))[0]

    def u8(self) -> int:
        return self._unpack(_U8)

    def u32(self) -> int:
        return self._unpack(_U32)

    def u64(self) -> int:
        return self._unpack(_U64)

    def i64(self) -> int:
        return self._unpack(_I64)

    def f64(self) -> float:
        return self._unpack(_F64)

    def flag(self) -> bool:
        v = self.u8()
        if v > 1:
            raise SnapshotError(f"{self.what}: bad flag byte {v}")
        return v == 1

    def text(self) -> str:
        try:
            return self._take(self.u32()).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SnapshotError(f"{self.what}: bad text field") from exc

    def array(self, dtype: str = "<f8") -> np.ndarray:
        ndim = self.u8()
        shape: Tuple[int, ...] = tuple(self.u32() for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        raw = self._take(count * np.dtype(dtype).itemsize)
        return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()

    def ids(self) -> List[int]:
        return [self.u64() for _ in range(self.u32())]

    def behavior(self) -> BehaviorVector:
        kind = self.u8()
        if kind >= len(_KINDS):
            raise SnapshotError(f"{self.what}: unknown distance kind {kind}")
        try:
            return BehaviorVector(self.array(), _KINDS[kind])
        except BehaviorError as exc:
            raise SnapshotError(f"{self.what}: bad behavior vector: {exc}") from exc

    def elite(self) -> Elite:
        solution_id, fitness, size = self.u64(), self.f64(), self.i64()
        return Elite(solution_id, fitness, self.behavior(), size)

    def optional_elite(self) -> Optional[Elite]:
        return self.elite() if self.flag() else None

    def done(self) -> None:
        if self.offset != len(self.data):
            raise SnapshotError(f"{self.what} has {len(self.data) - self.offset} trailing bytes")
