import struct
from functools import lru_cache
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np

from src.static_values import EMBEDDING_MAGIC, EMBEDDING_VERSION
from src.utils.errors import EmbeddingFileError

# magic, version, dimension, count
_HEADER = struct.Struct("<4sIIQ")


def _record_dtype(dimension: int) -> np.dtype:
    return np.dtype([("key", "<u8"), ("values", "<f4", (dimension,))])


def parse_embeddings(data: bytes) -> Dict[int, np.ndarray]:
    if len(data) < _HEADER.size:
        raise EmbeddingFileError("embedding file is shorter than its header")
    magic, version, dimension, count = _HEADER.unpack_from(data)
    if magic != EMBEDDING_MAGIC:
        raise EmbeddingFileError(f"bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}")
    if version != EMBEDDING_VERSION:
        raise EmbeddingFileError(f"unsupported embedding file version {version}")
    if dimension == 0:
        raise EmbeddingFileError("embedding dimension is zero")
    dtype = _record_dtype(dimension)
    body = data[_HEADER.size :]
    if len(body) != count * dtype.itemsize:
        raise EmbeddingFileError(f"expected {count} records of {dtype.itemsize} bytes, found {len(body)} bytes")
    records = np.frombuffer(body, dtype=dtype, count=count)
    table: Dict[int, np.ndarray] = {}
    for key, values in zip(records["key"].tolist(), records["values"]):
        if key in table:
            raise EmbeddingFileError(f"duplicate evaluation key {key}")
        table[key] = np.array(values, dtype=np.float32)
    return table


def read_external_embeddings(path: Union[str, Path]) -> Dict[int, np.ndarray]:
    """Evaluation key -> float32 vector, from a GEMB file."""
    return parse_embeddings(Path(path).read_bytes())


@lru_cache(maxsize=4)
def cached_embeddings(path: str) -> Dict[int, np.ndarray]:
    # evaluation workers read the same file many times
    return read_external_embeddings(path)


def write_external_embeddings(path: Union[str, Path], table: Mapping[int, np.ndarray]) -> None:
    if not table:
        raise EmbeddingFileError("refusing to write an empty embedding table")
    dimensions = {np.asarray(v).shape for v in table.values()}
    if len(dimensions) != 1 or len(next(iter(dimensions))) != 1:
        raise EmbeddingFileError(f"embeddings must share one 1-D shape, got {sorted(dimensions)}")
    dimension = next(iter(dimensions))[0]
    records = np.zeros(len(table), dtype=_record_dtype(dimension))
    for i, key in enumerate(sorted(table)):
        records[i]["key"] = key
        records[i]["values"] = np.asarray(table[key], dtype=np.float32)
    header = _HEADER.pack(EMBEDDING_MAGIC, EMBEDDING_VERSION, dimension, len(table))
    Path(path).write_bytes(header + records.tobytes())
