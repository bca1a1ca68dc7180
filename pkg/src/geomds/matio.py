"""File formats used by the pipeline.

Matrices travel in a fixed binary layout so golden files compare equal
across platforms: magic ``GMDS1``, three little-endian uint64 words
(rows, cols, element kind), then the row-major float64 payload. Element
kind 1 is the only one defined. All writers go through a temp-file +
rename so partial output never lands under the target name.
"""

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FileAccessError, ParseError

MAGIC = b"GMDS1"
KIND_FLOAT64 = 1
_HEADER = struct.Struct("<QQQ")


def atomic_write_bytes(path, payload: bytes):
    """Write bytes to ``path`` via a temp file and atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_matrix(path, array):
    """Serialize a 2-D float array in the GMDS1 binary layout."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"matrix expected, got ndim={a.ndim}")
    header = MAGIC + _HEADER.pack(a.shape[0], a.shape[1], KIND_FLOAT64)
    payload = np.ascontiguousarray(a).astype("<f8", copy=False).tobytes()
    atomic_write_bytes(path, header + payload)


def read_matrix(path):
    """Read a GMDS1 matrix back as a float64 array."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FileAccessError(f"cannot read matrix file {path}: {exc}") from exc
    if len(blob) < len(MAGIC) + _HEADER.size:
        raise ParseError(f"{path}: truncated matrix file")
    if blob[: len(MAGIC)] != MAGIC:
        raise ParseError(f"{path}: bad magic, not a GMDS1 file")
    rows, cols, kind = _HEADER.unpack_from(blob, len(MAGIC))
    if kind != KIND_FLOAT64:
        raise ParseError(f"{path}: unsupported element kind {kind}")
    body = blob[len(MAGIC) + _HEADER.size :]
    expected = rows * cols * 8
    if len(body) != expected:
        raise ParseError(f"{path}: payload is {len(body)} bytes, expected {expected}")
    flat = np.frombuffer(body, dtype="<f8")
    return flat.astype(np.float64).reshape(rows, cols)


def write_indices(path, indices):
    """One vertex id per line."""
    idx = np.asarray(indices, dtype=np.int64)
    atomic_write_text(path, "".join(f"{i}\n" for i in idx))


def read_indices(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileAccessError(f"cannot read index file {path}: {exc}") from exc
    try:
        return np.array([int(line) for line in text.split()], dtype=np.int64)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_embedding_csv(path, coords):
    z = np.asarray(coords, dtype=np.float64)
    lines = [",".join(f"{x:.17g}" for x in row) for row in z]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_pairs_csv(path):
    """Read an ``i,j`` pairs file into an int64 (k, 2) array."""
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise FileAccessError(f"cannot read pairs file {path}: {exc}") from exc
    try:
        pairs = np.loadtxt(
            raw.splitlines(), delimiter=",", dtype=np.int64, ndmin=2
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if pairs.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if pairs.shape[1] != 2:
        raise ParseError(f"{path}: expected two columns, got {pairs.shape[1]}")
    return pairs


def write_distances_csv(path, pairs, values):
    pairs = np.asarray(pairs, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    lines = [f"{i},{j},{v:.17g}" for (i, j), v in zip(pairs, values)]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def write_json(path, record):
    atomic_write_text(path, json.dumps(record, sort_keys=True, indent=2) + "\n")


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileAccessError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_jsonl(path, records):
    """Write JSON-lines records, replacing the file (deterministic output)."""
    body = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    atomic_write_text(path, body)


def append_jsonl(path, record):
    """Append one record to a JSON-lines log."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
