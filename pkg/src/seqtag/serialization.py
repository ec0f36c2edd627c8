"""Binary container for model files.

Layout::

    8 bytes   magic b"SEQTAGc1"
    8 bytes   little-endian uint64: length N of the JSON header
    N bytes   UTF-8 JSON header {"format", "meta", "arrays": [{"name", "shape"}]}
    ...       each array in header order as little-endian float64, C order

The header is written with sorted keys so equal models give equal bytes.
"""

from __future__ import annotations

import io
import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Mapping

import numpy as np

MAGIC = b"SEQTAGc1"


class ContainerError(ValueError):
    pass


def dump_container(fmt: str, meta: Mapping, arrays: Mapping[str, np.ndarray]) -> bytes:
    names = list(arrays)
    header = {
        "format": fmt,
        "meta": meta,
        "arrays": [{"name": n, "shape": list(np.shape(arrays[n]))} for n in names],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<Q", len(blob)))
    out.write(blob)
    for n in names:
        out.write(np.ascontiguousarray(arrays[n], dtype="<f8").tobytes())
    return out.getvalue()


def parse_container(data: bytes, expect_format: str | None = None):
    """Return ``(format, meta, arrays)`` from container bytes."""
    if data[:8] != MAGIC:
        raise ContainerError("not a seqtag model file (bad magic)")
    (n,) = struct.unpack("<Q", data[8:16])
    try:
        header = json.loads(data[16:16 + n].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ContainerError(f"corrupt header: {err}") from None
    fmt = header["format"]
    if expect_format is not None and fmt != expect_format:
        raise ContainerError(f"expected format {expect_format!r}, found {fmt!r}")
    arrays = {}
    pos = 16 + n
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = pos + 8 * count
        if end > len(data):
            raise ContainerError(f"truncated array {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(data[pos:end], dtype="<f8").astype(np.float64).reshape(shape)
        pos = end
    if pos != len(data):
        raise ContainerError("trailing bytes after last array")
    return fmt, header["meta"], arrays


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_container(path: str | Path, fmt: str, meta: Mapping, arrays: Mapping[str, np.ndarray]) -> None:
    atomic_write_bytes(path, dump_container(fmt, meta, arrays))


def load_container(path: str | Path, expect_format: str | None = None):
    return parse_container(Path(path).read_bytes(), expect_format)


def prefixed(arrays: Mapping[str, np.ndarray], prefix: str) -> dict[str, np.ndarray]:
    return {f"{prefix}{k}": v for k, v in arrays.items()}


def unprefixed(arrays: Mapping[str, np.ndarray], prefix: str) -> dict[str, np.ndarray]:
    return {k[len(prefix):]: v for k, v in arrays.items() if k.startswith(prefix)}
