"""Run manifests: what went in, what came out, and with which settings."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__

MANIFEST_NAME = "manifest.json"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    version: str = __version__
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[dict[str, Any]] = field(default_factory=list)
    started: str = ""
    wall_clock_seconds: float = 0.0

    def add_input(self, path: str | Path) -> None:
        p = Path(path)
        if p.is_file():
            self.inputs[str(p)] = sha256_file(p)

    def add_output(self, path: str | Path, out_dir: str | Path) -> None:
        p = Path(path)
        self.outputs.append({"path": os.path.relpath(p, out_dir), "sha256": sha256_file(p),
                             "bytes": p.stat().st_size})

    def write(self, out_dir: str | Path) -> Path:
        target = Path(out_dir) / MANIFEST_NAME
        atomic_write_text(target, json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return target
