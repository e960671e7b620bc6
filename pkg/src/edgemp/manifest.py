"""JSON artifacts and the run manifests written next to them.

A manifest records the argument vector that produced an output together with
sha256 digests of every input and output file. Replaying a manifest reruns
the same arguments into a scratch path and compares digests.
"""
from __future__ import annotations

import hashlib
import json
import os
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import __version__

MANIFEST_SUFFIX = ".manifest.json"


def dumps(obj: Any) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline.

    Floats use Python's shortest round-trip repr, so reloading gives the same
    double bit for bit.
    """
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_json(path: str | os.PathLike, obj: Any) -> str:
    """Write ``obj`` and return the sha256 of the bytes written."""
    data = dumps(obj).encode()
    Path(path).write_bytes(data)
    return sha256_bytes(data)


def read_json(path: str | os.PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def manifest_path(output: str | os.PathLike) -> Path:
    return Path(str(output) + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    parameters: dict[str, Any]
    seeds: dict[str, int]
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    version: str = __version__
    python: str = field(default_factory=platform.python_version)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        return cls(**data)

    def save(self, path: str | os.PathLike) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunManifest":
        return cls.from_dict(read_json(path))
