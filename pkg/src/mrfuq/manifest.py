"""Run manifests: enough provenance to reproduce an output byte for byte."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field


@dataclass
class RunManifest:
    command: list[str]
    version: str
    seed: int | None = None
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    _start: float = field(default_factory=time.monotonic, repr=False)

    def add_input(self, path: str) -> None:
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        self.inputs[path] = digest

    def add_output(self, path: str) -> None:
        self.outputs.append(path)

    def write(self, path: str) -> None:
        self.wall_time_s = time.monotonic() - self._start
        payload = {k: v for k, v in asdict(self).items() if not k.startswith("_")}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.outputs.append(path)
