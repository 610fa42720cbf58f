"""Run manifests: the resolved state needed to reproduce a command bitwise.

Every CLI command drops one of these next to its outputs. A manifest holds
the command name, every resolved parameter that can influence an output
byte, the input file's hash, and the output basenames. Execution details
that cannot change results (worker count, output directory) stay out, so a
rerun writes an identical manifest as well.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

__all__ = ["RunManifest", "TOOL_VERSION", "sha256_of"]

TOOL_VERSION = "0.1.0"


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    input_path: str
    input_sha256: str
    base_seed: int
    tool_version: str
    outputs: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "input_path": self.input_path,
            "input_sha256": self.input_sha256,
            "base_seed": self.base_seed,
            "tool_version": self.tool_version,
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunManifest":
        known = {"command", "parameters", "input_path", "input_sha256",
                 "base_seed", "tool_version", "outputs"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown manifest fields: {sorted(extra)}")
        missing = known - set(data)
        if missing:
            raise ValueError(f"manifest is missing fields: {sorted(missing)}")
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            input_path=data["input_path"],
            input_sha256=data["input_sha256"],
            base_seed=data["base_seed"],
            tool_version=data["tool_version"],
            outputs=tuple(data["outputs"]),
        )

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def check_input(self) -> None:
        """Verify the referenced input file still hashes to the recorded value."""
        actual = sha256_of(self.input_path)
        if actual != self.input_sha256:
            raise ValueError(
                f"input file {self.input_path} has changed since the manifest "
                f"was written (sha256 {actual} != {self.input_sha256})"
            )
