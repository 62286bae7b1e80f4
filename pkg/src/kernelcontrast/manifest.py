"""Provenance records for CLI runs.

Every run that writes an output also writes a RunManifest JSON next to
it: tool version, the subcommand and its resolved flags, a hash of the
effective configuration, sha256 digests of the inputs, the seed, and a
metric map. Timestamps live in their own field so that everything else
in the file is reproducible byte for byte; diffing two manifests after
dropping "timestamps" answers "same run?" directly.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time

__all__ = [
    "RunManifest",
    "sha256_file",
    "config_hash",
    "make_manifest",
    "write_manifest",
    "load_manifest",
]


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(settings: dict) -> str:
    """Hash the effective key=value configuration, order-independent."""
    canon = "\n".join(f"{k}={settings[k]}" for k in sorted(settings))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclasses.dataclass
class RunManifest:
    tool: str
    version: str
    subcommand: str
    flags: dict
    config_digest: str
    inputs: dict
    seed: int
    metrics: dict
    timestamps: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"


def make_manifest(
    subcommand: str,
    flags: dict,
    input_paths: list,
    seed: int,
    metrics: dict,
    started: float,
    version: str,
) -> RunManifest:
    finished = time.time()
    return RunManifest(
        tool="kc",
        version=version,
        subcommand=subcommand,
        flags={k: _jsonable(v) for k, v in sorted(flags.items())},
        config_digest=config_hash({k: v for k, v in flags.items() if v is not None}),
        inputs={p: sha256_file(p) for p in sorted(set(input_paths))},
        seed=int(seed),
        metrics={k: _jsonable(v) for k, v in metrics.items()},
        timestamps={"started": started, "finished": finished},
    )


def _jsonable(value):
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def write_manifest(path: str, manifest: RunManifest) -> None:
    with open(path, "w") as fh:
        fh.write(manifest.to_json())


def load_manifest(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
