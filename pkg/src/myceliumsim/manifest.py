"""Run manifests: what produced an artifact, from which inputs, exactly.

Every artifact-writing CLI subcommand drops a `<output>.manifest` sidecar
recording the tool version, the argv, seeds, and sha256 digests of every
input and output file. Timestamps honor SOURCE_DATE_EPOCH for reproducible
archives.
"""

from __future__ import annotations

import hashlib
import os
import shlex
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import ParseError

MANIFEST_FORMAT = "myceliumsim/manifest/v1"
TOOL_VERSION = "0.1.0"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(tz=timezone.utc).isoformat()


@dataclass(frozen=True)
class RunManifest:
    command: tuple[str, ...]
    timestamp: str
    tool_version: str = TOOL_VERSION
    seeds: tuple[int, ...] = field(default_factory=tuple)
    inputs: tuple[tuple[str, str], ...] = field(default_factory=tuple)  # (path, sha256)
    outputs: tuple[tuple[str, str], ...] = field(default_factory=tuple)


def build_manifest(command, inputs=(), outputs=(), seeds=()) -> RunManifest:
    """Digest the named files now and freeze the result."""
    return RunManifest(
        command=tuple(str(c) for c in command),
        timestamp=_timestamp(),
        seeds=tuple(int(s) for s in seeds),
        inputs=tuple((str(p), file_digest(p)) for p in inputs),
        outputs=tuple((str(p), file_digest(p)) for p in outputs),
    )


def write_manifest(manifest: RunManifest, path) -> None:
    lines = [MANIFEST_FORMAT]
    lines.append(f"tool_version {manifest.tool_version}")
    lines.append(f"command {shlex.join(manifest.command)}")
    for seed in manifest.seeds:
        lines.append(f"seed {seed}")
    lines.append(f"timestamp {manifest.timestamp}")
    for p, digest in manifest.inputs:
        lines.append(f"input sha256 {digest} {p}")
    for p, digest in manifest.outputs:
        lines.append(f"output sha256 {digest} {p}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_manifest(path) -> RunManifest:
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != MANIFEST_FORMAT:
        raise ParseError(f"expected header {MANIFEST_FORMAT!r}", path=path, line=1)
    version = TOOL_VERSION
    command: tuple[str, ...] = ()
    timestamp = ""
    seeds: list[int] = []
    inputs: list[tuple[str, str]] = []
    outputs: list[tuple[str, str]] = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        if key == "tool_version":
            version = rest.strip()
        elif key == "command":
            command = tuple(shlex.split(rest))
        elif key == "seed":
            try:
                seeds.append(int(rest))
            except ValueError:
                raise ParseError(f"bad seed {rest!r}", path=path, line=ln) from None
        elif key == "timestamp":
            timestamp = rest.strip()
        elif key in ("input", "output"):
            toks = rest.split(maxsplit=2)
            if len(toks) != 3 or toks[0] != "sha256":
                raise ParseError(f"bad {key} line {line!r}", path=path, line=ln)
            (inputs if key == "input" else outputs).append((toks[2], toks[1]))
        else:
            raise ParseError(f"unknown key {key!r}", path=path, line=ln)
    return RunManifest(command, timestamp, version, tuple(seeds), tuple(inputs), tuple(outputs))


def verify_manifest(manifest: RunManifest) -> list[str]:
    """Re-digest every referenced file; returns a list of mismatch messages."""
    problems = []
    for role, entries in (("input", manifest.inputs), ("output", manifest.outputs)):
        for p, digest in entries:
            if not os.path.exists(p):
                problems.append(f"{role} {p}: missing")
            elif file_digest(p) != digest:
                problems.append(f"{role} {p}: digest mismatch")
    return problems
