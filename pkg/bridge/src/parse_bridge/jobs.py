"""Job descriptions, sentence-file IO, atomic writes, and run manifests."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

__version__ = "0.1.0"


class BridgeError(Exception):
    """Anything that should stop a bridge run with a data error."""


@dataclass(frozen=True)
class BridgeJob:
    """One preprocessing run: where the sentences are and what to apply.

    ``sentences`` is a TSV file of ``sent_id<TAB>text`` rows, one sentence
    per line, matching the companion-sentences layout the scorer reads.
    ``conllu`` is the parse output and the encode input; ``vectors`` is
    the token-vector JSONL the encoder writes.
    """

    sentences: str | None = None
    conllu: str | None = None
    vectors: str | None = None
    parser_model: str = "chain"
    encoder_model: str = "hash"
    layer_policy: str = "first-last-avg"
    language: str = "en"
    lowercase: bool = False
    batch_size: int = 32
    dim: int = 64
    manifest: str | None = None


def read_sentences(path) -> list[tuple[str, str]]:
    """Ordered (sent_id, text) rows; blank lines and # comments skipped."""
    rows = []
    seen = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\n").split("\t", 1)
            if len(cols) != 2 or not cols[0]:
                raise BridgeError(
                    f"{path}, line {line_no}: expected sent_id<TAB>text"
                )
            sent_id, text = cols
            if sent_id in seen:
                raise BridgeError(f"{path}, line {line_no}: duplicate id {sent_id!r}")
            seen.add(sent_id)
            rows.append((sent_id, text))
    return rows


def read_conllu_tokens(path) -> list[tuple[str, list[str]]]:
    """(sent_id, surfaces) per sentence, enough to align vectors to tokens.

    Multiword-token ranges and empty nodes are skipped the same way the
    consumer skips them, so indices line up with its token numbering.
    """
    sentences = []
    sent_id = None
    surfaces: list[str] = []
    counter = 0

    def flush():
        nonlocal sent_id, surfaces, counter
        if surfaces:
            counter += 1
            sentences.append((sent_id or str(counter), surfaces))
        sent_id, surfaces = None, []

    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                flush()
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                if key.strip() == "sent_id":
                    sent_id = value.strip()
                continue
            cols = line.split("\t")
            if "-" in cols[0] or "." in cols[0]:
                continue
            surfaces.append(cols[1])
    flush()
    return sentences


def write_atomic(path, text: str):
    """Write the full payload or nothing: temp file in place, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(job: BridgeJob, command: str, versions: dict, counts: dict,
                   outputs: dict):
    if not job.manifest:
        return
    payload = {
        "bridge_version": __version__,
        "command": command,
        "job": {
            "sentences": job.sentences,
            "conllu": job.conllu,
            "vectors": job.vectors,
            "parser_model": job.parser_model,
            "encoder_model": job.encoder_model,
            "layer_policy": job.layer_policy,
            "language": job.language,
            "lowercase": job.lowercase,
            "batch_size": job.batch_size,
        },
        "versions": versions,
        "counts": counts,
        "outputs": {path: sha256_file(path) for path in outputs},
    }
    write_atomic(job.manifest, json.dumps(payload, sort_keys=True, indent=2) + "\n")
