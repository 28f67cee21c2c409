"""Contextual-encoder backends and the encode half of the bridge."""

from __future__ import annotations

import hashlib
import json
import logging

import numpy as np

from .jobs import BridgeJob, BridgeError, read_conllu_tokens, write_atomic, write_manifest

log = logging.getLogger("bridge")

LAYER_POLICIES = ("first-last-avg", "last")


def pool_words(piece_vectors: np.ndarray, word_ids, num_words: int) -> np.ndarray:
    """Mean-pool wordpiece vectors into word vectors.

    ``word_ids`` maps each piece row to a word index or None for special
    tokens. A word left without any piece means the tokenizer lost it,
    which breaks the 1:1 coverage contract, so that is an error here.
    """
    dim = piece_vectors.shape[1]
    sums = np.zeros((num_words, dim))
    counts = np.zeros(num_words)
    for row, word in enumerate(word_ids):
        if word is None:
            continue
        if word >= num_words:
            raise BridgeError(f"piece aligned to out-of-range word {word}")
        sums[word] += piece_vectors[row]
        counts[word] += 1
    if (counts == 0).any():
        missing = int(np.flatnonzero(counts == 0)[0])
        raise BridgeError(f"word {missing} received no wordpieces")
    return sums / counts[:, None]


class HashEncoder:
    """Deterministic offline fallback: a pseudo-vector per surface form.

    Identical surfaces get bitwise-identical vectors regardless of
    sentence, so repeated sentences stay recognizably identical downstream.
    """

    name = "hash"

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise BridgeError(f"dim must be >= 1, got {dim}")
        self.dim = dim

    def version(self) -> str:
        return "builtin"

    def encode_batch(self, batch: list[list[str]]) -> list[np.ndarray]:
        out = []
        for surfaces in batch:
            rows = np.stack([self._vector(s) for s in surfaces])
            out.append(rows)
        return out

    def _vector(self, surface: str) -> np.ndarray:
        digest = hashlib.blake2b(surface.lower().encode(), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vec = rng.standard_normal(self.dim)
        return vec / np.linalg.norm(vec)


class HfEncoder:
    """Transformer backend pooling hidden states to word-level vectors.

    ``first-last-avg`` averages the first and last encoder layers before
    pooling over each word's pieces; ``last`` uses the final layer only.
    """

    name = "hf"

    def __init__(self, tokenizer, model, layer_policy: str = "first-last-avg",
                 model_name: str = "local"):
        if layer_policy not in LAYER_POLICIES:
            raise BridgeError(f"unknown layer policy {layer_policy!r}")
        if not tokenizer.is_fast:
            raise BridgeError("a fast tokenizer is required for word alignment")
        self.tokenizer = tokenizer
        self.model = model
        self.layer_policy = layer_policy
        self.model_name = model_name
        self.model.eval()

    @classmethod
    def from_pretrained(cls, name: str, layer_policy: str = "first-last-avg"):
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise BridgeError(f"transformers is not installed: {exc}") from exc
        try:
            tokenizer = AutoTokenizer.from_pretrained(name, use_fast=True)
            model = AutoModel.from_pretrained(name)
        except Exception as exc:
            raise BridgeError(f"cannot load encoder model {name!r}: {exc}") from exc
        return cls(tokenizer, model, layer_policy, model_name=name)

    def version(self) -> str:
        import transformers

        return f"transformers {transformers.__version__}, model {self.model_name}"

    def encode_batch(self, batch: list[list[str]]) -> list[np.ndarray]:
        import torch

        encoded = self.tokenizer(
            batch,
            is_split_into_words=True,
            padding=True,
            return_tensors="pt",
        )
        with torch.no_grad():
            outputs = self.model(**encoded, output_hidden_states=True)
        hidden = outputs.hidden_states
        if self.layer_policy == "first-last-avg":
            layers = 0.5 * (hidden[1] + hidden[-1])
        else:
            layers = hidden[-1]
        vectors = layers.numpy().astype(np.float64)
        out = []
        for item, surfaces in enumerate(batch):
            out.append(
                pool_words(vectors[item], encoded.word_ids(item), len(surfaces))
            )
        return out


def make_encoder(job: BridgeJob):
    if job.encoder_model == "hash":
        return HashEncoder(dim=job.dim)
    return HfEncoder.from_pretrained(job.encoder_model, job.layer_policy)


def run_encode(job: BridgeJob, encoder=None) -> dict:
    """Write one JSONL vector record per CoNLL-U token.

    Records carry 32-bit float values. Sentences whose tokens cannot be
    aligned to encoder pieces are skipped with a log entry.
    """
    sentences = read_conllu_tokens(job.conllu)
    if encoder is None:
        encoder = make_encoder(job)
    lines = []
    encoded = 0
    skipped = []
    for start in range(0, len(sentences), job.batch_size):
        chunk = sentences[start : start + job.batch_size]
        try:
            batch_vectors = encoder.encode_batch([s for _, s in chunk])
        except BridgeError:
            # fall back to one-by-one so a single bad sentence cannot
            # poison its whole batch
            batch_vectors = None
        if batch_vectors is None:
            batch_vectors = []
            for sent_id, surfaces in chunk:
                try:
                    batch_vectors.append(encoder.encode_batch([surfaces])[0])
                except BridgeError as exc:
                    log.warning("skipping %s: %s", sent_id, exc)
                    batch_vectors.append(None)
        for (sent_id, surfaces), rows in zip(chunk, batch_vectors):
            if rows is None:
                skipped.append(sent_id)
                continue
            for index in range(len(surfaces)):
                vec = np.asarray(rows[index], dtype=np.float32).tolist()
                lines.append(json.dumps(
                    {"sent": sent_id, "tok": index + 1, "vec": vec}
                ))
            encoded += 1
    write_atomic(job.vectors, "\n".join(lines) + ("\n" if lines else ""))
    counts = {"sentences": len(sentences), "encoded": encoded, "skipped": skipped}
    write_manifest(
        job,
        "encode",
        {"encoder": encoder.name, "encoder_version": encoder.version(),
         "layer_policy": getattr(encoder, "layer_policy", None)},
        counts,
        {job.vectors: None},
    )
    return counts
