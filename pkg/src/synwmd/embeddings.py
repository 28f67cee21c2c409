"""Static and contextual word-vector stores, whitening, and IDF weights."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .conllu import Corpus
from .errors import (
    DegeneratePopulation,
    DimensionMismatch,
    DuplicateWordWarning,
    EmptyFile,
    MalformedLine,
    MissingContextualVector,
    UnknownTokenReference,
)


@dataclass
class StaticEmbeddings:
    """Word to float64 vector table with a fixed dimensionality."""

    dim: int
    table: dict[str, np.ndarray]
    duplicates: int = 0

    def __len__(self):
        return len(self.table)

    def __contains__(self, word):
        return word in self.table

    def get(self, word):
        """Vector for ``word`` or None when out of vocabulary."""
        return self.table.get(word)


def load_static(source, source_name: str = "<stream>") -> StaticEmbeddings:
    """Load word2vec text format: optional "count dim" header, then rows
    of a word followed by its components, whitespace separated.

    Duplicate words keep the first row and emit a warning per repeat.
    """
    if isinstance(source, str):
        lines = iter(source.splitlines())
    elif hasattr(source, "read"):
        lines = iter(source.read().splitlines())
    else:
        lines = iter([ln.rstrip("\n") for ln in source])

    dim = None
    table: dict[str, np.ndarray] = {}
    duplicates = 0
    first = True
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split()
        if first:
            first = False
            if len(parts) == 2:
                try:
                    int(parts[0])
                    dim = int(parts[1])
                    continue
                except ValueError:
                    pass
        word = parts[0]
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            raise MalformedLine(
                f"{source_name}, line {line_no}: non-numeric vector component"
            ) from None
        if dim is None:
            if len(vec) == 0:
                raise DimensionMismatch(
                    f"{source_name}, line {line_no}: row has no components"
                )
            dim = len(vec)
        elif len(vec) != dim:
            raise DimensionMismatch(
                f"{source_name}, line {line_no}: expected {dim} components, got {len(vec)}"
            )
        if word in table:
            duplicates += 1
            warnings.warn(
                DuplicateWordWarning(f"{source_name}: duplicate word {word!r}, first kept")
            )
            continue
        table[word] = vec
    if not table:
        raise EmptyFile(f"{source_name}: no vector rows")
    return StaticEmbeddings(dim, table, duplicates)


def read_static(path) -> StaticEmbeddings:
    with open(path, encoding="utf-8") as handle:
        return load_static(handle, source_name=str(path))


@dataclass
class ContextualEmbeddings:
    """Per-token vectors keyed by (sentence_id, 1-based token index)."""

    dim: int
    vectors: dict[tuple[str, int], np.ndarray]

    def __len__(self):
        return len(self.vectors)

    def get(self, sentence_id, token_index):
        return self.vectors.get((sentence_id, token_index))

    def vector(self, sentence_id, token_index):
        got = self.vectors.get((sentence_id, token_index))
        if got is None:
            raise MissingContextualVector(
                f"no vector for ({sentence_id!r}, {token_index})"
            )
        return got

    def validate_against(self, corpus: Corpus):
        """Require exact coverage: one vector per corpus token, no strays."""
        for sent in corpus:
            for tok in sent.tokens:
                if (sent.sentence_id, tok.index) not in self.vectors:
                    raise MissingContextualVector(
                        f"no vector for ({sent.sentence_id!r}, {tok.index})"
                    )
        for sid, tix in self.vectors:
            if sid not in corpus:
                raise UnknownTokenReference(f"vector for unknown sentence {sid!r}")
            sent = corpus.sentence(sid)
            try:
                sent.token(tix)
            except Exception:
                raise UnknownTokenReference(
                    f"vector for unknown token ({sid!r}, {tix})"
                ) from None


def load_contextual(source, source_name: str = "<stream>") -> ContextualEmbeddings:
    """Load token vectors from JSONL records {"sent": id, "tok": i, "vec": [...]}.

    Components are 32-bit on disk and widened to float64 in memory.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]

    dim = None
    vectors: dict[tuple[str, int], np.ndarray] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            sid = str(rec["sent"])
            tix = int(rec["tok"])
            vec = np.asarray(rec["vec"], dtype=np.float32).astype(np.float64)
        except (ValueError, KeyError, TypeError):
            raise MalformedLine(f"{source_name}, line {line_no}: bad record") from None
        if vec.ndim != 1 or len(vec) == 0:
            raise MalformedLine(f"{source_name}, line {line_no}: bad vector shape")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise DimensionMismatch(
                f"{source_name}, line {line_no}: expected {dim} components, got {len(vec)}"
            )
        key = (sid, tix)
        if key in vectors:
            raise MalformedLine(
                f"{source_name}, line {line_no}: duplicate record for {key}"
            )
        vectors[key] = vec
    if not vectors:
        raise EmptyFile(f"{source_name}: no vector records")
    return ContextualEmbeddings(dim, vectors)


def read_contextual(path) -> ContextualEmbeddings:
    with open(path, encoding="utf-8") as handle:
        return load_contextual(handle, source_name=str(path))


@dataclass(frozen=True)
class WhiteningTransform:
    """Affine map (x - mean) @ projection that decorrelates a population.

    ``projection`` has shape (input_dim, effective_dim); rank-deficient
    directions of the fitting population are dropped, so the output can be
    narrower than the input.
    """

    mean: np.ndarray
    projection: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.projection.shape[0]

    @property
    def effective_dim(self) -> int:
        return self.projection.shape[1]

    def apply(self, vectors):
        """Transform one vector or a row stack of vectors."""
        arr = np.asarray(vectors, dtype=np.float64)
        return (arr - self.mean) @ self.projection


_RANK_REL_TOL = 1e-9


def fit_whitening(population) -> WhiteningTransform:
    """Fit a whitening transform on a stack of vectors (one per row).

    After the transform the fitting population has identity sample
    covariance on the retained directions.
    """
    X = np.asarray(population, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("whitening needs at least two vectors")
    mean = X.mean(axis=0)
    centered = X - mean
    if np.abs(centered).max() == 0.0:
        raise DegeneratePopulation("all vectors in the population are identical")
    cov = centered.T @ centered / (X.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    keep = evals > evals.max() * _RANK_REL_TOL
    if not keep.any():
        raise DegeneratePopulation("population covariance has no usable directions")
    projection = evecs[:, keep] / np.sqrt(evals[keep])
    return WhiteningTransform(mean=mean, projection=projection)


@dataclass
class IdfTable:
    """Smoothed inverse document frequencies over a corpus."""

    num_docs: int
    idf: dict[str, float]

    def __post_init__(self):
        self._max = max(self.idf.values(), default=1.0)

    def weight(self, word: str) -> float:
        """IDF of ``word``; unseen words get the highest observed value."""
        got = self.idf.get(word)
        return self._max if got is None else got

    def __contains__(self, word):
        return word in self.idf


def compute_idf(corpus: Corpus, lowercase: bool = True) -> IdfTable:
    """idf(w) = ln((1 + N) / (1 + df(w))) + 1 over the corpus sentences.

    Empty-surface tokens are ignored. Keys follow the token-identity rule
    (lowercased surface unless ``lowercase`` is off).
    """
    df: dict[str, int] = {}
    for sent in corpus:
        seen = set()
        for tok in sent.tokens:
            if tok.surface == "":
                continue
            seen.add(tok.surface.lower() if lowercase else tok.surface)
        for word in seen:
            df[word] = df.get(word, 0) + 1
    n_docs = len(corpus)
    idf = {
        word: math.log((1.0 + n_docs) / (1.0 + count)) + 1.0
        for word, count in df.items()
    }
    return IdfTable(n_docs, idf)
