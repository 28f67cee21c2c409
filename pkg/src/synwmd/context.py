"""Subtree and n-gram context embeddings and syntax-aware cost matrices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .conllu import DepSentence, children_within
from .errors import EmptySideAfterFiltering, MissingVector, ZeroVectorWarning
from .filters import TokenFilter
from .flows import FlowAssignment

CONTEXT_MODES = ("none", "subtree", "ngram")
METRICS = ("cosine", "l2")
NGRAM_SIZES = (2, 3)


@dataclass(frozen=True)
class Subtree:
    """A parent token with its filtered descendants within ``hop`` child edges."""

    parent: int
    hop: int
    members: frozenset[int]


@dataclass(frozen=True)
class SubtreeEmbedding:
    subtree: Subtree
    vector: np.ndarray


def extract_subtrees(sentence: DepSentence, m: int = 3, filt=None, keep=None):
    """All deduplicated subtrees of a sentence up to ``m`` child hops.

    For each parent token and each h in 1..m the member set is the parent
    plus its descendants within h child edges that pass the filter. Hops
    descend through filtered tokens. Single-member sets are dropped, and no
    two subtrees of one sentence share a member set.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if keep is None:
        filt = filt if filt is not None else TokenFilter()
        keep = filt.keeps
    out = []
    seen: set[frozenset[int]] = set()
    for tok in sentence.tokens:
        for h in range(1, m + 1):
            kids = {
                c
                for c in children_within(sentence, tok.index, h)
                if keep(sentence.token(c))
            }
            if not kids:
                continue
            members = frozenset(kids | {tok.index})
            if members in seen:
                continue
            seen.add(members)
            out.append(Subtree(tok.index, h, members))
    return out


def ngram_spans(sentence: DepSentence, keep, sizes=NGRAM_SIZES):
    """Contiguous 2-gram and 3-gram index spans over the kept token sequence."""
    kept = [tok.index for tok in sentence.tokens if keep(tok)]
    spans = []
    for size in sizes:
        for start in range(len(kept) - size + 1):
            spans.append(tuple(kept[start : start + size]))
    return spans


def embed_subtree(subtree: Subtree, vector_of, flow: FlowAssignment | None = None) -> SubtreeEmbedding:
    """Average the member vectors of a subtree.

    Uniform by default; given a ``flow``, members are weighted by their flow
    mass (members without flow fall back to uniform when nothing carries).
    """
    members = sorted(subtree.members)
    vecs = []
    for index in members:
        vec = vector_of(index)
        if vec is None:
            raise MissingVector(f"subtree member {index} has no vector")
        vecs.append(np.asarray(vec, dtype=np.float64))
    stack = np.asarray(vecs)
    if flow is None:
        weights = np.full(len(members), 1.0 / len(members))
    else:
        raw = np.array([flow.flows.get(index, 0.0) for index in members])
        total = raw.sum()
        if total == 0.0:
            weights = np.full(len(members), 1.0 / len(members))
        else:
            weights = raw / total
    return SubtreeEmbedding(subtree, weights @ stack)


@dataclass(frozen=True, eq=False)
class SentenceContext:
    """Carrier tokens of one sentence with vectors and context embeddings."""

    sentence_id: str
    carriers: tuple[int, ...]
    words: tuple[str, ...]
    vectors: np.ndarray
    ctx_vectors: np.ndarray | None
    ctx_members: tuple[tuple[int, ...], ...]

    @property
    def sort_key(self):
        return (self.sentence_id, self.words)

    def __len__(self):
        return len(self.carriers)


def build_context(
    sentence: DepSentence,
    vector_of,
    *,
    filt: TokenFilter | None = None,
    context_mode: str = "none",
    m: int = 3,
    weighting: str = "uniform",
    flow: FlowAssignment | None = None,
) -> SentenceContext | None:
    """Prepare a sentence for cost matrices.

    ``vector_of(token)`` returns the token's (possibly whitened) vector or
    None when the token has no usable vector and must be skipped. Returns
    None when no token survives. Context members are filtered the same way
    as carriers; a subtree whose parent lacks a vector is dropped.
    """
    if context_mode not in CONTEXT_MODES:
        raise ValueError(f"unknown context mode {context_mode!r}")
    if weighting not in ("uniform", "flow"):
        raise ValueError(f"unknown subtree weighting {weighting!r}")
    filt = filt if filt is not None else TokenFilter()

    cache: dict[int, np.ndarray | None] = {}

    def vec(tok):
        if tok.index not in cache:
            got = vector_of(tok)
            cache[tok.index] = None if got is None else np.asarray(got, dtype=np.float64)
        return cache[tok.index]

    carriers, words, rows = [], [], []
    for tok in sentence.tokens:
        if not filt.keeps(tok):
            continue
        v = vec(tok)
        if v is None:
            continue
        carriers.append(tok.index)
        words.append(filt.key(tok))
        rows.append(v)
    if not carriers:
        return None
    vectors = np.asarray(rows)

    ctx_vectors = None
    memberships: list[list[int]] = [[] for _ in carriers]
    if context_mode != "none":
        def keep_member(tok):
            return filt.keeps(tok) and vec(tok) is not None

        if context_mode == "subtree":
            member_sets = [
                st
                for st in extract_subtrees(sentence, m, keep=keep_member)
                if vec(sentence.token(st.parent)) is not None
            ]
            use_flow = flow if weighting == "flow" else None
            embedded = [
                embed_subtree(st, lambda i: vec(sentence.token(i)), use_flow)
                for st in member_sets
            ]
            groups = [(st.members, emb.vector) for st, emb in zip(member_sets, embedded)]
        else:
            spans = ngram_spans(sentence, keep_member)
            groups = []
            for span in spans:
                stack = np.asarray([vec(sentence.token(i)) for i in span])
                if weighting == "flow" and flow is not None:
                    raw = np.array([flow.flows.get(i, 0.0) for i in span])
                    weights = (
                        raw / raw.sum()
                        if raw.sum() > 0.0
                        else np.full(len(span), 1.0 / len(span))
                    )
                else:
                    weights = np.full(len(span), 1.0 / len(span))
                groups.append((frozenset(span), weights @ stack))

        if groups:
            ctx_vectors = np.asarray([vec_ for _, vec_ in groups])
            carrier_pos = {index: k for k, index in enumerate(carriers)}
            for gi, (members, _) in enumerate(groups):
                for index in members:
                    pos = carrier_pos.get(index)
                    if pos is not None:
                        memberships[pos].append(gi)

    return SentenceContext(
        sentence_id=sentence.sentence_id,
        carriers=tuple(carriers),
        words=tuple(words),
        vectors=vectors,
        ctx_vectors=ctx_vectors,
        ctx_members=tuple(tuple(ms) for ms in memberships),
    )


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Pairwise word-distance matrix between the carriers of two sentences."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: np.ndarray
    a: float
    metric: str

    def transposed(self) -> "CostMatrix":
        return CostMatrix(self.cols, self.rows, self.entries.T.copy(), self.a, self.metric)


def _normalized_rows(stack: np.ndarray):
    norms = np.linalg.norm(stack, axis=1, keepdims=True)
    zero = norms[:, 0] == 0.0
    out = np.divide(stack, norms, out=np.zeros_like(stack), where=norms != 0.0)
    return out, bool(zero.any())


def pairwise_distances(A: np.ndarray, B: np.ndarray, metric: str) -> np.ndarray:
    """Distances between all row pairs. Cosine treats zero vectors as
    maximally dissimilar to everything (distance 1) and warns once."""
    if metric == "cosine":
        An, zero_a = _normalized_rows(np.asarray(A, dtype=np.float64))
        Bn, zero_b = _normalized_rows(np.asarray(B, dtype=np.float64))
        if zero_a or zero_b:
            warnings.warn(
                ZeroVectorWarning("zero-norm vector under cosine; distance set to 1")
            )
        return np.clip(1.0 - An @ Bn.T, 0.0, 2.0)
    if metric == "l2":
        A = np.asarray(A, dtype=np.float64)
        B = np.asarray(B, dtype=np.float64)
        return np.linalg.norm(A[:, None, :] - B[None, :, :], axis=-1)
    raise ValueError(f"unknown metric {metric!r}")


def _membership_matrix(ctx: SentenceContext) -> np.ndarray:
    # row i spreads 1/|S_i| over the contexts containing carrier i;
    # carriers without contexts keep a zero row, killing the context term
    rows = np.zeros((len(ctx.carriers), len(ctx.ctx_vectors)))
    for i, group in enumerate(ctx.ctx_members):
        if group:
            rows[i, list(group)] = 1.0 / len(group)
    return rows


def cost_matrix(
    ctx_a: SentenceContext | None,
    ctx_b: SentenceContext | None,
    a: float = 0.0,
    metric: str = "cosine",
) -> CostMatrix:
    """Word distances plus ``a`` times the mean pairwise context distance.

    c(i, j) = dist(v_i, v_j) + a * mean over S_i x S_j of dist(s, s'), with
    an empty context set on either side zeroing the second term. Swapping
    the sentences transposes the result exactly.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if a < 0.0:
        raise ValueError(f"context weight a must be >= 0, got {a}")
    if ctx_a is None or ctx_b is None:
        raise EmptySideAfterFiltering("cost matrix needs carriers on both sides")
    # canonical orientation so both argument orders share one computation
    if ctx_b.sort_key < ctx_a.sort_key:
        return cost_matrix(ctx_b, ctx_a, a, metric).transposed()
    entries = pairwise_distances(ctx_a.vectors, ctx_b.vectors, metric)
    if (
        a != 0.0
        and ctx_a.ctx_vectors is not None
        and ctx_b.ctx_vectors is not None
        and len(ctx_a.ctx_vectors) > 0
        and len(ctx_b.ctx_vectors) > 0
    ):
        between = pairwise_distances(ctx_a.ctx_vectors, ctx_b.ctx_vectors, metric)
        ma = _membership_matrix(ctx_a)
        mb = _membership_matrix(ctx_b)
        entries = entries + a * (ma @ between @ mb.T)
    return CostMatrix(ctx_a.carriers, ctx_b.carriers, entries, a, metric)
