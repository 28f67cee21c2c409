"""Corpus co-occurrence graphs, weighted PageRank, and sentence flow weights."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .conllu import Corpus, DepSentence
from .embeddings import IdfTable
from .errors import EmptySentenceAfterFiltering, NonConvergenceWarning
from .filters import TokenFilter

GRAPH_MODES = ("tree", "window")
FLOW_SCHEMES = ("uniform-count", "idf", "swf")


def _edge_key(wa: str, wb: str) -> tuple[str, str]:
    return (wa, wb) if wa <= wb else (wb, wa)


@dataclass
class CooccurrenceGraph:
    """Undirected word graph weighted by hop-discounted co-occurrence counts.

    Keys are unordered word pairs. A pair of distinct tokens that share a
    surface accumulates onto the (w, w) key; a token never pairs with itself.
    """

    hop_limit: int
    mode: str = "tree"
    weights: dict[tuple[str, str], float] = field(default_factory=dict)
    nodes: set[str] = field(default_factory=set)

    def add(self, wa: str, wb: str, weight: float):
        key = _edge_key(wa, wb)
        self.weights[key] = self.weights.get(key, 0.0) + weight
        self.nodes.add(wa)
        self.nodes.add(wb)

    def weight(self, wa: str, wb: str) -> float:
        return self.weights.get(_edge_key(wa, wb), 0.0)

    def num_edges(self) -> int:
        return len(self.weights)

    def total_weight(self, word: str) -> float:
        """Sum of incident edge weights (a self edge counts once)."""
        total = 0.0
        for (wa, wb), w in self.weights.items():
            if wa == word or wb == word:
                total += w
        return total

    def dump_lines(self):
        """Deterministic edge dump, lexicographic by word pair."""
        for (wa, wb) in sorted(self.weights):
            yield f"{wa}\t{wb}\t{self.weights[(wa, wb)]!r}"


def _tree_adjacency(sentence: DepSentence) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {tok.index: [] for tok in sentence.tokens}
    for tok in sentence.tokens:
        if tok.head != 0:
            adj[tok.head].append(tok.index)
            adj[tok.index].append(tok.head)
    return adj


def _hops_from(adj, start: int, limit: int) -> dict[int, int]:
    """BFS hop counts from ``start`` over the full tree, capped at ``limit``."""
    dist = {start: 0}
    frontier = [start]
    for depth in range(1, limit + 1):
        nxt = []
        for node in frontier:
            for nbr in adj[node]:
                if nbr not in dist:
                    dist[nbr] = depth
                    nxt.append(nbr)
        if not nxt:
            break
        frontier = nxt
    return dist


def build_graph(
    corpus: Corpus,
    n: int = 3,
    mode: str = "tree",
    filt: TokenFilter | None = None,
) -> CooccurrenceGraph:
    """Accumulate 1/h for every surviving token pair within ``n`` hops.

    ``mode="tree"`` measures hops on the dependency tree (through filtered
    tokens as well); ``mode="window"`` uses absolute sentence-position
    difference instead. Every surviving word registers as a node even when
    it never co-occurs.
    """
    if n < 1:
        raise ValueError(f"hop limit must be >= 1, got {n}")
    if mode not in GRAPH_MODES:
        raise ValueError(f"unknown graph mode {mode!r}")
    filt = filt if filt is not None else TokenFilter()
    graph = CooccurrenceGraph(hop_limit=n, mode=mode)
    for sentence in corpus:
        kept = filt.kept(sentence)
        keys = [filt.key(tok) for tok in kept]
        graph.nodes.update(keys)
        if mode == "window":
            for ai in range(len(kept)):
                for bi in range(ai + 1, len(kept)):
                    h = abs(kept[ai].index - kept[bi].index)
                    if 1 <= h <= n:
                        graph.add(keys[ai], keys[bi], 1.0 / h)
        else:
            adj = _tree_adjacency(sentence)
            for ai in range(len(kept)):
                dist = _hops_from(adj, kept[ai].index, n)
                for bi in range(ai + 1, len(kept)):
                    h = dist.get(kept[bi].index)
                    if h is not None and h >= 1:
                        graph.add(keys[ai], keys[bi], 1.0 / h)
    return graph


@dataclass
class PageRankScores:
    """Converged scores of the unnormalized weighted PageRank recursion."""

    pr: dict[str, float]
    damping: float
    residual: float
    iterations: int
    scale: float = 1.0

    def get(self, word: str) -> float:
        """Score of ``word``; words outside the graph behave as isolated."""
        return self.pr.get(word, 1.0 - self.damping) * self.scale

    def scaled(self, factor: float) -> "PageRankScores":
        """Copy with every score multiplied by ``factor`` (for invariance checks).

        The factor also applies to the isolated-node default, so flow
        assignments stay invariant even for off-graph words.
        """
        return PageRankScores(
            self.pr,
            self.damping,
            self.residual,
            self.iterations,
            self.scale * factor,
        )


def weighted_pagerank(
    graph: CooccurrenceGraph,
    d: float = 0.2,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> PageRankScores:
    """Fixed point of PR(i) = (1 - d) + d * sum_j w_ij * PR(j) / sum_k w_jk.

    Scores start at 1 and are not normalized to a distribution. Isolated
    nodes sit at 1 - d. The returned iterate moves by less than ``tol`` in
    max-abs under one more recursion step; hitting ``max_iter`` first emits
    a NonConvergenceWarning and returns the best iterate.
    """
    if not 0.0 <= d < 1.0:
        raise ValueError(f"damping must be in [0, 1), got {d}")
    order = sorted(graph.nodes)
    pos = {word: k for k, word in enumerate(order)}
    size = len(order)
    if size == 0:
        return PageRankScores({}, d, 0.0, 0)

    src, dst, wts = [], [], []
    for (wa, wb), w in graph.weights.items():
        ia, ib = pos[wa], pos[wb]
        src.append(ia)
        dst.append(ib)
        wts.append(w)
        if ia != ib:
            src.append(ib)
            dst.append(ia)
            wts.append(w)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    wts = np.asarray(wts, dtype=np.float64)
    out_total = np.bincount(src, weights=wts, minlength=size)

    def step(pr):
        if len(src) == 0:
            return np.full(size, 1.0 - d)
        contrib = wts * pr[src] / out_total[src]
        return (1.0 - d) + d * np.bincount(dst, weights=contrib, minlength=size)

    pr = np.ones(size)
    residual = np.inf
    iterations = 0
    for _ in range(max_iter):
        nxt = step(pr)
        iterations += 1
        residual = float(np.abs(nxt - pr).max())
        if residual < tol:
            # pr itself satisfies the recursion within tol; return it
            break
        pr = nxt
    if residual >= tol:
        warnings.warn(
            NonConvergenceWarning(
                f"pagerank stopped after {iterations} iterations, residual {residual:.3e}"
            )
        )
    return PageRankScores(dict(zip(order, pr.tolist())), d, residual, iterations)


@dataclass
class FlowAssignment:
    """Per-sentence token weights, normalized to sum to one."""

    sentence_id: str
    flows: dict[int, float]
    scheme: str

    def total(self) -> float:
        return sum(self.flows.values())


def assign_flows(
    sentence: DepSentence,
    scheme: str = "swf",
    *,
    pagerank: PageRankScores | None = None,
    idf: IdfTable | None = None,
    filt: TokenFilter | None = None,
    has_vector=None,
) -> FlowAssignment:
    """Distribute a unit of flow over the surviving tokens of a sentence.

    Raw weights per token instance: 1 for "uniform-count", the word's idf
    for "idf", and 1/PR(word) for "swf" (words outside the graph use the
    isolated-node score). ``has_vector`` optionally drops out-of-vocabulary
    tokens before weighting.
    """
    if scheme not in FLOW_SCHEMES:
        raise ValueError(f"unknown flow scheme {scheme!r}")
    filt = filt if filt is not None else TokenFilter()
    carriers = [
        tok
        for tok in sentence.tokens
        if filt.keeps(tok) and (has_vector is None or has_vector(tok))
    ]
    if not carriers:
        raise EmptySentenceAfterFiltering(
            f"{sentence.sentence_id}: no tokens survive filtering"
        )
    if scheme == "uniform-count":
        raw = [1.0] * len(carriers)
    elif scheme == "idf":
        if idf is None:
            raise ValueError("idf scheme needs an IdfTable")
        raw = [idf.weight(filt.key(tok)) for tok in carriers]
    else:
        if pagerank is None:
            raise ValueError("swf scheme needs PageRankScores")
        raw = [1.0 / pagerank.get(filt.key(tok)) for tok in carriers]
    total = sum(raw)
    flows = {tok.index: r / total for tok, r in zip(carriers, raw)}
    return FlowAssignment(sentence.sentence_id, flows, scheme)
