"""Method configurations, corpus-level artifacts, and sentence-pair scoring."""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .conllu import Corpus, DepSentence
from .context import CONTEXT_MODES, METRICS, SentenceContext, build_context, cost_matrix
from .embeddings import (
    ContextualEmbeddings,
    IdfTable,
    StaticEmbeddings,
    WhiteningTransform,
    compute_idf,
    fit_whitening,
)
from .errors import ScoreUndefined, SynwmdError
from .filters import TokenFilter, default_stopwords
from .flows import (
    FLOW_SCHEMES,
    GRAPH_MODES,
    CooccurrenceGraph,
    FlowAssignment,
    PageRankScores,
    assign_flows,
    build_graph,
    weighted_pagerank,
)
from .transport import TransportProblem, solve_exact

PAGERANK_TOL = 1e-8
PAGERANK_MAX_ITER = 200


@dataclass(frozen=True)
class MethodConfig:
    """Everything that defines one scoring method.

    ``stopwords`` of None selects the bundled default list. ``a`` only
    matters when ``context_mode`` is not "none"; ``d``/``n`` only when the
    flow scheme is "swf"; ``m`` only for subtree contexts.
    """

    flow_scheme: str = "swf"
    context_mode: str = "subtree"
    metric: str = "cosine"
    a: float = 0.2
    d: float = 0.2
    n: int = 3
    m: int = 3
    whitening: bool = False
    graph_mode: str = "tree"
    subtree_weighting: str = "uniform"
    lowercase: bool = True
    drop_punct: bool = True
    stopwords: tuple[str, ...] | None = None
    oov_policy: str = "skip"

    def validate(self):
        if self.flow_scheme not in FLOW_SCHEMES:
            raise ValueError(f"unknown flow scheme {self.flow_scheme!r}")
        if self.context_mode not in CONTEXT_MODES:
            raise ValueError(f"unknown context mode {self.context_mode!r}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.graph_mode not in GRAPH_MODES:
            raise ValueError(f"unknown graph mode {self.graph_mode!r}")
        if self.subtree_weighting not in ("uniform", "flow"):
            raise ValueError(f"unknown subtree weighting {self.subtree_weighting!r}")
        if self.oov_policy not in ("skip", "zero"):
            raise ValueError(f"unknown oov policy {self.oov_policy!r}")
        if self.a < 0.0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not 0.0 <= self.d < 1.0:
            raise ValueError(f"d must be in [0, 1), got {self.d}")
        if self.flow_scheme == "swf" and self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.context_mode == "subtree" and self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")

    @property
    def effective_a(self) -> float:
        """Context weight actually applied; zero when contexts are off."""
        return self.a if self.context_mode != "none" else 0.0

    @property
    def fallback_distance(self) -> float:
        """Distance reported when a side has no carriers (the cosine maximum)."""
        return 2.0 * (1.0 + self.effective_a)

    def token_filter(self) -> TokenFilter:
        words = (
            default_stopwords()
            if self.stopwords is None
            else frozenset(w.lower() for w in self.stopwords)
        )
        return TokenFilter(
            stopwords=words, drop_punct=self.drop_punct, lowercase=self.lowercase
        )


PRESETS: dict[str, MethodConfig] = {
    "wmd-l2": MethodConfig(flow_scheme="uniform-count", context_mode="none", metric="l2"),
    "wmd-cos": MethodConfig(flow_scheme="uniform-count", context_mode="none", metric="cosine"),
    "wmd-cos-idf": MethodConfig(flow_scheme="idf", context_mode="none", metric="cosine"),
    "synwmd-swf": MethodConfig(flow_scheme="swf", context_mode="none", metric="cosine"),
    "synwmd-full": MethodConfig(flow_scheme="swf", context_mode="subtree", metric="cosine"),
    "synwmd-cls": MethodConfig(
        flow_scheme="swf", context_mode="subtree", metric="cosine", a=0.1, d=0.1
    ),
}


def preset(name: str) -> MethodConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None


@dataclass(frozen=True)
class PairScore:
    pair_id: str
    distance: float
    diagnostics: dict = field(default_factory=dict, compare=False)


class CorpusArtifacts:
    """Corpus-level state shared by every pair score under one config."""

    def __init__(self, corpus, cfg, filt, static, contextual, whitening, idf,
                 graph, pagerank, flows, contexts):
        self.corpus = corpus
        self.cfg = cfg
        self.filt = filt
        self.static = static
        self.contextual = contextual
        self.whitening = whitening
        self.idf = idf
        self.graph = graph
        self.pagerank = pagerank
        self.flows = flows
        self.contexts = contexts

    # -- vector lookup ------------------------------------------------

    def _raw_vector(self, sentence_id, token):
        if self.contextual is not None:
            return self.contextual.vector(sentence_id, token.index)
        vec = self.static.get(self.filt.key(token))
        if vec is None and self.cfg.oov_policy == "zero":
            return np.zeros(self.static.dim)
        return vec

    def vector(self, sentence_id, token):
        """Possibly whitened vector of a token, or None under OOV skip."""
        vec = self._raw_vector(sentence_id, token)
        if vec is None or self.whitening is None:
            return vec
        return self.whitening.apply(vec)

    # -- construction --------------------------------------------------

    @classmethod
    def build(
        cls,
        corpus: Corpus,
        cfg: MethodConfig,
        static: StaticEmbeddings | None = None,
        contextual: ContextualEmbeddings | None = None,
        cache_dir=None,
        corpus_digest: str | None = None,
        store_digest: str | None = None,
    ) -> "CorpusArtifacts":
        cfg.validate()
        if static is None and contextual is None:
            raise ValueError("need a static or contextual embedding store")
        filt = cfg.token_filter()
        art = cls(corpus, cfg, filt, static, contextual,
                  None, None, None, None, {}, {})

        if cfg.whitening:
            population = []
            for sent in corpus:
                for tok in sent.tokens:
                    vec = art._raw_vector(sent.sentence_id, tok)
                    if vec is not None:
                        population.append(vec)
            art.whitening = fit_whitening(np.asarray(population))

        cached = _load_cached(cache_dir, cfg, corpus_digest, store_digest)
        if cfg.flow_scheme == "idf":
            art.idf = cached.get("idf") or compute_idf(corpus, lowercase=cfg.lowercase)
        if cfg.flow_scheme == "swf":
            if "graph" in cached:
                art.graph = cached["graph"]
                art.pagerank = cached["pagerank"]
            else:
                art.graph = build_graph(corpus, n=cfg.n, mode=cfg.graph_mode, filt=filt)
                art.pagerank = weighted_pagerank(
                    art.graph, d=cfg.d, tol=PAGERANK_TOL, max_iter=PAGERANK_MAX_ITER
                )
        if not cached:
            _store_cache(cache_dir, cfg, corpus_digest, store_digest, art)

        for sent in corpus:
            sid = sent.sentence_id
            has_vector = None
            if contextual is None and cfg.oov_policy == "skip":
                has_vector = lambda tok: static.get(filt.key(tok)) is not None
            try:
                flow = assign_flows(
                    sent,
                    cfg.flow_scheme,
                    pagerank=art.pagerank,
                    idf=art.idf,
                    filt=filt,
                    has_vector=has_vector,
                )
            except SynwmdError:
                flow = None
            art.flows[sid] = flow
            context = build_context(
                sent,
                lambda tok: art.vector(sid, tok),
                filt=filt,
                context_mode=cfg.context_mode,
                m=cfg.m,
                weighting=cfg.subtree_weighting,
                flow=flow,
            )
            art.contexts[sid] = context
        return art

    def refresh_flows(self, pagerank: PageRankScores):
        """Reassign swf flows from different PageRank scores (diagnostics)."""
        self.pagerank = pagerank
        for sent in self.corpus:
            sid = sent.sentence_id
            has_vector = None
            if self.contextual is None and self.cfg.oov_policy == "skip":
                has_vector = (
                    lambda tok: self.static.get(self.filt.key(tok)) is not None
                )
            try:
                self.flows[sid] = assign_flows(
                    sent,
                    self.cfg.flow_scheme,
                    pagerank=pagerank,
                    idf=self.idf,
                    filt=self.filt,
                    has_vector=has_vector,
                )
            except SynwmdError:
                self.flows[sid] = None


def _resolve(corpus, sentence_or_id) -> DepSentence:
    if isinstance(sentence_or_id, DepSentence):
        return sentence_or_id
    return corpus.sentence(sentence_or_id)


def _identical_sides(ctx_a, ctx_b, supply, demand) -> bool:
    if ctx_a.words != ctx_b.words or ctx_a.ctx_members != ctx_b.ctx_members:
        return False
    if not np.array_equal(ctx_a.vectors, ctx_b.vectors):
        return False
    if (ctx_a.ctx_vectors is None) != (ctx_b.ctx_vectors is None):
        return False
    if ctx_a.ctx_vectors is not None and not np.array_equal(
        ctx_a.ctx_vectors, ctx_b.ctx_vectors
    ):
        return False
    return np.array_equal(supply, demand)


def score_pair(
    artifacts: CorpusArtifacts,
    first,
    second,
    pair_id: str | None = None,
    strict: bool = False,
) -> PairScore:
    """Exact transport distance between two sentences of the corpus.

    A sentence with no carriers makes the distance undefined; by default
    the maximal-distance fallback is reported (flagged in diagnostics),
    with ``strict`` the ScoreUndefined propagates instead.
    """
    cfg = artifacts.cfg
    sent_a = _resolve(artifacts.corpus, first)
    sent_b = _resolve(artifacts.corpus, second)
    if pair_id is None:
        pair_id = f"{sent_a.sentence_id}|{sent_b.sentence_id}"
    ctx_a = artifacts.contexts[sent_a.sentence_id]
    ctx_b = artifacts.contexts[sent_b.sentence_id]
    if ctx_a is None or ctx_b is None:
        if strict:
            raise ScoreUndefined(f"{pair_id}: a side has no carriers")
        return PairScore(
            pair_id,
            cfg.fallback_distance,
            {"fallback": True, "reason": "empty-after-filtering"},
        )
    # one canonical orientation so both argument orders share every float op
    swapped = ctx_b.sort_key < ctx_a.sort_key
    if swapped:
        ctx_a, ctx_b, sent_a, sent_b = ctx_b, ctx_a, sent_b, sent_a
    flow_a = artifacts.flows[sent_a.sentence_id]
    flow_b = artifacts.flows[sent_b.sentence_id]
    supply = np.array([flow_a.flows[i] for i in ctx_a.carriers])
    demand = np.array([flow_b.flows[i] for i in ctx_b.carriers])
    if _identical_sides(ctx_a, ctx_b, supply, demand):
        # a dissimilarity must vanish on identical inputs; the context
        # term of the cost would otherwise charge a sentence for its own
        # internal structure when compared with itself
        return PairScore(
            pair_id,
            0.0,
            {
                "fallback": False,
                "tokens_a": len(ctx_a),
                "tokens_b": len(ctx_b),
                "pivots": 0,
            },
        )
    matrix = cost_matrix(ctx_a, ctx_b, cfg.effective_a, cfg.metric)
    plan = solve_exact(TransportProblem(supply, demand, matrix.entries))
    tokens = (len(ctx_a), len(ctx_b))
    if swapped:
        tokens = (tokens[1], tokens[0])
    return PairScore(
        pair_id,
        max(plan.objective, 0.0),
        {
            "fallback": False,
            "tokens_a": tokens[0],
            "tokens_b": tokens[1],
            "pivots": plan.iterations,
        },
    )


_POOL_ARTIFACTS: CorpusArtifacts | None = None


def _pool_init(artifacts):
    global _POOL_ARTIFACTS
    _POOL_ARTIFACTS = artifacts


def _pool_score(job):
    pair_id, first, second = job
    return score_pair(_POOL_ARTIFACTS, first, second, pair_id)


def score_pairs(artifacts, pairs, jobs: int = 1) -> list[PairScore]:
    """Score (pair_id, id_a, id_b) triples, preserving input order.

    ``jobs`` > 1 fans the pairs over a process pool; results are identical
    to the sequential run because each pair is independent.
    """
    jobs = max(1, int(jobs))
    triples = list(pairs)
    if jobs == 1 or len(triples) < 2:
        return [score_pair(artifacts, a, b, pid) for pid, a, b in triples]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_pool_init, initargs=(artifacts,)
    ) as pool:
        chunk = max(1, len(triples) // (jobs * 4))
        return list(pool.map(_pool_score, triples, chunksize=chunk))


def mean_pairwise_cosine(artifacts: CorpusArtifacts) -> float:
    """Corpus mean of each sentence's mean pairwise cosine distance.

    Sentences with fewer than two carrier vectors are excluded; returns 0.0
    when nothing qualifies.
    """
    from .context import pairwise_distances

    per_sentence = []
    for sent in artifacts.corpus:
        ctx = artifacts.contexts[sent.sentence_id]
        if ctx is None or len(ctx) < 2:
            continue
        dist = pairwise_distances(ctx.vectors, ctx.vectors, "cosine")
        k = len(ctx)
        per_sentence.append(float((dist.sum() - np.trace(dist)) / (k * (k - 1))))
    if not per_sentence:
        return 0.0
    return float(np.mean(per_sentence))


# -- artifact cache ----------------------------------------------------


def cache_root(cache_dir=None):
    """Resolve the on-disk cache root: explicit, $SYNWMD_CACHE_DIR, or none."""
    if cache_dir is not None:
        return str(cache_dir)
    return os.environ.get("SYNWMD_CACHE_DIR")


def _cache_key(cfg: MethodConfig, corpus_digest, store_digest) -> str | None:
    if corpus_digest is None:
        return None
    relevant = {
        "corpus": corpus_digest,
        "store": store_digest,
        "flow_scheme": cfg.flow_scheme,
        "n": cfg.n,
        "d": cfg.d,
        "graph_mode": cfg.graph_mode,
        "lowercase": cfg.lowercase,
        "drop_punct": cfg.drop_punct,
        "stopwords": sorted(cfg.stopwords) if cfg.stopwords is not None else None,
    }
    blob = json.dumps(relevant, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _load_cached(cache_dir, cfg, corpus_digest, store_digest) -> dict:
    root = cache_root(cache_dir)
    key = _cache_key(cfg, corpus_digest, store_digest)
    if root is None or key is None or cfg.flow_scheme == "uniform-count":
        return {}
    path = os.path.join(root, f"{key}.json")
    if not os.path.exists(path):
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, ValueError):
        return {}
    out = {}
    if payload.get("idf") is not None:
        out["idf"] = IdfTable(payload["idf_docs"], dict(payload["idf"]))
    if payload.get("edges") is not None:
        graph = CooccurrenceGraph(hop_limit=cfg.n, mode=cfg.graph_mode)
        for wa, wb, w in payload["edges"]:
            graph.weights[(wa, wb)] = w
        graph.nodes = set(payload["nodes"])
        out["graph"] = graph
        out["pagerank"] = PageRankScores(
            dict(payload["pagerank"]),
            payload["damping"],
            payload["residual"],
            payload["iterations"],
        )
    return out


def _store_cache(cache_dir, cfg, corpus_digest, store_digest, art):
    root = cache_root(cache_dir)
    key = _cache_key(cfg, corpus_digest, store_digest)
    if root is None or key is None:
        return
    if art.idf is None and art.graph is None:
        return
    payload = {"idf": None, "edges": None}
    if art.idf is not None:
        payload["idf"] = sorted(art.idf.idf.items())
        payload["idf_docs"] = art.idf.num_docs
    if art.graph is not None:
        payload["edges"] = [
            [wa, wb, w] for (wa, wb), w in sorted(art.graph.weights.items())
        ]
        payload["nodes"] = sorted(art.graph.nodes)
        payload["pagerank"] = sorted(art.pagerank.pr.items())
        payload["damping"] = art.pagerank.damping
        payload["residual"] = art.pagerank.residual
        payload["iterations"] = art.pagerank.iterations
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, f"{key}.json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True)
    os.replace(tmp, path)
