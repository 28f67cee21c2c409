"""Acceptance gate: one test and one printed PASS/FAIL line per criterion.

Run with plain ``pytest tests/test_acceptance.py``; the summary lines are
written straight to the terminal so they survive output capture. The
reproduction run against external benchmark data only activates when
SYNWMD_STS_DIR points at prepared inputs (see README), otherwise that
criterion reports SKIP and the rest of the suite stands alone.
"""

import contextlib
import os
import pathlib
import time

import numpy as np
import pytest

import synwmd
from synwmd import (
    CooccurrenceGraph,
    CorpusArtifacts,
    MethodConfig,
    TransportProblem,
    cost_matrix,
    eval_sts,
    load_sts_tsv,
    preset,
    read_conllu,
    read_static,
    score_pair,
    score_pairs,
    solve_exact,
    spearman,
    weighted_pagerank,
)

from conftest import chain_sentence, make_corpus, vectors_for
from oracles import spearman_reference, transport_vertex_min, wmd_reference

TOY = pathlib.Path(synwmd.__file__).parent / "data" / "toy"
FIVE_PRESETS = ("wmd-l2", "wmd-cos", "wmd-cos-idf", "synwmd-swf", "synwmd-full")


# (name, verdict) pairs; conftest prints them as a terminal summary section
RESULTS: list[tuple[str, str]] = []


def _emit(name: str, verdict: str):
    RESULTS.append((name, verdict))


@contextlib.contextmanager
def criterion(name: str):
    try:
        yield
    except Exception:
        _emit(name, "FAIL")
        raise
    _emit(name, "PASS")


def balanced_instance(rng, max_side: int):
    m = int(rng.integers(1, max_side + 1))
    n = int(rng.integers(1, max_side + 1))
    supply = rng.uniform(0.05, 1.0, m)
    demand = rng.uniform(0.05, 1.0, n)
    supply /= supply.sum()
    demand /= demand.sum()
    demand[-1] += supply.sum() - demand.sum()
    cost = rng.uniform(0.0, 4.0, (m, n))
    return supply, demand, cost


def test_ot_oracle_equivalence():
    rng = np.random.default_rng(20220901)
    started = time.perf_counter()
    with criterion("ot-oracle-equivalence"):
        for _ in range(1000):
            supply, demand, cost = balanced_instance(rng, 3)
            got = solve_exact(TransportProblem(supply, demand, cost)).objective
            ref = transport_vertex_min(supply, demand, cost)
            assert abs(got - ref) < 1e-9
        for _ in range(200):
            supply, demand, cost = balanced_instance(rng, 20)
            plan = solve_exact(TransportProblem(supply, demand, cost))
            slack = cost - plan.row_duals[:, None] - plan.col_duals[None, :]
            assert slack.min() >= -1e-9
            support = plan.plan > 0
            assert not support.any() or np.abs(slack[support]).max() <= 1e-12
            assert np.abs(plan.plan.sum(axis=1) - supply).max() < 1e-9
            assert np.abs(plan.plan.sum(axis=0) - demand).max() < 1e-9
        assert time.perf_counter() - started < 10.0


def pagerank_residual(graph, scores, d):
    """Largest violation of the fixed-point equation, computed from scratch."""
    out = {w: graph.total_weight(w) for w in graph.nodes}
    incoming = {w: 0.0 for w in graph.nodes}
    for (wa, wb), weight in graph.weights.items():
        incoming[wa] += weight * scores.get(wb) / out[wb]
        if wa != wb:
            incoming[wb] += weight * scores.get(wa) / out[wa]
    return max(
        abs(scores.get(w) - (1.0 - d) - d * incoming[w]) for w in graph.nodes
    )


def test_pagerank_fixed_point():
    rng = np.random.default_rng(20220902)
    with criterion("pagerank-fixed-point"):
        for nodes in (10, 60, 250, 500):
            graph = CooccurrenceGraph(hop_limit=3)
            words = [f"w{k}" for k in range(nodes)]
            for _ in range(nodes * 3):
                a, b = rng.integers(0, nodes, 2)
                graph.add(words[a], words[b], float(rng.uniform(0.2, 2.0)))
            scores = weighted_pagerank(graph, d=0.2)
            assert pagerank_residual(graph, scores, 0.2) < 1e-8

        path = CooccurrenceGraph(hop_limit=1)
        path.add("left", "mid", 1.0)
        path.add("mid", "right", 1.0)
        scores = weighted_pagerank(path, d=0.2)
        for word, expected in (("left", 0.9167), ("mid", 1.1667), ("right", 0.9167)):
            assert abs(scores.get(word) - expected) < 1e-4


def random_corpus(rng, sentences=10):
    vocab = [f"word{k}" for k in range(24)]
    out = []
    for s in range(sentences):
        length = int(rng.integers(3, 7))
        words = [vocab[int(k)] for k in rng.integers(0, len(vocab), length)]
        out.append(chain_sentence(f"s{s}", words))
    return make_corpus(*out)


def test_reduction_regressions():
    rng = np.random.default_rng(20220903)
    corpus = random_corpus(rng, 20)
    static = vectors_for([f"word{k}" for k in range(24)], dim=12, seed=5)
    plain = MethodConfig(flow_scheme="uniform-count", context_mode="none",
                         metric="l2", stopwords=())
    with criterion("reduction-regressions"):
        arts = CorpusArtifacts.build(corpus, plain, static=static)
        for _ in range(10):
            i, j = rng.choice(20, 2, replace=False)
            a, b = corpus.sentences[i], corpus.sentences[j]
            got = score_pair(arts, a.sentence_id, b.sentence_id).distance
            ref = wmd_reference(
                [static.get(t.surface) for t in a.tokens],
                [static.get(t.surface) for t in b.tokens],
                metric="l2",
            )
            assert abs(got - ref) < 1e-9

        a_zero = CorpusArtifacts.build(
            corpus, MethodConfig(a=0.0, stopwords=()), static=static)
        none = CorpusArtifacts.build(
            corpus, MethodConfig(context_mode="none", stopwords=()), static=static)
        for i in range(19):
            x = corpus.sentences[i].sentence_id
            y = corpus.sentences[i + 1].sentence_id
            assert (score_pair(a_zero, x, y).distance
                    == score_pair(none, x, y).distance)


def test_metric_invariants():
    rng = np.random.default_rng(20220904)
    corpus = random_corpus(rng, 12)
    static = vectors_for([f"word{k}" for k in range(24)], dim=12, seed=6)
    cfg = MethodConfig(stopwords=())
    with criterion("metric-invariants"):
        arts = CorpusArtifacts.build(corpus, cfg, static=static)
        ids = [s.sentence_id for s in corpus]
        for i in range(0, 12, 2):
            x, y = ids[i], ids[i + 1]
            assert (score_pair(arts, x, y).distance
                    == score_pair(arts, y, x).distance)
        for sid in ids:
            assert abs(score_pair(arts, sid, sid).distance) < 1e-9

        base = [score_pair(arts, ids[i], ids[i + 1]).distance for i in range(11)]
        arts.refresh_flows(arts.pagerank.scaled(4.0))
        scaled = [score_pair(arts, ids[i], ids[i + 1]).distance for i in range(11)]
        assert scaled == base

        for i in range(0, 12, 3):
            ctx_x = arts.contexts[ids[i]]
            ctx_y = arts.contexts[ids[i + 1]]
            grid = [cost_matrix(ctx_x, ctx_y, a, "cosine").entries
                    for a in (0.0, 0.2, 1.0)]
            assert (grid[0] <= grid[1]).all()
            assert (grid[1] <= grid[2]).all()


def test_spearman_correctness():
    rng = np.random.default_rng(20220905)
    with criterion("spearman-ties-oracle"):
        for _ in range(1000):
            length = int(rng.integers(5, 120))
            x = rng.integers(0, 12, length).astype(float)
            y = np.round(rng.normal(size=length), 1)  # rounding plants ties
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            assert abs(spearman(x, y) - spearman_reference(x, y)) < 1e-12


def toy_run(preset_name: str):
    corpus = read_conllu(TOY / "corpus.conllu")
    static = read_static(TOY / "vectors.txt")
    arts = CorpusArtifacts.build(corpus, preset(preset_name), static=static)
    with open(TOY / "pairs.tsv", encoding="utf-8") as handle:
        dataset = load_sts_tsv(handle, source_name="pairs.tsv")
    triples = [(p.pair_id, p.sent_a, p.sent_b) for p in dataset.pairs]
    scores = {s.pair_id: s.distance for s in score_pairs(arts, triples)}
    return dataset, scores, eval_sts(dataset, scores)


def test_toy_smoke():
    with criterion("toy-smoke"):
        reports = {}
        for name in FIVE_PRESETS:
            dataset, scores, report = toy_run(name)
            assert report.overall["pairs"] == 20
            reports[name] = report
        # determinism: a fresh pipeline reproduces the report byte for byte
        _, _, again = toy_run("synwmd-full")
        assert again.to_json() == reports["synwmd-full"].to_json()
        # rank separation under the full method
        para = [scores[p.pair_id] for p in dataset.pairs if p.subset == "para"]
        unrel = [scores[p.pair_id] for p in dataset.pairs if p.subset == "unrel"]
        assert len(para) == 5 and len(unrel) == 5
        assert max(para) < min(unrel)


def _benchmark_average(root: pathlib.Path, static, preset_name: str) -> float:
    values = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        corpus = read_conllu(sub / "corpus.conllu")
        arts = CorpusArtifacts.build(corpus, preset(preset_name), static=static)
        with open(sub / "pairs.tsv", encoding="utf-8") as handle:
            dataset = load_sts_tsv(handle, source_name=str(sub / "pairs.tsv"))
        triples = [(p.pair_id, p.sent_a, p.sent_b) for p in dataset.pairs]
        scores = {s.pair_id: s.distance
                  for s in score_pairs(arts, triples, jobs=os.cpu_count() or 1)}
        values.append(eval_sts(dataset, scores).overall["spearman_x100"])
    if not values:
        raise FileNotFoundError(f"no benchmark directories under {root}")
    return float(np.mean(values))


def test_benchmark_reproduction():
    root = os.environ.get("SYNWMD_STS_DIR")
    if not root:
        _emit("benchmark-reproduction", "SKIP (SYNWMD_STS_DIR not set)")
        pytest.skip("external benchmark data not configured")
    root = pathlib.Path(root)
    with criterion("benchmark-reproduction"):
        static = read_static(root / "vectors.txt")
        full = _benchmark_average(root, static, "synwmd-full")
        assert abs(full - 69.10) <= 0.7
        idf = _benchmark_average(root, static, "wmd-cos-idf")
        assert abs(idf - 66.61) <= 0.7
