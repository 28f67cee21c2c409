"""Command-line interface: score, eval-sts, eval-cls, and graph-stats."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .conllu import read_conllu
from .context import extract_subtrees
from .errors import SynwmdError
from .evaluation import EvalReport, eval_cls, eval_sts, load_sts_tsv
from .filters import load_stopwords
from .flows import build_graph, weighted_pagerank
from .scoring import (
    PAGERANK_MAX_ITER,
    PAGERANK_TOL,
    CorpusArtifacts,
    MethodConfig,
    preset,
    score_pairs,
)
from .embeddings import read_contextual, read_static

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

_HISTOGRAM_EDGES = (0.5, 1.0, 2.0, 4.0, 8.0)


class ConfigError(Exception):
    """Bad flags, presets, or config file entries (exit code 2)."""


def _fail(kind, exc, code):
    sys.stderr.write(
        json.dumps(
            {"error": type(exc).__name__, "kind": kind, "message": str(exc)},
            sort_keys=True,
        )
        + "\n"
    )
    return code


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# -- config resolution ---------------------------------------------------

_CONFIG_KEYS = {
    "flow_scheme": str,
    "context_mode": str,
    "metric": str,
    "a": float,
    "d": float,
    "n": int,
    "m": int,
    "whitening": bool,
    "graph_mode": str,
    "subtree_weighting": str,
    "lowercase": bool,
    "drop_punct": bool,
    "oov_policy": str,
}


def parse_config_file(path) -> dict:
    """Flat key = value lines; # comments, booleans, ints, floats, strings."""
    out = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ConfigError(f"{path}, line {line_no}: expected key = value")
            key = key.strip()
            value = value.strip().strip("\"'")
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}, line {line_no}: unknown key {key!r}")
            want = _CONFIG_KEYS[key]
            try:
                if want is bool:
                    if value.lower() not in ("true", "false"):
                        raise ValueError(value)
                    out[key] = value.lower() == "true"
                else:
                    out[key] = want(value)
            except ValueError:
                raise ConfigError(
                    f"{path}, line {line_no}: bad value {value!r} for {key}"
                ) from None
    return out


def _add_method_flags(parser):
    parser.add_argument("--method", default="synwmd-full", help="method preset name")
    parser.add_argument("--config", help="key = value config file overriding the preset")
    parser.add_argument("--flow", dest="flow_scheme",
                        choices=("uniform-count", "idf", "swf"))
    parser.add_argument("--context", dest="context_mode",
                        choices=("none", "subtree", "ngram"))
    parser.add_argument("--metric", choices=("cosine", "l2"))
    parser.add_argument("--a", type=float, help="context weight")
    parser.add_argument("--d", type=float, help="pagerank damping")
    parser.add_argument("--n", type=int, help="co-occurrence hop limit")
    parser.add_argument("--m", type=int, help="subtree hop limit")
    parser.add_argument("--whiten", action="store_true", default=None,
                        help="whiten token vectors on the corpus")
    parser.add_argument("--graph-mode", dest="graph_mode", choices=("tree", "window"))
    parser.add_argument("--subtree-weighting", dest="subtree_weighting",
                        choices=("uniform", "flow"))
    parser.add_argument("--no-lowercase", action="store_true",
                        help="keep surface case for vocabulary keys")
    parser.add_argument("--keep-punct", action="store_true",
                        help="let punctuation carry flow")
    parser.add_argument("--stopwords", help="stopword file replacing the bundled list")
    parser.add_argument("--oov", dest="oov_policy", choices=("skip", "zero"))


def resolve_config(args) -> MethodConfig:
    """Precedence: command-line flags over config file over preset."""
    try:
        cfg = preset(args.method)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.config:
        try:
            cfg = replace(cfg, **parse_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    overrides = {}
    for key in _CONFIG_KEYS:
        if key == "whitening":
            continue
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.whiten is not None:
        overrides["whitening"] = True
    if args.no_lowercase:
        overrides["lowercase"] = False
    if args.keep_punct:
        overrides["drop_punct"] = False
    if args.stopwords:
        try:
            overrides["stopwords"] = tuple(sorted(load_stopwords(args.stopwords)))
        except OSError as exc:
            raise ConfigError(f"cannot read stopword file: {exc}") from None
    cfg = replace(cfg, **overrides)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


# -- shared data loading ---------------------------------------------------


def _load_inputs(args, cfg):
    corpus = read_conllu(args.corpus)
    static = read_static(args.embeddings) if args.embeddings else None
    contextual = None
    if getattr(args, "contextual", None):
        contextual = read_contextual(args.contextual)
        contextual.validate_against(corpus)
    if static is None and contextual is None:
        raise ConfigError("need --embeddings or --contextual")
    inputs = {args.corpus: sha256_file(args.corpus)}
    if args.embeddings:
        inputs[args.embeddings] = sha256_file(args.embeddings)
    if getattr(args, "contextual", None):
        inputs[args.contextual] = sha256_file(args.contextual)
    digest = hashlib.sha256(
        json.dumps(sorted(inputs.items())).encode()
    ).hexdigest()
    artifacts = CorpusArtifacts.build(
        corpus,
        cfg,
        static=static,
        contextual=contextual,
        cache_dir=getattr(args, "cache_dir", None),
        corpus_digest=inputs[args.corpus],
        store_digest=digest,
    )
    return corpus, artifacts, inputs


def _read_pairs(path):
    """Pair rows: either "id_a<TAB>id_b" or the 4-column STS layout."""
    triples = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) == 2:
                a, b = cols
            elif len(cols) == 4:
                a, b = cols[2], cols[3]
            else:
                raise SynwmdError(
                    f"{path}, line {line_no}: expected 2 or 4 columns, got {len(cols)}"
                )
            triples.append((f"{a}|{b}", a, b))
    if not triples:
        raise SynwmdError(f"{path}: no pairs")
    return triples


def _write_manifest(args, cfg, inputs, outputs, started, command):
    if not getattr(args, "manifest", None):
        return
    cfg_dict = asdict(cfg)
    if cfg_dict["stopwords"] is not None:
        cfg_dict["stopwords"] = list(cfg_dict["stopwords"])
    payload = {
        "version": __version__,
        "command": command,
        "config": cfg_dict,
        "inputs": inputs,
        "outputs": outputs,
        "timings": {"total_s": round(time.monotonic() - started, 6)},
    }
    with open(args.manifest, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


# -- commands ---------------------------------------------------------------


def cmd_score(args) -> int:
    started = time.monotonic()
    cfg = resolve_config(args)
    try:
        corpus, artifacts, inputs = _load_inputs(args, cfg)
        triples = _read_pairs(args.pairs)
        inputs[args.pairs] = sha256_file(args.pairs)
        scores = score_pairs(artifacts, triples, jobs=args.jobs)
        lines = [f"{s.pair_id}\t{s.distance!r}\n" for s in scores]
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.writelines(lines)
    except (SynwmdError, OSError) as exc:
        return _fail("data", exc, EXIT_DATA)
    _write_manifest(args, cfg, inputs, {args.out: sha256_file(args.out)},
                    started, "score")
    return EXIT_OK


def cmd_eval_sts(args) -> int:
    started = time.monotonic()
    cfg = resolve_config(args)
    try:
        corpus, artifacts, inputs = _load_inputs(args, cfg)
        with open(args.pairs, encoding="utf-8") as handle:
            dataset = load_sts_tsv(handle, source_name=args.pairs)
        inputs[args.pairs] = sha256_file(args.pairs)
        triples = [(p.pair_id, p.sent_a, p.sent_b) for p in dataset.pairs]
        scores = score_pairs(artifacts, triples, jobs=args.jobs)
        distances = {s.pair_id: s.distance for s in scores}
        report = eval_sts(dataset, distances)
        report.manifest = {"method": args.method, "pairs": len(dataset)}
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
        if args.table:
            sys.stdout.write(report.to_table())
    except (SynwmdError, OSError, KeyError) as exc:
        return _fail("data", exc, EXIT_DATA)
    _write_manifest(args, cfg, inputs, {args.out: sha256_file(args.out)},
                    started, "eval-sts")
    return EXIT_OK


def _read_labels(path):
    labels = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 2:
                raise SynwmdError(
                    f"{path}, line {line_no}: expected label<TAB>sent_id"
                )
            labels[cols[1]] = cols[0]
    if not labels:
        raise SynwmdError(f"{path}: no labels")
    return labels


def _parse_k_range(text):
    lo, sep, hi = text.partition(":")
    try:
        if sep:
            return range(int(lo), int(hi) + 1)
        return range(1, int(lo) + 1)
    except ValueError:
        raise ConfigError(f"bad k range {text!r}, expected LO:HI") from None


def cmd_eval_cls(args) -> int:
    started = time.monotonic()
    cfg = resolve_config(args)
    k_values = _parse_k_range(args.k_range)
    try:
        corpus, artifacts, inputs = _load_inputs(args, cfg)
        label_of = _read_labels(args.labels)
        inputs[args.labels] = sha256_file(args.labels)
        ids = [s.sentence_id for s in corpus if s.sentence_id in label_of]
        if len(ids) < 2:
            raise SynwmdError("need at least two labeled sentences")
        labels = [label_of[sid] for sid in ids]
        triples = [
            (f"{ids[i]}|{ids[j]}", ids[i], ids[j])
            for i in range(len(ids))
            for j in range(i + 1, len(ids))
        ]
        scores = score_pairs(artifacts, triples, jobs=args.jobs)
        dist = np.zeros((len(ids), len(ids)))
        it = iter(scores)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                d = next(it).distance
                dist[i, j] = dist[j, i] = d
        report = eval_cls(labels, dist, folds=args.folds, k_values=k_values)
        report.manifest = {"method": args.method, "examples": len(ids)}
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
        if args.table:
            sys.stdout.write(report.to_table())
    except (SynwmdError, OSError) as exc:
        return _fail("data", exc, EXIT_DATA)
    _write_manifest(args, cfg, inputs, {args.out: sha256_file(args.out)},
                    started, "eval-cls")
    return EXIT_OK


def cmd_graph_stats(args) -> int:
    started = time.monotonic()
    cfg = resolve_config(args)
    try:
        corpus = read_conllu(args.corpus)
        graph = build_graph(corpus, n=cfg.n, mode=cfg.graph_mode,
                            filt=cfg.token_filter())
        ranks = weighted_pagerank(graph, d=cfg.d, tol=PAGERANK_TOL,
                                  max_iter=PAGERANK_MAX_ITER)
        histogram = {}
        lower = 0.0
        for edge in _HISTOGRAM_EDGES:
            histogram[f"[{lower}, {edge})"] = 0
            lower = edge
        histogram[f"[{lower}, inf)"] = 0
        for weight in graph.weights.values():
            lower = 0.0
            placed = False
            for edge in _HISTOGRAM_EDGES:
                if weight < edge:
                    histogram[f"[{lower}, {edge})"] += 1
                    placed = True
                    break
                lower = edge
            if not placed:
                histogram[f"[{lower}, inf)"] += 1
        top = sorted(ranks.pr.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
        payload = {
            "nodes": len(graph.nodes),
            "edges": graph.num_edges(),
            "hop_limit": graph.hop_limit,
            "mode": graph.mode,
            "weight_histogram": histogram,
            "top_pagerank": [[w, p] for w, p in top],
            "pagerank_iterations": ranks.iterations,
        }
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")
        if args.dump:
            with open(args.dump, "w", encoding="utf-8") as handle:
                for line in graph.dump_lines():
                    handle.write(line + "\n")
        if args.dump_subtrees:
            filt = cfg.token_filter()
            with open(args.dump_subtrees, "w", encoding="utf-8") as handle:
                for sent in corpus:
                    for sub in extract_subtrees(sent, m=cfg.m, filt=filt):
                        record = {
                            "sent": sent.sentence_id,
                            "parent": sub.parent,
                            "hop": sub.hop,
                            "members": sorted(sub.members),
                        }
                        handle.write(json.dumps(record, sort_keys=True) + "\n")
    except (SynwmdError, OSError) as exc:
        return _fail("data", exc, EXIT_DATA)
    inputs = {args.corpus: sha256_file(args.corpus)}
    _write_manifest(args, cfg, inputs, {args.out: sha256_file(args.out)},
                    started, "graph-stats")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synwmd",
        description="Syntax-aware word mover's distance over parsed corpora",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", required=True, help="CoNLL-U corpus file")
    common.add_argument("--out", required=True, help="output file")
    common.add_argument("--manifest", help="also write a run manifest here")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for pair scoring")
    common.add_argument("--cache-dir",
                        help="artifact cache root (default $SYNWMD_CACHE_DIR)")

    embeddings = argparse.ArgumentParser(add_help=False)
    embeddings.add_argument("--embeddings", help="word2vec text vectors")
    embeddings.add_argument("--contextual", help="token vector JSONL")

    p_score = sub.add_parser("score", parents=[common, embeddings],
                             help="score sentence pairs")
    p_score.add_argument("--pairs", required=True,
                         help="pair file (2-column or STS 4-column TSV)")
    _add_method_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_sts = sub.add_parser("eval-sts", parents=[common, embeddings],
                           help="evaluate on an STS pair file")
    p_sts.add_argument("--pairs", required=True, help="STS 4-column TSV")
    p_sts.add_argument("--table", action="store_true",
                       help="print an aligned text table to stdout")
    _add_method_flags(p_sts)
    p_sts.set_defaults(func=cmd_eval_sts)

    p_cls = sub.add_parser("eval-cls", parents=[common, embeddings],
                           help="kNN classification with cross-validation")
    p_cls.add_argument("--labels", required=True, help="label<TAB>sent_id TSV")
    p_cls.add_argument("--folds", type=int, default=10)
    p_cls.add_argument("--k-range", default="1:30", help="k grid as LO:HI")
    p_cls.add_argument("--table", action="store_true")
    _add_method_flags(p_cls)
    p_cls.set_defaults(func=cmd_eval_cls)

    p_graph = sub.add_parser("graph-stats", parents=[common],
                             help="co-occurrence graph statistics")
    p_graph.add_argument("--dump", help="also dump edges as TSV here")
    p_graph.add_argument("--dump-subtrees", dest="dump_subtrees",
                         help="dump extracted subtrees as JSON lines here")
    _add_method_flags(p_graph)
    p_graph.set_defaults(func=cmd_graph_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the config exit code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except ValueError as exc:
        return _fail("config", exc, EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
