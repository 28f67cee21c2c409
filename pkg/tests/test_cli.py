"""End-to-end command tests over the bundled toy corpus."""

import json
import pathlib

import pytest

import synwmd
from synwmd.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    main,
    parse_config_file,
)

TOY = pathlib.Path(synwmd.__file__).parent / "data" / "toy"
CORPUS = str(TOY / "corpus.conllu")
VECTORS = str(TOY / "vectors.txt")
PAIRS = str(TOY / "pairs.tsv")
LABELS = str(TOY / "labels.tsv")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def score_args(out, *extra):
    return ("score", "--corpus", CORPUS, "--embeddings", VECTORS,
            "--pairs", PAIRS, "--out", str(out), "--jobs", "1", *extra)


def test_score_writes_distances(tmp_path, capsys):
    out = tmp_path / "scores.tsv"
    code, _, err = run(capsys, *score_args(out))
    assert code == EXIT_OK and err == ""
    rows = out.read_text().splitlines()
    assert len(rows) == 20
    pair_id, distance = rows[0].split("\t")
    assert pair_id == "cooking-1|cooking-2"
    assert float(distance) >= 0.0


def test_score_reruns_are_byte_identical(tmp_path, capsys):
    first = tmp_path / "a.tsv"
    second = tmp_path / "b.tsv"
    assert run(capsys, *score_args(first))[0] == EXIT_OK
    assert run(capsys, *score_args(second))[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_score_two_column_pairs(tmp_path, capsys):
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text("cooking-1\tcooking-2\nmusic-3\tweather-4\n")
    out = tmp_path / "scores.tsv"
    code, _, _ = run(capsys, "score", "--corpus", CORPUS, "--embeddings",
                     VECTORS, "--pairs", str(pairs), "--out", str(out),
                     "--jobs", "1")
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 2


def test_manifest_records_resolved_config(tmp_path, capsys):
    out = tmp_path / "scores.tsv"
    manifest = tmp_path / "manifest.json"
    code, _, _ = run(capsys, *score_args(out, "--manifest", str(manifest),
                                         "--a", "0.7"))
    assert code == EXIT_OK
    payload = json.loads(manifest.read_text())
    assert payload["version"] == synwmd.__version__
    assert payload["command"] == "score"
    assert payload["config"]["a"] == 0.7
    assert CORPUS in payload["inputs"]
    assert str(out) in payload["outputs"]
    assert payload["timings"]["total_s"] >= 0.0


def test_unknown_preset_is_config_error(tmp_path, capsys):
    code, _, err = run(capsys, *score_args(tmp_path / "x", "--method", "nope"))
    assert code == EXIT_CONFIG
    message = json.loads(err)
    assert message["kind"] == "config"
    assert "nope" in message["message"]


def test_missing_corpus_is_data_error(tmp_path, capsys):
    code, _, err = run(capsys, "score", "--corpus", str(tmp_path / "no.conllu"),
                       "--embeddings", VECTORS, "--pairs", PAIRS,
                       "--out", str(tmp_path / "x"), "--jobs", "1")
    assert code == EXIT_DATA
    assert json.loads(err)["kind"] == "data"


def test_malformed_corpus_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.conllu"
    bad.write_text("# sent_id = s1\n1\tword\n\n")
    code, _, err = run(capsys, "score", "--corpus", str(bad),
                       "--embeddings", VECTORS, "--pairs", PAIRS,
                       "--out", str(tmp_path / "x"), "--jobs", "1")
    assert code == EXIT_DATA
    assert json.loads(err)["error"] == "MalformedLine"


def test_missing_embeddings_flag_is_config_error(tmp_path, capsys):
    code, _, err = run(capsys, "score", "--corpus", CORPUS, "--pairs", PAIRS,
                       "--out", str(tmp_path / "x"), "--jobs", "1")
    assert code == EXIT_CONFIG
    assert json.loads(err)["kind"] == "config"


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "method.cfg"
    config.write_text("a = 0.5  # context weight\nmetric = l2\n")
    manifest = tmp_path / "manifest.json"
    out = tmp_path / "scores.tsv"
    code, _, _ = run(capsys, *score_args(out, "--config", str(config),
                                         "--manifest", str(manifest)))
    assert code == EXIT_OK
    resolved = json.loads(manifest.read_text())["config"]
    assert resolved["a"] == 0.5 and resolved["metric"] == "l2"

    # a flag beats the same key in the file
    code, _, _ = run(capsys, *score_args(out, "--config", str(config),
                                         "--a", "0.9",
                                         "--manifest", str(manifest)))
    assert code == EXIT_OK
    resolved = json.loads(manifest.read_text())["config"]
    assert resolved["a"] == 0.9 and resolved["metric"] == "l2"


def test_config_file_rejects_unknown_key(tmp_path):
    config = tmp_path / "method.cfg"
    config.write_text("turbo = true\n")
    with pytest.raises(Exception) as info:
        parse_config_file(config)
    assert "unknown key" in str(info.value)


def test_bad_config_value_is_config_error(tmp_path, capsys):
    config = tmp_path / "method.cfg"
    config.write_text("a = plenty\n")
    code, _, err = run(capsys, *score_args(tmp_path / "x",
                                           "--config", str(config)))
    assert code == EXIT_CONFIG
    assert json.loads(err)["kind"] == "config"


def test_eval_sts_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, table, _ = run(capsys, "eval-sts", "--corpus", CORPUS,
                         "--embeddings", VECTORS, "--pairs", PAIRS,
                         "--out", str(out), "--jobs", "1", "--table")
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["kind"] == "sts"
    assert report["overall"]["pairs"] == 20
    assert -100.0 <= report["overall"]["spearman_x100"] <= 100.0
    assert {"para", "unrel", "mixed"} <= set(report["per_subset"])
    assert table.splitlines()[0].startswith("subset")

    again = tmp_path / "again.json"
    run(capsys, "eval-sts", "--corpus", CORPUS, "--embeddings", VECTORS,
        "--pairs", PAIRS, "--out", str(again), "--jobs", "1")
    assert out.read_bytes() == again.read_bytes()


def test_eval_cls_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "eval-cls", "--corpus", CORPUS,
                     "--embeddings", VECTORS, "--labels", LABELS,
                     "--out", str(out), "--jobs", "1",
                     "--folds", "5", "--k-range", "1:4")
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["kind"] == "classification"
    assert report["overall"]["examples"] == 40
    # frozen assets keep the topics cleanly separated
    assert report["overall"]["accuracy_x100"] == 100.0
    assert report["per_subset"]["k=3"]["accuracy_x100"] == 100.0


def test_eval_cls_bad_k_range(tmp_path, capsys):
    code, _, err = run(capsys, "eval-cls", "--corpus", CORPUS,
                       "--embeddings", VECTORS, "--labels", LABELS,
                       "--out", str(tmp_path / "x"), "--jobs", "1",
                       "--k-range", "soon")
    assert code == EXIT_CONFIG
    assert json.loads(err)["kind"] == "config"


def test_graph_stats(tmp_path, capsys):
    out = tmp_path / "stats.json"
    dump = tmp_path / "edges.tsv"
    subtrees = tmp_path / "subtrees.jsonl"
    code, _, _ = run(capsys, "graph-stats", "--corpus", CORPUS,
                     "--out", str(out), "--dump", str(dump),
                     "--dump-subtrees", str(subtrees), "--jobs", "1")
    assert code == EXIT_OK
    stats = json.loads(out.read_text())
    assert stats["nodes"] > 0 and stats["edges"] > 0
    assert stats["hop_limit"] == 3 and stats["mode"] == "tree"
    assert sum(stats["weight_histogram"].values()) == stats["edges"]
    assert len(stats["top_pagerank"]) == 10
    lines = dump.read_text().splitlines()
    assert lines == sorted(lines)
    assert len(lines) == stats["edges"]
    records = [json.loads(ln) for ln in subtrees.read_text().splitlines()]
    assert records, "every toy sentence has at least one subtree"
    assert set(records[0]) == {"sent", "parent", "hop", "members"}
    assert all(r["parent"] in r["members"] for r in records)


def test_bad_flag_exits_two(capsys):
    assert main(["score", "--nonsense"]) == 2
    capsys.readouterr()  # swallow argparse usage text
