"""End-to-end handoff: bridge outputs must satisfy the scorer's readers.

The two packages share no code, only the CoNLL-U and token-vector file
formats, so these tests drive the full pipeline and then validate the
results with the consumer's own ingest and coverage checks.
"""

import json

import pytest

from parse_bridge import BridgeJob, run_encode, run_parse
from parse_bridge.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main

from samples import SAMPLE_SENTENCES, write_sentences

synwmd = pytest.importorskip("synwmd")


@pytest.fixture
def pipeline(tmp_path):
    job = BridgeJob(
        sentences=write_sentences(tmp_path / "in.tsv"),
        conllu=str(tmp_path / "corpus.conllu"),
        vectors=str(tmp_path / "vectors.jsonl"),
        dim=12,
    )
    run_parse(job)
    run_encode(job)
    return job


def test_treebank_passes_consumer_validation(pipeline):
    corpus = synwmd.read_conllu(pipeline.conllu)
    assert len(corpus) == len(SAMPLE_SENTENCES)
    assert [s.sentence_id for s in corpus] == [sid for sid, _ in SAMPLE_SENTENCES]


def test_vector_coverage_is_exactly_one_to_one(pipeline):
    corpus = synwmd.read_conllu(pipeline.conllu)
    vectors = synwmd.read_contextual(pipeline.vectors)
    vectors.validate_against(corpus)
    total = sum(len(sent) for sent in corpus)
    with open(pipeline.vectors, encoding="utf-8") as handle:
        assert sum(1 for _ in handle) == total


def test_coverage_check_catches_missing_record(pipeline, tmp_path):
    lines = open(pipeline.vectors, encoding="utf-8").read().splitlines()
    pruned = tmp_path / "pruned.jsonl"
    pruned.write_text("\n".join(lines[:-1]) + "\n")
    corpus = synwmd.read_conllu(pipeline.conllu)
    with pytest.raises(synwmd.MissingContextualVector):
        synwmd.read_contextual(pruned).validate_against(corpus)


def test_coverage_check_catches_extra_record(pipeline, tmp_path):
    lines = open(pipeline.vectors, encoding="utf-8").read().splitlines()
    extra = dict(json.loads(lines[0]))
    extra["sent"] = "never-parsed"
    padded = tmp_path / "padded.jsonl"
    padded.write_text("\n".join(lines + [json.dumps(extra)]) + "\n")
    corpus = synwmd.read_conllu(pipeline.conllu)
    with pytest.raises(synwmd.UnknownTokenReference):
        synwmd.read_contextual(padded).validate_against(corpus)


def test_scorer_runs_on_bridge_output(pipeline):
    corpus = synwmd.read_conllu(pipeline.conllu)
    vectors = synwmd.read_contextual(pipeline.vectors)
    cfg = synwmd.preset("synwmd-swf")
    artifacts = synwmd.CorpusArtifacts.build(corpus, cfg, contextual=vectors)
    score = synwmd.score_pair(artifacts, SAMPLE_SENTENCES[0][0], SAMPLE_SENTENCES[1][0])
    assert score.distance >= 0.0


# -- command line --------------------------------------------------------

def test_cli_round_trip(tmp_path, capsys):
    source = write_sentences(tmp_path / "in.tsv")
    conllu = str(tmp_path / "corpus.conllu")
    vectors = str(tmp_path / "vectors.jsonl")
    assert main(["parse", "--input", source, "--out", conllu,
                 "--backend", "chain"]) == EXIT_OK
    assert "parsed 20/20" in capsys.readouterr().out
    assert main(["encode", "--conllu", conllu, "--out", vectors,
                 "--model", "hash", "--dim", "6"]) == EXIT_OK
    assert "encoded 20/20" in capsys.readouterr().out
    synwmd.read_contextual(vectors).validate_against(synwmd.read_conllu(conllu))


def test_cli_rejects_unknown_backend(tmp_path, capsys):
    source = write_sentences(tmp_path / "in.tsv")
    code = main(["parse", "--input", source, "--out",
                 str(tmp_path / "o.conllu"), "--backend", "maltparser"])
    assert code == EXIT_CONFIG
    assert "backend" in capsys.readouterr().err


def test_cli_rejects_bad_dim(tmp_path, capsys):
    code = main(["encode", "--conllu", str(tmp_path / "missing.conllu"),
                 "--out", str(tmp_path / "v.jsonl"), "--dim", "0"])
    assert code == EXIT_CONFIG
    capsys.readouterr()


def test_cli_missing_input_is_data_error(tmp_path, capsys):
    code = main(["parse", "--input", str(tmp_path / "nope.tsv"),
                 "--out", str(tmp_path / "o.conllu"), "--backend", "chain"])
    assert code == EXIT_DATA
    capsys.readouterr()


def test_cli_bad_flag_is_config_error(capsys):
    assert main(["parse", "--frobnicate"]) == EXIT_CONFIG
    capsys.readouterr()
