#!/usr/bin/env python3
"""Regenerate the bundled toy corpus under src/synwmd/data/toy/.

Eight topics, five sentences each. Sentence pairs come in three groups:
"para" (same-topic rewordings), "unrel" (no shared content words), and
"mixed". Before freezing anything the script reloads the written files
and checks that the full method ranks every para pair closer than every
unrel pair; it refuses to write assets that would break that property.

Run from the repository root:

    python3 tools/gen_toy_assets.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from synwmd import (  # noqa: E402
    CorpusArtifacts,
    DepSentence,
    Token,
    eval_sts,
    load_sts_tsv,
    preset,
    read_conllu,
    read_static,
    score_pairs,
    write_conllu,
)

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "synwmd" / "data" / "toy"
SEED = 20220815
DIM = 50

# topic -> sentences; each sentence is (suffix, [(surface, head, upos, deprel)])
# Adpositions are drawn from the default stopword list on purpose, so the
# bundled vector table only needs content words.
TOPICS = {
    "cooking": [
        ("1", [("the", 2, "DET", "det"), ("chef", 3, "NOUN", "nsubj"),
               ("simmers", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("broth", 3, "NOUN", "obj"), ("slowly", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("cook", 3, "NOUN", "nsubj"),
               ("simmers", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("soup", 3, "NOUN", "obj"), ("gently", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("baker", 3, "NOUN", "nsubj"),
               ("warms", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("oven", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("chef", 3, "NOUN", "nsubj"),
               ("tastes", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("sauce", 3, "NOUN", "obj")]),
        ("5", [("a", 2, "DET", "det"), ("cook", 3, "NOUN", "nsubj"),
               ("chops", 0, "VERB", "root"), ("onions", 3, "NOUN", "obj"),
               ("in", 7, "ADP", "case"), ("the", 7, "DET", "det"),
               ("kitchen", 3, "NOUN", "obl")]),
    ],
    "sailing": [
        ("1", [("the", 2, "DET", "det"), ("sailor", 3, "NOUN", "nsubj"),
               ("steers", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("sloop", 3, "NOUN", "obj"), ("homeward", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("mariner", 3, "NOUN", "nsubj"),
               ("guides", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("boat", 3, "NOUN", "obj"), ("homeward", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("tide", 3, "NOUN", "nsubj"),
               ("drifts", 0, "VERB", "root"), ("into", 6, "ADP", "case"),
               ("the", 6, "DET", "det"), ("harbor", 3, "NOUN", "obl")]),
        ("4", [("the", 3, "DET", "det"), ("old", 3, "ADJ", "amod"),
               ("fisherman", 4, "NOUN", "nsubj"), ("mends", 0, "VERB", "root"),
               ("the", 6, "DET", "det"), ("net", 4, "NOUN", "obj")]),
        ("5", [("waves", 2, "NOUN", "nsubj"), ("crash", 0, "VERB", "root"),
               ("against", 5, "ADP", "case"), ("the", 5, "DET", "det"),
               ("vessel", 2, "NOUN", "obl")]),
    ],
    "astronomy": [
        ("1", [("the", 2, "DET", "det"), ("astronomer", 3, "NOUN", "nsubj"),
               ("observes", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("nebula", 3, "NOUN", "obj"), ("tonight", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("stargazer", 3, "NOUN", "nsubj"),
               ("observes", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("galaxy", 3, "NOUN", "obj"), ("tonight", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("telescope", 3, "NOUN", "nsubj"),
               ("charts", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("comet", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("comet", 3, "NOUN", "nsubj"),
               ("orbits", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("planet", 3, "NOUN", "obj")]),
        ("5", [("the", 2, "DET", "det"), ("astronomer", 3, "NOUN", "nsubj"),
               ("measures", 0, "VERB", "root"), ("faint", 5, "ADJ", "amod"),
               ("starlight", 3, "NOUN", "obj")]),
    ],
    "football": [
        ("1", [("the", 2, "DET", "det"), ("striker", 3, "NOUN", "nsubj"),
               ("kicks", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("ball", 3, "NOUN", "obj"), ("skyward", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("forward", 3, "NOUN", "nsubj"),
               ("kicks", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("ball", 3, "NOUN", "obj"), ("upward", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("defender", 3, "NOUN", "nsubj"),
               ("blocks", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("shot", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("coach", 3, "NOUN", "nsubj"),
               ("trains", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("squad", 3, "NOUN", "obj")]),
        ("5", [("the", 2, "DET", "det"), ("crowd", 3, "NOUN", "nsubj"),
               ("cheers", 0, "VERB", "root"), ("in", 6, "ADP", "case"),
               ("the", 6, "DET", "det"), ("stadium", 3, "NOUN", "obl")]),
    ],
    "gardening": [
        ("1", [("the", 2, "DET", "det"), ("gardener", 3, "NOUN", "nsubj"),
               ("waters", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("seedlings", 3, "NOUN", "obj"), ("daily", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("grower", 3, "NOUN", "nsubj"),
               ("waters", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("sprouts", 3, "NOUN", "obj"), ("daily", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("gardener", 3, "NOUN", "nsubj"),
               ("prunes", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("hedge", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("grower", 3, "NOUN", "nsubj"),
               ("rakes", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("leaves", 3, "NOUN", "obj")]),
        ("5", [("the", 2, "DET", "det"), ("roses", 3, "NOUN", "nsubj"),
               ("bloom", 0, "VERB", "root"), ("in", 6, "ADP", "case"),
               ("the", 6, "DET", "det"), ("soil", 3, "NOUN", "obl")]),
    ],
    "banking": [
        ("1", [("the", 2, "DET", "det"), ("banker", 3, "NOUN", "nsubj"),
               ("approves", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("loan", 3, "NOUN", "obj"), ("quickly", 3, "ADV", "advmod")]),
        ("2", [("a", 2, "DET", "det"), ("teller", 3, "NOUN", "nsubj"),
               ("counts", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("deposits", 3, "NOUN", "obj"), ("carefully", 3, "ADV", "advmod")]),
        ("3", [("the", 2, "DET", "det"), ("investor", 3, "NOUN", "nsubj"),
               ("transfers", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("funds", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("banker", 3, "NOUN", "nsubj"),
               ("audits", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("ledger", 3, "NOUN", "obj")]),
        ("5", [("the", 2, "DET", "det"), ("teller", 3, "NOUN", "nsubj"),
               ("counts", 0, "VERB", "root"), ("coins", 3, "NOUN", "obj"),
               ("at", 7, "ADP", "case"), ("the", 7, "DET", "det"),
               ("branch", 3, "NOUN", "obl")]),
    ],
    "music": [
        ("1", [("the", 2, "DET", "det"), ("violinist", 3, "NOUN", "nsubj"),
               ("plays", 0, "VERB", "root"), ("a", 5, "DET", "det"),
               ("melody", 3, "NOUN", "obj"), ("softly", 3, "ADV", "advmod")]),
        ("2", [("the", 2, "DET", "det"), ("drummer", 3, "NOUN", "nsubj"),
               ("keeps", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("rhythm", 3, "NOUN", "obj")]),
        ("3", [("the", 2, "DET", "det"), ("singer", 3, "NOUN", "nsubj"),
               ("hums", 0, "VERB", "root"), ("a", 5, "DET", "det"),
               ("tune", 3, "NOUN", "obj")]),
        ("4", [("the", 2, "DET", "det"), ("audience", 3, "NOUN", "nsubj"),
               ("applauds", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("concert", 3, "NOUN", "obj")]),
        ("5", [("a", 2, "DET", "det"), ("violinist", 3, "NOUN", "nsubj"),
               ("plays", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("tune", 3, "NOUN", "obj"), ("sweetly", 3, "ADV", "advmod")]),
    ],
    "weather": [
        ("1", [("the", 2, "DET", "det"), ("storm", 3, "NOUN", "nsubj"),
               ("floods", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("valley", 3, "NOUN", "obj"), ("overnight", 3, "ADV", "advmod")]),
        ("2", [("thunder", 2, "NOUN", "nsubj"), ("rumbles", 0, "VERB", "root"),
               ("over", 5, "ADP", "case"), ("the", 5, "DET", "det"),
               ("meadow", 2, "NOUN", "obl")]),
        ("3", [("the", 2, "DET", "det"), ("clouds", 3, "NOUN", "nsubj"),
               ("gather", 0, "VERB", "root"), ("above", 6, "ADP", "case"),
               ("the", 6, "DET", "det"), ("horizon", 3, "NOUN", "obl")]),
        ("4", [("the", 2, "DET", "det"), ("rain", 3, "NOUN", "nsubj"),
               ("soaks", 0, "VERB", "root"), ("the", 5, "DET", "det"),
               ("meadow", 3, "NOUN", "obj")]),
        ("5", [("the", 2, "DET", "det"), ("fog", 3, "NOUN", "nsubj"),
               ("settles", 0, "VERB", "root"), ("over", 6, "ADP", "case"),
               ("the", 6, "DET", "det"), ("valley", 3, "NOUN", "obl")]),
    ],
}

# synonym pairs share a sub-cluster inside their topic cluster
SYNONYMS = [
    ("chef", "cook"), ("broth", "soup"), ("slowly", "gently"),
    ("sailor", "mariner"), ("sloop", "boat"), ("steers", "guides"),
    ("astronomer", "stargazer"), ("nebula", "galaxy"),
    ("striker", "forward"), ("skyward", "upward"),
    ("gardener", "grower"), ("seedlings", "sprouts"),
]

PARA_PAIRS = [
    ("para", 5.0, "cooking-1", "cooking-2"),
    ("para", 4.8, "sailing-1", "sailing-2"),
    ("para", 4.6, "astronomy-1", "astronomy-2"),
    ("para", 4.4, "football-1", "football-2"),
    ("para", 4.2, "gardening-1", "gardening-2"),
]

UNREL_PAIRS = [
    ("unrel", 0.2, "cooking-3", "weather-4"),
    ("unrel", 0.4, "sailing-3", "music-3"),
    ("unrel", 0.5, "astronomy-3", "banking-2"),
    ("unrel", 0.8, "football-3", "gardening-3"),
    ("unrel", 1.0, "banking-4", "weather-2"),
]

MIXED_PAIRS = [
    ("mixed", 3.8, "cooking-1", "cooking-4"),
    ("mixed", 3.2, "cooking-4", "cooking-5"),
    ("mixed", 3.0, "sailing-4", "sailing-5"),
    ("mixed", 3.9, "music-1", "music-5"),
    ("mixed", 3.4, "weather-1", "weather-5"),
    ("mixed", 2.9, "astronomy-4", "astronomy-5"),
    ("mixed", 3.1, "banking-1", "banking-3"),
    ("mixed", 2.6, "football-4", "football-5"),
    ("mixed", 2.8, "gardening-4", "gardening-5"),
    ("mixed", 1.4, "music-2", "weather-3"),
]


def build_sentences():
    sentences = []
    for topic, rows in TOPICS.items():
        for suffix, spec_rows in rows:
            tokens = [
                Token(i, surface, surface.lower(), upos, head, deprel)
                for i, (surface, head, upos, deprel) in enumerate(spec_rows, start=1)
            ]
            text = " ".join(t.surface for t in tokens)
            sentences.append(DepSentence(f"{topic}-{suffix}", tuple(tokens), text))
    return sentences


def build_vectors(sentences):
    cfg = preset("synwmd-full")
    filt = cfg.token_filter()
    kept = sorted({
        filt.key(tok) for sent in sentences for tok in sent.tokens if filt.keeps(tok)
    })
    topic_of = {}
    for topic, rows in TOPICS.items():
        for _, spec_rows in rows:
            for surface, _, _, _ in spec_rows:
                topic_of.setdefault(surface.lower(), topic)
    partner = {}
    for a, b in SYNONYMS:
        partner[b] = a

    rng = np.random.default_rng(SEED)
    bases = {
        topic: rng.normal(size=DIM) / np.sqrt(DIM) for topic in sorted(TOPICS)
    }
    table = {}
    for word in kept:
        topic = topic_of[word]
        if word in partner and partner[word] in table:
            vec = table[partner[word]] + 0.05 * rng.normal(size=DIM)
        else:
            vec = bases[topic] + 0.25 * rng.normal(size=DIM) / np.sqrt(DIM)
        table[word] = vec
    return {w: v / np.linalg.norm(v) for w, v in table.items()}


def write_assets(sentences, table):
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with open(OUT_DIR / "corpus.conllu", "w", encoding="utf-8") as handle:
        write_conllu(sentences, handle)
    with open(OUT_DIR / "vectors.txt", "w", encoding="utf-8") as handle:
        handle.write(f"{len(table)} {DIM}\n")
        for word in sorted(table):
            cells = " ".join(f"{x:.6f}" for x in table[word])
            handle.write(f"{word} {cells}\n")
    with open(OUT_DIR / "pairs.tsv", "w", encoding="utf-8") as handle:
        handle.write("# subset\tgold\tsent_a\tsent_b\n")
        for subset, gold, a, b in PARA_PAIRS + UNREL_PAIRS + MIXED_PAIRS:
            handle.write(f"{subset}\t{gold}\t{a}\t{b}\n")
    with open(OUT_DIR / "labels.tsv", "w", encoding="utf-8") as handle:
        for sent in sentences:
            topic = sent.sentence_id.rsplit("-", 1)[0]
            handle.write(f"{topic}\t{sent.sentence_id}\n")


def verify():
    corpus = read_conllu(OUT_DIR / "corpus.conllu")
    static = read_static(OUT_DIR / "vectors.txt")
    cfg = preset("synwmd-full")
    filt = cfg.token_filter()
    missing = {
        filt.key(tok)
        for sent in corpus
        for tok in sent.tokens
        if filt.keeps(tok) and static.get(filt.key(tok)) is None
    }
    if missing:
        raise SystemExit(f"kept words without vectors: {sorted(missing)}")

    artifacts = CorpusArtifacts.build(corpus, cfg, static=static)
    with open(OUT_DIR / "pairs.tsv", encoding="utf-8") as handle:
        dataset = load_sts_tsv(handle, source_name="pairs.tsv")
    triples = [(p.pair_id, p.sent_a, p.sent_b) for p in dataset.pairs]
    scores = {s.pair_id: s.distance for s in score_pairs(artifacts, triples)}
    para = [scores[p.pair_id] for p in dataset.pairs if p.subset == "para"]
    unrel = [scores[p.pair_id] for p in dataset.pairs if p.subset == "unrel"]
    margin = min(unrel) - max(para)
    print(f"para max {max(para):.4f}  unrel min {min(unrel):.4f}  margin {margin:.4f}")
    if margin <= 0:
        raise SystemExit("rank separation failed, assets not usable")
    report = eval_sts(dataset, scores)
    print(report.to_table())


def main():
    sentences = build_sentences()
    table = build_vectors(sentences)
    write_assets(sentences, table)
    verify()
    print(f"assets written to {OUT_DIR}")


if __name__ == "__main__":
    main()
