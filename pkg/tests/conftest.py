"""Shared builders for hand-made sentences, corpora, and vector tables."""

from __future__ import annotations

import numpy as np
import pytest

from synwmd.conllu import Corpus, DepSentence, Token
from synwmd.embeddings import StaticEmbeddings


def make_sentence(sentence_id, rows):
    """rows: (surface, head) or (surface, head, upos) or full 5-tuples."""
    tokens = []
    for pos, row in enumerate(rows, start=1):
        surface, head = row[0], row[1]
        upos = row[2] if len(row) > 2 else "NOUN"
        deprel = row[3] if len(row) > 3 else ("root" if head == 0 else "dep")
        tokens.append(Token(index=pos, surface=surface, lemma=surface.lower(),
                            upos=upos, head=head, deprel=deprel))
    return DepSentence(sentence_id=sentence_id, tokens=tuple(tokens))


def make_corpus(*sentences):
    return Corpus(sentences=tuple(sentences))


def chain_sentence(sentence_id, words):
    """First word is the root, every later word hangs off the previous one."""
    rows = [(words[0], 0)]
    rows.extend((word, pos) for pos, word in enumerate(words[1:], start=1))
    return make_sentence(sentence_id, rows)


def vectors_for(words, dim=8, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    table = {}
    for word in sorted(set(words)):
        table[word] = rng.normal(size=dim) * scale
    return StaticEmbeddings(dim=dim, table=table, duplicates=0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion when that module ran."""
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in results:
        terminalreporter.write_line(f"{name}: {verdict}")
