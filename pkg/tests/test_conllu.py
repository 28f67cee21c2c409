"""Reader, tree validation, round-tripping, and tree hop metrics."""

import io

import pytest

from synwmd.conllu import (
    DepSentence,
    Token,
    children_within,
    parse_conllu,
    tree_hop_distance,
    write_conllu,
)
from synwmd.errors import (
    CyclicTree,
    DanglingHead,
    DuplicateSentenceId,
    IndexOutOfRange,
    MalformedLine,
    MultipleRoots,
)

from conftest import make_corpus, make_sentence

SAMPLE = """\
# sent_id = s1
# text = He found a dog .
1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tfound\tfind\tVERB\t_\t_\t0\troot\t_\t_
3\ta\ta\tDET\t_\t_\t4\tdet\t_\t_
4\tdog\tdog\tNOUN\t_\t_\t2\tobj\t_\t_
5\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_

# sent_id = s2
1\tBirds\tbird\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tsing\tsing\tVERB\t_\t_\t0\troot\t_\t_
"""


def test_parse_basic():
    corpus = parse_conllu(SAMPLE)
    assert len(corpus) == 2
    s1 = corpus.sentence("s1")
    assert [t.surface for t in s1.tokens] == ["He", "found", "a", "dog", "."]
    assert s1.token(2).upos == "VERB"
    assert s1.token(2).head == 0
    assert s1.root_index == 2
    assert s1.raw_text == "He found a dog ."
    assert corpus.sentence("s2").raw_text is None
    assert "s2" in corpus and "nope" not in corpus


def test_parse_assigns_sequential_ids_when_missing():
    block = "1\tHi\thi\tINTJ\t_\t_\t0\troot\t_\t_\n"
    corpus = parse_conllu(block + "\n" + block)
    assert [s.sentence_id for s in corpus] == ["s1", "s2"]


def test_parse_skips_multiword_and_empty_nodes():
    text = (
        "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_\n"
        "2\tel\tel\tDET\t_\t_\t0\troot\t_\t_\n"
        "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
    )
    corpus = parse_conllu(text)
    assert [t.surface for t in corpus.sentences[0].tokens] == ["de", "el"]


@pytest.mark.parametrize(
    "bad, exc",
    [
        ("1\tonly\tthree\n", MalformedLine),
        ("x\ta\ta\tX\t_\t_\t0\troot\t_\t_\n", MalformedLine),
        ("1\ta\ta\tX\t_\t_\tzzz\troot\t_\t_\n", MalformedLine),
    ],
)
def test_parse_malformed_lines(bad, exc):
    with pytest.raises(exc) as info:
        parse_conllu(bad)
    assert "line 1" in str(info.value)


def test_validation_errors():
    with pytest.raises(MultipleRoots):
        make_sentence("x", [("a", 0), ("b", 0)])
    with pytest.raises(DanglingHead):
        make_sentence("x", [("a", 0), ("b", 9)])
    with pytest.raises(CyclicTree):
        make_sentence("x", [("a", 1)])
    # 2 -> 3 -> 2 cycle below a real root
    with pytest.raises(CyclicTree):
        make_sentence("x", [("a", 0), ("b", 3), ("c", 2)])
    with pytest.raises(MalformedLine):
        DepSentence(sentence_id="x", tokens=())


def test_head_patterns_from_three_nodes():
    # (2, 0, 2) is a valid tree rooted at the middle token
    sentence = make_sentence("ok", [("a", 2), ("b", 0), ("c", 2)])
    assert sentence.root_index == 2
    with pytest.raises(CyclicTree):
        make_sentence("bad", [("a", 2), ("b", 1), ("c", 0)])
    with pytest.raises(CyclicTree):
        make_sentence("bad", [("a", 2), ("b", 1), ("c", 3)])


def test_duplicate_sentence_ids_rejected():
    one = make_sentence("same", [("a", 0)])
    two = make_sentence("same", [("b", 0)])
    with pytest.raises(DuplicateSentenceId):
        make_corpus(one, two)


def test_round_trip_is_exact():
    corpus = parse_conllu(SAMPLE)
    buffer = io.StringIO()
    write_conllu(corpus, buffer)
    again = parse_conllu(buffer.getvalue())
    assert again.sentences == corpus.sentences
    # and writing the reparse reproduces the first serialization byte for byte
    buffer2 = io.StringIO()
    write_conllu(again, buffer2)
    assert buffer2.getvalue() == buffer.getvalue()


BACKYARD = [
    ("He", 2, "PRON", "nsubj"),
    ("found", 0, "VERB", "root"),
    ("a", 5, "DET", "det"),
    ("skinny", 5, "ADJ", "amod"),
    ("dog", 2, "NOUN", "obj"),
    ("in", 8, "ADP", "case"),
    ("his", 8, "PRON", "nmod:poss"),
    ("backyard", 2, "NOUN", "obl"),
    (".", 2, "PUNCT", "punct"),
]


def test_tree_hop_distance_examples():
    sentence = make_sentence("yard", BACKYARD)
    # adjective to verb goes through the noun it modifies, not the surface gap
    assert tree_hop_distance(sentence, 4, 2) == 2
    assert tree_hop_distance(sentence, 4, 4) == 0
    assert tree_hop_distance(sentence, 1, 2) == 1
    assert tree_hop_distance(sentence, 3, 4) == 2
    assert tree_hop_distance(sentence, 7, 1) == 3
    assert tree_hop_distance(sentence, 2, 5) == tree_hop_distance(sentence, 5, 2)
    with pytest.raises(IndexOutOfRange):
        tree_hop_distance(sentence, 0, 2)
    with pytest.raises(IndexOutOfRange):
        tree_hop_distance(sentence, 1, 99)


def test_tree_hop_distance_matches_bfs(rng):
    # random trees: token i attaches to a uniformly random earlier token
    from collections import deque

    for trial in range(25):
        size = int(rng.integers(2, 15))
        rows = [("w0", 0)]
        for pos in range(1, size):
            rows.append((f"w{pos}", int(rng.integers(0, pos)) + 1))
        sentence = make_sentence(f"r{trial}", rows)

        adjacency = {tok.index: set() for tok in sentence.tokens}
        for tok in sentence.tokens:
            if tok.head > 0:
                adjacency[tok.index].add(tok.head)
                adjacency[tok.head].add(tok.index)

        def bfs(a, b):
            seen = {a: 0}
            queue = deque([a])
            while queue:
                cur = queue.popleft()
                if cur == b:
                    return seen[cur]
                for nxt in adjacency[cur]:
                    if nxt not in seen:
                        seen[nxt] = seen[cur] + 1
                        queue.append(nxt)
            raise AssertionError("tree is connected")

        for a in range(1, size + 1):
            for b in range(1, size + 1):
                assert tree_hop_distance(sentence, a, b) == bfs(a, b)


def test_children_within():
    sentence = make_sentence("yard", BACKYARD)
    assert children_within(sentence, 2, 1) == {1, 5, 8, 9}
    assert children_within(sentence, 2, 2) == {1, 3, 4, 5, 6, 7, 8, 9}
    assert children_within(sentence, 5, 1) == {3, 4}
    assert children_within(sentence, 3, 1) == set()
    with pytest.raises(ValueError):
        children_within(sentence, 2, 0)
    with pytest.raises(IndexOutOfRange):
        children_within(sentence, 42, 1)


def test_token_is_immutable():
    token = Token(index=1, surface="a", lemma="a", upos="X", head=0,
                  deprel="root")
    with pytest.raises(Exception):
        token.surface = "b"
