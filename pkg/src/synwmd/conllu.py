"""Reading, validating, serializing, and querying CoNLL-U dependency corpora."""

from __future__ import annotations

import io
import re
from dataclasses import dataclass

from .errors import (
    CyclicTree,
    DanglingHead,
    DuplicateSentenceId,
    IndexOutOfRange,
    MalformedLine,
    MultipleRoots,
)

NUM_COLUMNS = 10

_MWT_ID = re.compile(r"^\d+-\d+$")
_EMPTY_NODE_ID = re.compile(r"^\d+\.\d+$")


@dataclass(frozen=True)
class Token:
    """One syntactic word. ``head`` is the index of its governor, 0 for the root."""

    index: int
    surface: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class DepSentence:
    """A sentence with a single-rooted dependency tree. Immutable once built."""

    sentence_id: str
    tokens: tuple[Token, ...]
    raw_text: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        by_id, children = self._validate()
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_children", children)

    def _validate(self):
        sid = self.sentence_id
        if not self.tokens:
            raise MalformedLine(f"{sid}: sentence has no tokens")
        by_id: dict[int, Token] = {}
        for tok in self.tokens:
            if tok.index < 1:
                raise MalformedLine(f"{sid}: token index {tok.index} < 1")
            if tok.index in by_id:
                raise MalformedLine(f"{sid}: duplicate token index {tok.index}")
            by_id[tok.index] = tok
        roots = []
        for tok in self.tokens:
            if tok.head < 0:
                raise MalformedLine(f"{sid}: token {tok.index} has negative head")
            if tok.head == tok.index:
                raise CyclicTree(f"{sid}: token {tok.index} is its own head")
            if tok.head == 0:
                roots.append(tok.index)
            elif tok.head not in by_id:
                raise DanglingHead(
                    f"{sid}: token {tok.index} points to missing head {tok.head}"
                )
        if len(roots) > 1:
            raise MultipleRoots(f"{sid}: tokens {roots} all claim the root")
        if not roots:
            raise CyclicTree(f"{sid}: no root token, head links must cycle")
        # every token must reach the root without revisiting a node
        done: set[int] = set()
        for tok in self.tokens:
            path = []
            cur = tok.index
            while cur != 0 and cur not in done:
                if cur in path:
                    raise CyclicTree(f"{sid}: cycle through token {cur}")
                path.append(cur)
                cur = by_id[cur].head
            done.update(path)
        children: dict[int, tuple[int, ...]] = {t.index: () for t in self.tokens}
        for tok in self.tokens:
            if tok.head != 0:
                children[tok.head] = children[tok.head] + (tok.index,)
        return by_id, children

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        try:
            return self._by_id[index]
        except KeyError:
            raise IndexOutOfRange(f"{self.sentence_id}: no token {index}") from None

    def children(self, index: int) -> tuple[int, ...]:
        """Direct dependents of the token at ``index``."""
        self.token(index)
        return self._children[index]

    @property
    def root_index(self) -> int:
        for tok in self.tokens:
            if tok.head == 0:
                return tok.index
        raise CyclicTree(f"{self.sentence_id}: no root")  # unreachable after init


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of sentences with unique ids."""

    sentences: tuple[DepSentence, ...]
    source_path: str = "<memory>"

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        index: dict[str, DepSentence] = {}
        for sent in self.sentences:
            if sent.sentence_id in index:
                raise DuplicateSentenceId(
                    f"{self.source_path}: duplicate sentence id {sent.sentence_id!r}"
                )
            index[sent.sentence_id] = sent
        object.__setattr__(self, "_index", index)

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)

    def sentence(self, sentence_id: str) -> DepSentence:
        try:
            return self._index[sentence_id]
        except KeyError:
            raise IndexOutOfRange(
                f"{self.source_path}: no sentence {sentence_id!r}"
            ) from None

    def __contains__(self, sentence_id: str) -> bool:
        return sentence_id in self._index


def _iter_lines(source):
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_conllu(source, source_path: str = "<stream>") -> Corpus:
    """Parse CoNLL-U text into a validated :class:`Corpus`.

    ``source`` may be a string, a text file object, or any iterable of lines.
    Multiword-token ranges (``3-4``) and empty nodes (``5.1``) carry no tree
    structure and are skipped. ``# sent_id = ...`` comments name sentences;
    blocks without one get sequential ids ``s1``, ``s2``, ...
    """
    sentences = []
    block: list[tuple[int, str]] = []
    for line_no, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if line.strip() == "":
            if block:
                sent = _parse_block(block, len(sentences) + 1)
                if sent is not None:
                    sentences.append(sent)
                block = []
        else:
            block.append((line_no, line))
    if block:
        sent = _parse_block(block, len(sentences) + 1)
        if sent is not None:
            sentences.append(sent)
    return Corpus(tuple(sentences), source_path)


def _parse_block(lines, ordinal):
    sent_id = None
    text = None
    tokens = []
    for line_no, line in lines:
        if line.startswith("#"):
            key, eq, value = line[1:].partition("=")
            if eq:
                key = key.strip()
                if key == "sent_id":
                    sent_id = value.strip()
                elif key == "text":
                    text = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != NUM_COLUMNS:
            raise MalformedLine(
                f"line {line_no}: expected {NUM_COLUMNS} columns, got {len(cols)}"
            )
        raw_id = cols[0]
        if _MWT_ID.match(raw_id) or _EMPTY_NODE_ID.match(raw_id):
            continue
        try:
            index = int(raw_id)
            head = int(cols[6])
        except ValueError:
            raise MalformedLine(
                f"line {line_no}: non-integer ID or HEAD ({raw_id!r}, {cols[6]!r})"
            ) from None
        tokens.append(Token(index, cols[1], cols[2], cols[3], head, cols[7]))
    if not tokens:
        return None
    return DepSentence(sent_id if sent_id is not None else f"s{ordinal}", tuple(tokens), text)


def read_conllu(path) -> Corpus:
    """Parse the CoNLL-U file at ``path``."""
    with open(path, encoding="utf-8") as handle:
        return parse_conllu(handle, source_path=str(path))


def write_conllu(sentences, target=None):
    """Serialize sentences to CoNLL-U text; unparsed columns become ``_``.

    Returns the text when ``target`` is None, otherwise writes to the given
    text file object. Re-parsing the output reproduces every Token field.
    """
    buf = io.StringIO() if target is None else target
    for sent in sentences:
        buf.write(f"# sent_id = {sent.sentence_id}\n")
        if sent.raw_text is not None:
            buf.write(f"# text = {sent.raw_text}\n")
        for tok in sent.tokens:
            buf.write(
                "\t".join(
                    (
                        str(tok.index),
                        tok.surface,
                        tok.lemma,
                        tok.upos,
                        "_",
                        "_",
                        str(tok.head),
                        tok.deprel,
                        "_",
                        "_",
                    )
                )
                + "\n"
            )
        buf.write("\n")
    if target is None:
        return buf.getvalue()
    return None


def tree_hop_distance(sentence: DepSentence, i: int, j: int) -> int:
    """Number of edges on the undirected tree path between tokens ``i`` and ``j``."""
    sentence.token(i)
    sentence.token(j)
    if i == j:
        return 0
    # depth of every ancestor of i, then walk up from j to the first common node
    depths = {}
    cur, depth = i, 0
    while cur != 0:
        depths[cur] = depth
        cur = sentence.token(cur).head
        depth += 1
    depths[0] = depth
    cur, depth = j, 0
    while cur not in depths:
        cur = sentence.token(cur).head
        depth += 1
    return depth + depths[cur]


def children_within(sentence: DepSentence, parent: int, hops: int) -> set[int]:
    """Descendants of ``parent`` reachable through at most ``hops`` child edges.

    The parent itself is excluded. ``hops`` must be >= 1.
    """
    if hops < 1:
        raise ValueError(f"hops must be >= 1, got {hops}")
    sentence.token(parent)
    found: set[int] = set()
    frontier = [parent]
    for _ in range(hops):
        nxt = []
        for node in frontier:
            for child in sentence.children(node):
                if child not in found:
                    found.add(child)
                    nxt.append(child)
        if not nxt:
            break
        frontier = nxt
    return found
