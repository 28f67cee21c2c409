"""Token filtering shared by flow assignment, graphs, subtrees, and costs."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .conllu import DepSentence, Token


def _parse_stopword_text(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


def load_stopwords(source) -> frozenset[str]:
    """Read a one-word-per-line stopword file; blanks and # comments skipped."""
    if hasattr(source, "read"):
        return _parse_stopword_text(source.read())
    with open(source, encoding="utf-8") as handle:
        return _parse_stopword_text(handle.read())


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The stopword list shipped with the package (see data/stopwords.txt)."""
    text = resources.files("synwmd").joinpath("data/stopwords.txt").read_text("utf-8")
    return _parse_stopword_text(text)


@dataclass(frozen=True)
class TokenFilter:
    """Decides which tokens carry flow and appear in graphs and costs.

    Stopword matching is always case-insensitive; ``lowercase`` only controls
    the vocabulary key used for embedding and graph lookups.
    """

    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    drop_punct: bool = True
    lowercase: bool = True

    def key(self, token: Token) -> str:
        """Vocabulary key of a token."""
        return token.surface.lower() if self.lowercase else token.surface

    def keeps(self, token: Token) -> bool:
        if self.drop_punct and token.upos == "PUNCT":
            return False
        return token.surface.lower() not in self.stopwords

    def kept(self, sentence: DepSentence) -> list[Token]:
        return [tok for tok in sentence.tokens if self.keeps(tok)]
