"""Preprocessing bridge: parse sentences and encode their tokens.

Produces the two files the scorer consumes, a CoNLL-U treebank and a
token-vector JSONL, from a plain TSV of sentences.
"""

from .encoders import HashEncoder, HfEncoder, pool_words, run_encode
from .jobs import BridgeError, BridgeJob, __version__, read_sentences
from .parsers import ChainParser, StanzaParser, make_parser, run_parse

__all__ = [
    "BridgeError",
    "BridgeJob",
    "ChainParser",
    "HashEncoder",
    "HfEncoder",
    "StanzaParser",
    "__version__",
    "make_parser",
    "pool_words",
    "read_sentences",
    "run_encode",
    "run_parse",
]
