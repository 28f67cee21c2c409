"""Dependency-parser backends and the parse half of the bridge."""

from __future__ import annotations

import logging
import re
import warnings
from dataclasses import dataclass

from .jobs import BridgeJob, BridgeError, read_sentences, write_atomic, write_manifest

log = logging.getLogger("bridge")

_TOKEN_RE = re.compile(r"\w+(?:'\w+)?|[^\w\s]")


@dataclass(frozen=True)
class ParsedToken:
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


class ChainParser:
    """Deterministic offline fallback: regex tokens on a left-to-right chain.

    The trees are linguistically meaningless but structurally valid (single
    root, acyclic), which is all the downstream contract checks, and lets
    the full pipeline run where no parser model can be loaded.
    """

    name = "chain"

    def version(self) -> str:
        return "builtin"

    def parse(self, text: str) -> list[ParsedToken]:
        forms = _TOKEN_RE.findall(text)
        if not forms:
            raise BridgeError("no tokens")
        tokens = []
        for pos, form in enumerate(forms, start=1):
            if not re.search(r"\w", form):
                upos = "PUNCT"
            elif form.isdigit():
                upos = "NUM"
            else:
                upos = "X"
            head = pos - 1  # 0 for the first token, i.e. the root
            deprel = "root" if head == 0 else "dep"
            tokens.append(ParsedToken(pos, form, form.lower(), upos, head, deprel))
        return tokens


class StanzaParser:
    """Neural parser backend; imports lazily so the package works without it."""

    name = "stanza"

    def __init__(self, language: str = "en", model: str = "default"):
        try:
            import stanza
        except ImportError as exc:
            raise BridgeError(f"stanza is not installed: {exc}") from exc
        self._stanza = stanza
        self._language = language
        self._model = model
        try:
            kwargs = {} if model == "default" else {"package": model}
            self._pipeline = stanza.Pipeline(
                lang=language,
                processors="tokenize,pos,lemma,depparse",
                tokenize_no_ssplit=True,
                verbose=False,
                **kwargs,
            )
        except Exception as exc:
            raise BridgeError(f"cannot load stanza model: {exc}") from exc

    def version(self) -> str:
        return f"stanza {self._stanza.__version__}, {self._language}/{self._model}"

    def parse(self, text: str) -> list[ParsedToken]:
        doc = self._pipeline(text)
        if not doc.sentences:
            raise BridgeError("no tokens")
        words = [w for sent in doc.sentences for w in sent.words]
        return [
            ParsedToken(w.id, w.text, w.lemma or w.text.lower(),
                        w.upos or "X", w.head, w.deprel or "dep")
            for w in words
        ]


def make_parser(name: str, language: str = "en"):
    """Backend from a spec string: "chain", "stanza", or "stanza:<package>"."""
    if name == "chain":
        return ChainParser()
    backend, _, model = name.partition(":")
    if backend == "stanza":
        return StanzaParser(language=language, model=model or "default")
    raise BridgeError(f"unknown parser backend {name!r}")


def render_conllu(sent_id: str, text: str, tokens) -> str:
    lines = [f"# sent_id = {sent_id}", f"# text = {text}"]
    for tok in tokens:
        lines.append(
            "\t".join(
                (str(tok.index), tok.form, tok.lemma, tok.upos, "_", "_",
                 str(tok.head), tok.deprel, "_", "_")
            )
        )
    return "\n".join(lines) + "\n\n"


def run_parse(job: BridgeJob, parser=None) -> dict:
    """Parse every input sentence into one CoNLL-U file.

    Sentences the backend cannot parse are skipped with a log entry; the
    counts of both outcomes are returned and recorded in the manifest.
    """
    rows = read_sentences(job.sentences)
    if parser is None:
        parser = make_parser(job.parser_model, job.language)
    blocks = []
    parsed = 0
    skipped = []
    for sent_id, text in rows:
        source = text.lower() if job.lowercase else text
        try:
            tokens = parser.parse(source)
        except BridgeError as exc:
            log.warning("skipping %s: %s", sent_id, exc)
            skipped.append(sent_id)
            continue
        blocks.append(render_conllu(sent_id, source, tokens))
        parsed += 1
    if not rows:
        warnings.warn(f"{job.sentences}: no input sentences", stacklevel=2)
    write_atomic(job.conllu, "".join(blocks))
    counts = {"input": len(rows), "parsed": parsed, "skipped": skipped}
    write_manifest(
        job,
        "parse",
        {"parser": parser.name, "parser_version": parser.version()},
        counts,
        {job.conllu: None},
    )
    return counts
