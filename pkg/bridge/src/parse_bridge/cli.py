"""Command-line interface: parse sentences, then encode their tokens."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .encoders import LAYER_POLICIES, run_encode
from .jobs import BridgeError, BridgeJob
from .parsers import run_parse

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

PARSER_BACKENDS = ("chain", "stanza")


class ConfigError(Exception):
    """Bad flags or backend names (exit code 2)."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridge",
        description="Produce the CoNLL-U and token-vector files the scorer reads.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="dependency-parse a sentences TSV to CoNLL-U")
    p.add_argument("--input", required=True, help="TSV of sent_id<TAB>text rows")
    p.add_argument("--out", required=True, help="CoNLL-U output path")
    p.add_argument("--backend", default="stanza", help="parser backend (stanza, chain)")
    p.add_argument("--model", default="default", help="parser model package")
    p.add_argument("--lang", default="en", help="language code for the parser")
    p.add_argument("--lowercase", action="store_true", help="lowercase text before parsing")
    p.add_argument("--manifest", help="write a JSON run manifest here")
    p.set_defaults(handler=cmd_parse)

    e = sub.add_parser("encode", help="emit one vector record per CoNLL-U token")
    e.add_argument("--conllu", required=True, help="CoNLL-U input (from bridge parse)")
    e.add_argument("--out", required=True, help="token-vector JSONL output path")
    e.add_argument("--model", default="hash", help="encoder: 'hash' or a transformers name")
    e.add_argument("--layers", default="first-last-avg", choices=LAYER_POLICIES,
                   help="which hidden layers feed the token vectors")
    e.add_argument("--dim", type=int, default=64, help="vector width for the hash encoder")
    e.add_argument("--batch-size", type=int, default=32)
    e.add_argument("--manifest", help="write a JSON run manifest here")
    e.set_defaults(handler=cmd_encode)
    return parser


def cmd_parse(args) -> int:
    if args.backend not in PARSER_BACKENDS:
        raise ConfigError(f"unknown parser backend {args.backend!r}")
    spec = args.backend
    if args.backend == "stanza" and args.model != "default":
        spec = f"stanza:{args.model}"
    job = BridgeJob(
        sentences=args.input,
        conllu=args.out,
        parser_model=spec,
        language=args.lang,
        lowercase=args.lowercase,
        manifest=args.manifest,
    )
    counts = run_parse(job)
    sys.stdout.write(
        f"parsed {counts['parsed']}/{counts['input']} sentences"
        f" ({len(counts['skipped'])} skipped)\n"
    )
    return EXIT_OK


def cmd_encode(args) -> int:
    if args.batch_size < 1:
        raise ConfigError(f"batch size must be >= 1, got {args.batch_size}")
    if args.dim < 1:
        raise ConfigError(f"dim must be >= 1, got {args.dim}")
    job = BridgeJob(
        conllu=args.conllu,
        vectors=args.out,
        encoder_model=args.model,
        layer_policy=args.layers,
        batch_size=args.batch_size,
        dim=args.dim,
        manifest=args.manifest,
    )
    counts = run_encode(job)
    sys.stdout.write(
        f"encoded {counts['encoded']}/{counts['sentences']} sentences"
        f" ({len(counts['skipped'])} skipped)\n"
    )
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.handler(args)
    except ConfigError as exc:
        sys.stderr.write(f"bridge: {exc}\n")
        return EXIT_CONFIG
    except (BridgeError, OSError) as exc:
        sys.stderr.write(f"bridge: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
