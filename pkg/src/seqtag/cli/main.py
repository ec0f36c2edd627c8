"""``seqtag`` command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from .. import __version__
from .commands import HANDLERS, Context
from .config import COMMANDS, SCHEMAS, TRAINING_COMMANDS, ConfigError, load_config
from .manifest import RunManifest

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("seqtag")


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqtag", description="Corpus conversion, embedding and tagger training, tagging and evaluation.")
    parser.add_argument("--version", action="version", version=f"seqtag {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (-vv for debug)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"{name} (see '{name} --help')")
        p.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS,
                       help="log progress (-vv for debug)")
        p.add_argument("--config", metavar="PATH", help="INI file; the [%s] section is read" % name)
        p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                       help="override any setting; repeatable")
        for key, spec in SCHEMAS[name].items():
            meta = "|".join(spec.choices) if spec.kind == "choice" else spec.kind.upper()
            if spec.kind == "mode":
                meta = "exact|tolerant|overlap"
            p.add_argument(_flag(key), dest=f"k_{key}", metavar=meta, help=spec.help or None)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    for name, value in vars(args).items():
        if name.startswith("k_") and value is not None:
            out[name[2:]] = value
    return out


def _input_paths(cfg) -> set[Path]:
    paths = set()
    for key, spec in SCHEMAS[cfg.command].items():
        if key == "out" or cfg.values.get(key) is None:
            continue
        if spec.kind == "path":
            paths.add(cfg[key])
        elif spec.kind == "paths":
            paths.update(cfg[key])
    return paths


def run(command: str, args: argparse.Namespace) -> int:
    cfg = load_config(args.config, _overrides(args), command)
    if command in TRAINING_COMMANDS and cfg.get("seed") is None:
        raise ConfigError(f"{command} needs a seed")
    inputs = _input_paths(cfg)
    for p in sorted(inputs):
        if not p.exists():
            raise FileNotFoundError(f"input {p} does not exist")
    manifest = RunManifest(command, cfg.snapshot(),
                           started=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    if args.config:
        manifest.add_input(Path(args.config).resolve())
    for p in sorted(inputs):
        manifest.add_input(p)
    ctx = Context(cfg, inputs)
    t0 = time.perf_counter()
    HANDLERS[command](ctx)
    manifest.wall_clock_seconds = round(time.perf_counter() - t0, 3)
    for path in ctx.written:
        manifest.add_output(path, ctx.out)
    manifest.write(ctx.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("seqtag: error: a command is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(args.command, args)
    except ConfigError as err:
        print(f"seqtag {args.command}: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, FloatingPointError, KeyError) as err:
        print(f"seqtag {args.command}: error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
