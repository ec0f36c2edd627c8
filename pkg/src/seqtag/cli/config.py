"""Per-command settings: schema, INI loading, override precedence, coercion."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from ..corpus.document import EntityType
from ..embeddings.charlm import CharLmConfig
from ..embeddings.skipgram import SkipgramConfig
from ..eval.matching import MatchMode
from ..tagger.model import TrainConfig


class ConfigError(ValueError):
    """Bad settings: unknown key, type mismatch or missing value. Maps to exit 2."""


REQUIRED = object()


@dataclass(frozen=True)
class Key:
    kind: str                   # str int float bool path paths choice etype mode
    default: Any = None
    choices: tuple = ()
    help: str = ""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _split_list(text: str) -> list[str]:
    return [p for chunk in text.replace(",", " ").split() for p in [chunk.strip()] if p]


def coerce(name: str, key: Key, value: Any, base_dir: Optional[Path] = None) -> Any:
    """Convert a raw (usually string) value to the key's type; paths become absolute."""
    if value is None:
        return None
    try:
        if key.kind == "str":
            return str(value)
        if key.kind == "int":
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if key.kind == "float":
            return float(value)
        if key.kind == "bool":
            return value if isinstance(value, bool) else _parse_bool(str(value))
        if key.kind == "choice":
            v = str(value)
            if v not in key.choices:
                raise ValueError(f"expected one of {', '.join(key.choices)}")
            return v
        if key.kind == "etype":
            return value if isinstance(value, EntityType) else EntityType.parse(str(value))
        if key.kind == "mode":
            return value if isinstance(value, MatchMode) else MatchMode.parse(str(value))
        if key.kind == "path":
            return _resolve(value, base_dir)
        if key.kind == "paths":
            items = value if isinstance(value, (list, tuple)) else _split_list(str(value))
            return [_resolve(p, base_dir) for p in items]
    except ValueError as err:
        raise ConfigError(f"{name}: invalid {key.kind} value {value!r} ({err})") from None
    raise AssertionError(f"unhandled key kind {key.kind}")


def _resolve(value, base_dir: Optional[Path]) -> Path:
    p = Path(str(value)).expanduser()
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p.resolve()


def _from_dataclass(cls, skip=(), required=()) -> dict[str, Key]:
    kinds = {int: "int", float: "float", bool: "bool", str: "str", "int": "int", "float": "float",
             "bool": "bool", "str": "str"}
    out = {}
    for f in fields(cls):
        if f.name in skip:
            continue
        kind = kinds.get(f.type)
        if kind is None:
            continue
        out[f.name] = Key(kind, REQUIRED if f.name in required else f.default)
    return out


_COMMON = {
    "out": Key("path", Path("."), help="output directory"),
    "workers": Key("int", 1, help="parallel workers (predict, evaluate)"),
}

_LM = _from_dataclass(CharLmConfig, required=("seed",))
_SKIPGRAM = _from_dataclass(SkipgramConfig, required=("seed",))
_TAGGER = _from_dataclass(TrainConfig, skip=("init_checkpoint",), required=("seed",))

SCHEMAS: dict[str, dict[str, Key]] = {
    "convert": {
        "input": Key("path", REQUIRED, help="corpus file to convert"),
        "from": Key("choice", REQUIRED, ("pubtator", "conll", "jsonl"), help="input format"),
        "scheme": Key("choice", "IOBES", ("IOBES", "IOB2"), help="CoNLL label scheme"),
        "aliases": Key("path", None, help="TSV of extra type-name aliases"),
        "split": Key("choice", "train", ("train", "dev", "test"), help="split for unlisted documents"),
        "splits": Key("path", None, help="TSV of document id and split"),
        "name": Key("str", None, help="corpus name (defaults to the input file stem)"),
    },
    "stats": {
        "corpora": Key("paths", REQUIRED, help="harmonized JSONL corpora"),
    },
    "train-lm": {
        "corpus": Key("path", REQUIRED, help="plain text (one line per paragraph) or JSONL"),
        "direction": Key("choice", "both", ("forward", "backward", "both")),
        "preset": Key("choice", "desk", ("desk", "large")),
        **_LM,
    },
    "train-embed": {
        "corpus": Key("path", REQUIRED, help="plain text or JSONL"),
        **_SKIPGRAM,
    },
    "train-tagger": {
        "corpora": Key("paths", REQUIRED, help="harmonized JSONL training corpora"),
        "dev_corpora": Key("paths", None, help="JSONL dev corpora (default: dev split of corpora)"),
        "entity_type": Key("etype", REQUIRED),
        "flair_forward": Key("path", None),
        "flair_backward": Key("path", None),
        "skipgram": Key("path", None),
        "word2vec": Key("path", None),
        "init_model": Key("path", None, help="initialise from this tagger checkpoint"),
        **_TAGGER,
    },
    "predict": {
        "model": Key("path", REQUIRED),
        "input": Key("path", REQUIRED, help=".txt (one document per line) or harmonized .jsonl"),
        "entity_type": Key("etype", REQUIRED),
    },
    "evaluate": {
        "gold": Key("paths", REQUIRED, help="harmonized JSONL gold corpora"),
        "predictions": Key("path", REQUIRED),
        "entity_type": Key("etype", REQUIRED),
        "mode": Key("mode", MatchMode.Exact),
        "realign": Key("bool", False, help="fuzzy re-align predictions whose text disagrees with gold"),
    },
    "compare": {
        "results": Key("paths", REQUIRED, help="report.csv files written by evaluate"),
        "reference": Key("path", None, help="reference scores CSV (default: shipped table)"),
        "tools": Key("str", None, help="comma-separated tool filter"),
    },
}
for _schema in SCHEMAS.values():
    _schema.update(_COMMON)

COMMANDS = tuple(SCHEMAS)
TRAINING_COMMANDS = ("train-lm", "train-embed", "train-tagger")


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any] = field(default_factory=dict)
    explicit: set[str] = field(default_factory=set)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default=None) -> Any:
        v = self.values.get(key)
        return default if v is None else v

    def snapshot(self) -> dict[str, Any]:
        """JSON-ready view: paths and enums become strings."""
        def plain(v):
            if isinstance(v, Path):
                return str(v)
            if isinstance(v, (EntityType, MatchMode)):
                return v.value
            if isinstance(v, list):
                return [plain(x) for x in v]
            return v
        return {k: plain(v) for k, v in sorted(self.values.items())}


def read_config_file(path: str | Path) -> dict[str, dict[str, str]]:
    """``{section: {key: raw value}}``; sections must name commands, keys their settings."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, default_section="\0none")
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist") from None
    except (configparser.Error, UnicodeDecodeError) as err:
        raise ConfigError(f"{path}: {err}") from None
    out = {}
    for section in parser.sections():
        if section not in SCHEMAS:
            raise ConfigError(f"{path}: unknown section [{section}] (commands: {', '.join(COMMANDS)})")
        schema = SCHEMAS[section]
        for key in parser[section]:
            if key.replace("-", "_") not in schema:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
        out[section] = {k.replace("-", "_"): v for k, v in parser[section].items()}
    return out


def load_config(path: Optional[str | Path], cli_overrides: Optional[Mapping[str, Any]] = None,
                command: str = "train-tagger") -> RunConfig:
    """Defaults, then the command's section of ``path``, then ``cli_overrides``."""
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = SCHEMAS[command]
    values: dict[str, Any] = {k: key.default for k, key in schema.items()}
    explicit: set[str] = set()
    if path is not None:
        section = read_config_file(path).get(command, {})
        base = Path(path).resolve().parent
        for k, raw in section.items():
            values[k] = coerce(k, schema[k], raw, base)
            explicit.add(k)
    for k, raw in (cli_overrides or {}).items():
        name = k.replace("-", "_")
        if name not in schema:
            raise ConfigError(f"unknown key {k!r} for {command}")
        if raw is not None:
            values[name] = coerce(name, schema[name], raw, Path.cwd())
            explicit.add(name)
    for k, key in schema.items():
        if values[k] is REQUIRED:
            raise ConfigError(f"missing required setting {k!r} for {command}")
        if key.kind == "path" and isinstance(values[k], Path):
            values[k] = values[k].resolve()
    return RunConfig(command, values, explicit)


def build(cls: Callable, cfg: RunConfig, **extra):
    """Instantiate a config dataclass from the matching keys of ``cfg``."""
    names = {f.name for f in fields(cls)}
    kwargs = {k: v for k, v in cfg.values.items() if k in names}
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except ValueError as err:
        raise ConfigError(str(err)) from None
