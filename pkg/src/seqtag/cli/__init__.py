"""Batch command-line front end."""

from .config import COMMANDS, SCHEMAS, ConfigError, RunConfig, load_config
from .main import build_parser, main, run
from .manifest import RunManifest
