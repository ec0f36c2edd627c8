from pathlib import Path

import pytest

from seqtag.cli import SCHEMAS, ConfigError, load_config
from seqtag.cli.config import build
from seqtag.corpus import EntityType
from seqtag.tagger import TrainConfig

BASE = {"corpora": "a.jsonl", "entity_type": "Gene", "seed": "1"}


def write(tmp_path, text):
    p = tmp_path / "run.ini"
    p.write_text(text, encoding="utf-8")
    return p


def test_defaults_match_training_config():
    cfg = build(TrainConfig, load_config(None, BASE))
    assert (cfg.epochs, cfg.batch_size, cfg.lr, cfg.dropout, cfg.patience, cfg.hidden_size) == (200, 32, 0.1, 0.5, 3, 256)
    assert cfg.seed == 1


def test_precedence_defaults_file_cli(tmp_path):
    ini = write(tmp_path, "[train-tagger]\nlr = 0.05\nepochs = 7\n")
    assert load_config(ini, BASE)["lr"] == 0.05
    cfg = load_config(ini, {**BASE, "lr": "0.2"})
    assert cfg["lr"] == 0.2 and cfg["epochs"] == 7
    assert {"lr", "epochs", "seed"} <= cfg.explicit and "batch_size" not in cfg.explicit


def test_unknown_key_names_the_key(tmp_path):
    ini = write(tmp_path, "[train-tagger]\nlearning_rte = 0.1\n")
    with pytest.raises(ConfigError, match="learning_rte"):
        load_config(ini, BASE)
    with pytest.raises(ConfigError, match="learning_rte"):
        load_config(None, {**BASE, "learning_rte": "0.1"})


def test_unknown_section(tmp_path):
    with pytest.raises(ConfigError, match=r"\[trian\]"):
        load_config(write(tmp_path, "[trian]\nlr = 1\n"), BASE)


def test_type_mismatch():
    with pytest.raises(ConfigError, match="epochs"):
        load_config(None, {**BASE, "epochs": "many"})
    with pytest.raises(ConfigError, match="entity_type"):
        load_config(None, {**BASE, "entity_type": "Protein-ish"})
    with pytest.raises(ConfigError, match="mask_invalid_transitions"):
        load_config(None, {**BASE, "mask_invalid_transitions": "perhaps"})


def test_required_settings():
    with pytest.raises(ConfigError, match="seed"):
        load_config(None, {"corpora": "a.jsonl", "entity_type": "Gene"})
    with pytest.raises(ConfigError, match="input"):
        load_config(None, {"from": "pubtator"}, "convert")


def test_paths_resolve_against_config_file(tmp_path):
    sub = tmp_path / "cfg"
    sub.mkdir()
    ini = write(sub, "[train-tagger]\ncorpora = ../data/a.jsonl, b.jsonl\nentity_type = disease\nseed = 3\n")
    cfg = load_config(ini, {})
    assert cfg["corpora"] == [(tmp_path / "data" / "a.jsonl").resolve(), (sub / "b.jsonl").resolve()]
    assert cfg["entity_type"] is EntityType.Disease
    assert cfg["out"] == Path(".").resolve()


def test_dashed_keys_are_accepted(tmp_path):
    ini = write(tmp_path, "[train-tagger]\nbatch-size = 8\n")
    assert load_config(ini, BASE)["batch_size"] == 8


def test_every_command_has_a_schema():
    assert set(SCHEMAS) == {"convert", "stats", "train-lm", "train-embed", "train-tagger", "predict",
                            "evaluate", "compare"}
    assert all("out" in s and "workers" in s for s in SCHEMAS.values())


def test_snapshot_is_plain():
    snap = load_config(None, BASE).snapshot()
    assert snap["entity_type"] == "Gene" and isinstance(snap["corpora"][0], str)
