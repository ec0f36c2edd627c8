"""Drive the command-line tool end to end on the overfit corpus."""

import json
from pathlib import Path

from conftest import OVERFIT_SKIPGRAM, OVERFIT_TAGGER
from seqtag.cli import main
from seqtag.corpus import write_jsonl
from seqtag.corpus.synthetic import overfit_corpus


def sh(*argv) -> int:
    return main([str(a) for a in argv])


def overfit_pipeline(root: Path, seed: int = 0, epochs: int = 40) -> dict:
    root.mkdir(parents=True, exist_ok=True)
    corpus = root / "overfit.jsonl"
    with open(corpus, "w", encoding="utf-8") as fh:
        write_jsonl(overfit_corpus().documents, fh)
    sg = OVERFIT_SKIPGRAM
    assert sh("train-embed", "--corpus", corpus, "--out", root / "embed", "--seed", seed, "--dim", sg.dim,
              "--epochs", sg.epochs, "--min-count", sg.min_count, "--window", sg.window,
              "--negatives", sg.negatives, "--lr", sg.lr) == 0
    tagger_flags = []
    for k, v in OVERFIT_TAGGER.items():
        tagger_flags += ["--" + k.replace("_", "-"), v]
    assert sh("train-tagger", "--corpora", corpus, "--dev-corpora", corpus, "--entity-type", "Gene",
              "--skipgram", root / "embed" / "skipgram.model", "--epochs", epochs, "--seed", seed,
              "--out", root / "tagger", *tagger_flags) == 0
    assert sh("predict", "--model", root / "tagger" / "tagger.model", "--input", corpus,
              "--entity-type", "Gene", "--out", root / "predict", "--workers", 2) == 0
    assert sh("evaluate", "--gold", corpus, "--predictions", root / "predict" / "predictions.jsonl",
              "--entity-type", "Gene", "--mode", "exact", "--out", root / "eval") == 0
    row = (root / "eval" / "report.csv").read_text(encoding="utf-8").splitlines()[1].split(",")
    return {"corpus": corpus, "model": root / "tagger" / "tagger.model", "f1": float(row[-1]),
            "manifest": json.loads((root / "tagger" / "manifest.json").read_text(encoding="utf-8"))}
