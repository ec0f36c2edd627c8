"""One handler per subcommand; outputs are registered on the shared Context."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import replace
from multiprocessing.pool import ThreadPool
from pathlib import Path
from typing import Callable

from ..corpus import (
    Corpus,
    Document,
    Split,
    build_splits,
    corpora_for_type,
    corpus_stats,
    group_sentences,
    load_jsonl_corpus,
    load_type_aliases,
    parse_conll,
    parse_pubtator,
    read_jsonl,
    split_sentences,
    tokenize,
    write_jsonl,
)
from ..embeddings import (
    CharLmConfig,
    CharLmModel,
    CharVocab,
    EmbeddingStack,
    FlairEmbeddings,
    SkipgramConfig,
    SkipgramEmbeddings,
    SkipgramModel,
    WordVectorEmbeddings,
    load_word2vec_file,
    train_char_lm,
    train_skipgram,
)
from ..eval import (
    ReferenceScores,
    compare_to_reference,
    comparison_table,
    evaluate_corpus,
    read_predictions,
    read_results_csv,
    realign_spans,
    results_table,
    write_comparison_csv,
    write_predictions,
    write_results_csv,
)
from ..tagger import TaggerModel, TrainConfig, train_tagger
from .config import ConfigError, RunConfig, build
from .manifest import atomic_write_text

log = logging.getLogger(__name__)


class Context:
    """Output bookkeeping shared by the handlers."""

    def __init__(self, cfg: RunConfig, inputs: set[Path]):
        self.cfg = cfg
        self.out: Path = cfg["out"]
        self.inputs = inputs
        self.written: list[Path] = []

    def target(self, name: str) -> Path:
        path = (self.out / name).resolve()
        if path in self.inputs:
            raise ConfigError(f"output {path} would overwrite an input")
        self.out.mkdir(parents=True, exist_ok=True)
        self.written.append(path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.target(name)
        atomic_write_text(path, text)
        return path


def _read_lines(path: Path) -> list[str]:
    """Plain-text lines, or each line of every document text for ``.jsonl`` input."""
    with open(path, encoding="utf-8") as fh:
        if path.suffix == ".jsonl":
            return [l for d in read_jsonl(fh) for l in d.text.split("\n") if l.strip()]
        return [l.rstrip("\n") for l in fh if l.strip()]


def _read_splits_table(path: Path) -> dict[str, Split]:
    table = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'document id<TAB>split'")
            table[parts[0]] = Split(parts[1].strip().lower())
    return table


def cmd_convert(ctx: Context) -> None:
    cfg = ctx.cfg
    aliases = None
    if cfg.get("aliases"):
        with open(cfg["aliases"], encoding="utf-8") as fh:
            aliases = load_type_aliases(fh)
    src: Path = cfg["input"]
    with open(src, encoding="utf-8") as fh:
        if cfg["from"] == "pubtator":
            docs = parse_pubtator(fh, aliases)
        elif cfg["from"] == "conll":
            docs = parse_conll(fh, cfg["scheme"], aliases)
        else:
            docs = read_jsonl(fh)
    table = _read_splits_table(cfg["splits"]) if cfg.get("splits") else {}
    default = Split(cfg["split"])
    docs = [replace(d, split=table.get(d.id, d.split if d.split is not Split.Unassigned else default))
            for d in docs]
    buf = io.StringIO()
    write_jsonl(docs, buf)
    ctx.write_text(f"{cfg.get('name') or src.stem}.jsonl", buf.getvalue())
    log.info("converted %d documents from %s", len(docs), src)


def cmd_stats(ctx: Context) -> None:
    blocks = []
    total = None
    for path in ctx.cfg["corpora"]:
        corpus = load_jsonl_corpus(path)
        st = corpus_stats(corpus)
        total = st if total is None else total + st
        blocks.append(st.render(corpus.name))
    if len(blocks) > 1:
        blocks.append(total.render("total"))
    text = "\n\n".join(blocks) + "\n"
    print(text, end="")
    ctx.write_text("stats.txt", text)


def cmd_train_lm(ctx: Context) -> None:
    cfg = ctx.cfg
    names = set(CharLmConfig.__dataclass_fields__)
    overrides = {k: cfg[k] for k in cfg.explicit if k in names}
    overrides["seed"] = cfg["seed"]
    try:
        lm_cfg = CharLmConfig.preset(cfg["preset"], **overrides)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    lines = _read_lines(cfg["corpus"])
    vocab = CharVocab.build(lines, lm_cfg.min_char_freq)
    directions = ("forward", "backward") if cfg["direction"] == "both" else (cfg["direction"],)
    for direction in directions:
        model = train_char_lm(lines, direction, lm_cfg, vocab)
        model.save(ctx.target(f"charlm-{direction}.model"))
        log.info("%s LM final validation loss %.4f", direction, model.history[-1])


def _sentences_of(lines: list[str]) -> list[list[str]]:
    out = []
    for line in lines:
        for sent in group_sentences(tokenize(line, split_sentences(line))):
            out.append([t.text for t in sent])
    return out


def cmd_train_embed(ctx: Context) -> None:
    sg_cfg = build(SkipgramConfig, ctx.cfg)
    model = train_skipgram(_sentences_of(_read_lines(ctx.cfg["corpus"])), sg_cfg)
    model.save(ctx.target("skipgram.model"))


def _embedding_stack(cfg: RunConfig):
    providers = []
    fwd, bwd = cfg.get("flair_forward"), cfg.get("flair_backward")
    if (fwd is None) != (bwd is None):
        raise ConfigError("flair_forward and flair_backward must be given together")
    if fwd is not None:
        providers.append(FlairEmbeddings(CharLmModel.load(fwd), CharLmModel.load(bwd)))
    if cfg.get("skipgram") is not None:
        providers.append(SkipgramEmbeddings(SkipgramModel.load(cfg["skipgram"])))
    if cfg.get("word2vec") is not None:
        providers.append(WordVectorEmbeddings(load_word2vec_file(cfg["word2vec"])))
    if not providers:
        if cfg.get("init_model") is None:
            raise ConfigError("train-tagger needs at least one embedding source or --init-model")
        return None
    return EmbeddingStack(providers)


def _training_log(history: list[dict]) -> str:
    buf = io.StringIO()
    fields = ["epoch", "train_loss", "dev_f1", "dev_loss", "lr", "improved"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for rec in history:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()


def cmd_train_tagger(ctx: Context) -> None:
    cfg = ctx.cfg
    etype = cfg["entity_type"]
    corpora = corpora_for_type([load_jsonl_corpus(p) for p in cfg["corpora"]], etype)
    if not corpora:
        raise ValueError(f"none of the training corpora annotate {etype.value}")
    if cfg.get("dev_corpora"):
        train = [d for c in corpora for d in c]
        dev = [d for p in cfg["dev_corpora"] for d in load_jsonl_corpus(p)]
    else:
        train, dev = build_splits(corpora)
        if not dev:
            raise ValueError("no dev-split documents; set dev_corpora")
    init = cfg.get("init_model")
    tcfg = build(TrainConfig, cfg, init_checkpoint=str(init) if init else None)
    model = train_tagger(train, dev, etype, tcfg, _embedding_stack(cfg))
    model.save(ctx.target("tagger.model"))
    ctx.write_text("training_log.csv", _training_log(model.meta["history"]))
    print(f"best dev F1 {model.meta['best_dev_f1']:.4f} at epoch {model.meta['best_epoch']}")


def _load_documents(path: Path) -> list[Document]:
    with open(path, encoding="utf-8") as fh:
        if path.suffix == ".jsonl":
            return read_jsonl(fh)
        return [Document(f"{path.stem}:{i}", line.rstrip("\n"))
                for i, line in enumerate(fh, 1) if line.strip()]


def _parallel_map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPool(min(workers, len(items))) as pool:
        return pool.map(fn, items)


def cmd_predict(ctx: Context) -> None:
    cfg = ctx.cfg
    model = TaggerModel.load(cfg["model"])
    if model.etype != cfg["entity_type"]:
        raise ConfigError(f"model tags {model.etype.value}, not {cfg['entity_type'].value}")
    docs = _load_documents(cfg["input"])
    spans = _parallel_map(model.predict_document, docs, cfg["workers"])
    buf = io.StringIO()
    write_predictions({d.id: s for d, s in zip(docs, spans)}, buf)
    ctx.write_text("predictions.jsonl", buf.getvalue())
    log.info("tagged %d documents, %d mentions", len(docs), sum(map(len, spans)))


def cmd_evaluate(ctx: Context) -> None:
    cfg = ctx.cfg
    etype, mode = cfg["entity_type"], cfg["mode"]
    corpora = [load_jsonl_corpus(p) for p in cfg["gold"]]
    with open(cfg["predictions"], encoding="utf-8") as fh:
        preds = read_predictions(fh)
    known = {d.id for c in corpora for d in c}
    unknown = sorted(set(preds) - known)
    if unknown:
        raise ValueError(f"predictions for unknown document ids: {unknown[:5]}")
    preds = {k: [s for s in v if s.etype == etype] for k, v in preds.items()}

    def run(corpus: Corpus):
        sub = {}
        moved = 0
        for d in corpus:
            if d.id in preds:
                spans = preds[d.id]
                if cfg["realign"]:
                    spans, n = realign_spans(d.text, spans)
                    moved += n
                sub[d.id] = spans
        if moved:
            log.info("%s: re-aligned %d predicted spans", corpus.name, moved)
        return evaluate_corpus(corpus, sub, mode, entity_types=[etype])[etype]

    results = _parallel_map(run, corpora, cfg["workers"])
    table = results_table(results) + "\n"
    print(table, end="")
    ctx.write_text("report.txt", table)
    buf = io.StringIO()
    write_results_csv(results, buf)
    ctx.write_text("report.csv", buf.getvalue())


def cmd_compare(ctx: Context) -> None:
    cfg = ctx.cfg
    results = []
    for path in cfg["results"]:
        with open(path, encoding="utf-8", newline="") as fh:
            results.extend(read_results_csv(fh))
    reference = ReferenceScores.load(cfg.get("reference"))
    tools = [t.strip() for t in cfg["tools"].split(",") if t.strip()] if cfg.get("tools") else None
    rows = compare_to_reference(results, reference, tools)
    table = comparison_table(rows) + "\n"
    print(table, end="")
    ctx.write_text("comparison.txt", table)
    buf = io.StringIO()
    write_comparison_csv(rows, buf)
    ctx.write_text("comparison.csv", buf.getvalue())


HANDLERS: dict[str, Callable[[Context], None]] = {
    "convert": cmd_convert,
    "stats": cmd_stats,
    "train-lm": cmd_train_lm,
    "train-embed": cmd_train_embed,
    "train-tagger": cmd_train_tagger,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}
