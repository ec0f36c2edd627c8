"""Prediction files, result tables, and comparison with published scores."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Optional, Sequence

from ..corpus.document import EntitySpan, EntityType
from ..corpus.formats import FormatError, spans_from_json
from .matching import EvalResult, MatchMode

RESULT_FIELDS = ["corpus", "entity_type", "mode", "tp", "fp", "fn", "precision", "recall", "f1"]


def write_predictions(predictions: Mapping[str, Sequence[EntitySpan]], stream: IO[str]) -> None:
    for doc_id, spans in predictions.items():
        obj = {"id": doc_id, "annotations": [
            {"start": s.start, "end": s.end, "type": s.etype.value, "text": s.surface} for s in spans]}
        stream.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_predictions(stream: Iterable[str]) -> dict[str, list[EntitySpan]]:
    out: dict[str, list[EntitySpan]] = {}
    for lineno, raw in enumerate(stream, 1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            doc_id = obj["id"]
        except (json.JSONDecodeError, KeyError) as err:
            raise FormatError(f"invalid prediction record: {err}", lineno) from None
        if doc_id in out:
            raise FormatError(f"duplicate predictions for document {doc_id!r}", lineno)
        out[doc_id] = spans_from_json(None, obj.get("annotations", []), lineno)
    return out


def results_table(results: Iterable[EvalResult]) -> str:
    rows = [[r.corpus, r.etype.value, r.mode.value, str(r.tp), str(r.fp), str(r.fn),
             f"{100 * r.precision:.2f}", f"{100 * r.recall:.2f}", f"{100 * r.f1:.2f}"] for r in results]
    header = ["corpus", "type", "mode", "tp", "fp", "fn", "P", "R", "F1"]
    return _align([header] + rows, numeric_from=3)


def write_results_csv(results: Iterable[EvalResult], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for r in results:
        w.writerow([r.corpus, r.etype.value, r.mode.value, r.tp, r.fp, r.fn,
                    f"{r.precision:.6f}", f"{r.recall:.6f}", f"{r.f1:.6f}"])


def read_results_csv(stream: IO[str]) -> list[EvalResult]:
    out = []
    for row in csv.DictReader(stream):
        out.append(EvalResult(row["corpus"], EntityType.parse(row["entity_type"]),
                              MatchMode.parse(row["mode"]), int(row["tp"]), int(row["fp"]), int(row["fn"])))
    return out


class ReferenceScores(dict):
    """``(tool, corpus, entity type) -> published F1`` in percent."""

    @classmethod
    def from_csv(cls, stream: IO[str]) -> "ReferenceScores":
        ref = cls()
        reader = csv.DictReader(stream)
        missing = {"tool", "corpus", "entity_type", "f1"} - set(reader.fieldnames or ())
        if missing:
            raise FormatError(f"reference CSV lacks columns {sorted(missing)}", 1)
        for lineno, row in enumerate(reader, 2):
            try:
                f1 = float(row["f1"])
                etype = EntityType.parse(row["entity_type"])
            except ValueError as err:
                raise FormatError(str(err), lineno) from None
            if not 0.0 <= f1 <= 100.0:
                raise FormatError(f"F1 {f1} outside [0, 100]", lineno)
            ref[(row["tool"], row["corpus"], etype)] = f1
        return ref

    @classmethod
    def load(cls, path: Optional[str | Path] = None) -> "ReferenceScores":
        if path is None:
            text = resources.files("seqtag.eval").joinpath("data/reference_scores.csv").read_text("utf-8")
            return cls.from_csv(io.StringIO(text))
        with open(path, encoding="utf-8") as fh:
            return cls.from_csv(fh)


@dataclass
class ComparisonRow:
    tool: str
    corpus: str
    etype: EntityType
    published: Optional[float]
    measured: Optional[float]

    @property
    def delta(self) -> Optional[float]:
        if self.published is None or self.measured is None:
            return None
        return self.measured - self.published


def compare_to_reference(results: Iterable[EvalResult], reference: ReferenceScores,
                         tools: Optional[Sequence[str]] = None) -> list[ComparisonRow]:
    """Pair every reference entry with the measured F1 (percent) for its corpus and type.

    Measured results without any reference entry get rows with a blank
    published cell under tool ``measured``.
    """
    measured = {(r.corpus, r.etype): 100.0 * r.f1 for r in results}
    rows = []
    seen = set()
    for (tool, corpus, etype), f1 in reference.items():
        if tools is not None and tool not in tools:
            continue
        rows.append(ComparisonRow(tool, corpus, etype, f1, measured.get((corpus, etype))))
        seen.add((corpus, etype))
    for (corpus, etype), f1 in measured.items():
        if (corpus, etype) not in seen:
            rows.append(ComparisonRow("measured", corpus, etype, None, f1))
    return rows


def _fmt(x: Optional[float], signed: bool = False) -> str:
    if x is None:
        return ""
    return f"{x:+.2f}" if signed else f"{x:.2f}"


def comparison_table(rows: Iterable[ComparisonRow]) -> str:
    table = [["tool", "corpus", "type", "published", "measured", "delta"]]
    for r in rows:
        table.append([r.tool, r.corpus, r.etype.value, _fmt(r.published), _fmt(r.measured),
                      _fmt(r.delta, signed=True)])
    return _align(table, numeric_from=3)


def write_comparison_csv(rows: Iterable[ComparisonRow], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["tool", "corpus", "entity_type", "published_f1", "measured_f1", "delta"])
    for r in rows:
        w.writerow([r.tool, r.corpus, r.etype.value, _fmt(r.published), _fmt(r.measured), _fmt(r.delta, True)])


def _align(rows: list[list[str]], numeric_from: int) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [c.rjust(w) if i >= numeric_from else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
