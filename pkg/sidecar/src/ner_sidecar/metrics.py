"""Entity-level evaluation: exact-span, exact-label matching over decoded
BIO tags, plus plain token accuracy."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


def decode_spans(tags: list[str]) -> list[tuple[int, int, str]]:
    """(start_token, end_token_exclusive, label) triples from a tag run.

    An I-tag without a compatible predecessor opens a new span, so noisy
    model output still decodes without raising.
    """
    spans: list[tuple[int, int, str]] = []
    start = None
    label = None
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if start is not None:
                spans.append((start, i, label))
            start, label = i, tag[2:]
        elif tag.startswith("I-") and start is not None and tag[2:] == label:
            continue
        elif tag.startswith("I-"):
            if start is not None:
                spans.append((start, i, label))
            start, label = i, tag[2:]
        else:
            if start is not None:
                spans.append((start, i, label))
            start, label = None, None
    if start is not None:
        spans.append((start, len(tags), label))
    return spans


@dataclass(frozen=True)
class FoldMetrics:
    fold: str
    precision: float
    recall: float
    f1: float
    accuracy: float


@dataclass(frozen=True)
class MetricsTable:
    folds: tuple[FoldMetrics, ...]

    @property
    def mean(self) -> FoldMetrics:
        n = len(self.folds)
        return FoldMetrics(
            fold="mean",
            precision=sum(f.precision for f in self.folds) / n,
            recall=sum(f.recall for f in self.folds) / n,
            f1=sum(f.f1 for f in self.folds) / n,
            accuracy=sum(f.accuracy for f in self.folds) / n,
        )

    @property
    def rows(self) -> list[FoldMetrics]:
        return list(self.folds) + [self.mean]


def score_fold(fold: str, gold: list[list[str]],
               predicted: list[list[str]]) -> FoldMetrics:
    """Score one fold from parallel per-sentence tag runs."""
    assert len(gold) == len(predicted)
    tp = fp = fn = correct = total = 0
    for gold_tags, pred_tags in zip(gold, predicted):
        assert len(gold_tags) == len(pred_tags)
        total += len(gold_tags)
        correct += sum(g == p for g, p in zip(gold_tags, pred_tags))
        gold_spans = set(decode_spans(gold_tags))
        pred_spans = set(decode_spans(pred_tags))
        tp += len(gold_spans & pred_spans)
        fp += len(pred_spans - gold_spans)
        fn += len(gold_spans - pred_spans)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = correct / total if total else 0.0
    return FoldMetrics(fold=fold, precision=precision, recall=recall,
                       f1=f1, accuracy=accuracy)


def write_metrics_csv(table: MetricsTable, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "precision", "recall", "f1", "accuracy"])
        for row in table.rows:
            writer.writerow([row.fold, f"{row.precision:.6f}",
                             f"{row.recall:.6f}", f"{row.f1:.6f}",
                             f"{row.accuracy:.6f}"])
    return path
