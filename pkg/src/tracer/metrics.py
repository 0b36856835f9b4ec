"""Scoring and ablation harness.

Three-way confusion matrix, per-class precision/recall/F1, accuracy,
macro-F1, and the dedicated Half-True F1 the half-truth task is judged
on. The ablation runner executes the pipeline under each stage gating
and reports metrics together with per-template call counts, so the
effect of switching a stage off is visible both in scores and in the
calls the stage no longer makes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import ABLATION_CONFIGS, AblationConfig, Thresholds
from .corpus import LABELS, ClaimRecord, Label
from .errors import EmptyInput, LengthMismatch
from .gateway import Gateway
from .verdict import VerdictReport, run_pipeline

_INDEX = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed (gold, predicted) in the fixed label order."""

    counts: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return int(np.sum(self.array))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def cell(self, gold: Label, pred: Label) -> int:
        return self.counts[_INDEX[gold]][_INDEX[pred]]


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict
    macro_f1: float
    f1_half_true: float
    n: int

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": {
                label.value: dict(values) for label, values in self.per_class.items()
            },
            "macro_f1": self.macro_f1,
            "f1_half_true": self.f1_half_true,
            "n": self.n,
        }


def confusion_matrix(gold: Sequence[Label], pred: Sequence[Label]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise LengthMismatch(len(gold), len(pred))
    if not gold:
        raise EmptyInput("cannot score zero claims")
    counts = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[_INDEX[g], _INDEX[p]] += 1
    return ConfusionMatrix(counts=tuple(tuple(int(x) for x in row) for row in counts))


def per_class_prf(matrix: ConfusionMatrix, label: Label) -> tuple[float, float, float]:
    """Precision, recall, F1 for one class; zero denominators score 0."""
    counts = matrix.array
    i = _INDEX[label]
    tp = counts[i, i]
    fp = counts[:, i].sum() - tp
    fn = counts[i, :].sum() - tp
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return float(precision), float(recall), float(f1)


def summarize(matrix: ConfusionMatrix) -> MetricsReport:
    counts = matrix.array
    per_class = {}
    for label in LABELS:
        precision, recall, f1 = per_class_prf(matrix, label)
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1}
    # macro-F1 averages the full three-label universe even when a label
    # never occurs, so scores stay comparable across corpora
    macro_f1 = sum(per_class[label]["f1"] for label in LABELS) / len(LABELS)
    return MetricsReport(
        accuracy=float(np.trace(counts) / counts.sum()),
        per_class=per_class,
        macro_f1=macro_f1,
        f1_half_true=per_class[Label.HALF_TRUE]["f1"],
        n=int(counts.sum()),
    )


def score_labels(gold: Sequence[Label], pred: Sequence[Label]) -> MetricsReport:
    return summarize(confusion_matrix(gold, pred))


def format_table(report: MetricsReport) -> str:
    """Aligned plain-text rendering of a MetricsReport."""
    width = max(len(label.value) for label in LABELS)
    lines = [f"{'label':<{width}}  precision  recall  f1"]
    for label in LABELS:
        row = report.per_class[label]
        lines.append(
            f"{label.value:<{width}}  "
            f"{row['precision']:>9.3f}  {row['recall']:>6.3f}  {row['f1']:.3f}"
        )
    lines.append("")
    lines.append(f"accuracy      {report.accuracy:.3f}")
    lines.append(f"macro_f1      {report.macro_f1:.3f}")
    lines.append(f"f1_half_true  {report.f1_half_true:.3f}")
    lines.append(f"n             {report.n}")
    return "\n".join(lines)


@dataclass
class AblationResult:
    config: AblationConfig
    reports: list[VerdictReport]
    metrics: MetricsReport | None
    call_counts: dict  # per-template backend completion calls


def run_ablation(
    records: Sequence[ClaimRecord],
    configs: Sequence[AblationConfig] | None = None,
    gateway_factory: Callable[[], Gateway] | None = None,
    thresholds: Thresholds = Thresholds(),
    reassess_true_only: bool = False,
) -> dict[str, AblationResult]:
    """Run the pipeline once per ablation configuration.

    Each configuration gets a fresh gateway (and therefore fresh call
    counters and cache) from the factory, so per-template call counts
    attribute cleanly to that configuration's gating.
    """
    if gateway_factory is None:
        raise ValueError("run_ablation needs a gateway factory")
    if configs is None:
        configs = [ABLATION_CONFIGS[name] for name in sorted(ABLATION_CONFIGS)]
    results: dict[str, AblationResult] = {}
    for config in configs:
        gateway = gateway_factory()
        reports = [
            run_pipeline(
                gateway,
                record,
                thresholds=thresholds,
                ablation=config,
                reassess_true_only=reassess_true_only,
            )
            for record in records
        ]
        scored = [
            (record.gold_label, report.final_verdict.label)
            for record, report in zip(records, reports)
            if record.gold_label is not None
        ]
        metrics = None
        if scored:
            metrics = score_labels([g for g, _ in scored], [p for _, p in scored])
        results[config.name] = AblationResult(
            config=config,
            reports=reports,
            metrics=metrics,
            call_counts=dict(sorted(gateway.counters.by_template.items())),
        )
    return results


__all__ = [
    "AblationResult",
    "ConfusionMatrix",
    "MetricsReport",
    "confusion_matrix",
    "format_table",
    "per_class_prf",
    "run_ablation",
    "score_labels",
    "summarize",
]
