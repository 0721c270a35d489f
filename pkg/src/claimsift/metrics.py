"""Multi-label precision/recall/F1 with micro, macro and weighted averages.

Conventions, pinned and tested:
- any 0/0 ratio is defined as 0;
- per-class metrics and the macro/weighted means run over the classes that
  appear in the gold labels or the predictions (a class absent from both
  carries no signal and is outside the report);
- weighted averages use gold support as weights, so they are undefined (an
  error) when the gold set carries no labels at all.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Set


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ClassCounts:
    """Per-class true-positive / false-positive / false-negative tallies."""

    tp: dict[int, int]
    fp: dict[int, int]
    fn: dict[int, int]

    @property
    def class_ids(self) -> list[int]:
        return sorted(self.tp)

    def support(self, class_id: int) -> int:
        return self.tp[class_id] + self.fn[class_id]


@dataclass(frozen=True)
class MetricsReport:
    per_class: dict[int, dict[str, float]]  # precision, recall, f1, support
    micro: dict[str, float]
    macro: dict[str, float]
    weighted: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "per_class": {
                str(cid): dict(vals) for cid, vals in sorted(self.per_class.items())
            },
            "micro": dict(self.micro),
            "macro": dict(self.macro),
            "weighted": dict(self.weighted),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def to_kv_text(self) -> str:
        """Flat ``key=value`` lines, one metric per line."""
        lines = []
        for agg in ("micro", "macro", "weighted"):
            for metric in ("precision", "recall", "f1"):
                lines.append(f"{agg}_{metric}={getattr(self, agg)[metric]:.6f}")
        for cid in sorted(self.per_class):
            vals = self.per_class[cid]
            for metric in ("precision", "recall", "f1"):
                lines.append(f"class_{cid}_{metric}={vals[metric]:.6f}")
            lines.append(f"class_{cid}_support={int(vals['support'])}")
        return "\n".join(lines) + "\n"


def _normalize(pred) -> Mapping[str, Set[int]]:
    # Accept either a plain mapping or a PredictionSet-like object with .labels.
    labels = getattr(pred, "labels", None)
    return labels if labels is not None else pred


def class_counts(pred, gold: Mapping[str, Set[int]]) -> ClassCounts:
    """Tally tp/fp/fn per class over identical passage-id sets."""
    pred_map = _normalize(pred)
    if set(pred_map) != set(gold):
        diff = sorted(set(pred_map) ^ set(gold))
        raise MetricsError(f"prediction/gold passage ids differ: {diff}")
    classes = set()
    for labels in pred_map.values():
        classes.update(labels)
    for labels in gold.values():
        classes.update(labels)
    tp = {c: 0 for c in classes}
    fp = {c: 0 for c in classes}
    fn = {c: 0 for c in classes}
    for pid, gold_labels in gold.items():
        pred_labels = pred_map[pid]
        for c in pred_labels & gold_labels:
            tp[c] += 1
        for c in pred_labels - gold_labels:
            fp[c] += 1
        for c in gold_labels - pred_labels:
            fn[c] += 1
    return ClassCounts(tp=tp, fp=fp, fn=fn)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def report_from_counts(counts: ClassCounts) -> MetricsReport:
    classes = counts.class_ids
    total_support = sum(counts.support(c) for c in classes)
    if total_support == 0:
        raise MetricsError("gold labels are empty; weighted averages are undefined")

    per_class = {}
    for c in classes:
        p, r, f = _prf(counts.tp[c], counts.fp[c], counts.fn[c])
        per_class[c] = {
            "precision": p,
            "recall": r,
            "f1": f,
            "support": float(counts.support(c)),
        }

    micro_tp = sum(counts.tp[c] for c in classes)
    micro_fp = sum(counts.fp[c] for c in classes)
    micro_fn = sum(counts.fn[c] for c in classes)
    mp, mr, mf = _prf(micro_tp, micro_fp, micro_fn)
    micro = {"precision": mp, "recall": mr, "f1": mf}

    k = len(classes)
    macro = {
        metric: sum(per_class[c][metric] for c in classes) / k
        for metric in ("precision", "recall", "f1")
    }
    weighted = {
        metric: sum(per_class[c][metric] * counts.support(c) for c in classes) / total_support
        for metric in ("precision", "recall", "f1")
    }
    return MetricsReport(per_class=per_class, micro=micro, macro=macro, weighted=weighted)


def evaluate(pred, gold: Mapping[str, Set[int]]) -> MetricsReport:
    """Full multi-label report for predictions against gold labels."""
    return report_from_counts(class_counts(pred, gold))
