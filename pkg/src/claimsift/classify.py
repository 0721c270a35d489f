"""Classification front-ends: the keyword baseline, sigmoid thresholding of
imported score matrices, and the score-matrix CSV interchange format.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .schema import KeywordLexicon, Passage

SCORE_KINDS = ("logit", "decision")
N_SCORE_COLUMNS = 19


class ScoreMatrixError(ValueError):
    pass


def keyword_classify(passage: Passage, lexicon: KeywordLexicon) -> set[int]:
    """Classes with at least one issue-keyword hit in the passage text.

    Uses the same phrase-matching rules as corpus filtering; several classes
    may fire, or none.
    """
    if not passage.text:
        raise ValueError(f"passage {passage.id!r} has empty text")
    return set(lexicon.find_issues(passage.text))


@dataclass(frozen=True)
class ScoreMatrix:
    """Complete passages x 19-classes matrix of raw model outputs."""

    passage_ids: tuple[str, ...]
    scores: np.ndarray  # (n_passages, 19) float64
    score_kind: str  # "logit" or "decision"

    def __post_init__(self):
        if self.score_kind not in SCORE_KINDS:
            raise ScoreMatrixError(f"unknown score kind {self.score_kind!r}")
        if self.scores.shape != (len(self.passage_ids), N_SCORE_COLUMNS):
            raise ScoreMatrixError(
                f"score matrix must be (n, {N_SCORE_COLUMNS}), got {self.scores.shape}"
            )
        if not np.all(np.isfinite(self.scores)):
            raise ScoreMatrixError("score matrix contains non-finite values")


@dataclass(frozen=True)
class PredictionSet:
    labels: dict[str, set[int]]  # passage id -> class ids, possibly empty
    threshold_used: float


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def threshold_predict(scores: ScoreMatrix, threshold: float) -> PredictionSet:
    """Predict class c for a passage iff sigmoid(logit) >= threshold.

    Only logit-kind matrices are accepted; decision values from the SVM are
    signed margins, not probabilities, and belong to svm_predict.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if scores.score_kind != "logit":
        raise ScoreMatrixError(
            "decision-kind score matrix cannot be thresholded; use svm_predict for decision values"
        )
    probs = 1.0 / (1.0 + np.exp(-scores.scores))
    hits = probs >= threshold
    labels = {
        pid: set(np.flatnonzero(hits[i]).tolist()) for i, pid in enumerate(scores.passage_ids)
    }
    return PredictionSet(labels=labels, threshold_used=threshold)


_HEADER = ["passage_id", "kind"] + [f"c{i}" for i in range(N_SCORE_COLUMNS)]


def import_scores(path: str | Path) -> ScoreMatrix:
    """Read a score-matrix CSV (header ``passage_id,kind,c0..c18``)."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ScoreMatrixError(f"{path}: empty score file") from None
        if header != _HEADER:
            raise ScoreMatrixError(
                f"{path}: bad header; expected {','.join(_HEADER)!r}"
            )
        passage_ids: list[str] = []
        rows: list[list[float]] = []
        kinds: set[str] = set()
        seen: set[str] = set()
        for record in reader:
            if not record:
                continue
            pid = record[0]
            if pid in seen:
                raise ScoreMatrixError(f"{path}: duplicate row for passage {pid!r}")
            seen.add(pid)
            if len(record) != len(_HEADER):
                raise ScoreMatrixError(
                    f"{path}: passage {pid!r} has {len(record) - 2} score cells, "
                    f"expected {N_SCORE_COLUMNS}"
                )
            kind = record[1]
            if kind not in SCORE_KINDS:
                raise ScoreMatrixError(f"{path}: passage {pid!r} has unknown kind {kind!r}")
            kinds.add(kind)
            try:
                rows.append([float(v) for v in record[2:]])
            except ValueError as exc:
                raise ScoreMatrixError(f"{path}: passage {pid!r}: {exc}") from exc
            passage_ids.append(pid)
    if not passage_ids:
        raise ScoreMatrixError(f"{path}: no score rows")
    if len(kinds) != 1:
        raise ScoreMatrixError(f"{path}: mixed score kinds {sorted(kinds)}")
    return ScoreMatrix(
        passage_ids=tuple(passage_ids),
        scores=np.array(rows, dtype=np.float64),
        score_kind=kinds.pop(),
    )


def export_scores(matrix: ScoreMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_HEADER)
        for i, pid in enumerate(matrix.passage_ids):
            writer.writerow([pid, matrix.score_kind] + [repr(float(v)) for v in matrix.scores[i]])


def ensemble_scores_to_matrix(
    passage_ids: Sequence[str], per_passage_scores: Sequence[dict[int, float]]
) -> ScoreMatrix:
    """Pack svm_predict outputs into a decision-kind matrix (19 columns, gaps 0)."""
    scores = np.zeros((len(passage_ids), N_SCORE_COLUMNS))
    for i, class_scores in enumerate(per_passage_scores):
        for c, value in class_scores.items():
            scores[i, c] = value
    return ScoreMatrix(passage_ids=tuple(passage_ids), scores=scores, score_kind="decision")
