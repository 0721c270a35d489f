"""One-vs-rest linear SVMs trained by dual coordinate descent.

Per class c the trainer minimizes

    0.5 * (||w||^2 + b^2) + C * sum_i max(0, 1 - y_i * (w.x_i + b))

with y_i = +1 when c is among the passage's labels, else -1. The bias is an
appended always-1 feature, so it is regularized and the dual is a plain box
problem 0 <= alpha <= C solved coordinate-wise. Convergence is declared when
the largest dual-variable change in an epoch drops below 1e-4 / max(1, C)
(or after 10000 epochs); the C scaling keeps the primal objective within a
fixed absolute gap of the optimum across the whole C range. Point order is a
fresh seeded permutation each epoch, so training is deterministic given the
seed.

A class whose training labels are all-positive or all-negative gets a
constant-score classifier (w = 0, b = +-1) and a logged warning instead of
an error, so tiny uploads never abort an analysis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .tfidf import SparseVector

logger = logging.getLogger(__name__)

WEIGHTS_FORMAT = "svm-weights/1"

DUAL_TOL = 1e-4
MAX_EPOCHS = 10000


class SvmError(ValueError):
    pass


@dataclass
class OvrSvmEnsemble:
    class_ids: tuple[int, ...]
    weights: np.ndarray  # (n_classes, n_features)
    bias: np.ndarray  # (n_classes,)
    C: float

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[1])

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)) or not np.all(np.isfinite(self.bias)):
            raise SvmError("ensemble weights must be finite")


def train_ovr_svm(
    X: Sequence[SparseVector],
    Y: Sequence[set[int]],
    C: float,
    class_ids: Sequence[int] | None = None,
    n_features: int | None = None,
    seed: int = 0,
    tol: float = DUAL_TOL,
    max_epochs: int = MAX_EPOCHS,
) -> OvrSvmEnsemble:
    if len(X) != len(Y):
        raise SvmError(f"|X| = {len(X)} but |Y| = {len(Y)}")
    if len(X) < 2:
        raise SvmError("need at least 2 training points")
    if not 0.1 <= C <= 10:
        raise SvmError(f"C must be in [0.1, 10], got {C}")
    if class_ids is None:
        class_ids = sorted({c for labels in Y for c in labels})
    class_ids = tuple(class_ids)
    if not class_ids:
        raise SvmError("no classes to train")
    n = len(X)
    if n_features is None:
        n_features = max((int(v.indices[-1]) + 1 for v in X if v.nnz), default=0)

    bias_col = n_features
    rows_idx = []
    rows_val = []
    q_diag = np.empty(n)
    for i, vec in enumerate(X):
        idx = np.concatenate([vec.indices.astype(np.int64), [bias_col]])
        val = np.concatenate([vec.values, [1.0]])
        rows_idx.append(idx)
        rows_val.append(val)
        q_diag[i] = float(val @ val)

    k = len(class_ids)
    y = np.full((n, k), -1.0)
    for i, labels in enumerate(Y):
        for j, c in enumerate(class_ids):
            if c in labels:
                y[i, j] = 1.0

    w_tilde = np.zeros((n_features + 1, k))
    pos_counts = (y > 0).sum(axis=0)
    degenerate = (pos_counts == 0) | (pos_counts == n)
    for j in np.flatnonzero(degenerate):
        sign = 1.0 if pos_counts[j] == n else -1.0
        w_tilde[bias_col, j] = sign
        logger.warning(
            "class %s has single-sign training labels; using constant classifier (score %+g)",
            class_ids[j],
            sign,
        )

    active = ~degenerate
    if active.any():
        tol = tol / max(1.0, C)  # keep the primal gap flat across the C range
        alpha = np.zeros((n, k))
        rng = np.random.default_rng(seed)
        for _ in range(max_epochs):
            perm = rng.permutation(n)
            max_delta = np.zeros(k)
            for i in perm:
                idx = rows_idx[i]
                val = rows_val[i]
                scores = val @ w_tilde[idx]  # (k,)
                grad = y[i] * scores - 1.0
                new_alpha = np.clip(alpha[i] - grad / q_diag[i], 0.0, C)
                delta = np.where(active, new_alpha - alpha[i], 0.0)
                if np.any(delta):
                    alpha[i] += delta
                    w_tilde[idx] += val[:, None] * (delta * y[i])[None, :]
                np.maximum(max_delta, np.abs(delta), out=max_delta)
            active &= max_delta >= tol
            if not active.any():
                break

    return OvrSvmEnsemble(
        class_ids=class_ids,
        weights=np.ascontiguousarray(w_tilde[:n_features].T),
        bias=w_tilde[bias_col].copy(),
        C=C,
    )


def svm_predict(model: OvrSvmEnsemble, x: SparseVector) -> tuple[dict[int, float], set[int]]:
    """Per-class decision values and the positive-score label set (may be empty)."""
    if x.nnz and int(x.indices[-1]) >= model.n_features:
        raise SvmError(
            f"vector dimension {int(x.indices[-1]) + 1} exceeds model features {model.n_features}"
        )
    if x.nnz:
        raw = model.weights[:, x.indices] @ x.values + model.bias
    else:
        raw = model.bias.copy()
    scores = {c: float(raw[j]) for j, c in enumerate(model.class_ids)}
    labels = {c for c, s in scores.items() if s > 0}
    return scores, labels


def primal_objective(
    weights: np.ndarray, bias: float, C: float, X: Sequence[SparseVector], y_signs: np.ndarray
) -> float:
    """0.5*(||w||^2 + b^2) + C * sum hinge, the quantity the trainer minimizes."""
    reg = 0.5 * (float(weights @ weights) + bias * bias)
    hinge = 0.0
    for vec, y in zip(X, y_signs):
        score = float(weights[vec.indices] @ vec.values) + bias if vec.nnz else bias
        hinge += max(0.0, 1.0 - y * score)
    return reg + C * hinge


def save_svm(model: OvrSvmEnsemble, path: str | Path) -> None:
    """Weight CSV: versioned header, then one ``class_id,bias,w0..`` row per class."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"format={WEIGHTS_FORMAT},C={model.C!r},n_features={model.n_features}\n")
        for j, c in enumerate(model.class_ids):
            row = [str(c), repr(float(model.bias[j]))]
            row.extend(repr(float(v)) for v in model.weights[j])
            fh.write(",".join(row) + "\n")


def load_svm(path: str | Path) -> OvrSvmEnsemble:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        fields = dict(part.split("=", 1) for part in header.split(","))
        if fields.get("format") != WEIGHTS_FORMAT:
            raise SvmError(f"{path}: unsupported weights format {fields.get('format')!r}")
        n_features = int(fields["n_features"])
        C = float(fields["C"])
        class_ids = []
        weight_rows = []
        biases = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2 + n_features:
                raise SvmError(f"{path}: class row has {len(parts) - 2} weights, expected {n_features}")
            class_ids.append(int(parts[0]))
            biases.append(float(parts[1]))
            weight_rows.append([float(v) for v in parts[2:]])
    return OvrSvmEnsemble(
        class_ids=tuple(class_ids),
        weights=np.array(weight_rows, dtype=np.float64).reshape(len(class_ids), n_features),
        bias=np.array(biases, dtype=np.float64),
        C=C,
    )
