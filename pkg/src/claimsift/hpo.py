"""Bayesian optimization over mixed configuration spaces.

A bootstrap forest of regression trees acts as the surrogate; candidates are
scored with log expected improvement and the best of a random candidate set
(plus Gaussian perturbations of the incumbent) is suggested. The engine is
maximization-oriented: objectives are "higher is better" (weighted F1 for the
SVM baseline). Failed objective evaluations are recorded at -inf and skipped
when fitting the surrogate, so long runs survive degenerate configurations.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import split_dataset
from .metrics import MetricsReport, evaluate
from .schema import Passage
from .svm import OvrSvmEnsemble, train_ovr_svm, svm_predict
from .tfidf import TfidfModel, fit_tfidf, tfidf_transform

logger = logging.getLogger(__name__)

PARAM_KINDS = ("log_float", "linear_float", "stepped_float", "integer", "categorical")

INITIAL_DESIGN_SIZE = 10
N_RANDOM_CANDIDATES = 1000
N_PERTURBATIONS = 100
PERTURBATION_SIGMA = 0.1
FOREST_TREES = 50
FOREST_LEAF_SIZE = 3
VARIANCE_FLOOR = 1e-8
LOG_EI_ZERO = -1e300


class HpoError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    low: float | None = None
    high: float | None = None
    step: float | None = None
    choices: tuple | None = None

    def __post_init__(self):
        if self.kind not in PARAM_KINDS:
            raise HpoError(f"parameter {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "categorical":
            if not self.choices:
                raise HpoError(f"parameter {self.name!r}: categorical needs choices")
            if len(set(self.choices)) != len(self.choices):
                raise HpoError(f"parameter {self.name!r}: duplicate choices")
        else:
            if self.low is None or self.high is None or not self.low < self.high:
                raise HpoError(f"parameter {self.name!r}: requires low < high")
            if self.kind == "log_float" and self.low <= 0:
                raise HpoError(f"parameter {self.name!r}: log bounds must be > 0")
            if self.kind == "stepped_float" and (self.step is None or self.step <= 0):
                raise HpoError(f"parameter {self.name!r}: stepped_float needs step > 0")

    def to_dict(self) -> dict:
        rec: dict = {"name": self.name, "kind": self.kind}
        if self.kind == "categorical":
            rec["choices"] = list(self.choices)
        else:
            rec["low"] = self.low
            rec["high"] = self.high
            if self.step is not None:
                rec["step"] = self.step
        return rec

    @classmethod
    def from_dict(cls, rec: dict) -> "ParamSpec":
        return cls(
            name=rec["name"],
            kind=rec["kind"],
            low=rec.get("low"),
            high=rec.get("high"),
            step=rec.get("step"),
            choices=tuple(rec["choices"]) if "choices" in rec else None,
        )


@dataclass(frozen=True)
class ConfigSpace:
    params: tuple[ParamSpec, ...]

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise HpoError("parameter names must be unique")

    @property
    def dim(self) -> int:
        return len(self.params)

    def categorical_mask(self) -> np.ndarray:
        return np.array([p.kind == "categorical" for p in self.params])

    def validate_config(self, config: dict) -> None:
        if set(config) != {p.name for p in self.params}:
            raise HpoError(f"config keys {sorted(config)} do not match the space")
        for p in self.params:
            value = config[p.name]
            if p.kind == "categorical":
                if value not in p.choices:
                    raise HpoError(f"{p.name}={value!r} is not one of {p.choices}")
            elif p.kind == "integer":
                if value != int(value) or not p.low <= value <= p.high:
                    raise HpoError(f"{p.name}={value!r} is not an integer in [{p.low}, {p.high}]")
            else:
                if not p.low <= value <= p.high:
                    raise HpoError(f"{p.name}={value!r} outside [{p.low}, {p.high}]")
                if p.kind == "stepped_float":
                    steps = (value - p.low) / p.step
                    if abs(steps - round(steps)) > 1e-6:
                        raise HpoError(f"{p.name}={value!r} is off the step grid")


def load_space(path: str | Path) -> ConfigSpace:
    with open(path, encoding="utf-8") as fh:
        records = json.load(fh)
    return ConfigSpace(tuple(ParamSpec.from_dict(rec) for rec in records))


@dataclass(frozen=True)
class Trial:
    config: dict
    objective: float  # higher is better; -inf marks a failed evaluation
    seed: int
    index: int


def sample_config(space: ConfigSpace, rng: np.random.Generator) -> dict:
    """Uniform sample: log-uniform for log params, grid-uniform for stepped."""
    config = {}
    for p in space.params:
        if p.kind == "log_float":
            config[p.name] = float(np.exp(rng.uniform(np.log(p.low), np.log(p.high))))
        elif p.kind == "linear_float":
            config[p.name] = float(rng.uniform(p.low, p.high))
        elif p.kind == "stepped_float":
            n_steps = int(math.floor((p.high - p.low) / p.step + 1e-9)) + 1
            config[p.name] = round(p.low + int(rng.integers(n_steps)) * p.step, 10)
        elif p.kind == "integer":
            config[p.name] = int(rng.integers(int(p.low), int(p.high) + 1))
        else:
            config[p.name] = p.choices[int(rng.integers(len(p.choices)))]
    return config


def encode_config(space: ConfigSpace, config: dict) -> np.ndarray:
    """Numeric params map to their normalized position in [0, 1] (log position
    for log params); categorical params map to their integer choice code."""
    space.validate_config(config)
    vec = np.empty(space.dim)
    for d, p in enumerate(space.params):
        value = config[p.name]
        if p.kind == "categorical":
            vec[d] = float(p.choices.index(value))
        elif p.kind == "log_float":
            vec[d] = (math.log(value) - math.log(p.low)) / (math.log(p.high) - math.log(p.low))
        else:
            vec[d] = (value - p.low) / (p.high - p.low)
    return vec


def decode_encoded(space: ConfigSpace, vec: np.ndarray) -> dict:
    """Inverse of encode_config with clipping and grid snapping."""
    config = {}
    for d, p in enumerate(space.params):
        u = float(vec[d])
        if p.kind == "categorical":
            code = int(np.clip(round(u), 0, len(p.choices) - 1))
            config[p.name] = p.choices[code]
            continue
        u = min(max(u, 0.0), 1.0)
        if p.kind == "log_float":
            config[p.name] = float(
                np.exp(math.log(p.low) + u * (math.log(p.high) - math.log(p.low)))
            )
        elif p.kind == "linear_float":
            config[p.name] = p.low + u * (p.high - p.low)
        elif p.kind == "stepped_float":
            raw = p.low + u * (p.high - p.low)
            n_steps = int(math.floor((p.high - p.low) / p.step + 1e-9))
            i = int(np.clip(round((raw - p.low) / p.step), 0, n_steps))
            config[p.name] = round(p.low + i * p.step, 10)
        else:
            config[p.name] = int(np.clip(round(p.low + u * (p.high - p.low)), p.low, p.high))
    return config


# ---------------------------------------------------------------------------
# Regression-forest surrogate


@dataclass
class _TreeNode:
    value: float = 0.0
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    categorical: bool = False
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None


def _sse(y: np.ndarray) -> float:
    return float(np.sum((y - y.mean()) ** 2)) if y.size else 0.0


def _best_split(x: np.ndarray, y: np.ndarray, categorical: bool):
    """Returns (sse, threshold_or_code, left_mask) or None if unsplittable."""
    best = None
    if categorical:
        for code in np.unique(x):
            left = x == code
            if left.all() or not left.any():
                continue
            sse = _sse(y[left]) + _sse(y[~left])
            if best is None or sse < best[0]:
                best = (sse, float(code), left)
    else:
        order = np.argsort(x, kind="stable")
        xs, ys = x[order], y[order]
        uniq = np.unique(xs)
        for a, b in zip(uniq[:-1], uniq[1:]):
            thr = (a + b) / 2.0
            left = x <= thr
            sse = _sse(y[left]) + _sse(y[~left])
            if best is None or sse < best[0]:
                best = (sse, float(thr), left)
        del xs, ys
    return best


def _build_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    is_cat: np.ndarray,
    leaf_size: int,
    max_features: int,
) -> _TreeNode:
    node = _TreeNode(value=float(y.mean()))
    if y.size <= leaf_size or np.all(y == y[0]):
        return node
    dims = rng.choice(X.shape[1], size=min(max_features, X.shape[1]), replace=False)
    best = None
    for d in dims:
        split = _best_split(X[:, d], y, bool(is_cat[d]))
        if split is not None and (best is None or split[0] < best[1][0]):
            best = (int(d), split)
    if best is None:
        return node
    d, (_, threshold, left) = best
    node.feature = d
    node.threshold = threshold
    node.categorical = bool(is_cat[d])
    node.left = _build_tree(X[left], y[left], rng, is_cat, leaf_size, max_features)
    node.right = _build_tree(X[~left], y[~left], rng, is_cat, leaf_size, max_features)
    return node


def _tree_predict(node: _TreeNode, x: np.ndarray) -> float:
    while node.feature >= 0:
        if node.categorical:
            node = node.left if x[node.feature] == node.threshold else node.right
        else:
            node = node.left if x[node.feature] <= node.threshold else node.right
    return node.value


def _tree_predict_many(node: _TreeNode, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if node.feature < 0:
        out[idx] = node.value
        return
    vals = X[idx, node.feature]
    left = (vals == node.threshold) if node.categorical else (vals <= node.threshold)
    if left.any():
        _tree_predict_many(node.left, X, idx[left], out)
    if not left.all():
        _tree_predict_many(node.right, X, idx[~left], out)


@dataclass
class ForestSurrogate:
    trees: list[_TreeNode]
    space: ConfigSpace
    history: tuple[Trial, ...] = field(repr=False)

    def predict_encoded_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Means and stds for a batch of encoded configs, shape (m, d)."""
        preds = np.empty((len(self.trees), X.shape[0]))
        idx = np.arange(X.shape[0])
        for t, tree in enumerate(self.trees):
            _tree_predict_many(tree, X, idx, preds[t])
        means = preds.mean(axis=0)
        stds = np.sqrt(np.maximum(preds.var(axis=0), VARIANCE_FLOOR))
        return means, stds

    def predict_encoded(self, vec: np.ndarray) -> tuple[float, float]:
        means, stds = self.predict_encoded_batch(vec.reshape(1, -1))
        return float(means[0]), float(stds[0])


def fit_surrogate(
    history: Sequence[Trial],
    space: ConfigSpace,
    seed: int = 0,
    n_trees: int = FOREST_TREES,
    leaf_size: int = FOREST_LEAF_SIZE,
) -> ForestSurrogate:
    """Bootstrap forest over encoded configs: sqrt(d) features per split,
    leaves of at most `leaf_size` points, deterministic for a given seed."""
    if len(history) < 2:
        raise HpoError(f"surrogate needs at least 2 trials, got {len(history)}")
    X = np.stack([encode_config(space, t.config) for t in history])
    y = np.array([t.objective for t in history])
    if not np.all(np.isfinite(y)):
        raise HpoError("surrogate history must have finite objectives")
    is_cat = space.categorical_mask()
    max_features = int(math.ceil(math.sqrt(space.dim)))
    rng = np.random.default_rng(seed)
    trees = []
    n = len(history)
    for _ in range(n_trees):
        sample = rng.integers(0, n, size=n)
        trees.append(_build_tree(X[sample], y[sample], rng, is_cat, leaf_size, max_features))
    return ForestSurrogate(trees=trees, space=space, history=tuple(history))


def surrogate_predict(surrogate: ForestSurrogate, config: dict) -> tuple[float, float]:
    return surrogate.predict_encoded(encode_config(surrogate.space, config))


# ---------------------------------------------------------------------------
# Acquisition

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def log_ei(mean: float, std: float, incumbent: float) -> float:
    """ln of the expected improvement over the incumbent (maximization).

    EI = (mean - incumbent) * Phi(z) + std * phi(z) with z the standardized
    improvement; computed as std * h(z), h(z) = z*Phi(z) + phi(z), switching
    to the Mills-ratio expansion for z << 0 where the direct form underflows.
    EI of exactly zero maps to the finite sentinel -1e300.
    """
    if std <= 0:
        raise HpoError(f"std must be > 0, got {std}")
    z = (mean - incumbent) / std
    if z >= -30.0:
        phi = math.exp(-0.5 * z * z) / _SQRT_2PI
        cdf = 0.5 * math.erfc(-z / math.sqrt(2.0))
        h = z * cdf + phi
        if h > 0.0:
            return math.log(std) + math.log(h)
        return LOG_EI_ZERO
    t = -z
    # h(z) = phi(t)/t^2 * (1 - 3/t^2 + 15/t^4 - 105/t^6 + ...)
    series = math.log1p(-3.0 / t**2 + 15.0 / t**4 - 105.0 / t**6)
    log_h = -0.5 * t * t - math.log(_SQRT_2PI) - 2.0 * math.log(t) + series
    return math.log(std) + log_h


# ---------------------------------------------------------------------------
# Suggest / optimize


def _finite_trials(history: Sequence[Trial]) -> list[Trial]:
    return [t for t in history if math.isfinite(t.objective)]


def suggest(space: ConfigSpace, history: Sequence[Trial], rng: np.random.Generator) -> dict:
    """Random sampling for the initial design, then log-EI argmax over 1000
    random candidates plus 100 Gaussian perturbations of the incumbent
    (sigma 0.1 in encoded space). Ties break to the lowest candidate index."""
    finite = _finite_trials(history)
    if len(finite) < INITIAL_DESIGN_SIZE:
        return sample_config(space, rng)
    surrogate_seed = int(rng.integers(2**31))
    surrogate = fit_surrogate(finite, space, seed=surrogate_seed)
    incumbent = max(finite, key=lambda t: t.objective)  # earliest wins ties

    candidates = [sample_config(space, rng) for _ in range(N_RANDOM_CANDIDATES)]
    incumbent_vec = encode_config(space, incumbent.config)
    for _ in range(N_PERTURBATIONS):
        noise = rng.normal(0.0, PERTURBATION_SIGMA, size=space.dim)
        candidates.append(decode_encoded(space, incumbent_vec + noise))

    encoded = np.stack([encode_config(space, c) for c in candidates])
    means, stds = surrogate.predict_encoded_batch(encoded)
    best_idx = 0
    best_score = -math.inf
    for i in range(len(candidates)):
        score = log_ei(float(means[i]), float(stds[i]), incumbent.objective)
        if score > best_score:
            best_score = score
            best_idx = i
    return candidates[best_idx]


def optimize(
    objective: Callable[[dict], float],
    space: ConfigSpace,
    n_trials: int,
    seed: int,
) -> tuple[Trial, list[Trial]]:
    """Sequential suggest -> evaluate -> record loop.

    Exceptions from the objective are logged and scored -inf; the history
    always reaches exactly n_trials entries.
    """
    if n_trials < 1:
        raise HpoError(f"n_trials must be >= 1, got {n_trials}")
    rng = np.random.default_rng(seed)
    history: list[Trial] = []
    for index in range(n_trials):
        config = suggest(space, history, rng)
        try:
            value = float(objective(config))
        except Exception as exc:  # noqa: BLE001 - degenerate configs must not abort the run
            logger.warning("trial %d failed (%s); recording -inf", index, exc)
            value = -math.inf
        history.append(Trial(config=config, objective=value, seed=seed, index=index))
    best = max(history, key=lambda t: t.objective)
    return best, history


def append_trial_log(path: str | Path, trial: Trial) -> None:
    """Append-only JSONL; -inf objectives are stored as null (strict JSON)."""
    record = {
        "index": trial.index,
        "seed": trial.seed,
        "config": trial.config,
        "objective": trial.objective if math.isfinite(trial.objective) else None,
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def load_trial_log(path: str | Path) -> list[Trial]:
    trials = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            objective = rec["objective"]
            trials.append(
                Trial(
                    config=rec["config"],
                    objective=-math.inf if objective is None else float(objective),
                    seed=int(rec["seed"]),
                    index=int(rec["index"]),
                )
            )
    return trials


# ---------------------------------------------------------------------------
# SVM-baseline tuning protocol

SVM_SPACE = ConfigSpace(
    (
        ParamSpec(name="max_ngram", kind="integer", low=1, high=4),
        ParamSpec(name="C", kind="linear_float", low=0.1, high=10.0),
    )
)

DEFAULT_SVM_CONFIG = {"max_ngram": 1, "C": 1.0}


@dataclass
class TunedSeedResult:
    seed: int
    config: dict
    val_weighted_f1: float
    tfidf: TfidfModel
    svm: OvrSvmEnsemble
    test_report: MetricsReport | None
    history: list[Trial]


@dataclass
class TuneResult:
    per_seed: list[TunedSeedResult]
    mean_test: dict[str, float]
    std_test: dict[str, float]


class _SvmObjective:
    """Weighted validation F1 of a TF-IDF + one-vs-rest SVM for one config.

    The TF-IDF fit and the transformed matrices depend only on max_ngram, so
    they are cached across trials.
    """

    def __init__(self, train: list[Passage], val: list[Passage], class_ids, seed: int):
        self.train = train
        self.val = val
        self.class_ids = tuple(class_ids)
        self.seed = seed
        self._cache: dict[int, tuple[TfidfModel, list, list]] = {}

    def features(self, max_ngram: int):
        if max_ngram not in self._cache:
            model = fit_tfidf([p.text for p in self.train], max_ngram)
            X_train = [tfidf_transform(model, p.text) for p in self.train]
            X_val = [tfidf_transform(model, p.text) for p in self.val]
            self._cache[max_ngram] = (model, X_train, X_val)
        return self._cache[max_ngram]

    def train_model(self, config: dict) -> tuple[TfidfModel, OvrSvmEnsemble]:
        model, X_train, _ = self.features(int(config["max_ngram"]))
        svm = train_ovr_svm(
            X_train,
            [p.gold_labels for p in self.train],
            C=float(config["C"]),
            class_ids=self.class_ids,
            n_features=model.n_features,
            seed=self.seed,
        )
        return model, svm

    def __call__(self, config: dict) -> float:
        model, X_train, X_val = self.features(int(config["max_ngram"]))
        svm = train_ovr_svm(
            X_train,
            [p.gold_labels for p in self.train],
            C=float(config["C"]),
            class_ids=self.class_ids,
            n_features=model.n_features,
            seed=self.seed,
        )
        pred = {p.id: svm_predict(svm, x)[1] for p, x in zip(self.val, X_val)}
        gold = {p.id: p.gold_labels for p in self.val}
        return evaluate(pred, gold).weighted["f1"]


def evaluate_svm_on(
    tfidf: TfidfModel, svm: OvrSvmEnsemble, passages: list[Passage]
) -> MetricsReport:
    pred = {p.id: svm_predict(svm, tfidf_transform(tfidf, p.text))[1] for p in passages}
    gold = {p.id: p.gold_labels for p in passages}
    return evaluate(pred, gold)


def tune_svm_baseline(
    train: list[Passage],
    val: list[Passage],
    n_trials: int,
    seeds: Sequence[int],
    test: list[Passage] | None = None,
    class_ids: Sequence[int] | None = None,
    trial_log_dir: str | Path | None = None,
) -> TuneResult:
    """Tune (max_ngram, C) on validation weighted F1, once per seed.

    Per seed the best configuration is retrained on the train split; when a
    test split is given its report enters the mean/std aggregation across
    seeds.
    """
    if not val:
        raise HpoError("validation split is empty")
    if not train:
        raise HpoError("train split is empty")
    if class_ids is None:
        class_ids = sorted({c for p in train for c in (p.gold_labels or set())})

    per_seed = []
    for seed in seeds:
        objective = _SvmObjective(train, val, class_ids, seed)
        best, history = optimize(objective, SVM_SPACE, n_trials, seed)
        if trial_log_dir is not None:
            log_path = Path(trial_log_dir) / f"trials_seed{seed}.jsonl"
            log_path.unlink(missing_ok=True)
            for trial in history:
                append_trial_log(log_path, trial)
        tfidf_model, svm_model = objective.train_model(best.config)
        report = evaluate_svm_on(tfidf_model, svm_model, test) if test else None
        per_seed.append(
            TunedSeedResult(
                seed=seed,
                config=best.config,
                val_weighted_f1=best.objective,
                tfidf=tfidf_model,
                svm=svm_model,
                test_report=report,
                history=history,
            )
        )

    mean_test: dict[str, float] = {}
    std_test: dict[str, float] = {}
    if test:
        for agg in ("micro", "macro", "weighted"):
            for metric in ("precision", "recall", "f1"):
                values = np.array([getattr(r.test_report, agg)[metric] for r in per_seed])
                mean_test[f"{agg}_{metric}"] = float(values.mean())
                std_test[f"{agg}_{metric}"] = float(values.std())
    return TuneResult(per_seed=per_seed, mean_test=mean_test, std_test=std_test)


def split_passages(
    passages: list[Passage], split_seed: int
) -> tuple[list[Passage], list[Passage], list[Passage]]:
    """Materialize split_dataset id lists back into passage lists."""
    split = split_dataset(passages, split_seed)
    by_id = {p.id: p for p in passages}
    return (
        [by_id[i] for i in split.train_ids],
        [by_id[i] for i in split.val_ids],
        [by_id[i] for i in split.test_ids],
    )
