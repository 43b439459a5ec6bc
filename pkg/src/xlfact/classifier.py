"""Multinomial softmax relation classifier over sparse hashed features.

This is the desk-scale stand-in for a fine-tuned neural relation head:
it keeps the interesting machinery — joint (head, tail, sentence)
features, inverse-log class weighting against the heavy relation
imbalance, weighted cross-entropy — behind a small, fully deterministic
linear model.  Features are lowercase unigrams of each field, prefixed
"H:"/"T:"/"S:" and hashed with 64-bit FNV-1a into a fixed-size space.

Training is plain mini-batch gradient descent with seeded shuffling;
given the same seed the loss trace is bitwise reproducible.  (For the
record, the neural original used Adam at lr 1e-4 with a step scheduler,
step 2 gamma 0.3; those settings are irrelevant to this stand-in.)
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as kernels
from .errors import ValidationError
from .textnorm import tokenize

DEFAULT_DIM = 1 << 18

MODEL_FORMAT = "xlfact-softmax-v1"


@dataclass(frozen=True)
class SparseVector:
    """Hashed feature vector; entries map index -> count, no zeros."""

    dim: int
    entries: Mapping[int, float]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.entries:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
        indices = np.fromiter(sorted(self.entries), dtype=np.int64, count=len(self.entries))
        values = np.array([self.entries[int(i)] for i in indices], dtype=np.float64)
        return indices, values


@dataclass(frozen=True)
class ClassWeights:
    weights: Mapping[str, float]


@dataclass
class SoftmaxModel:
    weights: np.ndarray  # (classes, dim) float64
    bias: np.ndarray  # (classes,) float64
    label_vocab: list[str]

    @property
    def dim(self) -> int:
        return int(self.weights.shape[1])

    def __post_init__(self):
        if len(set(self.label_vocab)) != len(self.label_vocab):
            raise ValidationError("label vocabulary contains duplicates")
        if self.weights.shape[0] != len(self.label_vocab) or self.bias.shape[0] != len(self.label_vocab):
            raise ValidationError("model dimensions inconsistent with label vocabulary")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 20
    batch_size: int = 16
    seed: int = 0
    l2: float = 1e-6
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.dim <= 0:
            raise ValidationError("learning_rate, batch_size and dim must be positive")
        if self.epochs < 0 or self.l2 < 0:
            raise ValidationError("epochs and l2 must be non-negative")


@dataclass(frozen=True)
class TrainExample:
    head: str
    tail: str
    sentence: str
    relation: str


def featurize(head: str, tail: str, sentence: str, dim: int = DEFAULT_DIM) -> SparseVector:
    """Hash (head, tail, sentence) unigrams into one sparse vector."""
    if not head.strip():
        raise ValidationError("head must be non-empty")
    if not tail.strip():
        raise ValidationError("tail must be non-empty")
    tokens = (
        ["H:" + t for t in tokenize(head)]
        + ["T:" + t for t in tokenize(tail)]
        + ["S:" + t for t in tokenize(sentence)]
    )
    indices, values = kernels.hashed_counts(tokens, dim)
    return SparseVector(dim=dim, entries=dict(zip(indices.tolist(), values.tolist())))


def class_weights(histogram: Mapping[str, int]) -> ClassWeights:
    """Inverse-log class weights, normalized to mean 1.

    raw_c = 1 / ln(1 + n_c); the +1 guards singleton classes and the
    normalization keeps the effective learning rate independent of the
    weighting.  Rarer classes always get strictly larger weights.
    """
    if not histogram:
        raise ValidationError("class histogram is empty")
    for label, count in histogram.items():
        if count < 1:
            raise ValidationError(f"class {label!r} has non-positive count {count}")
    raw = {label: 1.0 / math.log1p(count) for label, count in histogram.items()}
    mean = sum(raw.values()) / len(raw)
    return ClassWeights({label: value / mean for label, value in raw.items()})


def _pack_batch(vectors: Sequence[tuple[np.ndarray, np.ndarray]]):
    offsets = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, (indices, _) in enumerate(vectors):
        offsets[i + 1] = offsets[i] + len(indices)
    idx = np.concatenate([v[0] for v in vectors]) if vectors else np.empty(0, dtype=np.int64)
    val = np.concatenate([v[1] for v in vectors]) if vectors else np.empty(0, dtype=np.float64)
    return idx.astype(np.int64), val.astype(np.float64), offsets


def weighted_ce_loss(
    model: SoftmaxModel,
    batch: Sequence[tuple[SparseVector, str]],
    weights: ClassWeights,
    l2: float = TrainConfig.l2,
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Weighted cross-entropy over a batch plus l2*||W||^2.

    Returns (loss, (grad_weights, grad_bias)); gradients are dense and
    include the regularization term.
    """
    if not batch:
        raise ValidationError("batch must be non-empty")
    label_index = {label: i for i, label in enumerate(model.label_vocab)}
    labels = np.empty(len(batch), dtype=np.int64)
    sample_weights = np.empty(len(batch), dtype=np.float64)
    vectors = []
    for i, (vector, label) in enumerate(batch):
        if label not in label_index:
            raise ValidationError(f"label {label!r} not in model vocabulary")
        if vector.dim != model.dim:
            raise ValidationError(f"vector dim {vector.dim} != model dim {model.dim}")
        labels[i] = label_index[label]
        sample_weights[i] = weights.weights.get(label, 1.0)
        vectors.append(vector.arrays())
    idx, val, offsets = _pack_batch(vectors)
    loss, grad_w, grad_b = kernels.batch_loss_grad(
        model.weights, model.bias, idx, val, offsets, labels, sample_weights, l2
    )
    return float(loss), (grad_w, grad_b)


def train(
    examples: Iterable[TrainExample], config: TrainConfig = TrainConfig()
) -> tuple[SoftmaxModel, list[float]]:
    """Mini-batch gradient descent; deterministic given config.seed.

    Returns the trained model and the per-epoch loss trace (mean batch
    loss, measured before each update).  epochs=0 returns the
    zero-initialized model with an empty trace.
    """
    examples = list(examples)
    histogram = Counter(e.relation for e in examples)
    if len(histogram) < 2:
        raise ValidationError("training data must contain at least 2 relation classes")
    vocab = sorted(histogram)
    label_index = {label: i for i, label in enumerate(vocab)}
    weight_by_label = class_weights(histogram).weights

    packed = []
    labels = np.empty(len(examples), dtype=np.int64)
    sample_weights = np.empty(len(examples), dtype=np.float64)
    for i, example in enumerate(examples):
        vector = featurize(example.head, example.tail, example.sentence, config.dim)
        packed.append(vector.arrays())
        labels[i] = label_index[example.relation]
        sample_weights[i] = weight_by_label[example.relation]

    model = SoftmaxModel(
        weights=np.zeros((len(vocab), config.dim), dtype=np.float64),
        bias=np.zeros(len(vocab), dtype=np.float64),
        label_vocab=vocab,
    )
    rng = np.random.default_rng(config.seed)
    trace: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(len(examples))
        batch_losses = []
        for start in range(0, len(examples), config.batch_size):
            chosen = order[start : start + config.batch_size]
            idx, val, offsets = _pack_batch([packed[j] for j in chosen])
            loss, grad_w, grad_b = kernels.batch_loss_grad(
                model.weights,
                model.bias,
                idx,
                val,
                offsets,
                labels[chosen],
                sample_weights[chosen],
                config.l2,
            )
            model.weights -= config.learning_rate * grad_w
            model.bias -= config.learning_rate * grad_b
            batch_losses.append(float(loss))
        trace.append(sum(batch_losses) / len(batch_losses))
    return model, trace


def predict(model: SoftmaxModel, head: str, tail: str, sentence: str) -> tuple[str, np.ndarray]:
    """Most likely relation plus the full probability vector.

    Ties break toward the earliest label in the vocabulary.
    """
    vector = featurize(head, tail, sentence, model.dim)
    idx, val = vector.arrays()
    offsets = np.array([0, len(idx)], dtype=np.int64)
    probs = kernels.batch_probs(model.weights, model.bias, idx, val, offsets)[0]
    return model.label_vocab[int(np.argmax(probs))], probs


def save_model(model: SoftmaxModel, path) -> None:
    """Persist as JSON: dense rows if at least half full, else sparse."""
    rows = []
    for row in model.weights:
        nonzero = np.nonzero(row)[0]
        if len(nonzero) * 2 >= model.dim:
            rows.append({"dense": row.tolist()})
        else:
            rows.append(
                {"indices": nonzero.tolist(), "values": row[nonzero].tolist()}
            )
    document = {
        "format": MODEL_FORMAT,
        "dim": model.dim,
        "label_vocab": model.label_vocab,
        "bias": model.bias.tolist(),
        "rows": rows,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle)
        handle.write("\n")


def load_model(path) -> SoftmaxModel:
    with open(path, encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed model JSON: {exc}") from None
    if document.get("format") != MODEL_FORMAT:
        raise ValidationError(f"{path}: unknown model format {document.get('format')!r}")
    dim = int(document["dim"])
    vocab = list(document["label_vocab"])
    weights = np.zeros((len(vocab), dim), dtype=np.float64)
    for c, row in enumerate(document["rows"]):
        if "dense" in row:
            weights[c] = np.asarray(row["dense"], dtype=np.float64)
        else:
            weights[c, np.asarray(row["indices"], dtype=np.int64)] = np.asarray(
                row["values"], dtype=np.float64
            )
    bias = np.asarray(document["bias"], dtype=np.float64)
    return SoftmaxModel(weights=weights, bias=bias, label_vocab=vocab)
