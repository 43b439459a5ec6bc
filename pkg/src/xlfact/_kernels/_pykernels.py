"""Pure numpy implementation of the hot kernels.

Reference semantics for ``_ckernels``; everything here is float64 and
deterministic.  Kept dependency-light so it always imports.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def hashed_counts(tokens, dim: int):
    """Hash tokens into a sparse count vector of dimension ``dim``.

    Returns (indices, values) with indices sorted ascending and unique;
    each token contributes 1.0 at ``fnv1a64(utf8(token)) % dim``.
    """
    counts: dict[int, float] = {}
    for token in tokens:
        index = fnv1a64(token.encode("utf-8")) % dim
        counts[index] = counts.get(index, 0.0) + 1.0
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    indices = np.fromiter(sorted(counts), dtype=np.int64, count=len(counts))
    values = np.array([counts[int(i)] for i in indices], dtype=np.float64)
    return indices, values


def batch_probs(weights, bias, idx, val, offsets):
    """Softmax class probabilities for a packed sparse batch.

    The batch is in CSR-like form: example i owns idx/val entries
    ``offsets[i]:offsets[i + 1]``.  Returns a (batch, classes) array.
    """
    n = len(offsets) - 1
    probs = np.empty((n, weights.shape[0]), dtype=np.float64)
    for i in range(n):
        lo, hi = offsets[i], offsets[i + 1]
        logits = weights[:, idx[lo:hi]] @ val[lo:hi] + bias
        logits -= logits.max()
        np.exp(logits, out=logits)
        logits /= logits.sum()
        probs[i] = logits
    return probs


def batch_loss_grad(weights, bias, idx, val, offsets, labels, sample_weights, l2):
    """Weighted cross-entropy loss and dense gradients for one batch.

    loss = -(1/B) * sum_i w_i * log softmax(W x_i + b)[y_i] + l2*||W||^2
    Returns (loss, grad_weights, grad_bias).
    """
    n = len(offsets) - 1
    n_classes = weights.shape[0]
    grad_w = np.zeros_like(weights)
    grad_b = np.zeros(n_classes, dtype=np.float64)
    data_loss = 0.0
    for i in range(n):
        lo, hi = offsets[i], offsets[i + 1]
        ix = idx[lo:hi]
        v = val[lo:hi]
        logits = weights[:, ix] @ v + bias
        m = logits.max()
        z = logits - m
        expz = np.exp(z)
        total = expz.sum()
        w = sample_weights[i]
        y = labels[i]
        data_loss -= w * (z[y] - np.log(total))
        coeff = (w / n) * (expz / total)
        coeff[y] -= w / n
        grad_w[:, ix] += coeff[:, None] * v[None, :]
        grad_b += coeff
    loss = data_loss / n + l2 * float((weights * weights).sum())
    grad_w += 2.0 * l2 * weights
    return loss, grad_w, grad_b
