# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: FNV-1a hashing and softmax loss/gradient loops.

Same API and semantics as ``_pykernels``; see that module for the
reference implementation and docstrings.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

BACKEND = "c"

cdef unsigned long long FNV_OFFSET = 0xCBF29CE484222325ULL
cdef unsigned long long FNV_PRIME = 0x100000001B3ULL


cdef unsigned long long _fnv1a64(const unsigned char[:] data) nogil:
    cdef unsigned long long h = FNV_OFFSET
    cdef Py_ssize_t i
    for i in range(data.shape[0]):
        h ^= data[i]
        h *= FNV_PRIME
    return h


def fnv1a64(bytes data):
    if len(data) == 0:
        return int(FNV_OFFSET)
    return int(_fnv1a64(data))


def hashed_counts(tokens, long long dim):
    cdef dict counts = {}
    cdef unsigned long long h
    cdef long long index
    cdef bytes raw
    for token in tokens:
        raw = token.encode("utf-8")
        if len(raw) == 0:
            h = FNV_OFFSET
        else:
            h = _fnv1a64(raw)
        index = <long long>(h % <unsigned long long>dim)
        counts[index] = counts.get(index, 0.0) + 1.0
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    indices = np.fromiter(sorted(counts), dtype=np.int64, count=len(counts))
    values = np.array([counts[int(i)] for i in indices], dtype=np.float64)
    return indices, values


def batch_probs(double[:, ::1] weights, double[::1] bias,
                long long[::1] idx, double[::1] val, long long[::1] offsets):
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t n_classes = weights.shape[0]
    probs_arr = np.empty((n, n_classes), dtype=np.float64)
    cdef double[:, ::1] probs = probs_arr
    cdef Py_ssize_t i, c, j
    cdef long long lo, hi
    cdef double acc, m, total
    for i in range(n):
        lo = offsets[i]
        hi = offsets[i + 1]
        m = -1e308
        for c in range(n_classes):
            acc = bias[c]
            for j in range(lo, hi):
                acc += weights[c, idx[j]] * val[j]
            probs[i, c] = acc
            if acc > m:
                m = acc
        total = 0.0
        for c in range(n_classes):
            probs[i, c] = exp(probs[i, c] - m)
            total += probs[i, c]
        for c in range(n_classes):
            probs[i, c] /= total
    return probs_arr


def batch_loss_grad(double[:, ::1] weights, double[::1] bias,
                    long long[::1] idx, double[::1] val, long long[::1] offsets,
                    long long[::1] labels, double[::1] sample_weights, double l2):
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t n_classes = weights.shape[0]
    cdef Py_ssize_t dim = weights.shape[1]
    grad_w_arr = np.zeros((n_classes, dim), dtype=np.float64)
    grad_b_arr = np.zeros(n_classes, dtype=np.float64)
    cdef double[:, ::1] grad_w = grad_w_arr
    cdef double[::1] grad_b = grad_b_arr
    logits_arr = np.empty(n_classes, dtype=np.float64)
    cdef double[::1] logits = logits_arr
    cdef Py_ssize_t i, c, j
    cdef long long lo, hi, y
    cdef double acc, m, total, w, coeff, data_loss, sq
    data_loss = 0.0
    for i in range(n):
        lo = offsets[i]
        hi = offsets[i + 1]
        m = -1e308
        for c in range(n_classes):
            acc = bias[c]
            for j in range(lo, hi):
                acc += weights[c, idx[j]] * val[j]
            logits[c] = acc
            if acc > m:
                m = acc
        total = 0.0
        for c in range(n_classes):
            logits[c] = exp(logits[c] - m)
            total += logits[c]
        w = sample_weights[i]
        y = labels[i]
        data_loss -= w * log(logits[y] / total)
        for c in range(n_classes):
            coeff = (w / n) * (logits[c] / total)
            if c == y:
                coeff -= w / n
            for j in range(lo, hi):
                grad_w[c, idx[j]] += coeff * val[j]
            grad_b[c] += coeff
    sq = 0.0
    for c in range(n_classes):
        for j in range(dim):
            sq += weights[c, j] * weights[c, j]
            grad_w[c, j] += 2.0 * l2 * weights[c, j]
    return data_loss / n + l2 * sq, grad_w_arr, grad_b_arr
