"""Pure-numpy scaled-dot-product attention kernels (fallback backend)."""

from __future__ import annotations

import numpy as np


def attention_forward(q: np.ndarray, k: np.ndarray, v: np.ndarray, scale: float):
    """Multi-head attention over (heads, length, head_dim) arrays.

    Returns (out, probs); probs is kept for the backward pass.
    """
    scores = scale * (q @ k.transpose(0, 2, 1))
    scores -= scores.max(axis=-1, keepdims=True)
    exp = np.exp(scores)
    probs = exp / exp.sum(axis=-1, keepdims=True)
    out = probs @ v
    return out, probs


def attention_backward(
    q: np.ndarray,
    k: np.ndarray,
    v: np.ndarray,
    probs: np.ndarray,
    d_out: np.ndarray,
    scale: float,
):
    """Gradients of attention_forward w.r.t. q, k, v."""
    dv = probs.transpose(0, 2, 1) @ d_out
    dp = d_out @ v.transpose(0, 2, 1)
    inner = (dp * probs).sum(axis=-1, keepdims=True)
    ds = probs * (dp - inner)
    dq = scale * (ds @ k)
    dk = scale * (ds.transpose(0, 2, 1) @ q)
    return dq, dk, dv
