"""Functional transformer primitives with explicit forward/backward pairs.

Every forward returns (output, cache); the matching backward consumes
(cache, upstream gradient) and returns input/parameter gradients. All
functions are dtype-generic so gradient checks can run the whole model
in float64 while production uses float32.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

__all__ = [
    "linear_forward",
    "linear_backward",
    "layernorm_forward",
    "layernorm_backward",
    "gelu_forward",
    "gelu_backward",
    "attention_forward",
    "attention_backward",
    "softmax",
]

_LN_EPS = 1e-5


def linear_forward(x, w, b):
    """x @ w.T + b over the last axis; w is (out, in)."""
    return x @ w.T + b, (x, w)


def linear_backward(cache, dy):
    x, w = cache
    dx = dy @ w
    # fold any leading axes into one for the weight gradient
    x2 = x.reshape(-1, x.shape[-1])
    dy2 = dy.reshape(-1, dy.shape[-1])
    dw = dy2.T @ x2
    db = dy2.sum(axis=0)
    return dx, dw, db


def layernorm_forward(x, gain, bias):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + _LN_EPS)
    xhat = (x - mu) * inv
    return xhat * gain + bias, (xhat, inv, gain)


def layernorm_backward(cache, dy):
    xhat, inv, gain = cache
    dgain = (dy * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0)
    dbias = dy.reshape(-1, dy.shape[-1]).sum(axis=0)
    dxhat = dy * gain
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dgain, dbias


def gelu_forward(x):
    """Exact GELU x * Phi(x)."""
    phi = 0.5 * (1.0 + erf(x / np.sqrt(2.0)))
    return x * phi, (x, phi)


def gelu_backward(cache, dy):
    x, phi = cache
    pdf = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
    return dy * (phi + x * pdf)


def softmax(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def attention_forward(x, w_qkv, b_qkv, w_out, b_out, n_heads: int):
    """Multi-head self-attention over (batch, tokens, dim)."""
    bsz, tok, dim = x.shape
    dh = dim // n_heads
    qkv, qkv_cache = linear_forward(x, w_qkv, b_qkv)  # (B, T, 3D)
    qkv = qkv.reshape(bsz, tok, 3, n_heads, dh).transpose(2, 0, 3, 1, 4)
    q, k, v = qkv[0], qkv[1], qkv[2]  # (B, H, T, dh)
    scale = 1.0 / np.sqrt(dh)
    scores = (q @ k.transpose(0, 1, 3, 2)) * scale  # (B, H, T, T)
    probs = softmax(scores)
    ctx = probs @ v  # (B, H, T, dh)
    merged = ctx.transpose(0, 2, 1, 3).reshape(bsz, tok, dim)
    out, out_cache = linear_forward(merged, w_out, b_out)
    return out, (qkv_cache, q, k, v, probs, merged, out_cache, n_heads, scale)


def attention_backward(cache, dy):
    qkv_cache, q, k, v, probs, merged, out_cache, n_heads, scale = cache
    bsz, n_h, tok, dh = q.shape
    dim = n_h * dh
    dmerged, dw_out, db_out = linear_backward(out_cache, dy)
    dctx = dmerged.reshape(bsz, tok, n_h, dh).transpose(0, 2, 1, 3)
    dprobs = dctx @ v.transpose(0, 1, 3, 2)
    dv = probs.transpose(0, 1, 3, 2) @ dctx
    dscores = (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True)) * probs
    dq = (dscores @ k) * scale
    dk = (dscores.transpose(0, 1, 3, 2) @ q) * scale
    dqkv = np.stack([dq, dk, dv])  # (3, B, H, T, dh)
    dqkv = dqkv.transpose(1, 3, 0, 2, 4).reshape(bsz, tok, 3 * dim)
    dx, dw_qkv, db_qkv = linear_backward(qkv_cache, dqkv)
    return dx, dw_qkv, db_qkv, dw_out, db_out
