"""Transformer denoiser over flattened MLP weights.

The noisy weight vector is split along the tensor signature into eight
slices; each slice has its own (unshared) input projection to the
embedding width, a sinusoidal time-step token is appended as token 9,
and a learnable positional encoding is added before a pre-norm
Transformer encoder. The first eight output tokens are projected back to
their tensor sizes (dedicated unshared output projections) and merged
into the denoised weight prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flatten import SHAPE_SIGNATURE
from .layers import (
    attention_backward,
    attention_forward,
    gelu_backward,
    gelu_forward,
    layernorm_backward,
    layernorm_forward,
    linear_backward,
    linear_forward,
)

__all__ = ["DenoiserConfig", "Denoiser", "timestep_embedding"]


@dataclass(frozen=True)
class DenoiserConfig:
    n_emb: int = 2880
    layers: int = 12
    heads: int = 16
    mlp_ratio: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.n_emb % self.heads != 0:
            raise ValueError(f"n_emb {self.n_emb} not divisible by heads {self.heads}")

    @classmethod
    def desk_scale(cls, n_emb: int = 256, seed: int = 0) -> "DenoiserConfig":
        return cls(n_emb=n_emb, layers=4, heads=4, seed=seed)

    def to_dict(self) -> dict:
        return {
            "n_emb": self.n_emb,
            "layers": self.layers,
            "heads": self.heads,
            "mlp_ratio": self.mlp_ratio,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DenoiserConfig":
        return cls(**{k: int(d[k]) for k in ("n_emb", "layers", "heads", "mlp_ratio", "seed")})


def timestep_embedding(t, dim: int) -> np.ndarray:
    """Half sines, half cosines over geometric frequencies 10000^(-2k/dim)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    half = dim // 2
    freqs = np.power(10000.0, -2.0 * np.arange(half) / dim)
    arg = t[:, None] * freqs[None, :]
    emb = np.concatenate([np.sin(arg), np.cos(arg)], axis=1)
    if dim % 2:
        emb = np.concatenate([emb, np.zeros((len(t), 1))], axis=1)
    return emb


class Denoiser:
    """x0-prediction denoiser; parameters live in an ordered name->array dict."""

    def __init__(self, cfg: DenoiserConfig, signature=SHAPE_SIGNATURE, dtype=np.float32):
        self.cfg = cfg
        self.signature = tuple(int(s) for s in signature)
        self.n_tokens = len(self.signature) + 1  # weight tokens + time token
        self.offsets = np.concatenate([[0], np.cumsum(self.signature)])
        self.theta_dim = int(self.offsets[-1])
        self.params: dict[str, np.ndarray] = {}
        self._init_params(dtype)

    # -- parameters --------------------------------------------------------

    def _init_params(self, dtype) -> None:
        rng = np.random.default_rng(self.cfg.seed)
        d = self.cfg.n_emb

        def normal(shape, std=0.02):
            return rng.normal(0.0, std, size=shape).astype(dtype)

        p = self.params
        for i, size in enumerate(self.signature):
            p[f"in{i}_w"] = normal((d, size))
            p[f"in{i}_b"] = np.zeros(d, dtype=dtype)
        p["pos_emb"] = normal((self.n_tokens, d))
        for l in range(self.cfg.layers):
            p[f"blk{l}_ln1_g"] = np.ones(d, dtype=dtype)
            p[f"blk{l}_ln1_b"] = np.zeros(d, dtype=dtype)
            p[f"blk{l}_qkv_w"] = normal((3 * d, d))
            p[f"blk{l}_qkv_b"] = np.zeros(3 * d, dtype=dtype)
            p[f"blk{l}_att_w"] = normal((d, d))
            p[f"blk{l}_att_b"] = np.zeros(d, dtype=dtype)
            p[f"blk{l}_ln2_g"] = np.ones(d, dtype=dtype)
            p[f"blk{l}_ln2_b"] = np.zeros(d, dtype=dtype)
            p[f"blk{l}_fc1_w"] = normal((self.cfg.mlp_ratio * d, d))
            p[f"blk{l}_fc1_b"] = np.zeros(self.cfg.mlp_ratio * d, dtype=dtype)
            p[f"blk{l}_fc2_w"] = normal((d, self.cfg.mlp_ratio * d))
            p[f"blk{l}_fc2_b"] = np.zeros(d, dtype=dtype)
        p["final_ln_g"] = np.ones(d, dtype=dtype)
        p["final_ln_b"] = np.zeros(d, dtype=dtype)
        for i, size in enumerate(self.signature):
            # zero-init output projections: the model starts by predicting
            # the (standardized) data mean, which stabilizes early training
            p[f"out{i}_w"] = np.zeros((size, d), dtype=dtype)
            p[f"out{i}_b"] = np.zeros(size, dtype=dtype)

    def param_names(self) -> list[str]:
        return list(self.params.keys())

    def n_parameters(self) -> int:
        return sum(v.size for v in self.params.values())

    def astype(self, dtype) -> "Denoiser":
        clone = Denoiser.__new__(Denoiser)
        clone.cfg = self.cfg
        clone.signature = self.signature
        clone.n_tokens = self.n_tokens
        clone.offsets = self.offsets
        clone.theta_dim = self.theta_dim
        clone.params = {k: v.astype(dtype) for k, v in self.params.items()}
        return clone

    # -- forward ------------------------------------------------------------

    def tokenize(self, theta, t):
        """(B, theta_dim) + steps -> (B, n_tokens, n_emb) with PE added."""
        out, cache = self._tokenize_cached(theta, t)
        return out

    def _tokenize_cached(self, theta, t):
        theta = np.atleast_2d(theta)
        if theta.shape[1] != self.theta_dim:
            raise ValueError(f"theta has {theta.shape[1]} dims, expected {self.theta_dim}")
        p = self.params
        dtype = p["pos_emb"].dtype
        theta = theta.astype(dtype, copy=False)
        bsz = theta.shape[0]
        tokens = np.empty((bsz, self.n_tokens, self.cfg.n_emb), dtype=dtype)
        lin_caches = []
        for i in range(len(self.signature)):
            sl = theta[:, self.offsets[i] : self.offsets[i + 1]]
            tok, cache = linear_forward(sl, p[f"in{i}_w"], p[f"in{i}_b"])
            tokens[:, i, :] = tok
            lin_caches.append(cache)
        tokens[:, -1, :] = timestep_embedding(t, self.cfg.n_emb).astype(dtype)
        tokens += p["pos_emb"][None, :, :]
        return tokens, lin_caches

    def forward(self, theta_t, t):
        """Predict clean theta; returns (theta0_hat, cache for backward)."""
        theta_t = np.atleast_2d(theta_t)
        if not np.all(np.isfinite(theta_t)):
            raise ValueError("non-finite values in denoiser input")
        p = self.params
        x, tok_cache = self._tokenize_cached(theta_t, t)
        blk_caches = []
        for l in range(self.cfg.layers):
            a, ln1_cache = layernorm_forward(x, p[f"blk{l}_ln1_g"], p[f"blk{l}_ln1_b"])
            att, att_cache = attention_forward(
                a, p[f"blk{l}_qkv_w"], p[f"blk{l}_qkv_b"],
                p[f"blk{l}_att_w"], p[f"blk{l}_att_b"], self.cfg.heads,
            )
            x = x + att
            m, ln2_cache = layernorm_forward(x, p[f"blk{l}_ln2_g"], p[f"blk{l}_ln2_b"])
            h1, fc1_cache = linear_forward(m, p[f"blk{l}_fc1_w"], p[f"blk{l}_fc1_b"])
            g, gelu_cache = gelu_forward(h1)
            h2, fc2_cache = linear_forward(g, p[f"blk{l}_fc2_w"], p[f"blk{l}_fc2_b"])
            x = x + h2
            blk_caches.append((ln1_cache, att_cache, ln2_cache, fc1_cache, gelu_cache, fc2_cache))
        y, final_cache = layernorm_forward(x, p["final_ln_g"], p["final_ln_b"])
        theta_hat = np.empty((theta_t.shape[0], self.theta_dim), dtype=y.dtype)
        out_caches = []
        for i in range(len(self.signature)):
            sl, cache = linear_forward(y[:, i, :], p[f"out{i}_w"], p[f"out{i}_b"])
            theta_hat[:, self.offsets[i] : self.offsets[i + 1]] = sl
            out_caches.append(cache)
        return theta_hat, (tok_cache, blk_caches, final_cache, out_caches)

    def denoise(self, theta_t, t) -> np.ndarray:
        """Pure prediction path; batch-shaped in, batch-shaped out."""
        theta_t = np.asarray(theta_t)
        single = theta_t.ndim == 1
        out, _ = self.forward(np.atleast_2d(theta_t), t)
        return out[0] if single else out

    # -- backward -----------------------------------------------------------

    def backward(self, cache, dtheta_hat) -> dict[str, np.ndarray]:
        """Gradients of sum(dtheta_hat * theta_hat) for every parameter."""
        p = self.params
        tok_cache, blk_caches, final_cache, out_caches = cache
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        bsz = dtheta_hat.shape[0]
        dtype = p["pos_emb"].dtype

        dy = np.zeros((bsz, self.n_tokens, self.cfg.n_emb), dtype=dtype)
        for i in range(len(self.signature)):
            dsl = dtheta_hat[:, self.offsets[i] : self.offsets[i + 1]].astype(dtype, copy=False)
            dtok, dw, db = linear_backward(out_caches[i], dsl)
            dy[:, i, :] = dtok
            grads[f"out{i}_w"] += dw
            grads[f"out{i}_b"] += db

        dx, dg, db = layernorm_backward(final_cache, dy)
        grads["final_ln_g"] += dg
        grads["final_ln_b"] += db

        for l in reversed(range(self.cfg.layers)):
            ln1_cache, att_cache, ln2_cache, fc1_cache, gelu_cache, fc2_cache = blk_caches[l]
            dg_out, dw2, db2 = linear_backward(fc2_cache, dx)
            grads[f"blk{l}_fc2_w"] += dw2
            grads[f"blk{l}_fc2_b"] += db2
            dh1 = gelu_backward(gelu_cache, dg_out)
            dm, dw1, db1 = linear_backward(fc1_cache, dh1)
            grads[f"blk{l}_fc1_w"] += dw1
            grads[f"blk{l}_fc1_b"] += db1
            dx2, dg2, db2_ = layernorm_backward(ln2_cache, dm)
            grads[f"blk{l}_ln2_g"] += dg2
            grads[f"blk{l}_ln2_b"] += db2_
            dx = dx + dx2
            datt = dx
            da, dw_qkv, db_qkv, dw_att, db_att = attention_backward(att_cache, datt)
            grads[f"blk{l}_qkv_w"] += dw_qkv
            grads[f"blk{l}_qkv_b"] += db_qkv
            grads[f"blk{l}_att_w"] += dw_att
            grads[f"blk{l}_att_b"] += db_att
            dx1, dg1, db1_ = layernorm_backward(ln1_cache, da)
            grads[f"blk{l}_ln1_g"] += dg1
            grads[f"blk{l}_ln1_b"] += db1_
            dx = dx + dx1

        grads["pos_emb"] += dx.sum(axis=0)
        for i in range(len(self.signature)):
            dtok = dx[:, i, :]
            _, dw, db = linear_backward(tok_cache[i], dtok)
            grads[f"in{i}_w"] += dw
            grads[f"in{i}_b"] += db
        return grads
