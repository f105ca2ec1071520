"""Set-level generative metrics over collections of point clouds.

MMD (fidelity), COV (diversity) and 1-NNA (indistinguishability, optimal
at 50%) all reduce to the pairwise Chamfer matrix; ties break toward the
lowest index everywhere.
"""

from __future__ import annotations

import numpy as np

from .pointmetrics import chamfer_l1

__all__ = ["pairwise_chamfer", "mmd", "coverage", "one_nna"]


def _check_sets(sg, sr):
    if len(sg) == 0 or len(sr) == 0:
        raise ValueError("set metrics need non-empty cloud sets")


def pairwise_chamfer(sg, sr) -> np.ndarray:
    """Chamfer-L1 matrix, rows = sg, cols = sr."""
    out = np.empty((len(sg), len(sr)))
    for i, g in enumerate(sg):
        for j, r in enumerate(sr):
            out[i, j] = chamfer_l1(g, r)
    return out


def mmd(sg, sr, dists: np.ndarray | None = None) -> float:
    """Minimum matching distance: mean over references of the closest generated cloud.

    Returned unscaled; reports multiply by 100 for the conventional x10^2 column.
    """
    _check_sets(sg, sr)
    if dists is None:
        dists = pairwise_chamfer(sg, sr)
    return float(dists.min(axis=0).mean())


def coverage(sg, sr, dists: np.ndarray | None = None) -> float:
    """Percentage of reference clouds that are the nearest reference of some generated cloud."""
    _check_sets(sg, sr)
    if dists is None:
        dists = pairwise_chamfer(sg, sr)
    matched = np.unique(np.argmin(dists, axis=1))  # argmin takes the lowest index on ties
    return float(len(matched) / len(sr) * 100.0)


def one_nna(sg, sr, dists_gg=None, dists_gr=None, dists_rr=None) -> float:
    """Leave-one-out 1-NN classification accuracy over the union, percent.

    50% means the generated set is indistinguishable from the references.
    """
    if len(sg) < 2 or len(sr) < 2:
        raise ValueError("1-NNA needs at least 2 clouds per set")
    if dists_gg is None:
        dists_gg = pairwise_chamfer(sg, sg)
    if dists_gr is None:
        dists_gr = pairwise_chamfer(sg, sr)
    if dists_rr is None:
        dists_rr = pairwise_chamfer(sr, sr)
    n_g, n_r = len(sg), len(sr)
    full = np.block([[dists_gg, dists_gr], [dists_gr.T, dists_rr]])
    np.fill_diagonal(full, np.inf)
    nn = np.argmin(full, axis=1)
    labels = np.concatenate([np.zeros(n_g, dtype=bool), np.ones(n_r, dtype=bool)])
    correct = labels[nn] == labels
    return float(correct.mean() * 100.0)
