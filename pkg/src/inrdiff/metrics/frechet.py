"""Frechet distance over deterministic geometric descriptors (FGD).

Replaces pretrained-network FPD features with a reproducible 51-dim
descriptor per cloud: sorted covariance eigenvalues (3), unique second-
(6) and third-order (10) central moments, and a 32-bin radial histogram
of point norms over [0, 0.9] normalized to sum 1. The two descriptor
populations are then compared with the Gaussian Frechet distance
``|mu1-mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2})`` computed via symmetric
eigendecompositions (eigenvalues clamped at zero).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "cloud_descriptor",
    "descriptor_matrix",
    "frechet_gaussian",
    "frechet_from_descriptors",
    "frechet_geom_distance",
    "DESCRIPTOR_DIM",
]

DESCRIPTOR_DIM = 51
_RADIAL_BINS = 32
_RADIAL_RANGE = (0.0, 0.9)

# exponent triples of the 10 unique third-order monomials, lexicographic
_THIRD_ORDER = [
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
]


def cloud_descriptor(points) -> np.ndarray:
    """51-dim geometric descriptor of one (centered) point cloud."""
    p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(p) < 2:
        raise ValueError("descriptor needs at least 2 points")
    p = p - p.mean(axis=0)

    cov = (p.T @ p) / len(p)
    eig = np.sort(np.linalg.eigvalsh(cov))[::-1]

    second = np.array([cov[0, 0], cov[0, 1], cov[0, 2], cov[1, 1], cov[1, 2], cov[2, 2]])

    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    third = np.array([
        np.mean(x**a * y**b * z**c) for a, b, c in _THIRD_ORDER
    ])

    r = np.linalg.norm(p, axis=1)
    hist, _ = np.histogram(r, bins=_RADIAL_BINS, range=_RADIAL_RANGE)
    hist = hist / max(hist.sum(), 1)

    out = np.concatenate([eig, second, third, hist])
    assert out.shape == (DESCRIPTOR_DIM,)
    return out


def descriptor_matrix(clouds) -> np.ndarray:
    return np.stack([cloud_descriptor(c) for c in clouds])


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_gaussian(mu1, sigma1, mu2, sigma2) -> float:
    """Closed-form Frechet distance between two Gaussians."""
    mu1 = np.asarray(mu1, dtype=np.float64)
    mu2 = np.asarray(mu2, dtype=np.float64)
    sigma1 = np.asarray(sigma1, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    s1h = _psd_sqrt(sigma1)
    inner = s1h @ sigma2 @ s1h
    cross = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None)).sum()
    d2 = float(np.sum((mu1 - mu2) ** 2) + np.trace(sigma1) + np.trace(sigma2) - 2.0 * cross)
    return max(d2, 0.0)


def frechet_from_descriptors(d1: np.ndarray, d2: np.ndarray) -> float:
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    if len(d1) < 2 or len(d2) < 2:
        raise ValueError("covariance needs at least 2 descriptor samples per set")
    mu1, mu2 = d1.mean(axis=0), d2.mean(axis=0)
    s1 = np.cov(d1, rowvar=False)
    s2 = np.cov(d2, rowvar=False)
    return frechet_gaussian(mu1, s1, mu2, s2)


def frechet_geom_distance(sg, sr) -> float:
    """FGD between two sets of point clouds (each set needs >= 2 clouds)."""
    return frechet_from_descriptors(descriptor_matrix(sg), descriptor_matrix(sr))
