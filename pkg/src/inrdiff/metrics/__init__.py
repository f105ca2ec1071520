"""Reconstruction metrics (VIoU, Chamfer-L1, NC, F-score) and set metrics (MMD, COV, 1-NNA, FGD)."""

from .frechet import (
    DESCRIPTOR_DIM,
    cloud_descriptor,
    descriptor_matrix,
    frechet_from_descriptors,
    frechet_gaussian,
    frechet_geom_distance,
)
from .pointmetrics import chamfer_l1, f_score, nearest_neighbor, normal_consistency
from .setmetrics import coverage, mmd, one_nna, pairwise_chamfer
from .volumetric import viou

__all__ = [
    "DESCRIPTOR_DIM",
    "cloud_descriptor",
    "descriptor_matrix",
    "frechet_from_descriptors",
    "frechet_gaussian",
    "frechet_geom_distance",
    "chamfer_l1",
    "f_score",
    "nearest_neighbor",
    "normal_consistency",
    "coverage",
    "mmd",
    "one_nna",
    "pairwise_chamfer",
    "viou",
]
