"""Unsupervised symmetric-object segmentation from paired superpixels."""

from __future__ import annotations

import numpy as np

from symmpix import kernels
from symmpix.slic import LabelMap

__all__ = ["symmetric_segment", "error_rate"]


def symmetric_segment(label_map: LabelMap, largest_component_only: bool = False) -> np.ndarray:
    """Foreground mask: the union of all superpixels participating in an
    active mirror pair.

    ``largest_component_only`` optionally keeps just the biggest connected
    foreground region (off by default: the raw union is the reference
    behavior; stray paired superpixels in the background stay visible).
    """
    paired_ids = set()
    for ln in label_map.pairing.active_links():
        paired_ids.add(ln.left)
        paired_ids.add(ln.right)
    if not paired_ids:
        return np.zeros(label_map.labels.shape, dtype=bool)
    mask = np.isin(label_map.labels, sorted(paired_ids))
    if largest_component_only and mask.any():
        comp, ncomp = kernels.label_components(mask.astype(np.int32))
        sizes = np.bincount(comp.ravel(), minlength=ncomp)
        fg_comps = np.unique(comp[mask])
        best = fg_comps[np.argmax(sizes[fg_comps])]
        mask = comp == best
    return mask


def error_rate(mask: np.ndarray, gt: np.ndarray) -> float:
    """Fraction of pixels where the two binary masks disagree."""
    if mask.shape != gt.shape:
        raise ValueError(f"mask shapes differ: {mask.shape} vs {gt.shape}")
    disagree = np.count_nonzero(mask.astype(bool) != gt.astype(bool))
    return disagree / mask.size
