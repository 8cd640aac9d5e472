"""Superpixel quality metrics: under-segmentation error, boundary recall,
achievable segmentation accuracy.

Pinned definitions (the usual published ones, made explicit):

* USE  = [sum over gt segments g of sum of |S| over superpixels S with
  |S and g| >= 5% of |S|, minus w*h] / (w*h)
* BR   = fraction of gt boundary pixels with a superpixel boundary pixel
  within Chebyshev distance r; a boundary pixel is one with a 4-neighbor
  of a different label (image borders are not boundaries)
* ASA  = sum over superpixels of their best single-gt-segment overlap,
  divided by w*h
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "under_segmentation_error",
    "boundary_recall",
    "achievable_segmentation_accuracy",
    "boundary_mask",
    "contingency_table",
]

USE_OVERLAP_FLOOR = 0.05


def contingency_table(labels: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """counts[s, g] = number of pixels with superpixel s and gt segment g."""
    if labels.shape != gt.shape:
        raise ValueError(f"label map shapes differ: {labels.shape} vs {gt.shape}")
    ls = labels.ravel().astype(np.int64)
    gs = gt.ravel().astype(np.int64)
    if ls.min() < 0 or gs.min() < 0:
        raise ValueError("label maps must be non-negative (total labelling)")
    n_s = int(ls.max()) + 1
    n_g = int(gs.max()) + 1
    flat = ls * n_g + gs
    counts = np.bincount(flat, minlength=n_s * n_g)
    return counts.reshape(n_s, n_g)


def under_segmentation_error(labels: np.ndarray, gt: np.ndarray) -> float:
    """Leakage of superpixels across ground-truth segment boundaries."""
    counts = contingency_table(labels, gt)
    sizes = counts.sum(axis=1)
    total = labels.size
    overlaps = counts >= USE_OVERLAP_FLOOR * sizes[:, None]
    overlaps &= counts > 0
    leaked = (overlaps * sizes[:, None]).sum()
    return float(leaked - total) / total


def boundary_mask(labels: np.ndarray) -> np.ndarray:
    """Pixels with a 4-neighbor carrying a different label."""
    b = np.zeros(labels.shape, dtype=bool)
    b[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    b[:, 1:] |= labels[:, 1:] != labels[:, :-1]
    b[:-1, :] |= labels[:-1, :] != labels[1:, :]
    b[1:, :] |= labels[1:, :] != labels[:-1, :]
    return b


def _chebyshev_dilate(mask: np.ndarray, r: int) -> np.ndarray:
    out = np.zeros_like(mask)
    h, w = mask.shape
    for dy in range(-r, r + 1):
        ys = slice(max(dy, 0), h + min(dy, 0))
        yd = slice(max(-dy, 0), h + min(-dy, 0))
        for dx in range(-r, r + 1):
            xs = slice(max(dx, 0), w + min(dx, 0))
            xd = slice(max(-dx, 0), w + min(-dx, 0))
            out[yd, xd] |= mask[ys, xs]
    return out


def boundary_recall(labels: np.ndarray, gt: np.ndarray, r: int = 2) -> float:
    """Fraction of gt boundary pixels near some superpixel boundary pixel."""
    if labels.shape != gt.shape:
        raise ValueError(f"label map shapes differ: {labels.shape} vs {gt.shape}")
    if r < 0:
        raise ValueError("r must be >= 0")
    gt_b = boundary_mask(gt)
    n_gt = int(gt_b.sum())
    if n_gt == 0:
        return 1.0
    sp_b = boundary_mask(labels)
    near = _chebyshev_dilate(sp_b, r) if r > 0 else sp_b
    return float(np.count_nonzero(gt_b & near)) / n_gt


def achievable_segmentation_accuracy(labels: np.ndarray, gt: np.ndarray) -> float:
    """Best attainable accuracy when every superpixel votes for one segment."""
    counts = contingency_table(labels, gt)
    return float(counts.max(axis=1).sum()) / labels.size
