"""
Weighted F-measure.

Pixel errors ``E = |pred - gt|`` are reweighted before computing precision and
recall:

1. every background pixel takes the error of its nearest foreground pixel and
   the result is smoothed with a normalized Gaussian window, replicating
   the border;
2. inside the object an error is replaced by its smoothed value when that is
   smaller;
3. background errors grow with the distance ``δ`` to the object by
   ``2 - exp(ln(0.5) / 5 * δ)``.

With ``Ew`` the weighted errors, recall is ``1 - mean(Ew[gt])``, precision is
``TPw / (TPw + FPw)`` with ``TPw = |gt| - sum(Ew[gt])`` and
``FPw = sum(Ew[~gt])``; both combine through the F-measure with ``wf_beta_sq``.
"""
import math

import numpy as np
from scipy.ndimage import convolve, distance_transform_edt as bwdist

from rgbd_saliency_benchmark.operation.metrics.maps import EvalConfig, check_pair
from rgbd_saliency_benchmark.operation.metrics.pr_curve import f_beta, guard_empty

DECAY = math.log(0.5) / 5.0


def gaussian_window(size=7, sigma=5.0):
    """Normalized ``size x size`` Gaussian window."""
    half = (size - 1) / 2.0
    axis = np.arange(size, dtype=np.float64) - half
    xx, yy = np.meshgrid(axis, axis)
    window = np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma))
    return window / window.sum()


def nearest_foreground(mask):
    """
    Distance to the closest foreground pixel and its coordinates, per pixel.

    Foreground pixels map onto themselves at distance 0.
    """
    dist, (rows, cols) = bwdist(~np.asarray(mask, dtype=bool), return_indices=True)
    return dist, rows, cols


def f_weighted(pred, gt, cfg=None):
    """Weighted F-measure; 0 for an empty ground truth under the zero policy."""
    cfg = cfg or EvalConfig()
    check_pair(pred, gt)
    guard_empty(gt, cfg)
    mask = gt.values
    if not mask.any():
        return 0.0

    error = np.abs(pred.values - mask)
    dist, rows, cols = nearest_foreground(mask)
    nearest_error = error[rows, cols]

    # replicate padding keeps a uniform error field uniform up to the border
    smoothed = convolve(nearest_error, gaussian_window(cfg.wf_gauss_size, cfg.wf_gauss_sigma), mode='nearest')
    min_error = np.where(mask & (smoothed < error), smoothed, error)
    weight = np.where(mask, 1.0, 2.0 - np.exp(DECAY * dist))
    weighted = min_error * weight

    tp_w = mask.sum() - weighted[mask].sum()
    fp_w = weighted[~mask].sum()
    recall = 1.0 - weighted[mask].mean()
    precision = tp_w / (tp_w + fp_w) if tp_w + fp_w > 0 else 0.0
    return f_beta(precision, recall, cfg.wf_beta_sq)
