"""
Structure measure
=================

``S = α S_o + (1 - α) S_r`` compares the prediction with the ground truth at
object level and at region level.

- ``S_o`` scores the foreground and the inverted background separately with
  ``2x / (x² + 1 + σ_x)`` (mean ``x`` and deviation ``σ_x`` of the map inside
  the object) and weights them by the foreground ratio.
- ``S_r`` splits both maps into four quadrants at the ground-truth centroid
  and sums a structural similarity per quadrant, weighted by quadrant area.

An all-background ground truth scores ``1 - mean(pred)``, an all-foreground
one scores ``mean(pred)``. Scores are clamped at 0.
"""
import numpy as np

from rgbd_saliency_benchmark.operation.metrics.maps import EvalConfig, check_pair

EPS = np.finfo(np.float64).eps


def _object_score(values, region):
    inside = values[region]
    x = inside.mean()
    sigma = inside.std()
    return 2.0 * x / (x * x + 1.0 + sigma + EPS)


def s_object(pred, gt):
    """Object-aware similarity ``u * O_fg + (1 - u) * O_bg``."""
    check_pair(pred, gt)
    p = pred.values
    mask = gt.values
    u = mask.mean()
    o_fg = _object_score(np.where(mask, p, 0.0), mask) if mask.any() else 0.0
    o_bg = _object_score(np.where(mask, 0.0, 1.0 - p), ~mask) if not mask.all() else 0.0
    return float(u * o_fg + (1.0 - u) * o_bg)


def _round_half_up(value):
    return int(np.floor(value + 0.5))


def centroid(mask):
    """
    Split point ``(X, Y)`` of the region measure.

    Coordinates are one-based and rounded half up, so the left and top
    quadrants hold ``X`` columns and ``Y`` rows.
    """
    rows, cols = mask.shape
    total = mask.sum()
    if total == 0:
        return _round_half_up(cols / 2), _round_half_up(rows / 2)
    col_index = np.arange(1, cols + 1)
    row_index = np.arange(1, rows + 1)
    x = _round_half_up((mask.sum(axis=0) * col_index).sum() / total)
    y = _round_half_up((mask.sum(axis=1) * row_index).sum() / total)
    return x, y


def _ssim(p, g):
    n = p.size
    x = p.mean()
    y = g.mean()
    sigma_x2 = ((p - x) ** 2).sum() / (n - 1 + EPS)
    sigma_y2 = ((g - y) ** 2).sum() / (n - 1 + EPS)
    sigma_xy = ((p - x) * (g - y)).sum() / (n - 1 + EPS)
    alpha = 4.0 * x * y * sigma_xy
    beta = (x * x + y * y) * (sigma_x2 + sigma_y2)
    if alpha != 0:
        return alpha / (beta + EPS)
    if beta == 0:
        return 1.0
    return 0.0


def s_region(pred, gt):
    """Area-weighted structural similarity of the four centroid quadrants."""
    check_pair(pred, gt)
    p = pred.values
    g = gt.values.astype(np.float64)
    rows, cols = g.shape
    x, y = centroid(gt.values)
    quadrants = [
        (slice(0, y), slice(0, x)),
        (slice(0, y), slice(x, cols)),
        (slice(y, rows), slice(0, x)),
        (slice(y, rows), slice(x, cols)),
    ]
    score = 0.0
    for row_slice, col_slice in quadrants:
        region = p[row_slice, col_slice]
        if region.size == 0:
            continue
        score += region.size / p.size * _ssim(region, g[row_slice, col_slice])
    return float(score)


def s_measure(pred, gt, cfg=None):
    """``α S_o + (1 - α) S_r`` with the degenerate ground-truth conventions."""
    cfg = cfg or EvalConfig()
    check_pair(pred, gt)
    ratio = gt.values.mean()
    if ratio == 0:
        return float(1.0 - pred.values.mean())
    if ratio == 1:
        return float(pred.values.mean())
    score = cfg.alpha * s_object(pred, gt) + (1.0 - cfg.alpha) * s_region(pred, gt)
    return float(max(score, 0.0))
