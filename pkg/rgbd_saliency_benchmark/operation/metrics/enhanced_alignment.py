"""
Enhanced alignment measure.

Both maps are centered on their own mean; the alignment matrix
``ξ = 2 φ_g φ_p / (φ_g² + φ_p² + eps)`` is mapped through ``(1 + ξ)² / 4`` and
averaged. A ground truth without foreground scores the background agreement
``mean(1 - pred)``; a full ground truth scores ``mean(pred)``.

The prediction is binarized first: at the adaptive threshold (``adaptive``), or
at every sweep level keeping the best (``max``) or average (``mean``) score.
"""
import numpy as np

from rgbd_saliency_benchmark.operation.metrics.maps import LEVELS, EMode, EvalConfig, check_pair
from rgbd_saliency_benchmark.operation.metrics.pr_curve import adaptive_binarize

EPS = np.finfo(np.float64).eps


def enhanced_alignment(binary, mask):
    """E-measure of a boolean prediction against a boolean ground truth."""
    fm = np.asarray(binary, dtype=np.float64)
    g = np.asarray(mask, dtype=np.float64)
    ratio = g.mean()
    if ratio == 0:
        enhanced = 1.0 - fm
    elif ratio == 1:
        enhanced = fm
    else:
        phi_p = fm - fm.mean()
        phi_g = g - ratio
        align = 2.0 * phi_g * phi_p / (phi_g * phi_g + phi_p * phi_p + EPS)
        enhanced = (1.0 + align) ** 2 / 4.0
    return float(enhanced.mean())


def e_measure(pred, gt, cfg=None):
    """E-measure of ``pred`` under the configured binarization mode."""
    cfg = cfg or EvalConfig()
    check_pair(pred, gt)
    if cfg.e_mode is EMode.ADAPTIVE:
        return enhanced_alignment(adaptive_binarize(pred, cfg), gt.values)
    levels = pred.quantized
    scores = [enhanced_alignment(levels > t, gt.values) for t in range(LEVELS)]
    return float(max(scores)) if cfg.e_mode is EMode.MAX else float(np.mean(scores))
