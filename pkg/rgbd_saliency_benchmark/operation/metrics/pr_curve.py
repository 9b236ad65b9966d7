"""
Precision-recall sweep and the F-measures derived from it.

The sweep binarizes the 8-bit prediction at every level ``t`` in ``0..255``
with ``level > t``: ``t = 0`` keeps every nonzero pixel and ``t = 255`` keeps
none. Counts come from one histogram per class and a reversed cumulative sum,
so the whole sweep costs a single pass over the image.

The adaptive binarization keeps the pixels with ``level >= threshold`` where
the threshold is derived from the mean level of the prediction. Level 0 is
never foreground, which makes every adaptive binarization one of the sweep
binarizations.
"""
import math
from dataclasses import dataclass

import numpy as np

from rgbd_saliency_benchmark.helpers.errors import EmptyGroundTruthError
from rgbd_saliency_benchmark.operation.metrics.maps import LEVELS, AdaptiveRule, EmptyGtPolicy, EvalConfig, check_pair


@dataclass(frozen=True, eq=False)
class PRCurve:
    """
    Precision and recall per binarization level.

    Attributes:
        precision (numpy.ndarray): 256 values in ``[0, 1]``.
        recall (numpy.ndarray): 256 values in ``[0, 1]``.
        tp (numpy.ndarray | None): True positives per level (per-image curves).
        fp (numpy.ndarray | None): False positives per level (per-image curves).
        positives (int | None): Positive ground-truth pixels (per-image curves).
    """

    precision: np.ndarray
    recall: np.ndarray
    tp: np.ndarray = None
    fp: np.ndarray = None
    positives: int = None

    @property
    def thresholds(self):
        return np.arange(LEVELS)

    @classmethod
    def average(cls, curves):
        """Dataset curve: per-level arithmetic mean of precision and recall."""
        curves = list(curves)
        return cls(np.mean([c.precision for c in curves], axis=0), np.mean([c.recall for c in curves], axis=0))


def guard_empty(gt, cfg):
    """Raise :class:`EmptyGroundTruthError` for an empty mask under the skip policy."""
    if gt.is_empty and cfg.empty_gt_policy is EmptyGtPolicy.SKIP:
        raise EmptyGroundTruthError(f"ground truth of shape {gt.shape} has no positive pixel")


def _ratio(numerator, denominator):
    numerator = np.asarray(numerator, dtype=np.float64)
    denominator = np.asarray(denominator, dtype=np.float64)
    out = np.zeros(np.broadcast(numerator, denominator).shape)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def pr_curve(pred, gt, cfg=None):
    """
    Sweep all 256 binarization levels.

    Args:
        pred (SaliencyMap): Prediction.
        gt (GroundTruthMask): Ground truth of the same shape.
        cfg (EvalConfig): Settings; the empty ground-truth policy applies.

    Returns:
        PRCurve: Precision is 0 where nothing is predicted, recall is 0 when
        the ground truth is empty.
    """
    cfg = cfg or EvalConfig()
    check_pair(pred, gt)
    guard_empty(gt, cfg)
    levels = pred.quantized
    mask = gt.values
    fg_hist = np.bincount(levels[mask], minlength=LEVELS)
    bg_hist = np.bincount(levels[~mask], minlength=LEVELS)
    # counts of levels >= t, shifted to levels > t
    tp = np.append(np.cumsum(fg_hist[::-1])[::-1][1:], 0)
    fp = np.append(np.cumsum(bg_hist[::-1])[::-1][1:], 0)
    positives = int(fg_hist.sum())
    return PRCurve(_ratio(tp, tp + fp), _ratio(tp, positives), tp, fp, positives)


def f_beta(precision, recall, beta_sq=0.3):
    """
    ``(1 + β²) p r / (β² p + r)``, 0 where the denominator vanishes.

    Works element-wise on arrays; scalars give a float.
    """
    precision = np.asarray(precision, dtype=np.float64)
    recall = np.asarray(recall, dtype=np.float64)
    score = _ratio((1.0 + beta_sq) * precision * recall, beta_sq * precision + recall)
    return float(score) if score.ndim == 0 else score


def f_max(curve, cfg=None):
    """Largest F-measure over the levels of ``curve``."""
    cfg = cfg or EvalConfig()
    return float(np.max(f_beta(curve.precision, curve.recall, cfg.beta_sq)))


def adaptive_threshold(pred, cfg=None):
    """Twice (or once) the mean 8-bit level of ``pred``, clamped to 255."""
    cfg = cfg or EvalConfig()
    mean_level = float(pred.quantized.mean())
    factor = 2.0 if cfg.adaptive_rule is AdaptiveRule.TWICE_MEAN else 1.0
    return min(factor * mean_level, float(LEVELS - 1))


def adaptive_binarize(pred, cfg=None):
    """Boolean map ``level >= max(adaptive_threshold, 1)``."""
    threshold = max(adaptive_threshold(pred, cfg), 1.0)
    return pred.quantized >= threshold


def adaptive_level(pred, cfg=None):
    """Sweep level ``t`` whose binarization equals :func:`adaptive_binarize`."""
    return int(math.ceil(max(adaptive_threshold(pred, cfg), 1.0))) - 1


def binary_precision_recall(binary, gt):
    """Precision and recall of a boolean prediction."""
    binary = np.asarray(binary, dtype=bool)
    tp = int(np.count_nonzero(binary & gt.values))
    predicted = int(np.count_nonzero(binary))
    return float(_ratio(tp, predicted)), float(_ratio(tp, gt.positives))


def f_mean(pred, gt, cfg=None):
    """F-measure of the adaptive binarization."""
    cfg = cfg or EvalConfig()
    check_pair(pred, gt)
    guard_empty(gt, cfg)
    precision, recall = binary_precision_recall(adaptive_binarize(pred, cfg), gt)
    return f_beta(precision, recall, cfg.beta_sq)
