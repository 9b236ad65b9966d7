"""Loss and learning-rate schedule used to supervise the attention network."""
import math

import torch

from rgbd_saliency_benchmark.helpers.errors import DimensionError
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE

BCE_CLAMP = 1e-7
POLY_POWER = 0.9


def _pair(pred, gt):
    pred = torch.as_tensor(pred, dtype=DTYPE)
    gt = torch.as_tensor(gt, dtype=DTYPE)
    if pred.shape != gt.shape:
        raise DimensionError(f"prediction {tuple(pred.shape)} and ground truth {tuple(gt.shape)} shapes differ")
    return pred, gt


def bce_loss(pred, gt, clamp=BCE_CLAMP):
    """
    Mean binary cross-entropy ``-[g ln p + (1 - g) ln(1 - p)]``.

    Predictions are clamped to ``[clamp, 1 - clamp]``.
    """
    pred, gt = _pair(pred, gt)
    p = pred.clamp(clamp, 1.0 - clamp)
    return float(-(gt * torch.log(p) + (1.0 - gt) * torch.log(1.0 - p)).mean())


def bce_gradient(pred, gt, clamp=BCE_CLAMP):
    """Derivative of :func:`bce_loss` w.r.t. the (unclamped interior) prediction."""
    pred, gt = _pair(pred, gt)
    p = pred.clamp(clamp, 1.0 - clamp)
    return (p - gt) / (p * (1.0 - p)) / pred.numel()


def poly_lr(base_lr, iter, max_iter, power=POLY_POWER):
    """
    Poly schedule ``base_lr * (1 - iter / max_iter) ** power``.

    Raises:
        ValueError: When ``max_iter < 1`` or ``iter`` lies outside ``[0, max_iter]``.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if not 0 <= iter <= max_iter:
        raise ValueError(f"iter must lie in [0, {max_iter}], got {iter}")
    if not math.isfinite(base_lr):
        raise ValueError(f"base_lr must be finite, got {base_lr}")
    return base_lr * (1.0 - iter / max_iter) ** power
