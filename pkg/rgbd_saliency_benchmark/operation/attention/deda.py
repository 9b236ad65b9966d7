"""
Depth-Enhanced Dual Attention
=============================

The depth-enhanced dual attention (DEDA) sits between a transition layer of the
encoder and the two decoder branches. A mask-guided attention ``A_m`` is
predicted from the transition feature, the previous decoder output and the
depth map, then refined with depth into one attention per branch:

- saliency branch: ``A_sd = A_m * A_m + A_m * D``
- background branch: ``A_bd = (1 - A_m) * (1 - A_m) + (1 - A_m) * D``

Because the first terms do not depend on ``D``, both attentions keep working
when the depth value is small or zero.

**Ablation variants**

:class:`AttentionVariant` reproduces the attention schemes compared against
DEDA: the raw depth map (``DA``), the mask-guided attention alone (``MGA``) and
the depth-enhanced foreground attention alone (``DEFA``).

**Shapes**

Attentions are ``(1, H, W)`` tensors; depth maps are ``(1, H, W)`` tensors with
values in ``[0, 1]``.
"""
from enum import Enum

import torch

from rgbd_saliency_benchmark.helpers.errors import DimensionError
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE, as_tensor, bilinear_resize, conv2d, sigmoid


class AttentionVariant(str, Enum):
    DA = "DA"
    MGA = "MGA"
    DEFA = "DEFA"
    DEDA = "DEDA"


def as_depth_map(values):
    """Validate a depth map: shape ``(1, H, W)``, finite, values in ``[0, 1]``."""
    depth = as_tensor(values, name="depth map")
    if depth.dim() == 2:
        depth = depth.unsqueeze(0)
    if depth.dim() != 3 or depth.shape[0] != 1:
        raise DimensionError(f"depth map must be (1, H, W), got shape {tuple(depth.shape)}")
    if bool((depth < 0).any()) or bool((depth > 1).any()):
        raise ValueError("depth map values must lie in [0, 1]")
    return depth


def _check_maps(a_m, d):
    a_m = torch.as_tensor(a_m, dtype=DTYPE)
    d = torch.as_tensor(d, dtype=DTYPE)
    if a_m.shape != d.shape:
        raise DimensionError(f"attention {tuple(a_m.shape)} and depth {tuple(d.shape)} shapes differ")
    return a_m, d


def align_depth(d, like):
    """Resize ``d`` to the spatial size of ``like`` and broadcast it over its channels."""
    depth = as_depth_map(d)
    channels, height, width = like.shape
    if tuple(depth.shape[-2:]) != (height, width):
        depth = bilinear_resize(depth, height, width)
    return depth.expand(channels, height, width)


def mask_guided_attention(t, s_prev, d, conv):
    """
    Mask-guided attention ``A_m = sigmoid(conv(T + S + D))``.

    At the deepest level there is no previous decoder output and ``s_prev`` is
    ``None``, giving ``sigmoid(conv(T + D))``.

    Args:
        t (torch.Tensor): Transition feature ``(C, H, W)``.
        s_prev (torch.Tensor | None): Previous decoder feature ``(C, H, W)``.
        d (torch.Tensor): Depth map ``(1, h, w)``, resized to ``(H, W)`` when needed.
        conv (ConvSpec): ``C -> 1`` convolution.

    Returns:
        torch.Tensor: ``(1, H, W)`` attention strictly inside (0, 1).
    """
    t = as_tensor(t, name="transition feature")
    if t.dim() != 3:
        raise DimensionError(f"transition feature must be (C, H, W), got shape {tuple(t.shape)}")
    if conv.out_channels != 1:
        raise DimensionError(f"mask convolution must produce 1 channel, got {conv.out_channels}")
    combined = t
    if s_prev is not None:
        s_prev = as_tensor(s_prev, name="decoder feature")
        if s_prev.shape != t.shape:
            raise DimensionError(
                f"decoder feature {tuple(s_prev.shape)} does not match transition feature {tuple(t.shape)}")
        combined = combined + s_prev
    combined = combined + align_depth(d, t)
    return sigmoid(conv2d(combined, conv))


def depth_enhanced_saliency_attention(a_m, d):
    """``A_sd = A_m * A_m + A_m * D``."""
    a_m, d = _check_maps(a_m, d)
    return a_m * a_m + a_m * d


def depth_enhanced_background_attention(a_m, d):
    """``A_bd = (1 - A_m) * (1 - A_m) + (1 - A_m) * D``."""
    a_m, d = _check_maps(a_m, d)
    inverse = 1.0 - a_m
    return inverse * inverse + inverse * d


def deda_gradient(a_m, d):
    """Derivative of the saliency attention w.r.t. ``A_m``: ``2 * A_m + D``."""
    a_m, d = _check_maps(a_m, d)
    return 2.0 * a_m + d


def deda_background_gradient(a_m, d):
    """Derivative of the background attention w.r.t. ``A_m``: ``-(2 * (1 - A_m) + D)``."""
    a_m, d = _check_maps(a_m, d)
    return -(2.0 * (1.0 - a_m) + d)


def apply_dual_attention(feature, a):
    """Modulate every channel of ``feature`` ``(C, H, W)`` by the attention ``a`` ``(1, H, W)``."""
    feature = torch.as_tensor(feature, dtype=DTYPE)
    a = torch.as_tensor(a, dtype=DTYPE)
    if feature.dim() != 3 or a.dim() != 3 or a.shape[0] != 1 or feature.shape[-2:] != a.shape[-2:]:
        raise DimensionError(f"cannot apply attention {tuple(a.shape)} to feature {tuple(feature.shape)}")
    return feature * a


def dual_attention(a_m, d, variant=AttentionVariant.DEDA):
    """
    Attention pair fed to the saliency and background branches.

    Returns:
        tuple: ``(saliency_attention, background_attention)``; the background
        attention is ``None`` for the single-branch variants.
    """
    variant = AttentionVariant(variant)
    a_m, d = _check_maps(a_m, d)
    if variant is AttentionVariant.DA:
        return d.clone(), None
    if variant is AttentionVariant.MGA:
        return a_m.clone(), None
    if variant is AttentionVariant.DEFA:
        return depth_enhanced_saliency_attention(a_m, d), None
    return depth_enhanced_saliency_attention(a_m, d), depth_enhanced_background_attention(a_m, d)
