"""
Early fusion of RGB and depth, and residual fusion of the two decoder branches.

The encoder is a single stream whose first layer receives both modalities:

- ``CatHe``: depth is concatenated as a fourth input channel and the first
  layer is He-initialized. Because the four channels are parallel, the layer
  can suppress the depth response without touching the color response.
- ``AddHe``: depth is added to every color channel, He-initialized layer.
- ``AddP``: same addition, but the layer keeps provided pretrained 3-channel
  weights.

The final saliency map fuses the logits of the saliency and background
branches through a residual connection (:class:`FuseStrategy`).
"""
from dataclasses import dataclass
from enum import Enum

import torch

from rgbd_saliency_benchmark.helpers.errors import DimensionError
from rgbd_saliency_benchmark.operation.attention.deda import as_depth_map
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE, ConvSpec, as_tensor, conv2d, sigmoid

FIRST_LAYER_CHANNELS = 64


class FusionTag(str, Enum):
    CAT_HE = "CatHe"
    ADD_HE = "AddHe"
    ADD_P = "AddP"


class FuseStrategy(str, Enum):
    RESIDUAL = "residual"
    DIFFERENCE = "difference"
    COMPLEMENT = "complement"


@dataclass(frozen=True, eq=False)
class FusionVariant:
    """
    First encoder layer of one early-fusion scheme.

    Attributes:
        tag (FusionTag): Fusion scheme.
        first_layer (ConvSpec): 4 input channels for ``CatHe``, 3 otherwise,
            64 output channels.
    """

    tag: FusionTag
    first_layer: ConvSpec

    def __post_init__(self):
        tag = FusionTag(self.tag)
        object.__setattr__(self, 'tag', tag)
        expected = 4 if tag is FusionTag.CAT_HE else 3
        if self.first_layer.in_channels != expected:
            raise DimensionError(
                f"{tag.value} first layer must take {expected} channels, got {self.first_layer.in_channels}")
        if self.first_layer.out_channels != FIRST_LAYER_CHANNELS:
            raise DimensionError(
                f"first layer must output {FIRST_LAYER_CHANNELS} channels, got {self.first_layer.out_channels}")

    @classmethod
    def he(cls, tag, seed, kernel_size=3):
        """He-initialized ``CatHe`` or ``AddHe`` layer."""
        tag = FusionTag(tag)
        if tag is FusionTag.ADD_P:
            raise ValueError("AddP keeps pretrained weights; use FusionVariant.pretrained")
        in_channels = 4 if tag is FusionTag.CAT_HE else 3
        return cls(tag, ConvSpec.he(FIRST_LAYER_CHANNELS, in_channels, kernel_size, seed))

    @classmethod
    def pretrained(cls, first_layer):
        """``AddP`` layer built on provided 3-channel weights."""
        return cls(FusionTag.ADD_P, first_layer)

    def without_depth_response(self):
        """Copy of a ``CatHe`` layer whose depth-channel weights are zero."""
        if self.tag is not FusionTag.CAT_HE:
            raise ValueError("only CatHe layers have a depth channel")
        kernel = self.first_layer.kernel.clone()
        kernel[:, 3] = 0.0
        conv = ConvSpec(kernel, self.first_layer.bias.clone(), self.first_layer.stride,
                        self.first_layer.padding, self.first_layer.dilation)
        return FusionVariant(self.tag, conv)

    def color_layer(self):
        """3-channel convolution made of the color columns of the layer."""
        conv = self.first_layer
        return ConvSpec(conv.kernel[:, :3].clone(), conv.bias.clone(), conv.stride, conv.padding, conv.dilation)


def fused_input(rgb, depth, tag):
    """Input of the first layer: 4-channel concatenation or depth-broadcast sum."""
    rgb = as_tensor(rgb, name="rgb image")
    depth = as_depth_map(depth)
    if rgb.dim() != 3 or rgb.shape[0] != 3:
        raise DimensionError(f"rgb image must be (3, H, W), got shape {tuple(rgb.shape)}")
    if rgb.shape[-2:] != depth.shape[-2:]:
        raise DimensionError(f"rgb {tuple(rgb.shape)} and depth {tuple(depth.shape)} spatial sizes differ")
    if FusionTag(tag) is FusionTag.CAT_HE:
        return torch.cat([rgb, depth], dim=0)
    return rgb + depth.expand(3, -1, -1)


def early_fusion_first_layer(rgb, depth, variant):
    """
    First encoder layer applied to an RGB-D pair.

    Returns:
        torch.Tensor: ``(64, H, W)`` feature.
    """
    return conv2d(fused_input(rgb, depth, variant.tag), variant.first_layer)


def residual_fuse(saliency_logits, background_logits, strategy=FuseStrategy.RESIDUAL):
    """
    Final saliency map from the two branch logits.

    ``residual``: ``sigmoid(s + (s - b))``; ``difference``: ``sigmoid(s - b)``;
    ``complement``: ``sigmoid(s + (1 - sigmoid(b)))``.
    """
    s = torch.as_tensor(saliency_logits, dtype=DTYPE)
    b = torch.as_tensor(background_logits, dtype=DTYPE)
    if s.shape != b.shape:
        raise DimensionError(f"saliency {tuple(s.shape)} and background {tuple(b.shape)} logits differ in shape")
    strategy = FuseStrategy(strategy)
    if strategy is FuseStrategy.RESIDUAL:
        fused = s + (s - b)
    elif strategy is FuseStrategy.DIFFERENCE:
        fused = s - b
    else:
        fused = s + (1.0 - sigmoid(b))
    return sigmoid(fused)
