"""
Pyramidally Attended Feature Extraction
=======================================

Multi-scale context on the top encoder feature. Five parallel branches are
concatenated along channels and fused by a ``1 x 1`` convolution:

1. a ``1 x 1`` convolution,
2. three ``3 x 3`` dilated convolutions (rates ``[2, 4, 6]`` by default), each
   refined by a non-local pairwise attention (:func:`pafe_branch`),
3. global average pooling followed by a ``1 x 1`` convolution, replicated back
   to ``H x W``.

The ``1 x 1`` and pooling branches keep the minimal and maximal receptive field
untouched, so they carry no attention. Setting ``attended=False`` in
:class:`PafeConfig` removes the attention from the dilated branches too, which
gives the plain atrous pyramid used as ablation baseline.

**Pairwise attention**

With ``Q = R1(conv_att(F_in))`` of shape ``(C, N)``, ``N = H * W``:

- ``A = softmax(Q^T Q)`` row-wise, an ``N x N`` map whose rows sum to one,
- ``F_out = F_in + R2(R1(conv_val(F_in)) A^T)``.
"""
from dataclasses import dataclass, field

import torch

from rgbd_saliency_benchmark.helpers.errors import ConfigurationError, DimensionError
from rgbd_saliency_benchmark.operation.tensor.core import (ConvSpec, as_tensor, conv2d, global_avg_pool,
                                                           matmul, softmax)

DEFAULT_DILATION_RATES = (2, 4, 6)


def _check_pointwise(conv, channels, role):
    if conv.kernel_size != (1, 1):
        raise DimensionError(f"{role} convolution must be 1x1, got {conv.kernel_size}")
    if conv.in_channels != channels or conv.out_channels != channels:
        raise DimensionError(
            f"{role} convolution must map {channels} -> {channels} channels, "
            f"got {conv.in_channels} -> {conv.out_channels}")


def pafe_attention(f_in, conv):
    """
    Pairwise attention ``softmax(R1(conv(F_in))^T x R1(conv(F_in)))``.

    Args:
        f_in (torch.Tensor): ``(C, H, W)`` feature.
        conv (ConvSpec): ``1 x 1`` channel-preserving convolution.

    Returns:
        torch.Tensor: ``(N, N)`` map, ``N = H * W``, rows summing to one.
    """
    f_in = as_tensor(f_in, name="attention input")
    if f_in.dim() != 3:
        raise DimensionError(f"attention input must be (C, H, W), got shape {tuple(f_in.shape)}")
    channels = f_in.shape[0]
    _check_pointwise(conv, channels, "attention")
    query = conv2d(f_in, conv).reshape(channels, -1)
    return softmax(matmul(query.t(), query), axis=-1)


def pafe_branch(f_in, conv_att, conv_val):
    """
    Attention-enhanced feature ``F_in + R2(R1(conv_val(F_in)) x A^T)``.

    Returns:
        torch.Tensor: ``(C, H, W)``.
    """
    f_in = as_tensor(f_in, name="branch input")
    if f_in.dim() != 3:
        raise DimensionError(f"branch input must be (C, H, W), got shape {tuple(f_in.shape)}")
    channels = f_in.shape[0]
    _check_pointwise(conv_val, channels, "value")
    attention = pafe_attention(f_in, conv_att)
    value = conv2d(f_in, conv_val).reshape(channels, -1)
    return f_in + matmul(value, attention.t()).reshape(f_in.shape)


@dataclass(eq=False)
class PafeConfig:
    """
    Weights of the five-branch pyramid.

    Attributes:
        branch_1x1 (ConvSpec): ``1 x 1`` branch.
        dilated (list[ConvSpec]): ``3 x 3`` dilated branch convolutions.
        attention (list[ConvSpec]): Attention convolution per dilated branch.
        value (list[ConvSpec] | None): Value convolution per dilated branch;
            ignored when ``tie_weights`` is set.
        pooled (ConvSpec): ``1 x 1`` convolution after global average pooling.
        fuse (ConvSpec): ``1 x 1`` convolution over the concatenated branches.
        dilation_rates (tuple[int]): Rates of the dilated branches.
        tie_weights (bool): Reuse the attention convolution as value convolution.
        attended (bool): Apply the pairwise attention to the dilated branches.
    """

    branch_1x1: ConvSpec
    dilated: list
    attention: list
    value: list
    pooled: ConvSpec
    fuse: ConvSpec
    dilation_rates: tuple = DEFAULT_DILATION_RATES
    tie_weights: bool = False
    attended: bool = True
    in_channels: int = field(init=False)

    def __post_init__(self):
        self.dilation_rates = tuple(int(rate) for rate in self.dilation_rates)
        if not self.dilation_rates or any(rate < 1 for rate in self.dilation_rates):
            raise ConfigurationError(f"dilation rates must be positive, got {self.dilation_rates}")
        branches = len(self.dilation_rates)
        if len(self.dilated) != branches or len(self.attention) != branches:
            raise ConfigurationError(
                f"{branches} dilation rates need {branches} dilated and attention convolutions, "
                f"got {len(self.dilated)} and {len(self.attention)}")
        if not self.tie_weights and (self.value is None or len(self.value) != branches):
            raise ConfigurationError(f"untied weights need {branches} value convolutions")

        self.in_channels = self.branch_1x1.in_channels
        if self.branch_1x1.kernel_size != (1, 1) or self.pooled.kernel_size != (1, 1):
            raise ConfigurationError("the 1x1 and pooling branches must use 1x1 convolutions")
        if self.pooled.in_channels != self.in_channels:
            raise ConfigurationError("pooling branch input channels differ from the 1x1 branch")
        for rate, conv in zip(self.dilation_rates, self.dilated):
            if conv.kernel_size != (3, 3) or conv.dilation != rate or conv.in_channels != self.in_channels:
                raise ConfigurationError(
                    f"dilated branch must be a 3x3 convolution with rate {rate} over {self.in_channels} channels")
            if conv.padding != rate:
                raise ConfigurationError(f"dilated branch with rate {rate} must preserve the spatial extent")
        concatenated = self.branch_1x1.out_channels + self.pooled.out_channels + sum(
            conv.out_channels for conv in self.dilated)
        if self.fuse.kernel_size != (1, 1) or self.fuse.in_channels != concatenated:
            raise ConfigurationError(
                f"fuse convolution must be 1x1 over {concatenated} channels, got "
                f"{self.fuse.kernel_size} over {self.fuse.in_channels}")

    def value_conv(self, index):
        return self.attention[index] if self.tie_weights else self.value[index]

    @property
    def out_channels(self):
        return self.fuse.out_channels

    @property
    def branch_labels(self):
        return ["1x1"] + [f"d{rate}" for rate in self.dilation_rates] + ["pool"]

    @classmethod
    def he(cls, in_channels, branch_channels, out_channels, seed, dilation_rates=DEFAULT_DILATION_RATES,
           tie_weights=False, attended=True):
        """He-initialized pyramid; every convolution draws from its own derived seed."""
        rates = tuple(dilation_rates)
        seeds = iter(range(seed, seed + 4 + 3 * len(rates)))
        return cls(
            branch_1x1=ConvSpec.he(branch_channels, in_channels, 1, next(seeds)),
            dilated=[ConvSpec.he(branch_channels, in_channels, 3, next(seeds), dilation=rate) for rate in rates],
            attention=[ConvSpec.he(branch_channels, branch_channels, 1, next(seeds)) for _ in rates],
            value=[ConvSpec.he(branch_channels, branch_channels, 1, next(seeds)) for _ in rates],
            pooled=ConvSpec.he(branch_channels, in_channels, 1, next(seeds)),
            fuse=ConvSpec.he(out_channels, branch_channels * (len(rates) + 2), 1, next(seeds)),
            dilation_rates=rates,
            tie_weights=tie_weights,
            attended=attended,
        )

    @classmethod
    def zeros(cls, in_channels, branch_channels, out_channels, dilation_rates=DEFAULT_DILATION_RATES):
        rates = tuple(dilation_rates)
        return cls(
            branch_1x1=ConvSpec.zeros(branch_channels, in_channels, 1),
            dilated=[ConvSpec.zeros(branch_channels, in_channels, 3, dilation=rate) for rate in rates],
            attention=[ConvSpec.zeros(branch_channels, branch_channels, 1) for _ in rates],
            value=[ConvSpec.zeros(branch_channels, branch_channels, 1) for _ in rates],
            pooled=ConvSpec.zeros(branch_channels, in_channels, 1),
            fuse=ConvSpec.zeros(out_channels, branch_channels * (len(rates) + 2), 1),
            dilation_rates=rates,
        )


def pafe_branches(f_top, cfg):
    """
    Outputs of the five branches before concatenation.

    Returns:
        list[torch.Tensor]: ``[1x1, dilated..., pool]``, each ``(C_b, H, W)``.
    """
    f_top = as_tensor(f_top, name="top feature")
    if f_top.dim() != 3:
        raise DimensionError(f"top feature must be (C, H, W), got shape {tuple(f_top.shape)}")
    if f_top.shape[0] != cfg.in_channels:
        raise DimensionError(f"top feature has {f_top.shape[0]} channels, the pyramid expects {cfg.in_channels}")
    _, height, width = f_top.shape

    outputs = [conv2d(f_top, cfg.branch_1x1)]
    for index, conv in enumerate(cfg.dilated):
        branch = conv2d(f_top, conv)
        if cfg.attended:
            branch = pafe_branch(branch, cfg.attention[index], cfg.value_conv(index))
        outputs.append(branch)
    pooled = conv2d(global_avg_pool(f_top), cfg.pooled)
    outputs.append(pooled.expand(-1, height, width).clone())
    return outputs


def pafe_module(f_top, cfg):
    """
    Fused multi-scale feature ``fuse(concat(branches))``.

    Returns:
        torch.Tensor: ``(cfg.out_channels, H, W)``.
    """
    return conv2d(torch.cat(pafe_branches(f_top, cfg), dim=0), cfg.fuse)
