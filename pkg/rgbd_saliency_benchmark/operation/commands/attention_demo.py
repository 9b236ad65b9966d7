"""
Attention Demo
==============

The `AttentionDemo` task runs the depth-enhanced dual attention and the
pyramidally attended feature extraction on one input and dumps every
intermediate map for inspection.

Without inputs, the demo builds a centered-disk depth map and flat features,
so the attention maps are expected to light up inside the disk. The mask
convolution averages its window unless a weight bundle provides
``eq1_conv_level_<level>``; the pyramid is He-initialized unless the bundle
provides its ``pafe_*`` and ``fuse`` roles.

**Outputs**

Each map is written as a min-max scaled 8-bit PNG plus a raw ``.sodt`` dump:
``a_m``, ``a_sd``, ``a_bd`` (absent for the single-branch attention variants),
``pafe_<branch>`` (channel mean of each branch), ``pafe_out``, the branch
logits ``s_logits`` and ``b_logits`` and the final ``saliency`` map.

Each branch logit is the channel mean of ``pafe_out`` modulated by the branch
attention. ``saliency`` fuses both logits with ``fuse_strategy``; without a
background branch it is the sigmoid of ``s_logits``. ``scales.yaml`` records
the minimum and maximum used to scale every PNG.

**Configuration**

.. code-block:: yaml

    seed: 42
    kernels:
      dilation_rates: [2, 4, 6]
      tie_pafe_weights: False
      attention_variant: DEDA  # DA | MGA | DEFA | DEDA
      fuse_strategy: residual  # residual | difference | complement
    demo:
      output_dir: "~/data/sod/demo"
      size: 32               # synthetic map extent
      channels: 4            # synthetic feature channels
      branch_channels: 4     # channels of every pyramid branch
      disk_radius: 0.3       # synthetic disk radius, fraction of size
      level: 5               # encoder level of the mask convolution
      features: False        # .sodt (C, H, W) feature tensor
      depth_map: False       # depth raster
      weights: False         # weight bundle manifest
"""
import os
import sys

import torch
import yaml

from rgbd_saliency_benchmark.helpers.errors import SodBenchError
from rgbd_saliency_benchmark.operation.attention.deda import (AttentionVariant, align_depth, apply_dual_attention,
                                                              dual_attention, mask_guided_attention)
from rgbd_saliency_benchmark.operation.attention.fusion import FuseStrategy, residual_fuse
from rgbd_saliency_benchmark.operation.attention.pafe import DEFAULT_DILATION_RATES, PafeConfig, pafe_branches
from rgbd_saliency_benchmark.operation.attention.weights import load_weight_bundle, pafe_config_from_bundle
from rgbd_saliency_benchmark.operation.io.maps import MapKind, load_gray_map, normalize_depth, save_gray_map
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE, ConvSpec, conv2d, sigmoid
from rgbd_saliency_benchmark.operation.tensor.serialization import TENSOR_SUFFIX, read_tensor, write_tensor
from rgbd_saliency_benchmark.tasks.base import BaseTaskInitializer

SCALES_NAME = "scales.yaml"
MASK_LEVELS = range(1, 6)


def centered_disk(size, radius):
    """``(1, size, size)`` map, 1 inside a centered disk of ``radius * size``, 0 outside."""
    axis = torch.arange(size, dtype=DTYPE) + 0.5 - size / 2.0
    rows, cols = torch.meshgrid(axis, axis, indexing='ij')
    return (torch.hypot(rows, cols) <= radius * size).to(DTYPE).unsqueeze(0)


def min_max_scale(values):
    """Scale to ``[0, 1]``; returns the scaled map with its minimum and maximum."""
    low = float(values.min())
    high = float(values.max())
    if high == low:
        return torch.zeros_like(values), low, high
    return (values - low) / (high - low), low, high


class AttentionDemo(BaseTaskInitializer):
    """Dump the attention maps and pyramid branches of one input."""

    def __init__(self, conf, stream=None):
        super().__init__(conf)
        self.section = conf.get('demo', {}) or {}
        self.kernels = conf.get('kernels', {}) or {}
        self.seed = int(conf.get('seed', 42))
        self.output_dir = os.path.expanduser(self.section.get('output_dir', './demo'))
        self.stream = stream or sys.stdout
        self.variant = AttentionVariant.DEDA
        self.strategy = FuseStrategy.RESIDUAL

    def load_inputs(self):
        """Features ``(C, H, W)`` and depth ``(1, H, W)``, read or synthesized."""
        size = int(self.section.get('size', 32))
        features_path = self.section.get('features', False)
        if features_path:
            features = read_tensor(features_path)
            if features.dim() != 3:
                raise ValueError(f"{features_path}: features must be (C, H, W), got {tuple(features.shape)}")
        else:
            features = torch.full((int(self.section.get('channels', 4)), size, size), 0.5, dtype=DTYPE)

        depth_path = self.section.get('depth_map', False)
        if depth_path:
            depth = normalize_depth(load_gray_map(depth_path, MapKind.DEPTH))
        else:
            depth = centered_disk(features.shape[-1], float(self.section.get('disk_radius', 0.3)))
        return features, depth

    def load_weights(self, channels):
        """Mask convolution and pyramid configuration."""
        rates = tuple(self.kernels.get('dilation_rates', DEFAULT_DILATION_RATES))
        tie = bool(self.kernels.get('tie_pafe_weights', False))
        bundle = load_weight_bundle(self.section['weights']) if self.section.get('weights', False) else {}
        level = int(self.section.get('level', 5))
        if level not in MASK_LEVELS:
            raise ValueError(f"mask level must lie in 1..5, got {level}")
        mask_conv = bundle.get(f"eq1_conv_level_{level}") or ConvSpec.averaging(1, channels, 3)
        if 'fuse' in bundle:
            pafe = pafe_config_from_bundle(bundle, rates, tie_weights=tie)
        else:
            branch_channels = int(self.section.get('branch_channels', 4))
            pafe = PafeConfig.he(channels, branch_channels, channels, self.seed, rates, tie_weights=tie)
        return mask_conv, pafe

    def start(self):
        """
        Compute and dump every map.

        Returns:
            int: 0 on success, 2 on a decoding, weight, shape or setting error.
        """
        try:
            self.variant = AttentionVariant(self.kernels.get('attention_variant', AttentionVariant.DEDA.value))
            self.strategy = FuseStrategy(self.kernels.get('fuse_strategy', FuseStrategy.RESIDUAL.value))
            features, depth = self.load_inputs()
            mask_conv, pafe = self.load_weights(features.shape[0])
            self.logger.info(f"Running the {self.variant.value} attention demo on features {tuple(features.shape)}")
            maps = self.process((features, depth, mask_conv, pafe))
            self.store_entry(maps)
            return 0
        except (SodBenchError, OSError, ValueError) as e:
            self.logger.error(f"Demo failed: {e}")
            return 2

    def process(self, item):
        """Ordered ``name -> tensor`` maps of one input."""
        features, depth, mask_conv, pafe = item
        a_m = mask_guided_attention(features, None, depth, mask_conv)
        aligned = align_depth(depth, a_m)
        a_sd, a_bd = dual_attention(a_m, aligned, self.variant)
        maps = {'a_m': a_m, 'a_sd': a_sd}
        if a_bd is not None:
            maps['a_bd'] = a_bd
        branches = pafe_branches(features, pafe)
        for label, branch in zip(pafe.branch_labels, branches):
            maps[f"pafe_{label}"] = branch
        pafe_out = conv2d(torch.cat(branches, dim=0), pafe.fuse)
        maps['pafe_out'] = pafe_out
        maps['s_logits'] = apply_dual_attention(pafe_out, a_sd).mean(dim=0, keepdim=True)
        if a_bd is None:
            maps['saliency'] = sigmoid(maps['s_logits'])
        else:
            maps['b_logits'] = apply_dual_attention(pafe_out, a_bd).mean(dim=0, keepdim=True)
            maps['saliency'] = residual_fuse(maps['s_logits'], maps['b_logits'], self.strategy)
        return maps

    def store_entry(self, maps):
        """Write the PNG and ``.sodt`` pair of every map plus ``scales.yaml``."""
        os.makedirs(self.output_dir, exist_ok=True)
        scales = {}
        for name, values in maps.items():
            write_tensor(os.path.join(self.output_dir, f"{name}{TENSOR_SUFFIX}"), values)
            plane = values.mean(dim=0, keepdim=True) if values.shape[0] > 1 else values
            scaled, low, high = min_max_scale(plane)
            save_gray_map(os.path.join(self.output_dir, f"{name}.png"), scaled)
            scales[name] = {'min': low, 'max': high}
            self.stream.write(f"{name:<12} min={low:.6f} max={high:.6f}\n")
        with open(os.path.join(self.output_dir, SCALES_NAME), "w") as handle:
            yaml.safe_dump(scales, handle, sort_keys=False)
        self.logger.info(f"Demo maps written to {self.output_dir}")
