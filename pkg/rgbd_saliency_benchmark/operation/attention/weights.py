"""
Weight bundles for demos and tests.

A bundle is a directory holding one ``.sodt`` tensor per kernel and bias plus a
YAML manifest naming every convolution by role:

.. code-block:: yaml

    eq1_conv_level_5:
      kernel: eq1_conv_level_5.kernel.sodt
      bias: eq1_conv_level_5.bias.sodt
      dilation: 1
    pafe_branch_1_att:
      kernel: pafe_branch_1_att.kernel.sodt

Recognized roles: ``eq1_conv_level_<1-5>``, ``pafe_1x1``,
``pafe_branch_<k>_conv``, ``pafe_branch_<k>_att``, ``pafe_branch_<k>_val``,
``pafe_pool``, ``fuse`` and ``first_layer_<CatHe|AddHe|AddP>``.
``eq1_conv_level_<l>`` is the mask convolution of the attention at encoder
level ``l``.
"""
import os
import re

import yaml

from rgbd_saliency_benchmark.helpers.errors import DimensionError, TensorFormatError, WeightBundleError
from rgbd_saliency_benchmark.operation.attention.fusion import FusionTag, FusionVariant
from rgbd_saliency_benchmark.operation.attention.pafe import DEFAULT_DILATION_RATES, PafeConfig
from rgbd_saliency_benchmark.operation.tensor.core import ConvSpec
from rgbd_saliency_benchmark.operation.tensor.serialization import TENSOR_SUFFIX, read_tensor, write_tensor

MANIFEST_NAME = "manifest.yaml"

ROLE_PATTERN = re.compile(
    r"^(eq1_conv_level_[1-5]|pafe_1x1|pafe_pool|fuse|pafe_branch_\d+_(conv|att|val)"
    r"|first_layer_(CatHe|AddHe|AddP))$")


def _check_role(role):
    if not ROLE_PATTERN.match(role):
        raise WeightBundleError(f"unknown weight role '{role}'")


def load_weight_bundle(manifest_path):
    """
    Load every convolution named by a manifest.

    Args:
        manifest_path (str): Manifest file, or the bundle directory holding
            ``manifest.yaml``.

    Returns:
        dict[str, ConvSpec]: Convolutions keyed by role.
    """
    manifest_path = os.path.expanduser(manifest_path)
    if os.path.isdir(manifest_path):
        manifest_path = os.path.join(manifest_path, MANIFEST_NAME)
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    try:
        with open(manifest_path, "r") as handle:
            manifest = yaml.safe_load(handle) or {}
    except OSError as e:
        raise WeightBundleError(f"cannot read weight manifest {manifest_path}: {e}") from e
    if not isinstance(manifest, dict):
        raise WeightBundleError(f"{manifest_path}: manifest must map roles to entries")

    bundle = {}
    for role, entry in sorted(manifest.items()):
        _check_role(role)
        if not isinstance(entry, dict) or 'kernel' not in entry:
            raise WeightBundleError(f"{manifest_path}: role '{role}' needs a kernel file")
        try:
            kernel = read_tensor(os.path.join(base_dir, entry['kernel']))
            bias = read_tensor(os.path.join(base_dir, entry['bias'])) if entry.get('bias') else None
            bundle[role] = ConvSpec(kernel, bias, dilation=int(entry.get('dilation', 1)))
        except (OSError, TensorFormatError, ValueError) as e:
            raise WeightBundleError(f"{manifest_path}: role '{role}': {e}") from e
    return bundle


def write_weight_bundle(directory, specs):
    """
    Write convolutions and their manifest into ``directory``.

    Returns:
        str: Path of the written manifest.
    """
    directory = os.path.expanduser(directory)
    os.makedirs(directory, exist_ok=True)
    manifest = {}
    for role, spec in sorted(specs.items()):
        _check_role(role)
        kernel_name = f"{role}.kernel{TENSOR_SUFFIX}"
        bias_name = f"{role}.bias{TENSOR_SUFFIX}"
        write_tensor(os.path.join(directory, kernel_name), spec.kernel)
        write_tensor(os.path.join(directory, bias_name), spec.bias)
        manifest[role] = {'kernel': kernel_name, 'bias': bias_name, 'dilation': int(spec.dilation)}
    manifest_path = os.path.join(directory, MANIFEST_NAME)
    with open(manifest_path, "w") as handle:
        yaml.safe_dump(manifest, handle, sort_keys=True)
    return manifest_path


def pafe_config_from_bundle(bundle, dilation_rates=DEFAULT_DILATION_RATES, tie_weights=False, attended=True):
    """Assemble a :class:`PafeConfig` from the ``pafe_*`` and ``fuse`` roles of a bundle."""
    rates = tuple(dilation_rates)
    try:
        branches = range(1, len(rates) + 1)
        return PafeConfig(
            branch_1x1=bundle['pafe_1x1'],
            dilated=[bundle[f"pafe_branch_{k}_conv"] for k in branches],
            attention=[bundle[f"pafe_branch_{k}_att"] for k in branches],
            value=None if tie_weights else [bundle[f"pafe_branch_{k}_val"] for k in branches],
            pooled=bundle['pafe_pool'],
            fuse=bundle['fuse'],
            dilation_rates=rates,
            tie_weights=tie_weights,
            attended=attended,
        )
    except KeyError as e:
        raise WeightBundleError(f"weight bundle lacks role {e}") from e


def pafe_bundle_roles(cfg):
    """Inverse of :func:`pafe_config_from_bundle`: role -> convolution."""
    specs = {'pafe_1x1': cfg.branch_1x1, 'pafe_pool': cfg.pooled, 'fuse': cfg.fuse}
    for k, conv in enumerate(cfg.dilated, start=1):
        specs[f"pafe_branch_{k}_conv"] = conv
        specs[f"pafe_branch_{k}_att"] = cfg.attention[k - 1]
        if not cfg.tie_weights:
            specs[f"pafe_branch_{k}_val"] = cfg.value[k - 1]
    return specs


def fusion_variant_from_bundle(bundle, tag):
    """
    First encoder layer of ``tag`` from the ``first_layer_<tag>`` role.

    ``AddP`` layers can only come from a bundle, since their weights are
    pretrained.

    Raises:
        WeightBundleError: When the role is missing or its shape does not fit
            the scheme.
    """
    tag = FusionTag(tag)
    role = f"first_layer_{tag.value}"
    if role not in bundle:
        raise WeightBundleError(f"weight bundle lacks role '{role}'")
    try:
        if tag is FusionTag.ADD_P:
            return FusionVariant.pretrained(bundle[role])
        return FusionVariant(tag, bundle[role])
    except DimensionError as e:
        raise WeightBundleError(f"role '{role}': {e}") from e
