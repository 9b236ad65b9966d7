"""
Tensor Core
===========

Dense 64-bit tensor arithmetic shared by the attention kernels and the gradient
checks. Tensors are ``torch.Tensor`` objects of dtype ``torch.float64`` with
``(channels, height, width)`` or ``(batch, channels, height, width)`` layout.
Every function is pure: inputs are never modified in place.

**Conventions**

- Convolution is cross-correlation with zero padding; the default padding of a
  :class:`ConvSpec` preserves the spatial extent at stride 1.
- Resampling follows the align-corners-false convention.
- :func:`he_init` draws from a seeded generator, so identical seeds give
  identical tensors.
"""
import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from rgbd_saliency_benchmark.helpers.errors import DimensionError, NonFiniteError

DTYPE = torch.float64

_FINFO = torch.finfo(DTYPE)
_SIGMOID_LOW = _FINFO.tiny
_SIGMOID_HIGH = 1.0 - _FINFO.eps / 2


def as_tensor(values, name="tensor"):
    """
    Convert ``values`` to a validated float64 tensor.

    Raises:
        DimensionError: When any extent is smaller than one.
        NonFiniteError: When a value is NaN or infinite.
    """
    tensor = torch.as_tensor(values, dtype=DTYPE)
    if tensor.dim() == 0 or any(extent < 1 for extent in tensor.shape):
        raise DimensionError(f"{name} must have extents >= 1, got shape {tuple(tensor.shape)}")
    if not bool(torch.isfinite(tensor).all()):
        raise NonFiniteError(f"{name} contains non-finite values")
    return tensor


@dataclass(frozen=True, eq=False)
class ConvSpec:
    """
    Weights and geometry of a 2-D convolution.

    Attributes:
        kernel (torch.Tensor): ``(out_channels, in_channels, kh, kw)``, odd kh/kw.
        bias (torch.Tensor): ``(out_channels,)``.
        stride (int): Positive stride.
        padding (int): Zero padding; defaults to ``dilation * (kh - 1) / 2``.
        dilation (int): Positive dilation.
    """

    kernel: torch.Tensor
    bias: torch.Tensor = None
    stride: int = 1
    padding: int = None
    dilation: int = 1

    def __post_init__(self):
        kernel = as_tensor(self.kernel, name="kernel")
        if kernel.dim() != 4:
            raise DimensionError(f"kernel must be (out, in, kh, kw), got shape {tuple(kernel.shape)}")
        out_channels, _, kh, kw = kernel.shape
        if kh % 2 == 0 or kw % 2 == 0:
            raise DimensionError(f"kernel spatial size must be odd, got {kh}x{kw}")
        bias = torch.zeros(out_channels, dtype=DTYPE) if self.bias is None else as_tensor(self.bias, name="bias")
        if tuple(bias.shape) != (out_channels,):
            raise DimensionError(f"bias must have shape ({out_channels},), got {tuple(bias.shape)}")
        if self.stride < 1 or self.dilation < 1:
            raise DimensionError(f"stride and dilation must be positive, got {self.stride} and {self.dilation}")
        padding = self.dilation * (kh - 1) // 2 if self.padding is None else self.padding
        if padding < 0:
            raise DimensionError(f"padding must be non-negative, got {padding}")
        object.__setattr__(self, 'kernel', kernel)
        object.__setattr__(self, 'bias', bias)
        object.__setattr__(self, 'padding', padding)

    @property
    def out_channels(self):
        return self.kernel.shape[0]

    @property
    def in_channels(self):
        return self.kernel.shape[1]

    @property
    def kernel_size(self):
        return tuple(self.kernel.shape[2:])

    @classmethod
    def zeros(cls, out_channels, in_channels, size=1, dilation=1, bias=0.0):
        """Convolution with an all-zero kernel and a constant bias."""
        kernel = torch.zeros((out_channels, in_channels, size, size), dtype=DTYPE)
        return cls(kernel, torch.full((out_channels,), float(bias), dtype=DTYPE), dilation=dilation)

    @classmethod
    def identity(cls, channels, size=1, dilation=1):
        """Centered identity kernel: ``conv2d(x, identity)`` returns ``x``."""
        kernel = torch.zeros((channels, channels, size, size), dtype=DTYPE)
        for channel in range(channels):
            kernel[channel, channel, size // 2, size // 2] = 1.0
        return cls(kernel, dilation=dilation)

    @classmethod
    def averaging(cls, out_channels, in_channels, size=3, dilation=1):
        """Kernel averaging every input channel over the window."""
        kernel = torch.full((out_channels, in_channels, size, size), 1.0 / (in_channels * size * size), dtype=DTYPE)
        return cls(kernel, dilation=dilation)

    @classmethod
    def he(cls, out_channels, in_channels, size, seed, dilation=1):
        """He-initialized kernel with zero bias."""
        return cls(he_init((out_channels, in_channels, size, size), seed), dilation=dilation)


def conv2d(input, spec):
    """
    Cross-correlate ``input`` with ``spec``.

    Args:
        input (torch.Tensor): ``(C_in, H, W)`` or ``(B, C_in, H, W)``.
        spec (ConvSpec): Convolution weights and geometry.

    Returns:
        torch.Tensor: ``(C_out, H', W')`` (batched when the input is) with
        ``H' = floor((H + 2p - d(kh - 1) - 1) / s) + 1``.
    """
    x = torch.as_tensor(input, dtype=DTYPE)
    if x.dim() not in (3, 4):
        raise DimensionError(f"conv2d expects (C, H, W) or (B, C, H, W), got shape {tuple(x.shape)}")
    batched = x.dim() == 4
    if not batched:
        x = x.unsqueeze(0)
    if x.shape[1] != spec.in_channels:
        raise DimensionError(
            f"conv2d input has {x.shape[1]} channels but the kernel expects {spec.in_channels}")
    kh, kw = spec.kernel_size
    out_h = (x.shape[2] + 2 * spec.padding - spec.dilation * (kh - 1) - 1) // spec.stride + 1
    out_w = (x.shape[3] + 2 * spec.padding - spec.dilation * (kw - 1) - 1) // spec.stride + 1
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"conv2d output would be empty for input shape {tuple(x.shape)}")
    out = F.conv2d(x, spec.kernel, spec.bias, stride=spec.stride, padding=spec.padding, dilation=spec.dilation)
    return out if batched else out.squeeze(0)


def sigmoid(x):
    """
    Element-wise logistic function.

    Saturated values are held at the nearest representable numbers inside
    (0, 1), so the output range is strict for every finite input.
    """
    return torch.sigmoid(torch.as_tensor(x, dtype=DTYPE)).clamp(_SIGMOID_LOW, _SIGMOID_HIGH)


def softmax(x, axis=-1):
    """Softmax along ``axis`` (the last one by default), max-subtracted."""
    return torch.softmax(torch.as_tensor(x, dtype=DTYPE), dim=axis)


def matmul(a, b):
    """Matrix product of ``(M, K)`` and ``(K, N)`` tensors."""
    a = torch.as_tensor(a, dtype=DTYPE)
    b = torch.as_tensor(b, dtype=DTYPE)
    if a.dim() != 2 or b.dim() != 2:
        raise DimensionError(f"matmul expects 2-D operands, got {tuple(a.shape)} and {tuple(b.shape)}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner extents differ: {tuple(a.shape)} x {tuple(b.shape)}")
    return a @ b


def global_avg_pool(x):
    """Per-channel mean over the two spatial axes, keeping them as extents 1."""
    x = torch.as_tensor(x, dtype=DTYPE)
    if x.dim() < 3:
        raise DimensionError(f"global_avg_pool expects (C, H, W), got shape {tuple(x.shape)}")
    return x.mean(dim=(-2, -1), keepdim=True)


def bilinear_resize(x, out_h, out_w):
    """
    Bilinear resampling with the align-corners-false convention.

    Sample centers are ``(i + 0.5) * scale - 0.5`` clamped to the input grid.
    Both passes interpolate in ``x0 + w (x1 - x0)`` form, so a constant image
    stays exactly constant.
    """
    x = torch.as_tensor(x, dtype=DTYPE)
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"target size must be positive, got {out_h}x{out_w}")
    if x.dim() not in (3, 4):
        raise DimensionError(f"bilinear_resize expects (C, H, W) or (B, C, H, W), got shape {tuple(x.shape)}")
    if tuple(x.shape[-2:]) == (out_h, out_w):
        return x.clone()
    low, high, weight = _source_grid(x.shape[-2], out_h)
    rows = torch.lerp(x[..., low, :], x[..., high, :], weight.unsqueeze(-1))
    low, high, weight = _source_grid(x.shape[-1], out_w)
    return torch.lerp(rows[..., low], rows[..., high], weight)


def _source_grid(in_size, out_size):
    source = ((torch.arange(out_size, dtype=DTYPE) + 0.5) * (in_size / out_size) - 0.5).clamp(min=0.0)
    low = source.floor().long().clamp(max=in_size - 1)
    high = (low + 1).clamp(max=in_size - 1)
    return low, high, source - low.to(DTYPE)


def he_init(shape, rng_seed):
    """
    He-normal initialization for a ``(out, in, kh, kw)`` kernel.

    Samples are i.i.d. normal with mean 0 and variance ``2 / (in * kh * kw)``.
    """
    if len(shape) != 4 or any(extent < 1 for extent in shape):
        raise DimensionError(f"he_init expects a positive (out, in, kh, kw) shape, got {tuple(shape)}")
    generator = torch.Generator().manual_seed(int(rng_seed))
    weights = torch.empty(tuple(shape), dtype=DTYPE)
    torch.nn.init.kaiming_normal_(weights, mode="fan_in", nonlinearity="relu", generator=generator)
    return weights


def finite_diff_grad(f, x, eps=1e-5):
    """
    Central-difference gradient of a scalar function.

    Args:
        f (callable): Scalar-valued function of a tensor.
        x (torch.Tensor): Evaluation point.
        eps (float): Step size, strictly positive.

    Returns:
        torch.Tensor: ``(f(x + eps e_i) - f(x - eps e_i)) / (2 eps)`` per coordinate.

    Raises:
        NonFiniteError: When an evaluation of ``f`` is not finite.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    x = torch.as_tensor(x, dtype=DTYPE).contiguous()
    grad = torch.zeros_like(x)
    flat_grad = grad.view(-1)
    for index in range(x.numel()):
        shifted = x.clone()
        flat = shifted.view(-1)
        flat[index] = x.view(-1)[index] + eps
        upper = float(f(shifted))
        flat[index] = x.view(-1)[index] - eps
        lower = float(f(shifted))
        if not (math.isfinite(upper) and math.isfinite(lower)):
            raise NonFiniteError(f"non-finite function value at coordinate {index}")
        flat_grad[index] = (upper - lower) / (2 * eps)
    return grad


def relative_error(analytic, numeric):
    """
    Max-norm relative discrepancy ``|a - n|_inf / max(|a|_inf, |n|_inf)``.

    Returns 0 when both tensors are identically zero.
    """
    analytic = torch.as_tensor(analytic, dtype=DTYPE)
    numeric = torch.as_tensor(numeric, dtype=DTYPE)
    scale = max(float(analytic.abs().max()), float(numeric.abs().max()))
    if scale == 0.0:
        return 0.0
    return float((analytic - numeric).abs().max()) / scale
