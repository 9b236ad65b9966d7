"""
Gradient Check
==============

The `GradientCheck` task compares the analytic derivatives used by the
attention network with central finite differences on seeded random tensors.

Every check reduces a kernel to a scalar ``f(x) = sum(kernel(x) * w)`` (or the
loss itself), evaluates its analytic gradient and the finite-difference
gradient, and reports the max-norm relative error over all instances. The task
fails when any error exceeds the tolerance.

==========================  ==================================================
check                       analytic gradient
==========================  ==================================================
``deda_saliency``           ``2 A_m + D``
``deda_background``         ``-(2 (1 - A_m) + D)``
``sigmoid``                 ``w s (1 - s)``
``softmax``                 ``s (w - sum(s w))``
``conv2d``                  transposed convolution of ``w``
``bce``                     ``(p - g) / (p (1 - p)) / N``
==========================  ==================================================

**Configuration**

.. code-block:: yaml

    seed: 42
    kernels:
      bce_clamp: 1.0e-7    # probability clamp of the checked loss
    gradcheck:
      eps: 1.0e-5          # finite-difference step
      tolerance: 1.0e-5    # largest accepted relative error
      instances: 100       # random instances per check
      size: 8              # spatial extent of the random maps
      zero_inputs: False   # replace every random input by zeros
"""
import sys
import zlib
from functools import partial

import torch
import torch.nn.functional as F

from rgbd_saliency_benchmark.helpers.parallel import ordered_map
from rgbd_saliency_benchmark.operation.attention.deda import (deda_background_gradient, deda_gradient,
                                                              depth_enhanced_background_attention,
                                                              depth_enhanced_saliency_attention)
from rgbd_saliency_benchmark.operation.attention.training import BCE_CLAMP, bce_gradient, bce_loss
from rgbd_saliency_benchmark.operation.tensor.core import (DTYPE, ConvSpec, conv2d, finite_diff_grad,
                                                           relative_error, sigmoid, softmax)
from rgbd_saliency_benchmark.tasks.base import BaseTaskInitializer


class _Sampler:
    """Seeded tensors, or zeros when the inputs are zeroed."""

    def __init__(self, seed, zero):
        self.generator = torch.Generator().manual_seed(seed)
        self.zero = zero

    def uniform(self, shape, low=0.0, high=1.0):
        if self.zero:
            return torch.zeros(shape, dtype=DTYPE)
        return low + (high - low) * torch.rand(shape, generator=self.generator, dtype=DTYPE)

    def normal(self, shape):
        if self.zero:
            return torch.zeros(shape, dtype=DTYPE)
        return torch.randn(shape, generator=self.generator, dtype=DTYPE)


def check_deda_saliency(sampler, size, eps):
    a_m = sampler.uniform((1, size, size), 0.05, 0.95)
    d = sampler.uniform((1, size, size))
    numeric = finite_diff_grad(lambda a: depth_enhanced_saliency_attention(a, d).sum(), a_m, eps)
    return relative_error(deda_gradient(a_m, d), numeric)


def check_deda_background(sampler, size, eps):
    a_m = sampler.uniform((1, size, size), 0.05, 0.95)
    d = sampler.uniform((1, size, size))
    numeric = finite_diff_grad(lambda a: depth_enhanced_background_attention(a, d).sum(), a_m, eps)
    return relative_error(deda_background_gradient(a_m, d), numeric)


def check_sigmoid(sampler, size, eps):
    x = sampler.normal((size, size))
    w = sampler.normal((size, size))
    s = sigmoid(x)
    numeric = finite_diff_grad(lambda v: (sigmoid(v) * w).sum(), x, eps)
    return relative_error(w * s * (1.0 - s), numeric)


def check_softmax(sampler, size, eps):
    x = sampler.normal((size,))
    w = sampler.normal((size,))
    s = softmax(x)
    numeric = finite_diff_grad(lambda v: (softmax(v) * w).sum(), x, eps)
    return relative_error(s * (w - (s * w).sum()), numeric)


def check_conv2d(sampler, size, eps):
    channels = 2
    kernel = sampler.normal((channels, channels, 3, 3))
    spec = ConvSpec(kernel, sampler.normal((channels,)))
    x = sampler.normal((channels, size, size))
    w = sampler.normal((channels, size, size))
    analytic = F.conv_transpose2d(w.unsqueeze(0), spec.kernel, stride=spec.stride, padding=spec.padding,
                                  dilation=spec.dilation).squeeze(0)
    numeric = finite_diff_grad(lambda v: (conv2d(v, spec) * w).sum(), x, eps)
    return relative_error(analytic, numeric)


def check_bce(sampler, size, eps, clamp=BCE_CLAMP):
    # the loss is undefined at 0, zeroed inputs hold predictions at 0.5
    pred = 0.5 + sampler.uniform((size, size), -0.45, 0.45)
    gt = (sampler.uniform((size, size)) > 0.5).to(DTYPE)
    numeric = finite_diff_grad(lambda p: bce_loss(p, gt, clamp), pred, eps)
    return relative_error(bce_gradient(pred, gt, clamp), numeric)


CHECKS = {
    'deda_saliency': check_deda_saliency,
    'deda_background': check_deda_background,
    'sigmoid': check_sigmoid,
    'softmax': check_softmax,
    'conv2d': check_conv2d,
    'bce': check_bce,
}


class GradientCheck(BaseTaskInitializer):
    """
    Finite-difference verification of the analytic gradients.

    Attributes:
        results (dict[str, float]): Max relative error per check after ``start``.
    """

    def __init__(self, conf, stream=None):
        super().__init__(conf)
        section = conf.get('gradcheck', {}) or {}
        self.eps = float(section.get('eps', 1e-5))
        self.tolerance = float(section.get('tolerance', 1e-5))
        self.instances = int(section.get('instances', 100))
        self.size = int(section.get('size', 8))
        self.zero_inputs = bool(section.get('zero_inputs', False))
        self.bce_clamp = float((conf.get('kernels', {}) or {}).get('bce_clamp', BCE_CLAMP))
        self.seed = int(conf.get('seed', 42))
        self.stream = stream or sys.stdout
        self.results = {}

    def start(self):
        """
        Run every check.

        Returns:
            int: 0 when every error is within tolerance, 1 otherwise, 2 on an
            invalid setting.
        """
        if self.eps <= 0 or self.instances < 1 or self.size < 1:
            self.logger.error("gradcheck needs a positive eps, instance count and size")
            return 2
        if not 0.0 < self.bce_clamp < 0.5:
            self.logger.error(f"bce_clamp must lie in (0, 0.5), got {self.bce_clamp}")
            return 2
        self.logger.info(f"Running {len(CHECKS)} gradient checks, {self.instances} instance(s) each, eps={self.eps}")
        errors = ordered_map(self.process, list(CHECKS), int(self.conf.get('max_workers', 1)))
        self.results = dict(zip(CHECKS, errors))
        return self.store_entry(self.results)

    def process(self, name):
        """Largest relative error of one check over all instances."""
        check = partial(check_bce, clamp=self.bce_clamp) if name == 'bce' else CHECKS[name]
        base = self.seed + zlib.crc32(name.encode())
        worst = 0.0
        for instance in range(self.instances):
            worst = max(worst, check(_Sampler(base + instance, self.zero_inputs), self.size, self.eps))
        return worst

    def store_entry(self, results):
        """Print the error table and map it to an exit code."""
        failing = [name for name, error in results.items() if not error <= self.tolerance]
        for name, error in results.items():
            status = "FAIL" if name in failing else "ok"
            self.stream.write(f"{name:<16} {error:.3e} {status}\n")
        if failing:
            self.logger.error(f"Gradient checks above tolerance {self.tolerance:g}: {', '.join(failing)}")
            return 1
        self.logger.info("Every gradient matches its finite-difference estimate")
        return 0
