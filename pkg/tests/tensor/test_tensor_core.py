import math
import os
import unittest
from decimal import Decimal, localcontext

import pytest
import torch

from rgbd_saliency_benchmark.helpers.config.yaml import read_yaml_config
from rgbd_saliency_benchmark.helpers.errors import DimensionError, NonFiniteError
from rgbd_saliency_benchmark.operation.tensor.core import (DTYPE, ConvSpec, as_tensor, bilinear_resize, conv2d,
                                                           finite_diff_grad, global_avg_pool, he_init, matmul,
                                                           relative_error, sigmoid, softmax)


def naive_conv2d(x, spec):
    """Direct loop transcription of a zero-padded cross-correlation."""
    c_in, height, width = x.shape
    c_out, _, kh, kw = spec.kernel.shape
    p, s, d = spec.padding, spec.stride, spec.dilation
    out_h = (height + 2 * p - d * (kh - 1) - 1) // s + 1
    out_w = (width + 2 * p - d * (kw - 1) - 1) // s + 1
    out = torch.zeros((c_out, out_h, out_w), dtype=DTYPE)
    for o in range(c_out):
        for i in range(out_h):
            for j in range(out_w):
                total = float(spec.bias[o])
                for c in range(c_in):
                    for u in range(kh):
                        for v in range(kw):
                            row = i * s + u * d - p
                            col = j * s + v * d - p
                            if 0 <= row < height and 0 <= col < width:
                                total += float(spec.kernel[o, c, u, v]) * float(x[c, row, col])
                out[o, i, j] = total
    return out


def interpolate_at(image, out_h, out_w, i, j):
    """Scalar align-corners-false bilinear sample of a 2-D list."""
    def axis(index, in_size, out_size):
        source = max((index + 0.5) * in_size / out_size - 0.5, 0.0)
        low = min(int(math.floor(source)), in_size - 1)
        return low, min(low + 1, in_size - 1), source - low

    r0, r1, wr = axis(i, len(image), out_h)
    c0, c1, wc = axis(j, len(image[0]), out_w)
    top = image[r0][c0] * (1 - wc) + image[r0][c1] * wc
    bottom = image[r1][c0] * (1 - wc) + image[r1][c1] * wc
    return top * (1 - wr) + bottom * wr


@pytest.mark.order(1)
class TestTensorCore(unittest.TestCase):

    def setUp(self):
        self.conf = read_yaml_config(os.path.join('tests/config/', "config.yaml"))
        self.generator = torch.Generator().manual_seed(self.conf.get('seed', 42))

    def randn(self, *shape):
        return torch.randn(shape, generator=self.generator, dtype=DTYPE)

    def test_as_tensor_validation(self):
        self.assertEqual(as_tensor([[1, 2]]).dtype, torch.float64)
        with self.assertRaises(DimensionError):
            as_tensor(torch.zeros((0, 3)))
        with self.assertRaises(NonFiniteError):
            as_tensor([1.0, float('nan')])

    def test_conv_spec_validation(self):
        with self.assertRaises(DimensionError):
            ConvSpec(torch.zeros((1, 1, 2, 2), dtype=DTYPE))
        with self.assertRaises(DimensionError):
            ConvSpec(torch.zeros((2, 1, 3, 3), dtype=DTYPE), torch.zeros(3, dtype=DTYPE))
        spec = ConvSpec.zeros(2, 3, 3, dilation=4)
        self.assertEqual(spec.padding, 4)
        self.assertEqual((spec.out_channels, spec.in_channels, spec.kernel_size), (2, 3, (3, 3)))

    def test_identity_convolution(self):
        x = self.randn(3, 5, 6)
        self.assertTrue(torch.equal(conv2d(x, ConvSpec.identity(3)), x))
        self.assertTrue(torch.equal(conv2d(x, ConvSpec.identity(3, size=3, dilation=2)), x))

    def test_conv2d_matches_loop_oracle(self):
        x = self.randn(2, 7, 6)
        for stride, dilation in [(1, 1), (2, 1), (1, 2)]:
            spec = ConvSpec(self.randn(3, 2, 3, 3), self.randn(3), stride=stride, dilation=dilation)
            out = conv2d(x, spec)
            self.assertEqual(tuple(out.shape), tuple(naive_conv2d(x, spec).shape))
            self.assertLess(float((out - naive_conv2d(x, spec)).abs().max()), 1e-12)

    def test_conv2d_is_linear(self):
        spec = ConvSpec(self.randn(3, 2, 3, 3), dilation=2)
        x, y = self.randn(2, 6, 7), self.randn(2, 6, 7)
        a, b = 1.7, -0.6
        combined = conv2d(a * x + b * y, spec)
        self.assertLess(float((combined - (a * conv2d(x, spec) + b * conv2d(y, spec))).abs().max()), 1e-12)

    def test_conv2d_dilated_ramp(self):
        ramp = torch.arange(25, dtype=DTYPE).reshape(1, 5, 5)
        spec = ConvSpec(torch.ones((1, 1, 3, 3), dtype=DTYPE), dilation=2, padding=2)
        self.assertTrue(torch.equal(conv2d(ramp, spec), naive_conv2d(ramp, spec)))

    def test_conv2d_errors(self):
        with self.assertRaises(DimensionError):
            conv2d(self.randn(2, 4, 4), ConvSpec.zeros(1, 3, 1))
        with self.assertRaises(DimensionError):
            conv2d(self.randn(1, 2, 2), ConvSpec(self.randn(1, 1, 5, 5), padding=0))

    def test_sigmoid_range_is_strict(self):
        s = sigmoid(torch.tensor([-1000.0, 0.0, 1000.0], dtype=DTYPE))
        self.assertGreater(float(s[0]), 0.0)
        self.assertEqual(float(s[1]), 0.5)
        self.assertLess(float(s[2]), 1.0)

    def test_sigmoid_scalar_and_symmetry(self):
        self.assertAlmostEqual(float(sigmoid(torch.tensor(2.0, dtype=DTYPE))), 1.0 / (1.0 + math.exp(-2.0)),
                               places=15)
        x = self.randn(4, 5) * 4.0
        self.assertLess(float((sigmoid(x) + sigmoid(-x) - 1.0).abs().max()), 1e-15)
        ordered = sigmoid(torch.linspace(-30.0, 30.0, 101, dtype=DTYPE))
        self.assertTrue(bool((ordered[1:] >= ordered[:-1]).all()))

    def test_softmax_rows_sum_to_one(self):
        rows = softmax(self.randn(6, 9) * 30.0)
        self.assertLess(float((rows.sum(dim=-1) - 1.0).abs().max()), 1e-12)
        columns = softmax(self.randn(6, 9), axis=0)
        self.assertLess(float((columns.sum(dim=0) - 1.0).abs().max()), 1e-12)

    def test_softmax_shift_invariance(self):
        x = self.randn(5, 8)
        shifted = x + torch.tensor([[3.0], [-7.5], [100.0], [0.25], [-40.0]], dtype=DTYPE)
        self.assertLess(float((softmax(shifted) - softmax(x)).abs().max()), 1e-12)

    def test_softmax_examples(self):
        uniform = softmax(torch.full((1, 6), 2.5, dtype=DTYPE))
        self.assertLess(float((uniform - 1.0 / 6.0).abs().max()), 1e-15)

        saturated = softmax(torch.tensor([[1000.0, 0.0, 0.0, 0.0]], dtype=DTYPE))
        self.assertTrue(bool(torch.isfinite(saturated).all()))
        self.assertAlmostEqual(float(saturated[0, 0]), 1.0, delta=1e-12)

        with localcontext() as context:
            context.prec = 50
            exps = [Decimal(v).exp() for v in (1, 2, 3)]
            expected = [float(e / sum(exps)) for e in exps]
        values = softmax(torch.tensor([[1.0, 2.0, 3.0]], dtype=DTYPE))[0].tolist()
        for value, reference in zip(values, expected):
            self.assertAlmostEqual(value, reference, delta=1e-15)

    def test_matmul_oracle_and_associativity(self):
        a, b = self.randn(3, 4), self.randn(4, 2)
        product = matmul(a, b)
        for i in range(3):
            for j in range(2):
                expected = sum(float(a[i, k]) * float(b[k, j]) for k in range(4))
                self.assertAlmostEqual(float(product[i, j]), expected, delta=1e-12)
        self.assertTrue(torch.equal(matmul(a, torch.eye(4, dtype=DTYPE)), a))
        self.assertTrue(torch.equal(matmul(torch.zeros((3, 4), dtype=DTYPE), b), torch.zeros((3, 2), dtype=DTYPE)))
        for _ in range(20):
            x, y, z = self.randn(4, 4), self.randn(4, 4), self.randn(4, 4)
            difference = matmul(matmul(x, y), z) - matmul(x, matmul(y, z))
            self.assertLess(float(difference.abs().max()), 1e-9)

    def test_matmul_and_pool(self):
        with self.assertRaises(DimensionError):
            matmul(self.randn(2, 3), self.randn(2, 3))
        self.assertEqual(tuple(matmul(self.randn(2, 3), self.randn(3, 4)).shape), (2, 4))
        x = torch.arange(8, dtype=DTYPE).reshape(2, 2, 2)
        self.assertTrue(torch.equal(global_avg_pool(x).flatten(), torch.tensor([1.5, 5.5], dtype=DTYPE)))

    def test_bilinear_resize(self):
        x = self.randn(2, 4, 4)
        same = bilinear_resize(x, 4, 4)
        self.assertTrue(torch.equal(same, x))
        self.assertIsNot(same, x)
        constant = torch.full((1, 5, 7), 0.375, dtype=DTYPE)
        resized = bilinear_resize(constant, 11, 3)
        self.assertEqual(tuple(resized.shape), (1, 11, 3))
        self.assertLess(float((resized - 0.375).abs().max()), 1e-15)

    def test_bilinear_resize_keeps_constants_exact(self):
        for value in (0.1, 1.0 / 3.0, 0.7, 2.0 / 7.0, 0.123456789):
            for in_size, out_size in [((3, 3), (7, 7)), ((5, 7), (11, 3)), ((4, 4), (9, 2)), ((2, 6), (13, 5))]:
                constant = torch.full((2, *in_size), value, dtype=DTYPE)
                resized = bilinear_resize(constant, *out_size)
                self.assertTrue(torch.equal(resized, torch.full((2, *out_size), value, dtype=DTYPE)))

    def test_bilinear_resize_matches_scalar_interpolation(self):
        ramp = [[0.0, 1.0], [2.0, 3.0]]
        resized = bilinear_resize(torch.tensor([ramp], dtype=DTYPE), 4, 4)[0]
        for i in range(4):
            for j in range(4):
                self.assertAlmostEqual(float(resized[i, j]), interpolate_at(ramp, 4, 4, i, j), delta=1e-15)
        self.assertEqual(resized[0].tolist(), [0.0, 0.25, 0.75, 1.0])
        x = self.randn(3, 5, 4)
        out = bilinear_resize(x, 7, 9)
        image = x[1].tolist()
        for i in range(7):
            for j in range(9):
                self.assertAlmostEqual(float(out[1, i, j]), interpolate_at(image, 7, 9, i, j), delta=1e-12)

    def test_he_init_is_seeded_with_he_variance(self):
        self.assertTrue(torch.equal(he_init((4, 3, 3, 3), 7), he_init((4, 3, 3, 3), 7)))
        self.assertFalse(torch.equal(he_init((4, 3, 3, 3), 7), he_init((4, 3, 3, 3), 8)))
        samples = he_init((1000, 4, 5, 5), 42)
        target = 2.0 / (4 * 5 * 5)
        self.assertLess(abs(float(samples.var()) / target - 1.0), 0.1)

    def test_he_init_sample_statistics(self):
        samples = torch.cat([he_init((64, 4, 3, 3), seed).ravel() for seed in range(44)])
        self.assertGreaterEqual(samples.numel(), 10 ** 5)
        target = 2.0 / 36.0
        self.assertLess(abs(float(samples.var()) / target - 1.0), 0.1)
        standard_error = math.sqrt(target / samples.numel())
        self.assertLess(abs(float(samples.mean())), 3.0 * standard_error)

    def test_finite_differences(self):
        x = self.randn(3, 4)
        numeric = finite_diff_grad(lambda v: (v * v).sum(), x)
        self.assertLess(relative_error(2.0 * x, numeric), 1e-9)
        with self.assertRaises(NonFiniteError):
            finite_diff_grad(lambda v: float('inf'), x)

    def test_relative_error(self):
        zeros = torch.zeros(3, dtype=DTYPE)
        self.assertEqual(relative_error(zeros, zeros), 0.0)
        self.assertAlmostEqual(relative_error(torch.tensor([2.0, 1.0]), torch.tensor([1.0, 1.0])), 0.5)
