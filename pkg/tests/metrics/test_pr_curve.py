import math
import os
import unittest

import numpy as np
import pytest

from rgbd_saliency_benchmark.helpers.config.yaml import read_yaml_config
from rgbd_saliency_benchmark.helpers.errors import DimensionError, EmptyGroundTruthError, NonFiniteError
from rgbd_saliency_benchmark.operation.metrics.absolute_error import mae
from rgbd_saliency_benchmark.operation.metrics.maps import EvalConfig, GroundTruthMask, SaliencyMap, quantize
from rgbd_saliency_benchmark.operation.metrics.pr_curve import (PRCurve, adaptive_binarize, adaptive_level,
                                                                adaptive_threshold, f_beta, f_max, f_mean, pr_curve)


def random_pair(rng, size=8):
    pred = rng.random((size, size))
    mask = rng.random((size, size)) > 0.5
    mask[0, 0], mask[0, 1] = True, False
    return SaliencyMap(pred), GroundTruthMask(mask)


@pytest.mark.order(8)
class TestPrecisionRecall(unittest.TestCase):

    def setUp(self):
        self.conf = read_yaml_config(os.path.join('tests/config/', "config.yaml"))
        self.cfg = EvalConfig.from_conf(self.conf)
        self.rng = np.random.default_rng(self.conf.get('seed', 42))

    def test_map_validation(self):
        self.assertEqual(SaliencyMap(np.zeros((1, 3, 4))).shape, (3, 4))
        with self.assertRaises(ValueError):
            SaliencyMap(np.full((2, 2), 1.5))
        with self.assertRaises(NonFiniteError):
            SaliencyMap(np.array([[0.1, np.nan]]))
        with self.assertRaises(DimensionError):
            SaliencyMap(np.zeros((2, 2, 2)))
        with self.assertRaises(ValueError):
            GroundTruthMask(np.array([[0.0, 0.5]]))
        mask = GroundTruthMask(np.array([[0.0, 1.0]]))
        self.assertEqual((mask.positives, mask.is_empty), (1, False))
        gray = GroundTruthMask.from_gray(np.array([[127 / 255, 128 / 255]]), threshold=128)
        self.assertEqual(gray.values.tolist(), [[False, True]])

    def test_quantization_rounds_half_up(self):
        self.assertEqual(quantize(np.array([0.0, 0.5, 1.0, 0.6 / 255])).tolist(), [0, 128, 255, 1])

    def test_mae_examples(self):
        pred, gt = random_pair(self.rng)
        self.assertEqual(mae(SaliencyMap(gt.values.astype(float)), gt), 0.0)
        self.assertEqual(mae(SaliencyMap(np.ones((4, 4))), GroundTruthMask(np.zeros((4, 4), dtype=bool))), 1.0)
        total = 0.0
        for i in range(8):
            for j in range(8):
                total += abs(pred.values[i, j] - float(gt.values[i, j]))
        self.assertAlmostEqual(mae(pred, gt), total / 64, places=15)
        self.assertAlmostEqual(mae(pred, gt) + mae(SaliencyMap(1.0 - pred.values), gt), 1.0, places=12)
        with self.assertRaises(DimensionError):
            mae(SaliencyMap(np.zeros((4, 4))), GroundTruthMask(np.zeros((4, 5), dtype=bool)))

    def test_perfect_curve(self):
        _, gt = random_pair(self.rng)
        curve = pr_curve(SaliencyMap(gt.values.astype(float)), gt, self.cfg)
        self.assertEqual(curve.precision.shape, (256,))
        self.assertTrue(np.all(curve.precision[:255] == 1.0))
        self.assertTrue(np.all(curve.recall[:255] == 1.0))
        self.assertEqual((curve.precision[255], curve.recall[255]), (0.0, 0.0))
        self.assertEqual(f_max(curve, self.cfg), 1.0)

    def test_constant_half_prediction(self):
        gt = GroundTruthMask(np.array([[True, False], [False, True]]))
        curve = pr_curve(SaliencyMap(np.full((2, 2), 0.5)), gt, self.cfg)
        self.assertTrue(np.all(curve.precision[:128] == 0.5))
        self.assertTrue(np.all(curve.recall[:128] == 1.0))
        self.assertTrue(np.all(curve.recall[128:] == 0.0))
        self.assertTrue(np.all(curve.precision[128:] == 0.0))

    def test_sweep_matches_bruteforce_recount(self):
        for _ in range(20):
            pred, gt = random_pair(self.rng)
            curve = pr_curve(pred, gt, self.cfg)
            levels = quantize(pred.values)
            for t in range(256):
                binary = levels > t
                tp = int(np.sum(binary & gt.values))
                fp = int(np.sum(binary & ~gt.values))
                self.assertEqual((curve.tp[t], curve.fp[t]), (tp, fp))
                self.assertEqual(curve.precision[t], tp / (tp + fp) if tp + fp else 0.0)
                self.assertEqual(curve.recall[t], tp / gt.positives)

    def test_f_beta(self):
        self.assertEqual(f_beta(1.0, 1.0, 0.3), 1.0)
        self.assertEqual(f_beta(0.0, 0.0, 0.3), 0.0)
        self.assertAlmostEqual(f_beta(0.5, 1.0, 0.3), 1.3 * 0.5 / (0.15 + 1.0), places=15)
        self.assertAlmostEqual(f_beta(0.5, 1.0, 0.3), 0.5652173913043478, places=15)
        for v in (0.1, 0.42, 0.9):
            for beta_sq in (0.3, 1.0, 2.0):
                self.assertAlmostEqual(f_beta(v, v, beta_sq), v, places=15)
        self.assertEqual(f_beta(np.array([1.0, 0.0]), np.array([1.0, 0.0])).tolist(), [1.0, 0.0])

    def test_f_max(self):
        self.assertEqual(f_max(PRCurve(np.zeros(256), np.zeros(256)), self.cfg), 0.0)
        precision = self.rng.random(256)
        recall = self.rng.random(256)
        best = 0.0
        for p, r in zip(precision, recall):
            best = max(best, (1.3 * p * r) / (0.3 * p + r))
        self.assertAlmostEqual(f_max(PRCurve(precision, recall), self.cfg), best, places=14)

    def test_f_mean_examples(self):
        _, gt = random_pair(self.rng)
        self.assertEqual(f_mean(SaliencyMap(gt.values.astype(float)), gt, self.cfg), 1.0)
        full = GroundTruthMask(np.ones((4, 4), dtype=bool))
        self.assertEqual(f_mean(SaliencyMap(np.full((4, 4), 0.3)), full, self.cfg), 0.0)

    def test_f_mean_matches_recomputation(self):
        for rule, factor in (("twice-mean", 2.0), ("mean", 1.0)):
            cfg = EvalConfig(adaptive_rule=rule)
            for _ in range(10):
                pred, gt = random_pair(self.rng)
                levels = np.floor(pred.values * 255 + 0.5)
                threshold = min(factor * levels.mean(), 255.0)
                binary = levels >= max(threshold, 1.0)
                tp = np.sum(binary & gt.values)
                precision = tp / binary.sum() if binary.sum() else 0.0
                recall = tp / gt.values.sum()
                expected = 1.3 * precision * recall / (0.3 * precision + recall) if precision + recall else 0.0
                self.assertAlmostEqual(adaptive_threshold(pred, cfg), threshold, places=12)
                self.assertAlmostEqual(f_mean(pred, gt, cfg), expected, places=14)

    def test_adaptive_binarization_is_a_sweep_level(self):
        for _ in range(20):
            pred, gt = random_pair(self.rng)
            level = adaptive_level(pred, self.cfg)
            self.assertTrue(np.array_equal(adaptive_binarize(pred, self.cfg), pred.quantized > level))
            self.assertLessEqual(f_mean(pred, gt, self.cfg), f_max(pr_curve(pred, gt, self.cfg), self.cfg))
        dark = SaliencyMap(np.zeros((3, 3)))
        self.assertEqual(adaptive_level(dark, self.cfg), 0)
        self.assertFalse(adaptive_binarize(dark, self.cfg).any())

    def test_empty_ground_truth_policy(self):
        pred = SaliencyMap(self.rng.random((4, 4)))
        empty = GroundTruthMask(np.zeros((4, 4), dtype=bool))
        with self.assertRaises(EmptyGroundTruthError):
            pr_curve(pred, empty, self.cfg)
        with self.assertRaises(EmptyGroundTruthError):
            f_mean(pred, empty, self.cfg)
        zero = EvalConfig(empty_gt_policy="zero")
        curve = pr_curve(pred, empty, zero)
        self.assertTrue(np.all(curve.recall == 0.0))
        self.assertEqual(f_max(curve, zero), 0.0)
        self.assertEqual(f_mean(pred, empty, zero), 0.0)

    def test_curve_average(self):
        a = PRCurve(np.full(256, 0.2), np.full(256, 0.4))
        b = PRCurve(np.full(256, 0.6), np.full(256, 0.8))
        average = PRCurve.average([a, b])
        self.assertTrue(np.allclose(average.precision, 0.4, rtol=0, atol=1e-15))
        self.assertTrue(np.allclose(average.recall, 0.6, rtol=0, atol=1e-15))
        self.assertEqual(average.thresholds.tolist(), list(range(256)))
        self.assertTrue(math.isclose(f_max(average), 1.3 * 0.4 * 0.6 / (0.3 * 0.4 + 0.6), abs_tol=1e-14))
