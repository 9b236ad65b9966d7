import os
import unittest
import warnings

import numpy as np
import pytest

from rgbd_saliency_benchmark.helpers.config.yaml import read_yaml_config
from rgbd_saliency_benchmark.helpers.errors import ConfigurationError, EvaluationError
from rgbd_saliency_benchmark.operation.metrics.evaluation import (METRIC_COLUMNS, SUMMARY_COLUMNS, evaluate_dataset,
                                                                  evaluate_pair, match_size)
from rgbd_saliency_benchmark.operation.metrics.maps import (AdaptiveRule, EMode, EmptyGtPolicy, EvalConfig,
                                                            GroundTruthMask, SaliencyMap)


def random_triple(rng, stem, size=12):
    mask = rng.random((size, size)) > 0.55
    mask[1, 1], mask[0, 0] = True, False
    return stem, SaliencyMap(rng.random((size, size))), GroundTruthMask(mask)


@pytest.mark.order(11)
class TestEvaluation(unittest.TestCase):

    def setUp(self):
        self.conf = read_yaml_config(os.path.join('tests/config/', "config.yaml"))
        self.cfg = EvalConfig.from_conf(self.conf)
        self.rng = np.random.default_rng(self.conf.get('seed', 42))

    def test_config(self):
        self.assertEqual(self.cfg, EvalConfig())
        self.assertIs(self.cfg.adaptive_rule, AdaptiveRule.TWICE_MEAN)
        self.assertIs(self.cfg.e_mode, EMode.ADAPTIVE)
        self.assertIs(self.cfg.empty_gt_policy, EmptyGtPolicy.SKIP)
        overridden = EvalConfig.from_conf(self.conf, beta_sq=1.0, e_mode="max", alpha=None)
        self.assertEqual((overridden.beta_sq, overridden.e_mode, overridden.alpha), (1.0, EMode.MAX, 0.5))
        self.assertEqual(EvalConfig.from_conf({}), EvalConfig())
        for bad in ({'alpha': 1.5}, {'beta_sq': 0.0}, {'threshold_count': 100}, {'adaptive_rule': 'median'},
                    {'wf_gauss_size': 6}, {'empty_gt_policy': 'drop'}, {'gt_threshold': 300}):
            with self.assertRaises(ConfigurationError):
                EvalConfig(**bad)

    def test_singleton_report_equals_pair(self):
        stem, pred, gt = random_triple(self.rng, "a")
        record = evaluate_pair(pred, gt, self.cfg, stem)
        report = evaluate_dataset([(stem, pred, gt)], self.cfg)
        self.assertEqual(report.f_max, record.f_max)
        for column in METRIC_COLUMNS:
            self.assertEqual(report.means[column], getattr(record, column))
        self.assertEqual(list(report.summary()), [label for label, _ in SUMMARY_COLUMNS])
        self.assertEqual(report.skipped, [])

    def test_duplicated_pair_keeps_means(self):
        triple = random_triple(self.rng, "a")
        single = evaluate_dataset([triple], self.cfg)
        double = evaluate_dataset([triple, triple], self.cfg)
        for label, value in single.summary().items():
            self.assertAlmostEqual(double.summary()[label], value, places=15)
        self.assertEqual(len(double.records), 2)

    def test_means_are_arithmetic_averages(self):
        triples = [random_triple(self.rng, stem) for stem in ("c", "a", "b")]
        report = evaluate_dataset(triples, self.cfg)
        self.assertEqual([record.stem for record in report.records], ["a", "b", "c"])
        records = [evaluate_pair(pred, gt, self.cfg, stem) for stem, pred, gt in triples]
        for column in METRIC_COLUMNS:
            expected = sum(getattr(record, column) for record in records) / 3
            self.assertAlmostEqual(report.means[column], expected, places=12)
        self.assertGreaterEqual(report.f_max, report.means['f_mean'] - 1e-12)
        frame = report.frame()
        self.assertEqual(list(frame.columns), ['stem'] + METRIC_COLUMNS)
        self.assertEqual(frame['stem'].tolist(), ["a", "b", "c"])

    def test_metric_ranges(self):
        for index in range(5):
            record = evaluate_pair(*random_triple(self.rng, f"img_{index}")[1:], self.cfg)
            for column in METRIC_COLUMNS:
                self.assertGreaterEqual(getattr(record, column), 0.0)
                self.assertLessEqual(getattr(record, column), 1.0)
            self.assertLessEqual(record.f_mean, record.f_max)

    def test_empty_ground_truth_is_skipped(self):
        triples = [random_triple(self.rng, "a"), ("b", SaliencyMap(np.full((12, 12), 0.2)),
                                                  GroundTruthMask(np.zeros((12, 12), dtype=bool)))]
        report = evaluate_dataset(triples, self.cfg)
        self.assertEqual(report.skipped, ["b"])
        self.assertEqual([record.stem for record in report.records], ["a"])
        with self.assertRaises(EvaluationError):
            evaluate_dataset(triples[1:], self.cfg)
        with self.assertRaises(EvaluationError):
            evaluate_dataset([], self.cfg)

    def test_empty_ground_truth_scores_zero(self):
        cfg = EvalConfig(empty_gt_policy="zero")
        empty = GroundTruthMask(np.zeros((6, 6), dtype=bool))
        record = evaluate_pair(SaliencyMap(np.full((6, 6), 0.25)), empty, cfg, "z")
        self.assertEqual((record.f_max, record.f_mean, record.f_weighted), (0.0, 0.0, 0.0))
        self.assertEqual(record.s_measure, 0.75)
        self.assertEqual(record.mae, 0.25)
        report = evaluate_dataset([("z", SaliencyMap(np.full((6, 6), 0.25)), empty)], cfg)
        self.assertEqual(report.skipped, [])

    def test_prediction_is_resized(self):
        pred = SaliencyMap(np.full((8, 8), 0.25))
        mask = np.zeros((16, 16), dtype=bool)
        mask[4:12, 4:12] = True
        resized = match_size(pred, (16, 16))
        self.assertEqual(resized.shape, (16, 16))
        self.assertIs(match_size(resized, (16, 16)), resized)
        record = evaluate_pair(pred, GroundTruthMask(mask), self.cfg)
        self.assertAlmostEqual(record.mae, (64 * 0.75 + 192 * 0.25) / 256, places=12)

    def test_resizing_a_constant_prediction_is_exact_and_silent(self):
        pred = SaliencyMap(np.full((7, 5), 0.1))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            resized = match_size(pred, (13, 11))
        self.assertEqual([str(w.message) for w in caught], [])
        self.assertTrue(np.array_equal(resized.values, np.full((13, 11), 0.1)))

    def test_worker_count_does_not_change_the_report(self):
        triples = [random_triple(self.rng, f"img_{index:02d}") for index in range(12)]
        serial = evaluate_dataset(triples, self.cfg, workers=1)
        parallel = evaluate_dataset(triples, self.cfg, workers=4)
        self.assertEqual(serial.summary(), parallel.summary())
        self.assertTrue(np.array_equal(serial.pr.precision, parallel.pr.precision))
