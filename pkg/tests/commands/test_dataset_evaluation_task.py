import copy
import io
import json
import os
import shutil
import tempfile
import unittest

import pytest

from rgbd_saliency_benchmark.helpers.config.yaml import read_yaml_config
from rgbd_saliency_benchmark.operation.commands.dataset_evaluation import DatasetEvaluation
from rgbd_saliency_benchmark.operation.io.maps import MapKind, load_gray_map, save_gray_map
from rgbd_saliency_benchmark.operation.io.reports import PR_TABLE_NAME, RECORDS_NAME, UNMATCHED_NAME
from rgbd_saliency_benchmark.operation.io.synthetic import write_synthetic_dataset


@pytest.mark.order(15)
class TestDatasetEvaluation(unittest.TestCase):

    def setUp(self):
        self.base_conf = read_yaml_config(os.path.join('tests/config/', "config.yaml"))
        self.directory = tempfile.TemporaryDirectory()
        self.root = os.path.join(self.directory.name, "dataset")
        self.stems = write_synthetic_dataset(self.root, count=6, size=24, seed=self.base_conf['seed'])

    def tearDown(self):
        self.directory.cleanup()

    def run_task(self, output_name="report", **overrides):
        conf = copy.deepcopy(self.base_conf)
        conf['evaluation'].update(dataset_root=self.root, output_dir=os.path.join(self.directory.name, output_name))
        conf['evaluation'].update({key: value for key, value in overrides.items() if key != 'max_workers'})
        conf['max_workers'] = overrides.get('max_workers', 1)
        stream = io.StringIO()
        return DatasetEvaluation(conf, stream=stream).start(), stream.getvalue(), conf['evaluation']['output_dir']

    def replace_predictions(self, transform):
        for stem in self.stems:
            gt = load_gray_map(os.path.join(self.root, "gt", f"{stem}.png"), MapKind.GROUND_TRUTH)
            save_gray_map(os.path.join(self.root, "pred", f"{stem}.png"), transform(gt.image[0].numpy()))

    def test_perfect_predictions(self):
        self.replace_predictions(lambda gt: gt)
        code, output, output_dir = self.run_task()
        self.assertEqual(code, 0)
        header, values = output.strip().split("\n")
        self.assertEqual(header.split(), ["F_max", "F_mean", "F_w", "S_m", "E_m", "M"])
        self.assertEqual(values.split(), ["1.0000"] * 5 + ["0.0000"])
        for name in (RECORDS_NAME, PR_TABLE_NAME, UNMATCHED_NAME):
            self.assertTrue(os.path.isfile(os.path.join(output_dir, name)))

    def test_inverted_predictions(self):
        self.replace_predictions(lambda gt: 1.0 - gt)
        code, output, _ = self.run_task(output_format="records")
        self.assertEqual(code, 0)
        lines = [json.loads(line) for line in output.splitlines() if line.strip()]
        self.assertEqual([line['stem'] for line in lines[:-1]], self.stems)
        self.assertEqual(lines[-1]['record'], "summary")
        self.assertEqual(lines[-1]['mae'], 1.0)
        self.assertEqual(lines[-1]['images'], len(self.stems))

    def test_output_is_byte_identical_across_runs_and_workers(self):
        first = self.run_task("serial", max_workers=1)
        second = self.run_task("parallel", max_workers=4)
        self.assertEqual((first[0], second[0]), (0, 0))
        self.assertEqual(first[1], second[1])
        for name in (RECORDS_NAME, PR_TABLE_NAME, UNMATCHED_NAME):
            with open(os.path.join(first[2], name), "rb") as a, open(os.path.join(second[2], name), "rb") as b:
                self.assertEqual(a.read(), b.read())

    def test_unmatched_stems_are_listed(self):
        os.remove(os.path.join(self.root, "pred", f"{self.stems[0]}.png"))
        code, _, output_dir = self.run_task()
        self.assertEqual(code, 0)
        with open(os.path.join(output_dir, UNMATCHED_NAME)) as handle:
            content = handle.read()
        self.assertIn(self.stems[0], content)

    def test_pairing_failure_exits_with_usage_code(self):
        shutil.rmtree(os.path.join(self.root, "gt"))
        code, output, _ = self.run_task()
        self.assertEqual(code, 2)
        self.assertEqual(output, "")

    def test_invalid_metric_setting_exits_with_usage_code(self):
        code, _, _ = self.run_task(alpha=3.0)
        self.assertEqual(code, 2)

    def test_explicit_directories(self):
        pred_dir = os.path.join(self.directory.name, "elsewhere")
        shutil.copytree(os.path.join(self.root, "gt"), pred_dir)
        code, output, _ = self.run_task(pred_dir=pred_dir)
        self.assertEqual(code, 0)
        self.assertEqual(output.strip().split("\n")[1].split(), ["1.0000"] * 5 + ["0.0000"])
