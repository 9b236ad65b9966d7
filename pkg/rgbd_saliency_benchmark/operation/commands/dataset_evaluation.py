"""
Dataset Evaluation
==================

The `DatasetEvaluation` task scores a directory of predicted saliency maps
against the ground-truth directory of the same dataset.

**Purpose**

Predictions and ground truths are paired by file stem, decoded (optionally in
parallel), evaluated image by image and reduced into a dataset report: one
summary row ordered ``F_max, F_mean, F_w, S_m, E_m, M`` printed on standard
output, plus the report files written to the output directory.

**Outputs**

- ``records.jsonl``: per-image metrics followed by a summary record.
- ``pr_curve.csv``: the averaged 256-level precision-recall curve.
- ``unmatched.yaml``: stems found on one side only.

**Configuration**

.. code-block:: yaml

    max_workers: 1
    evaluation:
      dataset_root: "~/data/sod"   # holds pred/, gt/ and depth/
      pred_dir: False              # overrides <dataset_root>/pred
      gt_dir: False                # overrides <dataset_root>/gt
      depth_dir: False             # overrides <dataset_root>/depth
      output_dir: "~/data/sod/report"
      output_format: table         # table | records
      beta_sq: 0.3
      alpha: 0.5
      adaptive_rule: twice-mean
      e_mode: adaptive
      empty_gt_policy: skip
      gt_threshold: 128

**Example Usage**

.. code-block:: python

   from rgbd_saliency_benchmark.helpers.config.yaml import read_yaml_config
   from rgbd_saliency_benchmark.operation.commands.dataset_evaluation import DatasetEvaluation

   conf = read_yaml_config("config/config.yaml")
   exit_code = DatasetEvaluation(conf).start()
"""
import os
import sys

from rgbd_saliency_benchmark.helpers.errors import SodBenchError
from rgbd_saliency_benchmark.helpers.parallel import ordered_map
from rgbd_saliency_benchmark.operation.io.maps import MapKind, load_gray_map, to_ground_truth, to_saliency_map
from rgbd_saliency_benchmark.operation.io.pairing import pair_files
from rgbd_saliency_benchmark.operation.io.reports import (PR_TABLE_NAME, RECORDS_NAME, UNMATCHED_NAME, records_json,
                                                          summary_table, write_pr_table, write_records,
                                                          write_unmatched)
from rgbd_saliency_benchmark.operation.metrics.evaluation import evaluate_dataset
from rgbd_saliency_benchmark.operation.metrics.maps import EvalConfig
from rgbd_saliency_benchmark.tasks.base import BaseTaskInitializer


class DatasetEvaluation(BaseTaskInitializer):
    """
    Evaluate a prediction directory against its ground truth.

    Attributes:
        section (dict): The ``evaluation`` configuration section.
        eval_config (EvalConfig): Metric settings.
        stream (TextIO): Destination of the summary.
    """

    def __init__(self, conf, stream=None):
        """
        Initialize the DatasetEvaluation.

        Args:
            conf (dict): Configuration dictionary.
            stream (TextIO): Summary destination, standard output by default.
        """
        super().__init__(conf)
        self.section = conf.get('evaluation', {}) or {}
        self.stream = stream or sys.stdout
        self.eval_config = None

    def _directory(self, key, name):
        explicit = self.section.get(key, False)
        if explicit:
            return os.path.expanduser(explicit)
        return os.path.join(os.path.expanduser(self.section.get('dataset_root', '.')), name)

    def start(self):
        """
        Pair, decode, evaluate and report.

        Returns:
            int: 0 on success, 2 on a pairing, decoding or configuration error.
        """
        try:
            self.eval_config = EvalConfig.from_conf(self.conf)
            pred_dir = self._directory('pred_dir', 'pred')
            gt_dir = self._directory('gt_dir', 'gt')
            depth_dir = self._directory('depth_dir', 'depth')
            if not self.section.get('depth_dir', False) and not os.path.isdir(depth_dir):
                depth_dir = None

            self.logger.info(f"Pairing {pred_dir} with {gt_dir}")
            pair_set = pair_files(pred_dir, gt_dir, depth_dir)
            workers = int(self.conf.get('max_workers', 1))
            self.logger.info(f"Decoding {len(pair_set.entries)} pair(s) with {workers} worker(s)")
            pairs = ordered_map(self.process, pair_set.entries, workers)

            report = evaluate_dataset(pairs, self.eval_config, workers)
            self.store_entry((report, pair_set))
            self.logger.info("Evaluation completed successfully")
            return 0
        except (SodBenchError, OSError) as e:
            self.logger.error(f"Evaluation failed: {e}")
            return 2

    def process(self, entry):
        """Decode one pair into ``(stem, SaliencyMap, GroundTruthMask)``."""
        pred = load_gray_map(entry.prediction, MapKind.PREDICTION)
        gt = load_gray_map(entry.ground_truth, MapKind.GROUND_TRUTH)
        return entry.stem, to_saliency_map(pred), to_ground_truth(gt, self.eval_config.gt_threshold)

    def store_entry(self, record):
        """Write the report files and print the summary."""
        report, pair_set = record
        output_dir = os.path.expanduser(self.section.get('output_dir', './report'))
        write_records(os.path.join(output_dir, RECORDS_NAME), report)
        write_pr_table(os.path.join(output_dir, PR_TABLE_NAME), report.pr)
        write_unmatched(os.path.join(output_dir, UNMATCHED_NAME), pair_set)
        self.logger.info(f"Report written to {output_dir}")

        if self.section.get('output_format', 'table') == 'records':
            self.stream.write(records_json(report))
        else:
            self.stream.write(summary_table(report) + "\n")
