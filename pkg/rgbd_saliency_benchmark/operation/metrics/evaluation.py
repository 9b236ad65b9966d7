"""
Per-image evaluation and dataset aggregation.

Images are evaluated independently (optionally on a thread pool) and reduced
in stem order, so a report does not depend on the worker count. Dataset
``F_max`` is read from the averaged precision-recall curve; every other
column is the arithmetic mean of the per-image values.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import torch

from rgbd_saliency_benchmark.helpers.errors import EmptyGroundTruthError, EvaluationError
from rgbd_saliency_benchmark.helpers.parallel import ordered_map
from rgbd_saliency_benchmark.operation.metrics.absolute_error import mae
from rgbd_saliency_benchmark.operation.metrics.enhanced_alignment import e_measure
from rgbd_saliency_benchmark.operation.metrics.maps import EvalConfig, SaliencyMap
from rgbd_saliency_benchmark.operation.metrics.pr_curve import PRCurve, f_max, f_mean, pr_curve
from rgbd_saliency_benchmark.operation.metrics.structure import s_measure
from rgbd_saliency_benchmark.operation.metrics.weighted_f import f_weighted
from rgbd_saliency_benchmark.operation.tensor.core import bilinear_resize

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ['mae', 'f_max', 'f_mean', 'f_weighted', 's_measure', 'e_measure']
SUMMARY_COLUMNS = [('F_max', 'f_max'), ('F_mean', 'f_mean'), ('F_w', 'f_weighted'),
                   ('S_m', 's_measure'), ('E_m', 'e_measure'), ('M', 'mae')]


@dataclass(frozen=True, eq=False)
class ImageRecord:
    stem: str
    mae: float
    f_max: float
    f_mean: float
    f_weighted: float
    s_measure: float
    e_measure: float
    pr: PRCurve

    def as_dict(self):
        return {'stem': self.stem, **{column: getattr(self, column) for column in METRIC_COLUMNS}}


@dataclass(frozen=True, eq=False)
class MetricReport:
    """
    Dataset report.

    Attributes:
        records (list[ImageRecord]): Per-image metrics in stem order.
        means (dict): Arithmetic mean of every per-image column.
        pr (PRCurve): Averaged precision-recall curve.
        f_max (float): Maximum F-measure of the averaged curve.
        skipped (list[str]): Images dropped for an empty ground truth.
    """

    records: list
    means: dict
    pr: PRCurve
    f_max: float
    skipped: list = field(default_factory=list)

    def summary(self):
        """Dataset row ordered ``F_max, F_mean, F_w, S_m, E_m, M``."""
        values = dict(self.means, f_max=self.f_max)
        return {label: values[column] for label, column in SUMMARY_COLUMNS}

    def frame(self):
        """Per-image metrics as a :class:`pandas.DataFrame`."""
        return pd.DataFrame([record.as_dict() for record in self.records], columns=['stem'] + METRIC_COLUMNS)


def match_size(pred, shape):
    """Bilinearly resize ``pred`` to ``shape`` when the sizes differ."""
    if pred.shape == tuple(shape):
        return pred
    values = torch.from_numpy(np.array(pred.values, dtype=np.float64)).unsqueeze(0)
    resized = bilinear_resize(values, shape[0], shape[1])[0].clamp(0.0, 1.0)
    return SaliencyMap(resized.numpy())


def evaluate_pair(pred, gt, cfg=None, stem=""):
    """
    Every metric of one image.

    The prediction is resized to the ground-truth size first.

    Raises:
        EmptyGroundTruthError: Empty ground truth under the skip policy.
    """
    cfg = cfg or EvalConfig()
    pred = match_size(pred, gt.shape)
    curve = pr_curve(pred, gt, cfg)
    return ImageRecord(
        stem=stem,
        mae=mae(pred, gt),
        f_max=f_max(curve, cfg),
        f_mean=f_mean(pred, gt, cfg),
        f_weighted=f_weighted(pred, gt, cfg),
        s_measure=s_measure(pred, gt, cfg),
        e_measure=e_measure(pred, gt, cfg),
        pr=curve,
    )


def aggregate(records, cfg=None, skipped=()):
    """Build a :class:`MetricReport` from per-image records."""
    cfg = cfg or EvalConfig()
    records = list(records)
    if not records:
        raise EvaluationError("no image left to aggregate")
    frame = pd.DataFrame([record.as_dict() for record in records], columns=['stem'] + METRIC_COLUMNS)
    means = {column: float(frame[column].mean()) for column in METRIC_COLUMNS}
    curve = PRCurve.average(record.pr for record in records)
    return MetricReport(records, means, curve, f_max(curve, cfg), list(skipped))


def evaluate_dataset(pairs, cfg=None, workers=1):
    """
    Evaluate ``(stem, SaliencyMap, GroundTruthMask)`` triples.

    Pairs are sorted by stem before evaluation; empty ground truths are
    skipped (and listed in the report) under the skip policy.

    Raises:
        EvaluationError: No pair, or every pair skipped.
    """
    cfg = cfg or EvalConfig()
    pairs = sorted(enumerate(pairs), key=lambda item: (item[1][0], item[0]))
    if not pairs:
        raise EvaluationError("no prediction/ground-truth pair to evaluate")

    def evaluate(item):
        _, (stem, pred, gt) = item
        try:
            return evaluate_pair(pred, gt, cfg, stem)
        except EmptyGroundTruthError:
            return None

    results = ordered_map(evaluate, pairs, workers)
    skipped = [item[1][0] for item, record in zip(pairs, results) if record is None]
    for stem in skipped:
        logger.warning("Skipping %s: empty ground truth", stem)
    records = [record for record in results if record is not None]
    if not records:
        raise EvaluationError("every ground truth is empty; nothing to evaluate")
    logger.info("Evaluated %d image(s), skipped %d", len(records), len(skipped))
    return aggregate(records, cfg, skipped)
