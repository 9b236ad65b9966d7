"""
Report files of a dataset evaluation.

- ``records.jsonl``: one JSON object per image, then one summary object.
- ``pr_curve.csv``: 256 lines ``threshold,precision,recall``, no header.
- ``unmatched.yaml``: stems that could not be paired, per side.
"""
import os

import pandas as pd
import yaml

from rgbd_saliency_benchmark.operation.metrics.evaluation import METRIC_COLUMNS

RECORDS_NAME = "records.jsonl"
PR_TABLE_NAME = "pr_curve.csv"
UNMATCHED_NAME = "unmatched.yaml"
FLOAT_FORMAT = "%.10f"


def _prepare(path):
    path = os.path.expanduser(str(path))
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return path


def records_frame(report):
    """Per-image rows followed by the summary row."""
    frame = report.frame()
    frame.insert(0, 'record', 'image')
    summary = dict(report.means, f_max=report.f_max)
    summary.update(record='summary', stem=None, images=len(report.records), skipped=len(report.skipped))
    frame = pd.concat([frame, pd.DataFrame([summary])], ignore_index=True)
    frame[['images', 'skipped']] = frame[['images', 'skipped']].astype('Int64')
    return frame[['record', 'stem'] + METRIC_COLUMNS + ['images', 'skipped']]


def records_json(report):
    return records_frame(report).to_json(orient='records', lines=True, double_precision=15)


def write_records(path, report):
    path = _prepare(path)
    with open(path, "w") as handle:
        handle.write(records_json(report))
    return path


def write_pr_table(path, curve):
    """Write the 256-line ``threshold,precision,recall`` table."""
    path = _prepare(path)
    frame = pd.DataFrame({'threshold': curve.thresholds, 'precision': curve.precision, 'recall': curve.recall})
    frame.to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
    return path


def write_unmatched(path, pair_set):
    path = _prepare(path)
    with open(path, "w") as handle:
        yaml.safe_dump({side: list(stems) for side, stems in pair_set.unmatched.items()}, handle, sort_keys=True)
    return path


def summary_table(report):
    """Aligned one-row table ``F_max F_mean F_w S_m E_m M``."""
    return pd.DataFrame([report.summary()]).to_string(index=False, float_format=lambda v: f"{v:.4f}")
