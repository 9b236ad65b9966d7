"""Seeded synthetic RGB-D benchmark for determinism and throughput checks."""
import os

import numpy as np

from rgbd_saliency_benchmark.operation.io.maps import save_gray_map


def synthetic_sample(rng, size):
    """
    One ``(prediction, ground_truth, depth)`` triple of ``size x size`` maps.

    The object is a disk; the prediction is a noisy, softened copy of it and
    the depth map places the object in front of a tilted background plane.
    """
    rows, cols = np.mgrid[0:size, 0:size].astype(np.float64)
    radius = rng.uniform(size / 6.0, size / 3.0)
    center_row, center_col = rng.uniform(radius, size - radius, size=2)
    distance = np.hypot(rows - center_row, cols - center_col)
    gt = (distance <= radius).astype(np.float64)

    soft = np.clip(1.0 - (distance - radius) / (0.25 * size), 0.0, 1.0)
    prediction = np.clip(0.7 * soft * gt + 0.3 * soft + rng.normal(0.0, 0.08, size=gt.shape), 0.0, 1.0)

    slope = rng.uniform(-0.5, 0.5, size=2)
    plane = 0.4 + slope[0] * rows / size + slope[1] * cols / size
    depth = np.clip(np.where(gt > 0, 0.9, plane * 0.5), 0.0, 1.0)
    return prediction, gt, depth


def write_synthetic_dataset(root, count=10, size=32, seed=42):
    """
    Write ``<root>/pred``, ``<root>/gt`` and ``<root>/depth`` PNG maps.

    Returns:
        list[str]: Stems of the written maps.
    """
    root = os.path.expanduser(str(root))
    rng = np.random.default_rng(seed)
    stems = []
    for index in range(count):
        stem = f"img_{index:04d}"
        prediction, gt, depth = synthetic_sample(rng, size)
        save_gray_map(os.path.join(root, "pred", f"{stem}.png"), prediction)
        save_gray_map(os.path.join(root, "gt", f"{stem}.png"), gt)
        save_gray_map(os.path.join(root, "depth", f"{stem}.png"), depth)
        stems.append(stem)
    return stems
