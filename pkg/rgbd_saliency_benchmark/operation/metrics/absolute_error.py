import numpy as np

from rgbd_saliency_benchmark.operation.metrics.maps import check_pair


def mae(pred, gt):
    """Mean absolute error between a saliency map and its ground truth."""
    check_pair(pred, gt)
    return float(np.mean(np.abs(pred.values - gt.values)))
