"""
Brute-force references of the structure, enhanced-alignment and weighted
F-measures.

Each function transcribes its metric pixel by pixel (or offset by offset)
without the histogram, slicing or ``scipy.ndimage`` shortcuts of the fast
implementations. The self-test and the test suite compare both on random
pairs.
"""
import math

import numpy as np

EPS = np.finfo(np.float64).eps


def literal_s_measure(pred, mask, alpha=0.5):
    """Pixel-loop structure measure of a float map against a boolean mask."""
    rows, cols = mask.shape
    n = rows * cols
    fg = [(i, j) for i in range(rows) for j in range(cols) if mask[i, j]]
    bg = [(i, j) for i in range(rows) for j in range(cols) if not mask[i, j]]
    if not fg:
        return 1.0 - sum(float(pred[i, j]) for i in range(rows) for j in range(cols)) / n
    if not bg:
        return sum(float(pred[i, j]) for i in range(rows) for j in range(cols)) / n

    def object_score(values):
        mean = sum(values) / len(values)
        deviation = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
        return 2.0 * mean / (mean * mean + 1.0 + deviation + EPS)

    u = len(fg) / n
    s_o = (u * object_score([float(pred[i, j]) for i, j in fg])
           + (1 - u) * object_score([1.0 - float(pred[i, j]) for i, j in bg]))

    x = math.floor(sum(j + 1 for _, j in fg) / len(fg) + 0.5)
    y = math.floor(sum(i + 1 for i, _ in fg) / len(fg) + 0.5)

    def ssim(cells):
        m = len(cells)
        ps = [float(pred[i, j]) for i, j in cells]
        gs = [1.0 if mask[i, j] else 0.0 for i, j in cells]
        mx = sum(ps) / m
        my = sum(gs) / m
        vx = sum((p - mx) ** 2 for p in ps) / (m - 1 + EPS)
        vy = sum((g - my) ** 2 for g in gs) / (m - 1 + EPS)
        cxy = sum((p - mx) * (g - my) for p, g in zip(ps, gs)) / (m - 1 + EPS)
        a = 4 * mx * my * cxy
        b = (mx * mx + my * my) * (vx + vy)
        if a != 0:
            return a / (b + EPS)
        return 1.0 if b == 0 else 0.0

    s_r = 0.0
    for row_range, col_range in [((0, y), (0, x)), ((0, y), (x, cols)), ((y, rows), (0, x)), ((y, rows), (x, cols))]:
        cells = [(i, j) for i in range(*row_range) for j in range(*col_range)]
        if cells:
            s_r += len(cells) / n * ssim(cells)
    return max(alpha * s_o + (1 - alpha) * s_r, 0.0)


def dense_enhanced_alignment(binary, mask):
    """Pixel-loop enhanced alignment of two boolean maps."""
    rows, cols = mask.shape
    n = rows * cols
    fm = [[1.0 if binary[i, j] else 0.0 for j in range(cols)] for i in range(rows)]
    g = [[1.0 if mask[i, j] else 0.0 for j in range(cols)] for i in range(rows)]
    mean_fm = sum(map(sum, fm)) / n
    mean_g = sum(map(sum, g)) / n
    if mean_g == 0:
        return sum(1.0 - fm[i][j] for i in range(rows) for j in range(cols)) / n
    if mean_g == 1:
        return mean_fm
    total = 0.0
    for i in range(rows):
        for j in range(cols):
            a = fm[i][j] - mean_fm
            b = g[i][j] - mean_g
            xi = 2 * a * b / (a * a + b * b + EPS)
            total += (1 + xi) ** 2 / 4
    return total / n


def squared_foreground_distances(mask):
    """Squared Euclidean distance of every pixel to every foreground pixel, ``(H, W, F)``."""
    fg = np.argwhere(mask)
    ii, jj = np.indices(mask.shape)
    return (ii[..., None] - fg[:, 0]) ** 2 + (jj[..., None] - fg[:, 1]) ** 2


def is_closest_foreground(mask, rows, cols):
    """
    Whether ``(rows, cols)`` names, for every pixel, a foreground pixel at the
    smallest distance. Any of several equidistant candidates is accepted.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask[rows, cols].all():
        return False
    ii, jj = np.indices(mask.shape)
    chosen = (ii - rows) ** 2 + (jj - cols) ** 2
    return bool(np.array_equal(chosen, squared_foreground_distances(mask).min(axis=-1)))


def dense_weighted_f(pred, mask, rows, cols, size=7, sigma=5.0, beta_sq=1.0):
    """
    Weighted F-measure with explicit window sums.

    ``rows`` and ``cols`` select one closest foreground pixel per position,
    so equidistant candidates resolve the same way as in the caller.
    Windows read past the border replicate the edge pixels.
    """
    pred = np.asarray(pred, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    height, width = mask.shape
    error = np.abs(pred - mask)
    field = error[rows, cols]
    distance = np.sqrt(squared_foreground_distances(mask).min(axis=-1))

    half = size // 2
    weights = {(u, v): math.exp(-((u - half) ** 2 + (v - half) ** 2) / (2 * sigma * sigma))
               for u in range(size) for v in range(size)}
    norm = sum(weights.values())
    ii, jj = np.indices(mask.shape)
    smoothed = np.zeros_like(field)
    for (u, v), weight in weights.items():
        r = np.clip(ii + u - half, 0, height - 1)
        c = np.clip(jj + v - half, 0, width - 1)
        smoothed += weight / norm * field[r, c]

    fg_error = 0.0
    fp_w = 0.0
    for i in range(height):
        for j in range(width):
            if mask[i, j]:
                fg_error += min(smoothed[i, j], error[i, j])
            else:
                fp_w += error[i, j] * (2.0 - math.exp(math.log(0.5) / 5.0 * distance[i, j]))
    positives = int(mask.sum())
    tp_w = positives - fg_error
    recall = 1.0 - fg_error / positives
    precision = tp_w / (tp_w + fp_w) if tp_w + fp_w > 0 else 0.0
    denominator = beta_sq * precision + recall
    return (1 + beta_sq) * precision * recall / denominator if denominator > 0 else 0.0
