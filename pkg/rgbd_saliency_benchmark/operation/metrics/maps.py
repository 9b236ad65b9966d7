"""
Map types and evaluation settings shared by every metric.

Saliency maps hold real values in ``[0, 1]``; their 8-bit view rounds half up
(``floor(v * 255 + 0.5)``). Ground-truth masks are strictly binary.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from rgbd_saliency_benchmark.helpers.errors import ConfigurationError, DimensionError, NonFiniteError

LEVELS = 256


class EmptyGtPolicy(str, Enum):
    SKIP = "skip"
    ZERO = "zero"


class AdaptiveRule(str, Enum):
    TWICE_MEAN = "twice-mean"
    MEAN = "mean"


class EMode(str, Enum):
    ADAPTIVE = "adaptive"
    MAX = "max"
    MEAN = "mean"


def _as_plane(values, name):
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 3 and array.shape[0] == 1:
        array = array[0]
    if array.ndim != 2 or min(array.shape) < 1:
        raise DimensionError(f"{name} must be (H, W) or (1, H, W), got shape {array.shape}")
    if not np.isfinite(array).all():
        raise NonFiniteError(f"{name} contains non-finite values")
    return array


def quantize(values):
    """8-bit levels ``floor(v * 255 + 0.5)`` as ``int64``."""
    return np.floor(np.asarray(values, dtype=np.float64) * 255.0 + 0.5).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """
    Predicted saliency.

    Attributes:
        values (numpy.ndarray): ``(H, W)`` float64 map in ``[0, 1]``.
    """

    values: np.ndarray

    def __post_init__(self):
        values = _as_plane(self.values, "saliency map")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("saliency map values must lie in [0, 1]")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def shape(self):
        return self.values.shape

    @property
    def quantized(self):
        return quantize(self.values)


@dataclass(frozen=True, eq=False)
class GroundTruthMask:
    """
    Binary ground truth.

    Attributes:
        values (numpy.ndarray): ``(H, W)`` boolean mask.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.dtype != np.bool_:
            plane = _as_plane(values, "ground truth")
            if not np.isin(plane, (0.0, 1.0)).all():
                raise ValueError("ground truth must be binary; use GroundTruthMask.from_gray for gray levels")
            values = plane > 0.5
        else:
            if values.ndim == 3 and values.shape[0] == 1:
                values = values[0]
            if values.ndim != 2 or min(values.shape) < 1:
                raise DimensionError(f"ground truth must be (H, W) or (1, H, W), got shape {values.shape}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_gray(cls, values, threshold=128):
        """Binarize a gray map in ``[0, 1]`` at the 8-bit level ``threshold``."""
        return cls(quantize(_as_plane(values, "ground truth")) >= threshold)

    @property
    def shape(self):
        return self.values.shape

    @property
    def positives(self):
        return int(self.values.sum())

    @property
    def is_empty(self):
        return not self.values.any()


def check_pair(pred, gt):
    if pred.shape != gt.shape:
        raise DimensionError(f"prediction {pred.shape} and ground truth {gt.shape} shapes differ")


@dataclass(frozen=True)
class EvalConfig:
    """
    Metric settings.

    Attributes:
        beta_sq (float): F-measure precision weight.
        alpha (float): S-measure object/region balance.
        threshold_count (int): Binarization levels of the sweep.
        adaptive_rule (AdaptiveRule): Per-image adaptive threshold rule.
        e_mode (EMode): E-measure binarization.
        wf_gauss_size (int): Weighted-F smoothing window.
        wf_gauss_sigma (float): Weighted-F smoothing deviation.
        wf_beta_sq (float): β² inside the weighted F-measure.
        empty_gt_policy (EmptyGtPolicy): Handling of empty ground truths.
        gt_threshold (int): 8-bit ground-truth binarization level.
    """

    beta_sq: float = 0.3
    alpha: float = 0.5
    threshold_count: int = LEVELS
    adaptive_rule: AdaptiveRule = AdaptiveRule.TWICE_MEAN
    e_mode: EMode = EMode.ADAPTIVE
    wf_gauss_size: int = 7
    wf_gauss_sigma: float = 5.0
    wf_beta_sq: float = 1.0
    empty_gt_policy: EmptyGtPolicy = EmptyGtPolicy.SKIP
    gt_threshold: int = 128

    def __post_init__(self):
        try:
            object.__setattr__(self, 'adaptive_rule', AdaptiveRule(self.adaptive_rule))
            object.__setattr__(self, 'e_mode', EMode(self.e_mode))
            object.__setattr__(self, 'empty_gt_policy', EmptyGtPolicy(self.empty_gt_policy))
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        if not self.beta_sq > 0:
            raise ConfigurationError(f"beta_sq must be positive, got {self.beta_sq}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.threshold_count != LEVELS:
            raise ConfigurationError(f"threshold_count must be {LEVELS} for 8-bit maps, got {self.threshold_count}")
        if self.wf_gauss_size < 1 or self.wf_gauss_size % 2 == 0 or not self.wf_gauss_sigma > 0:
            raise ConfigurationError("weighted-F smoothing needs an odd window and a positive sigma")
        if not self.wf_beta_sq > 0:
            raise ConfigurationError(f"wf_beta_sq must be positive, got {self.wf_beta_sq}")
        if not 0 <= self.gt_threshold <= 255:
            raise ConfigurationError(f"gt_threshold must be an 8-bit level, got {self.gt_threshold}")

    @classmethod
    def from_conf(cls, conf, **overrides):
        """
        Build the settings from the ``evaluation`` section of a configuration.

        Keyword overrides set to ``None`` are ignored.
        """
        section = dict(conf.get('evaluation', {}) or {})
        section.update({key: value for key, value in overrides.items() if value is not None})
        defaults = cls()
        return cls(
            beta_sq=float(section.get('beta_sq', defaults.beta_sq)),
            alpha=float(section.get('alpha', defaults.alpha)),
            threshold_count=int(section.get('threshold_count', defaults.threshold_count)),
            adaptive_rule=section.get('adaptive_rule', defaults.adaptive_rule),
            e_mode=section.get('e_mode', defaults.e_mode),
            wf_gauss_size=int(section.get('wf_gauss_size', defaults.wf_gauss_size)),
            wf_gauss_sigma=float(section.get('wf_gauss_sigma', defaults.wf_gauss_sigma)),
            wf_beta_sq=float(section.get('wf_beta_sq', defaults.wf_beta_sq)),
            empty_gt_policy=section.get('empty_gt_policy', defaults.empty_gt_policy),
            gt_threshold=int(section.get('gt_threshold', defaults.gt_threshold)),
        )
