"""
Exception hierarchy shared by every module.

Each error derives from :class:`SodBenchError` and from the built-in exception
that best describes it, so callers can catch either.
"""


class SodBenchError(Exception):
    """Base class of all library errors."""


class DimensionError(SodBenchError, ValueError):
    """Tensor or map extents are incompatible."""


class NonFiniteError(SodBenchError, ArithmeticError):
    """A value that must be finite is NaN or infinite."""


class TensorFormatError(SodBenchError, ValueError):
    """A serialized tensor container is malformed."""


class WeightBundleError(SodBenchError, ValueError):
    """A weight manifest names an unknown role or an inconsistent shape."""


class ConfigurationError(SodBenchError, ValueError):
    """A configuration value is out of range or inconsistent."""


class MapDecodeError(SodBenchError, OSError):
    """A raster file cannot be decoded into a single-channel 8-bit map."""


class PairingError(SodBenchError, OSError):
    """Prediction and ground-truth directories cannot be paired."""


class EmptyGroundTruthError(SodBenchError, ValueError):
    """The ground truth has no positive pixel and the policy forbids it."""


class EvaluationError(SodBenchError, ValueError):
    """A dataset evaluation has nothing to evaluate."""
