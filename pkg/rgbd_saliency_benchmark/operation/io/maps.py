"""
Raster Maps
===========

Decoding and encoding of the single-channel 8-bit rasters a benchmark is made
of: predictions, ground truths and depth maps.

Only lossless containers are accepted (PNG and the portable graymap family),
so that metric values stay bit-exact. Color or palette images are reduced to
luma; rasters deeper than 8 bits are rejected.

**Example Usage**

.. code-block:: python

   from rgbd_saliency_benchmark.operation.io.maps import MapKind, load_gray_map, to_ground_truth

   record = load_gray_map("gt/0001.png", MapKind.GROUND_TRUTH)
   mask = to_ground_truth(record, threshold=128)
"""
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from rgbd_saliency_benchmark.helpers.errors import MapDecodeError
from rgbd_saliency_benchmark.operation.metrics.maps import GroundTruthMask, SaliencyMap, quantize
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE

LOSSLESS_FORMATS = {'PNG', 'PPM'}
MAP_SUFFIXES = ('.png', '.pgm', '.ppm', '.pnm')
LUMA_MODES = {'1', 'L', 'LA', 'P', 'PA', 'RGB', 'RGBA', 'RGBX'}


class MapKind(str, Enum):
    PREDICTION = "prediction"
    GROUND_TRUTH = "ground_truth"
    DEPTH = "depth"


@dataclass(frozen=True, eq=False)
class MapRecord:
    """
    A decoded raster.

    Attributes:
        stem (str): File name without extension.
        kind (MapKind): Role of the map.
        image (torch.Tensor): ``(1, H, W)`` float64 values ``level / 255``.
    """

    stem: str
    kind: MapKind
    image: torch.Tensor

    @property
    def shape(self):
        return tuple(self.image.shape[-2:])


def map_stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def load_gray_map(path, kind=MapKind.PREDICTION):
    """
    Decode a raster into a :class:`MapRecord`.

    Raises:
        MapDecodeError: Unreadable file, lossy container or unsupported bit
            depth. The message names the path.
    """
    path = os.path.expanduser(str(path))
    try:
        with Image.open(path) as image:
            if image.format not in LOSSLESS_FORMATS:
                raise MapDecodeError(f"{path}: unsupported container {image.format}, expected PNG or PGM")
            if image.mode not in LUMA_MODES:
                raise MapDecodeError(f"{path}: unsupported pixel mode {image.mode}, expected 8-bit channels")
            gray = image if image.mode == 'L' else image.convert('L')
            levels = np.asarray(gray, dtype=np.uint8)
    except MapDecodeError:
        raise
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise MapDecodeError(f"{path}: cannot decode raster: {e}") from e
    values = torch.from_numpy(levels.astype(np.float64) / 255.0).to(DTYPE).unsqueeze(0)
    return MapRecord(map_stem(path), MapKind(kind), values)


def save_gray_map(path, values):
    """
    Encode a ``[0, 1]`` map as an 8-bit PNG or PGM (chosen by suffix).

    Levels are rounded half up.
    """
    path = os.path.expanduser(str(path))
    suffix = os.path.splitext(path)[1].lower()
    container = {'.png': 'PNG', '.pgm': 'PPM'}.get(suffix)
    if container is None:
        raise MapDecodeError(f"{path}: cannot encode a raster with suffix '{suffix}', use .png or .pgm")
    array = np.asarray(values.detach().cpu() if isinstance(values, torch.Tensor) else values, dtype=np.float64)
    if array.ndim == 3 and array.shape[0] == 1:
        array = array[0]
    if array.ndim != 2:
        raise ValueError(f"{path}: a gray map must be (H, W) or (1, H, W), got shape {array.shape}")
    levels = np.clip(quantize(array), 0, 255).astype(np.uint8)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    Image.fromarray(levels).save(path, format=container)
    return path


def normalize_depth(record):
    """
    Min-max normalize a depth map to ``[0, 1]``; a constant map becomes zeros.

    Returns:
        torch.Tensor: ``(1, H, W)`` depth map.
    """
    if MapKind(record.kind) is not MapKind.DEPTH:
        raise ValueError(f"{record.stem}: expected a depth map, got {record.kind}")
    depth = record.image
    low = depth.min()
    span = depth.max() - low
    if float(span) == 0.0:
        return torch.zeros_like(depth)
    return (depth - low) / span


def to_saliency_map(record):
    return SaliencyMap(record.image[0].numpy())


def to_ground_truth(record, threshold=128):
    """Binarize a decoded map at the 8-bit level ``threshold``."""
    return GroundTruthMask.from_gray(record.image[0].numpy(), threshold)
