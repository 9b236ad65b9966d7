"""
Binary tensor container.

Layout (little-endian): 8-byte magic ``SODTENSR``, ``u32`` rank, ``rank`` x
``u32`` extents, then the ``f64`` payload in row-major order.
"""
import os

import numpy as np
import torch

from rgbd_saliency_benchmark.helpers.errors import TensorFormatError
from rgbd_saliency_benchmark.operation.tensor.core import DTYPE, as_tensor

MAGIC = b"SODTENSR"
TENSOR_SUFFIX = ".sodt"

_U32 = np.dtype("<u4")
_F64 = np.dtype("<f8")


def encode_tensor(tensor):
    """Serialize a tensor into the container bytes."""
    values = as_tensor(tensor).detach().cpu().numpy()
    header = np.array([values.ndim, *values.shape], dtype=_U32).tobytes()
    return MAGIC + header + np.ascontiguousarray(values, dtype=_F64).tobytes()


def decode_tensor(payload):
    """
    Deserialize container bytes.

    Raises:
        TensorFormatError: On a wrong magic, a truncated header or a payload
            whose length disagrees with the extents.
    """
    if len(payload) < len(MAGIC) + _U32.itemsize or payload[:len(MAGIC)] != MAGIC:
        raise TensorFormatError("missing SODTENSR magic")
    offset = len(MAGIC)
    rank = int(np.frombuffer(payload, dtype=_U32, count=1, offset=offset)[0])
    offset += _U32.itemsize
    if rank < 1 or len(payload) < offset + rank * _U32.itemsize:
        raise TensorFormatError(f"invalid rank {rank} or truncated header")
    shape = tuple(int(v) for v in np.frombuffer(payload, dtype=_U32, count=rank, offset=offset))
    offset += rank * _U32.itemsize
    count = int(np.prod(shape))
    if len(payload) - offset != count * _F64.itemsize:
        raise TensorFormatError(
            f"payload holds {(len(payload) - offset) // _F64.itemsize} values, shape {shape} needs {count}")
    values = np.frombuffer(payload, dtype=_F64, count=count, offset=offset).reshape(shape)
    return as_tensor(torch.from_numpy(values.astype(np.float64)), name="decoded tensor").to(DTYPE)


def write_tensor(path, tensor):
    """Write ``tensor`` to ``path`` in the container format."""
    path = os.path.expanduser(path)
    with open(path, "wb") as handle:
        handle.write(encode_tensor(tensor))


def read_tensor(path):
    """Read a tensor written by :func:`write_tensor`."""
    path = os.path.expanduser(path)
    with open(path, "rb") as handle:
        payload = handle.read()
    try:
        return decode_tensor(payload)
    except TensorFormatError as e:
        raise TensorFormatError(f"{path}: {e}") from e
