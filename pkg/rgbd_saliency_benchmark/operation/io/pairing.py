"""
Pairing of prediction, ground-truth and depth directories by file stem.

The result only depends on the directory listings: stems are sorted and every
file that cannot be paired is reported in ``PairSet.unmatched``.
"""
import logging
import os
from dataclasses import dataclass, field

from rgbd_saliency_benchmark.helpers.errors import PairingError
from rgbd_saliency_benchmark.operation.io.maps import MAP_SUFFIXES, map_stem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairEntry:
    stem: str
    prediction: str
    ground_truth: str
    depth: str = None


@dataclass(frozen=True, eq=False)
class PairSet:
    """
    Stem-matched files.

    Attributes:
        entries (list[PairEntry]): Pairs sorted by stem.
        unmatched (dict[str, list[str]]): Stems found on one side only:
            ``prediction``, ``ground_truth``, ``depth`` (depth maps without a
            pair) and ``missing_depth`` (pairs without a depth map).
    """

    entries: list
    unmatched: dict = field(default_factory=dict)

    @property
    def stems(self):
        return [entry.stem for entry in self.entries]

    @property
    def has_unmatched(self):
        return any(self.unmatched.values())


def list_maps(directory):
    """
    Map every raster of ``directory`` to its stem.

    Raises:
        PairingError: Unreadable directory, or two rasters sharing a stem.
    """
    directory = os.path.expanduser(str(directory))
    try:
        names = sorted(os.listdir(directory))
    except OSError as e:
        raise PairingError(f"cannot list {directory}: {e}") from e
    maps = {}
    for name in names:
        path = os.path.join(directory, name)
        if not name.lower().endswith(MAP_SUFFIXES) or not os.path.isfile(path):
            continue
        stem = map_stem(name)
        if stem in maps:
            raise PairingError(f"{directory}: stem '{stem}' appears twice ({os.path.basename(maps[stem])}, {name})")
        maps[stem] = path
    return maps


def pair_files(pred_dir, gt_dir, depth_dir=None):
    """
    Pair predictions with ground truths (and depth maps when given).

    Raises:
        PairingError: When no stem is shared by predictions and ground truths.
    """
    predictions = list_maps(pred_dir)
    truths = list_maps(gt_dir)
    depths = list_maps(depth_dir) if depth_dir else {}

    common = sorted(set(predictions) & set(truths))
    if not common:
        raise PairingError(f"no common stem between {pred_dir} and {gt_dir}")

    unmatched = {
        'prediction': sorted(set(predictions) - set(truths)),
        'ground_truth': sorted(set(truths) - set(predictions)),
    }
    if depth_dir:
        unmatched['depth'] = sorted(set(depths) - set(common))
        unmatched['missing_depth'] = [stem for stem in common if stem not in depths]

    entries = [PairEntry(stem, predictions[stem], truths[stem], depths.get(stem)) for stem in common]
    for side, stems in unmatched.items():
        if stems:
            logger.warning("%d unmatched %s stem(s): %s", len(stems), side, ", ".join(stems[:5]))
    return PairSet(entries, unmatched)
