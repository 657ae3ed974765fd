"""
Distance machinery and replacement filters for 3x3 color windows.

The vector median filter (VMF) selects the window pixel whose summed L2
distance to all window pixels is minimal. The rank-weighted variant (RWVMF)
sorts each pixel's distances ascending and weights them by a decreasing
function of the rank before summing. The arithmetic mean filter (AMF)
averages the window pixels a detector declared clean.

Single-window functions operate on (9, 3) windows (center first, see core).
The *_map functions compute the same scores for every pixel of an image at
once and are the engines behind the whole-image detectors and filters.
All distances and scores use double precision; argmin ties break toward the
lowest window index, so the center wins a tie against any neighbor.
"""

from dataclasses import dataclass

import numpy as np

from .core import WINDOW_SIZE, validate_color_image, window_stack
from .parallel import run_row_chunks

WEIGHTING_NAMES = ("uniform", "1/r", "1/r2")


@dataclass(frozen=True)
class RankWeighting:
    """A precomputed table of per-rank weights f(1)..f(n), n = 9."""

    kind: str
    table: tuple

    @classmethod
    def uniform(cls) -> "RankWeighting":
        return cls("uniform", tuple(1.0 for _ in range(WINDOW_SIZE)))

    @classmethod
    def reciprocal(cls) -> "RankWeighting":
        return cls("1/r", tuple(1.0 / r for r in range(1, WINDOW_SIZE + 1)))

    @classmethod
    def reciprocal_squared(cls) -> "RankWeighting":
        return cls("1/r2", tuple(1.0 / r**2 for r in range(1, WINDOW_SIZE + 1)))

    @classmethod
    def from_name(cls, name: str) -> "RankWeighting":
        """Parse a CLI weighting name: uniform, 1/r or 1/r2."""
        factories = {
            "uniform": cls.uniform,
            "1/r": cls.reciprocal,
            "1/r2": cls.reciprocal_squared,
        }
        if name not in factories:
            raise ValueError(f"unknown weighting {name!r}, expected one of {WEIGHTING_NAMES}")
        return factories[name]()


def l2_distance(a, b) -> float:
    """Euclidean distance between two RGB pixels."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def pairwise_distances(window: np.ndarray) -> np.ndarray:
    """(9, 9) matrix of L2 distances between all window pixel pairs."""
    w = np.asarray(window, dtype=np.float64)
    if w.shape != (WINDOW_SIZE, 3):
        raise ValueError(f"window must have shape (9, 3), got {w.shape}")
    diff = w[:, None, :] - w[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def aggregate_distances(window: np.ndarray) -> np.ndarray:
    """Per-pixel sums of distances to every window pixel (9 scores)."""
    return pairwise_distances(window).sum(axis=1)


def rank_weighted_scores(window: np.ndarray, weighting: RankWeighting) -> np.ndarray:
    """
    Per-pixel rank-weighted distance sums (9 scores).

    For each window pixel its 9 distances are sorted ascending and summed
    with weight table[r-1] applied to the r-th smallest. With uniform
    weights this equals aggregate_distances.
    """
    dist = pairwise_distances(window)
    dist.sort(axis=1)
    return dist @ np.asarray(weighting.table)


def vmf(window: np.ndarray) -> np.ndarray:
    """
    Vector median: the window pixel with minimal aggregated distance.

    Ties break toward the lowest window index (center first). Returns a
    (3,) uint8 pixel that is always a member of the window.
    """
    scores = aggregate_distances(window)
    return np.asarray(window)[int(np.argmin(scores))].astype(np.uint8)


def rwvmf(window: np.ndarray, weighting: RankWeighting) -> np.ndarray:
    """Rank-weighted vector median, same tie-break as vmf."""
    scores = rank_weighted_scores(window, weighting)
    return np.asarray(window)[int(np.argmin(scores))].astype(np.uint8)


def amf(window: np.ndarray, clean_flags) -> np.ndarray:
    """
    Channel-wise rounded mean over window pixels flagged clean.

    Falls back to vmf over the full window when no pixel is flagged clean.
    """
    w = np.asarray(window)
    flags = np.asarray(clean_flags, dtype=bool)
    if flags.shape != (WINDOW_SIZE,):
        raise ValueError(f"clean_flags must have shape (9,), got {flags.shape}")
    if not flags.any():
        return vmf(w)
    mean = w[flags].astype(np.float64).mean(axis=0)
    return np.floor(mean + 0.5).astype(np.uint8)


# ---------------------------------------------------------------------------
# Whole-image engines
# ---------------------------------------------------------------------------


def aggregate_score_map(img: np.ndarray, threads=1) -> np.ndarray:
    """(H, W, 9) aggregated-distance scores for every pixel's window."""
    validate_color_image(img)
    wins = window_stack(img)
    h, w = img.shape[:2]
    out = np.empty((h, w, WINDOW_SIZE))

    def work(start, stop):
        block = wins[start:stop].astype(np.float64)
        diff = block[:, :, :, None, :] - block[:, :, None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        out[start:stop] = dist.sum(axis=-1)

    run_row_chunks(work, h, threads)
    return out


def rank_weighted_score_map(img: np.ndarray, weighting: RankWeighting, threads=1) -> np.ndarray:
    """(H, W, 9) rank-weighted scores for every pixel's window."""
    validate_color_image(img)
    wins = window_stack(img)
    h, w = img.shape[:2]
    out = np.empty((h, w, WINDOW_SIZE))
    table = np.asarray(weighting.table)

    def work(start, stop):
        block = wins[start:stop].astype(np.float64)
        diff = block[:, :, :, None, :] - block[:, :, None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        dist.sort(axis=-1)
        out[start:stop] = dist @ table

    run_row_chunks(work, h, threads)
    return out


def center_distance_map(img: np.ndarray, threads=1) -> np.ndarray:
    """(H, W, 8) L2 distances from each pixel to its 8 window neighbors."""
    validate_color_image(img)
    wins = window_stack(img)
    h, w = img.shape[:2]
    out = np.empty((h, w, WINDOW_SIZE - 1))

    def work(start, stop):
        block = wins[start:stop].astype(np.float64)
        diff = block[:, :, 1:, :] - block[:, :, :1, :]
        out[start:stop] = np.sqrt(np.sum(diff * diff, axis=-1))

    run_row_chunks(work, h, threads)
    return out


# Windows per slice in the batched selectors; bounds the (N, 9, 9, 3)
# temporary to a few tens of megabytes.
_BATCH = 16384


def vmf_select(windows: np.ndarray) -> np.ndarray:
    """
    Vector median of a batch of windows.

    Args:
        windows: (N, 9, 3) array of windows.

    Returns:
        (N, 3) uint8 pixels, one median per window, same tie-break as vmf.
    """
    windows = np.asarray(windows)
    out = np.empty((len(windows), 3), dtype=np.uint8)
    for start in range(0, len(windows), _BATCH):
        block = windows[start:start + _BATCH].astype(np.float64)
        diff = block[:, :, None, :] - block[:, None, :, :]
        scores = np.sqrt(np.sum(diff * diff, axis=-1)).sum(axis=-1)
        idx = np.argmin(scores, axis=1)
        out[start:start + _BATCH] = windows[start:start + _BATCH][np.arange(len(idx)), idx]
    return out


def replace_with_vmf(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    Copy of `img` with masked pixels replaced by their window's vector median.

    All replacement windows are read from the input image, never from
    already-replaced pixels, so the result is independent of evaluation
    order.
    """
    validate_color_image(img)
    if mask.shape != img.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match image {img.shape[:2]}")
    out = img.copy()
    if not mask.any():
        return out
    wins = window_stack(img)
    out[mask] = vmf_select(wins[mask])
    return out


def amf_select(windows: np.ndarray, clean_flags: np.ndarray) -> np.ndarray:
    """
    Batched clean-pixel mean with vmf fallback for all-corrupted windows.

    Args:
        windows: (N, 9, 3) array of windows.
        clean_flags: (N, 9) bool array, True where the detector saw no noise.
    """
    w = np.asarray(windows)
    flags = np.asarray(clean_flags, dtype=bool)
    counts = flags.sum(axis=1)
    out = np.empty((len(w), 3), dtype=np.uint8)
    usable = counts > 0
    if usable.any():
        sums = (w * flags[:, :, None]).astype(np.float64).sum(axis=1)
        mean = sums[usable] / counts[usable, None]
        out[usable] = np.floor(mean + 0.5).astype(np.uint8)
    if (~usable).any():
        out[~usable] = vmf_select(w[~usable])
    return out
