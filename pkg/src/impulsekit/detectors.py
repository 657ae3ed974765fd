"""
Noise-detection methods dm1..dm5.

Each detector maps a color image plus a config to a DetectionOutcome: a
boolean mask (True = pixel declared corrupted) and a per-pixel real
statistic the mask was thresholded from, kept so parameter sweeps can
re-threshold without recomputation.

* dm1 -- flags a pixel when its rank-weighted distance score exceeds the
  window minimum by more than alpha.
* dm2 -- flags a pixel when even the window-minimal rank-weighted score
  exceeds alpha (heavily disturbed neighborhoods).
* dm3 -- peer-group test: flags a pixel whose count of close neighbors
  (normalized L2 distance below d) is at most k.
* dm4 -- iterated dm3: re-detects on a VMF-cleaned image with a schedule of
  (d, k) parameters, accumulating the mask union.
* dm5 -- morphological detector: the union of five masks built from
  saturating intensity shifts, thresholding, bottom-hats and interior
  removal.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .core import WINDOW_SIZE, channel_shift, rgb_to_gray, threshold_bw, validate_color_image
from .morphology import StructuringElement, bottom_hat, gray_bottom_hat, remove_interior
from .vector_filters import (
    RankWeighting,
    center_distance_map,
    rank_weighted_score_map,
    replace_with_vmf,
)

# Largest possible L2 distance between two RGB pixels; peer-group radii are
# expressed as a fraction of it.
MAX_PIXEL_DISTANCE = 255.0 * math.sqrt(3.0)

# Default thresholds picked from ROC sweeps over the ci1/ct1 models on the
# bundled test image; see scripts/tune_dm5.py.
DEFAULT_DM1_ALPHA = 9.0
DEFAULT_DM2_ALPHA = 40.0

# First schedule entry mirrors the dm3 defaults; later passes tighten the
# peer requirements.
DEFAULT_DM3_D = 0.25
DEFAULT_DM3_K = 3
DEFAULT_DM4_SCHEDULE = ((0.25, 3), (0.25, 2), (0.15, 2))

# Fixed by a (pset, mset, level) grid search against the ci1/ct1 models on
# the bundled test image; see scripts/tune_dm5.py.
DEFAULT_DM5_PSET = 167
DEFAULT_DM5_MSET = 77
DEFAULT_DM5_LEVEL = 76


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


@dataclass(frozen=True)
class DM1Config:
    alpha: float = DEFAULT_DM1_ALPHA
    weighting: RankWeighting = field(default_factory=RankWeighting.reciprocal)

    def __post_init__(self):
        _require(self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class DM2Config:
    alpha: float = DEFAULT_DM2_ALPHA
    weighting: RankWeighting = field(default_factory=RankWeighting.reciprocal)

    def __post_init__(self):
        _require(self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class DM3Config:
    d: float = DEFAULT_DM3_D
    k: int = DEFAULT_DM3_K

    def __post_init__(self):
        _require(0.0 <= self.d <= 1.0, f"d must be in [0, 1], got {self.d}")
        _require(0 <= self.k <= 8, f"k must be in [0, 8], got {self.k}")


@dataclass(frozen=True)
class DM4Config:
    schedule: Tuple[Tuple[float, int], ...] = DEFAULT_DM4_SCHEDULE

    def __post_init__(self):
        _require(len(self.schedule) > 0, "dm4 schedule must not be empty")
        for d, k in self.schedule:
            DM3Config(d, k)
        object.__setattr__(self, "schedule", tuple((float(d), int(k)) for d, k in self.schedule))


@dataclass(frozen=True)
class DM5Config:
    pset: int = DEFAULT_DM5_PSET
    mset: int = DEFAULT_DM5_MSET
    level: int = DEFAULT_DM5_LEVEL
    selem: StructuringElement = field(default_factory=StructuringElement.box)
    # Optional per-submask threshold overrides, keyed 1..5; the shared
    # `level` applies where a key is absent.
    level_overrides: Optional[dict] = None

    def __post_init__(self):
        for name in ("pset", "mset", "level"):
            value = getattr(self, name)
            _require(0 <= value <= 255, f"{name} must be in [0, 255], got {value}")
        if self.level_overrides:
            for key, value in self.level_overrides.items():
                _require(key in (1, 2, 3, 4, 5), f"submask key must be 1..5, got {key}")
                _require(0 <= value <= 255, f"level override must be in [0, 255], got {value}")

    def submask_level(self, index: int) -> int:
        if self.level_overrides and index in self.level_overrides:
            return self.level_overrides[index]
        return self.level


DetectorConfig = Union[DM1Config, DM2Config, DM3Config, DM4Config, DM5Config]


@dataclass(frozen=True)
class DetectionOutcome:
    """Detector mask plus the raw per-pixel statistic behind it."""

    mask: np.ndarray  # (H, W) bool, True = declared corrupted
    stat: np.ndarray  # (H, W) float64


def detect_dm1(img: np.ndarray, cfg: DM1Config, threads=1) -> DetectionOutcome:
    """Flag pixels whose rank-weighted score exceeds the window minimum by > alpha."""
    scores = rank_weighted_score_map(img, cfg.weighting, threads=threads)
    stat = scores[:, :, 0] - scores.min(axis=2)
    return DetectionOutcome(mask=stat > cfg.alpha, stat=stat)


def detect_dm2(img: np.ndarray, cfg: DM2Config, threads=1) -> DetectionOutcome:
    """Flag pixels where even the minimal rank-weighted window score exceeds alpha."""
    scores = rank_weighted_score_map(img, cfg.weighting, threads=threads)
    stat = scores.min(axis=2)
    return DetectionOutcome(mask=stat > cfg.alpha, stat=stat)


def peer_group_size(window: np.ndarray, center_index: int, d: float) -> int:
    """
    Number of window pixels within normalized distance d of the chosen pixel.

    Distances are normalized by the maximal RGB distance so d lives in
    [0, 1]; the comparison is strict and the pixel itself is not counted.
    """
    w = np.asarray(window, dtype=np.float64)
    if w.shape != (WINDOW_SIZE, 3):
        raise ValueError(f"window must have shape (9, 3), got {w.shape}")
    if not 0 <= center_index < WINDOW_SIZE:
        raise ValueError(f"center_index must be in [0, 8], got {center_index}")
    diff = w - w[center_index]
    dist = np.sqrt(np.sum(diff * diff, axis=1)) / MAX_PIXEL_DISTANCE
    within = dist < d
    within[center_index] = False
    return int(within.sum())


def peer_count_map(img: np.ndarray, d: float, threads=1) -> np.ndarray:
    """(H, W) peer-group sizes of every pixel within its own 3x3 window."""
    dist = center_distance_map(img, threads=threads) / MAX_PIXEL_DISTANCE
    return (dist < d).sum(axis=2)


def detect_dm3(img: np.ndarray, cfg: DM3Config, threads=1) -> DetectionOutcome:
    """Flag pixels whose peer-group size is at most k."""
    counts = peer_count_map(img, cfg.d, threads=threads)
    return DetectionOutcome(mask=counts <= cfg.k, stat=counts.astype(np.float64))


def detect_dm4(img: np.ndarray, cfg: DM4Config, threads=1) -> DetectionOutcome:
    """
    Iterated peer-group detection.

    The first schedule entry runs dm3 on the input image. Before each later
    entry, pixels flagged so far are replaced by the vector median of their
    window in the input image, and dm3 runs on that cleaned image. The mask
    is the union over all passes; the statistic records the 1-based pass
    that first flagged each pixel (0 = never flagged).
    """
    validate_color_image(img)
    union = np.zeros(img.shape[:2], dtype=bool)
    first_pass = np.zeros(img.shape[:2], dtype=np.float64)
    for index, (d, k) in enumerate(cfg.schedule):
        if index == 0:
            current = img
        else:
            current = replace_with_vmf(img, union)
        step = detect_dm3(current, DM3Config(d, k), threads=threads)
        newly = step.mask & ~union
        first_pass[newly] = index + 1
        union |= step.mask
    return DetectionOutcome(mask=union, stat=first_pass)


def dm5_submasks(img: np.ndarray, cfg: DM5Config) -> list:
    """
    The five component masks of the morphological detector, in order.

    1. Per-channel grayscale bottom-hats of the mset- and pset-subtracted
       channels, binarized.
    2. Interior-removed union of per-channel thresholds after subtracting
       pset (bright impulses).
    3. Interior-removed union of per-channel thresholds after adding mset.
    4. Binary bottom-hat of the thresholded grayscale image (dark holes).
    5. Binary bottom-hat of the thresholded grayscale of the pset-subtracted
       image.
    """
    validate_color_image(img)
    channels = [img[:, :, c] for c in range(3)]
    se = cfg.selem

    m1 = np.zeros(img.shape[:2], dtype=bool)
    for ch in channels:
        m1 |= threshold_bw(gray_bottom_hat(channel_shift(ch, -cfg.mset), se), cfg.submask_level(1))
    for ch in channels:
        m1 |= threshold_bw(gray_bottom_hat(channel_shift(ch, -cfg.pset), se), cfg.submask_level(1))

    m2 = np.zeros(img.shape[:2], dtype=bool)
    for ch in channels:
        m2 |= threshold_bw(channel_shift(ch, -cfg.pset), cfg.submask_level(2))
    m2 = remove_interior(m2)

    m3 = np.zeros(img.shape[:2], dtype=bool)
    for ch in channels:
        m3 |= threshold_bw(channel_shift(ch, cfg.mset), cfg.submask_level(3))
    m3 = remove_interior(m3)

    m4 = bottom_hat(threshold_bw(rgb_to_gray(img), cfg.submask_level(4)), se)

    shifted = channel_shift(img, -cfg.pset)
    m5 = bottom_hat(threshold_bw(rgb_to_gray(shifted), cfg.submask_level(5)), se)

    return [m1, m2, m3, m4, m5]


def detect_dm5(img: np.ndarray, cfg: DM5Config, threads=1) -> DetectionOutcome:
    """Union of the five morphological submasks; the statistic counts votes."""
    submasks = dm5_submasks(img, cfg)
    votes = np.zeros(img.shape[:2], dtype=np.float64)
    mask = np.zeros(img.shape[:2], dtype=bool)
    for sub in submasks:
        votes += sub
        mask |= sub
    return DetectionOutcome(mask=mask, stat=votes)


_DISPATCH = {
    DM1Config: detect_dm1,
    DM2Config: detect_dm2,
    DM3Config: detect_dm3,
    DM4Config: detect_dm4,
    DM5Config: detect_dm5,
}

DETECTOR_NAMES = {
    DM1Config: "dm1",
    DM2Config: "dm2",
    DM3Config: "dm3",
    DM4Config: "dm4",
    DM5Config: "dm5",
}


def detector_name(cfg: DetectorConfig) -> str:
    """Short method tag ("dm1".."dm5") for a config object."""
    try:
        return DETECTOR_NAMES[type(cfg)]
    except KeyError:
        raise TypeError(f"unsupported detector config type {type(cfg).__name__}")


def detect(img: np.ndarray, cfg: DetectorConfig, threads=1) -> DetectionOutcome:
    """Run the detector matching the config type."""
    try:
        fn = _DISPATCH[type(cfg)]
    except KeyError:
        raise TypeError(f"unsupported detector config type {type(cfg).__name__}")
    return fn(img, cfg, threads=threads)
