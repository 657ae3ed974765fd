"""
Reproducible impulse-noise models for color images.

Two families:

* CI -- each channel of each pixel is independently replaced by an impulse
  value with probability p.
* CT -- with probability p all three channels of a pixel are replaced by
  three independent impulse values.

Three value variants shared by both families:

* 1 -- 0 or 255 with equal probability (salt and pepper)
* 2 -- uniform integer on [0, 255]
* 3 -- uniform over the 112-value set [0, 55] + [200, 255]

Generation is deterministic for a fixed seed. The stream is a single
numpy PCG64 generator consumed in two steps: first one uniform deviate per
channel (CI) or per pixel (CT) in row-major order with channels in R, G, B
order, then one impulse value per corrupted channel in the same order.
"""

from dataclasses import dataclass

import numpy as np

from .core import validate_color_image

FAMILIES = ("ci", "ct")
VARIANTS = (1, 2, 3)

# Variant 3 draws from [0, 55] + [200, 255]: 112 equiprobable values.
_VARIANT3_LOW_SIZE = 56
_VARIANT3_SET_SIZE = 112


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of one corruption run."""

    family: str
    variant: int
    p: float
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class CorruptionResult:
    """A corrupted image together with its ground-truth corruption maps."""

    noisy: np.ndarray          # (H, W, 3) uint8
    pixel_mask: np.ndarray     # (H, W) bool, True where any channel corrupted
    channel_masks: np.ndarray  # (H, W, 3) bool, per-channel corruption flags


def draw_impulse(variant: int, rng: np.random.Generator, size=None):
    """
    Draw impulse intensity values for the given variant.

    Returns a python int when size is None, else a uint8 array of that size.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant}")
    n = 1 if size is None else size
    if variant == 1:
        values = rng.integers(0, 2, n, dtype=np.uint8) * np.uint8(255)
    elif variant == 2:
        values = rng.integers(0, 256, n).astype(np.uint8)
    else:
        idx = rng.integers(0, _VARIANT3_SET_SIZE, n)
        values = np.where(idx < _VARIANT3_LOW_SIZE, idx, idx + 144).astype(np.uint8)
    if size is None:
        return int(values[0])
    return values


def corrupt(img: np.ndarray, spec: NoiseSpec) -> CorruptionResult:
    """
    Apply the noise model to a copy of `img`.

    The input image is never mutated. channel_masks records exactly the
    replaced channels; a replacement that happens to draw the original value
    still counts as corrupted.
    """
    validate_color_image(img)
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    noisy = img.copy()
    h, w = img.shape[:2]

    if spec.family == "ci":
        channel_masks = rng.random((h, w, 3)) < spec.p
        values = draw_impulse(spec.variant, rng, int(channel_masks.sum()))
        noisy[channel_masks] = values
    else:
        hit = rng.random((h, w)) < spec.p
        n = int(hit.sum())
        values = draw_impulse(spec.variant, rng, 3 * n).reshape(n, 3)
        noisy[hit] = values
        channel_masks = np.repeat(hit[:, :, None], 3, axis=2)

    return CorruptionResult(
        noisy=noisy,
        pixel_mask=channel_masks.any(axis=2),
        channel_masks=channel_masks,
    )
