"""
Core raster types and shared primitives.

Conventions used throughout the package:

* color image  -- uint8 array of shape (H, W, 3), channels in R, G, B order
* gray image   -- uint8 array of shape (H, W)
* binary mask  -- bool array of shape (H, W)
* window       -- array of shape (9, 3): index 0 is the center pixel,
                  indices 1..8 are the 8-neighborhood in row-major scan order

All arrays are row-major with the origin at the top-left corner and the row
index first. Border handling for window extraction is replicate
(clamp-to-edge) padding. Intensity arithmetic saturates to [0, 255]; there is
no wraparound.
"""

import numpy as np

# 8-neighborhood offsets in row-major scan order (center excluded).
NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

# Window position offsets, center first.
WINDOW_OFFSETS = ((0, 0),) + NEIGHBOR_OFFSETS

WINDOW_SIZE = 9


def validate_color_image(img: np.ndarray) -> None:
    """Raise ValueError unless `img` is a valid uint8 (H, W, 3) color image."""
    if not isinstance(img, np.ndarray):
        raise ValueError("color image must be a numpy array")
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"color image must have shape (H, W, 3), got {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"color image must be uint8, got {img.dtype}")
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ValueError("color image must be at least 3x3")


def validate_gray_image(img: np.ndarray) -> None:
    """Raise ValueError unless `img` is a valid uint8 (H, W) gray image."""
    if not isinstance(img, np.ndarray):
        raise ValueError("gray image must be a numpy array")
    if img.ndim != 2:
        raise ValueError(f"gray image must have shape (H, W), got {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"gray image must be uint8, got {img.dtype}")


def validate_mask(mask: np.ndarray) -> None:
    """Raise ValueError unless `mask` is a valid bool (H, W) binary mask."""
    if not isinstance(mask, np.ndarray):
        raise ValueError("mask must be a numpy array")
    if mask.ndim != 2:
        raise ValueError(f"mask must have shape (H, W), got {mask.shape}")
    if mask.dtype != np.bool_:
        raise ValueError(f"mask must be bool, got {mask.dtype}")


def extract_window(img: np.ndarray, row: int, col: int) -> np.ndarray:
    """
    Extract the 3x3 neighborhood around (row, col) as a (9, 3) window.

    Index 0 of the result is the center pixel; indices 1..8 are the
    8-neighborhood in row-major scan order. Coordinates outside the image
    are clamped to the nearest edge (replicate padding).

    Raises:
        IndexError: if (row, col) lies outside the image.
    """
    validate_color_image(img)
    h, w = img.shape[:2]
    if not (0 <= row < h and 0 <= col < w):
        raise IndexError(f"window center ({row}, {col}) outside image of size {h}x{w}")
    out = np.empty((WINDOW_SIZE, 3), dtype=np.uint8)
    for idx, (dr, dc) in enumerate(WINDOW_OFFSETS):
        r = min(max(row + dr, 0), h - 1)
        c = min(max(col + dc, 0), w - 1)
        out[idx] = img[r, c]
    return out


def window_stack(img: np.ndarray) -> np.ndarray:
    """
    Build the (H, W, 9, 3) tensor of 3x3 windows for every pixel.

    Equivalent to calling extract_window at every coordinate; windows use
    the same center-first ordering and replicate border padding.
    """
    validate_color_image(img)
    h, w = img.shape[:2]
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    out = np.empty((h, w, WINDOW_SIZE, 3), dtype=np.uint8)
    for idx, (dr, dc) in enumerate(WINDOW_OFFSETS):
        out[:, :, idx, :] = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w, :]
    return out


def mask_window_stack(mask: np.ndarray) -> np.ndarray:
    """(H, W, 9) window tensor of a binary mask, same ordering as window_stack."""
    validate_mask(mask)
    h, w = mask.shape
    padded = np.pad(mask, 1, mode="edge")
    out = np.empty((h, w, WINDOW_SIZE), dtype=bool)
    for idx, (dr, dc) in enumerate(WINDOW_OFFSETS):
        out[:, :, idx] = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
    return out


def rgb_to_gray(img: np.ndarray) -> np.ndarray:
    """
    Convert a color image to grayscale with BT.601 luma weights.

    Each output value is round(0.299*R + 0.587*G + 0.114*B), rounding half
    up, clamped to [0, 255].
    """
    validate_color_image(img)
    luma = (
        0.299 * img[:, :, 0].astype(np.float64)
        + 0.587 * img[:, :, 1].astype(np.float64)
        + 0.114 * img[:, :, 2].astype(np.float64)
    )
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)


def threshold_bw(img: np.ndarray, level: int) -> np.ndarray:
    """
    Binarize a gray image: output is True where value > level (strict).

    Args:
        img: uint8 gray image.
        level: threshold in [0, 255].
    """
    validate_gray_image(img)
    if not 0 <= level <= 255:
        raise ValueError(f"level must be in [0, 255], got {level}")
    return img > level


def channel_shift(img: np.ndarray, amount: int) -> np.ndarray:
    """
    Add a signed constant to every intensity, saturating to [0, 255].

    Works on gray images and, applied channel-wise, on color images.
    A negative amount subtracts; values clamp at 0 and 255 instead of
    wrapping.
    """
    if not isinstance(img, np.ndarray) or img.dtype != np.uint8:
        raise ValueError("channel_shift expects a uint8 array")
    shifted = img.astype(np.int16) + int(amount)
    return np.clip(shifted, 0, 255).astype(np.uint8)
