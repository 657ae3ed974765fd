"""
Binary and grayscale morphology on masks and gray images.

Binary operators treat cells outside the image as 0, so erosion shrinks at
the borders and dilation never wraps. Grayscale min/max filtering replicates
the nearest edge value instead, which keeps intensity impulses at image
borders visible to the bottom-hat. Masks are bool arrays; gray images are
uint8 (see core).
"""

from dataclasses import dataclass

import numpy as np

from .core import validate_gray_image, validate_mask


@dataclass(frozen=True)
class StructuringElement:
    """An odd-sized binary probe shape whose origin is the central cell."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("structuring element must be 2-dimensional")
        if bits.shape[0] % 2 == 0 or bits.shape[1] % 2 == 0:
            raise ValueError(f"structuring element dimensions must be odd, got {bits.shape}")
        if not bits[bits.shape[0] // 2, bits.shape[1] // 2]:
            raise ValueError("structuring element origin cell must be set")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def box(cls, size: int = 3) -> "StructuringElement":
        """The default all-ones square element."""
        return cls(np.ones((size, size), dtype=bool))

    @classmethod
    def from_string(cls, text: str) -> "StructuringElement":
        """
        Parse rows of 0/1 separated by '/', e.g. "111/111/111".
        """
        rows = text.split("/")
        if not rows or any(not r for r in rows):
            raise ValueError(f"empty row in structuring element {text!r}")
        if any(set(r) - {"0", "1"} for r in rows):
            raise ValueError(f"structuring element {text!r} may contain only 0, 1 and /")
        if len(set(len(r) for r in rows)) != 1:
            raise ValueError(f"ragged rows in structuring element {text!r}")
        bits = np.array([[c == "1" for c in r] for r in rows], dtype=bool)
        return cls(bits)

    def to_string(self) -> str:
        return "/".join("".join("1" if b else "0" for b in row) for row in self.bits)

    def reflect(self) -> "StructuringElement":
        """Point reflection about the origin (no-op for symmetric shapes)."""
        return StructuringElement(self.bits[::-1, ::-1].copy())

    @property
    def radius(self) -> tuple:
        return (self.bits.shape[0] // 2, self.bits.shape[1] // 2)

    def offsets(self):
        """(dr, dc) positions of set cells relative to the origin."""
        rr, cc = np.nonzero(self.bits)
        rh, rw = self.radius
        return list(zip((rr - rh).tolist(), (cc - rw).tolist()))


def dilate(a: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Minkowski dilation: True where the reflected element hits any set bit."""
    validate_mask(a)
    h, w = a.shape
    rh, rw = se.radius
    padded = np.zeros((h + 2 * rh, w + 2 * rw), dtype=bool)
    padded[rh:rh + h, rw:rw + w] = a
    out = np.zeros((h, w), dtype=bool)
    for dr, dc in se.offsets():
        out |= padded[rh - dr:rh - dr + h, rw - dc:rw - dc + w]
    return out


def erode(a: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Erosion: True where every set cell of the element lands on a set bit."""
    validate_mask(a)
    h, w = a.shape
    rh, rw = se.radius
    padded = np.zeros((h + 2 * rh, w + 2 * rw), dtype=bool)
    padded[rh:rh + h, rw:rw + w] = a
    out = np.ones((h, w), dtype=bool)
    for dr, dc in se.offsets():
        out &= padded[rh + dr:rh + dr + h, rw + dc:rw + dc + w]
    return out


def closing(a: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Dilation followed by erosion; fills gaps smaller than the element."""
    return erode(dilate(a, se), se)


def opening(a: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Erosion followed by dilation; removes speckles smaller than the element."""
    return dilate(erode(a, se), se)


def bottom_hat(a: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Closing minus the input: the bits the closing filled in."""
    return closing(a, se) & ~a


def _gray_reduce(img: np.ndarray, se: StructuringElement, reducer, sign: int) -> np.ndarray:
    h, w = img.shape
    rh, rw = se.radius
    padded = np.pad(img, ((rh, rh), (rw, rw)), mode="edge")
    stack = [
        padded[rh + sign * dr:rh + sign * dr + h, rw + sign * dc:rw + sign * dc + w]
        for dr, dc in se.offsets()
    ]
    return reducer(np.stack(stack, axis=0), axis=0)


def gray_dilate(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Windowed maximum over the element's support, replicate borders."""
    validate_gray_image(img)
    return _gray_reduce(img, se, np.max, -1)


def gray_erode(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Windowed minimum over the element's support, replicate borders."""
    validate_gray_image(img)
    return _gray_reduce(img, se, np.min, +1)


def gray_bottom_hat(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """
    Grayscale closing minus the image, saturating at 0.

    Responds at small dark structures (dark impulses); locally constant
    regions and bright spikes map to 0.
    """
    closed = gray_erode(gray_dilate(img, se), se)
    return np.clip(closed.astype(np.int16) - img.astype(np.int16), 0, 255).astype(np.uint8)


def remove_interior(a: np.ndarray) -> np.ndarray:
    """
    Clear bits whose four 4-connected neighbors are all set.

    Out-of-image neighbors count as 0, so border pixels are never interior.
    Leaves region boundaries and isolated bits untouched.
    """
    validate_mask(a)
    h, w = a.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = a
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return a & ~interior


def mask_union(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a | b


def mask_intersect(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a & b


def mask_complement(a: np.ndarray) -> np.ndarray:
    return ~a


def mask_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Set difference a minus b."""
    return a & ~b
