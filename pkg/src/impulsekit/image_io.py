"""Image file I/O for the command-line tools.

Color images are 8-bit RGB and travel as PNG or binary PPM (P6, maxval
255). Masks are one bit per pixel and travel as 1-bit PNG or binary PBM
(P4, set bit = flagged pixel). The format is picked by file extension.

Failures split into two exception types so callers can map them onto the
documented exit codes: ImageReadError for missing or undecodable inputs,
ImageWriteError for unwritable outputs (including unsupported output
extensions).
"""

import io
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import validate_color_image, validate_mask

COLOR_EXTENSIONS = (".png", ".ppm")
MASK_EXTENSIONS = (".png", ".pbm")

_WHITESPACE = b" \t\r\n\x0b\x0c"


class ImageReadError(Exception):
    """Input file missing, truncated, or not a supported image."""


class ImageWriteError(Exception):
    """Output path cannot be written or has an unsupported extension."""


def _next_token(data: bytes, pos: int):
    """Next header token after whitespace and # comments; (token, end)."""
    n = len(data)
    while pos < n:
        byte = data[pos]
        if byte in _WHITESPACE:
            pos += 1
        elif byte == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise ImageReadError("truncated netpbm header")
    return data[start:pos], pos


def _header_int(token: bytes, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ImageReadError(f"bad {what} in netpbm header: {token!r}")
    if value <= 0:
        raise ImageReadError(f"bad {what} in netpbm header: {value}")
    return value


def ppm_encode(img: np.ndarray) -> bytes:
    """Binary PPM (P6, maxval 255) bytes for a color image."""
    validate_color_image(img)
    h, w = img.shape[:2]
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img).tobytes()


def ppm_decode(data: bytes) -> np.ndarray:
    """Color image from binary PPM bytes. Only maxval 255 is supported."""
    magic, pos = _next_token(data, 0)
    if magic != b"P6":
        raise ImageReadError(f"not a binary PPM file (magic {magic!r})")
    width_tok, pos = _next_token(data, pos)
    height_tok, pos = _next_token(data, pos)
    maxval_tok, pos = _next_token(data, pos)
    width = _header_int(width_tok, "width")
    height = _header_int(height_tok, "height")
    maxval = _header_int(maxval_tok, "maxval")
    if maxval != 255:
        raise ImageReadError(f"unsupported PPM maxval {maxval} (need 255)")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise ImageReadError("missing whitespace before PPM raster")
    raster = data[pos + 1:]
    expected = width * height * 3
    if len(raster) < expected:
        raise ImageReadError("truncated PPM pixel data")
    pixels = np.frombuffer(raster[:expected], dtype=np.uint8)
    return pixels.reshape(height, width, 3).copy()


def pbm_encode(mask: np.ndarray) -> bytes:
    """Binary PBM (P4) bytes for a mask; set bits mark flagged pixels."""
    validate_mask(mask)
    h, w = mask.shape
    header = f"P4\n{w} {h}\n".encode("ascii")
    return header + np.packbits(mask, axis=1).tobytes()


def pbm_decode(data: bytes) -> np.ndarray:
    """Mask from binary PBM bytes."""
    magic, pos = _next_token(data, 0)
    if magic != b"P4":
        raise ImageReadError(f"not a binary PBM file (magic {magic!r})")
    width_tok, pos = _next_token(data, pos)
    height_tok, pos = _next_token(data, pos)
    width = _header_int(width_tok, "width")
    height = _header_int(height_tok, "height")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise ImageReadError("missing whitespace before PBM raster")
    raster = data[pos + 1:]
    row_bytes = (width + 7) // 8
    expected = height * row_bytes
    if len(raster) < expected:
        raise ImageReadError("truncated PBM pixel data")
    packed = np.frombuffer(raster[:expected], dtype=np.uint8)
    bits = np.unpackbits(packed.reshape(height, row_bytes), axis=1)
    return bits[:, :width].astype(bool)


def _png_color_bytes(img: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def _png_mask_bytes(mask: np.ndarray) -> bytes:
    gray = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), "L")
    buf = io.BytesIO()
    gray.convert("1").save(buf, format="PNG")
    return buf.getvalue()


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ImageReadError(f"cannot read {path}: {exc}") from exc


def _write_bytes(path: str, payload: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from exc


def read_color_image(path: str) -> np.ndarray:
    """Load a color image (PNG or PPM P6) as an (H, W, 3) uint8 array.

    Raises:
        ImageReadError: Missing file, undecodable data, or an extension
            outside COLOR_EXTENSIONS.
    """
    ext = os.path.splitext(path)[1].lower()
    if ext == ".ppm":
        return ppm_decode(_read_bytes(path))
    if ext == ".png":
        try:
            with Image.open(io.BytesIO(_read_bytes(path))) as im:
                return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise ImageReadError(f"cannot decode {path}: {exc}") from exc
    raise ImageReadError(f"unsupported color image extension {ext!r} for {path}")


def write_color_image(path: str, img: np.ndarray) -> None:
    """Write a color image as PNG or PPM P6, chosen by extension.

    Raises:
        ImageWriteError: Unwritable path or unsupported extension.
    """
    validate_color_image(img)
    ext = os.path.splitext(path)[1].lower()
    if ext == ".ppm":
        _write_bytes(path, ppm_encode(img))
    elif ext == ".png":
        _write_bytes(path, _png_color_bytes(img))
    else:
        raise ImageWriteError(f"unsupported color image extension {ext!r} for {path}")


def read_mask(path: str) -> np.ndarray:
    """Load a mask (1-bit PNG or PBM P4) as an (H, W) bool array."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".pbm":
        return pbm_decode(_read_bytes(path))
    if ext == ".png":
        try:
            with Image.open(io.BytesIO(_read_bytes(path))) as im:
                return np.asarray(im.convert("L"), dtype=np.uint8) > 0
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise ImageReadError(f"cannot decode {path}: {exc}") from exc
    raise ImageReadError(f"unsupported mask extension {ext!r} for {path}")


def write_mask(path: str, mask: np.ndarray) -> None:
    """Write a mask as 1-bit PNG or PBM P4, chosen by extension."""
    validate_mask(mask)
    ext = os.path.splitext(path)[1].lower()
    if ext == ".pbm":
        _write_bytes(path, pbm_encode(mask))
    elif ext == ".png":
        _write_bytes(path, _png_mask_bytes(mask))
    else:
        raise ImageWriteError(f"unsupported mask extension {ext!r} for {path}")
