"""Access to bundled sample data."""

from importlib import resources

import numpy as np
from PIL import Image


def sample_image() -> np.ndarray:
    """The bundled 512x512 test photograph as an (H, W, 3) uint8 array.

    A natural portrait with channel values compressed into [180, 240], so
    range-extreme impulse values never occur in the clean scene and the
    morphological detector's thresholds have a provably false-alarm-free
    operating window. See scripts/make_test_image.py for the derivation.
    """
    ref = resources.files("impulsekit").joinpath("data/portrait.png")
    with ref.open("rb") as fh, Image.open(fh) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
