"""Regenerate the bundled 512x512 test photograph.

Source is scikit-image's public-domain astronaut portrait. Channel values
are linearly compressed from [0, 255] into [180, 240].

Two separate needs drive the compression. First, range-extreme impulses
(0 and 255) must never coincide with scene content, otherwise the noise
ground truth contains corruptions that are indistinguishable from the
clean image and no detector can reach a near-zero miss rate. Second, the
morphological detector's thresholded bottom-hat is only robust at high
noise densities when the scene floor is bright enough: a clean pixel's
bottom-hat residue is bounded by 255 - background, so a threshold `level`
with level >= 255 - floor never false-fires, while catching dark impulses
in the darkest region needs level < floor - mset and keeping the additive
submask saturated (boundary ring only) needs mset > level. Those combine
to floor > 2 * (255 - floor), i.e. a scene floor above 170. The [180, 240]
range satisfies that with margin while keeping the photograph natural.

Run from the repository root:

    python3 scripts/make_test_image.py
"""

import numpy as np
from PIL import Image
from skimage import data

LOW = 180
HIGH = 240
OUT = "src/impulsekit/data/portrait.png"


def main():
    img = data.astronaut()
    assert img.shape == (512, 512, 3) and img.dtype == np.uint8
    scaled = np.floor(LOW + img * ((HIGH - LOW) / 255.0) + 0.5).astype(np.uint8)
    Image.fromarray(scaled, "RGB").save(OUT, format="PNG")
    print(f"wrote {OUT}: range [{scaled.min()}, {scaled.max()}]")


if __name__ == "__main__":
    main()
