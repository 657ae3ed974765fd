import numpy as np
import pytest

from impulsekit.core import (
    WINDOW_OFFSETS,
    channel_shift,
    extract_window,
    mask_window_stack,
    rgb_to_gray,
    threshold_bw,
    validate_color_image,
    window_stack,
)


def ramp_image(h=6, w=7):
    # distinct value per (pixel, channel) so window ordering mistakes show up
    vals = np.arange(h * w * 3, dtype=np.uint8).reshape(h, w, 3)
    return vals


def test_extract_window_center_first():
    img = ramp_image()
    win = extract_window(img, 2, 3)
    assert win.shape == (9, 3)
    assert np.array_equal(win[0], img[2, 3])
    for idx, (dr, dc) in enumerate(WINDOW_OFFSETS):
        assert np.array_equal(win[idx], img[2 + dr, 3 + dc])


def test_extract_window_replicates_at_corner():
    img = ramp_image()
    win = extract_window(img, 0, 0)
    # the top-left corner clamps all out-of-image coordinates back to (0, 0)
    assert np.array_equal(win[1], img[0, 0])
    assert np.array_equal(win[2], img[0, 0])
    assert np.array_equal(win[4], img[0, 0])
    assert np.array_equal(win[8], img[1, 1])


def test_extract_window_rejects_outside_center():
    img = ramp_image()
    with pytest.raises(IndexError):
        extract_window(img, -1, 0)
    with pytest.raises(IndexError):
        extract_window(img, 0, 7)


def test_window_stack_matches_extract_window(rng):
    img = rng.integers(0, 256, (5, 6, 3), dtype=np.uint8)
    stack = window_stack(img)
    assert stack.shape == (5, 6, 9, 3)
    for r in range(5):
        for c in range(6):
            assert np.array_equal(stack[r, c], extract_window(img, r, c))


def test_mask_window_stack_alignment(rng):
    mask = rng.random((5, 6)) < 0.4
    stack = mask_window_stack(mask)
    assert stack.shape == (5, 6, 9)
    assert np.array_equal(stack[:, :, 0], mask)
    # away from the replicated border every entry is the shifted mask
    for idx, (dr, dc) in enumerate(WINDOW_OFFSETS):
        assert np.array_equal(stack[1:-1, 1:-1, idx],
                              mask[1 + dr:4 + dr, 1 + dc:5 + dc])


def test_rgb_to_gray_weights_and_rounding():
    img = np.zeros((3, 3, 3), dtype=np.uint8)
    img[0, 0] = (255, 0, 0)
    img[0, 1] = (0, 255, 0)
    img[0, 2] = (0, 0, 255)
    img[1, 0] = (100, 100, 100)
    gray = rgb_to_gray(img)
    assert gray[0, 0] == 76    # round(76.245)
    assert gray[0, 1] == 150   # round(149.685)
    assert gray[0, 2] == 29    # round(29.07)
    assert gray[1, 0] == 100
    assert gray.dtype == np.uint8


def test_rgb_to_gray_rounds_half_up():
    # 0.299*5 + 0.587*0 + 0.114*0 = 1.495 -> 1; (10,0,0) -> 2.99 -> 3
    img = np.zeros((3, 3, 3), dtype=np.uint8)
    img[0, 0] = (5, 0, 0)
    img[0, 1] = (10, 0, 0)
    gray = rgb_to_gray(img)
    assert gray[0, 0] == 1
    assert gray[0, 1] == 3


def test_threshold_is_strict():
    img = np.array([[99, 100, 101]], dtype=np.uint8)
    out = threshold_bw(img, 100)
    assert out.tolist() == [[False, False, True]]
    with pytest.raises(ValueError):
        threshold_bw(img, 256)


def test_channel_shift_saturates_both_ways():
    img = np.array([[0, 10, 250]], dtype=np.uint8)
    assert channel_shift(img, 10).tolist() == [[10, 20, 255]]
    assert channel_shift(img, -20).tolist() == [[0, 0, 230]]
    color = np.full((3, 3, 3), 200, dtype=np.uint8)
    shifted = channel_shift(color, 100)
    assert shifted.max() == 255 and shifted.min() == 255


def test_validate_color_image_rejects_bad_shapes():
    with pytest.raises(ValueError):
        validate_color_image(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        validate_color_image(np.zeros((4, 4, 3), dtype=np.float64))
    with pytest.raises(ValueError):
        validate_color_image(np.zeros((2, 4, 3), dtype=np.uint8))
