import numpy as np
import pytest

from impulsekit.core import mask_window_stack, window_stack
from impulsekit.detectors import DM3Config, DM5Config, detect
from impulsekit.noise import NoiseSpec, corrupt
from impulsekit.pipeline import SwitchingConfig, denoise, plain_vmf_image
from impulsekit.vector_filters import amf_select, vmf_select

from conftest import constant_image


def test_switching_config_validation():
    SwitchingConfig(detector=DM5Config())
    with pytest.raises(ValueError):
        SwitchingConfig(detector=DM5Config(), replacement="median")
    with pytest.raises(ValueError):
        SwitchingConfig(detector=DM5Config(), passes=0)


def test_denoise_leaves_clean_pixels_untouched(portrait):
    crop = portrait[:64, :64]
    res = corrupt(crop, NoiseSpec("ci", 1, 0.1, 4))
    cfg = SwitchingConfig(detector=DM5Config())
    restored, flagged = denoise(res.noisy, cfg)
    assert np.array_equal(restored[~flagged], res.noisy[~flagged])
    assert flagged.any()


def test_denoise_single_pass_matches_manual_replacement(portrait):
    crop = portrait[:64, :64]
    noisy = corrupt(crop, NoiseSpec("ct", 1, 0.2, 6)).noisy
    cfg = SwitchingConfig(detector=DM5Config())
    restored, flagged = denoise(noisy, cfg)
    mask = detect(noisy, DM5Config()).mask
    assert np.array_equal(flagged, mask)
    expected = noisy.copy()
    expected[mask] = vmf_select(window_stack(noisy)[mask])
    assert np.array_equal(restored, expected)


def test_denoise_amf_replacement(portrait):
    crop = portrait[:48, :48]
    noisy = corrupt(crop, NoiseSpec("ci", 1, 0.15, 9)).noisy
    cfg = SwitchingConfig(detector=DM5Config(), replacement="amf")
    restored, flagged = denoise(noisy, cfg)
    mask = detect(noisy, DM5Config()).mask
    clean = ~mask_window_stack(mask)[mask]
    expected = noisy.copy()
    expected[mask] = amf_select(window_stack(noisy)[mask], clean)
    assert np.array_equal(restored, expected)


def test_denoise_multi_pass_unions_flags(portrait):
    crop = portrait[:64, :64]
    noisy = corrupt(crop, NoiseSpec("ci", 1, 0.3, 12)).noisy
    one = SwitchingConfig(detector=DM3Config(), passes=1)
    two = SwitchingConfig(detector=DM3Config(), passes=2)
    restored1, flagged1 = denoise(noisy, one)
    restored2, flagged2 = denoise(noisy, two)
    assert not (flagged1 & ~flagged2).any()
    # second pass re-detects on the restored image
    second = detect(restored1, DM3Config()).mask
    assert np.array_equal(flagged2, flagged1 | second)


def test_denoise_stops_when_nothing_flagged():
    img = constant_image(128, 16, 16)
    cfg = SwitchingConfig(detector=DM3Config(d=0.25, k=3), passes=5)
    restored, flagged = denoise(img, cfg)
    assert np.array_equal(restored, img)
    assert not flagged.any()


def test_denoise_does_not_mutate_input(portrait):
    crop = portrait[:32, :32]
    noisy = corrupt(crop, NoiseSpec("ct", 1, 0.2, 1)).noisy
    before = noisy.copy()
    denoise(noisy, SwitchingConfig(detector=DM5Config()))
    assert np.array_equal(noisy, before)


def test_plain_vmf_constant_image_fixed_point():
    img = constant_image(90, 16, 16)
    assert np.array_equal(plain_vmf_image(img), img)


def test_plain_vmf_matches_per_window_select(portrait):
    crop = portrait[:32, :32].copy()
    noisy = corrupt(crop, NoiseSpec("ci", 1, 0.2, 3)).noisy
    out = plain_vmf_image(noisy)
    wins = window_stack(noisy)
    expected = vmf_select(wins.reshape(-1, 9, 3)).reshape(out.shape)
    assert np.array_equal(out, expected)


def test_thread_count_does_not_change_results(portrait):
    crop = portrait[:96, :96]
    noisy = corrupt(crop, NoiseSpec("ci", 1, 0.2, 44)).noisy
    for detector in (DM3Config(), DM5Config()):
        cfg = SwitchingConfig(detector=detector)
        base_restored, base_flagged = denoise(noisy, cfg, threads=1)
        for threads in (2, 8):
            restored, flagged = denoise(noisy, cfg, threads=threads)
            assert np.array_equal(restored, base_restored)
            assert np.array_equal(flagged, base_flagged)
    assert np.array_equal(
        plain_vmf_image(noisy, threads=1), plain_vmf_image(noisy, threads=8)
    )


def test_denoise_improves_corrupted_image(portrait):
    crop = portrait[:128, :128]
    res = corrupt(crop, NoiseSpec("ci", 1, 0.1, 77))
    restored, _ = denoise(res.noisy, SwitchingConfig(detector=DM5Config()))
    err_noisy = float(np.mean((crop.astype(float) - res.noisy.astype(float)) ** 2))
    err_restored = float(np.mean((crop.astype(float) - restored.astype(float)) ** 2))
    assert err_restored < err_noisy / 10
