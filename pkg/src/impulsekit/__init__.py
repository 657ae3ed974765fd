"""Impulse-noise corruption, detection, removal and scoring for color images.

The toolkit covers the full experimental loop: six parametric noise models
(ci/ct families, variants 1-3), five corruption detectors (dm1..dm5),
switching vector-median restoration, and FP/FN/MSE/PSNR evaluation with
ROC parameter sweeps and timing. Everything is seeded and deterministic,
including under row-parallel execution.
"""

from .assets import sample_image
from .core import (
    extract_window,
    rgb_to_gray,
    threshold_bw,
    channel_shift,
)
from .detectors import (
    DM1Config,
    DM2Config,
    DM3Config,
    DM4Config,
    DM5Config,
    DetectionOutcome,
    detect,
    detector_name,
)
from .evaluation import (
    ConfusionCounts,
    QualityReport,
    RocPoint,
    confusion,
    mse_psnr,
    rates,
    roc_sweep,
    select_operating_point,
    timed_denoise,
)
from .image_io import (
    read_color_image,
    read_mask,
    write_color_image,
    write_mask,
)
from .morphology import (
    StructuringElement,
    bottom_hat,
    closing,
    dilate,
    erode,
    gray_bottom_hat,
    opening,
    remove_interior,
)
from .noise import CorruptionResult, NoiseSpec, corrupt
from .pipeline import SwitchingConfig, denoise, plain_vmf_image
from .vector_filters import RankWeighting, amf, rwvmf, vmf

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "sample_image",
    "extract_window",
    "rgb_to_gray",
    "threshold_bw",
    "channel_shift",
    "DM1Config",
    "DM2Config",
    "DM3Config",
    "DM4Config",
    "DM5Config",
    "DetectionOutcome",
    "detect",
    "detector_name",
    "ConfusionCounts",
    "QualityReport",
    "RocPoint",
    "confusion",
    "mse_psnr",
    "rates",
    "roc_sweep",
    "select_operating_point",
    "timed_denoise",
    "read_color_image",
    "read_mask",
    "write_color_image",
    "write_mask",
    "StructuringElement",
    "bottom_hat",
    "closing",
    "dilate",
    "erode",
    "gray_bottom_hat",
    "opening",
    "remove_interior",
    "CorruptionResult",
    "NoiseSpec",
    "corrupt",
    "SwitchingConfig",
    "denoise",
    "plain_vmf_image",
    "RankWeighting",
    "amf",
    "rwvmf",
    "vmf",
]
