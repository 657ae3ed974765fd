"""Quality metrics, ROC parameter sweeps and wall-clock timing.

Restoration quality is scored with MSE over all 3N channel values and
PSNR = 20 log10(255 / sqrt(MSE)). Detection quality is scored as false
positive and false negative rates against the corruption ground truth,
normalized over actual negatives and actual positives respectively.

Reports serialize to CSV (comma separator, header row, '.' decimal point,
LF line endings) and to JSON documents mirroring the same fields. Floats
use Python's shortest round-trip representation; a non-finite PSNR is
written as "inf" in both formats.
"""

import csv
import io
import json
import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .core import validate_color_image, validate_mask
from .detectors import (
    DM1Config,
    DM2Config,
    DM3Config,
    DM4Config,
    DM5Config,
    DetectorConfig,
    detect,
    detector_name,
)
from .noise import NoiseSpec, corrupt
from .pipeline import SwitchingConfig, denoise


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel tallies of a detection mask against the ground truth."""

    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class QualityReport:
    """Metrics for one restoration run.

    ``extras`` holds optional named columns (e.g. third-party metric
    values) that serializers append after the standard fields.
    """

    mse: float
    psnr: float
    fp_rate: float
    fn_rate: float
    elapsed_seconds: float
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RocPoint:
    """One grid point of a parameter sweep: config plus its error rates."""

    params: DetectorConfig
    fp_rate: float
    fn_rate: float


def mse_psnr(clean: np.ndarray, restored: np.ndarray):
    """Mean squared error and peak signal-to-noise ratio of a restoration.

    Args:
        clean: (H, W, 3) uint8 reference image.
        restored: (H, W, 3) uint8 image to score, same shape.

    Returns:
        Tuple ``(mse, psnr)``. MSE averages the squared channel
        differences over all 3N values; PSNR is 20·log10(255/√MSE) in dB,
        or +inf when MSE is zero.

    Raises:
        ValueError: If the shapes differ or an input is not a color image.
    """
    validate_color_image(clean)
    validate_color_image(restored)
    if clean.shape != restored.shape:
        raise ValueError(f"shape mismatch: {clean.shape} vs {restored.shape}")
    diff = clean.astype(np.float64) - restored.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return 0.0, math.inf
    return mse, 20.0 * math.log10(255.0 / math.sqrt(mse))


def confusion(truth: np.ndarray, detected: np.ndarray) -> ConfusionCounts:
    """Per-pixel confusion counts of a detection mask vs. the truth mask."""
    validate_mask(truth)
    validate_mask(detected)
    if truth.shape != detected.shape:
        raise ValueError(f"shape mismatch: {truth.shape} vs {detected.shape}")
    return ConfusionCounts(
        tp=int(np.count_nonzero(truth & detected)),
        fp=int(np.count_nonzero(~truth & detected)),
        fn=int(np.count_nonzero(truth & ~detected)),
        tn=int(np.count_nonzero(~truth & ~detected)),
    )


def rates(c: ConfusionCounts):
    """False positive and false negative rates from confusion counts.

    fp_rate is the fraction of clean pixels wrongly flagged, fn_rate the
    fraction of corrupted pixels missed. A zero denominator yields 0.0.
    """
    negatives = c.fp + c.tn
    positives = c.fn + c.tp
    fp_rate = c.fp / negatives if negatives else 0.0
    fn_rate = c.fn / positives if positives else 0.0
    return fp_rate, fn_rate


def distance_to_origin(fp_rate: float, fn_rate: float) -> float:
    """Default operating-point score: Euclidean distance to (0, 0)."""
    return math.hypot(fp_rate, fn_rate)


def select_operating_point(points, rule=distance_to_origin) -> RocPoint:
    """The sweep point minimizing the scalarization rule (first on ties)."""
    points = list(points)
    if not points:
        raise ValueError("no sweep points to select from")
    best = points[0]
    best_score = rule(best.fp_rate, best.fn_rate)
    for point in points[1:]:
        score = rule(point.fp_rate, point.fn_rate)
        if score < best_score:
            best, best_score = point, score
    return best


def roc_sweep(clean, spec: NoiseSpec, detector_family: str, grid, threads=1,
              rule=distance_to_origin):
    """Corrupt once, run every config in the grid, and pick an operating point.

    Args:
        clean: (H, W, 3) uint8 reference image.
        spec: Noise model applied once before the sweep.
        detector_family: "dm1".."dm5"; every grid config must match it.
        grid: Non-empty sequence of detector configs.
        threads: Worker threads per detector run.
        rule: Scalarization of (fp_rate, fn_rate); lower is better.

    Returns:
        Tuple ``(points, best)``: one RocPoint per config in grid order,
        and the point minimizing the rule (first on ties).

    Raises:
        ValueError: On an empty grid or a config of the wrong family.

    DM1 and DM2 share a threshold-free statistic map, so their sweeps
    compute it once and re-threshold per grid point.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("parameter grid is empty")
    for cfg in grid:
        if detector_name(cfg) != detector_family:
            raise ValueError(
                f"grid entry {type(cfg).__name__} does not belong to {detector_family!r}"
            )
    result = corrupt(clean, spec)
    truth = result.pixel_mask

    points = []
    same_weighting = (
        detector_family in ("dm1", "dm2")
        and len({cfg.weighting.kind for cfg in grid}) == 1
    )
    if same_weighting:
        stat = detect(result.noisy, grid[0], threads=threads).stat
        for cfg in grid:
            fp_rate, fn_rate = rates(confusion(truth, stat > cfg.alpha))
            points.append(RocPoint(cfg, fp_rate, fn_rate))
    else:
        for cfg in grid:
            outcome = detect(result.noisy, cfg, threads=threads)
            fp_rate, fn_rate = rates(confusion(truth, outcome.mask))
            points.append(RocPoint(cfg, fp_rate, fn_rate))
    return points, select_operating_point(points, rule)


def timed_denoise(img, cfg: SwitchingConfig, repeats=20, threads=1):
    """Denoise with wall-clock timing.

    Runs one untimed warm-up (its output is what gets returned), then
    ``repeats`` timed runs, reporting the median of the samples.

    Args:
        img: (H, W, 3) uint8 image.
        cfg: Switching-filter configuration.
        repeats: Number of timed runs, at least 1.
        threads: Worker threads per run.

    Returns:
        Tuple ``(restored, flagged, elapsed_seconds)``.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    restored, flagged = denoise(img, cfg, threads=threads)
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        denoise(img, cfg, threads=threads)
        samples.append(time.perf_counter() - start)
    return restored, flagged, float(statistics.median(samples))


def config_params(cfg: DetectorConfig) -> dict:
    """Flat, JSON-safe parameter dict for a detector config."""
    if isinstance(cfg, (DM1Config, DM2Config)):
        return {"alpha": cfg.alpha, "weighting": cfg.weighting.kind}
    if isinstance(cfg, DM3Config):
        return {"d": cfg.d, "k": cfg.k}
    if isinstance(cfg, DM4Config):
        schedule = ",".join(f"{d}:{k}" for d, k in cfg.schedule)
        return {"schedule": schedule}
    if isinstance(cfg, DM5Config):
        params = {
            "pset": cfg.pset,
            "mset": cfg.mset,
            "level": cfg.level,
            "selem": cfg.selem.to_string(),
        }
        if cfg.level_overrides:
            params["level_overrides"] = dict(cfg.level_overrides)
        return params
    raise TypeError(f"unsupported detector config type {type(cfg).__name__}")


def _format_value(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def params_label(cfg: DetectorConfig) -> str:
    """Compact "key=value ..." label for one detector config."""
    items = config_params(cfg).items()
    return " ".join(f"{key}={_format_value(value)}" for key, value in items)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else "-inf"
    return value


def roc_points_csv(detector_family: str, points) -> str:
    """CSV document for sweep points: detector,params,fp_rate,fn_rate."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["detector", "params", "fp_rate", "fn_rate"])
    for point in points:
        writer.writerow([
            detector_family,
            params_label(point.params),
            _format_value(point.fp_rate),
            _format_value(point.fn_rate),
        ])
    return out.getvalue()


def roc_points_json(detector_family: str, points, best: RocPoint) -> str:
    """JSON document mirroring the CSV sweep fields, plus the selection."""
    def encode(point):
        return {
            "params": config_params(point.params),
            "fp_rate": _json_safe(point.fp_rate),
            "fn_rate": _json_safe(point.fn_rate),
        }

    doc = {
        "detector": detector_family,
        "points": [encode(p) for p in points],
        "best": encode(best),
    }
    return json.dumps(doc, indent=2) + "\n"


REPORT_FIELDS = ("mse", "psnr", "fp_rate", "fn_rate", "elapsed_seconds")


def quality_reports_csv(reports, labels=None) -> str:
    """CSV document for quality reports, one row per report.

    Args:
        reports: Sequence of QualityReport.
        labels: Optional row labels; adds a leading "label" column.

    Extras keys (union over all reports, sorted) become trailing columns;
    rows without a key leave the cell empty.
    """
    reports = list(reports)
    extra_keys = sorted({key for report in reports for key in report.extras})
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = list(REPORT_FIELDS) + extra_keys
    if labels is not None:
        header = ["label"] + header
    writer.writerow(header)
    for index, report in enumerate(reports):
        row = [_format_value(getattr(report, name)) for name in REPORT_FIELDS]
        row += [
            _format_value(report.extras[key]) if key in report.extras else ""
            for key in extra_keys
        ]
        if labels is not None:
            row = [labels[index]] + row
        writer.writerow(row)
    return out.getvalue()


def quality_reports_json(reports, labels=None) -> str:
    """JSON document mirroring the CSV quality-report fields."""
    reports = list(reports)
    rows = []
    for index, report in enumerate(reports):
        row = {name: _json_safe(getattr(report, name)) for name in REPORT_FIELDS}
        for key, value in report.extras.items():
            row[key] = _json_safe(value)
        if labels is not None:
            row = {"label": labels[index], **row}
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"
