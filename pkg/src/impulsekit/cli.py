"""Command-line front end.

Subcommands:
    corrupt    apply a noise model; write the noisy image + ground-truth mask
    detect     run a detector on an image; write the detection mask
    denoise    switching filter: detect, replace flagged pixels, write output
    evaluate   score a restored image against a clean reference
    roc        sweep one detector parameter; emit the FP/FN trade-off table
    bench      time the switching filter per detector on one corrupted image

Exit codes: 0 success; 2 unreadable or undecodable input; 3 unwritable
output; 4 invalid parameters (the message names the offending flag).

stderr carries human-readable notes. When --report {csv|json} is given,
stdout carries only the machine-readable document; without it, short
human-readable summaries are printed instead. All randomness flows from
--seed; --threads only affects speed, never output bytes.
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .detectors import (
    DEFAULT_DM1_ALPHA,
    DEFAULT_DM2_ALPHA,
    DM1Config,
    DM2Config,
    DM3Config,
    DM4Config,
    DM5Config,
    DetectorConfig,
    detect,
)
from .evaluation import (
    QualityReport,
    confusion,
    mse_psnr,
    params_label,
    quality_reports_csv,
    quality_reports_json,
    rates,
    roc_points_csv,
    roc_points_json,
    roc_sweep,
    timed_denoise,
)
from .image_io import (
    ImageReadError,
    ImageWriteError,
    read_color_image,
    read_mask,
    write_color_image,
    write_mask,
)
from .morphology import StructuringElement
from .noise import FAMILIES, VARIANTS, NoiseSpec, corrupt
from .pipeline import REPLACEMENT_NAMES, SwitchingConfig, denoise
from .vector_filters import WEIGHTING_NAMES, RankWeighting

EXIT_OK = 0
EXIT_READ = 2
EXIT_WRITE = 3
EXIT_USAGE = 4

DETECTOR_CHOICES = ("dm1", "dm2", "dm3", "dm4", "dm5")
BENCH_DEFAULT_DETECTORS = ",".join(DETECTOR_CHOICES)


class UsageError(Exception):
    """Invalid command-line parameters; the message names the flag."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the exit-code table
    # reserves 2 for unreadable inputs, so reroute to UsageError -> 4.
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunManifest:
    """Validated description of one CLI run, ready to execute."""

    command: str
    input_path: str
    seed: int = 0
    threads: Optional[int] = None
    report: Optional[str] = None
    out_path: Optional[str] = None
    mask_out_path: Optional[str] = None
    clean_path: Optional[str] = None
    truth_path: Optional[str] = None
    mask_path: Optional[str] = None
    noise: Optional[NoiseSpec] = None
    detector: Optional[DetectorConfig] = None
    detector_family: Optional[str] = None
    switching: Optional[SwitchingConfig] = None
    grid: Optional[list] = None
    bench_detectors: tuple = ()
    repeats: int = 20

    def validate(self) -> None:
        """Check that every referenced input path exists."""
        for path in (self.input_path, self.clean_path, self.truth_path, self.mask_path):
            if path is not None and not os.path.isfile(path):
                raise ImageReadError(f"cannot read {path}: no such file")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="impulsekit", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: all cores); never changes output")
    common.add_argument("--report", choices=("csv", "json"), default=None,
                        help="emit a machine-readable report on stdout")

    noise = _Parser(add_help=False)
    noise.add_argument("--family", choices=FAMILIES, required=True,
                       help="ci: channels corrupted independently; ct: together")
    noise.add_argument("--variant", type=int, choices=VARIANTS, required=True,
                       help="impulse values: 1 = {0,255}, 2 = uniform, 3 = extreme bands")
    noise.add_argument("--p", type=float, required=True, help="corruption probability in (0, 1)")

    det = _Parser(add_help=False)
    det.add_argument("--detector", choices=DETECTOR_CHOICES, required=True)
    det.add_argument("--alpha", type=float, default=None,
                     help="dm1/dm2 threshold (defaults tuned per detector)")
    det.add_argument("--weighting", choices=WEIGHTING_NAMES, default="1/r",
                     help="dm1/dm2 rank weighting (default 1/r)")
    det.add_argument("--d", type=float, default=None,
                     help="dm3 peer distance as a fraction of the maximum, in [0, 1]")
    det.add_argument("--k", type=int, default=None, help="dm3 peer-count threshold in [0, 8]")
    det.add_argument("--schedule", default=None,
                     help='dm4 pass schedule as "d:k,d:k,..." (default 0.25:3,0.25:2,0.15:2)')
    det.add_argument("--pset", type=int, default=None, help="dm5 bright-shift amount in [0, 255]")
    det.add_argument("--mset", type=int, default=None, help="dm5 dark-shift amount in [0, 255]")
    det.add_argument("--level", type=int, default=None, help="dm5 threshold level in [0, 255]")
    det.add_argument("--selem", default=None,
                     help='structuring element rows of 0/1, e.g. "111/111/111"')

    switching = _Parser(add_help=False)
    switching.add_argument("--replacement", choices=REPLACEMENT_NAMES, default="vmf",
                           help="replacement filter for flagged pixels (default vmf)")
    switching.add_argument("--passes", type=int, default=1,
                           help="detect-and-replace rounds (default 1)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", parents=[common, noise],
                       help="apply a noise model and write the ground truth")
    p.add_argument("input", help="clean image (PNG or PPM)")
    p.add_argument("--out", required=True, help="noisy image path (PNG or PPM)")
    p.add_argument("--mask-out", required=True, help="ground-truth mask path (PNG or PBM)")

    p = sub.add_parser("detect", parents=[common, det],
                       help="run a detector and write its mask")
    p.add_argument("input", help="image to inspect (PNG or PPM)")
    p.add_argument("--out", required=True, help="detection mask path (PNG or PBM)")
    p.add_argument("--truth", default=None, help="ground-truth mask; enables FP/FN reporting")

    p = sub.add_parser("denoise", parents=[common, det, switching],
                       help="switching filter: replace detector-flagged pixels")
    p.add_argument("input", help="noisy image (PNG or PPM)")
    p.add_argument("--out", required=True, help="restored image path (PNG or PPM)")
    p.add_argument("--mask-out", default=None, help="optional detection mask path")
    p.add_argument("--clean", default=None, help="clean reference; enables MSE/PSNR reporting")
    p.add_argument("--truth", default=None, help="ground-truth mask; enables FP/FN reporting")

    p = sub.add_parser("evaluate", parents=[common],
                       help="score a restored image against a clean reference")
    p.add_argument("input", help="restored image (PNG or PPM)")
    p.add_argument("--clean", required=True, help="clean reference image")
    p.add_argument("--truth", default=None, help="ground-truth mask (requires --mask)")
    p.add_argument("--mask", default=None, help="detection mask to score (requires --truth)")

    p = sub.add_parser("roc", parents=[common, noise, det],
                       help="sweep one detector parameter on a freshly corrupted image")
    p.add_argument("input", help="clean image (PNG or PPM)")
    p.add_argument("--alpha-grid", default=None, help="dm1/dm2 sweep as start:stop:step, inclusive")
    p.add_argument("--d-grid", default=None, help="dm3 sweep as start:stop:step, inclusive")
    p.add_argument("--level-grid", default=None, help="dm5 sweep as start:stop:step, inclusive")
    p.add_argument("--out", default=None, help="write the table here instead of stdout")

    p = sub.add_parser("bench", parents=[common, noise, switching],
                       help="time the switching filter per detector")
    p.add_argument("input", help="clean image; corrupted once before timing")
    p.add_argument("--detectors", default=BENCH_DEFAULT_DETECTORS,
                   help=f"comma-separated subset of {BENCH_DEFAULT_DETECTORS}")
    p.add_argument("--repeats", type=int, default=20,
                   help="timed runs per detector, median reported (default 20)")
    p.add_argument("--out", default=None, help="write the table here instead of stdout")

    return parser


def _check_range(value, flag, low, high, kind=float):
    if value is None:
        return None
    if not (low <= value <= high):
        raise UsageError(f"{flag}: must be within [{low}, {high}], got {value}")
    return kind(value)


def _noise_spec(args) -> NoiseSpec:
    if not (0.0 < args.p < 1.0):
        raise UsageError(f"--p: must be within (0, 1), got {args.p}")
    if args.seed < 0:
        raise UsageError(f"--seed: must be non-negative, got {args.seed}")
    return NoiseSpec(family=args.family, variant=args.variant, p=args.p, seed=args.seed)


def _parse_schedule(text: str):
    pairs = []
    for chunk in text.split(","):
        bits = chunk.split(":")
        if len(bits) != 2:
            raise UsageError(f'--schedule: expected comma-separated "d:k" pairs, got {chunk!r}')
        try:
            pairs.append((float(bits[0]), int(bits[1])))
        except ValueError:
            raise UsageError(f"--schedule: bad pair {chunk!r}")
    return tuple(pairs)


def _parse_selem(text: str) -> StructuringElement:
    try:
        return StructuringElement.from_string(text)
    except ValueError as exc:
        raise UsageError(f"--selem: {exc}")


def _parse_grid(text: str, flag: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{flag}: expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError:
        raise UsageError(f"{flag}: expected numeric start:stop:step, got {text!r}")
    if step <= 0:
        raise UsageError(f"{flag}: step must be positive, got {step}")
    if stop < start:
        raise UsageError(f"{flag}: stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _detector_config(args) -> DetectorConfig:
    """Detector config from CLI flags, with flag-named range errors."""
    name = args.detector
    if name in ("dm1", "dm2"):
        default = DEFAULT_DM1_ALPHA if name == "dm1" else DEFAULT_DM2_ALPHA
        alpha = args.alpha if args.alpha is not None else default
        if alpha < 0:
            raise UsageError(f"--alpha: must be non-negative, got {alpha}")
        weighting = RankWeighting.from_name(args.weighting)
        cls = DM1Config if name == "dm1" else DM2Config
        return cls(alpha=float(alpha), weighting=weighting)
    if name == "dm3":
        cfg = DM3Config()
        d = _check_range(args.d, "--d", 0.0, 1.0)
        k = _check_range(args.k, "--k", 0, 8, kind=int)
        return DM3Config(
            d=d if d is not None else cfg.d,
            k=k if k is not None else cfg.k,
        )
    if name == "dm4":
        if args.schedule is None:
            return DM4Config()
        schedule = _parse_schedule(args.schedule)
        try:
            return DM4Config(schedule=schedule)
        except ValueError as exc:
            raise UsageError(f"--schedule: {exc}")
    cfg = DM5Config()
    pset = _check_range(args.pset, "--pset", 0, 255, kind=int)
    mset = _check_range(args.mset, "--mset", 0, 255, kind=int)
    level = _check_range(args.level, "--level", 0, 255, kind=int)
    selem = _parse_selem(args.selem) if args.selem is not None else cfg.selem
    return DM5Config(
        pset=pset if pset is not None else cfg.pset,
        mset=mset if mset is not None else cfg.mset,
        level=level if level is not None else cfg.level,
        selem=selem,
    )


def _switching_config(args, detector: DetectorConfig) -> SwitchingConfig:
    if args.passes < 1:
        raise UsageError(f"--passes: must be at least 1, got {args.passes}")
    return SwitchingConfig(detector=detector, replacement=args.replacement, passes=args.passes)


def _manifest(args) -> RunManifest:
    threads = getattr(args, "threads", None)
    if threads is not None and threads < 1:
        raise UsageError(f"--threads: must be at least 1, got {threads}")
    m = RunManifest(
        command=args.command,
        input_path=args.input,
        seed=getattr(args, "seed", 0),
        threads=threads,
        report=getattr(args, "report", None),
    )
    if args.command == "corrupt":
        m.noise = _noise_spec(args)
        m.out_path = args.out
        m.mask_out_path = args.mask_out
    elif args.command == "detect":
        m.detector = _detector_config(args)
        m.detector_family = args.detector
        m.out_path = args.out
        m.truth_path = args.truth
    elif args.command == "denoise":
        m.detector = _detector_config(args)
        m.detector_family = args.detector
        m.switching = _switching_config(args, m.detector)
        m.out_path = args.out
        m.mask_out_path = args.mask_out
        m.clean_path = args.clean
        m.truth_path = args.truth
    elif args.command == "evaluate":
        m.clean_path = args.clean
        m.truth_path = args.truth
        m.mask_path = args.mask
        if (args.truth is None) != (args.mask is None):
            raise UsageError("--truth and --mask must be given together")
    elif args.command == "roc":
        m.noise = _noise_spec(args)
        m.detector_family = args.detector
        m.grid = _roc_grid(args)
        m.out_path = args.out
    elif args.command == "bench":
        m.noise = _noise_spec(args)
        m.bench_detectors = _bench_detectors(args.detectors)
        if args.repeats < 1:
            raise UsageError(f"--repeats: must be at least 1, got {args.repeats}")
        m.repeats = args.repeats
        m.switching = _switching_config(args, DM5Config())  # replacement/passes template
        m.out_path = args.out
    m.validate()
    return m


def _roc_grid(args) -> list:
    """Grid of detector configs for the roc subcommand."""
    name = args.detector
    if name in ("dm1", "dm2"):
        if args.alpha_grid is None:
            raise UsageError(f"--alpha-grid: required for --detector {name}")
        weighting = RankWeighting.from_name(args.weighting)
        cls = DM1Config if name == "dm1" else DM2Config
        values = _parse_grid(args.alpha_grid, "--alpha-grid")
        if any(v < 0 for v in values):
            raise UsageError("--alpha-grid: alpha must be non-negative")
        return [cls(alpha=v, weighting=weighting) for v in values]
    if name == "dm3":
        if args.d_grid is None:
            raise UsageError("--d-grid: required for --detector dm3")
        k = _check_range(args.k, "--k", 0, 8, kind=int)
        if k is None:
            k = DM3Config().k
        values = _parse_grid(args.d_grid, "--d-grid")
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise UsageError("--d-grid: d must stay within [0, 1]")
        return [DM3Config(d=v, k=k) for v in values]
    if name == "dm5":
        if args.level_grid is None:
            raise UsageError("--level-grid: required for --detector dm5")
        base = _detector_config(args)
        values = _parse_grid(args.level_grid, "--level-grid")
        if any(not 0 <= v <= 255 or v != int(v) for v in values):
            raise UsageError("--level-grid: levels must be integers within [0, 255]")
        return [
            DM5Config(pset=base.pset, mset=base.mset, level=int(v), selem=base.selem)
            for v in values
        ]
    raise UsageError(f"--detector: {name} has no sweepable parameter grid")


def _bench_detectors(text: str) -> tuple:
    names = tuple(name.strip() for name in text.split(",") if name.strip())
    if not names:
        raise UsageError("--detectors: list is empty")
    for name in names:
        if name not in DETECTOR_CHOICES:
            raise UsageError(f"--detectors: unknown detector {name!r}")
    return names


def _default_config(name: str) -> DetectorConfig:
    return {
        "dm1": DM1Config,
        "dm2": DM2Config,
        "dm3": DM3Config,
        "dm4": DM4Config,
        "dm5": DM5Config,
    }[name]()


def _write_text(path: str, doc: str) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(doc.encode("utf-8"))
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from exc


def _emit(doc: str, out_path: Optional[str]) -> None:
    if out_path is not None:
        _write_text(out_path, doc)
    else:
        sys.stdout.write(doc)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _simple_report(fields: dict, fmt: Optional[str]) -> str:
    """One-row csv/json document, or key=value lines when fmt is None."""
    if fmt == "csv":
        header = ",".join(fields)
        row = ",".join(str(v) for v in fields.values())
        return f"{header}\n{row}\n"
    if fmt == "json":
        return json.dumps(fields, indent=2) + "\n"
    return "".join(f"{key}={value}\n" for key, value in fields.items())


def cmd_corrupt(m: RunManifest) -> int:
    img = read_color_image(m.input_path)
    result = corrupt(img, m.noise)
    write_color_image(m.out_path, result.noisy)
    write_mask(m.mask_out_path, result.pixel_mask)
    fields = {
        "family": m.noise.family,
        "variant": m.noise.variant,
        "p": m.noise.p,
        "seed": m.noise.seed,
        "corrupted_pixels": int(result.pixel_mask.sum()),
    }
    sys.stdout.write(_simple_report(fields, m.report))
    return EXIT_OK


def cmd_detect(m: RunManifest) -> int:
    img = read_color_image(m.input_path)
    outcome = detect(img, m.detector, threads=_threads(m))
    write_mask(m.out_path, outcome.mask)
    flagged = int(outcome.mask.sum())
    fields = {
        "detector": m.detector_family,
        "flagged": flagged,
        "fraction": flagged / outcome.mask.size,
    }
    if m.truth_path is not None:
        truth = read_mask(m.truth_path)
        fp_rate, fn_rate = rates(confusion(truth, outcome.mask))
        fields["fp_rate"] = fp_rate
        fields["fn_rate"] = fn_rate
    sys.stdout.write(_simple_report(fields, m.report))
    return EXIT_OK


def cmd_denoise(m: RunManifest) -> int:
    img = read_color_image(m.input_path)
    start = time.perf_counter()
    restored, flagged = denoise(img, m.switching, threads=_threads(m))
    elapsed = time.perf_counter() - start
    write_color_image(m.out_path, restored)
    if m.mask_out_path is not None:
        write_mask(m.mask_out_path, flagged)
    if m.clean_path is None:
        fields = {
            "detector": m.detector_family,
            "flagged": int(flagged.sum()),
            "elapsed_seconds": elapsed,
        }
        sys.stdout.write(_simple_report(fields, m.report))
        return EXIT_OK
    clean = read_color_image(m.clean_path)
    mse, psnr = mse_psnr(clean, restored)
    fp_rate = fn_rate = 0.0
    if m.truth_path is not None:
        truth = read_mask(m.truth_path)
        fp_rate, fn_rate = rates(confusion(truth, flagged))
    report = QualityReport(mse=mse, psnr=psnr, fp_rate=fp_rate,
                           fn_rate=fn_rate, elapsed_seconds=elapsed)
    sys.stdout.write(_quality_doc([report], [m.detector_family], m.report))
    return EXIT_OK


def cmd_evaluate(m: RunManifest) -> int:
    restored = read_color_image(m.input_path)
    clean = read_color_image(m.clean_path)
    mse, psnr = mse_psnr(clean, restored)
    fp_rate = fn_rate = 0.0
    if m.truth_path is not None:
        truth = read_mask(m.truth_path)
        mask = read_mask(m.mask_path)
        fp_rate, fn_rate = rates(confusion(truth, mask))
    report = QualityReport(mse=mse, psnr=psnr, fp_rate=fp_rate,
                           fn_rate=fn_rate, elapsed_seconds=0.0)
    sys.stdout.write(_quality_doc([report], None, m.report))
    return EXIT_OK


def cmd_roc(m: RunManifest) -> int:
    clean = read_color_image(m.input_path)
    points, best = roc_sweep(clean, m.noise, m.detector_family, m.grid,
                             threads=_threads(m))
    fmt = m.report or "csv"
    if fmt == "json":
        doc = roc_points_json(m.detector_family, points, best)
    else:
        doc = roc_points_csv(m.detector_family, points)
    _emit(doc, m.out_path)
    _note(f"selected: {params_label(best.params)} "
          f"fp_rate={best.fp_rate:.6g} fn_rate={best.fn_rate:.6g}")
    return EXIT_OK


def cmd_bench(m: RunManifest) -> int:
    clean = read_color_image(m.input_path)
    result = corrupt(clean, m.noise)
    reports = []
    labels = []
    for name in m.bench_detectors:
        cfg = SwitchingConfig(detector=_default_config(name),
                              replacement=m.switching.replacement,
                              passes=m.switching.passes)
        restored, flagged, elapsed = timed_denoise(result.noisy, cfg,
                                                   repeats=m.repeats,
                                                   threads=_threads(m))
        mse, psnr = mse_psnr(clean, restored)
        fp_rate, fn_rate = rates(confusion(result.pixel_mask, flagged))
        reports.append(QualityReport(mse=mse, psnr=psnr, fp_rate=fp_rate,
                                     fn_rate=fn_rate, elapsed_seconds=elapsed))
        labels.append(name)
        _note(f"{name}: median {elapsed:.4f}s over {m.repeats} runs")
    _emit(_quality_doc(reports, labels, m.report or "csv"), m.out_path)
    return EXIT_OK


def _quality_doc(reports, labels, fmt: Optional[str]) -> str:
    if fmt == "json":
        return quality_reports_json(reports, labels)
    if fmt == "csv":
        return quality_reports_csv(reports, labels)
    lines = []
    for index, report in enumerate(reports):
        prefix = f"{labels[index]}: " if labels else ""
        lines.append(
            f"{prefix}mse={report.mse:.6g} psnr={report.psnr:.6g} "
            f"fp_rate={report.fp_rate:.6g} fn_rate={report.fn_rate:.6g} "
            f"elapsed_seconds={report.elapsed_seconds:.6g}"
        )
    return "".join(line + "\n" for line in lines)


def _threads(m: RunManifest) -> Optional[int]:
    return m.threads


_COMMANDS = {
    "corrupt": cmd_corrupt,
    "detect": cmd_detect,
    "denoise": cmd_denoise,
    "evaluate": cmd_evaluate,
    "roc": cmd_roc,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        manifest = _manifest(args)
        return _COMMANDS[manifest.command](manifest)
    except UsageError as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except ImageReadError as exc:
        _note(f"error: {exc}")
        return EXIT_READ
    except ImageWriteError as exc:
        _note(f"error: {exc}")
        return EXIT_WRITE


if __name__ == "__main__":
    sys.exit(main())
