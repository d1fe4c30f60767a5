"""Command-line interface.

Verbs: analyze (one card), batch (directory of cards), synth (generate a
synthetic card from a spec file), fractal (dimension only), dpi (pixels
needed per diameter/resolution), serve (HTTP endpoint for the UI).

Exit codes: 0 success, 1 input error (unreadable or invalid input data),
2 parameter error (bad flags or out-of-range analysis parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from ._version import __version__
from .errors import DropmeterError, InputError, ParameterError
from .fractal import fractal_dimension
from .imgio import decode_image, save_image
from .metrics import DEFAULT_CORRECTION, CardGeometry, CorrectionParams, min_pixels_for_diameter
from .pipeline import analyze_card_stages
from .raster import DEFAULT_BIN_THRESHOLD, DEFAULT_MARKER_THRESHOLD, binarize, to_grayscale
from .report import CardAnalysisReport, export_report, render_overlay
from .synthcard import generate_card, load_card_spec

DEFAULT_CARD_WIDTH_MM = 76.0
DEFAULT_CARD_HEIGHT_MM = 26.0

DPI_TABLE_DIAMETERS = (10.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 10_000.0)
DPI_TABLE_RESOLUTIONS = (50.0, 100.0, 300.0, 600.0, 1200.0, 2400.0, 2600.0)

NOT_REPRESENTABLE = "not representable"

IMAGE_SUFFIXES = (".png", ".ppm", ".pgm")


def _parse_correct(text: str) -> CorrectionParams:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParameterError(f"--correct wants two comma-separated numbers, got {text!r}")
    return CorrectionParams(a=float(parts[0]), b=float(parts[1]))


def _parse_float_list(text: str) -> list[float]:
    values = [float(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ParameterError(f"expected a comma-separated number list, got {text!r}")
    return values


def _num(value: float) -> str:
    return f"{value:g}"


def _add_analysis_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--card-width-mm", type=float, default=DEFAULT_CARD_WIDTH_MM)
    sub.add_argument("--card-height-mm", type=float, default=DEFAULT_CARD_HEIGHT_MM)
    sub.add_argument("--bin-threshold", type=float, default=DEFAULT_BIN_THRESHOLD)
    sub.add_argument("--marker-threshold", type=float, default=DEFAULT_MARKER_THRESHOLD)
    sub.add_argument(
        "--correct",
        type=_parse_correct,
        default=DEFAULT_CORRECTION,
        metavar="A,B",
        help="diameter correction d' = A*d^B",
    )


def _analyze_one(path: Path, args: argparse.Namespace) -> tuple[CardAnalysisReport, object]:
    image = decode_image(path)
    geom = CardGeometry.from_mm(
        args.card_width_mm, args.card_height_mm, image.shape[1], image.shape[0]
    )
    report, pipe = analyze_card_stages(
        image,
        geom,
        bin_threshold=args.bin_threshold,
        marker_threshold=args.marker_threshold,
        correction=args.correct,
        input_label=str(path),
    )
    return report, pipe


def _write_output(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def cmd_analyze(args: argparse.Namespace) -> int:
    path = Path(args.image)
    report, pipe = _analyze_one(path, args)
    _write_output(export_report(report, args.format), args.out)
    if args.overlay:
        image = decode_image(path)
        save_image(render_overlay(image, pipe.segmentation), args.overlay)
    return 0


_ROLLUP_COLUMNS = [
    "file",
    "drop_count",
    "density_per_cm2",
    "coverage_pct",
    "vmd_um",
    "dv01_um",
    "dv09_um",
    "relative_span",
    "mean_area_um2",
    "fractal_dimension",
    "warning",
]


def _rollup_row(name: str, report: CardAnalysisReport) -> list[str]:
    s = report.summary

    def fmt(v: float | None) -> str:
        return "" if v is None else repr(float(v))

    return [
        name,
        str(s.drop_count),
        fmt(s.density_per_cm2),
        fmt(s.coverage_pct),
        fmt(s.vmd_um),
        fmt(s.dv01_um),
        fmt(s.dv09_um),
        fmt(s.relative_span),
        fmt(s.mean_area_um2),
        fmt(report.fractal.dimension) if report.fractal else "",
        report.warning.level,
    ]


def cmd_batch(args: argparse.Namespace) -> int:
    indir = Path(args.directory)
    if not indir.is_dir():
        raise InputError(f"{indir}: not a directory")
    images = sorted(p for p in indir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not images:
        raise InputError(f"{indir}: no card images ({', '.join(IMAGE_SUFFIXES)})")
    outdir = Path(args.out) if args.out else indir / "reports"
    outdir.mkdir(parents=True, exist_ok=True)

    def work(path: Path) -> tuple[str, CardAnalysisReport]:
        report, _ = _analyze_one(path, args)
        return path.name, report

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(work, images))
    else:
        results = [work(path) for path in images]

    ext = "json" if args.format == "json" else "csv"
    rollup = io.StringIO()
    writer = csv.writer(rollup, lineterminator="\n")
    writer.writerow(_ROLLUP_COLUMNS)
    for name, report in results:  # results follow the sorted input order
        (outdir / f"{Path(name).stem}.{ext}").write_bytes(export_report(report, args.format))
        writer.writerow(_rollup_row(name, report))
    (outdir / "rollup.csv").write_text(rollup.getvalue(), encoding="utf-8")
    print(f"analyzed {len(results)} cards -> {outdir}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = load_card_spec(args.spec)
    raster, truth = generate_card(spec)
    out = Path(args.out)
    save_image(raster, out)
    truth_path = Path(args.truth) if args.truth else out.with_suffix(".truth.json")
    payload = {
        "width_px": raster.shape[1],
        "height_px": raster.shape[0],
        "total_coverage_fraction": truth.total_coverage_fraction,
        "disks": [
            {
                "center_x": d.center[0],
                "center_y": d.center[1],
                "diameter_um": d.diameter_um,
                "area_px": d.area_px,
            }
            for d in truth.disks
        ],
    }
    truth_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({raster.shape[1]}x{raster.shape[0]} px, {len(truth.disks)} disks)")
    return 0


def cmd_fractal(args: argparse.Namespace) -> int:
    image = decode_image(args.image)
    mask = binarize(to_grayscale(image), args.bin_threshold)
    est = fractal_dimension(mask)
    if args.format == "json":
        body = {"dimension": est.dimension, "slope": est.slope, "r_squared": est.r_squared}
        print(json.dumps(body, indent=2))
    else:
        print(f"dimension {est.dimension:.6f} (slope {est.slope:.6f}, r^2 {est.r_squared:.6f})")
    return 0


def cmd_dpi(args: argparse.Namespace) -> int:
    diameters = args.diameters
    resolutions = args.dpis
    rows: list[list[str]] = []
    for d in diameters:
        row = [_num(d)]
        for dpi in resolutions:
            px = min_pixels_for_diameter(d, dpi)
            row.append(NOT_REPRESENTABLE if px is None else str(px))
        rows.append(row)
    header = ["diameter_um"] + [_num(r) for r in resolutions]
    if args.format == "text":
        widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
        for r in [header] + rows:
            print("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dropmeter", description="Spray-card droplet analysis."
    )
    parser.add_argument("--version", action="version", version=f"dropmeter {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True)

    p = verbs.add_parser("analyze", help="analyze one card image")
    p.add_argument("image")
    _add_analysis_flags(p)
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--overlay", help="write a segment overlay PNG here")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_analyze)

    p = verbs.add_parser("batch", help="analyze every card image in a directory")
    p.add_argument("directory")
    _add_analysis_flags(p)
    p.add_argument("--out", help="output directory (default: DIR/reports)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=max(1, min(4, os.cpu_count() or 1)))
    p.set_defaults(func=cmd_batch)

    p = verbs.add_parser("synth", help="generate a synthetic card from a spec file")
    p.add_argument("spec")
    p.add_argument("--out", required=True, help="output PNG")
    p.add_argument("--truth", help="ground-truth JSON (default: OUT with .truth.json)")
    p.set_defaults(func=cmd_synth)

    p = verbs.add_parser("fractal", help="box-counting fractal dimension of a card")
    p.add_argument("image")
    p.add_argument("--bin-threshold", type=float, default=DEFAULT_BIN_THRESHOLD)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_fractal)

    p = verbs.add_parser("dpi", help="pixels needed to represent drop diameters")
    p.add_argument(
        "--diameters", type=_parse_float_list, default=list(DPI_TABLE_DIAMETERS), metavar="D1,D2,..."
    )
    p.add_argument(
        "--dpis", type=_parse_float_list, default=list(DPI_TABLE_RESOLUTIONS), metavar="R1,R2,..."
    )
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(func=cmd_dpi)

    p = verbs.add_parser("serve", help="serve the HTTP API and the web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DropmeterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
