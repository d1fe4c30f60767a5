"""Embedded HTTP endpoint for interactive threshold tuning.

POST /api/analyze  multipart form: an `image` file plus optional string
                   fields card_width_mm, card_height_mm, bin_threshold,
                   marker_threshold, correct_a, correct_b, include_overlay,
                   include_markers, include_json, include_csv
GET  /api/health   version probe
GET  /             static web UI, when the built assets are packaged

The server is stateless: every request is decoded, analyzed, and answered
independently, so identical requests get identical bodies. Reports returned
here carry an empty provenance timestamp for exactly that reason; the CSV
export never contains one.
"""

from __future__ import annotations

import base64
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ._version import __version__
from .errors import DecodeError, InputError, ParameterError
from .imgio import decode_image_bytes, encode_png
from .metrics import DEFAULT_CORRECTION, CardGeometry, CorrectionParams
from .pipeline import analyze_card_stages
from .raster import DEFAULT_BIN_THRESHOLD, DEFAULT_MARKER_THRESHOLD
from .report import export_report, render_markers, render_overlay, report_to_dict

DEFAULT_MAX_BODY_BYTES = 32 * 2**20

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off", "")


def _parse_flag(value: str, name: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise HTTPException(400, f"{name} must be a boolean flag, got {value!r}")


def _parse_float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise HTTPException(400, f"{name} must be a number, got {value!r}") from None


def create_app(
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="dropmeter", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def reject_oversized(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and length.isdigit() and int(length) > max_body_bytes:
            return JSONResponse({"detail": "request body too large"}, status_code=413)
        return await call_next(request)

    @app.get("/api/health")
    def handle_health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    # Sync handler on purpose: the analysis is CPU-bound and runs in the
    # worker threadpool, which keeps /api/health responsive meanwhile.
    @app.post("/api/analyze")
    def handle_analyze(
        image: UploadFile = File(...),
        card_width_mm: str = Form("76"),
        card_height_mm: str = Form("26"),
        bin_threshold: str = Form(str(DEFAULT_BIN_THRESHOLD)),
        marker_threshold: str = Form(str(DEFAULT_MARKER_THRESHOLD)),
        correct_a: str = Form(str(DEFAULT_CORRECTION.a)),
        correct_b: str = Form(str(DEFAULT_CORRECTION.b)),
        include_overlay: str = Form("false"),
        include_markers: str = Form("false"),
        include_json: str = Form("false"),
        include_csv: str = Form("false"),
    ) -> JSONResponse:
        data = image.file.read()
        if len(data) > max_body_bytes:
            raise HTTPException(413, "image payload too large")
        label = image.filename or "upload"
        try:
            raster = decode_image_bytes(data, label)
        except DecodeError as exc:
            raise HTTPException(422, str(exc)) from None

        try:
            correction = CorrectionParams(
                a=_parse_float(correct_a, "correct_a"), b=_parse_float(correct_b, "correct_b")
            )
            geom = CardGeometry.from_mm(
                _parse_float(card_width_mm, "card_width_mm"),
                _parse_float(card_height_mm, "card_height_mm"),
                raster.shape[1],
                raster.shape[0],
            )
            report, pipe = analyze_card_stages(
                raster,
                geom,
                bin_threshold=_parse_float(bin_threshold, "bin_threshold"),
                marker_threshold=_parse_float(marker_threshold, "marker_threshold"),
                correction=correction,
                input_label=label,
                timestamp="",
            )
        except ParameterError as exc:
            raise HTTPException(400, str(exc)) from None
        except InputError as exc:
            raise HTTPException(422, str(exc)) from None

        body: dict = {
            "report": report_to_dict(report),
            "overlay_png_base64": None,
            "markers_png_base64": None,
            "report_json": None,
            "report_csv": None,
        }
        if _parse_flag(include_overlay, "include_overlay"):
            overlay = render_overlay(raster, pipe.segmentation)
            body["overlay_png_base64"] = base64.b64encode(encode_png(overlay)).decode("ascii")
        if _parse_flag(include_markers, "include_markers"):
            body["markers_png_base64"] = base64.b64encode(
                encode_png(render_markers(pipe.markers))
            ).decode("ascii")
        # the json/csv strings are the exact bytes the CLI would write, so a
        # client can offer downloads without re-serializing anything
        if _parse_flag(include_json, "include_json"):
            body["report_json"] = export_report(report, "json").decode("utf-8")
        if _parse_flag(include_csv, "include_csv"):
            body["report_csv"] = export_report(report, "csv").decode("utf-8")
        return JSONResponse(body)

    static_dir = Path(ui_dir) if ui_dir is not None else Path(__file__).parent / "webui"
    if (static_dir / "index.html").is_file():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def handle_root() -> str:
            return "<p>dropmeter API is running. The web UI assets are not installed.</p>"

    return app
