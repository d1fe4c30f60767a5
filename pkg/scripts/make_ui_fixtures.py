"""Regenerate the frontend test fixtures.

Each fixture is one recorded round trip against the real analysis endpoint:
the synthetic card PNG that was uploaded, the form fields that went with it,
and the exact JSON body the server answered. The frontend tests replay these
bodies through a stubbed fetch, so the UI is always tested against bytes the
server actually produced.

Run from the repository root:

    python3 scripts/make_ui_fixtures.py
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

from fastapi.testclient import TestClient

from dropmeter import DiskSpec, SyntheticCardSpec, encode_png, generate_card
from dropmeter.server import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

# 1,400 um and 700 um disks fused into a dumbbell: one normalized-distance
# peak at 1.0, the other near 0.5, neck low enough to keep the two marker
# blobs apart down to ~0.2. Drop count is 1 above the ~0.45..0.5 crossover
# and 2 below it, which is exactly the loop the threshold slider must show.
DUMBBELL = SyntheticCardSpec(
    card_width_um=5_000.0,
    card_height_um=3_000.0,
    dpi=600.0,
    disks=[
        DiskSpec(1_400.0, center=(40.0, 35.0)),
        DiskSpec(700.0, center=(64.0, 35.0)),
    ],
    overlap_policy="allow",
    seed=0,
)

SIX_DROPS = SyntheticCardSpec(
    card_width_um=7_600.0,
    card_height_um=2_600.0,
    dpi=600.0,
    disks=[DiskSpec(500.0)] * 4 + [DiskSpec(1_000.0)] * 2,
    seed=81,
)

BLANK = SyntheticCardSpec(
    card_width_um=5_000.0, card_height_um=3_000.0, dpi=600.0, disks=[], seed=0
)

QUESTIONABLE = SyntheticCardSpec(
    card_width_um=5_000.0,
    card_height_um=3_000.0,
    dpi=600.0,
    disks=[DiskSpec(1_000.0)] * 6,
    seed=4,
)

UNFEASIBLE = SyntheticCardSpec(
    card_width_um=5_000.0,
    card_height_um=3_000.0,
    dpi=600.0,
    disks=[DiskSpec(1_000.0)] * 60,
    overlap_policy="allow",
    seed=4,
)


def record(
    client: TestClient,
    name: str,
    spec: SyntheticCardSpec,
    *,
    card_mm: tuple[float, float],
    marker_threshold: float | None = None,
) -> dict:
    raster, _ = generate_card(spec)
    png = encode_png(raster)
    form = {
        "card_width_mm": repr(card_mm[0]),
        "card_height_mm": repr(card_mm[1]),
        "include_overlay": "true",
        "include_markers": "true",
        "include_json": "true",
        "include_csv": "true",
    }
    if marker_threshold is not None:
        form["marker_threshold"] = repr(marker_threshold)
    resp = client.post(
        "/api/analyze", files={"image": ("card.png", png, "image/png")}, data=form
    )
    assert resp.status_code == 200, f"{name}: {resp.status_code} {resp.text}"
    fixture = {
        "name": name,
        "card_png_base64": base64.b64encode(png).decode("ascii"),
        "form": form,
        "status": 200,
        "body": resp.json(),
    }
    out = FIXTURE_DIR / f"{name}.json"
    out.write_text(json.dumps(fixture, indent=2) + "\n", encoding="utf-8")
    print(f"{out.relative_to(Path.cwd())}: drops={fixture['body']['report']['summary']['drop_count']}"
          f" warning={fixture['body']['report']['warning']['level']}")
    return fixture


def record_error(client: TestClient) -> None:
    raster, _ = generate_card(BLANK)
    png = encode_png(raster)
    resp = client.post(
        "/api/analyze",
        files={"image": ("card.png", png, "image/png")},
        data={"card_width_mm": "5", "card_height_mm": "3", "marker_threshold": "1.5"},
    )
    assert resp.status_code == 400, resp.status_code
    fixture = {
        "name": "error_400",
        "card_png_base64": base64.b64encode(png).decode("ascii"),
        "form": {"card_width_mm": "5", "card_height_mm": "3", "marker_threshold": "1.5"},
        "status": 400,
        "body": resp.json(),
    }
    out = FIXTURE_DIR / "error_400.json"
    out.write_text(json.dumps(fixture, indent=2) + "\n", encoding="utf-8")
    print(f"{out.relative_to(Path.cwd())}: detail={fixture['body']['detail']!r}")


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())

    six = record(client, "six_drops", SIX_DROPS, card_mm=(7.6, 2.6))
    assert six["body"]["report"]["summary"]["drop_count"] == 6
    assert six["body"]["report"]["warning"]["level"] == "none"

    blank = record(client, "blank", BLANK, card_mm=(5.0, 3.0))
    assert blank["body"]["report"]["summary"]["drop_count"] == 0

    high = record(client, "dumbbell_high", DUMBBELL, card_mm=(5.0, 3.0), marker_threshold=0.6)
    low = record(client, "dumbbell_low", DUMBBELL, card_mm=(5.0, 3.0), marker_threshold=0.3)
    assert high["body"]["report"]["summary"]["drop_count"] == 1
    assert low["body"]["report"]["summary"]["drop_count"] == 2

    questionable = record(client, "questionable", QUESTIONABLE, card_mm=(5.0, 3.0))
    assert questionable["body"]["report"]["warning"]["level"] == "questionable"

    unfeasible = record(client, "unfeasible", UNFEASIBLE, card_mm=(5.0, 3.0))
    assert unfeasible["body"]["report"]["warning"]["level"] == "unfeasible"

    record_error(client)


if __name__ == "__main__":
    main()
