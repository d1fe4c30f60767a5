"""Release gate.

Each test here checks one acceptance criterion end to end and prints a
single PASS/FAIL line (written straight to the real stdout so it shows
up regardless of capture settings). The unit test modules cover the
fine-grained behavior; this file only asserts the headline guarantees:

  1. the minimum-dpi table matches the tabulated reference grid
  2. the synthetic control card is measured within the class tolerances
  3. the distance transform agrees exactly with a brute-force oracle
  4. the watershed agrees exactly with a heap-free flood oracle
  5. volume percentiles agree exactly with a hand-rolled oracle,
     and the relative span is scale invariant
  6. the fractal estimator hits the known dimensions of canonical
     shapes and orders synthetic cards by coverage
  7. coverage warning levels switch at the documented thresholds
  8. the CLI is deterministic: repeated analyze runs and parallel
     versus serial batch runs produce identical bytes (timestamps aside)
"""

from __future__ import annotations

import functools
import json
import subprocess
import sys
import time
from pathlib import Path

import conftest
import numpy as np
import oracles
import pytest

from dropmeter import (
    DEFAULT_CORRECTION,
    CardGeometry,
    DiskSpec,
    SyntheticCardSpec,
    analyze_card_stages,
    binarize,
    control_card_spec,
    coverage_warning,
    diameter_from_area,
    euclidean_distance,
    fractal_dimension,
    generate_card,
    label_markers,
    px_to_um_ratio,
    save_image,
    to_grayscale,
    volume_percentile,
    watershed,
)


def criterion(name: str):
    """Record `PASS name (detail)` or `FAIL name` for the terminal summary."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException:
                conftest.acceptance_lines.append(f"FAIL  {name}")
                raise
            conftest.acceptance_lines.append(
                f"PASS  {name}" + (f"  ({detail})" if detail else "")
            )

        return wrapper

    return deco


def _run_cli(*argv: str, cwd: Path | None = None) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        [sys.executable, "-m", "dropmeter.cli", *argv],
        capture_output=True,
        text=True,
        cwd=cwd,
    )
    assert proc.returncode == 0, f"cli {argv} failed rc={proc.returncode}: {proc.stderr}"
    return proc


# ---------------------------------------------------------------------------
# 1. minimum-dpi table


# Reference grid of minimum pixel counts per (diameter um, dpi); None marks
# cells the reference leaves blank because the diameter needs less than one
# pixel at that resolution. The gate demands agreement within one pixel
# everywhere and bit-exact agreement on at least 44 of the 49 cells.
DPI_COLUMNS = (50, 100, 300, 600, 1200, 2400, 2600)
REFERENCE_MIN_PIXELS: dict[int, tuple[int | None, ...]] = {
    10: (None, None, None, None, None, None, 1),
    50: (None, None, None, 1, 2, 5, 5),
    100: (None, None, 1, 2, 5, 9, 10),
    250: (None, 1, 3, 6, 12, 24, 26),
    500: (1, 2, 6, 12, 24, 47, 51),
    1000: (2, 4, 12, 24, 47, 94, 102),
    10000: (20, 39, 118, 236, 472, 945, 1024),
}


@criterion("minimum-dpi table vs reference grid")
def test_dpi_table_matches_reference_grid():
    proc = _run_cli("dpi")
    lines = proc.stdout.strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "diameter_um"
    assert [int(float(h)) for h in header[1:]] == list(DPI_COLUMNS)

    ours: dict[int, list[int | None]] = {}
    for line in lines[1:]:
        cells = line.split(",")
        d = int(float(cells[0]))
        ours[d] = [None if c == "not representable" else int(c) for c in cells[1:]]
    assert sorted(ours) == sorted(REFERENCE_MIN_PIXELS)

    exact = 0
    for d, ref_row in REFERENCE_MIN_PIXELS.items():
        for ref, got in zip(ref_row, ours[d]):
            if ref is None:
                # blank reference cells must be reported as not representable
                assert got is None, f"{d} um @ {DPI_COLUMNS[ref_row.index(ref)]} dpi"
            if ref == got:
                exact += 1
            assert abs((ref or 0) - (got or 0)) <= 1, f"{d} um: ref {ref} vs {got}"
    assert exact >= 44, f"only {exact}/49 cells exact"
    return f"all 49 cells within 1 px, {exact}/49 exact"


# ---------------------------------------------------------------------------
# 2. synthetic control card


@criterion("control-card class accuracy at 1200 dpi")
def test_control_card_class_accuracy():
    t0 = time.perf_counter()
    spec = control_card_spec(dpi=1200.0, seed=7)
    assert spec.overlap_policy == "forbid"
    raster, truth = generate_card(spec)
    geom = CardGeometry.from_mm(76.0, 26.0, raster.shape[1], raster.shape[0])
    # The 50 um class is ~2.4 px wide at 1200 dpi; next to 1,000 um drops its
    # normalized interior distance is tiny, so the reference run lowers the
    # marker threshold instead of using the field-card default.
    report, pipe = analyze_card_stages(
        raster, geom, marker_threshold=0.02, timestamp=""
    )
    elapsed = time.perf_counter() - t0

    ratio = px_to_um_ratio(geom)
    segments = {seg.id: seg for seg in pipe.segmentation.segments}
    labels = pipe.segmentation.labels
    by_class: dict[float, list[float]] = {}
    seen: set[int] = set()
    for disk in truth.disks:
        cx, cy = disk.center
        label = int(labels[int(cy), int(cx)])
        assert label > 0, f"disk at ({cx:.1f}, {cy:.1f}) not segmented"
        assert label not in seen, "two disks merged into one segment"
        seen.add(label)
        measured = diameter_from_area(segments[label].pixel_area, ratio)
        by_class.setdefault(disk.diameter_um, []).append(measured)

    limits = {50.0: 0.45, 100.0: 0.45, 250.0: 0.02, 500.0: 0.02, 1000.0: 0.02}
    assert sorted(by_class) == sorted(limits)
    worst = 0.0
    for nominal, limit in limits.items():
        mean = float(np.mean(by_class[nominal]))
        err = abs(mean - nominal) / nominal
        worst = max(worst, err)
        assert err <= limit, f"{nominal} um class: mean {mean:.2f}, error {err:.2%}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    return f"{len(truth.disks)} disks, worst class error {worst:.2%}, {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 3. distance transform oracle


@criterion("distance transform vs brute force (200 masks)")
def test_edt_matches_brute_force():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3001)
    worst = 0.0
    for _ in range(200):
        h = int(rng.integers(1, 65))
        w = int(rng.integers(1, 65))
        mask = rng.random((h, w)) < rng.uniform(0.15, 0.9)
        got = euclidean_distance(mask)
        want = oracles.brute_force_edt(mask)
        worst = max(worst, float(np.abs(got - want).max()))
        assert worst <= 1e-9, f"max |impl - oracle| = {worst}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    return f"max abs deviation {worst:.1e}, {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 4. watershed oracle


@criterion("watershed vs flood oracle (200 instances + dumbbell)")
def test_watershed_matches_reference_flood():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4001)
    checked = 0
    while checked < 200:
        h = int(rng.integers(2, 33))
        w = int(rng.integers(2, 33))
        mask = rng.random((h, w)) < rng.uniform(0.4, 0.85)
        # two-decimal grays force plenty of priority ties
        gray = np.round(rng.random((h, w)), 2)
        marker_mask = mask & (rng.random((h, w)) < 0.15)
        if not marker_mask.any():
            continue
        labeled = label_markers(marker_mask)
        got = watershed(gray, labeled, mask)
        want = oracles.flood_oracle(gray, labeled.labels, mask)
        assert np.array_equal(got.labels, want)
        checked += 1

    # dumbbell: two 5x5 squares joined by a one-pixel bridge must split in two
    mask = np.zeros((5, 11), dtype=bool)
    mask[:, :5] = True
    mask[:, 6:] = True
    mask[2, 5] = True
    markers = np.zeros_like(mask)
    markers[2, 2] = True
    markers[2, 8] = True
    gray = np.full(mask.shape, 0.2)
    result = watershed(gray, label_markers(markers), mask)
    assert len(result.segments) == 2
    assert np.array_equal(result.labels > 0, mask)

    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    return f"200 instances identical, dumbbell splits in 2, {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 5. volume percentiles oracle


@criterion("volume percentiles vs oracle (1000 multisets) + span invariance")
def test_volume_percentiles_match_oracle():
    rng = np.random.default_rng(5001)

    def span(ds: np.ndarray) -> float:
        dv01 = volume_percentile(ds, 0.1)
        vmd = volume_percentile(ds, 0.5)
        dv09 = volume_percentile(ds, 0.9)
        return (dv09 - dv01) / vmd

    for _ in range(1000):
        n = int(rng.integers(1, 201))
        ds = rng.uniform(1.0, 2000.0, size=n)
        for p in (0.1, 0.5, 0.9):
            got = volume_percentile(ds, p)
            want = oracles.volume_percentile_oracle(ds.tolist(), p)
            assert abs(got - want) <= 1e-9
        # doubling every diameter is exact in floating point, so the span
        # must not move by a single bit; an arbitrary factor gets a tolerance
        rs = span(ds)
        assert span(ds * 2.0) == rs
        k = float(rng.uniform(0.1, 10.0))
        assert span(ds * k) == pytest.approx(rs, rel=1e-9, abs=1e-12)
    return "1000 multisets exact, span invariant under scaling"


# ---------------------------------------------------------------------------
# 6. fractal dimension properties


@criterion("fractal dimension on canonical shapes + coverage ordering")
def test_fractal_dimension_properties():
    filled = np.ones((256, 256), dtype=bool)
    d_filled = fractal_dimension(filled).dimension
    assert d_filled == pytest.approx(2.0, abs=0.05)

    single = np.zeros((256, 256), dtype=bool)
    single[128, 128] = True
    d_single = fractal_dimension(single).dimension
    assert d_single == pytest.approx(0.0, abs=0.05)

    line = np.zeros((256, 256), dtype=bool)
    line[128, :] = True
    d_line = fractal_dimension(line).dimension
    assert d_line == pytest.approx(1.0, abs=0.1)

    # denser deposition must read as more space filling: synthetic cards at
    # roughly 5% / 15% / 25% coverage get strictly increasing dimensions
    dims = []
    coverages = []
    for count, seed in ((102, 11), (305, 12), (509, 13)):
        spec = SyntheticCardSpec(
            card_width_um=20_000.0,
            card_height_um=20_000.0,
            dpi=600.0,
            disks=[DiskSpec(500.0) for _ in range(count)],
            seed=seed,
        )
        raster, _ = generate_card(spec)
        mask = binarize(to_grayscale(raster))
        coverages.append(float(mask.mean()))
        dims.append(fractal_dimension(mask).dimension)
    for target, got in zip((0.05, 0.15, 0.25), coverages):
        assert got == pytest.approx(target, abs=0.015)
    assert dims[0] < dims[1] < dims[2], f"dimensions not increasing: {dims}"
    return (
        f"square {d_filled:.3f}, point {d_single:.3f}, line {d_line:.3f}, "
        f"cards {dims[0]:.3f} < {dims[1]:.3f} < {dims[2]:.3f}"
    )


# ---------------------------------------------------------------------------
# 7. coverage warnings


@criterion("coverage warning thresholds")
def test_coverage_warning_levels():
    assert coverage_warning(20.0).level == "none"
    assert coverage_warning(20.01).level == "questionable"
    assert coverage_warning(70.01).level == "unfeasible"
    return "20.0 none / 20.01 questionable / 70.01 unfeasible"


# ---------------------------------------------------------------------------
# 8. determinism


def _strip_timestamp(data: bytes) -> bytes:
    return b"\n".join(l for l in data.splitlines() if b'"timestamp"' not in l)


def _write_card(path: Path, seed: int) -> None:
    spec = SyntheticCardSpec(
        card_width_um=7_600.0,
        card_height_um=2_600.0,
        dpi=600.0,
        disks=[DiskSpec(500.0) for _ in range(4)] + [DiskSpec(1_000.0), DiskSpec(1_000.0)],
        seed=seed,
    )
    raster, _ = generate_card(spec)
    save_image(raster, path)


@criterion("deterministic analyze and parallel batch")
def test_cli_determinism(tmp_path):
    card = tmp_path / "card.png"
    _write_card(card, seed=21)
    flags = ["--card-width-mm", "7.6", "--card-height-mm", "2.6"]

    runs = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        _run_cli("analyze", str(card), *flags, "--out", str(out))
        runs.append(_strip_timestamp(out.read_bytes()))
    assert runs[0] == runs[1]
    assert json.loads(runs[0].decode())["summary"]["drop_count"] == 6

    cards = tmp_path / "cards"
    cards.mkdir()
    for i in range(3):
        _write_card(cards / f"card{i}.png", seed=30 + i)
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    _run_cli("batch", str(cards), *flags, "--jobs", "1", "--out", str(serial))
    _run_cli("batch", str(cards), *flags, "--jobs", "4", "--out", str(parallel))

    serial_files = sorted(p.name for p in serial.iterdir())
    assert serial_files == sorted(p.name for p in parallel.iterdir())
    assert serial_files == ["card0.json", "card1.json", "card2.json", "rollup.csv"]
    for name in serial_files:
        a = (serial / name).read_bytes()
        b = (parallel / name).read_bytes()
        if name.endswith(".json"):
            a, b = _strip_timestamp(a), _strip_timestamp(b)
        assert a == b, f"{name} differs between serial and parallel batch"
    return "analyze twice identical; batch -j1 == -j4 across 4 files"
