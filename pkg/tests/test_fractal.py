from __future__ import annotations

import numpy as np
import pytest

import dropmeter as dm
from oracles import box_count_oracle, regression_dimension_oracle


def test_box_count_full_square() -> None:
    m = np.ones((16, 16), bool)
    assert dm.box_count(m, 8) == 4
    assert dm.box_count(m, 16) == 1
    assert dm.box_count(m, 1) == 256


def test_box_count_empty_and_single() -> None:
    assert dm.box_count(np.zeros((8, 8), bool), 3) == 0
    single = np.zeros((8, 8), bool)
    single[5, 2] = True
    for sigma in (1, 2, 3, 4, 8, 16):
        assert dm.box_count(single, sigma) == 1


def test_box_count_partial_edge_boxes_count() -> None:
    m = np.zeros((5, 5), bool)
    m[4, 4] = True  # lives in the ragged bottom-right cell of a 4-grid
    assert dm.box_count(m, 4) == 1


def test_box_count_rejects_bad_sigma() -> None:
    with pytest.raises(dm.ParameterError):
        dm.box_count(np.ones((4, 4), bool), 0)


def test_box_count_matches_oracle() -> None:
    rng = np.random.default_rng(13)
    for _ in range(25):
        h, w = rng.integers(1, 70, 2)
        m = rng.random((h, w)) < 0.2
        for sigma in (1, 2, 3, 5, 8):
            assert dm.box_count(m, sigma) == box_count_oracle(m, sigma)


def test_box_count_series_contract() -> None:
    rng = np.random.default_rng(14)
    m = rng.random((100, 160)) < 0.1
    series = dm.box_count_series(m)
    sigmas = [s for s, _ in series.points]
    counts = [n for _, n in series.points]
    # padded grid is 256, so sizes run 1..64 in powers of two
    assert sigmas == [1, 2, 4, 8, 16, 32, 64]
    assert counts[0] == int(np.count_nonzero(m))
    assert all(a >= b for a, b in zip(counts, counts[1:]))  # non-increasing
    for (sigma, n) in series.points:
        assert n <= int(np.ceil(256 / sigma)) ** 2


def test_box_count_series_empty_mask_raises() -> None:
    with pytest.raises(dm.EmptyMaskError):
        dm.box_count_series(np.zeros((8, 8), bool))
    with pytest.raises(dm.EmptyMaskError):
        dm.fractal_dimension(np.zeros((8, 8), bool))


def test_fractal_filled_square_is_two() -> None:
    est = dm.fractal_dimension(np.ones((256, 256), bool))
    assert est.dimension == pytest.approx(2.0, abs=0.05)
    assert est.r_squared > 0.999


def test_fractal_single_pixel_is_zero() -> None:
    m = np.zeros((256, 256), bool)
    m[100, 31] = True
    est = dm.fractal_dimension(m)
    assert est.dimension == pytest.approx(0.0, abs=0.05)
    assert est.r_squared == 1.0  # all counts equal: zero residual by convention


def test_fractal_line_is_one() -> None:
    m = np.zeros((256, 256), bool)
    m[128, :] = True
    est = dm.fractal_dimension(m)
    assert est.dimension == pytest.approx(1.0, abs=0.1)
    # a full-width line has analytic counts N = 256/sigma, slope exactly -1
    series = dm.box_count_series(m)
    for sigma, n in series.points:
        assert n == 256 // sigma
    assert regression_dimension_oracle(series.points) == pytest.approx(1.0, rel=1e-12)
    assert est.dimension == pytest.approx(regression_dimension_oracle(series.points), rel=1e-9)


def test_fractal_dimension_clamped_to_valid_range() -> None:
    rng = np.random.default_rng(15)
    for _ in range(10):
        m = rng.random((64, 64)) < rng.uniform(0.02, 0.9)
        if not m.any():
            continue
        est = dm.fractal_dimension(m)
        assert 0.0 <= est.dimension <= 2.0
        assert 0.0 <= est.r_squared <= 1.0


def test_fractal_translation_jitter_is_small() -> None:
    base = np.zeros((200, 200), bool)
    yy, xx = np.mgrid[0:60, 0:60]
    disk = (yy - 30) ** 2 + (xx - 30) ** 2 < 25**2
    base[20:80, 20:80] = disk
    d0 = dm.fractal_dimension(base).dimension
    shifted = np.zeros((200, 200), bool)
    shifted[83:143, 97:157] = disk
    d1 = dm.fractal_dimension(shifted).dimension
    assert abs(d0 - d1) <= 0.05


def test_fractal_increases_with_coverage() -> None:
    # denser spraying of the same card reads as a higher dimension
    rng = np.random.default_rng(16)
    dims = []
    for density in (0.05, 0.15, 0.25):
        m = rng.random((256, 256)) < density
        dims.append(dm.fractal_dimension(m).dimension)
    assert dims[0] < dims[1] < dims[2]
