import json
import math
from pathlib import Path

import numpy as np
import pytest

from descshot.errors import MaskError, ParseError, ValidationError
from descshot.shape import (
    Mask,
    crop_bbox_with_margin,
    perimeter_counts,
    read_mask_pgm,
    shape_correlation,
    shape_features,
    write_mask_pgm,
)

from _reference import oracle_spearman, reference_contour_counts
from _synthetic import random_blob

GOLDEN = json.loads((Path(__file__).parent / "golden" / "disk_r100.json").read_text())


def disk_mask(radius, pad=2):
    span = np.arange(-radius - pad, radius + pad + 1)
    yy, xx = np.meshgrid(span, span, indexing="ij")
    return Mask((xx * xx + yy * yy) <= radius * radius)


def test_rectangle_rectangularity_exactly_one():
    for w, h in [(1, 5), (7, 3), (20, 20), (2, 2)]:
        m = Mask(np.ones((h, w), dtype=bool))
        feats = shape_features(m)
        assert feats.rectangularity == 1.0
        assert feats.area == w * h
        assert feats.bbox == (0, 0, w - 1, h - 1)


def test_square_200_roundness_near_quarter_pi():
    feats = shape_features(Mask(np.ones((200, 200), dtype=bool)))
    assert feats.perimeter == 4 * 199
    assert abs(feats.roundness - math.pi / 4) <= 0.02


def test_disk_r100_matches_committed_golden():
    feats = shape_features(disk_mask(100))
    assert 0.90 <= feats.roundness <= 1.10
    assert abs(feats.roundness - GOLDEN["roundness"]) <= 1e-9
    assert feats.area == GOLDEN["area"]
    assert perimeter_counts(disk_mask(100)) == (
        GOLDEN["contour_axis_steps"],
        GOLDEN["contour_diagonal_steps"],
    )


def test_matches_reference_tracer_on_random_blobs(rng):
    for _ in range(25):
        mask = random_blob(rng)
        assert perimeter_counts(mask) == reference_contour_counts(
            mask.pixels.tolist()
        )


def test_translation_invariance_exact(rng):
    for _ in range(15):
        mask = random_blob(rng, size=40)
        base = shape_features(mask)
        dx, dy = int(rng.integers(0, 12)), int(rng.integers(0, 12))
        canvas = np.zeros((60, 60), dtype=bool)
        canvas[dy : dy + 40, dx : dx + 40] = mask.pixels
        moved = shape_features(Mask(canvas))
        assert moved.area == base.area
        assert moved.perimeter == base.perimeter
        assert moved.roundness == base.roundness
        assert moved.rectangularity == base.rectangularity


def test_rotation_invariance_exact(rng):
    for _ in range(15):
        mask = random_blob(rng, size=36)
        base = shape_features(mask)
        for k in (1, 2, 3):
            rotated = shape_features(Mask(np.rot90(mask.pixels, k)))
            assert rotated.area == base.area
            assert rotated.perimeter == base.perimeter
            assert rotated.roundness == base.roundness
            assert rotated.rectangularity == base.rectangularity


@pytest.mark.parametrize(
    "base", [disk_mask(12).pixels, np.ones((10, 10), dtype=bool)], ids=["disk", "square"]
)
def test_upscale_scaling_behavior(base):
    feats = {}
    for k in (1, 2, 4):
        up = np.kron(base, np.ones((k, k), dtype=bool))
        feats[k] = shape_features(Mask(up))
    assert feats[2].area == 4 * feats[1].area
    assert feats[4].area == 16 * feats[1].area
    # block upscaling doubles the perimeter up to boundary effects that
    # shrink as the grid refines: P(2k)/P(k) -> 2 monotonically
    ratio_12 = feats[2].perimeter / feats[1].perimeter
    ratio_24 = feats[4].perimeter / feats[2].perimeter
    assert abs(ratio_24 - 2.0) < abs(ratio_12 - 2.0)
    assert abs(ratio_24 - 2.0) < 0.15
    # roundness approaches a fixed value monotonically from above
    assert feats[1].roundness > feats[2].roundness > feats[4].roundness
    d12 = feats[1].roundness - feats[2].roundness
    d24 = feats[2].roundness - feats[4].roundness
    assert d24 < d12


def test_disk_roundness_is_maximal_at_equal_area():
    disk = shape_features(disk_mask(20))                      # area ~1257
    square = shape_features(Mask(np.ones((35, 35), dtype=bool)))  # 1225
    rect = shape_features(Mask(np.ones((25, 50), dtype=bool)))    # 1250
    cross_grid = np.zeros((51, 51), dtype=bool)
    cross_grid[18:33, :] = True
    cross_grid[:, 18:33] = True                               # 1305
    cross = shape_features(Mask(cross_grid))
    assert disk.roundness > square.roundness
    assert disk.roundness > rect.roundness
    assert disk.roundness > cross.roundness


def test_holes_ignored_for_perimeter_area_counts_foreground():
    ring = disk_mask(15).pixels.copy()
    span = np.arange(-17, 18)
    yy, xx = np.meshgrid(span, span, indexing="ij")
    hole = (xx * xx + yy * yy) <= 6 * 6
    ring[hole] = False
    solid = disk_mask(15)
    ring_feats = shape_features(Mask(ring))
    solid_feats = shape_features(solid)
    assert ring_feats.perimeter == solid_feats.perimeter, "outer contour only"
    assert ring_feats.area == solid_feats.area - int(hole.sum())


def test_empty_mask_errors():
    with pytest.raises(MaskError):
        shape_features(Mask(np.zeros((5, 5), dtype=bool)))
    with pytest.raises(MaskError):
        crop_bbox_with_margin(Mask(np.zeros((5, 5), dtype=bool)), 0)


def test_multiple_components_error_and_opt_in():
    grid = np.zeros((10, 10), dtype=bool)
    grid[0:2, 0:2] = True
    grid[6:10, 6:10] = True
    with pytest.raises(MaskError, match="2 8-connected components"):
        shape_features(Mask(grid))
    feats = shape_features(Mask(grid), largest_component=True)
    assert feats.area == 16
    assert feats.bbox == (6, 6, 9, 9)


def test_single_pixel_roundness_undefined():
    grid = np.zeros((3, 3), dtype=bool)
    grid[1, 1] = True
    with pytest.raises(MaskError, match="perimeter is zero"):
        shape_features(Mask(grid))


def test_crop_single_pixel_margin_zero():
    grid = np.zeros((100, 100), dtype=bool)
    grid[5, 5] = True
    assert crop_bbox_with_margin(Mask(grid), 0) == (5, 5, 5, 5)


def test_crop_single_pixel_margin_twenty_clamps():
    grid = np.zeros((100, 100), dtype=bool)
    grid[5, 5] = True
    assert crop_bbox_with_margin(Mask(grid), 20) == (0, 0, 25, 25)


def test_crop_full_image_any_margin():
    grid = np.ones((30, 40), dtype=bool)
    for margin in (0, 5, 1000):
        assert crop_bbox_with_margin(Mask(grid), margin) == (0, 0, 39, 29)


def test_crop_rejects_negative_margin():
    with pytest.raises(ValidationError):
        crop_bbox_with_margin(Mask(np.ones((3, 3), dtype=bool)), -1)


def test_crop_shared_fixture_cases():
    """Same fixture file the sidecar's crop tests run against."""
    cases = json.loads(
        (Path(__file__).parent / "fixtures" / "crop_cases.json").read_text()
    )
    assert cases, "fixture file must not be empty"
    for case in cases:
        grid = np.zeros((case["height"], case["width"]), dtype=bool)
        for x, y in case.get("pixels", []):
            grid[y, x] = True
        if "rect" in case:
            x0, y0, x1, y1 = case["rect"]
            grid[y0 : y1 + 1, x0 : x1 + 1] = True
        got = crop_bbox_with_margin(Mask(grid), case["margin"])
        assert list(got) == case["bbox"], case["name"]


def test_shape_correlation_identity_and_oracle(rng):
    feats = list(rng.normal(size=12))
    assert shape_correlation(feats, feats) == 1.0
    # monotone transform plus a tie pattern
    vlm = np.floor(np.asarray(feats) * 2.0) / 2.0
    expected = oracle_spearman(feats, list(vlm))
    assert abs(shape_correlation(feats, vlm) - expected) < 1e-10


def test_pgm_roundtrip_binary_and_ascii(tmp_path, rng):
    grid = rng.random((13, 9)) < 0.5
    grid[0, 0] = True
    mask = Mask(grid)
    for binary in (True, False):
        path = tmp_path / f"m_{binary}.pgm"
        write_mask_pgm(mask, path, binary=binary)
        back = read_mask_pgm(path)
        assert np.array_equal(back.pixels, mask.pixels)


def test_pgm_reads_comments_and_nonzero_foreground(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_text("P2\n# a comment\n3 2\n7\n0 3 0\n7 0 1\n")
    mask = read_mask_pgm(path)
    assert mask.width == 3 and mask.height == 2
    assert np.array_equal(mask.pixels, [[False, True, False], [True, False, True]])


def test_pgm_rejects_garbage(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(ParseError):
        read_mask_pgm(path)
    path.write_text("P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(ParseError):
        read_mask_pgm(path)
