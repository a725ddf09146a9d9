"""Binary-mask geometry: area, perimeter, bounding box, roundness,
rectangularity, margin cropping.

Masks are row-major boolean grids (pixels[y, x], y down). The perimeter
is the length of the 8-connected outer boundary walk (Moore neighborhood):
axis steps weigh 1, diagonal steps sqrt(2). Holes do not contribute to the
perimeter; the area counts every foreground pixel. Roundness is
4*pi*area/perimeter^2 and rectangularity is area over the tight
bounding-box area.

Mask files are plain PGM (P2 or P5), nonzero = foreground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import MaskError, ParseError, ValidationError
from .metrics import spearman

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Mask:
    """2D boolean pixel grid, true = foreground."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.ascontiguousarray(np.asarray(self.pixels, dtype=bool))
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValidationError("mask must be a non-empty 2D grid")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def foreground_count(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class ShapeFeatures:
    area: int
    perimeter: float
    bbox: tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive
    roundness: float
    rectangularity: float


def _require_foreground(mask: Mask) -> None:
    if not mask.pixels.any():
        raise MaskError("mask has no foreground pixels")


def tight_bbox(mask: Mask) -> tuple[int, int, int, int]:
    """Tight bounding box (x0, y0, x1, y1), inclusive, over all foreground."""
    _require_foreground(mask)
    rows = np.flatnonzero(mask.pixels.any(axis=1))
    cols = np.flatnonzero(mask.pixels.any(axis=0))
    return int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1])


def single_component(mask: Mask, largest_component: bool = False) -> Mask:
    """Return the mask reduced to one 8-connected component.

    Raises MaskError if the mask has several components, unless
    ``largest_component`` is set, in which case the largest one (ties:
    first in raster order) is kept.
    """
    _require_foreground(mask)
    count, labels = kernels.label_components(mask.pixels.astype(np.uint8))
    if count == 1:
        return mask
    if not largest_component:
        raise MaskError(
            f"mask has {count} 8-connected components; pass largest_component "
            "to keep the largest"
        )
    sizes = np.bincount(labels.ravel())[1:]
    keep = int(np.argmax(sizes)) + 1
    return Mask(labels == keep)


def perimeter_counts(mask: Mask) -> tuple[int, int]:
    """(axis, diagonal) step counts of the outer contour walk."""
    _require_foreground(mask)
    return kernels.trace_outer_contour(mask.pixels.astype(np.uint8))


def shape_features(mask: Mask, largest_component: bool = False) -> ShapeFeatures:
    """Area, outer perimeter, bbox, roundness and rectangularity.

    Requires exactly one 8-connected component (or ``largest_component``).
    """
    mask = single_component(mask, largest_component=largest_component)
    area = mask.foreground_count()
    n_axis, n_diag = perimeter_counts(mask)
    perimeter = n_axis + n_diag * SQRT2
    if perimeter == 0.0:
        raise MaskError("mask perimeter is zero (single pixel); roundness undefined")
    x0, y0, x1, y1 = tight_bbox(mask)
    bbox_area = (x1 - x0 + 1) * (y1 - y0 + 1)
    return ShapeFeatures(
        area=area,
        perimeter=perimeter,
        bbox=(x0, y0, x1, y1),
        roundness=4.0 * math.pi * area / (perimeter * perimeter),
        rectangularity=area / bbox_area,
    )


def crop_bbox_with_margin(mask: Mask, margin: int) -> tuple[int, int, int, int]:
    """Tight bbox expanded by ``margin`` on each side, clamped to the grid."""
    if margin < 0:
        raise ValidationError(f"margin must be >= 0, got {margin}")
    x0, y0, x1, y1 = tight_bbox(mask)
    return (
        max(0, x0 - margin),
        max(0, y0 - margin),
        min(mask.width - 1, x1 + margin),
        min(mask.height - 1, y1 + margin),
    )


def shape_correlation(features, vlm_outputs) -> float:
    """Spearman correlation between mask features and per-image similarity
    values of a chosen descriptor column."""
    return spearman(features, vlm_outputs)


# ---------------------------------------------------------------------------
# PGM files (P2 ASCII / P5 binary), nonzero = foreground


def read_mask_pgm(path) -> Mask:
    with open(path, "rb") as fh:
        data = fh.read()

    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError(f"{path}: truncated PGM header")
        return data[start:pos]

    magic = next_token()
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"{path}: not a PGM file (magic {magic!r})")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError:
        raise ParseError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1 or not 1 <= maxval <= 65535:
        raise ParseError(f"{path}: invalid PGM dimensions or maxval")

    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.uint8
        count = width * height
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
        if raw.size != count:
            raise ParseError(f"{path}: truncated PGM pixel data")
        grid = raw.reshape(height, width)
    else:
        try:
            flat = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise ParseError(f"{path}: non-numeric PGM pixel data") from None
        if flat.size != width * height:
            raise ParseError(
                f"{path}: expected {width * height} pixels, got {flat.size}"
            )
        grid = flat.reshape(height, width)
    return Mask(grid != 0)


def write_mask_pgm(mask: Mask, path, binary: bool = True) -> None:
    grid = mask.pixels.astype(np.uint8) * 255
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii"))
            fh.write(grid.tobytes())
        else:
            fh.write(f"P2\n{mask.width} {mask.height}\n255\n".encode("ascii"))
            for row in grid:
                fh.write((" ".join(str(v) for v in row) + "\n").encode("ascii"))
