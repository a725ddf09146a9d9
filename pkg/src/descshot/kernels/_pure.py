"""Pure-Python mask kernels (fallback for the compiled extension).

Same algorithms as ``_native.pyx``; results are bit-identical.
"""

from __future__ import annotations

import numpy as np

# Moore neighborhood in clockwise order for a y-down grid, starting West.
# Entries are (dx, dy); even indices are axis moves, odd are diagonals.
_OFFSETS = (
    (-1, 0),   # W
    (-1, -1),  # NW
    (0, -1),   # N
    (1, -1),   # NE
    (1, 0),    # E
    (1, 1),    # SE
    (0, 1),    # S
    (-1, 1),   # SW
)
_DIR_INDEX = {off: k for k, off in enumerate(_OFFSETS)}


def trace_outer_contour(pixels: np.ndarray) -> tuple[int, int]:
    """Trace the outer boundary of the foreground component containing the
    raster-first foreground pixel (Moore-neighbor tracing, clockwise).

    ``pixels`` is a 2D uint8 array, nonzero = foreground. Returns
    ``(n_axis, n_diagonal)`` step counts of the closed contour walk; a
    single isolated pixel has zero steps. The caller is responsible for
    ensuring the mask holds exactly the component to trace.
    """
    h, w = pixels.shape
    start = None
    for y in range(h):
        row = pixels[y]
        for x in range(w):
            if row[x]:
                start = (x, y)
                break
        if start is not None:
            break
    if start is None:
        raise ValueError("trace_outer_contour: mask has no foreground pixel")

    sx, sy = start
    px, py = sx, sy
    # Initial backtrack is the (background) pixel west of the start; the
    # raster scan guarantees it is not foreground.
    bdir = 0  # index into _OFFSETS of the backtrack relative to current
    first_next = None
    n_axis = 0
    n_diag = 0
    max_steps = 8 * (4 + 4 * int(pixels.sum()))

    for _ in range(max_steps):
        found = -1
        for j in range(1, 9):
            k = (bdir + j) % 8
            nx = px + _OFFSETS[k][0]
            ny = py + _OFFSETS[k][1]
            if 0 <= nx < w and 0 <= ny < h and pixels[ny, nx]:
                found = k
                break
        if found < 0:
            break  # isolated pixel
        nx = px + _OFFSETS[found][0]
        ny = py + _OFFSETS[found][1]
        if px == sx and py == sy:
            if first_next is None:
                first_next = (nx, ny)
            elif (nx, ny) == first_next:
                break  # contour closed: leaving the start the same way again
        if found % 2 == 0:
            n_axis += 1
        else:
            n_diag += 1
        # New backtrack: the last background position checked, i.e. the
        # neighbor immediately before `found` in the clockwise scan.
        prev = (found - 1) % 8
        bx = px + _OFFSETS[prev][0]
        by = py + _OFFSETS[prev][1]
        px, py = nx, ny
        bdir = _DIR_INDEX[(bx - px, by - py)]
    return n_axis, n_diag


def label_components(pixels: np.ndarray) -> tuple[int, np.ndarray]:
    """Label 8-connected foreground components.

    Returns ``(count, labels)`` where labels is an int32 array, 0 for
    background and 1..count for components in raster-encounter order.
    """
    h, w = pixels.shape
    labels = np.zeros((h, w), dtype=np.int32)
    count = 0
    stack: list[tuple[int, int]] = []
    for y0 in range(h):
        row = pixels[y0]
        for x0 in range(w):
            if not row[x0] or labels[y0, x0]:
                continue
            count += 1
            labels[y0, x0] = count
            stack.append((x0, y0))
            while stack:
                x, y = stack.pop()
                for dx, dy in _OFFSETS:
                    nx = x + dx
                    ny = y + dy
                    if (
                        0 <= nx < w
                        and 0 <= ny < h
                        and pixels[ny, nx]
                        and not labels[ny, nx]
                    ):
                        labels[ny, nx] = count
                        stack.append((nx, ny))
    return count, labels
