# cython: language_level=3
"""Compiled mask kernels; mirrors _pure.py exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# Clockwise Moore neighborhood for a y-down grid, starting West.
cdef int[8] _DX = [-1, -1, 0, 1, 1, 1, 0, -1]
cdef int[8] _DY = [0, -1, -1, -1, 0, 1, 1, 1]


def trace_outer_contour(cnp.uint8_t[:, :] pixels):
    """See kernels._pure.trace_outer_contour."""
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    cdef Py_ssize_t x, y
    cdef long sx = -1, sy = -1
    cdef long total = 0

    for y in range(h):
        for x in range(w):
            if pixels[y, x]:
                total += 1
                if sx < 0:
                    sx = x
                    sy = y
    if sx < 0:
        raise ValueError("trace_outer_contour: mask has no foreground pixel")

    cdef long px = sx, py = sy
    cdef int bdir = 0
    cdef long fnx = -2, fny = -2   # first move out of the start pixel
    cdef long n_axis = 0, n_diag = 0
    cdef long max_steps = 8 * (4 + 4 * total)
    cdef long step, nx, ny, bx, by
    cdef int j, k, found, prev

    for step in range(max_steps):
        found = -1
        for j in range(1, 9):
            k = (bdir + j) % 8
            nx = px + _DX[k]
            ny = py + _DY[k]
            if 0 <= nx < w and 0 <= ny < h and pixels[ny, nx]:
                found = k
                break
        if found < 0:
            break
        nx = px + _DX[found]
        ny = py + _DY[found]
        if px == sx and py == sy:
            if fnx == -2:
                fnx = nx
                fny = ny
            elif nx == fnx and ny == fny:
                break
        if found % 2 == 0:
            n_axis += 1
        else:
            n_diag += 1
        prev = (found + 7) % 8  # C modulo: keep the operand non-negative
        bx = px + _DX[prev]
        by = py + _DY[prev]
        px = nx
        py = ny
        for j in range(8):
            if _DX[j] == bx - px and _DY[j] == by - py:
                bdir = j
                break
    return int(n_axis), int(n_diag)


def label_components(cnp.uint8_t[:, :] pixels):
    """See kernels._pure.label_components."""
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, :] labels = labels_arr
    stack_arr = np.empty(h * w * 2, dtype=np.intp)
    cdef cnp.intp_t[:] stack = stack_arr
    cdef Py_ssize_t top
    cdef long count = 0
    cdef Py_ssize_t x0, y0, x, y, nx, ny
    cdef int k

    for y0 in range(h):
        for x0 in range(w):
            if not pixels[y0, x0] or labels[y0, x0]:
                continue
            count += 1
            labels[y0, x0] = count
            stack[0] = x0
            stack[1] = y0
            top = 2
            while top > 0:
                y = stack[top - 1]
                x = stack[top - 2]
                top -= 2
                for k in range(8):
                    nx = x + _DX[k]
                    ny = y + _DY[k]
                    if 0 <= nx < w and 0 <= ny < h and pixels[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = count
                        stack[top] = nx
                        stack[top + 1] = ny
                        top += 2
    return int(count), labels_arr
