"""JIT kernel for the exact Euclidean distance transform.

The 2D squared EDT factorizes into two 1D passes. The column pass (plain
numpy, see raster.py) yields for every pixel the exact vertical distance to
the nearest background pixel in its own column. This kernel then runs the
lower-envelope-of-parabolas pass over every row: for row values g2[k]
(squared vertical distances), the output is min_k(g2[k] + (x - k)^2), which
is the exact squared Euclidean distance. The envelope scan is inherently
sequential per row, hence the JIT.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_FAR = 1e30


@njit(cache=True)
def edt_sq_rows(g2: np.ndarray) -> np.ndarray:
    h, w = g2.shape
    out = np.empty((h, w), np.float64)
    v = np.empty(w, np.int64)       # parabola sites
    z = np.empty(w + 1, np.float64)  # envelope breakpoints
    for i in range(h):
        row = g2[i]
        k = 0
        v[0] = 0
        z[0] = -_FAR
        z[1] = _FAR
        for q in range(1, w):
            # intersection of parabola at q with the rightmost kept one
            s = ((row[q] + q * q) - (row[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
            while s <= z[k]:
                k -= 1
                s = ((row[q] + q * q) - (row[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = _FAR
        k = 0
        for q in range(w):
            while z[k + 1] < q:
                k += 1
            d = q - v[k]
            out[i, q] = d * d + row[v[k]]
    return out


# Force compilation (or a cache load) at import time so the first real
# transform is not billed for JIT work.
edt_sq_rows(np.zeros((2, 2), np.float64))
