"""Droplet instance segmentation: 8-connected marker labeling followed by
marker-controlled watershed flooding over the grayscale image, restricted to
the foreground mask.

The flood contract is deterministic and fully pinned down so independent
implementations can reproduce it bit for bit:

* every marker pixel is seeded up front, in row-major order
* expansion uses the 4-neighborhood, visited in N, W, E, S order
* a pixel is claimed the moment a flood front reaches it (label-on-push)
* fronts are ordered by the claimed pixel's own gray value, ascending
  (darker floods first); ties break FIFO by global enqueue order
* foreground pixels unreachable from any marker keep label 0
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import InputContractError

__all__ = [
    "LabeledMarkers",
    "DropletSegment",
    "SegmentationResult",
    "label_markers",
    "watershed",
    "measure_segments",
]


@dataclass(frozen=True)
class LabeledMarkers:
    """Dense marker ids: labels[y, x] is 0 for no marker, 1..count otherwise."""

    width: int
    height: int
    labels: np.ndarray
    count: int


@dataclass(frozen=True)
class DropletSegment:
    """One droplet instance, in pixel units.

    centroid is (x, y), the arithmetic mean of member pixel coordinates.
    bounding_box is (x0, y0, x1, y1) with exclusive upper bounds.
    """

    id: int
    pixel_area: int
    centroid: tuple[float, float]
    bounding_box: tuple[int, int, int, int]


@dataclass(frozen=True)
class SegmentationResult:
    """Per-pixel droplet labels (0 = background or unclaimed) plus one
    DropletSegment record per marker id."""

    labels: np.ndarray
    segments: list[DropletSegment]


def _row_runs(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start/end (exclusive) columns of each maximal True run in a row."""
    padded = np.zeros(row.shape[0] + 2, np.int8)
    padded[1:-1] = row
    step = np.diff(padded)
    return np.flatnonzero(step == 1), np.flatnonzero(step == -1)


def label_markers(markers: np.ndarray) -> LabeledMarkers:
    """Label maximal 8-connected marker regions with dense ids 1..count.

    Ids are ordered by each region's first pixel in row-major scan order.
    Classic two-pass scheme over row runs with union-find merging.
    """
    markers = np.asarray(markers)
    if markers.ndim != 2 or markers.size == 0:
        raise InputContractError(f"marker mask must be a non-empty 2D array, got shape {markers.shape}")
    markers = markers.astype(bool, copy=False)
    h, w = markers.shape

    parent: list[int] = []

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:  # path compression
            parent[i], i = root, parent[i]
        return root

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    runs: list[tuple[int, int, int, int]] = []  # (y, start, end, provisional id)
    prev: list[tuple[int, int, int]] = []  # previous row's (start, end, provisional id)
    for y in range(h):
        starts, ends = _row_runs(markers[y])
        cur: list[tuple[int, int, int]] = []
        k = 0
        for s, e in zip(starts.tolist(), ends.tolist()):
            pid = len(parent)
            parent.append(pid)
            # 8-connectivity: runs touch if column spans overlap after
            # widening the current one by one pixel on each side
            while k < len(prev) and prev[k][1] < s:
                k += 1
            j = k
            while j < len(prev) and prev[j][0] <= e:
                union(pid, prev[j][2])
                j += 1
            cur.append((s, e, pid))
            runs.append((y, s, e, pid))
        prev = cur

    labels = np.zeros((h, w), np.int32)
    final: dict[int, int] = {}
    for y, s, e, pid in runs:
        root = find(pid)
        lab = final.get(root)
        if lab is None:
            lab = len(final) + 1
            final[root] = lab
        labels[y, s:e] = lab
    return LabeledMarkers(width=w, height=h, labels=labels, count=len(final))


def watershed(gray: np.ndarray, markers: LabeledMarkers, mask: np.ndarray) -> SegmentationResult:
    """Flood the foreground from all markers simultaneously.

    Every foreground pixel reachable from a marker through the 4-neighborhood
    gets exactly one label; contested pixels go to whichever front reaches
    them first under the priority/FIFO rule in the module docstring.
    """
    gray = np.asarray(gray, dtype=np.float64)
    mask = np.asarray(mask)
    if gray.ndim != 2:
        raise InputContractError(f"gray image must be 2D, got shape {gray.shape}")
    mask = mask.astype(bool, copy=False)
    if mask.shape != gray.shape or markers.labels.shape != gray.shape:
        raise InputContractError(
            f"shape mismatch: gray {gray.shape}, mask {mask.shape}, markers {markers.labels.shape}"
        )
    if np.any(markers.labels[~mask] > 0):
        raise InputContractError("marker pixel outside the foreground mask")

    h, w = gray.shape
    out = markers.labels.astype(np.int64).copy()
    flat_out = out.ravel()
    flat_gray = gray.ravel()
    flat_mask = mask.ravel()

    heap: list[tuple[float, int, int]] = []
    counter = 0
    seed_ys, seed_xs = np.nonzero(markers.labels)  # row-major order
    for idx in (seed_ys * w + seed_xs).tolist():
        heap.append((flat_gray[idx], counter, idx))
        counter += 1
    heapq.heapify(heap)  # seeds are pushed before any pop, so heapify is equivalent

    pop = heapq.heappop
    push = heapq.heappush
    while heap:
        _, _, idx = pop(heap)
        lab = flat_out[idx]
        y, x = divmod(idx, w)
        for ny, nx in ((y - 1, x), (y, x - 1), (y, x + 1), (y + 1, x)):
            if 0 <= ny < h and 0 <= nx < w:
                nidx = ny * w + nx
                if flat_mask[nidx] and flat_out[nidx] == 0:
                    flat_out[nidx] = lab
                    push(heap, (flat_gray[nidx], counter, nidx))
                    counter += 1

    result = SegmentationResult(labels=out, segments=[])
    return SegmentationResult(labels=out, segments=measure_segments(result))


def measure_segments(result: SegmentationResult) -> list[DropletSegment]:
    """Aggregate per-label pixel counts, centroids, and bounding boxes."""
    labels = result.labels
    ys, xs = np.nonzero(labels)
    if ys.size == 0:
        return []
    ids = labels[ys, xs]
    order = np.argsort(ids, kind="stable")
    ids = ids[order]
    ys = ys[order]
    xs = xs[order]
    ends = np.searchsorted(ids, np.arange(1, ids[-1] + 1), side="right")
    segments: list[DropletSegment] = []
    start = 0
    for lab, stop in enumerate(ends.tolist(), start=1):
        if stop == start:
            continue  # watershed never produces gaps; guard for hand-built results
        sy = ys[start:stop]
        sx = xs[start:stop]
        area = stop - start
        segments.append(
            DropletSegment(
                id=lab,
                pixel_area=int(area),
                centroid=(float(sx.mean()), float(sy.mean())),
                bounding_box=(int(sx.min()), int(sy.min()), int(sx.max()) + 1, int(sy.max()) + 1),
            )
        )
        start = stop
    return segments
