"""Run-based two-pass connected component labeling over boolean masks.

Shared by the public labeling API and by the despeckle filter. Labels are
assigned 1..n in raster order of each component's first-encountered pixel,
so the output is fully deterministic.
"""

from __future__ import annotations

import numpy as np


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:  # path compression
        parent[x], x = root, parent[x]
    return root


def label_array(mask: np.ndarray, connectivity: int) -> tuple[np.ndarray, int]:
    """Label connected foreground components of a 2-D boolean mask.

    Returns ``(labels, n)`` where ``labels`` is an int32 array with 0 for
    background and components numbered 1..n.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)

    # Row runs of foreground, located once for the whole image. d has shape
    # (h, w+1); +1 marks a run start at that column, -1 an exclusive end.
    pad = np.zeros((h, w + 2), dtype=np.int8)
    pad[:, 1:-1] = mask
    d = np.diff(pad, axis=1)
    srow, scol = np.nonzero(d == 1)
    ecol = np.nonzero(d == -1)[1]
    if len(scol) == 0:
        return labels, 0

    parent: list[int] = []
    runs: list[tuple[int, int, int, int]] = []  # (row, start, end, provisional)
    prev: list[tuple[int, int, int]] = []  # runs of the previous row
    cur: list[tuple[int, int, int]] = []
    cur_row = -2
    reach = 1 if connectivity == 8 else 0

    for r, s, e in zip(srow.tolist(), scol.tolist(), ecol.tolist()):
        if r != cur_row:
            prev = cur if r == cur_row + 1 else []
            cur = []
            cur_row = r
            j = 0
        lab = len(parent)
        parent.append(lab)
        lo = s - reach
        hi = e + reach
        while j < len(prev) and prev[j][1] <= lo:
            j += 1
        k = j
        while k < len(prev) and prev[k][0] < hi:
            ra = _find(parent, lab)
            rb = _find(parent, prev[k][2])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
            k += 1
        cur.append((s, e, lab))
        runs.append((r, s, e, lab))

    # Second pass: resolve equivalences and renumber roots in the order the
    # provisional labels were created (raster order of first pixels).
    final = [0] * len(parent)
    n = 0
    for i in range(len(parent)):
        root = _find(parent, i)
        if root == i:
            n += 1
            final[i] = n
        else:
            final[i] = final[root]
    for r, s, e, lab in runs:
        labels[r, s:e] = final[lab]
    return labels, n
