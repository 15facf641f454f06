"""Chain-code encoding of object boundaries and the code-frequency feature.

A chain code records a clockwise walk along a component's outer boundary as
a sequence of direction numbers. Two schemes are supported:

    8-directional            4-directional
      3  2  1                     1
       \\ | /                      |
    4 -- * -- 0               2 --*-- 0
       / | \\                      |
      5  6  7                     3

Rows grow downward, so code 2 (north) moves to row-1. Holes are ignored:
only the outer boundary is traced, which deliberately makes ring-shaped
characters (O vs 0) hard to tell apart downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ccl import label_array
from .raster import BinaryImage, Pixel

__all__ = [
    "DirectionScheme",
    "FOUR_DIR",
    "EIGHT_DIR",
    "ChainCode",
    "CodeHistogram",
    "TraceError",
    "trace_boundary",
    "decode",
    "net_displacement",
    "code_histogram",
    "normalize",
]

_DELTAS_8 = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))
_DELTAS_4 = ((0, 1), (-1, 0), (0, -1), (1, 0))


@dataclass(frozen=True)
class DirectionScheme:
    """Maps direction codes 0..connectivity-1 to unit pixel displacements."""

    connectivity: int

    def __post_init__(self) -> None:
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")

    @property
    def deltas(self) -> tuple[tuple[int, int], ...]:
        return _DELTAS_8 if self.connectivity == 8 else _DELTAS_4

    def displacement(self, code: int) -> tuple[int, int]:
        return self.deltas[code]

    def opposite(self, code: int) -> int:
        return (code + self.connectivity // 2) % self.connectivity


FOUR_DIR = DirectionScheme(4)
EIGHT_DIR = DirectionScheme(8)


class TraceError(ValueError):
    """Boundary tracing could not start or cover the component."""


@dataclass(frozen=True)
class ChainCode:
    """Start pixel plus the direction codes of a boundary walk."""

    start: Pixel
    scheme: DirectionScheme
    codes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "codes", tuple(self.codes))
        c = self.scheme.connectivity
        for k in self.codes:
            if not 0 <= k < c:
                raise ValueError(f"code {k} invalid for {c}-directional scheme")

    def __len__(self) -> int:
        return len(self.codes)

    def as_string(self) -> str:
        return "".join(str(k) for k in self.codes)


@dataclass(frozen=True)
class CodeHistogram:
    """Occurrence count of each direction code in a chain code."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) not in (4, 8):
            raise ValueError("counts length must be 4 or 8")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def connectivity(self) -> int:
        return len(self.counts)


def _component_of(img: BinaryImage, seed: Pixel, connectivity: int) -> np.ndarray:
    labels, _ = label_array(img.pixels, connectivity)
    return labels == labels[seed.row, seed.col]


def trace_boundary(img: BinaryImage, seed: Pixel, scheme: DirectionScheme = EIGHT_DIR) -> ChainCode:
    """Clockwise outer-boundary walk of the seed pixel's component.

    The walk starts at the component's topmost-then-leftmost pixel and scans
    neighbors clockwise beginning west of it. It stops only when the start
    pixel is about to be re-left in the same direction as the first move;
    plain "got back to the start" would end too early on one-pixel-wide
    strokes, which legitimately pass through the start twice.

    A 4-directional walk is only defined when the seed's component is
    4-connected; otherwise TraceError is raised.
    """
    if not (0 <= seed.row < img.height and 0 <= seed.col < img.width):
        raise TraceError(f"seed {seed} outside {img.width}x{img.height} image")
    mask = img.pixels
    if not mask[seed.row, seed.col]:
        raise TraceError(f"seed {seed} is a background pixel")

    comp = _component_of(img, seed, 8)
    if scheme.connectivity == 4:
        comp4 = _component_of(img, seed, 4)
        if not np.array_equal(comp, comp4):
            raise TraceError("component is not 4-connected; use the 8-directional scheme")

    flat = int(np.argmax(comp))
    start = Pixel(flat // img.width, flat % img.width)

    if scheme.connectivity == 8:
        codes = _walk8(mask, start)
    else:
        codes = _walk4(mask, start)
    return ChainCode(start=start, scheme=scheme, codes=tuple(codes))


def _walk8(mask: np.ndarray, start: Pixel) -> list[int]:
    h, w = mask.shape

    def fg(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and mask[r, c]

    def scan(br: int, bc: int, start_code: int) -> tuple[int, int, int, int, int] | None:
        # Examine the 8 neighbors of (br, bc) clockwise from start_code; the
        # first foreground hit is the next pixel, the one inspected just
        # before it becomes the new backtrack cell.
        for i in range(8):
            e = (start_code - i) % 8
            dr, dc = _DELTAS_8[e]
            if fg(br + dr, bc + dc):
                pr, pc = _DELTAS_8[(e + 1) % 8]
                return br + dr, bc + dc, e, br + pr, bc + pc
        return None

    first = scan(start.row, start.col, 4)  # begin west of the start pixel
    if first is None:
        return []  # isolated pixel: trivially closed
    b1r, b1c, d1, cr, cc = first
    codes = [d1]
    br, bc = b1r, b1c
    limit = 8 * mask.size + 16
    while True:
        cdir = _code_of(br, bc, cr, cc)
        nr, nc, e, pr, pc = scan(br, bc, cdir)  # type: ignore[misc]
        if br == start.row and bc == start.col and nr == b1r and nc == b1c:
            return codes  # about to repeat the first move: boundary closed
        codes.append(e)
        br, bc, cr, cc = nr, nc, pr, pc
        limit -= 1
        if limit <= 0:  # pragma: no cover - guarded invariant
            raise RuntimeError("boundary walk failed to close")


def _walk4(mask: np.ndarray, start: Pixel) -> list[int]:
    h, w = mask.shape

    def fg(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and mask[r, c]

    r0, c0 = start
    first = None
    for e in (2, 1, 0, 3):  # clockwise from west
        dr, dc = _DELTAS_4[e]
        if fg(r0 + dr, c0 + dc):
            first = e
            break
    if first is None:
        return []
    codes = [first]
    d = first
    r, c = r0 + _DELTAS_4[d][0], c0 + _DELTAS_4[d][1]
    limit = 4 * mask.size + 16
    while True:
        # Keep the component on the right of travel: prefer a left turn,
        # then straight, right, and finally back the way we came.
        for turn in (1, 0, -1, 2):
            e = (d + turn) % 4
            dr, dc = _DELTAS_4[e]
            if fg(r + dr, c + dc):
                break
        if r == r0 and c == c0 and e == first:
            return codes
        codes.append(e)
        d = e
        r, c = r + dr, c + dc
        limit -= 1
        if limit <= 0:  # pragma: no cover - guarded invariant
            raise RuntimeError("boundary walk failed to close")


def _code_of(fr: int, fc: int, tr: int, tc: int) -> int:
    dr, dc = tr - fr, tc - fc
    return _DELTAS_8.index((dr, dc))


def decode(cc: ChainCode) -> list[Pixel]:
    """Pixel sequence of the walk, starting at cc.start.

    Coordinates are absolute; a step producing a negative row or column
    raises ValueError since no canvas could contain it.
    """
    r, c = cc.start
    out = [cc.start]
    deltas = cc.scheme.deltas
    for k in cc.codes:
        dr, dc = deltas[k]
        r += dr
        c += dc
        if r < 0 or c < 0:
            raise ValueError(f"decoded pixel ({r}, {c}) has a negative coordinate")
        out.append(Pixel(r, c))
    return out


def net_displacement(cc: ChainCode) -> tuple[int, int]:
    """Componentwise sum of the walk's unit displacements; (0, 0) iff closed."""
    deltas = cc.scheme.deltas
    dr = sum(deltas[k][0] for k in cc.codes)
    dc = sum(deltas[k][1] for k in cc.codes)
    return dr, dc


def code_histogram(cc: ChainCode) -> CodeHistogram:
    """Per-direction occurrence counts; the recognition feature."""
    counts = [0] * cc.scheme.connectivity
    for k in cc.codes:
        counts[k] += 1
    return CodeHistogram(counts=tuple(counts))


def normalize(h: CodeHistogram) -> list[float]:
    """Counts divided by the total, so glyph size drops out. Errors on total 0."""
    total = h.total
    if total == 0:
        raise ValueError("cannot normalize an empty histogram")
    return [c / total for c in h.counts]
