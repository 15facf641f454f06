"""Character segmentation: projection-profile splitting and component labeling.

Both techniques cut a binarized plate into ordered character boxes; the
benchmark harness compares their success rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ccl import label_array
from .raster import BinaryImage

__all__ = [
    "Box",
    "LabelMap",
    "Segmentation",
    "column_profile",
    "segment_by_projection",
    "label_components",
    "components_to_boxes",
    "crop",
]


@dataclass(frozen=True, order=True)
class Box:
    """Axis-aligned pixel rectangle, inclusive 0-based bounds."""

    top: int
    left: int
    bottom: int
    right: int

    def __post_init__(self) -> None:
        if self.top > self.bottom or self.left > self.right:
            raise ValueError(f"degenerate box {self}")
        if min(self.top, self.left) < 0:
            raise ValueError(f"negative box bounds {self}")

    @property
    def width(self) -> int:
        return self.right - self.left + 1

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1


@dataclass(frozen=True, eq=False, repr=False)
class LabelMap:
    """Connected-component labels: 0 background, components 1..n_components."""

    labels: np.ndarray
    n_components: int
    connectivity: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ValueError("labels must be 2-D")
        object.__setattr__(self, "labels", arr)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return (
            self.n_components == other.n_components
            and self.connectivity == other.connectivity
            and np.array_equal(self.labels, other.labels)
        )

    def __repr__(self) -> str:
        return f"LabelMap({self.width}x{self.height}, {self.n_components} components)"


@dataclass(frozen=True)
class Segmentation:
    """Ordered character boxes plus the technique that produced them."""

    boxes: tuple[Box, ...]
    technique: str  # "projection" or "ccl"

    def __post_init__(self) -> None:
        if self.technique not in ("projection", "ccl"):
            raise ValueError(f"unknown technique {self.technique!r}")
        object.__setattr__(self, "boxes", tuple(self.boxes))


def column_profile(img: BinaryImage) -> list[int]:
    """Foreground pixel count per column, left to right."""
    return img.pixels.sum(axis=0).tolist()


def segment_by_projection(img: BinaryImage, gap_threshold: int = 0) -> Segmentation:
    """Split at columns whose profile is <= gap_threshold.

    Maximal runs of columns with profile > gap_threshold become boxes; each
    box's rows span the foreground extent within its columns.
    """
    if gap_threshold < 0:
        raise ValueError(f"gap_threshold must be >= 0, got {gap_threshold}")
    profile = np.asarray(column_profile(img))
    active = profile > gap_threshold
    d = np.diff(np.concatenate(([0], active.view(np.int8), [0])))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)  # exclusive
    boxes = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        rows = np.flatnonzero(img.pixels[:, s:e].any(axis=1))
        boxes.append(Box(top=int(rows[0]), left=s, bottom=int(rows[-1]), right=e - 1))
    return Segmentation(boxes=tuple(boxes), technique="projection")


def label_components(img: BinaryImage, connectivity: int = 8) -> LabelMap:
    """Two-pass connected component labeling of the foreground.

    Components are numbered in raster order of their first-encountered pixel.
    """
    labels, n = label_array(img.pixels, connectivity)
    return LabelMap(labels=labels, n_components=n, connectivity=connectivity)


def components_to_boxes(
    lm: LabelMap, min_area: int = 8, min_height_fraction: float = 0.3
) -> Segmentation:
    """Bounding boxes of components big enough to be characters.

    Keeps components with area >= min_area and height >= min_height_fraction
    of the image height, ordered left to right (ties by top edge).
    """
    boxes = []
    min_height = min_height_fraction * lm.height
    for cid in range(1, lm.n_components + 1):
        rows, cols = np.nonzero(lm.labels == cid)
        if len(rows) < min_area:
            continue
        top, bottom = int(rows.min()), int(rows.max())
        if bottom - top + 1 < min_height:
            continue
        boxes.append(Box(top=top, left=int(cols.min()), bottom=bottom, right=int(cols.max())))
    boxes.sort(key=lambda b: (b.left, b.top))
    return Segmentation(boxes=tuple(boxes), technique="ccl")


def crop(img: BinaryImage, box: Box) -> BinaryImage:
    """Sub-image of exactly the box region."""
    if box.bottom >= img.height or box.right >= img.width:
        raise ValueError(f"{box} exceeds {img.width}x{img.height} image bounds")
    return BinaryImage(img.pixels[box.top : box.bottom + 1, box.left : box.right + 1])
