"""End-to-end plate reading: threshold, filter, segment, trace, classify."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from ._ccl import label_array
from .chaincode import DirectionScheme, code_histogram, trace_boundary
from .raster import BinaryImage, GrayImage, Pixel, binarize, despeckle, otsu_level
from .recognize import RecognitionResult, TemplateSet, classify
from .segment import Segmentation, components_to_boxes, crop, label_components, segment_by_projection

__all__ = ["PipelineOptions", "CharacterRead", "PlateResult", "SegmentationFailure",
           "binarize_plate", "segment_plate", "read_plate"]


class SegmentationFailure(Exception):
    """The segmenter produced no usable character boxes."""


@dataclass(frozen=True)
class PipelineOptions:
    """Knobs for every pipeline stage; defaults match the benchmark harness."""

    threshold: int | None = None  # None selects Otsu's method
    invert: bool = False  # False: dark strokes are foreground
    min_area: int = 8
    connectivity: int = 8
    segmenter: str = "ccl"  # or "projection"
    gap_threshold: int = 0
    min_height_fraction: float = 0.3
    raw_totals: bool = False

    def __post_init__(self) -> None:
        if self.segmenter not in ("ccl", "projection"):
            raise ValueError(f"unknown segmenter {self.segmenter!r}")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")


@dataclass(frozen=True)
class CharacterRead:
    """One segmented character: where it was and what it matched."""

    box_index: int
    result: RecognitionResult


@dataclass(frozen=True)
class PlateResult:
    """Plate string plus per-character detail."""

    text: str
    characters: tuple[CharacterRead, ...]
    segmentation: Segmentation


def binarize_plate(img: GrayImage | BinaryImage, options: PipelineOptions) -> BinaryImage:
    """Threshold (if grayscale) and despeckle."""
    if isinstance(img, GrayImage):
        level = otsu_level(img) if options.threshold is None else options.threshold
        binary = binarize(img, level, dark_foreground=not options.invert)
    else:
        binary = img
    return despeckle(binary, options.min_area, options.connectivity)


def segment_plate(binary: BinaryImage, options: PipelineOptions) -> Segmentation:
    """Run the configured segmentation technique."""
    if options.segmenter == "projection":
        return segment_by_projection(binary, options.gap_threshold)
    lm = label_components(binary, options.connectivity)
    return components_to_boxes(lm, options.min_area, options.min_height_fraction)


def _largest_component_seed(glyph: BinaryImage) -> Pixel | None:
    labels, n = label_array(glyph.pixels, 8)
    if n == 0:
        return None
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    areas[0] = 0
    # Ties fall to the smaller label, i.e. the component seen first in
    # raster order, keeping the choice deterministic.
    target = int(areas.argmax())
    flat = int((labels == target).argmax())
    return Pixel(flat // glyph.width, flat % glyph.width)


def read_character(
    glyph: BinaryImage, templates: TemplateSet, raw_totals: bool = False
) -> RecognitionResult | None:
    """Trace, histogram and classify one character crop.

    The largest component in the crop is traced (boxes can pick up fringe
    noise). Returns None when nothing in the crop is classifiable; elapsed
    covers the whole trace-encode-match step.
    """
    t0 = time.perf_counter()
    seed = _largest_component_seed(glyph)
    if seed is None:
        return None
    cc = trace_boundary(glyph, seed, templates.scheme)
    hist = code_histogram(cc)
    if hist.total == 0:
        return None
    result = classify(hist, templates, raw_totals=raw_totals)
    return replace(result, elapsed=time.perf_counter() - t0)


def read_plate(
    img: GrayImage | BinaryImage,
    templates: TemplateSet,
    options: PipelineOptions = PipelineOptions(),
) -> PlateResult:
    """Full pipeline over one plate image, characters left to right.

    Raises SegmentationFailure when no character boxes survive filtering.
    Characters that segment but cannot be classified read as '?'.
    """
    binary = binarize_plate(img, options)
    seg = segment_plate(binary, options)
    if not seg.boxes:
        raise SegmentationFailure(f"no characters found with {options.segmenter} segmenter")
    reads = []
    text = []
    for i, box in enumerate(seg.boxes):
        result = read_character(crop(binary, box), templates, options.raw_totals)
        if result is None:
            result = RecognitionResult(label="?", distance=float("inf"), runner_up=None, elapsed=0.0)
        reads.append(CharacterRead(box_index=i, result=result))
        text.append(result.label)
    return PlateResult(text="".join(text), characters=tuple(reads), segmentation=seg)
