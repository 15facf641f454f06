"""Raster image types, Netpbm file I/O, thresholding and despeckling.

Images are immutable value objects backed by read-only numpy arrays, safe to
share across threads. Rows grow downward, columns rightward; pixel (0, 0) is
the top-left corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from ._ccl import label_array

__all__ = [
    "Pixel",
    "GrayImage",
    "BinaryImage",
    "NetpbmError",
    "load_image",
    "save_image",
    "otsu_level",
    "binarize",
    "despeckle",
]


class Pixel(NamedTuple):
    """Image coordinate: row from the top, column from the left, 0-based."""

    row: int
    col: int


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False, repr=False)
class GrayImage:
    """Grayscale raster with intensities 0-255 (0 = black)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("pixels must be a non-empty 2-D array")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("intensities must be integers")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("intensities must be in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _as_readonly(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False, repr=False)
class BinaryImage:
    """Bilevel raster; True marks foreground (character stroke)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("pixels must be a non-empty 2-D array")
        object.__setattr__(self, "pixels", _as_readonly(arr.astype(bool)))

    @classmethod
    def from_strings(cls, rows: list[str], foreground: str = "#") -> "BinaryImage":
        """Build an image from equal-length strings, one per row."""
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("rows must be non-empty and of equal length")
        return cls(np.array([[ch == foreground for ch in row] for row in rows]))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def foreground_count(self) -> int:
        return int(self.pixels.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"BinaryImage({self.width}x{self.height})"


Image = Union[GrayImage, BinaryImage]


class NetpbmError(ValueError):
    """Malformed or unsupported Netpbm data. ``offset`` locates the problem byte."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class _Scanner:
    """Tokenizer over Netpbm header/ASCII sections, tracking byte offsets."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            b = data[self.pos]
            if b in b" \t\r\n\x0b\x0c":
                self.pos += 1
            elif b == ord("#"):
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def read_uint(self, what: str) -> int:
        self.skip_space()
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and 48 <= data[self.pos] <= 57:
            self.pos += 1
        if self.pos == start:
            raise NetpbmError(f"expected {what}", start)
        return int(data[start : self.pos])

    def read_single_space(self) -> None:
        if self.pos >= len(self.data) or self.data[self.pos] not in b" \t\r\n\x0b\x0c":
            raise NetpbmError("expected single whitespace before raster data", self.pos)
        self.pos += 1


def load_image(data: bytes) -> Image:
    """Decode Netpbm bytes: P1/P4 to BinaryImage, P2/P5 to GrayImage.

    Only maxval 255 is supported for graymaps. P1/P4 value 1 maps to
    foreground. Raises NetpbmError naming the byte offset on malformed input.
    """
    if len(data) < 2:
        raise NetpbmError("not a Netpbm file: too short", 0)
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise NetpbmError(f"unsupported magic {magic!r}", 0)
    sc = _Scanner(data)
    sc.pos = 2
    width = sc.read_uint("width")
    height = sc.read_uint("height")
    if width < 1 or height < 1:
        raise NetpbmError(f"invalid dimensions {width}x{height}", 2)
    if magic in (b"P2", b"P5"):
        maxval_at = sc.pos
        maxval = sc.read_uint("maxval")
        if maxval != 255:
            raise NetpbmError(f"unsupported maxval {maxval}", maxval_at)

    if magic == b"P1":
        bits = np.empty(width * height, dtype=bool)
        for i in range(width * height):
            sc.skip_space()
            if sc.pos >= len(data):
                raise NetpbmError("truncated P1 data", sc.pos)
            b = data[sc.pos]
            if b not in b"01":
                raise NetpbmError(f"invalid P1 digit {chr(b)!r}", sc.pos)
            bits[i] = b == ord("1")
            sc.pos += 1
        return BinaryImage(bits.reshape(height, width))

    if magic == b"P2":
        vals = np.empty(width * height, dtype=np.uint8)
        for i in range(width * height):
            at = sc.pos
            v = sc.read_uint("P2 sample")
            if v > 255:
                raise NetpbmError(f"P2 sample {v} exceeds maxval", at)
            vals[i] = v
        return GrayImage(vals.reshape(height, width))

    sc.read_single_space()
    start = sc.pos
    if magic == b"P4":
        stride = (width + 7) // 8
        need = stride * height
        if len(data) - start < need:
            raise NetpbmError(f"truncated P4 data: need {need} bytes", len(data))
        raw = np.frombuffer(data, dtype=np.uint8, count=need, offset=start)
        bits = np.unpackbits(raw.reshape(height, stride), axis=1)[:, :width]
        return BinaryImage(bits.astype(bool))

    need = width * height
    if len(data) - start < need:
        raise NetpbmError(f"truncated P5 data: need {need} bytes", len(data))
    raw = np.frombuffer(data, dtype=np.uint8, count=need, offset=start)
    return GrayImage(raw.reshape(height, width).copy())


def save_image(img: Image, format: str) -> bytes:
    """Encode an image as Netpbm bytes; load_image inverts this exactly.

    ``format`` is one of "P1", "P4" (BinaryImage) or "P2", "P5" (GrayImage).
    """
    fmt = format.upper()
    if fmt in ("P1", "P4"):
        if not isinstance(img, BinaryImage):
            raise NetpbmError(f"{fmt} cannot encode a grayscale image")
        header = f"{fmt}\n{img.width} {img.height}\n".encode("ascii")
        if fmt == "P1":
            body = "".join(
                "".join("1" if v else "0" for v in row) + "\n"
                for row in img.pixels
            ).encode("ascii")
        else:
            body = np.packbits(img.pixels, axis=1).tobytes()
        return header + body
    if fmt in ("P2", "P5"):
        if not isinstance(img, GrayImage):
            raise NetpbmError(f"{fmt} cannot encode a bilevel image")
        header = f"{fmt}\n{img.width} {img.height}\n255\n".encode("ascii")
        if fmt == "P2":
            body = "".join(
                " ".join(str(int(v)) for v in row) + "\n" for row in img.pixels
            ).encode("ascii")
        else:
            body = img.pixels.tobytes()
        return header + body
    raise NetpbmError(f"unknown Netpbm format {format!r}")


def otsu_level(img: GrayImage) -> int:
    """Threshold level maximizing between-class variance of the histogram.

    The split at level t puts intensities <= t in one class and > t in the
    other. Comparisons run in exact integer arithmetic; among equal maxima
    the smallest level wins, so a constant image yields 0.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).tolist()
    total = img.width * img.height
    total_sum = sum(i * h for i, h in enumerate(hist))

    best_t = 0
    best_num = -1  # variance as exact fraction num/den, scaled by total**2
    best_den = 1
    w_a = 0
    s_a = 0
    for t in range(256):
        w_a += hist[t]
        s_a += t * hist[t]
        w_b = total - w_a
        if w_a == 0 or w_b == 0:
            continue
        diff = s_a * w_b - (total_sum - s_a) * w_a
        num = diff * diff
        den = w_a * w_b
        if num * best_den > best_num * den:
            best_num, best_den, best_t = num, den, t
    return best_t


def binarize(img: GrayImage, level: int, dark_foreground: bool = True) -> BinaryImage:
    """Threshold a grayscale image at ``level``.

    With dark_foreground, a pixel is foreground iff intensity <= level;
    otherwise iff intensity > level.
    """
    if not 0 <= level <= 255:
        raise ValueError(f"level must be in [0, 255], got {level}")
    if dark_foreground:
        return BinaryImage(img.pixels <= level)
    return BinaryImage(img.pixels > level)


def despeckle(img: BinaryImage, min_area: int, connectivity: int = 8) -> BinaryImage:
    """Drop foreground components smaller than ``min_area`` pixels."""
    if min_area < 1:
        raise ValueError(f"min_area must be >= 1, got {min_area}")
    labels, n = label_array(img.pixels, connectivity)
    if n == 0 or min_area == 1:
        return img
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    keep = areas >= min_area
    keep[0] = False
    return BinaryImage(keep[labels])
