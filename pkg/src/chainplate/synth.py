"""Synthetic plate rendering: a reproducible stand-in for real plate photos.

Plates are rendered from the embedded font at an integer scale on a light
background, then salted with seeded pixel-flip noise, so every corpus is
regenerable bit-for-bit from its parameters.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .font import glyph_array, render_glyph
from .raster import GrayImage, save_image
from .recognize import CHARSET

__all__ = ["SynthSpec", "render_plate", "random_text", "generate_corpus", "MANIFEST_NAME"]

MANIFEST_NAME = "corpus.json"
TRUTH_NAME = "truth.csv"

_BG = 255
_FG = 0


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic plate image."""

    text: str
    scale: int = 3
    gap: int = 4
    noise: float = 0.0
    seed: int = 0
    bold: bool = False

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("text must be non-empty")
        for ch in self.text:
            if ch not in CHARSET:
                raise ValueError(f"character {ch!r} is not in the embedded font")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if self.gap < 2:
            raise ValueError("gap must be >= 2 columns")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise must be in [0, 1)")


def render_plate(spec: SynthSpec) -> GrayImage:
    """Render dark glyphs on a light background and apply seeded flip noise."""
    glyphs = [render_glyph(ch, spec.scale, spec.bold).pixels for ch in spec.text]
    margin = spec.gap
    height = max(g.shape[0] for g in glyphs) + 2 * margin
    width = sum(g.shape[1] for g in glyphs) + spec.gap * (len(glyphs) - 1) + 2 * margin
    canvas = np.full((height, width), _BG, dtype=np.uint8)
    col = margin
    for g in glyphs:
        canvas[margin : margin + g.shape[0], col : col + g.shape[1]][g] = _FG
        col += g.shape[1] + spec.gap
    if spec.noise > 0.0:
        rng = np.random.default_rng(spec.seed)
        flip = rng.random(canvas.shape) < spec.noise
        canvas[flip] = _BG + _FG - canvas[flip]
    return GrayImage(canvas)


def random_text(rng: np.random.Generator, length: int = 7) -> str:
    """Uniform random plate text over the embedded charset."""
    return "".join(CHARSET[i] for i in rng.integers(0, len(CHARSET), size=length))


def generate_corpus(
    out_dir: str | Path,
    count: int,
    scale: int = 3,
    gap: int = 4,
    noise: float = 0.0,
    seed: int = 0,
    bold: bool = False,
    text_length: int = 7,
) -> list[tuple[str, str]]:
    """Write ``count`` seeded random plates plus truth CSV and manifest.

    Returns the (filename, text) truth pairs. Deterministic: the same
    parameters always produce byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(count):
        text = random_text(rng, text_length)
        plate_seed = int(rng.integers(0, 2**31))
        spec = SynthSpec(
            text=text, scale=scale, gap=gap, noise=noise, seed=plate_seed, bold=bold
        )
        name = f"{i:03d}_{text}.pgm"
        (out / name).write_bytes(save_image(render_plate(spec), "P5"))
        entries.append((name, text))
    with open(out / TRUTH_NAME, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerows(entries)
    manifest = {
        "count": count,
        "scale": scale,
        "gap": gap,
        "noise": noise,
        "seed": seed,
        "bold": bold,
        "text_length": text_length,
        "charset": CHARSET,
    }
    with open(out / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return entries


def write_truth_entry(truth_path: str | Path, filename: str, text: str) -> None:
    """Append one filename,text row to a truth CSV."""
    if "," in filename or "," in text:
        raise ValueError("comma is not allowed in truth fields")
    with open(truth_path, "a", newline="") as fh:
        csv.writer(fh).writerow([filename, text])
