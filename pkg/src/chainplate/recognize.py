"""Template classification of characters from chain-code histograms.

A template is the mean normalized code histogram of one or more reference
glyphs. Classification is nearest-template under L1 distance, with a
confusion matrix to expose which look-alike pairs the feature cannot
separate.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .chaincode import (
    ChainCode,
    CodeHistogram,
    DirectionScheme,
    TraceError,
    code_histogram,
    normalize,
    trace_boundary,
)
from .raster import BinaryImage, Pixel

__all__ = [
    "CHARSET",
    "Template",
    "TemplateSet",
    "RecognitionResult",
    "ConfusionMatrix",
    "TemplateFormatError",
    "distance",
    "classify",
    "build_template",
    "confusion",
    "format_templates",
    "parse_templates",
    "save_templates",
    "load_templates",
]

CHARSET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"

TEMPLATE_MAGIC = "FCCT1"


class TemplateFormatError(ValueError):
    """Template file does not conform to the FCCT1 format."""


@dataclass(frozen=True)
class Template:
    """Reference histogram for one character label.

    ``mean_total`` (mean raw code count of the source glyphs) is kept for
    raw-total matching; it is not stored in template files, so file-loaded
    templates carry None and raw matching falls back to size-matched scaling.
    """

    label: str
    scheme: DirectionScheme
    frequencies: tuple[float, ...]
    sample_count: int
    mean_total: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequencies", tuple(self.frequencies))
        if len(self.label) != 1 or self.label not in CHARSET:
            raise ValueError(f"label must be one of {CHARSET!r}, got {self.label!r}")
        if len(self.frequencies) != self.scheme.connectivity:
            raise ValueError("frequency vector length must equal connectivity")
        # 1e-6 is the file-format acceptance bound; in-process construction
        # lands within 1e-9 of an exact sum.
        if abs(sum(self.frequencies) - 1.0) > 1e-6:
            raise ValueError("frequencies must sum to 1")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


@dataclass(frozen=True)
class TemplateSet:
    """Immutable labeled reference set; safe to share across threads."""

    scheme: DirectionScheme
    templates: tuple[Template, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "templates", tuple(self.templates))
        for t in self.templates:
            if t.scheme != self.scheme:
                raise ValueError("all templates must share the set's scheme")

    def labels(self) -> list[str]:
        return sorted({t.label for t in self.templates})


@dataclass(frozen=True)
class RecognitionResult:
    """Best match for one character with timing for the matching step."""

    label: str
    distance: float
    runner_up: tuple[str, float] | None
    elapsed: float


@dataclass
class ConfusionMatrix:
    """Counts of (truth, predicted) label pairs."""

    counts: Counter = field(default_factory=Counter)

    def add(self, truth: str, predicted: str, n: int = 1) -> None:
        self.counts[(truth, predicted)] += n

    def total(self) -> int:
        return sum(self.counts.values())

    def correct(self) -> int:
        return sum(n for (t, p), n in self.counts.items() if t == p)

    def accuracy(self) -> float:
        total = self.total()
        return self.correct() / total if total else 0.0

    def off_diagonal(self) -> dict[tuple[str, str], int]:
        return {pair: n for pair, n in self.counts.items() if pair[0] != pair[1] and n > 0}

    def as_nested_dict(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for (t, p), n in sorted(self.counts.items()):
            if n:
                out.setdefault(t, {})[p] = n
        return out


def distance(a: list[float], b: list[float]) -> float:
    """L1 distance between two normalized histograms; at most 2."""
    if len(a) != len(b):
        raise ValueError(f"histogram length mismatch: {len(a)} vs {len(b)}")
    return sum(abs(x - y) for x, y in zip(a, b))


def classify(
    h: CodeHistogram, ts: TemplateSet, raw_totals: bool = False
) -> RecognitionResult:
    """Nearest-template label for a histogram.

    Ties break on the lexicographically smallest label; the runner-up is the
    best-scoring distinct label. With raw_totals the comparison runs on raw
    code counts instead of frequencies, reproducing size-sensitive matching.
    """
    t0 = time.perf_counter()
    if not ts.templates:
        raise ValueError("cannot classify against an empty template set")
    if h.connectivity != ts.scheme.connectivity:
        raise ValueError(
            f"histogram connectivity {h.connectivity} does not match "
            f"template scheme {ts.scheme.connectivity}"
        )
    if raw_totals:
        feats = [float(c) for c in h.counts]
        total = float(h.total)
        if total == 0:
            raise ValueError("cannot classify an empty histogram")
        scored = []
        for t in ts.templates:
            scale = t.mean_total if t.mean_total is not None else total
            scored.append((distance(feats, [f * scale for f in t.frequencies]), t.label))
    else:
        feats = normalize(h)
        scored = [(distance(feats, list(t.frequencies)), t.label) for t in ts.templates]

    best_d, best_label = min(scored)
    runner = None
    others = [(d, lab) for d, lab in scored if lab != best_label]
    if others:
        d2, lab2 = min(others)
        runner = (lab2, d2)
    return RecognitionResult(
        label=best_label,
        distance=best_d,
        runner_up=runner,
        elapsed=time.perf_counter() - t0,
    )


def _glyph_histogram(glyph: BinaryImage, scheme: DirectionScheme, index: int) -> tuple[list[float], int]:
    flat = glyph.pixels.argmax()
    if not glyph.pixels.flat[flat]:
        raise TemplateFormatError(f"glyph {index}: no foreground to trace")
    seed = Pixel(int(flat) // glyph.width, int(flat) % glyph.width)
    try:
        cc = trace_boundary(glyph, seed, scheme)
    except TraceError as exc:
        raise TemplateFormatError(f"glyph {index}: {exc}") from exc
    hist = code_histogram(cc)
    if hist.total == 0:
        raise TemplateFormatError(f"glyph {index}: boundary too small to encode")
    return normalize(hist), hist.total


def build_template(
    label: str, glyphs: list[BinaryImage], scheme: DirectionScheme
) -> Template:
    """Mean normalized histogram of the glyphs' outer boundaries."""
    if not glyphs:
        raise ValueError("at least one glyph is required")
    c = scheme.connectivity
    acc = [0.0] * c
    total_acc = 0
    for i, glyph in enumerate(glyphs):
        freqs, total = _glyph_histogram(glyph, scheme, i)
        acc = [a + f for a, f in zip(acc, freqs)]
        total_acc += total
    n = len(glyphs)
    return Template(
        label=label,
        scheme=scheme,
        frequencies=tuple(a / n for a in acc),
        sample_count=n,
        mean_total=total_acc / n,
    )


def confusion(results: list[tuple[str, RecognitionResult]]) -> ConfusionMatrix:
    """Aggregate (truth, predicted) counts from labeled results."""
    cm = ConfusionMatrix()
    for truth, res in results:
        cm.add(truth, res.label)
    return cm


def format_templates(ts: TemplateSet) -> str:
    """Serialize to the FCCT1 text format.

    Line 1 is ``FCCT1 <connectivity>``; each following line is
    ``<label> <sample_count> <f0> ... <f(c-1)>`` with 17 significant digits
    per frequency, so parsing reproduces the exact float values.
    """
    lines = [f"{TEMPLATE_MAGIC} {ts.scheme.connectivity}"]
    for t in ts.templates:
        freqs = " ".join(f"{f:.16e}" for f in t.frequencies)
        lines.append(f"{t.label} {t.sample_count} {freqs}")
    return "\n".join(lines) + "\n"


def parse_templates(text: str) -> TemplateSet:
    """Parse FCCT1 text; rejects bad magic, field counts, and frequency sums."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TemplateFormatError("empty template file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != TEMPLATE_MAGIC:
        raise TemplateFormatError(f"bad magic line {lines[0]!r}")
    try:
        connectivity = int(head[1])
    except ValueError:
        raise TemplateFormatError(f"bad connectivity {head[1]!r}") from None
    if connectivity not in (4, 8):
        raise TemplateFormatError(f"connectivity must be 4 or 8, got {connectivity}")
    scheme = DirectionScheme(connectivity)
    templates = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != 2 + connectivity:
            raise TemplateFormatError(
                f"line {lineno}: expected {2 + connectivity} fields, got {len(fields)}"
            )
        label = fields[0]
        try:
            sample_count = int(fields[1])
            freqs = tuple(float(f) for f in fields[2:])
        except ValueError:
            raise TemplateFormatError(f"line {lineno}: malformed numeric field") from None
        if abs(sum(freqs) - 1.0) > 1e-6:
            raise TemplateFormatError(
                f"line {lineno}: frequencies sum to {sum(freqs)!r}, not 1"
            )
        try:
            templates.append(
                Template(
                    label=label,
                    scheme=scheme,
                    frequencies=freqs,
                    sample_count=sample_count,
                )
            )
        except ValueError as exc:
            raise TemplateFormatError(f"line {lineno}: {exc}") from None
    return TemplateSet(scheme=scheme, templates=tuple(templates))


def save_templates(ts: TemplateSet, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_templates(ts))


def load_templates(path: str) -> TemplateSet:
    with open(path, "r", encoding="ascii") as fh:
        return parse_templates(fh.read())
