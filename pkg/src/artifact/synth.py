"""Synthetic frames with known artifacts, for calibration and testing.

Noise is produced by a counter-based splitmix64 stream (documented below)
rather than a stateful RNG, so any implementation in any language can
reproduce a corpus bit-for-bit from (seed, tag, index).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .frame_io import LumaFrame

PATTERN_KINDS = ("block-grid", "stripes", "checkerboard", "burst-noise")

DEFAULT_NOISE_AMPLITUDE = 2
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@dataclass
class PatternSpec:
    """One synthetic distortion pattern.

    kind: "block-grid" (vertical block boundaries every period/2 columns),
    "stripes" (oriented grating), "checkerboard" (two-dimensional block
    alternation with full spatial period ``period`` per axis), or
    "burst-noise" (dense random overlay).
    phase: column anchor of the grid/stripe pattern.
    orientation: stripe angle in degrees, 0 = horizontal stripes, 90 =
    vertical; only meaningful for kind="stripes" and folded to [0, 90].
    amplitude: peak intensity excursion added to the base frame.
    """

    kind: str = "block-grid"
    period: int = 16
    phase: int = 0
    orientation: float = 0.0
    amplitude: int = 64

    def __post_init__(self) -> None:
        if self.kind not in PATTERN_KINDS:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if self.period < 2:
            raise ValueError("pattern period must be at least 2")
        if not 0.0 <= self.orientation <= 90.0:
            raise ValueError("orientation must lie in [0, 90] degrees")
        if self.amplitude < 0:
            raise ValueError("amplitude cannot be negative")


# --- deterministic noise ---------------------------------------------------


def _fnv1a64(text: str) -> np.uint64:
    value = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        value = ((value ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return np.uint64(value)


def _splitmix64(state: np.ndarray) -> np.ndarray:
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def noise_units(seed: int, tag: str, count: int) -> np.ndarray:
    """``count`` reproducible uniform floats in [0, 1).

    Entry i of stream (seed, tag) is splitmix64 applied to
    seed*golden + fnv1a64(tag) + (i+1)*golden, all modulo 2**64.
    """
    base = ((seed & 0xFFFFFFFFFFFFFFFF) * int(_GOLDEN) + int(_fnv1a64(tag))) & 0xFFFFFFFFFFFFFFFF
    with np.errstate(over="ignore"):
        counters = np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN + np.uint64(base)
        words = _splitmix64(counters)
    return words.astype(np.float64) / float(2**64)


def noise_field(seed: int, tag: str, shape: tuple[int, int], amplitude: int) -> np.ndarray:
    """Integer noise in [-amplitude, +amplitude], shaped (rows, cols)."""
    units = noise_units(seed, tag, shape[0] * shape[1])
    span = 2 * amplitude + 1
    return (np.floor(units * span) - amplitude).astype(np.int64).reshape(shape)


# --- pattern rendering ------------------------------------------------------


def _blockgrid_overlay(spec: PatternSpec, shape: tuple[int, int]) -> np.ndarray:
    # Bright bands anchored on the phase column.  The rising edge carries a
    # half-amplitude shoulder so the compass response peaks on the anchor
    # column itself instead of straddling two columns; the falling edge is
    # tapered over two columns (2/3, 1/3) so its response stays strictly
    # below the anchor's and the bucket argmax is unambiguous at any period.
    height, width = shape
    half = spec.period // 2
    if half < 2:
        raise ValueError("block-grid needs a period of at least 4")
    rel = (np.arange(width) - spec.phase) % spec.period
    weights = np.zeros(width)
    weights[rel == 0] = 0.5
    weights[(rel >= 1) & (rel <= half - 2)] = 1.0
    weights[rel == half - 1] = 2.0 / 3.0
    weights[rel == half] = 1.0 / 3.0
    row = np.round(spec.amplitude * weights).astype(np.int64)
    return np.tile(row, (height, 1))


def _stripe_overlay(spec: PatternSpec, shape: tuple[int, int]) -> np.ndarray:
    # The grating normal is snapped to the centre of a 6-degree direction
    # bin (round-half-even on (90 - orientation)/6), so the measured Sobel
    # phases sit mid-bin and quantize unambiguously.
    height, width = shape
    bin_index = int(np.clip(np.round((90.0 - spec.orientation) / 6.0), 0, 15))
    normal = np.radians(6 * bin_index + 3)
    cols = np.arange(width) + 0.5
    rows = np.arange(height) + 0.5
    projection = np.cos(normal) * cols[None, :] + np.sin(normal) * rows[:, None]
    wave = np.sin(2.0 * np.pi * (projection - spec.phase) / spec.period)
    return np.round(spec.amplitude * 0.5 * wave).astype(np.int64)


def _checkerboard_overlay(spec: PatternSpec, shape: tuple[int, int]) -> np.ndarray:
    height, width = shape
    half = spec.period // 2
    if half < 1 or spec.period % 2:
        raise ValueError("checkerboard needs an even period")
    cell_c = (np.arange(width) - spec.phase) // half
    cell_r = (np.arange(height) - spec.phase) // half
    parity = (cell_r[:, None] + cell_c[None, :]) % 2
    return np.where(parity == 0, spec.amplitude // 2, -(spec.amplitude // 2)).astype(np.int64)


def inject_block_pattern(base: LumaFrame, spec: PatternSpec, seed: int = 0) -> LumaFrame:
    """A copy of ``base`` with the pattern overlay added (clamped to uint8)."""
    shape = (base.height, base.width)
    if spec.kind == "block-grid":
        overlay = _blockgrid_overlay(spec, shape)
    elif spec.kind == "stripes":
        overlay = _stripe_overlay(spec, shape)
    elif spec.kind == "checkerboard":
        overlay = _checkerboard_overlay(spec, shape)
    else:
        overlay = noise_field(seed, "burst", shape, spec.amplitude)
    mixed = np.clip(base.samples.astype(np.int64) + overlay, 0, 255)
    return LumaFrame(base.width, base.height, mixed.astype(np.uint8), base.frame_index)


def pattern_frame(
    spec: PatternSpec,
    width: int,
    height: int,
    base_level: int = 128,
    frame_index: int = 0,
) -> LumaFrame:
    """The pattern rendered over a flat field -- a clean calibration target."""
    base = LumaFrame(width, height, np.full((height, width), base_level, dtype=np.uint8), frame_index)
    return inject_block_pattern(base, spec)


# --- sequences --------------------------------------------------------------


def base_scene(
    width: int,
    height: int,
    seed: int,
    noise_amplitude: int = DEFAULT_NOISE_AMPLITUDE,
) -> np.ndarray:
    """The shared clean-frame content: a gentle ramp plus frozen noise.

    The noise texture is drawn once per seed and reused for every clean
    frame, so an undistorted sequence is a run of identical frames and its
    temporal statistics are exactly flat.
    """
    rows = np.linspace(0.0, 24.0, height)[:, None]
    cols = np.linspace(0.0, 12.0, width)[None, :]
    ramp = 96.0 + rows + cols
    noise = noise_field(seed, "scene", (height, width), noise_amplitude)
    return np.clip(np.round(ramp) + noise, 0, 255).astype(np.uint8)


def make_test_sequence(
    length: int,
    distorted: set[int],
    spec: PatternSpec | None = None,
    seed: int = 0,
    width: int = 64,
    height: int = 64,
    noise_amplitude: int = DEFAULT_NOISE_AMPLITUDE,
) -> tuple[list[LumaFrame], set[int]]:
    """A sequence of clean frames with the pattern injected at ``distorted``.

    Returns the frames and the ground-truth set (indices clipped to range).
    Fully reproducible: same arguments, same bytes.
    """
    spec = spec or PatternSpec()
    truth = {index for index in distorted if 0 <= index < length}
    scene = base_scene(width, height, seed, noise_amplitude)
    frames = []
    for index in range(length):
        frame = LumaFrame(width, height, scene.copy(), index)
        if index in truth:
            frame = inject_block_pattern(frame, spec, seed=seed ^ index)
        frames.append(frame)
    return frames, truth


# --- persistence -------------------------------------------------------------


def save_corpus(
    frames: list[LumaFrame],
    truth: set[int],
    out_prefix: str | Path,
    extra: dict | None = None,
) -> tuple[Path, Path]:
    """Write frames as headerless luma-only YUV plus a JSON sidecar.

    The sidecar records geometry, layout, and the ground-truth distorted
    frame indices; ``evaluate`` consumes it directly.
    """
    if not frames:
        raise ValueError("cannot persist an empty corpus")
    prefix = Path(out_prefix)
    yuv_path = prefix.with_suffix(".yuv")
    sidecar_path = prefix.with_suffix(".json")
    with open(yuv_path, "wb") as handle:
        for frame in frames:
            handle.write(frame.samples.tobytes())
    sidecar = {
        "width": frames[0].width,
        "height": frames[0].height,
        "length": len(frames),
        "pixel_layout": "y-only",
        "distorted": sorted(truth),
    }
    if extra:
        sidecar.update(extra)
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return yuv_path, sidecar_path


def read_ground_truth(path: str | Path) -> set[int]:
    """Distorted-frame indices from a sidecar JSON or a plain index list.

    Plain-text files hold one frame index per line (blank lines ignored).
    """
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return set(json.loads(text)["distorted"])
    return {int(line) for line in text.splitlines() if line.strip()}
