"""Compass (Kirsch) and Sobel gradient operators on luma planes.

Both operators replicate the border pixel outward before applying their 3x3
windows, so output geometry always equals input geometry.  Window products
are accumulated in int32 -- exact for 8-bit input, where no response can
exceed +/-3825 -- and magnitudes and phases are float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frame_io import LumaFrame

DIRECTION_BIN_COUNT = 60
DEGREES_PER_BIN = 6

# Eight compass masks at 45-degree steps.  Index k=1 is the north mask; each
# subsequent mask rotates the {5,5,5,-3,...,-3} ring one position clockwise.
KIRSCH_MASKS = np.array(
    [
        [[5, 5, 5], [-3, 0, -3], [-3, -3, -3]],      # 1: N
        [[5, 5, -3], [5, 0, -3], [-3, -3, -3]],      # 2: NW
        [[5, -3, -3], [5, 0, -3], [5, -3, -3]],      # 3: W
        [[-3, -3, -3], [5, 0, -3], [5, 5, -3]],      # 4: SW
        [[-3, -3, -3], [-3, 0, -3], [5, 5, 5]],      # 5: S
        [[-3, -3, -3], [-3, 0, 5], [-3, 5, 5]],      # 6: SE
        [[-3, -3, 5], [-3, 0, 5], [-3, -3, 5]],      # 7: E
        [[-3, 5, 5], [-3, 0, 5], [-3, -3, -3]],      # 8: NE
    ],
    dtype=np.int32,
)

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int32)
SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.int32)


@dataclass
class GradientField:
    """Per-pixel compass gradient: strongest |response| and winning mask.

    direction_index holds the 1-based mask index; ties go to the lowest index.
    """

    width: int
    height: int
    magnitude: np.ndarray  # float64, (height, width)
    direction_index: np.ndarray  # uint8 in [1, 8], (height, width)


@dataclass
class SobelField:
    """Per-pixel Sobel responses.

    phase is the four-quadrant arctangent of (sy, sx) in degrees, normalised
    to [0, 360); it is computed lazily because several consumers only need
    the raw component sums.  Pixels with sx == sy == 0 have no phase; see
    ``undefined``.
    """

    width: int
    height: int
    sx: np.ndarray  # int32
    sy: np.ndarray  # int32
    magnitude: np.ndarray  # float64
    _phase: np.ndarray | None = field(default=None, repr=False)

    @property
    def undefined(self) -> np.ndarray:
        """Boolean mask of pixels whose direction is undefined."""
        return (self.sx == 0) & (self.sy == 0)

    @property
    def phase(self) -> np.ndarray:
        if self._phase is None:
            self._phase = np.degrees(np.arctan2(self.sy, self.sx)) % 360.0
        return self._phase


def _windows(samples: np.ndarray) -> list[np.ndarray]:
    """The nine 3x3-neighbour views of an edge-replicated plane.

    Returned in row-major window order, matching a mask flattened with
    ``mask.ravel()``.
    """
    padded = np.pad(samples.astype(np.int32), 1, mode="edge")
    h, w = samples.shape
    return [padded[r : r + h, c : c + w] for r in range(3) for c in range(3)]


def _correlate(views: list[np.ndarray], mask: np.ndarray) -> np.ndarray:
    flat = mask.ravel()
    out = np.zeros_like(views[0])
    for view, coeff in zip(views, flat):
        if coeff:
            out += coeff * view
    return out


def kirsch_gradient(frame: LumaFrame) -> GradientField:
    """Strongest absolute response over the eight compass masks, per pixel."""
    views = _windows(frame.samples)
    responses = np.stack([np.abs(_correlate(views, m)) for m in KIRSCH_MASKS])
    # argmax returns the first maximum, giving the lowest mask index on ties.
    winners = np.argmax(responses, axis=0)
    magnitude = np.max(responses, axis=0).astype(np.float64)
    return GradientField(
        width=frame.width,
        height=frame.height,
        magnitude=magnitude,
        direction_index=(winners + 1).astype(np.uint8),
    )


def sobel_gradient(frame: LumaFrame) -> SobelField:
    views = _windows(frame.samples)
    sx = _correlate(views, SOBEL_X)
    sy = _correlate(views, SOBEL_Y)
    magnitude = np.sqrt((sx * sx + sy * sy).astype(np.float64))
    return SobelField(frame.width, frame.height, sx, sy, magnitude)


def quantize_direction(phase_degrees: float) -> int:
    """Map a phase in degrees to one of the 60 six-degree direction bins."""
    return int(np.floor((phase_degrees % 360.0) / DEGREES_PER_BIN)) % DIRECTION_BIN_COUNT


def direction_grid(sobel: SobelField) -> np.ndarray:
    """Quantized direction bin per pixel; -1 where the phase is undefined."""
    bins = np.floor_divide(sobel.phase, DEGREES_PER_BIN).astype(np.int64)
    np.mod(bins, DIRECTION_BIN_COUNT, out=bins)
    bins[sobel.undefined] = -1
    return bins
