"""Spatial analysis of error blocks: direction statistics, block class,
pattern orientation, and pattern periodicity.

Everything here consumes Sobel fields.  Pixel directions are quantized into
sixty 6-degree bins; most routines reason about bins, their 90-degree
families {s, s+15, s+30, s+45}, and per-bin vector sums of the raw Sobel
components (the EMS table).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from .frame_io import LumaFrame
from .gradient import (
    DEGREES_PER_BIN,
    DIRECTION_BIN_COUNT,
    SobelField,
    direction_grid,
    sobel_gradient,
)
from .report import BlockSummary

QUADRANT_BINS = DIRECTION_BIN_COUNT // 4  # 15 bins per quadrant
DEFAULT_TH_FIX = 0.2  # dominance margin, as a fraction of the peak EMS
DEFAULT_EMS_FLOOR = 1.0  # below this no bin counts as dominant
DEFAULT_TEXTURE_COUNT = 6
PEAK_TOLERANCE = 0.9  # re-peak must reach 90% of perfect alignment
DIP_THRESHOLD = 0.5  # ...after the score first fell below this

CLASS_UNIFORM = "uniform"
CLASS_EDGE = "edge"
CLASS_TEXTURE = "texture"

REGION_ROLES = ("mb", "left", "top", "right", "bottom",
                "top-left", "top-right", "bottom-left", "bottom-right")


@dataclass
class BlockRegion:
    """A rectangular pixel region and its role relative to a macroblock."""

    origin: tuple[int, int]  # (row, col)
    size: tuple[int, int]  # (rows, cols)
    role: str = "mb"

    def __post_init__(self) -> None:
        if self.role not in REGION_ROLES:
            raise ValueError(f"unknown region role {self.role!r}")
        if min(self.size) < 1:
            raise ValueError("region must be at least 1x1")

    def slices(self) -> tuple[slice, slice]:
        r, c = self.origin
        n, m = self.size
        return slice(r, r + n), slice(c, c + m)


def _region_view(array: np.ndarray, region: BlockRegion | None) -> np.ndarray:
    if region is None:
        return array
    rows, cols = region.slices()
    if rows.stop > array.shape[0] or cols.stop > array.shape[1]:
        raise ValueError("region extends past the frame")
    return array[rows, cols]


# --- EMS accumulation and block classification ---------------------------


@dataclass
class EmsTable:
    """Per-bin vector sums of Sobel components over a region.

    ems[k] = |(sum of sx, sum of sy)| over pixels whose direction fell in
    bin k.  Within one 6-degree bin the components are nearly collinear, so
    the vector norm is close to the summed magnitudes of the member pixels.
    """

    ems_x: np.ndarray  # float64[60]
    ems_y: np.ndarray  # float64[60]

    @property
    def ems(self) -> np.ndarray:
        return np.sqrt(self.ems_x**2 + self.ems_y**2)


@dataclass
class GdvTable:
    """Per-bin resultant direction (degrees) and dominance flags."""

    gdv: np.ndarray  # float64[60]; NaN where the bin holds no mass
    dominant: np.ndarray  # bool[60]


def accumulate_ems(sobel: SobelField, region: BlockRegion | None = None) -> EmsTable:
    bins = _region_view(direction_grid(sobel), region).ravel()
    sx = _region_view(sobel.sx, region).ravel().astype(np.float64)
    sy = _region_view(sobel.sy, region).ravel().astype(np.float64)
    defined = bins >= 0
    ems_x = np.bincount(bins[defined], weights=sx[defined], minlength=DIRECTION_BIN_COUNT)
    ems_y = np.bincount(bins[defined], weights=sy[defined], minlength=DIRECTION_BIN_COUNT)
    return EmsTable(ems_x=ems_x, ems_y=ems_y)


def _dominance_threshold(ems: np.ndarray, th_fix: float, ems_floor: float) -> float:
    peak = float(ems.max(initial=0.0))
    return max(peak - th_fix * peak, ems_floor)


def gdv_table(
    table: EmsTable,
    th_fix: float = DEFAULT_TH_FIX,
    ems_floor: float = DEFAULT_EMS_FLOOR,
) -> GdvTable:
    ems = table.ems
    gdv = np.full(DIRECTION_BIN_COUNT, np.nan)
    held = ems > 0
    gdv[held] = np.degrees(np.arctan2(table.ems_y[held], table.ems_x[held])) % 360.0
    return GdvTable(gdv=gdv, dominant=ems >= _dominance_threshold(ems, th_fix, ems_floor))


def classify_block(
    table: EmsTable,
    hist: "DirectionHistogram",
    th_fix: float = DEFAULT_TH_FIX,
    texture_count: int = DEFAULT_TEXTURE_COUNT,
    ems_floor: float = DEFAULT_EMS_FLOOR,
) -> str:
    """uniform / edge / texture by how many direction bins are dominant.

    A bin is dominant when its EMS reaches both the relative threshold
    (peak minus th_fix of the peak) and the absolute floor; a region with
    no defined directions at all is uniform regardless.
    """
    if hist.total == 0:
        return CLASS_UNIFORM
    ems = table.ems
    dominant = int(np.count_nonzero(ems >= _dominance_threshold(ems, th_fix, ems_floor)))
    if dominant == 0:
        return CLASS_UNIFORM
    if dominant < texture_count:
        return CLASS_EDGE
    return CLASS_TEXTURE


# --- direction histograms -------------------------------------------------


@dataclass
class DirectionHistogram:
    """Counts of quantized pixel directions.

    total is the number of pixels counted; for a reduced histogram that is
    the number of pixels landing in the kept bins.
    """

    bins: np.ndarray  # int64[60]
    total: int


def family_bins(orientation: int) -> np.ndarray:
    """The twelve bins kept around the four quadrant arms of ``orientation``.

    For each significant bin {s, s+15, s+30, s+45} the bin itself and both
    circular neighbours are kept.
    """
    s = orientation % QUADRANT_BINS
    kept = {
        (s + j + QUADRANT_BINS * q) % DIRECTION_BIN_COUNT
        for q in range(4)
        for j in (-1, 0, 1)
    }
    return np.array(sorted(kept), dtype=np.int64)


SIGNIFICANT_BINS_DEFAULT = family_bins(0)  # {59,0,1, 14,15,16, 29,30,31, 44,45,46}

# Tangents of the kept-bin boundaries around each family axis.  The kept
# bins span [-6, +12) degrees per axis; the pre-filter ratio 7/32 = 0.21875
# sits strictly between tan(12) and tan(12.5), so the filter stays a strict
# superset of the kept span while the test runs in integer arithmetic.
_TAN6 = float(np.tan(np.radians(6.0)))
_TAN12 = float(np.tan(np.radians(12.0)))
_SLACK_NUM = 7
_SLACK_DEN = 32


def _arm_bins(u: np.ndarray, v: np.ndarray, swap: np.ndarray,
              mx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quantized bins for components already near a quadrant arm.

    ``swap`` marks components whose dominant axis is vertical, ``mx`` is the
    dominant absolute component.  Works off tangent comparisons alone -- no
    arctangent.  Integer gradients never fall exactly on a 6-degree
    boundary (the tangents are irrational), so this agrees bit-for-bit with
    quantizing the arctangent.  Returns ``(bins, kept)`` where ``kept``
    flags the pixels inside the [-6, +12) span of their arm; bins are only
    meaningful under ``kept``.
    """
    # Signed perpendicular offset from the arm, with the sign of the
    # dominant ("along") component factored out so the arm angle grows with
    # positive offset on every arm.
    along_neg = np.where(swap, v < 0, u < 0)
    perp = np.where(swap, -u, v)
    np.negative(perp, where=along_neg, out=perp)
    p6 = mx * _TAN6
    kept = (perp >= -p6) & (perp < mx * _TAN12)
    arm = 2 * along_neg + swap
    off = np.subtract(perp >= p6, perp < 0, dtype=np.int64)
    return QUADRANT_BINS * arm + off, kept


def direction_histogram(
    sobel: SobelField,
    region: BlockRegion | None = None,
    family: int | None = None,
) -> DirectionHistogram:
    """Histogram of quantized directions over a region.

    With ``family`` set, only the twelve bins of ``family_bins(family)``
    are accumulated, and the arctangent is skipped entirely: a cheap
    component-ratio test drops every pixel that cannot land in a kept bin,
    and the survivors are binned by tangent comparisons.  Kept bins match
    the full histogram exactly.
    """
    if family is None:
        bins = _region_view(direction_grid(sobel), region).ravel()
        counts = np.bincount(bins[bins >= 0], minlength=DIRECTION_BIN_COUNT)
        return DirectionHistogram(bins=counts, total=int(counts.sum()))

    s = family % QUADRANT_BINS
    ui = _region_view(sobel.sx, region).ravel()
    vi = _region_view(sobel.sy, region).ravel()
    axis_counts = None
    if s:
        # Pixels lying exactly on a coordinate axis would land exactly on a
        # rotated bin boundary, where float rounding could tip them either
        # way.  Count them here with exact integer tests and drop them from
        # the rotated classifier.  Their bins (0, 15, 30, 45) are only kept
        # by the families adjacent to an axis.
        on_axis = (ui == 0) | (vi == 0)
        if s in (1, QUADRANT_BINS - 1):
            axis_counts = (
                int(np.count_nonzero((vi == 0) & (ui > 0))),
                int(np.count_nonzero((ui == 0) & (vi > 0))),
                int(np.count_nonzero((vi == 0) & (ui < 0))),
                int(np.count_nonzero((ui == 0) & (vi < 0))),
            )
        # Rotate so the family axes align with the coordinate axes; the
        # family-0 classifier then applies unchanged.
        theta = np.radians(s * DEGREES_PER_BIN)
        u = ui * np.cos(theta) + vi * np.sin(theta)
        v = vi * np.cos(theta) - ui * np.sin(theta)
    else:
        u, v = ui, vi
    au, av = np.abs(u), np.abs(v)
    swap = au < av
    mx = np.maximum(au, av)
    near_axis = np.minimum(au, av) * _SLACK_DEN <= mx * _SLACK_NUM
    if s:
        near_axis &= ~on_axis
    else:
        near_axis &= mx > 0
    idx = np.flatnonzero(near_axis)
    labels, kept = _arm_bins(u.take(idx), v.take(idx), swap.take(idx),
                             mx.take(idx))
    final = (labels[kept] + s) % DIRECTION_BIN_COUNT
    counts = np.bincount(final, minlength=DIRECTION_BIN_COUNT)
    if axis_counts is not None:
        counts[0] += axis_counts[0]
        counts[QUADRANT_BINS] += axis_counts[1]
        counts[2 * QUADRANT_BINS] += axis_counts[2]
        counts[3 * QUADRANT_BINS] += axis_counts[3]
    return DirectionHistogram(bins=counts, total=int(counts.sum()))


def reduce_bins(hist: DirectionHistogram, orientation: int | None = None) -> DirectionHistogram:
    """Zero every bin outside the significant set (default: family 0)."""
    kept = family_bins(0 if orientation is None else orientation)
    bins = np.zeros_like(hist.bins)
    bins[kept] = hist.bins[kept]
    return DirectionHistogram(bins=bins, total=int(bins.sum()))


# --- uniform block estimation ---------------------------------------------

_LEFT_SUBSTITUTES = ("top-left", "bottom-left")
_RIGHT_SUBSTITUTES = ("top-right", "bottom-right")


def estimate_uniform_block(
    neighbors: dict[str, np.ndarray | None],
    size: tuple[int, int],
) -> np.ndarray:
    """Imitate a lost block from its neighbours.

    Two imitations are formed when possible -- top/bottom (upper rows copied
    from the top neighbour, lower rows from the bottom one) and left/right
    (likewise by columns) -- and averaged.  For odd sizes the extra row or
    column goes to the first half.  A missing side neighbour may be stood in
    for by the diagonal neighbours on the same side; if only one imitation
    can be formed it is returned alone, and with no usable neighbours at all
    a ValueError is raised.
    """
    n, m = size
    grids: dict[str, np.ndarray] = {}
    for role, grid in neighbors.items():
        if role not in REGION_ROLES or role == "mb":
            raise ValueError(f"unknown neighbour role {role!r}")
        if grid is None:
            continue
        grid = np.asarray(grid, dtype=np.float64)
        if grid.shape != (n, m):
            raise ValueError(f"{role} neighbour shape {grid.shape} != block size {(n, m)}")
        grids[role] = grid

    def side(role: str, substitutes: tuple[str, ...]) -> np.ndarray | None:
        if role in grids:
            return grids[role]
        stand_ins = [grids[s] for s in substitutes if s in grids]
        if stand_ins:
            return np.mean(stand_ins, axis=0)
        return None

    imitations = []
    top, bottom = side("top", ()), side("bottom", ())
    if top is not None and bottom is not None:
        tb = np.empty((n, m))
        split = ceil(n / 2)
        tb[:split] = top[:split]
        tb[split:] = bottom[split:]
        imitations.append(tb)
    left = side("left", _LEFT_SUBSTITUTES)
    right = side("right", _RIGHT_SUBSTITUTES)
    if left is not None and right is not None:
        lr = np.empty((n, m))
        split = ceil(m / 2)
        lr[:, :split] = left[:, :split]
        lr[:, split:] = right[:, split:]
        imitations.append(lr)
    if not imitations:
        raise ValueError("no usable neighbours to imitate the block from")
    return np.mean(imitations, axis=0)


# --- pattern orientation ----------------------------------------------------


@dataclass
class PatternOrientation:
    """Dominant direction family of a histogram.

    high_bin is in [0, 15]: the winning 15-shift family, except that a
    family-0 histogram whose mass sits on the 90-degree arm reports bin 15
    (offset 0) rather than bin 0 (offset 90).
    """

    high_bin: int
    offset_degrees: int
    significant_bins: tuple[int, int, int, int]
    shift_scores: np.ndarray  # float64[15]


def default_rotation_mask() -> np.ndarray:
    """Indicator mask picking one bin per quadrant arm."""
    mask = np.zeros(QUADRANT_BINS)
    mask[0] = 1.0
    return mask


def rotation_offset(
    hist: DirectionHistogram,
    mask: np.ndarray | None = None,
) -> PatternOrientation | None:
    """Best of the fifteen circular shifts of the quadrant mask.

    Returns None when the histogram is empty (no orientation).  The offset
    is 90 - 6 * high_bin degrees; orientations are folded into [0, 90], the
    domain of the synthetic patterns this is calibrated against.
    """
    counts = hist.bins.astype(np.float64)
    if not counts.any():
        return None
    mask = default_rotation_mask() if mask is None else np.asarray(mask, dtype=np.float64)
    if mask.shape != (QUADRANT_BINS,):
        raise ValueError(f"rotation mask must have {QUADRANT_BINS} entries")
    scores = np.zeros(QUADRANT_BINS)
    for s in range(QUADRANT_BINS):
        for j in np.flatnonzero(mask):
            idx = (s + j + QUADRANT_BINS * np.arange(4)) % DIRECTION_BIN_COUNT
            scores[s] += mask[j] * counts[idx].sum()
    family = int(np.argmax(scores))  # lowest shift wins ties
    high_bin = family
    if family == 0:
        # Same family, quarter-turn apart: decide with the half-turn pairs.
        arm_0 = counts[0] + counts[30]
        arm_90 = counts[15] + counts[45]
        if arm_90 > arm_0:
            high_bin = QUADRANT_BINS
    significant = tuple(
        int((high_bin + QUADRANT_BINS * q) % DIRECTION_BIN_COUNT) for q in range(4)
    )
    return PatternOrientation(
        high_bin=high_bin,
        offset_degrees=90 - DEGREES_PER_BIN * high_bin,
        significant_bins=significant,
        shift_scores=scores,
    )


# --- pattern matching and dimensions ---------------------------------------


@dataclass
class MatchResult:
    """Direction-grid agreement between a grid and its displaced copy."""

    score: int  # overlap pixels whose bins are equal
    sum_histogram: np.ndarray  # int64[119], histogram of bin-index sums
    base_defined: int  # direction-defined base pixels inside the overlap


@dataclass
class PatternGeometry:
    period_width: int | None
    period_height: int | None
    width_scores: np.ndarray  # match fraction per horizontal shift (1-based)
    height_scores: np.ndarray


def matching_score(grid: np.ndarray, dx: int = 0, dy: int = 0) -> MatchResult:
    """Compare a quantized-direction grid against itself displaced by (dx, dy).

    Undefined directions (entries < 0) never match.  The sum histogram
    counts D_base + D_shifted over pixels where both are defined, so its
    mass can never pass bin 118.
    """
    h, w = grid.shape
    if abs(dx) >= w or abs(dy) >= h:
        raise ValueError(f"displacement ({dx}, {dy}) leaves no overlap on {h}x{w}")

    def spans(offset: int, extent: int) -> tuple[slice, slice]:
        if offset >= 0:
            return slice(offset, extent), slice(0, extent - offset)
        return slice(0, extent + offset), slice(-offset, extent)

    rows_a, rows_b = spans(dy, h)
    cols_a, cols_b = spans(dx, w)
    a = grid[rows_a, cols_a]
    b = grid[rows_b, cols_b]
    both = (a >= 0) & (b >= 0)
    score = int(np.count_nonzero(both & (a == b)))
    sums = (a[both] + b[both]).astype(np.int64)
    histogram = np.bincount(sums, minlength=2 * DIRECTION_BIN_COUNT - 1)
    return MatchResult(
        score=score,
        sum_histogram=histogram,
        base_defined=int(np.count_nonzero(a >= 0)),
    )


def _axis_period(grid: np.ndarray, max_shift: int, horizontal: bool) -> tuple[int | None, np.ndarray]:
    fractions = np.zeros(max_shift)
    for shift in range(1, max_shift + 1):
        result = matching_score(grid, dx=shift if horizontal else 0, dy=0 if horizontal else shift)
        if result.base_defined:
            fractions[shift - 1] = result.score / result.base_defined
    period = None
    dipped = False
    for shift in range(1, max_shift + 1):
        value = fractions[shift - 1]
        if dipped and value >= PEAK_TOLERANCE:
            # Walk up to the apex so a near-period shoulder is not reported.
            while shift < max_shift and fractions[shift] > fractions[shift - 1]:
                shift += 1
            period = shift
            break
        if value < DIP_THRESHOLD:
            dipped = True
    return period, fractions


def pattern_dimensions(grid: np.ndarray, max_shift: int | None = None) -> PatternGeometry:
    """Smallest displacement per axis at which the grid realigns with itself.

    The per-shift score is the matching count normalised by the defined
    base pixels in the overlap, so 1.0 means perfect realignment at any
    shift.  A period requires the score to fall below DIP_THRESHOLD and
    then recover to PEAK_TOLERANCE; a curve that never falls (patterns
    uniform along the axis) yields None for that axis.
    """
    h, w = grid.shape
    if max_shift is None:
        max_shift = min(h, w) // 2
    if not 0 < max_shift < min(h, w):
        raise ValueError(f"max_shift {max_shift} out of range for {h}x{w} grid")
    period_width, width_scores = _axis_period(grid, max_shift, horizontal=True)
    period_height, height_scores = _axis_period(grid, max_shift, horizontal=False)
    return PatternGeometry(
        period_width=period_width,
        period_height=period_height,
        width_scores=width_scores,
        height_scores=height_scores,
    )


def analyze_frame(
    frame: LumaFrame,
    th_fix: float = DEFAULT_TH_FIX,
    texture_count: int = DEFAULT_TEXTURE_COUNT,
    ems_floor: float = DEFAULT_EMS_FLOOR,
    max_shift: int | None = None,
) -> BlockSummary:
    """Whole-frame spatial summary: class, orientation, pattern periods."""
    sobel = sobel_gradient(frame)
    ems = accumulate_ems(sobel)
    hist = direction_histogram(sobel)
    block_class = classify_block(ems, hist, th_fix=th_fix,
                                 texture_count=texture_count, ems_floor=ems_floor)
    orientation = rotation_offset(hist)
    geometry = pattern_dimensions(direction_grid(sobel), max_shift)
    return BlockSummary(
        frame_index=frame.frame_index,
        block_class=block_class,
        orientation_degrees=None if orientation is None else orientation.offset_degrees,
        period_height=geometry.period_height,
        period_width=geometry.period_width,
    )
