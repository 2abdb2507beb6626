"""Temporal detection of distorted frames from per-frame blockiness scores.

A sliding window of scores is summarised by its mean and by its total
(unnormalised) deviation

    sigma_i = sqrt( sum_n (B(n) - M_i)^2 )

and a frame is declared distorted when the deviation RISES sharply relative
to how much the raw score moved between consecutive window positions:

    (sigma_i - sigma_{i-1}) / (B(i) - B(i-1))  >=  beta^2

The numerator is signed on purpose: a distorted frame entering the window
always raises the deviation, whatever direction it pushes the score, while
the later drop when it leaves the window must not re-trigger.  The
denominator keeps its magnitude only (a burst can lower as well as raise
the score) and is floored at ``epsilon`` so a deviation jump against a flat
score still registers.

Windows are centred by default (three previous and three next frames at the
default width of seven).  When the deviation jumps between the windows
centred at i-1 and i, the frame responsible is the newest member of window
i, i.e. frame i + (window-1)/2 -- verdicts are attributed there.  A frame
therefore needs ``window`` predecessors before it can be judged; earlier
frames report ``insufficient-window``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .blockiness import DEFAULT_DELTA, DEFAULT_SCALE, accumulate_buckets, blockiness_measure
from .frame_io import LumaFrame
from .gradient import kirsch_gradient
from .report import DetectionReport, FrameScore

VERDICT_OK = "ok"
VERDICT_DISTORTED = "distorted"
VERDICT_INSUFFICIENT = "insufficient-window"

DEFAULT_BETA = 1.5
DEFAULT_WINDOW = 7
DEFAULT_EPSILON = 1e-6


@dataclass
class DetectionConfig:
    beta: float = DEFAULT_BETA
    window: int = DEFAULT_WINDOW
    epsilon: float = DEFAULT_EPSILON
    causal: bool = False  # trailing windows; verdicts need no lookahead

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("window must be positive")
        if not self.causal and self.window % 2 == 0:
            raise ValueError("centred mode needs an odd window width")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass
class ScoreWindow:
    """The blockiness scores inside one analysis window."""

    entries: list[float]

    def __len__(self) -> int:
        return len(self.entries)


def window_stats(window: ScoreWindow) -> tuple[float, float]:
    """(mean, total deviation) of a window; deviation is unnormalised."""
    if not window.entries:
        raise ValueError("empty score window")
    mean = sum(window.entries) / len(window.entries)
    return mean, math.sqrt(sum((b - mean) ** 2 for b in window.entries))


def is_distorted(
    curr: tuple[float, float],
    prev: tuple[float, float],
    cfg: DetectionConfig,
) -> str:
    """Verdict for the (score, deviation) pair ``curr`` against ``prev``."""
    (b_curr, sigma_curr), (b_prev, sigma_prev) = curr, prev
    denominator = max(abs(b_curr - b_prev), cfg.epsilon)
    ratio = (sigma_curr - sigma_prev) / denominator
    return VERDICT_DISTORTED if ratio >= cfg.beta**2 else VERDICT_OK


def frame_scores(
    frames: Iterable[LumaFrame],
    delta: int = DEFAULT_DELTA,
    scale: float = DEFAULT_SCALE,
    clip_margin: int = 0,
) -> list[float]:
    """Blockiness score per frame, in stream order."""
    scores = []
    for frame in frames:
        buckets = accumulate_buckets(kirsch_gradient(frame), delta=delta, clip_margin=clip_margin)
        scores.append(blockiness_measure(buckets, scale=scale).value)
    return scores


def detect_sequence(
    frames: Iterable[LumaFrame],
    cfg: DetectionConfig | None = None,
    *,
    delta: int = DEFAULT_DELTA,
    scale: float = DEFAULT_SCALE,
    clip_margin: int = 0,
) -> DetectionReport:
    """Score every frame and mark the distorted ones.

    Deterministic: the same frames and configuration always produce an
    identical report.  A frame's verdict depends only on the window+1
    scores ending at it, so verdicts already issued never change when more
    frames are appended; only the centred per-row statistics within half a
    window of the end do.
    """
    cfg = cfg or DetectionConfig()
    scores = frame_scores(frames, delta=delta, scale=scale, clip_margin=clip_margin)
    n = len(scores)
    half = 0 if cfg.causal else (cfg.window - 1) // 2

    # Window stats, indexed by window centre (trailing: by newest member).
    stats: dict[int, tuple[float, float]] = {}
    for centre in range(n):
        lo = centre - cfg.window + 1 if cfg.causal else centre - half
        hi = centre if cfg.causal else centre + half
        if lo >= 0 and hi < n:
            stats[centre] = window_stats(ScoreWindow(scores[lo : hi + 1]))

    rows = []
    for j in range(n):
        verdict = VERDICT_INSUFFICIENT
        centre = j - half  # window whose newest member is frame j
        if centre in stats and centre - 1 in stats:
            verdict = is_distorted(
                (scores[centre], stats[centre][1]),
                (scores[centre - 1], stats[centre - 1][1]),
                cfg,
            )
        own = stats.get(j)
        rows.append(
            FrameScore(
                frame_index=j,
                b_msr=scores[j],
                window_mean=None if own is None else own[0],
                window_stddev=None if own is None else own[1],
                verdict=verdict,
            )
        )
    config = {
        "beta": float(cfg.beta),
        "window": cfg.window,
        "epsilon": float(cfg.epsilon),
        "causal": cfg.causal,
        "delta": delta,
        "scale": float(scale),
        "clip_margin": clip_margin,
    }
    return DetectionReport(per_frame=rows, config=config)


@dataclass
class PrMetrics:
    """Set comparison of detected frames against ground truth."""

    true_positives: int
    false_positives: int
    missed: int

    @property
    def precision(self) -> float:
        hits = self.true_positives + self.false_positives
        return 1.0 if hits == 0 else self.true_positives / hits

    @property
    def recall(self) -> float:
        actual = self.true_positives + self.missed
        return 1.0 if actual == 0 else self.true_positives / actual

    @property
    def efficiency(self) -> float:
        return (self.precision + self.recall) / 2.0


def evaluate_detection(detected: set[int], truth: set[int]) -> PrMetrics:
    detected, truth = set(detected), set(truth)
    return PrMetrics(
        true_positives=len(detected & truth),
        false_positives=len(detected - truth),
        missed=len(truth - detected),
    )
