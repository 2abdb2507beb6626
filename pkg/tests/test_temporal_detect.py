"""Window statistics, the firing rule, and whole-sequence detection."""

import math

import numpy as np
import pytest

from artifact.frame_io import LumaFrame
from artifact.synth import PatternSpec, make_test_sequence, noise_field
from artifact.temporal_detect import (
    DetectionConfig,
    ScoreWindow,
    VERDICT_DISTORTED,
    VERDICT_INSUFFICIENT,
    VERDICT_OK,
    detect_sequence,
    evaluate_detection,
    frame_scores,
    is_distorted,
    window_stats,
)


def test_window_stats_exact_cases():
    assert window_stats(ScoreWindow([5.0, 5.0, 5.0])) == (5.0, 0.0)
    mean, sigma = window_stats(ScoreWindow([0.0, 10.0]))
    assert mean == 5.0
    assert sigma == pytest.approx(math.sqrt(50.0), rel=1e-15)


def test_window_stats_matches_numpy_oracle():
    rng = np.random.default_rng(31)
    for _ in range(25):
        values = rng.uniform(-50, 50, size=rng.integers(1, 12))
        mean, sigma = window_stats(ScoreWindow(list(values)))
        assert mean == pytest.approx(values.mean(), rel=1e-12)
        # unnormalised: no 1/N under the root
        assert sigma == pytest.approx(
            math.sqrt(((values - values.mean()) ** 2).sum()), rel=1e-12
        )


def test_window_stats_rejects_empty():
    with pytest.raises(ValueError):
        window_stats(ScoreWindow([]))


def test_firing_rule_worked_cases():
    cfg = DetectionConfig(beta=2.0)
    # deviation jumps by 100 while the score moves by 1: 100 >= 4
    assert is_distorted((10.0, 107.0), (9.0, 7.0), cfg) == VERDICT_DISTORTED
    # deviation falls: never fires, no matter how large the drop
    assert is_distorted((9.0, 7.0), (10.0, 107.0), cfg) == VERDICT_OK
    # flat everything
    assert is_distorted((5.0, 1.0), (5.0, 1.0), cfg) == VERDICT_OK
    # epsilon floors the denominator: tiny sigma rise against a flat score
    assert is_distorted((5.0, 1.001), (5.0, 1.0), cfg) == VERDICT_DISTORTED
    # exact threshold fires (>=)
    cfg = DetectionConfig(beta=1.5)
    assert is_distorted((1.0, 2.25), (0.0, 0.0), cfg) == VERDICT_DISTORTED


def test_firing_rule_is_one_directional():
    # The signed numerator means a pair can fire in at most one direction.
    rng = np.random.default_rng(32)
    cfg = DetectionConfig()
    for _ in range(200):
        curr = (rng.uniform(-10, 10), rng.uniform(0, 20))
        prev = (rng.uniform(-10, 10), rng.uniform(0, 20))
        forward = is_distorted(curr, prev, cfg)
        backward = is_distorted(prev, curr, cfg)
        assert not (forward == VERDICT_DISTORTED and backward == VERDICT_DISTORTED)


def test_identical_frames_are_never_distorted():
    frames, _ = make_test_sequence(length=20, distorted=set(), seed=4)
    report = detect_sequence(frames)
    verdicts = [row.verdict for row in report.per_frame]
    assert verdicts[:7] == [VERDICT_INSUFFICIENT] * 7
    assert all(v == VERDICT_OK for v in verdicts[7:])


def test_short_sequence_is_all_insufficient():
    frames, _ = make_test_sequence(length=5, distorted=set(), seed=4)
    report = detect_sequence(frames)
    assert all(row.verdict == VERDICT_INSUFFICIENT for row in report.per_frame)


def _varied_frames(count, seed=0):
    return [
        LumaFrame(
            width=32,
            height=32,
            samples=np.clip(128 + noise_field(seed, f"frame-{i}", (32, 32), 40), 0, 255).astype(
                np.uint8
            ),
            frame_index=i,
        )
        for i in range(count)
    ]


def test_verdicts_are_prefix_stable():
    """Appending frames never rewrites verdicts already issued."""
    long = detect_sequence(_varied_frames(40))
    short = detect_sequence(_varied_frames(40)[:25])
    for a, b in zip(short.per_frame, long.per_frame[:25]):
        assert a.verdict == b.verdict
        assert a.b_msr == b.b_msr


def test_per_frame_rows_carry_their_own_window_stats():
    frames = _varied_frames(15)
    scores = frame_scores(frames)
    report = detect_sequence(frames)
    for row in report.per_frame:
        centre = row.frame_index
        if 3 <= centre <= 11:  # full centred window of 7
            mean, sigma = window_stats(ScoreWindow(scores[centre - 3 : centre + 4]))
            assert row.window_mean == pytest.approx(mean, rel=1e-12)
            assert row.window_stddev == pytest.approx(sigma, rel=1e-12)
        else:
            assert row.window_mean is None
            assert row.window_stddev is None


def test_burst_detection_small_corpus():
    spec = PatternSpec(kind="block-grid", period=16, amplitude=64)
    frames, truth = make_test_sequence(length=40, distorted={20}, spec=spec, seed=12)
    report = detect_sequence(frames)
    assert report.distorted_frames() == truth == {20}


def test_causal_mode_detects_the_burst_onset():
    # Trailing windows see sigma and the score jump on the same frame, so the
    # onset ratio for an isolated spike is sqrt(42)/7 ~ 0.926; a beta whose
    # square sits below that catches it with no false fires elsewhere.
    spec = PatternSpec(kind="block-grid", period=16, amplitude=64)
    frames, truth = make_test_sequence(length=40, distorted={20}, spec=spec, seed=12)
    report = detect_sequence(frames, DetectionConfig(beta=0.9, causal=True))
    assert report.distorted_frames() == truth


def test_causal_mode_accepts_even_windows():
    frames, _ = make_test_sequence(length=12, distorted=set(), seed=1)
    report = detect_sequence(frames, DetectionConfig(window=4, causal=True))
    assert len(report.per_frame) == 12


def test_config_validation():
    with pytest.raises(ValueError):
        DetectionConfig(window=0)
    with pytest.raises(ValueError):
        DetectionConfig(window=6)  # even, centred
    with pytest.raises(ValueError):
        DetectionConfig(epsilon=0.0)
    DetectionConfig(window=6, causal=True)  # fine trailing


def test_config_is_echoed_into_the_report():
    frames, _ = make_test_sequence(length=10, distorted=set(), seed=2)
    report = detect_sequence(frames, delta=4, scale=2.0, clip_margin=1)
    assert report.config["delta"] == 4
    assert report.config["scale"] == 2.0
    assert report.config["clip_margin"] == 1
    assert report.config["window"] == 7
    assert report.config["causal"] is False


def test_evaluate_detection_matches_set_arithmetic():
    rng = np.random.default_rng(33)
    for _ in range(50):
        detected = set(rng.integers(0, 30, size=rng.integers(0, 10)).tolist())
        truth = set(rng.integers(0, 30, size=rng.integers(0, 10)).tolist())
        m = evaluate_detection(detected, truth)
        assert m.true_positives == len(detected & truth)
        assert m.false_positives == len(detected - truth)
        assert m.missed == len(truth - detected)
        if detected:
            assert m.precision == pytest.approx(len(detected & truth) / len(detected))
        else:
            assert m.precision == 1.0
        if truth:
            assert m.recall == pytest.approx(len(detected & truth) / len(truth))
        else:
            assert m.recall == 1.0
        assert m.efficiency == pytest.approx((m.precision + m.recall) / 2)


def test_evaluate_detection_empty_sets_are_perfect():
    m = evaluate_detection(set(), set())
    assert (m.precision, m.recall, m.efficiency) == (1.0, 1.0, 1.0)
