"""Deterministic noise, pattern rendering, and corpus persistence."""

import numpy as np
import pytest

from artifact.frame_io import LumaFrame
from artifact.synth import (
    PatternSpec,
    base_scene,
    inject_block_pattern,
    make_test_sequence,
    noise_field,
    noise_units,
    pattern_frame,
    read_ground_truth,
    save_corpus,
)

GOLDEN = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1


def _ref_fnv1a64(text):
    value = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        value = ((value ^ byte) * 0x100000001B3) & MASK
    return value


def _ref_splitmix64(x):
    x &= MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def test_fnv1a64_known_vectors():
    # Published FNV-1a 64-bit test vectors.
    assert _ref_fnv1a64("") == 0xCBF29CE484222325
    assert _ref_fnv1a64("a") == 0xAF63DC4C8601EC8C


def test_noise_units_match_pure_python_reference():
    for seed, tag in [(0, "scene"), (7, "burst"), (2**63 + 11, "x")]:
        units = noise_units(seed, tag, 40)
        base = (seed * GOLDEN + _ref_fnv1a64(tag)) & MASK
        expected = [
            _ref_splitmix64((base + (i + 1) * GOLDEN) & MASK) / 2**64
            for i in range(40)
        ]
        assert np.array_equal(units, np.array(expected))


def test_noise_units_are_deterministic_and_tag_separated():
    a = noise_units(5, "alpha", 100)
    b = noise_units(5, "alpha", 100)
    c = noise_units(5, "beta", 100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert ((a >= 0) & (a < 1)).all()


def test_noise_field_bounds_and_shape():
    field = noise_field(3, "t", (11, 13), amplitude=4)
    assert field.shape == (11, 13)
    assert field.min() >= -4 and field.max() <= 4
    assert field.dtype == np.int64
    # amplitude 0 collapses to silence
    assert not noise_field(3, "t", (5, 5), amplitude=0).any()


def test_pattern_spec_validation():
    with pytest.raises(ValueError):
        PatternSpec(kind="plaid")
    with pytest.raises(ValueError):
        PatternSpec(period=1)
    with pytest.raises(ValueError):
        PatternSpec(orientation=91.0)
    with pytest.raises(ValueError):
        PatternSpec(amplitude=-1)


def test_blockgrid_profile_weights():
    spec = PatternSpec(kind="block-grid", period=8, phase=0, amplitude=60)
    frame = pattern_frame(spec, width=24, height=4, base_level=100)
    row = frame.samples[0].astype(int) - 100
    one_period = row[:8].tolist()
    assert one_period == [30, 60, 60, 40, 20, 0, 0, 0]
    assert row[8:16].tolist() == one_period  # periodic
    assert all(r == frame.samples[0].tolist() for r in frame.samples.tolist())


def test_blockgrid_phase_shifts_columns():
    spec0 = PatternSpec(kind="block-grid", period=8, phase=0, amplitude=60)
    spec3 = PatternSpec(kind="block-grid", period=8, phase=3, amplitude=60)
    base = pattern_frame(spec0, 24, 4, base_level=100).samples[0]
    moved = pattern_frame(spec3, 24, 4, base_level=100).samples[0]
    assert np.array_equal(np.roll(base[:8], 3), moved[:8])


def test_blockgrid_rejects_tiny_period():
    with pytest.raises(ValueError):
        pattern_frame(PatternSpec(kind="block-grid", period=2), 16, 4)


def _stripe_frame(orientation):
    return pattern_frame(PatternSpec(kind="stripes", orientation=orientation, period=12), 32, 32)


def test_stripes_snap_to_bin_centres():
    # Orientations quantize to the nearest 6-degree bin, so nearby angles
    # render identical frames and the bin boundary splits them.
    assert np.array_equal(_stripe_frame(0.0).samples, _stripe_frame(2.0).samples)
    assert np.array_equal(_stripe_frame(42.0).samples, _stripe_frame(45.0).samples)
    assert not np.array_equal(_stripe_frame(0.0).samples, _stripe_frame(6.0).samples)


def test_stripes_vary_mostly_along_their_normal():
    # 0 degrees: horizontal stripes; intensity changes down the rows far more
    # than along them (the 3-degree mid-bin tilt leaks a little sideways).
    horizontal = _stripe_frame(0.0).samples.astype(float)
    assert horizontal.var(axis=0).mean() > 5 * horizontal.var(axis=1).mean()
    vertical = _stripe_frame(90.0).samples.astype(float)
    assert vertical.var(axis=1).mean() > 5 * vertical.var(axis=0).mean()


def test_checkerboard_parity_and_period():
    spec = PatternSpec(kind="checkerboard", period=8, amplitude=50)
    frame = pattern_frame(spec, 32, 32, base_level=128)
    cells = frame.samples.astype(int) - 128
    assert set(np.unique(cells)) == {-25, 25}
    assert np.array_equal(cells[:, :4], -cells[:, 4:8])  # half-period flip
    assert np.array_equal(cells[:, :8], cells[:, 8:16])  # full-period repeat
    assert np.array_equal(cells[:8], cells[8:16])


def test_checkerboard_rejects_odd_period():
    with pytest.raises(ValueError):
        pattern_frame(PatternSpec(kind="checkerboard", period=9), 16, 16)


def test_injection_clips_to_uint8():
    base = LumaFrame(16, 16, np.full((16, 16), 250, dtype=np.uint8), 0)
    out = inject_block_pattern(base, PatternSpec(kind="block-grid", amplitude=100))
    assert out.samples.max() == 255
    assert out.samples.dtype == np.uint8
    assert base.samples.max() == 250  # input untouched


def test_burst_noise_uses_seed():
    base = LumaFrame(16, 16, np.full((16, 16), 128, dtype=np.uint8), 0)
    spec = PatternSpec(kind="burst-noise", amplitude=20)
    a = inject_block_pattern(base, spec, seed=1)
    b = inject_block_pattern(base, spec, seed=1)
    c = inject_block_pattern(base, spec, seed=2)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_base_scene_is_reproducible():
    a = base_scene(40, 30, seed=9)
    b = base_scene(40, 30, seed=9)
    c = base_scene(40, 30, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.dtype == np.uint8


def test_make_test_sequence_clean_frames_are_identical():
    frames, truth = make_test_sequence(length=12, distorted={3, 20, -1}, seed=6)
    assert truth == {3}  # out-of-range indices dropped
    reference = frames[0].samples
    for frame in frames:
        if frame.frame_index == 3:
            assert not np.array_equal(frame.samples, reference)
        else:
            assert np.array_equal(frame.samples, reference)
    # copies, not views of one array
    assert frames[1].samples is not frames[2].samples


def test_corpus_round_trip(tmp_path):
    frames, truth = make_test_sequence(length=6, distorted={2, 4}, seed=3,
                                       width=24, height=18)
    yuv_path, sidecar = save_corpus(frames, truth, tmp_path / "corpus")
    assert yuv_path.stat().st_size == 6 * 24 * 18
    assert read_ground_truth(sidecar) == {2, 4}
    raw = np.fromfile(yuv_path, dtype=np.uint8).reshape(6, 18, 24)
    for index, frame in enumerate(frames):
        assert np.array_equal(raw[index], frame.samples)


def test_read_ground_truth_plain_list(tmp_path):
    listing = tmp_path / "truth.txt"
    listing.write_text("3\n\n17\n5\n")
    assert read_ground_truth(listing) == {3, 17, 5}


def test_save_corpus_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        save_corpus([], set(), tmp_path / "empty")
