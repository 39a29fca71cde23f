import numpy as np
import pytest

from nese.errors import ValidationError
from nese.scenes import SceneEvent, SceneSpec, generate


class TestGenerate:
    def test_static_scene(self):
        frames, masks = generate(SceneSpec(8, 8, 3, background_level=50))
        assert len(frames) == len(masks) == 3
        for f, m in zip(frames, masks):
            assert (f.data == 50).all()
            assert not m.data.any()

    def test_object_enter(self):
        spec = SceneSpec(32, 32, 2, background_level=50, events=[
            SceneEvent("object_enter", (1, 2), level_delta=100, rect=(10, 10, 5, 5)),
        ])
        frames, masks = generate(spec)
        assert not masks[0].data.any()
        patch = frames[1].data[10:15, 10:15]
        assert (patch == 150).all()
        expected = np.zeros((32, 32), dtype=bool)
        expected[10:15, 10:15] = True
        assert np.array_equal(masks[1].data, expected)

    def test_light_step_marks_everything(self):
        spec = SceneSpec(6, 6, 4, background_level=100, events=[
            SceneEvent("light_step", (2, 4), level_delta=16),
        ])
        frames, masks = generate(spec)
        assert (frames[2].data == 116).all()
        assert not masks[1].data.any()
        assert masks[2].data.all() and masks[3].data.all()

    def test_object_move(self):
        spec = SceneSpec(20, 10, 3, background_level=10, events=[
            SceneEvent("object_move", (0, 3), level_delta=50, rect=(0, 2, 4, 4), velocity=(2, 0)),
        ])
        frames, _ = generate(spec)
        assert (frames[0].data[2:6, 0:4] == 60).all()
        assert (frames[2].data[2:6, 4:8] == 60).all()
        assert (frames[2].data[2:6, 0:4] == 10).all()

    def test_determinism(self):
        spec = SceneSpec(16, 16, 5, noise=True, events=[
            SceneEvent("object_enter", (1, 5), level_delta=80, rect=(2, 2, 6, 6)),
        ])
        a_frames, a_masks = generate(spec, seed=7)
        b_frames, b_masks = generate(spec, seed=7)
        for a, b in zip(a_frames, b_frames):
            assert np.array_equal(a.data, b.data)
        for a, b in zip(a_masks, b_masks):
            assert np.array_equal(a.data, b.data)

    def test_mask_matches_frame_diff_without_noise(self):
        spec = SceneSpec(24, 24, 6, events=[
            SceneEvent("object_enter", (2, 6), level_delta=90, rect=(5, 5, 8, 8)),
            SceneEvent("light_step", (4, 6), level_delta=-8),
        ])
        frames, masks = generate(spec)
        for t in range(6):
            assert np.array_equal(masks[t].data, frames[t].data != frames[0].data)

    def test_noise_bounded(self):
        frames, _ = generate(SceneSpec(30, 30, 4, background_level=128, noise=True), seed=3)
        for f in frames:
            assert np.abs(f.data.astype(int) - 128).max() <= 2


class TestValidation:
    def test_rect_outside_frame(self):
        spec = SceneSpec(10, 10, 2, events=[
            SceneEvent("object_enter", (0, 1), rect=(8, 8, 5, 5), level_delta=10),
        ])
        with pytest.raises(ValidationError, match="rect"):
            generate(spec)

    def test_range_outside_length(self):
        spec = SceneSpec(10, 10, 2, events=[
            SceneEvent("light_step", (0, 5), level_delta=10),
        ])
        with pytest.raises(ValidationError, match="frame_range"):
            generate(spec)

    def test_unknown_kind(self):
        spec = SceneSpec(10, 10, 2, events=[SceneEvent("teleport", (0, 1))])
        with pytest.raises(ValidationError, match="kind"):
            generate(spec)

    def test_zero_length(self):
        with pytest.raises(ValidationError, match="length"):
            generate(SceneSpec(10, 10, 0))
