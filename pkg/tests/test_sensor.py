import numpy as np
import pytest
from hypothesis import given, strategies as st

from nese.errors import DimensionMismatchError, ValidationError
from nese.frames import Frame
from nese.sensor import (
    build_box_grid,
    capture_centers,
    capture_row,
    quantize,
    sense_analog,
)


def brute_force_centers(width, height, n):
    """Independent enumeration of the center stepping rule."""
    return [(r, c)
            for r in range(n // 2, height, n)
            for c in range(n // 2, width, n)]


class TestBuildBoxGrid:
    @pytest.mark.parametrize("n,expected", [(3, 40000), (5, 14400), (7, 7396)])
    def test_600x600_box_counts(self, n, expected):
        assert build_box_grid(600, 600, n).n_centers == expected

    def test_7x7_keeps_clipped_edge_boxes(self):
        grid = build_box_grid(600, 600, 7)
        assert len(grid.center_rows) == 86
        assert grid.center_rows[-1] == 598

    def test_6x6_box3_centers(self):
        grid = build_box_grid(6, 6, 3)
        assert grid.centers == [(1, 1), (1, 4), (4, 1), (4, 4)]

    @pytest.mark.parametrize("n", [1, 3, 5, 7])
    def test_matches_brute_force_small(self, n):
        for w in range(1, 51):
            for h in range(1, 51):
                grid = build_box_grid(w, h, n)
                assert grid.centers == brute_force_centers(w, h, n)

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_census(self, n):
        grid = build_box_grid(50, 50, n)
        assert grid.on_count == 1
        assert grid.disconnect_count == n - 1
        assert grid.off_count == n * n - n
        assert grid.on_count + grid.disconnect_count + grid.off_count == n * n

    @pytest.mark.parametrize("n", [0, -3, 2, 4])
    def test_invalid_box_size(self, n):
        with pytest.raises(ValidationError):
            build_box_grid(10, 10, n)


class TestQuantize:
    def test_truncates_to_top_bits(self):
        assert quantize(0b10110011, 2) == 0b10

    @pytest.mark.parametrize("p", range(1, 9))
    def test_full_scale(self, p):
        assert quantize(255, p) == 2**p - 1

    def test_msb_boundary(self):
        assert quantize(127, 1) == 0
        assert quantize(128, 1) == 1

    @given(st.integers(0, 254), st.integers(1, 8))
    def test_monotone(self, x, p):
        assert quantize(x, p) <= quantize(x + 1, p)

    @given(st.integers(0, 255))
    def test_eight_bits_is_identity(self, x):
        assert quantize(x, 8) == x

    @given(st.integers(0, 255), st.integers(1, 7))
    def test_prefix_property(self, x, p):
        # a p-bit code is the (p+1)-bit code with its last bit dropped
        assert quantize(x, p) == quantize(x, p + 1) >> 1

    @pytest.mark.parametrize("p", [0, 9])
    def test_bad_precision(self, p):
        with pytest.raises(ValidationError):
            quantize(10, p)


class TestSenseAnalog:
    def test_dark_pixel_no_drop(self):
        s = sense_analog(0, 1e-3, 3.3, 1.0)
        assert s.v_exposed == s.v_reset == 3.3

    def test_saturation_clamp(self):
        s = sense_analog(255, 1.0, 3.3, 1.0)
        assert s.v_exposed == 0.0

    def test_linear_point(self):
        vdd = 3.3
        s = sense_analog(128, 1.0, vdd, vdd / 255)
        assert s.v_exposed == pytest.approx(vdd * (1 - 128 / 255))

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            sense_analog(10, -1.0, 3.3, 1.0)


class CountingPixels:
    """Pixel storage stub that counts element reads."""

    def __init__(self, data):
        self.data = data
        self.accesses = 0

    def __getitem__(self, rc):
        self.accesses += 1
        return self.data[rc]


class TestCaptureCenters:
    def test_all_zero(self):
        grid = build_box_grid(12, 12, 3)
        frame = Frame(12, 12, np.zeros((12, 12), dtype=np.uint8))
        out = capture_centers(frame, grid, 3)
        assert not out.codes.any()

    def test_full_scale(self):
        grid = build_box_grid(9, 9, 3)
        frame = Frame(9, 9, np.full((9, 9), 255, dtype=np.uint8))
        assert (capture_centers(frame, grid, 4).codes == 15).all()

    def test_single_bright_center(self):
        data = np.zeros((6, 6), dtype=np.uint8)
        data[1, 4] = 200
        frame = Frame(6, 6, data)
        grid = build_box_grid(6, 6, 3)
        out = capture_centers(frame, grid, 2)
        assert out.codes.ravel().tolist() == [0, 3, 0, 0]

    def test_dimension_mismatch(self):
        grid = build_box_grid(6, 6, 3)
        frame = Frame(5, 5, np.zeros((5, 5), dtype=np.uint8))
        with pytest.raises(DimensionMismatchError):
            capture_centers(frame, grid, 2)

    def test_reads_only_center_pixels(self):
        grid = build_box_grid(15, 15, 5)
        stub = CountingPixels(np.zeros((15, 15), dtype=np.uint8))
        frame = Frame.__new__(Frame)
        frame.width, frame.height, frame.data, frame.index = 15, 15, stub, 0
        capture_centers(frame, grid, 2)
        assert stub.accesses == grid.n_centers

    def test_capture_row_matches_full_capture(self):
        rng = np.random.default_rng(0)
        frame = Frame(20, 20, rng.integers(0, 256, (20, 20), dtype=np.uint8))
        grid = build_box_grid(20, 20, 5)
        full = capture_centers(frame, grid, 3)
        for i, r in enumerate(grid.center_rows):
            assert np.array_equal(capture_row(frame, grid, r, 3), full.codes[i])

    def test_capture_row_rejects_non_center_row(self):
        grid = build_box_grid(9, 9, 3)
        frame = Frame(9, 9, np.zeros((9, 9), dtype=np.uint8))
        with pytest.raises(ValidationError):
            capture_row(frame, grid, 0, 2)
