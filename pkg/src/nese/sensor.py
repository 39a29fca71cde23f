"""Pixel-array box topology, analog readout, and ADC quantization.

Only one pixel per n x n box is ever read (the center); the other
pixels stay dark, which is where the power saving comes from. Centers
start at floor(n/2) and step by n in both axes; partial boxes at the
right/bottom edges keep their clipped centers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .frames import Frame


@dataclass(frozen=True)
class BoxGrid:
    """Center coordinates and per-box pixel census for a (W, H, n) triple.

    A full box has one ON pixel (the center), n-1 Disconnect pixels
    (same column, row selector off), and n^2-n OFF pixels (column off).
    """

    box_size: int
    width: int
    height: int
    center_rows: tuple[int, ...]
    center_cols: tuple[int, ...]

    @property
    def centers(self) -> list[tuple[int, int]]:
        """Row-major (row, col) list of all center coordinates."""
        return [(r, c) for r in self.center_rows for c in self.center_cols]

    @property
    def n_centers(self) -> int:
        return len(self.center_rows) * len(self.center_cols)

    @property
    def on_count(self) -> int:
        return 1

    @property
    def disconnect_count(self) -> int:
        return self.box_size - 1

    @property
    def off_count(self) -> int:
        return self.box_size * self.box_size - self.box_size


@dataclass(frozen=True)
class AnalogSample:
    """Reset and post-exposure voltages of one pixel readout."""

    v_reset: float
    v_exposed: float
    vdd: float


@dataclass(frozen=True)
class QuantizedReadout:
    """ADC codes for every center of a grid, row-major, each < 2^precision."""

    precision: int
    codes: np.ndarray  # shape (len(center_rows), len(center_cols))


def build_box_grid(width: int, height: int, box_size: int) -> BoxGrid:
    """Enumerate box centers for a width x height array.

    Centers are at floor(n/2) + k*n in each axis, clipped to the array;
    partial edge boxes are kept.
    """
    if box_size < 1 or box_size % 2 == 0:
        raise ValidationError(f"box_size must be a positive odd integer, got {box_size}")
    if width < 1 or height < 1:
        raise ValidationError(f"width/height must be positive, got {width}x{height}")
    first = box_size // 2
    rows = tuple(range(first, height, box_size))
    cols = tuple(range(first, width, box_size))
    return BoxGrid(box_size, width, height, rows, cols)


def sense_analog(intensity: int, exposure: float, vdd: float, k: float) -> AnalogSample:
    """Linear photodiode discharge model with a saturation clamp.

    The exposed voltage drops proportionally to intensity x exposure,
    never below ground.
    """
    if not 0 <= intensity <= 255:
        raise ValidationError(f"intensity {intensity} outside [0, 255]")
    if exposure <= 0 or vdd < 0 or k < 0:
        raise ValidationError("exposure must be > 0 and vdd, k non-negative")
    v_exposed = max(0.0, vdd - k * intensity * exposure)
    return AnalogSample(v_reset=vdd, v_exposed=v_exposed, vdd=vdd)


def quantize(intensity: int, precision: int) -> int:
    """Keep the top ``precision`` bits of an 8-bit sample (truncation).

    Truncation keeps the precision hierarchy exact: a p-bit code is a
    prefix of the (p+1)-bit code for the same intensity.
    """
    if not 1 <= precision <= 8:
        raise ValidationError(f"precision {precision} outside [1, 8]")
    if not 0 <= intensity <= 255:
        raise ValidationError(f"intensity {intensity} outside [0, 255]")
    return intensity >> (8 - precision)


def _gather(data, rows, cols) -> np.ndarray:
    """Read exactly the (row, col) cross product from pixel storage.

    ndarray input uses fancy indexing; anything else is read one element
    at a time via __getitem__((r, c)), which lets tests count accesses.
    """
    if isinstance(data, np.ndarray):
        return data[np.ix_(rows, cols)].astype(np.int64)
    out = np.empty((len(rows), len(cols)), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            out[i, j] = data[r, c]
    return out


def capture_centers(frame: Frame, grid: BoxGrid, precision: int) -> QuantizedReadout:
    """Quantized readout of every center pixel, ordered like grid.centers."""
    if (frame.width, frame.height) != (grid.width, grid.height):
        raise DimensionMismatchError(
            f"frame {frame.width}x{frame.height} vs grid {grid.width}x{grid.height}"
        )
    if not 1 <= precision <= 8:
        raise ValidationError(f"precision {precision} outside [1, 8]")
    values = _gather(frame.data, grid.center_rows, grid.center_cols)
    return QuantizedReadout(precision, values >> (8 - precision))


def capture_row(frame: Frame, grid: BoxGrid, row_index: int, precision: int) -> np.ndarray:
    """Quantized codes for the centers of one center-row (pixel row)."""
    if row_index not in grid.center_rows:
        raise ValidationError(f"row {row_index} is not a center row of this grid")
    values = _gather(frame.data, (row_index,), grid.center_cols)
    return (values >> (8 - precision))[0]
