"""The event-detection engine: precision-limited comparison of box-center
codes against the MRAM background, per-row thresholding, sensor-mode
row-band transfer, and the steady-change background-update policy.

Per frame: if the consecutive-event counter has reached time_tau the
background is rewritten from the current frame (update precedes
detection); every center row is then read, quantized, and compared
against its stored row, and rows meeting threshold_pixels enter the
turn-on list. A non-empty list bumps the counter and triggers sensor
mode, which transfers the full-resolution row bands around each listed
row; an empty list resets the counter.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from .energy import BOX_SENSE_POWER_W, EnergyLedger
from .errors import DimensionMismatchError, ValidationError
from .frames import Frame, Mask
from .nvm import MramArray, NvmEnergyParams
from .sensor import BoxGrid, build_box_grid, capture_row

STRICT_BOX_SIZES = (3, 5, 7)
STRICT_PRECISIONS = (1, 2, 3, 4)


@dataclass
class NeseConfig:
    """Detection parameters.

    ``threshold_pixels`` is the per-center-row mismatch count that marks
    a row as changed (math.inf disables detection); ``time_tau`` is the
    number of consecutive event frames before steady changes merge into
    the background. ``half_band`` narrows sensor-mode transfer to
    row +/- box_size//2 instead of the literal row +/- box_size;
    ``update_changed_rows_only`` restricts background rewrites to rows
    that changed on the previous frame.
    """

    box_size: int = 3
    precision: int = 2
    threshold_pixels: float = 1
    time_tau: int = 4
    half_band: bool = False
    update_changed_rows_only: bool = False

    def validate(self, strict: bool = False) -> None:
        if self.box_size < 1 or self.box_size % 2 == 0:
            raise ValidationError(f"box_size must be a positive odd integer, got {self.box_size}")
        max_p = 4 if strict else 8
        if not 1 <= self.precision <= max_p:
            raise ValidationError(f"precision {self.precision} outside [1, {max_p}]")
        if strict and self.box_size not in STRICT_BOX_SIZES:
            raise ValidationError(f"strict mode requires box_size in {STRICT_BOX_SIZES}")
        if self.threshold_pixels < 0:
            raise ValidationError("threshold_pixels must be non-negative")
        if self.time_tau < 1:
            raise ValidationError("time_tau must be a positive integer")


@dataclass
class StepResult:
    """Outcome of one engine step."""

    frame_index: int
    changed_rows: list[int]
    change_mask: Mask
    sensor_mode_entered: bool
    background_updated: bool
    transferred_rows: list[tuple[int, int]]
    energy: EnergyLedger


def compare_codes(current: int, stored: int, precision: int) -> bool:
    """True iff the codes agree on all ``precision`` bits (all-ones XNOR)."""
    limit = 1 << precision
    if not (0 <= current < limit and 0 <= stored < limit):
        raise ValidationError(f"codes must be < 2^{precision}")
    return current == stored


def codes_to_bits(codes: np.ndarray, precision: int) -> np.ndarray:
    """Serialize codes into a flat bit row, MSB first per code."""
    codes = np.asarray(codes, dtype=np.int64)
    shifts = np.arange(precision - 1, -1, -1)
    return ((codes[:, None] >> shifts) & 1).astype(bool).ravel()

def bits_to_codes(bits: np.ndarray, precision: int) -> np.ndarray:
    """Inverse of codes_to_bits."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, precision)
    weights = 1 << np.arange(precision - 1, -1, -1)
    return bits @ weights


def merge_ranges(ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Merge overlapping/adjacent inclusive ranges."""
    merged: list[tuple[int, int]] = []
    for start, end in sorted(ranges):
        if merged and start <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


class NeseEngine:
    """One simulation instance, stepped sequentially over a frame stream.

    The MRAM background is the only state that survives power loss; the
    mode, consecutive-event counter, and turn-on list are volatile.
    """

    def __init__(self, config: NeseConfig, first_frame: Frame,
                 nvm_params: NvmEnergyParams | None = None,
                 barrier: float = 40.0, tau0: float = 1e-9,
                 frame_period: float = 33.3e-3,
                 e_xnor: float = 1e-15, e_transfer_per_pixel: float = 10e-12,
                 strict: bool = False):
        config.validate(strict)
        if first_frame.width < config.box_size or first_frame.height < config.box_size:
            raise ValidationError("frame dimensions must be >= box_size")
        self.config = config
        self.grid: BoxGrid = build_box_grid(first_frame.width, first_frame.height, config.box_size)
        self.frame_period = frame_period
        self.e_xnor = e_xnor
        self.e_transfer_per_pixel = e_transfer_per_pixel
        self.ledger = EnergyLedger()
        self.clock = 0.0
        n_rows = len(self.grid.center_rows)
        n_cols = len(self.grid.center_cols)
        self.background = MramArray(n_rows, n_cols * config.precision,
                                    barrier=barrier, tau0=tau0, params=nvm_params)
        self._write_background(first_frame)
        # volatile (CMOS-side) state, lost on power cycles
        self.mode = "event_detection"
        self.time = 0
        self.turn_on_list: list[int] = []
        self._last_changed_rows: list[int] = []
        self.frames_seen = 0

    # -- background maintenance ------------------------------------------

    def _write_background(self, frame: Frame, rows: list[int] | None = None) -> None:
        p = self.config.precision
        row_indices = range(len(self.grid.center_rows)) if rows is None else rows
        for i in row_indices:
            codes = capture_row(frame, self.grid, self.grid.center_rows[i], p)
            self.background.write_bits(i, codes_to_bits(codes, p), self.clock, self.ledger)

    # -- detection -------------------------------------------------------

    def detect_events(self, frame: Frame) -> tuple[np.ndarray, Mask]:
        """Per-center-row mismatch counts and the center-level change mask.

        Appends rows meeting threshold_pixels to the turn-on list and
        charges pixel sensing, MRAM reads, and XNOR compares.
        """
        if self.mode != "event_detection":
            raise ValidationError("detect_events requires event_detection mode")
        if (frame.width, frame.height) != (self.grid.width, self.grid.height):
            raise DimensionMismatchError(
                f"frame {frame.width}x{frame.height} vs grid {self.grid.width}x{self.grid.height}"
            )
        p = self.config.precision
        n_rows = len(self.grid.center_rows)
        n_cols = len(self.grid.center_cols)
        counts = np.zeros(n_rows, dtype=np.int64)
        mismatch = np.zeros((n_rows, n_cols), dtype=bool)
        # per-box sensing power only tabulated for the paper's box sizes
        box_power = BOX_SENSE_POWER_W.get(self.config.box_size, 0.0)
        self.ledger.charge("pixel_sense", self.grid.n_centers * box_power * self.frame_period)
        for i, pixel_row in enumerate(self.grid.center_rows):
            current = capture_row(frame, self.grid, pixel_row, p)
            stored = bits_to_codes(self.background.read_row(i, self.ledger), p)
            row_mismatch = current != stored
            mismatch[i] = row_mismatch
            counts[i] = int(row_mismatch.sum())
            self.ledger.charge("xnor", n_cols * p * self.e_xnor)
            if counts[i] >= self.config.threshold_pixels:
                self.turn_on_list.append(pixel_row)
        return counts, Mask(n_cols, n_rows, mismatch)

    def sensor_mode(self, frame: Frame) -> list[tuple[int, int]]:
        """Drain the turn-on list, transferring the clipped row band
        around each listed pixel row; overlapping bands merge."""
        if not self.turn_on_list:
            return []
        band = self.config.box_size // 2 if self.config.half_band else self.config.box_size
        ranges = []
        while self.turn_on_list:
            row = self.turn_on_list.pop()
            ranges.append((max(0, row - band), min(self.grid.height - 1, row + band)))
        merged = merge_ranges(ranges)
        n_pixels = sum((end - start + 1) * self.grid.width for start, end in merged)
        self.ledger.charge("transfer", n_pixels * self.e_transfer_per_pixel)
        return merged

    def step(self, frame: Frame) -> StepResult:
        """Run one frame through the full event-detection procedure."""
        before = self.ledger.snapshot()
        background_updated = False
        if self.time >= self.config.time_tau:
            rows = None
            if self.config.update_changed_rows_only and self._last_changed_rows:
                rows = [self.grid.center_rows.index(r) for r in self._last_changed_rows]
            self._write_background(frame, rows)
            self.time = 0
            background_updated = True

        counts, change_mask = self.detect_events(frame)
        changed_rows = list(self.turn_on_list)
        self._last_changed_rows = changed_rows

        transferred: list[tuple[int, int]] = []
        if self.turn_on_list:
            self.time += 1
            self.mode = "sensor"
            transferred = self.sensor_mode(frame)
            self.mode = "event_detection"
            sensor_entered = True
        else:
            self.time = 0
            sensor_entered = False

        self.clock += self.frame_period
        self.frames_seen += 1
        delta = self.ledger.delta_since(before)
        self.ledger.record_frame_power(delta.total() / self.frame_period if self.frame_period else 0.0)
        return StepResult(
            frame_index=frame.index,
            changed_rows=changed_rows,
            change_mask=change_mask,
            sensor_mode_entered=sensor_entered,
            background_updated=background_updated,
            transferred_rows=transferred,
            energy=delta,
        )

    # -- power management ------------------------------------------------

    def power_cycle(self, zero_background: bool = False) -> None:
        """Lose power and come back. Volatile state resets; the MRAM
        background persists (unless ``zero_background`` simulates a
        volatile store for control experiments)."""
        self.background.power_cycle()
        if zero_background:
            self.background.bits[:] = False
        self.mode = "event_detection"
        self.time = 0
        self.turn_on_list = []
        self._last_changed_rows = []

    def advance_clock(self, seconds: float) -> None:
        self.clock += seconds

    def clone(self) -> "NeseEngine":
        return copy.deepcopy(self)
