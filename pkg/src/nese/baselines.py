"""Reference background-subtraction methods for accuracy comparison:
static frame difference, frame difference, and running-mean backgrounds.
All thresholds are strict (difference must exceed the threshold).
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .frames import Frame, Mask


def _check_dims(a: Frame, b: Frame) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(f"{a.width}x{a.height} vs {b.width}x{b.height}")


def static_diff(frame: Frame, background: Frame, th: int) -> Mask:
    """Mask of pixels where |frame - background| > th."""
    _check_dims(frame, background)
    diff = np.abs(frame.data.astype(np.int16) - background.data.astype(np.int16))
    return Mask(frame.width, frame.height, diff > th)


def frame_diff(frame: Frame, previous: Frame, th: int) -> Mask:
    """Mask of pixels where |frame - previous| > th."""
    return static_diff(frame, previous, th)


class MeanBackground:
    """Sliding-window arithmetic-mean background with exact integer sums.

    Rounding happens only when an 8-bit rendering is requested
    (round half up), so the model never drifts.
    """

    def __init__(self, window: int):
        if window < 1:
            raise ValidationError("window must be >= 1")
        self.window = window
        self.buffer: deque[Frame] = deque()
        self._sums: np.ndarray | None = None

    def update(self, frame: Frame) -> "MeanBackground":
        if self._sums is None:
            self._sums = np.zeros((frame.height, frame.width), dtype=np.int64)
        elif self._sums.shape != (frame.height, frame.width):
            raise DimensionMismatchError("frame does not match window dimensions")
        self.buffer.append(frame)
        self._sums += frame.data
        if len(self.buffer) > self.window:
            oldest = self.buffer.popleft()
            self._sums -= oldest.data
        return self

    def mean_exact(self) -> np.ndarray:
        """Per-pixel mean as float64 (numerators are exact integers)."""
        if not self.buffer:
            raise ValidationError("no frames accumulated")
        return self._sums / len(self.buffer)

    def background(self) -> Frame:
        """8-bit rendering of the mean, round half up."""
        n = len(self.buffer)
        if n == 0:
            raise ValidationError("no frames accumulated")
        rendered = (2 * self._sums + n) // (2 * n)
        h, w = rendered.shape
        return Frame(w, h, rendered.astype(np.uint8))


def weighted_mean_background(frames: list[Frame], weights: list[float]) -> Frame:
    """Weighted-mean background; weights must sum to 1."""
    if len(frames) != len(weights) or not frames:
        raise ValidationError("need equally many frames and weights, at least one")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValidationError("weights must sum to 1")
    acc = np.zeros(frames[0].data.shape, dtype=np.float64)
    for f, w in zip(frames, weights):
        _check_dims(f, frames[0])
        acc += w * f.data
    rendered = np.floor(acc + 0.5).astype(np.uint8)
    return Frame(frames[0].width, frames[0].height, rendered)
