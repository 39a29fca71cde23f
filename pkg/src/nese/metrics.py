"""Accuracy scoring of change masks and run-level sweep summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .frames import Mask
from .sensor import BoxGrid


@dataclass
class Score:
    """Confusion counts and the usual derived ratios; 0/0 cases are 0
    and flagged as degenerate so empty scenes do not crash sweeps."""

    true_pos: int
    false_pos: int
    true_neg: int
    false_neg: int
    precision_score: float
    recall: float
    f1: float
    iou: float
    degenerate: bool = False


def _ratio(num: int, den: int) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def confusion_score(predicted: np.ndarray, truth: np.ndarray) -> Score:
    tp = int(np.sum(predicted & truth))
    fp = int(np.sum(predicted & ~truth))
    fn = int(np.sum(~predicted & truth))
    tn = int(np.sum(~predicted & ~truth))
    p, dp = _ratio(tp, tp + fp)
    r, dr = _ratio(tp, tp + fn)
    f1, df = _ratio(2 * tp, 2 * tp + fp + fn)
    iou, di = _ratio(tp, tp + fp + fn)
    return Score(tp, fp, tn, fn, p, r, f1, iou, degenerate=dp or dr or df or di)


def downsample_truth(truth: Mask, grid: BoxGrid, mode: str = "majority") -> np.ndarray:
    """Reduce a pixel-level truth mask to one boolean per box center.

    "majority": a box is changed when strictly more than half of its
    (clipped) pixels changed. "center": sample the center pixel.
    """
    if (truth.width, truth.height) != (grid.width, grid.height):
        raise DimensionMismatchError("truth mask does not match grid dimensions")
    n = grid.box_size
    rows, cols = grid.center_rows, grid.center_cols
    if mode == "center":
        return truth.data[np.ix_(rows, cols)]
    if mode != "majority":
        raise ValidationError(f"unknown truth downsampling mode {mode!r}")
    out = np.zeros((len(rows), len(cols)), dtype=bool)
    half = n // 2
    for i, r in enumerate(rows):
        r0, r1 = max(0, r - half), min(grid.height, r + half + 1)
        for j, c in enumerate(cols):
            c0, c1 = max(0, c - half), min(grid.width, c + half + 1)
            box = truth.data[r0:r1, c0:c1]
            out[i, j] = box.sum() * 2 > box.size
    return out


def score_mask(predicted: Mask, truth: Mask, grid: BoxGrid | None = None,
               truth_mode: str = "majority") -> Score:
    """Score a predicted change mask against ground truth.

    With a grid, ``predicted`` is center-level and ``truth`` is
    pixel-level truth downsampled per ``truth_mode`` before comparison.
    """
    if grid is None:
        if (predicted.width, predicted.height) != (truth.width, truth.height):
            raise DimensionMismatchError("predicted and truth dimensions differ")
        return confusion_score(predicted.data, truth.data)
    expected = (len(grid.center_cols), len(grid.center_rows))
    if (predicted.width, predicted.height) != expected:
        raise DimensionMismatchError(
            f"predicted {predicted.width}x{predicted.height} vs center grid {expected[0]}x{expected[1]}"
        )
    return confusion_score(predicted.data, downsample_truth(truth, grid, truth_mode))


def sweep_report(results: dict[tuple[int, int], dict]) -> list[dict]:
    """One row per (box_size, precision) configuration, sorted ascending.

    Each input entry carries at least f1/iou/total_joules/detection
    power; rows pass through with the config key flattened in.
    """
    if not results:
        raise ValidationError("sweep_report needs at least one configuration")
    rows = []
    for (box, prec) in sorted(results):
        row = {"box_size": box, "precision": prec}
        row.update(results[(box, prec)])
        rows.append(row)
    return rows
