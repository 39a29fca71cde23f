"""Synthetic scene generation with ground-truth change masks.

Scenes are built from a flat background level plus a list of timed
events: an object appearing, moving, or sitting still, and global light
steps. Ground truth is defined against the first frame, so a mask pixel
is True exactly where the (noise-free) frame differs from frame 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .frames import Frame, Mask

OBJECT_KINDS = ("object_enter", "object_move", "object_stop")
EVENT_KINDS = OBJECT_KINDS + ("light_step",)


@dataclass
class SceneEvent:
    """One timed scene change.

    ``rect`` is (x, y, w, h) for object kinds; ``level_delta`` is the
    signed luminance offset applied by object and light kinds.
    ``frame_range`` is half-open (start, end). ``velocity`` moves an
    object_move rect by (dx, dy) pixels per frame within its range.
    """

    kind: str
    frame_range: tuple[int, int]
    level_delta: int = 0
    rect: tuple[int, int, int, int] | None = None
    velocity: tuple[int, int] = (1, 0)


@dataclass
class SceneSpec:
    width: int
    height: int
    length: int
    background_level: int = 64
    events: list[SceneEvent] = field(default_factory=list)
    noise: bool = False


def _validate(spec: SceneSpec) -> None:
    if spec.length < 1:
        raise ValidationError("length must be >= 1")
    if spec.width < 1 or spec.height < 1:
        raise ValidationError("width/height must be >= 1")
    if not 0 <= spec.background_level <= 255:
        raise ValidationError("background_level must be in [0, 255]")
    for i, ev in enumerate(spec.events):
        if ev.kind not in EVENT_KINDS:
            raise ValidationError(f"events[{i}].kind {ev.kind!r} not in {EVENT_KINDS}")
        start, end = ev.frame_range
        if not (0 <= start < end <= spec.length):
            raise ValidationError(f"events[{i}].frame_range {ev.frame_range} outside [0, {spec.length})")
        if ev.kind in OBJECT_KINDS:
            if ev.rect is None:
                raise ValidationError(f"events[{i}].rect required for kind {ev.kind!r}")
            x, y, w, h = ev.rect
            if w < 1 or h < 1 or x < 0 or y < 0 or x + w > spec.width or y + h > spec.height:
                raise ValidationError(f"events[{i}].rect {ev.rect} not fully inside the frame")


def _render(spec: SceneSpec, t: int) -> np.ndarray:
    """Noise-free frame at time t, as int32 before clipping."""
    img = np.full((spec.height, spec.width), spec.background_level, dtype=np.int32)
    for ev in spec.events:
        start, end = ev.frame_range
        if not start <= t < end:
            continue
        if ev.kind == "light_step":
            img += ev.level_delta
        else:
            x, y, w, h = ev.rect
            if ev.kind == "object_move":
                dx, dy = ev.velocity
                x = min(max(x + dx * (t - start), 0), spec.width - w)
                y = min(max(y + dy * (t - start), 0), spec.height - h)
            img[y : y + h, x : x + w] = spec.background_level + ev.level_delta
    return np.clip(img, 0, 255)


def generate(spec: SceneSpec, seed: int = 0) -> tuple[list[Frame], list[Mask]]:
    """Generate one frame and one ground-truth mask per time step.

    Deterministic for a fixed (spec, seed). When ``spec.noise`` is on,
    zero-mean integer noise in [-2, 2] is added to the frames; masks are
    always computed from the noise-free renders.
    """
    _validate(spec)
    rng = np.random.default_rng(seed)
    clean0 = _render(spec, 0)
    frames, masks = [], []
    for t in range(spec.length):
        clean = _render(spec, t)
        masks.append(Mask(spec.width, spec.height, clean != clean0))
        img = clean
        if spec.noise:
            img = np.clip(clean + rng.integers(-2, 3, size=clean.shape), 0, 255)
        frames.append(Frame(spec.width, spec.height, img.astype(np.uint8), index=t))
    return frames, masks
