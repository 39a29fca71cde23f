"""Grayscale frame and mask containers plus binary PGM (P5) I/O.

Frames are 8-bit luminance grids; masks are boolean change maps rendered
as 0/255 PGM images. Only the 8-bit binary flavor (maxval 255) is
accepted; header comment lines are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySequenceError,
    PgmParseError,
    UnsupportedFormatError,
)


@dataclass
class Frame:
    """A width x height grid of 8-bit luminance samples.

    ``data`` is a (height, width) uint8 array; ``index`` is the frame's
    ordinal within its sequence.
    """

    width: int
    height: int
    data: np.ndarray
    index: int = 0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.uint8).reshape(self.height, self.width)

    def copy(self) -> "Frame":
        return Frame(self.width, self.height, self.data.copy(), self.index)


@dataclass
class Mask:
    """A boolean change map; True marks a changed/foreground pixel."""

    width: int
    height: int
    data: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.data is None:
            self.data = np.zeros((self.height, self.width), dtype=bool)
        else:
            self.data = np.asarray(self.data, dtype=bool).reshape(self.height, self.width)

    def count(self) -> int:
        return int(self.data.sum())


def _read_header_tokens(raw: bytes, n_tokens: int) -> tuple[list[bytes], int]:
    """Return the first ``n_tokens`` whitespace-separated header tokens and
    the offset of the first pixel byte. '#' comments run to end of line."""
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < n_tokens:
        if i >= len(raw):
            raise PgmParseError("truncated header: expected %d tokens, got %d" % (n_tokens, len(tokens)))
        c = raw[i : i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            nl = raw.find(b"\n", i)
            i = len(raw) if nl < 0 else nl + 1
        else:
            j = i
            while j < len(raw) and raw[j : j + 1] not in b" \t\r\n#":
                j += 1
            tokens.append(raw[i:j])
            i = j
    # exactly one whitespace byte separates the maxval token from pixel data
    if i < len(raw) and raw[i : i + 1] in b" \t\r\n":
        i += 1
    return tokens, i


def read_pgm(path) -> Frame:
    """Read a binary (P5) 8-bit PGM file into a Frame."""
    raw = Path(path).read_bytes()
    tokens, offset = _read_header_tokens(raw, 4)
    magic, w_tok, h_tok, max_tok = tokens
    if magic != b"P5":
        raise PgmParseError(f"bad magic token {magic!r}, expected b'P5'")
    try:
        width, height = int(w_tok), int(h_tok)
    except ValueError:
        raise PgmParseError(f"non-numeric dimension token {w_tok!r} / {h_tok!r}")
    try:
        maxval = int(max_tok)
    except ValueError:
        raise PgmParseError(f"non-numeric maxval token {max_tok!r}")
    if maxval != 255:
        raise UnsupportedFormatError(f"maxval {maxval} unsupported; only 8-bit (255) PGM is accepted")
    if width <= 0 or height <= 0:
        raise PgmParseError(f"non-positive dimensions {width}x{height}")
    n = width * height
    pixels = raw[offset : offset + n]
    if len(pixels) < n:
        raise PgmParseError(f"pixel payload short: expected {n} bytes, got {len(pixels)}")
    data = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    return Frame(width, height, data.copy())


def write_pgm(frame: Frame, path) -> None:
    """Write a Frame as binary P5, maxval 255."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + frame.data.tobytes())


def write_mask_pgm(mask: Mask, path) -> None:
    """Write a Mask as a P5 image: True -> 255, False -> 0."""
    data = np.where(mask.data, 255, 0).astype(np.uint8)
    write_pgm(Frame(mask.width, mask.height, data), path)


def mask_from_frame(frame: Frame, threshold: int = 128) -> Mask:
    """Re-binarize a rendered mask image (inverse of write_mask_pgm)."""
    return Mask(frame.width, frame.height, frame.data >= threshold)


_NUM_RE = re.compile(r"(\d+)")


def _numeric_key(name: str):
    m = _NUM_RE.search(name)
    return (int(m.group(1)) if m else -1, name)


def load_sequence(directory, pattern: str = "*.pgm") -> list[Frame]:
    """Load all frames matching ``pattern``, ordered by the numeric
    component of the filename, with indices assigned 0,1,2,..."""
    directory = Path(directory)
    paths = sorted(directory.glob(pattern), key=lambda p: _numeric_key(p.name))
    if not paths:
        raise EmptySequenceError(f"no files matching {pattern!r} in {directory}")
    frames = []
    for i, p in enumerate(paths):
        f = read_pgm(p)
        f.index = i
        if frames and (f.width, f.height) != (frames[0].width, frames[0].height):
            raise DimensionMismatchError(
                f"{p.name} is {f.width}x{f.height}, sequence is {frames[0].width}x{frames[0].height}"
            )
        frames.append(f)
    return frames
