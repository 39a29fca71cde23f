"""SOT-MRAM background store: bit-addressable rows with energy-accounted
access, barrier-dependent retention decay, and non-volatile power cycling.

The thermal barrier (in kT units) sets both the retention time
tau = tau0 * exp(barrier) and the per-bit write energy, which scales
linearly with the barrier through the 40 kT anchor point (a 20 kT cell
writes at half the 40 kT energy).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PowerFaultError, ValidationError

SNAPSHOT_MAGIC = b"NESE-NVM1"


@dataclass
class NvmEnergyParams:
    """MRAM access energies. Defaults are order-of-magnitude placeholders
    (uncalibrated); the published work gives no absolute MRAM energies."""

    e_read_bit: float = 0.1e-12
    e_write_bit_40kt: float = 2e-12
    p_mram_read: float = 1e-6

    def __post_init__(self):
        if self.e_read_bit <= 0 or self.e_write_bit_40kt <= 0 or self.p_mram_read <= 0:
            raise ValidationError("all NVM energy parameters must be strictly positive")


def write_energy_per_bit(barrier: float, params: NvmEnergyParams) -> float:
    """Per-bit write energy, linear in the barrier through the origin,
    anchored at the 40 kT value (so 20 kT costs exactly half)."""
    if barrier <= 0:
        raise ValidationError(f"barrier must be positive, got {barrier}")
    return params.e_write_bit_40kt * (barrier / 40.0)


def retention_time(barrier: float, tau0: float) -> float:
    """Expected time before a stored bit flips: tau0 * exp(barrier)."""
    if barrier <= 0 or tau0 <= 0:
        raise ValidationError("barrier and tau0 must be positive")
    return tau0 * math.exp(barrier)


class MramArray:
    """Bit array that survives power loss; volatile peers do not.

    Cells remember their last write time so retention decay can age each
    cell by exactly its own elapsed time.
    """

    def __init__(self, rows: int, cols: int, barrier: float = 40.0, tau0: float = 1e-9,
                 params: NvmEnergyParams | None = None):
        if rows < 1 or cols < 1:
            raise ValidationError(f"rows/cols must be positive, got {rows}x{cols}")
        if barrier <= 0 or tau0 <= 0:
            raise ValidationError("barrier and tau0 must be positive")
        self.rows = rows
        self.cols = cols
        self.barrier = barrier
        self.tau0 = tau0
        self.params = params or NvmEnergyParams()
        self.bits = np.zeros((rows, cols), dtype=bool)
        self.last_write = np.zeros((rows, cols), dtype=np.float64)
        self.powered = True

    def _check_power(self):
        if not self.powered:
            raise PowerFaultError("MRAM access while powered down")

    def read_row(self, row: int, ledger=None) -> np.ndarray:
        self._check_power()
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} out of range [0, {self.rows})")
        if ledger is not None:
            ledger.charge("mram_read", self.cols * self.params.e_read_bit)
        return self.bits[row].copy()

    def write_bits(self, row: int, bits, now: float, ledger=None) -> None:
        self._check_power()
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} out of range [0, {self.rows})")
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (self.cols,):
            raise ValidationError(f"expected {self.cols} bits, got {bits.shape}")
        self.bits[row] = bits
        self.last_write[row] = now
        if ledger is not None:
            ledger.charge("mram_write", self.cols * write_energy_per_bit(self.barrier, self.params))

    def retention_time(self) -> float:
        return retention_time(self.barrier, self.tau0)

    def apply_retention(self, now: float, rng: np.random.Generator) -> int:
        """Flip each cell with p = 1 - exp(-elapsed/tau) (exponential
        waiting times); flipped cells restart their retention clock."""
        if np.any(now < self.last_write):
            raise ValidationError("now precedes a cell's last write time")
        tau = self.retention_time()
        elapsed = now - self.last_write
        p = 1.0 - np.exp(-elapsed / tau)
        flips = rng.random(self.bits.shape) < p
        self.bits ^= flips
        self.last_write[flips] = now
        return int(flips.sum())

    def power_down(self) -> None:
        self.powered = False

    def power_up(self) -> None:
        self.powered = True

    def power_cycle(self) -> None:
        """Cut and restore power. Bits and write timestamps persist."""
        self.power_down()
        self.power_up()

    def copy(self) -> "MramArray":
        dup = MramArray(self.rows, self.cols, self.barrier, self.tau0, self.params)
        dup.bits = self.bits.copy()
        dup.last_write = self.last_write.copy()
        dup.powered = self.powered
        return dup


def save_snapshot(array: MramArray, path) -> None:
    """Persist an array to disk: the software analog of non-volatility.

    Layout (little-endian): magic, u32 rows, u32 cols, f64 barrier,
    f64 tau0, packed bits (row-major), per-cell last_write as f64.
    """
    header = SNAPSHOT_MAGIC + struct.pack("<IIdd", array.rows, array.cols,
                                          array.barrier, array.tau0)
    packed = np.packbits(array.bits, axis=None).tobytes()
    stamps = array.last_write.astype("<f8").tobytes()
    Path(path).write_bytes(header + packed + stamps)


def load_snapshot(path, params: NvmEnergyParams | None = None) -> MramArray:
    raw = Path(path).read_bytes()
    if not raw.startswith(SNAPSHOT_MAGIC):
        raise ValidationError(f"{path} is not an MRAM snapshot (bad magic)")
    off = len(SNAPSHOT_MAGIC)
    rows, cols, barrier, tau0 = struct.unpack_from("<IIdd", raw, off)
    off += struct.calcsize("<IIdd")
    n = rows * cols
    n_packed = (n + 7) // 8
    packed = np.frombuffer(raw, dtype=np.uint8, count=n_packed, offset=off)
    off += n_packed
    stamps = np.frombuffer(raw, dtype="<f8", count=n, offset=off)
    array = MramArray(rows, cols, barrier, tau0, params)
    array.bits = np.unpackbits(packed, count=n).astype(bool).reshape(rows, cols)
    array.last_write = stamps.reshape(rows, cols).copy()
    return array
