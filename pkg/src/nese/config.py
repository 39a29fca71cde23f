"""INI-style run and scene configuration parsing.

Flat key = value files with sections, chosen for diff-friendliness.
See README for the full key reference; keys that mirror published
parameters are marked there as [paper], the rest as artifact defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .energy import HarvesterSpec, constant_trace, load_harvest_trace, periodic_trace
from .engine import NeseConfig
from .errors import ValidationError
from .nvm import NvmEnergyParams
from .scenes import SceneEvent, SceneSpec


@dataclass
class RunConfig:
    engine: NeseConfig
    barrier: float = 40.0
    tau0: float = 1e-9
    nvm_params: NvmEnergyParams = field(default_factory=NvmEnergyParams)
    frame_period: float = 33.3e-3
    e_xnor: float = 1e-15
    e_transfer_per_pixel: float = 10e-12
    harvester: HarvesterSpec | None = None
    decay: bool = False
    frames_dir: str | None = None
    pattern: str = "*.pgm"
    scene_path: str | None = None
    output_dir: str = "out"
    seed: int = 0
    strict_mode: bool = False
    sweep_box_sizes: tuple[int, ...] = (3, 5, 7)
    sweep_precisions: tuple[int, ...] = (1, 2, 3, 4)

    def validate(self) -> None:
        self.engine.validate(self.strict_mode)
        if self.frames_dir is None and self.scene_path is None:
            raise ValidationError("config needs [input] frames_dir or scene")


def _parser(path) -> configparser.ConfigParser:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"config file not found: {p}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read(p)
    return cp


def _get(cp, section, key, cast, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    try:
        return cast(raw)
    except ValueError:
        raise ValidationError(f"[{section}] {key} = {raw!r} is not a valid {cast.__name__}")


def _bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _threshold(raw: str) -> float:
    if raw.lower() in ("inf", "infinity"):
        return math.inf
    return int(raw)


def _int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.split(",") if tok.strip())


def _parse_trace(raw: str, length_hint: int = 10000) -> list[float]:
    if raw.startswith("constant:"):
        return constant_trace(float(raw.split(":", 1)[1]), length_hint)
    if raw.startswith("periodic:"):
        high, low, period = raw.split(":", 1)[1].split(",")
        return periodic_trace(float(high), float(low), int(period), length_hint)
    return load_harvest_trace(raw)


def load_run_config(path) -> RunConfig:
    cp = _parser(path)
    engine = NeseConfig(
        box_size=_get(cp, "engine", "box_size", int, 3),
        precision=_get(cp, "engine", "precision", int, 2),
        threshold_pixels=_get(cp, "engine", "threshold_pixels", _threshold, 1),
        time_tau=_get(cp, "engine", "time_tau", int, 4),
        half_band=_get(cp, "engine", "half_band", _bool, False),
        update_changed_rows_only=_get(cp, "engine", "update_changed_rows_only", _bool, False),
    )
    nvm_params = NvmEnergyParams(
        e_read_bit=_get(cp, "nvm", "e_read_bit", float, 0.1e-12),
        e_write_bit_40kt=_get(cp, "nvm", "e_write_bit_40kt", float, 2e-12),
        p_mram_read=_get(cp, "nvm", "p_mram_read", float, 1e-6),
    )
    cfg = RunConfig(
        engine=engine,
        barrier=_get(cp, "nvm", "barrier", float, 40.0),
        tau0=_get(cp, "nvm", "tau0", float, 1e-9),
        nvm_params=nvm_params,
        frame_period=_get(cp, "energy", "frame_period", float, 33.3e-3),
        e_xnor=_get(cp, "energy", "e_xnor", float, 1e-15),
        e_transfer_per_pixel=_get(cp, "energy", "e_transfer_per_pixel", float, 10e-12),
        decay=_get(cp, "harvester", "decay", _bool, False),
        frames_dir=_get(cp, "input", "frames_dir", str, None),
        pattern=_get(cp, "input", "pattern", str, "*.pgm"),
        scene_path=_get(cp, "input", "scene", str, None),
        output_dir=_get(cp, "output", "dir", str, "out"),
        seed=_get(cp, "run", "seed", int, 0),
        strict_mode=_get(cp, "run", "strict_mode", _bool, False),
        sweep_box_sizes=_get(cp, "sweep", "box_sizes", _int_list, (3, 5, 7)),
        sweep_precisions=_get(cp, "sweep", "precisions", _int_list, (1, 2, 3, 4)),
    )
    if cp.has_section("harvester") and cp.has_option("harvester", "capacity"):
        trace_raw = _get(cp, "harvester", "trace", str, "constant:0")
        cfg.harvester = HarvesterSpec(
            capacity=_get(cp, "harvester", "capacity", float, 0.0),
            harvest_trace=_parse_trace(trace_raw),
            power_on_threshold=_get(cp, "harvester", "power_on_threshold", float, 0.0),
            frame_period=cfg.frame_period,
        )
    cfg.validate()
    return cfg


def load_scene_spec(path) -> SceneSpec:
    cp = _parser(path)
    if not cp.has_section("scene"):
        raise ValidationError(f"{path}: missing [scene] section")
    spec = SceneSpec(
        width=_get(cp, "scene", "width", int, 600),
        height=_get(cp, "scene", "height", int, 600),
        length=_get(cp, "scene", "length", int, 1),
        background_level=_get(cp, "scene", "background_level", int, 64),
        noise=_get(cp, "scene", "noise", _bool, False),
    )
    for section in cp.sections():
        if not section.startswith("event"):
            continue
        kind = _get(cp, section, "kind", str, None)
        if kind is None:
            raise ValidationError(f"[{section}] missing kind")
        rect_raw = _get(cp, section, "rect", str, None)
        rect = tuple(_int_list(rect_raw)) if rect_raw else None
        if rect is not None and len(rect) != 4:
            raise ValidationError(f"[{section}] rect needs 4 components x,y,w,h")
        velocity = _get(cp, section, "velocity", _int_list, (1, 0))
        if len(velocity) != 2:
            raise ValidationError(f"[{section}] velocity needs 2 components dx,dy")
        spec.events.append(SceneEvent(
            kind=kind,
            frame_range=(_get(cp, section, "start", int, 0),
                         _get(cp, section, "end", int, spec.length)),
            level_delta=_get(cp, section, "level_delta", int, 0),
            rect=rect,
            velocity=tuple(velocity),
        ))
    return spec
