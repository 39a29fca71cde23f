"""Run orchestration shared by the CLI and the HTTP service: single
runs, 12-configuration sweeps, scene generation, and table rendering.

All artifacts are deterministic for a fixed (config, seed): JSON is
emitted with sorted keys and no timestamps.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import energy as energy_mod
from .config import RunConfig, load_scene_spec
from .energy import CATEGORIES, detection_power, is_extrapolated, simulate_intermittent, xnor_count
from .engine import NeseConfig, NeseEngine, StepResult
from .errors import ValidationError
from .frames import Frame, load_sequence, write_mask_pgm, write_pgm
from .metrics import score_mask, sweep_report
from .scenes import generate
from .sensor import build_box_grid

UNCALIBRATED_NOTE = ("MRAM read/write, XNOR, and transfer energy constants are "
                     "order-of-magnitude placeholders (uncalibrated)")


def _load_input(cfg: RunConfig):
    """Return (frames, truths-or-None) from the configured input source."""
    if cfg.frames_dir is not None:
        src = Path(cfg.frames_dir)
        if not src.is_dir():
            raise ValidationError(f"input directory not found: {src}")
        return load_sequence(src, cfg.pattern), None
    spec = load_scene_spec(cfg.scene_path)
    return generate(spec, cfg.seed)


def _build_engine(cfg: RunConfig, first_frame: Frame, engine_cfg: NeseConfig | None = None) -> NeseEngine:
    if cfg.strict_mode and (first_frame.width, first_frame.height) != (600, 600):
        raise ValidationError("strict mode requires 600x600 frames")
    return NeseEngine(
        engine_cfg or cfg.engine, first_frame,
        nvm_params=cfg.nvm_params, barrier=cfg.barrier, tau0=cfg.tau0,
        frame_period=cfg.frame_period, e_xnor=cfg.e_xnor,
        e_transfer_per_pixel=cfg.e_transfer_per_pixel, strict=cfg.strict_mode,
    )


def _execute(cfg: RunConfig, engine_cfg: NeseConfig | None = None):
    """Run one configuration over the configured input.

    Returns (engine, results dict frame->StepResult, truths, extras).
    """
    frames, truths = _load_input(cfg)
    engine = _build_engine(cfg, frames[0], engine_cfg)
    extras = {"power_cycles": 0, "skipped_frames": [], "off_intervals": [], "retention_flips": 0}
    if cfg.harvester is not None:
        report = simulate_intermittent(engine, frames[1:], cfg.harvester, cfg.seed, decay=cfg.decay)
        # report indexes frames[1:] from 0; shift to sequence indices
        results = {t + 1: r for t, r in report.results.items()}
        extras.update(
            power_cycles=report.power_cycles,
            skipped_frames=[t + 1 for t in report.skipped_frames],
            off_intervals=[(a + 1, b + 1) for a, b in report.off_intervals],
            retention_flips=report.retention_flips,
        )
    else:
        results = {f.index: engine.step(f) for f in frames[1:]}
    return engine, results, truths, extras


def _score_results(engine: NeseEngine, results: dict[int, StepResult], truths) -> dict:
    if truths is None:
        return {}
    scores = [score_mask(r.change_mask, truths[t], engine.grid) for t, r in sorted(results.items())]
    if not scores:
        return {}
    return {
        "mean_f1": sum(s.f1 for s in scores) / len(scores),
        "mean_iou": sum(s.iou for s in scores) / len(scores),
    }


def _summary(cfg: RunConfig, engine_cfg: NeseConfig, engine: NeseEngine,
             results: dict[int, StepResult], truths, extras) -> dict:
    event_frames = sorted(t for t, r in results.items() if r.sensor_mode_entered)
    update_frames = sorted(t for t, r in results.items() if r.background_updated)
    summary = {
        "box_size": engine_cfg.box_size,
        "precision": engine_cfg.precision,
        "threshold_pixels": ("inf" if math.isinf(engine_cfg.threshold_pixels)
                              else int(engine_cfg.threshold_pixels)),
        "time_tau": engine_cfg.time_tau,
        "n_frames": len(results) + 1,
        "event_frames": event_frames,
        "sensor_mode_entries": len(event_frames),
        "background_update_frames": update_frames,
        "energy_totals_j": {cat: engine.ledger.totals[cat] for cat in CATEGORIES},
        "total_joules": engine.ledger.total(),
        "detection_power_w": detection_power(engine_cfg.box_size, engine_cfg.precision)
        if engine_cfg.box_size in (3, 5, 7) and engine_cfg.precision <= 4 else None,
        "detection_power_extrapolated": is_extrapolated(engine_cfg.precision),
        "power_cycles": extras["power_cycles"],
        "skipped_frames": extras["skipped_frames"],
        "off_intervals": extras["off_intervals"],
        "retention_flips": extras["retention_flips"],
        "notes": [UNCALIBRATED_NOTE],
    }
    summary.update(_score_results(engine, results, truths))
    return summary


def _write_energy_csv(path, results: dict[int, StepResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "category", "joules"])
        for t in sorted(results):
            for cat in CATEGORIES:
                writer.writerow([t, cat, repr(results[t].energy.totals[cat])])


def run_simulation(cfg: RunConfig) -> dict:
    """Execute one run; write masks, energy CSV, and JSON summary."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    engine, results, truths, extras = _execute(cfg)
    for t, r in sorted(results.items()):
        write_mask_pgm(r.change_mask, out / f"mask_{t:04d}.pgm")
    _write_energy_csv(out / "energy.csv", results)
    summary = _summary(cfg, cfg.engine, engine, results, truths, extras)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _sweep_one(cfg: RunConfig, box: int, precision: int) -> tuple[tuple[int, int], dict]:
    engine_cfg = dataclasses.replace(cfg.engine, box_size=box, precision=precision)
    engine, results, truths, extras = _execute(cfg, engine_cfg)
    row = {
        "f1": None,
        "iou": None,
        "total_joules": engine.ledger.total(),
        "detection_power_w": detection_power(box, precision),
        "extrapolated": is_extrapolated(precision),
        "sensor_mode_entries": sum(1 for r in results.values() if r.sensor_mode_entered),
    }
    scored = _score_results(engine, results, truths)
    if scored:
        row["f1"] = scored["mean_f1"]
        row["iou"] = scored["mean_iou"]
    return (box, precision), row


def run_sweep(cfg: RunConfig) -> list[dict]:
    """Run every configured (box_size, precision) combination on the same
    input and emit the sweep report as CSV and JSON."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    combos = [(b, p) for b in cfg.sweep_box_sizes for p in cfg.sweep_precisions]
    workers = max(1, int(os.environ.get("NESE_THREADS", "4")))
    results: dict[tuple[int, int], dict] = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for key, row in pool.map(lambda bp: _sweep_one(cfg, *bp), combos):
            results[key] = row
    rows = sweep_report(results)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    (out / "sweep.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")
    return rows


def generate_scene(scene_path, out_dir, seed: int = 0) -> dict:
    """Generate a scene's frames and ground-truth masks into out_dir."""
    spec = load_scene_spec(scene_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames, masks = generate(spec, seed)
    for t, (frame, mask) in enumerate(zip(frames, masks)):
        write_pgm(frame, out / f"frame_{t:04d}.pgm")
        write_mask_pgm(mask, out / f"truth_{t:04d}.pgm")
    return {"frames": len(frames), "width": spec.width, "height": spec.height,
            "out_dir": str(out)}


def render_tables() -> str:
    """Reproduce the calibration tables as aligned text."""
    lines = ["Box-size properties (600x600 array)",
             f"{'Box':<6}{'ON':>4}{'OFF':>6}{'Disc':>6}{'Power(uW)':>12}{'Boxes':>8}"]
    for n in (3, 5, 7):
        grid = build_box_grid(600, 600, n)
        uw = energy_mod.BOX_SENSE_POWER_W[n] * 1e6
        lines.append(f"{n}x{n:<4}{grid.on_count:>4}{grid.off_count:>6}"
                     f"{grid.disconnect_count:>6}{uw:>12.2f}{grid.n_centers:>8}")
    lines.append("")
    lines.append("Event-detection power and comparator counts (600x600 array)")
    lines.append(f"{'Box':<6}{'Precision':>10}{'XNORs':>9}{'Power(mW)':>12}  Note")
    for n in (3, 5, 7):
        for p in (1, 2, 3, 4):
            note = "extrapolated" if is_extrapolated(p) else "measured"
            lines.append(f"{n}x{n:<4}{p:>10}{xnor_count(n, p):>9}"
                         f"{detection_power(n, p) * 1e3:>12.1f}  {note}")
    return "\n".join(lines) + "\n"
