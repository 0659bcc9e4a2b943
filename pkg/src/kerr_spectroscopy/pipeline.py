"""Config-driven sweep: spectrum, peaks, transitions, artifacts and manifest."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import Transition, transition_table
from .artifacts import (
    RunManifest,
    atomic_write,
    render_svg,
    sha256_file,
    spectrum_csv,
    transitions_csv,
    write_peak_report,
)
from .config import RunConfig
from .spectroscopy import PeakSet, Spectrum, assign_peaks, detect_peaks, run_sweep

log = logging.getLogger(__name__)

ARTIFACT_NAMES = {
    "csv": "spectrum.csv",
    "svg": "spectrum.svg",
    "transitions": "transitions.csv",
    "peaks": "peaks.json",
}
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SweepResult:
    spectrum: Spectrum
    peaks: PeakSet
    table: list[Transition]


def analyse(cfg: RunConfig, workers: int | None = None) -> SweepResult:
    """Run the sweep of ``cfg`` and assign its peaks."""
    params = cfg.system_params()
    table = transition_table(params)
    spec = run_sweep(params, cfg.sweep_plan(), cfg.solver, workers=workers or cfg.workers)
    prominence, radius, tol = cfg.peak_settings()
    peaks = assign_peaks(detect_peaks(spec, prominence, radius), table, tol)
    return SweepResult(spec, peaks, table)


def write_artifacts(cfg: RunConfig, result: SweepResult, out_dir, duration: float) -> RunManifest:
    out = Path(out_dir)
    written = {}
    if cfg.write_csv:
        written["csv"] = atomic_write(out / ARTIFACT_NAMES["csv"], spectrum_csv(result.spectrum).encode())
    if cfg.write_svg:
        svg = render_svg(result.spectrum, result.peaks, result.table)
        written["svg"] = atomic_write(out / ARTIFACT_NAMES["svg"], svg)
    if cfg.write_transitions:
        data = transitions_csv(result.table).encode()
        written["transitions"] = atomic_write(out / ARTIFACT_NAMES["transitions"], data)
    if cfg.write_peaks:
        written["peaks"] = write_peak_report(result.peaks, out / ARTIFACT_NAMES["peaks"])
    spec = result.spectrum
    diagnostics = {}
    if spec.trace_drift is not None:
        diagnostics = {
            "max_trace_drift": float(np.max(spec.trace_drift)),
            "max_hermiticity_drift": float(np.max(spec.hermiticity_drift)),
        }
    manifest = RunManifest(
        config_sha256=cfg.digest(),
        tool_version=__version__,
        duration_s=round(duration, 3),
        artifacts={path.name: sha256_file(path) for path in written.values()},
        diagnostics=diagnostics,
    )
    manifest.write(out / MANIFEST_NAME)
    return manifest


def run(cfg: RunConfig, out_dir=None, workers: int | None = None) -> tuple[SweepResult, RunManifest]:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    start = time.perf_counter()
    result = analyse(cfg, workers)
    duration = time.perf_counter() - start
    log.info("sweep of %d points took %.1f s", len(result.spectrum), duration)
    return result, write_artifacts(cfg, result, out, duration)
