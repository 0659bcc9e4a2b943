"""Result files: spectrum CSV, transition table, peak report, SVG plot, manifest.

Every writer goes through :func:`atomic_write` (temp file then rename) and
produces byte-identical output for identical inputs.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .analytic import Transition
from .spectroscopy import PeakSet, Spectrum

TWO_PI = 2 * math.pi


def mhz(x: float) -> float:
    return x / TWO_PI


def atomic_write(path, data: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def spectrum_csv(spec: Spectrum) -> str:
    if len(spec) == 0:
        raise ValueError("spectrum is empty")
    rows = ["delta_mhz,p_e"]
    rows += [f"{mhz(d):.9g},{p:.9g}" for d, p in zip(spec.deltas, spec.p_e)]
    return "\n".join(rows) + "\n"


def write_spectrum_csv(spec: Spectrum, path) -> Path:
    """Header ``delta_mhz,p_e`` then one row per point, 9 significant digits."""
    return atomic_write(path, spectrum_csv(spec).encode("utf-8"))


def read_spectrum_csv(path) -> tuple[list[float], list[float]]:
    """(delta in MHz, p_e) columns of a file written by :func:`write_spectrum_csv`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "delta_mhz,p_e":
        raise ValueError(f"{path}: missing delta_mhz,p_e header")
    deltas, values = [], []
    for line in lines[1:]:
        d, p = line.split(",")
        deltas.append(float(d))
        values.append(float(p))
    return deltas, values


def transitions_csv(table: list[Transition]) -> str:
    rows = ["transition,energy_mhz,matrix_element"]
    rows += [f"{t.label},{mhz(t.energy):.9g},{t.matrix_element:.9g}" for t in table]
    return "\n".join(rows) + "\n"


def format_transitions(table: list[Transition]) -> str:
    """Human-readable table for the terminal."""
    out = [f"{'transition':<10} {'energy (MHz)':>14} {'<n|sx2|m>':>12}"]
    out += [f"{t.label:<10} {mhz(t.energy):>14.6f} {t.matrix_element:>12.6f}" for t in table]
    return "\n".join(out)


def peak_report(peaks: PeakSet) -> dict:
    return {
        "prominence": peaks.prominence,
        "merge_radius_mhz": mhz(peaks.merge_radius),
        "peaks": [
            {
                "delta_mhz": round(mhz(p.delta), 9),
                "height": round(p.height, 12),
                "assigned": list(p.assigned) if p.assigned else None,
                "assignment_error_mhz": None if math.isinf(p.assignment_error) else round(mhz(p.assignment_error), 9),
            }
            for p in peaks
        ],
    }


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")


def write_peak_report(peaks: PeakSet, path) -> Path:
    return atomic_write(path, _json_bytes(peak_report(peaks)))


def render_svg(spec: Spectrum, peaks: PeakSet, table: list[Transition], title: str | None = None) -> bytes:
    """P_e against detuning with analytic transitions as labelled vertical lines."""
    if len(spec) == 0:
        raise ValueError("spectrum is empty")
    with matplotlib.rc_context({"svg.hashsalt": "kerr-spectroscopy", "svg.fonttype": "path"}):
        fig = Figure(figsize=(7.0, 4.0))
        ax = fig.add_subplot()
        x = spec.deltas / TWO_PI
        ax.plot(x, spec.p_e, color="black", lw=1.0, label="$P_e$")
        top = max(float(spec.p_e.max()), 1e-12)
        lo, hi = x[0], x[-1]
        for k, t in enumerate(table):
            e = mhz(t.energy)
            ax.axvline(e, color="tab:red", lw=0.7, ls="--", gid=f"transition-{t.label}")
            if lo <= e <= hi:
                ax.annotate(
                    t.label, (e, top), xytext=(2, -10 - 9 * (k % 3)), textcoords="offset points",
                    fontsize=6, color="tab:red",
                )
        if len(peaks):
            ax.plot(
                [mhz(p.delta) for p in peaks], [p.height for p in peaks],
                ls="none", marker="v", color="tab:blue", ms=5, label="peaks", gid="peak-markers",
            )
        ax.set_xlim(lo, hi)
        ax.set_xlabel(r"$\Delta$ (MHz)")
        ax.set_ylabel(r"$P_e$")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left", fontsize=7)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def render_plot(spec: Spectrum, peaks: PeakSet, table: list[Transition], path, title: str | None = None) -> Path:
    return atomic_write(path, render_svg(spec, peaks, table, title))


@dataclass(frozen=True)
class RunManifest:
    config_sha256: str
    tool_version: str
    duration_s: float
    artifacts: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> bytes:
        return _json_bytes(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        return cls(**json.loads(text))

    def write(self, path) -> Path:
        return atomic_write(path, self.to_json())
