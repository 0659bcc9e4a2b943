"""Probe-detuning sweeps, peak detection and assignment to transitions."""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .analytic import Transition
from .hamiltonian import QUBIT_LAYOUT, SystemParams, build_probe_drive
from .lindblad import (
    IntegrationError,
    SolverConfig,
    collapse_operators,
    evolve,
    excitation_probability,
)

log = logging.getLogger(__name__)

DEFAULT_PROMINENCE = 0.02


class SweepError(RuntimeError):
    def __init__(self, delta: float, cause: Exception):
        super().__init__(f"sweep failed at delta = {delta / (2 * math.pi):.6g} MHz: {cause}")
        self.delta = delta


@dataclass(frozen=True)
class SweepPlan:
    """Detuning grid in rad/us and evolution time in us."""

    delta_min: float
    delta_max: float
    n_points: int
    T: float
    observable_mode: int = 4
    initial_occupations: tuple[int, ...] = (0, 0, 0, 0)

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not self.delta_min < self.delta_max:
            raise ValueError("delta_min must be below delta_max")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not 1 <= self.observable_mode <= 4:
            raise ValueError("observable_mode must be in 1..4")
        if len(self.initial_occupations) != 4 or any(o not in (0, 1) for o in self.initial_occupations):
            raise ValueError("initial_occupations must be four 0/1 values")

    @property
    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.delta_max - self.delta_min) / (self.n_points - 1)


@dataclass(frozen=True)
class Spectrum:
    deltas: np.ndarray
    p_e: np.ndarray
    params: SystemParams
    solver: SolverConfig
    trace_drift: np.ndarray | None = None
    hermiticity_drift: np.ndarray | None = None

    def __post_init__(self):
        if len(self.deltas) != len(self.p_e):
            raise ValueError("deltas and p_e differ in length")
        if np.any(np.diff(self.deltas) <= 0):
            raise ValueError("deltas must be strictly increasing")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.deltas.tolist(), self.p_e.tolist()))

    def __len__(self):
        return len(self.deltas)


def initial_state(occupations=(0, 0, 0, 0)) -> np.ndarray:
    """Pure-state density matrix of a computational basis state."""
    rho = np.zeros((QUBIT_LAYOUT.dim, QUBIT_LAYOUT.dim), dtype=complex)
    i = QUBIT_LAYOUT.index(tuple(occupations))
    rho[i, i] = 1.0
    return rho


def _probe(params, delta, T, cfg, mode, occupations=(0, 0, 0, 0)):
    p = params.with_probe_detuning(delta)
    H = build_probe_drive(p)
    collapse = collapse_operators(p.gamma, QUBIT_LAYOUT)
    traj = evolve(initial_state(occupations), H, collapse, T, cfg)
    states = traj.states
    trace = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1)))
    herm = float(np.max(np.abs(states - states.conj().transpose(0, 2, 1))))
    return excitation_probability(traj.final, mode, QUBIT_LAYOUT), trace, herm


def probe_point(params: SystemParams, delta: float, T: float, cfg: SolverConfig, mode: int = 4) -> float:
    """P_e on ``mode`` after evolving |dddd> for time T at probe detuning ``delta``."""
    return _probe(params, delta, T, cfg, mode)[0]


def _probe_chunk(args):
    params, deltas, T, cfg, mode, occupations = args
    out = []
    for delta in deltas:
        try:
            out.append(_probe(params, delta, T, cfg, mode, occupations))
        except IntegrationError as exc:
            raise SweepError(delta, exc) from exc
    return out


def run_sweep(params: SystemParams, plan: SweepPlan, cfg: SolverConfig, workers: int = 1) -> Spectrum:
    """Evolve every detuning of ``plan`` independently and collect P_e.

    With ``workers > 1`` the grid is split into contiguous chunks evaluated in
    separate processes; results are reassembled in detuning order.
    """
    if params.gamma > 0 and plan.spacing > params.gamma / 3:
        warnings.warn(
            f"sweep spacing {plan.spacing:.3g} rad/us exceeds gamma/3 = {params.gamma / 3:.3g}; "
            "peaks may be under-resolved",
            stacklevel=2,
        )
    deltas = plan.deltas
    if workers <= 1:
        values = _probe_chunk((params, deltas, plan.T, cfg, plan.observable_mode, plan.initial_occupations))
    else:
        chunks = np.array_split(deltas, workers)
        jobs = [
            (params, c, plan.T, cfg, plan.observable_mode, plan.initial_occupations)
            for c in chunks
            if len(c)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = [v for part in pool.map(_probe_chunk, jobs) for v in part]
    values = np.array(values, dtype=float).reshape(-1, 3)
    return Spectrum(deltas, values[:, 0], params, cfg, values[:, 1], values[:, 2])


@dataclass(frozen=True)
class Peak:
    delta: float
    height: float
    assigned: tuple[str, ...] | None = None
    assignment_error: float = math.inf

    @property
    def merged(self) -> bool:
        return self.assigned is not None and len(self.assigned) > 1


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...] = ()
    prominence: float = DEFAULT_PROMINENCE
    merge_radius: float = 0.0

    def __iter__(self):
        return iter(self.peaks)

    def __len__(self):
        return len(self.peaks)

    def __getitem__(self, i):
        return self.peaks[i]

    @property
    def deltas(self) -> np.ndarray:
        return np.array([p.delta for p in self.peaks])

    def dominant(self, n: int) -> list[Peak]:
        """The ``n`` highest peaks, in detuning order."""
        top = sorted(self.peaks, key=lambda p: p.height, reverse=True)[:n]
        return sorted(top, key=lambda p: p.delta)


def _parabolic_vertex(x, y, i) -> tuple[float, float]:
    if i == 0 or i == len(y) - 1:
        return float(x[i]), float(y[i])
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom >= 0:
        return float(x[i]), float(y1)
    offset = 0.5 * (y0 - y2) / denom
    h = x[i + 1] - x[i]
    return float(x[i] + offset * h), float(y1 - 0.25 * (y0 - y2) * offset)


def detect_peaks(spec: Spectrum, prominence: float = DEFAULT_PROMINENCE, merge_radius: float | None = None) -> PeakSet:
    """Local maxima whose prominence exceeds ``prominence`` times the dynamic range.

    Maxima closer than ``merge_radius`` (default: gamma) keep only the
    higher one; positions are refined with a three-point parabola.
    """
    if len(spec) < 3:
        raise ValueError("peak detection needs at least 3 points")
    radius = spec.params.gamma if merge_radius is None else merge_radius
    x, y = spec.deltas, spec.p_e
    span = float(y.max() - y.min())
    if span <= 0:
        return PeakSet((), prominence, radius)
    idx, _ = find_peaks(y, prominence=prominence * span)
    kept: list[int] = []
    for i in sorted(idx, key=lambda i: y[i], reverse=True):
        if all(abs(x[i] - x[j]) >= radius for j in kept):
            kept.append(i)
    peaks = []
    for i in sorted(kept):
        pos, height = _parabolic_vertex(x, y, i)
        peaks.append(Peak(pos, height))
    return PeakSet(tuple(peaks), prominence, radius)


def _clusters(table: list[Transition], tolerance: float) -> list[list[Transition]]:
    rows = sorted(table, key=lambda r: r.energy)
    groups = [[rows[0]]]
    for row in rows[1:]:
        if row.energy - groups[-1][-1].energy < tolerance:
            groups[-1].append(row)
        else:
            groups.append([row])
    return groups


def assign_peaks(peaks: PeakSet, table: list[Transition], tolerance: float | None = None) -> PeakSet:
    """Label each peak with the transitions it sits on.

    A peak takes the nearest transition energy within ``tolerance`` (default:
    the merge radius used at detection).  Transitions closer together than
    ``tolerance`` cannot be told apart, so the whole group is reported.
    """
    if not table:
        raise ValueError("transition table is empty")
    tol = peaks.merge_radius if tolerance is None else tolerance
    groups = _clusters(table, tol)
    out = []
    for peak in peaks:
        best, err = None, math.inf
        for group in groups:
            d = min(abs(peak.delta - row.energy) for row in group)
            if d < err:
                best, err = group, d
        if best is not None and err <= tol:
            labels = tuple(row.label for row in best)
            out.append(Peak(peak.delta, peak.height, labels, err))
        else:
            out.append(Peak(peak.delta, peak.height, None, math.inf))
    return PeakSet(tuple(out), peaks.prominence, peaks.merge_radius)
