"""Lindblad master-equation integration for time-dependent Hamiltonians.

    d rho/dt = -i[H(t), rho] + sum_j (L_j rho L_j^dagger - 1/2 {L_j^dagger L_j, rho})
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hamiltonian import TimeDependentHamiltonian
from .operators import SIGMA_Z, ModeLayout, embed, ladder_ops

log = logging.getLogger(__name__)

TRACE_FAIL = 1e-6
NEGATIVITY_WARN = 1e-7
NEGATIVITY_FAIL = 1e-5
RK4_STABILITY = 0.1


class IntegrationError(RuntimeError):
    """The integrated state left the set of density matrices."""

    def __init__(self, time: float, message: str):
        super().__init__(f"integration failed at t = {time:.6g} us: {message}")
        self.time = time


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls.

    ``method`` is ``"rk4"`` (fixed step, the step is the smaller of ``dt_max``
    and ``0.1 / (max|H_ij| + gamma)``) or ``"rk45"`` (adaptive Dormand-Prince
    with ``rel_tol``/``abs_tol`` and steps capped at ``dt_max``).
    States are checked and recorded every ``record_stride`` steps.
    """

    dt_max: float = 0.01
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    method: str = "rk4"
    record_stride: int = 1000

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown method {self.method!r}; use 'rk4' or 'rk45'")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


def collapse_operators(gamma: float, layout: ModeLayout) -> list[np.ndarray]:
    """sqrt(gamma) times the lowering operator of every mode."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    ops = []
    for j, d in enumerate(layout.mode_dims, start=1):
        a, _ = ladder_ops(d)
        ops.append(math.sqrt(gamma) * embed(a, j, layout))
    return ops


def lindblad_rhs(rho, h_t, collapse) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    h_t = np.asarray(h_t, dtype=complex)
    d = rho.shape[0]
    if rho.shape != (d, d) or h_t.shape != (d, d):
        raise ValueError(f"shape mismatch: rho {rho.shape}, H {h_t.shape}")
    out = -1j * (h_t @ rho - rho @ h_t)
    for L in collapse:
        L = np.asarray(L, dtype=complex)
        if L.shape != (d, d):
            raise ValueError(f"collapse operator of shape {L.shape} does not match dimension {d}")
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def check_density_matrix(rho, time: float = 0.0, trace_atol: float = TRACE_FAIL) -> float:
    """Raise :class:`IntegrationError` if ``rho`` is not a density matrix.

    Returns the smallest eigenvalue.  Negativity between 1e-7 and 1e-5 is
    logged as a warning.
    """
    rho = np.asarray(rho)
    drift = abs(np.trace(rho) - 1)
    if not np.isfinite(drift) or drift > trace_atol:
        raise IntegrationError(time, f"trace drift {drift:.3g}")
    hermitian_part = 0.5 * (rho + rho.conj().T)
    lowest = float(np.linalg.eigvalsh(hermitian_part)[0])
    if lowest < -NEGATIVITY_FAIL:
        raise IntegrationError(time, f"negative eigenvalue {lowest:.3g}")
    if lowest < -NEGATIVITY_WARN:
        log.warning("density matrix eigenvalue %.3g at t = %.6g us", lowest, time)
    return lowest


def _triplets(m, atol=0.0):
    m = np.asarray(m, dtype=complex)
    r, c = np.nonzero(np.abs(m) > atol)
    return r.astype(np.int64), c.astype(np.int64), m[r, c].astype(np.complex128)


@dataclass(frozen=True)
class _Packed:
    """Operator data in the layout the compiled kernels expect."""

    args: tuple

    @classmethod
    def build(cls, H: TimeDependentHamiltonian, collapse) -> _Packed:
        d = H.dim
        heff = np.array(H.static, dtype=complex)
        jr, jc, jv, jptr = [], [], [], [0]
        for L in collapse:
            L = np.asarray(L, dtype=complex)
            if L.shape != (d, d):
                raise ValueError(f"collapse operator of shape {L.shape} does not match dimension {d}")
            heff -= 0.5j * (L.conj().T @ L)
            r, c, v = _triplets(L)
            jr.extend(r)
            jc.extend(c)
            jv.extend(v)
            jptr.append(len(jr))
        sr, sc, sv = _triplets(heff)
        dr, dc, dv, dk = [], [], [], []
        for m, term in enumerate(H.drives):
            r, c, v = _triplets(term.op)
            dr.extend(r)
            dc.extend(c)
            dv.extend(v)
            dk.extend([m] * len(r))
        lam = np.array([t.strength for t in H.drives], dtype=float)
        freq = np.array([t.frequency for t in H.drives], dtype=float)
        args = (
            sr, sc, sv,
            np.array(dr, np.int64), np.array(dc, np.int64), np.array(dv, np.complex128), np.array(dk, np.int64),
            lam, freq,
            np.array(jr, np.int64), np.array(jc, np.int64), np.array(jv, np.complex128), np.array(jptr, np.int64),
        )
        return cls(args)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_records, d, d)
    steps: int
    rejected: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def rk4_step_size(H: TimeDependentHamiltonian, collapse, T: float, cfg: SolverConfig) -> tuple[float, int]:
    """Step size and step count for the fixed-step method."""
    gamma = max((float(np.abs(L).max(initial=0.0)) ** 2 for L in collapse), default=0.0)
    scale = H.max_element() + gamma
    dt = cfg.dt_max if scale == 0 else min(cfg.dt_max, RK4_STABILITY / scale)
    n = max(1, math.ceil(T / dt - 1e-9))
    return T / n, n


def evolve(rho0, H: TimeDependentHamiltonian, collapse, T: float, cfg: SolverConfig) -> Trajectory:
    """Integrate from t = 0 to t = T, recording every ``cfg.record_stride`` steps.

    Raises :class:`IntegrationError` when the trace drifts by more than 1e-6
    or an eigenvalue drops below -1e-5 at a recorded time.
    """
    rho = np.array(rho0, dtype=complex)
    d = H.dim
    if rho.shape != (d, d):
        raise ValueError(f"initial state of shape {rho.shape} does not match dimension {d}")
    if not np.allclose(rho, rho.conj().T, atol=1e-10):
        raise ValueError("initial state is not Hermitian")
    check_density_matrix(rho, 0.0, trace_atol=1e-9)
    if T < 0:
        raise ValueError("T must be >= 0")
    packed = _Packed.build(H, collapse)
    times, states = [0.0], [rho.copy()]
    if T == 0:
        return Trajectory(np.array(times), np.array(states), 0)
    if cfg.method == "rk4":
        dt, n = rk4_step_size(H, collapse, T, cfg)
        done = 0
        while done < n:
            chunk = min(cfg.record_stride, n - done)
            _kernels.rk4_steps(rho, done * dt, dt, chunk, *packed.args)
            done += chunk
            t = T if done == n else done * dt
            check_density_matrix(rho, t)
            times.append(t)
            states.append(rho.copy())
        return Trajectory(np.array(times), np.array(states), n)
    t = 0.0
    h = min(cfg.dt_max, 1e-3 * T if T > 0 else cfg.dt_max)
    total = rejected = 0
    while t < T:
        t, h, acc, rej = _kernels.dopri5_steps(
            rho, t, T, h, cfg.dt_max, cfg.rel_tol, cfg.abs_tol, cfg.record_stride, *packed.args
        )
        total += acc
        rejected += rej
        if h < 1e-14 * max(T, 1.0):
            raise IntegrationError(t, "adaptive step size underflow")
        check_density_matrix(rho, t)
        times.append(t)
        states.append(rho.copy())
    return Trajectory(np.array(times), np.array(states), total, rejected)


def excitation_probability(rho, mode: int, layout: ModeLayout) -> float:
    """Tr[rho (1 + sigma_z^(mode)) / 2] for a two-level mode, clamped to [0, 1]."""
    if not 1 <= mode <= layout.n_modes:
        raise ValueError(f"mode {mode} outside 1..{layout.n_modes}")
    if layout.mode_dims[mode - 1] != 2:
        raise ValueError(f"mode {mode} is not a qubit")
    proj = embed(0.5 * (np.eye(2) + SIGMA_Z), mode, layout)
    p = float(np.real(np.trace(np.asarray(rho) @ proj)))
    return min(1.0, max(0.0, p))


def ground_state(layout: ModeLayout) -> np.ndarray:
    rho = np.zeros((layout.dim, layout.dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho
