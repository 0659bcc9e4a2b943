"""Parameter record and Hamiltonian builders for four Kerr resonators.

All frequencies are angular, in rad/us; times are in us.  The qubit model
keeps the |0>, |1> levels of every resonator; the bosonic model keeps
``fock_cutoff + 1`` Fock levels per mode.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    ModeLayout,
    embed,
    ladder_ops,
)

N_MODES = 4
FRAME_ATOL = 1e-9
MIN_GAP = 1e-6

QUBIT_LAYOUT = ModeLayout.qubits(N_MODES)


class ParameterError(ValueError):
    """A named physical constraint on :class:`SystemParams` is violated."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


def _vec4(name, values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (N_MODES,):
        raise ParameterError("shape", f"{name} needs {N_MODES} entries, got {arr.size}")
    arr.setflags(write=False)
    return arr


def _frozen(values, shape, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(shape)
    arr.setflags(write=False)
    return arr


def coupling_matrix(J12=0.0, J13=0.0, J14=0.0, J23=0.0, J24=0.0, J34=0.0) -> np.ndarray:
    """Symmetric zero-diagonal cross-Kerr matrix from its six pair couplings."""
    J = np.zeros((N_MODES, N_MODES))
    for (i, j), v in zip(combinations(range(N_MODES), 2), (J12, J13, J14, J23, J24, J34)):
        J[i, j] = J[j, i] = v
    return J


def shifted_frequencies_from(omega_tilde, J) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    return np.asarray(omega_tilde, dtype=float) + 0.5 * J.sum(axis=1)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the four-resonator model.

    ``omega_tilde`` are the bare resonator frequencies; the shifted
    frequencies ``omega`` used by the qubit model are derived from them.
    ``lambda_drive`` defaults to ``(lambda_rabi / 2, lambda_probe, 0, 0)``.
    """

    omega_tilde: np.ndarray
    omega_rot: np.ndarray
    omega_drive: np.ndarray
    kerr: np.ndarray
    lambda_rabi: float
    lambda_probe: float
    g: float
    J: np.ndarray
    gamma: float
    lambda_drive: np.ndarray | None = None

    def __post_init__(self):
        set_ = object.__setattr__
        for name in ("omega_tilde", "omega_rot", "omega_drive", "kerr"):
            set_(self, name, _vec4(name, getattr(self, name)))
        J = np.array(self.J, dtype=float)
        if J.shape != (N_MODES, N_MODES):
            raise ParameterError("shape", f"J must be 4x4, got {J.shape}")
        set_(self, "J", _frozen(J, J.shape))
        if self.lambda_drive is None:
            lam = (self.lambda_rabi / 2, self.lambda_probe, 0.0, 0.0)
        else:
            lam = self.lambda_drive
        set_(self, "lambda_drive", _vec4("lambda_drive", lam))
        for name in ("lambda_rabi", "lambda_probe", "g", "gamma"):
            set_(self, name, float(getattr(self, name)))
        self.validate()

    @classmethod
    def from_shifted(
        cls,
        omega,
        J,
        *,
        g: float,
        lambda_rabi: float,
        lambda_probe: float,
        gamma: float,
        kerr=(0.0, 0.0, 0.0, 0.0),
        omega_rot=None,
        omega_drive=None,
        probe_detuning: float = 0.0,
        lambda_drive=None,
    ) -> SystemParams:
        """Build from shifted frequencies with the default frame choices.

        Defaults: rotating frame at the shifted frequencies, every drive at
        its mode's shifted frequency, and the probe (mode 2) detuned by
        ``probe_detuning``.
        """
        omega = np.asarray(omega, dtype=float)
        J = np.asarray(J, dtype=float)
        omega_tilde = omega - 0.5 * J.sum(axis=1)
        omega_rot = omega.copy() if omega_rot is None else np.asarray(omega_rot, dtype=float)
        drive = omega.copy() if omega_drive is None else np.array(omega_drive, dtype=float)
        drive[1] = drive[1] + probe_detuning
        return cls(
            omega_tilde=omega_tilde,
            omega_rot=omega_rot,
            omega_drive=drive,
            kerr=kerr,
            lambda_rabi=lambda_rabi,
            lambda_probe=lambda_probe,
            g=g,
            J=J,
            gamma=gamma,
            lambda_drive=lambda_drive,
        )

    @property
    def omega(self) -> np.ndarray:
        return shifted_frequencies_from(self.omega_tilde, self.J)

    @property
    def probe_detuning(self) -> float:
        """Delta = omega'_2 - omega_2."""
        return float(self.omega_drive[1] - self.omega[1])

    def with_probe_detuning(self, delta: float) -> SystemParams:
        drive = np.array(self.omega_drive)
        drive[1] = self.omega[1] + delta
        return self.replace(omega_drive=drive)

    def replace(self, **changes) -> SystemParams:
        if "lambda_drive" not in changes and ({"lambda_rabi", "lambda_probe"} & changes.keys()):
            changes["lambda_drive"] = None
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        J = self.J
        if not np.all(np.isfinite(J)) or np.max(np.abs(J - J.T)) > 0:
            raise ParameterError("J-symmetric", "cross-Kerr matrix must be finite and symmetric")
        if np.any(np.diag(J) != 0):
            raise ParameterError("J-zero-diagonal", "cross-Kerr matrix must have a zero diagonal")
        arrays = (self.omega_tilde, self.omega_rot, self.omega_drive, self.kerr, self.lambda_drive)
        scalars = (self.lambda_rabi, self.lambda_probe, self.g, self.gamma)
        if not all(np.all(np.isfinite(a)) for a in arrays) or not np.all(np.isfinite(scalars)):
            raise ParameterError("finite", "all parameters must be finite")
        if self.gamma < 0:
            raise ParameterError("gamma-nonnegative", f"gamma = {self.gamma} < 0")
        r = self.omega_rot
        lhs, rhs = r[0] + r[1], r[2] + r[3]
        if abs(lhs - rhs) > FRAME_ATOL:
            raise ParameterError(
                "rotating-frame-sum",
                f"omega_rot1 + omega_rot2 = {lhs!r} differs from omega_rot3 + omega_rot4 = {rhs!r}",
            )
        w = self.omega
        lhs, rhs = w[0] + w[1], w[2] + w[3]
        if abs(lhs - rhs) > FRAME_ATOL:
            raise ParameterError(
                "shifted-frequency-sum",
                f"omega_1 + omega_2 = {lhs!r} differs from omega_3 + omega_4 = {rhs!r}",
            )
        for i, j in combinations(range(N_MODES), 2):
            if abs(w[i] - w[j]) <= MIN_GAP:
                raise ParameterError(
                    "distinct-frequencies", f"omega_{i + 1} and omega_{j + 1} coincide"
                )


def shifted_frequencies(params: SystemParams) -> np.ndarray:
    """omega_j = omega_tilde_j + 1/2 sum_{i != j} J_ij."""
    return params.omega


@dataclass(frozen=True)
class DriveTerm:
    """strength * (op e^{i frequency t} + op^dagger e^{-i frequency t})."""

    op: np.ndarray
    strength: float
    frequency: float


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    static: np.ndarray
    drives: tuple[DriveTerm, ...] = ()
    layout: ModeLayout | None = None

    @property
    def dim(self) -> int:
        return self.static.shape[0]

    def at(self, t: float) -> np.ndarray:
        h = np.array(self.static, dtype=complex)
        for term in self.drives:
            phase = term.strength * np.exp(1j * term.frequency * t)
            h += phase * term.op + np.conj(phase) * term.op.conj().T
        return h

    def max_element(self) -> float:
        """Largest matrix-element magnitude over the static part and drive amplitudes."""
        amp = np.abs(self.static).max(initial=0.0)
        for term in self.drives:
            amp = max(amp, abs(term.strength) * np.abs(term.op).max(initial=0.0))
        return float(amp)


def _check_qubit_frame(params: SystemParams) -> None:
    if abs(params.omega_drive[0] - params.omega_rot[0]) > FRAME_ATOL:
        raise ParameterError(
            "rabi-drive-frame",
            "the qubit model needs omega'_1 = omega_rot1 so that the mode-1 drive is static",
        )


def build_qubit_h0(params: SystemParams) -> np.ndarray:
    """Static qubit-model Hamiltonian H0 on 16 dimensions."""
    params.validate()
    _check_qubit_frame(params)
    L = QUBIT_LAYOUT
    sz = [embed(SIGMA_Z, j, L) for j in range(1, 5)]
    detuning = params.omega - params.omega_rot
    h = sum(detuning[j] / 2 * sz[j] for j in range(4))
    h = h + params.lambda_rabi / 2 * embed(SIGMA_X, 1, L)
    raise_12 = embed(SIGMA_PLUS, 1, L) @ embed(SIGMA_PLUS, 2, L)
    lower_34 = embed(SIGMA_MINUS, 3, L) @ embed(SIGMA_MINUS, 4, L)
    four_body = raise_12 @ lower_34
    h = h + params.g * (four_body + four_body.conj().T)
    for i, j in combinations(range(4), 2):
        h = h + params.J[i, j] / 4 * (sz[i] @ sz[j])
    return h


def build_probe_drive(params: SystemParams) -> TimeDependentHamiltonian:
    """H0 plus the weak probe on mode 2 at frequency omega'_2 - omega_rot2."""
    h0 = build_qubit_h0(params)
    delta = float(params.omega_drive[1] - params.omega_rot[1])
    probe = DriveTerm(embed(SIGMA_MINUS, 2, QUBIT_LAYOUT), params.lambda_probe, delta)
    return TimeDependentHamiltonian(h0, (probe,), QUBIT_LAYOUT)


def build_bosonic_h(params: SystemParams, fock_cutoff: int) -> TimeDependentHamiltonian:
    """Rotating-frame resonator Hamiltonian truncated at ``fock_cutoff`` photons."""
    if fock_cutoff < 1:
        raise ValueError(f"fock_cutoff must be >= 1, got {fock_cutoff}")
    local = fock_cutoff + 1
    L = ModeLayout((local,) * N_MODES)
    a_local, _ = ladder_ops(local)
    a = [embed(a_local, j, L) for j in range(1, 5)]
    n = [op.conj().T @ op for op in a]
    h = np.zeros((L.dim, L.dim), dtype=complex)
    for j in range(4):
        h += (params.omega_tilde[j] - params.omega_rot[j]) * n[j]
        h += params.kerr[j] * (n[j] @ n[j])
    pair = a[0].conj().T @ a[1].conj().T @ a[2] @ a[3]
    h += params.g * (pair + pair.conj().T)
    for i, j in combinations(range(4), 2):
        h += params.J[i, j] * (n[i] @ n[j])
    drives = tuple(
        DriveTerm(a[j], float(params.lambda_drive[j]), float(params.omega_drive[j] - params.omega_rot[j]))
        for j in range(4)
        if params.lambda_drive[j] != 0
    )
    return TimeDependentHamiltonian(h, drives, L)
