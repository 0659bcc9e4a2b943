"""Closed-form eigenpairs of the two invariant blocks of H0.

Block A is spanned by |uudd>, |dudd>, |dduu>, |uduu> and holds E1..E4.
Block B is spanned by |uddd>, |dddd> and holds E5, E6.  States are returned
as 16-component vectors in the computational basis (mode 1 leftmost,
index 1 = up).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import FRAME_ATOL, QUBIT_LAYOUT, SystemParams
from .operators import SIGMA_X, embed

DIM = 16
UUDD = QUBIT_LAYOUT.index((1, 1, 0, 0))
DUDD = QUBIT_LAYOUT.index((0, 1, 0, 0))
DDUU = QUBIT_LAYOUT.index((0, 0, 1, 1))
UDUU = QUBIT_LAYOUT.index((1, 0, 1, 1))
UDDD = QUBIT_LAYOUT.index((1, 0, 0, 0))
DDDD = QUBIT_LAYOUT.index((0, 0, 0, 0))

SUBSPACE_A = (UUDD, DUDD, DDUU, UDUU)
SUBSPACE_B = (UDDD, DDDD)

SIGMA_X_2 = embed(SIGMA_X, 2, QUBIT_LAYOUT)


@dataclass(frozen=True)
class CouplingCombos:
    J_plus: float
    J_minus: float
    J_plus_prime: float
    J_minus_prime: float

    @property
    def Jt_plus(self) -> float:
        return self.J_plus + self.J_minus

    @property
    def Jt_minus(self) -> float:
        return self.J_plus - self.J_minus


def coupling_combos(J) -> CouplingCombos:
    J = np.asarray(J, dtype=float)
    j12, j13, j14, j23, j24, j34 = J[0, 1], J[0, 2], J[0, 3], J[1, 2], J[1, 3], J[2, 3]
    return CouplingCombos(
        J_plus=(j12 - j13 - j14 - j23 - j24 + j34) / 4,
        J_minus=(-j12 + j13 + j14 - j23 - j24 + j34) / 4,
        J_plus_prime=(-j12 - j13 - j14 + j23 + j24 + j34) / 4,
        J_minus_prime=(j12 + j13 + j14 + j23 + j24 + j34) / 4,
    )


@dataclass(frozen=True)
class Eigenpair:
    label: int
    energy: float
    state: np.ndarray
    normalizer: float = float("nan")


def subspace_a_hamiltonian(g, lam, Jt_plus, Jt_minus) -> np.ndarray:
    """The 4x4 block in the order (|uudd>, |dudd>, |dduu>, |uduu>)."""
    jp = (Jt_plus + Jt_minus) / 2
    jm = (Jt_plus - Jt_minus) / 2
    return np.array(
        [
            [jp, lam / 2, g, 0],
            [lam / 2, jm, 0, 0],
            [g, 0, jp, lam / 2],
            [0, 0, lam / 2, jm],
        ],
        dtype=float,
    )


def _block_a_vector(symmetric: bool, alpha: float, beta: float) -> np.ndarray:
    # symmetric:  alpha (|uudd> + |dduu>) + beta (|dudd> + |uduu>)
    # otherwise:  alpha (|dduu> - |uudd>) + beta (|dudd> - |uduu>)
    v = np.zeros(DIM)
    if symmetric:
        v[UUDD], v[DDUU], v[DUDD], v[UDUU] = alpha, alpha, beta, beta
    else:
        v[UUDD], v[DDUU], v[DUDD], v[UDUU] = -alpha, alpha, beta, -beta
    return v / np.linalg.norm(v)


def _normalizer(alpha: float, beta: float) -> float:
    # 1/|printed vector|, where the printed vector has unit weight on |uudd>
    return abs(alpha) / math.sqrt(2 * alpha**2 + 2 * beta**2)


def _check_lambda(lam: float) -> None:
    if not lam >= 0:
        raise ValueError(f"the Rabi drive lambda must be >= 0, got {lam}")


def subspace_a_exact(g: float, lam: float, Jt_plus: float, Jt_minus: float) -> list[Eigenpair]:
    """Exact E1..E4 and their eigenvectors.

    The vector ratios are evaluated in whichever of their two algebraically
    equivalent forms avoids cancellation, and without dividing by lambda, so
    lambda = 0 yields the limiting dressed states.
    """
    _check_lambda(lam)
    s1, s2 = g + Jt_minus, g - Jt_minus
    r1, r2 = math.hypot(s1, lam), math.hypot(s2, lam)
    energies = (
        (g + Jt_plus + r1) / 2,
        (-g + Jt_plus + r2) / 2,
        (g + Jt_plus - r1) / 2,
        (-g + Jt_plus - r2) / 2,
    )
    # (alpha, beta) with beta / alpha equal to the coefficient ratio of each state
    coeffs = (
        (r1 + s1, lam) if s1 >= 0 else (lam, r1 - s1),  # (r1 - s1) / lam
        (lam, -(s2 + r2)) if s2 >= 0 else (r2 - s2, -lam),  # -(s2 + r2) / lam
        (lam, -(s1 + r1)) if s1 >= 0 else (r1 - s1, -lam),  # -(s1 + r1) / lam
        (r2 + s2, lam) if s2 >= 0 else (lam, r2 - s2),  # (r2 - s2) / lam
    )
    pairs = []
    for label, (energy, (alpha, beta)) in enumerate(zip(energies, coeffs), start=1):
        symmetric = label in (1, 3)
        pairs.append(
            Eigenpair(label, energy, _block_a_vector(symmetric, alpha, beta), _normalizer(alpha, beta))
        )
    return pairs


# Shape of each canonical state once lambda -> 0, independent of the signs of g +/- Jt_minus.
CANONICAL_FORMS = {
    1: "dressed+",  # (|uudd> + |dduu>) dominated, energy g + (Jt+ + Jt-)/2
    2: "bright-",  # (|dudd> - |uduu>) dominated, energy (Jt+ - Jt-)/2
    3: "bright+",  # (|dudd> + |uduu>) dominated, energy (Jt+ - Jt-)/2
    4: "dressed-",  # (|dduu> - |uudd>) dominated, energy -g + (Jt+ + Jt-)/2
}


@dataclass(frozen=True)
class SimplifiedEigenpair:
    label: int
    energy: float
    state: np.ndarray
    form: str
    printed_label: int


@dataclass(frozen=True)
class SimplifiedSubspaceA:
    pairs: tuple[SimplifiedEigenpair, ...]
    regime_warning: str | None = None

    def by_label(self, label: int) -> SimplifiedEigenpair:
        return next(p for p in self.pairs if p.label == label)


def relabel_map(g: float, Jt_minus: float) -> dict[int, int]:
    """Canonical label -> label of the printed exact formula it corresponds to.

    The printed E1/E3 swap when g + Jt_minus < 0 and E2/E4 swap when
    g - Jt_minus < 0.
    """
    mapping = {1: 1, 2: 2, 3: 3, 4: 4}
    if g + Jt_minus < 0:
        mapping[1], mapping[3] = 3, 1
    if g - Jt_minus < 0:
        mapping[2], mapping[4] = 4, 2
    return mapping


def subspace_a_exact_canonical(g, lam, Jt_plus, Jt_minus) -> list[Eigenpair]:
    """Exact eigenpairs carrying the canonical (relabeled) labels."""
    exact = {p.label: p for p in subspace_a_exact(g, lam, Jt_plus, Jt_minus)}
    out = []
    for label, printed in relabel_map(g, Jt_minus).items():
        p = exact[printed]
        out.append(Eigenpair(label, p.energy, p.state, p.normalizer))
    return out


def subspace_a_simplified(g: float, lam: float, Jt_plus: float, Jt_minus: float) -> SimplifiedSubspaceA:
    """First-order-in-lambda states and zeroth-order energies, canonically labeled."""
    _check_lambda(lam)
    s1, s2 = g + Jt_minus, g - Jt_minus
    warning = None
    if min(abs(s1), abs(s2)) <= 2 * abs(lam):
        warning = (
            f"outside the small-lambda regime: |g + Jt-| = {abs(s1):.4g}, "
            f"|g - Jt-| = {abs(s2):.4g}, lambda = {lam:.4g}"
        )
    e_dressed_plus = g + (Jt_plus + Jt_minus) / 2
    e_bright = (Jt_plus - Jt_minus) / 2
    e_dressed_minus = -g + (Jt_plus + Jt_minus) / 2
    # the bright states have a weight 2 s / lambda on the driven pair; scaling the
    # whole vector by lambda keeps lambda = 0 finite
    states = {
        1: _block_a_vector(True, 2 * s1, lam),
        3: _block_a_vector(True, lam, -2 * s1),
        2: _block_a_vector(False, lam, -2 * s2),
        4: _block_a_vector(False, 2 * s2, lam),
    }
    energies = {1: e_dressed_plus, 2: e_bright, 3: e_bright, 4: e_dressed_minus}
    mapping = relabel_map(g, Jt_minus)
    pairs = tuple(
        SimplifiedEigenpair(k, energies[k], states[k], CANONICAL_FORMS[k], mapping[k]) for k in (1, 2, 3, 4)
    )
    return SimplifiedSubspaceA(pairs, warning)


def dressed_state_regime(g: float, lam: float, Jt_minus: float, ratio: float = 0.1) -> bool:
    """True when both lambda and Jt_minus are small next to g."""
    return abs(lam) <= ratio * abs(g) and abs(Jt_minus) <= ratio * abs(g)


@dataclass(frozen=True)
class SubspaceB:
    E5: float
    E6: float
    theta: float
    k: float
    epsilon: float
    r: float
    states: tuple[np.ndarray, np.ndarray]


def _check_block_a_frame(params: SystemParams) -> None:
    if abs(params.omega[0] - params.omega_rot[0]) > FRAME_ATOL:
        raise ValueError("the closed forms need omega_rot1 = omega_1")


def subspace_b(params: SystemParams) -> SubspaceB:
    lam = params.lambda_rabi
    _check_lambda(lam)
    c = coupling_combos(params.J)
    w, rot = params.omega, params.omega_rot
    epsilon = c.J_plus_prime - c.J_minus_prime
    k = -(w[1] + w[2] + w[3] - rot[1] - rot[2] - rot[3]) + c.J_plus_prime + c.J_minus_prime
    r = math.hypot(epsilon, lam)
    theta = 0.5 * math.atan2(lam, epsilon)
    e5 = np.zeros(DIM)
    e5[UDDD], e5[DDDD] = math.cos(theta), math.sin(theta)
    e6 = np.zeros(DIM)
    e6[UDDD], e6[DDDD] = -math.sin(theta), math.cos(theta)
    return SubspaceB((k + r) / 2, (k - r) / 2, theta, k, epsilon, r, (e5, e6))


@dataclass(frozen=True)
class AnalyticEigensystem:
    energies: np.ndarray  # E1..E6 at indices 0..5
    states: np.ndarray  # columns are |E1>..|E6>
    combos: CouplingCombos
    epsilon: float
    r: float
    theta: float
    k: float
    normalizers: tuple[float, float, float, float]
    block_a_shift: float = 0.0
    labels: tuple[str, ...] = field(default=("E1", "E2", "E3", "E4", "E5", "E6"))

    def energy(self, n: int) -> float:
        return float(self.energies[n - 1])

    def state(self, n: int) -> np.ndarray:
        return self.states[:, n - 1]


def block_a_shift(params: SystemParams) -> float:
    """Common diagonal offset between H0 restricted to block A and the closed-form block.

    The offset is (omega_2 - omega_rot2 - omega_3 + omega_rot3 - omega_4 + omega_rot4)/2
    on every block-A diagonal entry, which vanishes under the frame conditions.
    """
    d = params.omega - params.omega_rot
    return 0.5 * (d[0] + d[1] - d[2] - d[3])


def analytic_eigensystem(params: SystemParams) -> AnalyticEigensystem:
    _check_block_a_frame(params)
    c = coupling_combos(params.J)
    pairs = subspace_a_exact(params.g, params.lambda_rabi, c.Jt_plus, c.Jt_minus)
    shift = block_a_shift(params)
    b = subspace_b(params)
    energies = np.array([p.energy + shift for p in pairs] + [b.E5, b.E6])
    states = np.column_stack([p.state for p in pairs] + list(b.states))
    return AnalyticEigensystem(
        energies=energies,
        states=states,
        combos=c,
        epsilon=b.epsilon,
        r=b.r,
        theta=b.theta,
        k=b.k,
        normalizers=tuple(p.normalizer for p in pairs),
        block_a_shift=shift,
    )


@dataclass(frozen=True)
class Transition:
    upper: int
    lower: int
    energy: float
    matrix_element: float

    @property
    def label(self) -> str:
        return f"E{self.upper}-E{self.lower}"


def transition_table(params: SystemParams, system: AnalyticEigensystem | None = None) -> list[Transition]:
    """E_n - E_m and <E_n|sigma_x^(2)|E_m> for n in 1..4, m in 5, 6, sorted by energy."""
    system = analytic_eigensystem(params) if system is None else system
    rows = []
    for n in (1, 2, 3, 4):
        for m in (5, 6):
            element = system.state(n).conj() @ SIGMA_X_2 @ system.state(m)
            rows.append(Transition(n, m, system.energy(n) - system.energy(m), float(element.real)))
    return sorted(rows, key=lambda row: (row.energy, row.upper, row.lower))
