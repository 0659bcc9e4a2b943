"""Dense operator algebra on tensor-product Hilbert spaces.

Basis convention: mode 1 is the leftmost (slowest varying) tensor factor and,
for a two-level mode, index 0 is |0> = |down> and index 1 is |1> = |up>.
Operators are plain ``numpy`` complex arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_ATOL = 1e-10

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.T.copy()  # |1><0|
SIGMA_X = SIGMA_MINUS + SIGMA_PLUS
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)  # |1><1| - |0><0|
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModeLayout:
    """Local dimensions of the modes, in tensor-factor order."""

    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if not dims:
            raise ValueError("a layout needs at least one mode")
        if any(d < 2 for d in dims):
            raise ValueError(f"local dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "mode_dims", dims)

    @classmethod
    def qubits(cls, n: int) -> ModeLayout:
        return cls((2,) * n)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.mode_dims))

    def index(self, occupations) -> int:
        """Flat basis index of a product state given per-mode occupations."""
        occupations = tuple(occupations)
        if len(occupations) != self.n_modes:
            raise ValueError("one occupation per mode is required")
        return int(np.ravel_multi_index(occupations, self.mode_dims))


def _as_layout(layout) -> ModeLayout:
    return layout if isinstance(layout, ModeLayout) else ModeLayout(tuple(layout))


def embed(local_op, mode_index: int, layout) -> np.ndarray:
    """Place ``local_op`` on mode ``mode_index`` (1-based), identity elsewhere."""
    layout = _as_layout(layout)
    local_op = np.asarray(local_op, dtype=complex)
    if not 1 <= mode_index <= layout.n_modes:
        raise ValueError(f"mode_index {mode_index} outside 1..{layout.n_modes}")
    d = layout.mode_dims[mode_index - 1]
    if local_op.shape != (d, d):
        raise ValueError(
            f"operator of shape {local_op.shape} does not fit mode {mode_index} "
            f"of local dimension {d}"
        )
    factors = [np.eye(n, dtype=complex) for n in layout.mode_dims]
    factors[mode_index - 1] = local_op
    return reduce(np.kron, factors)


def ladder_ops(local_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated bosonic annihilation and creation operators."""
    if local_dim < 2:
        raise ValueError(f"local_dim must be >= 2, got {local_dim}")
    a = np.diag(np.sqrt(np.arange(1, local_dim)), k=1).astype(complex)
    return a, a.conj().T


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= atol


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Each eigenvector is rephased so that its largest-magnitude component is
    real and positive; ties go to the lowest basis index.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian within 1e-10")
    evals, evecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    mags = np.abs(evecs)
    for k in range(evecs.shape[1]):
        col = mags[:, k]
        pivot = int(np.flatnonzero(col >= col.max() - 1e-10)[0])
        evecs[:, k] *= np.conj(evecs[pivot, k]) / col[pivot]
    return evals, evecs


def basis_state(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())
