"""Concurrence and tangle of two-qubit states.

Two-qubit density matrices are stored in the excitation-major layout
``(|11>, |10>, |01>, |00>)`` with the first letter for the first qubit.  In
this layout the structured families are

* ``X``: nonzero entries only on the diagonal and at (2,3), (1,4) and their
  mirrors (1-based),
* ``PHI``: an X state with ``rho14 = 0``,
* ``Q``: a PHI state with ``rho11 = 0``,
* ``BOX``: first row and column zero.

``Q`` is contained in every other family, ``PHI`` in ``X``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ZERO_TOL = 1e-12
RANK_TOL = 16 * np.finfo(float).eps
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10

YY = np.array([[0, 0, 0, -1],
               [0, 0, 1, 0],
               [0, 1, 0, 0],
               [-1, 0, 0, 0]], dtype=complex)

# reverses the basis order: register <-> excitation-major
_REV = np.arange(4)[::-1]

# zero patterns of the structured families (True = must vanish), 0-based
_X_ZERO = np.ones((4, 4), dtype=bool)
for _i, _j in [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1), (0, 3), (3, 0)]:
    _X_ZERO[_i, _j] = False
_PHI_ZERO = _X_ZERO.copy()
_PHI_ZERO[0, 3] = _PHI_ZERO[3, 0] = True
_Q_ZERO = _PHI_ZERO.copy()
_Q_ZERO[0, 0] = True
_BOX_ZERO = np.zeros((4, 4), dtype=bool)
_BOX_ZERO[0, :] = _BOX_ZERO[:, 0] = True


class Structure(enum.IntEnum):
    """Sparsity family of a two-qubit density matrix."""

    Q = 0
    PHI = 1
    X = 2
    BOX = 3
    GENERAL = 4


_ZERO_PATTERNS = {
    Structure.Q: _Q_ZERO,
    Structure.PHI: _PHI_ZERO,
    Structure.X: _X_ZERO,
    Structure.BOX: _BOX_ZERO,
}


def fits_structure(entries: np.ndarray, structure: Structure,
                   tol: float = ZERO_TOL) -> bool:
    """True if the entries vanish wherever ``structure`` requires."""
    if structure == Structure.GENERAL:
        return True
    pattern = _ZERO_PATTERNS[Structure(structure)]
    return bool(np.all(np.abs(np.asarray(entries)[pattern]) <= tol))


def classify_structure(entries: np.ndarray, tol: float = ZERO_TOL) -> Structure:
    """Most specific family the entries belong to."""
    for s in (Structure.Q, Structure.PHI, Structure.X, Structure.BOX):
        if fits_structure(entries, s, tol):
            return s
    return Structure.GENERAL


@dataclass(frozen=True)
class DensityMatrix4:
    """Two-qubit density matrix (excitation-major layout) with a declared family."""

    entries: np.ndarray
    structure: Structure = Structure.GENERAL

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex, copy=True)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {np.trace(m).real!r} is not 1")
        w = np.linalg.eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise ValueError(f"density matrix has eigenvalue {w[0]:.3g} < 0")
        structure = Structure(self.structure)
        if not fits_structure(m, structure):
            raise ValueError(f"entries are inconsistent with structure {structure.name}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "structure", structure)

    @classmethod
    def from_register(cls, matrix: np.ndarray, structure: Structure | None = None):
        """Build from a register-ordered matrix (``|00>, |01>, |10>, |11>``)."""
        m = np.asarray(matrix, dtype=complex)[np.ix_(_REV, _REV)]
        if structure is None:
            structure = classify_structure(m)
        return cls(m, structure)

    @classmethod
    def classified(cls, entries: np.ndarray) -> "DensityMatrix4":
        return cls(entries, classify_structure(entries))

    def to_register(self) -> np.ndarray:
        return self.entries[np.ix_(_REV, _REV)].copy()

    def swapped(self) -> "DensityMatrix4":
        """The same state with the two qubits exchanged."""
        perm = np.array([0, 2, 1, 3])
        return DensityMatrix4(self.entries[np.ix_(perm, perm)], self.structure)

    def __getitem__(self, ij):
        """1-based entry access, ``rho[2, 3]``."""
        i, j = ij
        return self.entries[i - 1, j - 1]


@dataclass(frozen=True)
class TangleValue:
    """Concurrence ``C`` and tangle ``tau = C**2``."""

    concurrence: float

    def __post_init__(self):
        c = float(self.concurrence)
        if not -1e-12 <= c <= 1 + 1e-9:
            raise ValueError(f"concurrence {c!r} outside [0, 1]")
        object.__setattr__(self, "concurrence", min(max(c, 0.0), 1.0))

    @property
    def tau(self) -> float:
        return self.concurrence * self.concurrence

    C = property(lambda self: self.concurrence)


# ---------------------------------------------------------------------------
# General concurrence
# ---------------------------------------------------------------------------

def concurrence_general_batch(rhos: np.ndarray) -> np.ndarray:
    """Wootters concurrence for a stack of 4x4 density matrices.

    The square roots of the eigenvalues of ``rho rho~`` are the singular values
    of ``sqrt(rho) YY sqrt(rho)^*``.  Writing ``rho = F F^dag`` with
    ``F = V sqrt(w)`` from the spectral decomposition, they are the singular
    values of the complex symmetric matrix ``F^T YY F``.  Taking singular
    values directly keeps small ones accurate to machine precision instead of
    to its square root.  Eigenvalues below ``RANK_TOL`` times the trace are
    roundoff of an exactly rank-deficient state and are set to zero; left in,
    they would shift the concurrence by their square root.  Works in either
    basis ordering.
    """
    rhos = np.asarray(rhos, dtype=complex)
    single = rhos.ndim == 2
    if single:
        rhos = rhos[None]
    herm = 0.5 * (rhos + np.conj(np.swapaxes(rhos, -1, -2)))
    w, v = np.linalg.eigh(herm)
    if np.any(w < -PSD_TOL):
        bad = float(w.min())
        raise ValueError(f"input is not positive semidefinite (eigenvalue {bad:.3g})")
    floor = RANK_TOL * np.trace(herm, axis1=-2, axis2=-1).real[..., None]
    w = np.where(w > floor, w, 0.0)
    f = v * np.sqrt(w)[..., None, :]
    t = np.swapaxes(f, -1, -2) @ YY @ f
    s = np.linalg.svd(t, compute_uv=False)
    c = np.clip(s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3], 0.0, 1.0)
    return c[0] if single else c


def concurrence_general(rho) -> TangleValue:
    """Concurrence from the full Wootters construction (any two-qubit state)."""
    m = rho.entries if isinstance(rho, DensityMatrix4) else rho
    return TangleValue(float(concurrence_general_batch(m)))


# ---------------------------------------------------------------------------
# Structured fast paths
# ---------------------------------------------------------------------------

def _sqrt_prod(a, b):
    return np.sqrt(np.clip(a, 0.0, None) * np.clip(b, 0.0, None))


def concurrence_from_entries(pop: np.ndarray, coh: np.ndarray,
                             structure: np.ndarray) -> np.ndarray:
    """Vectorized structured concurrence.

    ``pop`` holds ``(rho11, rho22, rho33, rho44)`` per row and ``coh`` holds
    ``(rho23, rho14, rho24, rho34)``; ``structure`` the family codes.
    """
    pop = np.asarray(pop, dtype=float)
    coh = np.asarray(coh, dtype=complex)
    structure = np.asarray(structure)
    a23 = np.abs(coh[:, 0])
    a14 = np.abs(coh[:, 1])
    x_term = np.maximum(a23 - _sqrt_prod(pop[:, 0], pop[:, 3]),
                        a14 - _sqrt_prod(pop[:, 1], pop[:, 2]))
    phi_term = a23 - _sqrt_prod(pop[:, 0], pop[:, 3])
    c = np.where(structure == Structure.X, x_term,
                 np.where(structure == Structure.PHI, phi_term, a23))
    if np.any(structure == Structure.GENERAL):
        raise ValueError("structured concurrence needs a declared structure")
    return np.clip(2.0 * c, 0.0, 1.0)


def concurrence_structured(rho: DensityMatrix4) -> TangleValue:
    """Closed-form concurrence for X, PHI, Q and BOX states.

    * X: ``2 max(0, |r23| - sqrt(r11 r44), |r14| - sqrt(r22 r33))``
    * PHI: ``2 max(0, |r23| - sqrt(r11 r44))``
    * Q and BOX: ``2 |r23|``
    """
    s = rho.structure
    if s == Structure.GENERAL:
        raise ValueError("structured concurrence needs a declared structure")
    e = rho.entries
    r11, r22, r33, r44 = (e[k, k].real for k in range(4))
    a23 = abs(e[1, 2])
    if s == Structure.X:
        c = max(0.0, a23 - np.sqrt(max(r11 * r44, 0.0)),
                abs(e[0, 3]) - np.sqrt(max(r22 * r33, 0.0)))
    elif s == Structure.PHI:
        c = max(0.0, a23 - np.sqrt(max(r11 * r44, 0.0)))
    else:
        c = a23
    return TangleValue(min(2.0 * c, 1.0))


# ---------------------------------------------------------------------------
# Monogamy and reference states
# ---------------------------------------------------------------------------

def one_vs_rest_tangle(rho1: np.ndarray) -> float:
    """Tangle between one qubit and the rest of a globally pure state."""
    rho1 = np.asarray(rho1)
    return float(4.0 * np.linalg.det(rho1).real)


def ckw_residual(pair_tangles: Sequence[float], bipartite_tangle: float) -> float:
    """``tau(A | rest) - sum_k tau(A, A_k)``; non-negative for valid states."""
    return float(bipartite_tangle) - float(np.sum(pair_tangles))


def dicke_pair_density(n_total: int, n_up: int) -> DensityMatrix4:
    """Two-qubit marginal of the Dicke state with ``n_up`` excitations."""
    if n_total < 2:
        raise ValueError("need at least two qubits")
    if not 0 <= n_up <= n_total:
        raise ValueError(f"n_up={n_up} outside [0, {n_total}]")
    big, k = n_total, n_up
    norm = big * (big - 1)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = k * (k - 1) / norm
    m[1, 1] = m[2, 2] = m[1, 2] = m[2, 1] = k * (big - k) / norm
    m[3, 3] = (big - k) * (big - k - 1) / norm
    return DensityMatrix4.classified(m)


@dataclass(frozen=True)
class PairwiseTangleMatrix:
    """Symmetric matrix of pairwise tangles with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("tangle matrix must be square")
        if v.size and (v.min() < -1e-12 or v.max() > 1 + 1e-9):
            raise ValueError("tangles must lie in [0, 1]")
        if np.any(np.diag(v) != 0):
            raise ValueError("diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValueError("tangle matrix must be symmetric")
        v = np.clip(v, 0.0, 1.0)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "PairwiseTangleMatrix":
        return cls(np.zeros((n, n)))

    def off_diagonal(self) -> np.ndarray:
        return self.values[~np.eye(self.n, dtype=bool)]

    def __getitem__(self, ij):
        return self.values[ij]
