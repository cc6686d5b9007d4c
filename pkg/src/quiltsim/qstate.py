"""Dense multi-qubit states, few-qubit unitaries, partial traces and the
closed-form two-qubit collision propagators.

Conventions
-----------
* A register of ``n`` qubits is a complex vector of length ``2**n``.  Qubit 0
  is the most significant bit of the basis index, so ``|b_0 b_1 ... b_{n-1}>``
  sits at index ``sum(b_k << (n - 1 - k))``.
* Bit value 1 is the excited state.  ``sigma_z |1> = +|1>``,
  ``sigma_+ = |1><0|`` and ``sigma_y = -i sigma_+ + i sigma_-``.
* Matrices returned by :func:`partial_trace` and :func:`two_qubit_propagator`
  use the same register ordering (``|00>, |01>, |10>, |11>`` for two qubits).
  The excitation-major layout used by :class:`quiltsim.measures.DensityMatrix4`
  is the reverse of this ordering.
* hbar = 1; couplings and frequencies are angular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = -1j * SIGMA_PLUS + 1j * SIGMA_MINUS
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
IDENTITY2 = np.eye(2, dtype=complex)

KINDS = ("ee", "xy")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def tensor(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of the given matrices (or vectors), left to right."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.all(np.abs(m - m.conj().T) <= tol))


@dataclass(frozen=True)
class RegisterState:
    """Normalized pure state of ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 1 << self.n_qubits:
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, n_qubits: int, excited: Iterable[int] = ()) -> "RegisterState":
        """Computational basis state with the listed qubits in ``|1>``."""
        index = 0
        for q in excited:
            _check_index(q, n_qubits)
            index |= 1 << (n_qubits - 1 - q)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def product(cls, qubits: Sequence[np.ndarray]) -> "RegisterState":
        """Product of single-qubit vectors given as ``(amp_0, amp_1)``."""
        amps = tensor(*[np.asarray(q, dtype=complex) for q in qubits])
        return cls(len(qubits), amps)

    def norm_error(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)


@dataclass(frozen=True)
class LocalUnitary:
    """A unitary acting on the ordered qubits ``targets``."""

    targets: tuple
    matrix: np.ndarray

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        m = np.asarray(self.matrix, dtype=complex)
        if not 1 <= len(targets) <= 3:
            raise ValueError("arity must be 1, 2 or 3")
        if len(set(targets)) != len(targets):
            raise ValueError(f"repeated target index in {targets}")
        dim = 1 << len(targets)
        if m.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match {len(targets)} targets")
        err = np.max(np.abs(m.conj().T @ m - np.eye(dim)))
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def arity(self) -> int:
        return len(self.targets)


def _check_index(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise IndexError(f"qubit index {q} out of range for {n} qubits")


def apply_matrix(amplitudes: np.ndarray, n_qubits: int, targets: Sequence[int],
                 matrix: np.ndarray) -> np.ndarray:
    """Apply a ``2^k x 2^k`` matrix to the given qubits of a raw amplitude vector.

    No unitarity or normalization checks; used by the oracle's inner loop.
    """
    k = len(targets)
    psi = amplitudes.reshape((2,) * n_qubits)
    psi = np.moveaxis(psi, targets, range(k))
    shape = psi.shape
    psi = (matrix @ psi.reshape(1 << k, -1)).reshape(shape)
    psi = np.moveaxis(psi, range(k), targets)
    return np.ascontiguousarray(psi).reshape(-1)


def apply_local_unitary(state: RegisterState, u: LocalUnitary) -> RegisterState:
    """Return ``u |state>``."""
    for q in u.targets:
        _check_index(q, state.n_qubits)
    amps = apply_matrix(state.amplitudes, state.n_qubits, u.targets, u.matrix)
    return RegisterState(state.n_qubits, amps)


def pair_marginals(amplitudes: np.ndarray, n_qubits: int,
                   pairs: Sequence[tuple]) -> np.ndarray:
    """Reduced density matrices of many qubit pairs of a pure state.

    Returns an array of shape ``(len(pairs), 4, 4)`` in register ordering with
    the first index of each pair as the more significant qubit.  The global
    density matrix is never formed.
    """
    psi = np.asarray(amplitudes).reshape((2,) * n_qubits)
    out = np.empty((len(pairs), 4, 4), dtype=complex)
    for k, (i, j) in enumerate(pairs):
        m = np.moveaxis(psi, (i, j), (0, 1)).reshape(4, -1)
        out[k] = m @ m.conj().T
    return out


def single_marginals(amplitudes: np.ndarray, n_qubits: int) -> np.ndarray:
    """All single-qubit reduced density matrices, shape ``(n, 2, 2)``."""
    psi = np.asarray(amplitudes).reshape((2,) * n_qubits)
    out = np.empty((n_qubits, 2, 2), dtype=complex)
    for q in range(n_qubits):
        m = np.moveaxis(psi, q, 0).reshape(2, -1)
        out[q] = m @ m.conj().T
    return out


def partial_trace(state_or_density, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the qubits ``keep`` (in the order given).

    Accepts a :class:`RegisterState` or a density matrix of size ``2^n``.
    """
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated index in keep={keep}")
    if isinstance(state_or_density, RegisterState):
        n = state_or_density.n_qubits
        for q in keep:
            _check_index(q, n)
        psi = state_or_density.amplitudes.reshape((2,) * n)
        m = np.moveaxis(psi, keep, range(len(keep))).reshape(1 << len(keep), -1)
        return m @ m.conj().T

    rho = np.asarray(state_or_density, dtype=complex)
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or 1 << n != dim:
        raise ValueError(f"density matrix shape {rho.shape} is not 2^n square")
    if not is_hermitian(rho, 1e-10) or abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError("density matrix must be Hermitian with unit trace")
    for q in keep:
        _check_index(q, n)
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    order = keep + drop
    t = np.transpose(t, order + [n + q for q in order])
    kd, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(kd, dd, kd, dd)
    return np.einsum("ajbj->ab", t)


# ---------------------------------------------------------------------------
# Two-qubit collision propagators
# ---------------------------------------------------------------------------

def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown Hamiltonian kind {kind!r}; expected one of {KINDS}")


def _rabi_block(diag: float, off: complex, t: float) -> np.ndarray:
    """``exp(-i t [[diag, off], [conj(off), -diag]])`` in closed form."""
    delta = np.sqrt(diag * diag + abs(off) ** 2)
    c = np.cos(delta * t)
    # sin(delta t) / delta, finite at delta = 0
    sd = t * np.sinc(delta * t / np.pi)
    return np.array([[c - 1j * sd * diag, -1j * sd * off],
                     [-1j * sd * np.conj(off), c + 1j * sd * diag]])


def propagator_blocks(kind: str, coupling: float, theta: float, omega_b: float,
                      omega_c: float, t: float) -> tuple:
    """Parity blocks of the two-qubit collision propagator.

    Returns ``(single, double)`` where ``single`` acts on ``(|10>, |01>)`` and
    ``double`` on ``(|11>, |00>)`` (first letter = old qubit B).
    """
    _check_kind(kind)
    if t < 0 or coupling < 0:
        raise ValueError("duration and coupling must be non-negative")
    half_diff = 0.5 * (omega_b - omega_c)
    half_sum = 0.5 * (omega_b + omega_c)
    single = _rabi_block(half_diff, coupling, t)
    if kind == "ee":
        double = np.diag([np.exp(-1j * half_sum * t), np.exp(1j * half_sum * t)])
    else:
        double = _rabi_block(half_sum, coupling * np.exp(-2j * theta), t)
    return single, double


def blocks_to_matrix(single: np.ndarray, double: np.ndarray) -> np.ndarray:
    """Assemble the 4x4 register-ordered matrix from parity blocks."""
    u = np.zeros((4, 4), dtype=complex)
    # register indices: |00>=0, |01>=1, |10>=2, |11>=3
    s_idx = (2, 1)
    d_idx = (3, 0)
    for a in range(2):
        for b in range(2):
            u[s_idx[a], s_idx[b]] = single[a, b]
            u[d_idx[a], d_idx[b]] = double[a, b]
    return u


def two_qubit_propagator(kind: str, coupling: float, theta: float, omega_b: float,
                         omega_c: float, t: float,
                         targets: tuple = (0, 1)) -> LocalUnitary:
    """``exp(-i t (H_int + omega_b/2 Z x I + omega_c/2 I x Z))`` for one collision.

    ``kind='ee'`` is the excitation exchange coupling
    ``coupling * (s+ s- + s- s+)``.  ``kind='xy'`` is
    ``coupling * (cos(theta) X + sin(theta) Y)^{x2}``.
    """
    single, double = propagator_blocks(kind, coupling, theta, omega_b, omega_c, t)
    return LocalUnitary(targets, blocks_to_matrix(single, double))


def two_qubit_hamiltonian(kind: str, coupling: float, theta: float, omega_b: float,
                          omega_c: float) -> np.ndarray:
    """Full 4x4 Hamiltonian in register ordering (used by tests and the oracle)."""
    _check_kind(kind)
    if kind == "ee":
        h = coupling * (tensor(SIGMA_PLUS, SIGMA_MINUS) + tensor(SIGMA_MINUS, SIGMA_PLUS))
    else:
        p = np.cos(theta) * SIGMA_X + np.sin(theta) * SIGMA_Y
        h = coupling * tensor(p, p)
    h = h + 0.5 * omega_b * tensor(SIGMA_Z, IDENTITY2)
    h = h + 0.5 * omega_c * tensor(IDENTITY2, SIGMA_Z)
    return h
