"""Analytic propagation of pairwise reduced states through collision schedules.

:class:`PairState` stores, for every pair of qubits that has become
correlated, the entries of its two-qubit density matrix that a structured
family allows (populations ``rho11..rho44`` and coherences ``rho23, rho14,
rho24, rho34``, excitation-major layout).  A collision of an old qubit B with
a fresh qubit C touches only the pairs containing B, so each event costs
O(k) for k correlated partners and the global state is never formed.

Frame: entries are kept in the interaction picture of the free Hamiltonian
``sum_i omega_i Z_i / 2`` (every qubit evolves freely at all times, collisions
are back to back).  Idle qubits then never need updating.  For equal
frequencies and exchange coupling this is the usual rotating frame.  Tangles
do not depend on the frame; :meth:`PairState.pair_density` converts to the lab
frame on request.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .measures import (DensityMatrix4, PairwiseTangleMatrix, Structure,
                       concurrence_from_entries, fits_structure)
from .qstate import propagator_blocks
from .schemes import (CollisionEvent, ConcurrentGroups, OldPairBlock, Scheme,
                      SimultaneousCollision)

Q, PHI, X, BOX = int(Structure.Q), int(Structure.PHI), int(Structure.X), int(Structure.BOX)
_ERR = -1

# family of (A_i, B) and (A_i, C) after a collision, indexed by the family before
_NEXT = {
    ("ee", 0): np.array([Q, PHI, X, BOX]),
    ("ee", 1): np.array([PHI, PHI, X, _ERR]),
    ("xy", 0): np.array([X, X, X, _ERR]),
    ("xy", 1): np.array([X, X, X, _ERR]),
}
_NEW_PAIR = {("ee", 0): Q, ("ee", 1): PHI, ("xy", 0): X, ("xy", 1): X}

BASIS_TOL = 1e-12


class IncompatibleCollision(ValueError):
    """The collision would leave the structured families the engine tracks."""


def interaction_blocks(kind: str, coupling: float, theta: float, omega_b: float,
                       omega_c: float, t: float, clock: float) -> np.ndarray:
    """Propagator blocks of a collision in the interaction picture.

    Returns ``(s11, s12, s21, s22, d11, d12, d21, d22)`` for a collision that
    starts at global time ``clock``.  ``s`` acts on ``(|10>, |01>)`` and ``d``
    on ``(|11>, |00>)`` of (B, C).
    """
    single, double = propagator_blocks(kind, coupling, theta, omega_b, omega_c, t)
    half_diff = 0.5 * (omega_b - omega_c)
    half_sum = 0.5 * (omega_b + omega_c)
    out = np.empty(8, dtype=complex)
    for k, (block, e) in enumerate(((single, half_diff), (double, half_sum))):
        energies = np.array([e, -e])
        left = np.exp(1j * energies * (clock + t))
        right = np.exp(-1j * energies * clock)
        out[4 * k:4 * k + 4] = (left[:, None] * block * right[None, :]).reshape(-1)
    return out


def _swap_orientation(pop, coh, mask):
    """Exchange the two qubits of the rows selected by ``mask`` (in place)."""
    if not np.any(mask):
        return
    pop[mask, 1], pop[mask, 2] = pop[mask, 2].copy(), pop[mask, 1].copy()
    coh[mask, 0] = np.conj(coh[mask, 0])
    coh[mask, 2], coh[mask, 3] = coh[mask, 3].copy(), coh[mask, 2].copy()


def _pair_from_vectors(e: float, kappa: complex, v1: np.ndarray, v0: np.ndarray):
    """Image of ``[[e, kappa], [kappa*, 1 - e]]`` under ``|1> -> v1, |0> -> v0``."""
    cross = kappa * np.outer(v1, v0.conj())
    return (e * np.outer(v1, v1.conj()) + (1 - e) * np.outer(v0, v0.conj())
            + cross + cross.conj().T)


def new_pair_density(e_b: float, kappa_b: complex, new_bit: int,
                     blocks: np.ndarray) -> np.ndarray:
    """4x4 state of (B, C) after B (excitation ``e_b``, coherence ``kappa_b``)
    collides with a fresh C in ``|new_bit>``.  Excitation-major layout."""
    s11, s12, s21, s22, d11, d12, d21, d22 = blocks
    v1 = np.zeros(4, dtype=complex)
    v0 = np.zeros(4, dtype=complex)
    # basis order |11>, |10>, |01>, |00>
    if new_bit == 0:
        v1[1], v1[2] = s11, s21          # B=1: |10> -> s11|10> + s21|01>
        v0[3], v0[0] = d22, d12          # B=0: |00> -> d22|00> + d12|11>
    else:
        v1[0], v1[3] = d11, d21          # B=1: |11> -> d11|11> + d21|00>
        v0[1], v0[2] = s12, s22          # B=0: |01> -> s12|10> + s22|01>
    return _pair_from_vectors(e_b, kappa_b, v1, v0)


def _marginals_of_pair(m: np.ndarray):
    """``(e_first, kappa_first, e_second, kappa_second)`` of a 4x4 state."""
    e1 = (m[0, 0] + m[1, 1]).real
    k1 = m[0, 2] + m[1, 3]
    e2 = (m[0, 0] + m[2, 2]).real
    k2 = m[0, 1] + m[2, 3]
    return e1, k1, e2, k2


_POP_IDX = ((0, 0), (1, 1), (2, 2), (3, 3))
_COH_IDX = ((1, 2), (0, 3), (1, 3), (2, 3))


def entries_to_matrix(pop: np.ndarray, coh: np.ndarray) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for k, (i, j) in enumerate(_POP_IDX):
        m[i, j] = pop[k]
    for k, (i, j) in enumerate(_COH_IDX):
        m[i, j] = coh[k]
        m[j, i] = np.conj(coh[k])
    return m


def matrix_to_entries(m: np.ndarray):
    pop = np.array([m[i, j].real for i, j in _POP_IDX])
    coh = np.array([m[i, j] for i, j in _COH_IDX])
    return pop, coh


# spin sign s_a of each excitation-major basis state (first, second): +1 excited
_SIGN_FIRST = np.array([1, 1, -1, -1])
_SIGN_SECOND = np.array([1, -1, 1, -1])


def frame_phases(omega_i: float, omega_j: float, clock: float) -> np.ndarray:
    """Elementwise factors taking a pair from the interaction picture to the lab."""
    e = 0.5 * (omega_i * _SIGN_FIRST + omega_j * _SIGN_SECOND)
    return np.exp(-1j * clock * (e[:, None] - e[None, :]))


class PairState:
    """Pairwise reduced states of an ``n``-qubit register under collisions.

    Parameters
    ----------
    scheme_or_n : Scheme or int
        Either a scheme (initial state and frequencies are taken from it) or
        the number of qubits.
    frequencies, initial_vectors
        Used when ``scheme_or_n`` is an int.  ``initial_vectors`` are
        single-qubit amplitude pairs ``(amp_0, amp_1)``.
    audit : bool
        Record the largest violation of tangle conservation seen on
        exchange collisions with ground-state qubits.
    """

    def __init__(self, scheme_or_n, frequencies: Sequence[float] | None = None,
                 initial_vectors: Sequence | None = None, audit: bool = True):
        if isinstance(scheme_or_n, Scheme):
            n = scheme_or_n.n_qubits
            frequencies = scheme_or_n.frequencies
            initial_vectors = scheme_or_n.initial_vectors()
        else:
            n = int(scheme_or_n)
        self.n = n
        self.frequencies = np.asarray(frequencies if frequencies is not None else [1.0] * n,
                                      dtype=float)
        if initial_vectors is None:
            initial_vectors = [np.array([1.0, 0.0])] * n
        vecs = [np.asarray(v, dtype=complex) for v in initial_vectors]
        self.excitation = np.array([abs(v[1]) ** 2 for v in vecs])
        self.coherence = np.array([v[1] * np.conj(v[0]) for v in vecs])
        self.active = np.zeros(n, dtype=bool)
        self.clock = 0.0
        self.audit = audit
        self.max_conservation_residual = 0.0
        self.events_applied = 0

        cap = 64
        self._pop = np.zeros((cap, 4))
        self._coh = np.zeros((cap, 4), dtype=complex)
        self._struct = np.zeros(cap, dtype=np.int8)
        self._first = np.zeros(cap, dtype=np.int64)
        self._second = np.zeros(cap, dtype=np.int64)
        self._size = 0
        self._index: dict = {}
        self._rows: list = [[] for _ in range(n)]

    # -- storage ------------------------------------------------------------

    def _reserve(self, extra: int) -> None:
        need = self._size + extra
        cap = self._pop.shape[0]
        if need <= cap:
            return
        while cap < need:
            cap *= 2
        for name in ("_pop", "_coh", "_struct", "_first", "_second"):
            old = getattr(self, name)
            new = np.zeros((cap,) + old.shape[1:], dtype=old.dtype)
            new[:self._size] = old[:self._size]
            setattr(self, name, new)

    def _append(self, a: np.ndarray, b: np.ndarray, pop, coh, struct) -> None:
        """Add rows for pairs ``(a[k], b[k])`` with entries oriented a-first."""
        k = a.shape[0]
        if k == 0:
            return
        pop = np.array(pop, dtype=float, copy=True)
        coh = np.array(coh, dtype=complex, copy=True)
        flip = a > b
        _swap_orientation(pop, coh, flip)
        lo = np.where(flip, b, a)
        hi = np.where(flip, a, b)
        self._reserve(k)
        start = self._size
        sl = slice(start, start + k)
        self._pop[sl] = pop
        self._coh[sl] = coh
        self._struct[sl] = struct
        self._first[sl] = lo
        self._second[sl] = hi
        self._size += k
        index = self._index
        rows = self._rows
        for r, i, j in zip(range(start, start + k), lo.tolist(), hi.tolist()):
            index[(i, j)] = r
            rows[i].append(r)
            rows[j].append(r)

    @property
    def n_pairs(self) -> int:
        return self._size

    def tracked_pairs(self) -> list:
        return sorted(self._index)

    def partners(self, q: int) -> np.ndarray:
        rows = np.asarray(self._rows[q], dtype=np.int64)
        return self._first[rows] + self._second[rows] - q

    def _gather(self, b: int):
        """Rows of B's pairs oriented as (partner, B)."""
        rows = np.asarray(self._rows[b], dtype=np.int64)
        pop = self._pop[rows].copy()
        coh = self._coh[rows].copy()
        b_first = self._first[rows] == b
        _swap_orientation(pop, coh, b_first)
        partners = self._first[rows] + self._second[rows] - b
        return rows, partners, pop, coh, b_first

    def _scatter(self, rows, pop, coh, b_first, struct) -> None:
        _swap_orientation(pop, coh, b_first)
        self._pop[rows] = pop
        self._coh[rows] = coh
        self._struct[rows] = struct

    # -- checks ---------------------------------------------------------------

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")

    def fresh_bit(self, q: int) -> int:
        """Basis state of an untouched qubit, or an error if it is not usable as new."""
        self._check_qubit(q)
        if self.active[q]:
            raise IncompatibleCollision(f"qubit {q} has already collided and is not new")
        e = self.excitation[q]
        if abs(self.coherence[q]) > BASIS_TOL or min(e, 1 - e) > BASIS_TOL:
            raise IncompatibleCollision(f"new qubit {q} is not in a basis state")
        return int(round(e))

    # -- collisions -----------------------------------------------------------

    def collide(self, ev: CollisionEvent) -> "PairState":
        """Apply one collision of ``ev.old`` with the fresh qubit ``ev.new``."""
        b, c = ev.old, ev.new
        self._check_qubit(b)
        bit = self.fresh_bit(c)
        kind = ev.kind
        rows, partners, pop, coh, b_first = self._gather(b)
        struct = self._struct[rows].astype(np.int64)
        next_struct = _NEXT[(kind, bit)][struct] if rows.size else struct
        if np.any(next_struct == _ERR):
            bad = int(partners[np.argmax(next_struct == _ERR)])
            raise IncompatibleCollision(
                f"pair ({bad}, {b}) is a box state; only exchange collisions with "
                f"ground-state qubits keep that family")
        kappa_b = self.coherence[b]
        if abs(kappa_b) > BASIS_TOL and (kind != "ee" or bit != 0):
            raise IncompatibleCollision(
                f"qubit {b} carries a coherence; only exchange collisions with "
                f"ground-state qubits keep the box family")

        blocks = interaction_blocks(kind, ev.coupling, ev.theta, self.frequencies[b],
                                    self.frequencies[c], ev.duration, self.clock)
        if rows.size:
            pab, cab, pac, cac = kernels.collide_rows(
                np.ascontiguousarray(pop), np.ascontiguousarray(coh), bit, blocks)
            if self.audit and kind == "ee" and bit == 0:
                held = (struct == Q) | (struct == BOX)
                if np.any(held):
                    before = 4 * np.abs(coh[held, 0]) ** 2
                    after = 4 * (np.abs(cab[held, 0]) ** 2 + np.abs(cac[held, 0]) ** 2)
                    resid = float(np.max(np.abs(after - before)))
                    self.max_conservation_residual = max(self.max_conservation_residual, resid)
            self._scatter(rows, pab, cab, b_first, next_struct)
            self._append(partners, np.full(partners.shape, c), pac, cac, next_struct)

        m = new_pair_density(self.excitation[b], kappa_b, bit, blocks)
        new_struct = BOX if abs(kappa_b) > BASIS_TOL else _NEW_PAIR[(kind, bit)]
        p, z = matrix_to_entries(m)
        self._append(np.array([b]), np.array([c]), p[None], z[None], new_struct)
        e_b, k_b, e_c, k_c = _marginals_of_pair(m)
        self.excitation[b], self.coherence[b] = e_b, k_b
        self.excitation[c], self.coherence[c] = e_c, k_c
        self.active[b] = self.active[c] = True
        self.clock += ev.duration
        self.events_applied += 1
        return self

    # -- read-out -------------------------------------------------------------

    def _marginal_matrix(self, q: int) -> np.ndarray:
        e, k = self.excitation[q], self.coherence[q]
        return np.array([[e, k], [np.conj(k), 1 - e]])

    def pair_density(self, i: int, j: int, frame: str = "interaction") -> DensityMatrix4:
        """Reduced state of qubits ``(i, j)``, ``i`` first.

        ``frame`` is ``'interaction'`` (stored entries) or ``'lab'``.
        """
        self._check_qubit(i)
        self._check_qubit(j)
        if i == j:
            raise ValueError("need two distinct qubits")
        key = (min(i, j), max(i, j))
        r = self._index.get(key)
        if r is None:
            m = np.kron(self._marginal_matrix(i), self._marginal_matrix(j))
            struct = None
        else:
            pop, coh = self._pop[r:r + 1].copy(), self._coh[r:r + 1].copy()
            _swap_orientation(pop, coh, np.array([i > j]))
            m = entries_to_matrix(pop[0], coh[0])
            struct = Structure(int(self._struct[r]))
        if frame == "lab":
            m = m * frame_phases(self.frequencies[i], self.frequencies[j], self.clock)
        elif frame != "interaction":
            raise ValueError(f"unknown frame {frame!r}")
        if struct is None:
            return DensityMatrix4.classified(m)
        return DensityMatrix4(m, struct)

    def tangle_matrix(self) -> PairwiseTangleMatrix:
        out = np.zeros((self.n, self.n))
        k = self._size
        if k:
            c = concurrence_from_entries(self._pop[:k], self._coh[:k], self._struct[:k])
            tau = c * c
            out[self._first[:k], self._second[:k]] = tau
            out[self._second[:k], self._first[:k]] = tau
        return PairwiseTangleMatrix(out)

    def structure_consistent(self, tol: float = 1e-12) -> bool:
        """Every stored pair fits its declared family and matches the marginals."""
        for r in range(self._size):
            m = entries_to_matrix(self._pop[r], self._coh[r])
            if not fits_structure(m, Structure(int(self._struct[r])), tol):
                return False
        return self.max_marginal_mismatch() <= 1e-10

    def max_marginal_mismatch(self) -> float:
        """Largest disagreement between stored pairs and per-qubit marginals."""
        k = self._size
        if not k:
            return 0.0
        pop, coh = self._pop[:k], self._coh[:k]
        e_first = pop[:, 0] + pop[:, 1]
        e_second = pop[:, 0] + pop[:, 2]
        k_first = coh[:, 2]    # rho24 + rho13, and rho13 = 0 in every tracked family
        k_second = coh[:, 3]   # rho34 + rho12
        f, s = self._first[:k], self._second[:k]
        return float(max(np.max(np.abs(e_first - self.excitation[f])),
                         np.max(np.abs(e_second - self.excitation[s])),
                         np.max(np.abs(k_first - self.coherence[f])),
                         np.max(np.abs(k_second - self.coherence[s]))))

    def one_vs_rest_tangles(self) -> np.ndarray:
        """``4 det(rho_i)`` for every qubit (valid because the global state is pure)."""
        return 4 * (self.excitation * (1 - self.excitation) - np.abs(self.coherence) ** 2)


def collide_new_qubit(pairs: PairState, ev: CollisionEvent) -> PairState:
    """Apply a collision between an old qubit and a fresh basis-state qubit."""
    return pairs.collide(ev)


# ---------------------------------------------------------------------------
# W-like states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WLikeState:
    """Single-excitation state ``sum_i a_i |0..1_i..0>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        err = abs(float(np.vdot(a, a).real) - 1.0)
        if err > 1e-12:
            raise ValueError(f"amplitudes are not normalized (error {err:.3g})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def excited(cls, n: int, qubit: int = 0) -> "WLikeState":
        a = np.zeros(n, dtype=complex)
        a[qubit] = 1.0
        return cls(a)

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def norm_error(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)


def collide_old_pair_wlike(state: WLikeState, k1: int, k2: int, coupling: float,
                           t: float) -> WLikeState:
    """Exchange collision of qubits ``k1`` and ``k2`` (equal frequencies)."""
    if k1 == k2:
        raise ValueError("a qubit cannot collide with itself")
    a = state.amplitudes.copy()
    kernels.wlike_sweep(a, np.array([k1], dtype=np.int64), np.array([k2], dtype=np.int64),
                        np.array([coupling * t], dtype=float))
    return WLikeState(a)


def wlike_tangles(amplitudes: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(amplitudes)) ** 2
    t = 4 * np.outer(p, p)
    np.fill_diagonal(t, 0.0)
    return t


def tangle_matrix(state) -> PairwiseTangleMatrix:
    """Pairwise tangles of a :class:`PairState` or :class:`WLikeState`."""
    if isinstance(state, WLikeState):
        return PairwiseTangleMatrix(wlike_tangles(state.amplitudes))
    return state.tangle_matrix()


# ---------------------------------------------------------------------------
# Scheme driver
# ---------------------------------------------------------------------------

@dataclass
class SimulationResult:
    tangles: PairwiseTangleMatrix
    snapshots: dict
    engine: str
    state: object


def _needs_wlike(scheme: Scheme) -> bool:
    touched = set()
    for ev in scheme.events:
        if isinstance(ev, OldPairBlock):
            return True
        if isinstance(ev, CollisionEvent) and ev.new in touched:
            return True
        touched.update(ev.qubits)
    return False


def wlike_compatible(scheme: Scheme) -> str | None:
    """Reason the scheme cannot run as a W-like state, or None."""
    if len(scheme.excited) != 1 or scheme.superposed:
        return "W-like evolution needs exactly one initial excitation"
    if len(set(scheme.frequencies)) != 1:
        return "W-like evolution needs equal qubit frequencies"
    for k, ev in enumerate(scheme.events):
        if isinstance(ev, CollisionEvent):
            if ev.kind != "ee":
                return f"event {k} is not an exchange collision"
        elif not isinstance(ev, OldPairBlock):
            return f"event {k} ({type(ev).__name__}) is not supported in W-like mode"
    return None


def _event_arrays(ev):
    if isinstance(ev, OldPairBlock):
        return ev.first, ev.second, ev.couplings * ev.durations
    return (np.array([ev.old], dtype=np.int64), np.array([ev.new], dtype=np.int64),
            np.array([ev.coupling * ev.duration]))


def run_wlike(scheme: Scheme, snapshots: Iterable[int] = ()) -> SimulationResult:
    reason = wlike_compatible(scheme)
    if reason:
        raise IncompatibleCollision(reason)
    amps = np.zeros(scheme.n_qubits, dtype=complex)
    amps[next(iter(scheme.excited))] = 1.0
    snaps = sorted(set(int(s) for s in snapshots))
    out = {}
    if 0 in snaps:
        out[0] = PairwiseTangleMatrix(wlike_tangles(amps))
    done = 0
    for ev in scheme.events:
        k1, k2, phase = _event_arrays(ev)
        m = k1.shape[0]
        cuts = [s - done for s in snaps if done < s <= done + m]
        start = 0
        for cut in cuts + [m]:
            if cut > start:
                kernels.wlike_sweep(amps, k1[start:cut], k2[start:cut],
                                    np.ascontiguousarray(phase[start:cut]))
            if cut < m or (done + cut) in snaps:
                out[done + cut] = PairwiseTangleMatrix(wlike_tangles(amps))
            start = cut
        done += m
    return SimulationResult(PairwiseTangleMatrix(wlike_tangles(amps)), out, "wlike",
                            _raw_wlike(amps))


def _raw_wlike(amps: np.ndarray) -> WLikeState:
    """Wrap amplitudes without renormalizing (keeps the accumulated norm error visible)."""
    s = object.__new__(WLikeState)
    a = np.array(amps, copy=True)
    a.setflags(write=False)
    object.__setattr__(s, "amplitudes", a)
    return s


def apply_event(state: PairState, ev) -> None:
    from .manytoone import collide_many_to_one, collide_two_groups
    if isinstance(ev, CollisionEvent):
        state.collide(ev)
    elif isinstance(ev, SimultaneousCollision):
        collide_many_to_one(state, ev)
    elif isinstance(ev, ConcurrentGroups):
        collide_two_groups(state, ev.first, ev.second)
    else:
        raise IncompatibleCollision(
            f"{type(ev).__name__} needs the W-like engine or the oracle")


def run_pairs(scheme: Scheme, snapshots: Iterable[int] = (), audit: bool = True) -> SimulationResult:
    state = PairState(scheme, audit=audit)
    snaps = set(int(s) for s in snapshots)
    out = {}
    if 0 in snaps:
        out[0] = state.tangle_matrix()
    for k, ev in enumerate(scheme.events, start=1):
        apply_event(state, ev)
        if k in snaps:
            out[k] = state.tangle_matrix()
    return SimulationResult(state.tangle_matrix(), out, "pairs", state)


def simulate(scheme: Scheme, snapshots: Iterable[int] = ()) -> SimulationResult:
    """Run a scheme analytically.

    Schemes with old-pair collisions use the W-like amplitude engine; all
    others use :class:`PairState`.  Snapshot ``k`` is the tangle matrix after
    the first ``k`` events.
    """
    if _needs_wlike(scheme):
        return run_wlike(scheme, snapshots)
    return run_pairs(scheme, snapshots)
