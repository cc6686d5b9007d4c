"""Brute-force state-vector reference.

Evolves the full ``2^n`` register through a scheme in the lab frame: during
each collision the participants evolve under coupling plus free terms and
every other qubit under its free term.  Pair states are read directly off the
amplitude vector.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .measures import (DensityMatrix4, PairwiseTangleMatrix, concurrence_general_batch,
                       one_vs_rest_tangle)
from .qstate import (SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, apply_matrix, pair_marginals,
                     single_marginals, tensor, two_qubit_hamiltonian)
from .schemes import (CollisionEvent, ConcurrentGroups, OldPairBlock, Scheme,
                      SimultaneousCollision)

DEFAULT_CAP = 14
CAP_ENV = "QUILTSIM_ORACLE_CAP"


class OracleCapExceeded(ValueError):
    pass


def oracle_cap() -> int:
    return int(os.environ.get(CAP_ENV, DEFAULT_CAP))


def _embed(op: np.ndarray, pos: int, n: int) -> np.ndarray:
    mats = [np.eye(2)] * n
    mats[pos] = op
    return tensor(*mats)


def star_hamiltonian(couplings, frequencies) -> np.ndarray:
    """Exchange coupling of qubit 0 to qubits ``1..m`` plus free terms."""
    m = len(couplings) + 1
    h = np.zeros((1 << m, 1 << m), dtype=complex)
    bp = _embed(SIGMA_PLUS, 0, m)
    for k, w in enumerate(couplings, start=1):
        cm = _embed(SIGMA_MINUS, k, m)
        term = bp @ cm
        h += w * (term + term.conj().T)
    for k, om in enumerate(frequencies):
        h += 0.5 * om * _embed(SIGMA_Z, k, m)
    return h


def evolve_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` by exact diagonalization."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def star_propagator(couplings, frequencies, t: float) -> np.ndarray:
    """``exp(-i H t)`` of :func:`star_hamiltonian`."""
    return evolve_hermitian(star_hamiltonian(couplings, frequencies), t)


def pair_propagator(ev: CollisionEvent, omega_old: float, omega_new: float) -> np.ndarray:
    """Propagator of one collision from its Pauli-matrix Hamiltonian.

    Deliberately independent of the closed-form blocks used by the engine.
    """
    h = two_qubit_hamiltonian(ev.kind, ev.coupling, ev.theta, omega_old, omega_new)
    return evolve_hermitian(h, ev.duration)


class Register:
    """Mutable lab-frame register used by :func:`run_oracle`."""

    def __init__(self, scheme: Scheme, cap: int | None = None):
        cap = oracle_cap() if cap is None else cap
        n = scheme.n_qubits
        if n > cap:
            raise OracleCapExceeded(
                f"{n} qubits exceeds the oracle cap of {cap} (set {CAP_ENV} to raise it)")
        self.n = n
        self.frequencies = np.asarray(scheme.frequencies, dtype=float)
        self.psi = tensor(*scheme.initial_vectors()).astype(complex)
        idx = np.arange(1 << n)
        # free energy of each basis state, one row per qubit
        self._free = np.array([0.5 * self.frequencies[q] * (2.0 * ((idx >> (n - 1 - q)) & 1) - 1)
                               for q in range(n)])
        self._free_total = self._free.sum(axis=0)
        self.clock = 0.0

    def _spectators(self, participants, t: float) -> None:
        if t == 0:
            return
        e = self._free_total - self._free[list(participants)].sum(axis=0)
        self.psi *= np.exp(-1j * t * e)

    def apply(self, ev) -> None:
        if isinstance(ev, CollisionEvent):
            u = pair_propagator(ev, self.frequencies[ev.old], self.frequencies[ev.new])
            self.psi = apply_matrix(self.psi, self.n, (ev.old, ev.new), u)
            self._spectators(ev.qubits, ev.duration)
            self.clock += ev.duration
        elif isinstance(ev, (SimultaneousCollision, ConcurrentGroups)):
            groups = (ev,) if isinstance(ev, SimultaneousCollision) else (ev.first, ev.second)
            touched = ()
            for g in groups:
                touched += self._apply_group(g)
            self._spectators(touched, ev.duration)
            self.clock += ev.duration
        elif isinstance(ev, OldPairBlock):
            for sub in ev.events():
                self.apply(sub)
        else:
            raise TypeError(f"unsupported event {ev!r}")

    def _apply_group(self, ev: SimultaneousCollision) -> tuple:
        """Apply a many-to-one collision; returns the qubits it evolved."""
        if not ev.new:
            return ()
        u = star_propagator(ev.couplings, self.frequencies[list(ev.qubits)], ev.duration)
        self.psi = apply_matrix(self.psi, self.n, ev.qubits, u)
        return ev.qubits

    def norm_error(self) -> float:
        return abs(float(np.vdot(self.psi, self.psi).real) - 1.0)

    def pair_density(self, i: int, j: int) -> DensityMatrix4:
        m = pair_marginals(self.psi, self.n, [(i, j)])[0]
        return DensityMatrix4.from_register(m)

    def tangles(self) -> PairwiseTangleMatrix:
        n = self.n
        iu = np.triu_indices(n, 1)
        pairs = list(zip(iu[0].tolist(), iu[1].tolist()))
        out = np.zeros((n, n))
        if pairs:
            c = concurrence_general_batch(pair_marginals(self.psi, n, pairs))
            out[iu] = c * c
            out[(iu[1], iu[0])] = c * c
        return PairwiseTangleMatrix(out)

    def ckw_residuals(self, tangles: PairwiseTangleMatrix | None = None) -> np.ndarray:
        t = self.tangles() if tangles is None else tangles
        singles = single_marginals(self.psi, self.n)
        bip = np.array([one_vs_rest_tangle(r) for r in singles])
        return bip - t.values.sum(axis=1)


@dataclass
class OracleResult:
    tangles: PairwiseTangleMatrix
    snapshots: dict
    register: Register
    min_ckw_residual: float
    max_norm_error: float
    wall_time: float = 0.0
    events: int = field(default=0)


def _flatten(events):
    for ev in events:
        if isinstance(ev, OldPairBlock):
            yield from ev.events()
        else:
            yield ev


def run_oracle(scheme: Scheme, snapshots: Iterable[int] = (), cap: int | None = None,
               check_ckw: bool = True) -> OracleResult:
    """Evolve the full register; tangles at the end and after each snapshot.

    Snapshot ``k`` is the state after the first ``k`` events (rows of an
    :class:`OldPairBlock` count individually).
    """
    t0 = time.perf_counter()
    reg = Register(scheme, cap)
    snaps = set(int(s) for s in snapshots)
    out = {}
    min_ckw = np.inf
    max_norm = reg.norm_error()

    def record(k):
        nonlocal min_ckw
        t = reg.tangles()
        out[k] = t
        if check_ckw:
            min_ckw = min(min_ckw, float(reg.ckw_residuals(t).min()))

    if 0 in snaps:
        record(0)
    k = 0
    for k, ev in enumerate(_flatten(scheme.events), start=1):
        reg.apply(ev)
        max_norm = max(max_norm, reg.norm_error())
        if k in snaps:
            record(k)
    final = reg.tangles()
    if check_ckw:
        min_ckw = min(min_ckw, float(reg.ckw_residuals(final).min()))
    return OracleResult(final, out, reg, float(min_ckw), max_norm,
                        time.perf_counter() - t0, k)


@dataclass
class ComparisonReport:
    max_diff: float
    passed: bool
    tolerance: float
    worst_pair: tuple | None
    worst_event: int | None
    engine: str
    events: int
    message: str = ""

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = ""
        if self.worst_pair is not None:
            where = f" at pair {self.worst_pair} after event {self.worst_event}"
        return f"{status}: max |tau_analytic - tau_oracle| = {self.max_diff:.3e}{where}" \
               f" (tolerance {self.tolerance:g}, engine {self.engine})"


def compare_engines(scheme: Scheme, tol: float = 1e-9, every_event: bool = True,
                    cap: int | None = None) -> ComparisonReport:
    """Run the analytic engine and the oracle and report the worst tangle gap."""
    from .recurrence import simulate

    n_events = scheme.event_count()
    snaps = range(0, n_events + 1) if every_event else (n_events,)
    try:
        analytic = simulate(scheme, snapshots=snaps)
    except ValueError as exc:
        return ComparisonReport(np.inf, False, tol, None, None, "none", n_events,
                                f"analytic engine rejected the scheme: {exc}")
    oracle = run_oracle(scheme, snapshots=snaps, cap=cap, check_ckw=False)
    worst, pair, event = -1.0, None, None
    for k in snaps:
        a = analytic.snapshots[k] if k in analytic.snapshots else analytic.tangles
        o = oracle.snapshots[k] if k in oracle.snapshots else oracle.tangles
        d = np.abs(a.values - o.values)
        m = float(d.max())
        if m > worst:
            i, j = np.unravel_index(int(np.argmax(d)), d.shape)
            worst, pair, event = m, (int(min(i, j)), int(max(i, j))), int(k)
    return ComparisonReport(worst, worst <= tol, tol, pair, event, analytic.engine, n_events)
