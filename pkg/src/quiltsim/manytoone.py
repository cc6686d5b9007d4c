"""Several fresh ground-state qubits colliding with one old qubit at once.

For exchange coupling with equal frequencies the collision acts on the single
excitation sector as a rotation by ``W t`` (``W`` the norm of the coupling
vector) that moves amplitude from the old qubit B onto the bright mode
``sum_k (Omega_k / W) |C_k>``.  Pairs of B's partners A with B and with
each C_k, and all new pairs, stay in their structured families.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .recurrence import (BASIS_TOL, BOX, Q, IncompatibleCollision, PairState)
from .schemes import SimultaneousCollision


def _check_group(state: PairState, ev: SimultaneousCollision) -> None:
    state._check_qubit(ev.old)
    for c in ev.new:
        if state.fresh_bit(c) != 0:
            raise IncompatibleCollision(f"new qubit {c} must start in |0>")
    freqs = state.frequencies[list(ev.qubits)]
    if np.ptp(freqs) > 0:
        raise IncompatibleCollision("many-to-one collisions need equal frequencies")
    if abs(state.coherence[ev.old]) > BASIS_TOL:
        raise IncompatibleCollision(f"qubit {ev.old} carries a coherence")
    rows = np.asarray(state._rows[ev.old], dtype=np.int64)
    if rows.size and np.any(state._struct[rows] == BOX):
        raise IncompatibleCollision("many-to-one collisions need X-family pairs")


def collide_many_to_one(state: PairState, ev: SimultaneousCollision,
                        advance_clock: bool = True) -> PairState:
    """Apply a simultaneous exchange collision of ``ev.new`` with ``ev.old``."""
    _check_group(state, ev)
    if not ev.new:
        if advance_clock:
            state.clock += ev.duration
            state.events_applied += 1
        return state
    b = ev.old
    w = ev.total_coupling
    omegas = np.asarray(ev.couplings)
    cs = np.cos(w * ev.duration)
    sn = np.sin(w * ev.duration)
    g = -1j * (omegas / w) * sn
    r = sn * sn - np.abs(g) ** 2           # weight that went to the other new qubits

    rows, partners, pop, coh, b_first = state._gather(b)
    struct = state._struct[rows].copy()
    if rows.size:
        pop = np.ascontiguousarray(pop)
        coh = np.ascontiguousarray(coh)
        keep = np.array([cs, -1j * sn, -1j * sn, cs, 1, 0, 0, 1], dtype=complex)
        pab, cab, _, _ = kernels.collide_rows(pop, coh, 0, keep)
        tau_ac = np.zeros(rows.size)
        for k, c in enumerate(ev.new):
            blocks = np.array([cs, g[k], g[k], cs, 1, 0, 0, 1], dtype=complex)
            _, _, pac, cac = kernels.collide_rows(pop, coh, 0, blocks)
            pac[:, 1] += r[k] * pop[:, 0]
            pac[:, 3] += r[k] * pop[:, 2]
            tau_ac += 4 * np.abs(cac[:, 0]) ** 2
            state._append(partners, np.full(partners.shape, c), pac, cac, struct)
        if state.audit:
            held = struct == Q
            if np.any(held):
                before = 4 * np.abs(coh[held, 0]) ** 2
                after = 4 * np.abs(cab[held, 0]) ** 2 + tau_ac[held]
                resid = float(np.max(np.abs(after - before)))
                state.max_conservation_residual = max(state.max_conservation_residual, resid)
        state._scatter(rows, pab, cab, b_first, struct)

    e = state.excitation[b]
    m = len(ev.new)
    new_a, new_b, new_pop, new_coh = [], [], [], []
    for k, c in enumerate(ev.new):
        p2, p3 = cs * cs * e, abs(g[k]) ** 2 * e
        new_a.append(b)
        new_b.append(c)
        new_pop.append([0.0, p2, p3, 1.0 - p2 - p3])
        new_coh.append([cs * np.conj(g[k]) * e, 0, 0, 0])
    for j in range(m):
        for k in range(j + 1, m):
            p2, p3 = abs(g[j]) ** 2 * e, abs(g[k]) ** 2 * e
            new_a.append(ev.new[j])
            new_b.append(ev.new[k])
            new_pop.append([0.0, p2, p3, 1.0 - p2 - p3])
            new_coh.append([g[j] * np.conj(g[k]) * e, 0, 0, 0])
    state._append(np.array(new_a), np.array(new_b), np.array(new_pop),
                  np.array(new_coh, dtype=complex), Q)

    state.excitation[b] = cs * cs * e
    for k, c in enumerate(ev.new):
        state.excitation[c] = abs(g[k]) ** 2 * e
        state.active[c] = True
    state.active[b] = True
    if advance_clock:
        state.clock += ev.duration
        state.events_applied += 1
    return state


def collide_two_groups(state: PairState, ev_a: SimultaneousCollision,
                       ev_b: SimultaneousCollision) -> PairState:
    """Two many-to-one collisions on disjoint qubits during one time window.

    The two couplings commute, so the groups are applied one after the other.
    """
    if set(ev_a.qubits) & set(ev_b.qubits):
        raise IncompatibleCollision("the two groups share a qubit")
    if ev_a.duration != ev_b.duration:
        raise IncompatibleCollision("the two groups must last equally long")
    _check_group(state, ev_a)
    _check_group(state, ev_b)
    collide_many_to_one(state, ev_a, advance_clock=False)
    collide_many_to_one(state, ev_b, advance_clock=False)
    state.clock += ev_a.duration
    state.events_applied += 1
    return state


def many_to_one_tangles(tau_ab: float, rho33: float, couplings, t: float) -> dict:
    """Closed-form tangles after a many-to-one collision from a Q-family pair.

    ``tau_ab`` is the tangle of a spectator A with B, ``rho33`` the excitation
    of B.  Keys: ``'AB'``, ``'BC'`` (list), ``'AC'`` (list), ``'CC'`` (matrix).
    """
    om = np.asarray(couplings, dtype=float)
    w = float(np.sqrt(np.sum(om * om)))
    f = om * om / (w * w)
    s2 = np.sin(w * t) ** 2
    return {
        "AB": tau_ab * np.cos(w * t) ** 2,
        "BC": f * rho33 ** 2 * np.sin(2 * w * t) ** 2,
        "AC": f * tau_ab * s2,
        "CC": 4 * np.outer(f, f) * rho33 ** 2 * s2 * s2 * (1 - np.eye(len(om))),
    }
