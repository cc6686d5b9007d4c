"""Closed-form tangles and helper quantities for special schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .measures import DensityMatrix4, Structure, concurrence_structured


def first_collision_tangle(coupling: float, t: float) -> float:
    """Tangle of ``|1>|0>`` after one exchange collision."""
    return math.sin(2 * coupling * t) ** 2


def closed_form_chain_tangle(m: int, coupling: float, t: float) -> float:
    """Tangle of qubits 1 and ``m`` (1-based) in a chain of ``m`` qubits.

    The first qubit starts excited and qubit ``i`` collides with ``i - 1``; the
    value is read right after qubit ``m`` has joined.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    x = coupling * t
    return math.sin(2 * x) ** 2 * math.sin(x) ** (2 * (m - 2))


@dataclass(frozen=True)
class DetuningFactors:
    """Transfer weights of one exchange collision between detuned qubits.

    ``beta_s`` is the fraction of B's excitation moved onto C, ``beta_c`` the
    fraction that stays; ``delta`` is the effective Rabi frequency.  ``R``,
    ``r`` and ``s`` are the phase angles that appear in the pair entries when
    a spectator has frequency ``omega_a``.
    """

    beta_s: float
    beta_c: float
    delta: float
    R: float
    r: float
    s: float

    @classmethod
    def compute(cls, coupling: float, omega_b: float, omega_c: float, t: float,
                omega_a: float = 0.0) -> "DetuningFactors":
        d = 0.5 * (omega_b - omega_c)
        big = math.sqrt(coupling * coupling + d * d)
        if big == 0:
            beta_s = 0.0
            big_r = 0.0
        else:
            beta_s = (coupling * math.sin(t * big) / big) ** 2
            big_r = math.atan(d / big * math.tan(t * big))
        r = -0.5 * (omega_a - omega_b) * t - 0.5 * (omega_a - omega_c) * t
        s = -0.5 * (omega_a + omega_b) * t - 0.5 * (omega_a + omega_c) * t
        return cls(beta_s, 1.0 - beta_s, big, big_r, r, s)


def superposed_pair_tangle(theta1: float, theta2: float, phi1: float, phi2: float,
                           t: float) -> float:
    """Tangle after an exchange collision (unit coupling) of two superposed qubits.

    Qubit ``k`` starts in ``e^{i phi_k} cos(theta_k)|1> + sin(theta_k)|0>``.
    """
    a = math.cos(2 * theta1) * math.cos(2 * theta2)
    b = math.cos(2 * theta1) - math.cos(2 * theta2)
    c = math.sin(2 * theta1) * math.sin(2 * theta2)
    phi = phi2 - phi1
    st2 = math.sin(t) ** 2
    return st2 * (b * c * math.sin(phi) * math.sin(2 * t)
                  - c * c * math.cos(t) ** 2 * math.sin(phi) ** 2
                  + (1 - a) ** 2 - b * b * st2)


def excited_bath_densities(j: int, m: int, coupling: float, t: float):
    """Pair states of qubits ``(j, m)`` and ``(j, m + 1)`` (1-based) in a chain
    whose first qubit and qubit ``m + 1`` start excited, right after qubit
    ``m + 1`` has collided with qubit ``m``.  Rotating frame, up to local phases.
    """
    if not 1 <= j < m:
        raise ValueError("need 1 <= j < m")
    x = coupling * t
    cx, sx = math.cos(x), math.sin(x)
    r22 = sx ** (2 * (j - 1)) * cx * cx
    r33 = sx ** (2 * (m - 1))
    r44 = 1.0 - r22 - r33
    r23 = (1j) ** (m - j) * sx ** (j + m - 2) * cx

    def phi_state(p11, p22, p33, p44, z23):
        e = np.zeros((4, 4), dtype=complex)
        e[0, 0], e[1, 1], e[2, 2], e[3, 3] = p11, p22, p33, p44
        e[1, 2], e[2, 1] = z23, np.conj(z23)
        return DensityMatrix4(e, Structure.PHI)

    rho_jm = phi_state(r22 * sx * sx, r22 * cx * cx, r33 + r44 * sx * sx, r44 * cx * cx,
                       r23 * cx)
    rho_jm1 = phi_state(r22 * cx * cx, r22 * sx * sx, r33 + r44 * cx * cx, r44 * sx * sx,
                        -1j * r23 * sx)
    return rho_jm, rho_jm1


def excited_bath_collision_analysis(j: int, m: int, coupling: float, t: float) -> tuple:
    """Concurrences ``(C'_{j,m}, C'_{j,m+1})`` after the excited qubit ``m + 1``
    joins the chain (see :func:`excited_bath_densities`)."""
    rho_jm, rho_jm1 = excited_bath_densities(j, m, coupling, t)
    return (concurrence_structured(rho_jm).concurrence,
            concurrence_structured(rho_jm1).concurrence)


def bath_temperature(odds: float, omega: float) -> float:
    """Temperature (K) at which a qubit of angular frequency ``omega`` (rad/s)
    is excited with probability ``1 / odds``."""
    if odds <= 2:
        raise ValueError("odds must exceed 2")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return constants.hbar * omega / (constants.k * math.log(odds - 1))


def bath_temperature_ghz(odds: float, freq_ghz: float) -> float:
    """:func:`bath_temperature` for an ordinary frequency given in GHz."""
    return bath_temperature(odds, 2 * math.pi * freq_ghz * 1e9)
