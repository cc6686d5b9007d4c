"""Pure numpy implementations of the hot kernels.

Used when the compiled extension is unavailable and as the reference in the
kernel benchmark.  Signatures match ``quiltsim._ckernels``.
"""

import numpy as np


def collide_rows(pop, coh, new_bit, blocks):
    """Update every pair ``(A_i, B)`` for one collision of B with a fresh qubit.

    Parameters
    ----------
    pop : (k, 4) float array
        ``rho11..rho44`` of each ``(A_i, B)`` pair, A first.
    coh : (k, 4) complex array
        ``rho23, rho14, rho24, rho34`` of each pair.
    new_bit : int
        Basis state (0 or 1) of the incoming qubit C.
    blocks : (8,) complex array
        ``s11, s12, s21, s22, d11, d12, d21, d22``: entries of the collision
        propagator on ``(|10>, |01>)`` and ``(|11>, |00>)`` of (B, C).

    Returns
    -------
    pop_ab, coh_ab, pop_ac, coh_ac
        Post-collision entries of ``(A_i, B)`` and ``(A_i, C)``.
    """
    s11, s12, s21, s22, d11, d12, d21, d22 = blocks
    p1, p2, p3, p4 = pop[:, 0], pop[:, 1], pop[:, 2], pop[:, 3]
    z23, z14, z24, z34 = coh[:, 0], coh[:, 1], coh[:, 2], coh[:, 3]
    k = pop.shape[0]
    pab = np.empty((k, 4))
    pac = np.empty((k, 4))
    cab = np.zeros((k, 4), dtype=complex)
    cac = np.zeros((k, 4), dtype=complex)
    conj = np.conj
    if new_bit == 0:
        a, b = abs(s11) ** 2, abs(d12) ** 2
        c, d = abs(s21) ** 2, abs(d22) ** 2
        pab[:, 0] = a * p1 + b * p2
        pab[:, 1] = c * p1 + d * p2
        pab[:, 2] = a * p3 + b * p4
        pab[:, 3] = c * p3 + d * p4
        pac[:, 0] = c * p1 + b * p2
        pac[:, 1] = a * p1 + d * p2
        pac[:, 2] = c * p3 + b * p4
        pac[:, 3] = a * p3 + d * p4
        cab[:, 0] = d22 * conj(s11) * z23 + s21 * conj(d12) * z14
        cab[:, 1] = s11 * conj(d22) * z14 + d12 * conj(s21) * z23
        cab[:, 2] = d * z24
        cab[:, 3] = s11 * conj(d22) * z34 + d12 * conj(s21) * conj(z34)
        cac[:, 0] = s11 * conj(d12) * z14 + d22 * conj(s21) * z23
        cac[:, 1] = s21 * conj(d22) * z14 + d12 * conj(s11) * z23
        cac[:, 2] = d * z24
        cac[:, 3] = s21 * conj(d22) * z34 + d12 * conj(s11) * conj(z34)
    else:
        a, b = abs(d11) ** 2, abs(s12) ** 2
        c, d = abs(d21) ** 2, abs(s22) ** 2
        pab[:, 0] = a * p1 + b * p2
        pab[:, 1] = c * p1 + d * p2
        pab[:, 2] = a * p3 + b * p4
        pab[:, 3] = c * p3 + d * p4
        pac[:, 0] = a * p1 + d * p2
        pac[:, 1] = c * p1 + b * p2
        pac[:, 2] = a * p3 + d * p4
        pac[:, 3] = c * p3 + b * p4
        cab[:, 0] = s22 * conj(d11) * z23 + d21 * conj(s12) * z14
        cab[:, 1] = d11 * conj(s22) * z14 + s12 * conj(d21) * z23
        cac[:, 0] = d21 * conj(s22) * z14 + s12 * conj(d11) * z23
        cac[:, 1] = d11 * conj(s12) * z14 + s22 * conj(d21) * z23
    return pab, cab, pac, cac


def wlike_sweep(amps, k1, k2, phase):
    """Apply old-pair exchange collisions to W-like amplitudes in place.

    ``amps[k1[e]], amps[k2[e]]`` are rotated by ``[[c, -is], [-is, c]]`` with
    ``c, s = cos(phase[e]), sin(phase[e])`` for each event ``e`` in order.
    """
    a = amps.tolist()
    cosv = np.cos(phase).tolist()
    sinv = np.sin(phase).tolist()
    for i, j, c, s in zip(k1.tolist(), k2.tolist(), cosv, sinv):
        x = a[i]
        y = a[j]
        a[i] = c * x - 1j * s * y
        a[j] = c * y - 1j * s * x
    amps[:] = a
