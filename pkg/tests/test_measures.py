import numpy as np
import pytest
from hypothesis import given, strategies as st

from quiltsim.measures import (DensityMatrix4, PairwiseTangleMatrix, Structure, TangleValue,
                               ckw_residual, classify_structure, concurrence_from_entries,
                               concurrence_general, concurrence_general_batch,
                               concurrence_structured, dicke_pair_density, fits_structure,
                               one_vs_rest_tangle)
from quiltsim.qstate import SIGMA_Y, partial_trace, RegisterState, tensor

from conftest import random_density, random_state

YY = tensor(SIGMA_Y, SIGMA_Y)


def wootters_textbook(rho):
    """Concurrence from the eigenvalues of rho (Y x Y) rho* (Y x Y)."""
    lam = np.sqrt(np.abs(np.linalg.eigvals(rho @ YY @ rho.conj() @ YY)))
    lam = np.sort(lam)[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def bell(kind):
    v = {"psi+": [0, 1, 1, 0], "phi+": [1, 0, 0, 1]}[kind]
    v = np.array(v, dtype=complex) / np.sqrt(2)
    return np.outer(v, v.conj())


def test_bell_and_product_states():
    assert concurrence_general(bell("psi+")).concurrence == pytest.approx(1.0, abs=1e-14)
    assert concurrence_general(bell("phi+")).concurrence == pytest.approx(1.0, abs=1e-14)
    prod = np.diag([1.0, 0, 0, 0])
    assert concurrence_general(prod).concurrence == 0.0
    assert concurrence_general(np.eye(4) / 4).concurrence == 0.0


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.9, 1.0])
def test_werner_states(p):
    rho = p * bell("psi+") + (1 - p) * np.eye(4) / 4
    expected = max(0.0, (3 * p - 1) / 2)
    assert concurrence_general(rho).concurrence == pytest.approx(expected, abs=1e-13)


def test_general_matches_textbook_on_random_states(rng):
    rhos = np.array([random_density(rng) for _ in range(200)])
    c = concurrence_general_batch(rhos)
    ref = np.array([wootters_textbook(r) for r in rhos])
    assert np.max(np.abs(c - ref)) < 1e-7


def test_pure_state_concurrence_is_twice_det(rng):
    for _ in range(50):
        v = random_state(rng, 2)
        expected = 2 * abs(v[0] * v[3] - v[1] * v[2])
        c = concurrence_general(np.outer(v, v.conj())).concurrence
        assert c == pytest.approx(expected, abs=1e-14)


def test_general_rejects_non_psd():
    with pytest.raises(ValueError):
        concurrence_general_batch(np.diag([1.5, -0.5, 0, 0]))


def _structured(draw, structure):
    p = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4))) + 1e-9
    if structure == Structure.Q or structure == Structure.BOX:
        p[0] = 0.0
    p = p / p.sum()
    m = np.diag(p).astype(complex)
    ph = draw(st.floats(0, 2 * np.pi))
    f23 = draw(st.floats(0, 1))
    m[1, 2] = f23 * np.sqrt(p[1] * p[2]) * np.exp(1j * ph)
    m[2, 1] = np.conj(m[1, 2])
    if structure == Structure.X:
        f14 = draw(st.floats(0, 1))
        m[0, 3] = f14 * np.sqrt(p[0] * p[3]) * np.exp(-1j * ph)
        m[3, 0] = np.conj(m[0, 3])
    if structure == Structure.BOX:
        # fill rho24, rho34 keeping the lower 3x3 block positive
        g = draw(st.floats(0, 0.5))
        m[1, 3] = g * np.sqrt(p[1] * p[3])
        m[3, 1] = np.conj(m[1, 3])
        w = np.linalg.eigvalsh(m)
        if w[0] < 0:
            m[1, 3] = m[3, 1] = 0
    return m


@st.composite
def structured_states(draw):
    s = draw(st.sampled_from([Structure.Q, Structure.PHI, Structure.X, Structure.BOX]))
    return s, _structured(draw, s)


@given(structured_states())
def test_structured_matches_general(case):
    s, m = case
    rho = DensityMatrix4(m, s)
    a = concurrence_structured(rho).concurrence
    b = concurrence_general(rho).concurrence
    assert a == pytest.approx(b, abs=1e-9)
    pop = np.real(np.diag(m))[None]
    coh = np.array([[m[1, 2], m[0, 3], m[1, 3], m[2, 3]]])
    assert concurrence_from_entries(pop, coh, np.array([int(s)]))[0] == pytest.approx(a, abs=1e-14)


def test_structured_requires_a_family():
    rho = DensityMatrix4(np.eye(4) / 4)
    with pytest.raises(ValueError):
        concurrence_structured(rho)


def test_classification_and_zero_patterns():
    q = np.diag([0, 0.5, 0.5, 0]).astype(complex)
    q[1, 2] = q[2, 1] = 0.5
    assert classify_structure(q) == Structure.Q
    phi = np.diag([0.25] * 4).astype(complex)
    assert classify_structure(phi) == Structure.PHI
    x = phi.copy()
    x[0, 3] = x[3, 0] = 0.1
    assert classify_structure(x) == Structure.X
    box = np.diag([0, 0.5, 0.25, 0.25]).astype(complex)
    box[1, 3] = box[3, 1] = 0.1
    assert classify_structure(box) == Structure.BOX
    assert fits_structure(q, Structure.X) and not fits_structure(x, Structure.PHI)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix4(np.eye(3) / 3)
    with pytest.raises(ValueError):
        DensityMatrix4(np.eye(4) / 2)
    with pytest.raises(ValueError):
        DensityMatrix4(np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        DensityMatrix4(bad)
    x = np.eye(4, dtype=complex) / 4
    x[0, 3] = x[3, 0] = 0.1
    with pytest.raises(ValueError):
        DensityMatrix4(x, Structure.PHI)


def test_layout_conversions(rng):
    m = random_density(rng)
    rho = DensityMatrix4.from_register(m)
    assert np.allclose(rho.to_register(), m)
    assert rho[1, 1] == pytest.approx(m[3, 3])
    sw = rho.swapped()
    psi = RegisterState(2, random_state(rng, 2))
    r = DensityMatrix4.from_register(partial_trace(psi, [0, 1]))
    assert np.allclose(r.swapped().to_register(), partial_trace(psi, [1, 0]))
    assert concurrence_general(sw).concurrence == pytest.approx(
        concurrence_general(rho).concurrence, abs=1e-12)


def test_tangle_value():
    v = TangleValue(0.5)
    assert v.tau == 0.25 and v.C == 0.5
    assert TangleValue(-1e-13).concurrence == 0.0
    with pytest.raises(ValueError):
        TangleValue(1.5)


@pytest.mark.parametrize("big,k", [(2, 1), (4, 1), (4, 2), (6, 3), (10, 4), (5, 5), (7, 0)])
def test_dicke_pair_density_matches_state(big, k):
    from itertools import combinations
    amps = np.zeros(1 << big)
    for ones in combinations(range(big), k):
        amps[sum(1 << (big - 1 - q) for q in ones)] = 1.0
    amps /= np.linalg.norm(amps)
    ref = DensityMatrix4.from_register(partial_trace(RegisterState(big, amps), [0, 1]))
    rho = dicke_pair_density(big, k)
    assert np.allclose(rho.entries, ref.entries, atol=1e-14)
    c = concurrence_general(rho).concurrence
    e = rho.entries.real
    expected = max(0.0, 2 * (e[1, 2] - np.sqrt(e[0, 0] * e[3, 3])))
    assert c == pytest.approx(expected, abs=1e-12)
    if 0 < k < big:
        assert c > 0


def test_dicke_errors():
    with pytest.raises(ValueError):
        dicke_pair_density(1, 0)
    with pytest.raises(ValueError):
        dicke_pair_density(4, 5)


def test_ckw_on_w_and_random_states(rng):
    w = np.zeros(8)
    w[[1, 2, 4]] = 1 / np.sqrt(3)
    psi = RegisterState(3, w)
    pairs = [concurrence_general(partial_trace(psi, [0, k])).tau for k in (1, 2)]
    bip = one_vs_rest_tangle(partial_trace(psi, [0]))
    assert ckw_residual(pairs, bip) == pytest.approx(0.0, abs=1e-12)
    for _ in range(20):
        psi = RegisterState(4, random_state(rng, 4))
        pairs = [concurrence_general(partial_trace(psi, [0, k])).tau for k in (1, 2, 3)]
        assert ckw_residual(pairs, one_vs_rest_tangle(partial_trace(psi, [0]))) >= -1e-12


def test_pairwise_tangle_matrix_validation():
    z = PairwiseTangleMatrix.zeros(3)
    assert z.n == 3 and z.off_diagonal().shape == (6,)
    with pytest.raises(ValueError):
        PairwiseTangleMatrix(np.array([[0, 0.1], [0.2, 0]]))
    with pytest.raises(ValueError):
        PairwiseTangleMatrix(np.array([[0.1, 0], [0, 0]]))
    with pytest.raises(ValueError):
        PairwiseTangleMatrix(np.ones((2, 3)))
