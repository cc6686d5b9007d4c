import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quiltsim.closed_forms import (DetuningFactors, bath_temperature, bath_temperature_ghz,
                                   closed_form_chain_tangle, excited_bath_collision_analysis,
                                   excited_bath_densities, first_collision_tangle,
                                   superposed_pair_tangle)
from quiltsim.measures import concurrence_general
from quiltsim.oracle import run_oracle
from quiltsim.recurrence import (IncompatibleCollision, PairState, WLikeState,
                                 collide_new_qubit, collide_old_pair_wlike, simulate,
                                 tangle_matrix, wlike_tangles)
from quiltsim.schemes import (CollisionEvent, OldPairBlock, Scheme, Superposed, build_chain,
                              build_random, build_thermalization)


def _pair(t, coupling=1.0, omega=(1.0, 1.0)):
    s = Scheme(2, [CollisionEvent(0, 1, coupling, t)], frequencies=omega)
    return simulate(s).tangles


@pytest.mark.parametrize("t0", [0.0, 0.1, math.pi / 8, 0.5, math.pi / 4, 1.3])
def test_first_collision(t0):
    assert _pair(t0)[0, 1] == pytest.approx(math.sin(2 * t0) ** 2, abs=1e-14)
    assert first_collision_tangle(1.0, t0) == pytest.approx(math.sin(2 * t0) ** 2)


@pytest.mark.parametrize("t", [0.3, math.pi / 4, 1.0])
def test_chain_step_relations(t):
    state = PairState(Scheme(4, []))
    state.collide(CollisionEvent(0, 1, 1.0, 0.7))
    before = state.tangle_matrix()
    rho33 = state.excitation[1]
    state.collide(CollisionEvent(1, 2, 1.0, t))
    after = state.tangle_matrix()
    assert after[0, 2] == pytest.approx(before[0, 1] * math.sin(t) ** 2, abs=1e-14)
    assert after[0, 1] == pytest.approx(before[0, 1] * math.cos(t) ** 2, abs=1e-14)
    assert after[1, 2] == pytest.approx(4 * rho33 ** 2 * (math.sin(t) * math.cos(t)) ** 2,
                                        abs=1e-14)


@pytest.mark.parametrize("wb,wc,t", [(1.0, 1.0, 0.4), (1.0, 2.0, 0.6), (3.0, 0.5, 1.1)])
def test_detuned_step(wb, wc, t):
    coupling = 0.8
    s = Scheme(3, [CollisionEvent(0, 1, 1.0, 0.5), CollisionEvent(1, 2, coupling, t)],
               frequencies=(1.0, wb, wc))
    state = PairState(s)
    state.collide(s.events[0])
    tau_ab = state.tangle_matrix()[0, 1]
    state.collide(s.events[1])
    f = DetuningFactors.compute(coupling, wb, wc, t)
    delta = math.sqrt(0.25 * (wb - wc) ** 2 + coupling ** 2)
    assert f.delta == pytest.approx(delta)
    assert f.beta_s == pytest.approx(coupling ** 2 * math.sin(t * delta) ** 2 / delta ** 2)
    assert state.tangle_matrix()[0, 2] == pytest.approx(tau_ab * f.beta_s, abs=1e-13)
    assert state.tangle_matrix()[0, 1] == pytest.approx(tau_ab * f.beta_c, abs=1e-13)


@given(st.floats(0.05, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 5))
def test_detuning_factors(coupling, wb, wc, t):
    f = DetuningFactors.compute(coupling, wb, wc, t)
    assert f.beta_s + f.beta_c == 1.0
    assert 0 <= f.beta_s <= coupling ** 2 / f.delta ** 2 + 1e-15
    assert coupling ** 2 / f.delta ** 2 <= 1 + 1e-15


def test_detuning_slows_transfer():
    # at the full-transfer time of the detuned pair, beta_s is capped by Omega^2 / Delta^2
    for d in [0.0, 0.5, 1.0, 2.0, 4.0]:
        delta = math.sqrt(0.25 * d * d + 1)
        f = DetuningFactors.compute(1.0, 1.0 + d, 1.0, math.pi / (2 * delta))
        assert f.beta_s == pytest.approx(1 / delta ** 2)


def _schemes():
    seeds = st.integers(0, 10_000)
    return st.builds(
        lambda n, seed, t, kind, exc: build_random(n, 1.0, t, seed, kind=kind,
                                                   excited=exc),
        st.integers(4, 8), seeds, st.floats(0.05, 1.5), st.sampled_from(["ee", "xy"]),
        st.sampled_from([(0,), (0, 3), (1, 2)]))


@settings(max_examples=25)
@given(_schemes())
def test_oracle_equivalence_random(scheme):
    a = simulate(scheme).tangles.values
    o = run_oracle(scheme, check_ckw=False).tangles.values
    assert np.max(np.abs(a - o)) < 1e-9


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.integers(3, 10), st.floats(0.05, 1.5))
def test_conservation_spectators_and_structure(seed, n, t):
    s = build_random(n, 1.0, t, seed)
    state = PairState(s)
    prev = state.tangle_matrix().values
    for ev in s.events:
        state.collide(ev)
        cur = state.tangle_matrix().values
        spectators = [q for q in range(n) if q not in ev.qubits]
        sub = np.ix_(spectators, spectators)
        np.testing.assert_array_equal(cur[sub], prev[sub])
        for a in spectators:
            assert cur[a, ev.old] + cur[a, ev.new] == pytest.approx(prev[a, ev.old], abs=1e-12)
        assert state.structure_consistent()
        prev = cur
    assert state.max_conservation_residual < 1e-12


def test_structure_closure_by_kind():
    from quiltsim.measures import Structure
    for kind, exc, allowed in [("ee", (0,), {Structure.Q}),
                               ("ee", (0, 2), {Structure.Q, Structure.PHI}),
                               ("xy", (0,), {Structure.X})]:
        state = PairState(build_chain(6, 1.0, 0.6, kind=kind, excited=exc))
        for ev in build_chain(6, 1.0, 0.6, kind=kind, excited=exc).events:
            state.collide(ev)
        for i, j in state.tracked_pairs():
            assert state.pair_density(i, j).structure in allowed


def test_errors():
    state = PairState(Scheme(3, []))
    state.collide(CollisionEvent(0, 1))
    with pytest.raises(IncompatibleCollision):
        state.collide(CollisionEvent(0, 1))
    with pytest.raises(IndexError):
        state.collide(CollisionEvent(0, 5))
    sup = Scheme(3, [], excited=(), superposed=(Superposed(0, 0.4),))
    st2 = PairState(sup)
    st2.collide(CollisionEvent(0, 1))
    with pytest.raises(IncompatibleCollision):
        st2.collide(CollisionEvent(0, 2, kind="xy"))
    box_from_ee = PairState(Scheme(3, [], excited=(), superposed=(Superposed(0, 0.4),)))
    box_from_ee.collide(CollisionEvent(0, 1))
    with pytest.raises(IncompatibleCollision):
        box_from_ee.collide(CollisionEvent(1, 2, kind="xy"))
    half = PairState(Scheme(2, [], excited=(), superposed=(Superposed(1, 0.3),)))
    with pytest.raises(IncompatibleCollision):
        half.collide(CollisionEvent(0, 1))


def test_pair_density_frames_match_oracle(rng):
    for seed in range(5):
        s = build_random(5, 0.9, 0.7, seed, kind="xy", omega=[1.0, 1.3, 0.7, 2.0, 1.1])
        state = PairState(s)
        for ev in s.events:
            state.collide(ev)
        reg = run_oracle(s).register
        for i in range(5):
            for j in range(5):
                if i != j:
                    np.testing.assert_allclose(state.pair_density(i, j, frame="lab").entries,
                                               reg.pair_density(i, j).entries, atol=1e-12)
    with pytest.raises(ValueError):
        state.pair_density(0, 1, frame="rotating-ish")
    with pytest.raises(ValueError):
        state.pair_density(1, 1)


# -- W-like -------------------------------------------------------------------

def test_wlike_examples():
    w = WLikeState.excited(4, 1)
    assert np.array_equal(collide_old_pair_wlike(w, 1, 2, 1.0, 0.0).amplitudes, w.amplitudes)
    out = collide_old_pair_wlike(WLikeState.excited(2, 0), 0, 1, 1.0, math.pi / 2)
    np.testing.assert_allclose(out.amplitudes, [0, -1j], atol=1e-15)
    with pytest.raises(ValueError):
        WLikeState(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        collide_old_pair_wlike(w, 2, 2, 1.0, 0.3)


@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(1, 200))
def test_wlike_norm_and_pair_conservation(seed, n, n_events):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    state = WLikeState(a / np.linalg.norm(a))
    for _ in range(n_events):
        k1, k2 = rng.choice(n, 2, replace=False)
        new = collide_old_pair_wlike(state, k1, k2, 1.0, rng.uniform(0, 2 * np.pi))
        p_before = abs(state.amplitudes[k1]) ** 2 + abs(state.amplitudes[k2]) ** 2
        p_after = abs(new.amplitudes[k1]) ** 2 + abs(new.amplitudes[k2]) ** 2
        assert p_after == pytest.approx(p_before, abs=1e-13)
        state = new
    assert state.norm_error() < 1e-12
    t = tangle_matrix(state).values
    p = np.abs(state.amplitudes) ** 2
    assert t[0, 1] == pytest.approx(4 * p[0] * p[1])


def test_tangle_matrix_examples():
    n = 8
    t = wlike_tangles(np.full(n, 1 / math.sqrt(n)))
    off = t[~np.eye(n, dtype=bool)]
    np.testing.assert_allclose(off, 4 / n ** 2)
    assert np.all(np.diag(t) == 0)
    assert tangle_matrix(PairState(Scheme(3, []))).values.sum() == 0
    state = collide_new_qubit(PairState(Scheme(2, [])), CollisionEvent(0, 1, 1.0, 0.3))
    assert tangle_matrix(state)[0, 1] == pytest.approx(math.sin(0.6) ** 2)


def test_thermal_wlike_matches_oracle():
    s = build_thermalization(6, 1.0, 1000, seed=3)
    res = simulate(s, snapshots=[0, 10, 500])
    assert res.engine == "wlike"
    o = run_oracle(s, snapshots=[0, 10, 500], check_ckw=False)
    for k in (0, 10, 500):
        assert np.max(np.abs(res.snapshots[k].values - o.snapshots[k].values)) < 1e-8
    assert np.max(np.abs(res.tangles.values - o.tangles.values)) < 1e-8


def test_mixed_new_and_old_collisions_use_wlike():
    events = [CollisionEvent(0, 1, 1.0, 0.4), CollisionEvent(1, 2, 1.0, 0.9),
              CollisionEvent(2, 0, 1.0, 0.3),
              OldPairBlock(np.array([0, 1]), np.array([2, 3]), np.ones(2), np.array([0.2, 1.0]))]
    s = Scheme(4, events)
    res = simulate(s)
    assert res.engine == "wlike"
    assert np.max(np.abs(res.tangles.values - run_oracle(s).tangles.values)) < 1e-12
    with pytest.raises(IncompatibleCollision):
        simulate(Scheme(4, events, excited=(0, 3)))


# -- closed forms ---------------------------------------------------------------

def test_closed_form_chain():
    assert closed_form_chain_tangle(5, 1.0, math.pi / 4) == pytest.approx(0.125, abs=1e-15)
    assert closed_form_chain_tangle(2, 1.0, 0.3) == pytest.approx(math.sin(0.6) ** 2)
    with pytest.raises(ValueError):
        closed_form_chain_tangle(1, 1.0, 0.3)
    for m in range(2, 15):
        for t in (0.3, math.pi / 4, 1.2):
            run = simulate(build_chain(m, 1.0, t)).tangles
            assert run[0, m - 1] == pytest.approx(closed_form_chain_tangle(m, 1.0, t), abs=1e-12)


def test_superposed_examples():
    for t in (0.2, 0.7, 1.4):
        for phi in (0.0, 1.0, 2.5):
            assert superposed_pair_tangle(0, math.pi / 2, 0, phi, t) == pytest.approx(
                math.sin(2 * t) ** 2, abs=1e-14)
        assert superposed_pair_tangle(math.pi / 4, math.pi / 4, 0.3, 0.3, t) == pytest.approx(
            math.sin(t) ** 2, abs=1e-14)


@settings(max_examples=40)
@given(st.floats(0, math.pi / 2), st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi),
       st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_superposed_matches_oracle(th1, th2, ph1, ph2, t):
    s = Scheme(2, [CollisionEvent(0, 1, 1.0, t)], excited=(),
               superposed=(Superposed(0, th1, ph1), Superposed(1, th2, ph2)))
    tau = run_oracle(s).tangles[0, 1]
    closed = superposed_pair_tangle(th1, th2, ph1, ph2, t)
    assert closed == pytest.approx(tau, abs=1e-9)
    assert -1e-12 <= closed <= 1 + 1e-12


@settings(max_examples=30)
@given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi), st.floats(0, math.pi),
       st.integers(0, 1))
def test_superposed_old_qubit_engine_matches_oracle(theta, phi, t, bit):
    # a superposed old qubit meeting a ground-state qubit gives a box state
    events = [CollisionEvent(0, 1, 1.0, t), CollisionEvent(1, 2, 0.7, 0.4),
              CollisionEvent(0, 3, 1.2, 0.9)]
    s = Scheme(4, events, excited=(), superposed=(Superposed(0, theta, phi),))
    a = simulate(s).tangles.values
    assert np.max(np.abs(a - run_oracle(s).tangles.values)) < 1e-9


def test_excited_bath():
    c1, c2 = excited_bath_collision_analysis(2, 9, 1.0, math.pi / 4)
    assert c1 == 0 and c2 == 0
    c1, c2 = excited_bath_collision_analysis(3, 5, 1.0, math.pi / 2)
    assert c1 == pytest.approx(0.0, abs=1e-12) and c2 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        excited_bath_collision_analysis(9, 9, 1.0, 0.3)


@pytest.mark.parametrize("j,m,t", [(1, 3, 0.4), (2, 5, 0.9), (1, 6, math.pi / 4), (3, 6, 0.3)])
def test_excited_bath_tangles_match_oracle(j, m, t):
    s = build_chain(m + 1, 1.0, t, excited=(0, m))
    reg = run_oracle(s).register
    rho_jm, rho_jm1 = excited_bath_densities(j, m, 1.0, t)
    tau_jm = concurrence_general(reg.pair_density(j - 1, m - 1)).tau
    tau_jm1 = concurrence_general(reg.pair_density(j - 1, m)).tau
    assert concurrence_general(rho_jm).tau == pytest.approx(tau_jm, abs=1e-12)
    assert concurrence_general(rho_jm1).tau == pytest.approx(tau_jm1, abs=1e-12)


def test_bath_temperature():
    assert bath_temperature_ghz(1e5, 5.0) == pytest.approx(0.020, rel=0.1)
    assert bath_temperature_ghz(1e2, 5.0) == pytest.approx(0.050, rel=0.1)
    assert bath_temperature_ghz(1e10, 5.0) == pytest.approx(0.010, rel=0.1)
    with pytest.raises(ValueError):
        bath_temperature(2, 1e9)
    with pytest.raises(ValueError):
        bath_temperature(10, 0.0)


# -- non-W-like quilt ------------------------------------------------------------

def _printed_state(t):
    v = np.zeros(8, dtype=complex)
    r2 = math.sqrt(2)
    v[0b111] = -1j * np.exp(-1j * t) / r2 * math.sin(t) * math.sin(r2 * t)
    v[0b100] = 1j * math.cos(t) ** 2
    v[0b010] = 0.5 * np.exp(-1j * t) * math.sin(t) * (2 * math.cos(r2 * t)
                                                     + 1j * r2 * math.sin(r2 * t))
    v[0b001] = math.cos(t) * math.sin(t)
    return v


@pytest.mark.parametrize("t", [0.3, math.pi / 3, 1.7])
def test_non_wlike_state_reproduced(t):
    s = Scheme(3, [CollisionEvent(0, 1, 1.0, t, kind="xy"),
                   CollisionEvent(0, 2, 1.0, t, kind="xy")])
    psi = run_oracle(s).register.psi
    v = _printed_state(t)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(v, psi)) ** 2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("second", [(1, 2), (0, 2)])
def test_non_wlike_quilt(second):
    t = math.pi / 3
    s = Scheme(3, [CollisionEvent(0, 1, 1.0, t, kind="xy"),
                   CollisionEvent(*second, 1.0, t, kind="xy")])
    o = run_oracle(s)
    tau = o.tangles.values
    assert tau[0, 1] > 0.01 and tau[0, 2] > 0.01 and tau[1, 2] > 0.01
    assert abs(o.register.psi[0b111]) > 0.1
    np.testing.assert_allclose(simulate(s).tangles.values, tau, atol=1e-12)
