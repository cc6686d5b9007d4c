"""Collision events, schedules and the standard schedule builders.

Qubits are numbered from 0.  Every builder is deterministic; random builders
draw from ``numpy.random.Generator(PCG64(seed))``, whose output stream is
fixed across platforms for a given numpy major version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .qstate import KINDS

QUARTER_PI = math.pi / 4


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CollisionEvent:
    """Two qubits interact for ``duration`` under one coupling.

    ``old`` is the qubit already in the system.  ``new`` is normally a fresh
    qubit; for old-pair collisions it is simply the second participant.
    """

    old: int
    new: int
    coupling: float = 1.0
    duration: float = QUARTER_PI
    kind: str = "ee"
    theta: float = 0.0

    def __post_init__(self):
        if self.old == self.new:
            raise ValueError(f"collision of qubit {self.old} with itself")
        if min(self.old, self.new) < 0:
            raise ValueError("qubit indices must be non-negative")
        if self.duration < 0 or self.coupling < 0:
            raise ValueError("duration and coupling must be non-negative")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def qubits(self) -> tuple:
        return (self.old, self.new)


@dataclass(frozen=True)
class SimultaneousCollision:
    """Fresh ground-state qubits ``new`` all couple to ``old`` at once (ee)."""

    old: int
    new: tuple
    couplings: tuple
    duration: float = QUARTER_PI

    def __post_init__(self):
        new = tuple(int(q) for q in self.new)
        couplings = tuple(float(w) for w in self.couplings)
        object.__setattr__(self, "new", new)
        object.__setattr__(self, "couplings", couplings)
        if len(new) != len(couplings):
            raise ValueError("one coupling per new qubit is required")
        if len(set(new)) != len(new) or self.old in new:
            raise ValueError("participants must be distinct")
        if any(w < 0 for w in couplings) or self.duration < 0:
            raise ValueError("couplings and duration must be non-negative")
        if new and self.total_coupling == 0:
            raise ValueError("at least one coupling must be positive")

    @property
    def total_coupling(self) -> float:
        return math.sqrt(sum(w * w for w in self.couplings))

    @property
    def qubits(self) -> tuple:
        return (self.old,) + self.new


@dataclass(frozen=True)
class ConcurrentGroups:
    """Two many-to-one collisions on disjoint qubits during the same window."""

    first: SimultaneousCollision
    second: SimultaneousCollision

    def __post_init__(self):
        if set(self.first.qubits) & set(self.second.qubits):
            raise ValueError("concurrent groups must not share qubits")
        if self.first.duration != self.second.duration:
            raise ValueError("concurrent groups must share one duration")

    @property
    def duration(self) -> float:
        return self.first.duration

    @property
    def qubits(self) -> tuple:
        return self.first.qubits + self.second.qubits


@dataclass(frozen=True)
class OldPairBlock:
    """A run of exchange collisions between old qubits, stored as arrays."""

    first: np.ndarray
    second: np.ndarray
    couplings: np.ndarray
    durations: np.ndarray

    def __post_init__(self):
        arrs = [np.ascontiguousarray(self.first, dtype=np.int64),
                np.ascontiguousarray(self.second, dtype=np.int64),
                np.ascontiguousarray(self.couplings, dtype=float),
                np.ascontiguousarray(self.durations, dtype=float)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
            raise ValueError("event arrays must be 1-d and of equal length")
        if np.any(arrs[0] == arrs[1]):
            raise ValueError("a qubit cannot collide with itself")
        if np.any(arrs[2] < 0) or np.any(arrs[3] < 0):
            raise ValueError("couplings and durations must be non-negative")
        for name, a in zip(("first", "second", "couplings", "durations"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.first.shape[0]

    def events(self) -> Iterable[CollisionEvent]:
        for i, j, w, t in zip(self.first.tolist(), self.second.tolist(),
                              self.couplings.tolist(), self.durations.tolist()):
            yield CollisionEvent(i, j, w, t, "ee")

    @property
    def qubits(self) -> tuple:
        return tuple(np.union1d(self.first, self.second).tolist())


@dataclass(frozen=True)
class Superposed:
    """Initial qubit ``e^{i phi} cos(theta) |1> + sin(theta) |0>``."""

    qubit: int
    theta: float
    phi: float = 0.0

    def vector(self) -> np.ndarray:
        """Amplitudes ``(amp_0, amp_1)``."""
        return np.array([math.sin(self.theta),
                         complex(math.cos(self.phi), math.sin(self.phi)) * math.cos(self.theta)])


@dataclass(frozen=True)
class Scheme:
    """Initial product state plus an ordered list of collisions."""

    n_qubits: int
    events: tuple
    excited: frozenset = frozenset({0})
    superposed: tuple = ()
    frequencies: tuple | None = None
    seed: int | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = int(self.n_qubits)
        if n < 1:
            raise ValueError("a scheme needs at least one qubit")
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "excited", frozenset(int(q) for q in self.excited))
        object.__setattr__(self, "superposed", tuple(self.superposed))
        freqs = self.frequencies
        freqs = (1.0,) * n if freqs is None else tuple(float(w) for w in freqs)
        if len(freqs) != n:
            raise ValueError("one frequency per qubit is required")
        object.__setattr__(self, "frequencies", freqs)
        for q in self.excited:
            if not 0 <= q < n:
                raise ValueError(f"excited qubit {q} out of range")
        sup = [s.qubit for s in self.superposed]
        if len(set(sup)) != len(sup) or any(not 0 <= q < n for q in sup):
            raise ValueError("invalid superposed qubit list")
        if set(sup) & self.excited:
            raise ValueError("a qubit cannot be both excited and superposed")
        for k, ev in enumerate(self.events):
            if any(q >= n for q in ev.qubits):
                raise ValueError(f"event {k} references a qubit outside 0..{n - 1}")

    def initial_vectors(self) -> list:
        """Single-qubit amplitude vectors ``(amp_0, amp_1)`` of the initial state."""
        vecs = [np.array([1.0, 0.0], dtype=complex) for _ in range(self.n_qubits)]
        for q in self.excited:
            vecs[q] = np.array([0.0, 1.0], dtype=complex)
        for s in self.superposed:
            vecs[s.qubit] = s.vector().astype(complex)
        return vecs

    def event_count(self) -> int:
        return sum(len(ev) if isinstance(ev, OldPairBlock) else 1 for ev in self.events)

    def with_events(self, events: Sequence, **changes) -> "Scheme":
        kw = dict(n_qubits=self.n_qubits, events=tuple(events), excited=self.excited,
                  superposed=self.superposed, frequencies=self.frequencies,
                  seed=self.seed, name=self.name, params=dict(self.params))
        kw.update(changes)
        return Scheme(**kw)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError("need at least two qubits")


def _freqs(omega, n: int) -> tuple:
    """Scalar or per-qubit frequencies as an ``n``-tuple."""
    w = np.broadcast_to(np.asarray(omega, dtype=float), (n,))
    return tuple(w.tolist())


def _pair_events(pairs, coupling, duration, kind, theta):
    return tuple(CollisionEvent(old, new, coupling, duration, kind, theta)
                 for new, old in pairs)


def build_chain(n: int, coupling: float = 1.0, duration: float = QUARTER_PI, *,
                kind: str = "ee", theta: float = 0.0, excited: Iterable[int] = (0,),
                omega=1.0) -> Scheme:
    """Qubit ``i`` collides with qubit ``i - 1``."""
    _check_n(n)
    events = _pair_events(((i, i - 1) for i in range(1, n)), coupling, duration, kind, theta)
    return Scheme(n, events, frozenset(excited), frequencies=_freqs(omega, n), name="chain",
                  params=dict(coupling=coupling, duration=duration, kind=kind, theta=theta))


def build_star(n: int, coupling: float = 1.0, duration: float = QUARTER_PI, *,
               kind: str = "ee", theta: float = 0.0, excited: Iterable[int] = (0,),
               omega=1.0) -> Scheme:
    """Every new qubit collides with qubit 0."""
    _check_n(n)
    events = _pair_events(((i, 0) for i in range(1, n)), coupling, duration, kind, theta)
    return Scheme(n, events, frozenset(excited), frequencies=_freqs(omega, n), name="star",
                  params=dict(coupling=coupling, duration=duration, kind=kind, theta=theta))


def random_targets(n: int, seed: int | None) -> list:
    """For each new qubit ``i >= 1`` a uniform choice among ``0..i-1``."""
    rng = make_rng(seed)
    return [int(rng.integers(0, i)) for i in range(1, n)]


def build_random(n: int, coupling: float = 1.0, duration: float = QUARTER_PI,
                 seed: int | None = 0, *, kind: str = "ee", theta: float = 0.0,
                 excited: Iterable[int] = (0,), omega=1.0) -> Scheme:
    """Each new qubit collides with a uniformly chosen old qubit."""
    _check_n(n)
    targets = random_targets(n, seed)
    events = _pair_events(((i, targets[i - 1]) for i in range(1, n)),
                          coupling, duration, kind, theta)
    return Scheme(n, events, frozenset(excited), frequencies=_freqs(omega, n), seed=seed,
                  name="random",
                  params=dict(coupling=coupling, duration=duration, kind=kind, theta=theta))


def uniform_quilt_durations(n: int, coupling: float = 1.0) -> np.ndarray:
    """Durations that spread one excitation evenly along a chain of ``n`` qubits.

    Entry ``k`` is the duration for new qubit ``k + 1``.
    """
    i = np.arange(2, n + 1)
    return np.arcsin(np.sqrt((n - i + 1) / (n - i + 2))) / coupling


def build_uniform_quilt(n: int, coupling: float = 1.0, *, omega=1.0) -> Scheme:
    """Chain whose durations leave every pair with tangle ``4 / n^2``."""
    _check_n(n)
    if coupling <= 0:
        raise ValueError("coupling must be positive")
    ts = uniform_quilt_durations(n, coupling)
    events = tuple(CollisionEvent(i - 1, i, coupling, float(ts[i - 1]))
                   for i in range(1, n))
    return Scheme(n, events, frozenset({0}), frequencies=_freqs(omega, n),
                  name="uniform", params=dict(coupling=coupling))


def binary_tree_targets(n: int) -> list:
    """Old partner of each new qubit ``1..n-1`` in the doubling schedule."""
    return [k - (1 << ((k - 1).bit_length() - 1)) - 1 for k in range(2, n + 1)]


def build_binary_tree(n: int, coupling: float = 1.0, *, omega=1.0) -> Scheme:
    """Doubling schedule of quarter-period swaps; ``n`` must be a power of two."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"n={n} is not a power of two >= 2")
    if coupling <= 0:
        raise ValueError("coupling must be positive")
    t = QUARTER_PI / coupling
    events = tuple(CollisionEvent(old, k, coupling, t)
                   for k, old in enumerate(binary_tree_targets(n), start=1))
    return Scheme(n, events, frozenset({0}), frequencies=_freqs(omega, n),
                  name="binary", params=dict(coupling=coupling))


_TOPOLOGIES = {"chain": build_chain, "star": build_star, "random": build_random}


def build_neel_variant(n: int, coupling: float = 1.0, duration: float = QUARTER_PI,
                       topology: str = "chain", seed: int | None = 0, *,
                       excited: Iterable[int] | None = None, kind: str = "ee",
                       theta: float = 0.0, omega=1.0) -> Scheme:
    """Alternating ``|1010...>`` start (or a custom excitation set)."""
    if topology not in _TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    exc = range(0, n, 2) if excited is None else excited
    kw = dict(kind=kind, theta=theta, excited=exc, omega=omega)
    if topology == "random":
        s = build_random(n, coupling, duration, seed, **kw)
    else:
        s = _TOPOLOGIES[topology](n, coupling, duration, **kw)
    return s.with_events(s.events, name=f"neel-{topology}")


def build_thermalization(n: int, coupling: float = 1.0, n_events: int = 1000,
                         seed: int | None = 0, t_max: float = 2 * math.pi, *,
                         mode: str = "pairs", excited: int = 0,
                         omega=1.0) -> Scheme:
    """Random old-pair exchange collisions starting from one excitation.

    ``mode='pairs'`` draws two distinct qubits uniformly per event;
    ``mode='first'`` lets a uniformly drawn qubit collide with qubit 0.
    Durations are uniform in ``[0, t_max)``.
    """
    _check_n(n)
    rng = make_rng(seed)
    if mode == "pairs":
        k1 = rng.integers(0, n, size=n_events)
        k2 = rng.integers(0, n - 1, size=n_events)
        k2 = k2 + (k2 >= k1)
    elif mode == "first":
        k1 = np.zeros(n_events, dtype=np.int64)
        k2 = rng.integers(1, n, size=n_events)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ts = rng.uniform(0.0, t_max, size=n_events)
    block = OldPairBlock(k1, k2, np.full(n_events, float(coupling)), ts)
    return Scheme(n, (block,), frozenset({excited}), frequencies=_freqs(omega, n), seed=seed,
                  name="thermal",
                  params=dict(coupling=coupling, n_events=n_events, t_max=t_max, mode=mode))
