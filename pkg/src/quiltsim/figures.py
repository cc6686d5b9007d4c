"""Preset schedules for the standard heat-map panels.

Each preset is a named scheme plus the event indices at which tangle
snapshots are taken.  Qubit labels in captions are 1-based; the schemes here
use 0-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .schemes import (Scheme, build_binary_tree, build_chain, build_neel_variant,
                      build_random, build_star)

DEFAULT_SEED = 2024


@dataclass(frozen=True)
class FigurePreset:
    key: str
    description: str
    scheme: Scheme
    snapshots: tuple = field(default=())


def _topology(name, n, t, seed, **kw):
    if name == "random":
        return build_random(n, 1.0, t, seed, **kw)
    if name == "chain":
        return build_chain(n, 1.0, t, **kw)
    return build_star(n, 1.0, t, **kw)


def figure_presets(seed: int = DEFAULT_SEED) -> dict:
    """All presets keyed by panel name (``'4a'`` ... ``'7g'``)."""
    q = math.pi / 4
    out = {}

    def add(key, desc, scheme, snapshots=()):
        out[key] = FigurePreset(key, desc, scheme, tuple(snapshots))

    topo = (("a", "random"), ("b", "chain"), ("c", "star"))
    for p, name in topo:
        add("4" + p, f"{name}, 30 qubits, first excited, t=pi/4",
            _topology(name, 30, q, seed))
    add("4d", "doubling schedule, 32 qubits", build_binary_tree(32))

    for p, name in topo:
        add("5" + p, f"{name}, 30 qubits, 1st and 10th excited, t=pi/4",
            _topology(name, 30, q, seed, excited=(0, 9)))
    chain = _topology("chain", 30, q, seed, excited=(0, 9))
    for p, k in zip("defg", range(8, 12)):
        add("5" + p, f"chain with 10th excited, snapshot after collision {k}", chain, (k,))

    for p, name in topo:
        add("6" + p, f"{name}, 30 qubits, alternating start, t=pi/4",
            build_neel_variant(30, 1.0, q, name, seed))
    add("6d", "star, 30 qubits, 1st, 10th and 20th excited",
        build_neel_variant(30, 1.0, q, "star", seed, excited=(0, 9, 19)))

    for p, name in topo:
        add("7" + p, f"{name}, 30 qubits, xy coupling, t=pi/8",
            _topology(name, 30, math.pi / 8, seed, kind="xy"))
    for p, k in zip("defg", (16, 32, 64, 128)):
        add("7" + p, f"star, 30 qubits, xy coupling, t=pi/{k}",
            _topology("star", 30, math.pi / k, seed, kind="xy"))
    return out


def preset(key: str, seed: int = DEFAULT_SEED) -> FigurePreset:
    presets = figure_presets(seed)
    try:
        return presets[key]
    except KeyError:
        raise KeyError(f"unknown figure {key!r}; choose from {', '.join(presets)}") from None
