"""Tangle matrices on disk, heat maps, run configs and manifests.

Formats
-------
Tangle CSV
    ``n`` lines of ``n`` comma-separated values, row ``i`` is qubit ``i``,
    each value printed with ``%.17g`` so it round-trips exactly.
Heat map
    Binary PPM (``P6``), one pixel per pair, 16-bit big-endian samples
    (``maxval`` 65535), grey ``R = G = B``.  A pixel encodes
    ``log2(tau)`` linearly from ``floor`` (black) to ``0`` (white); pairs with
    ``tau = 0`` or ``log2(tau) < floor`` are black.
Config
    INI text with a single ``[run]`` section and a ``schema_version`` key.
Event list
    One event per line, ``#`` starts a comment.  ``old new kind coupling t
    [theta]`` for a pair collision, ``group old new1,new2,... w1,w2,... t``
    for a many-to-one collision.
Manifest
    JSON with the config, the expanded event list, engine, versions, output
    paths and timing; enough to replay the run.
"""

from __future__ import annotations

import configparser
import json
import math
import os
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .measures import PairwiseTangleMatrix
from .schemes import (CollisionEvent, ConcurrentGroups, OldPairBlock, Scheme,
                      SimultaneousCollision, Superposed)

SCHEMA_VERSION = 1
DEFAULT_FLOOR = -52.0
PPM_MAXVAL = 65535


# ---------------------------------------------------------------------------
# Tangle CSV
# ---------------------------------------------------------------------------

def _values(matrix) -> np.ndarray:
    if isinstance(matrix, PairwiseTangleMatrix):
        return matrix.values
    return PairwiseTangleMatrix(np.asarray(matrix, dtype=float)).values


def tangle_csv_text(matrix) -> str:
    v = _values(matrix)
    return "".join(",".join(format(float(x), ".17g") for x in row) + "\n" for row in v)


def export_tangle_csv(matrix, path) -> Path:
    """Write a tangle matrix as full-precision CSV."""
    path = Path(path)
    path.write_text(tangle_csv_text(matrix))
    return path


def read_tangle_csv(path) -> PairwiseTangleMatrix:
    v = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return PairwiseTangleMatrix(v)


# ---------------------------------------------------------------------------
# Heat maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatMapSpec:
    """``log2(tau)`` grey ramp; values at or below ``floor`` are black."""

    floor: float = DEFAULT_FLOOR
    maxval: int = PPM_MAXVAL

    def __post_init__(self):
        if not (math.isfinite(self.floor) and self.floor < 0):
            raise ValueError("floor must be a negative finite number")
        if not 1 <= self.maxval <= PPM_MAXVAL:
            raise ValueError("maxval must be in 1..65535")

    def transform(self, tau: np.ndarray) -> np.ndarray:
        """``log2(tau)`` clipped to ``[floor, 0]``; zeros map to ``floor``."""
        tau = np.asarray(tau, dtype=float)
        out = np.full(tau.shape, self.floor)
        pos = tau > 0
        out[pos] = np.log2(tau[pos])
        return np.clip(out, self.floor, 0.0)

    def levels(self, tau: np.ndarray) -> np.ndarray:
        x = (self.transform(tau) - self.floor) / -self.floor
        return np.rint(x * self.maxval).astype(np.int64)

    def invert(self, levels: np.ndarray) -> np.ndarray:
        """Approximate ``log2(tau)`` from pixel levels (black gives ``floor``)."""
        return self.floor + np.asarray(levels, dtype=float) / self.maxval * -self.floor


def heatmap_bytes(matrix, spec: HeatMapSpec | None = None) -> bytes:
    spec = HeatMapSpec() if spec is None else spec
    lv = spec.levels(_values(matrix))
    h, w = lv.shape
    dtype = ">u2" if spec.maxval > 255 else "u1"
    rgb = np.repeat(lv[:, :, None], 3, axis=2).astype(dtype)
    header = f"P6\n{w} {h}\n{spec.maxval}\n".encode("ascii")
    return header + rgb.tobytes()


def export_heatmap(matrix, spec: HeatMapSpec | None = None, path=None) -> Path:
    """Render ``log2(tau)`` of a tangle matrix as a PPM image."""
    if path is None:
        raise ValueError("an output path is required")
    path = Path(path)
    path.write_bytes(heatmap_bytes(matrix, spec))
    return path


def read_ppm(path) -> tuple:
    """Read a binary PPM; returns ``(pixels[h, w, 3], maxval)``."""
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    pos += 1
    if fields[0] != b"P6":
        raise ValueError(f"{path}: not a binary PPM")
    w, h, maxval = (int(f) for f in fields[1:])
    dtype = ">u2" if maxval > 255 else "u1"
    px = np.frombuffer(data, dtype=dtype, count=w * h * 3, offset=pos)
    return px.reshape(h, w, 3).astype(np.int64), maxval


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------

def _int_list(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _float_list(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_event_line(line: str):
    tok = line.split()
    if tok[0] == "group":
        if len(tok) != 5:
            raise ValueError("group lines need: group old new1,new2,... w1,w2,... t")
        return SimultaneousCollision(int(tok[1]), _int_list(tok[2]), _float_list(tok[3]),
                                     float(tok[4]))
    if len(tok) not in (5, 6):
        raise ValueError("event lines need: old new kind coupling t [theta]")
    theta = float(tok[5]) if len(tok) == 6 else 0.0
    return CollisionEvent(int(tok[0]), int(tok[1]), float(tok[3]), float(tok[4]), tok[2], theta)


def parse_events(text: str) -> list:
    events = []
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            events.append(parse_event_line(line))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {k}: {exc}") from None
    return events


def read_events(path) -> list:
    return parse_events(Path(path).read_text())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_event(ev) -> str:
    if isinstance(ev, CollisionEvent):
        return " ".join([str(ev.old), str(ev.new), ev.kind, _fmt(ev.coupling),
                         _fmt(ev.duration), _fmt(ev.theta)])
    if isinstance(ev, SimultaneousCollision):
        return " ".join(["group", str(ev.old), ",".join(map(str, ev.new)),
                         ",".join(_fmt(w) for w in ev.couplings), _fmt(ev.duration)])
    raise TypeError(f"cannot format {type(ev).__name__} as one line")


def format_events(events) -> str:
    lines = []
    for ev in events:
        if isinstance(ev, OldPairBlock):
            lines.extend(format_event(e) for e in ev.events())
        elif isinstance(ev, ConcurrentGroups):
            raise TypeError("concurrent groups have no line format")
        else:
            lines.append(format_event(ev))
    return "".join(line + "\n" for line in lines)


def event_record(ev) -> dict:
    if isinstance(ev, CollisionEvent):
        return dict(type="pair", qubits=list(ev.qubits), kind=ev.kind,
                    coupling=ev.coupling, t=ev.duration, theta=ev.theta)
    if isinstance(ev, SimultaneousCollision):
        return dict(type="group", qubits=list(ev.qubits), couplings=list(ev.couplings),
                    t=ev.duration)
    if isinstance(ev, ConcurrentGroups):
        return dict(type="concurrent", groups=[event_record(ev.first), event_record(ev.second)],
                    t=ev.duration)
    if isinstance(ev, OldPairBlock):
        return dict(type="block", first=ev.first.tolist(), second=ev.second.tolist(),
                    couplings=ev.couplings.tolist(), t=ev.durations.tolist())
    raise TypeError(f"unsupported event {type(ev).__name__}")


def event_from_record(rec: dict):
    kind = rec["type"]
    if kind == "pair":
        old, new = rec["qubits"]
        return CollisionEvent(old, new, rec["coupling"], rec["t"], rec["kind"], rec["theta"])
    if kind == "group":
        q = rec["qubits"]
        return SimultaneousCollision(q[0], tuple(q[1:]), tuple(rec["couplings"]), rec["t"])
    if kind == "concurrent":
        a, b = (event_from_record(g) for g in rec["groups"])
        return ConcurrentGroups(a, b)
    if kind == "block":
        return OldPairBlock(rec["first"], rec["second"], rec["couplings"], rec["t"])
    raise ValueError(f"unknown event type {kind!r}")


def scheme_record(scheme: Scheme) -> dict:
    return dict(n_qubits=scheme.n_qubits, name=scheme.name, seed=scheme.seed,
                excited=sorted(scheme.excited),
                superposed=[[s.qubit, s.theta, s.phi] for s in scheme.superposed],
                frequencies=list(scheme.frequencies),
                params={k: v for k, v in scheme.params.items()},
                events=[event_record(ev) for ev in scheme.events])


def scheme_from_record(rec: dict) -> Scheme:
    return Scheme(rec["n_qubits"], tuple(event_from_record(e) for e in rec["events"]),
                  frozenset(rec["excited"]),
                  tuple(Superposed(*s) for s in rec.get("superposed", ())),
                  tuple(rec["frequencies"]), rec.get("seed"), rec.get("name", "custom"),
                  dict(rec.get("params", {})))


# ---------------------------------------------------------------------------
# Config and manifest
# ---------------------------------------------------------------------------

CONFIG_KEYS = ("scheme", "n", "coupling", "t", "omega", "seed", "kind", "theta",
               "excited", "engine", "snapshots", "events", "outputs", "t_max",
               "n_events", "mode", "topology", "floor")


def read_config(path) -> dict:
    """Flat ``[run]`` section of an INI file as a dict of strings."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    if not cp.has_section("run"):
        raise ValueError(f"{path}: missing [run] section")
    sec = dict(cp["run"])
    version = sec.pop("schema_version", None)
    if version is None:
        raise ValueError(f"{path}: missing schema_version")
    if int(version) != SCHEMA_VERSION:
        raise ValueError(f"{path}: schema_version {version} is not supported "
                         f"(expected {SCHEMA_VERSION})")
    unknown = sorted(set(sec) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError(f"{path}: unknown keys {', '.join(unknown)}")
    return sec


def write_config(values: dict, path) -> Path:
    cp = configparser.ConfigParser()
    cp["run"] = {"schema_version": str(SCHEMA_VERSION)}
    for k, v in values.items():
        if v is not None:
            cp["run"][k] = str(v)
    path = Path(path)
    with open(path, "w") as fh:
        cp.write(fh)
    return path


def library_version() -> str:
    from . import __version__
    return __version__


def build_manifest(scheme: Scheme, *, engine: str, config: dict, outputs: dict,
                   wall_time: float, extra: dict | None = None,
                   floor: float = DEFAULT_FLOOR) -> dict:
    from . import kernels
    rec = dict(schema_version=SCHEMA_VERSION, library_version=library_version(),
               kernel_backend=kernels.BACKEND, python=platform.python_version(),
               numpy=np.__version__, engine=engine, config=config, seed=scheme.seed,
               heatmap_floor=floor, scheme=scheme_record(scheme), outputs=outputs,
               wall_time=wall_time)
    if extra:
        rec.update(extra)
    return rec


def write_manifest(record: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    rec = json.loads(Path(path).read_text())
    if rec.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported manifest schema {rec.get('schema_version')}")
    return rec


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
