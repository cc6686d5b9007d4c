"""Command-line interface.

Qubit indices on the command line are 0-based and angles are in radians.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .closed_forms import bath_temperature_ghz
from .figures import DEFAULT_SEED, figure_presets
from .oracle import compare_engines, run_oracle
from .qstate import two_qubit_propagator
from .recurrence import simulate as run_analytic
from .schemes import (Scheme, build_binary_tree, build_chain,
                      build_neel_variant, build_random, build_star, build_thermalization,
                      build_uniform_quilt)

SCHEMES = ("chain", "star", "random", "uniform", "binary", "neel", "thermal")
ENGINES = ("analytic", "oracle", "compare")


class CliError(Exception):
    pass


def _floats(text):
    vals = [float(x) for x in str(text).split(",") if x.strip()]
    return vals[0] if len(vals) == 1 else vals


def _ints(text) -> tuple:
    if text is None or str(text).strip() == "":
        return ()
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _scheme_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scheme")
    g.add_argument("--config", help="INI run config; command-line flags override it")
    g.add_argument("--figure", help="use a named figure preset, e.g. 4b or 5e")
    g.add_argument("--scheme", choices=SCHEMES, help="named schedule (default chain)")
    g.add_argument("--events", help="explicit event list file (needs --n)")
    g.add_argument("--n", type=int, help="number of qubits")
    g.add_argument("--t", type=float, help="collision time in radians (default pi/4)")
    g.add_argument("--coupling", type=float, help="coupling strength (default 1)")
    g.add_argument("--omega", help="qubit frequency, or one per qubit comma-separated")
    g.add_argument("--seed", type=int, help="seed for random schedules (default 0)")
    g.add_argument("--kind", choices=("ee", "xy"), help="coupling type (default ee)")
    g.add_argument("--theta", type=float, help="xy angle in radians (default 0)")
    g.add_argument("--excited", help="comma-separated initially excited qubits (default 0)")
    g.add_argument("--topology", choices=("chain", "star", "random"),
                   help="topology of the neel scheme (default chain)")
    g.add_argument("--n-events", dest="n_events", type=int,
                   help="number of collisions for the thermal scheme")
    g.add_argument("--t-max", dest="t_max", type=float,
                   help="largest random duration for the thermal scheme (default 2 pi)")
    g.add_argument("--mode", choices=("pairs", "first"),
                   help="partner choice for the thermal scheme (default pairs)")


def _run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--snapshots", help="comma-separated event counts to snapshot")
    p.add_argument("--out", help="output directory (default: print a summary only)")
    p.add_argument("--floor", type=float, help="heat-map floor for log2(tau) (default -52)")
    p.add_argument("--no-heatmap", action="store_true", help="skip PPM output")


def _resolve(args) -> dict:
    """Merge config file values under explicit flags."""
    merged = {}
    if getattr(args, "config", None):
        try:
            merged.update(io.read_config(args.config))
        except (OSError, ValueError) as exc:
            raise CliError(f"bad config: {exc}") from None
    for k in io.CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def scheme_from_options(opts: dict, figure: str | None = None) -> tuple:
    """Build the scheme described by ``opts``; returns ``(scheme, snapshots)``."""
    if figure:
        presets = figure_presets(int(opts.get("seed", DEFAULT_SEED)))
        if figure not in presets:
            raise CliError(f"unknown figure {figure!r}")
        p = presets[figure]
        return p.scheme, p.snapshots
    name = opts.get("scheme", "chain")
    t = float(opts.get("t", math.pi / 4))
    w = float(opts.get("coupling", 1.0))
    omega = _floats(opts.get("omega", 1.0))
    seed = int(opts.get("seed", 0))
    kind = opts.get("kind", "ee")
    theta = float(opts.get("theta", 0.0))
    excited = _ints(opts.get("excited", "0"))
    if opts.get("events"):
        if "n" not in opts:
            raise CliError("--events needs --n")
        try:
            events = io.read_events(opts["events"])
        except (OSError, ValueError) as exc:
            raise CliError(f"bad event file: {exc}") from None
        n = int(opts["n"])
        freqs = np.broadcast_to(np.asarray(omega, dtype=float), (n,))
        scheme = Scheme(n, events, frozenset(excited), frequencies=tuple(freqs.tolist()),
                        name="events")
        return scheme, _ints(opts.get("snapshots"))
    if "n" not in opts:
        raise CliError("--n is required")
    n = int(opts["n"])
    kw = dict(kind=kind, theta=theta, excited=excited, omega=omega)
    if name == "chain":
        s = build_chain(n, w, t, **kw)
    elif name == "star":
        s = build_star(n, w, t, **kw)
    elif name == "random":
        s = build_random(n, w, t, seed, **kw)
    elif name == "uniform":
        s = build_uniform_quilt(n, w, omega=omega)
    elif name == "binary":
        s = build_binary_tree(n, w, omega=omega)
    elif name == "neel":
        exc = excited if "excited" in opts else None
        s = build_neel_variant(n, w, t, opts.get("topology", "chain"), seed, excited=exc,
                               kind=kind, theta=theta, omega=omega)
    elif name == "thermal":
        first = excited[0] if excited else 0
        s = build_thermalization(n, w, int(opts.get("n_events", 1000)), seed,
                                 float(opts.get("t_max", 2 * math.pi)),
                                 mode=opts.get("mode", "pairs"), excited=first, omega=omega)
    else:
        raise CliError(f"unknown scheme {name!r}")
    return s, _ints(opts.get("snapshots"))


def _write_outputs(out: Path, result_tangles, snapshots: dict, spec, heatmap: bool) -> dict:
    files = {"final": {"csv": str(io.export_tangle_csv(result_tangles, out / "tangles.csv"))}}
    if heatmap:
        files["final"]["ppm"] = str(io.export_heatmap(result_tangles, spec, out / "tangles.ppm"))
    snaps = {}
    for k in sorted(snapshots):
        entry = {"csv": str(io.export_tangle_csv(snapshots[k], out / f"snapshot_{k:06d}.csv"))}
        if heatmap:
            entry["ppm"] = str(io.export_heatmap(snapshots[k], spec, out / f"snapshot_{k:06d}.ppm"))
        snaps[str(k)] = entry
    files["snapshots"] = snaps
    return files


def execute(scheme: Scheme, snapshots, engine: str, out, floor: float, heatmap: bool,
            config: dict, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    spec = io.HeatMapSpec(floor)
    t0 = time.perf_counter()
    extra = {}
    code = 0
    if engine == "analytic":
        res = run_analytic(scheme, snapshots)
        tangles, snaps = res.tangles, res.snapshots
        extra["analytic_engine"] = res.engine
    elif engine == "oracle":
        res = run_oracle(scheme, snapshots)
        tangles, snaps = res.tangles, res.snapshots
        extra.update(min_ckw_residual=res.min_ckw_residual, max_norm_error=res.max_norm_error)
    elif engine == "compare":
        rep = compare_engines(scheme)
        print(rep.summary(), file=stream)
        if rep.message:
            print(rep.message, file=stream)
        extra.update(max_diff=rep.max_diff, passed=rep.passed, tolerance=rep.tolerance)
        code = 0 if rep.passed else 1
        tangles, snaps = None, {}
    else:
        raise CliError(f"unknown engine {engine!r}")
    wall = time.perf_counter() - t0
    if tangles is not None:
        off = tangles.off_diagonal()
        print(f"{scheme.name}: n={scheme.n_qubits} events={scheme.event_count()} engine={engine} "
              f"max tau={off.max() if off.size else 0.0:.6g} wall={wall:.3f}s", file=stream)
    if out:
        out = io.ensure_dir(out)
        files = _write_outputs(out, tangles, snaps, spec, heatmap) if tangles is not None else {}
        rec = io.build_manifest(scheme, engine=engine, config=config, outputs=files,
                                wall_time=wall, extra=extra, floor=floor)
        rec["snapshots"] = sorted(int(s) for s in snapshots)
        rec["heatmap"] = heatmap
        io.write_manifest(rec, out / "manifest.json")
        print(f"wrote {out}", file=stream)
    return code


def _cmd_run(args, engine: str) -> int:
    opts = _resolve(args)
    if args.command == "simulate" and args.engine is None:
        engine = opts.get("engine", engine)
    if engine not in ENGINES:
        raise CliError(f"unknown engine {engine!r}")
    scheme, snaps = scheme_from_options(opts, args.figure)
    if args.snapshots:
        snaps = _ints(args.snapshots)
    floor = float(opts.get("floor", io.DEFAULT_FLOOR))
    config = {k: str(v) for k, v in opts.items()}
    if args.figure:
        config["figure"] = args.figure
    return execute(scheme, snaps, engine, args.out, floor, not args.no_heatmap, config)


def _cmd_replay(args) -> int:
    try:
        rec = io.read_manifest(args.manifest)
    except (OSError, ValueError) as exc:
        raise CliError(f"bad manifest: {exc}") from None
    scheme = io.scheme_from_record(rec["scheme"])
    return execute(scheme, tuple(rec.get("snapshots", ())), rec["engine"], args.out,
                   float(rec.get("heatmap_floor", io.DEFAULT_FLOOR)),
                   bool(rec.get("heatmap", True)),
                   rec.get("config", {}))


def _cmd_prep(args) -> int:
    if args.scheme == "uniform":
        s = build_uniform_quilt(args.n, args.coupling)
    else:
        try:
            s = build_binary_tree(args.n, args.coupling)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    text = io.format_events(s.events)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.gates:
        lines = ["# two-qubit gates exp(-i H t), basis |00>,|01>,|10>,|11> with the old qubit first"]
        for ev in s.events:
            u = two_qubit_propagator("ee", ev.coupling, 0.0, 0.0, 0.0, ev.duration).matrix
            lines.append(f"gate {ev.old} {ev.new} t={ev.duration!r}")
            for row in u:
                lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
        Path(args.gates).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_temperature(args) -> int:
    try:
        temp = bath_temperature_ghz(args.odds, args.freq_ghz)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(f"{temp:.6g} K")
    return 0


def _cmd_heatmap(args) -> int:
    try:
        m = io.read_tangle_csv(args.csv)
    except (OSError, ValueError) as exc:
        raise CliError(f"bad tangle CSV: {exc}") from None
    io.export_heatmap(m, io.HeatMapSpec(args.floor), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_figures(args) -> int:
    presets = figure_presets(args.seed)
    keys = list(presets) if not args.only else [k.strip() for k in args.only.split(",")]
    out = io.ensure_dir(args.out)
    for k in keys:
        if k not in presets:
            raise CliError(f"unknown figure {k!r}")
        p = presets[k]
        execute(p.scheme, p.snapshots, "analytic", out / k, io.DEFAULT_FLOOR, True,
                {"figure": k, "seed": str(args.seed)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quiltsim",
                                description="Pairwise entanglement in qubit collision models.")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the analytic engine")
    _scheme_options(sim)
    _run_options(sim)
    sim.add_argument("--engine", choices=ENGINES, help="engine (default analytic)")

    orc = sub.add_parser("oracle", help="run the brute-force state-vector reference")
    _scheme_options(orc)
    _run_options(orc)

    cmp_ = sub.add_parser("compare", help="compare analytic and brute-force tangles")
    _scheme_options(cmp_)
    _run_options(cmp_)

    prep = sub.add_parser("prep", help="emit a uniform-quilt schedule")
    prep.add_argument("--scheme", choices=("uniform", "binary"), default="uniform")
    prep.add_argument("--n", type=int, required=True)
    prep.add_argument("--coupling", type=float, default=1.0)
    prep.add_argument("--out", help="event list file (default stdout)")
    prep.add_argument("--gates", help="also write the two-qubit gate matrices here")

    tmp = sub.add_parser("temperature", help="bath temperature for given excitation odds")
    tmp.add_argument("--freq-ghz", dest="freq_ghz", type=float, required=True)
    tmp.add_argument("--odds", type=float, required=True,
                     help="one qubit in ODDS is excited")

    hm = sub.add_parser("heatmap", help="render a tangle CSV as a PPM heat map")
    hm.add_argument("csv")
    hm.add_argument("--out", required=True)
    hm.add_argument("--floor", type=float, default=io.DEFAULT_FLOOR)

    rep = sub.add_parser("replay", help="rerun a saved manifest")
    rep.add_argument("manifest")
    rep.add_argument("--out", required=True)

    fig = sub.add_parser("figures", help="write all figure presets")
    fig.add_argument("--out", required=True)
    fig.add_argument("--only", help="comma-separated preset keys")
    fig.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in ("simulate", "oracle", "compare"):
            engine = "analytic" if args.command == "simulate" else args.command
            if args.command == "simulate" and args.engine:
                engine = args.engine
            return _cmd_run(args, engine)
        handler = {"prep": _cmd_prep, "temperature": _cmd_temperature,
                   "heatmap": _cmd_heatmap, "replay": _cmd_replay,
                   "figures": _cmd_figures}[args.command]
        return handler(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        print(f"quiltsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
