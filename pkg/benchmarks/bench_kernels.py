"""Compare the compiled and numpy kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Prints the best of several
repeats for each kernel and backend, and the largest disagreement.
"""

import argparse
import timeit

import numpy as np

from quiltsim import _kernels_py

try:
    from quiltsim import _ckernels
except ImportError:
    _ckernels = None


def _rows(k, rng):
    pop = rng.random((k, 4))
    pop /= pop.sum(axis=1, keepdims=True)
    coh = np.ascontiguousarray(rng.normal(size=(k, 4)) + 1j * rng.normal(size=(k, 4)))
    blocks = rng.normal(size=8) + 1j * rng.normal(size=8)
    return pop, coh, blocks


def bench_collide(mod, k, repeat, rng):
    pop, coh, blocks = _rows(k, rng)
    t = min(timeit.repeat(lambda: mod.collide_rows(pop, coh, 0, blocks), number=1,
                          repeat=repeat))
    return t, mod.collide_rows(pop, coh, 0, blocks)


def bench_sweep(mod, n, m, repeat, rng):
    k1 = rng.integers(0, n, size=m)
    k2 = (k1 + rng.integers(1, n, size=m)) % n
    phase = rng.uniform(0, 2 * np.pi, size=m)
    a0 = np.zeros(n, dtype=complex)
    a0[0] = 1.0

    def run():
        a = a0.copy()
        mod.wlike_sweep(a, k1, k2, phase)
        return a

    t = min(timeit.repeat(run, number=1, repeat=repeat))
    return t, run()


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--rows", type=int, default=200_000)
    p.add_argument("--events", type=int, default=200_000)
    p.add_argument("--qubits", type=int, default=30)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = [("python", _kernels_py)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled extension not available; timing the numpy fallback only")

    results = {}
    for name, mod in backends:
        rng = np.random.default_rng(0)
        results[name] = (bench_collide(mod, args.rows, args.repeat, rng),
                         bench_sweep(mod, args.qubits, args.events, args.repeat, rng))

    print(f"{'kernel':<14}{'backend':<10}{'seconds':>12}{'per item (ns)':>16}")
    for name, ((tc, _), (ts, _)) in results.items():
        print(f"{'collide_rows':<14}{name:<10}{tc:>12.4f}{1e9 * tc / args.rows:>16.1f}")
        print(f"{'wlike_sweep':<14}{name:<10}{ts:>12.4f}{1e9 * ts / args.events:>16.1f}")
    if len(results) == 2:
        (tc_p, out_p), (ts_p, a_p) = results["python"]
        (tc_c, out_c), (ts_c, a_c) = results["compiled"]
        diff = max(max(np.abs(x - y).max() for x, y in zip(out_p, out_c)),
                   np.abs(a_p - a_c).max())
        print(f"speedup collide_rows {tc_p / tc_c:.1f}x, wlike_sweep {ts_p / ts_c:.1f}x, "
              f"max difference {diff:.2e}")


if __name__ == "__main__":
    main()
