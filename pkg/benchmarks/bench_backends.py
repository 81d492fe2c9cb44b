"""Benchmark the compiled kernels against the numpy fallback.

Three suites:
  kernels   per-kernel wall time on a single large register
  counting  full counting-register distribution, n = 5..8, t = n+3
  curve     quantum-mode separation cost vs database size (the resource
            curve documented in the README; t is capped so n+t <= 24)

Usage: python benchmarks/bench_backends.py [--suite all] [--max-n 12]
"""

import argparse
import math
import time

import numpy as np

from qsetsep import OracleSpec, ParamGrid, Symbol, VirtualDb, qsim, separate
from qsetsep.qcount import counting_distribution
from qsetsep.qsim import _backend
from qsetsep.vdb import AdditiveOffsetModel


def _time(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(backends):
    print("\n== kernel micro-benchmarks (best of 3, seconds) ==")
    sizes = [15, 18, 20]
    header = f"{'kernel':<18}" + "".join(f"{'n=' + str(n):>12}" for n in sizes)
    for backend in backends:
        qsim.set_backend(backend)
        k = _backend.kernels
        print(f"-- {backend}")
        rows = {
            "grover_step": lambda a, m: k.grover_step(a, m),
            "phase_flip": lambda a, m: k.phase_flip(a, m),
            "invert_about_mean": lambda a, m: k.invert_about_mean(a),
            "marked_mass": lambda a, m: k.marked_mass(a, m),
            "hadamard q=n-1": lambda a, m: k.hadamard(a, int(math.log2(a.size)) - 1),
            "cphase(0,n-1)": lambda a, m: k.cphase(a, 0, int(math.log2(a.size)) - 1, 0.3),
        }
        print(header)
        for label, fn in rows.items():
            cells = []
            for n in sizes:
                amps = np.full(1 << n, (1 << n) ** -0.5, np.complex128)
                mask = np.zeros(1 << n, bool)
                mask[:: 7] = True
                cells.append(f"{_time(lambda: fn(amps, mask)):>12.4f}")
            print(f"{label:<18}" + "".join(cells))
    qsim.set_backend(backends[0])


def bench_counting(backends):
    print("\n== counting distribution, t = n+3 (best of 3, seconds) ==")
    print(f"{'n':>3}{'t':>4}" + "".join(f"{b:>12}" for b in backends))
    for n in range(5, 9):
        t = n + 3
        cells = []
        for backend in backends:
            qsim.set_backend(backend)
            mask = np.zeros(1 << n, bool)
            mask[: (1 << n) // 5] = True

            def run():
                oracle = OracleSpec.from_mask(n, mask)  # fresh: defeat the cache
                counting_distribution(oracle, t)

            cells.append(f"{_time(run):>12.3f}")
        print(f"{n:>3}{t:>4}" + "".join(cells))
    qsim.set_backend(backends[0])


def bench_curve(backends, max_n):
    print("\n== quantum-mode separation resource curve (single shot) ==")
    print(f"{'n':>3}{'t':>4}{'amps':>14}{'memory':>10}" + "".join(f"{b:>12}" for b in backends))
    for n in range(6, max_n + 1):
        t = min(n + 3, qsim.MAX_QUBITS - n)
        mem = (1 << (n + t)) * 16 / 2**20
        cells = []
        for backend in backends:
            qsim.set_backend(backend)
            values = tuple(float(v) for v in range(1 << n))
            grid = ParamGrid((("offset", values),))
            alphabet = max(4, 1 << (n - 2))
            dbs = [
                VirtualDb(s, grid, AdditiveOffsetModel({s: float(s)}, alphabet, 4.0))
                for s in (0, 1)
            ]

            def run():
                for db in dbs:
                    db._codes = None  # defeat caches: measure a cold run
                separate(dbs, Symbol(2, alphabet), mode="quantum",
                         t_qubits=t, repeats=1, rng_seed=1)

            cells.append(f"{_time(run, repeat=1):>12.2f}")
        print(f"{n:>3}{t:>4}{1 << (n + t):>14,}{mem:>8.0f}Mi" + "".join(cells))
    qsim.set_backend(backends[0])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--suite", choices=("kernels", "counting", "curve", "all"), default="all")
    parser.add_argument("--max-n", type=int, default=12, help="largest database register for the curve")
    args = parser.parse_args()

    backends = list(qsim.available_backends())
    print(f"backends: {backends} (active: {qsim.backend_name()})")
    if args.suite in ("kernels", "all"):
        bench_kernels(backends)
    if args.suite in ("counting", "all"):
        bench_counting(backends)
    if args.suite in ("curve", "all"):
        bench_curve(backends, args.max_n)


if __name__ == "__main__":
    main()
