"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3] [--n 200000]

Times the Shift-And and Shift-Add scans (single- and multi-word) and the
basis-state circuit runner on a QSAnd circuit.
"""

import argparse
import time

import numpy as np

from qsmatch import kernels
from qsmatch.bitparallel import Pattern, Text, shift_add_search, shift_and_search
from qsmatch.circuits import build_qsand
from qsmatch.qcore.basis import BasisRunner, BasisState


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, seed):
    rng = np.random.default_rng(seed)
    text = Text(rng.integers(0, 4, n), 4)
    short = Pattern(rng.integers(0, 4, 12))
    long = Pattern(rng.integers(0, 4, 100))
    circ_text = Text(rng.integers(0, 2, 256), 2)
    circ, lay = build_qsand(circ_text, Pattern([0, 1, 1, 0]))
    runners = {b: BasisRunner(circ, b) for b in kernels.BACKENDS}  # compile outside the timing
    return [
        ("shift-and m=12", lambda b: shift_and_search(text, short, b)),
        ("shift-and m=100 (multi-word)", lambda b: shift_and_search(text, long, b)),
        ("shift-add m=12 k=2", lambda b: shift_add_search(text, short, 2, b)),
        ("shift-add m=100 k=10 (multi-word)", lambda b: shift_add_search(text, long, 10, b)),
        ("basis run, QSAnd n=256", lambda b: runners[b].run(BasisState(lay.layout))),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="text length for the scans")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernels are not built; only the python backend is timed")
    print(f"{'case':36s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases(args.n, args.seed):
        secs = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        row = f"{name:36s}" + "".join(f"{secs[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            row += f"{secs['python'] / secs['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
