#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the two hot kernels (Sturm-sequence counts and the shifted
tridiagonal solve) on pencils assembled from the round-sphere metric,
then an end-to-end spectrum computation per backend.  The end-to-end
python-backend run happens in a subprocess with MOMENTSPHERE_PURE_PYTHON
set, which is how the fallback is actually selected at import time.

Usage: python benchmarks/bench_kernels.py [--sizes 1024,4096,16384]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from momentsphere import backend
from momentsphere.eigen import assemble, make_mesh
from momentsphere.families import standard_metric


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(sizes):
    names = backend.available_backends()
    print(f"available backends: {', '.join(names)}")
    print(f"{'kernel':<14} {'n':>7} " + " ".join(f"{n:>12}" for n in names)
          + ("   speedup" if len(names) == 2 else ""))
    for n in sizes:
        disc = assemble(standard_metric(), 0, make_mesh(n, "graded"))
        ad, ae, bd, be = disc.a_diag, disc.a_off, disc.b_diag, disc.b_off
        shifts = np.linspace(0.0, 50.0, 64)
        rhs = np.sin(np.arange(ad.size, dtype=float))
        rows = {"sturm-counts": [], "tridiag-solve": []}
        for name in names:
            impl = backend.get_backend(name)
            rows["sturm-counts"].append(
                time_call(impl.sturm_counts, shifts, ad, ae, bd, be, 1e-280))
            rows["tridiag-solve"].append(
                time_call(impl.solve_shifted, ad, ae, bd, be, 1.5, rhs))
        for kernel, times in rows.items():
            cells = " ".join(f"{t * 1e3:>10.3f}ms" for t in times)
            line = f"{kernel:<14} {n:>7} {cells}"
            if len(times) == 2 and times[0] > 0:
                line += f"   {times[1] / times[0]:>7.1f}x"
            print(line)


def bench_end_to_end(n):
    script = ("import time; import momentsphere as ms; "
              "t0 = time.perf_counter(); "
              f"ms.invariant_spectrum(ms.standard_metric(), 4, {n}); "
              "print(f'{ms.BACKEND}: {time.perf_counter() - t0:.3f}s')")
    print(f"\nend-to-end invariant spectrum (k=4, n={n}):")
    for force in ("0", "1"):
        env = dict(os.environ, MOMENTSPHERE_PURE_PYTHON=force)
        out = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, text=True, check=True)
        sys.stdout.write("  " + out.stdout)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="1024,4096,16384")
    parser.add_argument("--n", type=int, default=4096,
                        help="mesh size for the end-to-end comparison")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernels(sizes)
    bench_end_to_end(args.n)


if __name__ == "__main__":
    main()
