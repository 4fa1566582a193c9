#!/usr/bin/env python3
"""Times the compiled kernels against the NumPy fallback.

Run from the repo root after building the extension in place:

    python3 setup.py build_ext --inplace
    python3 benchmarks/bench_kernels.py [--max-atoms 20]

The Hamiltonian matvec dominates the ground-state solves (hundreds of
Lanczos iterations over 2^N amplitudes), so that is the headline number.
"""

import argparse
import time

import numpy as np

from rydladder import lattice
from rydladder._kernels import pure

try:
    from rydladder._kernels import _core
except ImportError:
    _core = None


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n_atoms):
    sys = lattice.LadderSystem(n_rungs=n_atoms // 2, a=4.1,
                               omega=6.77, delta=23.7)
    table = lattice.interaction_table(sys)
    v = np.ascontiguousarray(table.v)
    dim = 1 << n_atoms
    rng = np.random.default_rng(0)
    psi_r = rng.standard_normal(dim)
    psi_c = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    psi_c /= np.linalg.norm(psi_c)
    out_r = np.empty_like(psi_r)
    rows = {}
    for name, impl in (("pure", pure),) + ((("compiled", _core),) if _core else ()):
        diag = impl.interaction_diagonal(v, n_atoms)
        rows[name] = {
            "diag_build": timeit(impl.interaction_diagonal, v, n_atoms),
            "matvec_real": timeit(impl.hmatvec, psi_r, diag, 3.4, out_r),
            "x_rotation": timeit(impl.x_rotation_all, psi_c, 0.99, 0.14, n_atoms),
        }
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-atoms", type=int, default=20)
    args = ap.parse_args()
    if _core is None:
        print("note: compiled extension not built; timing the fallback only")
    sizes = [n for n in (12, 16, args.max_atoms) if n >= 12]
    print(f"{'n_atoms':>8} {'kernel':>14} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for n in dict.fromkeys(sizes):
        rows = bench(n)
        for kernel in rows["pure"]:
            p = rows["pure"][kernel] * 1e3
            if "compiled" in rows:
                c = rows["compiled"][kernel] * 1e3
                print(f"{n:>8} {kernel:>14} {p:>12.3f} {c:>14.3f} {p / c:>8.1f}x")
            else:
                print(f"{n:>8} {kernel:>14} {p:>12.3f} {'-':>14} {'-':>8}")


if __name__ == "__main__":
    main()
