"""Compiled Jacobi kernels against the pure-Python fallback and LAPACK.

    python benchmarks/bench_kernels.py [--sizes 6 12 24 48] [--repeat 5]

Reports the best-of-``repeat`` wall time per call and the largest
singular value / eigenvalue mismatch against ``numpy.linalg``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cslacc import _fallback
from cslacc.numerics import EIG_TOL, SVD_TOL, SeededRng, complex_gaussian

try:
    from cslacc import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def svd_case(mod, a, repeat):
    def run():
        work = np.asfortranarray(a.copy())
        v = np.asfortranarray(np.eye(a.shape[1], dtype=np.complex128))
        mod.one_sided_jacobi(work, v, SVD_TOL, 1000)
        return np.sort(np.linalg.norm(work, axis=0))[::-1]
    return _best(run, repeat)


def eig_case(mod, h, repeat):
    def run():
        work = np.asfortranarray(h.copy())
        v = np.asfortranarray(np.eye(h.shape[0], dtype=np.complex128))
        mod.hermitian_jacobi(work, v, EIG_TOL, 1000)
        return np.sort(np.diag(work).real)
    return _best(run, repeat)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[6, 12, 24, 48])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = [("python", _fallback)] + ([("compiled", _kernels)] if _kernels else [])
    print(f"{'kernel':8s} {'n':>4s} " + " ".join(f"{name:>12s}" for name, _ in backends)
          + f" {'lapack':>12s} {'speedup':>8s} {'max err':>9s}")
    for n in args.sizes:
        a = complex_gaussian(SeededRng(n), n, n)
        h = a @ a.conj().T
        ref_s = np.linalg.svd(a, compute_uv=False)
        ref_w = np.linalg.eigvalsh(h)
        for kernel, case, ref, lapack in (
                ("svd", svd_case, ref_s, lambda: np.linalg.svd(a)),
                ("eigh", eig_case, ref_w, lambda: np.linalg.eigh(h))):
            times, err = [], 0.0
            for _, mod in backends:
                t, vals = case(mod, a if kernel == "svd" else h, args.repeat)
                times.append(t)
                err = max(err, float(np.max(np.abs(vals - ref)) / ref.max()))
            t_lapack, _ = _best(lapack, args.repeat)
            speed = times[0] / times[-1] if len(times) > 1 else float("nan")
            print(f"{kernel:8s} {n:4d} " + " ".join(f"{t * 1e3:10.3f}ms" for t in times)
                  + f" {t_lapack * 1e3:10.3f}ms {speed:7.1f}x {err:9.1e}")


if __name__ == "__main__":
    main()
