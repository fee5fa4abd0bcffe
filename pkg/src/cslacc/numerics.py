"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` ``complex128`` arrays. The Jacobi
factorisations run in the compiled ``_kernels`` extension when it is
importable and fall back to ``_fallback`` otherwise; set
``CSLACC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from cslacc.errors import (
    ConvergenceFailure,
    DimensionOverflow,
    NegativeEigenvalue,
    NonHermitianInput,
)

if os.environ.get("CSLACC_PURE_PYTHON", "") not in ("", "0"):
    from cslacc import _fallback as _kern

    BACKEND = "python"
else:
    try:
        from cslacc import _kernels as _kern

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        from cslacc import _fallback as _kern

        BACKEND = "python"

SVD_TOL = 1e-12
EIG_TOL = 1e-14
HERMITIAN_TOL = 1e-10
# Jacobi falls behind LAPACK above this size (benchmarks/bench_kernels.py)
JACOBI_MAX_DIM = 24
KRON_MAX_ENTRIES = 1 << 26


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unit-norm columns


class SvdResult(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray  # non-increasing
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.v.conj().T


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array with finite entries."""
    out = np.array(a, dtype=np.complex128, copy=True)
    if out.ndim == 1:
        out = out[:, None]
    if out.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix has non-finite entries")
    return out


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(a))


def trace(a) -> complex:
    return complex(np.trace(a))


def rayleigh_quotient(a, x) -> complex:
    x = np.asarray(x, dtype=np.complex128).ravel()
    return complex(x.conj() @ (np.asarray(a) @ x) / (x.conj() @ x))


def _condition_estimate(a) -> float:
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def _complete_basis(u: np.ndarray, good: np.ndarray) -> np.ndarray:
    """Replace columns not flagged ``good`` with an orthonormal completion."""
    if good.all():
        return u
    m = u.shape[0]
    known = u[:, good]
    q, _ = np.linalg.qr(np.hstack([known, np.eye(m, dtype=complex)]))
    fill = q[:, known.shape[1]:]
    out = u.copy()
    out[:, ~good] = fill[:, : int((~good).sum())]
    return out


def eigh(a, *, tol: float = EIG_TOL, max_sweeps: int | None = None) -> EigenDecomposition:
    """Hermitian eigendecomposition by cyclic Jacobi rotations."""
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("eigh needs a square matrix")
    norm = frobenius_norm(a)
    if frobenius_norm(a - a.conj().T) > HERMITIAN_TOL * max(norm, 1.0):
        raise NonHermitianInput("matrix is not Hermitian")
    work = np.asfortranarray(0.5 * (a + a.conj().T))
    vec = np.asfortranarray(np.eye(n, dtype=np.complex128))
    cap = max_sweeps if max_sweeps is not None else 100 * max(n, 1)
    if _kern.hermitian_jacobi(work, vec, tol, cap) < 0:
        raise ConvergenceFailure(
            f"Hermitian Jacobi did not converge in {cap} sweeps",
            _condition_estimate(a),
        )
    w = np.diag(work).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], np.ascontiguousarray(vec[:, order]))


def _jacobi_svd(a: np.ndarray, tol: float, max_sweeps: int | None) -> SvdResult:
    m, n = a.shape
    if m < n:
        res = _jacobi_svd(a.conj().T, tol, max_sweeps)
        return SvdResult(res.v, res.singular_values, res.u)
    work = np.asfortranarray(a.copy())
    vec = np.asfortranarray(np.eye(n, dtype=np.complex128))
    cap = max_sweeps if max_sweeps is not None else 100 * max(m, n, 1)
    if _kern.one_sided_jacobi(work, vec, tol, cap) < 0:
        raise ConvergenceFailure(
            f"one-sided Jacobi did not converge in {cap} sweeps",
            _condition_estimate(a),
        )
    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, work, vec = sigma[order], work[:, order], vec[:, order]
    floor = np.finfo(float).eps * max(m, n) * (sigma[0] if sigma.size else 0.0)
    good = sigma > floor
    u = np.zeros((m, n), dtype=np.complex128)
    u[:, good] = work[:, good] / sigma[good]
    u = _complete_basis(u, good)
    return SvdResult(np.ascontiguousarray(u), sigma, np.ascontiguousarray(vec))


def svd(a, *, method: str = "auto", tol: float = SVD_TOL,
        max_sweeps: int | None = None) -> SvdResult:
    """Thin SVD ``a = u @ diag(s) @ v^H`` with ``s`` non-increasing.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM``, LAPACK above). Both paths honour the same contract.
    """
    a = as_matrix(a)
    if method == "auto":
        method = "jacobi" if max(a.shape) <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        return _jacobi_svd(a, tol, max_sweeps)
    if method != "lapack":
        raise ValueError(f"unknown svd method {method!r}")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc), float("inf")) from exc
    return SvdResult(u, s, vh.conj().T)


def singular_values(a, *, method: str = "auto") -> np.ndarray:
    a = as_matrix(a)
    if method == "lapack" or (method == "auto" and max(a.shape) > JACOBI_MAX_DIM):
        return np.linalg.svd(a, compute_uv=False)
    return svd(a, method="jacobi").singular_values


def hermitian_sqrt(q) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more
    negative raises :class:`NegativeEigenvalue`.
    """
    q = as_matrix(q)
    norm = frobenius_norm(q)
    if frobenius_norm(q - q.conj().T) > HERMITIAN_TOL * max(norm, 1e-300):
        raise NonHermitianInput("hermitian_sqrt needs a Hermitian matrix")
    w, v = eigh(q)
    if w.size and w[0] < -HERMITIAN_TOL * max(norm, 1.0):
        raise NegativeEigenvalue(f"minimum eigenvalue {w[0]:.3e} < 0")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def kronecker(a, b, *, max_entries: int = KRON_MAX_ENTRIES) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > max_entries:
        raise DimensionOverflow(f"kronecker product {rows}x{cols} exceeds {max_entries} entries")
    return np.kron(a, b)


class SeededRng:
    """Counter-free wrapper around a numpy ``Generator`` keyed by a seed.

    ``child(*key)`` derives an independent stream per key, e.g.
    ``rng.child(trial, antenna)``; the same (seed, key) always yields the
    same stream.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed) & (2**64 - 1)
        self.key = tuple(int(k) for k in key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def child(self, *key: int) -> "SeededRng":
        return SeededRng(self.seed, self.key + tuple(key))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, key={self.key})"


def complex_gaussian(rng: SeededRng | np.random.Generator, rows: int, cols: int,
                     variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) samples, shape ``(rows, cols)``."""
    if variance < 0:
        raise ValueError("variance must be non-negative")
    gen = rng.generator if isinstance(rng, SeededRng) else rng
    scale = np.sqrt(variance / 2.0)
    out = np.empty((rows, cols), dtype=np.complex128)
    out.real = gen.standard_normal((rows, cols))
    out.imag = gen.standard_normal((rows, cols))
    return out * scale
