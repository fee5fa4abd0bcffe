"""Pure-Python versions of the Jacobi kernels in ``_kernels.pyx``.

Same in-place contract and return values as the compiled module. The
one-sided routine uses a round-robin ordering so that each round rotates
``n // 2`` disjoint column pairs with a handful of vectorised numpy calls.
"""

import numpy as np


def _schur_tangent(x):
    return np.where(x >= 0.0, 1.0, -1.0) / (np.abs(x) + np.hypot(1.0, x))


def _round_robin(n):
    """Yield (p, q) index arrays, n - 1 rounds of disjoint pairs (n even)."""
    players = list(range(n))
    for _ in range(n - 1):
        half = n // 2
        top, bottom = players[:half], players[half:][::-1]
        p = np.array([min(a, b) for a, b in zip(top, bottom)])
        q = np.array([max(a, b) for a, b in zip(top, bottom)])
        yield p, q
        players = [players[0]] + [players[-1]] + players[1:-1]


def one_sided_jacobi(a, v, tol, max_sweeps):
    m, n = a.shape
    if n < 2:
        return 1
    width = n + (n % 2)
    if width != n:
        # a zero column never rotates, it only pads the tournament
        a_work = np.zeros((m, width), dtype=complex, order="F")
        v_work = np.zeros((v.shape[0], width), dtype=complex, order="F")
        a_work[:, :n] = a
        v_work[:, :n] = v
    else:
        a_work, v_work = a, v
    schedule = list(_round_robin(width))
    floor = np.finfo(float).eps * np.linalg.norm(a) ** 2
    result = -1
    for sweep in range(max_sweeps):
        rotated = False
        for p, q in schedule:
            ap, aq = a_work[:, p], a_work[:, q]
            alpha = np.einsum("ij,ij->j", ap.conj(), ap).real
            beta = np.einsum("ij,ij->j", aq.conj(), aq).real
            gamma = np.einsum("ij,ij->j", ap.conj(), aq)
            g_abs = np.abs(gamma)
            active = (g_abs > floor) & (g_abs > tol * np.sqrt(alpha * beta))
            if not active.any():
                continue
            rotated = True
            p, q = p[active], q[active]
            g_abs, gamma = g_abs[active], gamma[active]
            alpha, beta = alpha[active], beta[active]
            ph = gamma / g_abs
            t = _schur_tangent((beta - alpha) / (2.0 * g_abs))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            for mat in (a_work, v_work):
                x, y = mat[:, p].copy(), mat[:, q].copy()
                mat[:, p] = c * x - s * ph.conj() * y
                mat[:, q] = s * ph * x + c * y
        if not rotated:
            result = sweep + 1
            break
    if width != n:
        a[:] = a_work[:, :n]
        v[:] = v_work[:, :n]
    return result


def hermitian_jacobi(a, v, tol, max_sweeps):
    n = a.shape[0]
    total = np.linalg.norm(a)
    for sweep in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * total:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                g_abs = abs(a[p, q])
                if g_abs == 0.0:
                    continue
                ph = a[p, q] / g_abs
                t = float(_schur_tangent((a[q, q].real - a[p, p].real) / (2.0 * g_abs)))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                x, y = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * x - s * ph.conjugate() * y
                a[:, q] = s * x + c * ph.conjugate() * y
                x, y = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * x - s * ph * y
                a[q, :] = s * x + c * ph * y
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                x, y = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * x - s * ph.conjugate() * y
                v[:, q] = s * x + c * ph.conjugate() * y
    return -1
