"""Closed-form amplification factors, singular value bounds and their oracles.

Every closed form is paired with an independent oracle: column products
of the Hermitian root of ``Q`` for the gains, and a full SVD of the
correlation block ``T_{i,j,r}`` for the bounds. Sweeps return
:class:`AmplificationReport` rows that the CLI writes as CSV.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from cslacc import numerics, scenario
from cslacc.errors import IndexOutOfRange, RhoAtUnity, RhoZero, ShiftOutOfRange
from cslacc.numerics import SeededRng

RHO_GRID = tuple(np.round(np.arange(1, 20) * 0.05, 2))         # 0.05 .. 0.95
RHO_GRID_COARSE = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
PHASES = (0.0, np.pi / 7, np.pi / 3)
GAIN_TOL = 1e-9
BOUND_TOL = 1e-9
MONOTONE_MARGIN = 1e-12
RANK_TOL = 1e-12

REPORT_COLUMNS = ("kind", "M", "i", "j", "r", "rho_abs", "rho_phase",
                  "formula", "oracle", "lower", "upper", "passed")


@dataclass(frozen=True)
class CorrelationBlock:
    """``T_{i,j,r}``: rows ``i..j`` and columns ``i+r..j+r`` of ``Q``."""

    t: np.ndarray = field(repr=False)
    i: int
    j: int
    r: int
    rho: complex
    M: int
    root_mismatch: float  # Frobenius gap to the Q^{1/2} slice product

    @property
    def width(self) -> int:
        return self.j - self.i + 1


@dataclass(frozen=True)
class AmplificationReport:
    kind: str
    M: int
    i: int
    j: int
    r: int
    rho: complex
    formula_value: float
    oracle_value: float
    lower_bound: float = float("nan")
    upper_bound: float = float("nan")
    passed: bool = True
    delta: float = 0.0

    def row(self) -> dict:
        return {
            "kind": self.kind, "M": self.M, "i": self.i, "j": self.j, "r": self.r,
            "rho_abs": abs(self.rho), "rho_phase": float(np.angle(self.rho)) if self.rho else 0.0,
            "formula": self.formula_value, "oracle": self.oracle_value,
            "lower": self.lower_bound, "upper": self.upper_bound, "passed": self.passed,
        }


@dataclass(frozen=True)
class ScmRelationReport:
    algorithm: str
    empirical_mean_scm: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)
    relative_error: float
    n_channel_draws: int
    reference_norm: float = 1.0


# ------------------------------------------------------------ building blocks


@lru_cache(maxsize=512)
def _root(m: int, rho: complex) -> np.ndarray:
    root = scenario.build_exponential_correlation(m, rho).sqrt
    root.setflags(write=False)
    return root


@lru_cache(maxsize=512)
def _gram(m: int, rho: complex) -> np.ndarray:
    """``[q_a^H q_b]`` for the columns ``q`` of the Hermitian root."""
    root = _root(m, rho)
    gram = root.conj().T @ root
    gram.setflags(write=False)
    return gram


def _check_rho(rho: complex, *, allow_unity: bool = False) -> float:
    mag = abs(complex(rho))
    if mag > 1.0 + 1e-15:
        raise scenario.InvalidRho(f"|rho| = {mag:.6g} exceeds 1")
    if not allow_unity and mag >= 1.0:
        raise RhoAtUnity("closed form has a pole at |rho| = 1")
    return mag


def correlation_block(i: int, j: int, r: int, rho: complex, M: int | None = None
                      ) -> CorrelationBlock:
    """Sub-block of the exponential correlation matrix and its root-product twin."""
    m = j + r if M is None else M
    if not 1 <= i <= j or i + r < 1 or j + r > m or r < 0 and i + r < 1:
        raise IndexOutOfRange(f"block rows {i}..{j}, cols {i + r}..{j + r} outside 1..{m}")
    rho = complex(rho)
    q = scenario.exponential_correlation_matrix(m, rho)
    t = q[i - 1:j, i - 1 + r:j + r]
    root = _root(m, rho)
    via_root = root[i - 1:j, :] @ root.conj().T[:, i - 1 + r:j + r]
    return CorrelationBlock(t, i, j, r, rho, m, float(np.linalg.norm(t - via_root)))


def column_product_sum(i: int, j: int, r: int, rho: complex, M: int) -> complex:
    """``sum_{u=i..j} q_u^H q_{u+r}`` from the Hermitian root (r may be negative)."""
    if not 1 <= i <= j <= M or i + r < 1 or j + r > M:
        raise IndexOutOfRange(f"shift {r} takes {i}..{j} outside 1..{M}")
    g = _gram(M, complex(rho))
    u = np.arange(i - 1, j)
    return complex(g[u, u + r].sum())


def sigma_max(t: np.ndarray) -> float:
    return float(numerics.singular_values(t, method="jacobi")[0])


# ------------------------------------------------------------ matrix form


def gain_mcslacc(i: int, j: int, r: int, rho: complex) -> float:
    """``|G| = (j - i + 1) |rho|^r``."""
    if r < 0:
        raise ShiftOutOfRange("shift must be non-negative")
    mag = _check_rho(rho, allow_unity=True)
    return (j - i + 1) * mag ** r


def oracle_gain_mcslacc(i: int, j: int, r: int, rho: complex, M: int | None = None) -> float:
    return abs(column_product_sum(i, j, r, rho, j + r if M is None else M))


def gain_mcslsacc(i: int, j: int, M: int, rho: complex) -> float:
    """Closed-form gain of the combined SCM, a sum of two geometric series."""
    if not 1 <= i <= j <= M:
        raise IndexOutOfRange(f"need 1 <= i <= j <= M, got ({i}, {j}, {M})")
    a = _check_rho(rho)
    return (j - i + 1) * (2 * a - a ** i - a ** (M - j + 1)) / (1 - a)


def oracle_gain_mcslsacc(i: int, j: int, M: int, rho: complex) -> float:
    """Sum over shifts of ``|sum_u q_u^H q_{u -+ r}|`` from the Hermitian root."""
    total = sum(abs(column_product_sum(i, j, -r, rho, M)) for r in range(1, i))
    return total + sum(abs(column_product_sum(i, j, r, rho, M)) for r in range(1, M - j + 1))


def combined_scm_gain(i: int, j: int, M: int, rho: complex) -> complex:
    """Complex scalar multiplying ``R_sa`` in the expected combined SCM.

    Its modulus equals :func:`gain_mcslsacc` for real non-negative ``rho``
    and is smaller otherwise, since the shift terms carry different phases.
    """
    total = sum(column_product_sum(i, j, -r, rho, M) for r in range(1, i))
    return total + sum(column_product_sum(i, j, r, rho, M) for r in range(1, M - j + 1))


def singular_relation_matrixform(i: int, j: int, r: int, rho: complex, M: int,
                                 rsa_spectrum, noise_floor: float = 0.0) -> np.ndarray:
    """Predicted SCM spectrum: ``sum_u q_u^H q_u D_sa + a s^2`` at r = 0, ``|G| D_sa`` otherwise."""
    d = np.asarray(rsa_spectrum, dtype=float)
    if np.any(d < 0) or np.any(np.diff(d) > 0):
        raise ValueError("rsa_spectrum must be non-negative and non-increasing")
    if r == 0:
        return column_product_sum(i, j, 0, rho, M).real * d + noise_floor
    return abs(column_product_sum(i, j, r, rho, M)) * d


# ------------------------------------------------------------ vector form


def bounds_vcslacc_r0(i: int, j: int, rho: complex) -> tuple[float, float]:
    """Lower and upper bounds on ``sigma_max(T_{i,j,0})`` (odd/even split on width)."""
    a = _check_rho(rho)
    n = j - i + 1
    base = (1 + a) / (1 - a)
    lower = base - 2 * a * (1 - a ** n) / (n * (1 - a) ** 2)
    if n % 2:
        upper = base - 2 * a ** ((n + 1) / 2) / (1 - a)
    else:
        upper = (1 + a) * (1 - a ** (n / 2)) / (1 - a)
    return float(lower), float(upper)


def trace_bound_vcslacc(i: int, j: int, r: int, rho: complex) -> tuple[float, float]:
    """``(sqrt(trace(T^H T) / (s + 1)), sigma_max(T))`` for ``0 < r <= j - i``."""
    if not 0 < r <= j - i:
        raise ShiftOutOfRange(f"need 0 < r <= j - i, got r = {r}, j - i = {j - i}")
    _check_rho(rho, allow_unity=True)
    t = correlation_block(i, j, r, rho).t
    s = j - i - r
    avg = float(np.sqrt(np.sum(np.abs(t) ** 2) / (s + 1)))
    return avg, sigma_max(t)


def bounds_vcslacc_noisefree(i: int, j: int, r: int, rho: complex) -> tuple[float, float]:
    """Bounds on ``sigma_max(T_{i,j,r})`` for ``r >= j - i``; the lower one is exact."""
    if r < j - i:
        raise ShiftOutOfRange(f"need r >= j - i, got r = {r}, j - i = {j - i}")
    a = _check_rho(rho)
    if a == 0.0:
        raise RhoZero("bounds divide by powers of |rho|; sigma_max is 0")
    n = j - i + 1
    an = a ** n
    lower = a ** (r + 1) * (1 - an) * (1 + an) / (an * (1 - a) * (1 + a))
    upper = a ** (r + 1) * (1 - an) / (an * (1 - a)) * np.sqrt((1 + an) / (1 + a))
    return float(lower), float(upper)


def singular_relation_vectorform(block: CorrelationBlock | np.ndarray, rsa_spectrum,
                                 noise_blocks=None) -> dict:
    """Kronecker-combined spectrum of ``T (x) R_sa`` plus the block noise term.

    ``noise_blocks`` gives the per-antenna noise singular value ``a_m s_m^2``
    for the first ``width - r`` blocks (later blocks are noise-free). Returns
    ``spectrum`` (sorted, non-increasing), the equivalent additive noise
    ``noise_equivalent`` and its bound ``noise_bound = l_n^2 / l_y``.
    """
    t = block.t if isinstance(block, CorrelationBlock) else np.asarray(block)
    r = block.r if isinstance(block, CorrelationBlock) else 0
    d_t = numerics.singular_values(t, method="jacobi")
    d_sa = np.asarray(rsa_spectrum, dtype=float)
    clean = np.kron(d_t, d_sa)
    if noise_blocks is None:
        return {"spectrum": np.sort(clean)[::-1], "noise_equivalent": np.zeros_like(clean),
                "noise_bound": np.zeros_like(clean)}
    width, p = t.shape[0], d_sa.size
    lam_n = np.zeros(width * p)
    noisy = np.atleast_1d(np.asarray(noise_blocks, dtype=float))
    if noisy.size == 1:
        noisy = np.full(max(width - r, 0), float(noisy[0]))
    for m, level in enumerate(noisy[: max(width - r, 0)]):
        lam_n[m * p:(m + 1) * p] = level
    lam_y = np.sqrt(clean ** 2 + lam_n ** 2)
    equivalent = lam_y - clean
    bound = np.divide(lam_n ** 2, lam_y, out=np.zeros_like(lam_y), where=lam_y > 0)
    if np.any(equivalent > bound * (1 + 1e-12) + 1e-300) or np.any(bound > lam_n * (1 + 1e-12)):
        raise ArithmeticError("noise bound violated")
    order = np.argsort(-lam_y, kind="stable")
    return {"spectrum": lam_y[order], "noise_equivalent": equivalent[order],
            "noise_bound": bound[order]}


# ------------------------------------------------------------ SCM statistics


def flat_signal_covariances(cfg: scenario.ScenarioConfig, support) -> np.ndarray:
    """``R_sk = Psi diag(flat in-band spectrum) Psi^H`` with unit power, (K, Q, Q)."""
    from cslacc.sampler import dft_dictionary

    psi = dft_dictionary(cfg.Q)
    out = np.empty((len(support), cfg.Q, cfg.Q), dtype=np.complex128)
    for k, band in enumerate(support):
        mask = scenario.band_mask(band, cfg.Q, cfg.n_bands).astype(float)
        out[k] = (psi * (mask * cfg.Q / mask.sum())) @ psi.conj().T
    return out


def per_user_rsa(cfg: scenario.ScenarioConfig, omega: np.ndarray, support) -> np.ndarray:
    """``sigma_k^2 Omega R_sk Omega^H`` for each user, (K, P, P)."""
    cov = flat_signal_covariances(cfg, support)
    pw = np.asarray(cfg.tx_powers)[:, None, None]
    return pw * np.einsum("pa,kab,qb->kpq", omega, cov, omega.conj(), optimize=True)


def _conditional_coefficients(g: np.ndarray, algorithm: str, i: int, j: int, r: int) -> np.ndarray:
    """Channel-dependent weights of each user's ``R_sa`` term, per draw.

    Matrix form: (n, K) scalars ``sum_u g_uk conj(g_{u+r,k})``; vector form:
    (n, K, w, w) blocks ``g_I0k g_Irk^H``. ``g`` has unit-power columns.
    """
    m = g.shape[1]
    base = slice(i - 1, j)
    if algorithm == "vcslacc":
        a0, a1 = g[:, base], g[:, i - 1 + r:j + r]
        return np.einsum("nak,nbk->nkab", a0, a1.conj())
    if algorithm == "mcslsacc":
        total = 0
        for shift in [-s for s in range(1, i)] + list(range(1, m - j + 1)):
            total = total + np.sum(g[:, base] * g[:, i - 1 + shift:j + shift].conj(), axis=1)
        return total
    return np.sum(g[:, base] * g[:, i - 1 + r:j + r].conj(), axis=1)


def _assemble(coef: np.ndarray, rsa_k: np.ndarray, algorithm: str) -> np.ndarray:
    if algorithm == "vcslacc":
        return sum(np.kron(coef[k], rsa_k[k]) for k in range(rsa_k.shape[0]))
    return np.einsum("k,kpq->pq", coef, rsa_k)


def validate_scm_expectation(algorithm: str, cfg: scenario.ScenarioConfig,
                             n_channel_draws: int, *, r: int | None = None,
                             rng: SeededRng | None = None, omega: np.ndarray | None = None,
                             support=None) -> ScmRelationReport:
    """Average the signal SCM over channel draws and compare with the prediction.

    Signals enter through deterministic flat in-band covariances, so the
    only randomness is the channel. Prediction: ``G R_sa`` (matrix form,
    combined gain for mCSLSACC) or ``T (x) R_sa`` (vector form).
    """
    from cslacc.sampler import build_random_demodulator

    r = cfg.r if r is None else r
    rng = rng or SeededRng(cfg.seed, (7,))
    if omega is None:
        omega = build_random_demodulator(cfg.P, cfg.Q, rng.child(0)).omega
    if support is None:
        support = tuple(range(0, cfg.n_bands, max(cfg.n_bands // max(cfg.K, 1), 1)))[: cfg.K]
    rsa_k = per_user_rsa(cfg.replace(tx_powers=(1.0,) * cfg.K), omega, support)
    powers = np.asarray(cfg.tx_powers)
    corr = scenario.build_exponential_correlation(cfg.M, cfg.rho)
    g = scenario.draw_channels(corr.sqrt, powers, rng.child(1), n_channel_draws)
    coef = _conditional_coefficients(g, algorithm, cfg.i, cfg.j, r).mean(axis=0)
    empirical = _assemble(coef, rsa_k, algorithm)

    rsa = np.einsum("k,kpq->pq", powers, rsa_k)
    if algorithm == "vcslacc":
        predicted = np.kron(correlation_block(cfg.i, cfg.j, r, cfg.rho, cfg.M).t, rsa)
        ref = np.linalg.norm(np.kron(np.eye(cfg.j - cfg.i + 1), rsa))
    elif algorithm == "mcslsacc":
        predicted = combined_scm_gain(cfg.i, cfg.j, cfg.M, cfg.rho) * rsa
        ref = (cfg.j - cfg.i + 1) * np.linalg.norm(rsa)
    else:
        predicted = column_product_sum(cfg.i, cfg.j, r, cfg.rho, cfg.M) * rsa
        ref = (cfg.j - cfg.i + 1) * np.linalg.norm(rsa)
    scale = np.linalg.norm(predicted)
    denom = scale if scale > 1e-12 * ref else ref
    err = float(np.linalg.norm(empirical - predicted) / denom)
    return ScmRelationReport(algorithm, empirical, predicted, err, n_channel_draws, float(denom))


def fit_decay_exponent(ns, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(n)``."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)


def scm_error_decay(algorithm: str, cfg: scenario.ScenarioConfig, ns=(100, 316, 1000, 3162, 10000),
                    repeats: int = 8, *, r: int | None = None, seed: int = 0) -> tuple[np.ndarray, float]:
    """RMS relative error per draw count and the fitted log-log slope."""
    base = SeededRng(seed, (11,))
    from cslacc.sampler import build_random_demodulator

    omega = build_random_demodulator(cfg.P, cfg.Q, base.child(0)).omega
    rms = []
    for a, n in enumerate(ns):
        errs = [validate_scm_expectation(algorithm, cfg, int(n), r=r, rng=base.child(1, a, b),
                                         omega=omega).relative_error for b in range(repeats)]
        rms.append(np.sqrt(np.mean(np.square(errs))))
    rms = np.asarray(rms)
    return rms, fit_decay_exponent(ns, rms)


# ------------------------------------------------------------ grid sweeps


def theory_grid(m_max: int = 12, rho_abs: Iterable[float] = RHO_GRID,
                phases: Iterable[float] = PHASES) -> Iterator[tuple[int, int, int, complex]]:
    """All ``(M, i, j, rho)`` with ``1 <= i <= j <= M <= m_max``."""
    rhos = [a * np.exp(1j * ph) for a in rho_abs for ph in phases]
    for m in range(1, m_max + 1):
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                for rho in rhos:
                    yield m, i, j, complex(rho)


def sweep_gain_mcslacc(m_max: int = 12, rho_abs=RHO_GRID, phases=PHASES,
                       tol: float = 1e-10) -> list[AmplificationReport]:
    out = []
    for m, i, j, rho in theory_grid(m_max, rho_abs, phases):
        for r in range(0, m - j + 1):
            f = gain_mcslacc(i, j, r, rho)
            o = oracle_gain_mcslacc(i, j, r, rho, m)
            out.append(AmplificationReport("gain_mcslacc", m, i, j, r, rho, f, o,
                                           passed=abs(f - o) <= tol, delta=abs(f - o)))
    return out


def sweep_gain_mcslsacc(m_max: int = 12, rho_abs=RHO_GRID, phases=PHASES,
                        tol: float = GAIN_TOL) -> list[AmplificationReport]:
    out = []
    for m, i, j, rho in theory_grid(m_max, rho_abs, phases):
        f = gain_mcslsacc(i, j, m, rho)
        o = oracle_gain_mcslsacc(i, j, m, rho)
        out.append(AmplificationReport("gain_mcslsacc", m, i, j, 0, rho, f, o,
                                       passed=abs(f - o) <= tol, delta=abs(f - o)))
    return out


@lru_cache(maxsize=8192)
def _block_sigmas(n: int, r: int, rho: complex) -> np.ndarray:
    # T_{i,j,r} is Toeplitz, so its spectrum depends on (j - i + 1, r, rho) only
    t = correlation_block(1, n, r, rho).t
    s = numerics.singular_values(t, method="jacobi")
    s.setflags(write=False)
    return s


def sweep_bounds_r0(n_max: int = 12, rho_abs=RHO_GRID, phases=PHASES,
                    tol: float = BOUND_TOL) -> list[AmplificationReport]:
    out = []
    for n in range(1, n_max + 1):
        for a in rho_abs:
            for ph in phases:
                rho = complex(a * np.exp(1j * ph))
                lo, hi = bounds_vcslacc_r0(1, n, rho)
                s = float(_block_sigmas(n, 0, rho)[0])
                ok = lo - tol <= s <= hi + tol and lo >= 1 - tol
                out.append(AmplificationReport("bounds_r0", n, 1, n, 0, rho, lo, s, lo, hi,
                                               ok, max(lo - s, s - hi, 0.0)))
    return out


def sweep_trace_bound(m_max: int = 12, rho_abs=(0.0,) + RHO_GRID, phases=PHASES,
                      tol: float = BOUND_TOL) -> list[AmplificationReport]:
    """Theorem-2 chain and the rank ``s + 1`` count over ``0 < r <= j - i``."""
    out = []
    for n in range(2, m_max + 1):
        for r in range(1, n):
            if n + r > m_max:
                continue
            s_dim = n - 1 - r
            for a in rho_abs:
                for ph in phases:
                    rho = complex(a * np.exp(1j * ph))
                    avg, smax = trace_bound_vcslacc(1, n, r, rho)
                    sig = _block_sigmas(n, r, rho)
                    rank = int(np.sum(sig > RANK_TOL * sig[0]))
                    if a == 0.0:
                        ok = abs(avg - 1) <= tol and abs(smax - 1) <= tol
                    else:
                        ok = smax >= avg - tol and avg > 1 + tol
                    ok = ok and (a == 0.0 or rank == s_dim + 1)
                    out.append(AmplificationReport("trace_bound", n + r, 1, n, r, rho, avg, smax,
                                                   1.0, float("nan"), ok, smax - avg))
    return out


def sweep_bounds_noisefree(m_max: int = 12, rho_abs=RHO_GRID, phases=PHASES,
                           tol: float = BOUND_TOL) -> list[AmplificationReport]:
    out = []
    for n in range(1, m_max + 1):
        for r in range(n - 1, m_max - n + 1):
            for a in rho_abs:
                for ph in phases:
                    rho = complex(a * np.exp(1j * ph))
                    lo, hi = bounds_vcslacc_noisefree(1, n, r, rho)
                    sig = _block_sigmas(n, r, rho)
                    s = float(sig[0])
                    rank_one = sig.size == 1 or sig[1] <= RANK_TOL * s
                    ok = abs(lo - s) <= tol and s <= hi + tol and rank_one
                    out.append(AmplificationReport("bounds_noisefree", n + r, 1, n, r, rho, lo, s,
                                                   lo, hi, ok, abs(lo - s)))
    return out


def sweep_monotonicity(m_max: int = 12, rho_abs=RHO_GRID_COARSE[1:], phases=PHASES,
                       margin: float = MONOTONE_MARGIN) -> list[AmplificationReport]:
    """``sigma_max(T_{i,j,r}) > sigma_max(T_{i,j,r+1}) + margin`` for every valid pair."""
    out = []
    for n in range(1, m_max + 1):
        for r in range(0, m_max - n):
            for a in rho_abs:
                for ph in phases:
                    rho = complex(a * np.exp(1j * ph))
                    s0 = float(_block_sigmas(n, r, rho)[0])
                    s1 = float(_block_sigmas(n, r + 1, rho)[0])
                    out.append(AmplificationReport("monotone", n + r + 1, 1, n, r, rho, s0, s1,
                                                   passed=s0 - s1 > margin, delta=s0 - s1))
    return out


def phase_invariance(m_max: int = 12, rho_abs=RHO_GRID_COARSE[1:], phases=PHASES) -> float:
    """Largest spread of block spectra across phases at equal ``|rho|``."""
    worst = 0.0
    for n in range(1, m_max + 1):
        for r in range(0, m_max - n + 1):
            for a in rho_abs:
                ref = _block_sigmas(n, r, complex(a))
                for ph in phases[1:]:
                    other = _block_sigmas(n, r, complex(a * np.exp(1j * ph)))
                    worst = max(worst, float(np.max(np.abs(ref - other))))
    return worst


# ------------------------------------------------------------ figure data


def figure2_reports(rho_abs=np.round(np.arange(0, 20) * 0.05, 2)) -> list[AmplificationReport]:
    """Gain and bounds against ``|rho|``: M=6, i=2, j=3,4 (matrix); M=10, i=2, j=4 (vector)."""
    out = []
    for a in rho_abs:
        rho = complex(a)
        for j in (3, 4):
            for r in (0, 1, 2):
                f = gain_mcslacc(2, j, r, rho)
                out.append(AmplificationReport("gain_mcslacc", 6, 2, j, r, rho, f,
                                               oracle_gain_mcslacc(2, j, r, rho, 6)))
            f = gain_mcslsacc(2, j, 6, rho)
            out.append(AmplificationReport("gain_mcslsacc", 6, 2, j, 0, rho, f,
                                           oracle_gain_mcslsacc(2, j, 6, rho)))
        out.extend(_vector_reports(10, 2, 4, (0, 4, 6), rho))
    return [_mark(rep) for rep in out]


def figure3_reports(rho_abs=(0.6, 0.8)) -> list[AmplificationReport]:
    """Gain and bounds against ``j - i + 1`` with ``i = 2``: M=11 (matrix), M=21 (vector)."""
    out = []
    for a in rho_abs:
        rho = complex(a)
        for j in range(2, 12):
            for r in (0, 1):
                if j + r <= 11:
                    out.append(AmplificationReport("gain_mcslacc", 11, 2, j, r, rho,
                                                   gain_mcslacc(2, j, r, rho),
                                                   oracle_gain_mcslacc(2, j, r, rho, 11)))
            out.append(AmplificationReport("gain_mcslsacc", 11, 2, j, 0, rho,
                                           gain_mcslsacc(2, j, 11, rho),
                                           oracle_gain_mcslsacc(2, j, 11, rho)))
            out.extend(_vector_reports(21, 2, j, (0, 1, 10), rho))
    return [_mark(rep) for rep in out]


def _vector_reports(m: int, i: int, j: int, shifts, rho: complex) -> list[AmplificationReport]:
    out = []
    for r in shifts:
        if j + r > m:
            continue
        s = sigma_max(correlation_block(i, j, r, rho, m).t)
        if r == 0:
            lo, hi = bounds_vcslacc_r0(i, j, rho)
            kind = "bounds_r0"
        elif r < j - i:
            lo, s = trace_bound_vcslacc(i, j, r, rho)
            hi = float("nan")
            kind = "trace_bound"
        elif abs(rho) == 0:
            lo = hi = 0.0
            kind = "bounds_noisefree"
        else:
            lo, hi = bounds_vcslacc_noisefree(i, j, r, rho)
            kind = "bounds_noisefree"
        out.append(AmplificationReport(kind, m, i, j, r, rho, lo, s, lo, hi))
    return out


def _mark(rep: AmplificationReport) -> AmplificationReport:
    tol = 1e-9
    o = rep.oracle_value
    if rep.kind.startswith("gain"):
        ok = abs(rep.formula_value - o) <= tol
    elif rep.kind == "bounds_noisefree":
        ok = abs(rep.lower_bound - o) <= tol and o <= rep.upper_bound + tol
    elif rep.kind == "trace_bound":
        ok = o >= rep.lower_bound - tol
    else:
        ok = rep.lower_bound - tol <= o <= rep.upper_bound + tol
    return AmplificationReport(rep.kind, rep.M, rep.i, rep.j, rep.r, rep.rho, rep.formula_value,
                               o, rep.lower_bound, rep.upper_bound, bool(ok),
                               abs(rep.formula_value - o))
