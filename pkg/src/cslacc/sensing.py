"""Joint-sparse recovery, band energy statistics and Pd/Pf bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cslacc.errors import SingularProjection

COND_LIMIT = 1e12
RELATIVE_EPSILON = 0.05


@dataclass(frozen=True)
class RecoveryConfig:
    """SOMP stopping rules.

    ``epsilon`` is an absolute residual Frobenius bound. When it is ``None``
    the bound is ``relative_epsilon * ||y||_F`` instead, which keeps the
    detector invariant to the amplitude of the clean sub-samples.
    """

    band_count: int
    max_sparsity: int | None = None
    epsilon: float | None = None
    relative_epsilon: float = RELATIVE_EPSILON

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.relative_epsilon < 0:
            raise ValueError("relative_epsilon must be non-negative")


@dataclass(frozen=True)
class RecoveryResult:
    z_hat: np.ndarray = field(repr=False)  # (Q, C)
    support_bins: tuple[int, ...]
    support_bands: tuple[int, ...]
    residual_norm: float
    singular_stop: bool = False


@dataclass(frozen=True)
class DetectionMetrics:
    pd: float
    pf: float
    per_band_stats: np.ndarray = field(repr=False)
    threshold: float
    n_occupied: int = 0
    n_vacant: int = 0

    @property
    def pd_stderr(self) -> float:
        return binomial_stderr(self.pd, self.n_occupied)

    @property
    def pf_stderr(self) -> float:
        return binomial_stderr(self.pf, self.n_vacant)


def binomial_stderr(p: float, n: int) -> float:
    return float(np.sqrt(p * (1 - p) / n)) if n > 0 else float("nan")


def noise_floor_epsilon(p: int, c: int, alpha: float, sigma2_hat: float) -> float:
    """Residual bound ``sqrt(P C alpha sigma^2)`` for raw noisy measurements."""
    return float(np.sqrt(p * c * alpha * sigma2_hat))


def bins_to_bands(support_bins, q: int, band_count: int) -> tuple[int, ...]:
    """Bands holding at least one selected DFT bin."""
    width = q // band_count
    return tuple(sorted({int(b) // width for b in support_bins}))


def somp(y, a, cfg: RecoveryConfig) -> RecoveryResult:
    """Simultaneous orthogonal matching pursuit.

    Each step adds the atom with the largest summed correlation magnitude
    over all residual columns, then re-fits every column by least squares
    on the selected atoms. Stops when the residual drops below the bound or
    the sparsity cap is met. Numerically dependent selections end the run
    early with ``singular_stop`` set.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim == 1:
        y = y[:, None]
    a = np.asarray(a, dtype=np.complex128)
    p, q = a.shape
    if y.shape[0] != p:
        raise ValueError(f"measurements have {y.shape[0]} rows, dictionary {p}")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0):
        raise ValueError("dictionary has a zero column")
    a_unit_h = (a / norms).conj().T
    cap = cfg.max_sparsity if cfg.max_sparsity is not None else q
    cap = min(cap, q, p)
    y_norm = np.linalg.norm(y)
    eps = cfg.epsilon if cfg.epsilon is not None else cfg.relative_epsilon * y_norm

    selected: list[int] = []
    coef = np.zeros((0, y.shape[1]), dtype=np.complex128)
    resid = y
    res_norm = y_norm
    singular = False
    while res_norm > eps and len(selected) < cap:
        score = np.abs(a_unit_h @ resid).sum(axis=1)
        score[selected] = -1.0
        k = int(np.argmax(score))
        trial = selected + [k]
        sub = a[:, trial]
        try:
            if np.linalg.cond(sub) > COND_LIMIT:
                raise SingularProjection(f"atoms {trial} are numerically dependent")
        except SingularProjection:
            singular = True
            break
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        selected = trial
        resid = y - sub @ coef
        res_norm = float(np.linalg.norm(resid))

    z_hat = np.zeros((q, y.shape[1]), dtype=np.complex128)
    if selected:
        z_hat[selected] = coef
    bands = bins_to_bands(selected, q, cfg.band_count)
    return RecoveryResult(z_hat, tuple(sorted(selected)), bands, float(res_norm), singular)


def band_statistics(z_hat, band_count: int) -> np.ndarray:
    """Per-band energy ``T_b = (1/C) sum_c sum_{bins in b} |z|^2``."""
    z = np.asarray(z_hat)
    if z.ndim == 1:
        z = z[:, None]
    q, c = z.shape
    energy = np.abs(z) ** 2
    return energy.reshape(band_count, q // band_count, c).sum(axis=1).mean(axis=1)


def energy_detect(z_band, gamma: float):
    """Decide occupancy for one band: ``mean_streams sum_bins |z|^2 > gamma``.

    ``z_band`` holds one coefficient per stream, or (bins, streams).
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    z = np.asarray(z_band)
    if z.ndim <= 1:
        stat = float(np.mean(np.abs(z) ** 2)) if z.size else 0.0
    else:
        stat = float((np.abs(z) ** 2).sum(axis=0).mean())
    return stat > gamma


def decide(stats, gamma: float) -> np.ndarray:
    return np.asarray(stats) > gamma


def support_mask(supports, band_count: int) -> np.ndarray:
    """Boolean (trials, bands) occupancy from per-trial support sets."""
    mask = np.zeros((len(supports), band_count), dtype=bool)
    for t, sup in enumerate(supports):
        mask[t, list(sup)] = True
    return mask


def compute_pd_pf(decisions, supports, *, stats=None, threshold: float = float("nan")
                  ) -> DetectionMetrics:
    """Pooled detection rate over occupied bands and alarm rate over vacant ones."""
    dec = np.atleast_2d(np.asarray(decisions, dtype=bool))
    if dec.shape[0] < 1:
        raise ValueError("need at least one trial")
    occ = support_mask(supports, dec.shape[1])
    n_occ, n_vac = int(occ.sum()), int((~occ).sum())
    pd = float(dec[occ].mean()) if n_occ else float("nan")
    pf = float(dec[~occ].mean()) if n_vac else float("nan")
    per_band = np.asarray(stats) if stats is not None else dec.astype(float)
    return DetectionMetrics(pd, pf, per_band, threshold, n_occ, n_vac)


def calibrate_threshold(null_stats, target_pf: float = 0.1) -> float:
    """Smallest order statistic with at most ``target_pf`` of null stats above it."""
    flat = np.sort(np.asarray(null_stats, dtype=float).ravel())
    if flat.size == 0:
        raise ValueError("no calibration statistics")
    k = int(np.ceil((1.0 - target_pf) * flat.size)) - 1
    return float(flat[min(max(k, 0), flat.size - 1)])
