"""Random-demodulator sub-Nyquist front end.

Each output sample integrates ``Q / P`` consecutive chipped Nyquist
samples, so ``Omega`` is block-structured with ``+-1`` entries and
orthogonal rows of squared norm ``Q / P``. That ratio is also the noise
folding factor ``alpha`` since the rows are left unnormalised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from cslacc.errors import DimensionMismatch, IndivisibleRatio
from cslacc.numerics import SeededRng, complex_gaussian


def dft_dictionary(q: int) -> np.ndarray:
    """Unitary inverse DFT, ``Psi[n, k] = exp(2j pi n k / q) / sqrt(q)``."""
    n = np.arange(q)
    return np.exp(2j * np.pi * np.outer(n, n) / q) / np.sqrt(q)


@dataclass(frozen=True)
class MeasurementOperator:
    omega: np.ndarray = field(repr=False)  # (P, Q) real +-1
    psi: np.ndarray = field(repr=False)    # (Q, Q)
    a: np.ndarray = field(repr=False)      # (P, Q) = omega @ psi
    chipping: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.omega.shape[0]

    @property
    def q(self) -> int:
        return self.omega.shape[1]

    @property
    def compression_ratio(self) -> float:
        return self.q / self.p

    @property
    def decimation(self) -> int:
        return self.q // self.p


@dataclass(frozen=True)
class SubSampleSet:
    segments: np.ndarray  # (L, P, M)
    operator: MeasurementOperator = field(repr=False)

    @property
    def n_segments(self) -> int:
        return self.segments.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.segments.shape[2]


class NoiseFoldingEstimate(NamedTuple):
    alpha: float
    stderr: float


def build_random_demodulator(p: int, q: int, rng: SeededRng | None = None, *,
                             chipping=None) -> MeasurementOperator:
    """Integrate-and-dump measurement matrix with a Rademacher chipping code.

    ``chipping`` may be given explicitly (length ``q``, entries +-1);
    otherwise it is drawn from ``rng``.
    """
    if p < 1 or q < 1 or q % p:
        raise IndivisibleRatio(f"P = {p} must divide Q = {q}")
    if p > q:
        raise IndivisibleRatio("P must not exceed Q")
    if chipping is None:
        if rng is None:
            raise ValueError("need rng or an explicit chipping sequence")
        chipping = rng.generator.integers(0, 2, q) * 2.0 - 1.0
    chipping = np.asarray(chipping, dtype=float)
    if chipping.shape != (q,) or not np.all(np.abs(chipping) == 1.0):
        raise ValueError("chipping must be a length-Q +-1 sequence")
    d = q // p
    rows = np.repeat(np.arange(p), d)
    omega = np.zeros((p, q))
    omega[rows, np.arange(q)] = chipping
    psi = dft_dictionary(q)
    omega.setflags(write=False)
    chipping.setflags(write=False)
    a = omega @ psi
    a.setflags(write=False)
    psi.setflags(write=False)
    return MeasurementOperator(omega, psi, a, chipping)


def apply_operator(op: MeasurementOperator, x: np.ndarray) -> np.ndarray:
    """``Omega`` along the last axis of ``x`` (length Q) via chip-and-sum."""
    x = np.asarray(x)
    if x.shape[-1] != op.q:
        raise DimensionMismatch(f"expected last axis {op.q}, got {x.shape[-1]}")
    chipped = x * op.chipping
    return chipped.reshape(*x.shape[:-1], op.p, op.decimation).sum(axis=-1)


def subsample(op: MeasurementOperator, frame) -> SubSampleSet:
    """``Y(l) = Omega X_bar(l)^T`` for every segment.

    ``frame`` is a :class:`~cslacc.scenario.NyquistFrame` or an array of
    shape (L, M, Q) or (M, Q).
    """
    x = frame.x_bar if hasattr(frame, "x_bar") else np.asarray(frame)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3:
        raise DimensionMismatch(f"expected (L, M, Q) samples, got shape {x.shape}")
    y = apply_operator(op, x)  # (L, M, P)
    return SubSampleSet(np.ascontiguousarray(y.transpose(0, 2, 1)), op)


def estimate_noise_folding(op: MeasurementOperator, sigma2: float, rng: SeededRng,
                           n_trials: int = 2000) -> NoiseFoldingEstimate:
    """Output/input noise power ratio measured on white Gaussian input."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    noise = complex_gaussian(rng, n_trials, op.q, sigma2)
    out = apply_operator(op, noise)
    per_trial = np.mean(np.abs(out) ** 2, axis=1) / sigma2
    return NoiseFoldingEstimate(float(per_trial.mean()),
                                float(per_trial.std(ddof=1) / np.sqrt(n_trials)))


def noise_folding_factor(op: MeasurementOperator) -> float:
    """Exact ``alpha`` for the unnormalised integrate-and-dump rows."""
    return float(np.mean(np.sum(op.omega ** 2, axis=1)))
