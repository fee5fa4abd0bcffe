"""Compressive subspace learning with antenna cross-correlations.

Sub-sample segments arrive as an array of shape (L, P, M). Two sub-arrays
are correlated: the basic group ``I0 = {i..j}`` and the group shifted by
``r`` antennas. The matrix arrangement keeps each antenna as a column
(SCM is P x P); the vector arrangement stacks the group into one long
vector (SCM is P(j-i+1) square). Antenna indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from cslacc import numerics
from cslacc.errors import (
    DegenerateSpectrum,
    EmptySegments,
    IndexOutOfRange,
    NoShiftAvailable,
    ReshapeMismatch,
)

DEGENERATE_FLOOR = 1e-14
GAP_GUARD = 1e-3
ENERGY_FRACTION = 0.95


class Arrangement(str, Enum):
    MATRIX = "matrix_form"
    VECTOR = "vector_form"


@dataclass(frozen=True)
class SubArraySpec:
    i: int
    j: int
    r: int
    M: int

    def __post_init__(self):
        if not 1 <= self.i <= self.j <= self.M:
            raise IndexOutOfRange(f"need 1 <= i <= j <= M, got ({self.i}, {self.j}, {self.M})")
        if self.i + self.r < 1 or self.j + self.r > self.M:
            raise IndexOutOfRange(
                f"shifted group {self.i + self.r}..{self.j + self.r} leaves 1..{self.M}")

    @property
    def width(self) -> int:
        return self.j - self.i + 1

    @property
    def base(self) -> slice:
        return slice(self.i - 1, self.j)

    @property
    def shifted(self) -> slice:
        return slice(self.i - 1 + self.r, self.j + self.r)


@dataclass(frozen=True)
class ScmEstimate:
    matrix: np.ndarray = field(repr=False)
    arrangement: Arrangement
    spec: SubArraySpec | None
    segments_used: int


@dataclass(frozen=True)
class SubspaceEstimate:
    u_s: np.ndarray = field(repr=False)
    lambda_s: np.ndarray
    s: int
    residual_spectrum: np.ndarray = field(repr=False)

    @property
    def spectrum(self) -> np.ndarray:
        return np.concatenate([self.lambda_s, self.residual_spectrum])


@dataclass(frozen=True)
class CleanSubsamples:
    kind: str  # "vector" or "matrix"
    data: np.ndarray = field(repr=False)
    projection: np.ndarray | None = field(default=None, repr=False)
    noise_scale: float = 1.0  # median SCM singular value, a CFAR-style reference

    def normalized(self) -> np.ndarray:
        """Sub-samples divided by :attr:`noise_scale`, invariant to input amplitude."""
        return self.data / self.noise_scale if self.noise_scale > 0 else self.data

    @property
    def columns(self) -> int:
        return self.data.shape[1]


def _segments(y) -> np.ndarray:
    seg = y.segments if hasattr(y, "segments") else np.asarray(y)
    if seg.ndim == 2:
        seg = seg[None]
    if seg.shape[0] == 0:
        raise EmptySegments("need at least one segment")
    return seg


# ------------------------------------------------------------ arrangements


def arrange_matrix(y: np.ndarray, spec: SubArraySpec):
    """Column slices ``Y[:, i..j]`` and ``Y[:, i+r..j+r]`` of a P x M block."""
    y = np.asarray(y)
    if y.shape[-1] != spec.M:
        raise IndexOutOfRange(f"expected {spec.M} antennas, got {y.shape[-1]}")
    return y[..., spec.base], y[..., spec.shifted]


def arrange_vector(y: np.ndarray, spec: SubArraySpec):
    """Column-stacked versions of :func:`arrange_matrix`.

    Element ``(m - i) * P + p`` of the first vector is ``Y[p, m]``.
    """
    a0, a1 = arrange_matrix(y, spec)
    return _vec(a0), _vec(a1)


def _vec(a: np.ndarray) -> np.ndarray:
    # column stacking over the last two axes
    return np.swapaxes(a, -1, -2).reshape(*a.shape[:-2], -1)


def unvec(v: np.ndarray, p: int, cols: int) -> np.ndarray:
    v = np.asarray(v).ravel()
    if v.size != p * cols:
        raise ReshapeMismatch(f"cannot reshape {v.size} entries into {p} x {cols}")
    return v.reshape(cols, p).T


# ------------------------------------------------------------ SCMs


def estimate_scm(segments, spec: SubArraySpec,
                 arrangement: Arrangement | str = Arrangement.MATRIX) -> ScmEstimate:
    """``(1/L) sum_l A(Y_I0(l)) A(Y_Ir(l))^H`` for either arrangement."""
    seg = _segments(segments)
    arrangement = Arrangement(arrangement)
    n_seg, p, _ = seg.shape
    y0, y1 = arrange_matrix(seg, spec)
    if arrangement is Arrangement.MATRIX:
        # stack every (segment, antenna) column side by side
        a0 = y0.transpose(1, 0, 2).reshape(p, -1)
        a1 = y1.transpose(1, 0, 2).reshape(p, -1)
        mat = a0 @ a1.conj().T
    else:
        v0, v1 = _vec(y0), _vec(y1)  # (L, P*w)
        mat = v0.T @ v1.conj()
    return ScmEstimate(mat / n_seg, arrangement, spec, n_seg)


def mcslsacc_shifts(i: int, j: int, m: int) -> list[int]:
    """Nonzero shifts summed by the combined SCM: ``-(i-1)..-1`` and ``1..M-j``."""
    return [-r for r in range(1, i)] + list(range(1, m - j + 1))


def combined_scm_mcslsacc(segments, i: int, j: int) -> ScmEstimate:
    """Sum of matrix-form cross SCMs over every admissible nonzero shift."""
    seg = _segments(segments)
    m = seg.shape[2]
    shifts = mcslsacc_shifts(i, j, m)
    if not shifts:
        raise NoShiftAvailable(f"i = {i}, j = {j} spans all {m} antennas")
    total = None
    for r in shifts:
        term = estimate_scm(seg, SubArraySpec(i, j, r, m), Arrangement.MATRIX).matrix
        total = term if total is None else total + term
    return ScmEstimate(total, Arrangement.MATRIX, SubArraySpec(i, j, 0, m), seg.shape[0])


# ------------------------------------------------------------ subspace


def select_rank(sigma: np.ndarray, rule: str = "gap", *, guard: float = GAP_GUARD,
                energy: float = ENERGY_FRACTION) -> int:
    """Adaptive signal-subspace dimension from a non-increasing spectrum.

    ``"gap"`` takes the largest relative drop ``(s_k - s_{k+1}) / s_k``
    among values above ``guard * s_1``; ``"energy"`` takes the smallest
    ``s`` whose leading values hold ``energy`` of the total.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma[0] <= DEGENERATE_FLOOR:
        return 0
    if sigma.size == 1:
        return 1
    if rule == "energy":
        cum = np.cumsum(sigma)
        return int(np.searchsorted(cum, energy * cum[-1] * (1 - 1e-12)) + 1)
    if rule != "gap":
        raise ValueError(f"unknown rank rule {rule!r}")
    head = sigma[:-1]
    rel = np.full(head.shape, -np.inf)
    ok = head >= guard * sigma[0]
    rel[ok] = (head[ok] - sigma[1:][ok]) / head[ok]
    return int(np.argmax(rel) + 1)


def extract_subspace(scm, rank_rule: str = "gap", *, rank: int | None = None,
                     method: str = "auto", **rule_kw) -> SubspaceEstimate:
    """Dominant left singular vectors of an SCM.

    ``rank`` fixes ``s`` and bypasses the adaptive rule. Raises
    :class:`DegenerateSpectrum` when every singular value is below 1e-14.
    """
    mat = scm.matrix if isinstance(scm, ScmEstimate) else np.asarray(scm)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("SCM must be square")
    res = numerics.svd(mat, method=method)
    sigma = res.singular_values
    if sigma.size == 0 or sigma[0] <= DEGENERATE_FLOOR:
        raise DegenerateSpectrum("SCM spectrum is numerically zero")
    s = select_rank(sigma, rank_rule, **rule_kw) if rank is None else int(rank)
    s = min(max(s, 1), sigma.size)
    return SubspaceEstimate(res.u[:, :s], sigma[:s].copy(), s, sigma[s:].copy())


def reconstruct(sub: SubspaceEstimate, kind: str = "vector", p: int | None = None,
                cols: int = 1, *, with_projection: bool = False) -> CleanSubsamples:
    """Clean sub-samples ``U_s lambda_s``, reshaped to P x cols for ``"matrix"``."""
    y = sub.u_s @ sub.lambda_s
    proj = sub.u_s @ sub.u_s.conj().T if with_projection else None
    scale = float(np.median(sub.spectrum))
    if kind == "vector":
        return CleanSubsamples("vector", y[:, None], proj, scale)
    if kind != "matrix":
        raise ValueError(f"unknown kind {kind!r}")
    p = y.size // cols if p is None else p
    return CleanSubsamples("matrix", unvec(y, p, cols), proj, scale)


# ------------------------------------------------------------ algorithms


ALGORITHMS = ("mcslacc", "mcslsacc", "vcslacc", "tmacsl", "tsacsl")
PROPOSED = ("mcslacc", "mcslsacc", "vcslacc")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    r: int = 0

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.name!r}; choose from {ALGORITHMS}")

    @property
    def label(self) -> str:
        if self.name in ("mcslacc", "vcslacc"):
            return f"{self.name}_r{self.r}"
        return self.name

    @property
    def proposed(self) -> bool:
        return self.name in PROPOSED

    @classmethod
    def parse(cls, text: str) -> "AlgorithmSpec":
        """``"vcslacc:2"``, ``"vcslacc_r2"`` or ``"tmacsl"``."""
        text = text.strip().lower()
        for sep in (":", "_r", "="):
            if sep in text:
                name, r = text.split(sep, 1)
                return cls(name, int(r))
        return cls(text)


def tmacsl_scm(segments) -> ScmEstimate:
    """Full-array auto-correlation SCM, ``(1/L) sum_l Y(l) Y(l)^H``."""
    seg = _segments(segments)
    m = seg.shape[2]
    return estimate_scm(seg, SubArraySpec(1, m, 0, m), Arrangement.MATRIX)


def tsacsl_scm(segments) -> ScmEstimate:
    seg = _segments(segments)
    return estimate_scm(seg, SubArraySpec(1, 1, 0, seg.shape[2]), Arrangement.MATRIX)


def baseline_tmacsl(segments, rank_rule: str = "gap", **kw) -> CleanSubsamples:
    return reconstruct(extract_subspace(tmacsl_scm(segments), rank_rule, **kw))


def baseline_tsacsl(segments, rank_rule: str = "gap", **kw) -> CleanSubsamples:
    return reconstruct(extract_subspace(tsacsl_scm(segments), rank_rule, **kw))


def algorithm_scm(alg: AlgorithmSpec, segments, i: int, j: int) -> ScmEstimate:
    seg = _segments(segments)
    m = seg.shape[2]
    if alg.name == "mcslacc":
        return estimate_scm(seg, SubArraySpec(i, j, alg.r, m), Arrangement.MATRIX)
    if alg.name == "vcslacc":
        return estimate_scm(seg, SubArraySpec(i, j, alg.r, m), Arrangement.VECTOR)
    if alg.name == "mcslsacc":
        return combined_scm_mcslsacc(seg, i, j)
    if alg.name == "tmacsl":
        return tmacsl_scm(seg)
    return tsacsl_scm(seg)


def run_algorithm(alg: AlgorithmSpec | str, segments, i: int, j: int,
                  rank_rule: str = "gap", **kw) -> CleanSubsamples:
    """SCM, subspace and clean sub-samples for one algorithm.

    vCSLACC output is reshaped to P x (j-i+1); every other algorithm yields
    a single P x 1 vector.
    """
    if isinstance(alg, str):
        alg = AlgorithmSpec.parse(alg)
    seg = _segments(segments)
    sub = extract_subspace(algorithm_scm(alg, seg, i, j), rank_rule, **kw)
    if alg.name == "vcslacc":
        return reconstruct(sub, "matrix", seg.shape[1], j - i + 1)
    return reconstruct(sub, "vector")
