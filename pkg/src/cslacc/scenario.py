"""Physical-layer world: correlated MIMO channel, multiband BPSK users, AWGN.

Shapes used throughout
----------------------
* ``s``      : (L, Q, K)  Nyquist-rate PU samples, one column per user
* ``x_bar``  : (L, M, Q)  received samples, ``x_bar[l] = G @ s[l].T + n_bar[l]``
* ``g``      : (M, K)     flat channel gains, fixed over the sensing period
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cslacc.errors import BandOverflow, ConfigError, InvalidRho
from cslacc.numerics import SeededRng, complex_gaussian, hermitian_sqrt


@dataclass(frozen=True)
class ScenarioConfig:
    """Scalar parameters of one sensing experiment.

    Indices ``i``, ``j`` are 1-based antenna positions as in the algorithm
    descriptions; ``r`` is the default shift factor. ``tx_powers`` defaults
    to unit power for every user.
    """

    M: int = 6
    K: int = 3
    W: float = 1e9
    B: float = 20e6
    Q: int = 300
    P: int = 60
    L: int = 100
    rho: complex = 0.6
    snr_db: float = -16.0
    tx_powers: tuple[float, ...] | None = None
    seed: int = 0
    i: int = 2
    j: int = 3
    r: int = 1

    def __post_init__(self):
        if self.tx_powers is None:
            object.__setattr__(self, "tx_powers", (1.0,) * self.K)
        object.__setattr__(self, "tx_powers", tuple(float(p) for p in self.tx_powers))
        object.__setattr__(self, "rho", complex(self.rho))
        if self.M < 1 or self.Q < 1 or self.L < 1 or self.P < 1:
            raise ConfigError("M, Q, P and L must all be positive")
        if self.K < 0:
            raise ConfigError("K must be non-negative")
        if abs(self.rho) > 1.0 + 1e-15:
            raise InvalidRho(f"|rho| = {abs(self.rho):.6g} exceeds 1")
        if self.B <= 0 or self.W <= 0:
            raise ConfigError("bandwidths must be positive")
        ratio = self.W / self.B
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(f"B = {self.B:g} does not divide W = {self.W:g}")
        if self.K * self.B > self.W * (1 + 1e-12):
            raise BandOverflow(f"K*B = {self.K * self.B:g} exceeds W = {self.W:g}")
        if self.Q % self.n_bands:
            raise ConfigError(f"Q = {self.Q} is not a multiple of the band count {self.n_bands}")
        if self.Q % self.P:
            raise ConfigError(f"P = {self.P} must divide Q = {self.Q}")
        if len(self.tx_powers) != self.K:
            raise ConfigError(f"need {self.K} transmit powers, got {len(self.tx_powers)}")
        if any(p <= 0 for p in self.tx_powers):
            raise ConfigError("transmit powers must be positive")
        if not 1 <= self.i <= self.j <= self.M:
            raise ConfigError(f"need 1 <= i <= j <= M, got i={self.i}, j={self.j}, M={self.M}")

    @property
    def n_bands(self) -> int:
        return int(round(self.W / self.B))

    @property
    def bins_per_band(self) -> int:
        return self.Q // self.n_bands

    @property
    def compression_ratio(self) -> float:
        return self.Q / self.P

    def replace(self, **changes) -> "ScenarioConfig":
        if "K" in changes and "tx_powers" not in changes:
            changes["tx_powers"] = None
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ExponentialCorrelation:
    m: int
    rho: complex
    matrix: np.ndarray = field(repr=False)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return hermitian_sqrt(self.matrix)


@dataclass(frozen=True)
class ChannelDraw:
    g: np.ndarray       # (M, K)
    q_sqrt: np.ndarray  # (M, M)
    p_sqrt: np.ndarray  # (K, K) diagonal
    g_w: np.ndarray     # (M, K)


@dataclass(frozen=True)
class PuSignals:
    s: np.ndarray            # (L, Q, K), unit average power per user
    support: tuple[int, ...]  # occupied band indices, sorted


@dataclass(frozen=True)
class NyquistFrame:
    s: np.ndarray       # (L, Q, K)
    x_bar: np.ndarray   # (L, M, Q)
    n_bar: np.ndarray   # (L, M, Q)
    support: tuple[int, ...]
    noise_variance: float


def exponential_correlation_matrix(m: int, rho: complex) -> np.ndarray:
    """Hermitian Toeplitz ``[Q]_{ab} = rho**(b - a)`` for ``a <= b``."""
    rho = complex(rho)
    if abs(rho) > 1.0 + 1e-15:
        raise InvalidRho(f"|rho| = {abs(rho):.6g} exceeds 1")
    idx = np.arange(m)
    lag = idx[None, :] - idx[:, None]
    powers = rho ** np.abs(lag)
    return np.where(lag >= 0, powers, powers.conj()).astype(np.complex128)


def build_exponential_correlation(m: int, rho: complex) -> ExponentialCorrelation:
    if m < 1:
        raise ConfigError("correlation dimension must be positive")
    return ExponentialCorrelation(m, complex(rho), exponential_correlation_matrix(m, rho))


def noise_variance(cfg: ScenarioConfig) -> float:
    """Per-antenna noise power for the configured SNR.

    The reference is the mean received PU power per antenna, which equals
    the total transmit power because ``Q`` has a unit diagonal and the
    generated signals have unit power. With no users the reference is 1.
    """
    ref = float(np.sum(cfg.tx_powers)) if cfg.K else 1.0
    return ref / 10.0 ** (cfg.snr_db / 10.0)


def draw_channel(cfg: ScenarioConfig, rng: SeededRng, *,
                 correlation: ExponentialCorrelation | None = None,
                 powers=None) -> ChannelDraw:
    """Kronecker channel ``G = Q^{1/2} G_w P^{1/2}``.

    ``powers`` overrides ``cfg.tx_powers`` (zeros allowed); ``correlation``
    lets callers reuse a cached square root across trials.
    """
    corr = correlation or build_exponential_correlation(cfg.M, cfg.rho)
    pw = np.asarray(cfg.tx_powers if powers is None else powers, dtype=float)
    if pw.shape != (cfg.K,) or np.any(pw < 0):
        raise ConfigError("powers must be K non-negative values")
    g_w = complex_gaussian(rng, cfg.M, cfg.K)
    p_sqrt = np.diag(np.sqrt(pw)).astype(np.complex128)
    g = corr.sqrt @ g_w @ p_sqrt
    return ChannelDraw(g, corr.sqrt, p_sqrt, g_w)


def draw_channels(q_sqrt: np.ndarray, powers, rng: SeededRng, n: int) -> np.ndarray:
    """Batch of ``n`` independent channel matrices, shape (n, M, K)."""
    pw = np.sqrt(np.asarray(powers, dtype=float))
    m, k = q_sqrt.shape[0], pw.size
    g_w = complex_gaussian(rng, n * m, k).reshape(n, m, k)
    return np.einsum("ab,nbk->nak", q_sqrt, g_w) * pw


def band_bins(band: int, q: int, n_bands: int) -> np.ndarray:
    width = q // n_bands
    return np.arange(band * width, (band + 1) * width)


def band_mask(band: int, q: int, n_bands: int) -> np.ndarray:
    mask = np.zeros(q, dtype=bool)
    mask[band_bins(band, q, n_bands)] = True
    return mask


def _bpsk_stream(gen: np.random.Generator, n: int, sps: int) -> np.ndarray:
    offset = int(gen.integers(sps))
    n_sym = -(-(n + offset) // sps)
    symbols = gen.integers(0, 2, n_sym) * 2.0 - 1.0
    return np.repeat(symbols, sps)[offset:offset + n]


def generate_pu_signals(cfg: ScenarioConfig, rng: SeededRng, *,
                        support=None) -> PuSignals:
    """Multiband BPSK users on disjoint grid channels.

    Each user sends rectangular BPSK at symbol rate ``B`` on the centre
    frequency of a random narrowband, with random carrier phase and symbol
    timing. Every segment is band-limited to the user's DFT bins and scaled
    to unit average power, so the users' spectra never overlap.
    """
    n_bands, q, seg = cfg.n_bands, cfg.Q, cfg.L
    if cfg.K > n_bands:
        raise BandOverflow(f"K = {cfg.K} users do not fit in {n_bands} bands")
    gen = rng.generator
    if support is None:
        support = np.sort(gen.choice(n_bands, size=cfg.K, replace=False))
    support = tuple(int(b) for b in support)
    if len(set(support)) != cfg.K:
        raise BandOverflow("support must list K distinct bands")
    s = np.zeros((seg, q, cfg.K), dtype=np.complex128)
    if cfg.K == 0:
        return PuSignals(s, ())
    sps = n_bands  # Nyquist samples per symbol, W / B
    n = np.arange(seg * q)
    for k, band in enumerate(support):
        fc = (band + 0.5) / n_bands
        phase = gen.uniform(0.0, 2 * np.pi)
        x = _bpsk_stream(gen, seg * q, sps) * np.exp(1j * (2 * np.pi * fc * n + phase))
        spec = np.fft.fft(x.reshape(seg, q), axis=1)
        spec[:, ~band_mask(band, q, n_bands)] = 0.0
        seg_x = np.fft.ifft(spec, axis=1)
        power = np.mean(np.abs(seg_x) ** 2, axis=1, keepdims=True)
        s[:, :, k] = seg_x / np.sqrt(np.where(power > 0, power, 1.0))
    return PuSignals(s, support)


def synthesize_frame(cfg: ScenarioConfig, channel: ChannelDraw, signals: PuSignals,
                     rng: SeededRng, *, sigma2: float | None = None) -> NyquistFrame:
    """Received samples ``X_bar(l) = G S_bar(l) + N_bar(l)`` for every segment."""
    sigma2 = noise_variance(cfg) if sigma2 is None else float(sigma2)
    seg, q = signals.s.shape[:2]
    x_sig = np.einsum("mk,lqk->lmq", channel.g, signals.s)
    n_bar = complex_gaussian(rng, seg * cfg.M, q, sigma2).reshape(seg, cfg.M, q)
    return NyquistFrame(signals.s, x_sig + n_bar, n_bar, signals.support, sigma2)
