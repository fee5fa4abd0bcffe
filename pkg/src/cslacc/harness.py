"""Monte Carlo experiment runner, figure presets, config files and CSV output.

Every trial derives its random streams from ``(seed, point, trial, stream)``
so results do not depend on worker count or scheduling order. Stream 0 is
the PU-present realization, stream 1 the PU-free calibration run at the
same noise level. The measurement operator is drawn once per sweep point.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from cslacc import csl, sampler, scenario, sensing, theory
from cslacc.errors import ConfigError, DegenerateSpectrum
from cslacc.numerics import SeededRng

WORKERS_ENV = "CSLACC_WORKERS"
DEFAULT_TRIALS = 500
FULL_TRIALS = 5000
TARGET_PF = 0.1
OPERATOR_STREAM = 1 << 20

RESULT_COLUMNS = ("kind", "preset", "point", "snr_db", "P", "Q", "K", "compression", "st",
                  "algorithm", "pd", "pf", "pd_stderr", "pf_stderr", "threshold", "trials")


class Preset(str, Enum):
    FIG2 = "fig2_gain_vs_rho"
    FIG3 = "fig3_gain_vs_antennas"
    FIG4 = "fig4_pd_vs_compression"
    FIG5 = "fig5_pd_vs_pu_count"
    FIG6 = "fig6_pd_vs_snr"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, text: str) -> "Preset":
        text = text.strip().lower()
        for p in cls:
            if text in (p.value, p.value.split("_")[0]):
                return p
        raise ConfigError(f"unknown preset {text!r}")

    @property
    def is_theory(self) -> bool:
        return self in (Preset.FIG2, Preset.FIG3)


FIGURE_ALGORITHMS = tuple(csl.AlgorithmSpec.parse(a) for a in (
    "vcslacc:0", "vcslacc:1", "vcslacc:2", "mcslsacc", "mcslacc:0", "mcslacc:1",
    "tmacsl", "tsacsl"))


@dataclass(frozen=True)
class SweepPoint:
    """Overrides applied to the base scenario, plus an optional algorithm subset."""

    params: dict
    algorithms: tuple[csl.AlgorithmSpec, ...] | None = None
    st: int = 1

    def scenario(self, base: scenario.ScenarioConfig) -> scenario.ScenarioConfig:
        try:
            return base.replace(**self.params)
        except (ConfigError, TypeError) as exc:
            raise ConfigError(f"sweep point {self.params}: {exc}") from exc


@dataclass(frozen=True)
class ExperimentPlan:
    preset: Preset
    sweep: tuple[SweepPoint, ...]
    trials: int = DEFAULT_TRIALS
    base: scenario.ScenarioConfig = field(default_factory=scenario.ScenarioConfig)
    algorithms: tuple[csl.AlgorithmSpec, ...] = FIGURE_ALGORITHMS
    target_pf: float = TARGET_PF
    rank_rule: str = "energy"
    relative_epsilon: float = sensing.RELATIVE_EPSILON
    max_sparsity: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.sweep:
            raise ConfigError("sweep must contain at least one point")
        if not 0.0 < self.target_pf < 1.0:
            raise ConfigError("target_pf must lie in (0, 1)")

    def point_algorithms(self, point: SweepPoint) -> tuple[csl.AlgorithmSpec, ...]:
        return point.algorithms if point.algorithms is not None else self.algorithms


@dataclass(frozen=True)
class ResultRow:
    preset: str
    point: int
    snr_db: float
    P: int
    Q: int
    K: int
    compression: float
    st: int
    algorithm: str
    pd: float
    pf: float
    pd_stderr: float
    pf_stderr: float
    threshold: float
    trials: int
    wall_time: float = float("nan")

    def row(self) -> dict:
        out = dataclasses.asdict(self)
        out["kind"] = "montecarlo"
        return out


# ------------------------------------------------------------ presets


def _st_algorithms(plan_algs) -> tuple[csl.AlgorithmSpec, ...]:
    return tuple(a for a in plan_algs if a.name in ("mcslacc", "mcslsacc"))


def make_plan(preset: Preset | str, *, trials: int = DEFAULT_TRIALS, seed: int = 0,
              base: scenario.ScenarioConfig | None = None, values: Sequence | None = None,
              algorithms: Sequence[csl.AlgorithmSpec] | None = None,
              sweep_param: str | None = None, **plan_kw) -> ExperimentPlan:
    """Experiment plan for a figure preset; ``values`` overrides the sweep grid."""
    preset = Preset.parse(preset) if isinstance(preset, str) else preset
    algs = tuple(algorithms) if algorithms else FIGURE_ALGORITHMS
    if preset is Preset.FIG2:
        vals = values if values is not None else np.round(np.arange(20) * 0.05, 2)
        sweep = tuple(SweepPoint({"rho": float(v)}) for v in vals)
        return ExperimentPlan(preset, sweep, 1, base or scenario.ScenarioConfig(seed=seed), algs)
    if preset is Preset.FIG3:
        vals = values if values is not None else (0.6, 0.8)
        sweep = tuple(SweepPoint({"rho": float(v)}) for v in vals)
        return ExperimentPlan(preset, sweep, 1, base or scenario.ScenarioConfig(seed=seed), algs)
    if preset is Preset.FIG4:
        cfg = base or scenario.ScenarioConfig(Q=300, L=100, snr_db=-16.0, seed=seed)
        vals = values if values is not None else (3, 4, 5, 6, 10)
        sweep = tuple(SweepPoint({"P": int(round(cfg.Q / c))}) for c in vals)
    elif preset is Preset.FIG5:
        cfg = base or scenario.ScenarioConfig(P=100, Q=500, L=100, snr_db=-18.0, seed=seed)
        vals = values if values is not None else tuple(range(4, 33, 4))
        sweep = tuple(SweepPoint({"K": int(k)}) for k in vals)
    elif preset is Preset.FIG6:
        cfg = base or scenario.ScenarioConfig(P=100, Q=200, L=100, snr_db=-20.0, seed=seed)
        vals = values if values is not None else tuple(range(-20, 1, 2))
        pts = []
        for v in vals:
            pts.append(SweepPoint({"snr_db": float(v)}))
            # two sensing periods: P and Q doubled, proposed matrix-form methods only
            pts.append(SweepPoint({"snr_db": float(v), "P": 2 * cfg.P, "Q": 2 * cfg.Q},
                                  _st_algorithms(algs), st=2))
        sweep = tuple(pts)
    else:
        cfg = base or scenario.ScenarioConfig(seed=seed)
        if sweep_param is None or values is None:
            sweep = (SweepPoint({}),)
        else:
            if sweep_param not in {f.name for f in dataclasses.fields(scenario.ScenarioConfig)}:
                raise ConfigError(f"unknown sweep parameter {sweep_param!r}")
            sweep = tuple(SweepPoint({sweep_param: v}) for v in values)
    return ExperimentPlan(preset, sweep, trials, cfg, algs, **plan_kw)


# ------------------------------------------------------------ one trial


def _operator(plan: ExperimentPlan, point: int, cfg: scenario.ScenarioConfig):
    return sampler.build_random_demodulator(cfg.P, cfg.Q, SeededRng(cfg.seed, (point, OPERATOR_STREAM)))


def clean_statistics(alg: csl.AlgorithmSpec, segments, op: sampler.MeasurementOperator,
                     cfg: scenario.ScenarioConfig, rc: sensing.RecoveryConfig,
                     rank_rule: str = "energy") -> np.ndarray:
    """Band energy statistics of one algorithm on one set of sub-samples."""
    try:
        clean = csl.run_algorithm(alg, segments, cfg.i, cfg.j, rank_rule)
    except DegenerateSpectrum:
        return np.zeros(cfg.n_bands)
    res = sensing.somp(clean.normalized(), op.a, rc)
    return sensing.band_statistics(res.z_hat, cfg.n_bands)


def recovery_config(plan: ExperimentPlan, cfg: scenario.ScenarioConfig) -> sensing.RecoveryConfig:
    cap = plan.max_sparsity if plan.max_sparsity is not None else max(cfg.K, 1) * cfg.bins_per_band
    return sensing.RecoveryConfig(cfg.n_bands, max_sparsity=min(cap, cfg.Q),
                                  relative_epsilon=plan.relative_epsilon)


def realize(cfg: scenario.ScenarioConfig, op: sampler.MeasurementOperator, rng: SeededRng,
            corr: scenario.ExponentialCorrelation | None = None, *, pu_free: bool = False):
    """Channel, signals, noise and sub-samples for one realization."""
    channel = scenario.draw_channel(cfg, rng.child(0), correlation=corr)
    signals = scenario.generate_pu_signals(cfg, rng.child(1))
    if pu_free:
        signals = scenario.PuSignals(np.zeros_like(signals.s), ())
    frame = scenario.synthesize_frame(cfg, channel, signals, rng.child(2),
                                      sigma2=scenario.noise_variance(cfg))
    return sampler.subsample(op, frame), frame


def run_trial(plan: ExperimentPlan, point: int, trial: int) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Statistics (algorithms, bands) for the PU-present and PU-free runs."""
    sp = plan.sweep[point]
    cfg = sp.scenario(plan.base)
    algs = plan.point_algorithms(sp)
    op = _operator(plan, point, cfg)
    corr = scenario.build_exponential_correlation(cfg.M, cfg.rho)
    rc = recovery_config(plan, cfg)
    base = SeededRng(cfg.seed, (point, trial))
    out = []
    support = ()
    for stream, pu_free in ((0, False), (1, True)):
        subs, frame = realize(cfg, op, base.child(stream), corr, pu_free=pu_free)
        if not pu_free:
            support = frame.support
        out.append(np.array([clean_statistics(a, subs, op, cfg, rc, plan.rank_rule) for a in algs]))
    return out[0], out[1], support


def _run_chunk(args) -> list:
    plan, jobs = args
    return [run_trial(plan, p, t) for p, t in jobs]


# ------------------------------------------------------------ plans


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(int(workers), 1)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(int(env), 1)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
    return 1


def _theory_rows(plan: ExperimentPlan) -> list[theory.AmplificationReport]:
    rho = [sp.params.get("rho", plan.base.rho) for sp in plan.sweep]
    if plan.preset is Preset.FIG2:
        return theory.figure2_reports(rho)
    return theory.figure3_reports(rho)


def run_plan(plan: ExperimentPlan, *, workers: int | None = None, timing: bool = False) -> list:
    """Run every sweep point and return rows in (point, algorithm) order.

    Theory presets return :class:`~cslacc.theory.AmplificationReport` rows.
    """
    if plan.preset.is_theory:
        return _theory_rows(plan)
    for sp in plan.sweep:
        sp.scenario(plan.base)  # surface config errors before spawning work
    jobs = [(p, t) for p in range(len(plan.sweep)) for t in range(plan.trials)]
    n_workers = min(worker_count(workers), len(jobs))
    start = time.perf_counter()
    if n_workers == 1:
        results = _run_chunk((plan, jobs))
    else:
        size = math.ceil(len(jobs) / (4 * n_workers))
        chunks = [(plan, jobs[k:k + size]) for k in range(0, len(jobs), size)]
        with ProcessPoolExecutor(n_workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    elapsed = time.perf_counter() - start

    rows = []
    for p, sp in enumerate(plan.sweep):
        cfg = sp.scenario(plan.base)
        block = results[p * plan.trials:(p + 1) * plan.trials]
        alt = np.stack([b[0] for b in block])   # (trials, algorithms, bands)
        null = np.stack([b[1] for b in block])
        supports = [b[2] for b in block]
        for a, alg in enumerate(plan.point_algorithms(sp)):
            gamma = sensing.calibrate_threshold(null[:, a], plan.target_pf)
            m = sensing.compute_pd_pf(alt[:, a] > gamma, supports, stats=alt[:, a],
                                      threshold=gamma)
            label = alg.label if sp.st == 1 else f"{alg.label}_st{sp.st}"
            rows.append(ResultRow(
                plan.preset.value, p, cfg.snr_db, cfg.P, cfg.Q, cfg.K, cfg.compression_ratio,
                sp.st, label, m.pd, m.pf,
                sensing.binomial_stderr(m.pd, plan.trials),
                sensing.binomial_stderr(m.pf, plan.trials), gamma, plan.trials,
                elapsed / len(plan.sweep) if timing else float("nan")))
    return rows


# ------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".6g")
    return str(v)


def emit_csv(rows: Iterable, path, *, columns: Sequence[str] | None = None,
             timing: bool = False) -> None:
    """Header plus one line per row; floats use 6 significant digits.

    ``path`` may be a filesystem path or an open text stream.
    """
    rows = list(rows)
    if columns is None:
        if rows and isinstance(rows[0], theory.AmplificationReport):
            columns = theory.REPORT_COLUMNS
        else:
            columns = RESULT_COLUMNS + (("wall_time",) if timing else ())
    dicts = [r.row() if hasattr(r, "row") else dict(r) for r in rows]
    if hasattr(path, "write"):
        _write(path, columns, dicts)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write(fh, columns, dicts)


def _write(fh, columns, dicts):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for d in dicts:
        writer.writerow([_fmt(d.get(c, "")) for c in columns])


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ------------------------------------------------------------ config files


_SCENARIO_TYPES = {f.name: f.type for f in dataclasses.fields(scenario.ScenarioConfig)}


def _parse_scenario_value(key: str, text: str):
    if key == "tx_powers":
        return tuple(float(x) for x in text.replace(",", " ").split())
    if key == "rho":
        return complex(text.replace(" ", ""))
    if key in ("M", "K", "Q", "P", "L", "seed", "i", "j", "r"):
        return int(text)
    return float(text)


def scenario_from_mapping(values: dict, base: scenario.ScenarioConfig | None = None
                          ) -> scenario.ScenarioConfig:
    base = base or scenario.ScenarioConfig()
    changes = {}
    for key, text in values.items():
        if key not in _SCENARIO_TYPES:
            raise ConfigError(f"unknown scenario key {key!r}")
        try:
            changes[key] = _parse_scenario_value(key, str(text))
        except ValueError as exc:
            raise ConfigError(f"scenario.{key}: cannot parse {text!r}") from exc
    return base.replace(**changes)


def load_config(path) -> dict:
    """Read an INI file with ``[scenario]``, ``[recovery]`` and ``[experiment]`` sections.

    Returns keyword arguments for :func:`make_plan` (``base`` included when
    a scenario section is present) plus ``workers`` if given.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep M, K, P, Q case
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read config file {path}")
    unknown = set(parser.sections()) - {"scenario", "recovery", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    out: dict = {}
    if parser.has_section("scenario"):
        out["base"] = scenario_from_mapping(dict(parser["scenario"]))
    if parser.has_section("recovery"):
        sec = parser["recovery"]
        for key in sec:
            if key == "max_sparsity":
                out["max_sparsity"] = sec.getint(key)
            elif key == "relative_epsilon":
                out["relative_epsilon"] = sec.getfloat(key)
            else:
                raise ConfigError(f"unknown recovery key {key!r}")
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        for key in sec:
            if key == "preset":
                out["preset"] = sec[key]
            elif key in ("trials", "workers"):
                out[key] = sec.getint(key)
            elif key == "target_pf":
                out["target_pf"] = sec.getfloat(key)
            elif key == "rank_rule":
                out["rank_rule"] = sec[key]
            elif key == "algorithms":
                out["algorithms"] = tuple(csl.AlgorithmSpec.parse(a)
                                          for a in sec[key].replace(",", " ").split())
            elif key == "sweep_param":
                out["sweep_param"] = sec[key]
            elif key == "values":
                out["values"] = tuple(float(v) for v in sec[key].replace(",", " ").split())
            else:
                raise ConfigError(f"unknown experiment key {key!r}")
    return out
