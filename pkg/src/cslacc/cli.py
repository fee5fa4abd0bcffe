"""Command-line entry point: ``cslacc {theory,sense,montecarlo,verify}``."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from cslacc import csl, harness, sampler, scenario, sensing, theory
from cslacc.errors import CslError, DegenerateSpectrum
from cslacc.numerics import BACKEND, SeededRng

THEORY_KINDS = {
    "gain_mcslacc": theory.sweep_gain_mcslacc,
    "gain_mcslsacc": theory.sweep_gain_mcslsacc,
    "bounds_r0": theory.sweep_bounds_r0,
    "trace_bound": theory.sweep_trace_bound,
    "bounds_noisefree": theory.sweep_bounds_noisefree,
    "monotone": theory.sweep_monotonicity,
}

SCENARIO_FLAGS = (("M", int), ("K", int), ("P", int), ("Q", int), ("L", int),
                  ("rho", complex), ("snr_db", float), ("seed", int),
                  ("i", int), ("j", int), ("r", int), ("W", float), ("B", float))


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario overrides")
    for name, typ in SCENARIO_FLAGS:
        flag = "--" + name.replace("_", "-")
        g.add_argument(flag, dest=f"sc_{name}", type=typ, default=None)
    g.add_argument("--tx-powers", dest="sc_tx_powers", default=None,
                   help="comma-separated transmit powers, one per user")


def _scenario_overrides(args) -> dict:
    out = {}
    for name, _ in SCENARIO_FLAGS:
        v = getattr(args, f"sc_{name}")
        if v is not None:
            out[name] = v
    if args.sc_tx_powers:
        out["tx_powers"] = tuple(float(x) for x in args.sc_tx_powers.split(","))
    return out


def _open_out(path):
    return sys.stdout if path in (None, "-") else path


def cmd_theory(args) -> int:
    kinds = list(THEORY_KINDS) if args.kind == "all" else [args.kind]
    rows = []
    for k in kinds:
        if k in ("fig2", "fig3"):
            rows += harness.run_plan(harness.make_plan(k))
        else:
            rows += THEORY_KINDS[k](args.m_max)
    harness.emit_csv(rows, _open_out(args.out), columns=theory.REPORT_COLUMNS)
    bad = sum(not r.passed for r in rows)
    print(f"{len(rows)} rows, {bad} failed", file=sys.stderr)
    return 1 if bad else 0


def cmd_sense(args) -> int:
    cfg = scenario.ScenarioConfig().replace(**_scenario_overrides(args))
    rng = SeededRng(cfg.seed)
    op = sampler.build_random_demodulator(cfg.P, cfg.Q, rng.child(harness.OPERATOR_STREAM))
    subs, frame = harness.realize(cfg, op, rng.child(0),
                                  scenario.build_exponential_correlation(cfg.M, cfg.rho))
    plan = harness.make_plan("custom", base=cfg)
    rc = harness.recovery_config(plan, cfg)
    print(f"backend={BACKEND} M={cfg.M} K={cfg.K} P={cfg.P} Q={cfg.Q} L={cfg.L} "
          f"rho={cfg.rho:.3g} snr_db={cfg.snr_db:g} sigma2={frame.noise_variance:.4g}")
    print(f"true support: {list(frame.support)}")
    algs = [csl.AlgorithmSpec.parse(a) for a in args.algorithms.split(",")]
    for alg in algs:
        try:
            clean = csl.run_algorithm(alg, subs, cfg.i, cfg.j, args.rank_rule)
        except (DegenerateSpectrum, CslError) as exc:
            print(f"{alg.label:12s} error: {exc}")
            continue
        res = sensing.somp(clean.normalized(), op.a, rc)
        stats = sensing.band_statistics(res.z_hat, cfg.n_bands)
        top = np.argsort(-stats)[: max(cfg.K, 1)]
        print(f"{alg.label:12s} cols={clean.columns} noise_scale={clean.noise_scale:.4g} "
              f"atoms={len(res.support_bins)} bands={list(res.support_bands)} "
              f"top={sorted(int(b) for b in top)} resid={res.residual_norm:.3g}"
              + (" singular_stop" if res.singular_stop else ""))
    return 0


def cmd_montecarlo(args) -> int:
    kw = harness.load_config(args.config) if args.config else {}
    workers = kw.pop("workers", None)
    base = kw.pop("base", None)
    overrides = _scenario_overrides(args)
    preset = args.preset or kw.pop("preset", None)
    kw.pop("preset", None)
    if preset is None:
        print("montecarlo needs --preset or a config with experiment.preset", file=sys.stderr)
        return 2
    if overrides:
        defaults = harness.make_plan(preset).base
        base = (base or defaults).replace(**overrides)
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.full:
        kw["trials"] = harness.FULL_TRIALS
    if args.values:
        kw["values"] = tuple(float(v) for v in args.values.split(","))
    if args.algorithms:
        kw["algorithms"] = tuple(csl.AlgorithmSpec.parse(a) for a in args.algorithms.split(","))
    if args.target_pf is not None:
        kw["target_pf"] = args.target_pf
    plan = harness.make_plan(preset, base=base, **kw)
    start = time.perf_counter()
    rows = harness.run_plan(plan, workers=args.workers or workers, timing=args.timing)
    harness.emit_csv(rows, _open_out(args.out), timing=args.timing)
    print(f"{len(rows)} rows in {time.perf_counter() - start:.1f} s", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    checks = []
    for name, fn in THEORY_KINDS.items():
        rows = fn(args.m_max)
        checks.append((name, all(r.passed for r in rows), f"{len(rows)} grid points"))
    spread = theory.phase_invariance(args.m_max)
    checks.append(("phase_invariance", spread < 1e-9, f"max spread {spread:.2e}"))
    cfg = scenario.ScenarioConfig(P=20, Q=100, B=100e6)
    for alg, r in (("mcslacc", 1), ("mcslsacc", 0), ("vcslacc", 1)):
        rep = theory.validate_scm_expectation(alg, cfg, 10_000, r=r)
        checks.append((f"scm_{alg}_r{r}", rep.relative_error < 0.05,
                       f"relative error {rep.relative_error:.4f}"))
    failed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cslacc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="gain and bound sweeps against their oracles, as CSV")
    p.add_argument("--kind", default="all", choices=["all", "fig2", "fig3", *THEORY_KINDS])
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sense", help="one realization with per-algorithm diagnostics")
    _add_scenario_flags(p)
    p.add_argument("--algorithms", default=",".join(a.label for a in harness.FIGURE_ALGORITHMS))
    p.add_argument("--rank-rule", default="energy", choices=["energy", "gap"])
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("montecarlo", help="Pd/Pf sweeps for a figure preset, as CSV")
    p.add_argument("--preset", default=None, help="fig2..fig6 or custom")
    p.add_argument("--config", default=None, help="INI file; flags override its keys")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--full", action="store_true", help=f"run {harness.FULL_TRIALS} trials")
    p.add_argument("--values", default=None, help="comma-separated sweep values")
    p.add_argument("--algorithms", default=None, help="e.g. vcslacc:2,mcslsacc,tmacsl")
    p.add_argument("--target-pf", type=float, default=None)
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default ${harness.WORKERS_ENV} or 1)")
    p.add_argument("--timing", action="store_true", help="add a wall_time column")
    p.add_argument("--out", default="-")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("verify", help="property suite; nonzero exit on failure")
    p.add_argument("--m-max", type=int, default=12)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
