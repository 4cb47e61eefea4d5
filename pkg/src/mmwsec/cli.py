"""Command-line entry point: ``mmwsec {run,preset,validate,mc-selftest}``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import an, mrt
from .config import SystemConfig
from .experiments import PRESET_IDS, McSpec, load_spec, preset, run, run_many, spec_summary, write_table
from .montecarlo import McParams, mc_metric


def _emit_errors(errors: list[dict]) -> None:
    for err in errors:
        print(json.dumps(err, default=str), file=sys.stderr)


def _cmd_run(args) -> int:
    try:
        spec = load_spec(args.spec, args.set)
    except (OSError, ValueError) as exc:
        _emit_errors([{"error": type(exc).__name__, "message": str(exc), "spec": args.spec}])
        return 2
    table = run(spec, threads=args.threads)
    out = args.out or spec.output
    if out:
        write_table(table, out)
    else:
        sys.stdout.write(table.to_csv())
    _emit_errors(table.errors)
    return 0 if table.ok and not table.errors else 1


def _cmd_preset(args) -> int:
    mc = None if args.no_mc else McSpec(trials=args.mc_trials, seed=args.seed)
    try:
        specs = preset(args.fig_id, mc=mc)
    except ValueError as exc:
        _emit_errors([{"error": "ValueError", "message": str(exc)}])
        return 2
    table = run_many(specs, threads=args.threads)
    if args.out:
        write_table(table, os.path.join(args.out, f"{args.fig_id}.csv"))
    else:
        sys.stdout.write(table.to_csv())
    _emit_errors(table.errors)
    return 0 if table.ok and not table.errors else 1


def _cmd_validate(args) -> int:
    try:
        spec = load_spec(args.spec, args.set)
        spec.point_configs()
    except (OSError, ValueError) as exc:
        _emit_errors([{"error": type(exc).__name__, "message": str(exc), "spec": args.spec}])
        return 1
    print(json.dumps(spec_summary(spec), default=str, indent=2))
    return 0


def _selftest_cases(cfg: SystemConfig):
    pmf = cfg.pmf()
    mu = 20.0
    an_cfg = cfg.replace(eta=0.5)
    yield ("connection mrt", "connection", McParams(cfg=cfg), mrt.connection_probability_mrt(cfg))
    yield ("connection an", "connection", McParams(cfg=an_cfg, scheme="an"),
           an.connection_probability_an(an_cfg))
    yield ("sop mrt", "sop_noncolluding", McParams(cfg=cfg, mu=mu), mrt.sop_noncolluding_mrt(mu, cfg, pmf))
    yield ("sop an (exact cdf)", "sop_noncolluding", McParams(cfg=an_cfg, scheme="an", mu=mu),
           an.sop_noncolluding_an(mu, an_cfg, pmf, cdf="exact"))
    yield ("laplace an", "laplace_point", McParams(cfg=an_cfg, scheme="an", mu=mu, s=0.01),
           an.laplace_ie_an(0.01, mu, an_cfg, pmf))


def _cmd_selftest(args) -> int:
    cfg = SystemConfig(p_dbm=20.0, lambda_e=1e-5, r_s=1.0, r_t=4.0)
    failures = 0
    print("check,analytic,mc_mean,mc_stderr,z,result")
    for name, metric, params, value in _selftest_cases(cfg):
        est = mc_metric(metric, params, args.trials, args.seed, threads=args.threads)
        z = (est.mean - value) / est.std_error if est.std_error > 0 else (0.0 if est.mean == value else math.inf)
        ok = abs(z) <= args.n_se
        failures += not ok
        print(f"{name},{value!r},{est.mean!r},{est.std_error!r},{z:.3f},{'pass' if ok else 'FAIL'}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmwsec", description=__doc__)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $MMWSEC_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a spec file and write CSV")
    r.add_argument("spec")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a spec key (repeatable; wins over the file)")
    r.add_argument("--out", help="CSV path (default: the spec's output key, else stdout)")
    r.set_defaults(func=_cmd_run)

    pr = sub.add_parser("preset", help="run a figure preset")
    pr.add_argument("fig_id", choices=PRESET_IDS)
    pr.add_argument("--out", help="directory for <fig_id>.csv (default: stdout)")
    pr.add_argument("--mc-trials", type=int, default=10_000)
    pr.add_argument("--seed", type=int, default=20240611)
    pr.add_argument("--no-mc", action="store_true", help="closed forms only")
    pr.set_defaults(func=_cmd_preset)

    v = sub.add_parser("validate", help="check a spec file without evaluating it")
    v.add_argument("spec")
    v.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    v.set_defaults(func=_cmd_validate)

    st = sub.add_parser("mc-selftest", help="quick closed-form vs Monte Carlo check")
    st.add_argument("--trials", type=int, default=20_000)
    st.add_argument("--seed", type=int, default=7)
    st.add_argument("--n-se", type=float, default=4.0)
    st.set_defaults(func=_cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
