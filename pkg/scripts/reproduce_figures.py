"""Write one CSV per figure preset.

    python scripts/reproduce_figures.py --out results/ [--mc-trials 20000] [--no-mc] [fig3 fig4 ...]
"""

from __future__ import annotations

import argparse
import os
import time

from mmwsec.experiments import PRESET_IDS, PRESET_MC, McSpec, preset, run_many, write_table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("figs", nargs="*", help=f"preset ids (default: all of {', '.join(PRESET_IDS)})")
    parser.add_argument("--out", default="results")
    parser.add_argument("--mc-trials", type=int, default=PRESET_MC.trials)
    parser.add_argument("--seed", type=int, default=PRESET_MC.seed)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--no-mc", action="store_true")
    args = parser.parse_args(argv)

    mc = None if args.no_mc else McSpec(trials=args.mc_trials, seed=args.seed)
    status = 0
    for fig_id in args.figs or PRESET_IDS:
        t0 = time.perf_counter()
        table = run_many(preset(fig_id, mc=mc), threads=args.threads)
        path = os.path.join(args.out, f"{fig_id}.csv")
        write_table(table, path)
        print(f"{fig_id}: {len(table.rows)} rows, {len(table.errors)} errors, "
              f"{time.perf_counter() - t0:.1f} s -> {path}")
        status |= bool(table.errors)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
