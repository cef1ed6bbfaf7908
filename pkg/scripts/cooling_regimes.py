"""Run the three cooling regimes side by side and fit each law.

Defaults are sized for a quick look (about 15 s); --full reproduces the
acceptance-scale runs.  With --outdir each run's series and summary land
in a subdirectory, readable by the fit subcommand later.

    python3 scripts/cooling_regimes.py
    python3 scripts/cooling_regimes.py --full --outdir runs/cooling
"""

import argparse
import math
import sys
from pathlib import Path

import coolgas as cg
from coolgas import io as cio


CASES = [
    # label, a, e, horizon kwargs (quick), horizon kwargs (full)
    ("haff a=0.0", 0.0, 0.9, dict(t_max=100.0), dict(t_max=400.0)),
    ("critical a=0.5", 0.5, 0.9, dict(t_max=40.0), dict(t_max=80.0)),
    ("blow-up a=1.0", 1.0, 0.5, dict(epsilon_stop=1e-4),
     dict(epsilon_stop=1e-6)),
]


def describe(fit):
    if fit.regime == "critical":
        return f"rate={-fit.slope:.5f}"
    if fit.regime == "super-critical":
        return f"Tc={fit.tc_hat:.4f} exponent={fit.exponent_hat:.3f}"
    return f"exponent={fit.exponent_hat:.4f}"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--full", action="store_true",
                    help="acceptance-scale horizons and n=20000")
    ap.add_argument("--outdir", help="write series/summary per regime")
    args = ap.parse_args(argv)
    n = 20_000 if args.full else args.n

    print(f"{'regime':<16} {'halt':<18} {'r2':>9} {'slope':>10}  law")
    for label, a, e, quick, full in CASES:
        horizon = full if args.full else quick
        cfg = cg.KernelConfig.isotropic(e, a=a)
        series, state, reason = cg.run_physical(cfg, n, args.seed, **horizon)
        fit = cg.fit_cooling(series, a)
        flag = "" if fit.reliable else "  [unreliable]"
        print(f"{label:<16} {reason:<18} {fit.r2:9.6f} {fit.slope:10.6f}"
              f"  {describe(fit)}{flag}")
        if a == 0.0:
            bound = cg.check_moment_bound(series)
            print(f"{'':16} m_3/2 bound: kappa={bound.kappa_hat:.4f} "
                  f"mu0={bound.mu0_hat:.5f}")
        if args.outdir:
            sub = Path(args.outdir) / label.split()[0]
            sub.mkdir(parents=True, exist_ok=True)
            payload = {"config": {"mode": "physical", "e": e, "a": a,
                                  "n": n, "seed": args.seed, **horizon},
                       "halt_reason": reason}
            h = cio.config_hash(payload["config"])
            cio.write_series_csv(sub / "series.csv", series, h)
            payload["config_hash"] = h
            cio.write_summary_json(sub / "summary.json", payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
