"""Regenerates the checked-in golden artifacts in this directory.

Everything is closed-form and deterministic, so rerunning this script
reproduces the fixtures byte for byte.  The fit JSONs hold the exact
parameters of the closed forms, which makes the rendered fit lines pass
through the data.

    python3 regen.py
"""

import json
import math
from pathlib import Path

HERE = Path(__file__).parent
FMT = "%.17g"
HASH = "676f6c64656e"    # placeholder config hash, 12 hex chars


def _fmt(x):
    return FMT % x


def maxwell_moment(e, k, d=3):
    # mean |v|^k of an isotropic Gaussian with mean square speed e
    s2 = e / d
    return (2.0 * s2) ** (0.5 * k) * math.gamma(0.5 * (d + k)) / \
        math.gamma(0.5 * d)


def write_series(path, t, e, dt):
    lines = [f"# config_hash={HASH}",
             "t,E,m_half,m_three_half,px,py,pz,n_coll,dt"]
    n_coll = 0
    for k in range(len(t)):
        n_coll += 150
        cells = [_fmt(t[k]), _fmt(e[k]),
                 _fmt(maxwell_moment(e[k], 1)),
                 _fmt(maxwell_moment(e[k], 3)),
                 "0", "0", "0", str(n_coll), _fmt(dt)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_fit(path, a, fit):
    base = {"a": a, "alpha": None, "regime": None, "slope": None,
            "slope_lo": None, "slope_hi": None, "intercept": None,
            "r2": 1.0, "fit_window": None, "reliable": True,
            "exponent_hat": None, "tc_hat": None, "tc_spread": None}
    base.update(fit)
    base["slope_lo"] = base["slope_lo"] or base["slope"]
    base["slope_hi"] = base["slope_hi"] or base["slope"]
    payload = {"a": a, "config_hash": HASH, "source": "golden",
               "fit": base}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def maxwell_speed_cdf(v, e=1.0):
    # d = 3 closed form
    z = v / math.sqrt(e / 3.0)
    return math.erf(z / math.sqrt(2.0)) - \
        math.sqrt(2.0 / math.pi) * z * math.exp(-0.5 * z * z)


def main():
    # sub-critical power law, a = 0: E = (1 + 0.6 t)^-2
    d = HERE / "haff"
    d.mkdir(exist_ok=True)
    t = [0.5 * k for k in range(81)]
    write_series(d / "series.csv", t, [(1.0 + 0.6 * x) ** -2 for x in t],
                 0.5)
    write_fit(d / "fit.json", 0.0,
              {"alpha": -1.0, "regime": "sub-critical", "slope": 0.6,
               "intercept": 1.0, "fit_window": [10.0, 40.0],
               "exponent_hat": -2.0})

    # critical exponential, a = 1/2: E = exp(-0.05 t)
    d = HERE / "critical"
    d.mkdir(exist_ok=True)
    t = [2.0 * k for k in range(81)]
    write_series(d / "series.csv", t, [math.exp(-0.05 * x) for x in t], 2.0)
    write_fit(d / "fit.json", 0.5,
              {"regime": "critical", "slope": -0.05, "intercept": 0.0,
               "fit_window": [40.0, 160.0]})

    # super-critical cutoff, a = 1: E^(1/2) = 0.4 - 0.04 t, zero at t = 10
    d = HERE / "super"
    d.mkdir(exist_ok=True)
    t = [0.12 * k for k in range(81)]
    write_series(d / "series.csv", t,
                 [(0.4 - 0.04 * x) ** 2 for x in t], 0.12)
    write_fit(d / "fit.json", 1.0,
              {"alpha": 1.0, "regime": "super-critical", "slope": -0.04,
               "intercept": 0.4, "fit_window": [0.0, 9.6],
               "exponent_hat": 2.0, "tc_hat": 10.0, "tc_spread": 0.0})

    # Maxwellian speed histogram at unit energy, 16 bins plus overflow
    d = HERE / "profile"
    d.mkdir(exist_ok=True)
    edges = [0.2 * k for k in range(17)]
    cdf = [maxwell_speed_cdf(v) for v in edges]
    lines = [f"# config_hash={HASH}", "# n_samples=5000",
             "bin_lo,bin_hi,mass"]
    for k in range(16):
        lines.append(",".join([_fmt(edges[k]), _fmt(edges[k + 1]),
                               _fmt(cdf[k + 1] - cdf[k])]))
    lines.append(",".join([_fmt(edges[-1]), "inf", _fmt(1.0 - cdf[-1])]))
    (d / "profile.csv").write_text("\n".join(lines) + "\n")

    # exponential distance decay onto a noise floor
    d = HERE / "conv"
    d.mkdir(exist_ok=True)
    floor = 0.01
    s = [0.5 * k for k in range(61)]
    l1 = [math.hypot(0.5 * math.exp(-0.12 * x), floor) for x in s]
    lines = [f"# config_hash={HASH}", "s,l1"]
    lines += [",".join([_fmt(a), _fmt(b)]) for a, b in zip(s, l1)]
    (d / "l1.csv").write_text("\n".join(lines) + "\n")
    n_pts = sum(1 for x in l1 if x > 3.0 * floor)
    payload = {"config_hash": HASH, "source": "golden", "tau": 0.05,
               "fit": {"rate_hat": 0.12, "noise_floor": floor,
                       "mu_e_check": 2.4, "r2": 0.999,
                       "n_points": n_pts, "reliable": True}}
    (d / "convergence.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")

    # distance series stuck at the floor: nothing to fit
    d = HERE / "conv_flat"
    d.mkdir(exist_ok=True)
    l1 = [floor * (1.0 + 0.15 * math.sin(1.7 * x)) for x in s]
    lines = [f"# config_hash={HASH}", "s,l1"]
    lines += [",".join([_fmt(a), _fmt(b)]) for a, b in zip(s, l1)]
    (d / "l1.csv").write_text("\n".join(lines) + "\n")
    payload = {"config_hash": HASH, "source": "golden", "tau": 0.05,
               "fit": {"rate_hat": None, "noise_floor": floor,
                       "mu_e_check": None, "r2": None,
                       "n_points": 0, "reliable": False}}
    (d / "convergence.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(f"golden artifacts written under {HERE}")


if __name__ == "__main__":
    main()
