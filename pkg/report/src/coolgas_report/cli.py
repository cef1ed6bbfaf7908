"""Command line entry point.

    report --input <dir> --plots cooling,profile,convergence --out <dir>

Exit codes: 0 success, 1 artifact problem, 2 usage error.  The default
plot selection `auto` renders whichever plots have their artifacts
present; naming plots explicitly makes missing artifacts an error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InputError, ReportError, UsageError
from .render import PLOT_INPUTS, PLOTS, ReportSpec, generate_report


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coolgas-report",
        description="Render figures and a summary page from run artifacts.")
    ap.add_argument("--input", required=True, metavar="DIR",
                    help="run directory holding the artifacts")
    ap.add_argument("--plots", default="auto", metavar="LIST",
                    help="comma-separated subset of "
                         f"{{{','.join(PLOTS)}}}, or 'auto' (default)")
    ap.add_argument("--out", default=None, metavar="DIR",
                    help="output directory (default: <input>/report)")
    ap.add_argument("--no-overlay", action="store_true",
                    help="skip the Maxwellian overlay on the profile plot")
    ap.add_argument("--dim", type=int, default=None,
                    help="overlay dimension (default: d from summary.json, "
                         "else 3)")
    return ap


def parse_spec(argv) -> ReportSpec:
    ap = _build_parser()
    args = ap.parse_args(argv)
    input_dir = Path(args.input)
    if not input_dir.is_dir():
        raise UsageError(f"input directory does not exist: {input_dir}")
    if args.dim is not None and args.dim < 1:
        raise UsageError("--dim must be >= 1")
    if args.plots == "auto":
        plots = tuple(p for p in PLOTS
                      if all((input_dir / f).exists()
                             for f in PLOT_INPUTS[p]))
        if not plots:
            # A well-formed invocation against a dir with no artifacts is a
            # data problem, not a usage problem.
            raise InputError(
                f"no renderable artifacts found in {input_dir}; expected "
                "series.csv+fit.json, profile.csv, or "
                "l1.csv+convergence.json")
    else:
        plots = tuple(p.strip() for p in args.plots.split(",") if p.strip())
        unknown = [p for p in plots if p not in PLOTS]
        if unknown:
            raise UsageError(f"unknown plot name: {', '.join(unknown)}")
        if not plots:
            raise UsageError("--plots selected nothing")
    out_dir = Path(args.out) if args.out else input_dir / "report"
    return ReportSpec(input_dir=input_dir, plots=plots, out_dir=out_dir,
                      overlay=not args.no_overlay, dim=args.dim)


def run(spec: ReportSpec) -> int:
    try:
        result = generate_report(spec)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for plot, image, _ in result["entries"]:
        print(f"{plot}: {image}")
    print(f"page: {result['page']}")
    return 0


def main(argv=None) -> int:
    try:
        spec = parse_spec(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
