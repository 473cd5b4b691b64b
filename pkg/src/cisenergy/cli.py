"""Command line entry point.

Exit codes: 0 success, 1 check violations, stalls or a failed sweep row,
2 parse or schema error, 3 digital pipeline too slow for the frame rate,
4 oracle divergence under --verify.
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .checks import run_checks
from .errors import DesignError
from .design import load_design_file
from .oracle import TooLarge, verify
from .report import emit, emit_sweep, run, sweep
from .timing.delay import DigitalTooSlow, OverCommitted
from .timing.simulate import BACKENDS, SimulationError

OK, VIOLATIONS, BAD_DOCUMENT, TOO_SLOW, DIVERGED = 0, 1, 2, 3, 4


def _load(path):
    try:
        return load_design_file(path)
    except DesignError as e:
        print(f"{path}: {e}", file=sys.stderr)
        return None
    except OSError as e:
        print(f"{path}: {e.strerror}", file=sys.stderr)
        return None


def cmd_check(args):
    design = _load(args.file)
    if design is None:
        return BAD_DOCUMENT
    report = run_checks(design.graph, design.hardware, design.mapping)
    for v in report.violations:
        fix = f" (fix: {v.fix})" if v.fix else ""
        print(f"{v.rule}: {v.message}{fix}")
    for n in report.notes:
        print(f"note: {n}")
    if report.passed:
        print(f"{design.name}: all checks passed")
        return OK
    return VIOLATIONS


def cmd_run(args):
    design = _load(args.file)
    if design is None:
        return BAD_DOCUMENT
    try:
        report = run(design, args.fps, args.backend)
    except DigitalTooSlow as e:
        print(f"{design.name}: {e}", file=sys.stderr)
        return TOO_SLOW
    except (SimulationError, OverCommitted, ValueError) as e:
        print(f"{design.name}: {e}", file=sys.stderr)
        return VIOLATIONS
    sys.stdout.write(emit(report, args.format))
    code = OK if report.status == "ok" else VIOLATIONS
    if args.verify and report.status != "violations":
        try:
            problems = verify(design)
        except TooLarge as e:
            print(f"verify skipped: {e}", file=sys.stderr)
            return code
        for p in problems:
            print(f"divergence: {p}", file=sys.stderr)
        if problems:
            return DIVERGED
        print("verify: analytical, simulated and oracle counts agree", file=sys.stderr)
    return code


def _collect(paths):
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files += sorted(p.rglob("*.yaml")) + sorted(p.rglob("*.yml"))
        else:
            files.append(p)
    return files


def cmd_sweep(args):
    designs, bad = [], []
    files = _collect(args.paths)
    clash = len({f.stem for f in files}) < len(files)
    for f in files:
        d = _load(f)
        if d is None:
            bad.append(f)
        else:
            designs.append(replace(d, name=f"{f.parent.name}/{f.stem}") if clash else d)
    if not designs:
        print("no loadable designs", file=sys.stderr)
        return BAD_DOCUMENT
    rows = sweep(designs, args.fps, args.jobs, args.backend)
    sys.stdout.write(emit_sweep(rows, args.format))
    for f in bad:
        print(f"{f}: skipped (could not be loaded)", file=sys.stderr)
    return OK if all(r.status == "ok" for r in rows) and not bad else VIOLATIONS


def build_parser():
    ap = argparse.ArgumentParser(prog="cisenergy", description="Per-frame energy of image sensor designs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the design checks only")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="estimate the energy of one design")
    p.add_argument("file")
    p.add_argument("--fps", type=float, help="frame rate in Hz (defaults to globals.fps)")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--verify", action="store_true", help="cross-check counts against the brute-force oracle")
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="compare several designs")
    p.add_argument("paths", nargs="+", help="design files or directories")
    p.add_argument("--fps", type=float)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
