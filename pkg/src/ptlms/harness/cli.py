"""Command-line entry point.

    ptlms run SPEC [--out DIR] [--trials N] [--seed S] [--enr-db X] [--pole P] [--system S]
    ptlms preset NAME [--out DIR] [--paper-scale] [--trials N]
    ptlms complexity --algo ALGO --taps L [--out FILE]
    ptlms speedup A B [--threshold DB]      (A, B: spec files or curve CSVs)
    ptlms speedup --scenario white|colour

Spec files hold one ``key = value`` per line (see ``ExperimentSpec``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..afcore import COMPLEXITY_ALGORITHMS, complexity_report, format_complexity_tables
from . import emit
from .experiment import ExperimentSpec, LearningCurve, ThresholdNotReached, first_crossing, run, speedup
from .presets import PRESETS, SCENARIOS, run_preset, speedup_scenario

EXIT_DIVERGED = 2


def _apply_overrides(spec, args):
    changes = {}
    for attr, key in (("trials", "trials"), ("seed", "seed"), ("enr_db", "enr_db"), ("pole", "pole"),
                      ("system", "system"), ("iterations", "iterations")):
        v = getattr(args, attr, None)
        if v is not None:
            changes[key] = v
    return spec.replace(**changes) if changes else spec


def cmd_run(args):
    spec = _apply_overrides(ExperimentSpec.from_file(args.spec), args)
    curve = run(spec, workers=args.workers)
    out = Path(args.out)
    stem = out / Path(args.spec).stem
    csv_path, svg_path = emit.emit({curve.label: curve}, stem, title=curve.label)
    print(f"{curve.label}: {len(curve)} iterations, {spec.trials} trials, {curve.wall_time:.1f} s")
    if curve.diverged:
        print(f"warning: diverged at iteration {curve.diverged_at}", file=sys.stderr)
    else:
        print(f"steady state {curve.steady_state_db():.2f} dB; "
              f"-20 dB reached at {first_crossing(curve, -20.0)}")
    if spec.arithmetic == "fixed16":
        print(f"saturation events: {curve.saturation_events}")
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def cmd_preset(args):
    res = run_preset(args.name, trials=args.trials, paper_scale=args.paper_scale, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if res.table is not None:
        emit.write_table_csv(res.table, res.columns, out / f"{res.name}.csv", key="profile")
        emit.write_bars(res.table, res.columns, out / f"{res.name}.svg", title="Sparseness by domain")
        for k, vals in res.table.items():
            print(f"{k:<12}" + "".join(f"{c}={v:.4f}  " for c, v in zip(res.columns, vals)))
    for panel, curves in res.panels.items():
        emit.write_csv(curves, out / f"{panel}.csv")
        emit.write_svg(curves, out / f"{panel}.svg", title=panel, markers=res.markers.get(panel))
        for label, c in curves.items():
            tail = "diverged" if c.diverged else f"{c.steady_state_db():7.2f} dB"
            print(f"{panel:<22}{label:<28}{tail}")
    for note in res.notes:
        print(note)
    print(f"outputs in {out}")
    bad = res.diverged()
    if bad:
        print("diverged: " + ", ".join(bad), file=sys.stderr)
        return EXIT_DIVERGED
    return 0


def cmd_complexity(args):
    report = complexity_report(args.algo, args.taps)
    text = format_complexity_tables(report)
    if args.out:
        emit.write_complexity(report, args.out)
    sys.stdout.write(text)
    return 0


def _load_curve(ref, workers):
    """A spec file is run; ``file.csv`` or ``file.csv:label`` reads a stored curve."""
    path, _, label = ref.partition(".csv:")
    if ref.endswith(".csv") or label:
        path = path if ref.endswith(".csv") else path + ".csv"
        curves = emit.read_csv(path)
        if not curves:
            raise ValueError(f"{path} holds no curves")
        key = label or next(iter(curves))
        return LearningCurve(curves[key], label=key)
    return run(ExperimentSpec.from_file(ref), workers=workers)


def cmd_speedup(args):
    if args.scenario:
        ratio, a, b = speedup_scenario(args.scenario, trials=args.trials or 50,
                                       threshold_db=args.threshold, workers=args.workers)
    else:
        if not (args.a and args.b):
            raise SystemExit("speedup needs two curves (A B) or --scenario")
        a = _load_curve(args.a, args.workers)
        b = _load_curve(args.b, args.workers)
        try:
            ratio = speedup(a, b, args.threshold)
        except ThresholdNotReached as exc:
            print(f"not reached: {exc}")
            return 1
    ia, ib = first_crossing(a, args.threshold), first_crossing(b, args.threshold)
    print(f"{a.label}: {ia}   {b.label}: {ib}   speed-up {ratio:.2f}x at {args.threshold} dB")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ptlms", description="Proportionate-type LMS experiment harness")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one spec file")
    r.add_argument("spec")
    r.add_argument("--out", default="out")
    r.add_argument("--trials", type=int)
    r.add_argument("--iterations", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--enr-db", dest="enr_db", type=float)
    r.add_argument("--pole", type=float)
    r.add_argument("--system", help="sparse, semi, dispersive, block<K>[@r] or file:<path>")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="regenerate one figure")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--out", default="out")
    pr.add_argument("--paper-scale", action="store_true", help="500 trials instead of 50")
    pr.add_argument("--trials", type=int)
    pr.add_argument("--workers", type=int, default=1)
    pr.set_defaults(func=cmd_preset)

    c = sub.add_parser("complexity", help="area and critical-path tables")
    c.add_argument("--algo", required=True, choices=COMPLEXITY_ALGORITHMS)
    c.add_argument("--taps", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_complexity)

    s = sub.add_parser("speedup", help="ratio of iterations needed to reach a threshold")
    s.add_argument("a", nargs="?")
    s.add_argument("b", nargs="?")
    s.add_argument("--threshold", type=float, default=-20.0)
    s.add_argument("--scenario", choices=sorted(SCENARIOS))
    s.add_argument("--trials", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_speedup)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
