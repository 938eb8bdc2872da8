"""Command-line entry point: ``frustint {state,scan,fit,vt,timing,alpha}``.

Everything is written to stdout as JSON or CSV; exit status is 0 on success,
2 for an invalid experiment document and 1 for any other error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

import numpy as np

from . import analysis
from .detection import ClickPattern
from .elements import ENV_PREFIX, Loss, PairSource
from .engine import Experiment, run_pipeline
from .experiment_io import ValidationError, load, serialize_state
from .timing import DEFAULT_TOLERANCE_UM, check_alignment


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_state(args) -> str:
    return serialize_state(run_pipeline(load(args.file).experiment))


def _scan_setting(args, scan: dict, name: str, key: str, default=None):
    v = getattr(args, name)
    return v if v is not None else scan.get(key, default)


def cmd_scan(args) -> str:
    doc = load(args.file)
    exp, cfg = doc.experiment, doc.scan
    target = _scan_setting(args, cfg, "target", "target")
    pat = _scan_setting(args, cfg, "pattern", "pattern")
    if target is None or pat is None:
        raise ValueError("scan needs --target and --pattern (or a scan section in the file)")
    pattern = ClickPattern.parse(pat)
    order = _scan_setting(args, cfg, "order", "order", 2)
    explicit_grid = not (args.start is None and args.stop is None and args.steps is None)
    # the file's unit only applies to the file's own grid
    unit = "position" if args.positions else ("phase" if explicit_grid else cfg.get("unit", "phase"))
    if "grid" in cfg and not explicit_grid:
        grid = np.asarray(cfg["grid"], dtype=float)
    else:
        src = {} if explicit_grid else cfg
        start = _scan_setting(args, src, "start", "start", 0.0)
        stop = _scan_setting(args, src, "stop", "stop", 2 * math.pi)
        steps = _scan_setting(args, src, "steps", "steps", 32)
        grid = np.linspace(start, stop, int(steps))
    if unit == "position":
        wavelength = _scan_setting(args, cfg, "wavelength", "wavelength")
        if wavelength is None:
            raise ValueError("position scans need --wavelength")
        mult = _scan_setting(args, cfg, "multiplicity", "multiplicity", 1)
        curve = analysis.scan_positions(exp, target, grid, wavelength, pattern, int(mult),
                                        order=int(order), workers=args.workers)
    else:
        curve = analysis.scan(exp, target, grid, pattern, int(order), workers=args.workers)
    if args.sample is not None:
        curve = analysis.sample_counts(curve, args.sample, args.seed)
    return curve.to_csv()


def cmd_fit(args) -> str:
    with open(args.csv, encoding="utf-8") as fh:
        curve = analysis.ScanCurve.from_csv(fh.read())
    bounds = None
    if args.period_min is not None or args.period_max is not None:
        span = float(curve.x[-1] - curve.x[0])
        bounds = (args.period_min or 2 * float(np.median(np.diff(curve.x))),
                  args.period_max or 2 * span)
    return _dump(analysis.fit_sinusoid(curve, bounds).to_dict())


def _first_stage(el) -> bool:
    return isinstance(el, PairSource) and (el.name or "").startswith("source_")


def alpha_from_gains(exp: Experiment) -> float:
    """Ratio of the two interfering histories' amplitudes, from the source gains."""
    first = [el.gain_scale for el in exp.pipeline if _first_stage(el)]
    second = [el.gain_scale for el in exp.pipeline
              if isinstance(el, PairSource) and not _first_stage(el)]
    if not first or not second or math.prod(second) == 0:
        raise ValueError("cannot infer alpha: need sources named source_* and later-stage sources")
    return math.prod(first) / math.prod(second)


def with_path_loss(exp: Experiment, mode: str, T: float) -> Experiment:
    """Attenuate ``mode`` (amplitude factor ``T``) just before its second emitting source."""
    emitted = False
    for i, el in enumerate(exp.pipeline):
        if isinstance(el, PairSource) and mode in el.modes:
            if emitted:
                loss = Loss(mode, T * T, f"{ENV_PREFIX}vt-{mode}")
                pipeline = exp.pipeline[:i] + (loss,) + exp.pipeline[i:]
                return dataclasses.replace(exp, pipeline=pipeline, named_phases={})
            emitted = True
    raise ValueError(f"mode {mode!r} is not fed by two sources; nothing to attenuate")


def _with_alpha(exp: Experiment, alpha: float) -> Experiment:
    pipeline = []
    found = False
    for el in exp.pipeline:
        if isinstance(el, PairSource):
            gain = 1.0
            if el.name == "source_II":
                gain, found = alpha, True
            el = dataclasses.replace(el, gain_scale=gain)
        pipeline.append(el)
    if not found:
        raise ValueError("--alpha needs a source named source_II to carry it")
    return dataclasses.replace(exp, pipeline=tuple(pipeline))


def cmd_vt(args) -> str:
    exp = load(args.file).experiment
    if args.alpha is not None:
        exp = _with_alpha(exp, args.alpha)
    alpha = alpha_from_gains(exp)
    pattern = ClickPattern.parse(args.pattern)
    T_grid = [float(t) for t in args.T_grid.split(",")] if args.T_grid else \
        [round(0.1 * k, 10) for k in range(0, 11)]
    rows = analysis.visibility_vs_transmissivity(
        alpha, T_grid, pattern, exp_factory=lambda a, T: with_path_loss(exp, args.loss_mode, T),
        workers=args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "alpha", "V_engine", "V_formula"])
    for r in rows:
        w.writerow([repr(r.T), repr(alpha), repr(r.engine), "" if math.isnan(r.formula) else repr(r.formula)])
    return buf.getvalue()


def cmd_timing(args) -> str:
    doc = load(args.file)
    if doc.geometry is None:
        raise ValueError("experiment file has no geometry section")
    report = check_alignment(doc.geometry, args.tolerance_um)
    args._failed = not report.passed
    return _dump(report.to_dict())


def cmd_alpha(args) -> str:
    with open(args.table, encoding="utf-8") as fh:
        table = analysis.SourceImbalanceTable.from_dict(json.load(fh))
    alpha, V = analysis.estimate_alpha(table)
    return _dump({"alpha": alpha, "predicted_V": V})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frustint", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("state", help="print the merged output state as JSON")
    s.add_argument("file")
    s.set_defaults(func=cmd_state)

    s = sub.add_parser("scan", help="emit a scan curve as CSV")
    s.add_argument("file")
    s.add_argument("--pattern", help='click pattern, e.g. "1,2,3,4" or "2,3,!1,!4"')
    s.add_argument("--target", help="named phase to scan")
    s.add_argument("--from", dest="start", type=float)
    s.add_argument("--to", dest="stop", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--order", type=int, help="pair order to report (default 2)")
    s.add_argument("--positions", action="store_true", help="grid is mirror displacement in nm")
    s.add_argument("--wavelength", type=float, help="nm, for position scans")
    s.add_argument("--multiplicity", type=int)
    s.add_argument("--sample", type=float, metavar="SCALE",
                   help="replace y by Poisson counts with mean y*SCALE")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, help=f"worker threads (default ${analysis.WORKERS_ENV} or 1)")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("fit", help="fit a sinusoid to a curve CSV")
    s.add_argument("csv")
    s.add_argument("--period-min", type=float)
    s.add_argument("--period-max", type=float)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("vt", help="visibility versus transmissivity, engine and closed form")
    s.add_argument("file")
    s.add_argument("--pattern", default="1,2,3,4")
    s.add_argument("--T-grid", dest="T_grid", help="comma-separated amplitude transmissivities")
    s.add_argument("--loss-mode", default="4", help="attenuated path (default 4, photon s2)")
    s.add_argument("--alpha", type=float, help="put this gain on source_II, all others at 1")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_vt)

    s = sub.add_parser("timing", help="arrival-time report for the file's geometry")
    s.add_argument("file")
    s.add_argument("--tolerance-um", type=float, default=DEFAULT_TOLERANCE_UM)
    s.add_argument("--strict", action="store_true", help="exit 1 if any condition fails")
    s.set_defaults(func=cmd_timing)

    s = sub.add_parser("alpha", help="imbalance parameter from a source-count table")
    s.add_argument("table")
    s.set_defaults(func=cmd_alpha)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except ValidationError as exc:
        print(f"invalid experiment:\n{exc.report()}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    if getattr(args, "strict", False) and getattr(args, "_failed", False):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
