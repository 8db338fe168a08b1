"""Command-line entry point: ``spincav {spectrum,rotation,point,check}``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import analytic, observables
from .dynamics import SteadyStateError, solve
from .fock import FockDims
from .params import Direction, decay_rate, drive_amplitude, fizeau_shift, kerr_strength
from .sweep import ConfigError, emit, load_config, point_model, run_sweep, with_overrides

log = logging.getLogger("spincav")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML config file (defaults to the published device)")
    p.add_argument("--cutoff", type=int, help="photon cutoff per mode for the numeric engine")
    p.add_argument("-v", "--verbose", action="store_true")


def _sweep_args(p: argparse.ArgumentParser):
    _common(p)
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--engine", choices=("numeric", "analytic", "both"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--points", type=int, help="number of grid points")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--timing", action="store_true", help="add a wall_time_ms column")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincav",
        description="Steady-state transmission and photon statistics of two spinning cavities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="sweep the detuning (units of kappa)")
    _sweep_args(spectrum)

    rotation = sub.add_parser("rotation", help="sweep the rotation frequency (Hz)")
    _sweep_args(rotation)
    rotation.add_argument("--detuning", type=float,
                          help="fix Delta/kappa instead of tracking +DeltaF (cw) / -DeltaF (ccw)")

    point = sub.add_parser("point", help="one parameter set with the full term breakdown")
    _common(point)
    point.add_argument("--detuning", type=float, required=True, help="Delta/kappa")
    point.add_argument("--direction", choices=("cw", "ccw"), default="cw")

    check = sub.add_parser("check", help="run the acceptance criteria")
    check.add_argument("--workers", type=int, default=1)
    check.add_argument("--points", type=int, default=801, help="detuning grid size")
    return parser


def _load(args):
    params, spec = load_config(args.config)
    if args.cutoff is not None:
        spec = with_overrides(spec, cutoff=FockDims.square(args.cutoff))
    return params, spec


def cmd_sweep(args, variable: str) -> int:
    params, spec = _load(args)
    overrides = dict(engine=args.engine, num_points=args.points, start=args.start, stop=args.stop)
    if variable != spec.variable:
        overrides["variable"] = variable
        if variable == "rotation_freq" and args.start is None and args.stop is None:
            overrides.update(start=0.0, stop=20e3)
            overrides.setdefault("num_points", None)
            if args.points is None:
                overrides["num_points"] = 201
    if variable == "rotation_freq" and args.detuning is not None:
        overrides["rotation_detuning"] = args.detuning
    spec = with_overrides(spec, **overrides)
    rows = run_sweep(spec, params, workers=args.workers)
    emit(rows, args.format, args.out, timing=args.timing)
    failed = sum(bool(r.error) for r in rows)
    log.info("wrote %d rows to %s (%d with errors)", len(rows), args.out, failed)
    return 0


def cmd_point(args) -> int:
    params, spec = _load(args)
    direction = Direction.parse(args.direction)
    kappa = decay_rate(params, "L")
    spec = with_overrides(spec, variable="detuning_Delta")
    m = point_model(params, spec, args.detuning, direction)
    print(f"kappa = {kappa:.6g} rad/s")
    print(f"DeltaF/kappa = {fizeau_shift(params, 'L') / kappa:.6g}, "
          f"U/kappa = {kerr_strength(params) / kappa:.6g}, "
          f"eps/kappa = {drive_amplitude(params, kappa) / kappa:.6g}")
    print(f"direction = {direction.value}, Delta/kappa = {m.detuning_Delta:.6g}, "
          f"(Delta_L, Delta_R)/kappa = ({m.detunings[0]:.6g}, {m.detunings[1]:.6g})")
    try:
        rho = solve(m, spec.cutoff)
    except SteadyStateError as exc:
        print(f"steady state failed: {exc}")
        return 1
    print(f"solver residual = {rho.residual:.3e}")
    try:
        tb = observables.transmission(rho, m)
        print(f"T_left = {tb.t_left:.8g}, T_right = {tb.t_right:.8g}, "
              f"T_interference = {tb.t_interference:.4g}, T_total = {tb.t_total:.8g}")
        rep = observables.g2_output(rho, m)
    except observables.ObservableError as exc:
        print(exc)
        return 0
    print(f"g2_output = {rep.g2_output:.6e}")
    print(f"g2_cavity_L = {rep.g2_cavity_L:.6e}, g2_cavity_R = {rep.g2_cavity_R:.6e}")
    print("numerator terms (divided by output flux^2):")
    for name, term in zip(observables.TERM_NAMES, rep.term_breakdown):
        print(f"  {name:<14} {term / rep.output_flux**2:+.6e}")
    try:
        amps = analytic.steady_amplitudes(m)
        print(f"analytic g2_output = {analytic.g2_output_analytic(amps, m.kappa_R / m.kappa_L):.6e}, "
              f"g2_cavity_L = {analytic.g2_cavity_analytic(amps):.6e}")
        print(f"C20 - sqrt2 i C11 = {amps.pair_combination:.4e}")
    except analytic.AnalyticError as exc:
        print(exc)
    return 0


def cmd_check(args) -> int:
    from .acceptance import AcceptanceContext, run_all

    ctx = AcceptanceContext(spectrum_points=args.points, workers=args.workers)
    results = run_all(ctx)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "spectrum":
            return cmd_sweep(args, "detuning_Delta")
        if args.command == "rotation":
            return cmd_sweep(args, "rotation_freq")
        if args.command == "point":
            return cmd_point(args)
        return cmd_check(args)
    except ConfigError as exc:
        print(f"error: {exc.code}", file=sys.stderr)
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
