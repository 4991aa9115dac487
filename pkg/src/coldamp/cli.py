"""Command-line front end: budget, sweep, optimize, verify, dump-config.

Output contract: CSV with a fixed header and 12-significant-digit
scientific notation goes to --out (default stdout); the human-readable
summary goes to stderr so piping the CSV stays clean.  Exit codes are
0 success, 1 configuration error, 2 verification failure, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from importlib import resources

from . import __version__, budget, config, verify
from .network import NetworkSolveError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_NUMERICAL = 3

_CSV_COLUMNS = (
    "frequency_hz", "delta",
    "sigma_vfr", "sigma_vse", "sigma_cross", "sigma_ff",
    "langevin", "back_action", "sensing", "interference",
    "accel_sensitivity", "config_digest", "tool_version",
)


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _default_config_text() -> str:
    return resources.files("coldamp.data").joinpath("microscope.cfg").read_text()


def _load(args) -> config.RunConfig:
    if args.config is None:
        return config.loads(_default_config_text(), path="<builtin microscope.cfg>")
    return config.load(args.config)


def _csv_rows(points, cfg):
    yield ",".join(_CSV_COLUMNS)
    for pt in points:
        b = pt.breakdown
        fields = [
            _fmt(pt.omega / (2.0 * math.pi)), _fmt(pt.delta),
            _fmt(pt.sigma_vfr), _fmt(pt.sigma_vse), _fmt(pt.sigma_cross), _fmt(pt.sigma_ff),
            _fmt(b.langevin), _fmt(b.back_action), _fmt(b.sensing), _fmt(b.interference),
            _fmt(pt.accel_sensitivity), cfg.digest, __version__,
        ]
        yield ",".join(fields)


def _write_csv(points, cfg, out_path):
    text = "\n".join(_csv_rows(points, cfg)) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _geometric_grid(lo: float, hi: float, n: int) -> list[float]:
    if n < 1:
        raise config.ConfigError("points must be >= 1")
    if lo <= 0.0 or hi <= 0.0:
        raise config.ConfigError("frequency bounds must be positive")
    if n == 1:
        if lo != hi:
            raise config.ConfigError("points=1 requires equal bounds")
        return [lo]
    if lo >= hi:
        raise config.ConfigError("freq-min must be below freq-max")
    step = (hi / lo) ** (1.0 / (n - 1))
    return [lo * step**k for k in range(n)]


def cmd_budget(args) -> int:
    cfg = _load(args)
    if args.freq_min is None and args.freq_max is None:
        omegas = [cfg.omega]
    else:
        lo = args.freq_min if args.freq_min is not None else cfg.frequency
        hi = args.freq_max if args.freq_max is not None else cfg.frequency
        grid = _geometric_grid(lo, hi, args.points)
        omegas = [2.0 * math.pi * f for f in grid]
    points = [budget.budget_point(cfg.params, w) for w in omegas]
    _write_csv(points, cfg, args.out)
    head = points[0] if len(points) == 1 else min(points, key=lambda q: abs(q.omega - cfg.omega))
    print(
        f"coldamp budget ({cfg.digest}): at {head.omega / (2 * math.pi):.6g} Hz "
        f"force noise {head.sigma_ff:.4e} N^2/Hz, "
        f"sensitivity {head.accel_sensitivity:.4e} m s^-2/sqrt(Hz)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    grid = _geometric_grid(args.min, args.max, args.points)
    if args.axis == "frequency":
        points = budget.sweep(cfg.params, "frequency", [2.0 * math.pi * f for f in grid])
    else:
        points = budget.sweep(cfg.params, args.axis, grid, omega=cfg.omega)
    _write_csv(points, cfg, args.out)
    print(f"coldamp sweep ({cfg.digest}): {len(points)} points over {args.axis}",
          file=sys.stderr)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load(args)
    m = budget.optimal_matching(cfg.params, cfg.omega)
    ratio_num, sigma_num = budget.numerical_matching(cfg.params, cfg.omega)
    residual = max(
        abs(ratio_num - m.ratio_opt) / m.ratio_opt,
        abs(sigma_num - m.sigma_opt) / m.sigma_opt,
    )
    print(f"optimal R_a/R_m ratio : {_fmt(m.ratio_opt)}")
    print(f"minimum force noise   : {_fmt(m.sigma_opt)} N^2/Hz")
    print(f"  thermal part        : {_fmt(m.langevin_part)} N^2/Hz")
    print(f"  detection part      : {_fmt(m.detection_part)} N^2/Hz")
    print(f"numerical cross-check : {residual:.3e} relative")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    try:
        results = verify.run_checks(
            cfg.params, cfg.omega,
            draws=args.draws, seed=args.seed, tol=args.tol,
        )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for result in results:
        print(result)
    if all(r.passed for r in results):
        print("verification passed")
        return EXIT_OK
    print("verification FAILED", file=sys.stderr)
    return EXIT_VERIFY


def cmd_dump_config(args) -> int:
    cfg = _load(args)
    text = config.dumps(cfg)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coldamp",
        description="Noise budget of a cold-damped capacitive accelerometer.",
    )
    parser.add_argument("--version", action="version", version=f"coldamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="configuration file (default: built-in design point)")

    sp = sub.add_parser("budget", help="noise budget at one or more frequencies")
    common(sp)
    sp.add_argument("--freq-min", type=float, help="lowest frequency, Hz")
    sp.add_argument("--freq-max", type=float, help="highest frequency, Hz")
    sp.add_argument("--points", type=int, default=1, help="number of grid points")
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.set_defaults(func=cmd_budget)

    sp = sub.add_parser("sweep", help="budget sweep along one axis")
    common(sp)
    sp.add_argument("--axis", default="frequency",
                    help="'frequency' (Hz) or a parameter name such as R_a")
    sp.add_argument("--min", type=float, required=True)
    sp.add_argument("--max", type=float, required=True)
    sp.add_argument("--points", type=int, default=25)
    sp.add_argument("--out", help="CSV output path (default stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("optimize", help="amplifier/mechanical impedance matching")
    common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("verify", help="closed forms against the network oracle")
    common(sp)
    sp.add_argument("--tol", type=float, help="deviation tolerance override")
    sp.add_argument("--draws", type=int, default=40, help="random parameter draws")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("dump-config", help="canonical form of the configuration")
    common(sp)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.set_defaults(func=cmd_dump_config)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (config.ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NetworkSolveError as exc:
        print(f"numerical failure: {exc} (condition {exc.condition:.3e})", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
