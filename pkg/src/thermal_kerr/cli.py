"""Command-line entry point.

Exit codes: 0 success, 1 computation error, 2 usage error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import closed_form, sweeps, verify
from .model import (
    DegeneratePostselectionError,
    InteractionConfig,
    InternalConsistencyError,
    InvalidParameterError,
    NumericRangeError,
    ThermalPointer,
    Truncation,
)

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_output(p):
    p.add_argument("--out", metavar="FILE", help="write to FILE instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_phase(p, with_theta=True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi0", type=float, help="cross-phase per photon (radians)")
    g.add_argument("--phi0-2pi", type=float, dest="phi0_2pi", metavar="X", help="phi0 = 2*pi*X")
    if with_theta:
        p.add_argument("--theta", type=float, default=0.0, help="phase shifter angle (radians)")


def _add_trunc(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n-max", type=int, dest="n_max")
    g.add_argument("--tail-eps", type=float, dest="tail_eps")


def _add_grid(p, name):
    p.add_argument("--values", type=_floats, help=f"comma-separated {name} values")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermal-kerr", description="Postselected thermal-light cross-Kerr amplification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reproduce", help="P, n_bar_f and R at the three quoted temperatures")
    _add_output(p)

    p = sub.add_parser("prob", help="dark-port success probability")
    p.add_argument("--z", type=float, required=True)
    _add_phase(p)
    _add_output(p)

    p = sub.add_parser("pnd", help="photon-number distribution before and after postselection")
    p.add_argument("--z", type=float, required=True)
    _add_phase(p)
    _add_trunc(p)
    _add_output(p)

    p = sub.add_parser("mean", help="postselected mean photon number and amplification ratio")
    p.add_argument("--z", type=float, required=True)
    _add_phase(p)
    _add_output(p)

    p = sub.add_parser("wigner", help="Wigner function at a point or along an x slice")
    p.add_argument("--z", type=float, required=True)
    _add_phase(p)
    p.add_argument("--x", type=float)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--window", type=float)
    p.add_argument("--points", type=int, default=201)
    _add_output(p)

    p = sub.add_parser("sweep-z", help="P, n_bar_f and R over a z grid")
    _add_phase(p)
    _add_grid(p, "z")
    _add_output(p)

    p = sub.add_parser("sweep-theta", help="P, n_bar_f and R over a theta grid")
    p.add_argument("--z", type=float, required=True)
    _add_phase(p, with_theta=False)
    _add_grid(p, "theta")
    _add_output(p)

    p = sub.add_parser("verify", help="run the oracle cross-checks")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")
    return parser


def _phi0(args) -> float:
    return args.phi0 if args.phi0 is not None else 2.0 * math.pi * args.phi0_2pi


def _grid(args) -> list[float]:
    if args.values is not None:
        if any(v is not None for v in (args.start, args.stop, args.num)):
            raise UsageError("give either --values or --start/--stop/--num")
        return args.values
    if None in (args.start, args.stop, args.num) or args.num < 1:
        raise UsageError("give --values, or all of --start, --stop and --num >= 1")
    return list(np.linspace(args.start, args.stop, args.num))


def _trunc(args) -> Truncation | None:
    if args.n_max is None and args.tail_eps is None:
        return None
    return Truncation(n_max=args.n_max, tail_eps=args.tail_eps)


def _scalar(name: str, value: float, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({name: value}) + "\n"
    return repr(float(value)) + "\n"


def _execute(args) -> tuple[str, int]:
    cmd = args.command
    if cmd == "reproduce":
        return sweeps.reproduce_table().render(args.format), EXIT_OK
    if cmd == "verify":
        cfg = verify.VerifyConfig(samples=args.samples, seed=args.seed, workers=_workers())
        checks = verify.run_checks(cfg)
        code = EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY
        return verify.format_report(checks), code
    if cmd == "sweep-z":
        return sweeps.sweep_z(_phi0(args), args.theta, _grid(args)).render(args.format), EXIT_OK
    if cmd == "sweep-theta":
        return sweeps.sweep_theta(args.z, _phi0(args), _grid(args)).render(args.format), EXIT_OK

    pointer = ThermalPointer(args.z)
    cfg = InteractionConfig(_phi0(args), args.theta)
    if cmd == "prob":
        return _scalar("P", closed_form.postselect_probability(pointer, cfg), args.format), EXIT_OK
    if cmd == "mean":
        return sweeps.sweep_z(cfg.phi0, cfg.theta, [args.z]).render(args.format), EXIT_OK
    if cmd == "pnd":
        out = closed_form.final_distribution(pointer, cfg, _trunc(args))
        probs = out.distribution.probs
        thermal = closed_form.thermal_distribution(pointer, Truncation(n_max=probs.size - 1)).probs
        table = sweeps.SweepResult("n", range(probs.size), {"thermal": thermal, "postselected": probs})
        return table.render(args.format), EXIT_OK
    if cmd == "wigner":
        if args.window is not None:
            if args.x is not None:
                raise UsageError("give either --x or --window")
            table = sweeps.wigner_grid(args.z, cfg.phi0, cfg.theta, args.window, args.points, args.p)
            return table.render(args.format), EXIT_OK
        if args.x is None:
            raise UsageError("give --x (point) or --window (slice)")
        return _scalar("W", closed_form.wigner_closed(pointer, cfg, args.x, args.p), args.format), EXIT_OK
    raise UsageError(f"unknown command {cmd!r}")


def _workers() -> int:
    from .coherent_oracle import worker_count

    return worker_count()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, code = _execute(args)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (UsageError, InvalidParameterError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DegeneratePostselectionError, NumericRangeError, InternalConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
