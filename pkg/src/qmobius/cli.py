"""``qmobius`` command line: verification suites and thin JSON adapters.

Exit codes: 0 when every case passes, 1 when a verification case fails,
2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import classical as cl
from . import diffgeo as dg
from . import regular as rg
from .errors import QMobiusError
from .groups import MatH2, Sp11Element
from .quaternion import Quaternion
from .series import CullenProbe
from .verify import DEFAULT_TOLERANCES, SUITES, SuiteConfig, run_suites

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _quat(text: str) -> Quaternion:
    try:
        return Quaternion.from_json(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected a JSON quaternion [w,x,y,z], got {text!r}") from exc


def _tol_pair(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value is not a number: {value!r}") from None


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from None


def _load_matrix(path: str) -> Sp11Element:
    return Sp11Element.wrap(MatH2.from_json(_load_json(path)))


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=None, sort_keys=False)
    sys.stdout.write("\n")


# -- verify ---------------------------------------------------------------------

def _env_seed() -> int | None:
    raw = os.environ.get("QMOB_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QMOB_SEED must be an integer, got {raw!r}") from None


def build_config(args) -> SuiteConfig:
    """Defaults, then QMOB_SEED, then the config file, then flags."""
    fields: dict = {}
    env_seed = _env_seed()
    if env_seed is not None:
        fields["seed"] = env_seed
    if args.config:
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(data) - {"seed", "trials", "series_order", "tolerances", "suites"}
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
        fields.update(data)
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.trials is not None:
        fields["trials"] = args.trials
    if args.series_order is not None:
        fields["series_order"] = args.series_order
    if args.suites:
        fields["suites"] = args.suites
    if args.tol:
        fields["tolerances"] = {**fields.get("tolerances", {}), **dict(args.tol)}
    try:
        for key in ("seed", "trials", "series_order"):
            if key in fields and (isinstance(fields[key], bool) or not isinstance(fields[key], int)):
                raise InputError(f"{key} must be an integer")
        if not isinstance(fields.get("tolerances", {}), dict):
            raise InputError("tolerances must be a JSON object")
        if "suites" in fields:
            fields["suites"] = tuple(fields["suites"])
        return SuiteConfig(**fields)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def cmd_verify(args) -> int:
    report = run_suites(build_config(args))
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    print(f"{report['passed']}/{report['executed']} cases passed", file=sys.stderr)
    return EXIT_OK if report["failed"] == 0 else EXIT_FAIL


# -- adapters -------------------------------------------------------------------

def cmd_eval(args) -> int:
    if args.q is None:
        raise InputError("--q is required")
    if args.classical:
        if not args.matrix:
            raise InputError("--classical needs --matrix FILE")
        value = cl.classical_eval(cl.ClassicalMoebius(_load_matrix(args.matrix)), args.q)
    else:
        if args.matrix:
            F = rg.regular_of_matrix(_load_matrix(args.matrix))
        else:
            if args.a is None or args.u is None:
                raise InputError("--regular needs --a and --u, or --matrix FILE")
            F = rg.from_params(args.a, args.u)
        if args.mode == "series":
            value = rg.eval_series(F, args.q, args.order)
        else:
            value = rg.eval_closed(F, args.q)
    _emit({"value": value.to_json()})
    return EXIT_OK


def cmd_canonical(args) -> int:
    F, defect = rg.canonical_pair(_load_matrix(args.matrix))
    _emit({"a": F.a.to_json(), "u": F.u.to_json(), "consistency_defect": defect})
    return EXIT_OK


def cmd_jacobian(args) -> int:
    a0, u0 = args.a, args.u
    worst = max(dg.fd_relative_deviation(a0, u0, t, args.h) for t in dg.canonical_tangents(u0))
    _emit({
        "fd_vs_closed_rel": worst,
        "rank_image": dg.image_rank(a0, u0),
        "rank_total": dg.transversality_rank(a0, u0),
    })
    return EXIT_OK


def cmd_counterexample(args) -> int:
    probe = CullenProbe(args.I, args.x, args.y, args.h)
    res = rg.composition_counterexample(args.a, args.u, probe, args.order)
    _emit({"coeffs": res.coeffs.to_json(), "residual": res.residual})
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qmobius", description="Quaternionic Moebius transformations: checks and evaluators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the property suites and print a JSON report")
    v.add_argument("--config", help="JSON file with seed, trials, series_order, tolerances, suites")
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--series-order", type=int, dest="series_order")
    v.add_argument("--suite", action="append", dest="suites", choices=SUITES,
                   help="restrict to a suite; repeatable")
    v.add_argument("--tol", action="append", type=_tol_pair, metavar="NAME=VALUE",
                   help=f"override a tolerance; known names: {', '.join(sorted(DEFAULT_TOLERANCES))}")
    v.add_argument("--output", "-o", help="write the report here instead of stdout")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a classical or regular transformation at q")
    kind = e.add_mutually_exclusive_group(required=True)
    kind.add_argument("--classical", action="store_true")
    kind.add_argument("--regular", action="store_true")
    e.add_argument("--a", type=_quat)
    e.add_argument("--u", type=_quat)
    e.add_argument("--q", type=_quat)
    e.add_argument("--matrix", help="Sp(1,1) matrix JSON file")
    e.add_argument("--mode", choices=("closed", "series"), default="closed")
    e.add_argument("--order", type=int, default=80)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("canonical", help="canonical pair (a, u) of the projection of a matrix")
    c.add_argument("--matrix", required=True)
    c.set_defaults(func=cmd_canonical)

    j = sub.add_parser("jacobian", help="differential of the lift: FD check and ranks")
    j.add_argument("--a", type=_quat, required=True)
    j.add_argument("--u", type=_quat, required=True)
    j.add_argument("--h", type=float, default=1e-5)
    j.set_defaults(func=cmd_jacobian)

    x = sub.add_parser("counterexample", help="Cullen residual of a composition leaving the family")
    x.add_argument("--a", type=float, default=0.5)
    x.add_argument("--u", type=_quat, default=Quaternion(0.0, 1.0, 0.0, 0.0))
    x.add_argument("--I", type=_quat, default=Quaternion(0.0, 0.0, 1.0, 0.0), dest="I")
    x.add_argument("--x", type=float, default=0.2)
    x.add_argument("--y", type=float, default=0.2)
    x.add_argument("--h", type=float, default=1e-3)
    x.add_argument("--order", type=int, default=80)
    x.set_defaults(func=cmd_counterexample)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, QMobiusError, ValueError, ZeroDivisionError) as exc:
        print(f"qmobius {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
