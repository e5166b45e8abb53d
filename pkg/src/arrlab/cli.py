"""Command-line front end: ``arrlab <group> <verb> ...``.

Exit codes: 0 success (or theorem applies / partition found), 2 a negative or
best-effort outcome, 1 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .arrangements import blow_up, diagonal_action, load_arrangement
from .errors import ArrlabError, BadParam, BestEffort
from .exact import FieldDescriptor
from .fans import MeasureCloud, SolverConfig, load_fan, solve, verify
from .hypotheses import THEOREM_APPLIES, TheoremInput, check_hypotheses
from .instances import BUILDERS
from .poset import gm_betti, hasse_dot, intersection_poset
from .ration import Ration

DEFAULT_SEED = 20240601


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _dump(obj, out=None):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _field(text):
    try:
        return FieldDescriptor.parse(text)
    except ArrlabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ration(text):
    try:
        return Ration.parse(text)
    except ArrlabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _arr_betti(args):
    A, _ = load_arrangement(args.file)
    _dump(gm_betti(A, args.field).to_json())
    return 0


def _arr_poset(args):
    A, _ = load_arrangement(args.file)
    P = intersection_poset(A)
    dot = hasse_dot(P)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(dot)
        _dump({"elements": len(P), "covers": len(P.covers), "dot": args.dot})
    else:
        sys.stdout.write(dot)
    return 0


def _arr_blowup(args):
    A, G = load_arrangement(args.file)
    res = blow_up(A, args.choice, group=G if args.choice == "equivariant" else None)
    group = diagonal_action(G, res) if not G.is_trivial() else None
    _dump(res.to_json(group), args.out)
    return 0


def _arr_check(args):
    A, G = load_arrangement(args.file)
    report = check_hypotheses(TheoremInput(A, G, args.field, args.connectivity, args.reduce))
    _dump(report.to_json())
    return 0 if report.overall == THEOREM_APPLIES else 2


def _instances_emit(args):
    kw = {}
    if args.n is not None:
        kw["n"] = args.n
    if args.j is not None:
        kw["j"] = args.j
    if args.name in ("straight_cut_test", "fan_test"):
        ration = args.ration
        if ration is None:
            if args.n is None or args.k is None:
                raise BadParam(f"{args.name} needs --ration or both --n and --k")
            if args.n % (2 * args.k):
                raise BadParam("--n must be divisible by 2k for the equal ration")
            ration = Ration((args.n // (2 * args.k),) * (2 * args.k))
        elif args.n is not None and args.n != ration.n:
            raise BadParam(f"--n {args.n} disagrees with the ration total {ration.n}")
        kw["ration"] = ration
    inst = BUILDERS[args.name](**kw)
    _dump(inst.to_json(), args.out)
    return 0


def _load_measures(paths):
    if not paths:
        raise BadParam("at least one --measure is required")
    return [MeasureCloud.from_csv(p) for p in paths]


def _fan_solve(args):
    measures = _load_measures(args.measure)
    cfg = SolverConfig(
        seed=args.seed,
        restarts=args.restarts,
        tol=args.tol,
        angle_tol=args.angle_tol,
        max_evals=args.max_evals,
        designated=args.designated,
    )
    if args.sigmas:
        cfg.sigmas = tuple(float(s) for s in args.sigmas.split(","))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            fan, report = solve(args.kind, measures, args.ration, cfg)
            code = 0
        except BestEffort as exc:
            fan, report, code = exc.fan, exc.report, 2
            print(f"best effort: {exc}", file=sys.stderr)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = {"fan": fan.to_json() if fan else None, "report": report.to_json() if report else None}
    if args.out and fan is not None:
        _dump(fan.to_json(), args.out)
    _dump(out)
    return code


def _fan_verify(args):
    measures = _load_measures(args.measure)
    fan = load_fan(args.fan)
    report = verify(fan, measures, args.ration, args.tol, args.kind, args.angle_tol)
    _dump(report.to_json())
    return 0 if report.passed else 2


def build_parser():
    p = _Parser(prog="arrlab", description="Subspace arrangements, hypothesis checks and fan partitions.")
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    arr = top.add_parser("arr", help="arrangement computations").add_subparsers(dest="verb", required=True)
    b = arr.add_parser("betti", help="Betti numbers of the complement")
    b.add_argument("file")
    b.add_argument("--field", type=_field, default=FieldDescriptor.parse("q"))
    b.set_defaults(func=_arr_betti)

    ps = arr.add_parser("poset", help="intersection poset as a DOT Hasse diagram")
    ps.add_argument("file")
    ps.add_argument("--dot")
    ps.set_defaults(func=_arr_poset)

    bu = arr.add_parser("blowup", help="blow-up of the arrangement")
    bu.add_argument("file")
    bu.add_argument("--choice", choices=["auto", "equivariant"], default="auto")
    bu.add_argument("--out")
    bu.set_defaults(func=_arr_blowup)

    ch = arr.add_parser("check", help="check the theorem hypotheses")
    ch.add_argument("file")
    ch.add_argument("--field", type=_field, default=FieldDescriptor.parse("f:2"))
    ch.add_argument("--connectivity", type=int, required=True)
    ch.add_argument("--reduce", action="store_true", help="restrict to maximal members of minimal codimension")
    ch.set_defaults(func=_arr_check)

    inst = top.add_parser("instances", help="built-in arrangements").add_subparsers(dest="verb", required=True)
    em = inst.add_parser("emit", help="write a built-in arrangement as JSON")
    em.add_argument("name", choices=sorted(BUILDERS))
    em.add_argument("--n", type=int)
    em.add_argument("--k", type=int)
    em.add_argument("--j", type=int)
    em.add_argument("--ration", type=_ration)
    em.add_argument("--out")
    em.set_defaults(func=_instances_emit)

    fan = top.add_parser("fan", help="fan partitions of point clouds").add_subparsers(dest="verb", required=True)
    so = fan.add_parser("solve", help="search for an alpha-partition")
    so.add_argument("--kind", choices=["fan", "arrangement"], default="fan")
    so.add_argument("--ration", type=_ration, required=True)
    so.add_argument("--measure", action="append", default=[])
    so.add_argument("--seed", type=int, default=DEFAULT_SEED)
    so.add_argument("--restarts", type=int, default=64)
    so.add_argument("--tol", type=float, default=1e-3)
    so.add_argument("--angle-tol", type=float)
    so.add_argument("--max-evals", type=int, default=200_000)
    so.add_argument("--sigmas", help="comma-separated smoothing schedule")
    so.add_argument("--designated", type=int, default=0, help="0-based index of the equiparted measure")
    so.add_argument("--out")
    so.set_defaults(func=_fan_solve)

    ve = fan.add_parser("verify", help="check a fan against measures")
    ve.add_argument("--fan", required=True)
    ve.add_argument("--kind", choices=["fan", "arrangement"], default="fan")
    ve.add_argument("--ration", type=_ration, required=True)
    ve.add_argument("--measure", action="append", default=[])
    ve.add_argument("--tol", type=float, default=1e-3)
    ve.add_argument("--angle-tol", type=float)
    ve.set_defaults(func=_fan_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ArrlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
