"""Command line front end.

    ridenuc solve-rsp INSTANCE [--capacity Q]
    ridenuc nucleolus SOURCE [--mode exact|approx|brute] [--capacity Q]
                             [--fixation safe|dual] [--reference FILE]
                             [--out PATH] [--format json|csv] [--timing]

Exit status: 0 success, 2 unreadable input, 3 problem too large,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import nucleolus, report
from .exceptions import NumericalError, ParseError, ScaleLimitError
from .instance import parse_char_table, parse_instance
from .rsp import solve_rsp

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SCALE = 3
EXIT_NUMERICAL = 4

_MODES = {"exact": nucleolus.EXACT, "approx": nucleolus.APPROXIMATE, "brute": nucleolus.BRUTE}
_FORMATS = {"json": report.JSON, "csv": report.CSV}


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def load_source(path, capacity=None):
    """An instance file, or a characteristic table when the file holds JSON."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        return parse_char_table(text)
    source = parse_instance(text)
    return source if capacity is None else source.with_capacity(capacity)


def load_reference(path, n):
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"reference is not valid JSON: {exc.msg}", exc.lineno) from None
    if isinstance(data, dict):
        data = data.get("allocation")
    if not isinstance(data, list) or not all(isinstance(v, (int, float)) for v in data):
        raise ParseError("reference must be a list of numbers or an object with 'allocation'")
    if len(data) != n:
        raise ParseError(f"reference has {len(data)} entries, the game has {n} players")
    return [float(v) for v in data]


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_solve_rsp(args):
    inst = parse_instance(_read(args.instance))
    if args.capacity is not None:
        inst = inst.with_capacity(args.capacity)
    plan = solve_rsp(inst)
    routes = [
        {
            "players": [p + 1 for p in range(inst.n) if r.players >> p & 1],
            "driver": r.driver + 1,
            "stops": r.node_labels(inst.n),
            "cost": float(r.cost),
        }
        for r in plan.routes
    ]
    data = {"digest": inst.digest(), "capacity": inst.capacity, "cost": float(plan.cost), "routes": routes}
    _write(json.dumps(data, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_nucleolus(args):
    source = load_source(args.source, args.capacity)
    game = nucleolus.as_game(source, args.capacity)
    reference = None if args.reference is None else load_reference(args.reference, game.n)
    start = time.perf_counter()
    result = nucleolus.run(game, _MODES[args.mode], fixation=args.fixation)
    elapsed = time.perf_counter() - start
    rep = report.RunReport.from_result(result, game.digest(), elapsed, reference)
    _write(report.emit(rep, _FORMATS[args.format], timing=args.timing), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="ridenuc", description="Ridesharing plans and nucleolus cost shares.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log master iterations to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-rsp", help="optimal ridesharing plan of an instance")
    p.add_argument("instance")
    p.add_argument("--capacity", type=int, help="override the vehicle capacity Q")
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(func=cmd_solve_rsp)

    p = sub.add_parser("nucleolus", help="nucleolus of an instance or characteristic table")
    p.add_argument("source", help="instance text file or characteristic-table JSON")
    p.add_argument("--mode", choices=sorted(_MODES), default="exact")
    p.add_argument("--capacity", type=int, help="override the vehicle capacity Q")
    p.add_argument("--fixation", choices=[nucleolus.SAFE, nucleolus.DUAL], default=nucleolus.SAFE)
    p.add_argument("--reference", help="allocation JSON for the solution-path series")
    p.add_argument("--out", help="write here instead of stdout")
    p.add_argument("--format", choices=sorted(_FORMATS), default="json")
    p.add_argument("--timing", action="store_true", help="include wall-clock duration in JSON output")
    p.set_defaults(func=cmd_nucleolus)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "capacity", None) is not None and args.capacity < 1:
        parser.error("--capacity must be at least 1")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScaleLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
