"""Command-line interface.

Exit codes: 0 success, 1 reported counterexample or false verdict, 2 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from . import diagonal, io, registry, scott
from .errors import FraisseError
from .age import DEFAULT_AMALGAM_BUDGET, check_age_axioms
from .fraisse import DEFAULT_CAP, new_builder
from .notations import compare_O, fundamental_element, ordinal_value, parse_notation
from .structures import PartialMap
from .tower import I

OK, FALSE, ERROR = 0, 1, 2


@dataclass(frozen=True)
class Config:
    budget: int = DEFAULT_AMALGAM_BUDGET
    horizon: int = 3
    cap: int = DEFAULT_CAP
    schedule: int = 0
    out: Optional[str] = None
    dot: Optional[str] = None
    verbose: int = 0

    def __post_init__(self):
        for name in ("budget", "horizon", "cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name} must be positive")


def _config(args) -> Config:
    return Config(budget=args.budget, horizon=args.horizon, cap=args.cap,
                  schedule=args.schedule, out=getattr(args, "out", None),
                  dot=getattr(args, "dot", None), verbose=args.verbose)


def _emit(payload, cfg: Config) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_dot(S, cfg: Config, name: str) -> None:
    if cfg.dot:
        with open(cfg.dot, "w") as fh:
            fh.write(io.to_dot(S, name))


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _parse_map(text: str) -> PartialMap:
    pairs = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        x, y = item.split(":")
        pairs.append((int(x), int(y)))
    return PartialMap(pairs)


# -- handlers ----------------------------------------------------------------------


def cmd_age_check(args, cfg: Config) -> int:
    K = registry.get_age(args.age)
    report = check_age_axioms(K, args.size_bound, args.index_bound, budget=cfg.budget)
    for line in report.lines():
        sys.stdout.write(json.dumps(line, sort_keys=True) + "\n")
    return OK if report.ok else FALSE


def _grown(tag: str, steps: int, cfg: Config):
    level = registry.level_for(tag)
    if level is not None:
        b = level.new_builder(cfg.schedule, cap=cfg.cap)
    else:
        b = new_builder(registry.get_age(tag), cfg.schedule, cap=cfg.cap)
    b.grow(steps)
    return b


def cmd_limit_build(args, cfg: Config) -> int:
    b = _grown(args.age, args.steps, cfg)
    S = b.current
    _emit({"age": args.age, "steps": b.step, "schedule": cfg.schedule, "size": len(S),
           "failed_tasks": len(b.failures), "fairness_violations": len(b.fairness_violations()),
           "stage": io.encode(S)}, cfg)
    _emit_dot(S, cfg, args.age)
    return OK


def cmd_limit_homog(args, cfg: Config) -> int:
    b = _grown(args.age, args.steps, cfg)
    f = _parse_map(args.map)
    verdict = b.is_partial_iso(f)
    payload = {"age": args.age, "steps": b.step, "map": str(f), "partial_iso": verdict}
    if verdict and args.extend is not None:
        payload["extended"] = str(b.extend_iso(f, args.extend, args.side))
    _emit(payload, cfg)
    return OK if verdict else FALSE


def cmd_tower_build(args, cfg: Config) -> int:
    a = parse_notation(args.notation)
    level = I(a, cfg.horizon)
    b = level.new_builder(cfg.schedule, cap=cfg.cap)
    b.grow(args.steps)
    bad = level.validate(b.current)
    _emit({"notation": str(a), "horizon": cfg.horizon, "steps": b.step,
           "schedule": cfg.schedule, "size": len(b.current), "violations": bad,
           "stage": io.encode(b.current)}, cfg)
    _emit_dot(b.current, cfg, str(a))
    return FALSE if bad else OK


def cmd_tower_validate(args, cfg: Config) -> int:
    spec = _read_json(args.level)
    level = I(parse_notation(spec["notation"]), int(spec.get("horizon", cfg.horizon)))
    data = _read_json(args.structure)
    S = io.decode(data.get("stage", data), level.vocabulary)
    bad = level.validate(S)
    _emit({"notation": str(level.notation), "valid": not bad, "violations": bad}, cfg)
    return FALSE if bad else OK


def cmd_scott_check(args, cfg: Config) -> int:
    A = io.decode(_read_json(args.base))
    B = io.decode(_read_json(args.candidate), A.vocabulary)
    schema = scott.build_schema(A, args.bound)
    result = scott.check_expansion(schema, B)
    witness = {k: sorted(list(t) for t in v) for k, v in sorted(result.expansion.items())}
    _emit({"expandable": result.ok, "failing": result.failing, "witness": witness}, cfg)
    return OK if result.ok else FALSE


def cmd_diagonal_run(args, cfg: Config) -> int:
    trace = diagonal.EnumerationTrace.from_json(_read_json(args.trace))
    out = diagonal.run(trace, args.requirements, args.stages)
    rows = [{"e": r.e, "i": r.i, "in_trace": r.in_trace, "is_embedding": r.is_embedding,
             "fired_at": r.fired_at, "C_i": io.encode(r.C_i), "C_next": io.encode(r.C_next)}
            for r in out.report]
    ok = diagonal.verify(out.report)
    _emit({"requirements": rows, "verified": ok}, cfg)
    return OK if ok else FALSE


def cmd_notation(args, cfg: Config) -> int:
    a = parse_notation(args.a)
    payload = {"notation": str(a), "value": str(ordinal_value(a)),
               "kind": "one" if a.is_one else "successor" if a.is_succ else "limit"}
    if args.compare:
        payload["compare"] = compare_O(a, parse_notation(args.compare), cfg.horizon)
    if args.term is not None:
        payload["term"] = str(fundamental_element(a, args.term))
    _emit(payload, cfg)
    return OK


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_AMALGAM_BUDGET,
                        help="amalgam search budget")
    common.add_argument("--horizon", type=int, default=3, help="tower horizon for limit levels")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="saturation subset size")
    common.add_argument("--schedule", type=int, default=0, help="schedule token")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="fraisse-tower", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    age = sub.add_parser("age").add_subparsers(dest="action", required=True)
    q = age.add_parser("check", parents=[common])
    q.add_argument("--age", required=True)
    q.add_argument("--size-bound", type=int, default=3)
    q.add_argument("--index-bound", type=int, default=20)
    q.set_defaults(fn=cmd_age_check)

    lim = sub.add_parser("limit").add_subparsers(dest="action", required=True)
    q = lim.add_parser("build", parents=[common])
    q.add_argument("--age", required=True)
    q.add_argument("--steps", type=int, default=100)
    q.add_argument("--out")
    q.add_argument("--dot")
    q.set_defaults(fn=cmd_limit_build)
    q = lim.add_parser("homog", parents=[common])
    q.add_argument("--age", required=True)
    q.add_argument("--steps", type=int, default=100)
    q.add_argument("--map", required=True, help='partial map such as "0:3,1:5"')
    q.add_argument("--extend", type=int, help="point to add to the map")
    q.add_argument("--side", choices=("domain", "range"), default="domain")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_limit_homog)

    tower = sub.add_parser("tower").add_subparsers(dest="action", required=True)
    q = tower.add_parser("build", parents=[common])
    q.add_argument("--notation", required=True)
    q.add_argument("--steps", type=int, default=100)
    q.add_argument("--out")
    q.add_argument("--dot")
    q.set_defaults(fn=cmd_tower_build)
    q = tower.add_parser("validate", parents=[common])
    q.add_argument("--level", required=True)
    q.add_argument("--structure", required=True)
    q.set_defaults(fn=cmd_tower_validate)

    sc = sub.add_parser("scott").add_subparsers(dest="action", required=True)
    q = sc.add_parser("check", parents=[common])
    q.add_argument("--base", required=True)
    q.add_argument("--candidate", required=True)
    q.add_argument("--bound", type=int, help="tuple length bound (default: size of the base)")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_scott_check)

    dg = sub.add_parser("diagonal").add_subparsers(dest="action", required=True)
    q = dg.add_parser("run", parents=[common])
    q.add_argument("--trace", required=True)
    q.add_argument("--requirements", type=int, default=1)
    q.add_argument("--stages", type=int, default=10)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_diagonal_run)

    q = sub.add_parser("notation", parents=[common])
    q.add_argument("a", help='notation such as "s(s(1))" or "lim(omega)"')
    q.add_argument("--compare", help="second notation to compare with")
    q.add_argument("--term", type=int, help="fundamental sequence term of a limit")
    q.set_defaults(fn=cmd_notation)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args, _config(args))
    except (FraisseError, KeyError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
