"""Command-line front end: ``kpsato <group> <command> ...``.

Exit status is 0 when every check holds, 1 when a mathematical check fails and
2 for unusable input (bad syntax, bad options, out-of-domain objects).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass, fields
from typing import Any

from . import sampling
from .errors import (ConfigurationError, DerivationError, KpsatoError, NonUnitError,
                     NotFredholmError, ParseError, TruncationBudgetError)
from .report import SCHEMA, Report

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    trunc_x: int = 8
    trunc_d: int = 8
    trunc_z: int = 12
    trunc_u: int = 12
    trunc_t: int = 12
    window: int = 20
    output_mode: str = "human"
    seed: int = 0

    def validate(self) -> "RunConfig":
        for f in ("trunc_x", "trunc_d", "trunc_z", "trunc_u", "trunc_t", "window"):
            if getattr(self, f) < 2:
                raise ConfigurationError(f"{f} must be at least 2")
        if self.output_mode not in ("human", "serialized"):
            raise ConfigurationError("output mode must be 'human' or 'serialized'")
        return self


def load_config(path: str | None, overrides: dict[str, Any]) -> RunConfig:
    data: dict[str, Any] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys {unknown}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**data).validate()


class UsageError(Exception):
    pass


# Commands.  Each returns a Report; ``Report.ok`` decides the exit status.


def _op(text: str, cfg: RunConfig):
    from .psido import parse_operator

    return parse_operator(text, depth=cfg.trunc_d, x_order=cfg.trunc_x)


def cmd_pdo(args, cfg: RunConfig) -> Report:
    ops = [_op(t, cfg) for t in args.operators]
    action = args.action
    rep = Report(f"pdo {action}")
    if action == "mul":
        if len(ops) < 2:
            raise UsageError("mul needs at least two operators")
        value = ops[0]
        for o in ops[1:]:
            value = value.compose(o)
        rep.add("product", value)
        rep.data["value"] = str(value)
    elif action == "comm":
        if len(ops) != 2:
            raise UsageError("comm needs exactly two operators")
        value = ops[0].commutator(ops[1])
        rep.add("commutator", value)
        rep.data["value"] = str(value)
    elif action == "split":
        _one(ops, action)
        rep.add("plus", ops[0].plus())
        rep.add("minus", ops[0].minus())
    elif action == "pow":
        _one(ops, action)
        value = ops[0].power(args.n)
        rep.add(f"power {args.n}", value)
        rep.data["value"] = str(value)
    elif action == "inv":
        _one(ops, action)
        inv = ops[0].inverse()
        rep.add("inverse", inv)
        check = ops[0].compose(inv)
        rep.add("P * inverse", check, ok=check == check.identity(check.ring, check.depth))
    return rep


def _one(ops, action):
    if len(ops) != 1:
        raise UsageError(f"{action} takes exactly one operator")


def cmd_sato(args, cfg: RunConfig) -> Report:
    from .grassmann import check_dressing, dress, parse_point, verify_first_order_flows
    from .parsing import parse_laurent
    from .psido import sato_image, sato_lift

    rep = Report(f"sato {args.action}")
    if args.action == "image":
        value = sato_image(_op(_arg(args), cfg))
        rep.add("image", value)
        rep.data["value"] = str(value)
    elif args.action == "lift":
        value = sato_lift(parse_laurent(_arg(args), cfg.trunc_z), x_order=cfg.trunc_x)
        rep.add("lift", value)
        rep.data["value"] = str(value)
    elif args.action == "dress":
        W = parse_point(_arg(args), cfg.trunc_z)
        S = dress(W, cfg.trunc_d)
        rep.add("S", S)
        bad = check_dressing(W, S, cfg.trunc_d)
        rep.add("S w_n in W0", "yes" if not bad else f"no, first failure at n = {bad[0][0]}", ok=not bad)
    elif args.action == "verify-thm1":
        rng = random.Random(cfg.seed)
        S = sampling.dressing_operator(rng, cfg.trunc_d, cfg.trunc_x + 2)
        A = sampling.operator(rng, -1, cfg.trunc_d, cfg.trunc_x + 2, terms=3)
        rep.add("S", S)
        rep.add("A", A)
        sub = verify_first_order_flows(S, A, args.n)
        rep.steps += sub.steps
        rep.ok = sub.ok
    return rep


def _arg(args) -> str:
    if not args.operand:
        raise UsageError(f"{args.action} needs an argument")
    return " ".join(args.operand)


def cmd_kp(args, cfg: RunConfig) -> Report:
    from .kp import LaxOperator, derive_kdv, derive_kp, evolution_equations, flow_jet, kp_field
    from .parsing import parse_series

    depth = args.depth or max(4, args.n + 2)
    if args.action == "field":
        return Report(f"KP_{args.n} at Lax depth {depth}").add("field", kp_field(LaxOperator.symbolic(depth), args.n))
    if args.action == "eqs":
        rep = Report(f"t{args.n} flow at Lax depth {depth}")
        for eq in evolution_equations(LaxOperator.symbolic(depth), args.n, args.count):
            rep.add(str(eq.lhs), eq)
        return rep
    if args.action == "derive-kp":
        return derive_kp(depth)
    if args.action == "derive-kdv":
        rep = derive_kdv(depth)
        rep.data.pop("evolution", None)
        return rep
    if args.action == "flow-jet":
        coeffs = [parse_series(s, cfg.trunc_x) for s in (args.u or ["x", "0", "0", "0", "0", "0"])]
        L0 = LaxOperator.from_series(coeffs)
        jet = flow_jet(L0, args.n, args.order)
        rep = Report(f"t{args.n} jet of order {args.order} through L = {L0}")
        for j, row in enumerate(jet.coefficients):
            for m, c in sorted(row.items()):
                rep.add(f"[t^{j}] u{m}", c)
        return rep
    raise UsageError(args.action)


def cmd_gr(args, cfg: RunConfig) -> Report:
    from .grassmann import check_stabilization, det_line, parse_point

    W = parse_point(" ".join(args.subspace), cfg.trunc_z)
    rep = Report(f"gr {args.action} for {W}")
    if args.action == "index":
        kernel, coker = W.kernel_cokernel()
        rep.add("kernel", ", ".join(k.format(with_order=False) for k in kernel) or "0")
        rep.add("cokernel exponents", coker or "none")
        rep.add("index", W.index())
        rep.data.update({"index": W.index(), "kernel": [str(k) for k in kernel], "cokernel": coker})
    elif args.action == "bigcell":
        member = W.in_big_cell()
        rep.add("in big cell", member)
        if member:
            for n, w in enumerate(W.normalized_basis(3)):
                rep.add(f"w_{n}", w)
        rep.data["big_cell"] = member
    elif args.action == "detline":
        level = args.level if args.level is not None else W._window_depth()
        line = det_line(W, level)
        rep.add("level", level)
        rep.add("basis", ", ".join(v.format(with_order=False) for v in line.vectors))
        coords = line.coordinates()
        rep.add("Plucker coordinates", f"{len(coords)} nonzero")
        if args.check:
            sub = check_stabilization(W, level)
            rep.steps += sub.steps
            rep.ok = sub.ok
    return rep


def _curve(args, cfg: RunConfig):
    from .krichever import curve_from_json, example

    order = max(64, 2 * cfg.window + 4)
    if args.data:
        with open(args.data, encoding="utf-8") as fh:
            return curve_from_json(fh.read(), order)
    if not args.name:
        raise UsageError("give a curve name or --data FILE")
    return example(args.name, order)


def cmd_kr1(args, cfg: RunConfig) -> Report:
    from .krichever import EXAMPLES, check_curve, cohomology, verify_ring_closure

    if args.action == "example" and not args.name and not args.data:
        rep = Report("built-in curves")
        for name in EXAMPLES:
            rep.add(name, EXAMPLES[name]().description)
        return rep
    c = _curve(args, cfg)
    if args.action == "verify":
        return verify_ring_closure(c, cfg.window)
    if args.action == "cohomology":
        rep = Report(f"cohomology for {c.name}")
        hA, hW = cohomology(c.A), cohomology(c.W)
        rep.add("(h0, h1) of A", hA, ok=hA == (1, c.genus))
        rep.add("(h0, h1) of W", hW)
        rep.data.update({"h_A": list(hA), "h_W": list(hW)})
        return rep
    if args.check == "all":
        return check_curve(c, cfg.window)
    rep = Report(f"curve {c.name}")
    rep.add("description", c.description)
    rep.add("A basis", ", ".join(e.format(with_order=False) for e in c.a_basis(6)) + ", ...")
    rep.add("W basis", ", ".join(e.format(with_order=False) for e in c.w_basis(6)) + ", ...")
    return rep


def _levels(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise ParseError("bad level range", text, 0, "LO..HI") from None


def cmd_lf2(args, cfg: RunConfig) -> Report:
    from .localfield import (check_intersections, check_graded_indices, graded_index, parse_two_var,
                             region_for)

    if args.action == "member":
        if not args.ring or not args.monomial:
            raise UsageError("member needs --ring and --monomial")
        region = region_for(args.ring)
        value = parse_two_var(args.monomial, (cfg.trunc_u, cfg.trunc_t))
        inside = value.in_region(region)
        rep = Report(f"membership in {args.ring}")
        rep.add(str(value), inside)
        rep.data["member"] = inside
        return rep
    if args.action == "check-prop4":
        return check_intersections(args.window or cfg.window)
    if args.action == "graded-index":
        levels = _levels(args.levels)
        ring = args.ring or "B_C"
        if ring == "B_C":
            return check_graded_indices(levels=levels, ring=ring)
        rep = Report(f"graded indices of {ring}")
        for n in levels:
            rep.add(f"level {n}", graded_index(region_for(ring), n))
        return rep
    raise UsageError(args.action)


def cmd_suite(args, cfg: RunConfig) -> Report:
    from .acceptance import run_all

    rep = Report(f"acceptance suite, seed {cfg.seed}")
    results = run_all(cfg.seed)
    for c in results:
        rep.add(f"{c.number:2d}", c.line() if cfg.output_mode == "human" else c.title, ok=c.ok)
    rep.data["criteria"] = [{k: v for k, v in c.to_dict().items() if k != "seconds"} for c in results]
    return rep


# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("human", "serialized"), dest="output_mode",
                        default=argparse.SUPPRESS,
                        help="human-readable text or a JSON document")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized runs")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with default settings")
    for name, text in (("x", "x-adic precision of coefficients"), ("d", "depth in d^-1"),
                       ("z", "precision in z"), ("u", "precision in u"), ("t", "precision in t")):
        common.add_argument(f"--trunc-{name}", type=int, dest=f"trunc_{name}",
                            default=argparse.SUPPRESS, help=text)

    parser = argparse.ArgumentParser(prog="kpsato", parents=[common],
                                     description="KP hierarchy, Sato Grassmannian and related checks")
    sub = parser.add_subparsers(dest="group", required=True)

    p = sub.add_parser("pdo", parents=[common], help="pseudo-differential operator arithmetic")
    p.add_argument("action", choices=("mul", "comm", "split", "pow", "inv"))
    p.add_argument("operators", nargs="+")
    p.add_argument("--n", type=int, default=2, help="exponent for pow")
    p.set_defaults(func=cmd_pdo)

    p = sub.add_parser("sato", parents=[common], help="Sato map, dressing and first-order checks")
    p.add_argument("action", choices=("image", "lift", "dress", "verify-thm1"))
    p.add_argument("operand", nargs="*")
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(func=cmd_sato)

    p = sub.add_parser("kp", parents=[common], help="KP flows and derivations")
    p.add_argument("action", choices=("field", "eqs", "derive-kp", "derive-kdv", "flow-jet"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--depth", type=int, default=None, help="Lax operator depth")
    p.add_argument("--count", type=int, default=None, help="number of equations")
    p.add_argument("--order", type=int, default=2, help="jet order")
    p.add_argument("--u", action="append", help="coefficient series u_m (repeat in order)")
    p.set_defaults(func=cmd_kp)

    p = sub.add_parser("gr", parents=[common], help="points of the Sato Grassmannian")
    p.add_argument("action", choices=("index", "bigcell", "detline"))
    p.add_argument("subspace", nargs="+", help="e.g. 'span{1 + z} tail at -1 (mod z^10)'")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--check", action="store_true", help="also check stabilization")
    p.set_defaults(func=cmd_gr)

    p = sub.add_parser("kr1", parents=[common], help="curve data in k((z))")
    p.add_argument("action", choices=("verify", "cohomology", "example"))
    p.add_argument("name", nargs="?")
    p.add_argument("--data", help="JSON curve description")
    p.add_argument("--check", choices=("all",), default=None)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(func=cmd_kr1)

    p = sub.add_parser("lf2", parents=[common], help="the two-dimensional local field example")
    p.add_argument("action", choices=("member", "check-prop4", "graded-index"))
    p.add_argument("--ring")
    p.add_argument("--monomial")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--levels", default="-5..5")
    p.set_defaults(func=cmd_lf2)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance criteria")
    p.set_defaults(func=cmd_suite)
    return parser


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def emit(rep: Report, cfg: RunConfig, argv: list[str], out) -> None:
    if cfg.output_mode == "serialized":
        doc = {"schema": SCHEMA, "command": argv, "config": asdict(cfg),
               "report": _jsonable(rep.to_dict())}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    elif "value" in rep.data:
        out.write(rep.data["value"] + "\n")
    else:
        out.write(rep.to_text() + "\n")


def _error(cfg_mode: str, kind: str, message: str, argv, out, err) -> None:
    if cfg_mode == "serialized":
        doc = {"schema": SCHEMA, "command": argv, "error": {"kind": kind, "message": message}}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        err.write(f"error: {message}\n")


def _join_ranges(argv: list[str]) -> list[str]:
    # "--levels -5..5" would otherwise be read as an unknown option
    joined = []
    i = 0
    while i < len(argv):
        if argv[i] == "--levels" and i + 1 < len(argv):
            joined.append(f"--levels={argv[i + 1]}")
            i += 2
        else:
            joined.append(argv[i])
            i += 1
    return joined


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = _join_ranges(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage problems itself
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    mode = getattr(args, "output_mode", "human")
    try:
        overrides = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
        cfg = load_config(getattr(args, "config", None), overrides)
        mode = cfg.output_mode
        rep = args.func(args, cfg)
    except (UsageError, ParseError, ConfigurationError, NonUnitError, NotFredholmError,
            TruncationBudgetError) as exc:
        _error(mode, type(exc).__name__, str(exc), argv, out, err)
        return EXIT_USAGE
    except DerivationError as exc:
        _error(mode, type(exc).__name__, f"{exc} (residual {exc.residual})", argv, out, err)
        return EXIT_CHECK_FAILED
    except (KpsatoError, ValueError, OSError) as exc:
        _error(mode, type(exc).__name__, str(exc), argv, out, err)
        return EXIT_USAGE
    emit(rep, cfg, argv, out)
    return EXIT_OK if rep.ok else EXIT_CHECK_FAILED
