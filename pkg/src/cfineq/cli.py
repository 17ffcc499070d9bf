"""Command-line front end.

Instance files are JSON objects with two problem blocks ``f`` and ``g``::

    {"f": {"order": 2, "coefficients": ["-1", "0"], "initial": ["2", "0"]},
     "g": {"order": 1, "coefficients": ["-1/2"], "initial": ["5"]}}

``coefficients`` are ``c_0..c_{n-1}`` of ``z^n + c_{n-1} z^{n-1} + ... + c_0``.
Numbers are integers, rational strings ("p/q"), decimal strings ("0.125",
"1e-3"), named constants ("sqrt2", "sqrt(7)", "pi", "e", optionally negated
with a leading "-") or ``{"re": ..., "im": ...}``.  JSON floats are rejected.
An optional ``roots`` list records exact characteristic roots.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from .cfinite import CauchyProblem, qqi_parts
from .decide import Outcome, decide_equality, decide_ultimate_inequality
from .forge import KINDS, HypothesisViolated, forge_equal_report, make_boundary_family
from .poly import find_roots
from .realnum import (
    CFineqError,
    ComplexBall,
    ComplexName,
    PrecisionExhausted,
    RealName,
    format_ball,
    name_to_ball,
    working_precision,
)
from .vandermonde import g_function, SingularDenominator

EXIT = {Outcome.TRUE: 0, Outcome.FALSE: 1, Outcome.EXHAUSTED: 2}
EXIT_ERROR = 3


class InstanceError(CFineqError, ValueError):
    """Malformed instance file; the message names the offending location."""


# ---------------------------------------------------------------------------
# parsing


def _parse_real(text: str, where: str) -> RealName:
    s = text.strip()
    neg = s.startswith("-")
    body = s[1:].strip() if neg else s
    name: Optional[RealName] = None
    if body in ("sqrt2", "sqrt3", "sqrt5", "pi", "e"):
        name = RealName.named(body)
    elif body.startswith("sqrt(") and body.endswith(")"):
        try:
            name = RealName.sqrt(Fraction(body[5:-1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"{where}: bad square root {text!r} ({exc})") from None
    if name is not None:
        return -name if neg else name
    try:
        return RealName.rational(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"{where}: cannot parse number {text!r}") from None


def parse_number(value: Any, where: str = "value") -> RealName | ComplexName:
    if isinstance(value, bool):
        raise InstanceError(f"{where}: booleans are not numbers")
    if isinstance(value, int):
        return RealName.rational(value)
    if isinstance(value, float):
        raise InstanceError(f"{where}: binary float {value!r} rejected; write it as a string such as \"{value!r}\"")
    if isinstance(value, str):
        return _parse_real(value, where)
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra or "re" not in value:
            raise InstanceError(f"{where}: complex numbers need keys 're' and optional 'im'")
        re = parse_number(value["re"], f"{where}.re")
        im = parse_number(value.get("im", 0), f"{where}.im")
        if not isinstance(re, RealName) or not isinstance(im, RealName):
            raise InstanceError(f"{where}: nested complex values")
        return ComplexName(re, im) if im.exact != 0 else re
    raise InstanceError(f"{where}: unsupported value {value!r}")


def _exact_pair(name: Any, where: str) -> tuple[Fraction, Fraction]:
    if isinstance(name, ComplexName):
        if name.re.exact is None or name.im.exact is None:
            raise InstanceError(f"{where}: roots must be exact")
        return name.re.exact, name.im.exact
    if name.exact is None:
        raise InstanceError(f"{where}: roots must be exact")
    return name.exact, Fraction(0)


def parse_block(block: Any, where: str) -> CauchyProblem:
    if not isinstance(block, dict):
        raise InstanceError(f"{where}: expected an object")
    unknown = set(block) - {"order", "coefficients", "initial", "roots"}
    if unknown:
        raise InstanceError(f"{where}: unknown keys {sorted(unknown)}")
    coeffs = block.get("coefficients", [])
    init = block.get("initial", [])
    if not isinstance(coeffs, list) or not isinstance(init, list):
        raise InstanceError(f"{where}: 'coefficients' and 'initial' must be arrays")
    order = block.get("order", len(coeffs))
    if isinstance(order, bool) or not isinstance(order, int) or order < 0:
        raise InstanceError(f"{where}.order: expected a non-negative integer")
    if len(coeffs) != order:
        raise InstanceError(f"{where}.coefficients: {len(coeffs)} entries for order {order}")
    if len(init) != order:
        raise InstanceError(f"{where}.initial: {len(init)} entries for order {order}")
    cs = [parse_number(v, f"{where}.coefficients[{i}]") for i, v in enumerate(coeffs)]
    us = [parse_number(v, f"{where}.initial[{i}]") for i, v in enumerate(init)]
    if "roots" not in block:
        return CauchyProblem(tuple(cs), tuple(us))
    roots = block["roots"]
    if not isinstance(roots, list) or len(roots) != order:
        raise InstanceError(f"{where}.roots: expected {order} entries")
    rs = [_exact_pair(parse_number(v, f"{where}.roots[{i}]"), f"{where}.roots[{i}]") for i, v in enumerate(roots)]
    p = CauchyProblem.from_roots(rs, us)
    given = [_exact_pair(c, f"{where}.coefficients") if _is_exact(c) else None for c in cs]
    derived = [_exact_pair(c, where) for c in p.coefficients]
    if any(g is not None and g != d for g, d in zip(given, derived)):
        raise InstanceError(f"{where}: coefficients disagree with the listed roots")
    return CauchyProblem(tuple(cs), tuple(us), p.roots)


def _is_exact(name: Any) -> bool:
    if isinstance(name, ComplexName):
        return name.re.exact is not None and name.im.exact is not None
    return name.exact is not None


def parse_instance(data: Any) -> tuple[CauchyProblem, CauchyProblem]:
    if not isinstance(data, dict):
        raise InstanceError("top level: expected an object with blocks 'f' and 'g'")
    unknown = set(data) - {"f", "g", "meta"}
    if unknown:
        raise InstanceError(f"top level: unknown keys {sorted(unknown)}")
    if "f" not in data:
        raise InstanceError("top level: missing block 'f'")
    f = parse_block(data["f"], "f")
    g = parse_block(data.get("g", {"order": 0, "coefficients": [], "initial": []}), "g")
    return f, g


def load_instance(path: str | Path) -> tuple[CauchyProblem, CauchyProblem]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_instance(data)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# serialization


def _real_text(x: RealName) -> str:
    if x.exact is not None:
        return str(x.exact)
    if x.label is None:
        raise ValueError("cannot serialize an anonymous real name")
    return x.label


def serialize_number(x: Any) -> Any:
    if isinstance(x, ComplexName):
        return {"re": _real_text(x.re), "im": _real_text(x.im)}
    return _real_text(x)


def _serialize_root(z: Any) -> Any:
    re, im = qqi_parts(z)
    return {"re": str(re), "im": str(im)} if im else str(re)


def serialize_block(p: CauchyProblem) -> dict:
    out = {
        "order": p.n,
        "coefficients": [serialize_number(c) for c in p.coefficients],
        "initial": [serialize_number(u) for u in p.initial],
    }
    if p.roots is not None and p.n:
        out["roots"] = [_serialize_root(r) for r in p.roots]
    return out


def serialize_instance(f: CauchyProblem, g: CauchyProblem, meta: Optional[dict] = None) -> dict:
    out: dict = {"f": serialize_block(f), "g": serialize_block(g)}
    if meta:
        out["meta"] = meta
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args: argparse.Namespace) -> int:
    f, g = load_instance(args.file)
    run = decide_ultimate_inequality if args.subject == "ultimate-ineq" else decide_equality
    t0 = time.perf_counter()
    verdict = run(f, g, fuel=args.fuel, max_prec=args.max_prec, trace=args.trace is not None)
    wall = time.perf_counter() - t0
    question = "f >= g for all large t" if args.subject == "ultimate-ineq" else "f differs from g"
    report = {
        "question": question,
        "verdict": verdict.outcome.value,
        "fuel_used": verdict.fuel_used,
        "final_precision": verdict.final_precision,
        "wall_time": round(wall, 6),
    }
    if args.trace is not None and verdict.witness is not None:
        Path(args.trace).write_text(verdict.witness.to_jsonl() + "\n")
        report["fired"] = verdict.witness.fired_steps()
    print(json.dumps(report))
    return EXIT[verdict.outcome]


def _block(args: argparse.Namespace) -> CauchyProblem:
    f, g = load_instance(args.file)
    return f if args.block == "f" else g


def cmd_roots(args: argparse.Namespace) -> int:
    p = _block(args)
    if p.n == 0:
        print("[]")
        return 0
    try:
        with working_precision(None):
            roots = find_roots(p.char_poly(4 * args.p + 64), args.p)
    except PrecisionExhausted:
        print(f"error: precision exhausted at {args.p} bits; retry with -p {2 * args.p}", file=sys.stderr)
        return EXIT_ERROR
    for r in roots:
        print(format_ball(r))
    return 0


def cmd_coeff(args: argparse.Namespace) -> int:
    p = _block(args)
    m1, n = args.m1, p.n
    if not 1 <= m1 <= n:
        print(f"error: --m1 must lie in 1..{n}", file=sys.stderr)
        return EXIT_ERROR
    bits = args.p
    with working_precision(bits + 64):
        if p.roots is not None:
            pts = [name_to_ball(_root_name(z), bits + 8) for z in p.roots]
        else:
            try:
                with working_precision(None):
                    pts = list(find_roots(p.char_poly(4 * bits + 64), bits))
            except PrecisionExhausted:
                print(f"error: precision exhausted at {bits} bits; retry with -p {2 * bits}", file=sys.stderr)
                return EXIT_ERROR
        lams = [pts[0]] + pts[m1:]
        u = p.initial_balls(bits + 8)
        G = g_function(m1, n, lams, u)
        adjusted = G if (n - m1) % 2 == 0 else -G
    print(f"G = {format_ball(G)}")
    print(f"(-1)^(n-m1) G = {format_ball(adjusted)}")
    try:
        from .vandermonde import f_function

        with working_precision(bits + 64):
            F = f_function([m1] + [1] * (n - m1), lams, u)
        print(f"F = {format_ball(F)}")
    except (SingularDenominator, ZeroDivisionError):
        print("F = undefined (a trailing root meets the distinguished root)")
    return 0


def _root_name(z: Any) -> Any:
    re, im = qqi_parts(z)
    return ComplexName(RealName.rational(re), RealName.rational(im)) if im else RealName.rational(re)


def cmd_forge(args: argparse.Namespace) -> int:
    f, g = load_instance(args.file)
    try:
        eps = Fraction(args.eps)
    except (ValueError, ZeroDivisionError):
        print(f"error: cannot parse --eps {args.eps!r}", file=sys.stderr)
        return EXIT_ERROR
    try:
        r = forge_equal_report(f, g, eps)
    except HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return 1
    meta = {
        "eps": str(eps),
        "distance_f": float(r.dist_p),
        "distance_g": float(r.dist_q),
        "bound": r.budget.bound_float(),
        "within_bound": r.within_bound,
        "matched": [list(x) for x in r.matched],
    }
    print(json.dumps(serialize_instance(r.p, r.q, meta), indent=2))
    return 0


def parse_k_range(text: str) -> range:
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise InstanceError(f"--k expects a..b, got {text!r}") from None


BENCH_FIELDS = ["k", "outcome", "iterations", "precision", "wall_time", "flag"]


def bench_rows(family: str, ks: Sequence[int], fuel: int, side: str = "yes", max_prec: int = 1 << 14):
    fam = make_boundary_family(family)
    for k in ks:
        member = fam.member(k)
        p, q = getattr(member, side)
        t0 = time.perf_counter()
        v = decide_ultimate_inequality(p, q, fuel=fuel, max_prec=max_prec, trace=False)
        wall = time.perf_counter() - t0
        yield {
            "k": k,
            "outcome": v.outcome.value,
            "iterations": v.fuel_used,
            "precision": v.final_precision,
            "wall_time": f"{wall:.6f}",
            "flag": "" if v.halted else "exhausted",
        }


def cmd_bench(args: argparse.Namespace) -> int:
    ks = parse_k_range(args.k)
    writer = csv.DictWriter(sys.stdout, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in bench_rows(args.family, ks, args.fuel, args.side, args.max_prec):
        writer.writerow(row)
        sys.stdout.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cfineq", description="Decide inequalities between real exponential polynomials.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="run a decision procedure")
    d.add_argument("subject", choices=["ultimate-ineq", "equality"])
    d.add_argument("file")
    d.add_argument("--fuel", type=int, default=40)
    d.add_argument("--max-prec", type=int, default=1 << 14)
    d.add_argument("--trace", metavar="OUT", help="write one JSON record per outer iteration")
    d.set_defaults(func=cmd_decide)

    r = sub.add_parser("roots", help="certified root enclosures")
    r.add_argument("file")
    r.add_argument("-p", type=int, default=53, help="radius bound 2^-p")
    r.add_argument("--block", choices=["f", "g"], default="f")
    r.set_defaults(func=cmd_roots)

    c = sub.add_parser("coeff", help="leading-coefficient numerator G for a root of multiplicity m1")
    c.add_argument("file")
    c.add_argument("--m1", type=int, required=True)
    c.add_argument("-p", type=int, default=53)
    c.add_argument("--block", choices=["f", "g"], default="f")
    c.set_defaults(func=cmd_coeff)

    fo = sub.add_parser("forge", help="perturbation constructions")
    fo.add_argument("what", choices=["equal"])
    fo.add_argument("file")
    fo.add_argument("--eps", required=True)
    fo.set_defaults(func=cmd_forge)

    b = sub.add_parser("bench", help="iterations versus distance to a boundary instance (CSV)")
    b.add_argument("--family", choices=list(KINDS), required=True)
    b.add_argument("--k", required=True, help="range a..b")
    b.add_argument("--fuel", type=int, default=60)
    b.add_argument("--side", choices=["yes", "no"], default="yes")
    b.add_argument("--max-prec", type=int, default=1 << 14)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except CFineqError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
