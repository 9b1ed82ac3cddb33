"""Command-line entry point and the polynomial text format.

    hamlie xi --p 5 --r 1 --f "x1*x2"
    hamlie density --p 5 --r 1 --m 2 --samples 200000 --seed 7 --format json
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .bn import TruncPoly
from .errors import HamlieError, ParseError
from .gf import FieldCtx, Scalar, field_create

GRAMMAR = """\
polynomial grammar:
  poly  := term (('+'|'-') term)*
  term  := coeff? ('*'? var ('^' exp)?)*
  var   := 'x' digits            (x1 .. xn)
  coeff := integer | '[' c0 ',' c1 ',' ... ']'   (extension-field digits)
whitespace is ignored; exponents >= p make the monomial zero."""


class _Scanner:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def skip(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, got {got!r}", self.i)
        self.i += 1

    def integer(self) -> int:
        self.skip()
        j = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if j == self.i:
            raise ParseError("expected digits", j)
        return int(self.s[j:self.i])


def parse_poly(text: str, p: int, n: int, m: int = 1) -> TruncPoly:
    """Parse ``text`` into B_n over F_{p^m}."""
    ctx = field_create(p, m)
    sc = _Scanner(text)
    out = TruncPoly.zero(ctx, n)
    first = True
    while True:
        ch = sc.peek()
        sign = 1
        if ch and ch in "+-":
            sign = -1 if ch == "-" else 1
            sc.i += 1
        elif not first:
            break
        if ch == "" and first:
            raise ParseError("empty polynomial", sc.i)
        out = out + _term(sc, ctx, n) * sign
        first = False
        if sc.peek() == "":
            return out
        if sc.peek() not in ("+", "-"):
            raise ParseError(f"unexpected {sc.peek()!r}", sc.i)
    raise ParseError(f"unexpected {sc.peek()!r}", sc.i)


def _term(sc: _Scanner, ctx: FieldCtx, n: int) -> TruncPoly:
    start = sc.i
    coeff = 1
    have_coeff = False
    ch = sc.peek()
    if ch.isdigit():
        coeff = ctx.elem(sc.integer())
        have_coeff = True
    elif ch == "[":
        sc.take("[")
        digs = [sc.integer()]
        while sc.peek() == ",":
            sc.take(",")
            digs.append(sc.integer())
        sc.take("]")
        if len(digs) > ctx.m:
            raise ParseError(f"coefficient has {len(digs)} digits but m = {ctx.m}", start)
        coeff = ctx.elem(digs)
        have_coeff = True
    exps = [0] * n
    nvars = 0
    while True:
        ch = sc.peek()
        if ch == "*":
            sc.take("*")
            if sc.peek() != "x":
                raise ParseError("expected a variable after '*'", sc.i)
            continue
        if ch != "x":
            break
        pos = sc.i
        sc.take("x")
        k = sc.integer()
        if not 1 <= k <= n:
            raise ParseError(f"variable x{k} outside x1..x{n}", pos)
        e = 1
        if sc.peek() == "^":
            sc.take("^")
            e = sc.integer()
        exps[k - 1] += e
        nvars += 1
    if not have_coeff and not nvars:
        raise ParseError("expected a term", start)
    if any(e >= ctx.p for e in exps):
        warnings.warn(f"monomial at position {start} has an exponent >= p; truncated to 0", stacklevel=3)
        return TruncPoly.zero(ctx, n)
    return TruncPoly.monomial(ctx, n, exps, Scalar(ctx, coeff))


def format_poly(f: TruncPoly) -> str:
    """Canonical text: terms in increasing mixed-radix order, coefficient 1 omitted."""
    parts = []
    for exps, c in f.terms():
        mono = "*".join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps, 1) if e)
        cs = f.ctx.format(c.code)
        if not mono:
            parts.append(cs)
        elif c.code == 1:
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts) if parts else "0"


# -- command runners -------------------------------------------------------------


class UsageError(Exception):
    pass


def _need(args, name: str):
    v = getattr(args, name)
    if v is None or v == []:
        raise UsageError(f"--{name} is required for {args.command}")
    return v


def _poly_arg(args, text: str, n: int) -> TruncPoly:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = parse_poly(text, args.p, n, args.m)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return f


def _cmd_xi(args) -> dict:
    from .ham import d_H
    from .pinv import xi

    f = _poly_arg(args, _need(args, "f"), 2 * args.r)
    v = xi(d_H(f), args.method)
    return {"xi": [repr(s) for s in v], "text": "xi = (" + ", ".join(repr(s) for s in v) + ")"}


def _cmd_charpoly(args) -> dict:
    from .ham import d_H
    from .wn import char_poly_of

    f = _poly_arg(args, _need(args, "f"), 2 * args.r)
    chi = char_poly_of(d_H(f))
    terms = {str(k): repr(chi[k]) for k in chi.support()}
    return {"charpoly": terms, "text": f"chi = {chi!r}"}


def _cmd_nilpotent(args) -> dict:
    from .ham import d_H
    from .pinv import is_nilpotent_xi

    f = _poly_arg(args, _need(args, "f"), 2 * args.r)
    ok = is_nilpotent_xi(d_H(f), args.method)
    return {"nilpotent": ok, "text": f"nilpotent: {str(ok).lower()}"}


def _derivation_arg(args, n: int):
    from .wn import Derivation

    coeffs = _need(args, "coeff")
    if len(coeffs) != n:
        raise UsageError(f"expected {n} --coeff values, got {len(coeffs)}")
    return Derivation.from_polys([_poly_arg(args, c, n) for c in coeffs])


def _cmd_delta(args) -> dict:
    from .ham import delta

    f = delta(_derivation_arg(args, 2 * args.r))
    return {"delta": format_poly(f), "text": f"delta = {format_poly(f)}"}


def _cmd_lift(args) -> dict:
    from .aut import lift_mu, make_aut

    imgs = _need(args, "images")
    if len(imgs) != args.r:
        raise UsageError(f"expected {args.r} --images values, got {len(imgs)}")
    mu = make_aut([_poly_arg(args, t, args.r) for t in imgs])
    mt, alpha = lift_mu(mu)
    out = [format_poly(g) for g in mt.images]
    lines = [f"x{i} -> {g}" for i, g in enumerate(out, 1)] + [f"alpha = {alpha!r}"]
    return {"images": out, "alpha": repr(alpha), "text": "\n".join(lines)}


def _cmd_beta(args) -> dict:
    from .aut import beta

    D = beta(_derivation_arg(args, args.r))
    comps = [format_poly(g) for g in D.polys]
    return {"beta": comps, "text": f"beta = {D!r}"}


def _cfg(args):
    from .lab import ExperimentConfig

    return ExperimentConfig(p=args.p, r=args.r, m=args.m, seed=args.seed, samples=args.samples,
                            method=args.method, max_elements=args.max_elements,
                            max_seconds=args.max_seconds, fault=args.fault)


def _suite_names(args) -> list[str]:
    from .lab import BATTERIES

    if not args.suite:
        return list(BATTERIES)
    names = [s for item in args.suite for s in item.split(",") if s]
    unknown = [s for s in names if s not in BATTERIES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; known: {', '.join(BATTERIES)}")
    return names


SIMPLE = {
    "xi": _cmd_xi,
    "charpoly": _cmd_charpoly,
    "nilpotent": _cmd_nilpotent,
    "delta": _cmd_delta,
    "lift": _cmd_lift,
    "beta": _cmd_beta,
}
EXPERIMENTS = ("escan", "density", "diffrank", "torus", "verify")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamlie", description="Invariants of Hamiltonian Lie algebras H_n over F_q.",
                                 epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("command", choices=list(SIMPLE) + list(EXPERIMENTS))
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--f", help="potential in B_2r")
    ap.add_argument("--coeff", action="append", default=[], help="derivation coefficient (repeat per variable)")
    ap.add_argument("--images", action="append", default=[], help="image of x_i under mu (repeat)")
    ap.add_argument("--suite", action="append", default=[], help="battery names, comma separated")
    ap.add_argument("--method", default="auto", choices=["auto", "phi", "charpoly"])
    ap.add_argument("--fault", default=None, help="inject a fault (thm43 battery)")
    ap.add_argument("--max-elements", type=int, default=None)
    ap.add_argument("--max-seconds", type=float, default=None)
    ap.add_argument("--out", default=None, help="output path, '-' for stdout")
    ap.add_argument("--format", default=None, choices=["json", "csv", "text"])
    return ap


def _emit(text: str, args, default_name: str):
    fmt = args.format or "text"
    out = args.out
    if out is None and fmt != "text":
        out = str(Path(os.environ.get("HAMLIE_OUT_DIR", ".")) / default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        if e.code:
            print(GRAMMAR, file=sys.stderr)
        return int(e.code or 0)
    try:
        if args.r < 1 or args.m < 1 or args.samples < 1:
            raise UsageError("r, m and samples must be >= 1")
        field_create(args.p, args.m)
        if args.command in SIMPLE:
            res = SIMPLE[args.command](args)
            fmt = args.format or "text"
            if fmt == "json":
                body = {k: v for k, v in res.items() if k != "text"}
                text = json.dumps({"command": args.command, "p": args.p, "r": args.r, "m": args.m, **body},
                                  indent=2) + "\n"
            else:
                text = res["text"] + "\n"
            _emit(text, args, f"{args.command}.{fmt}")
            return 0
        from . import lab

        cfg = _cfg(args)
        if args.command == "escan":
            rep = lab.escan(cfg)
        elif args.command == "density":
            rep = lab.density(cfg)
        elif args.command == "diffrank":
            rep = lab.diff_rank(cfg)
        elif args.command == "torus":
            rep = lab.torus_restrict(cfg)
        else:
            rep = lab.verify_suite(_suite_names(args), cfg)
        fmt = args.format or "text"
        text = {"json": rep.to_json, "csv": rep.to_csv, "text": rep.to_text}[fmt]()
        name = f"{args.command}-p{args.p}-r{args.r}-m{args.m}-s{args.seed}.{fmt}"
        _emit(text, args, name)
        return 0 if rep.passed else 1
    except (UsageError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return 2
    except (HamlieError, ValueError, IndexError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
