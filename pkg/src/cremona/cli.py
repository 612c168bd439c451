"""Command-line surface: map expression grammar, subcommands, reports."""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from .polycore import GaussRat, HPoly, DEFAULT_SEED
from .ratmap import RatMap

__all__ = [
    "MapSyntaxError", "parse_map", "parse_poly", "format_map", "format_poly",
    "main", "SCHEMA_VERSION",
]

SCHEMA_VERSION = "1"


class MapSyntaxError(ValueError):
    """Parse failure with the byte offset of the offending token."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


_TOKEN = re.compile(r"(?P<num>\d+)|(?P<name>x[012]|[a-z][a-z0-9_]*)"
                    r"|(?P<op>\*\*|[-+*/^():\[\],])")


class _Parser:
    """Recursive-descent parser for `[expr : expr : expr]` over x0,x1,x2,i."""

    def __init__(self, text, symbols=None):
        self.text = text
        self.tokens = []
        self.symbols = symbols or {}
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m:
                raise MapSyntaxError(f"unexpected character {text[pos]!r}", pos)
            self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.k = 0

    def peek(self):
        if self.k < len(self.tokens):
            return self.tokens[self.k]
        return (None, "", len(self.text))

    def take(self, value=None):
        kind, tok, off = self.peek()
        if kind is None:
            raise MapSyntaxError("unexpected end of input", off)
        if value is not None and tok != value:
            raise MapSyntaxError(f"expected {value!r}, found {tok!r}", off)
        self.k += 1
        return kind, tok, off

    def parse_map(self):
        self.take("[")
        comps = [self.expr()]
        while self.peek()[1] == ":":
            self.take(":")
            comps.append(self.expr())
        self.take("]")
        kind, tok, off = self.peek()
        if kind is not None:
            raise MapSyntaxError(f"trailing input {tok!r}", off)
        if len(comps) != 3:
            raise MapSyntaxError(f"expected 3 components, found {len(comps)}",
                                 len(self.text))
        return comps

    def parse_expr_only(self):
        e = self.expr()
        kind, tok, off = self.peek()
        if kind is not None:
            raise MapSyntaxError(f"trailing input {tok!r}", off)
        return e

    def expr(self):
        _, _, off = self.peek()
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, off = self.take()
            rhs = self.term()
            try:
                acc = acc + rhs if op == "+" else acc - rhs
            except ValueError:
                raise MapSyntaxError("inhomogeneous component", off) from None
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, off = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                c = _constant_of(rhs)
                if c is None or not c:
                    raise MapSyntaxError("division only by nonzero constants",
                                         off)
                acc = acc * c.inv()
        return acc

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            v = self.unary()
            return v if op == "+" else -v
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            _, _, off = self.take()
            kind, tok, eoff = self.take()
            if kind != "num":
                raise MapSyntaxError("exponent must be a nonnegative integer",
                                     eoff)
            return base ** int(tok)
        return base

    def atom(self):
        kind, tok, off = self.take()
        if kind == "num":
            return HPoly.constant(GaussRat(Fraction(int(tok))))
        if kind == "name":
            if tok in ("x0", "x1", "x2"):
                return HPoly.variable(int(tok[1]))
            if tok == "i":
                return HPoly.constant(GaussRat(0, 1))
            if tok in self.symbols:
                return self.symbols[tok]
            raise MapSyntaxError(f"unknown name {tok!r}", off)
        if tok == "(":
            e = self.expr()
            self.take(")")
            return e
        raise MapSyntaxError(f"unexpected token {tok!r}", off)


def _constant_of(p: HPoly):
    if p.is_zero():
        return GaussRat(0)
    if list(p.terms) == [(0, 0, 0)]:
        return p.terms[(0, 0, 0)]
    return None


def parse_poly(text, symbols=None) -> HPoly:
    """One homogeneous polynomial in the map grammar."""
    return _Parser(text, symbols).parse_expr_only()


def parse_map(text) -> RatMap:
    """`[expr : expr : expr]` -> reduced RatMap; raises MapSyntaxError."""
    comps = _Parser(text).parse_map()
    degs = {c.degree for c in comps if not c.is_zero()}
    if len(degs) > 1:
        raise MapSyntaxError(f"component degree mismatch {sorted(degs)}", 0)
    if all(c.is_zero() for c in comps):
        raise MapSyntaxError("all components are zero", 0)
    return RatMap(comps)


# -- printing -----------------------------------------------------------------

def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else \
        f"{q.numerator}/{q.denominator}"


def _fmt_coeff(c: GaussRat):
    """(text, needs_parens) for a nonzero coefficient."""
    re_, im = c.re, c.im
    if im == 0:
        return _fmt_fraction(re_), False
    if re_ == 0:
        if im == 1:
            return "i", False
        return f"{_fmt_fraction(im)}*i", True
    sign = "+" if im > 0 else "-"
    imtxt = "i" if abs(im) == 1 else f"{_fmt_fraction(abs(im))}*i"
    return f"{_fmt_fraction(re_)}{sign}{imtxt}", True


def format_poly(p: HPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p.terms, key=lambda e: (-(e[0]), -(e[1]), -(e[2]))):
        c = p.terms[e]
        mono = "*".join(f"x{v}" if k == 1 else f"x{v}^{k}"
                        for v, k in enumerate(e) if k)
        txt, parens = _fmt_coeff(c)
        if mono:
            if txt == "1":
                piece = mono
            elif txt == "-1":
                piece = f"-{mono}"
            else:
                piece = f"({txt})*{mono}" if parens else f"{txt}*{mono}"
        else:
            piece = f"({txt})" if parens else txt
        parts.append(piece)
    out = parts[0]
    for piece in parts[1:]:
        out += piece if piece.startswith("-") else "+" + piece
    return out


def format_map(f: RatMap) -> str:
    return "[" + ":".join(format_poly(c) for c in f.components) + "]"


# -- command implementations --------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser1(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(lines, fmt, out):
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _record_header(cmd):
    return [f"schema={SCHEMA_VERSION}", f"command={cmd}"]


def cmd_classify(args):
    from . import birat
    f = parse_map(args.map)
    rep = birat.classify_quadratic(f)
    lines = _record_header("classify") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    lines.extend(rep.to_record().splitlines())
    if rep.stratum.startswith("Sigma") and f.degree > 1:
        try:
            for p in birat.fixed_points(f, seed=args.seed):
                lines.append(f"fixed_point={p}")
        except ValueError as e:
            lines.append(f"fixed_points_note={e}")
    _emit(lines, args.format, args.out)
    return 0


def cmd_invert(args):
    from . import birat
    f = parse_map(args.map)
    try:
        inv, exact = birat.inverse_quadratic(f)
    except ValueError as e:
        _emit(_record_header("invert") + [f"error={e}"], args.format, args.out)
        return 2
    lines = _record_header("invert") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    lines.append(f"inverse={format_map(inv)}")
    lines.append(f"exact={'true' if exact else 'false'}")
    _emit(lines, args.format, args.out)
    return 0


def cmd_degrees(args):
    from . import dynamics
    f = parse_map(args.map)
    seq = dynamics.degree_sequence(f, args.horizon)
    lines = _record_header("degrees") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    lines.append("degrees=" + " ".join(str(d) for d in seq.degrees))
    lines.append(f"stable_horizon={seq.stable_horizon}")
    lines.append(f"truncated={'true' if seq.truncated else 'false'}")
    _emit(lines, args.format, args.out)
    return 0


def cmd_indpoints(args):
    from . import birat
    f = parse_map(args.map)
    pts = birat.ind_points(f, seed=args.seed)
    lines = _record_header("indpoints") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    lines.append(f"count={len(pts)}")
    for p, order in pts:
        lines.append(f"ind_point={p} order={order}")
    lines.append(f"improper={pts.improper}")
    _emit(lines, args.format, args.out)
    return 0


def cmd_guillot(args):
    from . import foliation
    f = parse_map(args.map)
    s1, s2 = foliation.guillot_sums(f, seed=args.seed)
    lines = _record_header("guillot") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    s1, s2 = complex(s1), complex(s2)
    lines.append(f"sum_inv_1m_xy={s1.real:.12g}{s1.imag:+.12g}i")
    lines.append(f"sum_inv_prod={s2.real:.12g}{s2.imag:+.12g}i")
    _emit(lines, args.format, args.out)
    return 0


def cmd_bb(args):
    from . import foliation
    f = parse_map(args.map)
    total = foliation.baum_bott_sum(f, seed=args.seed)
    lines = _record_header("bb") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    total = complex(total)
    lines.append(f"baum_bott_sum_re={total.real:.12g}")
    lines.append(f"baum_bott_sum_im={total.imag:.12g}")
    _emit(lines, args.format, args.out)
    return 0


def cmd_cubic(args):
    from . import cubic
    f = parse_map(args.map)
    if f.degree != 3:
        raise _UsageError(f"cubic expects a degree-3 map, got degree {f.degree}")
    conf = cubic.classify_cubic(f)
    lines = _record_header("cubic") if args.format == "record" else []
    lines.append(f"map={format_map(f)}")
    lines.append(f"config={conf.label}")
    for comp in conf.components:
        img = "NONE" if comp.image is None else str(comp.image)
        lines.append(f"component={format_poly(comp.poly)} kind={comp.kind} "
                     f"mult={comp.multiplicity} "
                     f"contracted={'true' if comp.contracted else 'false'} "
                     f"image={img}")
    _emit(lines, args.format, args.out)
    return 0 if conf.label != "UNMATCHED" else 2


def cmd_flow_verify(args):
    from . import flows
    entries = flows.load_catalog(args.data)
    results = flows.verify_catalog(entries, seed=args.seed,
                                   tolerance=args.tolerance)
    lines = _record_header("flow_verify") if args.format == "record" else []
    ok = True
    for name, passed, detail in results:
        ok = ok and passed
        lines.append(f"entry={name} status={'PASS' if passed else 'FAIL'}"
                     + (f" detail={detail}" if detail else ""))
    lines.append(f"total={len(results)}")
    lines.append(f"failed={sum(1 for _, p, _ in results if not p)}")
    _emit(lines, args.format, args.out)
    return 0 if ok else 2


def cmd_render(args):
    from . import dynamics
    f = parse_map(args.map)
    window = tuple(float(v) for v in args.window.split(","))
    if len(window) != 4:
        raise _UsageError("window must be xmin,xmax,ymin,ymax")
    img = dynamics.render(f, window=window, mode=args.mode, width=args.width,
                          height=args.height, iterations=args.iterations,
                          seed=args.seed)
    if not args.out:
        raise _UsageError("render requires --out FILE")
    img.write(args.out)
    sys.stdout.write(f"wrote {args.out} ({img.width}x{img.height})\n")
    return 0


def _add_common(sp):
    sp.add_argument("--format", choices=("text", "record"), default="text")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.add_argument("--out", default=None)
    sp.add_argument("--data", default=None)


def build_parser():
    ap = _Parser1(prog="cremona",
                  description="Plane birational maps: classification, "
                              "invariants, degree growth, rendering.")
    sub = ap.add_subparsers(dest="cmd")
    specs = [
        ("classify", cmd_classify, True),
        ("invert", cmd_invert, True),
        ("degrees", cmd_degrees, True),
        ("indpoints", cmd_indpoints, True),
        ("guillot", cmd_guillot, True),
        ("bb", cmd_bb, True),
        ("cubic", cmd_cubic, True),
        ("flow_verify", cmd_flow_verify, False),
        ("render", cmd_render, True),
    ]
    for name, fn, needs_map in specs:
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "degrees":
            sp.add_argument("--horizon", type=int, default=8)
        if name == "render":
            sp.add_argument("--mode", choices=("ESCAPE", "ORBIT"),
                            default="ESCAPE")
            sp.add_argument("--width", type=int, default=512)
            sp.add_argument("--height", type=int, default=512)
            sp.add_argument("--iterations", type=int, default=60)
            sp.add_argument("--window", default="-2.0,2.0,-2.0,2.0")
        if needs_map:
            sp.add_argument("map")
        sp.set_defaults(fn=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not getattr(args, "fn", None):
            ap.print_usage(sys.stderr)
            return 1
        return args.fn(args)
    except (_UsageError, MapSyntaxError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except (ValueError, ArithmeticError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
