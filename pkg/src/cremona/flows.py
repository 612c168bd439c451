"""Verification of the catalog of quadratic birational flows.

Each catalog entry declares an affine vector field chi, its flow phi_t, a
strong symmetry Y and a first integral; the checks are: the flow group law
phi_{t+s} = phi_t . phi_s, chi = d phi_t/dt at t = 0, the vanishing Lie
bracket [chi, Y] = 0, the first-integral invariance chi(IP) = 0, the
preserved line fibration, and the declared stratum of the homogenized map.

Exponentials are handled by adjoining a symbol u that stands for e^t, so the
checks are exact rational-function identities; the two entries whose flows
involve sin/cos are verified numerically at seeded samples.
"""

from __future__ import annotations

import math
import os
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .polycore import HPoly, DEFAULT_SEED
from .ratmap import RatMap

__all__ = [
    "FlowEntry", "load_catalog", "verify_group_law", "verify_generator",
    "verify_symmetry_and_integral", "verify_fibration", "stratum_profile",
    "verify_catalog", "homogenized_map",
]

X0, X1, T, U = sympy.symbols("x0 x1 t u")
S_, V_ = sympy.symbols("s v")
NUMERIC_TOL = 1e-9


@dataclass
class FlowEntry:
    name: str
    chi: tuple           # two sympy expressions in x0, x1
    flow: tuple          # two sympy expressions in x0, x1, t, u
    lam: int             # 0: flow rational in t; 1: u stands for e^t
    sym: tuple           # strong symmetry, two sympy expressions
    ip_factors: list     # [(exact constant c, expression R)]: product R^c
    ip_exp: object       # S in the e^S factor of the first integral
    profile: str         # declared stratum of phi_t at generic t
    trig: bool = False   # flow uses sin/cos: numeric verification


# -- expression parsing -------------------------------------------------------
# Same surface grammar as the map parser (integers, rationals, i, + - * / ^,
# parentheses) extended with the symbols t and u and the functions sin, cos.

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[a-z][a-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))")

_NAMES = {"x0": X0, "x1": X1, "t": T, "u": U, "i": sympy.I}
_FUNCS = {"sin": sympy.sin, "cos": sympy.cos}


class _EParser:
    def __init__(self, text):
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ValueError(
                        f"bad character {text[pos:].strip()[0]!r} in "
                        f"{text!r}")
                break
            pos = m.end()
            if m.lastgroup:
                self.toks.append((m.lastgroup, m.group(m.lastgroup)))
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else (None, None)

    def next(self):
        tok = self.peek()
        self.k += 1
        return tok

    def expect(self, val):
        kind, got = self.next()
        if got != val:
            raise ValueError(f"expected {val!r}, got {got!r}")

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            rhs = self.unary()
            node = node * rhs if op == "*" else node / rhs
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.next()
            return -self.unary()
        if self.peek()[1] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.next()
            exp = self.unary()
            return base ** exp
        return base

    def atom(self):
        kind, val = self.next()
        if kind == "num":
            return sympy.Integer(int(val))
        if kind == "name":
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[val](arg)
            if val in _NAMES:
                return _NAMES[val]
            raise ValueError(f"unknown symbol {val!r}")
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ValueError(f"unexpected token {val!r}")


def parse_expr(text):
    p = _EParser(text)
    node = p.expr()
    if p.peek()[0] is not None:
        raise ValueError(f"trailing input in {text!r}")
    return node


def _parse_pair(text):
    a, b = text.split("|")
    return (parse_expr(a), parse_expr(b))


# -- catalog I/O --------------------------------------------------------------

_DATA = os.path.join(os.path.dirname(__file__), "data", "flow_catalog.txt")


def load_catalog(data_dir=None):
    """Parse the flow catalog: one labeled-field record per entry."""
    path = (os.path.join(data_dir, "flow_catalog.txt")
            if data_dir else _DATA)
    entries = []
    cur = None

    def close():
        if cur is None:
            return
        for f in ("chi", "flow", "sym", "profile"):
            if f not in cur:
                raise ValueError(f"entry {cur['name']!r} lacks {f.upper()}")
        flow = cur["flow"]
        trig = any(e.has(sympy.sin) or e.has(sympy.cos) for e in flow)
        entries.append(FlowEntry(
            name=cur["name"], chi=cur["chi"], flow=flow,
            lam=cur.get("lam", 0), sym=cur["sym"],
            ip_factors=cur.get("ipf", []),
            ip_exp=cur.get("ipexp", sympy.Integer(0)),
            profile=cur["profile"], trig=trig))

    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(" ")
            rest = rest.strip()
            if key == "ENTRY":
                close()
                cur = {"name": rest}
            elif cur is None:
                raise ValueError(f"field {key} before any ENTRY")
            elif key == "CHI":
                cur["chi"] = _parse_pair(rest)
            elif key == "FLOW":
                cur["flow"] = _parse_pair(rest)
            elif key == "LAMBDA":
                cur["lam"] = int(rest)
            elif key == "SYM":
                cur["sym"] = _parse_pair(rest)
            elif key == "IPF":
                c, expr = rest.split("|")
                cur.setdefault("ipf", []).append(
                    (parse_expr(c), parse_expr(expr)))
            elif key == "IPEXP":
                cur["ipexp"] = parse_expr(rest)
            elif key == "PROFILE":
                cur["profile"] = rest
            else:
                raise ValueError(f"unknown catalog field {key!r}")
        close()
    return entries


# -- verification -------------------------------------------------------------

def _num_samples(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        out.append({
            X0: rng.uniform(0.4, 1.6), X1: rng.uniform(0.4, 1.6),
            T: rng.uniform(-0.8, 0.8), S_: rng.uniform(-0.8, 0.8),
        })
    return out


def _is_zero(expr, trig, seed, tol):
    expr = sympy.together(expr)
    if not trig and not (expr.has(sympy.sin) or expr.has(sympy.cos)):
        return sympy.cancel(expr) == 0
    fn = sympy.lambdify((X0, X1, T, S_, U, V_), expr, modules="cmath")
    for sample in _num_samples(20, seed):
        try:
            val = complex(fn(sample[X0], sample[X1], sample[T], sample[S_],
                             math.exp(sample[T]), math.exp(sample[S_])))
        except (ZeroDivisionError, OverflowError, ValueError):
            continue
        if abs(val) > tol:
            return False
    return True


def verify_group_law(e: FlowEntry, seed=DEFAULT_SEED,
                     tolerance=NUMERIC_TOL) -> bool:
    """phi(phi(x, t, u), s, v) = phi(x, t+s, u v), exactly or sampled."""
    inner = {X0: e.flow[0], X1: e.flow[1]}
    ok = True
    for k in range(2):
        outer = e.flow[k].subs({T: S_, U: V_}, simultaneous=True)
        lhs = outer.subs(inner, simultaneous=True)
        rhs = e.flow[k].subs({T: T + S_, U: U * V_}, simultaneous=True)
        ok = ok and _is_zero(lhs - rhs, e.trig, seed, tolerance)
    return ok


def verify_generator(e: FlowEntry, seed=DEFAULT_SEED,
                     tolerance=NUMERIC_TOL) -> bool:
    """chi equals the t-derivative of the flow at t = 0 (with du/dt = u)."""
    ok = True
    for k in range(2):
        d = sympy.diff(e.flow[k], T) + e.lam * U * sympy.diff(e.flow[k], U)
        d = d.subs({T: 0, U: 1}, simultaneous=True)
        ok = ok and _is_zero(d - e.chi[k], e.trig, seed, tolerance)
    return ok


def _apply_field(chi, f):
    return chi[0] * sympy.diff(f, X0) + chi[1] * sympy.diff(f, X1)


def verify_symmetry_and_integral(e: FlowEntry, seed=DEFAULT_SEED,
                                 tolerance=NUMERIC_TOL):
    """([chi, Y] = 0, chi annihilates the declared first integral)."""
    bracket_ok = True
    for k in range(2):
        br = _apply_field(e.chi, e.sym[k]) - _apply_field(e.sym, e.chi[k])
        bracket_ok = bracket_ok and _is_zero(br, False, seed, tolerance)
    # logarithmic-derivative form of chi(Prod R_i^{c_i} e^S) = 0
    total = _apply_field(e.chi, e.ip_exp)
    for c, r in e.ip_factors:
        total = total + c * _apply_field(e.chi, r) / r
    integral_ok = _is_zero(total, False, seed, tolerance)
    return bracket_ok, integral_ok


def verify_fibration(e: FlowEntry) -> bool:
    """The flow preserves the line fibration x1 = const: its second
    component is a Moebius function of x1 alone."""
    f1 = sympy.together(e.flow[1])
    num, den = sympy.fraction(f1)
    for part in (num, den):
        if part.has(X0):
            return False
        if sympy.degree(sympy.Poly(part, X1)) > 1:
            return False
    return True


def homogenized_map(e: FlowEntry, t_value, u_value=2) -> RatMap:
    """Exact projective map of the flow at a sample (t, u); u is treated as
    a free exact parameter when the entry involves exponentials."""
    if e.trig:
        raise ValueError("trigonometric flows have no exact sample maps")
    x2 = sympy.Symbol("x2")
    subs = {T: sympy.Rational(t_value), U: sympy.Rational(u_value)}
    comps = []
    for k in range(2):
        g = sympy.cancel(e.flow[k].subs(subs, simultaneous=True))
        g = sympy.together(g.subs({X0: X0 / x2, X1: X1 / x2},
                                  simultaneous=True))
        comps.append(sympy.fraction(g))
    dens = [d for _, d in comps]
    lead = sympy.lcm(sympy.Poly(dens[0], X0, X1, x2),
                     sympy.Poly(dens[1], X0, X1, x2)).as_expr()
    polys = [sympy.expand(n * sympy.cancel(lead / d)) for n, d in comps]
    polys.append(lead)
    return RatMap([HPoly.from_sympy(p) for p in polys])


def stratum_profile(e: FlowEntry, samples=((1, 2), (3, 5))):
    """Observed stratum of the homogenized flow at each (t, u) sample."""
    from . import birat
    out = []
    for t_value, u_value in samples:
        m = homogenized_map(e, t_value, u_value)
        if m.degree == 1:
            out.append("Sigma0" if m.is_identity() else "LINEAR")
        else:
            out.append(birat.classify_quadratic(m).stratum)
    return out


def corrupted_entries(entries=None):
    """Three deliberately broken catalog copies, used as negative controls:
    a sign-flipped flow, a wrong exponential rate, a wrong symmetry."""
    import dataclasses
    if entries is None:
        entries = load_catalog()
    by = {e.name: e for e in entries}
    froufrou = by["s2-02-froufrou"]
    linexp = by["s1-03-linear-exp"]
    shifted = by["s2-26-shifted-pole"]
    return [
        dataclasses.replace(froufrou, name="corrupt-flow-sign",
                            flow=(-froufrou.flow[0], froufrou.flow[1])),
        dataclasses.replace(linexp, name="corrupt-lambda", lam=0),
        dataclasses.replace(shifted, name="corrupt-symmetry",
                            sym=(X0 * X1, sympy.Integer(0))),
    ]


def verify_catalog(entries=None, seed=DEFAULT_SEED, tolerance=NUMERIC_TOL):
    """[(name, passed, detail)] over all checks for every entry."""
    if entries is None:
        entries = load_catalog()
    out = []
    for e in entries:
        checks = {}
        checks["group_law"] = verify_group_law(e, seed, tolerance)
        checks["generator"] = verify_generator(e, seed, tolerance)
        br, ip = verify_symmetry_and_integral(e, seed, tolerance)
        checks["symmetry"] = br
        checks["integral"] = ip
        checks["fibration"] = verify_fibration(e)
        if not e.trig:
            observed = stratum_profile(e, samples=((1, 2),))
            checks["profile"] = all(s == e.profile for s in observed)
        passed = all(checks.values())
        detail = " ".join(f"{k}={'ok' if v else 'FAIL'}"
                          for k, v in checks.items())
        out.append((e.name, passed, detail))
    return out
