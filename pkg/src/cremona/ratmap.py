"""Rational maps of P^2: construction, reduction, composition, Jacobians."""

from __future__ import annotations

from .polycore import (
    GaussRat,
    HPoly,
    CPoint,
    poly_gcd_many,
    RESIDUAL_TOL,
)

__all__ = ["RatMap", "sigma", "rho", "tau", "identity_map", "linear_map",
           "INDETERMINATE"]

INDETERMINATE = "INDETERMINATE"


class RatMap:
    """A reduced triple (f0 : f1 : f2) of equal-degree homogeneous polynomials.

    Construction always reduces: the component gcd is divided out and the
    representative is scaled so the graded-lex leading coefficient of the
    first nonzero component is 1.  Projectively equal maps compare equal.
    """

    __slots__ = ("components", "degree")

    def __init__(self, components, reduce=True):
        comps = list(components)
        if len(comps) != 3:
            raise ValueError("a map needs exactly three components")
        if all(c.is_zero() for c in comps):
            raise ValueError("all components zero")
        degs = {c.degree for c in comps if not c.is_zero()}
        if len(degs) != 1:
            raise ValueError(f"component degrees differ: {sorted(degs)}")
        if reduce:
            nonzero = [c for c in comps if not c.is_zero()]
            if len(nonzero) >= 2:
                g = poly_gcd_many(nonzero)
                if g.degree and g.degree > 0:
                    comps = [_exact_divide(c, g) for c in comps]
            # canonical scaling
            first = next(c for c in comps if not c.is_zero())
            scale = first.leading_term()[1].inv()
            comps = [c * scale for c in comps]
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "degree", next(c for c in comps if not c.is_zero()).degree)

    def __setattr__(self, name, value):
        raise AttributeError("RatMap is immutable")

    def __eq__(self, other):
        if not isinstance(other, RatMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def is_identity(self) -> bool:
        return self == identity_map()

    def compose(self, other: "RatMap") -> "RatMap":
        """self after other (self ∘ other), reduced."""
        comps = [c.substitute(list(other.components)) for c in self.components]
        if all(c.is_zero() for c in comps):
            raise ValueError("composition degenerates to the zero triple")
        return RatMap(comps)

    def __mul__(self, other):
        return self.compose(other)

    def iterate(self, n: int) -> "RatMap":
        if n < 1:
            raise ValueError("iterate needs n >= 1")
        acc = self
        for _ in range(n - 1):
            acc = acc.compose(self)
        return acc

    def det_jacobian(self) -> HPoly:
        f = self.components
        rows = [[f[i].partial(j) for j in range(3)] for i in range(3)]
        det = HPoly.zero()
        for (a, b, c), sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                               ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
            term = rows[0][a] * rows[1][b] * rows[2][c]
            det = det + term * sgn if not det.is_zero() or not term.is_zero() else det
        return det

    def evaluate(self, p: CPoint):
        """Image of a point, or INDETERMINATE when all components vanish."""
        if p.is_exact():
            vals = [c.eval_exact(p.exact) for c in self.components]
            if all(not v for v in vals):
                return INDETERMINATE
            return CPoint([v.to_complex() for v in vals],
                          exact=[v for v in vals])
        vals = [c.eval_complex(p.coords) for c in self.components]
        scale = max(abs(v) for v in vals)
        norm = max(1.0, max(abs(co.to_complex())
                            for c in self.components if c.terms
                            for co in c.terms.values()))
        if scale < RESIDUAL_TOL * norm:
            return INDETERMINATE
        return CPoint(vals)

    def restrict_to_line(self, p: CPoint, q: CPoint):
        """Pull back along (s:t) -> s*p + t*q.

        Returns (is_contracted, image CPoint or None, binary forms).
        Requires exact anchor points for the exact path; numeric otherwise.
        """
        if p.is_exact() and q.is_exact():
            forms = [_binary_restrict_exact(c, p.exact, q.exact)
                     for c in self.components]
            if all(_bin_zero(b) for b in forms):
                raise ValueError("line lies inside the indeterminacy locus")
            g = _bin_gcd_many([b for b in forms if not _bin_zero(b)])
            red = [_bin_divide(b, g) if not _bin_zero(b) else b for b in forms]
            if all(_bin_degree(b) in (None, 0) for b in red):
                vals = [_bin_const(b) for b in red]
                return True, CPoint([v.to_complex() for v in vals], exact=vals), forms
            return False, None, forms
        raise ValueError("restrict_to_line needs exact anchor points")

    def to_sympy(self):
        return [c.to_sympy() for c in self.components]

    def __repr__(self):
        return "[" + " : ".join(repr(c) for c in self.components) + "]"


def _exact_divide(p: HPoly, g: HPoly) -> HPoly:
    """Divide p by a known exact factor g."""
    if p.is_zero():
        return p
    import sympy
    from .polycore import _X
    q, r = sympy.div(p.to_sympy(), g.to_sympy(), *_X, domain="QQ_I")
    if sympy.expand(r) != 0:
        raise ArithmeticError("inexact polynomial division")
    return HPoly.from_sympy(q)


# -- binary forms in (s, t), represented as dict (es, et) -> GaussRat --------

def _binary_restrict_exact(c: HPoly, pe, qe):
    out = {}
    # expand c(s*p + t*q) by substituting each variable
    # xi -> s*p_i + t*q_i and collecting in (s, t)
    for e, coeff in c.terms.items():
        # multinomial expansion per variable
        parts = [{(0, 0): GaussRat(1)}]
        for i in range(3):
            cur = parts[-1]
            for _ in range(e[i]):
                nxt = {}
                for (a, b), v in cur.items():
                    if pe[i]:
                        nxt[(a + 1, b)] = nxt.get((a + 1, b), GaussRat(0)) + v * pe[i]
                    if qe[i]:
                        nxt[(a, b + 1)] = nxt.get((a, b + 1), GaussRat(0)) + v * qe[i]
                cur = nxt
            parts[-1] = cur
        for (a, b), v in parts[-1].items():
            out[(a, b)] = out.get((a, b), GaussRat(0)) + coeff * v
    return {k: v for k, v in out.items() if v}


def _bin_zero(b):
    return not b


def _bin_degree(b):
    if not b:
        return None
    return max(a + c for a, c in b)


def _bin_to_hpoly(b):
    # reuse HPoly with x2 unused
    return HPoly({(a, c, 0): v for (a, c), v in b.items()})


def _hpoly_to_bin(p):
    return {(e[0], e[1]): v for e, v in p.terms.items()}


def _bin_gcd_many(bs):
    from .polycore import poly_gcd
    acc = None
    for b in bs:
        h = _bin_to_hpoly(b)
        acc = h.monic() if acc is None else poly_gcd(acc, h)
        if acc.degree == 0:
            break
    return _hpoly_to_bin(acc)


def _bin_divide(b, g):
    return _hpoly_to_bin(_exact_divide(_bin_to_hpoly(b), _bin_to_hpoly(g)))


def _bin_const(b):
    if not b:
        return GaussRat(0)
    [(e, v)] = list(b.items())
    if e != (0, 0):
        raise ValueError("not a constant binary form")
    return v


# -- stock maps --------------------------------------------------------------

def sigma() -> RatMap:
    return RatMap([HPoly.monomial(0, 1, 1), HPoly.monomial(1, 0, 1),
                   HPoly.monomial(1, 1, 0)])


def rho() -> RatMap:
    return RatMap([HPoly.monomial(1, 1, 0), HPoly.monomial(0, 0, 2),
                   HPoly.monomial(0, 1, 1)])


def tau() -> RatMap:
    return RatMap([HPoly.monomial(2, 0, 0), HPoly.monomial(1, 1, 0),
                   HPoly.monomial(0, 2, 0) - HPoly.monomial(1, 0, 1)])


def identity_map() -> RatMap:
    return RatMap([HPoly.variable(0), HPoly.variable(1), HPoly.variable(2)])


def linear_map(rows) -> RatMap:
    """Linear map from a 3x3 exact matrix of coefficients."""
    comps = []
    for row in rows:
        comps.append(HPoly.linear_form(row[0], row[1], row[2]))
    return RatMap(comps)
