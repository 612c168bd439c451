"""Exact base-field arithmetic, homogeneous polynomials, resultants, roots.

The exact field is Q(i): Gaussian rationals with arbitrary-precision parts.
Homogeneous polynomials in x0, x1, x2 are stored sparsely as
exponent-triple -> coefficient maps.  Heavy elimination work (gcd,
resultants, factorization) is delegated to sympy over the same field;
linear algebra and numeric root finding are implemented here.
"""

from __future__ import annotations

import cmath
import random
from fractions import Fraction

import sympy

__all__ = [
    "GaussRat",
    "HPoly",
    "CPoint",
    "poly_gcd",
    "resultant",
    "complex_roots",
    "rationalize",
    "exact_matrix_rank",
    "exact_nullspace",
    "exact_solve",
    "exact_inverse",
    "RESIDUAL_TOL",
    "CLUSTER_RADIUS",
    "ITER_CAP",
    "DEFAULT_SEED",
]

RESIDUAL_TOL = 1e-10
CLUSTER_RADIUS = 1e-7
ITER_CAP = 200
DEFAULT_SEED = 20230517


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class GaussRat:
    """A Gaussian rational a + b*i with exact rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @staticmethod
    def coerce(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        raise TypeError(f"cannot coerce {x!r} to GaussRat")

    def __add__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussRat.coerce(other))

    def __rsub__(self, other):
        return GaussRat.coerce(other) + (-self)

    def __mul__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GaussRat":
        if n < 0:
            return self.inv() ** (-n)
        acc = GaussRat(1)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def inv(self) -> "GaussRat":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussRat")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inv()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inv()

    def __eq__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def to_sympy(self):
        return sympy.Rational(self.re.numerator, self.re.denominator) + sympy.I * sympy.Rational(
            self.im.numerator, self.im.denominator
        )

    @staticmethod
    def from_sympy(e) -> "GaussRat":
        e = sympy.expand(e)
        re, im = e.as_real_imag()
        return GaussRat(_as_fraction(sympy.nsimplify(re, rational=True)),
                        _as_fraction(sympy.nsimplify(im, rational=True)))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*i)"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)

_X = sympy.symbols("x0 x1 x2")


def _key_gradlex(exp):
    # graded-lex with x0 > x1 > x2: compare degree, then exponents
    return (sum(exp), exp)


class HPoly:
    """Sparse homogeneous polynomial in x0, x1, x2 over GaussRat.

    The zero polynomial has empty terms and degree None.
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms: dict):
        clean = {}
        deg = None
        for exp, c in terms.items():
            c = GaussRat.coerce(c)
            if not c:
                continue
            e = (int(exp[0]), int(exp[1]), int(exp[2]))
            if any(v < 0 for v in e):
                raise ValueError("negative exponent")
            d = sum(e)
            if deg is None:
                deg = d
            elif d != deg:
                raise ValueError("inhomogeneous term set")
            clean[e] = clean.get(e, ZERO) + c
        clean = {e: c for e, c in clean.items() if c}
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "degree", deg if clean else None)

    def __setattr__(self, name, value):
        raise AttributeError("HPoly is immutable")

    @staticmethod
    def zero() -> "HPoly":
        return HPoly({})

    @staticmethod
    def constant(c) -> "HPoly":
        return HPoly({(0, 0, 0): GaussRat.coerce(c)})

    @staticmethod
    def variable(i: int) -> "HPoly":
        e = [0, 0, 0]
        e[i] = 1
        return HPoly({tuple(e): ONE})

    @staticmethod
    def monomial(e0: int, e1: int, e2: int, c=1) -> "HPoly":
        return HPoly({(e0, e1, e2): GaussRat.coerce(c)})

    @staticmethod
    def linear_form(a, b, c) -> "HPoly":
        return HPoly({(1, 0, 0): GaussRat.coerce(a),
                      (0, 1, 0): GaussRat.coerce(b),
                      (0, 0, 1): GaussRat.coerce(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, HPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, HPoly):
            other = HPoly.constant(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch in add: {self.degree} vs {other.degree}")
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, ZERO) + c
        return HPoly(t)

    def __neg__(self):
        return HPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, HPoly):
            other = HPoly.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            c = GaussRat.coerce(other)
            return HPoly({e: k * c for e, k in self.terms.items()})
        if self.is_zero() or other.is_zero():
            return HPoly.zero()
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                t[e] = t.get(e, ZERO) + c1 * c2
        return HPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        r = HPoly.constant(1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def leading_term(self):
        """(exponent, coefficient) of the graded-lex leading term (x0>x1>x2)."""
        if self.is_zero():
            return None
        e = max(self.terms, key=_key_gradlex)
        return e, self.terms[e]

    def monic(self) -> "HPoly":
        lt = self.leading_term()
        if lt is None:
            return self
        return self * lt[1].inv()

    def partial(self, var: int) -> "HPoly":
        t = {}
        for e, c in self.terms.items():
            if e[var] == 0:
                continue
            ne = list(e)
            k = ne[var]
            ne[var] -= 1
            ne = tuple(ne)
            t[ne] = t.get(ne, ZERO) + c * k
        return HPoly(t)

    def eval_exact(self, p) -> GaussRat:
        """Evaluate at a triple of GaussRat (or int/Fraction)."""
        p = [GaussRat.coerce(v) for v in p]
        acc = ZERO
        for e, c in self.terms.items():
            v = c
            for i in range(3):
                for _ in range(e[i]):
                    v = v * p[i]
            acc = acc + v
        return acc

    def eval_complex(self, p) -> complex:
        acc = 0j
        for e, c in self.terms.items():
            acc += c.to_complex() * (p[0] ** e[0]) * (p[1] ** e[1]) * (p[2] ** e[2])
        return acc

    def substitute(self, maps: list) -> "HPoly":
        """Substitute xi -> maps[i] (each an HPoly of one common degree)."""
        if self.is_zero():
            return HPoly.zero()
        # cache powers
        pows = [{0: HPoly.constant(1)} for _ in range(3)]
        def pw(i, k):
            if k not in pows[i]:
                pows[i][k] = pw(i, k - 1) * maps[i]
            return pows[i][k]
        acc = HPoly.zero()
        for e, c in self.terms.items():
            term = HPoly.constant(c)
            for i in range(3):
                if e[i]:
                    term = term * pw(i, e[i])
            acc = acc + term if not acc.is_zero() else term
        return acc

    def coeff_of(self, e0, e1, e2) -> GaussRat:
        return self.terms.get((e0, e1, e2), ZERO)

    def to_sympy(self):
        acc = sympy.Integer(0)
        for e, c in self.terms.items():
            acc += c.to_sympy() * _X[0] ** e[0] * _X[1] ** e[1] * _X[2] ** e[2]
        return acc

    @staticmethod
    def from_sympy(expr) -> "HPoly":
        poly = sympy.Poly(sympy.expand(expr), *_X, domain="QQ_I")
        t = {}
        for e, c in poly.terms():
            cc = c.as_expr() if hasattr(c, "as_expr") else sympy.sympify(c)
            t[tuple(int(v) for v in e)] = GaussRat.from_sympy(cc)
        return HPoly(t)

    def factor_list(self):
        """Exact irreducible factorization over Q(i): [(HPoly, mult)].

        Real-coefficient input is factored over Q first and each factor then
        split over Q(i) separately; feeding sympy's Gaussian-rational
        factorizer a product of several factors at once can stall.
        """
        if self.is_zero():
            raise ValueError("factoring the zero polynomial")
        out = []
        if all(c.im == 0 for c in self.terms.values()):
            _, facs = sympy.factor_list(self.to_sympy(), *_X, domain="QQ")
            for f, m in facs:
                _, sub = sympy.factor_list(f, *_X, domain="QQ_I")
                for g, k in sub:
                    out.append((HPoly.from_sympy(g).monic(), int(m) * int(k)))
        else:
            _, facs = sympy.factor_list(self.to_sympy(), *_X, domain="QQ_I")
            for f, m in facs:
                out.append((HPoly.from_sympy(f).monic(), int(m)))
        return out

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for e in sorted(self.terms, key=_key_gradlex, reverse=True):
            c = self.terms[e]
            mono = "*".join(f"x{i}" + (f"^{e[i]}" if e[i] > 1 else "")
                            for i in range(3) if e[i])
            cs = repr(c)
            parts.append(cs + ("*" + mono if mono else ""))
        return " + ".join(parts)


def poly_arith(p: HPoly, q: HPoly, kind: str) -> HPoly:
    if kind == "add":
        return p + q
    if kind == "mul":
        return p * q
    raise ValueError(f"unknown kind {kind!r}")


def poly_gcd(p: HPoly, q: HPoly) -> HPoly:
    """Monic exact gcd of two homogeneous polynomials over Q(i)."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    # over QQ sympy uses the fast heuristic gcd; the Gaussian-rational domain
    # falls back to subresultant remainder sequences, orders of magnitude
    # slower -- so stay rational whenever the coefficients allow it
    real = all(not c.im for c in p.terms.values()) and \
        all(not c.im for c in q.terms.values())
    dom = "QQ" if real else "QQ_I"
    g = sympy.gcd(sympy.Poly(p.to_sympy(), *_X, domain=dom),
                  sympy.Poly(q.to_sympy(), *_X, domain=dom))
    return HPoly.from_sympy(g.as_expr()).monic()


def poly_gcd_many(polys) -> HPoly:
    acc = None
    for p in polys:
        if p.is_zero():
            continue
        acc = p.monic() if acc is None else poly_gcd(acc, p)
        if acc.degree == 0:
            return acc
    if acc is None:
        raise ValueError("gcd of all-zero family")
    return acc


def resultant(p: HPoly, q: HPoly, var: int) -> HPoly:
    """Sylvester resultant eliminating x_var; homogeneous in the others."""
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant with zero polynomial")
    if max(e[var] for e in p.terms) == 0 or max(e[var] for e in q.terms) == 0:
        raise ValueError("polynomial has degree 0 in the eliminated variable")
    r = sympy.resultant(p.to_sympy(), q.to_sympy(), _X[var])
    r = sympy.expand(r)
    if r == 0:
        return HPoly.zero()
    return HPoly.from_sympy(r)


def _horner(coeffs, z):
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def complex_roots(coeffs, residual_tol=RESIDUAL_TOL, cluster_radius=CLUSTER_RADIUS,
                  iter_cap=ITER_CAP, seed=DEFAULT_SEED):
    """Roots of a univariate complex polynomial (descending coefficients).

    Aberth–Ehrlich simultaneous iteration; nearby roots are merged into
    clusters with summed multiplicity.  Returns [(root, multiplicity)].
    """
    coeffs = [complex(c) for c in coeffs]
    while coeffs and abs(coeffs[0]) == 0:
        coeffs = coeffs[1:]
    if not coeffs:
        raise ValueError("zero polynomial has no well-defined roots")
    # strip roots at the origin
    zero_mult = 0
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
        zero_mult += 1
    n = len(coeffs) - 1
    out = []
    if zero_mult:
        out.append((0j, zero_mult))
    if n == 0:
        if not out and zero_mult == 0:
            return []
        return out
    lead = coeffs[0]
    mon = [c / lead for c in coeffs]
    dcoeffs = [mon[i] * (n - i) for i in range(n)]
    # Cauchy-style radius
    radius = 1.0 + max(abs(c) for c in mon[1:]) if n >= 1 else 1.0
    rng = random.Random(seed)
    zs = []
    for k in range(n):
        ang = 2 * cmath.pi * (k + 0.5) / n + 0.1 + 0.01 * rng.random()
        zs.append(0.5 * radius * cmath.exp(1j * ang))
    for _ in range(iter_cap):
        moved = 0.0
        for i in range(n):
            pz = _horner(mon, zs[i])
            dpz = _horner(dcoeffs, zs[i])
            if dpz == 0:
                zs[i] += (1e-8 + 1e-8j)
                moved = float("inf")
                continue
            newton = pz / dpz
            s = 0j
            for j in range(n):
                if j != i:
                    dz = zs[i] - zs[j]
                    if dz == 0:
                        dz = 1e-12
                    s += 1.0 / dz
            denom = 1.0 - newton * s
            step = newton / denom if denom != 0 else newton
            zs[i] -= step
            moved = max(moved, abs(step))
        if moved < 1e-14:
            break
    # cluster
    used = [False] * n
    scale = max(1.0, radius)
    for i in range(n):
        if used[i]:
            continue
        cluster = [zs[i]]
        used[i] = True
        changed = True
        while changed:
            changed = False
            center = sum(cluster) / len(cluster)
            for j in range(n):
                if not used[j] and abs(zs[j] - center) < cluster_radius * scale * 10:
                    cluster.append(zs[j])
                    used[j] = True
                    changed = True
        center = sum(cluster) / len(cluster)
        out.append((center, len(cluster)))
    # residual check on simple roots (multiple roots have tiny residual anyway)
    norm = max(abs(c) for c in mon)
    for root, mult in out:
        res = abs(_horner(mon, root)) / (norm * max(1.0, abs(root)) ** n)
        if res > residual_tol ** (1.0 / max(1, mult)) * 10:
            raise ArithmeticError(
                f"root finder failed to converge: residual {res:.3e} at {root}")
    return out


def rationalize(z: complex, tol=1e-9, max_den=10**6):
    """Best GaussRat approximation, or None if nothing close enough."""
    fr = Fraction(z.real).limit_denominator(max_den)
    fi = Fraction(z.imag).limit_denominator(max_den)
    if abs(float(fr) - z.real) <= tol and abs(float(fi) - z.imag) <= tol:
        return GaussRat(fr, fi)
    return None


class CPoint:
    """A point of P^2(C): numeric coordinates plus optional exact ones.

    Normalized so the coordinate of largest modulus equals 1.
    """

    __slots__ = ("coords", "exact")

    def __init__(self, coords, exact=None):
        coords = [complex(c) for c in coords]
        if all(abs(c) == 0 for c in coords):
            raise ValueError("all coordinates zero")
        if exact is not None:
            exact = [GaussRat.coerce(v) for v in exact]
            k = max(range(3), key=lambda i: abs(exact[i].to_complex()))
            inv = exact[k].inv()
            exact = [v * inv for v in exact]
            coords = [v.to_complex() for v in exact]
        else:
            k = max(range(3), key=lambda i: abs(coords[i]))
            coords = [c / coords[k] for c in coords]
        object.__setattr__(self, "coords", tuple(coords))
        object.__setattr__(self, "exact", tuple(exact) if exact is not None else None)

    def __setattr__(self, name, value):
        raise AttributeError("CPoint is immutable")

    @staticmethod
    def exact_point(a, b, c) -> "CPoint":
        return CPoint([0, 0, 1], exact=[a, b, c])

    def is_exact(self) -> bool:
        return self.exact is not None

    def same_point(self, other: "CPoint", tol=1e-7) -> bool:
        if self.exact is not None and other.exact is not None:
            # both normalized exactly: compare cross products
            a, b = self.exact, other.exact
            return all((a[i] * b[j] - a[j] * b[i]) == ZERO
                       for i in range(3) for j in range(i + 1, 3))
        a, b = self.coords, other.coords
        return max(abs(a[i] * b[j] - a[j] * b[i])
                   for i in range(3) for j in range(i + 1, 3)) < tol

    def __repr__(self):
        if self.exact is not None:
            return "(" + ":".join(repr(v) for v in self.exact) + ")"
        return "(" + ":".join(f"{c:.6g}" for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# exact linear algebra over Q(i)


def _coerce_matrix(rows):
    return [[GaussRat.coerce(v) for v in row] for row in rows]


def _row_echelon(m):
    """In-place Gaussian elimination; returns (echelon rows, pivot columns)."""
    m = [row[:] for row in m]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, nrows):
            if m[rr][c]:
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inv()
        m[r] = [v * inv for v in m[r]]
        for rr in range(nrows):
            if rr != r and m[rr][c]:
                f = m[rr][c]
                m[rr] = [a - f * b for a, b in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def exact_matrix_rank(rows) -> int:
    m = _coerce_matrix(rows)
    if not m:
        return 0
    _, pivots = _row_echelon(m)
    return len(pivots)


def exact_nullspace(rows):
    """Basis of the right nullspace, as lists of GaussRat."""
    m = _coerce_matrix(rows)
    if not m:
        return []
    ncols = len(m[0])
    ech, pivots = _row_echelon(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -ech[r][fc]
        basis.append(v)
    return basis


def exact_solve(rows, rhs):
    """Solve A x = b exactly; returns one solution or None."""
    m = _coerce_matrix(rows)
    b = [GaussRat.coerce(v) for v in rhs]
    aug = [row + [b[i]] for i, row in enumerate(m)]
    ncols = len(m[0])
    ech, pivots = _row_echelon(aug)
    for r in range(len(ech)):
        if all(not ech[r][c] for c in range(ncols)) and ech[r][ncols]:
            return None
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = ech[r][ncols]
    return x


def exact_inverse(rows):
    """Inverse of a square exact matrix; raises ValueError if singular."""
    m = _coerce_matrix(rows)
    n = len(m)
    aug = [m[i] + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    ech, pivots = _row_echelon(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in ech]
