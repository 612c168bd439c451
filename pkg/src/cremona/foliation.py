"""The degree-d foliation attached to a rational map and its invariants.

A map f = (f0:f1:f2) induces the 1-form
(x1 f2 - x2 f1) dx0 + (x2 f0 - x0 f2) dx1 + (x0 f1 - x1 f0) dx2,
whose singular points are the fixed and indeterminacy points of f.  The
module computes the reduced form, singular points with multiplicities,
the Lefschetz-type fixed-point sums, Baum-Bott indices, and the finite
fiber of the map f -> F(f).
"""

from __future__ import annotations

import functools
import itertools
import random
from fractions import Fraction
from dataclasses import dataclass

from .polycore import (
    GaussRat,
    HPoly,
    CPoint,
    DEFAULT_SEED,
    exact_matrix_rank,
    exact_solve,
    exact_inverse,
    poly_gcd,
    poly_gcd_many,
    resultant,
    complex_roots,
)
from .ratmap import RatMap, INDETERMINATE, linear_map, sigma
from . import birat as _birat

__all__ = [
    "Foliation1Form", "SingularPoint", "foliation_of", "has_fixed_curve",
    "singular_points", "point_multiplicity", "guillot_sums", "baum_bott",
    "baum_bott_sum", "foliation_fiber_sigma", "count_preimages",
    "quadratic_from_points",
]

FIXED = "FIXED"
INDETERMINACY = "INDETERMINACY"

_Z = GaussRat(0)
_O = GaussRat(1)


@dataclass(frozen=True)
class Foliation1Form:
    omega: tuple          # three reduced HPoly coefficients
    gcd_part: HPoly       # common factor removed from the raw coefficients
    degree: int           # degree of the reduced foliation


@dataclass
class SingularPoint:
    location: CPoint
    kind: str
    multiplicity: int
    trace: complex = None        # tr(Df - id) when FIXED
    determinant: complex = None  # det(Df - id) when FIXED
    bb_index: complex = None


def foliation_of(f: RatMap) -> Foliation1Form:
    x = [HPoly.variable(i) for i in range(3)]
    c = f.components
    raw = (x[1] * c[2] - x[2] * c[1],
           x[2] * c[0] - x[0] * c[2],
           x[0] * c[1] - x[1] * c[0])
    if all(p.is_zero() for p in raw):
        raise ValueError("map is proportional to the identity")
    g = poly_gcd_many([p for p in raw if not p.is_zero()])
    if g.degree and g.degree > 0:
        from .ratmap import _exact_divide
        red = tuple(p if p.is_zero() else _exact_divide(p, g) for p in raw)
    else:
        red = raw
    euler = x[0] * red[0] + x[1] * red[1] + x[2] * red[2]
    if not euler.is_zero():
        raise ArithmeticError("Euler contraction does not vanish")
    deg = next(p.degree for p in red if not p.is_zero()) - 1
    return Foliation1Form(omega=red, gcd_part=g, degree=deg)


def has_fixed_curve(f: RatMap):
    F = foliation_of(f)
    if F.gcd_part.degree and F.gcd_part.degree > 0:
        return True, F.gcd_part
    return False, None


# -- singular locus ----------------------------------------------------------

@functools.lru_cache(maxsize=256)
def _singular_data(omega, seed):
    """List of (CPoint, multiplicity) for the common zeros of omega."""
    from .birat import common_zeros
    pts = common_zeros([p for p in omega if not p.is_zero()], seed=seed)
    return tuple((p, _local_multiplicity(omega, p, seed)) for p in pts)


def _dehomog_sympy(p: HPoly, k, i, j):
    import sympy
    u, v = sympy.symbols("u v")
    acc = sympy.Integer(0)
    for e, c in p.terms.items():
        acc += c.to_sympy() * u ** e[i] * v ** e[j]
    return sympy.expand(acc), u, v


def _local_multiplicity(omega, p: CPoint, seed):
    """Intersection multiplicity of the two chart 1-form coefficients at p.

    Exact resultant of the sheared chart pair; the vanishing order of the
    eliminant at the point's image is read off exactly for exact points and
    from root clustering otherwise.  Two shears must agree.
    """
    import sympy
    z = [complex(c) for c in p.coords]
    k = max(range(3), key=lambda m: abs(z[m]))
    i, j = [m for m in range(3) if m != k]
    a, u, v = _dehomog_sympy(omega[i], k, i, j)
    b, _, _ = _dehomog_sympy(omega[j], k, i, j)
    rng = random.Random(seed + 13)
    orders = []
    while len(orders) < 3:
        al, be, ga, de = (rng.randint(-5, 5) for _ in range(4))
        if al * de - be * ga == 0:
            continue
        U, V = sympy.symbols("U V")
        aa = sympy.expand(a.subs({u: al * U + be * V, v: ga * U + de * V},
                                 simultaneous=True))
        bb = sympy.expand(b.subs({u: al * U + be * V, v: ga * U + de * V},
                                 simultaneous=True))
        # a dropped V-degree means the eliminant picks up spurious roots
        # where the leading V-coefficient vanishes: redraw the shear
        if (sympy.degree(aa, V) != sympy.total_degree(a)
                or sympy.degree(bb, V) != sympy.total_degree(b)):
            continue
        r = sympy.expand(sympy.resultant(aa, bb, V))
        if r == 0:
            raise ArithmeticError("positive-dimensional singular locus")
        det = sympy.Rational(al * de - be * ga)
        if p.is_exact():
            u0 = (p.exact[i] / p.exact[k]).to_sympy()
            v0 = (p.exact[j] / p.exact[k]).to_sympy()
            U0 = (de * u0 - be * v0) / det
            shifted = sympy.Poly(sympy.expand(r.subs(U, U + U0)), U,
                                 domain="QQ_I")
            coeffs = shifted.all_coeffs()[::-1]  # ascending
            ordv = next(n for n, c in enumerate(coeffs) if c != 0)
        else:
            u0 = z[i] / z[k]
            v0 = z[j] / z[k]
            U0 = (de * u0 - be * v0) / complex(det)
            poly = sympy.Poly(r, U)
            cs = [complex(c) for c in poly.all_coeffs()]
            ordv = 0
            for root, mult in complex_roots(cs):
                if abs(root - U0) < 1e-5:
                    ordv += mult
        orders.append(ordv)
        if len(orders) >= 2 and orders[-1] == orders[-2]:
            return orders[-1]
    return min(orders)


def point_multiplicity(F: Foliation1Form, p: CPoint, seed=DEFAULT_SEED) -> int:
    for q, mult in _singular_data(F.omega, seed):
        if q.same_point(p):
            return mult
    raise ValueError(f"{p} is not a singular point of the foliation")


_CHARTS = ((2, 0, 1), (1, 0, 2), (0, 1, 2))  # (dehomogenized, coord1, coord2)


def _chart_for(p: CPoint, tol=1e-8):
    z = [complex(c) for c in p.coords]
    scale = max(abs(c) for c in z)
    for k, i, j in _CHARTS:
        if abs(z[k]) >= tol * scale:
            return k, i, j
    raise ArithmeticError("point at infinity of every chart")


def _affine_jacobian(f: RatMap, p: CPoint):
    """Jacobian of the chart representation of f at a fixed point (numeric)."""
    k, i, j = _chart_for(p)
    z = [complex(c) for c in p.coords]
    z = [c / z[k] for c in z]
    c = f.components
    vals = {m: c[m].eval_complex(z) for m in range(3)}
    d = {(m, v): c[m].partial(v).eval_complex(z) for m in range(3)
         for v in range(3)}
    fk = vals[k]
    if abs(fk) < 1e-12:
        raise ArithmeticError("image at infinity of the chart")
    jac = []
    for m in (i, j):
        row = []
        for v in (i, j):
            row.append((d[(m, v)] * fk - vals[m] * d[(k, v)]) / fk ** 2)
        jac.append(row)
    return jac


def singular_points(F: Foliation1Form, f: RatMap, seed=DEFAULT_SEED):
    data = _singular_data(F.omega, seed)
    total = sum(m for _, m in data)
    nu = F.degree
    if total != nu * nu + nu + 1:
        raise ArithmeticError(
            f"multiplicity sum {total} != {nu * nu + nu + 1}")
    out = []
    for p, mult in data:
        img = f.evaluate(p)
        if img is INDETERMINATE:
            sp = SingularPoint(location=p, kind=INDETERMINACY,
                               multiplicity=mult)
        else:
            if not img.same_point(p):
                raise ArithmeticError(f"singular point {p} neither fixed "
                                      "nor indeterminate")
            sp = SingularPoint(location=p, kind=FIXED, multiplicity=mult)
            try:
                j = _affine_jacobian(f, p)
                sp.trace = j[0][0] + j[1][1] - 2.0
                sp.determinant = ((j[0][0] - 1) * (j[1][1] - 1)
                                  - j[0][1] * j[1][0])
            except ArithmeticError:
                pass
        out.append(sp)
    return out


def multiplicity_by_perturbation(f: RatMap, p: CPoint, seed=DEFAULT_SEED,
                                 eps=GaussRat(Fraction(1, 10 ** 6)), radius=0.1):
    """Count the simple singular points a small generic perturbation splits
    a multiple singular point into (cross-check for multiplicities <= 4)."""
    rng = random.Random(seed + 7)
    pert = []
    for c in f.components:
        noise = HPoly({(e0, e1, f.degree - e0 - e1):
                       GaussRat(rng.randint(-3, 3)) * eps
                       for e0 in range(f.degree + 1)
                       for e1 in range(f.degree + 1 - e0)})
        pert.append(c + noise)
    from .birat import common_zeros
    F = foliation_of(RatMap(pert))
    pts = common_zeros([w for w in F.omega if not w.is_zero()], seed=seed)
    z = [complex(c) for c in p.coords]
    zk = max(range(3), key=lambda i: abs(z[i]))
    zn = [c / z[zk] for c in z]
    count = 0
    for q in pts:  # a generic perturbation leaves only simple points
        w = [complex(c) for c in q.coords]
        if abs(w[zk]) < 1e-9:
            continue
        wn = [c / w[zk] for c in w]
        if max(abs(a - b) for a, b in zip(zn, wn)) < radius:
            count += 1
    return count


# -- fixed-point sums --------------------------------------------------------

def guillot_sums(f: RatMap, seed=DEFAULT_SEED):
    """(S1, S2) = (sum tr(Df-id)/det(Df-id), sum 1/det(Df-id)) over Fix f."""
    fix = _birat.fixed_points(f, seed=seed)
    if len(fix) != 4:
        raise ValueError(f"expected 4 fixed points, found {len(fix)}")
    s1 = 0j
    s2 = 0j
    for p in fix:
        j = _affine_jacobian(f, p)
        tr = j[0][0] + j[1][1] - 2.0
        det = (j[0][0] - 1) * (j[1][1] - 1) - j[0][1] * j[1][0]
        s1 += tr / det
        s2 += 1.0 / det
    return s1, s2


# -- Baum-Bott ---------------------------------------------------------------

def _chi_jacobian(F: Foliation1Form, p: CPoint):
    """Jacobian of the chart-dual vector field chi = (-b, a) at p."""
    k, i, j = _chart_for(p)
    z = [complex(c) for c in p.coords]
    z = [c / z[k] for c in z]
    a, b = F.omega[i], F.omega[j]
    da = {v: a.partial(v).eval_complex(z) for v in (i, j)}
    db = {v: b.partial(v).eval_complex(z) for v in (i, j)}
    return [[-db[i], -db[j]], [da[i], da[j]]]


def baum_bott(F: Foliation1Form, p, seed=DEFAULT_SEED) -> complex:
    """Baum-Bott index tr^2/det of the dual field at a simple singular point."""
    loc = p.location if isinstance(p, SingularPoint) else p
    if point_multiplicity(F, loc, seed=seed) != 1:
        raise ValueError("Baum-Bott index undefined at a multiple point")
    j = _chi_jacobian(F, loc)
    tr = j[0][0] + j[1][1]
    det = j[0][0] * j[1][1] - j[0][1] * j[1][0]
    if abs(det) < 1e-12:
        raise ArithmeticError("degenerate linear part")
    return tr * tr / det


def baum_bott_sum(f: RatMap, seed=DEFAULT_SEED) -> complex:
    F = foliation_of(f)
    data = _singular_data(F.omega, seed)
    if any(m != 1 for _, m in data):
        raise ValueError("Baum-Bott sum needs simple singular points")
    return sum(baum_bott(F, p, seed=seed) for p, _ in data)


# -- the fiber of f -> F(f) --------------------------------------------------

def _eigenvalue_at(f: RatMap, p: CPoint):
    """eta with f(p) = eta * p (0 at indeterminacy points)."""
    if p.is_exact():
        vals = [c.eval_exact(p.exact) for c in f.components]
        k = max(range(3), key=lambda i: abs(p.exact[i].to_complex()))
        return vals[k] / p.exact[k]
    raise ValueError("eigenvalue recovery needs an exact point")


def count_preimages(f: RatMap, seed=DEFAULT_SEED, collect=False):
    """Number of birational quadratic g with F(g) = F(f), via g = f + l*id.

    For each of the C(7,3) triples of singular points of F(f), the unique
    linear form with l(m_i) = -eta_i is interpolated; the resulting map is
    counted when it is birational with indeterminacy exactly at the triple.
    Aligned triples are skipped.
    """
    F = foliation_of(f)
    data = _singular_data(F.omega, seed)
    if len(data) != 7 or any(m != 1 for _, m in data):
        raise ValueError("need 7 simple singular points")
    pts = [p for p, _ in data]
    if any(not p.is_exact() for p in pts):
        raise ValueError("singular points must be exact for the count")
    x = [HPoly.variable(i) for i in range(3)]
    count = 0
    found = []
    for trio in itertools.combinations(pts, 3):
        m = [list(p.exact) for p in trio]
        if exact_matrix_rank(m) < 3:
            continue  # aligned triple
        rhs = [-_eigenvalue_at(f, p) for p in trio]
        a, b, c = exact_solve(m, rhs)
        ell = HPoly.linear_form(a, b, c)
        comps = [f.components[i] + ell * x[i] for i in range(3)]
        if all(cmp.is_zero() for cmp in comps):
            continue
        g = RatMap(comps)
        if g.degree != 2:
            continue
        ok, _ = _birat.is_birational_quadratic(g)
        if not ok:
            continue
        # Ind g sits inside Sing F(g) = the 7 known points: test by evaluation
        ind = [p for p in pts if g.evaluate(p) is INDETERMINATE]
        if len(ind) == 3 and all(any(p.same_point(q) for q in ind)
                                 for p in trio):
            count += 1
            found.append(g)
    return (count, found) if collect else count


def foliation_fiber_sigma():
    """The five quadratic maps with the same foliation as sigma."""
    _, maps = count_preimages(sigma(), collect=True)
    return maps


# -- exact instance builder --------------------------------------------------

def _frame_matrix(p0, p1, p2, p3):
    """Linear map sending the standard frame e0,e1,e2,(1:1:1) to p0..p3."""
    m = [[p.exact[i] for p in (p0, p1, p2)] for i in range(3)]
    lam = exact_solve(m, list(p3.exact))
    return [[m[i][j] * lam[j] for j in range(3)] for i in range(3)]


def quadratic_from_points(ind_triple, fixed_quad):
    """Quadratic birational map with prescribed indeterminacy and fixed points.

    Both arguments are lists of exact CPoint in general position; the map is
    A ∘ C σ C^{-1} with C carrying the coordinate points to the triple and A
    interpolating the four fixed-point conditions.
    """
    p1, p2, p3 = ind_triple
    cols = [list(p.exact) for p in ind_triple]
    C = [[cols[j][i] for j in range(3)] for i in range(3)]
    s = linear_map(C).compose(sigma()).compose(linear_map(exact_inverse(C)))
    images = []
    for q in fixed_quad:
        r = s.evaluate(q)
        if r is INDETERMINATE or not r.is_exact():
            raise ValueError("fixed-point target degenerates")
        images.append(r)
    M1 = _frame_matrix(*images)
    M2 = _frame_matrix(*fixed_quad)
    A = [[sum((M2[i][k] * exact_inverse(M1)[k][j] for k in range(3)), _Z)
          for j in range(3)] for i in range(3)]
    return linear_map(A).compose(s)
