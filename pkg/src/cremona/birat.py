"""Birationality tests, strata, inverses and normal forms for quadratic maps.

A quadratic map Q of P^2 is birational exactly when its Jacobian determinant
splits into contracted lines; equivalently when the 10x9 coefficient matrix
M(Q) of the linear-relation system has rank at most 7.  Both routes are
implemented and cross-checked.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .polycore import (
    GaussRat,
    HPoly,
    CPoint,
    DEFAULT_SEED,
    exact_matrix_rank,
    exact_nullspace,
    exact_inverse,
    poly_gcd,
    poly_gcd_many,
    resultant,
    complex_roots,
    rationalize,
)
from .ratmap import RatMap, sigma, rho, tau, identity_map, linear_map

__all__ = [
    "RelationSpace", "ClassReport", "NOT_BIRATIONAL", "NOT_CONTRACTED",
    "relation_space", "matrix_M", "is_birational_quadratic",
    "wedge_construct", "classify_quadratic", "ind_points",
    "inverse_quadratic", "invariant_line_test", "normal_form_sigma3",
    "sigma_conjugate_degree", "vanishing_order", "fixed_points",
]

NOT_BIRATIONAL = "NOT_BIRATIONAL"
NOT_CONTRACTED = "NOT_CONTRACTED"

_Z = GaussRat(0)
_O = GaussRat(1)


# -- relation space ----------------------------------------------------------

@dataclass(frozen=True)
class RelationSpace:
    """Basis of 3x3 matrices L with sum_i L_i(x) * f_i(x) = 0."""
    basis: tuple
    dim: int


def relation_space(f: RatMap) -> RelationSpace:
    """Solve L0*f0 + L1*f1 + L2*f2 = 0 for linear forms L_i, exactly."""
    d = f.degree + 1
    # unknowns: L_i = a_i x0 + b_i x1 + c_i x2, ordered (a0,b0,c0,a1,...)
    cols = []
    for i in range(3):
        for v in range(3):
            cols.append(HPoly.variable(v) * f.components[i])
    monos = sorted({e for p in cols for e in p.terms})
    rows = [[cols[j].coeff_of(*e) for j in range(9)] for e in monos]
    null = exact_nullspace(rows)
    basis = tuple(tuple(tuple(vec[3 * i + v] for v in range(3)) for i in range(3))
                  for vec in null)
    return RelationSpace(basis=basis, dim=len(basis))


def _quad_coeffs(q: HPoly):
    """Coefficients (A,B,C,D,E,F) on the basis x0^2,x1^2,x2^2,x1x2,x0x2,x0x1."""
    return (q.coeff_of(2, 0, 0), q.coeff_of(0, 2, 0), q.coeff_of(0, 0, 2),
            q.coeff_of(0, 1, 1), q.coeff_of(1, 0, 1), q.coeff_of(1, 1, 0))


def matrix_M(Q: RatMap):
    """The 10x9 matrix of the relation system for a quadratic map, and its rank."""
    if Q.degree != 2:
        raise ValueError("matrix_M needs a quadratic map")
    A, B, C, D, E, F = zip(*(_quad_coeffs(c) for c in Q.components))
    Z = _Z
    m = [
        [A[0], Z, Z, A[1], Z, Z, A[2], Z, Z],
        [Z, B[0], Z, Z, B[1], Z, Z, B[2], Z],
        [Z, Z, C[0], Z, Z, C[1], Z, Z, C[2]],
        [B[0], F[0], Z, B[1], F[1], Z, B[2], F[2], Z],
        [F[0], A[0], Z, F[1], A[1], Z, F[2], A[2], Z],
        [C[0], Z, E[0], C[1], Z, E[1], C[2], Z, E[2]],
        [E[0], Z, A[0], E[1], Z, A[1], E[2], Z, A[2]],
        [Z, C[0], D[0], Z, C[1], D[1], Z, C[2], D[2]],
        [Z, D[0], B[0], Z, D[1], B[1], Z, D[2], B[2]],
        [D[0], E[0], F[0], D[1], E[1], F[1], D[2], E[2], F[2]],
    ]
    return m, exact_matrix_rank(m)


# -- geometric route: factored Jacobian ---------------------------------------

def _line_points(line: HPoly):
    """Two distinct exact points spanning the line a*x0+b*x1+c*x2 = 0."""
    a = line.coeff_of(1, 0, 0)
    b = line.coeff_of(0, 1, 0)
    c = line.coeff_of(0, 0, 1)
    pts = []
    for p in ((_Z, c, -b), (c, _Z, -a), (b, -a, _Z)):
        if any(p) and all(not q.same_point(CPoint.exact_point(*p)) for q in pts):
            pts.append(CPoint.exact_point(*p))
        if len(pts) == 2:
            return pts
    raise ValueError("degenerate line")


def exceptional_components(Q: RatMap):
    """Factors of det jac with multiplicity, contraction flag and image point."""
    jac = Q.det_jacobian()
    if jac.is_zero():
        return None
    out = []
    for fac, mult in jac.factor_list():
        if fac.degree == 1:
            p, q = _line_points(fac)
            contracted, image, _ = Q.restrict_to_line(p, q)
            out.append((fac, mult, image if contracted else NOT_CONTRACTED))
        else:
            out.append((fac, mult, NOT_CONTRACTED))
    return out


def is_birational_quadratic(Q: RatMap):
    """Rank test cross-checked against line contraction; returns (bool, witness).

    The witness lists (line factor, multiplicity, image point or
    NOT_CONTRACTED); for a degenerate map (det jac = 0) it is the string
    "degenerate".
    """
    if Q.degree != 2:
        raise ValueError("is_birational_quadratic needs a quadratic map")
    exc = exceptional_components(Q)
    if exc is None:
        return False, "degenerate"
    _, rank = matrix_M(Q)
    by_rank = rank <= 7
    by_geometry = all(f.degree == 1 and img is not NOT_CONTRACTED
                      for f, _, img in exc)
    if by_rank != by_geometry:
        raise ArithmeticError(
            f"rank test (rank={rank}) disagrees with contraction test on {Q!r}")
    return by_rank, exc


# -- determinantal construction ----------------------------------------------

def wedge_construct(L, Lp) -> RatMap:
    """Quadratic map with components f_i = L_j L'_k - L_k L'_j (cyclic)."""
    l = [HPoly.linear_form(*row) for row in L]
    lp = [HPoly.linear_form(*row) for row in Lp]
    comps = [l[1] * lp[2] - l[2] * lp[1],
             l[2] * lp[0] - l[0] * lp[2],
             l[0] * lp[1] - l[1] * lp[0]]
    if all(c.is_zero() for c in comps):
        raise ValueError("wedge vanishes: the two matrices are proportional")
    return RatMap(comps, reduce=False)


# -- indeterminacy points ----------------------------------------------------

def vanishing_order(p: HPoly, pt: CPoint) -> int:
    """Order of vanishing of a form at an exact point."""
    if not pt.is_exact():
        raise ValueError("vanishing_order needs an exact point")
    e = pt.exact
    k = next(i for i in range(3) if e[i])
    # move the point to the k-th coordinate point
    cols = [[_O if i == j else _Z for i in range(3)] for j in range(3)]
    cols[k] = list(e)
    maps = [HPoly.linear_form(cols[0][i], cols[1][i], cols[2][i])
            for i in range(3)]
    g = p.substitute(maps)
    if g.is_zero():
        raise ValueError("form vanishes identically")
    return min(sum(ex) - ex[k] for ex in g.terms)


class IndPoints(list):
    """List of (CPoint, homaloidal order); carries base-point bookkeeping."""
    improper = False
    all_exact = True


def _random_matrix(rng):
    while True:
        m = [[GaussRat(rng.randint(-5, 5)) for _ in range(3)] for _ in range(3)]
        try:
            exact_inverse(m)
            return m
        except Exception:
            continue


def _mat_vec(m, v):
    return tuple(sum((m[i][j] * v[j] for j in range(3)), _Z) for i in range(3))


def _univariate_in(p: HPoly, var: int):
    """Coefficient list (descending) of a form depending on one variable only."""
    if p.is_zero():
        return []
    deg = max(e[var] for e in p.terms)
    coeffs = [GaussRat(0)] * (deg + 1)
    for e, c in p.terms.items():
        if sum(e) != e[var]:
            raise ValueError("not univariate")
        coeffs[deg - e[var]] = c
    return coeffs


def common_zeros(polys, seed=DEFAULT_SEED):
    """Common projective zeros of homogeneous polys, via resultant elimination.

    Candidate directions come from the resultant of two seeded generic
    combinations (components often share line factors pairwise, so pairwise
    resultants can vanish identically); candidates are then filtered against
    every component.  Points are exact whenever the eliminant splits over Q(i).
    """
    rng = random.Random(seed)
    polys = [p for p in polys if not p.is_zero()]
    if len(polys) < 2:
        raise ValueError("need at least two nonzero polynomials")
    for _ in range(12):
        T = _random_matrix(rng)
        g = [_pullback(p, T) for p in polys]
        h1, h2 = (_combo(g, rng), _combo(g, rng))
        if h1.is_zero() or h2.is_zero():
            continue
        if poly_gcd(h1, h2).degree != 0:
            if poly_gcd_many(g).degree != 0:
                raise ValueError("positive-dimensional common zero set")
            continue
        if max(e[2] for e in h1.terms) == 0 or max(e[2] for e in h2.terms) == 0:
            continue
        G = resultant(h1, h2, 2)
        if G.is_zero():
            continue
        if G.degree == 0:
            return []
        pts = _zeros_from_eliminant(G.monic(), g, T)
        if pts is not None:
            return _verified_points(pts, polys)
    raise ArithmeticError("no generic coordinate change found")


def _verified_points(pts, polys, tol=1e-5):
    """Keep only points annihilating every poly.

    An exact point that fails exactly but passes numerically is a rationalizing
    artifact (a continued-fraction convergent of an irrational coordinate can
    beat any float tolerance): it is demoted to a numeric point, not dropped.
    """
    out = []
    for p in pts:
        if p.is_exact() and all(not q.eval_exact(p.exact) for q in polys):
            out.append(p)
            continue
        z = p.coords
        ok = True
        for q in polys:
            norm = max(abs(c.to_complex()) for c in q.terms.values())
            if abs(q.eval_complex(z)) > tol * max(1.0, norm):
                ok = False
                break
        if ok:
            out.append(CPoint(z))
    return out


def _combo(g, rng):
    acc = HPoly.zero()
    for p in g:
        acc = acc + p * GaussRat(rng.randint(-9, 9), rng.randint(-9, 9))
    return acc


def _pullback(p: HPoly, m) -> HPoly:
    maps = [HPoly.linear_form(m[i][0], m[i][1], m[i][2]) for i in range(3)]
    return p.substitute(maps)


def _zeros_from_eliminant(G, g, T):
    pts = []
    for fac, _ in G.factor_list():
        if fac.degree == 1:
            u, v = fac.coeff_of(0, 1, 0), -fac.coeff_of(1, 0, 0)
            for w in _fiber_exact(g, u, v):
                pts.append(_point_back(T, (u, v, w), exact=True))
        else:
            coeffs = _bin_coeffs(fac)
            for z, _ in complex_roots([c.to_complex() for c in coeffs]):
                # the factor was divided by x0^k implicitly; roots are x1/x0
                uc, vc = 1.0, z
                ws = _fiber_numeric(g, uc, vc)
                for w in ws:
                    pts.append(_point_back(T, (uc, vc, w), exact=False))
            if fac.coeff_of(0, fac.degree, 0) == GaussRat(0):
                for w in _fiber_numeric(g, 0.0, 1.0):
                    pts.append(_point_back(T, (0.0, 1.0, w), exact=False))
    # deduplicate
    out = []
    for p in pts:
        if all(not p.same_point(q) for q in out):
            out.append(p)
    return out


def _bin_coeffs(fac):
    # descending coefficients of the binary (x0,x1)-form as a poly in x1/x0
    d = fac.degree
    return [fac.coeff_of(d - k, k, 0) for k in range(d, -1, -1)]


def _restrict_coeffs(p: HPoly, u: GaussRat, v: GaussRat):
    """Descending coefficients in x2 of p(u, v, x2)."""
    deg = max(e[2] for e in p.terms)
    coeffs = [GaussRat(0)] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[deg - e[2]] = coeffs[deg - e[2]] + c * u ** e[0] * v ** e[1]
    while coeffs and not coeffs[0]:
        coeffs.pop(0)
    return coeffs


def _fiber_exact(g, u, v):
    """Exact common roots in x2 of g_i(u, v, x2)."""
    import sympy
    x = sympy.Symbol("t")
    polys = []
    for p in g:
        coeffs = _restrict_coeffs(p, u, v)
        if not coeffs:
            continue
        polys.append(sympy.Poly([c.to_sympy() for c in coeffs], x,
                                domain="QQ_I"))
    if not polys:
        raise ValueError("line of common zeros: map is not reduced")
    gcd = polys[0]
    for q in polys[1:]:
        gcd = gcd.gcd(q)
    roots = []
    if gcd.degree() == 0:
        return roots
    for r, _ in sympy.roots(gcd, x).items():
        val = sympy.nsimplify(r)
        try:
            roots.append(GaussRat.from_sympy(sympy.Rational(sympy.re(val))
                                             + sympy.I * sympy.Rational(sympy.im(val))))
        except Exception:
            roots.append(complex(r))
    if sum(m for _, m in sympy.roots(gcd, x).items()) < gcd.degree():
        # roots not expressible: fall back to numerics for the rest
        cs = [complex(c.evalf()) for c in gcd.all_coeffs()]
        for z, _ in complex_roots(cs):
            if all(not _close(z, r) for r in roots):
                roots.append(z)
    return roots


def _close(a, b, tol=1e-7):
    try:
        return abs(complex(a) - _to_c(b)) < tol
    except TypeError:
        return False


def _to_c(b):
    return b.to_complex() if isinstance(b, GaussRat) else complex(b)


def _fiber_numeric(g, u, v, tol=1e-6):
    # numeric common roots in x2 of the restrictions: candidates come from the
    # first nondegenerate restriction, kept when the residual of every other
    # one is small (root-set matching is too brittle near multiple roots)
    restr = []
    for p in g:
        deg = max(e[2] for e in p.terms) if p.terms else 0
        coeffs = [0j] * (deg + 1)
        for e, c in p.terms.items():
            coeffs[deg - e[2]] += c.to_complex() * (u ** e[0]) * (v ** e[1])
        if max(abs(c) for c in coeffs) < 1e-12:
            continue
        restr.append(coeffs)
    if not restr:
        return []
    out = []
    for z, _ in complex_roots(restr[0]):
        ok = True
        for coeffs in restr[1:]:
            val = 0j
            for c in coeffs:
                val = val * z + c
            scale = max(abs(c) for c in coeffs) * max(1.0, abs(z)) ** (len(coeffs) - 1)
            if abs(val) > tol * scale:
                ok = False
                break
        if ok:
            out.append(z)
    return out


def _point_back(T, uvw, exact):
    if exact and all(isinstance(c, GaussRat) for c in uvw):
        v = _mat_vec(T, uvw)
        return CPoint.exact_point(*v)
    vec = [complex(_to_c(c)) for c in uvw]
    out = [sum(T[i][j].to_complex() * vec[j] for j in range(3))
           for i in range(3)]
    ex = [rationalize(z) for z in out]
    if all(e is not None for e in ex):
        return CPoint.exact_point(*ex)
    return CPoint(out)


def _net_order(f: RatMap, pt: CPoint, rng) -> int:
    """Vanishing order of the generic member of the net spanned by f."""
    draws = []
    while len(draws) < 3:
        coeffs = [GaussRat(rng.randint(-9, 9), rng.randint(-9, 9))
                  for _ in range(3)]
        comb = HPoly.zero()
        for c, comp in zip(coeffs, f.components):
            comb = comb + comp * c
        if comb.is_zero():
            continue
        draws.append(vanishing_order(comb, pt))
        if len(draws) >= 2 and draws[-1] == draws[-2]:
            return draws[-1]
    return min(draws)


def ind_points(f: RatMap, seed=DEFAULT_SEED) -> IndPoints:
    """Indeterminacy points with homaloidal orders; checks the base-point sums."""
    out = IndPoints()
    if f.degree == 1:
        return out
    pts = common_zeros(list(f.components), seed=seed)
    rng = random.Random(seed + 1)
    for p in pts:
        if p.is_exact():
            out.append((p, _net_order(f, p, rng)))
        else:
            out.all_exact = False
            out.append((p, None))
    n = f.degree
    if out.all_exact:
        s1 = sum(mu for _, mu in out)
        s2 = sum(mu * mu for _, mu in out)
        out.improper = not (s1 == 3 * n - 3 and s2 == n * n - 1)
    else:
        out.improper = None  # undetermined
    return out


# -- classification ----------------------------------------------------------

@dataclass
class ClassReport:
    degree: int
    stratum: str
    ind_points: list = field(default_factory=list)
    exc_components: list = field(default_factory=list)

    def to_record(self):
        lines = [f"degree={self.degree}", f"stratum={self.stratum}"]
        lines.append(f"ind_count={len(self.ind_points)}")
        for p, mult, order in self.ind_points:
            lines.append(f"ind_point={p} fol_mult={mult} order={order}")
        for fac, mult, img in self.exc_components:
            tgt = "NOT_CONTRACTED" if img is NOT_CONTRACTED else str(img)
            lines.append(f"exc={fac!r} mult={mult} image={tgt}")
        return "\n".join(lines)


def classify_quadratic(Q: RatMap) -> ClassReport:
    """Stratum of a degree-<=2 map: Sigma0..Sigma3 or NOT_BIRATIONAL."""
    if Q.degree == 1:
        return ClassReport(degree=1, stratum="Sigma0")
    ok, exc = is_birational_quadratic(Q)
    if not ok:
        return ClassReport(degree=2, stratum=NOT_BIRATIONAL,
                           exc_components=[] if exc == "degenerate" else exc)
    pts = ind_points(Q)
    # cross-check the count against the multiplicity pattern of det jac
    mult_pattern = sorted(m for _, m, _ in exc)
    by_pattern = {(1, 1, 1): 3, (1, 2): 2, (3,): 1}[tuple(mult_pattern)]
    if len(pts) != by_pattern:
        raise ArithmeticError(
            f"indeterminacy count {len(pts)} vs Jacobian pattern {mult_pattern}")
    from .foliation import foliation_of, point_multiplicity
    om = foliation_of(Q)
    enriched = []
    for p, order in pts:
        try:
            mult = point_multiplicity(om, p) if p.is_exact() else None
        except (ValueError, ArithmeticError):
            # with a fixed curve the reduced foliation can miss the point
            mult = None
        enriched.append((p, mult, order))
    return ClassReport(degree=2, stratum=f"Sigma{len(pts)}",
                       ind_points=enriched, exc_components=exc)


# -- fixed points -------------------------------------------------------------

def fixed_points(f: RatMap, seed=DEFAULT_SEED):
    """Fixed points of f (indeterminacy points excluded)."""
    x = [HPoly.variable(i) for i in range(3)]
    c = f.components
    minors = [x[1] * c[2] - x[2] * c[1],
              x[2] * c[0] - x[0] * c[2],
              x[0] * c[1] - x[1] * c[0]]
    if all(m.is_zero() for m in minors):
        raise ValueError("identity map: every point is fixed")
    pts = common_zeros([m for m in minors if not m.is_zero()], seed=seed)
    ind = common_zeros(list(c), seed=seed) if f.degree > 1 else []
    return [p for p in pts if all(not p.same_point(q) for q in ind)]


# -- inverse -----------------------------------------------------------------

def _monomials(d):
    return [(i, j, d - i - j) for i in range(d + 1) for j in range(d + 1 - i)]


def inverse_by_linear_solve(Q: RatMap, inv_degree=None):
    """Inverse of a birational map as the nullspace of R_i(Q) = h * x_i."""
    d = Q.degree
    degrees = [inv_degree] if inv_degree else range(1, d + 1)
    for dd in degrees:
        monos = _monomials(dd)
        prods = {e: (Q.components[0] ** e[0]) * (Q.components[1] ** e[1])
                 * (Q.components[2] ** e[2]) for e in monos}
        hmonos = _monomials(dd * d - 1)
        ncols = 3 * len(monos) + len(hmonos)
        eqmonos = _monomials(dd * d)
        rows = []
        for i in range(3):
            for em in eqmonos:
                row = [_Z] * ncols
                for k, e in enumerate(monos):
                    row[i * len(monos) + k] = prods[e].coeff_of(*em)
                for k, hm in enumerate(hmonos):
                    shifted = list(hm)
                    shifted[i] += 1
                    if tuple(shifted) == em:
                        row[3 * len(monos) + k] = -_O
                rows.append(row)
        null = exact_nullspace(rows)
        for vec in null:
            comps = []
            for i in range(3):
                terms = {e: vec[i * len(monos) + k]
                         for k, e in enumerate(monos)
                         if vec[i * len(monos) + k]}
                comps.append(HPoly(terms))
            if any(not c.is_zero() for c in comps):
                R = RatMap(comps)
                if R.compose(Q).is_identity():
                    return R
    raise ArithmeticError("no inverse found: map is not birational")


def _rationalized(p: CPoint, tol=1e-9):
    if p.is_exact():
        return p, True
    ex = [rationalize(z, tol=tol) for z in p.coords]
    if all(e is not None for e in ex):
        return CPoint.exact_point(*ex), True
    from fractions import Fraction
    approx = [GaussRat(Fraction(z.real).limit_denominator(10 ** 12),
                       Fraction(z.imag).limit_denominator(10 ** 12))
              for z in p.coords]
    return CPoint.exact_point(*approx), False


def inverse_quadratic(Q: RatMap, stratum=None):
    """Inverse of a birational quadratic map.

    Normalizes Q to A∘m∘C⁻¹ with m one of the three models (sigma, rho, tau
    according to the stratum) and returns (C∘m∘A⁻¹, exact_flag).  The flag is
    False when the indeterminacy points had to be approximated; such inverses
    are numeric and skip the exact composition check.
    """
    if Q.degree == 1:
        return linear_map(exact_inverse(_linear_matrix(Q))), True
    if stratum is None:
        stratum = classify_quadratic(Q).stratum
    if stratum == NOT_BIRATIONAL:
        raise ValueError("map is not birational")
    ok, exc = is_birational_quadratic(Q)
    pts = [p for p, _ in ind_points(Q)]
    exact = True
    rational_pts = []
    for p in pts:
        q, flag = _rationalized(p)
        exact = exact and flag
        rational_pts.append(q)
    try:
        inv = _inverse_by_model(Q, stratum, rational_pts, exc)
    except ArithmeticError:
        inv = None
    if inv is not None and (not exact or inv.compose(Q).is_identity()):
        return inv, exact
    # fall back on the direct linear solve
    return inverse_by_linear_solve(Q, inv_degree=2), exact


def _linear_matrix(Q: RatMap):
    return [[Q.components[i].coeff_of(*(tuple(1 if k == j else 0
                                              for k in range(3))))
             for j in range(3)] for i in range(3)]


def _inverse_by_model(Q, stratum, pts, exc):
    if stratum == "Sigma3":
        model = sigma()
        cols = [list(p.exact) for p in pts]
    elif stratum == "Sigma2":
        model = rho()
        double = next(f for f, m, _ in exc if m == 2)
        simple = next(f for f, m, _ in exc if m == 1)
        # p sits on both exceptional lines, q only on the double one
        on_both = [p for p in pts if _on_line(double, p) and _on_line(simple, p)]
        others = [p for p in pts if p not in on_both]
        if len(on_both) != 1 or len(others) != 1:
            raise ArithmeticError("unexpected Sigma2 incidence")
        r = next(pt for pt in _line_points(simple)
                 if not pt.same_point(on_both[0]))
        cols = [list(on_both[0].exact), list(others[0].exact), list(r.exact)]
    elif stratum == "Sigma1":
        model = tau()
        triple = next(f for f, m, _ in exc if m == 3)
        p = pts[0]
        q = next(pt for pt in _line_points(triple) if not pt.same_point(p))
        # a point off the contracted line
        for cand in (CPoint.exact_point(_O, _Z, _Z),
                     CPoint.exact_point(_Z, _O, _Z),
                     CPoint.exact_point(_Z, _Z, _O)):
            if not _on_line(triple, cand):
                r = cand
                break
        cols = [list(r.exact), list(q.exact), list(p.exact)]
    else:
        raise ArithmeticError(f"no quadratic model for {stratum}")
    C = [[cols[j][i] for j in range(3)] for i in range(3)]
    Cmap = linear_map(C)
    A = Q.compose(Cmap).compose(model)
    if A.degree != 1:
        raise ArithmeticError("normalization did not linearize")
    Ainv = linear_map(exact_inverse(_linear_matrix(A)))
    return Cmap.compose(model).compose(Ainv)


def _on_line(line: HPoly, p: CPoint) -> bool:
    return not line.eval_exact(p.exact) if p.is_exact() \
        else abs(line.eval_complex(p.coords)) < 1e-9


# -- invariant lines ---------------------------------------------------------

_PERMS = list(itertools.permutations(range(3)))


def _permute_matrix(A, perm):
    return [[A[perm[i]][perm[j]] for j in range(3)] for i in range(3)]


def invariant_line_test(A):
    """Invariant lines of A∘sigma, via the chart criterion at each Ind point.

    Returns (found, lines) where each line is an HPoly vanishing on an
    invariant line, verified by exact restriction.
    """
    A = [[GaussRat.coerce(c) for c in row] for row in A]
    Asig = linear_map(A).compose(sigma())
    candidates = []
    for perm in _PERMS:
        B = _permute_matrix(A, perm)
        a0, b0, c0 = B[0]
        a1, b1, c1 = B[1]
        cond = a0 * c1 * c1 + c0 * c1 * (b0 - a1) - b1 * c0 * c0
        if cond:
            continue
        # lines x1 = t*x0 in the chart x2 = 1 (through (0:0:1))
        ts = []
        if not c0 and not c1:
            ts = _quadratic_roots(a0, b0 - a1, -b1)
        elif c0:
            ts = [c1 / c0]
        for t in ts:
            line = HPoly.linear_form(t, -_O, _Z)
            candidates.append(_unpermute_line(line, perm))
    verified = []
    for line in candidates:
        if _line_invariant(Asig, line) and line not in verified:
            verified.append(line)
    return bool(verified), verified


def _quadratic_roots(a, b, c):
    """Roots in Q(i) of a t^2 + b t + c, when they exist there."""
    if not a:
        return [-c / b] if b else []
    disc = b * b - a * c * GaussRat(4)
    root = _gauss_sqrt(disc)
    if root is None:
        return []
    two_a = a * GaussRat(2)
    return [(-b + root) / two_a, (-b - root) / two_a]


def _frac_sqrt(q):
    """Exact square root of a nonnegative Fraction, or None."""
    from fractions import Fraction
    from math import isqrt
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _gauss_sqrt(d: GaussRat):
    """A square root of d in Q(i), or None: solve (x+iy)^2 = a+ib."""
    from fractions import Fraction
    a, b = d.re, d.im
    if b == 0:
        r = _frac_sqrt(a)
        if r is not None:
            return GaussRat(r, 0)
        r = _frac_sqrt(-a)
        return GaussRat(0, r) if r is not None else None
    r = _frac_sqrt(a * a + b * b)
    if r is None:
        return None
    x = _frac_sqrt((a + r) / 2)
    if x is None or x == 0:
        return None
    return GaussRat(x, Fraction(b) / (2 * x))


def _unpermute_line(line: HPoly, perm):
    # the condition was checked on B = P A P^{-1}; pull the line back through P
    subbed = line.substitute([HPoly.variable(perm[i]) for i in range(3)])
    return subbed.monic()


def _line_invariant(f: RatMap, line: HPoly) -> bool:
    p, q = _line_points(line)
    contracted, image, forms = f.restrict_to_line(p, q)
    if contracted:
        return image.is_exact() and not line.eval_exact(image.exact)
    # line(f(s*p + t*q)) must vanish as a binary form
    a = line.coeff_of(1, 0, 0)
    b = line.coeff_of(0, 1, 0)
    c = line.coeff_of(0, 0, 1)
    total = {}
    for coeff, form in zip((a, b, c), forms):
        for e, v in form.items():
            total[e] = total.get(e, GaussRat(0)) + coeff * v
    return all(not v for v in total.values())


# -- Sigma3 normal form ------------------------------------------------------

def normal_form_sigma3(Q: RatMap):
    """Conjugate a Sigma3 map with 4 general-position fixed points to the
    6-parameter normal form; returns (coeffs dict, conjugator RatMap)."""
    fix = fixed_points(Q)
    if any(not p.is_exact() for p in fix):
        raise ValueError("fixed points are not rationalizable")
    if len(fix) != 4:
        raise ValueError(f"expected 4 fixed points, found {len(fix)}")
    for trio in itertools.combinations(fix, 3):
        m = [list(p.exact) for p in trio]
        if exact_matrix_rank(m) < 3:
            raise ValueError("three fixed points aligned: fixed-point curve")
    cols = [list(p.exact) for p in fix[:3]]
    T = [[cols[j][i] for j in range(3)] for i in range(3)]
    Tmap = linear_map(T)
    Tinv = linear_map(exact_inverse(T))
    QQ = Tinv.compose(Q).compose(Tmap)
    eta = [QQ.components[i].coeff_of(*(tuple(2 if k == i else 0
                                             for k in range(3))))
           for i in range(3)]
    if not all(eta):
        raise ValueError("degenerate fixed point at a coordinate point")
    D = [[eta[0].inv() if i == j == 0 else
          eta[1].inv() if i == j == 1 else
          eta[2].inv() if i == j == 2 else _Z for j in range(3)]
         for i in range(3)]
    Dmap = linear_map(D)
    Dinv = linear_map([[eta[i] if i == j else _Z for j in range(3)]
                       for i in range(3)])
    N = Dinv.compose(QQ).compose(Dmap)
    coeff = {}
    for i, comp in enumerate(N.components):
        coeff[f"A{i}"] = comp.coeff_of(0, 1, 1)
        coeff[f"B{i}"] = comp.coeff_of(1, 0, 1)
        coeff[f"C{i}"] = comp.coeff_of(1, 1, 0)
    det = coeff["A1"] * coeff["B0"] - coeff["A0"] * coeff["B1"]
    if not det:
        raise ValueError("A1*B0 - A0*B1 = 0: fixed points not generic")
    delta = det.inv()
    checks = {
        "A2": delta * (coeff["B0"] - coeff["A0"] * coeff["C1"]),
        "B2": delta * (coeff["A1"] - coeff["B1"] * coeff["C0"]),
        "C2": delta * (GaussRat(1) - coeff["C0"] * coeff["C1"]),
    }
    for k, v in checks.items():
        if coeff[k] != v:
            raise ArithmeticError(f"normal-form relation fails for {k}")
    conj = Tmap.compose(Dmap)
    return coeff, conj


# -- sigma conjugates of linear maps -----------------------------------------

def sigma_conjugate_degree(A):
    """Degree of reduce(sigma ∘ A ∘ sigma) and whether A has the f∘l∘g shape."""
    A = [[GaussRat.coerce(c) for c in row] for row in A]
    s = sigma()
    deg = s.compose(linear_map(A)).compose(s).degree
    matches = any(_has_model_shape(_permute_rows_cols(A, pf, pg))
                  for pf in _PERMS for pg in _PERMS)
    return deg, matches


def _permute_rows_cols(A, pf, pg):
    return [[A[pf[i]][pg[j]] for j in range(3)] for i in range(3)]


def _has_model_shape(B):
    # (x0 : a*x0 + b*x1 : c*x0 + d*x2) pattern, up to scale
    return (bool(B[0][0]) and not B[0][1] and not B[0][2]
            and bool(B[1][1]) and not B[1][2]
            and bool(B[2][2]) and not B[2][1])
