"""Degree-3 birational maps: Jacobian factorization, exceptional-curve
configurations {1}-{15}, inverse pairs, and composition identities."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .polycore import (GaussRat, HPoly, CPoint, exact_nullspace, DEFAULT_SEED,
                       complex_roots)
from .ratmap import RatMap

__all__ = [
    "LINE", "CONIC", "Component", "ExcConfiguration",
    "factor_jacobian_cubic", "classify_cubic", "verify_inverse_pair",
    "verify_noether_decomposition", "canonical_models", "exc_component_count",
]

LINE = "LINE"
CONIC = "CONIC"


@dataclass
class Component:
    kind: str            # LINE or CONIC (irreducible degree-2 factor)
    poly: HPoly
    multiplicity: int
    contracted: bool = False
    image: CPoint = None
    smooth: bool = True   # CONIC only: nonzero symmetric determinant
    branches: list = None  # split CONIC only: [(coeffs, contracted, image)]


@dataclass
class ExcConfiguration:
    components: list
    incidences: dict = field(default_factory=dict)
    label: str = "UNMATCHED"
    signature: tuple = None


# -- factorization ------------------------------------------------------------

def _conic_matrix(q: HPoly):
    half = GaussRat(Fraction(1, 2))
    c = q.coeff_of
    return [[c(2, 0, 0), c(1, 1, 0) * half, c(1, 0, 1) * half],
            [c(1, 1, 0) * half, c(0, 2, 0), c(0, 1, 1) * half],
            [c(1, 0, 1) * half, c(0, 1, 1) * half, c(0, 0, 2)]]


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def factor_jacobian_cubic(f: RatMap):
    """Factor det jac of a degree-3 map into lines and conics.

    Returns [(HPoly factor, multiplicity)]; raises on a vanishing Jacobian
    or on an irreducible residual of degree > 2.
    """
    if f.degree != 3:
        raise ValueError(f"expected a degree-3 map, got degree {f.degree}")
    det = f.det_jacobian()
    if det.is_zero():
        raise ValueError("degenerate map: Jacobian determinant vanishes")
    out = []
    for fac, m in det.factor_list():
        if fac.degree > 2:
            raise ValueError(
                f"irreducible Jacobian factor of degree {fac.degree}: "
                "the map cannot be birational")
        out.append((fac, m))
    return out


# -- contraction tests --------------------------------------------------------

def _line_anchor_points(line: HPoly):
    coeffs = [line.coeff_of(1, 0, 0), line.coeff_of(0, 1, 0),
              line.coeff_of(0, 0, 1)]
    basis = exact_nullspace([coeffs])
    if len(basis) != 2:
        raise ValueError("degenerate line")
    return (CPoint.exact_point(*basis[0]), CPoint.exact_point(*basis[1]))


def _line_contraction(f: RatMap, line: HPoly):
    p, q = _line_anchor_points(line)
    contracted, img, _ = f.restrict_to_line(p, q)
    return contracted, img


def _points_on_conic(q: HPoly, count=4):
    """Numeric sample points of the conic q = 0."""
    pts = []
    t = 0
    guard = 0
    while len(pts) < count and guard < 60:
        guard += 1
        t += 1
        # slice with the line x1 = t*x2, x2 = 1 -> quadratic in x0
        a = complex(q.coeff_of(2, 0, 0).to_complex())
        b = (q.coeff_of(1, 1, 0) * GaussRat(t) + q.coeff_of(1, 0, 1)).to_complex()
        c = (q.coeff_of(0, 2, 0) * GaussRat(t * t)
             + q.coeff_of(0, 1, 1) * GaussRat(t)
             + q.coeff_of(0, 0, 2)).to_complex()
        if abs(a) > 1e-12:
            roots = complex_roots([a, b, c])
            for r, _ in roots:
                pts.append(CPoint((r, complex(t), 1.0)))
        elif abs(b) > 1e-12:
            pts.append(CPoint((-c / b, complex(t), 1.0)))
        if len(pts) >= count:
            break
    return pts[:count]


def _divisible(num: HPoly, den: HPoly) -> bool:
    _, rem = sympy.div(num.to_sympy(), den.to_sympy(),
                       *sympy.symbols("x0 x1 x2"), domain="QQ_I")
    return sympy.expand(rem) == 0


def _conic_contraction(f: RatMap, q: HPoly):
    from .birat import _rationalized
    from .ratmap import INDETERMINATE
    images = []
    # oversample: base points of f lying on the conic evaluate to
    # INDETERMINATE and must be skipped
    for p in _points_on_conic(q, count=14):
        img = f.evaluate(p)
        if img is not INDETERMINATE:
            images.append(img)
        if len(images) == 4:
            break
    if len(images) < 3:
        return False, None
    if not all(images[0].same_point(p, tol=1e-6) for p in images[1:]):
        return False, None
    cand, exact = _rationalized(images[0])
    if exact:
        # certify: cand x f must vanish identically on the conic
        c = f.components
        e = cand.exact
        cross = [c[j] * e[i] - c[i] * e[j]
                 for i, j in ((0, 1), (0, 2), (1, 2))]
        if all(p.is_zero() or _divisible(p, q) for p in cross):
            return True, cand
    return True, images[0]


# -- incidence geometry -------------------------------------------------------
#
# Incidence relations (tangency, concurrency, image alignment) are computed
# numerically with tolerances so that degenerate conics splitting into a
# conjugate pair of irrational lines fit the same signature as families whose
# line pair is rational.  Contraction of exact components stays certified
# exactly above.

@dataclass
class _Curve:
    """Signature-level curve: degenerate conics contribute two line entries."""
    kind: str
    coeffs: tuple          # LINE: complex coefficient triple, else None
    poly: HPoly            # None for an irrational branch line
    multiplicity: int
    contracted: bool
    image: CPoint


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _nkey(p: CPoint):
    return tuple((round(c.real, 6), round(c.imag, 6)) for c in p.coords)


def _num_line_points(l):
    """Two independent numeric points on the line l0*x0+l1*x1+l2*x2 = 0."""
    cands = sorted((_cross(l, e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))),
                   key=lambda v: -max(abs(c) for c in v))
    p = cands[0]
    for q in cands[1:]:
        if any(abs(c) > 1e-9 * max(1.0, max(abs(v) for v in q))
               for c in _cross(p, q)):
            return p, q
    raise ValueError("degenerate line")


def _split_degenerate_conic(q: HPoly):
    """Numeric line pair of a rank-2 conic: two complex coefficient triples."""
    import cmath
    c = {e: v.to_complex() for e, v in q.terms.items()}

    def cf(e0, e1, e2):
        return c.get((e0, e1, e2), 0j)

    sq = [cf(2, 0, 0), cf(0, 2, 0), cf(0, 0, 2)]
    i = max(range(3), key=lambda k: abs(sq[k]))
    if abs(sq[i]) < 1e-12:
        raise ValueError("conic has no square term: rational factor expected")
    j, k = [v for v in range(3) if v != i]

    def mono(a, b, c_):
        e = [0, 0, 0]
        e[i], e[j], e[k] = a, b, c_
        return cf(*e)

    A = sq[i]
    bj, bk = mono(1, 1, 0), mono(1, 0, 1)                # linear part B
    cjj, cjk, ckk = mono(0, 2, 0), mono(0, 1, 1), mono(0, 0, 2)
    # discriminant B^2 - 4AC is the square of a linear form s
    djj = bj * bj - 4 * A * cjj
    djk = 2 * bj * bk - 4 * A * cjk
    dkk = bk * bk - 4 * A * ckk
    if abs(djj) >= abs(dkk):
        alpha = cmath.sqrt(djj)
        beta = djk / (2 * alpha) if abs(alpha) > 1e-12 else cmath.sqrt(dkk)
    else:
        beta = cmath.sqrt(dkk)
        alpha = djk / (2 * beta)
    lines = []
    for sign in (1, -1):
        l = [0j, 0j, 0j]
        l[i] = 2 * A
        l[j] = bj + sign * alpha
        l[k] = bk + sign * beta
        lines.append(tuple(l))
    return lines


def _num_line_contraction(f: RatMap, l):
    """(contracted, image CPoint) for a numeric line, by triple sampling."""
    from .birat import _rationalized
    from .ratmap import INDETERMINATE
    p, q = _num_line_points(l)
    images = []
    for t in (0.318309886, 1.414213562, -2.718281828, 0.577215664, 3.0):
        pt = CPoint([a + t * b for a, b in zip(p, q)])
        img = f.evaluate(pt)
        if img is not INDETERMINATE:
            images.append(img)
        if len(images) == 3:
            break
    if len(images) < 3:
        return False, None
    if not all(images[0].same_point(v, tol=1e-6) for v in images[1:]):
        return False, None
    cand, exact = _rationalized(images[0])
    return True, (cand if exact else images[0])


def _num_tangent(l, conic: HPoly) -> bool:
    p, q = _num_line_points(l)
    np_ = max(abs(c) for c in p)
    nq = max(abs(c) for c in q)
    p = [c / np_ for c in p]
    q = [c / nq for c in q]
    A = conic.eval_complex(p)
    C = conic.eval_complex(q)
    M = conic.eval_complex([a + b for a, b in zip(p, q)]) - A - C
    scale = max(abs(v.to_complex()) for v in conic.terms.values())
    return abs(M * M - 4 * A * C) <= 1e-8 * scale * scale


def _num_vanishes(curve: _Curve, p: CPoint) -> bool:
    z = p.coords  # normalized: max modulus 1
    if curve.kind == LINE:
        l = curve.coeffs
        val = sum(a * b for a, b in zip(l, z))
        return abs(val) <= 1e-7 * max(abs(c) for c in l)
    scale = max(abs(v.to_complex()) for v in curve.poly.terms.values())
    return abs(curve.poly.eval_complex(z)) <= 1e-7 * scale


def _collinear(pts) -> bool:
    m = [p.coords for p in pts]
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    return abs(det) <= 1e-8


def analyze(f: RatMap) -> ExcConfiguration:
    """Components of Exc f with contraction data, incidences and signature."""
    comps = []
    curves = []
    for fac, mult in factor_jacobian_cubic(f):
        if fac.degree == 1:
            contracted, img = _line_contraction(f, fac)
            comps.append(Component(kind=LINE, poly=fac, multiplicity=mult,
                                   contracted=contracted, image=img))
            lc = tuple(v.to_complex() for v in
                       (fac.coeff_of(1, 0, 0), fac.coeff_of(0, 1, 0),
                        fac.coeff_of(0, 0, 1)))
            curves.append(_Curve(LINE, lc, fac, mult, contracted, img))
            continue
        if _det3(_conic_matrix(fac)):
            contracted, img = _conic_contraction(f, fac)
            comps.append(Component(kind=CONIC, poly=fac, multiplicity=mult,
                                   contracted=contracted, image=img,
                                   smooth=True))
            curves.append(_Curve(CONIC, None, fac, mult, contracted, img))
        else:
            branches = _split_degenerate_conic(fac)
            infos = [_num_line_contraction(f, l) for l in branches]
            # a split conic counts as contracted only when both of its lines
            # land on one common point
            both = all(c for c, _ in infos)
            same = both and infos[0][1].same_point(infos[1][1], tol=1e-6)
            comps.append(Component(kind=CONIC, poly=fac, multiplicity=mult,
                                   contracted=same, image=None, smooth=False,
                                   branches=[(l,) + info for l, info
                                             in zip(branches, infos)]))
            for l, (con, img) in zip(branches, infos):
                curves.append(_Curve(LINE, l, None, mult, con, img))

    lines = [c for c in curves if c.kind == LINE]
    conics = [c for c in curves if c.kind == CONIC]

    tangency = sorted(
        (ln.multiplicity, cn.multiplicity)
        for ln in lines for cn in conics if _num_tangent(ln.coeffs, cn.poly))

    # concurrency of the exceptional lines; note whether the meeting point
    # lies on a conic component
    meets = {}
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            pt = _cross(lines[a].coeffs, lines[b].coeffs)
            if max(abs(c) for c in pt) < 1e-9:
                continue
            cp = CPoint(pt)
            meets.setdefault(_nkey(cp), [cp, set()])[1].update((a, b))
    concurrency = sorted(
        (len(members), any(_num_vanishes(cn, cp) for cn in conics))
        for cp, members in meets.values() if len(members) >= 3)
    pairs_on_conic = sum(
        1 for cp, members in meets.values() if len(members) == 2
        and any(_num_vanishes(cn, cp) for cn in conics))

    # image-point coincidence pattern
    groups = {}
    for c in curves:
        if c.contracted and c.image is not None:
            groups.setdefault(_nkey(c.image), [c.image, []])[1].append(c)
    coincidence = sorted(
        tuple(sorted((m.kind, m.multiplicity) for m in members))
        for _, members in groups.values())
    images = [img for img, _ in groups.values()]

    # alignment of distinct image points
    aligned_triples = sum(
        1
        for a in range(len(images))
        for b in range(a + 1, len(images))
        for c in range(b + 1, len(images))
        if _collinear([images[a], images[b], images[c]]))

    # incidence of image points with the exceptional curves
    on_curve = sorted(
        sum(1 for c in curves if _num_vanishes(c, img)) for img in images)

    signature = (
        tuple(sorted((c.kind, c.multiplicity, c.contracted) for c in curves)),
        tuple(tangency),
        tuple(concurrency),
        pairs_on_conic,
        tuple(coincidence),
        aligned_triples,
        tuple(on_curve),
    )
    incidences = {
        "tangency": tangency,
        "concurrency": concurrency,
        "pairs_on_conic": pairs_on_conic,
        "image_coincidence": coincidence,
        "aligned_image_triples": aligned_triples,
        "images_on_curves": on_curve,
    }
    return ExcConfiguration(components=comps, incidences=incidences,
                            signature=signature)


def exc_component_count(f: RatMap) -> int:
    """Number of irreducible components of Exc f."""
    return len(factor_jacobian_cubic(f))


# -- the canonical-model corpus ----------------------------------------------

_DATA = os.path.join(os.path.dirname(__file__), "data", "cubic_models.txt")
_MODELS = None


def canonical_models():
    """[(RatMap, label, orbit_dim)] from the bundled corpus."""
    global _MODELS
    if _MODELS is None:
        from .cli import parse_map
        out = []
        with open(_DATA) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                expr, comment = line.split("#", 1)
                fields = dict(kv.split("=", 1) for kv in comment.split())
                out.append((parse_map(expr.strip()), fields["label"],
                            int(fields["orbit_dim"])))
        _MODELS = out
    return _MODELS


_SIGNATURES = None


def _signature_table():
    global _SIGNATURES
    if _SIGNATURES is None:
        table = {}
        for f, label, _ in canonical_models():
            sig = analyze(f).signature
            prev = table.get(sig)
            if prev is not None and prev != label:
                raise ArithmeticError(
                    f"signature collision between {prev} and {label}")
            table[sig] = label
        _SIGNATURES = table
    return _SIGNATURES


def classify_cubic(f: RatMap) -> ExcConfiguration:
    """Configuration label of a purely cubic birational map."""
    conf = analyze(f)
    for c in conf.components:
        if c.branches is not None:
            # the lines of a split conic must each be contracted, though not
            # necessarily to a common point
            if not all(con for _, con, _ in c.branches):
                raise ValueError("Jacobian component not contracted: "
                                 "map is not birational")
        elif not c.contracted:
            raise ValueError(
                "Jacobian component not contracted: map is not birational")
    conf.label = _signature_table().get(conf.signature, "UNMATCHED")
    return conf


# -- identity verification ----------------------------------------------------

# Composition identities bundled for verification: each entry states that the
# left-to-right composition of the first list equals that of the second.
# "SIGMA"/"RHO"/"TAU" denote the stock involutions, "ID" the identity map;
# everything else is a map expression in the CLI grammar.
_IDENTITY_SPECS = [
    # three-factor expression of rho through sigma
    ("rho-three-factor", ["RHO"],
     ["[x2-x1:x1-x0:x1]", "SIGMA", "[x1+x2:x2:x0]", "SIGMA",
      "[x0+x2:x1-x2:x2]"]),
    # five-factor expression of tau through sigma
    ("tau-five-factor", ["TAU"],
     ["[x1-x0:2*x1-x0:x2-x1+x0]", "SIGMA", "[x0+x2:x0:x1]", "SIGMA",
      "[-x1:x0+x2-3*x1:x0]", "SIGMA", "[x0+x2:x0:x1]", "SIGMA",
      "[x1-x0:-2*x0+x2:2*x0-x1]"]),
]

# the left-right isotropy of rho:
#   (g d x0 + b d x2 : a^2 x1 : a d x2) rho = rho (g x0 + b x2 : d x1 : a x2)
# at five sampled parameter tuples (a, b, g, d), a, g, d nonzero
_ISOTROPY_SAMPLES = [
    ("1", "0", "1", "1"), ("2", "1", "3", "1"), ("i", "2", "1", "2"),
    ("1/2", "-1", "2", "3"), ("3", "i", "1+i", "1"),
]
for _a, _b, _g, _d in _ISOTROPY_SAMPLES:
    _IDENTITY_SPECS.append((
        f"rho-isotropy({_a},{_b},{_g},{_d})",
        [f"[({_g})*({_d})*x0+({_b})*({_d})*x2:({_a})*({_a})*x1"
         f":({_a})*({_d})*x2]", "RHO"],
        ["RHO", f"[({_g})*x0+({_b})*x2:({_d})*x1:({_a})*x2]"]))

# degree-3 inverse pairs (each listed both ways round)
_INVERSE_PAIRS = [
    ("[x0*(x0^2+x1*x2):x1^3:x1*(x0^2+x1*x2)]",
     "[x0*x1*x2:x1*x2^2:x2^3-x0^2*x1]"),
    ("[x1^2*x2:x0*(x0*x2+x1^2):x1*(x0*x2+x1^2)]",
     "[x1*(x2^2-x0*x1):x2*(x2^2-x0*x1):x0*x2^2]"),
]
for _n, (_f, _g) in enumerate(_INVERSE_PAIRS, start=1):
    _IDENTITY_SPECS.append((f"cubic-inverse-pair-{_n}-fg", [_f, _g], ["ID"]))
    _IDENTITY_SPECS.append((f"cubic-inverse-pair-{_n}-gf", [_g, _f], ["ID"]))

# expressions of the canonical cubic models through sigma, rho, tau
_IDENTITY_SPECS += [
    ("model{1}", ["[x0*x2^2+x1^3:x1*x2^2:x2^3]"],
     ["[x0:x2:x1]", "RHO", "[x2:x1:x0]", "TAU", "[x2:x1:-x0]", "RHO",
      "[x0:x2:x1]"]),
    ("model{2}a", ["[x0*x2^2:x0^2*x1:x2^3]"],
     ["[x2:x1:x0]", "RHO", "[x2:x1:x0]", "RHO"]),
    ("model{2}b", ["[x0*x2^2:x0^3+x0*x1*x2:x2^3]"],
     ["[x2:x0:x1]", "RHO", "[x2:x1:x0]", "TAU", "[x2:x0:-x1]"]),
    ("model{2}c", ["[x0^2*x2:x0^3+x2^3+x0*x1*x2:x0*x2^2]"],
     ["[x1:x2:x0]", "TAU", "[x1:x0:-x2]", "TAU", "[x0:x2:-x1]"]),
    ("model{2}d", ["[x0^2*x2:x0^2*x1+x2^3:x0*x2^2]"],
     ["[x1:x0:x2]", "RHO", "[x0+x1:x0:x2]", "RHO", "[x2:x1:x0]", "RHO"]),
    ("model{2}e", ["[x0*x1*x2:x1*x2^2:x2^3-x0^2*x1]"],
     ["[x1:x0:-x2]", "TAU", "[x2:x0:x1]", "RHO"]),
    ("model{3}a", ["[x0^3:x1^2*x2:x0*x1*x2]"],
     ["RHO", "[x1:x2:x0]", "RHO", "[x1:x2:x0]"]),
    ("model{3}b", ["[x0^2*(x1-x2):x0*x1*(x1-x2):x1^2*x2]"],
     ["[x0+x2:x2:x1]", "RHO", "[-x0+x1:x2-x1:x0]", "SIGMA"]),
    ("model{3}d", ["[x0*x1*x2:x1^2*x2:x0*(x1^2-x0*x2)]"],
     ["[x1:x0:-x2]", "TAU", "SIGMA"]),
    ("model{4}a", ["[x0^3:x0^2*x1:(x0-x1)*x1*x2]"],
     ["[x0+x2:x2:x1]", "SIGMA", "[x0:x1:x2-x0]", "RHO", "[x1:x2:x0]"]),
    ("model{8}", ["[x0*(x0^2+x1*x2):x1^3:x1*(x0^2+x1*x2)]"],
     ["RHO", "[x1:x2:x0]", "TAU", "[x1:x0:-x2]"]),
    ("model{9}", ["[x1^2*x2:x0*(x0*x2+x1^2):x1*(x0*x2+x1^2)]"],
     ["[x1:x0:x2]", "RHO", "[x0:x0+x1:x2]", "RHO", "[x0:x2:x1]"]),
    ("model{10}a", ["[x0*(x1^2+x0*x2):x1*(x1^2+x0*x2):x0*x1*x2]"],
     ["[x2:x0:x1]", "SIGMA", "[x0:x0+x1:x2]", "RHO", "[x0:x2:x1]"]),
    ("model{10}b", ["[x0*(x1^2+x0*x2):x1*(x1^2+x0*x2):x0*x1^2]"],
     ["SIGMA", "[x1:x2:x0+x1]", "RHO", "[x2:x0:x1]"]),
    ("model{10}c", ["[x0*(x0^2+x1*x2):x1*(x0^2+x1*x2):x0*x1*x2]"],
     ["[x0:x2:x1]", "SIGMA", "[x0:x0+x1:x2]", "RHO", "[x1:x2:x0]"]),
    ("model{11}b", ["[x0*(x0^2+x1*x2+x0*x2):x1*(x0^2+x1*x2+x0*x2):x0*x1*x2]"],
     ["[x1:x2:x0]", "SIGMA", "[x0+x1+x2:x0:x2]", "RHO", "[x1:x2:x0]"]),
    ("model{12}b", ["[x0*(x0^2+x1*x2):x1*(x0^2+x1*x2):x0*x1*(x0-x1)]"],
     ["[x0:x0-x1:x2]", "SIGMA", "[x1-x0:x1:x2]", "TAU", "[x1:x0:-x2]"]),
    ("model{13}",
     ["[x0*(x1^2+3*x0*x1+x1*x2+x0*x2):x1*(x1^2+3*x0*x1+x1*x2+x0*x2)"
      ":x0*x1*x2]"],
     ["SIGMA", "[-3*x2:x1+x2:-9*x0+x1+(1-3)*x2]", "SIGMA",
      "[x2:-x1/3:x0+x1/3]"]),
    ("model{14}b",
     ["[x0*(x0^2+x1*x2+x0*x2):x1*(x0^2+x1*x2+x0*x2):x0*x1*(x0-x1)]"],
     ["SIGMA", "[-2*x1+4*x2:2*x1+4*x2:-4*x0+x1+4*x2]", "RHO",
      "[x0/4+x1/4+x2:-x0/4-x1/4:-x0/2+x1/2]"]),
]

# conjugations f = A g B between listed same-configuration cubics; parameter
# families are instantiated at fixed values
_F5_1 = "[x0*(x1+x2)*(x0+x1):x1*(x1+x2)*(x0+x1):x0*x1*x2]"
_F5_4 = "[x0*x2*(x0+x1):x1*x2*(x0+x1):x0*x1^2]"
_W1 = "[x0*(x1^2+x0*x1+x0*x2):x1*(x1^2+x0*x1+x0*x2):x0*x1*x2]"
_W2 = ("[x0*(x0^2+x1^2+2*x0*x1+x0*x2)"
       ":x1*(x0^2+x1^2+2*x0*x1+x0*x2):x0*x1*x2]")
_W5 = "[x0*(x0*x1+x1*x2+x0*x2):x1*(x0*x1+x1*x2+x0*x2):x0*x1^2]"
_IDENTITY_SPECS += [
    ("conj{5}-45", [_F5_4],
     ["[x0*(x0+x1)*(x1+x2):x1*(x0+x1)*(x1+x2):x0*x1^2]", "[x0:x1:x2-x1]"]),
    ("conj{5}-46", [_F5_4],
     ["[x0/2:x1:x2/2]",
      "[x0*(x0/2+x1)*(x2+2*x0):x1*(x0/2+x1)*(x2+2*x0):x0*x1^2]",
      "[2*x0:x1:x2-4*x0]"]),
    ("conj{5}-47", [_F5_4],
     ["[x0*(x0+x1)*(x0+x1+x2):x1*(x0+x1)*(x0+x1+x2):x0*x1^2]",
      "[x0:x1:x2-x0-x1]"]),
    ("conj{5}-48", [_F5_4],
     ["[2*x0:x1:2*x2]",
      "[x0*(x1+2*x0)*(x1+x0/2+x2):x1*(x1+2*x0)*(x1+x0/2+x2):x0*x1^2]",
      "[x0/2:x1:x2-x0/4-x1]"]),
    ("conj{5}-12", [_F5_1],
     ["[2*x1:x0:x2]",
      "[x0*(x2+2*x0)*(x0/2+x1):x1*(x2+2*x0)*(x0/2+x1):x0*x1*x2]",
      "[x1:x0/2:2*x2]"]),
    ("conj{5,7}-21",
     ["[x1*x2*(x0-x1):x0*(x0-x1)*(x2-x1):x1^2*x2]"],
     ["[-x2:-x0:x1+x2]",
      "[x1*(x0-x1)*(x0+x2):x0*x2*(x0-x1):x0*x1*x2]",
      "[-x1:x0-x1:x2]"]),
    ("conj{5,7}-1g",
     ["[x1*(x0-x1)*(x0+x2):x0*x2*(x0-x1):x0*x1*x2]"],
     ["[x2:x0:x1]",
      "[x0*(x0+x1+x2)*(x0+x1):x1*(x0+x1+x2)*(x0+x1):x0*x1*x2]",
      "[x1-x0:-x1:x0+x2]"]),
    ("conj{10}-12",
     ["[x0*(x1^2+x0*x2):x1*(x1^2+x0*x2):x0*x1*x2]"],
     ["[x1:x0:x2]", "[x0*(x0^2+x1*x2):x1*(x0^2+x1*x2):x0*x1*x2]",
      "[x1:x0:x2]"]),
    ("conj{10}-56",
     ["[x0*(x0^2+3*x0*x1+x1*x2):x1*(x0^2+3*x0*x1+x1*x2):x0*x1^2]"],
     ["[x0*(x0^2+x1^2+3*x0*x1+x1*x2)"
      ":x1*(x0^2+x1^2+3*x0*x1+x1*x2):x0*x1^2]", "[x0:x1:x2-x1]"]),
    ("conj{10}-34",
     ["[x0*(x1^2+3*x0*x1+x0*x2):x1*(x1^2+3*x0*x1+x0*x2):x0*x1^2]"],
     ["[x0*(x0^2+x1^2+3*x0*x1+2*x0*x2)"
      ":x1*(x0^2+x1^2+3*x0*x1+2*x0*x2):x0*x1^2]", "[x0:x1:(x2-x0)/2]"]),
    ("conj{11}-32",
     ["[x0*(x0^2+x0*x2+x1*x2):x1*(x0^2+x0*x2+x1*x2):x0*x1*x2]"],
     ["[x1:x0:x2]",
      "[x0*(x1^2+x0*x2+x1*x2):x1*(x1^2+x0*x2+x1*x2):x0*x1*x2]",
      "[x1:x0:x2]"]),
    ("conj{12}-24", [_W2],
     ["[x1:x0:x2]",
      "[x0*(x0^2+x1^2+2*x0*x1+x1*x2)"
      ":x1*(x0^2+x1^2+2*x0*x1+x1*x2):x0*x1*x2]", "[x1:x0:x2]"]),
    ("conj{12}-78",
     ["[x0*(x0^2+x0*x1+2*x0*x2+x1*x2)"
      ":x1*(x0^2+x0*x1+2*x0*x2+x1*x2):x0*x1^2]"],
     ["[x0*(x0^2+x1^2+3*x0*x1+2*x0*x2+x1*x2)"
      ":x1*(x0^2+x1^2+3*x0*x1+2*x0*x2+x1*x2):x0*x1^2]", "[x0:x1:x2-x1]"]),
    ("conj{12}-13", [_W1],
     ["[2*x1:x0:x2]",
      "[x0*(x0^2+2*x0*x1+x1*x2):x1*(x0^2+2*x0*x1+x1*x2):x0*x1*x2]",
      "[x1:x0/2:2*x2]"]),
    ("conj{12}-56", [_W5],
     ["[x0*(x1^2+2*x0*x1+x0*x2+x1*x2)"
      ":x1*(x1^2+2*x0*x1+x0*x2+x1*x2):x0*x1^2]", "[x0:x1:x2-x1]"]),
    ("conj{12}-12", [_W1],
     ["[x0:-x0-x1:-x0-x2]", _W2, "[x0:-x0-x1:x1+x2]"]),
    ("conj{12}-75",
     ["[x0*(x0^2+2*x0*x1+x0*x2+x1*x2)"
      ":x1*(x0^2+2*x0*x1+x0*x2+x1*x2):x0*x1^2]"],
     [_W5, "[x0:x1:x0+x2]"]),
    ("conj{12}-51", [_W5],
     ["[x0+x1:-x1:x2-x1]", _W1, "[-x0-x1:x1:x2]"]),
]


def identity_corpus():
    """[(name, lhs RatMap list, rhs RatMap list)] of composition identities."""
    from .cli import parse_map
    from .ratmap import sigma, rho, tau, identity_map
    stock = {"SIGMA": sigma(), "RHO": rho(), "TAU": tau(),
             "ID": identity_map()}

    def build(tok):
        return stock[tok] if tok in stock else parse_map(tok)

    return [(name, [build(t) for t in lhs], [build(t) for t in rhs])
            for name, lhs, rhs in _IDENTITY_SPECS]


def verify_identity_corpus():
    """[(name, passed)] for every bundled composition identity."""
    out = []
    for name, lhs, rhs in identity_corpus():
        a = lhs[0]
        for m in lhs[1:]:
            a = a.compose(m)
        b = rhs[0]
        for m in rhs[1:]:
            b = b.compose(m)
        out.append((name, a == b))
    return out


def verify_inverse_pair(f: RatMap, g: RatMap) -> bool:
    """True when f and g are mutually inverse (projectively, exactly)."""
    return f.compose(g).is_identity() and g.compose(f).is_identity()


def verify_noether_decomposition(target: RatMap, factors) -> bool:
    """True when the left-to-right composition of factors equals target."""
    acc = factors[0]
    for fac in factors[1:]:
        acc = acc.compose(fac)
    return acc == target
