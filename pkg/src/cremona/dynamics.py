"""Iteration of rational maps: degree growth, stability, orbits, rendering."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polycore import CPoint, DEFAULT_SEED
from .ratmap import RatMap, INDETERMINATE

__all__ = [
    "DegreeSequence", "OrbitTrace", "ExcOrbit", "ImageBuffer",
    "MAXITER", "HIT_INDETERMINACY", "ESCAPED", "CYCLE",
    "degree_sequence", "dynamical_degree_estimate", "exceptional_orbit",
    "bedford_diller_partial", "orbit", "render", "henon_member",
]

MAXITER = "MAXITER"
HIT_INDETERMINACY = "HIT_INDETERMINACY"
ESCAPED = "ESCAPED"
CYCLE = "CYCLE"

DEGREE_CAP = 12
TERM_CAP = 200_000  # total stored monomials across components


@dataclass(frozen=True)
class DegreeSequence:
    """deg f^n for n = 1..N with the first stability-loss index."""
    degrees: tuple
    stable_horizon: int = None  # first n with deg f^n < (deg f)^n
    truncated: bool = False     # size cap hit: sequence is partial


def degree_sequence(f: RatMap, N: int = DEGREE_CAP) -> DegreeSequence:
    """Exact degrees of the reduced iterates f, f^2, ..., f^N."""
    if N < 1:
        raise ValueError("horizon must be >= 1")
    if N > DEGREE_CAP and f.degree >= 2:
        raise ValueError(f"horizon {N} above the cap {DEGREE_CAP}")
    degs = []
    cur = f
    truncated = False
    for n in range(1, N + 1):
        degs.append(cur.degree)
        if n == N:
            break
        if sum(len(c.terms) for c in cur.components) > TERM_CAP:
            truncated = True
            break
        cur = cur.compose(f)
    horizon = next((n for n, d in enumerate(degs, start=1)
                    if d < f.degree ** n), None)
    return DegreeSequence(degrees=tuple(degs), stable_horizon=horizon,
                          truncated=truncated)


def dynamical_degree_estimate(f: RatMap, N: int = 8):
    """(deg f^N)^(1/N) together with the per-n estimates."""
    seq = degree_sequence(f, N)
    ests = [d ** (1.0 / n) for n, d in enumerate(seq.degrees, start=1)]
    return ests[-1], ests


# -- exceptional orbits ------------------------------------------------------

@dataclass
class ExcOrbit:
    """Forward orbit of the image point of one contracted curve."""
    curve: object            # HPoly factor of det jac
    image: CPoint            # the point the curve contracts to
    points: list = field(default_factory=list)
    collision: int = None    # first n with f^n(image) in Ind f


def exceptional_orbit(f: RatMap, forward: bool = True, N: int = 10):
    """Track f^n of the contracted-curve images; flag landings on Ind f."""
    from . import birat
    g = f
    if not forward:
        g, _ = birat.inverse_quadratic(f)
    exc = birat.exceptional_components(g)
    if exc is None:
        raise ValueError("degenerate map: Jacobian vanishes identically")
    out = []
    for fac, _, img in exc:
        if img is birat.NOT_CONTRACTED:
            continue
        rec = ExcOrbit(curve=fac, image=img, points=[img])
        p = img
        for n in range(1, N + 1):
            q = g.evaluate(p)
            if q is INDETERMINATE:
                rec.collision = n
                break
            rec.points.append(q)
            p = q
        out.append(rec)
    return out


def _chart_distance(p: CPoint, q: CPoint) -> float:
    """Max-norm distance in the affine chart of q's largest coordinate."""
    zq = [complex(c) for c in q.coords]
    k = max(range(3), key=lambda i: abs(zq[i]))
    zp = [complex(c) for c in p.coords]
    if abs(zp[k]) < 1e-12 * max(abs(c) for c in zp):
        return 1.0
    return max(abs(zp[i] / zp[k] - zq[i] / zq[k]) for i in range(3))


def bedford_diller_partial(f: RatMap, N: int = 10):
    """Partial sum of lambda^-n |log dist(f^n(Ind f^-1), Ind f)|.

    Returns (partial_sum, diverged); diverged means an orbit point hit an
    indeterminacy point exactly.  Refuses maps without degree growth.
    """
    from . import birat
    # four iterates suffice for the growth-rate estimate and stay cheap
    lam, _ = dynamical_degree_estimate(f, min(N, 4))
    if lam <= 1.0 + 1e-9:
        raise ValueError("no degree growth: the weighted sum needs lambda > 1")
    ind = [p for p, _ in birat.ind_points(f)]
    total = 0.0
    diverged = False
    for rec in exceptional_orbit(f, forward=True, N=N):
        if rec.collision is not None:
            diverged = True
        for n, p in enumerate(rec.points[1:], start=1):
            d = min(_chart_distance(p, q) for q in ind)
            if d <= 0.0:
                diverged = True
                continue
            total += abs(math.log(d)) / lam ** n
    return total, diverged


# -- pointwise orbits --------------------------------------------------------

@dataclass
class OrbitTrace:
    points: list
    termination: str
    cycle_length: int = None


def orbit(f: RatMap, seed: CPoint, N: int = 100,
          ind_tol: float = 1e-10, escape_radius: float = 1e12) -> OrbitTrace:
    """Iterated evaluation with cycle / indeterminacy / escape detection."""
    pts = [seed]
    seen = {}

    def key(p):
        if p.is_exact():
            return ("e",) + tuple(p.exact)
        z = [complex(c) for c in p.coords]
        k = max(range(3), key=lambda i: abs(z[i]))
        w = [c / z[k] for c in z]
        return ("n",) + tuple((round(c.real, 9), round(c.imag, 9)) for c in w)

    seen[key(seed)] = 0
    p = seed
    for n in range(1, N + 1):
        q = f.evaluate(p)
        if q is INDETERMINATE:
            return OrbitTrace(points=pts, termination=HIT_INDETERMINACY)
        z = [complex(c) for c in q.coords]
        k = max(range(3), key=lambda i: abs(z[i]))
        # proximity to an indeterminacy image / escape in the affine chart
        if abs(z[2]) > 0 and max(abs(z[0] / z[2]), abs(z[1] / z[2])) > escape_radius:
            pts.append(q)
            return OrbitTrace(points=pts, termination=ESCAPED)
        if abs(z[2] / z[k]) < ind_tol and abs(z[2]) != 0:
            pass  # near the line at infinity but not escaped: keep going
        kq = key(q)
        if kq in seen:
            pts.append(q)
            return OrbitTrace(points=pts, termination=CYCLE,
                              cycle_length=n - seen[kq])
        seen[kq] = n
        pts.append(q)
        p = q
    return OrbitTrace(points=pts, termination=MAXITER)


# -- rendering ---------------------------------------------------------------

@dataclass
class ImageBuffer:
    width: int
    height: int
    pixels: bytes  # RGB, row-major

    def to_p6(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode()
        return header + self.pixels

    def write(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_p6())


def _real_coeff_arrays(f: RatMap):
    comps = []
    for c in f.components:
        rows = []
        for e, coeff in c.terms.items():
            z = coeff.to_complex()
            if abs(z.imag) > 0:
                raise ValueError("render needs real coefficients")
            rows.append((e[0], e[1], e[2], z.real))
        comps.append(rows)
    return comps


def _eval_grid(comp, X, Y, Z):
    acc = np.zeros_like(X)
    for e0, e1, e2, c in comp:
        acc = acc + c * (X ** e0) * (Y ** e1) * (Z ** e2)
    return acc


def render(f: RatMap, window=(-2.0, 2.0, -2.0, 2.0), mode="ESCAPE",
           width: int = 512, height: int = 512, iterations: int = 60,
           escape_radius: float = 1e6, ind_tol: float = 1e-10,
           seed=DEFAULT_SEED) -> ImageBuffer:
    """Raster of escape times or orbit hits over an affine window (x2 = 1)."""
    if width < 1 or height < 1:
        raise ValueError("empty window")
    xmin, xmax, ymin, ymax = window
    comps = _real_coeff_arrays(f)
    xs = np.linspace(xmin, xmax, width)
    ys = np.linspace(ymin, ymax, height)
    if mode == "ESCAPE":
        X, Y = np.meshgrid(xs, ys)
        Z = np.ones_like(X)
        # smooth escape value n - log_d log|c|; for maps with eventually
        # d-fold log growth this is radius-independent, which keeps the
        # palette stable when escape_radius changes
        mu = np.zeros(X.shape, dtype=np.float64)
        inside = np.ones(X.shape, dtype=bool)
        alive = np.ones(X.shape, dtype=bool)
        logd = math.log(max(2, f.degree))
        for n in range(1, iterations + 1):
            with np.errstate(over="ignore", invalid="ignore",
                             divide="ignore"):
                nx = _eval_grid(comps[0], X, Y, Z)
                ny = _eval_grid(comps[1], X, Y, Z)
                nz = _eval_grid(comps[2], X, Y, Z)
                scale = np.maximum(np.maximum(np.abs(nx), np.abs(ny)),
                                   np.abs(nz))
                dead = ~np.isfinite(scale) | (scale < 1e-300)
                scale = np.where(dead, 1.0, scale)
                X, Y, Z = nx / scale, ny / scale, nz / scale
                absz = np.abs(Z)
                cmag = np.where(absz > 0,
                                np.maximum(np.abs(X), np.abs(Y))
                                / np.where(absz == 0, 1, absz), np.inf)
                escaped = alive & ((absz < ind_tol) | (cmag > escape_radius)
                                   | dead)
                lg = np.log(np.clip(cmag, math.e, 1e300))
                mu[escaped] = n - (np.log(lg) / logd)[escaped]
            inside &= ~escaped
            alive &= ~escaped
            # freeze settled pixels so later iterations cannot overflow
            X = np.where(alive, X, 0.0)
            Y = np.where(alive, Y, 0.0)
            Z = np.where(alive, Z, 1.0)
            if not alive.any():
                break
        # deterministic palette: interior black, escape band shaded; the
        # integer banding absorbs sub-band jitter of the smooth value
        band = np.floor(mu)
        t = np.clip(band / max(1, iterations), 0.0, 1.0)
        r = np.where(inside, 0, (40 + 215 * t)).astype(np.uint8)
        g = np.where(inside, 0, (200 * np.sqrt(t))).astype(np.uint8)
        b = np.where(inside, 0, (255 * (1 - t) * 0.8 + 40)).astype(np.uint8)
        rgb = np.dstack([r, g, b]).astype(np.uint8)
        return ImageBuffer(width=width, height=height, pixels=rgb.tobytes())
    if mode == "ORBIT":
        img = np.zeros((height, width, 3), dtype=np.uint8)
        grid = 24
        for gx in np.linspace(xmin, xmax, grid):
            for gy in np.linspace(ymin, ymax, grid):
                x, y, z = float(gx), float(gy), 1.0
                for _ in range(iterations):
                    vals = []
                    for comp in comps:
                        acc = 0.0
                        for e0, e1, e2, c in comp:
                            acc += c * x ** e0 * y ** e1 * z ** e2
                        vals.append(acc)
                    scale = max(abs(v) for v in vals)
                    if scale < 1e-300:
                        break
                    x, y, z = (v / scale for v in vals)
                    if abs(z) < ind_tol:
                        break
                    ax, ay = x / z, y / z
                    if abs(ax) > escape_radius or abs(ay) > escape_radius:
                        break
                    px = int((ax - xmin) / (xmax - xmin) * (width - 1))
                    py = int((ay - ymin) / (ymax - ymin) * (height - 1))
                    if 0 <= px < width and 0 <= py < height:
                        img[py, px] = (255, 255, 255)
        return ImageBuffer(width=width, height=height, pixels=img.tobytes())
    raise ValueError(f"unknown render mode {mode!r}")


def henon_member() -> RatMap:
    """Quadratic with affine-chart form (x, y) -> (y, y^2 + x)."""
    from .polycore import HPoly
    x0, x1, x2 = (HPoly.variable(i) for i in range(3))
    return RatMap([x1 * x2, x1 * x1 + x0 * x2, x2 * x2])
