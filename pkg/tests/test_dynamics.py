"""Degree growth, stability, exceptional orbits, pointwise orbits, rendering."""

import math

import pytest

from cremona.polycore import GaussRat, HPoly, CPoint
from cremona.ratmap import RatMap, sigma, rho, linear_map
from cremona import dynamics as dy
from cremona import birat

from conftest import fr, gi, ept


def f_affine_shear():
    x0, x1, x2 = (HPoly.variable(i) for i in range(3))
    return RatMap([(x0 * GaussRat(2) + x1) * x2,
                   x1 * (x0 + x2) * GaussRat(3),
                   x2 * (x0 + x2)])


def a_sigma():
    A = linear_map([[fr(1), fr(2), fr(1)], [fr(2), fr(1), fr(3)],
                    [fr(1), fr(1), fr(1)]])
    return A.compose(sigma())


class TestDegreeSequence:
    def test_affine_shear(self):
        seq = dy.degree_sequence(f_affine_shear(), 7)
        assert seq.degrees == (2, 2, 3, 3, 4, 4, 5)
        assert seq.stable_horizon == 2
        assert not seq.truncated

    def test_stable_composition(self):
        seq = dy.degree_sequence(a_sigma(), 4)
        assert seq.degrees == (2, 4, 8, 16)
        assert seq.stable_horizon is None

    def test_sigma_period_two(self):
        seq = dy.degree_sequence(sigma(), 4)
        assert seq.degrees == (2, 1, 2, 1)
        assert seq.stable_horizon == 2

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            dy.degree_sequence(sigma(), 0)
        with pytest.raises(ValueError):
            dy.degree_sequence(sigma(), dy.DEGREE_CAP + 1)

    def test_linear_exempt_from_cap(self):
        a = linear_map([[fr(1), fr(1), fr(0)], [fr(0), fr(1), fr(0)],
                        [fr(0), fr(0), fr(1)]])
        seq = dy.degree_sequence(a, 20)
        assert seq.degrees == (1,) * 20

    def test_submultiplicative(self):
        # deg f^(m+n) <= deg f^m * deg f^n for every split of the sequence
        for f in (sigma(), rho(), f_affine_shear(), a_sigma()):
            d = dy.degree_sequence(f, 5).degrees
            for m in range(1, len(d)):
                for n in range(1, len(d) - m + 1):
                    assert d[m + n - 1] <= d[m - 1] * d[n - 1]

    def test_no_horizon_means_full_growth(self):
        seq = dy.degree_sequence(a_sigma(), 4)
        assert seq.stable_horizon is None
        assert all(dn == 2 ** n for n, dn in enumerate(seq.degrees, start=1))


class TestDynamicalDegree:
    def test_stable_quadratic(self):
        est, per_n = dy.dynamical_degree_estimate(a_sigma(), 4)
        assert abs(est - 2.0) < 1e-12
        assert len(per_n) == 4

    def test_involution(self):
        est, _ = dy.dynamical_degree_estimate(sigma(), 4)
        assert abs(est - 1.0) < 1e-12

    def test_drop_map_below_degree(self):
        est, _ = dy.dynamical_degree_estimate(f_affine_shear(), 7)
        assert 1.0 < est < 2.0


class TestExceptionalOrbit:
    def test_affine_shear_collisions(self, xvars):
        x0, x1, x2 = xvars
        recs = dy.exceptional_orbit(f_affine_shear(), N=6)
        by_curve = {rec.curve.monic(): rec for rec in recs}
        assert by_curve[x2.monic()].collision == 1
        assert by_curve[(x0 + x2).monic()].collision == 1
        free = by_curve[(x1 - x2 * GaussRat(2)).monic()]
        assert free.collision is None
        assert len(free.points) == 7

    def test_stable_map_no_collision(self):
        recs = dy.exceptional_orbit(a_sigma(), N=4)
        assert len(recs) == 3
        assert all(rec.collision is None for rec in recs)

    def test_sigma_immediate_collisions(self):
        # each coordinate line contracts onto an indeterminacy point
        recs = dy.exceptional_orbit(sigma(), N=3)
        assert len(recs) == 3
        assert all(rec.collision == 1 for rec in recs)

    def test_backward_tracks_inverse(self):
        recs = dy.exceptional_orbit(sigma(), forward=False, N=3)
        assert all(rec.collision == 1 for rec in recs)


class TestBedfordDiller:
    def test_stable_quadratic_finite(self):
        total, diverged = dy.bedford_diller_partial(a_sigma(), N=6)
        assert not diverged
        assert 0.0 < total < 1e3

    def test_refuses_involution(self):
        with pytest.raises(ValueError):
            dy.bedford_diller_partial(sigma())

    def test_collision_flags_divergence(self):
        total, diverged = dy.bedford_diller_partial(f_affine_shear(), N=4)
        assert diverged


class TestOrbit:
    def test_cycle_of_length_two(self):
        tr = dy.orbit(sigma(), ept(2, 3, 1))
        assert tr.termination == dy.CYCLE
        assert tr.cycle_length == 2

    def test_fixed_point(self):
        tr = dy.orbit(sigma(), ept(1, 1, 1))
        assert tr.termination == dy.CYCLE
        assert tr.cycle_length == 1

    def test_hits_indeterminacy(self):
        tr = dy.orbit(sigma(), ept(1, 0, 0))
        assert tr.termination == dy.HIT_INDETERMINACY

    def test_escape(self):
        tr = dy.orbit(dy.henon_member(), ept(0, 2, 1), N=200)
        assert tr.termination == dy.ESCAPED

    def test_maxiter(self):
        tr = dy.orbit(a_sigma(), CPoint((0.123 + 0.456j, 0.789, 1.0)), N=5)
        assert tr.termination in (dy.MAXITER, dy.ESCAPED, dy.CYCLE)
        assert len(tr.points) <= 6


class TestRender:
    def test_escape_deterministic(self):
        h = dy.henon_member()
        a = dy.render(h, width=64, height=64, iterations=30)
        b = dy.render(h, width=64, height=64, iterations=30)
        assert a.pixels == b.pixels
        assert len(a.pixels) == 64 * 64 * 3

    def test_escape_radius_stability(self):
        h = dy.henon_member()
        a = dy.render(h, window=(-2.5, 2.5, -2.5, 2.5), width=128, height=128)
        b = dy.render(h, window=(-2.5, 2.5, -2.5, 2.5), width=128, height=128,
                      escape_radius=1e7)
        same = sum(1 for x, y in zip(a.pixels, b.pixels) if x == y)
        assert same / len(a.pixels) > 0.99

    def test_orbit_mode(self):
        img = dy.render(sigma(), mode="ORBIT", width=64, height=64,
                        iterations=30)
        assert len(img.pixels) == 64 * 64 * 3
        assert any(p != 0 for p in img.pixels)

    def test_p6_header(self):
        img = dy.render(dy.henon_member(), width=16, height=8, iterations=5)
        data = img.to_p6()
        assert data.startswith(b"P6\n16 8\n255\n")
        assert len(data) == len(b"P6\n16 8\n255\n") + 16 * 8 * 3

    def test_rejects_complex_coefficients(self, xvars):
        x0, x1, x2 = xvars
        f = RatMap([x1 * x2 * gi(0, 1), x0 * x2, x2 * x2])
        with pytest.raises(ValueError):
            dy.render(f, width=8, height=8, iterations=2)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            dy.render(dy.henon_member(), mode="WAT")


class TestHenonMember:
    def test_shape(self, xvars):
        x0, x1, x2 = xvars
        h = dy.henon_member()
        assert h.degree == 2
        assert h.components[0].monic() == (x1 * x2).monic()

    def test_birational(self):
        ok, _ = birat.is_birational_quadratic(dy.henon_member())
        assert ok
