"""Foliations attached to rational maps: singular loci, index sums, fibers."""

import pytest

from cremona.polycore import GaussRat, HPoly, CPoint
from cremona.ratmap import RatMap, sigma, rho, tau, linear_map, identity_map
from cremona import foliation as fo
from cremona.foliation import (
    FIXED,
    INDETERMINACY,
    foliation_of,
    has_fixed_curve,
    singular_points,
    point_multiplicity,
    multiplicity_by_perturbation,
    guillot_sums,
    baum_bott,
    baum_bott_sum,
    count_preimages,
    foliation_fiber_sigma,
    quadratic_from_points,
)

from conftest import fr, ept


def f_affine_shear(alpha=2, beta=3):
    """Homogenized (x, y) -> ((alpha*x + y)/(x + 1), beta*y)."""
    x0, x1, x2 = (HPoly.variable(i) for i in range(3))
    return RatMap([(x0 * GaussRat(alpha) + x1) * x2,
                   x1 * (x0 + x2) * GaussRat(beta),
                   x2 * (x0 + x2)])


class TestConstruction:
    def test_sigma_degree(self):
        F = foliation_of(sigma())
        assert F.degree == 2
        assert F.gcd_part.degree in (0, None)

    def test_euler_contraction(self, xvars):
        x0, x1, x2 = xvars
        for f in (sigma(), rho(), tau(), f_affine_shear()):
            F = foliation_of(f)
            euler = x0 * F.omega[0] + x1 * F.omega[1] + x2 * F.omega[2]
            assert euler.is_zero()

    def test_identity_raises(self):
        with pytest.raises(ValueError):
            foliation_of(identity_map())

    def test_conjugation_transforms_singular_locus(self):
        # Sing F(a^-1 f a) = a^-1(Sing F(f)) for a linear change a
        a = linear_map([[fr(1), fr(1), fr(0)], [fr(0), fr(1), fr(0)],
                        [fr(0), fr(0), fr(1)]])
        ainv = linear_map([[fr(1), fr(-1), fr(0)], [fr(0), fr(1), fr(0)],
                           [fr(0), fr(0), fr(1)]])
        f = sigma()
        g = ainv.compose(f).compose(a)
        sing_f = {p for p, _ in fo._singular_data(foliation_of(f).omega, 1)}
        sing_g = list(fo._singular_data(foliation_of(g).omega, 1))
        assert len(sing_g) == len(sing_f) == 7
        for q, _ in sing_g:
            img = a.evaluate(q)
            assert any(img.same_point(p) for p in sing_f)


class TestFixedCurves:
    def test_rho(self, xvars):
        x0, x1, x2 = xvars
        yes, curve = has_fixed_curve(rho())
        assert yes
        assert curve.monic() == (x1 * x1 - x2 * x2).monic()

    def test_cross_product_map(self, xvars):
        x0, x1, x2 = xvars
        f = RatMap([x0 * x2, x1 * x2, x0 * x1])
        yes, curve = has_fixed_curve(f)
        assert yes
        assert curve.monic() == (x0 * x1 - x2 * x2).monic()

    def test_sigma_none(self):
        yes, curve = has_fixed_curve(sigma())
        assert not yes and curve is None


class TestSingularPoints:
    def test_sigma_seven_simple(self):
        F = foliation_of(sigma())
        sps = singular_points(F, sigma())
        assert len(sps) == 7
        assert all(sp.multiplicity == 1 for sp in sps)
        kinds = sorted(sp.kind for sp in sps)
        assert kinds.count(INDETERMINACY) == 3
        assert kinds.count(FIXED) == 4

    def test_affine_shear_multiplicities(self):
        # degree-2 foliation with five singular points, one of them triple
        f = f_affine_shear()
        F = foliation_of(f)
        sps = singular_points(F, f)
        assert sorted(sp.multiplicity for sp in sps) == [1, 1, 1, 1, 3]
        triple = next(sp for sp in sps if sp.multiplicity == 3)
        assert triple.location.same_point(ept(0, 1, 0))
        assert triple.kind == INDETERMINACY

    def test_multiplicity_sum_rule(self):
        # total multiplicity = nu^2 + nu + 1 is asserted internally; a
        # successful return is the check
        for f in (sigma(), f_affine_shear(), f_affine_shear(5, 2)):
            F = foliation_of(f)
            total = sum(sp.multiplicity for sp in singular_points(F, f))
            nu = F.degree
            assert total == nu * nu + nu + 1

    def test_point_multiplicity_rejects_regular_point(self):
        F = foliation_of(sigma())
        with pytest.raises(ValueError):
            point_multiplicity(F, ept(1, 2, 3))

    def test_perturbation_cross_check(self):
        f = f_affine_shear()
        assert multiplicity_by_perturbation(f, ept(0, 1, 0)) == 3
        assert multiplicity_by_perturbation(f, ept(1, 0, 1)) == 1
        assert multiplicity_by_perturbation(f, ept(1, 0, 0)) == 1


class TestFixedPointSums:
    def test_guillot_sigma(self):
        s1, s2 = guillot_sums(sigma())
        assert abs(s1 - (-4)) < 1e-8
        assert abs(s2 - 1) < 1e-8

    def test_guillot_conjugation_invariant(self):
        a = linear_map([[fr(1), fr(2), fr(0)], [fr(0), fr(1), fr(0)],
                        [fr(1), fr(0), fr(1)]])
        ainv = linear_map([[fr(1), fr(-2), fr(0)], [fr(0), fr(1), fr(0)],
                           [fr(-1), fr(2), fr(1)]])
        g = ainv.compose(sigma()).compose(a)
        s1, s2 = guillot_sums(g)
        assert abs(s1 - (-4)) < 1e-8
        assert abs(s2 - 1) < 1e-8

    def test_baum_bott_sum_sigma(self):
        # sum of BB indices = (nu + 2)^2 with nu = 2
        total = baum_bott_sum(sigma())
        assert abs(total - 16) < 1e-6

    def test_baum_bott_rejects_multiple_point(self):
        f = f_affine_shear()
        F = foliation_of(f)
        with pytest.raises(ValueError):
            baum_bott(F, ept(0, 1, 0))


class TestFirstIntegral:
    def test_sigma_pencil(self, xvars):
        # (x0^2 - x2^2)/(x1^2 - x2^2) is constant along F(sigma):
        # (D dN - N dD) wedge omega = 0
        x0, x1, x2 = xvars
        N = x0 * x0 - x2 * x2
        D = x1 * x1 - x2 * x2
        om = foliation_of(sigma()).omega
        dN = [N.partial(i) for i in range(3)]
        dD = [D.partial(i) for i in range(3)]
        eta = [D * dN[i] - N * dD[i] for i in range(3)]
        for i, j in ((0, 1), (0, 2), (1, 2)):
            wedge = eta[i] * om[j] - eta[j] * om[i]
            assert wedge.is_zero()


class TestFiber:
    def test_sigma_count(self):
        assert count_preimages(sigma()) == 5

    def test_sigma_fiber_contains_sigma(self):
        maps = foliation_fiber_sigma()
        assert len(maps) == 5
        assert any(g == sigma() for g in maps)

    def test_fiber_members_share_foliation(self):
        # omega is reduced but only defined up to a scalar: compare by wedge
        om = foliation_of(sigma()).omega
        for g in foliation_fiber_sigma():
            omg = foliation_of(g).omega
            for i, j in ((0, 1), (0, 2), (1, 2)):
                assert (omg[i] * om[j] - omg[j] * om[i]).is_zero()

    def test_quadratic_from_points(self):
        ind = [ept(1, 0, 0), ept(0, 1, 0), ept(0, 0, 1)]
        fix = [ept(1, 1, 1), ept(fr(6, 7), fr(3, 7), 1),
               ept(fr(1, 9), fr(2, 9), 1), ept(fr(1, 3), 1, fr(1, 6))]
        g = quadratic_from_points(ind, fix)
        assert g.degree == 2
        from cremona.ratmap import INDETERMINATE
        for p in ind:
            assert g.evaluate(p) is INDETERMINATE
        for p in fix:
            assert g.evaluate(p).same_point(p)
