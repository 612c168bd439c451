"""Birationality tests, quadratic strata, inverses, normal forms."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from cremona.polycore import (
    GaussRat,
    HPoly,
    CPoint,
    exact_inverse,
    exact_matrix_rank,
)
from cremona.ratmap import RatMap, sigma, rho, tau, linear_map, identity_map
from cremona import birat as bi
from cremona.birat import (
    NOT_BIRATIONAL,
    NOT_CONTRACTED,
    relation_space,
    matrix_M,
    is_birational_quadratic,
    wedge_construct,
    classify_quadratic,
    ind_points,
    inverse_quadratic,
    inverse_by_linear_solve,
    invariant_line_test,
    normal_form_sigma3,
    sigma_conjugate_degree,
    vanishing_order,
    fixed_points,
)

from conftest import fr, ept


def squares():
    x0, x1, x2 = (HPoly.variable(i) for i in range(3))
    return RatMap([x0 * x0, x1 * x1, x2 * x2])


def x0_times_id():
    x0, x1, x2 = (HPoly.variable(i) for i in range(3))
    return RatMap([x0 * x0, x0 * x1, x0 * x2], reduce=False)


def random_a_sigma(seed):
    rng = random.Random(seed)
    while True:
        a = [[fr(rng.randint(-5, 5)) for _ in range(3)] for _ in range(3)]
        try:
            exact_inverse(a)
        except ValueError:
            continue
        return linear_map(a).compose(sigma())


# -- relation space ----------------------------------------------------------

class TestRelationSpace:
    def test_sigma_dim(self):
        rl = relation_space(sigma())
        assert rl.dim == 2

    def test_sigma_basis_diagonal(self):
        # x0*(x1x2) - x1*(x0x2) = 0 and x0*(x1x2) - x2*(x0x1) = 0 span:
        # every basis matrix is diagonal with zero trace against (1,1,1)
        rl = relation_space(sigma())
        for L in rl.basis:
            for i in range(3):
                for v in range(3):
                    if v != i:
                        assert not L[i][v]
            assert sum((L[i][i] for i in range(3)), GaussRat(0)) == GaussRat(0)

    def test_x0_id_dim(self):
        assert relation_space(x0_times_id()).dim == 3

    def test_squares_dim(self):
        assert relation_space(squares()).dim == 0

    def test_relations_annihilate(self):
        f = random_a_sigma(11)
        rl = relation_space(f)
        assert rl.dim == 2
        for L in rl.basis:
            acc = HPoly.zero()
            for i in range(3):
                li = HPoly.linear_form(*L[i])
                acc = acc + li * f.components[i]
            assert acc.is_zero()


class TestMatrixM:
    @pytest.mark.parametrize("f,rank", [
        (sigma(), 7), (rho(), 7), (tau(), 7), (squares(), 9),
    ])
    def test_rank_oracles(self, f, rank):
        _, r = matrix_M(f)
        assert r == rank

    @given(st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=15, deadline=None)
    def test_rank_plus_relations_is_nine(self, seed):
        # empirical bridge between the two constructions: rank M = 9 - e
        f = random_a_sigma(seed)
        _, r = matrix_M(f)
        assert r == 9 - relation_space(f).dim

    def test_shape(self):
        m, _ = matrix_M(sigma())
        assert len(m) == 10 and all(len(row) == 9 for row in m)


# -- birationality -----------------------------------------------------------

class TestIsBirational:
    def test_models(self):
        for f in (sigma(), rho(), tau()):
            ok, exc = is_birational_quadratic(f)
            assert ok
            assert all(fac.degree == 1 for fac, _, _ in exc)

    def test_squares_not_birational(self):
        ok, exc = is_birational_quadratic(squares())
        assert not ok
        assert any(img is NOT_CONTRACTED for _, _, img in exc)

    def test_degenerate(self):
        x0, x1, _ = (HPoly.variable(i) for i in range(3))
        f = RatMap([x0 * x0, x0 * x1, x1 * x1])
        ok, witness = is_birational_quadratic(f)
        assert not ok
        assert witness == "degenerate"

    def test_linear_input_rejected(self):
        with pytest.raises(ValueError):
            is_birational_quadratic(identity_map())

    def test_sigma_contractions(self):
        # sigma contracts x_i = 0 to the i-th coordinate point
        _, exc = is_birational_quadratic(sigma())
        images = {repr(fac.monic()): img for fac, _, img in exc}
        assert images["1*x0"].same_point(ept(1, 0, 0))
        assert images["1*x1"].same_point(ept(0, 1, 0))
        assert images["1*x2"].same_point(ept(0, 0, 1))


class TestWedge:
    def test_relation_basis_rebuilds_sigma(self):
        rl = relation_space(sigma())
        f = wedge_construct(rl.basis[0], rl.basis[1])
        assert f == sigma()

    def test_relation_basis_rebuilds_conjugate(self):
        g = random_a_sigma(29)
        rl = relation_space(g)
        f = wedge_construct(rl.basis[0], rl.basis[1])
        assert f.degree == 2
        ok, _ = is_birational_quadratic(f)
        assert ok

    def test_component_identity(self):
        # f_i = L_j L'_k - L_k L'_j by construction
        L = [[fr(1), fr(2), fr(0)], [fr(0), fr(1), fr(1)], [fr(1), fr(0), fr(1)]]
        Lp = [[fr(1), fr(0), fr(0)], [fr(0), fr(1), fr(0)], [fr(0), fr(0), fr(1)]]
        f = wedge_construct(L, Lp)
        l = [HPoly.linear_form(*row) for row in L]
        lp = [HPoly.linear_form(*row) for row in Lp]
        assert f.components[0] == l[1] * lp[2] - l[2] * lp[1]

    def test_common_kernel_degenerates(self):
        # all six lines pass through (0:0:1): the wedge cannot be birational
        L = [[fr(1), fr(0), fr(0)], [fr(0), fr(1), fr(0)], [fr(1), fr(1), fr(0)]]
        Lp = [[fr(1), fr(-1), fr(0)], [fr(2), fr(3), fr(0)], [fr(0), fr(1), fr(0)]]
        f = wedge_construct(L, Lp)
        ok, witness = is_birational_quadratic(f)
        assert not ok
        assert witness == "degenerate"

    def test_proportional_raises(self):
        L = [[fr(1), fr(0), fr(0)], [fr(0), fr(1), fr(0)], [fr(0), fr(0), fr(1)]]
        with pytest.raises(ValueError):
            wedge_construct(L, L)


# -- indeterminacy and classification ----------------------------------------

class TestVanishingOrder:
    def test_orders_at_coordinate_point(self, xvars):
        x0, x1, x2 = xvars
        e0 = ept(1, 0, 0)
        assert vanishing_order(x1 * x2, e0) == 2
        assert vanishing_order(x0 * x1, e0) == 1
        assert vanishing_order(x0 * x0, e0) == 0

    def test_shifted_point(self, xvars):
        x0, x1, x2 = xvars
        p = ept(1, 1, 1)
        assert vanishing_order((x0 - x1) * (x0 - x2), p) == 2


class TestIndPoints:
    def test_sigma(self):
        pts = ind_points(sigma())
        assert len(pts) == 3
        assert all(mu == 1 for _, mu in pts)
        assert not pts.improper

    def test_rho_improper(self):
        pts = ind_points(rho())
        assert len(pts) == 2
        assert pts.improper  # one base point is infinitely near

    def test_tau_improper(self):
        pts = ind_points(tau())
        assert len(pts) == 1
        assert pts.improper

    def test_linear_empty(self):
        assert ind_points(identity_map()) == []


class TestClassify:
    @pytest.mark.parametrize("f,stratum", [
        (sigma(), "Sigma3"), (rho(), "Sigma2"), (tau(), "Sigma1"),
    ])
    def test_models(self, f, stratum):
        assert classify_quadratic(f).stratum == stratum

    def test_linear(self):
        assert classify_quadratic(identity_map()).stratum == "Sigma0"

    def test_not_birational(self):
        assert classify_quadratic(squares()).stratum == NOT_BIRATIONAL

    def test_conjugate_stays_sigma3(self):
        assert classify_quadratic(random_a_sigma(3)).stratum == "Sigma3"

    def test_record_format(self):
        rec = classify_quadratic(sigma()).to_record()
        assert "degree=2" in rec
        assert "stratum=Sigma3" in rec
        assert "ind_count=3" in rec


# -- fixed points and inverses -----------------------------------------------

class TestFixedPoints:
    def test_sigma(self):
        fix = fixed_points(sigma())
        assert len(fix) == 4
        expected = [ept(1, 1, 1), ept(1, -1, -1), ept(-1, 1, -1), ept(-1, -1, 1)]
        for q in expected:
            assert any(p.same_point(q) for p in fix)

    def test_identity_raises(self):
        with pytest.raises(ValueError):
            fixed_points(identity_map())


class TestInverse:
    @pytest.mark.parametrize("f", [sigma(), rho(), tau()])
    def test_models_exact(self, f):
        inv, exact = inverse_quadratic(f)
        assert exact
        assert inv.compose(f).is_identity()
        assert f.compose(inv).is_identity()

    def test_conjugate(self):
        f = random_a_sigma(17)
        inv, exact = inverse_quadratic(f)
        assert exact
        assert inv.compose(f).is_identity()

    def test_linear(self):
        a = linear_map([[fr(1), fr(1), fr(0)], [fr(0), fr(1), fr(0)],
                        [fr(0), fr(0), fr(1)]])
        inv, exact = inverse_quadratic(a)
        assert exact and inv.compose(a).is_identity()

    def test_not_birational_raises(self):
        with pytest.raises(ValueError):
            inverse_quadratic(squares())

    def test_linear_solve_route(self):
        inv = inverse_by_linear_solve(sigma(), inv_degree=2)
        assert inv.compose(sigma()).is_identity()


# -- invariant lines and normal forms ----------------------------------------

class TestInvariantLine:
    def test_documented_example(self, xvars):
        # A = (x0 - x1 + x2 : 2x0 - 2x1 + x2 : 5x0 - 4x1) leaves x0 = x1
        # invariant under A∘sigma
        x0, x1, _ = xvars
        found, lines = invariant_line_test([[1, -1, 1], [2, -2, 1], [5, -4, 0]])
        assert found
        assert any(l.monic() == (x0 - x1).monic() for l in lines)

    def test_no_line(self):
        found, lines = invariant_line_test([[1, 1, 1], [1, 2, 3], [0, 1, 1]])
        assert not found and lines == []

    def test_lines_verified_invariant(self):
        found, lines = invariant_line_test([[1, 0, 0], [2, 3, 0], [4, 0, 5]])
        assert found
        f = linear_map([[fr(1), fr(0), fr(0)], [fr(2), fr(3), fr(0)],
                        [fr(4), fr(0), fr(5)]]).compose(sigma())
        for line in lines:
            assert bi._line_invariant(f, line)


class TestNormalForm:
    def test_sigma_coefficients(self):
        coeff, conj = normal_form_sigma3(sigma())
        assert coeff == {
            "A0": fr(0), "B0": fr(-1), "C0": fr(-1),
            "A1": fr(-1), "B1": fr(0), "C1": fr(-1),
            "A2": fr(-1), "B2": fr(-1), "C2": fr(0),
        }

    def test_relations_hold_for_conjugate(self):
        # the last three coefficients are determined by the first six;
        # use an instance built with rational fixed points in general position
        from cremona.foliation import quadratic_from_points
        ind = [ept(1, 0, 0), ept(0, 1, 0), ept(0, 0, 1)]
        fix = [ept(1, 1, 1), ept(fr(6, 7), fr(3, 7), 1),
               ept(fr(1, 9), fr(2, 9), 1), ept(fr(1, 3), 1, fr(1, 6))]
        f = quadratic_from_points(ind, fix)
        coeff, _ = normal_form_sigma3(f)
        det = coeff["A1"] * coeff["B0"] - coeff["A0"] * coeff["B1"]
        delta = det.inv()
        assert coeff["A2"] == delta * (coeff["B0"] - coeff["A0"] * coeff["C1"])
        assert coeff["B2"] == delta * (coeff["A1"] - coeff["B1"] * coeff["C0"])
        assert coeff["C2"] == delta * (GaussRat(1) - coeff["C0"] * coeff["C1"])


class TestSigmaConjugateDegree:
    @pytest.mark.parametrize("a,deg,matches", [
        ([[1, 0, 0], [0, 2, 0], [0, 0, 3]], 1, True),
        ([[1, 0, 0], [2, 3, 0], [4, 0, 5]], 2, True),
        ([[1, -1, 1], [2, -2, 1], [5, -4, 0]], 4, False),
        ([[1, 1, 1], [1, 2, 3], [0, 1, 1]], 4, False),
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 1, True),
    ])
    def test_corpus(self, a, deg, matches):
        d, m = sigma_conjugate_degree(a)
        assert (d, m) == (deg, matches)

    def test_degree_drop_iff_shape(self):
        # the degree of sigma∘A∘sigma drops to <= 2 exactly when A
        # factors as f∘l∘g with l the elementary shape
        rng = random.Random(5)
        for _ in range(10):
            a = [[fr(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
            try:
                exact_inverse(a)
            except ValueError:
                continue
            d, m = sigma_conjugate_degree(a)
            assert (d <= 2) == m
