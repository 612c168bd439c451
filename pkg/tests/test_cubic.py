"""Jacobian factorization, cubic configuration labels, identity corpus."""

import pytest

from cremona.polycore import GaussRat, HPoly
from cremona.ratmap import RatMap, sigma
from cremona import birat
from cremona import cubic
from cremona.cli import parse_map

from conftest import fr


def by_monic(factors):
    return {fac.monic(): mult for fac, mult in factors}


class TestFactorJacobianCubic:
    def test_three_lines(self, xvars):
        x0, x1, x2 = xvars
        f = parse_map("[x0^3:x1^2*x2:x0*x1*x2]")
        assert by_monic(cubic.factor_jacobian_cubic(f)) == {
            x0.monic(): 3, x1.monic(): 2, x2.monic(): 1}

    def test_conic_and_line(self, xvars):
        x0, x1, x2 = xvars
        f = parse_map("[x0*(x0^2+x1*x2):x1^3:x1*(x0^2+x1*x2)]")
        fac = by_monic(cubic.factor_jacobian_cubic(f))
        assert (x0 * x0 + x1 * x2).monic() in fac
        assert x1.monic() in fac

    def test_single_line_multiplicity_six(self, xvars):
        x0, x1, x2 = xvars
        f = parse_map("[x0*x2^2+x1^3:x1*x2^2:x2^3]")
        assert by_monic(cubic.factor_jacobian_cubic(f)) == {x2.monic(): 6}

    def test_rejects_wrong_degree(self):
        with pytest.raises(ValueError):
            cubic.factor_jacobian_cubic(sigma())

    def test_rejects_vanishing_jacobian(self, xvars):
        x0, x1, x2 = xvars
        f = RatMap([x0 ** 3, x0 ** 2 * x1, x0 * x1 ** 2], reduce=False)
        with pytest.raises(ValueError):
            cubic.factor_jacobian_cubic(f)

    def test_degree_six_with_multiplicity(self):
        for f, _, _ in cubic.canonical_models():
            total = sum(fac.degree * m
                        for fac, m in cubic.factor_jacobian_cubic(f))
            assert total == 6

    def test_at_most_one_smooth_conic_contracted(self):
        # a map never contracts two distinct reduced conics
        for f, _, _ in cubic.canonical_models():
            smooth = [c for c in cubic.analyze(f).components
                      if c.kind == cubic.CONIC and c.smooth and c.contracted]
            assert len(smooth) <= 1


class TestCorpus:
    def test_corpus_size(self):
        assert len(cubic.canonical_models()) == 33

    def test_all_fifteen_labels_present(self):
        labels = {label for _, label, _ in cubic.canonical_models()}
        assert labels == {"{%d}" % k for k in range(1, 16)}

    def test_orbit_dimensions_recorded(self):
        for _, _, dim in cubic.canonical_models():
            assert 14 <= dim <= 16


class TestClassifyCubic:
    @pytest.mark.parametrize("idx", range(33))
    def test_model_gets_its_label(self, idx):
        f, label, _ = cubic.canonical_models()[idx]
        assert cubic.classify_cubic(f).label == label

    def test_labels_pairwise_separated(self):
        seen = {}
        for f, label, _ in cubic.canonical_models():
            sig = cubic.analyze(f).signature
            assert seen.setdefault(sig, label) == label

    def test_generic_conic_family_member(self):
        # the two-parameter conic family at (1, 3)
        f = parse_map("[x0*(x0^2+x1^2+x0*x1+3*x0*x2+x1*x2)"
                      ":x1*(x0^2+x1^2+x0*x1+3*x0*x2+x1*x2):x0*x1*x2]")
        assert cubic.classify_cubic(f).label == "{15}"

    def test_three_lines_general_position(self):
        conf = cubic.classify_cubic(parse_map("[x0^3:x1^2*x2:x0*x1*x2]"))
        assert conf.label == "{3}"

    def test_three_concurrent_lines(self):
        conf = cubic.classify_cubic(
            parse_map("[x0^3:x0^2*x1:(x0-x1)*x1*x2]"))
        assert conf.label == "{4}"
        assert conf.incidences["concurrency"] == [(3, False)]

    def test_no_four_lines_in_general_position(self):
        # no model contracts four lines with no three concurrent
        for f, _, _ in cubic.canonical_models():
            conf = cubic.analyze(f)
            kinds = conf.signature[0]
            lines = [c for c in kinds if c[0] == cubic.LINE]
            if len(lines) == 4 and not any(
                    c[0] == cubic.CONIC for c in kinds):
                assert conf.incidences["concurrency"], \
                    "four contracted lines must have a concurrency"

    def test_rejects_non_birational(self, xvars):
        x0, x1, x2 = xvars
        with pytest.raises(ValueError):
            cubic.classify_cubic(RatMap([x0 ** 3, x1 ** 3, x2 ** 3]))

    def test_linear_conjugate_keeps_label(self):
        L = parse_map("[x0+2*x1:x1-x2:x0+x2]")
        Linv, exact = birat.inverse_quadratic(L)
        assert exact
        for idx in (0, 7, 19, 21, 28, 31):
            f, label, _ = cubic.canonical_models()[idx]
            g = Linv.compose(f).compose(L)
            assert cubic.classify_cubic(g).label == label

    def test_unmatched_bucket(self):
        # generic quadratic sandwich: contracts a smooth conic and four
        # lines, but its incidence signature is outside the corpus
        A = parse_map("[x1+x2:x1+2*x2:2*x0+x1+x2]")
        f = sigma().compose(A).compose(sigma())
        conf = cubic.classify_cubic(f)
        assert conf.label == "UNMATCHED"
        kinds = sorted(c.kind for c in conf.components)
        assert kinds == [cubic.CONIC] + [cubic.LINE] * 4
        assert all(c.contracted for c in conf.components)

    def test_split_conic_branches(self):
        # this family member has a rank-2 conic splitting into two
        # irrational lines, contracted to two distinct points
        f = parse_map("[x0*(x0^2+x1^2+3*x0*x1+x0*x2)"
                      ":x1*(x0^2+x1^2+3*x0*x1+x0*x2):x0*x1*x2]")
        conf = cubic.classify_cubic(f)
        assert conf.label == "{14}"
        split = [c for c in conf.components
                 if c.kind == cubic.CONIC and not c.smooth]
        assert len(split) == 1
        comp = split[0]
        assert len(comp.branches) == 2
        assert all(con for _, con, _ in comp.branches)
        # branches land on different points, so the split conic does not
        # count as contracted-as-a-conic
        assert not comp.contracted


class TestInversePairs:
    PAIRS = [
        ("[x0*(x0^2+x1*x2):x1^3:x1*(x0^2+x1*x2)]",
         "[x0*x1*x2:x1*x2^2:x2^3-x0^2*x1]"),
        ("[x1^2*x2:x0*(x0*x2+x1^2):x1*(x0*x2+x1^2)]",
         "[x1*(x2^2-x0*x1):x2*(x2^2-x0*x1):x0*x2^2]"),
    ]

    @pytest.mark.parametrize("fs,gs", PAIRS)
    def test_documented_pairs(self, fs, gs):
        assert cubic.verify_inverse_pair(parse_map(fs), parse_map(gs))

    @pytest.mark.parametrize("fs,gs", PAIRS)
    def test_component_counts_agree(self, fs, gs):
        assert (cubic.exc_component_count(parse_map(fs))
                == cubic.exc_component_count(parse_map(gs)))

    def test_sigma_as_cubic(self, xvars):
        x0, x1, x2 = xvars
        s = sigma()
        f = RatMap([x0 * c for c in s.components], reduce=False)
        assert cubic.verify_inverse_pair(f, s)

    def test_rejects_wrong_pairing(self):
        f = parse_map(self.PAIRS[0][0])
        g = parse_map(self.PAIRS[1][1])
        assert not cubic.verify_inverse_pair(f, g)


class TestIdentityCorpus:
    def test_corpus_is_large_enough(self):
        names = [name for name, _, _ in cubic.identity_corpus()]
        assert len(names) == len(set(names))
        assert sum(1 for n in names if n.startswith("conj")) >= 10
        assert sum(1 for n in names if n.startswith("rho-isotropy")) == 5

    def test_every_identity_verifies(self):
        failures = [n for n, ok in cubic.verify_identity_corpus() if not ok]
        assert failures == []

    def test_decomposition_rejects_wrong_target(self):
        wrong = parse_map("[x0^3:x1^3:x2^3]")
        from cremona.ratmap import rho
        assert not cubic.verify_noether_decomposition(
            wrong, [rho(), parse_map("[x1:x2:x0]")])

    def test_quadratic_sandwich_decomposition(self):
        # sigma A sigma with invertible linear A is a cubic contracting a
        # smooth conic and four lines
        A = parse_map("[x1+x2:x1+2*x2:2*x0+x1+x2]")
        s = sigma()
        f = s.compose(A).compose(s)
        assert f.degree == 3
        assert cubic.verify_noether_decomposition(f, [s, A, s])
