"""Shared helpers for the test suite."""

from fractions import Fraction

import pytest

from cremona.polycore import GaussRat, HPoly, CPoint


def fr(a, b=1):
    """Exact rational as a GaussRat."""
    return GaussRat(Fraction(a, b))


def gi(re, im):
    """Exact Gaussian rational re + im*i."""
    return GaussRat(Fraction(re), Fraction(im))


def ept(a, b, c):
    """Exact projective point from rationals / GaussRats."""
    return CPoint.exact_point(GaussRat.coerce(a), GaussRat.coerce(b),
                              GaussRat.coerce(c))


@pytest.fixture
def xvars():
    return HPoly.variable(0), HPoly.variable(1), HPoly.variable(2)


@pytest.fixture(scope="session")
def flow_entries():
    from cremona import flows
    return flows.load_catalog()


@pytest.fixture(scope="session")
def flow_results(flow_entries):
    """Full catalog verification, run once per session (it is slow)."""
    from cremona import flows
    return flows.verify_catalog(flow_entries)
