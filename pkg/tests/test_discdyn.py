import cmath
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dxm import discdyn as dd
from dxm.gaussian import GaussianRational as G
from dxm.maps import RationalMap
from dxm.parsing import parse_map

UNRESOLVED = "1/2*(z + ((1+i)z-1)/(z+(i-1)))"


def blaschke(zeros, lam=G(1)):
    num, den = (lam,), (G(1),)
    from dxm import poly
    for a in zeros:
        num = poly.mul(num, (-a, G(1)))
        den = poly.mul(den, (G(1), -a.conjugate()))
    return dd.validate_self_map(num, den)


def test_mobius_elliptic_fixed_point():
    phi = parse_map("(2z-1)/(z-2)")
    fps = dd.fixed_points(phi)
    inner = [f for f in fps if f.location is dd.Location.INTERIOR]
    assert len(inner) == 1
    assert inner[0].z == pytest.approx(2 - math.sqrt(3), abs=1e-10)
    # phi'(z) = -3/(z-2)^2 = -1 at 2 - sqrt 3
    assert inner[0].abs_multiplier == pytest.approx(1, abs=1e-8)
    assert dd.argument_principle_count(phi) == pytest.approx(1, abs=1e-6)
    res = dd.is_inner(phi)
    assert res and res.blaschke.zeros[0] == pytest.approx(0.5)


def test_denjoy_wolff_parabolic():
    phi = parse_map("(1+z)^2/4")
    dw = dd.denjoy_wolff(phi)
    assert abs(dw.point - 1) <= 1e-6 and dw.boundary
    assert abs(phi.deriv1(1.0) - 1) <= 1e-6
    c = dd.classify(phi)
    assert c.case is dd.Case.CASE3A_II
    assert abs(c.denjoy_wolff - 1) <= 1e-6


def test_denjoy_wolff_interior_and_rotation():
    assert abs(dd.denjoy_wolff(parse_map("z/2")).point) < 1e-10
    with pytest.raises(dd.DenjoyWolffError):
        dd.denjoy_wolff(parse_map("(3+4i)/5*z"))


def test_contact_set_cubic():
    E = dd.contact_set(parse_map("(1-z^3)/2"))
    want = [cmath.exp(1j * math.pi * k / 3) for k in (1, 3, 5)]
    assert len(E) == 3
    for w in want:
        assert min(abs(w - e) for e in E) < 1e-12
    with pytest.raises(ValueError):
        dd.contact_set(parse_map("z^2"))


def test_classifications():
    assert dd.classify(parse_map("(1-z^3)/2")).case is dd.Case.NO_BOUNDARY_FIXED
    assert dd.classify(parse_map("z^2")).case is dd.Case.INNER
    assert dd.classify(parse_map(UNRESOLVED)).case is dd.Case.CASE3A_II
    # (1+z)/2 fixes 1 with multiplier 1/2 and has no interior fixed point
    c = dd.classify(parse_map("(1+z)/2"))
    assert c.case is dd.Case.CASE3A_I
    assert c.evidence[-1].multiplier == pytest.approx(0.5)
    # z(1+z)/2: interior fixed point 0, boundary fixed point 1 with multiplier 3/2
    c = dd.classify(parse_map("z*(1+z)/2"))
    assert c.case is dd.Case.CASE3B


def test_unresolved_boundary_fixed_point():
    phi = parse_map(UNRESOLVED)
    assert phi(1.0) == pytest.approx(1) and phi.deriv1(1.0) == pytest.approx(1)


def test_iterates():
    phi = parse_map("(1-z^3)/2")
    assert dd.iterate(phi, 2) == parse_map("(7 + 3z^3 - 3z^6 + z^9)/16", validate=False)
    z, d = dd.orbit_eval(phi, np.array([0.3 + 0.2j]), 3)
    assert z[0] == pytest.approx(phi(phi(phi(0.3 + 0.2j))))
    with pytest.raises(dd.DegreeCapError):
        dd.iterate(parse_map("z^2"), 10)


def test_z_squared_periodic_points():
    pts = dd.inner_boundary_periodic_points(parse_map("z^2"), 4)
    by_period = {}
    for p in pts:
        by_period[p.period] = by_period.get(p.period, 0) + 1
        assert abs(p.multiplier) == pytest.approx(2 ** p.period)
    # 2^N - 1 points of period dividing N
    assert by_period == {1: 1, 2: 2, 3: 6, 4: 12}


def test_validate_self_map():
    with pytest.raises(dd.SelfMapError):
        dd.validate_self_map((0, 1), (F(1, 2), 1))  # pole at -1/2
    with pytest.raises(dd.SelfMapError):
        dd.validate_self_map((0, 0, 1, 1), (1,))  # |phi(1)| = 2


zero = st.builds(lambda r, t: G(F(round(r * 64), 64) * F(round(1000 * math.cos(t)), 1000),
                                F(round(r * 64), 64) * F(round(1000 * math.sin(t)), 1000)),
                 st.floats(0, 0.9), st.floats(0, 2 * math.pi))


@given(st.lists(zero, min_size=1, max_size=3))
def test_blaschke_products_are_inner(zeros):
    phi = blaschke(zeros)
    res = dd.is_inner(phi)
    assert res
    assert dd.argument_principle_count(phi) == pytest.approx(len(zeros), abs=1e-6)
    assert dd.classify(phi, 4).case is dd.Case.INNER
