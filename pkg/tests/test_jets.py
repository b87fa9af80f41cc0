import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dxm.jets import (FR, Fc, Jet, JetError, PARTITION_ORDER_CAP, compose_derivs, compose_jets,
                      enumerate_partition_terms, exponential_formula_check)
from dxm.domain import DomainSpec
from oracles import bell_number, exact_derivs_at, fd_derivs, poly_compose, stirling2

cplx = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


def jet_of_poly(c, a, order):
    from dxm import poly
    t = poly.taylor_at(tuple(complex(x) for x in c), complex(a), order)
    return Jet(complex(a), tuple(t[k] * math.factorial(k) for k in range(order + 1)))


def test_partition_examples():
    terms = {t.a: t.coeff for t in enumerate_partition_terms(3, 2)}
    assert terms == {(1, 1, 0): 3}
    assert [t.coeff for t in enumerate_partition_terms(3, 1)] == [1]
    with pytest.raises(ValueError):
        enumerate_partition_terms(2, 3)


@pytest.mark.parametrize("n", range(1, 13))
def test_partition_totals_bell_and_stirling(n):
    assert sum(sum(t.coeff for t in enumerate_partition_terms(n, m))
               for m in range(1, n + 1)) == bell_number(n)
    for m in range(1, n + 1):
        assert sum(t.coeff for t in enumerate_partition_terms(n, m)) == stirling2(n, m)


@given(st.lists(cplx, min_size=2, max_size=5), st.lists(cplx, min_size=2, max_size=5), cplx)
def test_compose_matches_finite_differences(F, phi, a):
    order = 6
    fj = jet_of_poly(F, complex(np.polyval(phi[::-1], a)), order)
    pj = jet_of_poly(phi, a, order)
    got = compose_jets(fj, pj).deriv
    want = fd_derivs(F, phi, a, order)
    scale = max(1.0, max(abs(w) for w in want))
    assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-9 * scale


@given(st.lists(st.fractions(-2, 2, max_denominator=5), min_size=2, max_size=4),
       st.lists(st.fractions(-2, 2, max_denominator=5), min_size=2, max_size=4),
       st.fractions(-1, 1, max_denominator=4))
def test_compose_exact_rational_mode(F, phi, a):
    order = 8
    pa = sum(c * a ** k for k, c in enumerate(phi))
    fj = Jet(pa, tuple(exact_derivs_at(F, pa, order)))
    pj = Jet(a, tuple(exact_derivs_at(phi, a, order)))
    got = compose_jets(fj, pj).deriv
    assert list(got) == exact_derivs_at(poly_compose(F, phi), a, order)
    assert all(isinstance(x, (int, Fraction)) for x in got)


@given(st.lists(cplx, min_size=9, max_size=9), st.lists(cplx, min_size=9, max_size=9))
def test_partition_and_recurrence_agree(Fd, pd):
    a = compose_derivs(Fd, pd, 8, "partitions")
    b = compose_derivs(Fd, pd, 8, "recurrence")
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_partition_route_capped():
    x = [0.1] * (PARTITION_ORDER_CAP + 2)
    with pytest.raises(JetError):
        compose_derivs(x, x, PARTITION_ORDER_CAP + 1, "partitions")
    assert len(compose_derivs(x, x, PARTITION_ORDER_CAP + 1)) == PARTITION_ORDER_CAP + 2


@given(st.lists(cplx, min_size=5, max_size=5), cplx)
def test_identity_is_neutral(Fd, a):
    F = Jet(a, tuple(Fd))
    assert compose_jets(F, Jet.identity(a, 4)).deriv == pytest.approx(F.deriv)


def test_base_mismatch_rejected():
    with pytest.raises(JetError):
        compose_jets(Jet(0.0, (1, 2)), Jet(0.0, (0.5, 1)))


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=6), st.integers(1, 5))
def test_exponential_formula(x, m):
    assert exponential_formula_check(x, m, 10)


def test_taylor_exact():
    j = Jet(0, (1, 2, 6))
    assert j.taylor() == (1, 2, 3)
    assert Jet.from_taylor(0, j.taylor()) == j


def test_witness_derivative_laws():
    # ||F_R^{(m)}|| = m! R^m: attained at phi(b) on the circle, theta = -arg p
    p = np.exp(0.7j)
    F = FR(p, -0.7, 2.0, DomainSpec.disc())
    z = np.append(np.exp(1j * np.linspace(0, 2 * np.pi, 4001)), [p, 1.0])
    d = F.derivs(z, 6)
    for m in range(7):
        assert np.max(np.abs(d[m])) == pytest.approx(F.supnorm_deriv(m), rel=1e-6)
    c = 1.25
    d = Fc(c).derivs(z, 5)
    for n in range(6):
        assert np.max(np.abs(d[n])) == pytest.approx(Fc.supnorm_deriv(n, 0.25), rel=1e-6)
    with pytest.raises(JetError):
        Fc(0.5, DomainSpec.disc())
    with pytest.raises(ValueError):
        Fc.supnorm_deriv(2, 0.0)
