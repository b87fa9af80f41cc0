"""Rational self-maps phi = num/den, evaluated in floating point and,
when the coefficients are exact, in exact Gaussian-rational arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import poly
from .gaussian import GaussianRational, is_exact


@dataclass(frozen=True, eq=False)
class RationalMap:
    num: tuple
    den: tuple
    domain: Optional[object] = None
    _cnum: np.ndarray = field(init=False, repr=False)
    _cden: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        num, den = poly.trim(self.num), poly.trim(self.den)
        if not den:
            raise ZeroDivisionError("denominator is identically zero")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_cnum", poly.to_complex(num) if num else np.zeros(1, complex))
        object.__setattr__(self, "_cden", poly.to_complex(den))

    # -- basic properties --------------------------------------------------

    @property
    def exact(self) -> bool:
        return poly.all_exact(self.num) and poly.all_exact(self.den)

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def is_constant(self) -> bool:
        """True for num/den both of degree 0 (call on a reduced map)."""
        return len(self.den) == 1 and len(self.num) <= 1

    def is_rotation(self, tol: float = 1e-12) -> bool:
        """phi(z) = lambda z with |lambda| = 1 (exact test when possible)."""
        if len(self.den) != 1 or len(self.num) != 2:
            return False
        c0, c1, d0 = self.num[0], self.num[1], self.den[0]
        if self.exact:
            lam = GaussianRational.coerce(c1) / GaussianRational.coerce(d0)
            return c0 == 0 and lam.abs2() == 1
        return abs(complex(c0)) <= tol and abs(abs(complex(c1) / complex(d0)) - 1) <= tol

    def __eq__(self, other):
        if not isinstance(other, RationalMap):
            return NotImplemented
        return poly.sub(poly.mul(self.num, other.den), poly.mul(other.num, self.den)) == ()

    def __hash__(self):
        return id(self)

    # -- evaluation --------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(self._cnum[::-1], z) / np.polyval(self._cden[::-1], z)

    def taylor(self, z, order: int):
        """[phi^{(k)}(z)/k! for k = 0..order], vectorised over z."""
        z = np.asarray(z, dtype=complex)
        nt = poly.taylor_at(tuple(self._cnum), z, order)
        dt = poly.taylor_at(tuple(self._cden), z, order)
        return _series_div(nt, dt, order)

    def derivs(self, z, order: int):
        t = self.taylor(z, order)
        return [t[k] * math.factorial(k) for k in range(order + 1)]

    def deriv1(self, z):
        z = np.asarray(z, dtype=complex)
        n = np.polyval(self._cnum[::-1], z)
        d = np.polyval(self._cden[::-1], z)
        dn = np.polyval(np.polyder(self._cnum[::-1]), z) if len(self._cnum) > 1 else 0 * z
        dd = np.polyval(np.polyder(self._cden[::-1]), z) if len(self._cden) > 1 else 0 * z
        return (dn * d - n * dd) / (d * d)

    def exact_derivs(self, z0, order: int) -> list:
        """Exact derivatives at an exact point (rational backend)."""
        if not self.exact:
            raise TypeError("exact_derivs needs exact coefficients")
        z0 = GaussianRational.coerce(z0)
        num, den = poly.lift(self.num), poly.lift(self.den)
        nt = poly.taylor_at(num, z0, order)
        dt = poly.taylor_at(den, z0, order)
        t = _series_div(nt, dt, order)
        return [t[k] * math.factorial(k) for k in range(order + 1)]

    # -- algebra ------------------------------------------------------------

    def derivative_map(self) -> "RationalMap":
        n = poly.sub(poly.mul(poly.derivative(self.num), self.den),
                     poly.mul(self.num, poly.derivative(self.den)))
        return RationalMap(n or (0,), poly.mul(self.den, self.den), self.domain)

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """self o inner, homogenised so no spurious poles are introduced."""
        d = self.degree
        p, q = inner.num or (0,), inner.den
        qpow = [(1,)]
        for _ in range(d):
            qpow.append(poly.mul(qpow[-1], q))
        ppow = [(1,)]
        for _ in range(d):
            ppow.append(poly.mul(ppow[-1], p))
        N, D = (), ()
        for k in range(d + 1):
            basis = poly.mul(ppow[k], qpow[d - k])
            if k < len(self.num):
                N = poly.add(N, poly.scale(basis, self.num[k]))
            if k < len(self.den):
                D = poly.add(D, poly.scale(basis, self.den[k]))
        return reduce(RationalMap(N or (0,), D, self.domain))

    def fixed_point_poly(self):
        """num(z) - z den(z)."""
        return poly.sub(self.num, poly.mul((0, 1), self.den))

    def to_text(self) -> str:
        return f"({_poly_text(self.num)})/({_poly_text(self.den)})"


def _series_div(nt, dt, order):
    t = [nt[0] / dt[0]]
    for k in range(1, order + 1):
        acc = nt[k]
        for j in range(1, k + 1):
            acc = acc - dt[j] * t[k - j]
        t.append(acc / dt[0])
    return t


def reduce(m: RationalMap) -> RationalMap:
    """Cancel common factors (exact coefficients only) and make den monic."""
    num, den = m.num, m.den
    if m.exact:
        num, den = poly.lift(num), poly.lift(den)
        g = poly.gcd(num, den) if num else (GaussianRational(1),)
        if poly.degree(g) > 0:
            num = poly.divmod_poly(num, g)[0]
            den = poly.divmod_poly(den, g)[0]
        lead = den[-1]
        num = tuple(c / lead for c in num)
        den = tuple(c / lead for c in den)
    else:
        lead = complex(den[-1])
        num = tuple(complex(c) / lead for c in num)
        den = tuple(complex(c) / lead for c in den)
    return RationalMap(num or (0,), den, m.domain)


def _coef_text(c) -> str:
    if isinstance(c, GaussianRational):
        re, im = c.re, c.im
        if im == 0:
            return f"({re})"
        if re == 0:
            return f"({im}i)" if im.denominator == 1 else f"({im.numerator}i/{im.denominator})"
        imt = f"{abs(im.numerator)}i" + (f"/{im.denominator}" if im.denominator != 1 else "")
        return f"({re}{'+' if im > 0 else '-'}{imt})"
    if isinstance(c, (int, Fraction)):
        return f"({c})"
    c = complex(c)
    return f"({c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}i)"


def _poly_text(p) -> str:
    if not p:
        return "0"
    terms = []
    for k, c in enumerate(p):
        if is_exact(c) and c == 0:
            continue
        if not is_exact(c) and complex(c) == 0:
            continue
        ct = _coef_text(c)
        terms.append(ct if k == 0 else f"{ct}*z" if k == 1 else f"{ct}*z^{k}")
    return " + ".join(terms) if terms else "0"
