"""High-order derivative calculus.

Jets are stored in the derivative convention, ``deriv[k] = f^{(k)}(a)``.
Two composition routes are provided: the literal sum over block-size
profiles (exact, capped at ``PARTITION_ORDER_CAP``) and the partial Bell
polynomial recurrence, which is vectorised over sample points and is what
the norm estimators use at orders beyond the cap.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

from .gaussian import is_exact

PARTITION_ORDER_CAP = 24
BASE_TOL = 1e-12


class JetError(ValueError):
    pass


@dataclass(frozen=True)
class Jet:
    base: complex
    deriv: tuple

    def __post_init__(self):
        object.__setattr__(self, "deriv", tuple(self.deriv))
        if not self.deriv:
            raise JetError("a jet needs at least the value")

    @property
    def order(self) -> int:
        return len(self.deriv) - 1

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError(f"jet of order {self.order} cannot supply order {order}")
        return Jet(self.base, self.deriv[: order + 1])

    def taylor(self) -> tuple:
        return tuple(Fraction(1, factorial(k)) * d if is_exact(d) else d / factorial(k)
                     for k, d in enumerate(self.deriv))

    @classmethod
    def from_taylor(cls, base, coeffs) -> "Jet":
        return cls(base, tuple(c * factorial(k) for k, c in enumerate(coeffs)))

    @classmethod
    def identity(cls, base, order: int) -> "Jet":
        return cls(base, (base, 1) + (0,) * (order - 1) if order >= 1 else (base,))


@dataclass(frozen=True)
class PartitionTerm:
    a: tuple  # a[i-1] = number of blocks of size i
    m: int
    n: int
    coeff: int


@lru_cache(maxsize=None)
def _partition_terms(n: int, m: int) -> tuple:
    out = []

    def rec(i, remaining_n, remaining_m, acc):
        # choose a_i for block sizes i, i+1, ..., n (largest first would also do)
        if i > n:
            if remaining_n == 0 and remaining_m == 0:
                out.append(tuple(acc))
            return
        for ai in range(min(remaining_m, remaining_n // i), -1, -1):
            acc.append(ai)
            rec(i + 1, remaining_n - ai * i, remaining_m - ai, acc)
            acc.pop()

    rec(1, n, m, [])
    terms = []
    for a in out:
        den = 1
        for i, ai in enumerate(a, start=1):
            den *= factorial(ai) * factorial(i) ** ai
        terms.append(PartitionTerm(a, m, n, factorial(n) // den))
    return tuple(sorted(terms, key=lambda t: t.a, reverse=True))


def enumerate_partition_terms(n: int, m: int) -> list[PartitionTerm]:
    """Profiles (a_1..a_n) with sum a_i = m and sum i a_i = n, with the
    Faa di Bruno coefficient n!/(prod a_i! i!^{a_i})."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    if m > n:
        raise ValueError(f"m = {m} exceeds n = {n}")
    if n == 0:
        return [PartitionTerm((), 0, 0, 1)]
    return list(_partition_terms(n, m))


def _bell_partition(n: int, m: int, x: Sequence):
    if n == 0:
        return 1 if m == 0 else 0
    if m == 0:
        return 0
    total = 0
    for t in enumerate_partition_terms(n, m):
        prod = t.coeff
        for i, ai in enumerate(t.a, start=1):
            if ai:
                prod = prod * x[i] ** ai
        total = total + prod
    return total


def bell_table(x: Sequence, order: int):
    """Partial Bell polynomials B[n][k](x_1, x_2, ...) for n, k <= order.

    ``x[i]`` is the i-th derivative (x[0] is ignored).  Entries may be
    scalars or numpy arrays of equal shape.
    """
    zero = 0 * x[1] if order >= 1 else 0
    B = [[zero] * (order + 1) for _ in range(order + 1)]
    B[0][0] = 1 + zero
    for n in range(1, order + 1):
        for k in range(1, n + 1):
            acc = zero
            for i in range(1, n - k + 2):
                if k - 1 <= n - i:
                    acc = acc + comb(n - 1, i - 1) * x[i] * B[n - i][k - 1]
            B[n][k] = acc
    return B


def compose_derivs(F: Sequence, phi: Sequence, order: int, method: str = "auto"):
    """(F o phi)^{(n)}, n <= order, from F^{(m)}(phi(a)) and phi^{(i)}(a).

    Entries may be numpy arrays (one column per sample point)."""
    if method == "auto":
        method = "partitions" if order <= PARTITION_ORDER_CAP else "recurrence"
    out = [F[0]]
    if method == "partitions":
        if order > PARTITION_ORDER_CAP:
            raise JetError(f"partition route capped at order {PARTITION_ORDER_CAP}")
        for n in range(1, order + 1):
            acc = 0
            for m in range(1, n + 1):
                acc = acc + F[m] * _bell_partition(n, m, phi)
            out.append(acc)
    elif method == "recurrence":
        B = bell_table(phi, order)
        for n in range(1, order + 1):
            acc = 0
            for m in range(1, n + 1):
                acc = acc + F[m] * B[n][m]
            out.append(acc)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def compose_jets(F: Jet, phi: Jet, method: str = "auto") -> Jet:
    """Jet of F o phi at phi.base, by Faa di Bruno."""
    N = phi.order
    if F.order < N:
        raise JetError(f"outer jet order {F.order} < inner order {N}")
    if abs(complex(F.base) - complex(phi.deriv[0])) > BASE_TOL:
        raise JetError(f"base mismatch: F at {F.base}, phi(a) = {phi.deriv[0]}")
    return Jet(phi.base, compose_derivs(F.deriv, phi.deriv, N, method))


def exponential_formula_check(x: Sequence, m: int, trunc: int) -> bool:
    """Check m! sum_n t^n/n! B_{n,m}(x) == (sum_k x_k t^k/k!)^m mod t^{trunc+1}.

    ``x`` lists x_1, x_2, ...; missing entries are zero.  Exact arithmetic.
    """
    if trunc < m:
        raise ValueError("trunc must be >= m")
    xs = [Fraction(0)] + [Fraction(v) for v in x] + [Fraction(0)] * (trunc + 1)
    lhs = [Fraction(0)] * (trunc + 1)
    for n in range(m, trunc + 1):
        lhs[n] = Fraction(factorial(m), factorial(n)) * _bell_partition(n, m, xs)
    g = [Fraction(0)] + [xs[k] / factorial(k) for k in range(1, trunc + 1)]
    rhs = [Fraction(1)] + [Fraction(0)] * trunc
    for _ in range(m):
        new = [Fraction(0)] * (trunc + 1)
        for i, a in enumerate(rhs):
            if a:
                for j in range(1, trunc + 1 - i):
                    new[i + j] += a * g[j]
        rhs = new
    return lhs == rhs


# -- witness families ------------------------------------------------------

class FR:
    """F_R(z) = 1/(1 + e^{i theta} R (p - z)), p = phi(b)."""

    def __init__(self, b_image: complex, theta: float, R: float, domain=None):
        if R <= 0:
            raise ValueError("R must be positive")
        self.p = complex(b_image)
        self.theta = float(theta)
        self.R = float(R)
        self.u = cmath.exp(1j * self.theta) * self.R
        self.pole = self.p + 1 / self.u
        if domain is not None and domain.contains(self.pole):
            raise JetError(f"pole {self.pole} of F_R lies in X")

    def __call__(self, z):
        return 1 / (1 + self.u * (self.p - np.asarray(z, dtype=complex)))

    def derivs(self, z, N: int):
        w = 1 / (1 + self.u * (self.p - np.asarray(z, dtype=complex)))
        out, uw = [], self.u * w
        term = w
        for m in range(N + 1):
            out.append(term)
            term = term * uw * (m + 1)
        return out

    def jet_at(self, z, N: int) -> Jet:
        return Jet(complex(z), tuple(complex(d) for d in self.derivs(z, N)))

    def supnorm_deriv(self, m: int) -> float:
        return math.factorial(m) * self.R ** m

    def log_supnorm_deriv(self, m: int) -> float:
        return math.lgamma(m + 1) + m * math.log(self.R)


class Fc:
    """F_c(z) = 1/(z - c)."""

    def __init__(self, c: complex, domain=None):
        self.c = complex(c)
        if domain is not None and domain.contains(self.c):
            raise JetError(f"c = {c} lies in X")

    def __call__(self, z):
        return 1 / (np.asarray(z, dtype=complex) - self.c)

    def derivs(self, z, N: int):
        v = 1 / (np.asarray(z, dtype=complex) - self.c)
        out, term = [], v
        for n in range(N + 1):
            out.append(term)
            term = -(n + 1) * term * v
        return out

    def jet_at(self, z, N: int) -> Jet:
        return Jet(complex(z), tuple(complex(d) for d in self.derivs(z, N)))

    @staticmethod
    def supnorm_deriv(n: int, dist: float) -> float:
        if dist <= 0:
            raise ValueError("distance from c to X must be positive")
        return math.factorial(n) / dist ** (n + 1)

    @staticmethod
    def log_supnorm_deriv(n: int, dist: float) -> float:
        if dist <= 0:
            raise ValueError("distance from c to X must be positive")
        return math.lgamma(n + 1) - (n + 1) * math.log(dist)


class PolyFunction:
    """A polynomial F(w) = sum c_k w^k as a composable function object."""

    def __init__(self, coeffs):
        self.coeffs = tuple(complex(c) for c in coeffs)

    def derivs(self, z, N: int):
        from .poly import taylor_at
        z = np.asarray(z, dtype=complex)
        t = taylor_at(self.coeffs, z, N)
        return [t[k] * math.factorial(k) + 0 * z for k in range(N + 1)]

    def jet_at(self, z, N: int) -> Jet:
        return Jet(complex(z), tuple(complex(d) for d in self.derivs(z, N)))
