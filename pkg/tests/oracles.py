"""Independent oracles used by the tests.  Nothing here calls the Faa di
Bruno code under test."""

import math
from fractions import Fraction

import mpmath as mp


def poly_eval(c, z):
    acc = 0
    for a in reversed(c):
        acc = acc * z + a
    return acc


def fd_derivs(F, phi, a, order, dps=40):
    """(F o phi)^{(n)}(a), n <= order, by high-precision finite differences."""
    with mp.workdps(dps):
        Fc = [mp.mpc(x) for x in F]
        pc = [mp.mpc(x) for x in phi]
        f = lambda z: poly_eval(Fc, poly_eval(pc, z))
        return [complex(mp.diff(f, mp.mpc(a), n)) for n in range(order + 1)]


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def poly_compose(F, phi):
    """F(phi(z)) by Horner on coefficient lists (exact for Fractions)."""
    out = [0]
    for a in reversed(F):
        out = poly_mul(out, phi)
        out[0] += a
    return out


def exact_derivs_at(p, a, order):
    """p^{(n)}(a) exactly, by expanding p(a + h) in h."""
    shifted = poly_compose(p, [a, 1])
    return [Fraction(shifted[n]) * math.factorial(n) if n < len(shifted) else Fraction(0)
            for n in range(order + 1)]


def bell_number(n):
    # Bell triangle
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[0]


def stirling2(n, k):
    S = [[0] * (k + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, min(i, k) + 1):
            S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1]
    return S[n][k]


def mobius_witness_norm(R, N):
    """Truncated ||F_R o phi||_D for phi = (2z-1)/(2-z), p = 1, theta = 0 and
    M_n = n!^2, from the closed form (F_R o phi)(z) = (2-z)/(2+3R-(1+3R)z):
    ||g|| = 1 and ||g^{(n)}|| = n! 3R (1+3R)^{n-1} for n >= 1."""
    total = 1.0
    for n in range(1, N + 1):
        total += 3 * R * (1 + 3 * R) ** (n - 1) / math.factorial(n)
    return total
