"""Dense univariate polynomials as coefficient tuples (ascending degree).

Coefficients may be exact (``GaussianRational``/``Fraction``/``int``) or
plain ``complex``; every routine here is generic over both except the root
finder, which works in complex floating point after an exact squarefree
split when the input allows it.
"""

from __future__ import annotations

import math
import os
from math import comb

import numpy as np

from .gaussian import GaussianRational, exact, is_exact


class RootFindingError(RuntimeError):
    def __init__(self, message, poly=None):
        super().__init__(message)
        self.poly = poly


def _is_zero(c) -> bool:
    if is_exact(c):
        return c == 0
    return c == 0


def trim(p):
    p = list(p)
    while p and _is_zero(p[-1]):
        p.pop()
    return tuple(p)


def degree(p) -> int:
    return len(trim(p)) - 1


def all_exact(p) -> bool:
    return all(is_exact(c) for c in p)


def lift(p):
    """Exact lift of int/Fraction coefficients; floats pass through."""
    return tuple(exact(c) for c in p)


def to_complex(p) -> np.ndarray:
    return np.array([complex(c) for c in p], dtype=complex)


def add(p, q):
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else 0
        b = q[k] if k < len(q) else 0
        out.append(a + b)
    return trim(out)


def scale(p, c):
    return trim(tuple(c * a for a in p))


def sub(p, q):
    return add(p, scale(q, -1))


def mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if _is_zero(a):
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def power(p, k: int):
    out = (1,)
    base = p
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def derivative(p):
    return trim(tuple(k * p[k] for k in range(1, len(p))))


def horner(p, x):
    """Evaluate at a scalar or numpy array ``x``."""
    if not p:
        return 0 * x
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * x + c
    if isinstance(x, np.ndarray) and not isinstance(acc, np.ndarray):
        acc = np.full(x.shape, complex(acc))
    return acc


def evaluate(p, x):
    """Vectorised complex evaluation; exact coefficients are converted."""
    return horner(tuple(to_complex(p)) if p else (), np.asarray(x, dtype=complex))


def compose(p, q):
    """Coefficients of p(q(z))."""
    out = ()
    for c in reversed(p):
        out = add(mul(out, q), (c,))
    return out


def conj_reverse(p, d: int):
    """z^d * conj(p)(1/z); on |z| = 1 this is z^d * conj(p(z))."""
    out = [0] * (d + 1)
    for k, c in enumerate(p):
        out[d - k] = c.conjugate()
    return trim(out)


def taylor_at(p, x, order: int):
    """Taylor coefficients p^{(k)}(x)/k!, k = 0..order, at scalar/array x."""
    out = []
    for k in range(order + 1):
        if k >= len(p):
            out.append(0 * x if isinstance(x, np.ndarray) else 0)
            continue
        shifted = tuple(comb(j, k) * p[j] for j in range(k, len(p)))
        out.append(horner(shifted, x))
    return out


# -- exact algebra ---------------------------------------------------------

def divmod_poly(p, q):
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    dq = len(q) - 1
    lead = q[-1]
    quot = [0] * max(len(p) - dq, 1)
    for k in range(len(p) - 1 - dq, -1, -1):
        c = rem[k + dq] / lead
        quot[k] = c
        if _is_zero(c):
            continue
        for j, b in enumerate(q):
            rem[k + j] = rem[k + j] - c * b
    return trim(quot), trim(rem[:dq] if dq > 0 else ())


def monic(p):
    p = trim(p)
    if not p:
        return p
    lead = p[-1]
    return tuple(c / lead for c in p)


def gcd(p, q):
    """Monic gcd; exact coefficients only."""
    a, b = trim(lift(p)), trim(lift(q))
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    if not a:
        return (GaussianRational(1),)
    return monic(a)


def squarefree_factors(p):
    """Yun's algorithm: list of (factor, multiplicity), factors squarefree."""
    f = monic(lift(p))
    if degree(f) < 1:
        return []
    df = derivative(f)
    a = gcd(f, df)
    b = divmod_poly(f, a)[0]
    c = divmod_poly(df, a)[0]
    d = sub(c, derivative(b))
    out = []
    i = 1
    while degree(b) > 0:
        a = gcd(b, d)
        if degree(a) > 0:
            out.append((a, i))
        b = divmod_poly(b, a)[0]
        c = divmod_poly(d, a)[0]
        d = sub(c, derivative(b))
        i += 1
    return out


# -- root finding ----------------------------------------------------------

def _seed_offset() -> float:
    seed = int(os.environ.get("DXM_SEED", "0"))
    return float(np.random.default_rng(seed).uniform(0.0, 2 * math.pi))


def aberth(p, tol: float = 1e-13, max_iter: int = 2000) -> np.ndarray:
    """All complex roots of p by Aberth-Ehrlich simultaneous iteration.
    Callers Newton-polish the result, so ``tol`` sits above rounding noise."""
    c = to_complex(trim(p))
    d = len(c) - 1
    if d < 1:
        return np.zeros(0, dtype=complex)
    c = c / c[-1]
    if d == 1:
        return np.array([-c[0]])
    # Fujiwara bound for the initial circle.
    radius = 2 * max(abs(c[d - k]) ** (1.0 / k) for k in range(1, d + 1))
    radius = max(radius, 1e-3)
    ang = _seed_offset() + 2 * math.pi * np.arange(d) / d
    z = 0.5 * radius * np.exp(1j * ang)
    dc = np.arange(1, d + 1) * c[1:]
    ac = np.abs(c)[::-1]
    done = np.zeros(d, dtype=bool)
    for _ in range(max_iter):
        pz = np.polyval(c[::-1], z)
        dpz = np.polyval(dc[::-1], z)
        # backward-error stop: |p(z)| at rounding level of sum |c_k||z|^k
        done |= np.abs(pz) <= 8 * d * np.finfo(float).eps * np.polyval(ac, np.abs(z))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            corr = ratio / (1 - ratio * s)
        corr = np.where(np.isfinite(corr) & ~done, corr, 0.0)
        z = z - corr
        if np.all(done | (np.abs(corr) <= tol * (1 + np.abs(z)))):
            return z
    pz = np.abs(np.polyval(c[::-1], z))
    scale_ = np.polyval(np.abs(c)[::-1], np.abs(z))
    if np.all(pz <= 1e-8 * scale_):
        return z
    raise RootFindingError("Aberth iteration did not converge", poly=tuple(c))


def _newton_polish(c: np.ndarray, z: complex, steps: int = 8) -> complex:
    dc = np.arange(1, len(c)) * c[1:]
    for _ in range(steps):
        dp = np.polyval(dc[::-1], z)
        if dp == 0:
            break
        step = np.polyval(c[::-1], z) / dp
        z = z - step
        if abs(step) <= 1e-17 * (1 + abs(z)):
            break
    return z


def _cluster(z: np.ndarray, tol: float):
    groups = []
    for r in z:
        for g in groups:
            if abs(g[0] - r) <= tol * (1 + abs(r)):
                g.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def roots(p):
    """Roots with multiplicities, as a list of (root, multiplicity).

    Exact input is split into squarefree factors first so every root handed
    to the iteration is simple; float input falls back to clustering.
    """
    p = trim(p)
    if degree(p) < 1:
        return []
    if all_exact(p):
        out = []
        for factor, mult in squarefree_factors(p):
            c = to_complex(factor)
            for r in aberth(factor):
                out.append((complex(_newton_polish(c, r)), mult))
        return out
    c = to_complex(p)
    out = []
    for r, mult in _cluster(aberth(p), 1e-6):
        if mult == 1:
            r = _newton_polish(c, r)
        out.append((complex(r), mult))
    return out
