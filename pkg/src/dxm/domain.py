"""The ambient set X: [0, 1] or the closed unit disc.

Sup-norms here are sampled, so they are lower bounds; every result carries
the resolution that produced it.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

GOLDEN = (math.sqrt(5) - 1) / 2


class DomainError(ValueError):
    pass


class Kind(str, enum.Enum):
    INTERVAL = "interval"
    DISC = "disc"


@dataclass(frozen=True)
class DomainSpec:
    kind: Kind = Kind.DISC
    boundary_samples: int = 2048
    interior_grid: int = 256
    refine_iters: int = 40

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.boundary_samples < 64:
            raise DomainError("boundary_samples must be >= 64")

    @classmethod
    def disc(cls, **kw) -> "DomainSpec":
        return cls(Kind.DISC, **kw)

    @classmethod
    def interval(cls, **kw) -> "DomainSpec":
        return cls(Kind.INTERVAL, **kw)

    @property
    def is_disc(self) -> bool:
        return self.kind is Kind.DISC

    # parameterisation of the boundary (disc) / of X itself (interval)
    def param(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t) if self.is_disc else t.astype(complex)

    def param_grid(self) -> tuple[np.ndarray, float, bool]:
        """(parameters, spacing, periodic)."""
        n = self.boundary_samples
        if self.is_disc:
            return 2 * np.pi * np.arange(n) / n, 2 * np.pi / n, True
        return np.linspace(0.0, 1.0, n), 1.0 / (n - 1), False

    def boundary_points(self) -> np.ndarray:
        return self.param(self.param_grid()[0])

    def interior_points(self) -> np.ndarray:
        if not self.is_disc:
            return np.zeros(0, dtype=complex)
        g = np.linspace(-1.0, 1.0, self.interior_grid)
        xx, yy = np.meshgrid(g, g)
        z = (xx + 1j * yy).ravel()
        return z[np.abs(z) < 1.0]

    def sample_points(self) -> np.ndarray:
        return np.concatenate([self.boundary_points(), self.interior_points()])

    def contains(self, z, tol: float = 1e-12) -> bool:
        z = complex(z)
        if self.is_disc:
            return abs(z) <= 1 + tol
        return abs(z.imag) <= tol and -tol <= z.real <= 1 + tol

    def distance(self, z) -> float:
        z = complex(z)
        if self.is_disc:
            return max(abs(z) - 1.0, 0.0)
        x = min(max(z.real, 0.0), 1.0)
        return abs(z - x)

    def on_boundary(self, z, tol: float = 1e-12) -> bool:
        if not self.is_disc:
            return self.contains(z, tol)
        return abs(abs(complex(z)) - 1) <= tol

    def resolution(self) -> dict:
        return {"boundary_samples": self.boundary_samples,
                "interior_grid": self.interior_grid,
                "refine_iters": self.refine_iters}


# -- sup norms ---------------------------------------------------------------

@dataclass
class SupNorm:
    value: float
    argmax: complex
    resolution: dict

    def __float__(self):
        return self.value


def golden_max(g: Callable[[float], float], lo: float, hi: float, iters: int):
    """Maximise a unimodal scalar function on [lo, hi]; returns (t, g(t))."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def _local_max_indices(vals: np.ndarray, periodic: bool, top: int) -> list[int]:
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    if not periodic:
        left[0] = -np.inf
        right[-1] = -np.inf
    idx = np.nonzero((vals >= left) & (vals >= right))[0]
    idx = idx[np.argsort(vals[idx])[::-1]]
    return [int(i) for i in idx[:top]]


def refine_on_param(f: Callable, X: DomainSpec, params: np.ndarray, vals: np.ndarray,
                    spacing: float, periodic: bool, top: int = 4) -> tuple[float, float]:
    """Golden-section refinement around the best sampled local maxima of
    |f(param(t))|; returns (t*, value) with value >= the best sample."""
    best_i = int(np.argmax(vals))
    best_t, best_v = float(params[best_i]), float(vals[best_i])
    if X.refine_iters <= 0:
        return best_t, best_v
    lo_lim, hi_lim = (-np.inf, np.inf) if periodic else (0.0, 1.0)

    def g(t):
        return float(np.abs(f(X.param(np.array([t]))))[0])

    for i in _local_max_indices(vals, periodic, top):
        t0 = float(params[i])
        lo, hi = max(t0 - spacing, lo_lim), min(t0 + spacing, hi_lim)
        t, v = golden_max(g, lo, hi, X.refine_iters)
        if v > best_v:
            best_t, best_v = t, v
    return best_t, best_v


def sup_norm(f: Callable, X: DomainSpec, analytic_hint: bool = True) -> SupNorm:
    """Sampled sup of |f| over X (a lower bound on the true sup).

    For analytic f on the disc only the boundary circle is sampled."""
    params, spacing, periodic = X.param_grid()
    try:
        vals = np.abs(np.asarray(f(X.param(params)), dtype=complex))
    except (ZeroDivisionError, FloatingPointError) as exc:
        raise DomainError(f"evaluation failed on the boundary: {exc}") from exc
    bad = ~np.isfinite(vals)
    if bad.any():
        raise DomainError(f"non-finite value at {complex(X.param(params[bad][:1])[0])}")
    t, v = refine_on_param(f, X, params, vals, spacing, periodic)
    best_z = complex(X.param(np.array([t]))[0])
    if X.is_disc and not analytic_hint:
        zi = X.interior_points()
        vi = np.abs(np.asarray(f(zi), dtype=complex))
        if vi.size and not np.all(np.isfinite(vi)):
            raise DomainError(f"non-finite value at {complex(zi[~np.isfinite(vi)][0])}")
        if vi.size and vi.max() > v:
            k = int(np.argmax(vi))
            v, best_z = float(vi[k]), complex(zi[k])
    return SupNorm(float(v), best_z, X.resolution())


# -- external circular tangents ---------------------------------------------

@dataclass
class TangentWitness:
    center: complex      # a point outside X nearest to c
    theta: float         # e^{i theta} R (c - z) condition angle
    R_min: float         # any R > R_min works

    @property
    def normal(self) -> complex:
        return cmath.exp(-1j * self.theta)


def external_circular_tangent(X: DomainSpec, c, tol: float = 1e-12,
                              r: float = 0.5) -> tuple[bool, Optional[TangentWitness]]:
    c = complex(c)
    if not X.contains(c, tol):
        raise DomainError(f"{c} is not a point of X")
    if X.is_disc:
        if abs(abs(c) - 1) > tol:
            return False, None
        u = c / abs(c)
        return True, TangentWitness((1 + r) * u, -cmath.phase(u), 0.0)
    # interval: a disc touching from above, centre c + i r
    return True, TangentWitness(c + 1j * r, -math.pi / 2, 0.0)


# -- thm2 region decomposition --------------------------------------------------

@dataclass
class RegionDecomposition:
    K_points: np.ndarray
    eps: float
    max_phi_on_K: float
    margin: float
    passes: bool
    resolution: dict = field(default_factory=dict)


def theorem2_decomposition(phi, X: DomainSpec, eps: float,
                           safety: float = 1e-3) -> RegionDecomposition:
    """Sample K = {|phi'| >= 1 - eps} and measure how far phi(K) stays from
    the boundary.  Passing means margin > safety; empty K passes with
    margin 1."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    z = X.sample_points()
    d = np.abs(phi.deriv1(z))
    K = z[d >= 1 - eps]
    if K.size == 0:
        return RegionDecomposition(K, eps, 0.0, 1.0, True, X.resolution())
    vals = phi(K)
    if X.is_disc:
        mx = float(np.max(np.abs(vals)))
        margin = 1.0 - mx
    else:
        # int([0,1]) is empty in the plane: any K point defeats the hypothesis
        mx = float(np.max(np.abs(vals)))
        margin = 0.0
    return RegionDecomposition(K, eps, mx, margin, margin > safety, X.resolution())


def best_decomposition(phi, X: DomainSpec, kmax: int = 20,
                       safety: float = 1e-3) -> RegionDecomposition:
    """Largest eps in {2^-k} whose decomposition passes (else the last tried)."""
    last = None
    for k in range(kmax + 1):
        last = theorem2_decomposition(phi, X, 2.0 ** -k, safety)
        if last.passes:
            return last
    return last
