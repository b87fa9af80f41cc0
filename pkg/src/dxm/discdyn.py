"""Dynamics of rational self-maps of the closed unit disc.

Boundary behaviour of iterates is read off the *contact set*
E = {|w| = 1 : |phi(w)| = 1}.  For a non-inner map E is finite, and since a
non-constant map sends interior points to interior points, phi_N(w) lies on
the circle exactly when the whole orbit w, phi(w), ..., phi_{N-1}(w) stays in
E.  Periodic boundary points, the sets S_N and the multipliers of phi_N are
therefore computed from the finite map E -> circle without ever expanding
phi_N.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import poly
from .domain import DomainSpec, golden_max, sup_norm
from .maps import RationalMap, reduce

SELF_MAP_TOL = 1e-9
POLE_TOL = 1e-9
BOUNDARY_TOL = 1e-7
MULT_DEAD_ZONE = 1e-7
INNER_TOL = 1e-9
DEGREE_CAP = 512


class SelfMapError(ValueError):
    pass


class DenjoyWolffError(RuntimeError):
    pass


class DegreeCapError(ValueError):
    pass


# -- validation & iteration ----------------------------------------------------

def validate_self_map(num, den, X: Optional[DomainSpec] = None) -> RationalMap:
    """Reduced RationalMap after checking poles and the self-map property."""
    X = X or DomainSpec.disc()
    m = reduce(RationalMap(poly.lift(num), poly.lift(den), X))
    for r, _ in poly.roots(m.den):
        if X.is_disc and abs(r) <= 1 + POLE_TOL:
            raise SelfMapError(f"pole at {r:.12g} lies in the closed disc")
        if not X.is_disc and X.distance(r) <= POLE_TOL:
            raise SelfMapError(f"pole at {r:.12g} lies on [0, 1]")
    if X.is_disc:
        s = sup_norm(m, X, analytic_hint=True)
        if s.value > 1 + SELF_MAP_TOL:
            raise SelfMapError(f"|phi| reaches {s.value:.12g} > 1 at {s.argmax:.6g}")
    else:
        t = np.linspace(0.0, 1.0, X.boundary_samples)
        v = m(t)
        if np.max(np.abs(v.imag)) > SELF_MAP_TOL:
            raise SelfMapError("phi is not real on [0, 1]")
        if v.real.min() < -SELF_MAP_TOL or v.real.max() > 1 + SELF_MAP_TOL:
            raise SelfMapError("phi does not map [0, 1] into itself")
    return m


def iterate(phi: RationalMap, N: int, degree_cap: int = DEGREE_CAP) -> RationalMap:
    """phi_N by exact coefficient composition."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if phi.degree ** N > degree_cap and phi.degree > 1:
        raise DegreeCapError(f"degree {phi.degree}^{N} exceeds cap {degree_cap}")
    out = phi
    for _ in range(N - 1):
        out = phi.compose(out)
    return out


def orbit_eval(phi: RationalMap, z, N: int):
    """(phi_N(z), phi_N'(z)) by iterating pointwise (chain rule)."""
    z = np.asarray(z, dtype=complex)
    d = np.ones_like(z)
    for _ in range(N):
        d = d * phi.deriv1(z)
        z = phi(z)
    return z, d


# -- fixed points ----------------------------------------------------------------

class Location(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass
class FixedPointInfo:
    z: complex
    location: Location
    multiplier: complex
    period: int = 1

    @property
    def abs_multiplier(self) -> float:
        return abs(self.multiplier)

    def to_json(self) -> dict:
        return {"z": self.z, "location": self.location.value, "multiplier": self.multiplier,
                "abs_multiplier": self.abs_multiplier, "period": self.period}


def _locate(z: complex) -> Location:
    return Location.BOUNDARY if abs(abs(z) - 1) <= BOUNDARY_TOL else Location.INTERIOR


def fixed_points(phi: RationalMap) -> list[FixedPointInfo]:
    """Fixed points in the closed disc with multipliers phi'(z)."""
    fp = phi.fixed_point_poly()
    if not fp:
        raise ValueError("identity map: every point is fixed")
    out = []
    for r, mult in poly.roots(fp):
        if abs(r) > 1 + BOUNDARY_TOL:
            continue
        if abs(complex(phi(r)) - r) > 1e-9:
            # polish with Newton on phi(z) - z
            z = r
            for _ in range(20):
                g = complex(phi(z)) - z
                dg = complex(phi.deriv1(z)) - 1
                if dg == 0:
                    break
                z = z - (mult * g / dg)
            r = z
        if abs(complex(phi(r)) - r) > 1e-9:
            raise poly.RootFindingError(f"fixed point {r} has residual "
                                        f"{abs(complex(phi(r)) - r):.3g}", poly=fp)
        if _locate(r) is Location.BOUNDARY:
            r = r / abs(r)
        out.append(FixedPointInfo(r, _locate(r), complex(phi.deriv1(r))))
    out.sort(key=lambda f: (f.location != Location.INTERIOR, -f.z.real, f.z.imag))
    return out


# -- contact set ---------------------------------------------------------------

def contact_polynomial(phi: RationalMap):
    """Q(z) = z^D (|num|^2 - |den|^2) on |z| = 1 as a polynomial."""
    D = phi.degree
    return poly.sub(poly.mul(phi.num, poly.conj_reverse(phi.num, D)),
                    poly.mul(phi.den, poly.conj_reverse(phi.den, D)))


def contact_set(phi: RationalMap) -> list[complex]:
    """Points of the unit circle where |phi| = 1; None-safe for inner maps
    (raises ValueError, since the set is then the whole circle)."""
    Q = contact_polynomial(phi)
    if not Q or all(abs(complex(c)) <= 1e-14 for c in Q):
        raise ValueError("|phi| = 1 on the whole circle (inner map)")
    out = []
    for r, _ in poly.roots(Q):
        if abs(abs(r) - 1) > 1e-5:
            continue
        t0 = cmath.phase(r)
        if not phi.exact:
            t0, _ = golden_max(lambda t: float(abs(phi(np.exp(1j * t)))), t0 - 1e-4,
                               t0 + 1e-4, 80)
        w = cmath.exp(1j * t0)
        if abs(complex(phi(w))) < 1 - 1e-9:
            continue
        if all(abs(w - v) > 1e-7 for v in out):
            out.append(w)
    out.sort(key=lambda w: cmath.phase(w) % (2 * math.pi))
    return out


@dataclass
class BoundaryOrbit:
    """The map E -> circle restricted to contact points."""
    points: list
    succ: list  # index into points, or None when phi(w) is not a contact point
    images: list

    def chain(self, i: int, N: int) -> Optional[int]:
        """Index of phi_N(points[i]) if the orbit stays in E for N steps."""
        for _ in range(N):
            if i is None:
                return None
            i = self.succ[i]
        return i


def boundary_orbit(phi: RationalMap, E: Optional[list] = None) -> BoundaryOrbit:
    E = contact_set(phi) if E is None else E
    images = [complex(phi(w)) for w in E]
    succ = []
    for v in images:
        j = min(range(len(E)), key=lambda k: abs(E[k] - v)) if E else None
        succ.append(j if j is not None and abs(E[j] - v) <= BOUNDARY_TOL else None)
    return BoundaryOrbit(list(E), succ, images)


def boundary_periodic_points(phi: RationalMap, N_max: int,
                             orbit: Optional[BoundaryOrbit] = None) -> list[FixedPointInfo]:
    """Boundary points fixed by some phi_N, N <= N_max (minimal period),
    with multipliers phi_N'(z).  Non-inner maps only."""
    ob = orbit or boundary_orbit(phi)
    out = []
    for i, w in enumerate(ob.points):
        for N in range(1, N_max + 1):
            if ob.chain(i, N) == i:
                zN, dN = orbit_eval(phi, np.array([w]), N)
                out.append(FixedPointInfo(w, Location.BOUNDARY, complex(dN[0]), N))
                break
    return out


def inner_boundary_periodic_points(phi: RationalMap, N_max: int,
                                   degree_cap: int = 64) -> list[FixedPointInfo]:
    """Same for inner maps: roots of the expanded iterate's fixed-point
    polynomial, polished and checked by pointwise iteration (evaluating the
    expanded iterate in floating point is badly conditioned)."""
    out = []
    # float expansion is enough: every root is re-polished below
    fphi = RationalMap(tuple(complex(c) for c in phi.num), tuple(complex(c) for c in phi.den))
    for N in range(1, N_max + 1):
        if phi.degree > 1 and phi.degree ** N > degree_cap:
            break
        fp = iterate(fphi, N).fixed_point_poly() if N > 1 else phi.fixed_point_poly()
        fp = poly.trim(tuple(c if abs(complex(c)) > 1e-14 else 0 for c in fp)) if N > 1 else fp
        if not fp:
            break  # identity iterate
        for r, _ in poly.roots(fp):
            if abs(abs(r) - 1) > 1e-4:
                continue
            z = r / abs(r)
            for _ in range(30):
                zN, dN = orbit_eval(phi, np.array([z]), N)
                g, dg = complex(zN[0]) - z, complex(dN[0]) - 1
                if dg == 0 or abs(g) < 1e-15:
                    break
                z = z - g / dg
                z = z / abs(z)
            zN, dN = orbit_eval(phi, np.array([z]), N)
            res = abs(complex(zN[0]) - z)
            # at strongly repelling points |phi_N'| amplifies rounding, so
            # judge the Newton step (backward error in z) instead
            step = res / max(abs(complex(dN[0]) - 1), 1e-300)
            if res > 1e-9 and step > 1e-12:
                raise poly.RootFindingError(f"period-{N} point {z} has residual "
                                            f"{res:.3g} (step {step:.3g})", poly=fp)
            if all(abs(z - g.z) > 1e-7 for g in out):
                out.append(FixedPointInfo(z, Location.BOUNDARY, complex(dN[0]), N))
    return out


# -- Denjoy-Wolff ----------------------------------------------------------------

@dataclass
class DenjoyWolff:
    point: complex
    boundary: bool
    steps: int
    trace: list = field(default_factory=list)


def denjoy_wolff(phi: RationalMap, seeds=(0.0, 0.3, 0.5j), tol: float = 1e-12,
                 max_steps: int = 100_000, agree: float = 1e-8) -> DenjoyWolff:
    if phi.is_rotation():
        raise DenjoyWolffError("rotations have no Denjoy-Wolff point")
    num = [complex(c) for c in phi.num]
    den = [complex(c) for c in phi.den]

    def f(z):
        a = 0j
        for c in reversed(num):
            a = a * z + c
        b = 0j
        for c in reversed(den):
            b = b * z + c
        return a / b

    bfix = None
    limits, traces, steps_used, on_boundary = [], [], 0, False
    for seed in seeds:
        z = complex(seed)
        trace, prev_step = [], math.inf
        converged = False
        for k in range(1, max_steps + 1):
            z1 = f(z)
            step = abs(z1 - z)
            z = z1
            if k & (k - 1) == 0:
                trace.append((k, step))
            if step < tol:
                converged = True
                break
            if k >= 1024 and k & (k - 1) == 0 and abs(z) > 0.99 and step < prev_step:
                if bfix is None:
                    bfix = [fp for fp in fixed_points(phi) if fp.location is Location.BOUNDARY]
                near = [fp for fp in bfix if abs(fp.z - z) < 1e-2]
                if near:
                    z = min(near, key=lambda fp: abs(fp.z - z)).z
                    converged, on_boundary = True, True
                    break
            if k & (k - 1) == 0:
                prev_step = step
        if not converged:
            raise DenjoyWolffError(f"no convergence from seed {seed} after {max_steps} steps")
        limits.append(z)
        traces.append(trace)
        steps_used = max(steps_used, k)
    for z in limits[1:]:
        if abs(z - limits[0]) > agree:
            raise DenjoyWolffError(f"seeds disagree: {limits}")
    dw = limits[0]
    return DenjoyWolff(dw, on_boundary or abs(abs(dw) - 1) <= BOUNDARY_TOL, steps_used, traces[0])


# -- inner functions -----------------------------------------------------------

@dataclass
class BlaschkeData:
    theta: float
    zeros: list
    symmetric: bool

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def is_rotation(self) -> bool:
        return self.degree == 1 and abs(self.zeros[0]) <= 1e-12

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def to_json(self) -> dict:
        return {"theta": self.theta, "zeros": list(self.zeros), "degree": self.degree,
                "symmetric": self.symmetric}


@dataclass
class InnerResult:
    inner: bool
    max_deviation: float
    blaschke: Optional[BlaschkeData] = None

    def __bool__(self):
        return self.inner


def is_inner(phi: RationalMap, X: Optional[DomainSpec] = None) -> InnerResult:
    X = X or phi.domain or DomainSpec.disc()
    z = X.boundary_points()
    dev = float(np.max(np.abs(np.abs(phi(z)) - 1)))
    if dev > INNER_TOL:
        return InnerResult(False, dev)
    zeros = []
    for r, mult in poly.roots(phi.num):
        zeros.extend([r] * mult)
    poles = []
    for r, mult in poly.roots(phi.den):
        poles.extend([r] * mult)
    symmetric = all(abs(a) < 1 for a in zeros)
    pending = list(poles)
    for a in zeros:
        if abs(a) <= 1e-12:
            continue
        target = 1 / a.conjugate()
        j = min(range(len(pending)), key=lambda k: abs(pending[k] - target)) if pending else None
        if j is None or abs(pending[j] - target) > 1e-7 * max(1, abs(target)):
            symmetric = False
            continue
        pending.pop(j)
    symmetric = symmetric and not pending
    b1 = 1 + 0j
    for a in zeros:
        b1 *= (1 - a) / (1 - a.conjugate())
    theta = cmath.phase(complex(phi(1.0)) / b1)
    return InnerResult(True, dev, BlaschkeData(theta, zeros, symmetric))


def argument_principle_count(phi: RationalMap, samples: int = 4096) -> float:
    """(1/2 pi i) contour integral of phi'/phi over the unit circle."""
    z = np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.mean(z * phi.deriv1(z) / phi(z)).real)


# -- classification ------------------------------------------------------------

class Case(str, enum.Enum):
    INNER = "Inner"
    NO_BOUNDARY_FIXED = "NoBoundaryFixedUpToN"
    CASE3A_I = "Case3a_i"
    CASE3A_II = "Case3a_ii"
    CASE3B = "Case3b"
    UNKNOWN = "Unknown"


@dataclass
class Classification:
    case: Case
    N_max: int
    denjoy_wolff: Optional[complex] = None
    evidence: list = field(default_factory=list)
    N_used: Optional[int] = None
    S_N: list = field(default_factory=list)
    contact_points: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def interior_fixed(self) -> list:
        return [f for f in self.evidence if f.location is Location.INTERIOR and f.period == 1]

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "N_max": self.N_max,
            "N_used": self.N_used,
            "denjoy_wolff": self.denjoy_wolff,
            "evidence": [f.to_json() for f in self.evidence],
            "S_N": list(self.S_N),
            "contact_points": list(self.contact_points),
            "notes": list(self.notes),
        }


def _dedupe(points, tol=BOUNDARY_TOL):
    out = []
    for p in points:
        if all(abs(p - q) > tol for q in out):
            out.append(p)
    return out


def classify(phi: RationalMap, N_max: int = 16) -> Classification:
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    try:
        dw = denjoy_wolff(phi).point
    except (DenjoyWolffError, poly.RootFindingError):
        dw = None
    if is_inner(phi):
        ev = []
        if not phi.is_rotation() and not phi.is_constant():
            try:
                ev = fixed_points(phi)
            except (ValueError, poly.RootFindingError):
                ev = []
        return Classification(Case.INNER, N_max, dw, ev)

    try:
        fps = fixed_points(phi)
    except poly.RootFindingError as exc:
        return Classification(Case.UNKNOWN, N_max, dw, notes=[f"root finder: {exc}"])
    interior = [f for f in fps if f.location is Location.INTERIOR]
    ob = boundary_orbit(phi)
    cls = Classification(Case.NO_BOUNDARY_FIXED, N_max, dw, list(interior),
                         contact_points=list(ob.points))
    for N in range(1, N_max + 1):
        S = []
        for i in range(len(ob.points)):
            j = ob.chain(i, N - 1)
            if j is not None:
                S.append(ob.images[j])
        S = _dedupe(S)
        if not S:
            continue
        fixed = []
        for z in S:
            zN, dN = orbit_eval(phi, np.array([z]), N)
            if abs(complex(zN[0]) - z) <= BOUNDARY_TOL:
                fixed.append(FixedPointInfo(z, Location.BOUNDARY, complex(dN[0]), N))
        if len(fixed) != len(S):
            continue
        cls.N_used, cls.S_N = N, S
        cls.evidence = list(interior) + fixed
        mults = [f.multiplier.real for f in fixed]
        if interior:
            cls.case = Case.CASE3B
            if any(m <= 1 + MULT_DEAD_ZONE for m in mults):
                cls.case = Case.UNKNOWN
                cls.notes.append("interior fixed point but a boundary multiplier <= 1")
            return cls
        lo = [m for m in mults if m < 1 - MULT_DEAD_ZONE]
        eq = [m for m in mults if abs(m - 1) <= MULT_DEAD_ZONE]
        if len(lo) == 1 and not eq:
            cls.case = Case.CASE3A_I
        elif len(eq) == 1 and not lo:
            cls.case = Case.CASE3A_II
        else:
            cls.case = Case.UNKNOWN
            cls.notes.append(f"multiplier pattern {mults} fits no sub-case")
        return cls
    periodic = boundary_periodic_points(phi, N_max, ob)
    if periodic:
        cls.case = Case.UNKNOWN
        cls.evidence = list(interior) + periodic
        cls.notes.append("boundary periodic points exist but no S_N <= N_max is all fixed")
    return cls
