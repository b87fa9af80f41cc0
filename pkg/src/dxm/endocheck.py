"""Decide whether f -> f o phi maps D(X, M) into itself.

Each rule either fires with a certificate or abstains.  Strict
inequalities are tested with a dead zone of ``DEAD_ZONE``; inside it a rule
abstains.  Truncated norms are reported for inspection but no verdict rests
on them alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import discdyn as dd
from .domain import (DomainSpec, best_decomposition, external_circular_tangent,
                     refine_on_param)
from .jets import FR, JetError, compose_derivs
from .maps import RationalMap
from .weights import (WeightSequence, check_thm1b_condition, nonanalytic_consistent,
                      nonanalyticity_trace)

DEAD_ZONE = 1e-7
K_MAX = 24
TRUNCATION = 40
UNRESOLVED = "unresolved-case"


class Result(str, enum.Enum):
    ENDO = "Endomorphism"
    NOT_ENDO = "NotEndomorphism"
    UNKNOWN = "Unknown"


@dataclass
class Verdict:
    result: Result
    rule: str
    certificate: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    evidence: list = field(default_factory=list)

    @property
    def decisive(self) -> bool:
        return self.result is not Result.UNKNOWN

    @property
    def label(self) -> Optional[str]:
        return self.certificate.get("label")

    def to_json(self, with_evidence: bool = True) -> dict:
        out = {"result": self.result.value, "rule": self.rule,
               "certificate": self.certificate, "truncation": self.truncation}
        if with_evidence and self.evidence:
            out["certificate"] = dict(self.certificate,
                                      evidence=[v.to_json(False) for v in self.evidence])
        return out


def abstain(rule: str, reason: str, **cert) -> Verdict:
    return Verdict(Result.UNKNOWN, rule, dict(cert, reason=reason))


# -- derivative sup norms ---------------------------------------------------

def derivative_supnorms(phi: RationalMap, X: DomainSpec, k_max: int = K_MAX) -> list[float]:
    """Sampled + refined ||phi^{(k)}||, k = 0..k_max (maximum modulus on the
    disc, so only the boundary is sampled)."""
    return list(_derivative_supnorms(phi, X, k_max))


@lru_cache(maxsize=64)
def _derivative_supnorms(phi: RationalMap, X: DomainSpec, k_max: int) -> tuple:
    params, spacing, periodic = X.param_grid()
    z = X.param(params)
    d = phi.derivs(z, k_max)
    out = []
    for k in range(k_max + 1):
        vals = np.abs(d[k])
        if not np.any(vals):
            out.append(0.0)
            continue

        def fk(zz, k=k):
            return phi.derivs(zz, k)[k]

        _, v = refine_on_param(fk, X, params, vals, spacing, periodic, top=2)
        out.append(float(v))
    return tuple(out)


def _sup_on_boundary(f, X: DomainSpec) -> tuple[float, complex]:
    params, spacing, periodic = X.param_grid()
    vals = np.abs(f(X.param(params)))
    t, v = refine_on_param(f, X, params, vals, spacing, periodic)
    return float(v), complex(X.param(np.array([t]))[0])


# -- thm1a: q-criterion ---------------------------------------------------

def q_criterion(phi: RationalMap, X: DomainSpec, w: WeightSequence,
                k_max: int = K_MAX) -> Verdict:
    rule = "thm1a"
    if not nonanalytic_consistent(w):
        return abstain(rule, "weight not nonanalytic-consistent")
    s = derivative_supnorms(phi, X, k_max)
    d1 = s[1]
    a = [s[k] / math.factorial(k) for k in range(k_max + 1)]
    root_trace = [a[k] ** (1.0 / k) if a[k] > 0 else 0.0 for k in range(1, k_max + 1)]
    trunc = {"k_max": k_max, **X.resolution()}
    if d1 >= 1 - DEAD_ZONE:
        return Verdict(Result.UNKNOWN, rule,
                       {"reason": "||phi'|| >= 1", "sup_dphi": d1,
                        "analyticity_trace": root_trace}, trunc)
    tail_terms = [k for k in range(max(2, k_max - 4), k_max) if a[k] > 0 and a[k + 1] > 0]
    if a[k_max] == 0:
        rho = 0.0
    elif tail_terms:
        rho = max(a[k + 1] / a[k] for k in tail_terms)
    else:
        rho = math.inf
    for j in range(41):
        eps = 2.0 ** -j
        if rho * eps >= 1:
            continue
        h = sum(a[k] * eps ** (k - 1) for k in range(2, k_max + 1))
        tail = a[k_max] * eps ** (k_max - 1) * (rho * eps) / (1 - rho * eps) if rho else 0.0
        q = d1 + h + tail
        if q < 1 - DEAD_ZONE:
            return Verdict(Result.ENDO, rule,
                           {"q": q, "eps": eps, "sup_dphi": d1, "tail_bound": tail,
                            "tail_ratio": rho, "analyticity_trace": root_trace}, trunc)
    return Verdict(Result.UNKNOWN, rule,
                   {"reason": "no eps on the grid gives q < 1", "sup_dphi": d1,
                    "analyticity_trace": root_trace}, trunc)


# -- thm1b ------------------------------------------------------------------

def thm1b_criterion(phi: RationalMap, X: DomainSpec, w: WeightSequence,
                    upto: int = 30, k_max: int = K_MAX) -> Verdict:
    rule = "thm1b"
    if not nonanalytic_consistent(w):
        return abstain(rule, "weight not nonanalytic-consistent")
    cond = check_thm1b_condition(w, upto)
    if not cond.ok:
        return abstain(rule, "weight fails the thm1b growth condition",
                       counterexample=list(cond.argmax))
    s = derivative_supnorms(phi, X, k_max)
    trunc = {"k_max": k_max, "weight_scan": upto, **X.resolution()}
    if s[1] > 1 + 1e-12:
        return Verdict(Result.UNKNOWN, rule, {"reason": "||phi'|| > 1", "sup_dphi": s[1]}, trunc)
    a = [s[k] / math.factorial(k) for k in range(k_max + 1)]
    q = max(2, k_max // 4)
    head, tail = a[1:-q], a[-q:]
    bounded = max(tail) <= max(head) * (1 + 1e-9) + 1e-300
    if not bounded:
        return Verdict(Result.UNKNOWN, rule,
                       {"reason": "||phi^(k)||/k! still growing", "coeff_trace": a}, trunc)
    return Verdict(Result.ENDO, rule, {"B": cond.B, "sup_dphi": s[1], "coeff_trace": a}, trunc)


# -- thm2 -------------------------------------------------------------------

def thm2_criterion(phi: RationalMap, X: DomainSpec, w: WeightSequence,
                   safety: float = 1e-3) -> Verdict:
    rule = "thm2"
    if not nonanalytic_consistent(w):
        return abstain(rule, "weight not nonanalytic-consistent")
    dec = best_decomposition(phi, X, safety=safety)
    cert = {"eps": dec.eps, "margin": dec.margin, "max_phi_on_K": dec.max_phi_on_K,
            "K_size": int(dec.K_points.size), "safety": safety}
    if dec.passes:
        return Verdict(Result.ENDO, rule, cert, dec.resolution)
    return Verdict(Result.UNKNOWN, rule, dict(cert, reason="margin below safety bound"),
                   dec.resolution)


# -- thm4 -------------------------------------------------------------------

def _pick_b(cands: list[tuple[complex, float]]) -> tuple[complex, float]:
    top = max(v for _, v in cands)
    tied = [(b, v) for b, v in cands if v >= top - 1e-9]
    return min(tied, key=lambda bv: (round(abs(bv[0].imag), 9), bv[0].real))


def refutation_candidates(phi: RationalMap, X: DomainSpec) -> list[tuple[complex, float]]:
    """Points b with phi(b) on the boundary of X, paired with |phi'(b)|."""
    if not X.is_disc:
        v, b = _sup_on_boundary(phi.deriv1, X)
        return [(b, v)]
    if dd.is_inner(phi, X):
        if phi.is_constant():
            return []
        v, b = _sup_on_boundary(phi.deriv1, X)
        params, _, _ = X.param_grid()
        z = X.param(params)
        vals = np.abs(phi.deriv1(z))
        k = int(np.argmax(vals))
        if vals[k] >= v - 1e-12:
            b, v = complex(z[k]), float(vals[k])
        return [(b, v)]
    return [(b, float(abs(phi.deriv1(b)))) for b in dd.contact_set(phi)]


def thm4_refutation(phi: RationalMap, X: DomainSpec, w: WeightSequence) -> Verdict:
    rule = "thm4"
    if not nonanalytic_consistent(w):
        return abstain(rule, "weight not nonanalytic-consistent")
    cands = [(b, v) for b, v in refutation_candidates(phi, X) if v >= 1 + DEAD_ZONE]
    if not cands:
        return abstain(rule, "no b with phi(b) tangent-touching and |phi'(b)| > 1")
    b, v = _pick_b(cands)
    return Verdict(Result.NOT_ENDO, rule, _thm4_certificate(phi, X, b, v), X.resolution())


def _thm4_certificate(phi, X, b, v) -> dict:
    pb = complex(phi(b))
    touch = pb / abs(pb) if X.is_disc else complex(pb.real, 0.0)
    ok, wit = external_circular_tangent(X, touch)
    return {"b": complex(b), "phi_b": pb, "abs_dphi_b": float(v),
            "tangent": {"center": wit.center, "theta": wit.theta} if ok else None}


# -- thm6 ----------------------------------------------------------------

def thm6_inner_rule(phi: RationalMap, X: DomainSpec, w: WeightSequence) -> Verdict:
    rule = "thm6"
    if not X.is_disc:
        return abstain(rule, "inner-function rule needs the closed disc")
    inner = dd.is_inner(phi, X)
    if not inner:
        return abstain(rule, "not inner", max_deviation=inner.max_deviation)
    bl = inner.blaschke
    if phi.is_constant():
        return Verdict(Result.ENDO, rule, {"kind": "unimodular constant"})
    if phi.is_rotation() or bl.is_rotation:
        return Verdict(Result.ENDO, rule, {"kind": "rotation", "theta": bl.theta,
                                           "sup_dphi": 1.0})
    if not nonanalytic_consistent(w):
        return abstain(rule, "weight not nonanalytic-consistent")
    cert = {"kind": "blaschke", "blaschke": bl.to_json()}
    if bl.degree == 1:
        alpha = bl.zeros[0]
        b = alpha / abs(alpha)
        cert["mobius_formula"] = (1 + abs(alpha)) / (1 - abs(alpha))
        cert.update(_thm4_certificate(phi, X, b, float(abs(phi.deriv1(b)))))
    else:
        b, v = refutation_candidates(phi, X)[0]
        cert.update(_thm4_certificate(phi, X, b, v))
    return Verdict(Result.NOT_ENDO, rule, cert, X.resolution())


# -- iterate rules: thm7, thm8, thm9i, thm9ii -----------------------------------

def _iterate_sups(phi: RationalMap, X: DomainSpec, N: int) -> tuple[float, float]:
    """Sampled ||phi_N|| and ||phi_N'|| by pointwise iteration."""
    v0, _ = _sup_on_boundary(lambda z: dd.orbit_eval(phi, z, N)[0], X)
    v1, _ = _sup_on_boundary(lambda z: dd.orbit_eval(phi, z, N)[1], X)
    return v0, v1


def iterate_rules(phi: RationalMap, X: DomainSpec, w: WeightSequence,
                  N_max: int = 16) -> Verdict:
    """Verdict about phi itself; iterate-family findings go in
    ``certificate['family']``."""
    rule = "iterates"
    if not X.is_disc:
        return abstain(rule, "iterate rules need the closed disc")
    trunc = {"N_max": N_max, **X.resolution()}
    cls = dd.classify(phi, N_max)
    cert = {"classification": cls.case.value, "N_used": cls.N_used,
            "denjoy_wolff": cls.denjoy_wolff}
    nonan = nonanalytic_consistent(w)

    if cls.case is dd.Case.INNER:
        if phi.is_rotation() or phi.is_constant():
            return Verdict(Result.ENDO, "thm6", dict(cert, kind="rotation or constant"), trunc)
        v = thm6_inner_rule(phi, X, w)
        fam = []
        # phi_N has degree d^N, so only Mobius maps can have rotation iterates
        for N in range(2, N_max + 1) if phi.degree == 1 else ():
            if dd.iterate(phi, N).is_rotation():
                fam.append(N)
        v.certificate = dict(v.certificate, **cert, family={"rotation_iterates": fam})
        v.truncation = trunc
        if v.decisive:
            periodic = dd.inner_boundary_periodic_points(phi, N_max)
            interior = [f for f in cls.evidence if f.location is dd.Location.INTERIOR]
            rep = [f for f in periodic if abs(f.multiplier) > 1 + DEAD_ZONE]
            if interior and rep:
                v.rule = "thm8"
                v.certificate.update(interior_fixed=interior[0].z, boundary_periodic=rep[0].z,
                                     period=rep[0].period, multiplier=rep[0].multiplier)
        return v

    interior = cls.interior_fixed
    boundary = dd.boundary_periodic_points(phi, N_max)

    sup_dphi, _ = _sup_on_boundary(phi.deriv1, X)
    if cls.case is dd.Case.CASE3A_II and sup_dphi > 1 + DEAD_ZONE:
        pool = boundary + [f for f in cls.evidence if f.location is dd.Location.BOUNDARY]
        z1 = next(f for f in pool if abs(f.multiplier.real - 1) <= dd.MULT_DEAD_ZONE)
        return Verdict(Result.UNKNOWN, rule,
                       dict(cert, label=UNRESOLVED, boundary_fixed=z1.z,
                            multiplier=z1.multiplier, sup_dphi=sup_dphi,
                            reason="boundary fixed point with multiplier 1 and "
                                   "||phi'|| > 1: open case"), trunc)

    repelling = [f for f in boundary if f.multiplier.real > 1 + DEAD_ZONE]
    if interior and boundary and nonan:
        if repelling:
            f = repelling[0]
            return Verdict(Result.NOT_ENDO, "thm8",
                           dict(cert, interior_fixed=interior[0].z, boundary_periodic=f.z,
                                period=f.period, multiplier=f.multiplier), trunc)
    if not interior and boundary and nonan:
        for N in range(1, N_max + 1):
            fixed_N = [f for f in boundary if N % f.period == 0]
            if len(fixed_N) >= 2:
                rep = []
                for f in fixed_N:
                    _, dN = dd.orbit_eval(phi, np.array([f.z]), N)
                    if dN[0].real > 1 + DEAD_ZONE:
                        rep.append((f, complex(dN[0])))
                if rep:
                    f, m = rep[0]
                    return Verdict(Result.NOT_ENDO, "thm9i",
                                   dict(cert, N=N, boundary_fixed=[g.z for g in fixed_N],
                                        repelling=f.z, multiplier=m), trunc)
        fixed_1 = [f for f in boundary if f.period == 1]
        if len(fixed_1) == 1 and len(boundary) == 1 and \
                fixed_1[0].multiplier.real < 1 - DEAD_ZONE:
            for N in range(1, N_max + 1):
                s0, s1 = _iterate_sups(phi, X, N)
                if s1 < 1 - DEAD_ZONE:
                    return Verdict(Result.UNKNOWN, "thm9ii",
                                   dict(cert, reason="phi itself undecided",
                                        family={"N1": N, "sup_dphi_N": s1, "via": "thm1a",
                                                "boundary_fixed": fixed_1[0].z,
                                                "multiplier": fixed_1[0].multiplier}), trunc)
            return abstain("thm9ii", f"no N <= {N_max} with ||phi_N'|| < 1", **cert)

    if cls.case is dd.Case.NO_BOUNDARY_FIXED:
        for N in range(1, N_max + 1):
            s0, s1 = _iterate_sups(phi, X, N)
            via = "thm2" if s0 < 1 - DEAD_ZONE else "thm1a" if s1 < 1 - DEAD_ZONE else None
            if via:
                return Verdict(Result.UNKNOWN, "thm7",
                               dict(cert, reason="phi itself undecided by iterate rules",
                                    family={"N1": N, "sup_phi_N": s0, "sup_dphi_N": s1,
                                            "via": via}), trunc)
        return abstain("thm7", f"no N <= {N_max} with ||phi_N|| < 1 or ||phi_N'|| < 1", **cert)
    return Verdict(Result.UNKNOWN, rule, dict(cert, reason="no iterate rule applies"), trunc)


# -- norms ---------------------------------------------------------------------

@dataclass
class NormReport:
    N: int
    partial_sums: list
    terms: list
    sup_derivs: list
    tail_ratio: float
    resolution: dict = field(default_factory=dict)

    @property
    def norm(self) -> float:
        return self.partial_sums[-1]


def _norm_from_sups(sups, w: WeightSequence) -> tuple[list, list, float]:
    terms = []
    for n, s in enumerate(sups):
        terms.append(0.0 if s == 0 else math.exp(math.log(s) - w.log(n)))
    partial = list(np.cumsum(terms))
    tail = terms[-1] / terms[-2] if len(terms) > 1 and terms[-2] > 0 else 0.0
    return terms, [float(p) for p in partial], tail


def composed_norm(F, phi: RationalMap, X: DomainSpec, w: WeightSequence,
                  N: int = TRUNCATION, analytic: bool = True) -> NormReport:
    """Truncated ||F o phi||_D with each ||(F o phi)^{(n)}|| taken as a
    sampled (and locally refined) sup of Faa di Bruno compositions."""
    params, spacing, periodic = X.param_grid()

    def derivs_at(z):
        pd = phi.derivs(z, N)
        Fd = F.derivs(pd[0], N)
        if len(Fd) < N + 1:
            raise JetError(f"F supplies {len(Fd)} orders, need {N + 1}")
        return compose_derivs(Fd, pd, N, method="recurrence")

    z = X.param(params)
    if X.is_disc and not analytic:
        z = np.concatenate([z, X.interior_points()])
    g = derivs_at(z)
    sups = [float(np.max(np.abs(gn))) for gn in g]
    arg = {int(np.argmax(np.abs(gn[: params.size]))) for gn in g}
    for i in sorted(arg):
        t0 = params[i]
        local = np.linspace(t0 - spacing, t0 + spacing, 65)
        if not periodic:
            local = np.clip(local, 0.0, 1.0)
        gl = derivs_at(X.param(local))
        sups = [max(s, float(np.max(np.abs(gn)))) for s, gn in zip(sups, gl)]
    terms, partial, tail = _norm_from_sups(sups, w)
    return NormReport(N, partial, terms, sups, tail, X.resolution())


def witness_norm(R: float, w: WeightSequence, N: int = TRUNCATION) -> NormReport:
    """||F_R||_D from the exact law ||F_R^{(m)}|| = m! R^m."""
    sups = [math.exp(math.lgamma(m + 1) + m * math.log(R)) for m in range(N + 1)]
    terms, partial, tail = _norm_from_sups(sups, w)
    return NormReport(N, partial, terms, sups, tail)


class PreconditionError(ValueError):
    pass


@dataclass
class WitnessRow:
    R: float
    normF: float
    normFphi: float
    ratio: float
    lower_bound: float
    tail_F: float
    tail_Fphi: float


@dataclass
class WitnessTable:
    b: complex
    abs_dphi_b: float
    theta: float
    rows: list
    monotone: bool
    under_truncated: bool

    @property
    def growth_demonstrated(self) -> bool:
        return self.monotone and not self.under_truncated


def witness_growth_experiment(phi: RationalMap, X: DomainSpec, w: WeightSequence, b,
                              R_list, N: int = TRUNCATION, eps: float = 1e-3) -> WitnessTable:
    b = complex(b)
    pb = complex(phi(b))
    d = float(abs(phi.deriv1(b)))
    if d <= 1 + DEAD_ZONE:
        raise PreconditionError(f"|phi'(b)| = {d:.12g} is not > 1")
    touch = pb / abs(pb) if X.is_disc else complex(pb.real, 0.0)
    if X.is_disc and abs(abs(pb) - 1) > 1e-9:
        raise PreconditionError(f"phi(b) = {pb} has no external circular tangent")
    ok, wit = external_circular_tangent(X, touch)
    if not ok:
        raise PreconditionError(f"phi(b) = {pb} has no external circular tangent")
    rows = []
    for R in R_list:
        nF = witness_norm(R, w, N)
        nG = composed_norm(FR(touch, wit.theta, R), phi, X, w, N)
        lb = sum(math.exp(m * math.log((1 - eps) * R * d) - w.log(m)) for m in range(N + 1))
        rows.append(WitnessRow(R, nF.norm, nG.norm, nG.norm / nF.norm, lb,
                               nF.tail_ratio, nG.tail_ratio))
    ordered = sorted(rows, key=lambda r: r.R)
    monotone = all(b_.ratio > a_.ratio for a_, b_ in zip(ordered, ordered[1:]))
    under = any(max(r.tail_F, r.tail_Fphi) > 0.5 for r in rows)
    return WitnessTable(b, d, wit.theta, rows, monotone, under)


# -- orchestration ---------------------------------------------------------------

RULE_ORDER = ("thm6", "thm4", "thm1a", "thm1b", "thm2", "iterates")


def run_rule(name: str, phi, X, w, N_max: int = 16) -> Verdict:
    if name == "thm6":
        return thm6_inner_rule(phi, X, w)
    if name == "thm4":
        return thm4_refutation(phi, X, w)
    if name == "thm1a":
        return q_criterion(phi, X, w)
    if name == "thm1b":
        return thm1b_criterion(phi, X, w)
    if name == "thm2":
        return thm2_criterion(phi, X, w)
    if name == "iterates":
        return iterate_rules(phi, X, w, N_max)
    raise ValueError(f"unknown rule {name!r}")


def full_verdict(phi: RationalMap, X: DomainSpec, w: WeightSequence,
                 N_max: int = 16, run_all: bool = False) -> Verdict:
    """First decisive rule wins; with ``run_all`` every rule is evaluated and
    kept as evidence (used by the consistency sweep)."""
    seen = []
    winner = None
    for name in RULE_ORDER:
        v = run_rule(name, phi, X, w, N_max)
        seen.append(v)
        if v.decisive and winner is None:
            winner = v
            if not run_all:
                break
    if winner is not None:
        return Verdict(winner.result, winner.rule, dict(winner.certificate),
                       winner.truncation, seen)
    label = next((v.label for v in seen if v.label), None)
    cert = {"reason": "every rule abstained"}
    if label:
        cert["label"] = label
    return Verdict(Result.UNKNOWN, "none", cert, seen[-1].truncation, seen)


def conflicting(verdicts) -> bool:
    results = {v.result for v in verdicts if v.decisive}
    return Result.ENDO in results and Result.NOT_ENDO in results
