"""Inductive weight constructions.

``construct_thm3`` builds M_n making phi induce an endomorphism of D(X, M);
``construct_thm5`` builds M_n (and poles c_n) making it fail to.  Every
"choose M_n large enough" step is the max of explicit lower bounds times a
slack, all in the log domain.  Sup norms are sampled, so bounds that rest on
them carry a safety factor; results certify the sampled relaxation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import discdyn as dd
from .domain import DomainError, DomainSpec, external_circular_tangent, golden_max
from .endocheck import DEAD_ZONE, derivative_supnorms
from .jets import PARTITION_ORDER_CAP, Fc, bell_table, compose_derivs, enumerate_partition_terms
from .maps import RationalMap
from .weights import (WeightSequence, check_algebra_condition, log_binomial, log_factorial,
                      tabulated)

SLACK = 1.01
SAFETY = 2.0
MAX_HALVINGS = 60
LOG_TOL = 1e-9


class HypothesisError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class ConstructionError(RuntimeError):
    pass


class VerificationError(AssertionError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass
class ConstructedWeights:
    kind: str
    m_log: list
    provenance: list = field(default_factory=list)
    c_points: list = field(default_factory=list)
    A_trace: list = field(default_factory=list)
    b: Optional[complex] = None
    c_dist: list = field(default_factory=list)
    slack: float = SLACK
    safety: float = SAFETY

    @property
    def n_max(self) -> int:
        return len(self.m_log) - 1

    @property
    def name(self) -> str:
        return f"forge-{self.kind}-n{self.n_max}"

    def weight(self) -> WeightSequence:
        return tabulated(self.name, self.m_log)

    def tampered(self, n: int, factor: float) -> "ConstructedWeights":
        """Copy with M_n multiplied by ``factor`` (negative controls)."""
        logs = list(self.m_log)
        logs[n] += math.log(factor)
        return ConstructedWeights(self.kind, logs, self.provenance, self.c_points,
                                  self.A_trace, self.b, self.c_dist, self.slack, self.safety)

    def to_json(self) -> dict:
        out = {"name": self.name, "log_m": list(self.m_log), "provenance": self.provenance}
        if self.kind == "thm5":
            out["c_points"] = list(self.c_points)
            out["c_dist"] = list(self.c_dist)
        return out


def _logsumexp(xs) -> float:
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    top = max(xs)
    return top + math.log(sum(math.exp(x - top) for x in xs))


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


# -- constants -------------------------------------------------------------------

def faa_di_bruno_constants(phi: RationalMap, n: int, X: DomainSpec,
                           sups: Optional[list] = None) -> list[float]:
    """C_{n,phi,m} for m = 0..n-1: the partial Bell polynomial B_{n,m}
    evaluated at the derivative sup norms (the pure (phi')^n term only sits
    at m = n, so it is excluded automatically)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = sups if sups is not None else derivative_supnorms(phi, X, n)
    if len(s) < n + 1:
        raise ValueError(f"need sup norms up to order {n}")
    C = [0.0] * n
    if n <= PARTITION_ORDER_CAP:
        for m in range(1, n):
            for t in enumerate_partition_terms(n, m):
                prod = float(t.coeff)
                for i, ai in enumerate(t.a, start=1):
                    if ai:
                        prod *= s[i] ** ai
                C[m] += prod
    else:
        B = bell_table(s, n)
        for m in range(1, n):
            C[m] = float(B[n][m])
    return C


def cauchy_bound_A(phi: RationalMap, n: int, K_points, X: DomainSpec,
                   omega_samples: int = 256, safety: float = 1.0) -> float:
    """(L/2pi) sup |d^n/dz^n (omega - phi(z))^{-1}| over omega on the unit
    circle and z in K (a sampled lower bound, times ``safety``)."""
    if not X.is_disc:
        raise DomainError("the Cauchy bound needs a boundary curve; the interval has none")
    K = np.asarray(K_points, dtype=complex).ravel()
    if K.size == 0:
        raise ValueError("K_points is empty")
    pK = phi(K)
    gap = 1.0 - float(np.max(np.abs(pK)))
    if gap <= 1e-9:
        raise DomainError(f"phi(K) touches the boundary (gap {gap:.3g})")
    pd = phi.derivs(K, n)
    B = bell_table(pd, n)[n] if n >= 1 else None  # independent of omega

    def value(omega):
        """max over K of |d^n/dz^n (omega - phi)^{-1}| for each omega."""
        omega = np.atleast_1d(np.asarray(omega, dtype=complex))
        inv = 1.0 / (omega[:, None] - pK[None, :])
        if n == 0:
            return np.max(np.abs(inv), axis=1)
        g = sum(math.factorial(m) * inv ** (m + 1) * B[m] for m in range(1, n + 1))
        return np.max(np.abs(g), axis=1)

    t = 2 * np.pi * np.arange(omega_samples) / omega_samples
    vals = np.concatenate([value(np.exp(1j * t[i:i + 32])) for i in range(0, t.size, 32)])
    best = float(np.max(vals))
    spacing = 2 * np.pi / omega_samples
    for i in np.argsort(vals)[::-1][:3]:
        _, v = golden_max(lambda s: float(value(np.exp(1j * s))[0]),
                          t[i] - spacing, t[i] + spacing, X.refine_iters)
        best = max(best, v)
    return safety * best  # L / 2pi = 1 on the unit circle


# -- thm3 construction -------------------------------------------------------------

def boundary_preimages(phi: RationalMap, X: DomainSpec) -> np.ndarray:
    """Sampled phi^{-1}(boundary): the contact set on the disc (the whole
    circle for inner maps), all of X for the interval."""
    if not X.is_disc:
        return X.boundary_points()
    if dd.is_inner(phi, X):
        return np.zeros(0, complex) if phi.is_constant() else X.boundary_points()
    return np.array(dd.contact_set(phi), dtype=complex)


def _thm3_gate(phi, X):
    pre = boundary_preimages(phi, X)
    if pre.size:
        d = np.abs(phi.deriv1(pre))
        k = int(np.argmax(d))
        if d[k] > 1 + 1e-9:
            raise HypothesisError(f"|phi'| = {d[k]:.12g} > 1 at boundary preimage {pre[k]}",
                                  complex(pre[k]))
    return pre


def _thm3_bounds(phi, X, n, logs, sups, safety, samples, dphi_abs):
    """Lower bounds on log M_n from (i)-(iv), plus the K set and A."""
    bounds = {"i": 2 * log_factorial(n)}
    bounds["ii"] = max(log_binomial(n, k) + logs[k] + logs[n - k] for k in range(1, n))
    C = faa_di_bruno_constants(phi, n, X, sups)
    bounds["iii"] = n * math.log(2) + _logsumexp(
        [_log(safety * C[m]) + logs[m] for m in range(n)])
    K = samples[dphi_abs ** n > 2]
    A = None
    if K.size:
        if not X.is_disc:
            raise DomainError("K is nonempty on the interval")
        A = cauchy_bound_A(phi, n, K, X, safety=safety)
        bounds["iv"] = n * math.log(2) + _log(A)
    return bounds, C, K, A


def construct_thm3(phi: RationalMap, X: DomainSpec, n_max: int,
                   slack: float = SLACK, safety: float = SAFETY) -> ConstructedWeights:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pre = _thm3_gate(phi, X)
    sups = derivative_supnorms(phi, X, max(n_max, 1))
    samples = X.sample_points()
    dphi_abs = np.abs(phi.deriv1(samples))
    logs = [0.0, 0.0]
    prov = [{"n": 0, "binding": "start"}, {"n": 1, "binding": "start"}]
    A_trace = [None, None]
    for n in range(2, n_max + 1):
        bounds, C, K, A = _thm3_bounds(phi, X, n, logs, sups, safety, samples, dphi_abs)
        binding = max(bounds, key=bounds.get)
        logs.append(bounds[binding] + math.log(slack))
        prov.append({"n": n, "binding": binding, "bounds": bounds, "C": C,
                     "K_size": int(K.size), "A": A})
        A_trace.append(A)
    cw = ConstructedWeights("thm3", logs[: n_max + 1], prov[: n_max + 1], [],
                            A_trace[: n_max + 1], None, [], slack, safety)
    cw.provenance[0]["boundary_preimages"] = int(pre.size)
    return cw


# -- thm5 construction -------------------------------------------------------------

def _fc_log_sup(m: int, d: float) -> float:
    """log ||F_c^{(m)}|| = log(m!/d^{m+1}) for dist(c, X) = d."""
    return log_factorial(m) - (m + 1) * math.log(d)


def _normalised_at_b(pd_b, u: complex, n: int, d: float) -> float:
    """|(F_c o phi)^{(n)}(b)| / (||F_c^{(n)}|| |phi'(b)|^n) for c = phi(b) + d u.

    F_c^{(m)}(phi(b)) = (-1)^m m!/(phi(b)-c)^{m+1}; everything is scaled by
    d^{n+1}/n! so small d does not overflow."""
    G = [(-1) ** m * math.exp(log_factorial(m) - log_factorial(n)) * d ** (n - m)
         * (-1 / u) ** (m + 1) for m in range(n + 1)]
    g = compose_derivs(G, pd_b, n, "recurrence")[n]
    return abs(complex(g)) / abs(complex(pd_b[1])) ** n


def _thm5_gate(phi, X, b):
    b = complex(b)
    if not X.contains(b, 1e-9):
        raise HypothesisError(f"b = {b} is not a point of X", b)
    d1 = float(abs(phi.deriv1(b)))
    if d1 <= 1 + DEAD_ZONE:
        raise HypothesisError(f"|phi'(b)| = {d1:.12g} is not > 1", b)
    pb = complex(phi(b))
    if X.is_disc:
        if abs(abs(pb) - 1) > 1e-9:
            raise HypothesisError(f"phi(b) = {pb} is not on the boundary", b)
        pb = pb / abs(pb)
    else:
        pb = complex(min(max(pb.real, 0.0), 1.0), 0.0)
    ok, wit = external_circular_tangent(X, pb)
    if not ok:
        raise HypothesisError(f"phi(b) = {pb} has no external circular tangent", b)
    u = (wit.center - pb) / abs(wit.center - pb)
    return b, pb, u, d1


def _thm5_m_bounds(n, logs, sups, dists, safety):
    bounds = {"i": n * math.log(2) + _log(safety * sups[n]), "ii": 2 * log_factorial(n),
              "iii": max(log_binomial(n, k) + logs[k] + logs[n - k] for k in range(1, n))}
    for k in range(n):
        # ||F_k^{(n)}||/M_n < 2^-n ||F_k^{(k)}||/M_k
        bounds[f"Fc{k}"] = (_fc_log_sup(n, dists[k]) + n * math.log(2)
                            - _fc_log_sup(k, dists[k]) + logs[k])
    return bounds


def _dominance_gap(n, d, logs_n) -> float:
    """log(||F^{(n)}||/M_n) - log(sum_{m<n} ||F^{(m)}||/M_m) for dist d."""
    lhs = _fc_log_sup(n, d) - logs_n[n]
    rhs = _logsumexp([_fc_log_sup(m, d) - logs_n[m] for m in range(n)])
    return lhs - rhs


def construct_thm5(phi: RationalMap, X: DomainSpec, b, n_max: int,
                   slack: float = SLACK, safety: float = SAFETY) -> ConstructedWeights:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    b, pb, u, d1 = _thm5_gate(phi, X, b)
    sups = derivative_supnorms(phi, X, max(n_max, 1))
    pd_b = [complex(v[0]) for v in phi.derivs(np.array([b]), n_max)]
    pd_b = [np.array(v) for v in pd_b]
    logs = [0.0, 0.0]
    dists = [1.0, 1.0]
    prov = [{"n": 0, "binding": "start", "d": 1.0}, {"n": 1, "binding": "start", "d": 1.0}]
    for n in range(2, n_max + 1):
        bounds = _thm5_m_bounds(n, logs, sups, dists, safety)
        binding = max(bounds, key=bounds.get)
        logs.append(bounds[binding] + math.log(slack))
        d = 2.0 ** -n
        for halving in range(MAX_HALVINGS + 1):
            norm = _normalised_at_b(pd_b, u, n, d)
            gap = _dominance_gap(n, d, logs)
            if norm >= 0.5 and gap >= 0:
                break
            d /= 2
        else:
            which = "pointwise" if norm < 0.5 else "dominance"
            raise ConstructionError(f"n = {n}: {which} inequality still fails after "
                                    f"{MAX_HALVINGS} halvings of d_n")
        dists.append(d)
        ratio = norm * d1 ** n / 3
        prov.append({"n": n, "binding": binding, "bounds": bounds, "d": d,
                     "halvings": halving, "normalised_at_b": norm,
                     "dominance_gap": gap, "growth_ratio_lower": ratio,
                     "growth_target": d1 ** n / 6})
    # d_n underflows against |phi(b)| = 1 long before n = 10, so the
    # distances are kept separately from the (rounded) points
    c_points = [pb + dk * u for dk in dists]
    return ConstructedWeights("thm5", logs[: n_max + 1], prov[: n_max + 1],
                              c_points[: n_max + 1], [], b, dists[: n_max + 1], slack, safety)


# -- verification ------------------------------------------------------------------

@dataclass
class VerifyReport:
    ok: bool
    failures: list
    checks: dict

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "checks": self.checks}


def _term_bound_check(phi, X, w_logs, n_top, centres):
    """||(F o phi)^{(n)}||/M_n <= 2||F^{(n)}||/M_n + 2^-n ||F||_D for F = F_c
    (||F||_D truncated at the table length, which only tightens the check)."""
    z = X.sample_points()
    pd = phi.derivs(z, n_top)
    out = []
    for c in centres:
        F = Fc(c)
        dist = abs(c) - 1
        normD = sum(math.exp(_fc_log_sup(m, dist) - w_logs[m]) for m in range(len(w_logs)))
        g = compose_derivs(F.derivs(pd[0], n_top), pd, n_top, "recurrence")
        for n in range(2, n_top + 1):
            lhs = float(np.max(np.abs(g[n]))) / math.exp(w_logs[n])
            rhs = 2 * math.exp(_fc_log_sup(n, dist) - w_logs[n]) + 2.0 ** -n * normD
            out.append((complex(c), n, lhs, rhs, lhs <= rhs * (1 + 1e-9)))
    return out


def verify_construction(cw: ConstructedWeights, phi: RationalMap, X: DomainSpec,
                        checks=None, strict: bool = True) -> VerifyReport:
    """Independently recompute every constraint against the final sequence."""
    logs = cw.m_log
    n_max = cw.n_max
    fails, table = [], {}

    def record(name, n, ok, detail=None):
        table.setdefault(name, []).append({"n": n, "ok": bool(ok), "detail": detail})
        if not ok:
            fails.append(f"{name} at n = {n}: {detail}")

    record("start", 0, logs[0] == 0 and (n_max < 1 or logs[1] == 0), logs[:2])
    alg = check_algebra_condition(cw.weight(), max(n_max, 1))
    record("algebra", n_max, alg.ok, alg.violation)
    sups = derivative_supnorms(phi, X, max(n_max, 1))
    if cw.kind == "thm3":
        samples = X.sample_points()
        dphi_abs = np.abs(phi.deriv1(samples))
        for n in range(2, n_max + 1):
            record("i", n, logs[n] >= 2 * log_factorial(n) - LOG_TOL, logs[n])
            worst = max(log_binomial(n, k) + logs[k] + logs[n - k] for k in range(1, n))
            record("ii", n, logs[n] >= worst - LOG_TOL, worst - logs[n])
            C = faa_di_bruno_constants(phi, n, X, sups)
            s3 = sum(cw.safety * C[m] * math.exp(logs[m] - logs[n]) for m in range(n))
            record("iii", n, s3 <= 2.0 ** -n * (1 + LOG_TOL), s3)
            K = samples[dphi_abs ** n > 2]
            if K.size:
                A = cauchy_bound_A(phi, n, K, X, safety=cw.safety)
                r = A * math.exp(-logs[n])
                record("iv", n, r <= 2.0 ** -n * (1 + LOG_TOL), r)
        if X.is_disc and (checks is None or "term_bound" in checks):
            for c, n, lhs, rhs, ok in _term_bound_check(phi, X, logs, min(12, n_max),
                                                         (1.5, -1.25j, 1.1 * np.exp(0.3j))):
                record("term_bound", n, ok, {"c": c, "lhs": lhs, "rhs": rhs})
    elif cw.kind == "thm5":
        b, pb, u, d1 = _thm5_gate(phi, X, cw.b)
        pd_b = [np.array(complex(v[0])) for v in phi.derivs(np.array([b]), n_max)]
        dists = cw.c_dist
        for n in range(2, n_max + 1):
            record("i", n, logs[n] > n * math.log(2) + _log(cw.safety * sups[n]), logs[n])
            record("ii", n, logs[n] >= 2 * log_factorial(n) - LOG_TOL, logs[n])
            worst = max(log_binomial(n, k) + logs[k] + logs[n - k] for k in range(1, n))
            record("iii", n, logs[n] >= worst - LOG_TOL, worst - logs[n])
            for k in range(n):
                lhs = _fc_log_sup(n, dists[k]) - logs[n]
                rhs = -n * math.log(2) + _fc_log_sup(k, dists[k]) - logs[k]
                record("Fc", n, lhs < rhs, {"k": k, "gap": rhs - lhs})
            d = dists[n]
            norm = _normalised_at_b(pd_b, u, n, d)
            record("pointwise", n, norm >= 0.5, norm)
            record("dominance", n, _dominance_gap(n, d, logs) >= -LOG_TOL, d)
            # ||F_c o phi||_D >= |(F_c o phi)^{(n)}(b)|/M_n, ||F_c||_D <= 3||F_c^{(n)}||/M_n
            ratio = norm * d1 ** n / 3
            record("growth", n, ratio >= d1 ** n / 6 * (1 - 1e-12),
                   {"ratio": ratio, "target": d1 ** n / 6})
            trunc = _logsumexp([_fc_log_sup(m, d) - logs[m] for m in range(n_max + 1)])
            record("norm_bound", n, trunc <= math.log(3) + _fc_log_sup(n, d) - logs[n] + LOG_TOL,
                   trunc)
            r = math.exp((log_factorial(n) - logs[n]) / n)
            record("nonanalytic", n, r <= math.exp(-log_factorial(n) / n) * (1 + 1e-12), r)
    else:
        raise ValueError(f"unknown construction kind {cw.kind!r}")
    rep = VerifyReport(not fails, fails, table)
    if strict and fails:
        raise VerificationError(f"{len(fails)} constraint(s) fail: {fails[0]}", rep)
    return rep


def growth_ratio(cw: ConstructedWeights, phi: RationalMap, X: DomainSpec, n: int) -> float:
    """Lower bound on ||F_{c_n} o phi||_D / ||F_{c_n}||_D from order n alone."""
    if cw.kind != "thm5":
        raise ValueError("growth ratios exist for thm5 constructions only")
    b, pb, u, d1 = _thm5_gate(phi, X, cw.b)
    pd_b = [np.array(complex(v[0])) for v in phi.derivs(np.array([b]), n)]
    d = cw.c_dist[n]
    return _normalised_at_b(pd_b, u, n, d) * d1 ** n / 3
