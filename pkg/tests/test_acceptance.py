"""The ten acceptance criteria, one test each.  Every test prints a single
'criterion NN: PASS/FAIL ...' line; the lines are collected again in the
'acceptance criteria' section of the pytest terminal summary."""

import math
import os
import random
from fractions import Fraction

import numpy as np
import pytest

from dxm import DomainSpec, Result, factorial_power, full_verdict, parse_map
from dxm import discdyn as dd
from dxm import endocheck as ec
from dxm import poly
from dxm import weightforge as wf
from dxm.gaussian import GaussianRational as G
from dxm.jets import FR, Jet, compose_jets, enumerate_partition_terms, exponential_formula_check
from dxm.weights import check_algebra_condition, check_thm1b_condition, nonanalyticity_trace

from oracles import bell_number, exact_derivs_at, fd_derivs, poly_compose, stirling2

SEED = int(os.environ.get("DXM_SEED", "20261019"))
DISC = DomainSpec.disc()
W2 = factorial_power(2)
UNRESOLVED = "1/2*(z + ((1+i)z-1)/(z+(i-1)))"
MOBIUS = "(2z-1)/(2-z)"


def _poly_jet(c, a, order):
    t = poly.taylor_at(tuple(c), a, order)
    return Jet(a, tuple(t[k] * math.factorial(k) for k in range(order + 1)))


def _unit_box_poly(rng):
    k = int(rng.integers(1, 8))  # degree <= 6
    return list(rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k))


def test_criterion_01_faa_di_bruno(acceptance_line):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        F, phi = _unit_box_poly(rng), _unit_box_poly(rng)
        a = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        pa = complex(np.polyval(phi[::-1], a))
        got = compose_jets(_poly_jet(F, pa, 8), _poly_jet(phi, a, 8)).deriv
        want = fd_derivs(F, phi, a, 8)
        for g, w in zip(got, want):
            if abs(w) > 1e-12:
                worst = max(worst, abs(g - w) / abs(w))
            else:
                worst = max(worst, abs(g - w))
    rnd = random.Random(SEED)
    exact_ok = True
    for _ in range(20):
        F = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 9)) for _ in range(rnd.randint(1, 7))]
        phi = [Fraction(rnd.randint(-9, 9), rnd.randint(1, 9)) for _ in range(rnd.randint(1, 7))]
        a = Fraction(rnd.randint(-4, 4), rnd.randint(1, 5))
        pa = sum(c * a ** k for k, c in enumerate(phi))
        got = compose_jets(Jet(pa, tuple(exact_derivs_at(F, pa, 12))),
                           Jet(a, tuple(exact_derivs_at(phi, a, 12)))).deriv
        exact_ok &= list(got) == exact_derivs_at(poly_compose(F, phi), a, 12)
    ok = worst <= 1e-6 and exact_ok
    acceptance_line(1, ok, f"50 float pairs, worst rel err {worst:.2e}; exact order 12 "
                           f"{'identical' if exact_ok else 'MISMATCH'}")
    assert ok


def test_criterion_02_partitions(acceptance_line):
    ok = True
    for n in range(1, 15):
        per_m = [sum(t.coeff for t in enumerate_partition_terms(n, m)) for m in range(1, n + 1)]
        ok &= sum(per_m) == bell_number(n)
        ok &= all(c == stirling2(n, m) for m, c in enumerate(per_m, start=1))
    acceptance_line(2, ok, "Bell(n) and S(n, m) reproduced exactly for n <= 14")
    assert ok


def test_criterion_03_exponential_formula(acceptance_line):
    rnd = random.Random(SEED)
    vectors = [[rnd.randint(-5, 5) for _ in range(rnd.randint(1, 8))] for _ in range(20)]
    bad = [(x, m, t) for x in vectors for m in range(1, 6) for t in range(m, 13)
           if not exponential_formula_check(x, m, t)]
    ok = not bad
    acceptance_line(3, ok, f"20 vectors, m <= 5, trunc <= 12: {len(bad)} failures")
    assert ok


def test_criterion_04_weights(acceptance_line):
    alg = check_algebra_condition(W2, 40)
    r60 = nonanalyticity_trace(W2, 60)[-1][1]
    t2 = check_thm1b_condition(W2, 30)
    t15 = check_thm1b_condition(factorial_power(1.5), 30)
    ok = (alg.ok and alg.exact and abs(r60 - 0.043) <= 0.001 and t2.ok
          and t2.B == pytest.approx(1) and not t15.ok)
    acceptance_line(4, ok, f"algebra to 40 {alg.ok}; r_60 = {r60:.5f}; thm1b B = {t2.B:g}; "
                           f"n!^1.5 violates {not t15.ok}")
    assert ok


def test_criterion_05_closed_form_norm(acceptance_line):
    errs = []
    for R in (1.0, 2.0):
        direct = ec.witness_norm(R, W2, 40).norm
        ident = ec.composed_norm(FR(1 + 0j, 0.0, R), parse_map("z"), DISC, W2, 40).norm
        errs += [abs(direct / math.exp(R) - 1), abs(ident / direct - 1)]
    ok = max(errs) <= 1e-10
    acceptance_line(5, ok, f"||F_R|| = e^R for R in (1, 2), max rel err {max(errs):.1e}")
    assert ok


def test_criterion_06_verdict_fixtures(acceptance_line):
    checks = {}

    def verdict(text):
        return full_verdict(parse_map(text), DISC, W2)

    v = verdict("z/2")
    checks["z/2"] = v.result is Result.ENDO and abs(v.certificate["q"] - 0.5) <= 1e-9
    checks["rotation"] = verdict("(3+4i)/5*z").result is Result.ENDO
    v = verdict(MOBIUS)
    checks["mobius"] = (v.result is Result.NOT_ENDO
                        and abs(v.certificate["abs_dphi_b"] - 3) <= 1e-9)
    v = verdict("(1-z^3)/2")
    checks["cubic"] = (v.result is Result.NOT_ENDO and abs(v.certificate["b"] + 1) <= 1e-9
                       and abs(v.certificate["abs_dphi_b"] - 1.5) <= 1e-9)
    fam = ec.iterate_rules(parse_map("(1-z^3)/2"), DISC, W2).certificate["family"]
    checks["cubic N1 = 2"] = fam["N1"] == 2
    sup2 = fam["sup_phi_N"]
    # the stated 0.875 is not attained: phi_2 = (7 + 3w - 3w^2 + w^3)/16 with
    # w = z^3 peaks at 9/14 on the circle (see the decisions ledger)
    checks["cubic ||phi_2|| = 0.875"] = abs(sup2 - 0.875) <= 1e-6
    v = verdict("(2z-1)/(z-2)")
    checks["(2z-1)/(z-2)"] = v.result is Result.NOT_ENDO and v.rule == "thm6"
    v = verdict(UNRESOLVED)
    checks["unresolved"] = v.result is Result.UNKNOWN and v.label == "unresolved-case"
    # seven items: six map verdicts plus the iterate report for the cubic
    verdicts = [k for k in checks if "||" not in k and "N1" not in k]
    passed = sum(checks[k] for k in verdicts) + (checks["cubic N1 = 2"]
                                                 and checks["cubic ||phi_2|| = 0.875"])
    failed = [k for k, ok in checks.items() if not ok]
    ok = not failed
    acceptance_line(6, ok, f"{passed}/7 items ({sum(checks[k] for k in verdicts)}/6 verdicts, "
                           f"N1 = {fam['N1']}); ||phi_2|| = {sup2:.6f} = 9/14, not 0.875"
                           + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok, f"failed sub-checks: {failed}"


def test_criterion_07_dynamics(acceptance_line):
    dw = dd.denjoy_wolff(parse_map("(1+z)^2/4"))
    cls = dd.classify(parse_map("(1+z)^2/4"))
    mult = cls.evidence[-1].multiplier
    phi = parse_map("(2z-1)/(z-2)")
    fp = [f for f in dd.fixed_points(phi) if f.location is dd.Location.INTERIOR][0]
    count = dd.argument_principle_count(phi)
    ok = (abs(dw.point - 1) <= 1e-6 and abs(mult - 1) <= 1e-6
          and cls.case is dd.Case.CASE3A_II
          and abs(fp.z - (2 - math.sqrt(3))) <= 1e-10 and abs(fp.abs_multiplier - 1) <= 1e-8
          and abs(count - 1) <= 1e-6)
    acceptance_line(7, ok, f"DW = {complex(dw.point):.3g} ({cls.case.value}); fixed point "
                           f"err {abs(fp.z - (2 - math.sqrt(3))):.1e}; zero count {count:.9f}")
    assert ok


def test_criterion_08_witness_growth(acceptance_line):
    tab = ec.witness_growth_experiment(parse_map(MOBIUS), DISC, W2, 1, [1, 2, 4], 40)
    r = {row.R: row.ratio for row in tab.rows}
    ok = r[1] < r[2] < r[4] and r[2] >= 10
    acceptance_line(8, ok, f"ratios {r[1]:.4g} < {r[2]:.4g} < {r[4]:.4g}")
    assert ok


def test_criterion_09_constructors(acceptance_line):
    phi3 = parse_map(UNRESOLVED)
    cw3 = wf.construct_thm3(phi3, DISC, 12)
    rep3 = wf.verify_construction(cw3, phi3, DISC, strict=False)
    have = set(rep3.checks)
    thm3_ok = rep3.ok and {"i", "ii", "iii", "iv", "term_bound"} <= have
    phi5 = parse_map(MOBIUS)
    cw5 = wf.construct_thm5(phi5, DISC, 1, 10)
    rep5 = wf.verify_construction(cw5, phi5, DISC, strict=False)
    ratios = [wf.growth_ratio(cw5, phi5, DISC, n) for n in range(2, 11)]
    thm5_ok = rep5.ok and all(rt >= 3 ** n / 6 * (1 - 1e-12)
                              for n, rt in zip(range(2, 11), ratios))
    tamper_ok = (not wf.verify_construction(cw3.tampered(5, 0.5), phi3, DISC, checks=(),
                                            strict=False).ok
                 and not wf.verify_construction(cw5.tampered(5, 0.5), phi5, DISC,
                                                strict=False).ok)
    ok = thm3_ok and thm5_ok and tamper_ok
    acceptance_line(9, ok, f"thm3 n <= 12 {thm3_ok}; thm5 n <= 10 {thm5_ok} "
                           f"(ratio(10) = {ratios[-1]:.3g}); tamper caught {tamper_ok}")
    assert ok


def _random_corpus(n_maps):
    rng = np.random.default_rng(SEED)
    maps = []
    while len(maps) < n_maps:
        if len(maps) % 2 == 0:
            # Blaschke product with exact zeros of modulus <= 0.8
            zeros = []
            for _ in range(rng.integers(1, 4)):
                r, t = rng.uniform(0, 0.8), rng.uniform(0, 2 * np.pi)
                zeros.append(G(Fraction(round(64 * r * math.cos(t)), 64),
                               Fraction(round(64 * r * math.sin(t)), 64)))
            num, den = (G(1),), (G(1),)
            for a in zeros:
                num = poly.mul(num, (-a, G(1)))
                den = poly.mul(den, (G(1), -a.conjugate()))
            maps.append(dd.validate_self_map(num, den))
        else:
            # polynomial with coefficient l1 norm <= 0.95
            k = int(rng.integers(2, 5))
            c = rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)
            c *= rng.uniform(0.3, 0.95) / np.sum(np.abs(c))
            coeffs = tuple(G(Fraction(round(x.real * 256), 256), Fraction(round(x.imag * 256), 256))
                           for x in c)
            maps.append(dd.validate_self_map(coeffs, (G(1),)))
    return maps


def test_criterion_10_consistency_sweep(acceptance_line):
    maps = _random_corpus(100)
    conflicts, decisive = [], 0
    for phi in maps:
        v = full_verdict(phi, DISC, W2, run_all=True)
        decisive += v.decisive
        if ec.conflicting(v.evidence):
            conflicts.append(phi.to_text())
    ok = not conflicts
    acceptance_line(10, ok, f"{len(maps)} maps, {decisive} decisive, "
                            f"{len(conflicts)} conflicts")
    assert ok, conflicts[:3]
