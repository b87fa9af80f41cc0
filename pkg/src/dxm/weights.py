"""Weight sequences M_n for D(X, M) and the checks imposed on them.

Everything is carried in the log domain: ``n! * n**(n*n)`` overflows a
double before n = 10, while every quantity the algebra needs is a product
or a ratio of weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb, lgamma, log
from typing import Callable, Optional, Sequence

LOG_TOL = 1e-9


class WeightError(ValueError):
    pass


def log_factorial(n: int) -> float:
    return lgamma(n + 1)


def log_binomial(n: int, k: int) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


@dataclass(frozen=True)
class WeightSequence:
    name: str
    log_m: Callable[[int], float]
    exact_m: Optional[Callable[[int], Fraction]] = None
    certified_prefix: int = 0
    length: Optional[int] = None  # finite tables only

    def log(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        if self.length is not None and n >= self.length:
            raise WeightError(f"{self.name}: index {n} beyond table length {self.length}")
        return 0.0 if n == 0 else float(self.log_m(n))

    def value(self, n: int) -> float:
        """M_n as a float (may be inf for large n)."""
        try:
            return math.exp(self.log(n))
        except OverflowError:
            return math.inf

    def logs(self, upto: int) -> list[float]:
        return [self.log(n) for n in range(upto + 1)]


def factorial_power(alpha) -> WeightSequence:
    """M_n = n!**alpha, alpha >= 1."""
    if float(alpha) < 1:
        raise WeightError(f"factorial_power needs alpha >= 1, got {alpha}")
    af = float(alpha)
    exact_m = None
    if float(alpha).is_integer():
        k = int(alpha)
        exact_m = lambda n: Fraction(math.factorial(n) ** k)  # noqa: E731
    name = f"n!^{int(af) if af.is_integer() else af:g}"
    return WeightSequence(name, lambda n: af * lgamma(n + 1), exact_m)


def factorial_log_power() -> WeightSequence:
    """M_n = n! (log(n+1))**n."""
    return WeightSequence("n!log^n", lambda n: lgamma(n + 1) + n * log(log(n + 1)))


def factorial_superexp() -> WeightSequence:
    """M_n = n! n**(n**2)."""
    return WeightSequence("n!n^n2", lambda n: lgamma(n + 1) + n * n * log(n))


def builtin_weight(kind: str, alpha: float = 2.0) -> WeightSequence:
    if kind == "factorial_power":
        return factorial_power(alpha)
    if kind == "factorial_log_power":
        return factorial_log_power()
    if kind == "factorial_superexp":
        return factorial_superexp()
    raise WeightError(f"unknown weight kind {kind!r}")


def tabulated(name: str, log_values: Sequence[float]) -> WeightSequence:
    """User table of log M_n, n = 0..len-1; log M_0 must be 0."""
    vals = [float(v) for v in log_values]
    if not vals or vals[0] != 0.0:
        raise WeightError("tabulated weights need log M_0 = 0")
    if not all(math.isfinite(v) for v in vals):
        raise WeightError("tabulated weights must be finite")
    return WeightSequence(name, lambda n: vals[n], length=len(vals))


def parse_weight(text: str) -> WeightSequence:
    """CLI weight syntax: ``n!^a``, ``n!log^n``, ``n!n^n2``."""
    t = text.replace(" ", "")
    if t == "n!log^n":
        return factorial_log_power()
    if t == "n!n^n2":
        return factorial_superexp()
    if t.startswith("n!^"):
        try:
            return factorial_power(float(t[3:]))
        except ValueError:
            pass
    if t == "n!":
        return factorial_power(1)
    raise WeightError(f"unrecognised weight {text!r}")


def load_weight_file(path) -> WeightSequence:
    with open(path) as fh:
        data = json.load(fh)
    try:
        return tabulated(data["name"], data["log_m"])
    except (KeyError, TypeError) as exc:
        raise WeightError(f"{path}: not a weights file ({exc})") from exc


# -- checks ------------------------------------------------------------------

@dataclass
class AlgebraCheck:
    ok: bool
    max_checked: int
    violation: Optional[tuple[int, int]] = None
    marginal: list[tuple[int, int]] = field(default_factory=list)
    exact: bool = False


def check_algebra_condition(w: WeightSequence, upto: int) -> AlgebraCheck:
    """C(m+n, n) <= M_{m+n}/(M_m M_n) for all m + n <= upto."""
    if upto < 1:
        raise ValueError("upto must be >= 1")
    if w.exact_m is not None:
        ms = [w.exact_m(n) for n in range(upto + 1)]
        for total in range(upto + 1):
            for m in range(total + 1):
                n = total - m
                if comb(total, n) * ms[m] * ms[n] > ms[total]:
                    return AlgebraCheck(False, upto, (m, n), exact=True)
        return AlgebraCheck(True, upto, exact=True)
    logs = w.logs(upto)
    marginal = []
    for total in range(upto + 1):
        for m in range(total + 1):
            n = total - m
            slack = logs[total] - logs[m] - logs[n] - log_binomial(total, n)
            if slack < -LOG_TOL:
                return AlgebraCheck(False, upto, (m, n), marginal)
            if slack <= LOG_TOL and comb(total, n) > 1:
                marginal.append((m, n))
    return AlgebraCheck(True, upto, None, marginal)


def certify(w: WeightSequence, upto: int) -> WeightSequence:
    """Copy of ``w`` with certified_prefix raised to ``upto``, or WeightError."""
    res = check_algebra_condition(w, upto)
    if not res.ok:
        raise WeightError(f"{w.name}: algebra condition fails at {res.violation}")
    return replace(w, certified_prefix=max(w.certified_prefix, upto))


def nonanalyticity_trace(w: WeightSequence, upto: int) -> list[tuple[int, float]]:
    """(n, (n!/M_n)**(1/n)) for n = 1..upto."""
    if upto < 1:
        raise ValueError("upto must be >= 1")
    return [(n, math.exp((log_factorial(n) - w.log(n)) / n)) for n in range(1, upto + 1)]


def nonanalytic_consistent(w: WeightSequence, upto: int = 60, threshold: float = 0.5) -> bool:
    """Heuristic: trace below ``threshold`` at ``upto`` and non-increasing
    over the last quarter of indices.  Not a proof of the limit."""
    if w.length is not None:
        upto = min(upto, w.length - 1)
    if upto < 1:
        return False
    tr = [r for _, r in nonanalyticity_trace(w, upto)]
    tail = tr[len(tr) - max(2, len(tr) // 4):]
    return tr[-1] < threshold and all(b <= a * (1 + 1e-12) for a, b in zip(tail, tail[1:]))


def quasi_analytic_partial_sums(w: WeightSequence, upto: int) -> list[float]:
    """Partial sums of M_n/M_{n+1}, n = 0..upto-1."""
    if upto < 1:
        raise ValueError("upto must be >= 1")
    out, s = [], 0.0
    for n in range(upto):
        s += math.exp(w.log(n) - w.log(n + 1))
        out.append(s)
    return out


@dataclass
class Thm1bCheck:
    ok: bool
    B: float
    argmax: tuple[int, int]
    row_sup: list[float]


def check_thm1b_condition(w: WeightSequence, upto: int) -> Thm1bCheck:
    """Scan (M_m/m!)(n!/M_n) m**(n-m) over 1 <= m <= n <= upto.

    The sup is reported as B when the per-n row maxima stop growing over
    the last quarter of indices; otherwise ``ok`` is False and ``argmax`` is
    the worst pair found.
    """
    if upto < 2:
        raise ValueError("upto must be >= 2")
    best, arg = -math.inf, (1, 1)
    rows = []
    for n in range(1, upto + 1):
        row = -math.inf
        for m in range(1, n + 1):
            v = (w.log(m) - log_factorial(m) + log_factorial(n) - w.log(n)
                 + (n - m) * log(m))
            if v > row:
                row = v
            if v > best:
                best, arg = v, (m, n)
        rows.append(row)
    q = max(2, upto // 4)
    tail = rows[-q:]
    head_max = max(rows[:-q]) if len(rows) > q else -math.inf
    ok = (all(b <= a + LOG_TOL for a, b in zip(tail, tail[1:]))
          and max(tail) <= max(head_max, tail[0]) + LOG_TOL)
    return Thm1bCheck(ok, math.exp(best), arg, [math.exp(r) for r in rows])


@dataclass
class WeightReport:
    algebra_ok: bool
    max_checked: int
    nonanalytic_trace: list
    quasi_partial_sums: list
    thm1b: dict

    def to_json(self) -> dict:
        return {
            "algebra_ok": self.algebra_ok,
            "max_checked": self.max_checked,
            "nonanalytic_trace": [[n, r] for n, r in self.nonanalytic_trace],
            "quasi_partial_sums": list(self.quasi_partial_sums),
            "thm1b": self.thm1b,
        }


def weight_report(w: WeightSequence, upto: int) -> WeightReport:
    if w.length is not None:
        upto = min(upto, w.length - 1)
    alg = check_algebra_condition(w, upto)
    tb = check_thm1b_condition(w, max(upto, 2)) if (w.length is None or w.length > 2) else None
    thm1b = {"ok": tb.ok, "B": tb.B, "argmax": list(tb.argmax)} if tb else {"ok": False}
    return WeightReport(alg.ok, upto, nonanalyticity_trace(w, upto),
                        quasi_analytic_partial_sums(w, upto), thm1b)
