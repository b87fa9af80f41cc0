"""Reproduction suite: run every worked example end to end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from . import endocheck as ec
from .domain import DomainSpec
from .parsing import parse_map
from .weightforge import construct_thm3, verify_construction
from .weights import factorial_power

TOL = 1e-9
RESULTS = {r.value for r in ec.Result}
KNOWN_KEYS = {"result", "rule", "q", "b", "abs_dphi_b", "N1", "label", "thm3_nmax"}


class FixtureError(ValueError):
    pass


@dataclass
class FixtureRow:
    id: str
    expected: dict
    got: dict
    ok: bool
    mismatches: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"id": self.id, "expected": self.expected, "got": self.got, "ok": self.ok,
                "mismatches": self.mismatches}


def load_fixtures(path: Optional[str] = None) -> list[dict]:
    try:
        if path is None:
            text = resources.files("dxm").joinpath("fixtures.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot read fixtures: {exc}") from exc
    items = data.get("fixtures") if isinstance(data, dict) else None
    if not isinstance(items, list) or not items:
        raise FixtureError("fixture file needs a non-empty 'fixtures' list")
    seen = set()
    for fx in items:
        if not isinstance(fx, dict) or not isinstance(fx.get("id"), str) \
                or not isinstance(fx.get("map"), str) or not isinstance(fx.get("expect"), dict):
            raise FixtureError(f"malformed fixture: {fx!r}")
        if fx["id"] in seen:
            raise FixtureError(f"duplicate fixture id {fx['id']!r}")
        seen.add(fx["id"])
        exp = fx["expect"]
        if exp.get("result") not in RESULTS:
            raise FixtureError(f"{fx['id']}: expect.result must be one of {sorted(RESULTS)}")
        unknown = set(exp) - KNOWN_KEYS
        if unknown:
            raise FixtureError(f"{fx['id']}: unknown expectation keys {sorted(unknown)}")
    return items


def _close(a, b) -> bool:
    if isinstance(b, list):
        b = complex(*b)
    return a is not None and abs(complex(a) - complex(b)) <= TOL


def run_fixture(fx: dict, X: Optional[DomainSpec] = None, w=None) -> FixtureRow:
    X = X or DomainSpec.disc()
    w = w or factorial_power(2)
    exp = fx["expect"]
    phi = parse_map(fx["map"], X)
    v = ec.full_verdict(phi, X, w)
    got = {"result": v.result.value, "rule": v.rule}
    bad = []
    if got["result"] != exp["result"]:
        bad.append("result")
    if "rule" in exp and v.rule != exp["rule"]:
        bad.append("rule")
    for key in ("q", "b", "abs_dphi_b"):
        if key in exp:
            got[key] = v.certificate.get(key)
            if not _close(got[key], exp[key]):
                bad.append(key)
    if "label" in exp:
        got["label"] = v.label
        if v.label != exp["label"]:
            bad.append("label")
    if "N1" in exp:
        it = ec.iterate_rules(phi, X, w)
        fam = it.certificate.get("family") or {}
        got["N1"] = fam.get("N1")
        got["sup_phi_N"] = fam.get("sup_phi_N")
        if got["N1"] != exp["N1"]:
            bad.append("N1")
    if "thm3_nmax" in exp:
        try:
            cw = construct_thm3(phi, X, exp["thm3_nmax"])
            verify_construction(cw, phi, X)
            got["thm3"] = "verified"
        except Exception as exc:  # any failure is a fixture mismatch
            got["thm3"] = f"{type(exc).__name__}: {exc}"
            bad.append("thm3_nmax")
    return FixtureRow(fx["id"], exp, got, not bad, bad)


def run_suite(only: Optional[str] = None, path: Optional[str] = None,
              X: Optional[DomainSpec] = None, w=None) -> list[FixtureRow]:
    items = load_fixtures(path)
    if only is not None:
        items = [fx for fx in items if fx["id"] == only]
        if not items:
            raise FixtureError(f"no fixture named {only!r}")
    return [run_fixture(fx, X, w) for fx in items]
