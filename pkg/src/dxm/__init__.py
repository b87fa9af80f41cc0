"""Composition endomorphisms of the algebras D(X, M) of infinitely
differentiable functions on [0, 1] or the closed unit disc."""

from .domain import DomainSpec
from .endocheck import Result, Verdict, full_verdict
from .maps import RationalMap
from .parsing import parse_map
from .weights import WeightSequence, factorial_power, parse_weight

__version__ = "0.1.0"

__all__ = ["DomainSpec", "RationalMap", "Result", "Verdict", "WeightSequence",
           "factorial_power", "full_verdict", "parse_map", "parse_weight"]
