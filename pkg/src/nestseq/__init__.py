"""Nested-sequent proof search for I, GD, ND, CD, GN and GC."""

from .calculus import Calculus
from .derivation import Derivation, check
from .formula import Formula, parse, show
from .prover import Budget, Proved, Refuted, Unknown, prove
from .sequent import Node, parse_sequent

__all__ = [
    "Budget",
    "Calculus",
    "Derivation",
    "Formula",
    "Node",
    "Proved",
    "Refuted",
    "Unknown",
    "check",
    "parse",
    "parse_sequent",
    "prove",
    "show",
]
__version__ = "0.1.0"
