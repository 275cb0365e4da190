"""Axiom schemata A0-A14 and the instances used as a regression corpus."""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import LOGICS
from .formula import Formula, parse

# Schemata over the metavariables {a}, {b}, {c}; first-order schemata use
# {a} as a formula in x and {b} as a formula without x free.
SCHEMATA: dict[str, str] = {
    "A0": "{a} -> ({b} -> {a})",
    "A1": "({a} -> ({b} -> {c})) -> (({a} -> {b}) -> ({a} -> {c}))",
    "A2": "{a} -> ({b} -> ({a} & {b}))",
    "A3": "({a} & {b}) -> {a}",
    "A4": "({a} & {b}) -> {b}",
    "A5": "{a} -> ({a} | {b})",
    "A6": "{b} -> ({a} | {b})",
    "A7": "({a} -> {c}) -> (({b} -> {c}) -> (({a} | {b}) -> {c}))",
    "A8": "bot -> {a}",
    "A9": "({a} -> {b}) | ({b} -> {a})",
    "A10": "(forall x. {a}) -> {ay}",
    "A11": "{ay} -> exists x. {a}",
    "A12": "(forall x. ({b} -> {a})) -> ({b} -> forall x. {a})",
    "A13": "(forall x. ({a} -> {b})) -> ((exists x. {a}) -> {b})",
    "A14": "(forall x. ({a} | {b})) -> (forall x. {a}) | {b}",
}

PROPOSITIONAL_FILLS = [
    {"a": "p", "b": "q", "c": "r"},
    {"a": "(p & q)", "b": "(q -> r)", "c": "(r -> p)"},
    {"a": "(p -> q)", "b": "(r & p)", "c": "(q | bot)"},
]

FIRST_ORDER_FILLS = [
    {"a": "p(x)", "ay": "p(y)", "b": "q"},
    {"a": "(p(x) & q(x))", "ay": "(p(y) & q(y))", "b": "r"},
    {"a": "(p(x) -> q(x))", "ay": "(p(y) -> q(y))", "b": "(r | s)"},
]

_FO = ("ND", "CD", "GN", "GC")


def expected(name: str) -> dict[str, str]:
    """logic -> "proved" | "refuted" for the logics the axiom is tested in."""
    n = int(name[1:])
    if n <= 8:
        return {lg: "proved" for lg in LOGICS}
    if n == 9:
        return {lg: ("proved" if lg in ("GD", "GN", "GC") else "refuted") for lg in ("I", "GD", "ND", "CD", "GN", "GC")}
    if n <= 13:
        return {lg: "proved" for lg in _FO}
    return {"ND": "refuted", "CD": "proved", "GN": "refuted", "GC": "proved"}


@dataclass(frozen=True)
class CorpusGoal:
    axiom: str
    index: int
    formula: Formula
    expected: dict

    @property
    def name(self) -> str:
        return f"{self.axiom}.{self.index}"


def instances(name: str) -> list[Formula]:
    fills = PROPOSITIONAL_FILLS if int(name[1:]) <= 9 else FIRST_ORDER_FILLS
    return [parse(SCHEMATA[name].format(**fl)) for fl in fills]


def corpus() -> list[CorpusGoal]:
    return [CorpusGoal(name, i, f, expected(name)) for name in SCHEMATA for i, f in enumerate(instances(name))]


def propositional_corpus() -> list[CorpusGoal]:
    return [g for g in corpus() if int(g.axiom[1:]) <= 9]
