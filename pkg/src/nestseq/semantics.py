"""Kripke models, forcing, sequent satisfaction and countermodels."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import formula as F
from . import sequent as S
from .formula import Formula
from .sequent import IN, OUT, Node

FIRST_ORDER = {"ND", "CD", "GN", "GC"}
CONNECTED = {"GD", "GN", "GC"}
CONSTANT = {"CD", "GC"}


@dataclass
class KripkeModel:
    """W, a preorder given by its full set of pairs, domains and a valuation.

    ``domains`` is empty for propositional models.  ``valuation[p][w]`` is
    the set of argument tuples making p true at w; for 0-ary p it is either
    ``{()}`` or empty.
    """

    worlds: tuple[str, ...]
    order: frozenset[tuple[str, str]]
    domains: dict[str, frozenset[str]] = field(default_factory=dict)
    valuation: dict[str, dict[str, frozenset[tuple[str, ...]]]] = field(default_factory=dict)

    def le(self, w: str, u: str) -> bool:
        return (w, u) in self.order

    def above(self, w: str) -> list[str]:
        return [u for u in self.worlds if (w, u) in self.order]

    def holds(self, pred: str, w: str, args: tuple[str, ...]) -> bool:
        return args in self.valuation.get(pred, {}).get(w, ())

    def universe(self) -> list[str]:
        out: set[str] = set()
        for d in self.domains.values():
            out |= d
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "order": sorted([list(p) for p in self.order]),
            "domains": {w: sorted(d) for w, d in self.domains.items()},
            "valuation": {
                p: {w: sorted(list(t) for t in ts) for w, ts in per.items() if ts}
                for p, per in sorted(self.valuation.items())
            },
        }

    @classmethod
    def from_json(cls, d: dict) -> "KripkeModel":
        return cls(
            tuple(d["worlds"]),
            frozenset(tuple(p) for p in d["order"]),
            {w: frozenset(xs) for w, xs in d.get("domains", {}).items()},
            {p: {w: frozenset(tuple(t) for t in ts) for w, ts in per.items()} for p, per in d.get("valuation", {}).items()},
        )


# ----------------------------------------------------------------- forcing


class Evaluator:
    """Memoised forcing relation for one model."""

    def __init__(self, m: KripkeModel):
        self.m = m
        self.cache: dict = {}
        self.up = {w: m.above(w) for w in m.worlds}

    def forces(self, w: str, mu: dict[str, str], f: Formula) -> bool:
        fv = F.free_vars(f)
        key = (w, f, tuple(sorted((x, mu[x]) for x in fv if x in mu)))
        hit = self.cache.get(key)
        if hit is None:
            hit = self._forces(w, mu, f)
            self.cache[key] = hit
        return hit

    def _forces(self, w, mu, f) -> bool:
        m = self.m
        if isinstance(f, F.Atom):
            try:
                args = tuple(mu[x] for x in f.args)
            except KeyError as e:
                raise ValueError(f"unassigned variable {e.args[0]}") from None
            return m.holds(f.pred, w, args)
        if isinstance(f, F.Bottom):
            return False
        if isinstance(f, F.And):
            return self.forces(w, mu, f.left) and self.forces(w, mu, f.right)
        if isinstance(f, F.Or):
            return self.forces(w, mu, f.left) or self.forces(w, mu, f.right)
        if isinstance(f, F.Imp):
            return all(not self.forces(u, mu, f.left) or self.forces(u, mu, f.right) for u in self.up[w])
        if isinstance(f, F.Forall):
            return all(
                self.forces(u, {**mu, f.var: d}, f.body) for u in self.up[w] for d in sorted(m.domains.get(u, ()))
            )
        if isinstance(f, F.Exists):
            return any(self.forces(w, {**mu, f.var: d}, f.body) for d in sorted(m.domains.get(w, ())))
        raise TypeError(f)


def forces(m: KripkeModel, w: str, mu: dict[str, str], f: Formula) -> bool:
    return Evaluator(m).forces(w, mu, f)


def respects_edges(m: KripkeModel, s: Node, iota: dict[int, str]) -> bool:
    return all(m.le(iota[n.label], iota[c.label]) for n in s.nodes() for c in n.children)


def satisfies_sequent(m: KripkeModel, s: Node, iota: dict[int, str], mu: dict[str, str], ev: Evaluator | None = None) -> bool:
    """M, iota, mu |= s.  An empty flat component X; (nothing) counts as false."""
    ev = ev or Evaluator(m)
    if not respects_edges(m, s, iota):
        return True

    def flat(n: Node) -> bool:
        if not n.forms:
            return False
        w = iota[n.label]
        dom = m.domains.get(w, frozenset())
        ante = all(mu.get(x) in dom for x in n.sig) and all(ev.forces(w, mu, f) for f in n.inputs)
        return (not ante) or any(ev.forces(w, mu, f) for f in n.outputs)

    def sat(n: Node) -> bool:
        return flat(n) or any(sat(c) for c in n.children)

    return sat(s)


# ----------------------------------------------------------- frame checks


def check_frame(m: KripkeModel, logic: str) -> list[str]:
    """Violated frame/model conditions for the given logic; empty if none."""
    bad = []
    W = m.worlds
    if not W:
        bad.append("no worlds")
    for w in W:
        if (w, w) not in m.order:
            bad.append(f"not reflexive at {w}")
    for a, b in m.order:
        if a not in W or b not in W:
            bad.append(f"order mentions unknown world in {(a, b)}")
    for a, b in m.order:
        for c in W:
            if (b, c) in m.order and (a, c) not in m.order:
                bad.append(f"not transitive: {a}<={b}<={c}")
    if logic in CONNECTED:
        for w in W:
            for u, v in itertools.combinations(m.above(w), 2):
                if not (m.le(u, v) or m.le(v, u)):
                    bad.append(f"not connected: {w} sees incomparable {u}, {v}")
    for p, per in m.valuation.items():
        for a, b in m.order:
            if not per.get(a, frozenset()) <= per.get(b, frozenset()):
                bad.append(f"valuation of {p} not monotone on {a}<={b}")
    if logic in FIRST_ORDER:
        for w in W:
            if not m.domains.get(w):
                bad.append(f"empty domain at {w}")
        for a, b in m.order:
            da, db = m.domains.get(a, frozenset()), m.domains.get(b, frozenset())
            if not da <= db:
                bad.append(f"domains not nested on {a}<={b}")
        if logic in CONSTANT:
            doms = {m.domains.get(w, frozenset()) for w in W}
            if len(doms) > 1:
                bad.append("domains not constant")
        for p, per in m.valuation.items():
            for w, ts in per.items():
                dom = m.domains.get(w, frozenset())
                if any(not set(t) <= dom for t in ts):
                    bad.append(f"V({p},{w}) leaves D({w})")
    else:
        for p, per in m.valuation.items():
            if any(t != () for ts in per.values() for t in ts):
                bad.append(f"{p} has arguments in a propositional model")
    return bad


# ------------------------------------------------------ countermodel from search


def extract_countermodel(top: Node, logic: str, start_var: str | None = None):
    """Model read off a saturated branch top: worlds are labels, order is
    reachability, domains collect signature variables and atoms true at w
    are the input atoms at ancestors-or-self.  Returns (model, iota, mu)."""
    name = S.label_name
    labels = top.labels()
    worlds = tuple(name(w) for w in labels)
    order = frozenset((name(a), name(b)) for a, b in S.reach_pairs(top))
    fo = logic in FIRST_ORDER
    domains: dict[str, frozenset[str]] = {}
    if fo:
        every = frozenset(top.sig_vars() | ({start_var} if start_var else set()))
        for w in labels:
            if logic in CONSTANT:
                domains[name(w)] = every
            else:
                d = set(S.available_vars(top, w))
                if start_var:
                    d.add(start_var)
                domains[name(w)] = frozenset(d)
    valuation: dict[str, dict[str, set]] = {}
    for w in labels:
        for a in S.ancestors_or_self(top, w):
            for f in top.find(a).inputs:
                if isinstance(f, F.Atom):
                    valuation.setdefault(f.pred, {}).setdefault(name(w), set()).add(tuple(f.args))
    val = {p: {w: frozenset(ts) for w, ts in per.items()} for p, per in valuation.items()}
    m = KripkeModel(worlds, order, domains, val)
    iota = {w: name(w) for w in labels}
    mu: dict[str, str] = {}
    if fo:
        default = start_var or (sorted(domains[name(S.ROOT)])[0] if domains[name(S.ROOT)] else None)
        for x in sorted(top.vars()):
            mu[x] = x if x in m.universe() else default
    return m, iota, mu


def truth_lemma_violations(m: KripkeModel, s: Node, iota: dict[int, str], mu: dict[str, str]) -> list[str]:
    """Formulas of s at labels known to the model whose truth value disagrees with their polarity."""
    ev = Evaluator(m)
    bad = []
    for n in s.nodes():
        if n.label not in iota:
            continue
        w = iota[n.label]
        for pf in n.forms:
            if not F.free_vars(pf.formula) <= set(mu):
                continue
            val = ev.forces(w, mu, pf.formula)
            if val != (pf.pol is IN):
                bad.append(f"{pf} at {w}")
    return bad


# ------------------------------------------------------------- brute force


@dataclass
class OracleResult:
    model: KripkeModel | None
    world: str | None = None
    mu: dict[str, str] | None = None
    truncated: bool = False
    checked: int = 0

    @property
    def found(self) -> bool:
        return self.model is not None


def preorders(n: int, connected: bool = False) -> list[frozenset[tuple[int, int]]]:
    """Preorders on range(n), one per isomorphism class."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    out = []
    perms = list(itertools.permutations(range(n)))
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = {(i, i) for i in range(n)} | {p for p, b in zip(pairs, bits) if b}
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2):
            continue
        if connected and any(
            (u, v) not in rel and (v, u) not in rel for w in range(n) for u in range(n) for v in range(n) if (w, u) in rel and (w, v) in rel
        ):
            continue
        canon = min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        out.append(frozenset(rel))
    return out


def _upsets(n: int, rel) -> list[frozenset[int]]:
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        s = {i for i in range(n) if bits[i]}
        if all(j in s for i in s for j in range(n) if (i, j) in rel):
            out.append(frozenset(s))
    return out


def enumerate_countermodel(f: Formula, logic: str, max_worlds: int = 3, max_domain: int = 2, max_models: int = 200_000) -> OracleResult:
    """Search all small models of the logic for one falsifying ``f``.

    Worlds range over preorders up to isomorphism (connected ones for the
    GD family), valuations over monotone assignments and, for first-order
    logics, domains over subsets of {d1..dk}.  The falsifying triple is
    (model, world, mu) with mu sending the free variables of f into the
    domain of that world.  ``truncated`` is set when ``max_models`` stopped
    the enumeration early.
    """
    fo = logic in FIRST_ORDER
    if not fo and not F.is_propositional(f):
        raise ValueError(f"{logic} is propositional")
    preds = F.predicates(f)
    fv = sorted(F.free_vars(f))
    checked = 0
    for n in range(1, max_worlds + 1):
        names = tuple(f"u{i}" for i in range(n))
        for rel in preorders(n, connected=logic in CONNECTED):
            order = frozenset((names[a], names[b]) for a, b in rel)
            for doms in _domain_choices(n, rel, logic, max_domain) if fo else [None]:
                for val in _valuations(n, rel, preds, doms, names):
                    checked += 1
                    if checked > max_models:
                        return OracleResult(None, truncated=True, checked=checked - 1)
                    domains = {names[i]: frozenset(doms[i]) for i in range(n)} if fo else {}
                    m = KripkeModel(names, order, domains, val)
                    ev = Evaluator(m)
                    for i in range(n):
                        w = names[i]
                        pool = sorted(domains[w]) if fo else []
                        for choice in itertools.product(pool, repeat=len(fv)):
                            mu = dict(zip(fv, choice))
                            if not ev.forces(w, mu, f):
                                return OracleResult(m, w, mu, False, checked)
    return OracleResult(None, checked=checked)


def _domain_choices(n, rel, logic, k):
    elems = [f"d{i}" for i in range(1, k + 1)]
    subsets = [frozenset(c) for r in range(1, k + 1) for c in itertools.combinations(elems, r)]
    if logic in CONSTANT:
        for d in subsets:
            yield [d] * n
        return
    for choice in itertools.product(subsets, repeat=n):
        if all(choice[a] <= choice[b] for a, b in rel):
            yield list(choice)


def _valuations(n, rel, preds, doms, names):
    ups = _upsets(n, rel)
    slots = []  # (pred, tuple) pairs, each assigned an up-set of worlds
    for p, ar in sorted(preds.items()):
        if doms is None or ar == 0:
            slots.append((p, ()))
        else:
            universe = sorted(set().union(*doms))
            for t in itertools.product(universe, repeat=ar):
                slots.append((p, t))
    options = []
    for p, t in slots:
        ok = [u for u in ups if doms is None or all(set(t) <= doms[i] for i in u)]
        options.append(ok)
    for pick in itertools.product(*options):
        val: dict[str, dict[str, set]] = {p: {} for p in preds}
        for (p, t), up in zip(slots, pick):
            for i in up:
                val[p].setdefault(names[i], set()).add(t)
        yield {p: {w: frozenset(ts) for w, ts in per.items()} for p, per in val.items()}


def countermodel_to_json(m: KripkeModel, iota: dict[int, str], mu: dict[str, str]) -> dict:
    d = m.to_json()
    d["iota"] = {S.label_name(k): v for k, v in sorted(iota.items())}
    d["mu"] = dict(sorted(mu.items()))
    return d


def countermodel_from_json(d: dict):
    m = KripkeModel.from_json(d)
    iota = {S.parse_label(k): v for k, v in d.get("iota", {}).items()}
    return m, iota, dict(d.get("mu", {}))


def check_extension(m: KripkeModel, ext) -> list[str]:
    """Instances of the extension's frame condition that fail in m."""
    W = m.worlds

    def sat(op, a, b):
        return m.le(a, b) if op == "<=" else a == b

    bad = []
    if ext.kind == "dlc":
        def chains(prefix):
            if len(prefix) == ext.n:
                yield prefix
                return
            for u in m.above(prefix[-1]):
                yield from chains(prefix + (u,))

        for w in W:
            for ch in chains((w,)):
                if not any(sat(op, ch[j - 1], ch[k - 1]) for op, j, k in ext.disjuncts):
                    bad.append(f"{ext.name} fails on chain {' <= '.join(ch)}")
    else:
        for w in W:
            for kids in itertools.product(m.above(w), repeat=ext.n):
                pts = (w,) + kids
                if not any(sat(op, pts[j], pts[k]) for op, j, k in ext.disjuncts):
                    bad.append(f"{ext.name} fails at {w} with {', '.join(kids)}")
    return bad
