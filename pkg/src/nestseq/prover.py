"""Round-based proof search.

Each round runs a fixed schedule of rule applications on every open branch:
closure, ds, the propositional rules, the implication and quantifier rules,
then (for the GD family) lin until the branch top is linear and finally
any extension rules.  Rules that keep their principal formula are blocked
per branch once applied to a given occurrence and target, so a round that
changes nothing means the branch is saturated and a countermodel can be
read off its top.

Reachability rules are also skipped where their premise is already
satisfied (an implication whose antecedent already fails or whose
consequent already holds at the target).  Two further additions keep
propositional search finite: a branch is closed as
soon as its top is axiomatic (not only at the start of a round), and an
output implication or universal is left alone when the branch history
already contains a witness for its falsity in a reachable component.

Closed searches are pruned before they are returned: an imp_l, ex_r1 or
all_l1 step whose new formula is never used above it is dropped.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field

from . import calculus as C
from . import formula as F
from . import sequent as S
from .calculus import Calculus, Params, RuleInstance
from .derivation import Derivation
from .formula import Formula
from .semantics import KripkeModel, extract_countermodel
from .sequent import IN, OUT, PF, Fresh, Node

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass
class Budget:
    max_rounds: int = 200
    max_size: int = 100_000
    max_branches: int = 20_000


class _Open:
    """A node of the derivation under construction."""

    __slots__ = ("seq", "inst", "kids")

    def __init__(self, seq: Node):
        self.seq = seq
        self.inst: RuleInstance | None = None
        self.kids: list[_Open] = []


@dataclass(eq=False)
class Branch:
    top: Node
    leaf: _Open
    blocked: set = field(default_factory=set)
    seen: set = field(default_factory=set)
    hist: tuple | None = None
    round_start: Node | None = None
    applied: int = 0

    def fork(self) -> "Branch":
        return Branch(self.top, self.leaf, set(self.blocked), set(self.seen), self.hist, self.round_start, self.applied)

    def advance(self, seq: Node, leaf: _Open):
        self.hist = (self.top, self.hist)
        self.top = seq
        self.leaf = leaf
        self.seen |= _pairs(seq)
        self.applied += 1

    def history(self) -> list[Node]:
        """Every top this branch went through, oldest first, ending with the current one."""
        out = [self.top]
        h = self.hist
        while h is not None:
            out.append(h[0])
            h = h[1]
        return out[::-1]


def _pairs(s: Node) -> set:
    return {(n.label, p.key) for n in s.nodes() for p in n.forms}


@dataclass
class SearchState:
    calc: Calculus
    goal: Node
    start: Node
    start_var: str | None
    fresh: Fresh
    budget: Budget
    root: _Open
    open: list[Branch]
    rounds: int = 0
    closed: int = 0
    self_copies: int = 0
    failure: str | None = None
    saturated_branch: Branch | None = None


@dataclass
class Proved:
    derivation: Derivation
    rounds: int
    extension: bool = False
    status: str = "proved"


@dataclass
class Refuted:
    model: KripkeModel
    iota: dict[int, str]
    mu: dict[str, str]
    branch: Branch
    rounds: int
    extension: bool = False
    status: str = "refuted"


@dataclass
class Unknown:
    reason: str  # "budget" or "sequent-size"
    rounds: int
    extension: bool = False
    status: str = "unknown"


ProveResult = Proved | Refuted | Unknown


class BudgetExceeded(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ------------------------------------------------------------------ setup


def initial_state(goal: Formula | Node, calc: Calculus, budget: Budget | None = None) -> SearchState:
    budget = budget or Budget()
    seq = S.sequent_of_formula(goal) if not isinstance(goal, Node) else goal
    if not calc.first_order:
        for n in seq.nodes():
            if n.sig or any(not F.is_propositional(f) for f in n.inputs + n.outputs):
                raise ValueError(f"{calc.logic} is propositional; goal has first-order content")
    fresh = Fresh.above(seq)
    start_var = None
    start = seq
    if calc.first_order:
        start_var = fresh.var("z")
        start = S.update_at(seq, S.ROOT, lambda n: n.add(sig=[start_var]))
    root = _Open(start)
    br = Branch(start, root, seen=_pairs(start))
    return SearchState(calc, seq, start, start_var, fresh, budget, root, [br])


# ------------------------------------------------------------ rule choice


def _descendants(s: Node, w: int) -> list[int]:
    return s.find(w).labels()


def _witnessed_imp(br: Branch, w: int, f: F.Imp) -> bool:
    a_key = PF(f.left, IN).key
    b_key = PF(f.right, OUT).key
    s = br.top
    for u in _descendants(s, w):
        if (u, b_key) in br.seen and any((a, a_key) in br.seen for a in S.ancestors_or_self(s, u)):
            return True
    return False


def _witnessed_all(br: Branch, w: int, f: F.Forall, calc: Calculus, extra) -> bool:
    s = br.top
    for u in _descendants(s, w):
        for y in C.candidate_vars(s, u, calc, extra):
            if (u, PF(F.substitute(f.body, y, f.var), OUT).key) in br.seen:
                return True
    return False


def _holds_in(s: Node, u: int, f: Formula) -> bool:
    """f is an input at u or at one of its ancestors."""
    key = PF(f, IN).key
    return any(any(p.key == key for p in s.find(a).forms) for a in S.ancestors_or_self(s, u))


def _fails_at(s: Node, u: int, f: Formula) -> bool:
    key = PF(f, OUT).key
    return any(p.key == key for p in s.find(u).forms)


def _distinct(n: Node, pol, cls):
    seen = set()
    for pf in n.forms:
        if pf.pol is pol and isinstance(pf.formula, cls) and pf.key not in seen:
            seen.add(pf.key)
            yield pf.formula


def _pick(st: SearchState, br: Branch, rule: str):
    """First unblocked (params, blocking key) for rule on br.top, or None."""
    s, calc = br.top, st.calc
    extra = (st.start_var,) if st.start_var else ()
    if rule == C.LIN:
        for n in s.nodes():
            if len(n.children) >= 2:
                return Params(w=n.label, u=n.children[0].label, v=n.children[1].label), None
        return None
    ext = calc.extension(rule)
    if ext is not None:
        for labels in ext.candidates(s):
            key = (rule, labels)
            if key not in br.blocked:
                return Params(labels=labels), key
        return None
    for n in s.nodes():
        w = n.label
        if rule == C.DS:
            for a in _distinct(n, IN, F.Atom):
                if a.args and not set(a.args) <= set(n.sig):
                    return Params(w=w, formula=a), None
        elif rule in (C.OR_L, C.AND_L):
            for f in _distinct(n, IN, F.Or if rule == C.OR_L else F.And):
                return Params(w=w, formula=f), None
        elif rule in (C.OR_R, C.AND_R):
            for f in _distinct(n, OUT, F.Or if rule == C.OR_R else F.And):
                return Params(w=w, formula=f), None
        elif rule == C.IMP_L:
            for f in _distinct(n, IN, F.Imp):
                fk = F.alpha_key(f)
                for u in _descendants(s, w):
                    key = (rule, w, fk, u)
                    if key in br.blocked:
                        continue
                    if _fails_at(s, u, f.left) or _holds_in(s, u, f.right):
                        continue
                    return Params(w=w, formula=f, u=u), key
        elif rule == C.IMP_R:
            for f in _distinct(n, OUT, F.Imp):
                key = ("witness", w, F.alpha_key(f))
                if key in br.blocked:
                    continue
                if _witnessed_imp(br, w, f):
                    br.blocked.add(key)
                    continue
                return Params(w=w, formula=f, u=st.fresh.label()), None
        elif rule == C.EX_L:
            for f in _distinct(n, IN, F.Exists):
                return Params(w=w, formula=f, var=st.fresh.var(f.var)), None
        elif rule == C.EX_R1:
            for f in _distinct(n, OUT, F.Exists):
                fk = F.alpha_key(f)
                for y in C.candidate_vars(s, w, calc, extra):
                    key = (rule, w, fk, y)
                    if key in br.blocked:
                        continue
                    if _fails_at(s, w, F.substitute(f.body, y, f.var)):
                        continue
                    return Params(w=w, formula=f, var=y), key
        elif rule == C.ALL_L1:
            for f in _distinct(n, IN, F.Forall):
                fk = F.alpha_key(f)
                for u in _descendants(s, w):
                    for y in C.candidate_vars(s, u, calc, extra):
                        key = (rule, w, fk, u, y)
                        if key in br.blocked:
                            continue
                        if _holds_in(s, u, F.substitute(f.body, y, f.var)):
                            continue
                        return Params(w=w, formula=f, u=u, var=y), key
        elif rule == C.ALL_R:
            for f in _distinct(n, OUT, F.Forall):
                key = ("witness", w, F.alpha_key(f))
                if key in br.blocked:
                    continue
                if _witnessed_all(br, w, f, calc, extra):
                    br.blocked.add(key)
                    continue
                return Params(w=w, formula=f, u=st.fresh.label(), var=st.fresh.var(f.var)), None
    return None


def schedule(calc: Calculus) -> list[str]:
    steps = [C.DS, C.OR_L, C.OR_R, C.AND_L, C.AND_R, C.IMP_L, C.IMP_R]
    if calc.first_order:
        steps += [C.EX_L, C.EX_R1, C.ALL_L1, C.ALL_R]
    else:
        steps.remove(C.DS)
    if calc.gd_family:
        steps.append(C.LIN)
    steps += [e.name for e in calc.extensions]
    return steps


# ---------------------------------------------------------------- search


def _try_close(st: SearchState, br: Branch) -> bool:
    inst = C.is_axiomatic(br.top, st.calc)
    if inst is None:
        return False
    br.leaf.inst = inst
    st.closed += 1
    return True


def _apply(st: SearchState, br: Branch, inst: RuleInstance) -> list[Branch]:
    br.leaf.inst = inst
    kids = [_Open(p) for p in inst.premises]
    br.leaf.kids = kids
    branches = [br.fork() for _ in kids[1:]] + [br]
    for nb, prem, kid in zip(branches, inst.premises, kids):
        nb.advance(prem, kid)
        if prem.size() > st.budget.max_size:
            raise BudgetExceeded("sequent-size")
    return branches


def _run_step(st: SearchState, branches: list[Branch], rule: str) -> list[Branch]:
    out = []
    work = deque(branches)
    while work:
        br = work.popleft()
        picked = _pick(st, br, rule)
        if picked is None:
            out.append(br)
            continue
        params, key = picked
        if key is not None:
            br.blocked.add(key)
        inst = C.build(rule, br.top, params, st.calc)
        for nb in reversed(_apply(st, br, inst)):
            if not _try_close(st, nb):
                work.appendleft(nb)
        if len(work) + len(out) > st.budget.max_branches:
            raise BudgetExceeded("budget")
    return out


def run_round(st: SearchState) -> None:
    """One full round over every open branch."""
    st.rounds += 1
    survivors = []
    for br in st.open:
        br.round_start = br.top
        if _try_close(st, br):
            continue
        st.self_copies += 1  # the round's closure step leaves an open top unchanged
        group = [br]
        for rule in schedule(st.calc):
            group = _run_step(st, group, rule)
            if not group:
                break
        survivors.extend(group)
    st.open = survivors
    for br in st.open:
        if saturated(br):
            st.saturated_branch = br
            break


def saturated(br: Branch) -> bool:
    """The last full round left the branch top unchanged."""
    return br.round_start is not None and br.top == br.round_start


def _to_derivation(node: _Open) -> Derivation:
    # iterative post-order to cope with tall proofs
    done: dict[int, Derivation] = {}
    stack = [(node, False)]
    while stack:
        n, ready = stack.pop()
        if ready:
            done[id(n)] = Derivation(n.inst, tuple(done[id(k)] for k in n.kids))
        else:
            stack.append((n, True))
            stack.extend((k, False) for k in n.kids)
    return done[id(node)]


def prove(goal: Formula | Node, calc: Calculus, budget: Budget | None = None) -> ProveResult:
    st = initial_state(goal, calc, budget)
    return search(st)


def search(st: SearchState) -> ProveResult:
    ext = st.calc.extended
    try:
        if all(_try_close(st, br) for br in st.open):
            st.open = []
        while st.open:
            if st.rounds >= st.budget.max_rounds:
                return Unknown("budget", st.rounds, ext)
            run_round(st)
            if st.saturated_branch is not None:
                br = st.saturated_branch
                m, iota, mu = extract_countermodel(br.top, st.calc.logic, st.start_var)
                return Refuted(m, iota, mu, br, st.rounds, ext)
    except BudgetExceeded as e:
        return Unknown(e.reason, st.rounds, ext)
    from .transform import fresh_delete, prune

    d = prune(_to_derivation(st.root), st.calc)
    if st.start_var is not None:
        d = fresh_delete(d, st.start_var, st.calc)
    return Proved(d, st.rounds, ext)
