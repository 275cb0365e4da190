import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestseq import calculus as C
from nestseq import formula as F
from nestseq.calculus import calculus
from nestseq.derivation import Derivation, check, make
from nestseq.generate import cut_goals, with_cuts
from nestseq.prover import prove
from nestseq.sequent import IN, OUT, PF, parse_sequent
from nestseq.transform import TransformError, eliminate_cut, has_cut

P = F.parse
I, ND = calculus("I"), calculus("ND")


def proved(s, calc):
    r = prove(s, calc)
    assert r.status == "proved"
    return r.derivation


def cut_on(s, f, w, calc):
    cc = calc.with_cut()
    inst = C.build(C.CUT, s, C.Params(w=w, formula=f), cc)
    kids = [proved(p, calc) for p in inst.premises]
    d = Derivation(inst, tuple(kids))
    assert check(d, cc) == []
    return d


def test_cut_free_input_is_unchanged():
    d = proved(P("p -> p"), I)
    assert not has_cut(d)
    assert eliminate_cut(d, I) == d


def test_atomic_cut_between_identities_composes_reachability():
    s = parse_sequent("y ; P(y)^i, [ - ; P(y)^o ]w1")
    d = cut_on(s, P("P(y)"), 0, ND)
    assert [k.rule for k in d.children] == [C.ID_Q, C.ID_Q]
    out = eliminate_cut(d, ND)
    assert out.rule == C.ID_Q and not out.children
    assert out.conclusion == s and check(out, ND) == []


def test_principal_disjunction_cut():
    s = parse_sequent("- ; p | q^i, q | p^o")
    d = cut_on(s, P("p | q"), 0, I)
    out = eliminate_cut(d, I)
    assert not has_cut(out) and out.conclusion == s and check(out, I) == []


@pytest.mark.parametrize("f", ["p & q", "p -> q", "(p -> q) -> p"])
def test_principal_cuts(f):
    s = parse_sequent("- ; p^i, q^i, p & q | r^o")
    d = cut_on(s, P(f), 0, I)
    out = eliminate_cut(d, I)
    assert not has_cut(out) and out.conclusion == s and check(out, I) == []


def test_quantifier_cuts():
    s = parse_sequent("y ; forall x. P(x)^i, exists x. P(x)^o")
    for f in ("forall x. P(x)", "exists x. P(x)", "P(y)"):
        d = cut_on(s, P(f), 0, ND)
        out = eliminate_cut(d, ND)
        assert not has_cut(out) and out.conclusion == s and check(out, ND) == []


def test_gd_family_is_unsupported():
    d = proved(P("p -> p"), calculus("GD"))
    with pytest.raises(TransformError):
        eliminate_cut(d, calculus("GD"))


@settings(max_examples=12)
@given(st.integers(0, 10_000), st.sampled_from(["I", "ND", "CD"]), st.integers(1, 3))
def test_eliminates_constructed_cuts(seed, logic, n_cuts):
    calc = calculus(logic)
    rng = random.Random(seed)
    s = rng.choice(cut_goals(calc))
    if calc.first_order:
        s = s.with_(sig=("z",)) if not s.sig else s
    d = with_cuts(rng, s, calc, n_cuts)
    if d is None:
        return
    assert d.count(C.CUT) == n_cuts and check(d, calc.with_cut()) == []
    out = eliminate_cut(d, calc)
    assert not has_cut(out) and out.conclusion == d.conclusion and check(out, calc) == []
