import json
from dataclasses import replace

from hypothesis import given
from hypothesis import strategies as st

from nestseq import calculus as C
from nestseq import derivation as D
from nestseq import formula as F
from nestseq import sequent as S
from nestseq.calculus import Params, calculus
from nestseq.derivation import Derivation, check, derive_general_id, make
from nestseq.prover import prove
from nestseq.sequent import parse_sequent
from strategies import fo_formulas, prop_formulas, sequents

I = calculus("I")


def small_proof():
    s = parse_sequent("- ; p & q -> q^o")
    s1 = parse_sequent("- ; [ - ; p & q^i, q^o ]w1")
    s2 = parse_sequent("- ; [ - ; p^i, q^i, q^o ]w1")
    leaf = make(C.ID, s2, I, w=1, u=1, formula=F.parse("q"))
    mid = make(C.AND_L, s1, I, [leaf], w=1, formula=F.parse("p & q"))
    return make(C.IMP_R, s, I, [mid], w=0, u=1, formula=F.parse("p & q -> q"))


def test_small_proof_checks():
    d = small_proof()
    assert check(d, I) == []
    assert D.height(d) == 3 and len(d) == 3
    assert d.rules_used() == {C.ID, C.AND_L, C.IMP_R}


def test_check_reports_premise_mismatch():
    d = small_proof()
    bad_leaf = D.Derivation(C.build(C.ID, parse_sequent("- ; [ - ; q^i, q^o ]w1"), d.children[0].children[0].params, I))
    bad = Derivation(d.inst, (Derivation(d.children[0].inst, (bad_leaf,)),))
    vs = check(bad, I)
    assert len(vs) == 1 and vs[0].path == (0,)


def test_check_reports_non_initial_leaf_and_bad_params():
    d = small_proof()
    assert any("non-initial" in str(v) for v in check(Derivation(d.inst), I))
    wrong = replace(d.inst, params=replace(d.params, formula=F.parse("p -> q")))
    assert check(Derivation(wrong, d.children), I)


def test_check_rejects_rules_outside_the_calculus():
    d = prove(F.parse("(p -> q) | (q -> p)"), calculus("GD")).derivation
    assert check(d, calculus("GD")) == []
    assert any("lin" in str(v) for v in check(d, I))


def test_check_never_raises_on_garbage():
    inst = C.RuleInstance("no_such_rule", S.Node(), (), Params())
    assert check(Derivation(inst), I)


def test_json_roundtrip():
    d = prove(F.parse("(p -> q -> r) -> (p -> q) -> p -> r"), I).derivation
    back = D.from_json(json.loads(json.dumps(D.to_json(d))))
    assert back == d and check(back, I) == []


def test_render_lists_every_inference():
    d = small_proof()
    lines = D.render(d).splitlines()
    assert len(lines) == 3 and lines[0].startswith("imp_r") and lines[2].startswith("    id")


@st.composite
def gid_cases(draw, fo=False):
    s = draw(sequents(variables=("y",) if fo else ()))
    pairs = sorted(S.reach_pairs(s))
    w, u = draw(st.sampled_from(pairs))
    phi = draw(fo_formulas(free=("y",)) if fo else prop_formulas(atoms=("p", "q", "r")))
    if fo:
        s = S.update_at(s, S.ROOT, lambda n: n.add(sig=["y"]) if "y" not in n.sig else n)
    return s, phi, w, u


@given(gid_cases())
def test_general_identity_propositional(case):
    s, phi, w, u = case
    for logic in C.LOGICS:
        d = derive_general_id(s, phi, w, u, calculus(logic))
        assert check(d, calculus(logic)) == []
        assert d.conclusion.find(w).count(S.PF(phi, S.IN)) == s.find(w).count(S.PF(phi, S.IN)) + 1


@given(gid_cases(fo=True))
def test_general_identity_first_order(case):
    s, phi, w, u = case
    for logic in ("ND", "CD", "GN", "GC"):
        d = derive_general_id(s, phi, w, u, calculus(logic))
        assert check(d, calculus(logic)) == []
