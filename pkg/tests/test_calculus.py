import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestseq import calculus as C
from nestseq import formula as F
from nestseq import sequent as S
from nestseq.calculus import BD2, SYM, Extension, Params, RuleError, build, calculus
from nestseq.sequent import IN, OUT, PF, Fresh, parse_sequent
from strategies import sequents

P = F.parse


def prem(rule, text, logic="I", **kw):
    return list(build(rule, parse_sequent(text), Params(**kw), calculus(logic)).premises)


def seqs(*texts):
    return [parse_sequent(t) for t in texts]


def test_rule_sets():
    assert C.LIN not in calculus("I").rules and C.LIN in calculus("GD").rules
    assert not calculus("GD").first_order and calculus("GN").first_order
    assert calculus("ND").regime == "ND" and calculus("GC").regime == "CD"
    assert not calculus("I").allows(C.ALL_R)
    assert calculus("I", ["bd2"]).name == "I+bd2"
    with pytest.raises(ValueError):
        calculus("K")


def test_propositional_premises():
    assert prem(C.AND_L, "- ; p & q^i, r^o", formula=P("p & q"), w=0) == seqs("- ; r^o, p^i, q^i")
    assert prem(C.OR_L, "- ; p | q^i", formula=P("p | q"), w=0) == seqs("- ; p^i", "- ; q^i")
    assert prem(C.IMP_R, "- ; p -> q^o", formula=P("p -> q"), w=0, u=1) == seqs("- ; [ - ; p^i, q^o ]w1")


def test_imp_l_keeps_principal_and_targets_reachable_label():
    out = prem(C.IMP_L, "- ; p -> q^i, [ - ; r^o ]w1", formula=P("p -> q"), w=0, u=1)
    assert out == seqs("- ; p -> q^i, [ - ; r^o, p^o ]w1", "- ; p -> q^i, [ - ; r^o, q^i ]w1")
    with pytest.raises(RuleError):
        prem(C.IMP_L, "- ; [ - ; p -> q^i ]w1, [ - ; r^o ]w2", formula=P("p -> q"), w=1, u=2)


def test_id_requires_reachability():
    build(C.ID, parse_sequent("- ; p^i, [ - ; p^o ]w1"), Params(w=0, u=1, formula=P("p")), calculus("I"))
    with pytest.raises(RuleError):
        build(C.ID, parse_sequent("- ; p^o, [ - ; p^i ]w1"), Params(w=1, u=0, formula=P("p")), calculus("I"))


def test_fresh_label_and_variable_side_conditions():
    with pytest.raises(RuleError):
        prem(C.IMP_R, "- ; p -> q^o, [ - ; ]w1", formula=P("p -> q"), w=0, u=1)
    with pytest.raises(RuleError):
        prem(C.EX_L, "y ; exists x. P(x)^i", "ND", formula=P("exists x. P(x)"), w=0, var="y")
    assert prem(C.EX_L, "y ; exists x. P(x)^i", "ND", formula=P("exists x. P(x)"), w=0, var="z") == seqs("y, z ; P(z)^i")


def test_nd_availability_versus_cd():
    text = "- ; exists x. P(x)^o, [ y ; ]w1"
    with pytest.raises(RuleError):
        prem(C.EX_R1, text, "ND", formula=P("exists x. P(x)"), w=0, var="y")
    assert prem(C.EX_R1, text, "CD", formula=P("exists x. P(x)"), w=0, var="y") == seqs("- ; exists x. P(x)^o, P(y)^o, [ y ; ]w1")


def test_all_r_creates_child_with_eigenvariable():
    assert prem(C.ALL_R, "- ; forall x. P(x)^o", "ND", formula=P("forall x. P(x)"), w=0, u=1, var="y") == seqs("- ; [ y ; P(y)^o ]w1")


def test_ds_adds_atom_arguments():
    assert prem(C.DS, "- ; P(y)^i", "ND", formula=P("P(y)"), w=0) == seqs("y ; P(y)^i")


def test_lin_relocates_each_child_under_the_other():
    out = prem(C.LIN, "- ; [ - ; p^o ]w1, [ - ; q^o ]w2", "GD", w=0, u=1, v=2)
    assert out == seqs("- ; [ - ; p^o, [ - ; q^o ]w2 ]w1", "- ; [ - ; q^o, [ - ; p^o ]w1 ]w2")
    with pytest.raises(RuleError):
        prem(C.LIN, "- ; [ - ; p^o ]w1, [ - ; q^o ]w2", "I", w=0, u=1, v=2)


def test_rule_errors_on_wrong_shape_and_missing_formula():
    with pytest.raises(RuleError):
        prem(C.AND_L, "- ; p | q^i", formula=P("p | q"), w=0)
    with pytest.raises(RuleError):
        prem(C.AND_L, "- ; p & q^o", formula=P("p & q"), w=0)
    with pytest.raises(RuleError):
        prem(C.OR_R, "- ; p | q^o")


def test_cut_only_with_cut_enabled():
    s = parse_sequent("- ; q^o")
    with pytest.raises(RuleError):
        build(C.CUT, s, Params(w=0, formula=P("p")), calculus("I"))
    out = build(C.CUT, s, Params(w=0, formula=P("p")), calculus("I").with_cut())
    assert list(out.premises) == seqs("- ; q^o, p^o", "- ; q^o, p^i")


def test_bd2_merges_along_chain():
    calc = calculus("I", ["bd2"])
    s = parse_sequent("- ; [ - ; p^i, [ - ; q^o ]w2 ]w1")
    out = build("bd2", s, Params(labels=(0, 1, 2)), calc).premises
    assert out == (S.merge_into_parent(s, 1), S.merge_into_parent(s, 2))
    with pytest.raises(RuleError):
        build("bd2", s, Params(labels=(0, 2, 1)), calc)


def test_sym_merges_child_into_parent():
    s = parse_sequent("- ; p^o, [ - ; p^i ]w1")
    out = build("sym", s, Params(labels=(0, 1)), calculus("I", ["sym"])).premises
    assert out == (parse_sequent("- ; p^o, p^i"),)


def test_extension_validation():
    with pytest.raises(ValueError):
        Extension("bad", "dlc", 2, (("<=", 1, 2),))
    with pytest.raises(ValueError):
        Extension("bad", "dbc", 1, (("=", 1, 0),))
    with pytest.raises(ValueError):
        Extension("bad", "other", 1, (("<=", 1, 0),))


@pytest.mark.parametrize("ext", [BD2, SYM, C.LIN_AS_DBC])
def test_extension_dict_roundtrip(ext):
    assert Extension.from_dict(ext.to_dict()) == ext


def test_load_extension_from_json_and_toml(tmp_path):
    j = tmp_path / "e.json"
    j.write_text(json.dumps(SYM.to_dict()))
    t = tmp_path / "e.toml"
    t.write_text('[[extension]]\nname = "bd2"\nkind = "dlc"\nn = 3\ndisjuncts = ["w2<=w1", "w3<=w2"]\n')
    assert calculus("I", [str(j)]).extensions == (SYM,)
    assert calculus("I", [str(t)]).extensions == (BD2,)


def test_extension_candidates():
    s = parse_sequent("- ; [ - ; [ - ; ]w2 ]w1, [ - ; ]w3")
    assert BD2.candidates(s) == [(0, 1, 2)]
    assert sorted(SYM.candidates(s)) == [(0, 1), (0, 3), (1, 2)]


def test_is_axiomatic():
    calc = calculus("I")
    inst = C.is_axiomatic(parse_sequent("- ; p^i, [ - ; q^o, [ - ; p^o ]w2 ]w1"), calc)
    assert inst.rule == C.ID and inst.params.u == 2
    assert C.is_axiomatic(parse_sequent("- ; [ - ; bot^i ]w1"), calc).rule == C.BOT_L
    assert C.is_axiomatic(parse_sequent("- ; p^o, [ - ; p^i ]w1"), calc) is None
    assert C.is_axiomatic(parse_sequent("y ; P(y)^i, P(y)^o"), calculus("ND")).rule == C.ID_Q


@given(sequents())
def test_is_axiomatic_agrees_with_enumeration(s):
    calc = calculus("I")
    found = C.is_axiomatic(s, calc)
    some = [i for r in (C.ID, C.BOT_L) for i in C.applicable_instances(s, r, calc)]
    assert (found is None) == (not some)
    if found is not None:
        assert build(found.rule, s, found.params, calc).premises == ()


@given(sequents(), st.sampled_from(sorted(C.PROPOSITIONAL - C.INITIAL)))
def test_applicable_instances_rebuild(s, rule):
    calc = calculus("I")
    for inst in C.applicable_instances(s, rule, calc, Fresh.above(s)):
        assert build(rule, s, inst.params, calc) == inst
