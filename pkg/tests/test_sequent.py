import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestseq import formula as F
from nestseq import sequent as S
from nestseq.formula import ParseError
from nestseq.sequent import IN, OUT, PF, Fresh, Node, parse_sequent
from strategies import fo_formulas, sequents

EXAMPLE = "x ; p^i, q -> r^o, [ y ; P(x)^i, [ - ; P(y)^o ]w2 ]w1, [ - ; bot^o ]w3"


def test_parse_example():
    s = parse_sequent(EXAMPLE)
    assert s.labels() == [0, 1, 2, 3]
    assert s.sig == ("x",)
    assert s.find(1).inputs == [F.parse("P(x)")]
    assert S.parents(s) == {1: 0, 2: 1, 3: 0}


def test_empty_root():
    assert parse_sequent("- ;") == Node()


@pytest.mark.parametrize(
    "bad",
    ["p^i", "- ; p", "- ; p^x", "- ; [ - ; p^o ]w0", "- ; [ - ; p^o ]", "- ; [ - ; p^o ]w1, [ - ; q^o ]w1", "- ; [ - ; p^o"],
)
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_sequent(bad)


@given(sequents())
def test_render_parse_roundtrip(s):
    assert parse_sequent(S.render(s)) == s


@given(sequents(formulas=fo_formulas(), variables=("y", "z")))
def test_json_roundtrip(s):
    assert S.from_json(json.loads(S.dumps(s))) == s


@given(sequents())
def test_equality_ignores_order(s):
    shuffled = s.map_nodes(lambda n: Node(n.label, n.sig[::-1], n.forms[::-1], n.children[::-1]))
    assert shuffled == s and hash(shuffled) == hash(s)


def test_multiset_counts_copies():
    s = parse_sequent("- ; p^i, p^i, p^o")
    assert s.count(PF(F.parse("p"), IN)) == 2
    assert s.remove(PF(F.parse("p"), IN)).count(PF(F.parse("p"), IN)) == 1
    with pytest.raises(KeyError):
        s.remove(PF(F.parse("q"), IN))


def test_alpha_equivalent_formulas_are_the_same_occurrence():
    a = parse_sequent("- ; forall x. P(x)^i")
    b = parse_sequent("- ; forall y. P(y)^i")
    assert a == b


def test_reachability():
    s = parse_sequent(EXAMPLE)
    assert S.reachable(s, 0, 2) and S.reachable(s, 1, 1)
    assert not S.reachable(s, 2, 1) and not S.reachable(s, 1, 3)
    assert S.strictly_reachable(s, 0, 1) and not S.strictly_reachable(s, 1, 1)
    assert S.ancestors_or_self(s, 2) == [0, 1, 2]


def test_availability():
    s = parse_sequent(EXAMPLE)
    assert S.available(s, "x", 2) and S.available(s, "y", 2)
    assert not S.available(s, "y", 3)
    assert S.available_vars(s, 2) == ["x", "y"]


@given(sequents())
def test_reach_pairs_form_a_preorder(s):
    r = S.reach_pairs(s)
    labels = s.labels()
    assert all((w, w) in r for w in labels)
    assert all((a, c) in r for a, b in r for b2, c in r if b == b2)
    assert all(S.reachable(s, a, b) for a, b in r)


def test_merge_into_parent():
    s = parse_sequent(EXAMPLE)
    m = S.merge_into_parent(s, 1)
    assert m.labels() == [0, 2, 3]
    assert m.sig == ("x", "y")
    assert F.parse("P(x)") in m.inputs
    with pytest.raises(ValueError):
        S.merge_into_parent(s, 0)


def test_merge_siblings_and_detach():
    s = parse_sequent("- ; [ x ; p^i ]w1, [ y ; q^o, [ - ; r^o ]w3 ]w2")
    m = S.merge_siblings(s, 1, 2)
    assert m == parse_sequent("- ; [ x, y ; p^i, q^o, [ - ; r^o ]w3 ]w1")
    rest, sub = S.detach(s, 2)
    assert rest == parse_sequent("- ; [ x ; p^i ]w1") and sub.label == 2
    assert S.attach(rest, 0, sub) == s


@given(sequents())
def test_size_counts_nodes_formulas_and_variables(s):
    assert s.size() == sum(1 + len(n.forms) + len(n.sig) for n in s.nodes())


def test_fresh_supply_is_above_names():
    s = parse_sequent("x__4 ; P(x__4)^o, [ - ; q^o ]w7")
    fr = Fresh.above(s)
    assert fr.label() == 8 and fr.label() == 9
    v = fr.var("x")
    assert v == "x__5" and fr.var("x") == "x__6"


@given(st.lists(st.text(alphabet="xyz_0123456789", min_size=1, max_size=6), max_size=5))
def test_fresh_var_never_clashes(names):
    fr = Fresh.above(set(names))
    assert fr.var("x") not in names


def test_interpret_propositional():
    s = parse_sequent("- ; p^i, q^o, [ - ; r^i, bot^o ]w1")
    assert S.interpret_propositional(s) == F.parse("p -> q | (r -> bot)")


def test_sequent_of_formula_collects_free_vars():
    s = S.sequent_of_formula(F.parse("P(y) & exists x. R(x, z)"))
    assert s.sig == ("y", "z") and s.forms == (PF(F.parse("P(y) & exists x. R(x, z)"), OUT),)
