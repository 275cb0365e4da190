from hypothesis import strategies as st

from nestseq import formula as F


def prop_formulas(atoms=("p", "q"), max_leaves=6):
    leaves = st.sampled_from([F.Atom(a) for a in atoms] + [F.BOT])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(F.And, sub, sub),
            st.builds(F.Or, sub, sub),
            st.builds(F.Imp, sub, sub),
        ),
        max_leaves=max_leaves,
    )


def fo_formulas(max_leaves=5, free=("y",)):
    """Formulas over p, q and a unary P; bound variables come from x0..x2."""

    def build(depth, scope):
        leaves = [F.Atom("p"), F.Atom("q"), F.BOT] + [F.Atom("P", (v,)) for v in scope + free]
        if depth == 0:
            return st.sampled_from(leaves)
        sub = build(depth - 1, scope)
        x = f"x{len(scope)}"
        inner = build(depth - 1, scope + (x,))
        return st.one_of(
            st.sampled_from(leaves),
            st.builds(F.And, sub, sub),
            st.builds(F.Or, sub, sub),
            st.builds(F.Imp, sub, sub),
            st.builds(lambda b: F.Forall(x, b), inner),
            st.builds(lambda b: F.Exists(x, b), inner),
        )

    return build(3, ())


@st.composite
def sequents(draw, formulas=None, max_nodes=4, variables=()):
    """Random nested sequents with labels 0..n-1 attached to earlier labels."""
    from nestseq.sequent import IN, OUT, PF, Node

    formulas = prop_formulas(max_leaves=4) if formulas is None else formulas
    n = draw(st.integers(1, max_nodes))
    parent = [None] + [draw(st.integers(0, i - 1)) for i in range(1, n)]
    forms = [draw(st.lists(st.tuples(formulas, st.sampled_from([IN, OUT])), max_size=3)) for _ in range(n)]
    sigs = [draw(st.lists(st.sampled_from(variables), max_size=2)) if variables else [] for _ in range(n)]

    def build(i):
        kids = tuple(build(j) for j in range(n) if parent[j] == i)
        return Node(i, tuple(sigs[i]), tuple(PF(f, p) for f, p in forms[i]), kids)

    return build(0)
