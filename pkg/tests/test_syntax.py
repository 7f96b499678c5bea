"""Scope algebra: substitution, weakening, their laws, and alpha-equality."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idtt.syntax import (
    BaseApp,
    Const,
    IdType,
    J,
    Refl,
    Telescope,
    Term,
    Var,
    alpha_equal,
    free_refs,
    max_ambient_ref,
    relocate,
    substitute,
    var_tuple,
    weaken,
)

from _nameoracle import oracle_substitute

A = BaseApp("A")
a, b, p = Const("a"), Const("b"), Const("p")


def terms(max_leaves: int = 4):
    leaf = st.one_of(
        st.integers(min_value=0, max_value=3).map(Var),
        st.sampled_from([a, b, p]),
    )
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            sub.map(Refl),
            st.tuples(sub, sub).map(lambda t: Const("p", t)),
        ),
        max_leaves=max_leaves,
    )


def j_terms(rng: random.Random, base: int) -> Term:
    """Eliminator nodes with tight bases and populated binding regions."""
    def point(limit):
        choices = [a, b] + [Var(i) for i in range(limit)]
        return rng.choice(choices)

    theta = Telescope((A,), ("t",)) if rng.random() < 0.5 else Telescope()
    k = len(theta)
    motive = IdType(A, point(base + 3), Var(base + rng.randrange(3)))
    body = Refl(point(base + 1 + k))
    args = (point(base),) * k
    return J(point(base), point(base), point(base), theta, motive, body, args, base)


@given(terms(), st.integers(min_value=0, max_value=3), terms())
def test_substitute_weaken_round_trip(t, i, v):
    assert substitute(weaken(t, i), i, v) == t


@given(terms(), st.integers(min_value=0, max_value=3))
def test_weaken_at_end_of_scope_is_stable(t, extra):
    top = max_ambient_ref(t, None) + 1
    assert weaken(t, top + extra) == t


@given(terms())
def test_alpha_is_structural(t):
    assert alpha_equal(t, t)
    assert alpha_equal(Refl(t), Refl(t))
    assert not alpha_equal(Refl(t), Const("p", (t,)))


def test_names_do_not_affect_equality():
    t1 = Telescope((A, A), ("x", "y"))
    t2 = Telescope((A, A), ("u", "v"))
    t3 = Telescope((A, BaseApp("B", (Var(0),))), ("x", "y"))
    assert alpha_equal(t1, t2)
    assert hash(t1) == hash(t2)
    assert not alpha_equal(t1, t3)


def test_substitution_examples():
    assert substitute(Var(0), 0, a) == a
    target = IdType(BaseApp("B", (Var(0),)), Const("b1", (Var(0),)), Const("b2", (Var(0),)))
    expected = IdType(BaseApp("B", (a,)), Const("b1", (a,)), Const("b2", (a,)))
    assert substitute(target, 0, a) == expected
    assert substitute(Refl(Const("f", (Var(0),))), 0, a) == Refl(Const("f", (a,)))


def test_weaken_examples():
    assert weaken(Var(0), 1) == Var(0)
    assert weaken(Var(0), 0) == Var(1)


def test_round_trip_through_eliminator_nodes(rng):
    for trial in range(200):
        base = rng.randrange(0, 3)
        t = j_terms(rng, base)
        i = rng.randrange(0, base + 1)
        v = rng.choice([a, b])
        assert substitute(weaken(t, i), i, v) == t


def test_substitution_commutation(rng):
    # substituting at i then at j equals substituting at j+1 then i, for i <= j,
    # when both values are closed.
    for trial in range(200):
        t = j_terms(rng, 3)
        i, j = sorted((rng.randrange(0, 3), rng.randrange(0, 3)))
        u, v = rng.choice([a, b]), rng.choice([a, b])
        one = substitute(substitute(t, j + 1, v), i, u)
        other = substitute(substitute(t, i, u), j, v)
        assert one == other


def test_oracle_agreement_on_eliminators(rng):
    env = ("e0", "e1", "e2")
    for trial in range(150):
        t = j_terms(rng, 3)
        i = rng.randrange(0, 3)
        v = rng.choice([a, b, Refl(a)])
        assert substitute(t, i, v) == oracle_substitute(t, env, i, v)


def test_oracle_agreement_on_plain_terms(rng):
    env = ("e0", "e1", "e2", "e3")
    for trial in range(200):
        t = rng.choice(
            [Var(rng.randrange(4)), Refl(Var(rng.randrange(4))), Const("p", (Var(0), Var(3)))]
        )
        i = rng.randrange(0, 4)
        v = rng.choice([a, Refl(b)])
        assert substitute(t, i, v) == oracle_substitute(t, env, i, v)


def test_relocate_covers_substitute_and_weaken():
    t = Const("p", (Var(0), Var(2)))
    assert relocate(t, (Var(0), a), 1) == substitute(t, 1, a)
    assert relocate(t, var_tuple(0, 1), 2) == weaken(t, 1)


def test_free_refs_skips_generic_coordinates():
    node = J(Var(1), Var(1), Var(2), Telescope(), IdType(A, Var(3), Var(4)), Refl(Var(3)), (), 3)
    assert free_refs(node) == {1, 2}
    assert max_ambient_ref(node, None) == 2


def test_substitute_above_base_leaves_node_alone():
    node = J(Var(0), Var(0), Var(1), Telescope(), IdType(A, Var(2), Var(3)), Refl(Var(2)), (), 2)
    assert substitute(node, 2, a) == node
    assert weaken(node, 3) == node
    # weakening exactly at the base re-bases the node; substitution undoes it
    assert substitute(weaken(node, 2), 2, a) == node
