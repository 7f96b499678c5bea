"""Judgment checking, normalization, definitional equality, morphisms."""

import pytest

from idtt.errors import IllScopedVariable, NonTermination, TypeMismatch, UnknownSymbol
from idtt.kernel import (
    check_element,
    check_morphism,
    check_telescope,
    check_term,
    check_type,
    compose_mor,
    def_eq,
    identity_mor,
    infer,
    mor_equal,
    normalize,
    tele_equal,
    validate_signature,
)
from idtt.syntax import (
    BaseApp,
    Const,
    ContextMorphism,
    IdType,
    J,
    Refl,
    Signature,
    Telescope,
    Var,
    substitute,
    weaken,
)

from conftest import A, a, b, c, p, q, telescope_with_elements

EMPTY = Telescope()
ONE = Telescope((A,), ("x",))


def test_signatures_validate(sigma0, sigma1):
    validate_signature(sigma0)
    validate_signature(sigma1)


def test_duplicate_declaration_rejected(sigma0):
    with pytest.raises(UnknownSymbol):
        validate_signature(sigma0.with_const("a", A))


def test_telescope_wf(sigma0):
    tele = Telescope((A, A, IdType(A, Var(0), Var(1))), ("x", "y", "u"))
    deriv = check_telescope(sigma0, EMPTY, tele)
    assert "id-form" in deriv.rules_used()


def test_telescope_ill_scoped(sigma0):
    bad = Telescope((IdType(A, Var(0), Var(1)),), ("u",))
    with pytest.raises(IllScopedVariable):
        check_telescope(sigma0, EMPTY, bad)


def test_dependent_telescope_derivation_shape(sigma1):
    tele = Telescope((A, BaseApp("B", (Var(0),))), ("x", "z"))
    deriv = check_telescope(sigma1, EMPTY, tele)
    # the second entry checks its argument with the variable axiom
    assert deriv.rule == "tele"
    assert len(deriv.premises) == 2
    second = deriv.premises[1]
    assert second.rule == "base-form"
    assert second.premises[0].rule == "axiom-var"


def test_refl_intro(sigma0):
    deriv = check_term(sigma0, ONE, Refl(Var(0)), IdType(A, Var(0), Var(0)))
    assert "id-intro" in deriv.rules_used()


def test_refl_wrong_endpoints(sigma0):
    two = Telescope((A, A), ("x", "y"))
    with pytest.raises(TypeMismatch):
        check_term(sigma0, two, Refl(Var(0)), IdType(A, Var(0), Var(1)))


def test_unknown_symbol(sigma0):
    with pytest.raises(UnknownSymbol):
        infer(sigma0, EMPTY, Const("nope"))
    with pytest.raises(UnknownSymbol):
        check_type(sigma0, EMPTY, BaseApp("Nope"))


def test_elimination_checks_and_computes(sigma0):
    inv = J(a, b, p, Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 0)
    assert infer(sigma0, EMPTY, inv) == IdType(A, b, a)
    onrefl = J(a, a, Refl(a), Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 0)
    assert normalize(sigma0, EMPTY, onrefl) == Refl(a)
    assert def_eq(sigma0, EMPTY, onrefl, Refl(a)).ok


def test_elimination_stuck_on_constant_path(sigma0):
    node = J(a, b, p, Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 0)
    assert normalize(sigma0, EMPTY, node) == node


def test_mismatched_annotation_rejected(sigma0):
    bad = J(a, c, p, Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 0)
    with pytest.raises(TypeMismatch):
        infer(sigma0, EMPTY, bad)


def test_nested_elimination_reduces_to_innermost_body(sigma0):
    inner = J(a, a, Refl(a), Telescope(), IdType(A, Var(0), Var(0)), Refl(Var(0)), (), 0)
    outer = J(a, a, inner, Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 0)
    # inner normalizes to refl, so the outer one fires as well
    assert normalize(sigma0, EMPTY, outer) == Refl(a)


def test_def_eq_reports_divergence(sigma0):
    r = def_eq(sigma0, EMPTY, p, Refl(a))
    assert not r.ok
    assert "Const" in r.trace or "Refl" in r.trace


def test_step_budget_guards(sigma0):
    import idtt.kernel as k

    k._norm_term_memo.clear()  # the cache never spends budget
    inner = J(a, a, Refl(a), Telescope(), IdType(A, Var(0), Var(0)), Refl(Var(0)), (), 0)
    with pytest.raises(NonTermination):
        normalize(sigma0, EMPTY, inner, max_steps=0)


def test_normalize_idempotent_on_corpus(sigma1, rng):
    for _ in range(60):
        tele, left, right, path = telescope_with_elements(rng)
        for t in left + right + path:
            once = normalize(sigma1, EMPTY, t)
            assert normalize(sigma1, EMPTY, once) == once


def test_morphism_category_laws(sigma0, rng):
    f = ContextMorphism(ONE, ONE, (b,))
    g = ContextMorphism(ONE, ONE, (Var(0),))
    check_morphism(sigma0, f)
    check_morphism(sigma0, g)
    assert mor_equal(sigma0, compose_mor(sigma0, identity_mor(ONE), f), f)
    assert mor_equal(sigma0, compose_mor(sigma0, f, identity_mor(ONE)), f)
    lhs = compose_mor(sigma0, compose_mor(sigma0, f, g), g)
    rhs = compose_mor(sigma0, f, compose_mor(sigma0, g, g))
    assert mor_equal(sigma0, lhs, rhs)


def test_mor_equal_ignores_names(sigma0):
    f = ContextMorphism(Telescope((A,), ("x",)), Telescope((A,), ("y",)), (Var(0),))
    g = ContextMorphism(Telescope((A,), ("s",)), Telescope((A,), ("t",)), (Var(0),))
    assert mor_equal(sigma0, f, g)


def test_tele_equal_up_to_defeq(sigma0):
    collapsed = J(a, a, Refl(a), Telescope(), A, b, (), 0)
    t1 = Telescope((A, IdType(A, collapsed, Var(0))), ("x", "u"))
    t2 = Telescope((A, IdType(A, b, Var(0))), ("x", "u"))
    assert t1 != t2
    assert tele_equal(sigma0, EMPTY, t1, t2)


def test_subject_reduction_on_corpus(sigma1, rng):
    from idtt.idcontexts import id_telescope

    for _ in range(40):
        tele, left, right, path = telescope_with_elements(rng)
        ident = id_telescope(sigma1, EMPTY, tele, left, right).telescope
        check_element(sigma1, EMPTY, path, ident)
        reduced = tuple(normalize(sigma1, EMPTY, t) for t in path)
        check_element(sigma1, EMPTY, reduced, ident)


def test_def_eq_congruence_under_substitution(sigma0, rng):
    # two def-equal open terms stay def-equal after substituting the free slot
    open_term = J(Var(0), Var(0), Refl(Var(0)), Telescope(), IdType(A, Var(1), Var(0)), Refl(Var(0)), (), 1)
    assert def_eq(sigma0, ONE, open_term, Refl(Var(0))).ok
    for value in (a, b, c):
        closed = substitute(open_term, 0, value)
        assert def_eq(sigma0, EMPTY, closed, Refl(value)).ok
    lifted = weaken(open_term, 0)
    assert def_eq(sigma0, Telescope((A, A), ("w", "x")), lifted, Refl(Var(1))).ok


def test_commutation_axioms_are_structural(sigma1):
    # substitution pushes through the identity former and reflexivity
    fam = IdType(BaseApp("B", (Var(0),)), Const("hb"), Const("hb"))
    assert substitute(fam, 0, b) == IdType(BaseApp("B", (b,)), Const("hb"), Const("hb"))
    assert substitute(Refl(Var(0)), 0, a) == Refl(a)
    node = J(Var(0), Var(0), Refl(Var(0)), Telescope(), IdType(A, Var(1), Var(2)), Refl(Var(1)), (), 1)
    pushed = substitute(node, 0, a)
    assert pushed.left == a and pushed.path == Refl(a) and pushed.base == 0
