"""Identity contexts, transport, and the derived telescopic eliminator."""

import pytest

from idtt.idcontexts import (
    generic_context,
    id_telescope,
    j_tele,
    refl_tele,
    transport,
)
from idtt.kernel import check_element, check_telescope, def_eq, infer, normalize
from idtt.syntax import (
    BaseApp,
    Const,
    IdType,
    J,
    Refl,
    Telescope,
    Var,
    relocate,
    shift_tail,
    substitute,
    var_tuple,
)

from conftest import A, a, b, c, p, q, telescope_with_elements

EMPTY = Telescope()
ONE = Telescope((A,), ("x",))


def test_length_one_shape(sigma0):
    tid = id_telescope(sigma0, EMPTY, ONE, (a,), (b,))
    assert tid.telescope.entries == (IdType(A, a, b),)


def test_length_two_shape_transports_the_left_endpoint(sigma1):
    phi = Telescope((A, BaseApp("B", (Var(0),))), ("x", "z"))
    tid = id_telescope(sigma1, EMPTY, phi, (a, Const("ha")), (b, Const("hb")))
    first, second = tid.telescope.entries
    assert first == IdType(A, a, b)
    assert isinstance(second, IdType)
    assert second.base == BaseApp("B", (b,))
    moved = second.left
    assert isinstance(moved, J)
    assert moved.path == Var(0) and moved.args == (Const("ha"),)
    assert second.right == Const("hb")
    check_telescope(sigma1, EMPTY, tid.telescope)


def _hand_rolled_id(sig, phi, left, right, prefix_len):
    """Independent recursive expansion of the identity context, unrolled
    without going through the production recursion for the outer layer."""
    n = len(phi)
    if n == 1:
        return Telescope((IdType(phi[0], left[0], right[0]),))
    head = _hand_rolled_id(sig, phi.prefix(n - 1), left[: n - 1], right[: n - 1], prefix_len)
    moved = transport(
        sig,
        n - 1,
        shift_tail(phi.prefix(n - 1), 0, n - 1),
        left[: n - 1],
        right[: n - 1],
        var_tuple(0, n - 1),
        Telescope((relocate(phi[n - 1], var_tuple(n - 1, n - 1), 2 * (n - 1)),), ("z",)),
        (left[n - 1],),
    )[0]
    under = relocate(phi[n - 1], tuple(right[: n - 1]), 0)
    return head.extend(IdType(under, moved, right[n - 1]))


def test_length_three_matches_structural_recursion(sigma1):
    phi = Telescope(
        (A, BaseApp("B", (Var(0),)), BaseApp("C", (Var(0), Var(1)))), ("x", "z", "w")
    )
    left = (a, Const("ha"), Const("ka"))
    tid = id_telescope(sigma1, EMPTY, phi, left, left)
    oracle = _hand_rolled_id(sigma1, phi, left, left, 0)
    assert len(tid.telescope) == 3
    assert def_eq(sigma1, EMPTY, tid.telescope, oracle).ok
    check_telescope(sigma1, EMPTY, tid.telescope)


def test_refl_base_case(sigma0):
    assert refl_tele(sigma0, EMPTY, ONE, (a,)) == (Refl(a),)


def test_refl_checks_against_diagonal_contexts(sigma1, rng):
    for _ in range(40):
        tele, left, _, _ = telescope_with_elements(rng)
        tid = id_telescope(sigma1, EMPTY, tele, left, left)
        check_element(sigma1, EMPTY, refl_tele(sigma1, EMPTY, tele, left), tid.telescope)


def test_transport_computes_on_reflexivity(sigma1, rng):
    fam = Telescope((IdType(A, a, Var(0)),), ("w",))
    out = transport(sigma1, EMPTY, ONE, (b,), (b,), (Refl(b),), fam, (p,))
    assert def_eq(sigma1, EMPTY, out[0], p).ok
    for _ in range(30):
        tele, left, _, _ = telescope_with_elements(rng)
        fam2 = Telescope((A,), ("w",))
        moved = transport(
            sigma1, EMPTY, tele, left, left, refl_tele(sigma1, EMPTY, tele, left), fam2, (c,)
        )
        assert def_eq(sigma1, EMPTY, moved[0], c).ok


def test_transport_stuck_output_checks(sigma1):
    phi = Telescope((A, BaseApp("B", (Var(0),))), ("x", "z"))
    aa, bb = (a, Const("ha")), (b, Const("hb"))
    tid = id_telescope(sigma1, EMPTY, phi, aa, bb)
    g = len(tid.telescope)
    fam = Telescope((BaseApp("C", (Var(0), Var(1))),), ("w",))
    out = transport(
        sigma1,
        tid.telescope,
        shift_tail(phi, 0, g),
        aa,
        bb,
        var_tuple(0, 2),
        shift_tail(fam, 0, g),
        (Const("ka"),),
    )
    ty = infer(sigma1, tid.telescope, out[0])
    assert def_eq(sigma1, tid.telescope, ty, BaseApp("C", (b, Const("hb")))).ok


def test_single_type_single_target_is_one_node(sigma0):
    out = j_tele(
        sigma0,
        EMPTY,
        ONE,
        Telescope(),
        Telescope((IdType(A, Var(1), Var(0)),), ("w",)),
        (Refl(Var(0)),),
        (a,),
        (b,),
        (p,),
    )
    assert len(out) == 1
    node = out[0]
    assert isinstance(node, J) and node.theta.entries == () and node.base == 0
    assert infer(sigma0, EMPTY, node) == IdType(A, b, a)


def test_computation_rule_quantified(sigma1, rng):
    fam = Telescope((A,), ("w",))
    for _ in range(50):
        tele, left, _, _ = telescope_with_elements(rng)
        n = len(tele)
        target = shift_tail(fam, 0, 3 * n)
        d = (c,)
        out = j_tele(
            sigma1, EMPTY, tele, Telescope(), target, d,
            left, left, refl_tele(sigma1, EMPTY, tele, left),
        )
        assert def_eq(sigma1, EMPTY, out[0], c).ok


def test_stuck_elimination_checks_at_length_two(sigma1):
    phi = Telescope((A, BaseApp("B", (Var(0),))), ("x", "z"))
    aa, bb = (a, Const("ha")), (b, Const("hb"))
    tid = id_telescope(sigma1, EMPTY, phi, aa, bb)
    g = len(tid.telescope)
    target = Telescope((BaseApp("C", (a, Const("ha"))),), ("w",))
    out = j_tele(
        sigma1,
        tid.telescope,
        shift_tail(phi, 0, g),
        Telescope(),
        shift_tail(target, 0, g),
        (Const("ka"),),
        aa,
        bb,
        var_tuple(0, 2),
    )
    assert infer(sigma1, tid.telescope, out[0]) == BaseApp("C", (a, Const("ha")))


def test_variable_based_form_instantiates_to_the_direct_one(sigma0):
    # build over the generic context, substitute concrete data, compare with
    # the synthesis run directly at that data
    gc = generic_context(sigma0, EMPTY, ONE)
    g = len(gc)
    generic = j_tele(
        sigma0, gc, shift_tail(ONE, 0, g), Telescope(),
        id_telescope(
            sigma0, g + 3, shift_tail(ONE, 0, g + 3), (Var(g + 1),), (Var(g),)
        ).telescope,
        (Refl(Var(g)),),
        (Var(0),), (Var(1),), (Var(2),),
    )
    inst = generic[0]
    for value in (p, b, a):
        inst = substitute(inst, 2 if value is p else (1 if value is b else 0), value)
    direct = j_tele(
        sigma0, EMPTY, ONE, Telescope(),
        id_telescope(sigma0, 3, shift_tail(ONE, 0, 3), (Var(1),), (Var(0),)).telescope,
        (Refl(Var(0)),),
        (a,), (b,), (p,),
    )
    assert def_eq(sigma0, EMPTY, inst, direct[0]).ok


def test_generic_context_is_well_formed(sigma1):
    phi = Telescope((A, BaseApp("B", (Var(0),))), ("x", "z"))
    gc = generic_context(sigma1, EMPTY, phi)
    assert len(gc) == 6
    check_telescope(sigma1, EMPTY, gc)
