"""Groupoid structure terms and their definitional equations."""

import pytest

from idtt.errors import EndpointMismatch
from idtt.idcontexts import id_telescope, refl_tele
from idtt.kernel import check_element, def_eq
from idtt.paths import (
    HomotopyWitness,
    PathTerm,
    coherence,
    gamma_correction,
    homotopy_refl,
    htpy_check,
    htpy_refl,
    htpy_sym,
    htpy_trans,
    path_compose,
    path_invert,
    path_refl,
    whisker,
    whisker_inv,
)
from idtt.syntax import (
    BaseApp,
    Const,
    ContextMorphism,
    IdType,
    Refl,
    Telescope,
    Var,
)

from conftest import A, a, b, c, d, p, q, rr, telescope_with_elements

EMPTY = Telescope()
ONE = Telescope((A,), ("x",))


@pytest.fixture()
def paths(sigma0):
    mk = lambda l, r, t: PathTerm(EMPTY, ONE, (l,), (r,), (t,))
    return mk(a, b, p), mk(b, c, q), mk(c, d, rr)


def corpus_paths(sigma1, rng, count):
    for _ in range(count):
        tele, left, right, path = telescope_with_elements(rng)
        yield PathTerm(EMPTY, tele, left, right, path)


# the two unit equations of composition and inversion


def test_left_unit_is_definitional(sigma0, paths):
    pp, _, _ = paths
    unit = path_refl(sigma0, EMPTY, ONE, (b,))
    assert def_eq(sigma0, EMPTY, path_compose(sigma0, unit, pp).body[0], p).ok


def test_inverse_of_unit_is_unit(sigma0):
    unit = path_refl(sigma0, EMPTY, ONE, (a,))
    assert def_eq(sigma0, EMPTY, path_invert(sigma0, unit).body[0], Refl(a)).ok


def test_left_unit_on_corpus(sigma1, rng):
    for path in corpus_paths(sigma1, rng, 25):
        unit = path_refl(sigma1, EMPTY, path.subject, path.right)
        out = path_compose(sigma1, unit, path)
        for got, want in zip(out.body, path.body):
            assert def_eq(sigma1, EMPTY, got, want).ok
        inverted = path_invert(sigma1, path_refl(sigma1, EMPTY, path.subject, path.left))
        for got, want in zip(inverted.body, refl_tele(sigma1, EMPTY, path.subject, path.left)):
            assert def_eq(sigma1, EMPTY, got, want).ok


def test_composite_of_postulated_paths_checks(sigma0, paths):
    pp, qq, _ = paths
    out = path_compose(sigma0, qq, pp)
    out.check(sigma0)
    assert out.left == (a,) and out.right == (c,)


def test_inverse_of_postulated_path_checks(sigma0, paths):
    pp, _, _ = paths
    out = path_invert(sigma0, pp)
    out.check(sigma0)
    assert (out.left, out.right) == ((b,), (a,))


def test_endpoint_mismatch_raises(sigma0, paths):
    pp, _, rrr = paths
    with pytest.raises(EndpointMismatch):
        path_compose(sigma0, rrr, pp)


# whiskering


def test_whisker_of_units_is_unit_on_composite(sigma0, paths):
    pp, qq, _ = paths
    out = whisker(sigma0, homotopy_refl(sigma0, pp), homotopy_refl(sigma0, qq))
    out.check(sigma0)
    composite = path_compose(sigma0, qq, pp)
    assert def_eq(sigma0, EMPTY, out.body[0], Refl(composite.body[0])).ok


def test_whisker_inverse_of_unit_is_unit_on_inverse(sigma0, paths):
    pp, _, _ = paths
    out = whisker_inv(sigma0, homotopy_refl(sigma0, pp))
    out.check(sigma0)
    inverse = path_invert(sigma0, pp)
    assert def_eq(sigma0, EMPTY, out.body[0], Refl(inverse.body[0])).ok


def test_whisker_on_corpus(sigma1, rng):
    for path in corpus_paths(sigma1, rng, 10):
        unit = path_refl(sigma1, EMPTY, path.subject, path.right)
        out = whisker(
            sigma1, homotopy_refl(sigma1, path), homotopy_refl(sigma1, unit)
        )
        out.check(sigma1)


# coherence cells


def test_associator_with_unit_tail(sigma0, paths):
    pp, qq, _ = paths
    unit_c = path_refl(sigma0, EMPTY, ONE, (c,))
    cell = coherence(sigma0, "assoc", pp, qq, unit_c)
    composite = path_compose(sigma0, qq, pp)
    assert def_eq(sigma0, EMPTY, cell.body[0], Refl(composite.body[0])).ok


def test_associator_checks_on_postulated_triple(sigma0, paths):
    pp, qq, rrr = paths
    cell = coherence(sigma0, "assoc", pp, qq, rrr)
    cell.check(sigma0)


@pytest.mark.parametrize("kind", ["unitl", "unitr", "invl", "invr"])
def test_coherence_cells_check_and_unit_instances_collapse(sigma0, paths, kind):
    pp, _, _ = paths
    cell = coherence(sigma0, kind, pp)
    cell.check(sigma0)
    unit = path_refl(sigma0, EMPTY, ONE, (a,))
    at_unit = coherence(sigma0, kind, unit)
    assert def_eq(sigma0, EMPTY, at_unit.body[0], Refl(Refl(a))).ok


def test_unitl_is_literally_the_identity_cell(sigma0, paths):
    pp, _, _ = paths
    cell = coherence(sigma0, "unitl", pp)
    assert cell.body == (Refl(p),)


def test_coherences_on_corpus(sigma1, rng):
    for path in corpus_paths(sigma1, rng, 8):
        for kind in ("unitl", "unitr", "invl", "invr"):
            coherence(sigma1, kind, path).check(sigma1)


# the double-transport correction cell


def test_gamma_at_unit(sigma0):
    fam = Telescope((IdType(A, a, Var(0)),), ("w",))
    unit = path_refl(sigma0, EMPTY, ONE, (b,))
    cell = gamma_correction(sigma0, unit, fam, (p,))
    assert def_eq(sigma0, EMPTY, cell.body[0], Refl(p)).ok


def test_gamma_chain_normalizes(sigma0):
    # the there-and-back transport along reflexivity collapses to the element
    fam = Telescope((IdType(A, a, Var(0)),), ("w",))
    unit = path_refl(sigma0, EMPTY, ONE, (b,))
    cell = gamma_correction(sigma0, unit, fam, (p,))
    assert def_eq(sigma0, EMPTY, cell.left[0], p).ok


def test_gamma_stuck_checks(sigma0, paths):
    _, qq, _ = paths
    fam = Telescope((IdType(A, a, Var(0)),), ("w",))
    hop = path_compose(sigma0, qq, PathTerm(EMPTY, ONE, (a,), (b,), (p,)))
    cell = gamma_correction(sigma0, qq, fam, (hop.body[0],))
    cell.check(sigma0)


# homotopies between context morphisms


def test_homotopy_relation_closure(sigma0, rng):
    f = ContextMorphism(ONE, ONE, (Var(0),))
    g = ContextMorphism(ONE, ONE, (Var(0),))
    hr = htpy_refl(sigma0, f)
    htpy_check(sigma0, hr)
    hs = htpy_sym(sigma0, hr)
    htpy_check(sigma0, hs)
    assert def_eq(sigma0, ONE, hs.witness[0], Refl(Var(0))).ok
    ht = htpy_trans(sigma0, hr, hr)
    htpy_check(sigma0, ht)


def test_homotopy_with_postulated_pointwise_witness(sigma0):
    f = ContextMorphism(ONE, ONE, (a,))
    g = ContextMorphism(ONE, ONE, (b,))
    wit = HomotopyWitness(f, g, (p,))
    htpy_check(sigma0, wit)
    htpy_check(sigma0, htpy_sym(sigma0, wit))
    two = htpy_trans(sigma0, wit, HomotopyWitness(g, ContextMorphism(ONE, ONE, (c,)), (q,)))
    htpy_check(sigma0, two)
