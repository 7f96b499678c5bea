"""Shared fixtures: the two test signatures and seeded random corpora."""

from __future__ import annotations

import random

import pytest

from idtt.syntax import (
    BaseApp,
    Const,
    ContextMorphism,
    IdType,
    Refl,
    Signature,
    Telescope,
    Term,
    Var,
)

A = BaseApp("A")
a, b, c, d = Const("a"), Const("b"), Const("c"), Const("d")
p, q, rr = Const("p"), Const("q"), Const("rr")


@pytest.fixture(scope="session")
def sigma0() -> Signature:
    """One base type, a chain of points and paths."""
    return (
        Signature()
        .with_type("A")
        .with_const("a", A)
        .with_const("b", A)
        .with_const("c", A)
        .with_const("d", A)
        .with_const("p", IdType(A, a, b))
        .with_const("q", IdType(A, b, c))
        .with_const("rr", IdType(A, c, d))
    )


@pytest.fixture(scope="session")
def sigma1(sigma0) -> Signature:
    """Adds a dependent base type with points over two fibers, and a second
    layer for length-3 telescopes."""
    return (
        sigma0.with_type("B", Telescope((A,), ("x",)))
        .with_const("ha", BaseApp("B", (a,)))
        .with_const("hb", BaseApp("B", (b,)))
        .with_const("pb", IdType(BaseApp("B", (b,)), Const("hb"), Const("hb")))
        .with_type("C", Telescope((A, BaseApp("B", (Var(0),))), ("x", "z")))
        .with_const("ka", BaseApp("C", (a, Const("ha"))))
        .with_const("kb", BaseApp("C", (b, Const("hb"))))
    )


# Points of A with at least one closed path available between them.
PATHS = {
    ("a", "b"): p,
    ("b", "c"): q,
    ("c", "d"): rr,
    ("a", "a"): Refl(a),
    ("b", "b"): Refl(b),
    ("c", "c"): Refl(c),
    ("d", "d"): Refl(d),
}

POINTS = {"a": a, "b": b, "c": c, "d": d}
FIBER_POINTS = {"a": Const("ha"), "b": Const("hb")}
DOUBLE_POINTS = {"a": Const("ka"), "b": Const("kb")}


def telescope_with_elements(rng: random.Random, max_len: int = 3):
    """A telescope over the empty ambient together with two dependent
    elements and a path tuple between them, drawn from the closed fixtures.

    Entries are the base type, a fiber over the first coordinate, or an
    identity type between reachable points.  Earlier coordinates stay on the
    diagonal so the tuple needs no transport corrections; only the final
    coordinate may traverse a genuine path.
    """
    length = rng.randint(1, max_len)
    entries: list = []
    names: list[str] = []
    left: list[Term] = []
    right: list[Term] = []
    path: list[Term] = []
    kinds_so_far: list[str] = []
    anchor: str | None = None  # the point chosen for entry 0 while on the diagonal
    for k in range(length):
        last = k == length - 1
        kinds = ["base", "idtype"]
        if anchor in FIBER_POINTS and k == 1:
            kinds.append("fiber")
        if (
            anchor in DOUBLE_POINTS
            and k == 2
            and kinds_so_far == ["base", "fiber"]
        ):
            kinds.append("double")
        kind = rng.choice(kinds)
        kinds_so_far.append(kind)
        if kind == "base":
            if last:
                src, dst = rng.choice(list(PATHS.keys()))
            else:
                src = dst = rng.choice(["a", "b"])
            entries.append(A)
            left.append(POINTS[src])
            right.append(POINTS[dst])
            path.append(PATHS[(src, dst)])
            if k == 0:
                anchor = src if src == dst else None
        elif kind == "fiber":
            entries.append(BaseApp("B", (Var(0),)))
            pt = FIBER_POINTS[anchor]
            left.append(pt)
            right.append(pt)
            path.append(Refl(pt))
        elif kind == "double":
            entries.append(BaseApp("C", (Var(0), Var(1))))
            pt = DOUBLE_POINTS[anchor]
            left.append(pt)
            right.append(pt)
            path.append(Refl(pt))
        else:
            endpoints = rng.choice([("a", "a"), ("a", "b"), ("b", "b"), ("b", "c")])
            entries.append(IdType(A, POINTS[endpoints[0]], POINTS[endpoints[1]]))
            w = PATHS[endpoints]
            left.append(w)
            right.append(w)
            path.append(Refl(w))
            if k == 0:
                anchor = None
        names.append(f"v{k}")
    return Telescope(tuple(entries), tuple(names)), tuple(left), tuple(right), tuple(path)


def random_closed_term(rng: random.Random, depth: int = 2) -> Term:
    """A closed, structurally varied term of no particular type; used for the
    scope-algebra laws, which are type-agnostic."""
    roll = rng.random()
    if depth == 0 or roll < 0.35:
        return rng.choice([a, b, c, p, q])
    if roll < 0.6:
        return Refl(random_closed_term(rng, depth - 1))
    return Const("p", (random_closed_term(rng, depth - 1),))


def random_morphism(rng: random.Random, sigma0: Signature) -> ContextMorphism:
    """Morphism between single-entry telescopes over the chain signature."""
    one = Telescope((A,), ("x",))
    comp = rng.choice([Var(0), a, b, c])
    return ContextMorphism(one, one, (comp,))


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(20260810)
