"""Groupoid structure on paths: composition, units, inverses, whiskering,
coherence cells, and the homotopy relation between context morphisms.

Every operation synthesizes a term and returns it with enough data to
kernel-check; the characteristic unit equations hold definitionally because
each construction eliminates exactly the argument the equation sets to
reflexivity, and everything else in the eliminating family computes away.

Raw helpers work on term tuples with the coordinate conventions of
``idcontexts``; :class:`PathTerm` and :class:`PathHomotopy` carry their
contexts so results can be re-checked wholesale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainMismatch, EndpointMismatch
from .idcontexts import id_telescope, j_tele, refl_tele, transport
from .kernel import Derivation, check_element, def_eq
from .syntax import (
    ContextMorphism,
    Refl,
    Signature,
    Telescope,
    Term,
    relocate,
    shift_tail,
    substitute,
    var_tuple,
)

__all__ = [
    "PathTerm",
    "PathHomotopy",
    "HomotopyWitness",
    "compose_paths",
    "invert_path",
    "map_path",
    "path_refl",
    "path_compose",
    "path_invert",
    "homotopy_refl",
    "whisker",
    "whisker_inv",
    "coherence",
    "gamma_correction",
    "htpy_refl",
    "htpy_sym",
    "htpy_trans",
    "htpy_check",
]


def _amb_len(gamma: Telescope | int) -> int:
    return gamma if isinstance(gamma, int) else len(gamma)


# ---------------------------------------------------------------------------
# Carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PathTerm:
    """A path in a telescope: endpoints and the inhabiting tuple.

    ``context`` is the ambient telescope; ``subject`` is the telescope the
    endpoints live in, with prefix references starting at ``len(context)``."""

    context: Telescope
    subject: Telescope
    left: tuple[Term, ...]
    right: tuple[Term, ...]
    body: tuple[Term, ...]

    def identity_context(self, sig: Signature) -> Telescope:
        return id_telescope(sig, self.context, self.subject, self.left, self.right).telescope

    def check(self, sig: Signature) -> Derivation:
        return check_element(sig, self.context, self.body, self.identity_context(sig))


@dataclass(frozen=True, slots=True)
class PathHomotopy:
    """A two-cell between parallel paths, carrying its full boundary: the
    underlying telescope, the shared endpoints, and the two paths."""

    context: Telescope
    subject: Telescope
    src: tuple[Term, ...]
    dst: tuple[Term, ...]
    lower: tuple[Term, ...]
    upper: tuple[Term, ...]
    body: tuple[Term, ...]

    def as_path(self, sig: Signature) -> PathTerm:
        ident = id_telescope(sig, self.context, self.subject, self.src, self.dst).telescope
        return PathTerm(self.context, ident, self.lower, self.upper, self.body)

    def check(self, sig: Signature) -> Derivation:
        return self.as_path(sig).check(sig)


@dataclass(frozen=True, slots=True)
class HomotopyWitness:
    """Pointwise propositional equality between parallel context morphisms:
    a tuple over the shared domain inhabiting Id(f(x), g(x))."""

    source: ContextMorphism
    target: ContextMorphism
    witness: tuple[Term, ...]


# ---------------------------------------------------------------------------
# Raw tuple-level synthesis
# ---------------------------------------------------------------------------


def compose_paths(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    a: tuple[Term, ...],
    b: tuple[Term, ...],
    c: tuple[Term, ...],
    p: tuple[Term, ...],
    q: tuple[Term, ...],
) -> tuple[Term, ...]:
    """``q`` after ``p``: transport ``p`` along ``q`` in the family of paths
    out of ``a``.  Composition with reflexivity on the left is therefore the
    identity, definitionally."""
    g = _amb_len(gamma)
    n = len(phi)
    family = id_telescope(sig, g + n, shift_tail(phi, g, n), a, var_tuple(g, n)).telescope
    return transport(sig, g, phi, b, c, q, family, p)


def invert_path(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    a: tuple[Term, ...],
    b: tuple[Term, ...],
    p: tuple[Term, ...],
) -> tuple[Term, ...]:
    """Reverse a path by eliminating it into the reversed identity context;
    the inverse of reflexivity is reflexivity, definitionally."""
    g = _amb_len(gamma)
    n = len(phi)
    motive = id_telescope(
        sig, g + 3 * n, shift_tail(phi, g, 3 * n), var_tuple(g + n, n), var_tuple(g, n)
    ).telescope
    family = tuple(Refl(v) for v in var_tuple(g, n))
    return j_tele(sig, g, phi, Telescope(), motive, family, a, b, p)


def map_path(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    psi: Telescope,
    comps: tuple[Term, ...],
    a: tuple[Term, ...],
    b: tuple[Term, ...],
    p: tuple[Term, ...],
) -> tuple[Term, ...]:
    """Image of a path under the map with component terms ``comps`` (scoped
    over ambient ++ phi, landing in ``psi`` over the ambient): eliminate into
    Id(comps(x), comps(y)) with reflexivity on the diagonal, so reflexivity
    maps to reflexivity definitionally."""
    g = _amb_len(gamma)
    n = len(phi)
    at_x = tuple(shift_tail(t, g + n, 2 * n) for t in comps)
    at_y = tuple(
        relocate(t, var_tuple(0, g) + var_tuple(g + n, n), g + 3 * n) for t in comps
    )
    motive = id_telescope(sig, g + 3 * n, shift_tail(psi, g, 3 * n), at_x, at_y).telescope
    family = tuple(Refl(t) for t in comps)
    return j_tele(sig, g, phi, Telescope(), motive, family, a, b, p)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


def path_refl(sig: Signature, gamma: Telescope, phi: Telescope, a: tuple[Term, ...]) -> PathTerm:
    return PathTerm(gamma, phi, a, a, refl_tele(sig, gamma, phi, a))


def path_compose(sig: Signature, q: PathTerm, p: PathTerm) -> PathTerm:
    """Composite path; ``q`` must start where ``p`` ends."""
    if len(q.subject) != len(p.subject) or not def_eq(sig, q.context, q.subject, p.subject):
        raise EndpointMismatch("paths live in different telescopes")
    for x, y in zip(p.right, q.left):
        if not def_eq(sig, p.context, x, y):
            raise EndpointMismatch("paths do not share the middle endpoint")
    body = compose_paths(sig, p.context, p.subject, p.left, q.left, q.right, p.body, q.body)
    return PathTerm(p.context, p.subject, p.left, q.right, body)


def path_invert(sig: Signature, p: PathTerm) -> PathTerm:
    body = invert_path(sig, p.context, p.subject, p.left, p.right, p.body)
    return PathTerm(p.context, p.subject, p.right, p.left, body)


def homotopy_refl(sig: Signature, p: PathTerm) -> PathHomotopy:
    return PathHomotopy(
        p.context,
        p.subject,
        p.left,
        p.right,
        p.body,
        p.body,
        refl_tele(sig, p.context, p.identity_context(sig), p.body),
    )


# ---------------------------------------------------------------------------
# Whiskering
# ---------------------------------------------------------------------------


def whisker(sig: Signature, lower: PathHomotopy, upper: PathHomotopy) -> PathHomotopy:
    """Horizontal composite of two-cells: from ``lower : p0 => p1`` between
    paths a -> b and ``upper : q0 => q1`` between paths b -> c, a two-cell
    q0 . p0 => q1 . p1.

    The construction eliminates ``upper`` with ``lower`` riding in the
    auxiliary context; on the diagonal the two-cell is pushed forward along
    composition with the generic path.  Whiskering reflexivity homotopies
    yields the reflexivity homotopy on the composite, definitionally.
    """
    if len(lower.subject) != len(upper.subject):
        raise EndpointMismatch("two-cells must live over the same telescope")
    gamma, phi = lower.context, lower.subject
    g, n = len(gamma), len(phi)
    a, b, c = lower.src, lower.dst, upper.dst
    p0, p1 = lower.lower, lower.upper
    q0, q1 = upper.lower, upper.upper

    subject_q = id_telescope(sig, g, phi, b, c).telescope
    cells = id_telescope(
        sig,
        g + 3 * n,
        shift_tail(id_telescope(sig, g, phi, a, b).telescope, g, 3 * n),
        p0,
        p1,
    ).telescope  # the slot the lower two-cell instantiates
    t = len(cells)

    big = g + 3 * n + t
    phi_big = shift_tail(phi, g, big - g)
    left_comp = compose_paths(sig, big, phi_big, a, b, c, p0, var_tuple(g, n))
    right_comp = compose_paths(sig, big, phi_big, a, b, c, p1, var_tuple(g + n, n))
    target = id_telescope(sig, big, phi_big, a, c).telescope
    motive = id_telescope(sig, big, target, left_comp, right_comp).telescope

    # Diagonal: push the two-cell variable forward along composition with the
    # generic path (positions g .. g+n-1), then the computation rule of the
    # outer elimination hands back exactly that push-forward.
    amb_d = g + n + t
    subject_p_d = shift_tail(id_telescope(sig, g, phi, a, b).telescope, g, amb_d - g)
    phi_comp = shift_tail(phi, g, amb_d + n - g)
    comps = compose_paths(
        sig, amb_d + n, phi_comp, a, b, c, var_tuple(amb_d, n), var_tuple(g, n)
    )
    psi_d = id_telescope(sig, amb_d, shift_tail(phi, g, amb_d - g), a, c).telescope
    family = map_path(
        sig, amb_d, subject_p_d, psi_d, comps, p0, p1, var_tuple(g + n, t)
    )

    out = j_tele(sig, g, subject_q, cells, motive, family, q0, q1, upper.body)
    for k in reversed(range(t)):
        out = tuple(substitute(e, g + k, lower.body[k]) for e in out)

    composite0 = compose_paths(sig, g, phi, a, b, c, p0, q0)
    composite1 = compose_paths(sig, g, phi, a, b, c, p1, q1)
    return PathHomotopy(gamma, phi, a, c, composite0, composite1, out)


def whisker_inv(sig: Signature, cell: PathHomotopy) -> PathHomotopy:
    """Image of a two-cell under path reversal: from p0 => p1 to
    p0^-1 => p1^-1.  The image of a reflexivity homotopy is the reflexivity
    homotopy on the inverse, definitionally."""
    gamma, phi = cell.context, cell.subject
    g, n = len(gamma), len(phi)
    a, b = cell.src, cell.dst
    subject_p = id_telescope(sig, g, phi, a, b).telescope

    amb = g + n  # the map's domain copy sits right after the ambient
    comps = invert_path(
        sig, amb, shift_tail(phi, g, n), a, b, var_tuple(g, n)
    )
    psi = id_telescope(sig, g, phi, b, a).telescope
    body = map_path(
        sig, g, subject_p, psi, comps, cell.lower, cell.upper, cell.body
    )
    inv0 = invert_path(sig, g, phi, a, b, cell.lower)
    inv1 = invert_path(sig, g, phi, a, b, cell.upper)
    return PathHomotopy(gamma, phi, b, a, inv0, inv1, body)


# ---------------------------------------------------------------------------
# Coherence cells
# ---------------------------------------------------------------------------


def coherence(sig: Signature, kind: str, *paths: PathTerm) -> PathHomotopy:
    """The associativity and unit/inverse coherence cells.

    ``assoc`` takes p : a -> b, q : b -> c, r : c -> d and relates
    (r . q) . p with r . (q . p); ``unitl``/``unitr`` relate the composite
    with an identity to the path itself; ``invl``/``invr`` relate the two
    composites of a path with its inverse to identities.  Each cell's unit
    instance is the identity two-cell, definitionally.
    """
    if kind == "assoc":
        return _coherence_assoc(sig, *paths)
    if kind == "unitl":
        (p,) = paths
        gamma, phi = p.context, p.subject
        composite = compose_paths(
            sig, gamma, phi, p.left, p.right, p.right, p.body,
            refl_tele(sig, gamma, phi, p.right),
        )
        # Left-unit composition computes away, so the identity two-cell
        # already has the required type.
        body = refl_tele(
            sig, gamma, id_telescope(sig, gamma, phi, p.left, p.right).telescope, p.body
        )
        return PathHomotopy(gamma, phi, p.left, p.right, composite, p.body, body)
    if kind in ("unitr", "invl", "invr"):
        (p,) = paths
        return _coherence_elim(sig, kind, p)
    raise DomainMismatch(f"unknown coherence kind {kind!r}")


def _coherence_elim(sig: Signature, kind: str, p: PathTerm) -> PathHomotopy:
    """Unit-right and the two inverse cells, by eliminating the path."""
    gamma, phi = p.context, p.subject
    g, n = len(gamma), len(phi)
    big = g + 3 * n
    phi_big = shift_tail(phi, g, 3 * n)
    xs, ys, us = var_tuple(g, n), var_tuple(g + n, n), var_tuple(g + 2 * n, n)

    def refl_of(v: tuple[Term, ...]) -> tuple[Term, ...]:
        return tuple(Refl(t) for t in v)

    if kind == "unitr":
        lhs = compose_paths(sig, big, phi_big, xs, xs, ys, refl_of(xs), us)
        rhs, ends = us, (xs, ys)
    elif kind == "invl":
        inv = invert_path(sig, big, phi_big, xs, ys, us)
        lhs = compose_paths(sig, big, phi_big, xs, ys, xs, us, inv)
        rhs, ends = refl_of(xs), (xs, xs)
    else:  # invr
        inv = invert_path(sig, big, phi_big, xs, ys, us)
        lhs = compose_paths(sig, big, phi_big, ys, xs, ys, inv, us)
        rhs, ends = refl_of(ys), (ys, ys)

    paths_tele = id_telescope(sig, big, phi_big, *ends).telescope
    motive = id_telescope(sig, big, paths_tele, lhs, rhs).telescope
    diag = refl_of(refl_of(var_tuple(g, n)))
    body = j_tele(sig, g, phi, Telescope(), motive, diag, p.left, p.right, p.body)

    inst = var_tuple(0, g) + p.left + p.right + p.body
    lhs_i = tuple(relocate(e, inst, g) for e in lhs)
    rhs_i = tuple(relocate(e, inst, g) for e in rhs)
    src = p.left if kind != "invr" else p.right
    dst = p.right if kind == "unitr" else src
    return PathHomotopy(gamma, phi, src, dst, lhs_i, rhs_i, body)


def _coherence_assoc(
    sig: Signature, p: PathTerm, q: PathTerm, r: PathTerm
) -> PathHomotopy:
    """Associativity cell, by eliminating the outermost path with the two
    inner ones riding in the auxiliary context.  Its instance at an identity
    outer path is the identity two-cell on the composite, definitionally."""
    gamma, phi = p.context, p.subject
    g, n = len(gamma), len(phi)
    a, b = p.left, p.right
    c, d = r.left, r.right

    subject_r = id_telescope(sig, g, phi, c, d).telescope
    big0 = g + 3 * n
    phi0 = shift_tail(phi, g, 3 * n)
    theta = (
        id_telescope(sig, big0, phi0, b, var_tuple(g, n)).telescope
        .concat(
            id_telescope(
                sig, big0 + n, shift_tail(phi, g, 3 * n + n), a, b
            ).telescope
        )
    )  # w_q : b -> x_r, then w_p : a -> b
    t = len(theta)

    big = g + 3 * n + t
    phi_big = shift_tail(phi, g, big - g)
    wq, wp = var_tuple(big0, n), var_tuple(big0 + n, n)
    xr, yr, ur = var_tuple(g, n), var_tuple(g + n, n), var_tuple(g + 2 * n, n)
    rq = compose_paths(sig, big, phi_big, b, xr, yr, wq, ur)
    lhs = compose_paths(sig, big, phi_big, a, b, yr, wp, rq)
    qp = compose_paths(sig, big, phi_big, a, b, xr, wp, wq)
    rhs = compose_paths(sig, big, phi_big, a, xr, yr, qp, ur)
    target = id_telescope(sig, big, phi_big, a, yr).telescope
    motive = id_telescope(sig, big, target, lhs, rhs).telescope

    # Diagonal: both sides compute to w_q . w_p, so reflexivity inhabits it.
    amb_d = g + n + t
    phi_d = shift_tail(phi, g, amb_d - g)
    wq_d, wp_d = var_tuple(g + n, n), var_tuple(g + 2 * n, n)
    qp_d = compose_paths(sig, amb_d, phi_d, a, b, var_tuple(g, n), wp_d, wq_d)
    family = tuple(Refl(e) for e in qp_d)

    out = j_tele(sig, g, subject_r, theta, motive, family, c, d, r.body)
    args = q.body + p.body
    for k in reversed(range(t)):
        out = tuple(substitute(e, g + k, args[k]) for e in out)

    rq_i = compose_paths(sig, g, phi, b, c, d, q.body, r.body)
    lhs_i = compose_paths(sig, g, phi, a, b, d, p.body, rq_i)
    qp_i = compose_paths(sig, g, phi, a, b, c, p.body, q.body)
    rhs_i = compose_paths(sig, g, phi, a, c, d, qp_i, r.body)
    return PathHomotopy(gamma, phi, a, d, lhs_i, rhs_i, out)


# ---------------------------------------------------------------------------
# The correction cell for double transport
# ---------------------------------------------------------------------------


def gamma_correction(
    sig: Signature,
    p: PathTerm,
    omega: Telescope,
    elem: tuple[Term, ...],
) -> PathTerm:
    """A path from the there-and-back double transport of ``elem`` to
    ``elem`` itself: eliminating ``p`` with the family riding along, the
    diagonal instance collapses to reflexivity.

    ``omega`` follows the transport convention (entry ``i`` scoped over
    ambient ++ subject ++ omega[:i]); ``elem`` inhabits it at ``p.right``.
    """
    gamma, phi = p.context, p.subject
    g, n = len(gamma), len(phi)
    m = len(omega)

    # Auxiliary slot: the family at the generic right endpoint.
    theta = relocate(omega, var_tuple(0, g) + var_tuple(g + n, n), g + 3 * n)
    t = m

    big = g + 3 * n + t
    phi_big = shift_tail(phi, g, big - g)
    # Family with its subject references moved onto the fresh copy the inner
    # transports introduce at the end of the motive context.
    omega_big = relocate(omega, var_tuple(0, g) + var_tuple(big, n), big + n)
    xs, ys, us = var_tuple(g, n), var_tuple(g + n, n), var_tuple(g + 2 * n, n)
    zs = var_tuple(g + 3 * n, m)
    inv = invert_path(sig, big, phi_big, xs, ys, us)
    back = transport(sig, big, phi_big, ys, xs, inv, omega_big, zs)
    forth = transport(sig, big, phi_big, xs, ys, us, omega_big, back)
    omega_at_y = relocate(omega, var_tuple(0, g) + var_tuple(g + n, n), big)
    motive = id_telescope(sig, big, omega_at_y, forth, zs).telescope

    family = tuple(Refl(v) for v in var_tuple(g + n, m))
    out = j_tele(sig, g, phi, theta, motive, family, p.left, p.right, p.body)
    for k in reversed(range(m)):
        out = tuple(substitute(e, g + k, elem[k]) for e in out)

    inv_i = invert_path(sig, g, phi, p.left, p.right, p.body)
    back_i = transport(sig, g, phi, p.right, p.left, inv_i, omega, elem)
    forth_i = transport(sig, g, phi, p.left, p.right, p.body, omega, back_i)
    omega_i = relocate(omega, var_tuple(0, g) + tuple(p.right), g)
    return PathTerm(gamma, omega_i, forth_i, elem, out)


# ---------------------------------------------------------------------------
# Homotopies between context morphisms
# ---------------------------------------------------------------------------


def _parallel(sig: Signature, f: ContextMorphism, h: ContextMorphism) -> None:
    from .kernel import tele_equal

    empty = Telescope()
    if not tele_equal(sig, empty, f.domain, h.domain) or not tele_equal(
        sig, empty, f.codomain, h.codomain
    ):
        raise DomainMismatch("homotopic morphisms must be parallel")


def _codomain_over_domain(f: ContextMorphism) -> Telescope:
    return shift_tail(f.codomain, 0, len(f.domain))


def htpy_refl(sig: Signature, f: ContextMorphism) -> HomotopyWitness:
    return HomotopyWitness(
        f, f, refl_tele(sig, f.domain, _codomain_over_domain(f), f.components)
    )


def htpy_sym(sig: Signature, h: HomotopyWitness) -> HomotopyWitness:
    body = invert_path(
        sig,
        h.source.domain,
        _codomain_over_domain(h.source),
        h.source.components,
        h.target.components,
        h.witness,
    )
    return HomotopyWitness(h.target, h.source, body)


def htpy_trans(sig: Signature, first: HomotopyWitness, second: HomotopyWitness) -> HomotopyWitness:
    """Compose pointwise: a homotopy f => g and one g => h give f => h."""
    if not all(
        def_eq(sig, first.source.domain, x, y)
        for x, y in zip(first.target.components, second.source.components)
    ):
        raise DomainMismatch("homotopies do not share the middle morphism")
    body = compose_paths(
        sig,
        first.source.domain,
        _codomain_over_domain(first.source),
        first.source.components,
        second.source.components,
        second.target.components,
        first.witness,
        second.witness,
    )
    return HomotopyWitness(first.source, second.target, body)


def htpy_check(sig: Signature, h: HomotopyWitness) -> Derivation:
    """Kernel-check the witness at the identity context of its boundary."""
    _parallel(sig, h.source, h.target)
    ident = id_telescope(
        sig,
        h.source.domain,
        _codomain_over_domain(h.source),
        h.source.components,
        h.target.components,
    ).telescope
    return check_element(sig, h.source.domain, h.witness, ident)
