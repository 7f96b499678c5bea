"""Identity contexts, telescopic reflexivity, transport, and the derived
telescopic eliminator.

The identity context of a telescope is built by recursion on its length: at
length one it is the plain identity type, and each further entry pairs the
shorter identity context with an identity type over the transported left
endpoint.  The telescopic eliminator is synthesized, not primitive: it is a
nest of type-level eliminations arranged so that its computation rule holds
definitionally, which the synthesis re-checks whenever it is invoked on a
reflexivity path.

Coordinate conventions (``g`` = ambient length, ``n`` = subject length,
``t`` = auxiliary length, ``m`` = eliminating-context length):

* an eliminating context ``theta`` passed to :func:`j_tele` has entry ``k``
  scoped over ambient ++ x(n) ++ y(n) ++ u(n) ++ theta[:k];
* the target family ``omega`` follows, entry ``i`` scoped over the same plus
  all of ``theta`` and ``omega[:i]``;
* the eliminating family ``d`` has component ``i`` scoped over
  ambient ++ x(n) ++ diagonal-theta(t);
* the output tuple is scoped over ambient ++ theta(a, b, p).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityMismatch, InternalInvariantViolation
from .kernel import def_eq, normalize
from .syntax import (
    IdType,
    Refl,
    J,
    Signature,
    Telescope,
    Term,
    TypeExpr,
    Var,
    relocate,
    shift_tail,
    substitute,
    var_tuple,
)

__all__ = [
    "TeleId",
    "id_telescope",
    "refl_tele",
    "transport",
    "j_tele",
    "generic_context",
    "id_context_telescope",
]


def _amb_len(gamma: Telescope | int) -> int:
    return gamma if isinstance(gamma, int) else len(gamma)


@dataclass(frozen=True, slots=True)
class TeleId:
    """An identity context together with its construction data."""

    base: Telescope
    left: tuple[Term, ...]
    right: tuple[Term, ...]
    telescope: Telescope
    transports: tuple[Term, ...]  # per-entry transported left endpoints

    def __len__(self) -> int:
        return len(self.telescope)


def id_telescope(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    left: tuple[Term, ...],
    right: tuple[Term, ...],
) -> TeleId:
    """Identity context of ``phi`` between the dependent elements ``left``
    and ``right``, by recursion on the length of ``phi``."""
    n = len(phi)
    if len(left) != n or len(right) != n:
        raise ArityMismatch(f"endpoints must have {n} components")
    g = _amb_len(gamma)
    if n == 0:
        return TeleId(phi, left, right, Telescope(), ())
    if n == 1:
        entry = IdType(phi[0], left[0], right[0])
        return TeleId(phi, left, right, Telescope((entry,), ("u0",)), (left[0],))

    head = n - 1
    prev = id_telescope(sig, g, phi.prefix(head), left[:head], right[:head])
    last_ty = phi[head]  # scoped over ambient ++ phi[:head]
    # The new entry lives over the shorter identity context; its variables
    # form the path the left endpoint is transported along.  Both the subject
    # telescope and the family get re-based so their prefix references land
    # where the transport ambient expects them.
    moved = transport(
        sig,
        g + head,
        shift_tail(phi.prefix(head), g, head),
        left[:head],
        right[:head],
        var_tuple(g, head),
        Telescope(
            (relocate(last_ty, var_tuple(0, g) + var_tuple(g + head, head), g + 2 * head),),
            (phi.names[head],),
        ),
        (left[head],),
    )[0]
    under_right = relocate(last_ty, var_tuple(0, g) + tuple(right[:head]), g + head)
    entry = IdType(under_right, moved, right[head])
    return TeleId(
        phi,
        left,
        right,
        prev.telescope.extend(entry, f"u{head}"),
        prev.transports + (moved,),
    )


def refl_tele(
    sig: Signature, gamma: Telescope | int, phi: Telescope, elem: tuple[Term, ...]
) -> tuple[Term, ...]:
    """Componentwise reflexivity; inhabits the identity context between
    ``elem`` and itself because transport computes away on reflexivity."""
    if len(elem) != len(phi):
        raise ArityMismatch(f"element must have {len(phi)} components")
    return tuple(Refl(t) for t in elem)


def transport(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    left: tuple[Term, ...],
    right: tuple[Term, ...],
    path: tuple[Term, ...],
    omega: Telescope,
    elem: tuple[Term, ...],
) -> tuple[Term, ...]:
    """Leibniz transport: move ``elem`` in the family ``omega`` (entry ``i``
    scoped over ambient ++ phi ++ omega[:i]) along ``path`` from ``left`` to
    ``right``."""
    g = _amb_len(gamma)
    n = len(phi)
    m = len(omega)
    if len(elem) != m:
        raise ArityMismatch(f"transported element must have {m} components")
    # The family itself is the auxiliary context; the target is the family
    # at the right endpoint; the eliminating family is the identity tuple.
    theta = shift_tail(omega, g + n, 2 * n)
    omega_r = relocate(omega, var_tuple(0, g) + var_tuple(g + n, n), g + 3 * n + m)
    family = var_tuple(g + n, m)
    out = j_tele(sig, g, phi, theta, omega_r, family, left, right, path)
    for k in reversed(range(m)):
        out = tuple(substitute(t, g + k, elem[k]) for t in out)
    return out


def _var_based_tuple(
    sig: Signature,
    g: int,
    theta: Telescope,
    omega: Telescope,
    family: tuple[Term, ...],
) -> tuple[Term, ...]:
    """Variable-based elimination over a single type: a tuple over
    ambient(g) ++ (x, y, u) ++ theta inhabiting ``omega``.

    Component ``i`` eliminates with a motive in which the earlier components
    appear as their own variable-based terms, so the whole tuple computes to
    ``family`` on the diagonal.
    """
    t = len(theta)
    m = len(omega)
    big = g + 3 + t  # length of ambient ++ (x, y, u) ++ theta
    theta_node = shift_tail(theta, g, 3 + t)
    out: list[Term] = []
    out_in_motive: list[Term] = []
    for i in range(m):
        motive = relocate(
            omega[i],
            var_tuple(0, g) + var_tuple(big, 3) + var_tuple(big + 3, t) + tuple(out_in_motive),
            big + 3 + t,
        )
        body = shift_tail(family[i], g, 3 + t)
        term = J(Var(g), Var(g + 1), Var(g + 2), theta_node, motive, body, var_tuple(g + 3, t), big)
        out.append(term)
        out_in_motive.append(shift_tail(term, g, 3 + t))
    return tuple(out)


def j_tele(
    sig: Signature,
    gamma: Telescope | int,
    phi: Telescope,
    theta: Telescope,
    omega: Telescope,
    family: tuple[Term, ...],
    left: tuple[Term, ...],
    right: tuple[Term, ...],
    path: tuple[Term, ...],
) -> tuple[Term, ...]:
    """Telescopic elimination: a tuple inhabiting ``omega(left, right, path)``
    over ambient ++ theta(left, right, path).

    Recursion on the length of ``phi``: the subject's last entry is handled
    by a variable-based type-level elimination, whose output becomes the
    eliminating family for the shorter subject with the three new
    declarations absorbed into the auxiliary context.
    """
    g = _amb_len(gamma)
    n = len(phi)
    t = len(theta)
    m = len(omega)
    if not (len(left) == len(right) == len(path) == n):
        raise ArityMismatch(f"endpoints and path must have {n} components")
    if len(family) != m:
        raise ArityMismatch(f"eliminating family must have {m} components")

    if n == 0:
        out = family
    elif n == 1:
        generic = _var_based_tuple(sig, g, theta, omega, family)
        inst = var_tuple(0, g) + (left[0], right[0], path[0]) + var_tuple(g, t)
        out = tuple(relocate(e, inst, g + t) for e in generic)
    else:
        head = n - 1
        phi_p = phi.prefix(head)
        last_ty = phi[head]

        # Inner step: a variable-based elimination over the subject's last
        # type, with the earlier subject variables fixed on the diagonal.
        # Generic block (x', y', u') of the full subject maps onto
        # ((x, xL), (x, yL), (refl x, uL)) in ambient ++ phi_p ++ (xL, yL, uL).
        refl_head = tuple(Refl(Var(g + k)) for k in range(head))
        vals_inner = (
            var_tuple(0, g)
            + var_tuple(g, head) + (Var(g + head),)
            + var_tuple(g, head) + (Var(g + head + 1),)
            + refl_head + (Var(g + head + 2),)
        )
        # Same new base for both: the auxiliary block and the target family
        # are contiguous in their source coordinates and move together.
        theta2 = relocate(theta, vals_inner, g + head + 3)
        omega2 = relocate(omega, vals_inner, g + head + 3)
        inner = _var_based_tuple(sig, g + head, theta2, omega2, family)

        # Outer step: the shorter subject, with the last entry's two
        # endpoints and connecting path adjoined to the auxiliary context.
        gen = g + 3 * head
        last_at_y = relocate(last_ty, var_tuple(0, g) + var_tuple(g + head, head), gen + 1)
        moved = transport(
            sig,
            gen + 1,
            shift_tail(phi_p, g, gen + 1 - g),
            var_tuple(g, head),
            var_tuple(g + head, head),
            var_tuple(g + 2 * head, head),
            Telescope(
                (relocate(last_ty, var_tuple(0, g) + var_tuple(gen + 1, head), gen + 1 + head),),
                (phi.names[head],),
            ),
            (Var(gen),),
        )[0]
        last_at_y2 = relocate(last_ty, var_tuple(0, g) + var_tuple(g + head, head), gen + 2)
        vals_outer = (
            var_tuple(0, g)
            + var_tuple(g, head) + (Var(gen),)
            + var_tuple(g + head, head) + (Var(gen + 1),)
            + var_tuple(g + 2 * head, head) + (Var(gen + 2),)
        )
        theta_ih = Telescope(
            (last_ty, last_at_y, IdType(last_at_y2, moved, Var(gen + 1))),
            (phi.names[head], phi.names[head] + "'", "u" + phi.names[head]),
        ).concat(relocate(theta, vals_outer, gen + 3))
        omega_ih = relocate(omega, vals_outer, gen + 3)
        res = j_tele(
            sig, g, phi_p, theta_ih, omega_ih, inner, left[:head], right[:head], path[:head]
        )
        out = res
        for v in (left[head], right[head], path[head]):
            out = tuple(substitute(e, g, v) for e in out)

    _self_check_diagonal(sig, g, t, omega, family, left, right, path, out)
    return out


def _self_check_diagonal(
    sig: Signature,
    g: int,
    t: int,
    omega: Telescope,
    family: tuple[Term, ...],
    left: tuple[Term, ...],
    right: tuple[Term, ...],
    path: tuple[Term, ...],
    out: tuple[Term, ...],
) -> None:
    """When invoked on a reflexivity path the output must be definitionally
    the instantiated family; anything else is a bug in the synthesis."""
    n = len(left)
    if n == 0:
        return
    if any(normalize(sig, g, c) != Refl(normalize(sig, g, l)) for c, l in zip(path, left)):
        return
    if any(normalize(sig, g, l) != normalize(sig, g, r) for l, r in zip(left, right)):
        return
    expected = tuple(
        relocate(d, var_tuple(0, g) + tuple(left) + var_tuple(g, t), g + t) for d in family
    )
    for got, want in zip(out, expected):
        r = def_eq(sig, g + t, got, want)
        if not r:
            raise InternalInvariantViolation(
                f"telescopic computation rule failed: {r.trace}"
            )


def id_context_telescope(
    sig: Signature, gamma: Telescope | int, phi: Telescope
) -> tuple[Telescope, Telescope, Telescope]:
    """The three blocks of (x in phi, y in phi, u in Id(x, y)): the subject,
    a renamed copy, and the identity context between their variables."""
    g = _amb_len(gamma)
    n = len(phi)
    copy = Telescope(
        tuple(shift_tail(e, g, n) for e in phi.entries),
        tuple(nm + "'" for nm in phi.names),
    )
    ident = id_telescope(
        sig, g + 2 * n, shift_tail(phi, g, 2 * n), var_tuple(g, n), var_tuple(g + n, n)
    ).telescope
    return phi, copy, ident


def generic_context(sig: Signature, gamma: Telescope | int, phi: Telescope) -> Telescope:
    """The telescope (x in phi, y in phi, u in Id(x, y)) over the ambient."""
    subject, copy, ident = id_context_telescope(sig, gamma, phi)
    return subject.concat(copy).concat(ident)
