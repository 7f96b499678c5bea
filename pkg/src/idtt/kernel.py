"""Judgment checking and definitional equality by normalization.

Checking is syntax-directed: every term synthesizes a type, and conversion is
normalize-then-compare with the single contraction rule for the identity
eliminator.  ``check_*`` functions return :class:`Derivation` trees so results
can be audited and exported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    DomainMismatch,
    IllScopedVariable,
    NonTermination,
    TypeMismatch,
    UnknownSymbol,
)
from .syntax import (
    BaseApp,
    Const,
    ContextMorphism,
    IdType,
    J,
    Node,
    Refl,
    Signature,
    Telescope,
    Term,
    TypeExpr,
    Var,
    max_ambient_ref,
    relocate,
    substitute,
    var_tuple,
)

DEFAULT_MAX_STEPS = 1_000_000

__all__ = [
    "DEFAULT_MAX_STEPS",
    "Judgment",
    "Derivation",
    "DefEq",
    "normalize",
    "normalize_type",
    "normalize_telescope",
    "infer",
    "def_eq",
    "check_type",
    "check_telescope",
    "check_term",
    "check_element",
    "check_morphism",
    "validate_signature",
    "identity_mor",
    "compose_mor",
    "apply_mor",
    "mor_equal",
    "tele_equal",
]


@dataclass(frozen=True, slots=True)
class Judgment:
    """One of the judgement forms, relative to an ambient telescope."""

    context: Telescope
    form: str  # "type-wf" | "has-type" | "tele-wf" | "has-tele" | "mor-wf"
    parts: tuple[Node, ...]


@dataclass(frozen=True, slots=True)
class Derivation:
    judgment: Judgment
    rule: str
    premises: tuple["Derivation", ...] = ()

    def rules_used(self) -> set[str]:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used()
        return out


class _Budget:
    __slots__ = ("left",)

    def __init__(self, steps: int):
        self.left = steps

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise NonTermination(
                "normalization exceeded its step budget; this indicates a kernel bug"
            )


# Normal forms depend only on term structure, so results are shared globally;
# the cache is cleared wholesale when it outgrows its cap.
_NORM_CAP = 1 << 20
_norm_term_memo: dict[Term, Term] = {}
_norm_type_memo: dict[TypeExpr, TypeExpr] = {}
_derive_memo: dict = {}
_type_wf_memo: dict = {}


def _amb_len(gamma: Telescope | int) -> int:
    return gamma if isinstance(gamma, int) else len(gamma)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def _norm_term(t: Term, budget: _Budget) -> Term:
    cached = _norm_term_memo.get(t)
    if cached is not None:
        return cached
    out = _norm_term_raw(t, budget)
    if len(_norm_term_memo) > _NORM_CAP:
        _norm_term_memo.clear()
    _norm_term_memo[t] = out
    _norm_term_memo[out] = out
    return out


def _norm_term_raw(t: Term, budget: _Budget) -> Term:
    match t:
        case Var():
            return t
        case Const(name=c, args=a):
            return Const(c, tuple(_norm_term(x, budget) for x in a))
        case Refl(subject=s):
            return Refl(_norm_term(s, budget))
        case J():
            left = _norm_term(t.left, budget)
            right = _norm_term(t.right, budget)
            path = _norm_term(t.path, budget)
            args = tuple(_norm_term(x, budget) for x in t.args)
            b = t.base
            k = len(t.theta)
            # Contract when the path is reflexivity and both endpoints agree
            # with its subject; on well-typed input all three coincide.
            if isinstance(path, Refl) and left == path.subject and right == path.subject:
                budget.spend()
                body = t.body
                for i in reversed(range(k)):
                    body = substitute(body, b + 1 + i, args[i])
                body = substitute(body, b, path.subject)
                return _norm_term(body, budget)
            theta = _norm_telescope(t.theta, budget)
            motive = _norm_type(t.motive, budget)
            body = _norm_term(t.body, budget)
            # Canonicalize a stuck node to the smallest prefix it references,
            # so weakening variants share one normal form.
            best = 1 + max(
                max(max_ambient_ref(u, b) for u in (left, right, path, theta, motive, body)),
                max((max_ambient_ref(u, b) for u in args), default=-1),
            )
            if best < b:
                pad = var_tuple(0, best) + (Var(0),) * (b - best)
                left, right, path = (relocate(u, pad, best) for u in (left, right, path))
                theta = relocate(theta, pad, best)
                motive = relocate(motive, pad, best)
                body = relocate(body, pad, best)
                args = tuple(relocate(u, pad, best) for u in args)
                b = best
            return J(left, right, path, theta, motive, body, args, b)
        case _:
            raise TypeError(f"cannot normalize {t!r}")


def _norm_type(ty: TypeExpr, budget: _Budget) -> TypeExpr:
    cached = _norm_type_memo.get(ty)
    if cached is not None:
        return cached
    out = _norm_type_raw(ty, budget)
    if len(_norm_type_memo) > _NORM_CAP:
        _norm_type_memo.clear()
    _norm_type_memo[ty] = out
    _norm_type_memo[out] = out
    return out


def _norm_type_raw(ty: TypeExpr, budget: _Budget) -> TypeExpr:
    match ty:
        case BaseApp(name=c, args=a):
            return BaseApp(c, tuple(_norm_term(x, budget) for x in a))
        case IdType(base=b, left=l, right=r):
            return IdType(_norm_type(b, budget), _norm_term(l, budget), _norm_term(r, budget))
        case _:
            raise TypeError(f"cannot normalize {ty!r}")


def _norm_telescope(phi: Telescope, budget: _Budget) -> Telescope:
    return Telescope(tuple(_norm_type(e, budget) for e in phi.entries), phi.names)


def normalize(sig: Signature, gamma: Telescope | int, t: Term, max_steps: int | None = None) -> Term:
    """Exhaustive innermost contraction of the identity computation rule."""
    budget = _Budget(DEFAULT_MAX_STEPS if max_steps is None else max_steps)
    return _norm_term(t, budget)


def normalize_type(
    sig: Signature, gamma: Telescope | int, ty: TypeExpr, max_steps: int | None = None
) -> TypeExpr:
    budget = _Budget(DEFAULT_MAX_STEPS if max_steps is None else max_steps)
    return _norm_type(ty, budget)


def normalize_telescope(
    sig: Signature, gamma: Telescope | int, phi: Telescope, max_steps: int | None = None
) -> Telescope:
    budget = _Budget(DEFAULT_MAX_STEPS if max_steps is None else max_steps)
    return _norm_telescope(phi, budget)


# ---------------------------------------------------------------------------
# Definitional equality
# ---------------------------------------------------------------------------


def _diverge(x: Node, y: Node, path: str) -> str | None:
    """First structural divergence between two normal forms, as a path string."""
    if x == y:
        return None
    if type(x) is not type(y):
        return f"{path}: {type(x).__name__} vs {type(y).__name__}"
    match x:
        case Var(index=i):
            return f"{path}: Var({i}) vs Var({y.index})"
        case Const(name=c, args=a):
            if c != y.name:
                return f"{path}: {c} vs {y.name}"
            if len(a) != len(y.args):
                return f"{path}: arity {len(a)} vs {len(y.args)}"
            for k, (u, v) in enumerate(zip(a, y.args)):
                d = _diverge(u, v, f"{path}.arg[{k}]")
                if d:
                    return d
        case Refl(subject=s):
            return _diverge(s, y.subject, f"{path}.r")
        case J():
            for field, u, v in (
                ("left", x.left, y.left),
                ("right", x.right, y.right),
                ("path", x.path, y.path),
                ("motive", x.motive, y.motive),
                ("body", x.body, y.body),
            ):
                d = _diverge(u, v, f"{path}.J-{field}")
                if d:
                    return d
            d = _diverge(x.theta, y.theta, f"{path}.J-theta")
            if d:
                return d
            if len(x.args) != len(y.args):
                return f"{path}.J-args: length {len(x.args)} vs {len(y.args)}"
            for k, (u, v) in enumerate(zip(x.args, y.args)):
                d = _diverge(u, v, f"{path}.J-args[{k}]")
                if d:
                    return d
        case BaseApp(name=c, args=a):
            if c != y.name:
                return f"{path}: {c} vs {y.name}"
            for k, (u, v) in enumerate(zip(a, y.args)):
                d = _diverge(u, v, f"{path}.arg[{k}]")
                if d:
                    return d
            if len(a) != len(y.args):
                return f"{path}: arity {len(a)} vs {len(y.args)}"
        case IdType(base=b, left=l, right=r):
            for field, u, v in (("base", b, y.base), ("left", l, y.left), ("right", r, y.right)):
                d = _diverge(u, v, f"{path}.Id-{field}")
                if d:
                    return d
        case Telescope(entries=es):
            if len(es) != len(y.entries):
                return f"{path}: telescope length {len(es)} vs {len(y.entries)}"
            for k, (u, v) in enumerate(zip(es, y.entries)):
                d = _diverge(u, v, f"{path}.entry[{k}]")
                if d:
                    return d
    return f"{path}: distinct"


@dataclass(frozen=True, slots=True)
class DefEq:
    """Outcome of a definitional-equality test, with the first divergence
    between the two normal forms when it fails."""

    ok: bool
    lhs: Node
    rhs: Node
    trace: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def def_eq(
    sig: Signature,
    gamma: Telescope | int,
    x: Node,
    y: Node,
    at: TypeExpr | None = None,
    max_steps: int | None = None,
) -> DefEq:
    """Normalize both sides and compare structurally."""
    budget = _Budget(DEFAULT_MAX_STEPS if max_steps is None else max_steps)
    if isinstance(x, Term) and isinstance(y, Term):
        xn, yn = _norm_term(x, budget), _norm_term(y, budget)
    elif isinstance(x, TypeExpr) and isinstance(y, TypeExpr):
        xn, yn = _norm_type(x, budget), _norm_type(y, budget)
    elif isinstance(x, Telescope) and isinstance(y, Telescope):
        xn, yn = _norm_telescope(x, budget), _norm_telescope(y, budget)
    else:
        return DefEq(False, x, y, "kind mismatch")
    if xn == yn:
        return DefEq(True, xn, yn)
    return DefEq(False, xn, yn, _diverge(xn, yn, "@"))


# ---------------------------------------------------------------------------
# Type synthesis and checking
# ---------------------------------------------------------------------------


def _check_instance(
    sig: Signature,
    gamma: Telescope,
    args: tuple[Term, ...],
    params: Telescope,
    lead: tuple[Term, ...],
    what: str,
) -> tuple[Derivation, ...]:
    """Check a dependent tuple against a telescope whose entries are scoped
    over ``lead`` followed by the earlier entries."""
    if len(args) != len(params):
        raise ArityMismatch(f"{what}: expected {len(params)} arguments, got {len(args)}")
    prefix: tuple[Term, ...] = ()
    derivs = []
    for k, a in enumerate(args):
        expected = relocate(params[k], lead + prefix, len(gamma))
        derivs.append(check_term(sig, gamma, a, expected))
        prefix += (a,)
    return tuple(derivs)


def check_type(sig: Signature, gamma: Telescope, ty: TypeExpr) -> Derivation:
    key = (sig, gamma, ty)
    cached = _type_wf_memo.get(key)
    if cached is not None:
        return cached
    out = _check_type_raw(sig, gamma, ty)
    if len(_type_wf_memo) > _NORM_CAP:
        _type_wf_memo.clear()
    _type_wf_memo[key] = out
    return out


def _check_type_raw(sig: Signature, gamma: Telescope, ty: TypeExpr) -> Derivation:
    match ty:
        case BaseApp(name=c, args=a):
            decl = sig.type_decl(c)
            if decl is None:
                raise UnknownSymbol(f"base type {c!r} is not declared")
            premises = _check_instance(sig, gamma, a, decl.params, (), f"type {c}")
            return Derivation(Judgment(gamma, "type-wf", (ty,)), "base-form", premises)
        case IdType(base=b, left=l, right=r):
            pb = check_type(sig, gamma, b)
            pl = check_term(sig, gamma, l, b)
            pr = check_term(sig, gamma, r, b)
            return Derivation(Judgment(gamma, "type-wf", (ty,)), "id-form", (pb, pl, pr))
        case _:
            raise TypeError(f"not a type expression: {ty!r}")


def check_telescope(sig: Signature, ambient: Telescope, phi: Telescope) -> Derivation:
    premises = []
    ctx = ambient
    for k, entry in enumerate(phi.entries):
        premises.append(check_type(sig, ctx, entry))
        ctx = ctx.extend(entry, phi.names[k])
    return Derivation(Judgment(ambient, "tele-wf", (phi,)), "tele", tuple(premises))


def infer(sig: Signature, gamma: Telescope, t: Term) -> TypeExpr:
    """Synthesize the type of ``t``; checks the term along the way."""
    ty, _ = _derive(sig, gamma, t)
    return ty


def _derive(sig: Signature, gamma: Telescope, t: Term) -> tuple[TypeExpr, Derivation]:
    key = (sig, gamma, t)
    cached = _derive_memo.get(key)
    if cached is not None:
        return cached
    out = _derive_raw(sig, gamma, t)
    if len(_derive_memo) > _NORM_CAP:
        _derive_memo.clear()
    _derive_memo[key] = out
    return out


def _derive_raw(sig: Signature, gamma: Telescope, t: Term) -> tuple[TypeExpr, Derivation]:
    g = len(gamma)
    match t:
        case Var(index=i):
            if not 0 <= i < g:
                raise IllScopedVariable(f"variable {i} out of range in a {g}-entry context")
            ty = gamma[i]
            return ty, Derivation(Judgment(gamma, "has-type", (t, ty)), "axiom-var")
        case Const(name=c, args=a):
            decl = sig.const_decl(c)
            if decl is None:
                raise UnknownSymbol(f"constant {c!r} is not declared")
            premises = _check_instance(sig, gamma, a, decl.params, (), f"constant {c}")
            ty = relocate(decl.type, a, g)
            return ty, Derivation(Judgment(gamma, "has-type", (t, ty)), "const", premises)
        case Refl(subject=s):
            ts, ds = _derive(sig, gamma, s)
            ty = IdType(ts, s, s)
            return ty, Derivation(Judgment(gamma, "has-type", (t, ty)), "id-intro", (ds,))
        case J():
            return _derive_j(sig, gamma, t)
        case _:
            raise TypeError(f"not a term: {t!r}")


def _derive_j(sig: Signature, gamma: Telescope, t: J) -> tuple[TypeExpr, Derivation]:
    # The node closes over a prefix of the ambient; premises are checked
    # there, and the conclusion weakens to the full context for free.
    if t.base > len(gamma):
        raise IllScopedVariable(
            f"eliminator closes over {t.base} positions in a {len(gamma)}-entry context"
        )
    gamma = gamma.prefix(t.base)
    g = t.base
    path_ty, d_path = _derive(sig, gamma, t.path)
    path_ty = normalize_type(sig, gamma, path_ty)
    if not isinstance(path_ty, IdType):
        raise TypeMismatch(f"eliminated term has non-identity type {path_ty!r}")
    subject_ty = path_ty.base

    d_left = check_term(sig, gamma, t.left, subject_ty)
    d_right = check_term(sig, gamma, t.right, subject_ty)
    for side, endpoint in (("left", path_ty.left), ("right", path_ty.right)):
        got = t.left if side == "left" else t.right
        r = def_eq(sig, gamma, got, endpoint, at=subject_ty)
        if not r:
            raise TypeMismatch(f"{side} endpoint disagrees with the path's type", r.trace)

    # Generic context (x, y, u) and the annotation contexts over it.
    gamma_xyu = (
        gamma.extend(subject_ty, "x")
        .extend(subject_ty, "y")
        .extend(IdType(subject_ty, Var(g), Var(g + 1)), "u")
    )
    d_theta = check_telescope(sig, gamma_xyu, t.theta)
    gamma_full = gamma_xyu.concat(t.theta)
    d_motive = check_type(sig, gamma_full, t.motive)

    # Diagonal: y := x, u := refl x; theta and motive drop two positions.
    k = len(t.theta)
    diag_values = var_tuple(0, g) + (Var(g), Var(g), Refl(Var(g)))
    theta_diag = relocate(t.theta, diag_values, g + 1)
    motive_diag = relocate(t.motive, diag_values, g + 1)
    gamma_diag = gamma.extend(subject_ty, "x").concat(theta_diag)
    d_body = check_term(sig, gamma_diag, t.body, motive_diag)

    inst_values = var_tuple(0, g) + (t.left, t.right, t.path)
    d_args = _check_instance(sig, gamma, t.args, t.theta, inst_values, "J instance")
    ty = relocate(t.motive, inst_values + t.args, g)
    deriv = Derivation(
        Judgment(gamma, "has-type", (t, ty)),
        "id-elim",
        (d_path, d_left, d_right, d_theta, d_motive, d_body) + d_args,
    )
    return ty, deriv


def check_term(sig: Signature, gamma: Telescope, t: Term, ty: TypeExpr) -> Derivation:
    synth, deriv = _derive(sig, gamma, t)
    r = def_eq(sig, gamma, synth, ty)
    if not r:
        raise TypeMismatch(f"term {t!r} has type {synth!r}, expected {ty!r}", r.trace)
    if synth == ty:
        return deriv
    return Derivation(Judgment(gamma, "has-type", (t, ty)), "conv", (deriv,))


def check_element(
    sig: Signature, gamma: Telescope, elem: tuple[Term, ...], phi: Telescope
) -> Derivation:
    """Check a dependent element (term tuple) of a telescope over ``gamma``."""
    premises = _check_instance(sig, gamma, elem, phi, var_tuple(0, len(gamma)), "element")
    return Derivation(Judgment(gamma, "has-tele", (Telescope(),) ), "tuple", premises)


def validate_signature(sig: Signature) -> Derivation:
    """Check every declaration against the prefix signature before it."""
    empty = Telescope()
    premises = []
    seen: set[str] = set()
    for i, d in enumerate(sig.decls):
        if d.name in seen:
            raise UnknownSymbol(f"duplicate declaration of {d.name!r}")
        seen.add(d.name)
        prefix = Signature(sig.decls[:i])
        premises.append(check_telescope(prefix, empty, d.params))
        if hasattr(d, "type"):
            premises.append(check_type(prefix, d.params, d.type))
    return Derivation(Judgment(empty, "tele-wf", ()), "signature", tuple(premises))


# ---------------------------------------------------------------------------
# Context morphisms
# ---------------------------------------------------------------------------


def check_morphism(sig: Signature, f: ContextMorphism) -> Derivation:
    empty = Telescope()
    d_dom = check_telescope(sig, empty, f.domain)
    d_cod = check_telescope(sig, empty, f.codomain)
    premises = _check_instance(sig, f.domain, f.components, f.codomain, (), "morphism")
    return Derivation(
        Judgment(empty, "mor-wf", (f.domain, f.codomain)), "mor", (d_dom, d_cod) + premises
    )


def identity_mor(phi: Telescope) -> ContextMorphism:
    return ContextMorphism(phi, phi, var_tuple(0, len(phi)))


def apply_mor(f: ContextMorphism, x: Node) -> Node:
    """Substitute ``f``'s components for the codomain variables of ``x``."""
    return relocate(x, f.components, len(f.domain))


def compose_mor(sig: Signature, f: ContextMorphism, g: ContextMorphism) -> ContextMorphism:
    """``f`` after ``g``: substitute ``g``'s components into ``f``'s."""
    if not tele_equal(sig, Telescope(), f.domain, g.codomain):
        raise DomainMismatch("codomain of the second morphism must match the first's domain")
    return ContextMorphism(
        g.domain, f.codomain, tuple(apply_mor(g, c) for c in f.components)
    )


def mor_equal(sig: Signature, f: ContextMorphism, g: ContextMorphism) -> bool:
    """Pointwise definitional equality, over definitionally equal telescopes."""
    if not tele_equal(sig, Telescope(), f.domain, g.domain):
        return False
    if not tele_equal(sig, Telescope(), f.codomain, g.codomain):
        return False
    return all(
        def_eq(sig, f.domain, a, b).ok for a, b in zip(f.components, g.components)
    )


def tele_equal(sig: Signature, ambient: Telescope, phi: Telescope, psi: Telescope) -> bool:
    if len(phi) != len(psi):
        return False
    return def_eq(sig, ambient, phi, psi).ok
