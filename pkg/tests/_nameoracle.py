"""Independent name-based substitution, used only to cross-check the
positional implementation.

Terms are mirrored into a named tree where every binding region introduces
explicit fresh names; substitution is the textbook capture-avoiding one with
on-the-fly renaming.  Converting back to positional form and comparing is the
oracle check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from idtt.syntax import (
    BaseApp,
    Const,
    IdType,
    J,
    Refl,
    Telescope,
    Term,
    TypeExpr,
    Var,
)


@dataclass(frozen=True)
class NVar:
    name: str


@dataclass(frozen=True)
class NConst:
    name: str
    args: tuple


@dataclass(frozen=True)
class NRefl:
    subject: object


@dataclass(frozen=True)
class NJ:
    left: object
    right: object
    path: object
    theta: tuple  # ((name, type), ...)
    motive: object
    body_binder: str
    theta_binders: tuple
    body: object
    args: tuple
    generic: tuple  # the three generic names (x, y, u)


@dataclass(frozen=True)
class NBase:
    name: str
    args: tuple


@dataclass(frozen=True)
class NId:
    base: object
    left: object
    right: object


_supply = count()


def fresh(stem: str = "n") -> str:
    return f"{stem}{next(_supply)}"


def to_named(x, env: tuple[str, ...]):
    match x:
        case Var(index=i):
            return NVar(env[i])
        case Const(name=c, args=a):
            return NConst(c, tuple(to_named(t, env) for t in a))
        case Refl(subject=s):
            return NRefl(to_named(s, env))
        case J():
            base_env = env[: x.base]
            gx, gy, gu = fresh("x"), fresh("y"), fresh("u")
            theta_names = tuple(fresh("t") for _ in x.theta)
            theta = []
            scope = base_env + (gx, gy, gu)
            for nm, e in zip(theta_names, x.theta.entries):
                theta.append((nm, to_named(e, scope)))
                scope += (nm,)
            motive = to_named(x.motive, base_env + (gx, gy, gu) + theta_names)
            bx = fresh("b")
            body = to_named(x.body, base_env + (bx,) + theta_names)
            return NJ(
                to_named(x.left, base_env),
                to_named(x.right, base_env),
                to_named(x.path, base_env),
                tuple(theta),
                motive,
                bx,
                theta_names,
                body,
                tuple(to_named(t, base_env) for t in x.args),
                (gx, gy, gu),
            )
        case BaseApp(name=c, args=a):
            return NBase(c, tuple(to_named(t, env) for t in a))
        case IdType(base=b, left=l, right=r):
            return NId(to_named(b, env), to_named(l, env), to_named(r, env))
        case Telescope():
            raise TypeError("convert entries individually")
    raise TypeError(f"cannot convert {x!r}")


def from_named(x, env: tuple[str, ...]):
    match x:
        case NVar(name=n):
            return Var(env.index(n))
        case NConst(name=c, args=a):
            return Const(c, tuple(from_named(t, env) for t in a))
        case NRefl(subject=s):
            return Refl(from_named(s, env))
        case NJ():
            gx, gy, gu = x.generic
            theta_entries = []
            scope = env + (gx, gy, gu)
            for nm, e in x.theta:
                theta_entries.append(from_named(e, scope))
                scope += (nm,)
            theta = Telescope(tuple(theta_entries))
            motive = from_named(x.motive, env + (gx, gy, gu) + x.theta_binders)
            body = from_named(x.body, env + (x.body_binder,) + x.theta_binders)
            return J(
                from_named(x.left, env),
                from_named(x.right, env),
                from_named(x.path, env),
                theta,
                motive,
                body,
                tuple(from_named(t, env) for t in x.args),
                len(env),
            )
        case NBase(name=c, args=a):
            return BaseApp(c, tuple(from_named(t, env) for t in a))
        case NId(base=b, left=l, right=r):
            return IdType(from_named(b, env), from_named(l, env), from_named(r, env))
    raise TypeError(f"cannot convert {x!r}")


def free_names(x) -> set[str]:
    match x:
        case NVar(name=n):
            return {n}
        case NConst(args=a) | NBase(args=a):
            return set().union(*(free_names(t) for t in a)) if a else set()
        case NRefl(subject=s):
            return free_names(s)
        case NId(base=b, left=l, right=r):
            return free_names(b) | free_names(l) | free_names(r)
        case NJ():
            out = free_names(x.left) | free_names(x.right) | free_names(x.path)
            for t in x.args:
                out |= free_names(t)
            bound = set(x.generic)
            scope_bound = set(x.generic)
            for nm, e in x.theta:
                out |= free_names(e) - scope_bound
                scope_bound.add(nm)
            out |= free_names(x.motive) - scope_bound
            out |= free_names(x.body) - ({x.body_binder} | set(x.theta_binders))
            return out
    raise TypeError(f"cannot scan {x!r}")


def subst_named(x, name: str, value):
    """Capture-avoiding substitution by name."""
    match x:
        case NVar(name=n):
            return value if n == name else x
        case NConst(name=c, args=a):
            return NConst(c, tuple(subst_named(t, name, value) for t in a))
        case NRefl(subject=s):
            return NRefl(subst_named(s, name, value))
        case NBase(name=c, args=a):
            return NBase(c, tuple(subst_named(t, name, value) for t in a))
        case NId(base=b, left=l, right=r):
            return NId(
                subst_named(b, name, value),
                subst_named(l, name, value),
                subst_named(r, name, value),
            )
        case NJ():
            captured = free_names(value)
            binders = set(x.generic) | {x.body_binder} | set(x.theta_binders)
            node = x
            if binders & captured or name in binders:
                node = _rename_binders(x, captured | {name})
            theta = tuple((nm, subst_named(e, name, value)) for nm, e in node.theta)
            return NJ(
                subst_named(node.left, name, value),
                subst_named(node.right, name, value),
                subst_named(node.path, name, value),
                theta,
                subst_named(node.motive, name, value),
                node.body_binder,
                node.theta_binders,
                subst_named(node.body, name, value),
                tuple(subst_named(t, name, value) for t in node.args),
                node.generic,
            )
    raise TypeError(f"cannot substitute in {x!r}")


def _rename_binders(x: NJ, avoid: set[str]) -> NJ:
    mapping = {}
    for old in (*x.generic, x.body_binder, *x.theta_binders):
        new = old
        while new in avoid or new in mapping.values():
            new = fresh(old.rstrip("0123456789"))
        mapping[old] = new

    def ren(t):
        match t:
            case NVar(name=n):
                return NVar(mapping.get(n, n))
            case NConst(name=c, args=a):
                return NConst(c, tuple(ren(u) for u in a))
            case NRefl(subject=s):
                return NRefl(ren(s))
            case NBase(name=c, args=a):
                return NBase(c, tuple(ren(u) for u in a))
            case NId(base=b, left=l, right=r):
                return NId(ren(b), ren(l), ren(r))
            case NJ():
                # inner binders are distinct fresh names already
                return NJ(
                    ren(t.left), ren(t.right), ren(t.path),
                    tuple((nm, ren(e)) for nm, e in t.theta),
                    ren(t.motive), t.body_binder, t.theta_binders,
                    ren(t.body), tuple(ren(u) for u in t.args), t.generic,
                )
        raise TypeError(f"cannot rename {t!r}")

    gx, gy, gu = (mapping[g] for g in x.generic)
    return NJ(
        x.left, x.right, x.path,
        tuple((mapping[nm], ren(e)) for nm, e in x.theta),
        ren(x.motive),
        mapping[x.body_binder],
        tuple(mapping[nm] for nm in x.theta_binders),
        ren(x.body),
        x.args,
        (gx, gy, gu),
    )


def oracle_substitute(t: Term, env: tuple[str, ...], position: int, value: Term) -> Term:
    """Positional substitution computed the long way around: convert to the
    named tree, substitute by name, convert back over the shrunken scope."""
    named = to_named(t, env)
    value_named = to_named(value, env[:position])
    result = subst_named(named, env[position], value_named)
    new_env = env[:position] + env[position + 1 :]
    return from_named(result, new_env)
