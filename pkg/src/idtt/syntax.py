"""Object-language syntax: terms, type expressions, telescopes, morphisms.

Variables are positional: ``Var(i)`` refers to the i-th entry, counting from
the left, of the ambient telescope.  A term scoped over a telescope therefore
stays literally valid over any extension of that telescope, renaming of
display names is invisible to equality, and alpha-equivalence is plain
structural equality (``==``).

Scoping convention for ``J`` nodes.  Each node records ``base``, the length
of the ambient prefix it closes over; positions below ``base`` are ordinary
ambient references, positions at and above it belong to the node's own
binding regions:

* ``left``, ``right``, ``path`` and every element of ``args`` use positions
  below ``base``;
* ``theta`` entry ``k`` is scoped over the prefix extended by the three
  generic positions ``base`` (left endpoint), ``base+1`` (right endpoint),
  ``base+2`` (path) and the earlier theta entries;
* ``motive`` is scoped over the prefix, the three generic positions and all
  of ``theta``;
* ``body`` is scoped over the prefix, one bound subject position at ``base``
  and the diagonal instance of ``theta`` right after it.

``args`` gives the concrete instance of ``theta`` the node is applied to, so
a ``J`` term never owns context entries of its own; :func:`relocate` keeps
``base`` in step, which makes substitution and weakening commute with every
term former by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import IllScopedVariable

__all__ = [
    "Term",
    "TypeExpr",
    "Var",
    "Const",
    "Refl",
    "J",
    "BaseApp",
    "IdType",
    "Telescope",
    "ContextMorphism",
    "Signature",
    "TypeDecl",
    "ConstDecl",
    "Node",
    "relocate",
    "substitute",
    "weaken",
    "shift_tail",
    "var_tuple",
    "alpha_equal",
    "max_var",
    "max_ambient_ref",
]


class Term:
    """Base class for object-language terms."""

    __slots__ = ()


class TypeExpr:
    """Base class for object-language type expressions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    index: int
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((1, self.index)))

    def __hash__(self) -> int:
        return self._h

    def __repr__(self) -> str:
        return f"Var({self.index})"


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str
    args: tuple[Term, ...] = ()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((2, self.name, self.args)))

    def __hash__(self) -> int:
        return self._h

    def __repr__(self) -> str:
        if not self.args:
            return f"Const({self.name!r})"
        return f"Const({self.name!r}, {list(self.args)})"


@dataclass(frozen=True, slots=True)
class Refl(Term):
    subject: Term
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((3, self.subject)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, slots=True)
class J(Term):
    """Identity elimination with explicit annotations.

    ``theta`` and ``motive`` restore syntax-directed checking; ``body`` is the
    one-variable eliminating family; ``args`` instantiates ``theta``; ``base``
    is the length of the ambient prefix the node closes over (see the module
    docstring for the exact coordinates).
    """

    left: Term
    right: Term
    path: Term
    theta: "Telescope"
    motive: "TypeExpr"
    body: Term
    args: tuple[Term, ...]
    base: int
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.args) != len(self.theta):
            raise IllScopedVariable(
                f"J node carries {len(self.args)} instance arguments for a "
                f"{len(self.theta)}-entry auxiliary telescope"
            )
        if self.base < 0:
            raise IllScopedVariable(f"J node base {self.base} out of range")
        object.__setattr__(
            self,
            "_h",
            hash(
                (4, self.left, self.right, self.path, self.theta, self.motive,
                 self.body, self.args, self.base)
            ),
        )

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, slots=True)
class BaseApp(TypeExpr):
    name: str
    args: tuple[Term, ...] = ()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((5, self.name, self.args)))

    def __hash__(self) -> int:
        return self._h

    def __repr__(self) -> str:
        if not self.args:
            return f"BaseApp({self.name!r})"
        return f"BaseApp({self.name!r}, {list(self.args)})"


@dataclass(frozen=True, slots=True)
class IdType(TypeExpr):
    base: TypeExpr
    left: Term
    right: Term
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((6, self.base, self.left, self.right)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, slots=True)
class Telescope:
    """Ordered dependent context; entry ``k`` is scoped over the ambient plus
    the ``k`` earlier entries.  Display names are printing sugar only and are
    excluded from equality."""

    entries: tuple[TypeExpr, ...] = ()
    names: tuple[str, ...] = field(default=(), compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(len(self.entries))))
        elif len(self.names) != len(self.entries):
            raise ValueError("telescope names and entries differ in length")
        object.__setattr__(self, "_h", hash((7, self.entries)))

    def __hash__(self) -> int:
        return self._h

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TypeExpr]:
        return iter(self.entries)

    def __getitem__(self, k: int) -> TypeExpr:
        return self.entries[k]

    def prefix(self, k: int) -> "Telescope":
        return Telescope(self.entries[:k], self.names[:k])

    def suffix(self, k: int) -> "Telescope":
        """Entries from position ``k`` on, still in ambient+k coordinates."""
        return Telescope(self.entries[k:], self.names[k:])

    def extend(self, ty: TypeExpr, name: str | None = None) -> "Telescope":
        n = name if name is not None else f"x{len(self.entries)}"
        return Telescope(self.entries + (ty,), self.names + (n,))

    def concat(self, other: "Telescope") -> "Telescope":
        return Telescope(self.entries + other.entries, self.names + other.names)

    def renamed(self, names: Iterable[str]) -> "Telescope":
        return Telescope(self.entries, tuple(names))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{e!r}" for n, e in zip(self.names, self.entries))
        return f"Telescope({inner})"


@dataclass(frozen=True, slots=True)
class ContextMorphism:
    """Tuple of terms sending the domain telescope into the codomain; component
    ``j`` is scoped over the domain and inhabits codomain entry ``j``
    instantiated at the earlier components."""

    domain: Telescope
    codomain: Telescope
    components: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.components) != len(self.codomain):
            raise IllScopedVariable(
                f"morphism has {len(self.components)} components for a "
                f"{len(self.codomain)}-entry codomain"
            )


@dataclass(frozen=True, slots=True)
class TypeDecl:
    name: str
    params: Telescope = Telescope()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((8, self.name, self.params)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, slots=True)
class ConstDecl:
    name: str
    params: Telescope
    type: TypeExpr
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((9, self.name, self.params, self.type)))

    def __hash__(self) -> int:
        return self._h


@dataclass(frozen=True, slots=True)
class Signature:
    """Declared base-type formers and constants; global declaration order is
    significant because each declaration may use every earlier one."""

    decls: tuple[Union[TypeDecl, ConstDecl], ...] = ()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h", hash((10, self.decls)))

    def __hash__(self) -> int:
        return self._h

    @property
    def types(self) -> tuple[TypeDecl, ...]:
        return tuple(d for d in self.decls if isinstance(d, TypeDecl))

    @property
    def constants(self) -> tuple[ConstDecl, ...]:
        return tuple(d for d in self.decls if isinstance(d, ConstDecl))

    def type_decl(self, name: str) -> TypeDecl | None:
        for d in self.decls:
            if isinstance(d, TypeDecl) and d.name == name:
                return d
        return None

    def const_decl(self, name: str) -> ConstDecl | None:
        for d in self.decls:
            if isinstance(d, ConstDecl) and d.name == name:
                return d
        return None

    def with_type(self, name: str, params: Telescope = Telescope()) -> "Signature":
        return Signature(self.decls + (TypeDecl(name, params),))

    def with_const(self, name: str, type: TypeExpr, params: Telescope = Telescope()) -> "Signature":
        return Signature(self.decls + (ConstDecl(name, params, type),))

    def path_constants(self) -> tuple[ConstDecl, ...]:
        return tuple(d for d in self.constants if isinstance(d.type, IdType))

    def homotopy_constants(self) -> tuple[ConstDecl, ...]:
        """Constants whose type is an identity type over an identity type."""
        return tuple(
            d
            for d in self.constants
            if isinstance(d.type, IdType) and isinstance(d.type.base, IdType)
        )


Node = Union[Term, TypeExpr, Telescope]


def var_tuple(start: int, count: int) -> tuple[Term, ...]:
    return tuple(Var(i) for i in range(start, start + count))


def relocate(x: Node, values: tuple[Term, ...], new_base: int) -> Node:
    """Simultaneously substitute the first ``len(values)`` ambient positions
    and re-base the remainder.

    ``Var(i)`` becomes ``values[i]`` for ``i < len(values)`` and
    ``Var(i - len(values) + new_base)`` otherwise.  At a ``J`` node the
    traversal switches to values extended (or truncated) to the node's
    ``base``, so the node's own binding regions re-stack at the relocated
    base instead of being captured by the outer mapping.
    """

    def go(n: Node, values: tuple[Term, ...], new_base: int) -> Node:
        m = len(values)
        match n:
            case Var(index=i):
                if i < m:
                    return values[i]
                return Var(i - m + new_base)
            case Const(name=c, args=a):
                return Const(c, tuple(go(t, values, new_base) for t in a))
            case Refl(subject=s):
                return Refl(go(s, values, new_base))
            case J():
                b = n.base
                if b >= m:
                    b2 = b - m + new_base
                    vals2 = values + tuple(Var(p - m + new_base) for p in range(m, b))
                else:
                    # The node closes over a strict prefix of the region being
                    # relocated; its references stop below ``b``, so a mapping
                    # that fixes that prefix cannot touch it at all.
                    vals2 = values[:b]
                    if all(
                        isinstance(v, Var) and v.index == i for i, v in enumerate(vals2)
                    ):
                        return n
                    b2 = new_base
                return J(
                    go(n.left, vals2, b2),
                    go(n.right, vals2, b2),
                    go(n.path, vals2, b2),
                    go(n.theta, vals2, b2),
                    go(n.motive, vals2, b2),
                    go(n.body, vals2, b2),
                    tuple(go(t, vals2, b2) for t in n.args),
                    b2,
                )
            case BaseApp(name=c, args=a):
                return BaseApp(c, tuple(go(t, values, new_base) for t in a))
            case IdType(base=b, left=l, right=r):
                return IdType(
                    go(b, values, new_base),
                    go(l, values, new_base),
                    go(r, values, new_base),
                )
            case Telescope(entries=es, names=ns):
                return Telescope(tuple(go(e, values, new_base) for e in es), ns)
            case _:
                raise TypeError(f"cannot relocate {n!r}")

    return go(x, values, new_base)


def substitute(x: Node, position: int, value: Term) -> Node:
    """Replace ambient position ``position`` by ``value`` (scoped over the
    prefix before it) and shift all later positions down by one."""
    if position < 0:
        raise IllScopedVariable(f"substitution position {position} out of range")
    return relocate(x, var_tuple(0, position) + (value,), position)


def weaken(x: Node, at: int, count: int = 1) -> Node:
    """Insert ``count`` fresh ambient positions at ``at``: positions >= ``at``
    shift up by ``count``."""
    if at < 0 or count < 0:
        raise IllScopedVariable(f"weakening at {at} by {count} out of range")
    return relocate(x, var_tuple(0, at), at + count)


def shift_tail(x: Node, base: int, by: int) -> Node:
    """Re-base a node scoped over ``base`` ambient positions plus a generic
    tail: the first ``base`` positions stay put, everything above shifts by
    ``by``.  Used to move annotation families between ambients that share a
    prefix."""
    if by == 0:
        return x
    return relocate(x, var_tuple(0, base), base + by)


def alpha_equal(x: Node, y: Node) -> bool:
    """Structural equality; display names never participate."""
    return x == y


def max_ambient_ref(x: Node, bound: int | None = None) -> int:
    """Largest true ambient reference in ``x`` below ``bound`` (-1 if none).

    Generic coordinates inside eliminator nodes do not count: at a ``J`` node
    the bound tightens to the node's ``base``, below which every reference is
    a real one.
    """
    match x:
        case Var(index=i):
            return i if bound is None or i < bound else -1
        case Const(args=a) | BaseApp(args=a):
            return max((max_ambient_ref(t, bound) for t in a), default=-1)
        case Refl(subject=s):
            return max_ambient_ref(s, bound)
        case J():
            inner = x.base if bound is None else min(bound, x.base)
            return max(
                max_ambient_ref(x.left, inner),
                max_ambient_ref(x.right, inner),
                max_ambient_ref(x.path, inner),
                max_ambient_ref(x.theta, inner),
                max_ambient_ref(x.motive, inner),
                max_ambient_ref(x.body, inner),
                max((max_ambient_ref(t, inner) for t in x.args), default=-1),
            )
        case IdType(base=b, left=l, right=r):
            return max(
                max_ambient_ref(b, bound),
                max_ambient_ref(l, bound),
                max_ambient_ref(r, bound),
            )
        case Telescope(entries=es):
            return max((max_ambient_ref(e, bound) for e in es), default=-1)
        case _:
            raise TypeError(f"cannot scan {x!r}")


def max_var(x: Node) -> int:
    """Largest ambient reference anywhere in ``x`` (-1 if none)."""
    return max_ambient_ref(x, None)


def free_refs(x: Node, bound: int | None = None) -> set[int]:
    """All true ambient references in ``x`` below ``bound``; like
    :func:`max_ambient_ref`, generic coordinates of eliminator nodes are
    skipped."""
    out: set[int] = set()

    def go(n: Node, bound: int | None) -> None:
        match n:
            case Var(index=i):
                if bound is None or i < bound:
                    out.add(i)
            case Const(args=a) | BaseApp(args=a):
                for t in a:
                    go(t, bound)
            case Refl(subject=s):
                go(s, bound)
            case J():
                inner = n.base if bound is None else min(bound, n.base)
                for part in (n.left, n.right, n.path, n.theta, n.motive, n.body, *n.args):
                    go(part, inner)
            case IdType(base=b, left=l, right=r):
                go(b, bound)
                go(l, bound)
                go(r, bound)
            case Telescope(entries=es):
                for e in es:
                    go(e, bound)
            case _:
                raise TypeError(f"cannot scan {n!r}")

    go(x, bound)
    return out
