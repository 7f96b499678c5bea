"""Finitely presented groupoids and the fundamental-groupoid construction.

Over a free path signature (base types, point constants, path constants, no
homotopy constants) the homotopy classes of closed paths are exactly reduced
words over the path constants, so the fundamental groupoid of a supported
telescope is computed with words as morphisms.  Supported telescopes have
point entries (closed base types) and path entries whose endpoint expressions
are built from earlier point variables and point constants; the path entries
carry no morphism data of their own, they impose commuting-square conditions.

The reading of a closed normal path term back into a word understands the
shapes this package's own synthesis produces: path constants, reflexivity,
composition, inversion, and the path action of a map.  Anything else raises
``UnrepresentablePathImage``, which keeps the free-signature assumption an
explicit runtime check rather than a silent belief.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    EnumerationBoundExceeded,
    NoClosedPoints,
    NonFreeSignature,
    UnrepresentablePathImage,
)
from .idcontexts import refl_tele
from .kernel import normalize, normalize_type
from .paths import compose_paths, invert_path
from .syntax import (
    BaseApp,
    Const,
    ContextMorphism,
    IdType,
    J,
    Refl,
    Signature,
    Telescope,
    Term,
    TypeExpr,
    Var,
    relocate,
)

__all__ = [
    "Word",
    "reduce_word",
    "invert_word",
    "FinGroupoid",
    "GMor",
    "GpdFunctor",
    "DEFAULT_WORD_BOUND",
    "fundamental",
    "word_of",
    "canonical_path_term",
    "map_action",
    "functor_equal",
    "is_fibration",
    "is_inj_equiv_gpd",
    "path_groupoid",
    "sigma",
    "theorem62_check",
]

DEFAULT_WORD_BOUND = 16

Word = tuple[tuple[str, int], ...]


def reduce_word(w: Word) -> Word:
    out: list[tuple[str, int]] = []
    for letter in w:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


@dataclass(frozen=True, slots=True)
class GMor:
    """A morphism with explicit endpoints; ``data`` is representation-specific
    (a tuple of words for fundamental groupoids, a pair of morphisms for
    mapping-space groupoids)."""

    src: object
    dst: object
    data: object


@dataclass(frozen=True)
class FinGroupoid:
    """A groupoid with a finite object set and enumerable hom-sets."""

    objects: tuple
    hom: Callable[[object, object], tuple[GMor, ...]] = field(compare=False)
    compose: Callable[[GMor, GMor], GMor] = field(compare=False)  # second after first
    identity: Callable[[object], GMor] = field(compare=False)
    invert: Callable[[GMor], GMor] = field(compare=False)
    generators: tuple = ()

    def morphisms(self) -> tuple[GMor, ...]:
        out: list[GMor] = []
        for a in self.objects:
            for b in self.objects:
                out.extend(self.hom(a, b))
        return tuple(out)


@dataclass(frozen=True)
class GpdFunctor:
    source: FinGroupoid
    target: FinGroupoid
    on_object: Callable[[object], object] = field(compare=False)
    on_morphism: Callable[[GMor], GMor] = field(compare=False)


def functor_equal(f: GpdFunctor, g: GpdFunctor) -> bool:
    """Exact equality on objects and on every enumerable morphism."""
    if tuple(f.source.objects) != tuple(g.source.objects):
        return False
    for a in f.source.objects:
        if f.on_object(a) != g.on_object(a):
            return False
    for m in f.source.morphisms():
        if f.on_morphism(m) != g.on_morphism(m):
            return False
    return True


# ---------------------------------------------------------------------------
# Free path signatures
# ---------------------------------------------------------------------------


def _point_constants(sig: Signature, base: str) -> tuple[str, ...]:
    return tuple(
        d.name
        for d in sig.constants
        if not d.params.entries and d.type == BaseApp(base)
    )


def _path_constants(sig: Signature, base: str) -> tuple[tuple[str, str, str], ...]:
    """(name, source point, target point) for path constants over ``base``."""
    out = []
    for d in sig.constants:
        if d.params.entries or not isinstance(d.type, IdType):
            continue
        if d.type.base != BaseApp(base):
            continue
        if not (isinstance(d.type.left, Const) and isinstance(d.type.right, Const)):
            continue
        out.append((d.name, d.type.left.name, d.type.right.name))
    return tuple(out)


def _require_free(sig: Signature) -> None:
    bad = sig.homotopy_constants()
    if bad:
        raise NonFreeSignature(
            f"homotopy constants present: {', '.join(d.name for d in bad)}"
        )


def _words_between(
    gens: tuple[tuple[str, str, str], ...], src: str, dst: str, bound: int
) -> tuple[Word, ...]:
    """All reduced words from ``src`` to ``dst`` in the free groupoid on the
    given graph, by non-backtracking search up to ``bound`` letters."""
    moves: dict[str, list[tuple[str, int, str]]] = {}
    for name, s, t in gens:
        moves.setdefault(s, []).append((name, 1, t))
        moves.setdefault(t, []).append((name, -1, s))
    out: list[Word] = []

    def walk(at: str, word: tuple[tuple[str, int], ...]) -> None:
        if at == dst:
            out.append(word)
        if len(word) == bound:
            if moves.get(at):
                raise EnumerationBoundExceeded(
                    f"hom-set enumeration passed {bound} letters; raise the bound"
                )
            return
        for name, e, to in moves.get(at, ()):
            if word and word[-1] == (name, -e):
                continue  # immediate backtrack would not be reduced
            walk(to, word + ((name, e),))

    walk(src, ())
    return tuple(out)


# ---------------------------------------------------------------------------
# Reading closed paths as words
# ---------------------------------------------------------------------------


def word_of(sig: Signature, term: Term) -> Word:
    """The homotopy class of a closed normal path term, as a reduced word.

    Understands reflexivity, path constants, and the composition, inversion
    and map-action shapes produced by this package's synthesis.
    """
    t = normalize(sig, 0, term)
    return reduce_word(_word_of(sig, t))


def _word_of(sig: Signature, t: Term) -> Word:
    match t:
        case Refl():
            return ()
        case Const(name=c, args=()):
            decl = sig.const_decl(c)
            if decl is not None and isinstance(decl.type, IdType):
                return ((c, 1),)
            raise UnrepresentablePathImage(f"constant {c} is not a declared path")
        case J(theta=theta, motive=motive, body=body, args=args, base=b):
            if (
                len(theta) == 1
                and isinstance(theta[0], IdType)
                and theta[0].right == Var(b)
                and isinstance(motive, IdType)
                and motive.right == Var(b + 1)
                and body == Var(b + 1)
                and len(args) == 1
            ):
                # Transport in the family of paths out of a fixed point:
                # composition of the instance argument with the eliminated path.
                return _word_of(sig, args[0]) + _word_of(sig, t.path)
            if len(theta) == 0 and body == Refl(Var(b)):
                if isinstance(motive, IdType) and motive.left == Var(b + 1) and motive.right == Var(b):
                    return invert_word(_word_of(sig, t.path))
            if len(theta) == 0 and isinstance(body, Refl):
                if body.subject == Var(b):
                    return _word_of(sig, t.path)  # action of an identity component
                if isinstance(body.subject, Const) and not body.subject.args:
                    return ()  # action of a constant component
            raise UnrepresentablePathImage(
                "stuck eliminator is not a recognized path shape"
            )
        case _:
            raise UnrepresentablePathImage(f"not a closed path term: {t!r}")


def canonical_path_term(
    sig: Signature, base: str, src: Term, dst: Term, word: Word
) -> Term:
    """One closed term per reduced word: constants and their inversions,
    folded with composition from the left."""
    gens = {name: (s, t) for name, s, t in _path_constants(sig, base)}
    subject = Telescope((BaseApp(base),), ("x",))

    def letter(name: str, e: int) -> tuple[Term, Term, Term]:
        s, t = gens[name]
        if e == 1:
            return Const(name), Const(s), Const(t)
        body = invert_path(sig, 0, subject, (Const(s),), (Const(t),), (Const(name),))[0]
        return body, Const(t), Const(s)

    if not word:
        return Refl(normalize(sig, 0, src))
    acc, a, b = letter(*word[0])
    for name, e in word[1:]:
        nxt, bb, c = letter(name, e)
        acc = compose_paths(sig, 0, subject, (a,), (bb,), (c,), (acc,), (nxt,))[0]
        b = c
    return acc


# ---------------------------------------------------------------------------
# Fundamental groupoids of supported telescopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Entry:
    kind: str  # "point" | "path"
    base: str
    left: Term | None = None   # endpoint expressions over the prefix, for paths
    right: Term | None = None


def _classify(sig: Signature, phi: Telescope) -> tuple[_Entry, ...]:
    entries = []
    for k, raw in enumerate(phi.entries):
        ty = normalize_type(sig, k, raw)
        match ty:
            case BaseApp(name=c, args=()):
                entries.append(_Entry("point", c))
            case IdType(base=BaseApp(name=c, args=()), left=l, right=r):
                for side in (l, r):
                    if not _point_expression(side, entries):
                        raise NonFreeSignature(
                            "path entry endpoints must be built from earlier "
                            "point variables and point constants"
                        )
                entries.append(_Entry("path", c, l, r))
            case _:
                raise NonFreeSignature(f"unsupported entry shape: {ty!r}")
    return tuple(entries)


def _point_expression(t: Term, entries: list[_Entry]) -> bool:
    match t:
        case Var(index=i):
            return i < len(entries) and entries[i].kind == "point"
        case Const(args=()):
            return True
        case _:
            return False


def _act_word(t: Term, move: dict[int, Word]) -> Word:
    """Image of a point expression under a morphism given by words at the
    point entries."""
    match t:
        case Var(index=i):
            return move.get(i, ())
        case Const():
            return ()
        case _:
            raise UnrepresentablePathImage(f"not a point expression: {t!r}")


def fundamental(
    sig: Signature, phi: Telescope, bound: int = DEFAULT_WORD_BOUND
) -> FinGroupoid:
    """The groupoid of closed elements of ``phi`` and homotopy classes of
    paths between them, over a free path signature.

    Objects are tuples: a point constant at each point entry and a reduced
    word (realized by a canonical composite term) at each path entry.
    Morphisms are tuples of reduced words at the point entries, subject to
    one commuting-square condition per path entry.
    """
    _require_free(sig)
    entries = _classify(sig, phi)
    graphs = {e.base: _path_constants(sig, e.base) for e in entries}

    def endpoint(expr: Term, obj: tuple) -> str:
        match expr:
            case Var(index=i):
                return obj[i][1] if entries[i].kind == "point" else ""
            case Const(name=c, args=()):
                return c
        raise UnrepresentablePathImage(f"not a point expression: {expr!r}")

    objects: list[tuple] = [()]
    for k, e in enumerate(entries):
        grown = []
        if e.kind == "point":
            points = _point_constants(sig, e.base)
            if not points:
                raise NoClosedPoints(f"base type {e.base} has no point constants")
            for obj in objects:
                for c in points:
                    grown.append(obj + (("pt", c),))
        else:
            for obj in objects:
                s, d = endpoint(e.left, obj), endpoint(e.right, obj)
                for w in _words_between(graphs[e.base], s, d, bound):
                    grown.append(obj + (("w", w, s, d),))
        objects = grown
    objs = tuple(objects)

    point_slots = tuple(k for k, e in enumerate(entries) if e.kind == "point")

    def hom(a: tuple, b: tuple) -> tuple[GMor, ...]:
        if a not in objs or b not in objs:
            return ()
        options: list[tuple[Word, ...]] = [()]
        for k in point_slots:
            step = []
            words = _words_between(graphs[entries[k].base], a[k][1], b[k][1], bound)
            for prefix in options:
                for w in words:
                    step.append(prefix + (w,))
            options = step
        out = []
        for choice in options:
            move = {k: w for k, w in zip(point_slots, choice)}
            if all(
                reduce_word(_act_word(entries[k].left, move) + b[k][1])
                == reduce_word(a[k][1] + _act_word(entries[k].right, move))
                for k, e in enumerate(entries)
                if e.kind == "path"
            ):
                out.append(GMor(a, b, choice))
        return tuple(out)

    def compose(second: GMor, first: GMor) -> GMor:
        assert first.dst == second.src
        data = tuple(
            reduce_word(w1 + w2) for w1, w2 in zip(first.data, second.data)
        )
        return GMor(first.src, second.dst, data)

    def identity(a: tuple) -> GMor:
        return GMor(a, a, tuple(() for _ in point_slots))

    def invert(m: GMor) -> GMor:
        return GMor(m.dst, m.src, tuple(invert_word(w) for w in m.data))

    generators = tuple(
        (k, g) for k in point_slots for g in graphs[entries[k].base]
    )
    return FinGroupoid(objs, hom, compose, identity, invert, generators)


def object_terms(sig: Signature, phi: Telescope, obj: tuple) -> tuple[Term, ...]:
    """The closed element a symbolic object stands for."""
    entries = _classify(sig, phi)
    out: list[Term] = []
    for e, part in zip(entries, obj):
        if part[0] == "pt":
            out.append(Const(part[1]))
        else:
            _, w, s, d = part
            out.append(canonical_path_term(sig, e.base, Const(s), Const(d), w))
    return tuple(out)


def object_of_terms(sig: Signature, phi: Telescope, terms: tuple[Term, ...]) -> tuple:
    """Classify a closed element into its symbolic object."""
    entries = _classify(sig, phi)
    out = []
    for k, (e, t) in enumerate(zip(entries, terms)):
        tn = normalize(sig, 0, t)
        if e.kind == "point":
            if not (isinstance(tn, Const) and not tn.args):
                raise UnrepresentablePathImage(f"not a closed point: {tn!r}")
            out.append(("pt", tn.name))
        else:
            def val(expr: Term) -> str:
                closed = normalize(sig, 0, relocate(expr, tuple(terms[:k]), 0))
                if isinstance(closed, Const) and not closed.args:
                    return closed.name
                raise UnrepresentablePathImage(f"endpoint did not close: {closed!r}")

            out.append(("w", word_of(sig, tn), val(e.left), val(e.right)))
    return tuple(out)


# ---------------------------------------------------------------------------
# The functor induced by a context morphism
# ---------------------------------------------------------------------------


def map_action(
    sig: Signature, f: ContextMorphism, bound: int = DEFAULT_WORD_BOUND
) -> GpdFunctor:
    """The induced functor between fundamental groupoids: objects map by
    substitution and normalization; morphisms map their words through the
    point components, which must be variables or constants for the action to
    stay inside the free fragment."""
    source = fundamental(sig, f.domain, bound)
    target = fundamental(sig, f.codomain, bound)
    dom_entries = _classify(sig, f.domain)
    cod_entries = _classify(sig, f.codomain)

    def on_object(obj: tuple) -> tuple:
        terms = object_terms(sig, f.domain, obj)
        image = tuple(normalize(sig, 0, relocate(c, terms, 0)) for c in f.components)
        return object_of_terms(sig, f.codomain, image)

    def on_morphism(m: GMor) -> GMor:
        move = {
            k: w
            for k, w in zip(
                (i for i, e in enumerate(dom_entries) if e.kind == "point"), m.data
            )
        }
        data = tuple(
            reduce_word(_act_word(f.components[k], move))
            for k, e in enumerate(cod_entries)
            if e.kind == "point"
        )
        return GMor(on_object(m.src), on_object(m.dst), data)

    return GpdFunctor(source, target, on_object, on_morphism)


# ---------------------------------------------------------------------------
# Model-structure predicates
# ---------------------------------------------------------------------------


def is_fibration(F: GpdFunctor) -> bool:
    """Every morphism out of an image lifts with prescribed source."""
    for a in F.source.objects:
        fa = F.on_object(a)
        for b in F.target.objects:
            for beta in F.target.hom(fa, b):
                if not any(
                    F.on_object(a2) == b and F.on_morphism(alpha) == beta
                    for a2 in F.source.objects
                    for alpha in F.source.hom(a, a2)
                ):
                    return False
    return True


def is_inj_equiv_gpd(F: GpdFunctor) -> bool:
    """Injective on objects, full, faithful, and essentially surjective."""
    images = [F.on_object(a) for a in F.source.objects]
    if len(set(images)) != len(images):
        return False
    for b in F.target.objects:
        if not any(F.target.hom(img, b) for img in images):
            return False
    for a in F.source.objects:
        for a2 in F.source.objects:
            upstairs = F.source.hom(a, a2)
            mapped = [F.on_morphism(m) for m in upstairs]
            downstairs = F.target.hom(F.on_object(a), F.on_object(a2))
            if len(set(mapped)) != len(mapped):
                return False
            if set(mapped) != set(downstairs):
                return False
    return True


# ---------------------------------------------------------------------------
# Mapping-space factorisation and the comparison functor
# ---------------------------------------------------------------------------


def path_groupoid(
    F: GpdFunctor,
) -> tuple[FinGroupoid, GpdFunctor, GpdFunctor]:
    """The mapping-space groupoid of a functor, with the injective-equivalence
    injection and the fibration projection that factor it."""
    A, B = F.source, F.target
    objects = tuple(
        (a, b, beta.data)
        for a in A.objects
        for b in B.objects
        for beta in B.hom(F.on_object(a), b)
    )

    def hom(x, y) -> tuple[GMor, ...]:
        (a, b, beta), (a2, b2, beta2) = x, y
        out = []
        for alpha in A.hom(a, a2):
            for gamma_m in B.hom(b, b2):
                lhs = B.compose(gamma_m, GMor(F.on_object(a), b, beta))
                rhs = B.compose(GMor(F.on_object(a2), b2, beta2), F.on_morphism(alpha))
                if lhs.data == rhs.data:
                    out.append(GMor(x, y, (alpha.data, gamma_m.data)))
        return tuple(out)

    def compose(second: GMor, first: GMor) -> GMor:
        a1, g1 = first.data
        a2, g2 = second.data
        alpha = A.compose(
            GMor(second.src[0], second.dst[0], a2), GMor(first.src[0], first.dst[0], a1)
        )
        gamma_m = B.compose(
            GMor(second.src[1], second.dst[1], g2), GMor(first.src[1], first.dst[1], g1)
        )
        return GMor(first.src, second.dst, (alpha.data, gamma_m.data))

    def identity(x) -> GMor:
        a, b, _ = x
        return GMor(x, x, (A.identity(a).data, B.identity(b).data))

    def invert(m: GMor) -> GMor:
        a_data, g_data = m.data
        alpha = A.invert(GMor(m.src[0], m.dst[0], a_data))
        gamma_m = B.invert(GMor(m.src[1], m.dst[1], g_data))
        return GMor(m.dst, m.src, (alpha.data, gamma_m.data))

    middle = FinGroupoid(objects, hom, compose, identity, invert)
    injection = GpdFunctor(
        A,
        middle,
        lambda a: (a, F.on_object(a), B.identity(F.on_object(a)).data),
        lambda m: GMor(
            (m.src, F.on_object(m.src), B.identity(F.on_object(m.src)).data),
            (m.dst, F.on_object(m.dst), B.identity(F.on_object(m.dst)).data),
            (m.data, F.on_morphism(m).data),
        ),
    )
    projection = GpdFunctor(
        middle,
        B,
        lambda x: x[1],
        lambda m: GMor(m.src[1], m.dst[1], m.data[1]),
    )
    return middle, injection, projection


def sigma(
    sig: Signature, f: ContextMorphism, bound: int = DEFAULT_WORD_BOUND
) -> tuple[GpdFunctor, FinGroupoid, GpdFunctor, GpdFunctor]:
    """The comparison functor from the fundamental groupoid of the mapping
    telescope to the mapping-space groupoid of the induced functor, plus the
    mapping-space factorisation it commutes with."""
    from .wfs import mapping_telescope

    F = map_action(sig, f, bound)
    middle_tele = mapping_telescope(sig, f)
    upstairs = fundamental(sig, middle_tele, bound)
    path_g, injection, projection = path_groupoid(F)

    n = len(f.domain)
    m = len(f.codomain)

    def split(obj: tuple):
        return obj[:n], obj[n : n + m], obj[n + m :]

    def on_object(obj: tuple):
        a, b, u = split(obj)
        beta = tuple(part[1] for part in u)
        return (a, b, beta)

    def on_morphism(mor: GMor):
        # Point slots of the mapping telescope are those of the domain
        # followed by those of the codomain.
        dom_points = sum(1 for e in _classify(sig, f.domain) if e.kind == "point")
        return GMor(
            on_object(mor.src),
            on_object(mor.dst),
            (mor.data[:dom_points], mor.data[dom_points:]),
        )

    comparison = GpdFunctor(upstairs, path_g, on_object, on_morphism)
    return comparison, path_g, injection, projection


def theorem62_check(sig: Signature, f: ContextMorphism, cert, bound: int = DEFAULT_WORD_BOUND):
    """Validate a map-class certificate and confirm the matching groupoid
    property of the induced functor; returns (certificate report, predicate
    outcome, predicate name)."""
    from .wfs import CheckReport, InjEquivCert, IsofibCert, check_inj_equiv, check_isofib

    F = map_action(sig, f, bound)
    if isinstance(cert, InjEquivCert):
        report = check_inj_equiv(sig, f, cert)
        return report, is_inj_equiv_gpd(F), "injective-equivalence"
    if isinstance(cert, IsofibCert):
        report = check_isofib(sig, f, cert)
        return report, is_fibration(F), "fibration"
    raise TypeError(f"unknown certificate kind: {cert!r}")
