"""Surface language: parsing, name resolution, and printing.

Source files declare a signature and named telescopes, elements, morphisms
and squares:

    type A;
    type B(x : A);
    const a : A;
    const p : Id A a b;
    ctx Phi := (x : A, y : A, u : Id A x y);
    ctx Omega[Phi] := (z : B(x));
    elem pt : Phi := (a, a, r(a));
    mor f : Phi -> Psi := (t1, t2);
    square S := (top, left, right, bottom);

Terms are written paper-style: variables and constants by name, ``r(t)`` for
reflexivity, and ``J(a, b, p, [x] e)`` for elimination, optionally with
explicit auxiliary instance arguments after a semicolon.  A declaration whose
body contains ``J`` carries one ``with motive`` clause per occurrence, in
source order, giving the generic context (three entries, then any auxiliary
declarations) and the motive type:

    mor inv : P -> Q := (J(a, b, p, [x] r(x)))
      with motive (x : A, y : A, u : Id A x y) : Id A y x;

Parsing then printing then parsing is a fixpoint on well-formed files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DuplicateName, SurfaceSyntaxError
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
)

__all__ = [
    "SourceFile",
    "SquareDecl",
    "parse",
    "print_source",
    "print_term",
    "print_type",
    "print_telescope",
]


@dataclass(frozen=True, slots=True)
class SquareDecl:
    top: str
    left: str
    right: str
    bottom: str


@dataclass
class SourceFile:
    """Elaborated declarations of one source file, in order."""

    signature: Signature = Signature()
    contexts: dict[str, tuple[str | None, Telescope]] = field(default_factory=dict)
    elements: dict[str, tuple[str, tuple[Term, ...]]] = field(default_factory=dict)
    morphisms: dict[str, tuple[str, str, ContextMorphism]] = field(default_factory=dict)
    squares: dict[str, SquareDecl] = field(default_factory=dict)
    motives: dict[str, tuple] = field(default_factory=dict)  # decl name -> clauses
    order: list[tuple[str, str]] = field(default_factory=list)

    def context(self, name: str) -> Telescope:
        return self.contexts[name][1]

    def full_context(self, name: str | None) -> Telescope:
        """The context with its ambient chain prepended."""
        if name is None:
            return Telescope()
        ambient, tele = self.contexts[name]
        return self.full_context(ambient).concat(tele)


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+|--[^\n]*)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<assign>:=)"
    r"|(?P<arrow>->)|(?P<punct>[():,;\[\]|])"
)


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SurfaceSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind in ("punct", "arrow", "assign"):
                kind = chunk
            toks.append(_Tok(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.at = 0

    def peek(self) -> _Tok:
        return self.toks[self.at]

    def next(self) -> _Tok:
        t = self.toks[self.at]
        self.at += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise SurfaceSyntaxError(f"expected {kind!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_name(self, what: str = "name") -> _Tok:
        t = self.next()
        if t.kind != "name":
            raise SurfaceSyntaxError(f"expected a {what}, found {t.text!r}", t.line, t.col)
        return t


# ---------------------------------------------------------------------------
# Parsing and elaboration
# ---------------------------------------------------------------------------


def parse(text: str) -> SourceFile:
    p = _Parser(text)
    out = SourceFile()
    while p.peek().kind != "eof":
        _declaration(p, out)
    return out


def _declared(out: SourceFile, tok: _Tok) -> None:
    name = tok.text
    taken = (
        out.signature.type_decl(name) is not None
        or out.signature.const_decl(name) is not None
        or name in out.contexts
        or name in out.elements
        or name in out.morphisms
        or name in out.squares
    )
    if taken:
        raise DuplicateName(f"{name!r} is already declared", tok.line, tok.col)


def _declaration(p: _Parser, out: SourceFile) -> None:
    t = p.expect_name("declaration keyword")
    if t.text == "type":
        name = p.expect_name()
        _declared(out, name)
        params = _binders(p, out, ()) if p.peek().kind == "(" else Telescope()
        p.expect(";")
        out.signature = out.signature.with_type(name.text, params)
        out.order.append(("type", name.text))
    elif t.text == "const":
        name = p.expect_name()
        _declared(out, name)
        params = _binders(p, out, ()) if p.peek().kind == "(" else Telescope()
        p.expect(":")
        ty = _type(p, out, tuple(params.names) if params.entries else ())
        p.expect(";")
        out.signature = out.signature.with_const(name.text, ty, params)
        out.order.append(("const", name.text))
    elif t.text == "ctx":
        name = p.expect_name()
        _declared(out, name)
        ambient: str | None = None
        if p.peek().kind == "[":
            p.next()
            amb = p.expect_name("context name")
            if amb.text not in out.contexts:
                raise SurfaceSyntaxError(f"unknown ambient context {amb.text!r}", amb.line, amb.col)
            ambient = amb.text
            p.expect("]")
        p.expect(":=")
        env = tuple(out.full_context(ambient).names)
        tele = _binders(p, out, env)
        p.expect(";")
        out.contexts[name.text] = (ambient, tele)
        out.order.append(("ctx", name.text))
    elif t.text == "elem":
        name = p.expect_name()
        _declared(out, name)
        p.expect(":")
        ctx = p.expect_name("context name")
        if ctx.text not in out.contexts:
            raise SurfaceSyntaxError(f"unknown context {ctx.text!r}", ctx.line, ctx.col)
        p.expect(":=")
        terms, clauses = _term_tuple(p, out, ())
        p.expect(";")
        out.elements[name.text] = (ctx.text, terms())
        if clauses:
            out.motives[name.text] = tuple(clauses)
        out.order.append(("elem", name.text))
    elif t.text == "mor":
        name = p.expect_name()
        _declared(out, name)
        p.expect(":")
        dom = p.expect_name("context name")
        p.expect("->")
        cod = p.expect_name("context name")
        for c in (dom, cod):
            if c.text not in out.contexts:
                raise SurfaceSyntaxError(f"unknown context {c.text!r}", c.line, c.col)
        p.expect(":=")
        env = tuple(out.contexts[dom.text][1].names)
        terms, clauses = _term_tuple(p, out, env)
        p.expect(";")
        mor = ContextMorphism(out.contexts[dom.text][1], out.contexts[cod.text][1], terms())
        out.morphisms[name.text] = (dom.text, cod.text, mor)
        if clauses:
            out.motives[name.text] = tuple(clauses)
        out.order.append(("mor", name.text))
    elif t.text == "square":
        name = p.expect_name()
        _declared(out, name)
        p.expect(":=")
        p.expect("(")
        sides = []
        for k in range(4):
            if k:
                p.expect(",")
            side = p.expect_name("morphism name")
            if side.text not in out.morphisms:
                raise SurfaceSyntaxError(f"unknown morphism {side.text!r}", side.line, side.col)
            sides.append(side.text)
        p.expect(")")
        p.expect(";")
        out.squares[name.text] = SquareDecl(*sides)
        out.order.append(("square", name.text))
    else:
        raise SurfaceSyntaxError(f"unknown declaration {t.text!r}", t.line, t.col)


def _binders(p: _Parser, out: SourceFile, env: tuple[str, ...]) -> Telescope:
    p.expect("(")
    entries: list[TypeExpr] = []
    names: list[str] = []
    while True:
        nm = p.expect_name("variable name")
        if nm.text in env or nm.text in names:
            raise DuplicateName(f"variable {nm.text!r} shadows an earlier one", nm.line, nm.col)
        p.expect(":")
        ty = _type(p, out, env + tuple(names))
        names.append(nm.text)
        entries.append(ty)
        if p.peek().kind == ",":
            p.next()
            continue
        break
    p.expect(")")
    return Telescope(tuple(entries), tuple(names))


def _term_tuple(p: _Parser, out: SourceFile, env: tuple[str, ...]):
    """Parse a parenthesized term tuple plus its trailing motive clauses;
    returns a thunk producing the resolved terms, and the clause records."""
    slots: list[dict] = []
    p.expect("(")
    raws = [_term_raw(p, out, env, slots)]
    while p.peek().kind == ",":
        p.next()
        raws.append(_term_raw(p, out, env, slots))
    p.expect(")")

    # One clause per eliminator, in source order; each clause's context is
    # read against the environment the eliminator appeared in.
    for slot in slots:
        if p.peek().kind == "name" and p.peek().text == "with":
            p.next()
            kw = p.expect_name()
            if kw.text != "motive":
                raise SurfaceSyntaxError("expected 'motive'", kw.line, kw.col)
            binders = _binders(p, out, slot["env"])
            if len(binders) < 3:
                raise SurfaceSyntaxError(
                    "a motive context needs at least the three generic entries",
                    slot["line"],
                    slot["col"],
                )
            p.expect(":")
            motive = _type(p, out, slot["env"] + tuple(binders.names))
            slot["clause"] = (binders, motive)
        else:
            raise SurfaceSyntaxError(
                "eliminator without a motive clause", slot["line"], slot["col"]
            )
    if p.peek().kind == "name" and p.peek().text == "with":
        tok = p.peek()
        raise SurfaceSyntaxError("more motive clauses than eliminators", tok.line, tok.col)

    # Resolve inner eliminators first so outer bodies see finished nodes.
    for slot in reversed(slots):
        _fill_j(out, slot)

    return (lambda: tuple(_resolve(out, r, env) for r in raws)), slots


def _fill_j(out: SourceFile, slot: dict) -> None:
    binders, motive = slot["clause"]
    env = slot["env"]
    theta = Telescope(binders.entries[3:], binders.names[3:])
    body_env = env + (slot["binder"],) + tuple(theta.names)
    body = _resolve(out, slot["body"], body_env)
    args = tuple(_resolve(out, a, env) for a in slot["args"])
    if len(args) != len(theta):
        raise SurfaceSyntaxError(
            f"eliminator takes {len(theta)} instance arguments, got {len(args)}",
            slot["line"],
            slot["col"],
        )
    slot["node"] = {
        "theta": theta,
        "motive": motive,
        "body": body,
        "args": args,
        "base": len(env),
    }


def _term_raw(p: _Parser, out: SourceFile, env: tuple[str, ...], slots: list):
    t = p.peek()
    if t.kind == "(":
        p.next()
        inner = _term_raw(p, out, env, slots)
        p.expect(")")
        return inner
    tok = p.expect_name("term")
    if tok.text == "r":
        p.expect("(")
        inner = _term_raw(p, out, env, slots)
        p.expect(")")
        return ("refl", inner)
    if tok.text == "J":
        slot: dict = {"line": tok.line, "col": tok.col, "env": env, "clause": None}
        slots.append(slot)  # source order: this keyword precedes its children
        p.expect("(")
        left = _term_raw(p, out, env, slots)
        p.expect(",")
        right = _term_raw(p, out, env, slots)
        p.expect(",")
        path = _term_raw(p, out, env, slots)
        p.expect(",")
        p.expect("[")
        binder = p.expect_name("binder")
        p.expect("]")
        body = _term_raw(p, out, env + (binder.text,), slots)
        args = []
        if p.peek().kind == ";":
            p.next()
            args.append(_term_raw(p, out, env, slots))
            while p.peek().kind == ",":
                p.next()
                args.append(_term_raw(p, out, env, slots))
        p.expect(")")
        slot.update(binder=binder.text, body=body, args=tuple(args), left=left, right=right, path=path)
        return ("J", slot)
    if p.peek().kind == "(":
        p.next()
        args = [_term_raw(p, out, env, slots)]
        while p.peek().kind == ",":
            p.next()
            args.append(_term_raw(p, out, env, slots))
        p.expect(")")
        return ("app", tok, tuple(args))
    return ("name", tok)


def _resolve(out: SourceFile, raw, env: tuple[str, ...]) -> Term:
    match raw:
        case ("name", tok):
            if tok.text in env:
                return Var(len(env) - 1 - tuple(reversed(env)).index(tok.text))
            if out.signature.const_decl(tok.text) is not None:
                return Const(tok.text)
            raise SurfaceSyntaxError(f"unknown name {tok.text!r}", tok.line, tok.col)
        case ("app", tok, raw_args):
            if out.signature.const_decl(tok.text) is None:
                raise SurfaceSyntaxError(f"unknown constant {tok.text!r}", tok.line, tok.col)
            return Const(tok.text, tuple(_resolve(out, a, env) for a in raw_args))
        case ("refl", inner):
            return Refl(_resolve(out, inner, env))
        case ("J", slot):
            node = slot.get("node")
            if node is None:
                raise SurfaceSyntaxError(
                    "eliminator without a motive clause", slot["line"], slot["col"]
                )
            return J(
                _resolve(out, slot["left"], slot["env"]),
                _resolve(out, slot["right"], slot["env"]),
                _resolve(out, slot["path"], slot["env"]),
                node["theta"],
                node["motive"],
                node["body"],
                node["args"],
                node["base"],
            )
        case _:
            raise TypeError(f"bad raw term {raw!r}")


def _type(p: _Parser, out: SourceFile, env: tuple[str, ...]) -> TypeExpr:
    if p.peek().kind == "(":
        p.next()
        inner = _type(p, out, env)
        p.expect(")")
        return inner
    tok = p.expect_name("type")
    if tok.text == "Id":
        base = _type_atom(p, out, env)
        left = _term_atom(p, out, env)
        right = _term_atom(p, out, env)
        return IdType(base, left, right)
    if out.signature.type_decl(tok.text) is None:
        raise SurfaceSyntaxError(f"unknown type {tok.text!r}", tok.line, tok.col)
    args: tuple[Term, ...] = ()
    if p.peek().kind == "(":
        p.next()
        slots: list = []
        raws = [_term_raw(p, out, env, slots)]
        while p.peek().kind == ",":
            p.next()
            raws.append(_term_raw(p, out, env, slots))
        p.expect(")")
        if slots:
            raise SurfaceSyntaxError(
                "eliminators are not allowed in type arguments", tok.line, tok.col
            )
        args = tuple(_resolve(out, r, env) for r in raws)
    return BaseApp(tok.text, args)


def _type_atom(p: _Parser, out: SourceFile, env: tuple[str, ...]) -> TypeExpr:
    if p.peek().kind == "(":
        p.next()
        inner = _type(p, out, env)
        p.expect(")")
        return inner
    tok = p.expect_name("type")
    if out.signature.type_decl(tok.text) is None:
        raise SurfaceSyntaxError(f"unknown type {tok.text!r}", tok.line, tok.col)
    return BaseApp(tok.text)


def _term_atom(p: _Parser, out: SourceFile, env: tuple[str, ...]) -> Term:
    slots: list = []
    raw = _term_raw(p, out, env, slots)
    if slots:
        tok = p.peek()
        raise SurfaceSyntaxError("eliminators are not allowed in type endpoints", tok.line, tok.col)
    return _resolve(out, raw, env)


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def _fresh(env: tuple[str, ...]) -> str:
    name = "w"
    while name in env:
        name += "'"
    return name


def print_term(t: Term, env: tuple[str, ...]) -> str:
    match t:
        case Var(index=i):
            return env[i] if i < len(env) else f"v{i}"
        case Const(name=c, args=()):
            return c
        case Const(name=c, args=a):
            return f"{c}({', '.join(print_term(x, env) for x in a)})"
        case Refl(subject=s):
            return f"r({print_term(s, env)})"
        case J():
            base_env = env[: t.base]
            binder = _fresh(base_env)
            names = base_env + (binder,) + tuple(t.theta.names)
            body = print_term(t.body, names)
            head = ", ".join(print_term(x, base_env) for x in (t.left, t.right, t.path))
            if t.args:
                args = ", ".join(print_term(x, base_env) for x in t.args)
                return f"J({head}, [{binder}] {body}; {args})"
            return f"J({head}, [{binder}] {body})"
        case _:
            raise TypeError(f"cannot print {t!r}")


def print_type(ty: TypeExpr, env: tuple[str, ...]) -> str:
    match ty:
        case BaseApp(name=c, args=()):
            return c
        case BaseApp(name=c, args=a):
            return f"{c}({', '.join(print_term(x, env) for x in a)})"
        case IdType(base=b, left=l, right=r):
            base = print_type(b, env)
            if isinstance(b, (IdType, BaseApp)) and (isinstance(b, IdType) or b.args):
                base = f"({base})"
            return f"Id {base} {_atomize(print_term(l, env))} {_atomize(print_term(r, env))}"
        case _:
            raise TypeError(f"cannot print {ty!r}")


def _atomize(text: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", text):
        return text
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*\(.*\)", text) and _balanced_call(text):
        return text
    return f"({text})"


def _balanced_call(text: str) -> bool:
    depth = 0
    opened = False
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
            opened = True
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(text) - 1:
                return False
    return opened and depth == 0


def print_telescope(tele: Telescope, env: tuple[str, ...]) -> str:
    parts = []
    names = tuple(env)
    for nm, e in zip(tele.names, tele.entries):
        parts.append(f"{nm} : {print_type(e, names)}")
        names += (nm,)
    return "(" + ", ".join(parts) + ")"


def _print_motive_clauses(out: SourceFile, name: str) -> str:
    text = ""
    for slot in out.motives.get(name, ()):
        binders, motive = slot["clause"]
        env = slot["env"]
        ctx = print_telescope(binders, env)
        text += f"\n  with motive {ctx} : {print_type(motive, env + tuple(binders.names))}"
    return text


def print_source(out: SourceFile) -> str:
    lines = []
    for kind, name in out.order:
        if kind == "type":
            d = out.signature.type_decl(name)
            params = "" if not d.params.entries else print_telescope(d.params, ())
            lines.append(f"type {name}{params};")
        elif kind == "const":
            d = out.signature.const_decl(name)
            params = "" if not d.params.entries else print_telescope(d.params, ())
            env = tuple(d.params.names) if d.params.entries else ()
            lines.append(f"const {name}{params} : {print_type(d.type, env)};")
        elif kind == "ctx":
            ambient, tele = out.contexts[name]
            env = tuple(out.full_context(ambient).names)
            amb = f"[{ambient}]" if ambient else ""
            lines.append(f"ctx {name}{amb} := {print_telescope(tele, env)};")
        elif kind == "elem":
            ctx, terms = out.elements[name]
            body = ", ".join(print_term(t, ()) for t in terms)
            lines.append(f"elem {name} : {ctx} := ({body}){_print_motive_clauses(out, name)};")
        elif kind == "mor":
            dom, cod, mor = out.morphisms[name]
            env = tuple(mor.domain.names)
            body = ", ".join(print_term(t, env) for t in mor.components)
            lines.append(
                f"mor {name} : {dom} -> {cod} := ({body}){_print_motive_clauses(out, name)};"
            )
        elif kind == "square":
            s = out.squares[name]
            lines.append(f"square {name} := ({s.top}, {s.left}, {s.right}, {s.bottom});")
    return "\n".join(lines) + "\n"
