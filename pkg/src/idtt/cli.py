"""Command-line driver.

Each command reads a source file, runs its checks, and emits one
line-delimited JSON record per verified claim: ``{"name", "verdict",
"detail"}`` with verdict PASS or FAIL (``--pretty`` renders a table
instead).  The exit status is 0 exactly when every record is PASS.
Certificates written with ``--emit-cert`` re-check from a cold process via
``classify`` or ``recheck``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernel
from .certs import (
    derivation_to_json,
    morphism_from_json,
    morphism_to_json,
    telescope_from_json,
    telescope_to_json,
    term_from_json,
    term_to_json,
    unwrap,
    wrap,
)
from .errors import IdttError
from .gpd import (
    fundamental,
    functor_equal,
    is_fibration,
    is_inj_equiv_gpd,
    map_action,
    sigma,
)
from .kernel import (
    check_element,
    check_morphism,
    check_telescope,
    compose_mor,
    def_eq,
    identity_mor,
    mor_equal,
    validate_signature,
)
from .paths import htpy_check
from .surface import SourceFile, parse, print_telescope, print_term
from .syntax import ContextMorphism, Signature, Telescope, Var, relocate, var_tuple
from .wfs import (
    FactorInjection,
    InjEquivCert,
    IsofibCert,
    Square,
    check_inj_equiv,
    check_isofib,
    composite_defect,
    factorize,
    fill,
    id_morphism_action,
    isofib_from_fill,
    mor_equal as _mor_equal,
    projection_view,
    stability_transfer,
)


class Reporter:
    def __init__(self, pretty: bool):
        self.records: list[dict] = []
        self.pretty = pretty

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.records.append(
            {"name": name, "verdict": "PASS" if ok else "FAIL", "detail": detail}
        )

    def merge(self, prefix: str, report) -> None:
        for name, ok, detail in report.entries:
            self.add(f"{prefix}:{name}", ok, detail)

    def finish(self) -> int:
        if self.pretty:
            width = max((len(r["name"]) for r in self.records), default=4)
            for r in self.records:
                line = f"{r['name']:<{width}}  {r['verdict']}"
                if r["detail"]:
                    line += f"  {r['detail']}"
                print(line)
        else:
            for r in self.records:
                print(json.dumps(r))
        return 0 if all(r["verdict"] == "PASS" for r in self.records) else 1


def _load(path: str) -> SourceFile:
    return parse(Path(path).read_text())


def _need(mapping: dict, name: str, what: str):
    if name not in mapping:
        raise IdttError(f"no {what} named {name!r}")
    return mapping[name]


def _get_mor(src: SourceFile, name: str) -> ContextMorphism:
    return _need(src.morphisms, name, "morphism")[2]


def _square(sig: Signature, src: SourceFile, name: str) -> Square:
    decl = _need(src.squares, name, "square")
    return Square.make(
        sig,
        _get_mor(src, decl.top),
        _get_mor(src, decl.left),
        _get_mor(src, decl.right),
        _get_mor(src, decl.bottom),
    )


def detect_factor_injection(sig: Signature, left: ContextMorphism) -> ContextMorphism | None:
    """Recover the morphism whose factorisation injection ``left`` is, if any."""
    n, L = len(left.domain), len(left.codomain)
    if (L - n) % 2 or L <= n:
        return None
    m = (L - n) // 2
    middle = left.codomain
    entries = []
    for k in range(m):
        entry = middle[n + k]
        entries.append(relocate(entry, (Var(0),) * n + var_tuple(0, k), k))
    psi = Telescope(tuple(entries), middle.names[n : n + m])
    candidate = ContextMorphism(left.domain, psi, left.components[n : n + m])
    try:
        fact = factorize(sig, candidate)
    except IdttError:
        return None
    if _mor_equal(sig, fact.injection, left) and kernel.tele_equal(
        sig, Telescope(), fact.middle, middle
    ):
        return candidate
    return None


def _write_cert(path: str | None, blob: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(blob, indent=1) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_check(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    items = []
    validate_signature(sig)
    rep.add("signature", True, f"{len(sig.decls)} declarations")
    empty = Telescope()
    for kind, name in src.order:
        try:
            if kind == "ctx":
                ambient, tele = src.contexts[name]
                deriv = check_telescope(sig, src.full_context(ambient), tele)
                items.append({"kind": "ctx", "ambient": telescope_to_json(src.full_context(ambient)), "tele": telescope_to_json(tele), "derivation": derivation_to_json(deriv)})
                rep.add(f"ctx:{name}", True)
            elif kind == "elem":
                ctx, terms = src.elements[name]
                deriv = check_element(sig, empty, terms, src.context(ctx))
                items.append({"kind": "elem", "tele": telescope_to_json(src.context(ctx)), "terms": [term_to_json(t) for t in terms], "derivation": derivation_to_json(deriv)})
                rep.add(f"elem:{name}", True)
            elif kind == "mor":
                mor = src.morphisms[name][2]
                deriv = check_morphism(sig, mor)
                items.append({"kind": "mor", "morphism": morphism_to_json(mor), "derivation": derivation_to_json(deriv)})
                rep.add(f"mor:{name}", True)
            elif kind == "square":
                _square(sig, src, name)
                rep.add(f"square:{name}", True, "commutes")
        except IdttError as e:
            rep.add(f"{kind}:{name}", False, str(e))
    _write_cert(args.emit_cert, wrap(sig, "check", {"items": items}))


def cmd_factor(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    fact = factorize(sig, f)
    rep.add(
        "factorisation",
        True,
        f"middle {print_telescope(fact.middle, ())}",
    )
    env = tuple(f.domain.names)
    rep.add("injection", True, ", ".join(print_term(t, env) for t in fact.injection.components))
    rep.add(
        "recomposes",
        mor_equal(sig, compose_mor(sig, fact.projection, fact.injection), f),
        "projection . injection = morphism",
    )
    rep.add("projection-structure", projection_view(sig, fact.projection) is not None,
            "projection is a dependent projection up to reordering")
    _write_cert(
        args.emit_cert,
        wrap(sig, "factorisation", {
            "source": morphism_to_json(f),
            "injection": morphism_to_json(fact.injection),
            "projection": morphism_to_json(fact.projection),
        }),
    )


def cmd_fill(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    square = _square(sig, src, args.square)
    g = detect_factor_injection(sig, square.left)
    if g is None:
        rep.add("left-class-evidence", False, "left map is not a factorisation injection")
        return
    rep.add("left-class-evidence", True)
    filler = fill(sig, square, FactorInjection(g))
    rep.merge("filler", square.check_filler(sig, filler))
    env = tuple(square.bottom.domain.names)
    rep.add("filler-term", True, ", ".join(print_term(t, env) for t in filler.components))
    _write_cert(
        args.emit_cert,
        wrap(sig, "filler", {
            "top": morphism_to_json(square.top),
            "left": morphism_to_json(square.left),
            "right": morphism_to_json(square.right),
            "bottom": morphism_to_json(square.bottom),
            "filler": morphism_to_json(filler),
        }),
    )


def cmd_idctx(args, rep: Reporter) -> None:
    from .idcontexts import id_telescope

    src = _load(args.file)
    sig = src.signature
    tele = _need(src.contexts, args.ctx, "context")[1]
    left = _need(src.elements, args.left, "element")[1]
    right = _need(src.elements, args.right, "element")[1]
    tid = id_telescope(sig, Telescope(), tele, left, right)
    check_telescope(sig, Telescope(), tid.telescope)
    rep.add("identity-context", True, print_telescope(tid.telescope, ()))


def cmd_transport(args, rep: Reporter) -> None:
    from .idcontexts import id_telescope, transport
    from .syntax import shift_tail

    src = _load(args.file)
    sig = src.signature
    phi = _need(src.contexts, args.ctx, "context")[1]
    omega_decl = _need(src.contexts, args.family, "context")
    if omega_decl[0] != args.ctx:
        raise IdttError(f"family {args.family!r} must be declared over {args.ctx!r}")
    omega = omega_decl[1]
    a = _need(src.elements, args.left, "element")[1]
    b = _need(src.elements, args.right, "element")[1]
    p = _need(src.elements, args.path, "element")[1]
    e = _need(src.elements, args.elem, "element")[1]
    moved = transport(sig, Telescope(), phi, a, b, p, omega, e)
    target = relocate(omega, var_tuple(0, 0) + b, 0)
    check_element(sig, Telescope(), moved, target)
    rep.add("transport", True, ", ".join(print_term(t, ()) for t in moved))


def cmd_classify(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    blob = json.loads(Path(args.cert).read_text())
    kind, payload = unwrap(sig, blob)
    if kind == "inj-equiv":
        cert = InjEquivCert(
            morphism_from_json(payload["section"]),
            tuple(term_from_json(t) for t in payload["counit"]),
        )
        rep.merge("left-class", check_inj_equiv(sig, f, cert))
    elif kind == "isofib":
        cert = IsofibCert(tuple(term_from_json(t) for t in payload["lift"]))
        rep.merge("right-class", check_isofib(sig, f, cert))
    else:
        raise IdttError(f"certificate kind {kind!r} does not classify a morphism")


def cmd_certify(args, rep: Reporter) -> None:
    """Synthesize a class certificate: the left-class one for a factorisation
    injection, the right-class one for a projection-like morphism."""
    from .wfs import extract_inj_equiv

    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    g = detect_factor_injection(sig, f)
    if g is not None:
        fact = factorize(sig, f)
        square = Square.make(sig, fact.injection, f, fact.projection, identity_mor(f.codomain))
        filler = fill(sig, square, FactorInjection(g))
        cert = extract_inj_equiv(sig, f, filler)
        rep.merge("left-class", check_inj_equiv(sig, f, cert))
        _write_cert(args.emit_cert, wrap(sig, "inj-equiv", {
            "morphism": morphism_to_json(f),
            "section": morphism_to_json(cert.section),
            "counit": [term_to_json(t) for t in cert.counit],
        }))
        return
    if projection_view(sig, f) is not None:
        cert = isofib_from_fill(sig, f)
        rep.merge("right-class", check_isofib(sig, f, cert))
        _write_cert(args.emit_cert, wrap(sig, "isofib", {
            "morphism": morphism_to_json(f),
            "lift": [term_to_json(t) for t in cert.lift],
        }))
        return
    rep.add("certify", False, "morphism is neither an injection nor projection-like")


def cmd_stability(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    ext_decl = _need(src.contexts, args.ext, "context")
    ext = ext_decl[1]
    if not kernel.tele_equal(sig, Telescope(), src.full_context(ext_decl[0]), f.codomain):
        raise IdttError(
            f"extension {args.ext!r} must be declared over the codomain of {args.mor!r}"
        )
    blob = json.loads(Path(args.cert).read_text())
    kind, payload = unwrap(sig, blob)
    if kind != "inj-equiv":
        raise IdttError("stability transfer needs a left-class certificate")
    cert = InjEquivCert(
        morphism_from_json(payload["section"]),
        tuple(term_from_json(t) for t in payload["counit"]),
    )
    rep.merge("input", check_inj_equiv(sig, f, cert))
    pulled, moved = stability_transfer(sig, f, cert, ext)
    rep.merge("transferred", check_inj_equiv(sig, pulled, moved))
    _write_cert(args.emit_cert, wrap(sig, "inj-equiv", {
        "morphism": morphism_to_json(pulled),
        "section": morphism_to_json(moved.section),
        "counit": [term_to_json(t) for t in moved.counit],
    }))


def cmd_gpd(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    tele = _need(src.contexts, args.ctx, "context")[1]
    G = fundamental(sig, tele, args.word_bound)
    rep.add("objects", True, f"{len(G.objects)}: {list(G.objects)}")
    rep.add("generators", True, str(list(G.generators)))
    for a in G.objects:
        for b in G.objects:
            n = len(G.hom(a, b))
            if n:
                rep.add(f"hom {a} -> {b}", True, f"{n} morphisms")


def cmd_functor(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    F = map_action(sig, f, args.word_bound)
    table = [(a, F.on_object(a)) for a in F.source.objects]
    for a, fa in table:
        rep.add(f"object {a}", True, f"-> {fa}")
    laws = all(
        F.on_morphism(F.source.compose(m2, m1)).data
        == F.target.compose(F.on_morphism(m2), F.on_morphism(m1)).data
        for a in F.source.objects
        for b in F.source.objects
        for m1 in F.source.hom(a, b)
        for c in F.source.objects
        for m2 in F.source.hom(b, c)
    )
    rep.add("preserves-composition", laws)
    idl = all(
        F.on_morphism(F.source.identity(a)).data == F.target.identity(F.on_object(a)).data
        for a in F.source.objects
    )
    rep.add("preserves-identities", idl)
    _write_cert(args.emit_cert, wrap(sig, "functor", {
        "morphism": morphism_to_json(f),
        "objects": [[list(map(list, a)), list(map(list, fa))] for a, fa in table],
    }))


def cmd_sigma(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.mor)
    comparison, path_g, injection, projection = sigma(sig, f, args.word_bound)
    F = map_action(sig, f, args.word_bound)
    fact = factorize(sig, f)
    Fi = map_action(sig, fact.injection, args.word_bound)
    Fp = map_action(sig, fact.projection, args.word_bound)
    from .gpd import GpdFunctor

    through_i = GpdFunctor(
        Fi.source,
        path_g,
        lambda a: comparison.on_object(Fi.on_object(a)),
        lambda m: comparison.on_morphism(Fi.on_morphism(m)),
    )
    rep.add("upper-triangle", functor_equal(through_i, injection),
            "comparison . injection-image = mapping-space injection")
    through_p = GpdFunctor(
        comparison.source,
        Fp.target,
        lambda a: projection.on_object(comparison.on_object(a)),
        lambda m: projection.on_morphism(comparison.on_morphism(m)),
    )
    direct_p = GpdFunctor(comparison.source, Fp.target, Fp.on_object, Fp.on_morphism)
    rep.add("lower-triangle", functor_equal(through_p, direct_p),
            "projection . comparison = projection-image")
    images = {comparison.on_object(o) for o in comparison.source.objects}
    rep.add("surjective-on-objects", images == set(path_g.objects),
            f"{len(comparison.source.objects)} objects onto {len(path_g.objects)}")
    rep.add("equivalence", is_inj_equiv_gpd(comparison) or _essentially(comparison),
            "full, faithful, essentially surjective")


def _essentially(F) -> bool:
    # Surjective-on-objects equivalences need not be injective on objects;
    # check fullness, faithfulness and essential surjectivity only.
    for b in F.target.objects:
        if not any(F.target.hom(F.on_object(a), b) for a in F.source.objects):
            return False
    for a in F.source.objects:
        for a2 in F.source.objects:
            mapped = [F.on_morphism(m) for m in F.source.hom(a, a2)]
            downstairs = F.target.hom(F.on_object(a), F.on_object(a2))
            if len(set(mapped)) != len(mapped) or set(mapped) != set(downstairs):
                return False
    return True


def cmd_defect(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    f = _get_mor(src, args.f)
    g = _get_mor(src, args.g)
    sq1 = Square.make(sig, f, identity_mor(f.domain), identity_mor(f.codomain), f)
    sq2 = Square.make(sig, g, identity_mor(g.domain), identity_mor(g.codomain), g)
    stepwise, direct, agree, witness = composite_defect(sig, sq1, sq2)
    rep.add("composite-actions-differ-definitionally", not agree,
            "definitional: NO" if not agree else "definitional: YES")
    try:
        htpy_check(sig, witness)
        rep.add("homotopy-witness", True, "propositional: YES")
    except IdttError as e:
        rep.add("homotopy-witness", False, str(e))


def cmd_recheck(args, rep: Reporter) -> None:
    src = _load(args.file)
    sig = src.signature
    blob = json.loads(Path(args.cert).read_text())
    kind, payload = unwrap(sig, blob)
    rep.add("signature-hash", True, "matches")
    empty = Telescope()
    if kind == "check":
        for k, item in enumerate(payload["items"]):
            if item["kind"] == "ctx":
                check_telescope(sig, telescope_from_json(item["ambient"]), telescope_from_json(item["tele"]))
            elif item["kind"] == "elem":
                check_element(sig, empty, tuple(term_from_json(t) for t in item["terms"]), telescope_from_json(item["tele"]))
            elif item["kind"] == "mor":
                check_morphism(sig, morphism_from_json(item["morphism"]))
            rep.add(f"item[{k}]:{item['kind']}", True)
    elif kind == "factorisation":
        f = morphism_from_json(payload["source"])
        fact = factorize(sig, f)
        rep.add("injection", mor_equal(sig, fact.injection, morphism_from_json(payload["injection"])))
        rep.add("projection", mor_equal(sig, fact.projection, morphism_from_json(payload["projection"])))
        rep.add("recomposes", mor_equal(sig, compose_mor(sig, fact.projection, fact.injection), f))
    elif kind == "filler":
        square = Square.make(
            sig,
            morphism_from_json(payload["top"]),
            morphism_from_json(payload["left"]),
            morphism_from_json(payload["right"]),
            morphism_from_json(payload["bottom"]),
        )
        rep.merge("filler", square.check_filler(sig, morphism_from_json(payload["filler"])))
    elif kind == "inj-equiv":
        f = morphism_from_json(payload["morphism"])
        cert = InjEquivCert(
            morphism_from_json(payload["section"]),
            tuple(term_from_json(t) for t in payload["counit"]),
        )
        rep.merge("left-class", check_inj_equiv(sig, f, cert))
    elif kind == "isofib":
        f = morphism_from_json(payload["morphism"])
        cert = IsofibCert(tuple(term_from_json(t) for t in payload["lift"]))
        rep.merge("right-class", check_isofib(sig, f, cert))
    elif kind == "functor":
        f = morphism_from_json(payload["morphism"])
        F = map_action(sig, f)
        stored = {
            tuple(tuple(x) for x in a): tuple(tuple(x) for x in fa)
            for a, fa in (tuple(pair) for pair in payload["objects"])
        }
        def norm(o):
            return tuple(
                (p[0], tuple(tuple(l) for l in p[1]), p[2], p[3]) if p[0] == "w" else tuple(p)
                for p in o
            )
        recomputed = {norm(a): norm(F.on_object(a)) for a in F.source.objects}
        stored = {norm(a): norm(fa) for a, fa in stored.items()}
        rep.add("object-table", recomputed == stored)
    else:
        raise IdttError(f"unknown certificate kind {kind!r}")


def main(argv: list[str] | None = None) -> int:
    top = argparse.ArgumentParser(prog="idtt", description=__doc__)
    top.add_argument("--pretty", action="store_true", help="human-readable report")
    top.add_argument("--max-steps", type=int, default=None, help="normalization step budget")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, *params, **flags):
        p = sub.add_parser(name)
        p.add_argument("file")
        for x in params:
            p.add_argument(x)
        for flag, kw in flags.items():
            p.add_argument(f"--{flag.replace('_', '-')}", **kw)
        p.set_defaults(fn=fn)
        return p

    add("check", cmd_check, emit_cert={"default": None})
    add("factor", cmd_factor, "mor", emit_cert={"default": None})
    add("fill", cmd_fill, "square", emit_cert={"default": None})
    add("idctx", cmd_idctx, "ctx", "left", "right")
    add("transport", cmd_transport, "ctx", "family", "left", "right", "path", "elem")
    add("classify", cmd_classify, "mor", cert={"required": True})
    add("certify", cmd_certify, "mor", emit_cert={"default": None})
    add("stability", cmd_stability, "mor", "ext",
        cert={"required": True}, emit_cert={"default": None})
    add("gpd", cmd_gpd, "ctx", word_bound={"type": int, "default": 16})
    add("functor", cmd_functor, "mor",
        word_bound={"type": int, "default": 16}, emit_cert={"default": None})
    add("sigma", cmd_sigma, "mor", word_bound={"type": int, "default": 16})
    add("defect", cmd_defect, "f", "g")
    add("recheck", cmd_recheck, "cert")

    args = top.parse_args(argv)
    if args.max_steps is not None:
        kernel.DEFAULT_MAX_STEPS = args.max_steps
    rep = Reporter(args.pretty)
    try:
        args.fn(args, rep)
    except IdttError as e:
        rep.add("error", False, str(e))
    return rep.finish()


if __name__ == "__main__":
    sys.exit(main())
