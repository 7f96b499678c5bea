"""Certificate files: versioned JSON records of checked artifacts.

Every certificate carries the hash of the signature it was checked against;
re-checking first recomputes that hash from the presented source, so a stale
or tampered certificate fails before any judgment is re-run.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .errors import IdttError
from .kernel import Derivation, Judgment
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

FORMAT_VERSION = 1

__all__ = [
    "FORMAT_VERSION",
    "term_to_json",
    "term_from_json",
    "type_to_json",
    "type_from_json",
    "telescope_to_json",
    "telescope_from_json",
    "morphism_to_json",
    "morphism_from_json",
    "derivation_to_json",
    "signature_digest",
    "wrap",
    "unwrap",
]


def term_to_json(t: Term) -> Any:
    match t:
        case Var(index=i):
            return {"k": "var", "i": i}
        case Const(name=c, args=a):
            return {"k": "const", "name": c, "args": [term_to_json(x) for x in a]}
        case Refl(subject=s):
            return {"k": "refl", "of": term_to_json(s)}
        case J():
            return {
                "k": "elim",
                "left": term_to_json(t.left),
                "right": term_to_json(t.right),
                "path": term_to_json(t.path),
                "theta": telescope_to_json(t.theta),
                "motive": type_to_json(t.motive),
                "body": term_to_json(t.body),
                "args": [term_to_json(x) for x in t.args],
                "base": t.base,
            }
        case _:
            raise TypeError(f"cannot serialize {t!r}")


def term_from_json(d: Any) -> Term:
    match d["k"]:
        case "var":
            return Var(d["i"])
        case "const":
            return Const(d["name"], tuple(term_from_json(x) for x in d["args"]))
        case "refl":
            return Refl(term_from_json(d["of"]))
        case "elim":
            return J(
                term_from_json(d["left"]),
                term_from_json(d["right"]),
                term_from_json(d["path"]),
                telescope_from_json(d["theta"]),
                type_from_json(d["motive"]),
                term_from_json(d["body"]),
                tuple(term_from_json(x) for x in d["args"]),
                d["base"],
            )
    raise IdttError(f"unknown term tag {d.get('k')!r}")


def type_to_json(ty: TypeExpr) -> Any:
    match ty:
        case BaseApp(name=c, args=a):
            return {"k": "base", "name": c, "args": [term_to_json(x) for x in a]}
        case IdType(base=b, left=l, right=r):
            return {
                "k": "id",
                "base": type_to_json(b),
                "left": term_to_json(l),
                "right": term_to_json(r),
            }
        case _:
            raise TypeError(f"cannot serialize {ty!r}")


def type_from_json(d: Any) -> TypeExpr:
    match d["k"]:
        case "base":
            return BaseApp(d["name"], tuple(term_from_json(x) for x in d["args"]))
        case "id":
            return IdType(
                type_from_json(d["base"]),
                term_from_json(d["left"]),
                term_from_json(d["right"]),
            )
    raise IdttError(f"unknown type tag {d.get('k')!r}")


def telescope_to_json(tele: Telescope) -> Any:
    return {
        "entries": [type_to_json(e) for e in tele.entries],
        "names": list(tele.names),
    }


def telescope_from_json(d: Any) -> Telescope:
    return Telescope(
        tuple(type_from_json(e) for e in d["entries"]), tuple(d["names"])
    )


def morphism_to_json(f: ContextMorphism) -> Any:
    return {
        "domain": telescope_to_json(f.domain),
        "codomain": telescope_to_json(f.codomain),
        "components": [term_to_json(c) for c in f.components],
    }


def morphism_from_json(d: Any) -> ContextMorphism:
    return ContextMorphism(
        telescope_from_json(d["domain"]),
        telescope_from_json(d["codomain"]),
        tuple(term_from_json(c) for c in d["components"]),
    )


def _node_to_json(x: Any) -> Any:
    if isinstance(x, Telescope):
        return {"n": "tele", "v": telescope_to_json(x)}
    if isinstance(x, TypeExpr):
        return {"n": "type", "v": type_to_json(x)}
    if isinstance(x, Term):
        return {"n": "term", "v": term_to_json(x)}
    raise TypeError(f"cannot serialize {x!r}")


def derivation_to_json(d: Derivation) -> Any:
    return {
        "judgment": {
            "context": telescope_to_json(d.judgment.context),
            "form": d.judgment.form,
            "parts": [_node_to_json(p) for p in d.judgment.parts],
        },
        "rule": d.rule,
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def signature_digest(sig: Signature) -> str:
    payload = []
    for d in sig.decls:
        if hasattr(d, "type"):
            payload.append(
                ["const", d.name, telescope_to_json(d.params), type_to_json(d.type)]
            )
        else:
            payload.append(["type", d.name, telescope_to_json(d.params)])
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def wrap(sig: Signature, kind: str, payload: Any) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "signature_sha256": signature_digest(sig),
        "kind": kind,
        "payload": payload,
    }


def unwrap(sig: Signature, blob: dict) -> tuple[str, Any]:
    if blob.get("format_version") != FORMAT_VERSION:
        raise IdttError(f"unsupported certificate format {blob.get('format_version')!r}")
    want = signature_digest(sig)
    got = blob.get("signature_sha256")
    if got != want:
        raise IdttError("certificate was issued against a different signature")
    return blob["kind"], blob["payload"]
