"""Kernel and synthesis toolkit for dependent type theory with identity types."""

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
    alpha_equal,
    relocate,
    substitute,
    var_tuple,
    weaken,
)
from .kernel import (
    Derivation,
    check_morphism,
    check_telescope,
    check_term,
    check_type,
    compose_mor,
    def_eq,
    identity_mor,
    infer,
    mor_equal,
    normalize,
    tele_equal,
    validate_signature,
)

__version__ = "0.1.0"
