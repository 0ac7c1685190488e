"""Abstract syntax, judgmental equality, and the derivation checker."""

from .syntax import (  # noqa: F401
    App, ConstTm, ConstTy, CtxEq, CtxWF, Derivation, DFunext, ElTy, Empty,
    Ext, ExtDisp, ExtMinus, Fst, Hom, JTerm, KernelError, Lam, OpCtx, OpTy,
    Pair, Pi, Refl, ScopeError, SetU, Sigma, SigmaTw, Snd, Swap, SwapInv,
    TmEq, TmOf, Twist, TupleTm, TyEq, TyTm, TyWF, UU, Var, alpha_eq,
    binder_names, free_vars,
)
from .subst import TwistFlagViolation, diagonal_refl_subst, subst, subst1, subst_binder  # noqa: F401
from .normalize import (  # noqa: F401
    Signature, check_ctx_eq, check_tm_eq, check_ty_eq, normalize_ctx,
    normalize_tm, normalize_ty, op_ctx, tw_arrow, tw_hom,
)
from .rules import (  # noqa: F401
    ContextShapeError, RuleMismatch, RULES, SideConditionError, check_derivation,
    check_node,
)
from .sexp import ParseError, emit_file, parse_file  # noqa: F401
from .elaborate import ElaborationIncomplete, elaborate  # noqa: F401
