"""Abstract syntax for the directed type theory.

Contexts, types, and terms are immutable trees.  Binders are either a
single name or a tuple of names (a pattern binding the components of a
pair, written (x,f) in derivations).  The theory has two typing
judgments: the base one and the displayed one, distinguished by a `disp`
flag on judgments rather than separate node types.

A twist node Twist(binder, binder_ty, body, arg) denotes the twisted
type obtained from `body` (a type depending contravariantly on the
binder, of type binder_ty) applied at the term `arg`; the raw twist of
the rules is the special case arg == Var(binder's context variable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

Binder = Union[str, tuple]


class KernelError(Exception):
    pass


class ScopeError(KernelError):
    pass


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Ext:
    ctx: "CtxExpr"
    name: Binder
    ty: "TyExpr"


@dataclass(frozen=True)
class ExtMinus:
    ctx: "CtxExpr"
    name: Binder
    ty: "TyExpr"


@dataclass(frozen=True)
class ExtDisp:
    ctx: "CtxExpr"
    name: Binder
    ty: "TyExpr"
    twist_flag: bool = False


@dataclass(frozen=True)
class OpCtx:
    ctx: "CtxExpr"


CtxExpr = Union[Empty, Ext, ExtMinus, ExtDisp, OpCtx]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstTy:
    name: str


@dataclass(frozen=True)
class Sigma:
    binder: Binder
    dom: "TyExpr"
    cod: "TyExpr"


@dataclass(frozen=True)
class SigmaTw:
    """The packaged twisted sigma (Σ_{b:dom^op} cod^op)^op."""

    binder: Binder
    dom: "TyExpr"
    cod: "TyExpr"


@dataclass(frozen=True)
class Pi:
    binder: Binder
    dom: "TyExpr"
    cod: "TyExpr"


@dataclass(frozen=True)
class Hom:
    subject: "TyExpr"
    lhs: "TmExpr"
    rhs: "TmExpr"


@dataclass(frozen=True)
class OpTy:
    ty: "TyExpr"


@dataclass(frozen=True)
class Twist:
    binder: str
    binder_ty: "TyExpr"
    body: "TyExpr"
    arg: "TmExpr"


@dataclass(frozen=True)
class UU:
    pass


@dataclass(frozen=True)
class SetU:
    pass


@dataclass(frozen=True)
class ElTy:
    """A term of a universe used as a type (Russell style)."""

    tm: "TmExpr"


TyExpr = Union[ConstTy, Sigma, SigmaTw, Pi, Hom, OpTy, Twist, UU, SetU, ElTy]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ConstTm:
    name: str


@dataclass(frozen=True)
class Pair:
    fst: "TmExpr"
    snd: "TmExpr"


@dataclass(frozen=True)
class Fst:
    pair: "TmExpr"


@dataclass(frozen=True)
class Snd:
    pair: "TmExpr"


@dataclass(frozen=True)
class Lam:
    binder: Binder
    body: "TmExpr"


@dataclass(frozen=True)
class App:
    fn: "TmExpr"
    arg: "TmExpr"


@dataclass(frozen=True)
class Refl:
    arg: "TmExpr"


@dataclass(frozen=True)
class JTerm:
    hom: "TmExpr"
    x: "TmExpr"
    d: "TmExpr"


@dataclass(frozen=True)
class Swap:
    arg: "TmExpr"


@dataclass(frozen=True)
class SwapInv:
    arg: "TmExpr"


@dataclass(frozen=True)
class DFunext:
    arg: "TmExpr"


@dataclass(frozen=True)
class TyTm:
    """A type used as a term of its universe (Russell style)."""

    ty: "TyExpr"


@dataclass(frozen=True)
class TupleTm:
    """A pattern tuple used as a term: the tuple of the components bound
    by a pattern binder."""

    names: tuple


TmExpr = Union[Var, ConstTm, Pair, Fst, Snd, Lam, App, Refl, JTerm, Swap,
               SwapInv, DFunext, TyTm, TupleTm]


# ---------------------------------------------------------------------------
# Judgments and derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CtxWF:
    ctx: CtxExpr


@dataclass(frozen=True)
class TyWF:
    ctx: CtxExpr
    ty: TyExpr
    disp: bool = False


@dataclass(frozen=True)
class TmOf:
    ctx: CtxExpr
    tm: TmExpr
    ty: TyExpr
    disp: bool = False


@dataclass(frozen=True)
class TyEq:
    ctx: CtxExpr
    lhs: TyExpr
    rhs: TyExpr
    disp: bool = False


@dataclass(frozen=True)
class TmEq:
    ctx: CtxExpr
    lhs: TmExpr
    rhs: TmExpr
    ty: TyExpr
    disp: bool = False


@dataclass(frozen=True)
class CtxEq:
    lhs: CtxExpr
    rhs: CtxExpr


Judgment = Union[CtxWF, TyWF, TmOf, TyEq, TmEq, CtxEq]


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    children: tuple = ()


# ---------------------------------------------------------------------------
# Helpers: binder names, free variables, alpha equivalence
# ---------------------------------------------------------------------------

def binder_names(b: Binder) -> tuple:
    return (b,) if isinstance(b, str) else tuple(b)


def free_vars(e) -> frozenset:
    """Free variable names of a type or term expression."""
    if isinstance(e, (Var,)):
        return frozenset({e.name})
    if isinstance(e, TupleTm):
        return frozenset(e.names)
    if isinstance(e, (ConstTy, ConstTm, UU, SetU)):
        return frozenset()
    if isinstance(e, (Sigma, SigmaTw, Pi)):
        return free_vars(e.dom) | (free_vars(e.cod) - frozenset(binder_names(e.binder)))
    if isinstance(e, Hom):
        return free_vars(e.subject) | free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, OpTy):
        return free_vars(e.ty)
    if isinstance(e, Twist):
        return (free_vars(e.binder_ty) | free_vars(e.arg)
                | (free_vars(e.body) - frozenset({e.binder})))
    if isinstance(e, ElTy):
        return free_vars(e.tm)
    if isinstance(e, Pair):
        return free_vars(e.fst) | free_vars(e.snd)
    if isinstance(e, (Fst, Snd)):
        return free_vars(e.pair)
    if isinstance(e, Lam):
        return free_vars(e.body) - frozenset(binder_names(e.binder))
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, (Refl, Swap, SwapInv, DFunext)):
        return free_vars(e.arg)
    if isinstance(e, JTerm):
        return free_vars(e.hom) | free_vars(e.x) | free_vars(e.d)
    if isinstance(e, TyTm):
        return free_vars(e.ty)
    raise KernelError(f"free_vars: unknown node {e!r}")


def alpha_eq(x, y, env=None) -> bool:
    """Alpha equivalence of types or terms.

    env maps bound names of x to the corresponding bound names of y."""
    if env is None:
        env = {}
    if type(x) is not type(y):
        return False
    if isinstance(x, Var):
        return env.get(x.name, x.name) == y.name
    if isinstance(x, TupleTm):
        if len(x.names) != len(y.names):
            return False
        return all(env.get(a, a) == b for a, b in zip(x.names, y.names))
    if isinstance(x, (ConstTy, ConstTm)):
        return x.name == y.name
    if isinstance(x, (UU, SetU)):
        return True
    if isinstance(x, (Sigma, SigmaTw, Pi)):
        bx, by = binder_names(x.binder), binder_names(y.binder)
        if len(bx) != len(by):
            return False
        env2 = {**env, **dict(zip(bx, by))}
        return alpha_eq(x.dom, y.dom, env) and alpha_eq(x.cod, y.cod, env2)
    if isinstance(x, Hom):
        return (alpha_eq(x.subject, y.subject, env)
                and alpha_eq(x.lhs, y.lhs, env) and alpha_eq(x.rhs, y.rhs, env))
    if isinstance(x, OpTy):
        return alpha_eq(x.ty, y.ty, env)
    if isinstance(x, Twist):
        env2 = {**env, x.binder: y.binder}
        return (alpha_eq(x.binder_ty, y.binder_ty, env)
                and alpha_eq(x.body, y.body, env2)
                and alpha_eq(x.arg, y.arg, env))
    if isinstance(x, ElTy):
        return alpha_eq(x.tm, y.tm, env)
    if isinstance(x, Pair):
        return alpha_eq(x.fst, y.fst, env) and alpha_eq(x.snd, y.snd, env)
    if isinstance(x, (Fst, Snd)):
        return alpha_eq(x.pair, y.pair, env)
    if isinstance(x, Lam):
        bx, by = binder_names(x.binder), binder_names(y.binder)
        if len(bx) != len(by):
            return False
        env2 = {**env, **dict(zip(bx, by))}
        return alpha_eq(x.body, y.body, env2)
    if isinstance(x, App):
        return alpha_eq(x.fn, y.fn, env) and alpha_eq(x.arg, y.arg, env)
    if isinstance(x, (Refl, Swap, SwapInv, DFunext)):
        return alpha_eq(x.arg, y.arg, env)
    if isinstance(x, JTerm):
        return (alpha_eq(x.hom, y.hom, env) and alpha_eq(x.x, y.x, env)
                and alpha_eq(x.d, y.d, env))
    if isinstance(x, TyTm):
        return alpha_eq(x.ty, y.ty, env)
    raise KernelError(f"alpha_eq: unknown node {x!r}")


def ctx_names(ctx: CtxExpr) -> list:
    """All binder names of a context, outermost first.  OpCtx wrappers are
    transparent for naming purposes."""
    out = []

    def walk(c):
        if isinstance(c, Empty):
            return
        if isinstance(c, OpCtx):
            walk(c.ctx)
            return
        walk(c.ctx)
        out.extend(binder_names(c.name))

    walk(ctx)
    return out


_FRESH = [0]


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"
