"""Judgmental-equality engine: oriented rewrites and normal forms.

Type rewrites: collapse of double opposites, opposites of discrete types
and of directed-equality types, the flip of a hom over an opposite
subject, directed univalence (hom in the discrete universe rewrites to
the function type), vacuous twists, twists over discrete types, and the
packaging of opposite sigma types into their twisted-sigma form.

Term rewrites: beta for pairs and functions, eta contraction, the
computation rule for directed-equality elimination, and the swap
inverses.  Eta is handled by contraction here rather than expansion, so
equality checking is normal-form comparison up to alpha.

The system terminates on the checked fragment (each rewrite reduces the
measure (twist count, univalence redexes, op depth, size) lexicographically,
with beta guarded by a step budget) and is confluent on it; idempotence
and one-step joinability are exercised exhaustively by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .subst import subst, subst1, subst_binder
from .syntax import (
    App, ConstTm, ConstTy, CtxExpr, DFunext, ElTy, Empty, Ext, ExtDisp,
    ExtMinus, Fst, Hom, JTerm, KernelError, Lam, OpCtx, OpTy, Pair, Pi, Refl,
    SetU, Sigma, SigmaTw, Snd, Swap, SwapInv, Twist, TupleTm, TyTm, UU, Var,
    alpha_eq, binder_names, free_vars, fresh_name,
)

NORMALIZE_BUDGET = 20000


class NormalizeBudgetExceeded(KernelError):
    pass


@dataclass(frozen=True)
class ConstDecl:
    kind: str            # "ty" | "set" | "tm"
    ty: object = None    # closed type, for term constants


@dataclass
class Signature:
    consts: dict = field(default_factory=dict)

    def declare(self, name: str, kind: str, ty=None):
        self.consts[name] = ConstDecl(kind, ty)
        return self

    def kind_of(self, name: str):
        decl = self.consts.get(name)
        return decl.kind if decl else None

    def type_of(self, name: str):
        decl = self.consts.get(name)
        return decl.ty if decl else None


EMPTY_SIG = Signature()


# ---------------------------------------------------------------------------
# Discreteness and baseness classifiers (syntactic, conservative)
# ---------------------------------------------------------------------------

def _peel_codomain(ty):
    """The ultimate codomain of a (possibly twisted) function type."""
    seen = 0
    while seen < 64:
        seen += 1
        if isinstance(ty, Pi):
            ty = ty.cod
        elif isinstance(ty, Twist) and isinstance(ty.body, Pi):
            ty = ty.body.cod
        else:
            return ty
    return ty


def term_is_set_code(tm, lookup, sig) -> bool:
    """True when tm is recognizably a term of the discrete universe."""
    if isinstance(tm, TyTm):
        return is_set_ty(tm.ty, lookup, sig)
    head = tm
    while isinstance(head, App):
        head = head.fn
    if isinstance(head, Var):
        ty = lookup.get(head.name)
    elif isinstance(head, ConstTm):
        ty = sig.type_of(head.name)
    else:
        return False
    if ty is None:
        return False
    if head is tm:
        return isinstance(ty, SetU)
    return isinstance(_peel_codomain(ty), SetU)


def is_set_ty(ty, lookup, sig) -> bool:
    """True when the type is recognizably discrete (a Set).

    Conservative: used only to enable rewrites that are sound exactly for
    discrete types, so False merely leaves an expression unreduced."""
    if isinstance(ty, Hom):
        return True
    if isinstance(ty, ConstTy):
        return sig.kind_of(ty.name) == "set"
    if isinstance(ty, ElTy):
        return term_is_set_code(ty.tm, lookup, sig)
    if isinstance(ty, Pi):
        return is_set_ty(ty.cod, lookup, sig)
    if isinstance(ty, (Sigma, SigmaTw)):
        return is_set_ty(ty.dom, lookup, sig) and is_set_ty(ty.cod, lookup, sig)
    if isinstance(ty, OpTy):
        return is_set_ty(ty.ty, lookup, sig)
    return False


def is_base_headed(ty) -> bool:
    """True when the (normalized) type is a base type, i.e. not an
    irreducible twist."""
    return not isinstance(ty, Twist)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

class _Steps:
    def __init__(self, trace):
        self.count = 0
        self.trace = trace

    def hit(self, rule: str):
        self.count += 1
        if self.trace is not None:
            self.trace.append(rule)
        if self.count > NORMALIZE_BUDGET:
            raise NormalizeBudgetExceeded("rewrite budget exceeded")


def normalize_ty(ty, lookup=None, sig=EMPTY_SIG, trace=None):
    """Normal form of a type under the oriented rewrites."""
    lookup = lookup or {}
    steps = _Steps(trace)
    return _norm_ty(ty, lookup, sig, steps)


def normalize_tm(tm, lookup=None, sig=EMPTY_SIG, trace=None):
    lookup = lookup or {}
    steps = _Steps(trace)
    return _norm_tm(tm, lookup, sig, steps)


def _norm_ty(ty, lookup, sig, steps):
    while True:
        ty = _norm_ty_subterms(ty, lookup, sig, steps)
        new = _step_ty(ty, lookup, sig, steps)
        if new is None:
            return ty
        ty = new


def _norm_ty_subterms(ty, lookup, sig, steps):
    if isinstance(ty, (ConstTy, UU, SetU)):
        return ty
    if isinstance(ty, (Sigma, SigmaTw, Pi)):
        return type(ty)(ty.binder, _norm_ty(ty.dom, lookup, sig, steps),
                        _norm_ty(ty.cod, lookup, sig, steps))
    if isinstance(ty, Hom):
        return Hom(_norm_ty(ty.subject, lookup, sig, steps),
                   _norm_tm(ty.lhs, lookup, sig, steps),
                   _norm_tm(ty.rhs, lookup, sig, steps))
    if isinstance(ty, OpTy):
        return OpTy(_norm_ty(ty.ty, lookup, sig, steps))
    if isinstance(ty, Twist):
        return Twist(ty.binder, _norm_ty(ty.binder_ty, lookup, sig, steps),
                     _norm_ty(ty.body, lookup, sig, steps),
                     _norm_tm(ty.arg, lookup, sig, steps))
    if isinstance(ty, ElTy):
        return ElTy(_norm_tm(ty.tm, lookup, sig, steps))
    raise KernelError(f"normalize: unknown type node {ty!r}")


def _step_ty(ty, lookup, sig, steps):
    """One top-level rewrite, or None when in head normal form."""
    if isinstance(ty, OpTy):
        inner = ty.ty
        if isinstance(inner, OpTy):
            steps.hit("op-inv")
            return inner.ty
        if isinstance(inner, Sigma):
            steps.hit("op-sigma-pack")
            return SigmaTw(inner.binder,
                           _norm_ty(OpTy(inner.dom), lookup, sig, steps),
                           _norm_ty(OpTy(inner.cod), lookup, sig, steps))
        if isinstance(inner, SigmaTw):
            steps.hit("op-sigma-unpack")
            return Sigma(inner.binder,
                         _norm_ty(OpTy(inner.dom), lookup, sig, steps),
                         _norm_ty(OpTy(inner.cod), lookup, sig, steps))
        if is_set_ty(inner, lookup, sig):
            steps.hit("op-set")
            return inner
        return None
    if isinstance(ty, Hom):
        if isinstance(ty.subject, OpTy):
            steps.hit("hom-op-flip")
            return Hom(ty.subject.ty, ty.rhs, ty.lhs)
        if isinstance(ty.subject, SetU):
            steps.hit("univalence")
            x = fresh_name("x", free_vars(ty.rhs))
            return Pi(x, ElTy(ty.lhs), ElTy(ty.rhs))
        return None
    if isinstance(ty, Twist):
        if ty.binder not in free_vars(ty.body):
            steps.hit("twist-weak")
            return ty.body
        if is_set_ty(ty.binder_ty, lookup, sig):
            steps.hit("twist-discrete")
            return subst1(ty.body, ty.binder, ty.arg)
        return None
    if isinstance(ty, ElTy):
        if isinstance(ty.tm, TyTm):
            steps.hit("el-code")
            return ty.tm.ty
        return None
    return None


def _norm_tm(tm, lookup, sig, steps):
    while True:
        tm = _norm_tm_subterms(tm, lookup, sig, steps)
        new = _step_tm(tm, lookup, sig, steps)
        if new is None:
            return tm
        tm = new


def _norm_tm_subterms(tm, lookup, sig, steps):
    if isinstance(tm, (Var, ConstTm, TupleTm)):
        return tm
    if isinstance(tm, Pair):
        return Pair(_norm_tm(tm.fst, lookup, sig, steps),
                    _norm_tm(tm.snd, lookup, sig, steps))
    if isinstance(tm, Fst):
        return Fst(_norm_tm(tm.pair, lookup, sig, steps))
    if isinstance(tm, Snd):
        return Snd(_norm_tm(tm.pair, lookup, sig, steps))
    if isinstance(tm, Lam):
        return Lam(tm.binder, _norm_tm(tm.body, lookup, sig, steps))
    if isinstance(tm, App):
        return App(_norm_tm(tm.fn, lookup, sig, steps),
                   _norm_tm(tm.arg, lookup, sig, steps))
    if isinstance(tm, Refl):
        return Refl(_norm_tm(tm.arg, lookup, sig, steps))
    if isinstance(tm, JTerm):
        return JTerm(_norm_tm(tm.hom, lookup, sig, steps),
                     _norm_tm(tm.x, lookup, sig, steps),
                     _norm_tm(tm.d, lookup, sig, steps))
    if isinstance(tm, Swap):
        return Swap(_norm_tm(tm.arg, lookup, sig, steps))
    if isinstance(tm, SwapInv):
        return SwapInv(_norm_tm(tm.arg, lookup, sig, steps))
    if isinstance(tm, DFunext):
        return DFunext(_norm_tm(tm.arg, lookup, sig, steps))
    if isinstance(tm, TyTm):
        return TyTm(_norm_ty(tm.ty, lookup, sig, steps))
    raise KernelError(f"normalize: unknown term node {tm!r}")


def _step_tm(tm, lookup, sig, steps):
    if isinstance(tm, TupleTm) and len(tm.names) == 2:
        # a pattern tuple is the pair of its component variables
        steps.hit("tuple-pair")
        return Pair(Var(tm.names[0]), Var(tm.names[1]))
    if isinstance(tm, Fst):
        if isinstance(tm.pair, Pair):
            steps.hit("sigma-beta-1")
            return tm.pair.fst
        return None
    if isinstance(tm, Snd):
        if isinstance(tm.pair, Pair):
            steps.hit("sigma-beta-2")
            return tm.pair.snd
        return None
    if isinstance(tm, Pair):
        if isinstance(tm.fst, Fst) and isinstance(tm.snd, Snd) \
                and tm.fst.pair == tm.snd.pair:
            steps.hit("sigma-eta")
            return tm.fst.pair
        return None
    if isinstance(tm, App):
        if isinstance(tm.fn, Lam):
            steps.hit("pi-beta")
            return subst_binder(tm.fn.body, tm.fn.binder, tm.arg)
        return None
    if isinstance(tm, Lam):
        body = tm.body
        names = binder_names(tm.binder)
        if isinstance(body, App):
            arg = body.arg
            arg_matches = (isinstance(arg, Var) and isinstance(tm.binder, str)
                           and arg.name == tm.binder)
            if not isinstance(tm.binder, str) and len(names) == 2:
                # pattern tuples normalize to pairs of their components
                if isinstance(arg, Pair) and arg.fst == Var(names[0]) \
                        and arg.snd == Var(names[1]):
                    arg_matches = True
            if arg_matches and not (set(names) & free_vars(body.fn)):
                steps.hit("pi-eta")
                return body.fn
        return None
    if isinstance(tm, JTerm):
        if isinstance(tm.hom, Refl):
            steps.hit("hom-comp")
            return tm.d
        return None
    if isinstance(tm, SwapInv):
        if isinstance(tm.arg, Swap):
            steps.hit("swap-inv")
            return tm.arg.arg
        return None
    if isinstance(tm, Swap):
        if isinstance(tm.arg, SwapInv):
            steps.hit("swap-swap-inv")
            return tm.arg.arg
        return None
    if isinstance(tm, TyTm):
        if isinstance(tm.ty, ElTy):
            steps.hit("code-el")
            return tm.ty.tm
        return None
    return None


# ---------------------------------------------------------------------------
# Context normalization
# ---------------------------------------------------------------------------

def normalize_ctx(ctx, sig=EMPTY_SIG, trace=None):
    """Normal form of a context: opposites pushed through extensions
    (flipping the extension polarity), closed contravariant extensions
    collapsed to plain ones, displayed extensions by base types collapsed.

    An OpCtx wrapper survives only around a twist-flagged extension, where
    no rule applies."""
    steps = _Steps(trace)
    nctx, _ = _norm_ctx(ctx, sig, steps)
    return nctx


def _norm_ctx(ctx, sig, steps):
    """Returns (normal form, lookup dict of entry types)."""
    if isinstance(ctx, Empty):
        return ctx, {}
    if isinstance(ctx, OpCtx):
        inner, lk = _norm_ctx(ctx.ctx, sig, steps)
        out = _push_op(inner, sig, steps)
        if out is None:
            return OpCtx(inner), lk
        return _norm_ctx(out, sig, steps)
    if isinstance(ctx, (Ext, ExtMinus, ExtDisp)):
        base, lk = _norm_ctx(ctx.ctx, sig, steps)
        ty = _norm_ty(ctx.ty, lk, sig, steps)
        lk2 = _extend_lookup(lk, ctx.name, ty)
        if isinstance(ctx, ExtDisp) and not ctx.twist_flag and is_base_headed(ty):
            steps.hit("ctx-ext-disp")
            return Ext(base, ctx.name, ty), lk2
        if isinstance(ctx, ExtMinus) and not free_vars(ty):
            steps.hit("ctx-closed-ext")
            return Ext(base, ctx.name, ty), lk2
        if isinstance(ctx, ExtDisp):
            return ExtDisp(base, ctx.name, ty, ctx.twist_flag), lk2
        return type(ctx)(base, ctx.name, ty), lk2
    raise KernelError(f"normalize: unknown context node {ctx!r}")


def _extend_lookup(lk, name, ty):
    lk2 = dict(lk)
    names = binder_names(name)
    if len(names) == 1:
        lk2[names[0]] = ty
    else:
        # pattern entry: components looked up via their projected types
        comp = _pattern_component_types(name, ty)
        if comp:
            lk2.update(comp)
    return lk2


def _pattern_component_types(name, ty):
    names = binder_names(name)
    if len(names) != 2:
        return {}
    if isinstance(ty, Sigma):
        x, f = names
        return {x: ty.dom, f: subst_binder(ty.cod, ty.binder, Var(x))}
    if isinstance(ty, SigmaTw):
        x, f = names
        return {x: ty.dom, f: Twist(ty.binder, ty.dom, ty.cod, Var(x))}
    return {}


def _push_op(ctx, sig, steps):
    """One step of pushing an op through a normalized context, or None."""
    if isinstance(ctx, Empty):
        steps.hit("ctx-op-empty")
        return Empty()
    if isinstance(ctx, OpCtx):
        steps.hit("ctx-op-op")
        return ctx.ctx
    if isinstance(ctx, Ext):
        steps.hit("ctx-op-ext")
        return ExtMinus(OpCtx(ctx.ctx), ctx.name, OpTy(ctx.ty))
    if isinstance(ctx, ExtMinus):
        steps.hit("ctx-op-ext-minus")
        return Ext(OpCtx(ctx.ctx), ctx.name, OpTy(ctx.ty))
    return None


def op_ctx(ctx, sig=EMPTY_SIG):
    return normalize_ctx(OpCtx(ctx), sig)


def ctx_entries(ctx):
    """Entries (kind, name, ty) of a normalized context, outermost first.

    kind is one of "ext", "ext-", "extd", "twist".  Returns None when the
    context is stuck under an op (an OpCtx around a twist-flagged entry),
    in which case entries cannot be listed."""
    out = []
    while True:
        if isinstance(ctx, Empty):
            out.reverse()
            return out
        if isinstance(ctx, Ext):
            out.append(("ext", ctx.name, ctx.ty))
        elif isinstance(ctx, ExtMinus):
            out.append(("ext-", ctx.name, ctx.ty))
        elif isinstance(ctx, ExtDisp):
            out.append(("twist" if ctx.twist_flag else "extd", ctx.name, ctx.ty))
        else:
            return None
        ctx = ctx.ctx


def ctx_from_entries(entries):
    ctx = Empty()
    for kind, name, ty in entries:
        if kind == "ext":
            ctx = Ext(ctx, name, ty)
        elif kind == "ext-":
            ctx = ExtMinus(ctx, name, ty)
        elif kind == "extd":
            ctx = ExtDisp(ctx, name, ty, False)
        elif kind == "twist":
            ctx = ExtDisp(ctx, name, ty, True)
        else:
            raise KernelError(f"unknown entry kind {kind}")
    return ctx


def ctx_lookup_types(ctx, sig=EMPTY_SIG):
    """Lookup dict name -> type for a context (normalizing as it goes)."""
    steps = _Steps(None)
    _, lk = _norm_ctx(ctx, sig, steps)
    return lk


# ---------------------------------------------------------------------------
# Equality checks
# ---------------------------------------------------------------------------

def check_ty_eq(ctx, a, b, sig=EMPTY_SIG):
    """Sound (not complete) decision: normal forms alpha-equal.

    Returns (bool, trace of rewrites used)."""
    trace = []
    lk = ctx_lookup_types(ctx, sig)
    na = normalize_ty(a, lk, sig, trace)
    nb = normalize_ty(b, lk, sig, trace)
    return alpha_eq(na, nb), trace


def check_tm_eq(ctx, s, t, sig=EMPTY_SIG):
    trace = []
    lk = ctx_lookup_types(ctx, sig)
    ns = normalize_tm(s, lk, sig, trace)
    nt = normalize_tm(t, lk, sig, trace)
    return alpha_eq(ns, nt), trace


def check_ctx_eq(g, d, sig=EMPTY_SIG):
    """Contexts are judgmentally equal when their normal forms agree up to
    alpha-equality of types, with identical binder names."""
    ng = normalize_ctx(g, sig)
    nd = normalize_ctx(d, sig)
    return _ctx_alpha_eq(ng, nd), []


def _ctx_alpha_eq(g, d):
    if type(g) is not type(d):
        return False
    if isinstance(g, Empty):
        return True
    if isinstance(g, OpCtx):
        return _ctx_alpha_eq(g.ctx, d.ctx)
    if binder_names(g.name) != binder_names(d.name):
        return False
    if isinstance(g, ExtDisp) and g.twist_flag != d.twist_flag:
        return False
    return alpha_eq(g.ty, d.ty) and _ctx_alpha_eq(g.ctx, d.ctx)


# ---------------------------------------------------------------------------
# Sugar constructors matching the surface notation
# ---------------------------------------------------------------------------

def tw_hom(subject, twisted_lhs, rhs):
    """Hom_subject(l̄, r): the twisted hom at a term for its first argument."""
    v = fresh_name("v", free_vars(rhs) | free_vars(twisted_lhs) | free_vars(subject))
    return Twist(v, subject, Hom(subject, Var(v), rhs), twisted_lhs)


def tw_arrow(dom, cod):
    """The displayed function type Ā -> B (twist of the function type in
    its universe variable, applied at the code of dom)."""
    v = fresh_name("X", free_vars(cod) | free_vars(dom))
    x = fresh_name("x", free_vars(cod))
    return Twist(v, UU(), Pi(x, ElTy(Var(v)), cod), TyTm(dom))


def arrow(dom, cod):
    x = fresh_name("x", free_vars(cod))
    return Pi(x, dom, cod)
