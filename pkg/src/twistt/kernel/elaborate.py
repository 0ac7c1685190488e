"""A partial bidirectional elaborator for routine derivations.

Covers variable lookup, sigma and pi introduction/elimination, twisted
function introduction, reflexivity at a context variable, coded types,
and equalities decided by normalization (with the sigma beta rules
recognized specially).  Anything involving twist-context surgery or
directed-equality elimination raises ElaborationIncomplete: those trees
are written by hand.
"""

from __future__ import annotations

from .normalize import (
    EMPTY_SIG, check_tm_eq, check_ty_eq, ctx_lookup_types, is_set_ty,
    normalize_ctx, normalize_ty, op_ctx, tw_hom,
)
from .rules import check_derivation
from .subst import subst_binder
from .syntax import (
    App, ConstTy, CtxWF, Derivation, ElTy, Empty, Ext, ExtDisp, ExtMinus,
    Fst, Hom, JTerm, KernelError, Lam, OpCtx, OpTy, Pair, Pi, Refl, SetU,
    Sigma, SigmaTw, Snd, TmEq, TmOf, Twist, TupleTm, TyEq, TyTm, TyWF, UU,
    Var, alpha_eq, binder_names,
)


class ElaborationIncomplete(KernelError):
    def __init__(self, judgment, why):
        self.judgment = judgment
        super().__init__(f"cannot elaborate ({why}); write the tree by hand: {judgment}")


def _D(rule, concl, *children):
    return Derivation(rule, concl, tuple(children))


_MEMO = {}


def _memo(kind, key, build):
    """Share elaborated subtrees: equal requests return the same object,
    which keeps large derivations DAG-shaped."""
    k = (kind,) + key
    hit = _MEMO.get(k)
    if hit is None:
        hit = build()
        _MEMO[k] = hit
    return hit


def elab_ctx(ctx, sig=EMPTY_SIG):
    return _memo("ctx", (ctx, id(sig)), lambda: _elab_ctx(ctx, sig))


def _elab_ctx(ctx, sig=EMPTY_SIG):
    """A CtxWF derivation for a context built from elaborable types."""
    if isinstance(ctx, Empty):
        return _D("ctx-empty", CtxWF(ctx))
    if isinstance(ctx, OpCtx):
        return _D("ctx-op", CtxWF(ctx), elab_ctx(ctx.ctx, sig))
    if isinstance(ctx, Ext):
        return _D("ctx-ext", CtxWF(ctx), elab_ctx(ctx.ctx, sig),
                  elab_ty(ctx.ctx, ctx.ty, sig))
    if isinstance(ctx, ExtMinus):
        return _D("ctx-ext-minus", CtxWF(ctx), elab_ctx(ctx.ctx, sig),
                  elab_ty(OpCtx(ctx.ctx), ctx.ty, sig))
    if isinstance(ctx, ExtDisp) and not ctx.twist_flag:
        return _D("ctx-ext-disp", CtxWF(ctx), elab_ctx(ctx.ctx, sig),
                  elab_ty(ctx.ctx, ctx.ty, sig, disp=True))
    if isinstance(ctx, ExtDisp):
        ty = ctx.ty
        if isinstance(ty, Twist) and ty.arg == Var(ty.binder):
            inner = Ext(_anchor_prefix(ctx), ty.binder, OpTy(ty.binder_ty))
            return _D("ctx-ext-twist", CtxWF(ctx), elab_ctx(ctx.ctx, sig),
                      elab_ty(inner, ty.body, sig))
    raise ElaborationIncomplete(CtxWF(ctx), "twist-marked context")


def _anchor_prefix(ctx):
    return ctx.ctx.ctx if isinstance(ctx.ctx, (Ext, ExtMinus, ExtDisp)) else Empty()


def _fresh_under(ctx, binder, body):
    """Rename a binder away from the context's names before extending."""
    from .syntax import ctx_names, fresh_name
    taken = set(ctx_names(ctx))
    names = binder_names(binder)
    if not (set(names) & taken):
        return binder, body
    new_names = []
    ren = {}
    for n in names:
        n2 = fresh_name(n, taken)
        taken.add(n2)
        new_names.append(n2)
        if n2 != n:
            ren[n] = Var(n2)
    new_binder = new_names[0] if isinstance(binder, str) else tuple(new_names)
    from .subst import subst
    return new_binder, subst(body, ren)


def elab_ty(ctx, ty, sig=EMPTY_SIG, disp=False):
    return _memo("ty", (ctx, ty, disp, id(sig)), lambda: _elab_ty(ctx, ty, sig, disp))


def _elab_ty(ctx, ty, sig=EMPTY_SIG, disp=False):
    """A TyWF derivation, or ElaborationIncomplete."""
    j = TyWF(ctx, ty, disp)
    if disp:
        inner = elab_ty(ctx, ty, sig, disp=False)
        return _D("ty-disp", j, inner)
    if isinstance(ty, ConstTy):
        return _D("ty-const", j, elab_ctx(ctx, sig))
    if isinstance(ty, UU):
        return _D("ty-uu", j, elab_ctx(ctx, sig))
    if isinstance(ty, SetU):
        return _D("ty-set", j, elab_ctx(ctx, sig))
    if isinstance(ty, Sigma):
        b, cod = _fresh_under(ctx, ty.binder, ty.cod)
        return _D("sigma-form", j, elab_ty(ctx, ty.dom, sig),
                  elab_ty(Ext(ctx, b, ty.dom), cod, sig))
    if isinstance(ty, Pi):
        b, cod = _fresh_under(ctx, ty.binder, ty.cod)
        return _D("pi-form", j, elab_ty(OpCtx(ctx), ty.dom, sig),
                  elab_ty(ExtMinus(ctx, b, ty.dom), cod, sig))
    if isinstance(ty, OpTy):
        return _D("op-form", j, elab_ty(ctx, ty.ty, sig))
    if isinstance(ty, ElTy):
        lk = ctx_lookup_types(ctx, sig)
        u = SetU() if is_set_ty(ty, lk, sig) else UU()
        return _D("ty-code", j, elab_tm(ctx, ty.tm, u, sig))
    if isinstance(ty, Hom):
        return _D("hom-form-inst", j,
                  elab_ty(ctx, ty.subject, sig),
                  elab_tm(ctx, ty.lhs, OpTy(ty.subject), sig),
                  elab_tm(ctx, ty.rhs, ty.subject, sig))
    raise ElaborationIncomplete(j, f"type former {type(ty).__name__}")


def infer_tm(ctx, tm, sig=EMPTY_SIG):
    """Best-effort type inference used to drive checking."""
    lk = ctx_lookup_types(ctx, sig)
    if isinstance(tm, Var):
        t = lk.get(tm.name)
        if t is None:
            raise ElaborationIncomplete(TmOf(ctx, tm, ConstTy("?")), "unbound variable")
        return t
    if isinstance(tm, App):
        fty = normalize_ty(infer_tm(ctx, tm.fn, sig), lk, sig)
        if isinstance(fty, Pi):
            return subst_binder(fty.cod, fty.binder, tm.arg)
        raise ElaborationIncomplete(TmOf(ctx, tm, ConstTy("?")), "application head")
    if isinstance(tm, Fst):
        pty = normalize_ty(infer_tm(ctx, tm.pair, sig), lk, sig)
        if isinstance(pty, Sigma):
            return pty.dom
        if isinstance(pty, SigmaTw):
            return pty.dom
        raise ElaborationIncomplete(TmOf(ctx, tm, ConstTy("?")), "projection")
    if isinstance(tm, Snd):
        pty = normalize_ty(infer_tm(ctx, tm.pair, sig), lk, sig)
        if isinstance(pty, Sigma):
            return subst_binder(pty.cod, pty.binder, Fst(tm.pair))
        raise ElaborationIncomplete(TmOf(ctx, tm, ConstTy("?")), "projection")
    if isinstance(tm, TyTm):
        return SetU() if is_set_ty(tm.ty, lk, sig) else UU()
    raise ElaborationIncomplete(TmOf(ctx, tm, ConstTy("?")),
                                f"term former {type(tm).__name__}")


def elab_tm(ctx, tm, ty, sig=EMPTY_SIG, disp=False):
    return _memo("tm", (ctx, tm, ty, disp, id(sig)),
                 lambda: _elab_tm(ctx, tm, ty, sig, disp))


def _elab_tm(ctx, tm, ty, sig=EMPTY_SIG, disp=False):
    """A TmOf derivation, or ElaborationIncomplete."""
    j = TmOf(ctx, tm, ty, disp)
    lk = ctx_lookup_types(ctx, sig)
    tyn = normalize_ty(ty, lk, sig)
    if isinstance(tm, JTerm):
        raise ElaborationIncomplete(j, "directed-equality elimination")
    if disp:
        if isinstance(tm, Refl):
            return _elab_refl(ctx, tm, ty, sig)
        inner = elab_tm(ctx, tm, ty, sig, disp=False)
        return _D("tm-disp", j, inner)
    if isinstance(tm, Var):
        got = lk.get(tm.name)
        if got is None:
            raise ElaborationIncomplete(j, "unbound variable")
        node = _D("var", TmOf(ctx, tm, got), elab_ctx(ctx, sig))
        if check_ty_eq(ctx, got, ty, sig)[0]:
            if alpha_eq(got, ty):
                return _D("var", j, elab_ctx(ctx, sig))
            conv = _D("ty-eq-norm", TyEq(ctx, got, ty))
            return _D("conv-ty", j, node, conv)
        raise ElaborationIncomplete(j, "variable type mismatch")
    if isinstance(tm, TupleTm):
        from .normalize import ctx_entries, normalize_ctx
        ents = ctx_entries(normalize_ctx(ctx, sig))
        for kind, name, ety in ents or []:
            if not isinstance(name, str) and tuple(name) == tm.names \
                    and kind in ("ext", "extd"):
                if check_ty_eq(ctx, ety, ty, sig)[0]:
                    return _D("var", j, elab_ctx(ctx, sig))
        raise ElaborationIncomplete(j, "tuple variable not bound at this type")
    if isinstance(tm, Lam) and isinstance(tyn, Pi):
        body = elab_tm(ExtMinus(ctx, tyn.binder, tyn.dom),
                       _rename_binder(tm, tyn.binder), tyn.cod, sig)
        return _D("pi-intro", TmOf(ctx, Lam(tyn.binder, _rename_binder(tm, tyn.binder)),
                                   tyn), body)
    if isinstance(tm, Lam) and isinstance(tyn, Twist) and isinstance(tyn.body, Pi) \
            and isinstance(tyn.arg, TyTm):
        A, B = tyn.arg.ty, tyn.body.cod
        body = elab_tm(Ext(ctx, tm.binder, A), tm.body, B, sig)
        return _D("funtw-intro", TmOf(ctx, tm, ty, disp=True),
                  elab_ty(ctx, A, sig), elab_ty(ctx, B, sig), body)
    if isinstance(tm, Pair) and isinstance(tyn, Sigma):
        u = elab_tm(ctx, tm.fst, tyn.dom, sig)
        v = elab_tm(ctx, tm.snd, subst_binder(tyn.cod, tyn.binder, tm.fst), sig)
        return _D("sigma-pair", j,
                  elab_ty(ctx, tyn.dom, sig),
                  elab_ty(Ext(ctx, tyn.binder, tyn.dom), tyn.cod, sig), u, v)
    if isinstance(tm, (Fst, Snd)):
        pty = normalize_ty(infer_tm(ctx, tm.pair, sig), lk, sig)
        if isinstance(pty, Sigma):
            scrut = elab_tm(ctx, tm.pair, pty, sig)
            rule = "sigma-fst" if isinstance(tm, Fst) else "sigma-snd"
            want = pty.dom if isinstance(tm, Fst) \
                else subst_binder(pty.cod, pty.binder, Fst(tm.pair))
            if not check_ty_eq(ctx, want, ty, sig)[0]:
                raise ElaborationIncomplete(j, "projection type mismatch")
            return _D(rule, j, elab_ty(ctx, pty.dom, sig),
                      elab_ty(Ext(ctx, pty.binder, pty.dom), pty.cod, sig), scrut)
    if isinstance(tm, App):
        fty = normalize_ty(infer_tm(ctx, tm.fn, sig), lk, sig)
        if isinstance(fty, Pi):
            f = elab_tm(ctx, tm.fn, fty, sig)
            arg = elab_tm(OpCtx(ctx), tm.arg, OpTy(fty.dom), sig)
            want = subst_binder(fty.cod, fty.binder, tm.arg)
            if not check_ty_eq(ctx, want, ty, sig)[0]:
                raise ElaborationIncomplete(j, "application type mismatch")
            return _D("pi-elim", j, f, arg)
    if isinstance(tm, TyTm) and isinstance(tyn, (UU, SetU)):
        rule = "set-code" if isinstance(tyn, SetU) else "uu-code"
        return _D(rule, j, elab_ty(ctx, tm.ty, sig))
    raise ElaborationIncomplete(j, f"term former {type(tm).__name__}")


def _rename_binder(lam, binder):
    if binder_names(lam.binder) == binder_names(binder):
        return lam.body
    generic = Var(binder) if isinstance(binder, str) else TupleTm(tuple(binder))
    return subst_binder(lam.body, lam.binder, generic)


def _elab_refl(ctx, tm, ty, sig):
    if not isinstance(tm.arg, Var):
        raise ElaborationIncomplete(TmOf(ctx, tm, ty, True),
                                    "reflexivity at a non-variable")
    ents_ctx = normalize_ctx(ctx, sig)
    from .normalize import ctx_entries
    ents = ctx_entries(ents_ctx)
    if not ents or ents[-1][1] != tm.arg.name:
        raise ElaborationIncomplete(TmOf(ctx, tm, ty, True),
                                    "reflexivity variable is not the last entry")
    _, a, A = ents[-1]
    want = tw_hom(A, Var(a), Var(a))
    if not check_ty_eq(ctx, want, ty, sig)[0]:
        raise ElaborationIncomplete(TmOf(ctx, tm, ty, True), "reflexivity type mismatch")
    from .normalize import ctx_from_entries
    gamma = ctx_from_entries(ents[:-1])
    return _D("hom-intro", TmOf(ctx, tm, ty, True), elab_ty(gamma, A, sig))


def elab_tm_eq(ctx, lhs, rhs, ty, sig=EMPTY_SIG, disp=False):
    """A TmEq derivation.  Recognizes the sigma beta shape; otherwise
    falls back to the normalization rule when it applies."""
    j = TmEq(ctx, lhs, rhs, ty, disp)
    if isinstance(lhs, Fst) and isinstance(lhs.pair, Pair) \
            and alpha_eq(rhs, lhs.pair.fst):
        try:
            uty = infer_tm(ctx, lhs.pair.fst, sig)
            vty = infer_tm(ctx, lhs.pair.snd, sig)
            u = elab_tm(ctx, lhs.pair.fst, uty, sig)
            v = elab_tm(ctx, lhs.pair.snd, vty, sig)
            return _D("sigma-beta-1", j, elab_ty(ctx, uty, sig),
                      elab_ty(Ext(ctx, "a_fresh", uty), vty, sig), u, v)
        except ElaborationIncomplete:
            pass
    ok, _ = check_tm_eq(ctx, lhs, rhs, sig)
    if ok:
        return _D("tm-eq-norm", j)
    raise ElaborationIncomplete(j, "terms do not share a normal form")


def elaborate(judgment, sig=EMPTY_SIG):
    """Attempt a derivation for a judgment; validate it before returning."""
    if isinstance(judgment, CtxWF):
        tree = elab_ctx(judgment.ctx, sig)
    elif isinstance(judgment, TyWF):
        tree = elab_ty(judgment.ctx, judgment.ty, sig, judgment.disp)
    elif isinstance(judgment, TmOf):
        tree = elab_tm(judgment.ctx, judgment.tm, judgment.ty, sig, judgment.disp)
    elif isinstance(judgment, TmEq):
        tree = elab_tm_eq(judgment.ctx, judgment.lhs, judgment.rhs, judgment.ty,
                          sig, judgment.disp)
    else:
        raise ElaborationIncomplete(judgment, "judgment form")
    report = check_derivation(tree, sig)
    if report["status"] != "pass":
        raise ElaborationIncomplete(judgment, f"produced an invalid tree: "
                                    f"{report['failures'][:1]}")
    return tree
