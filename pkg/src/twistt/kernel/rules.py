"""Node-by-node derivation checking.

Every rule of the theory is a named entry in the RULES table; a node is
valid when its conclusion follows from its children's conclusions by
exactly the named rule, including context-shape side conditions.
Structural rules (weakening, substitution, permutation) are explicit
nodes.  The variable rule carries its own weakening (any bound variable
of a well-formed context), which keeps derivation trees linear in size.

Failures carry one of the error kinds RuleMismatch, ContextShapeError,
SideConditionError, TwistFlagViolation, ScopeError together with the
index of the offending premise where that makes sense.
"""

from __future__ import annotations

from dataclasses import dataclass

from .normalize import (
    EMPTY_SIG, Signature, check_ctx_eq, check_tm_eq, check_ty_eq, ctx_entries,
    ctx_from_entries, ctx_lookup_types, is_base_headed, is_set_ty,
    normalize_ctx, normalize_tm, normalize_ty, op_ctx, tw_arrow, tw_hom,
)
from .subst import TwistFlagViolation, diagonal_refl_subst, pattern_substitution, subst, subst_binder
from .syntax import (
    App, ConstTm, ConstTy, CtxEq, CtxWF, Derivation, DFunext, ElTy, Empty,
    Ext, ExtDisp, ExtMinus, Fst, Hom, JTerm, KernelError, Lam, OpCtx, OpTy,
    Pair, Pi, Refl, ScopeError, SetU, Sigma, SigmaTw, Snd, Swap, SwapInv,
    TmEq, TmOf, Twist, TupleTm, TyEq, TyTm, TyWF, UU, Var, alpha_eq,
    binder_names, free_vars,
)


class RuleMismatch(KernelError):
    pass


class ContextShapeError(KernelError):
    pass


class SideConditionError(KernelError):
    pass


class _Fail(Exception):
    def __init__(self, kind: str, detail: str, premise=None):
        self.kind = kind
        self.detail = detail
        self.premise = premise
        super().__init__(detail)


def _need(cond, kind, detail, premise=None):
    if not cond:
        raise _Fail(kind, detail, premise)


def _premises(node, n):
    _need(len(node.children) == n, "RuleMismatch",
          f"rule {node.rule} expects {n} premises, got {len(node.children)}")
    return [c.conclusion for c in node.children]


def _as(j, cls, premise=None):
    _need(isinstance(j, cls), "RuleMismatch",
          f"expected a {cls.__name__} judgment, got {type(j).__name__}", premise)
    return j


def _same_ctx(sig, g, d, premise=None):
    ok, _ = check_ctx_eq(g, d, sig)
    _need(ok, "ContextShapeError", "contexts are not judgmentally equal", premise)


def _same_ty(sig, ctx, a, b, premise=None):
    ok, _ = check_ty_eq(ctx, a, b, sig)
    _need(ok, "RuleMismatch", "types are not judgmentally equal", premise)


def _same_tm(sig, ctx, s, t, premise=None):
    ok, _ = check_tm_eq(ctx, s, t, sig)
    _need(ok, "RuleMismatch", "terms are not judgmentally equal", premise)


def _entries(sig, ctx, premise=None):
    ents = ctx_entries(normalize_ctx(ctx, sig))
    _need(ents is not None, "ContextShapeError",
          "context is stuck under an opposite and cannot be listed", premise)
    return ents


def _check_flag_positions(ents):
    for i, (kind, name, ty) in enumerate(ents):
        if kind != "twist":
            continue
        _need(i > 0, "ContextShapeError", "twist-marked entry with no anchor")
        anchor_kind, anchor_name, _ = ents[i - 1]
        _need(anchor_kind == "ext" and isinstance(anchor_name, str),
              "ContextShapeError", "twist-marked entry must follow a plain extension")
        if isinstance(ty, Twist):
            _need(ty.arg == Var(anchor_name), "TwistFlagViolation",
                  "twist-marked entry does not twist its anchor variable")


def _fresh_in(name, ents):
    taken = set()
    for _, n, _ in ents:
        taken.update(binder_names(n))
    for n in binder_names(name):
        _need(n not in taken, "SideConditionError", f"name {n} is not fresh")


# ---------------------------------------------------------------------------
# Context formation
# ---------------------------------------------------------------------------

def r_ctx_empty(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, CtxWF)
    _same_ctx(sig, c.ctx, Empty())


def _ctx_ext_common(node, sig, kind):
    ps = _premises(node, 2)
    p_ctx = _as(ps[0], CtxWF, 0)
    p_ty = _as(ps[1], TyWF, 1)
    c = _as(node.conclusion, CtxWF)
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 1, "ContextShapeError", "conclusion context is empty")
    last = ents[-1]
    prefix = ctx_from_entries(ents[:-1])
    _same_ctx(sig, prefix, p_ctx.ctx, 0)
    _fresh_in(last[1], ents[:-1])
    _check_flag_positions(ents)
    return p_ty, last, prefix


def r_ctx_ext(node, sig):
    p_ty, last, prefix = _ctx_ext_common(node, sig, "ext")
    _need(last[0] == "ext", "ContextShapeError", "expected a plain extension")
    _need(not p_ty.disp, "RuleMismatch", "extension type premise must be a base type", 1)
    _same_ctx(sig, p_ty.ctx, prefix, 1)
    _same_ty(sig, prefix, last[2], p_ty.ty, 1)


def r_ctx_ext_minus(node, sig):
    p_ty, last, prefix = _ctx_ext_common(node, sig, "ext-")
    # a closed type collapses the ext- to ext under normalization
    _need(last[0] in ("ext-", "ext"), "ContextShapeError",
          "expected a contravariant extension")
    _need(not p_ty.disp, "RuleMismatch", "extension type premise must be a base type", 1)
    _same_ctx(sig, p_ty.ctx, op_ctx(prefix, sig), 1)
    _same_ty(sig, p_ty.ctx, last[2], p_ty.ty, 1)


def r_ctx_ext_disp(node, sig):
    p_ty, last, prefix = _ctx_ext_common(node, sig, "extd")
    _need(last[0] in ("extd", "ext"), "ContextShapeError",
          "expected a displayed extension")
    _need(p_ty.disp, "RuleMismatch", "extension type premise must be displayed", 1)
    _same_ctx(sig, p_ty.ctx, prefix, 1)
    _same_ty(sig, prefix, last[2], p_ty.ty, 1)


def r_ctx_ext_twist(node, sig):
    ps = _premises(node, 2)
    p_anchor = _as(ps[0], CtxWF, 0)
    p_ty = _as(ps[1], TyWF, 1)
    c = _as(node.conclusion, CtxWF)
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 2, "ContextShapeError", "twist extension needs an anchor")
    kind, cname, cty = ents[-1]
    _need(kind == "twist", "ContextShapeError", "last entry is not twist-marked")
    akind, aname, aty = ents[-2]
    _need(akind == "ext" and isinstance(aname, str), "ContextShapeError",
          "anchor entry must be a plain extension")
    prefix = ctx_from_entries(ents[:-1])
    _same_ctx(sig, prefix, p_anchor.ctx, 0)
    # the displayed type is the twist of the premise type at the anchor
    gamma = ctx_from_entries(ents[:-2])
    expected_ctx = Ext(gamma, aname, OpTy(aty))
    _same_ctx(sig, p_ty.ctx, expected_ctx, 1)
    _need(not p_ty.disp, "RuleMismatch", "the twisted body must be a base type", 1)
    expected = Twist(aname, aty, p_ty.ty, Var(aname))
    _same_ty(sig, prefix, cty, expected, 1)
    _check_flag_positions(ents)


def r_ctx_op(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, CtxWF)
    _same_ctx(sig, c.ctx, OpCtx(p.ctx))


# ---------------------------------------------------------------------------
# Context equalities
# ---------------------------------------------------------------------------

def _either_ctx(sig, c, shape_fn):
    if shape_fn(c.lhs, c.rhs):
        return
    _need(shape_fn(c.rhs, c.lhs), "RuleMismatch",
          "conclusion does not have the rule's shape")


def r_ctx_eq_op_op(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, CtxEq)

    def shape(l, r):
        return isinstance(l, OpCtx) and isinstance(l.ctx, OpCtx) \
            and check_ctx_eq(l.ctx.ctx, r, sig)[0] and check_ctx_eq(r, p.ctx, sig)[0]

    _either_ctx(sig, c, shape)


def r_ctx_eq_op_empty(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, CtxEq)

    def shape(l, r):
        return isinstance(l, OpCtx) and isinstance(l.ctx, Empty) and isinstance(r, Empty)

    _either_ctx(sig, c, shape)


def r_ctx_eq_ext_disp(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "premise must be a base type", 0)
    c = _as(node.conclusion, CtxEq)

    def shape(l, r):
        return (isinstance(l, ExtDisp) and not l.twist_flag and isinstance(r, Ext)
                and l.name == r.name and alpha_eq(l.ty, r.ty)
                and check_ctx_eq(l.ctx, r.ctx, sig)[0]
                and check_ctx_eq(l.ctx, p.ctx, sig)[0]
                and check_ty_eq(p.ctx, l.ty, p.ty, sig)[0])

    _either_ctx(sig, c, shape)


def r_ctx_eq_closed_ext(node, sig):
    ps = _premises(node, 2)
    p_ty = _as(ps[0], TyWF, 0)
    p_ctx = _as(ps[1], CtxWF, 1)
    _same_ctx(sig, p_ty.ctx, Empty(), 0)
    _need(not free_vars(p_ty.ty), "SideConditionError", "type must be closed", 0)
    c = _as(node.conclusion, CtxEq)

    def shape(l, r):
        return (isinstance(l, Ext) and isinstance(r, ExtMinus)
                and l.name == r.name and alpha_eq(l.ty, r.ty)
                and check_ctx_eq(l.ctx, r.ctx, sig)[0]
                and check_ctx_eq(l.ctx, p_ctx.ctx, sig)[0]
                and check_ty_eq(Empty(), l.ty, p_ty.ty, sig)[0])

    _either_ctx(sig, c, shape)


def r_ctx_eq_norm(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, CtxEq)
    ok, _ = check_ctx_eq(c.lhs, c.rhs, sig)
    _need(ok, "RuleMismatch", "contexts do not share a normal form")


# ---------------------------------------------------------------------------
# Type formation
# ---------------------------------------------------------------------------

def r_ty_const(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, TyWF)
    _need(isinstance(c.ty, ConstTy), "RuleMismatch", "conclusion is not a constant type")
    _need(sig.kind_of(c.ty.name) in ("ty", "set"), "SideConditionError",
          f"constant {c.ty.name} is not declared")
    _same_ctx(sig, c.ctx, p.ctx)
    _need(not c.disp, "RuleMismatch", "constant types are base types")


def r_ty_uu(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, TyWF)
    _need(isinstance(c.ty, UU) and not c.disp, "RuleMismatch", "conclusion is not UU")
    _same_ctx(sig, c.ctx, p.ctx)


def r_ty_set(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, TyWF)
    _need(isinstance(c.ty, SetU) and not c.disp, "RuleMismatch", "conclusion is not Set")
    _same_ctx(sig, c.ctx, p.ctx)


def r_ty_code(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmOf, 0)
    c = _as(node.conclusion, TyWF)
    lk = ctx_lookup_types(p.ctx, sig)
    pty = normalize_ty(p.ty, lk, sig)
    _need(isinstance(pty, (UU, SetU)), "RuleMismatch",
          "premise term is not of a universe", 0)
    _same_ctx(sig, c.ctx, p.ctx)
    _same_ty(sig, c.ctx, c.ty, ElTy(p.tm))
    _need(not c.disp, "RuleMismatch", "coded types are base types")


def r_sigma_form(node, sig):
    ps = _premises(node, 2)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    c = _as(node.conclusion, TyWF)
    _same_ctx(sig, c.ctx, pA.ctx, 0)
    ents = _entries(sig, pB.ctx, 1)
    _need(len(ents) >= 1, "ContextShapeError", "sigma body context is empty", 1)
    kind, binder, bty = ents[-1]
    _need(kind == "ext", "ContextShapeError", "sigma binder has wrong polarity", 1)
    _same_ctx(sig, ctx_from_entries(ents[:-1]), c.ctx, 1)
    _same_ty(sig, c.ctx, bty, pA.ty, 1)
    _same_ty(sig, c.ctx, c.ty, Sigma(binder, pA.ty, pB.ty))
    _need(not (pA.disp or pB.disp or c.disp), "RuleMismatch", "sigma is a base former")


def r_pi_form(node, sig):
    ps = _premises(node, 2)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    c = _as(node.conclusion, TyWF)
    _same_ctx(sig, pA.ctx, op_ctx(c.ctx, sig), 0)
    ents = _entries(sig, pB.ctx, 1)
    _need(len(ents) >= 1, "ContextShapeError", "pi body context is empty", 1)
    kind, binder, bty = ents[-1]
    # a closed domain collapses the contravariant extension to a plain one
    _need(kind in ("ext-", "ext"), "ContextShapeError",
          "pi binder has wrong polarity", 1)
    _same_ctx(sig, ctx_from_entries(ents[:-1]), c.ctx, 1)
    _same_ty(sig, pB.ctx, bty, pA.ty, 1)
    _same_ty(sig, c.ctx, c.ty, Pi(binder, pA.ty, pB.ty))
    _need(not (pA.disp or pB.disp or c.disp), "RuleMismatch", "pi is a base former")


def r_hom_form(node, sig):
    ps = _premises(node, 1)
    pA = _as(ps[0], TyWF, 0)
    _need(not pA.disp, "RuleMismatch", "hom subject must be a base type", 0)
    c = _as(node.conclusion, TyWF)
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 2, "ContextShapeError", "hom formation context too short")
    (kb, b, tb), (ka, a, ta) = ents[-2], ents[-1]
    _need(kb == "ext" and isinstance(b, str), "ContextShapeError",
          "second-to-last entry must be a plain extension")
    _need(ka in ("ext", "ext-"), "ContextShapeError", "last entry has the wrong polarity")
    gamma = ctx_from_entries(ents[:-2])
    _same_ctx(sig, gamma, pA.ctx, 0)
    _same_ty(sig, gamma, tb, pA.ty, 0)
    _same_ty(sig, c.ctx, ta, OpTy(pA.ty), 0)
    _same_ty(sig, c.ctx, c.ty, Hom(pA.ty, Var(a), Var(b)))
    _need(not c.disp, "RuleMismatch", "hom is a base former")


def r_hom_form_inst(node, sig):
    """Hom at term arguments: the composite of hom-form with two
    substitutions.  The left argument is bound at the opposite type over
    the same context (for discrete subjects the opposite collapses, so a
    premise stated at the plain type also matches)."""
    ps = _premises(node, 3)
    pS = _as(ps[0], TyWF, 0)
    pl = _as(ps[1], TmOf, 1)
    pr = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TyWF)
    lk = ctx_lookup_types(c.ctx, sig)
    cty = normalize_ty(c.ty, lk, sig)
    _need(isinstance(cty, Hom), "RuleMismatch", "conclusion is not a hom type")
    _same_ctx(sig, c.ctx, pS.ctx, 0)
    _same_ty(sig, c.ctx, cty.subject, pS.ty, 0)
    _same_ctx(sig, pr.ctx, c.ctx, 2)
    _same_ty(sig, pr.ctx, pr.ty, pS.ty, 2)
    _same_tm(sig, c.ctx, cty.rhs, pr.tm, 2)
    _same_ctx(sig, pl.ctx, c.ctx, 1)
    _same_ty(sig, pl.ctx, pl.ty, OpTy(pS.ty), 1)
    _same_tm(sig, c.ctx, cty.lhs, pl.tm, 1)
    _need(not c.disp, "RuleMismatch", "hom is a base former")


def r_hom_set(node, sig):
    ps = _premises(node, 1)
    pA = _as(ps[0], TyWF, 0)
    c = _as(node.conclusion, TmOf)
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 2, "ContextShapeError", "context too short")
    (kb, b, tb), (ka, a, ta) = ents[-2], ents[-1]
    gamma = ctx_from_entries(ents[:-2])
    _same_ctx(sig, gamma, pA.ctx, 0)
    _same_ty(sig, gamma, tb, pA.ty, 0)
    _same_ty(sig, c.ctx, ta, OpTy(pA.ty), 0)
    _same_tm(sig, c.ctx, c.tm, TyTm(Hom(pA.ty, Var(a), Var(b))))
    _same_ty(sig, c.ctx, c.ty, SetU())


def r_op_form(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "opposite applies to base types", 0)
    c = _as(node.conclusion, TyWF)
    _same_ctx(sig, c.ctx, p.ctx)
    _same_ty(sig, c.ctx, c.ty, OpTy(p.ty))
    _need(not c.disp, "RuleMismatch", "opposite types are base types")


def r_ty_disp(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "premise must be a base type", 0)
    c = _as(node.conclusion, TyWF)
    _need(c.disp, "RuleMismatch", "conclusion must be displayed")
    _same_ctx(sig, c.ctx, p.ctx)
    _same_ty(sig, c.ctx, c.ty, p.ty)


def r_twist(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "the twisted body must be a base type", 0)
    c = _as(node.conclusion, TyWF)
    _need(c.disp, "RuleMismatch", "a twist is a displayed type")
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 1, "ContextShapeError", "twist needs a final extension")
    kind, bname, bty = ents[-1]
    _need(kind == "ext" and isinstance(bname, str), "ContextShapeError",
          "twisted variable must be a plain extension")
    gamma = ctx_from_entries(ents[:-1])
    _same_ctx(sig, p.ctx, Ext(gamma, bname, OpTy(bty)), 0)
    expected = Twist(bname, bty, p.ty, Var(bname))
    _same_ty(sig, c.ctx, c.ty, expected)


# ---------------------------------------------------------------------------
# Type equalities
# ---------------------------------------------------------------------------

def _either_ty(sig, c, shape_fn):
    if shape_fn(c.lhs, c.rhs):
        return
    _need(shape_fn(c.rhs, c.lhs), "RuleMismatch",
          "conclusion does not have the rule's shape")


def r_ty_eq_op_inv(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    c = _as(node.conclusion, TyEq)

    def shape(l, r):
        return isinstance(l, OpTy) and isinstance(l.ty, OpTy) \
            and alpha_eq(l.ty.ty, r) and check_ty_eq(c.ctx, r, p.ty, sig)[0]

    _same_ctx(sig, c.ctx, p.ctx)
    _either_ty(sig, c, shape)


def r_ty_eq_hom_op(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, TyEq)

    def shape(l, r):
        return isinstance(l, OpTy) and isinstance(l.ty, Hom) and alpha_eq(l.ty, r)

    _either_ty(sig, c, shape)


def r_ty_eq_set_op(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmOf, 0)
    lk = ctx_lookup_types(p.ctx, sig)
    _need(isinstance(normalize_ty(p.ty, lk, sig), SetU), "RuleMismatch",
          "premise must code a discrete type", 0)
    c = _as(node.conclusion, TyEq)
    _same_ctx(sig, c.ctx, p.ctx)

    def shape(l, r):
        return isinstance(l, OpTy) and alpha_eq(l.ty, r) \
            and check_ty_eq(c.ctx, r, ElTy(p.tm), sig)[0]

    _either_ty(sig, c, shape)


def r_ty_eq_twist_weak(node, sig):
    ps = _premises(node, 2)
    pB = _as(ps[0], TyWF, 0)
    pC = _as(ps[1], TyWF, 1)
    c = _as(node.conclusion, TyEq)
    _need(c.disp, "RuleMismatch", "twist weakening is an equality of displayed types")
    _same_ctx(sig, pB.ctx, pC.ctx, 1)
    ents = _entries(sig, c.ctx)
    kind, bname, bty = ents[-1]
    _need(kind == "ext", "ContextShapeError", "context must end in a plain extension")
    gamma = ctx_from_entries(ents[:-1])
    _same_ctx(sig, gamma, pB.ctx, 0)
    _same_ty(sig, gamma, bty, pB.ty, 0)

    def shape(l, r):
        return isinstance(l, Twist) and l.binder not in free_vars(l.body) \
            and alpha_eq(l.body, r) and check_ty_eq(c.ctx, r, pC.ty, sig)[0]

    _either_ty(sig, c, shape)


def r_ty_eq_univalence(node, sig):
    ps = _premises(node, 2)
    pa = _as(ps[0], TmOf, 0)
    pb = _as(ps[1], TmOf, 1)
    c = _as(node.conclusion, TyEq)
    lk = ctx_lookup_types(c.ctx, sig)
    _need(isinstance(normalize_ty(pa.ty, lk, sig), SetU), "RuleMismatch",
          "first premise must be a set code", 0)
    _need(isinstance(normalize_ty(pb.ty, lk, sig), SetU), "RuleMismatch",
          "second premise must be a set code", 1)
    _same_ctx(sig, pa.ctx, op_ctx(c.ctx, sig), 0)
    _same_ctx(sig, pb.ctx, c.ctx, 1)

    def shape(l, r):
        if not isinstance(l, Hom) or not isinstance(l.subject, SetU):
            return False
        if not (alpha_eq(l.lhs, pa.tm) and alpha_eq(l.rhs, pb.tm)):
            return False
        return check_ty_eq(c.ctx, r, Pi("x", ElTy(pa.tm), ElTy(pb.tm)), sig)[0]

    _either_ty(sig, c, shape)


def r_ty_eq_norm(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, TyEq)
    ok, _ = check_ty_eq(c.ctx, c.lhs, c.rhs, sig)
    _need(ok, "RuleMismatch", "types do not share a normal form")


def r_ty_eq_sym(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyEq, 0)
    c = _as(node.conclusion, TyEq)
    _same_ctx(sig, c.ctx, p.ctx)
    _need(alpha_eq(c.lhs, p.rhs) and alpha_eq(c.rhs, p.lhs) and c.disp == p.disp,
          "RuleMismatch", "conclusion is not the symmetric premise")


def r_ty_eq_trans(node, sig):
    ps = _premises(node, 2)
    p1 = _as(ps[0], TyEq, 0)
    p2 = _as(ps[1], TyEq, 1)
    c = _as(node.conclusion, TyEq)
    _same_ctx(sig, c.ctx, p1.ctx, 0)
    _same_ctx(sig, c.ctx, p2.ctx, 1)
    _need(alpha_eq(p1.rhs, p2.lhs), "RuleMismatch", "middle types disagree")
    _need(alpha_eq(c.lhs, p1.lhs) and alpha_eq(c.rhs, p2.rhs),
          "RuleMismatch", "endpoints disagree")


# ---------------------------------------------------------------------------
# Universe term rules
# ---------------------------------------------------------------------------

def r_uu_code(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "only base types are coded", 0)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, c.ctx, p.ctx)
    _same_tm(sig, c.ctx, c.tm, TyTm(p.ty))
    _same_ty(sig, c.ctx, c.ty, UU())


def r_set_code(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TyWF, 0)
    _need(not p.disp, "RuleMismatch", "only base types are coded", 0)
    lk = ctx_lookup_types(p.ctx, sig)
    _need(is_set_ty(normalize_ty(p.ty, lk, sig), lk, sig), "SideConditionError",
          "type is not recognizably discrete", 0)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, c.ctx, p.ctx)
    _same_tm(sig, c.ctx, c.tm, TyTm(p.ty))
    _same_ty(sig, c.ctx, c.ty, SetU())


def r_set_in_uu(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmOf, 0)
    lk = ctx_lookup_types(p.ctx, sig)
    _need(isinstance(normalize_ty(p.ty, lk, sig), SetU), "RuleMismatch",
          "premise is not a set-coded term", 0)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, c.ctx, p.ctx)
    _same_tm(sig, c.ctx, c.tm, p.tm)
    _same_ty(sig, c.ctx, c.ty, UU())


# ---------------------------------------------------------------------------
# Structural rules
# ---------------------------------------------------------------------------

def r_var(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], CtxWF, 0)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, c.ctx, p.ctx)
    ents = _entries(sig, c.ctx)
    tm = c.tm
    lk = ctx_lookup_types(c.ctx, sig)
    for kind, name, ty in ents:
        names = binder_names(name)
        if isinstance(tm, Var) and isinstance(name, str) and tm.name == name:
            _need(kind != "ext-", "ContextShapeError",
                  "contravariant variable is only usable over the opposite context")
            want_disp = kind in ("extd", "twist")
            _need(c.disp == want_disp, "RuleMismatch",
                  "judgment flavor does not match the binding")
            _same_ty(sig, c.ctx, c.ty, ty)
            return
        if not isinstance(name, str) and kind in ("ext", "extd"):
            if isinstance(tm, TupleTm) and tuple(tm.names) == tuple(names):
                _need(not c.disp, "RuleMismatch", "tuple variables are base terms")
                _same_ty(sig, c.ctx, c.ty, ty)
                return
            if isinstance(tm, Var) and tm.name in names:
                tyn = normalize_ty(ty, lk, sig)
                if isinstance(tyn, Sigma):
                    x, f = names
                    if tm.name == x:
                        _need(not c.disp, "RuleMismatch", "component is a base term")
                        _same_ty(sig, c.ctx, c.ty, tyn.dom)
                        return
                    _need(not c.disp, "RuleMismatch", "component is a base term")
                    _same_ty(sig, c.ctx, c.ty, subst_binder(tyn.cod, tyn.binder, Var(x)))
                    return
                if isinstance(tyn, SigmaTw):
                    x, f = names
                    if tm.name == x:
                        _need(not c.disp, "RuleMismatch", "component is a base term")
                        _same_ty(sig, c.ctx, c.ty, tyn.dom)
                        return
                    _need(c.disp, "RuleMismatch",
                          "the second component of a twisted pair is displayed")
                    _same_ty(sig, c.ctx, c.ty,
                             Twist(tyn.binder, tyn.dom, tyn.cod, Var(x)))
                    return
                raise _Fail("ContextShapeError",
                            "pattern entry whose type is not a pair type")
    raise _Fail("ScopeError", f"term {tm} is not a usable variable of the context")


def _find_insertion(sig, short, long):
    """Index i such that long == short with one entry inserted at i."""
    for i in range(len(long)):
        cand = long[:i] + long[i + 1:]
        if len(cand) != len(short):
            continue
        if all(a[0] == b[0] and binder_names(a[1]) == binder_names(b[1])
               and alpha_eq(a[2], b[2]) for a, b in zip(cand, short)):
            return i
    return None


def r_weak(node, sig):
    ps = _premises(node, 2)
    pj = ps[0]
    pty = _as(ps[1], TyWF, 1)
    c = node.conclusion
    _need(type(c) is type(pj), "RuleMismatch", "weakening changes the judgment form")
    gc = _judgment_ctx(c)
    gp = _judgment_ctx(pj)
    ec, ep = _entries(sig, gc), _entries(sig, gp)
    i = _find_insertion(sig, ep, ec)
    _need(i is not None, "ContextShapeError",
          "conclusion context is not the premise context with one entry inserted")
    kind, name, ty = ec[i]
    _need(kind != "twist", "TwistFlagViolation",
          "twist-marked entries cannot be weakened in")
    if i + 1 < len(ec):
        _need(ec[i + 1][0] != "twist", "TwistFlagViolation",
              "cannot insert between a twist anchor and its entry")
    _fresh_in(name, ep)
    prefix = ctx_from_entries(ec[:i])
    if kind == "ext":
        _same_ctx(sig, pty.ctx, prefix, 1)
        _need(not pty.disp, "RuleMismatch", "inserted entry needs a base type", 1)
    elif kind == "ext-":
        _same_ctx(sig, pty.ctx, op_ctx(prefix, sig), 1)
        _need(not pty.disp, "RuleMismatch", "inserted entry needs a base type", 1)
    else:
        _same_ctx(sig, pty.ctx, prefix, 1)
        _need(pty.disp, "RuleMismatch", "inserted displayed entry needs a displayed type", 1)
    _same_ty(sig, pty.ctx, ty, pty.ty, 1)
    _need(_same_judgment_body(sig, c, pj), "RuleMismatch",
          "weakening must not change the judgment body")


def _judgment_ctx(j):
    if isinstance(j, (CtxWF,)):
        return j.ctx
    if isinstance(j, (TyWF, TmOf, TyEq, TmEq)):
        return j.ctx
    raise _Fail("RuleMismatch", f"judgment {type(j).__name__} has no context")


def _with_ctx(j, ctx):
    import dataclasses
    return dataclasses.replace(j, ctx=ctx)


def _same_judgment_body(sig, a, b):
    if type(a) is not type(b):
        return False
    if isinstance(a, CtxWF):
        return True
    if isinstance(a, TyWF):
        return alpha_eq(a.ty, b.ty) and a.disp == b.disp
    if isinstance(a, TmOf):
        return alpha_eq(a.tm, b.tm) and alpha_eq(a.ty, b.ty) and a.disp == b.disp
    if isinstance(a, TyEq):
        return alpha_eq(a.lhs, b.lhs) and alpha_eq(a.rhs, b.rhs) and a.disp == b.disp
    if isinstance(a, TmEq):
        return (alpha_eq(a.lhs, b.lhs) and alpha_eq(a.rhs, b.rhs)
                and alpha_eq(a.ty, b.ty) and a.disp == b.disp)
    return False


def _apply_subst_judgment(j, sub):
    if isinstance(j, TyWF):
        return TyWF(None, subst(j.ty, sub), j.disp)
    if isinstance(j, TmOf):
        return TmOf(None, subst(j.tm, sub), subst(j.ty, sub), j.disp)
    if isinstance(j, TyEq):
        return TyEq(None, subst(j.lhs, sub), subst(j.rhs, sub), j.disp)
    if isinstance(j, TmEq):
        return TmEq(None, subst(j.lhs, sub), subst(j.rhs, sub), subst(j.ty, sub), j.disp)
    raise _Fail("RuleMismatch", "substitution applies to type and term judgments")


def r_subst(node, sig):
    ps = _premises(node, 2)
    pj = ps[0]
    pt = _as(ps[1], TmOf, 1)
    c = node.conclusion
    gp = _entries(sig, _judgment_ctx(pj))
    gc = _entries(sig, _judgment_ctx(c))
    # locate the removed entry
    removed = None
    for i, e in enumerate(gp):
        cand = gp[:i] + gp[i + 1:]
        if len(cand) != len(gc):
            continue
        if all(a[0] == b[0] and binder_names(a[1]) == binder_names(b[1])
               for a, b in zip(cand, gc)):
            removed = i
            break
    _need(removed is not None, "ContextShapeError",
          "conclusion context is not the premise context minus one entry")
    kind, name, ty = gp[removed]
    tail = gp[removed + 1:]
    for k2, n2, t2 in tail:
        _need(k2 != "twist", "TwistFlagViolation",
              "substitution may not cross a twist-marked entry")
        deps = free_vars(t2) & set(binder_names(name))
        _need(not deps, "ScopeError",
              f"entry {n2} depends on the substituted variable")
    # the substituting term is judged over the whole conclusion context
    # (the standard prefix form arrives here weakened; the diagonal form,
    # where the term mentions later variables, is the point of this shape)
    concl_ctx = ctx_from_entries(gc)
    t = pt.tm
    if kind == "ext":
        _same_ctx(sig, pt.ctx, concl_ctx, 1)
        _same_ty(sig, pt.ctx, pt.ty, ty, 1)
        _need(not pt.disp, "RuleMismatch", "plain entries take base terms", 1)
    elif kind == "ext-":
        _same_ctx(sig, pt.ctx, op_ctx(concl_ctx, sig), 1)
        _same_ty(sig, pt.ctx, pt.ty, OpTy(ty), 1)
        _need(not pt.disp, "RuleMismatch",
              "contravariant entries take terms over the opposite context", 1)
    elif kind == "extd":
        _same_ctx(sig, pt.ctx, concl_ctx, 1)
        _same_ty(sig, pt.ctx, pt.ty, ty, 1)
        _need(pt.disp, "RuleMismatch", "displayed entries take displayed terms", 1)
    else:
        raise _Fail("TwistFlagViolation",
                    "substitution for a twist-marked variable is not admissible")
    sub = pattern_substitution(name, t)
    expected = _apply_subst_judgment(pj, sub)
    got = c
    _need(type(got) is type(pj), "RuleMismatch", "substitution changes the judgment form")
    # compare bodies up to judgmental equality in the conclusion context
    cc = _judgment_ctx(c)
    if isinstance(c, TyWF):
        _same_ty(sig, cc, c.ty, expected.ty)
        _need(c.disp == pj.disp, "RuleMismatch", "judgment flavor changed")
    elif isinstance(c, TmOf):
        _same_tm(sig, cc, c.tm, expected.tm)
        _same_ty(sig, cc, c.ty, expected.ty)
        _need(c.disp == pj.disp, "RuleMismatch", "judgment flavor changed")
    elif isinstance(c, TyEq):
        _same_ty(sig, cc, c.lhs, expected.lhs)
        _same_ty(sig, cc, c.rhs, expected.rhs)
    elif isinstance(c, TmEq):
        _same_tm(sig, cc, c.lhs, expected.lhs)
        _same_tm(sig, cc, c.rhs, expected.rhs)
        _same_ty(sig, cc, c.ty, expected.ty)
    # conclusion tail entries must be the substituted premise tail
    for (k2, n2, t2), (k3, n3, t3) in zip(tail, gc[removed:]):
        _same_ty(sig, cc, t3, subst(t2, sub))
    _check_flag_positions(gc)


def r_perm(node, sig):
    ps = _premises(node, 1)
    pj = ps[0]
    c = node.conclusion
    _need(type(c) is type(pj), "RuleMismatch", "permutation changes the judgment form")
    gp = _entries(sig, _judgment_ctx(pj))
    gc = _entries(sig, _judgment_ctx(c))
    _need(len(gp) == len(gc), "ContextShapeError", "contexts have different lengths")
    diff = [i for i in range(len(gp))
            if not (gp[i][0] == gc[i][0]
                    and binder_names(gp[i][1]) == binder_names(gc[i][1])
                    and alpha_eq(gp[i][2], gc[i][2]))]
    _need(len(diff) == 2 and diff[1] == diff[0] + 1, "ContextShapeError",
          "not an adjacent exchange")
    i = diff[0]
    e1, e2 = gp[i], gp[i + 1]
    _need(gc[i][0] == e2[0] and binder_names(gc[i][1]) == binder_names(e2[1])
          and alpha_eq(gc[i][2], e2[2]), "ContextShapeError", "entries not exchanged")
    _need(gc[i + 1][0] == e1[0] and binder_names(gc[i + 1][1]) == binder_names(e1[1])
          and alpha_eq(gc[i + 1][2], e1[2]), "ContextShapeError", "entries not exchanged")
    _need(e1[0] != "twist" and e2[0] != "twist", "TwistFlagViolation",
          "twist-marked entries only permute through the dedicated rule")
    if i + 2 < len(gp):
        _need(gp[i + 2][0] != "twist", "TwistFlagViolation",
              "cannot exchange the anchor away from its twist-marked entry")
    deps = free_vars(e2[2]) & set(binder_names(e1[1]))
    _need(not deps, "SideConditionError", "exchanged entries are not independent")
    _need(_same_judgment_body(sig, c, pj), "RuleMismatch",
          "permutation must not change the judgment body")


def r_perm_twist(node, sig):
    """The context isomorphism that repackages ... x:A ⋉ a:A ⋊⋉ f:Hom(ā,x) ...
    as ... a:A ⋉⁻ (x,f):Σ_{x:A}Hom(a,x) ..., in either direction."""
    ps = _premises(node, 1)
    pj = ps[0]
    c = node.conclusion
    _need(type(c) is type(pj), "RuleMismatch", "the judgment form must be preserved")
    gp = _entries(sig, _judgment_ctx(pj))
    gc = _entries(sig, _judgment_ctx(c))
    if not _match_perm_twist(sig, gp, gc):
        _need(_match_perm_twist(sig, gc, gp), "ContextShapeError",
              "contexts do not match the permutation lemma's shapes")
    _need(_same_judgment_body(sig, c, pj), "RuleMismatch",
          "the judgment body must be preserved")


def _match_perm_twist(sig, spread, packed):
    """spread: Γ, x:A, a:A, f ⋊⋉ Hom(ā,x), Γ2 ; packed: Γ, a:A, (x,f):⋉⁻Σ, Γ2."""
    for i in range(len(spread) - 2):
        kx, x, tA1 = spread[i]
        ka, a, tA2 = spread[i + 1]
        kf, f, tH = spread[i + 2]
        if not (kx == "ext" and ka == "ext" and kf == "twist"):
            continue
        if not (isinstance(x, str) and isinstance(a, str) and isinstance(f, str)):
            continue
        if not alpha_eq(tA1, tA2) or free_vars(tA1):
            continue
        want_tw = Twist(a, tA1, Hom(tA1, Var(a), Var(x)), Var(a))
        lk = {}
        ok_h = alpha_eq(normalize_ty(tH, lk, sig), normalize_ty(want_tw, lk, sig))
        if not ok_h:
            continue
        if len(packed) != len(spread) - 1:
            continue
        if i + 2 > len(packed):
            continue
        kp, np_, tp = packed[i + 1]
        if kp != "ext-" or binder_names(np_) != (x, f):
            continue
        want_sigma = Sigma(x, tA1, Hom(tA1, Var(a), Var(x)))
        if not alpha_eq(normalize_ty(tp, lk, sig), normalize_ty(want_sigma, lk, sig)):
            continue
        ke, ne, te = packed[i]
        if not (ke == "ext" and ne == a and alpha_eq(te, tA2)):
            continue
        if packed[:i] != spread[:i]:
            same_prefix = all(
                pk == sk and binder_names(pn) == binder_names(sn) and alpha_eq(pt, st)
                for (pk, pn, pt), (sk, sn, st) in zip(packed[:i], spread[:i]))
            if not same_prefix:
                continue
        tail_s = spread[i + 3:]
        tail_p = packed[i + 2:]
        if len(tail_s) != len(tail_p):
            continue
        same_tail = all(
            pk == sk and binder_names(pn) == binder_names(sn) and alpha_eq(pt, st)
            for (pk, pn, pt), (sk, sn, st) in zip(tail_p, tail_s))
        if same_tail:
            return True
    return False


def r_conv_ctx(node, sig):
    ps = _premises(node, 2)
    pj = ps[0]
    pe = _as(ps[1], CtxEq, 1)
    c = node.conclusion
    _need(type(c) is type(pj), "RuleMismatch", "conversion preserves the judgment form")
    ok1 = check_ctx_eq(_judgment_ctx(pj), pe.lhs, sig)[0] \
        and check_ctx_eq(_judgment_ctx(c), pe.rhs, sig)[0]
    ok2 = check_ctx_eq(_judgment_ctx(pj), pe.rhs, sig)[0] \
        and check_ctx_eq(_judgment_ctx(c), pe.lhs, sig)[0]
    _need(ok1 or ok2, "ContextShapeError", "contexts do not match the equality", 1)
    _need(_same_judgment_body(sig, c, pj), "RuleMismatch",
          "conversion must not change the judgment body")


def r_conv_ty(node, sig):
    ps = _premises(node, 2)
    pj = _as(ps[0], TmOf, 0)
    pe = _as(ps[1], TyEq, 1)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, c.ctx, pj.ctx, 0)
    _same_ctx(sig, c.ctx, pe.ctx, 1)
    _same_tm(sig, c.ctx, c.tm, pj.tm)
    ok1 = alpha_eq(pe.lhs, pj.ty) and alpha_eq(pe.rhs, c.ty)
    ok2 = alpha_eq(pe.rhs, pj.ty) and alpha_eq(pe.lhs, c.ty)
    okn = check_ty_eq(c.ctx, pj.ty, c.ty, sig)[0] and (
        check_ty_eq(c.ctx, pe.lhs, pj.ty, sig)[0] or check_ty_eq(c.ctx, pe.rhs, pj.ty, sig)[0])
    _need(ok1 or ok2 or okn, "RuleMismatch", "the equality does not connect the types", 1)


def r_tm_disp(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmOf, 0)
    _need(not p.disp, "RuleMismatch", "premise must be a base term", 0)
    c = _as(node.conclusion, TmOf)
    _need(c.disp, "RuleMismatch", "conclusion must be displayed")
    _same_ctx(sig, c.ctx, p.ctx)
    _same_tm(sig, c.ctx, c.tm, p.tm)
    _same_ty(sig, c.ctx, c.ty, p.ty)


def r_tm_undisp(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmOf, 0)
    _need(p.disp, "RuleMismatch", "premise must be displayed", 0)
    c = _as(node.conclusion, TmOf)
    _need(not c.disp, "RuleMismatch", "conclusion must be a base term")
    lk = ctx_lookup_types(c.ctx, sig)
    _need(is_base_headed(normalize_ty(c.ty, lk, sig)), "SideConditionError",
          "the type is not a base type")
    _same_ctx(sig, c.ctx, p.ctx)
    _same_tm(sig, c.ctx, c.tm, p.tm)
    _same_ty(sig, c.ctx, c.ty, p.ty)


# ---------------------------------------------------------------------------
# Sigma term rules
# ---------------------------------------------------------------------------

def _sigma_formation(node, sig, ctx, i_a=0, i_b=1):
    pA = _as(node.children[i_a].conclusion, TyWF, i_a)
    pB = _as(node.children[i_b].conclusion, TyWF, i_b)
    _same_ctx(sig, pA.ctx, ctx, i_a)
    ents = _entries(sig, pB.ctx)
    _need(len(ents) >= 1, "ContextShapeError", "sigma body context is empty", i_b)
    kind, a, ta = ents[-1]
    _need(kind == "ext", "ContextShapeError", "sigma body binder has wrong polarity", i_b)
    _same_ctx(sig, ctx_from_entries(ents[:-1]), ctx, i_b)
    _same_ty(sig, ctx, ta, pA.ty, i_b)
    return pA.ty, a, pB.ty


def r_sigma_pair(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmOf)
    A, a, B = _sigma_formation(node, sig, c.ctx)
    pu = _as(ps[2], TmOf, 2)
    pv = _as(ps[3], TmOf, 3)
    _same_ctx(sig, pu.ctx, c.ctx, 2)
    _same_ctx(sig, pv.ctx, c.ctx, 3)
    _same_ty(sig, c.ctx, pu.ty, A, 2)
    _same_ty(sig, c.ctx, pv.ty, subst_binder(B, a, pu.tm), 3)
    _need(not (pu.disp or pv.disp or c.disp), "RuleMismatch", "base rule")
    _same_tm(sig, c.ctx, c.tm, Pair(pu.tm, pv.tm))
    _same_ty(sig, c.ctx, c.ty, Sigma(a, A, B))


def _sigma_elim_common(node, sig):
    ps = _premises(node, 3)
    c = _as(node.conclusion, TmOf)
    A, a, B = _sigma_formation(node, sig, c.ctx)
    pp = _as(ps[2], TmOf, 2)
    _same_ctx(sig, pp.ctx, c.ctx, 2)
    _same_ty(sig, c.ctx, pp.ty, Sigma(a, A, B), 2)
    _need(not (pp.disp or c.disp), "RuleMismatch", "base rule")
    return A, a, B, pp.tm, c


def r_sigma_fst(node, sig):
    A, a, B, p, c = _sigma_elim_common(node, sig)
    _same_tm(sig, c.ctx, c.tm, Fst(p))
    _same_ty(sig, c.ctx, c.ty, A)


def r_sigma_snd(node, sig):
    A, a, B, p, c = _sigma_elim_common(node, sig)
    _same_tm(sig, c.ctx, c.tm, Snd(p))
    _same_ty(sig, c.ctx, c.ty, subst_binder(B, a, Fst(p)))


def r_sigma_eta(node, sig):
    ps = _premises(node, 3)
    c = _as(node.conclusion, TmEq)
    A, a, B = _sigma_formation(node, sig, c.ctx)
    pp = _as(ps[2], TmOf, 2)
    _same_ctx(sig, pp.ctx, c.ctx, 2)
    _same_ty(sig, c.ctx, pp.ty, Sigma(a, A, B), 2)
    _need(alpha_eq(c.lhs, Pair(Fst(pp.tm), Snd(pp.tm))) or
          alpha_eq(c.rhs, Pair(Fst(pp.tm), Snd(pp.tm))), "RuleMismatch",
          "conclusion is not the eta equation")
    _same_tm(sig, c.ctx, c.lhs, c.rhs)
    _same_ty(sig, c.ctx, c.ty, Sigma(a, A, B))


def _sigma_beta_common(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmEq)
    A, a, B = _sigma_formation(node, sig, c.ctx)
    pu = _as(ps[2], TmOf, 2)
    pv = _as(ps[3], TmOf, 3)
    _same_ctx(sig, pu.ctx, c.ctx, 2)
    _same_ctx(sig, pv.ctx, c.ctx, 3)
    _same_ty(sig, c.ctx, pu.ty, A, 2)
    _same_ty(sig, c.ctx, pv.ty, subst_binder(B, a, pu.tm), 3)
    return A, a, B, pu.tm, pv.tm, c


def r_sigma_beta_1(node, sig):
    A, a, B, u, v, c = _sigma_beta_common(node, sig)
    _need(alpha_eq(c.lhs, Fst(Pair(u, v))), "RuleMismatch", "lhs is not fst of a pair")
    _same_tm(sig, c.ctx, c.rhs, u)
    _same_ty(sig, c.ctx, c.ty, A)


def r_sigma_beta_2(node, sig):
    A, a, B, u, v, c = _sigma_beta_common(node, sig)
    _need(alpha_eq(c.lhs, Snd(Pair(u, v))), "RuleMismatch", "lhs is not snd of a pair")
    _same_tm(sig, c.ctx, c.rhs, v)
    _same_ty(sig, c.ctx, c.ty, subst_binder(B, a, u))


def _op_sigma_parts(node, sig, ctx):
    """From formation premises, the (A, a, B) data plus the normalized
    opposite-sigma type and component types."""
    A, a, B = _sigma_formation(node, sig, ctx)
    lk = ctx_lookup_types(ctx, sig)
    opS = normalize_ty(OpTy(Sigma(a, A, B)), lk, sig)
    opA = normalize_ty(OpTy(A), lk, sig)
    opB = OpTy(B)
    return A, a, B, opS, opA, opB


def r_sigma_op_pair(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmOf)
    A, a, B, opS, opA, opB = _op_sigma_parts(node, sig, c.ctx)
    pu = _as(ps[2], TmOf, 2)
    pv = _as(ps[3], TmOf, 3)
    _same_ctx(sig, pu.ctx, c.ctx, 2)
    _same_ctx(sig, pv.ctx, c.ctx, 3)
    _same_ty(sig, c.ctx, pu.ty, opA, 2)
    _need(not pu.disp, "RuleMismatch", "first component is a base term", 2)
    _same_ty(sig, c.ctx, pv.ty, Twist(a, opA, opB, pu.tm), 3)
    _same_tm(sig, c.ctx, c.tm, Pair(pu.tm, pv.tm))
    _same_ty(sig, c.ctx, c.ty, opS)
    _need(not c.disp, "RuleMismatch", "opposite pairs are base terms")


def _sigma_op_elim_common(node, sig):
    ps = _premises(node, 3)
    c = node.conclusion
    A, a, B, opS, opA, opB = _op_sigma_parts(node, sig, c.ctx)
    pp = _as(ps[2], TmOf, 2)
    _same_ctx(sig, pp.ctx, c.ctx, 2)
    _same_ty(sig, c.ctx, pp.ty, opS, 2)
    _need(not pp.disp, "RuleMismatch", "scrutinee is a base term", 2)
    return A, a, B, opS, opA, opB, pp.tm, c


def r_sigma_op_fst(node, sig):
    A, a, B, opS, opA, opB, p, c = _sigma_op_elim_common(node, sig)
    c = _as(c, TmOf)
    _same_tm(sig, c.ctx, c.tm, Fst(p))
    _same_ty(sig, c.ctx, c.ty, opA)
    _need(not c.disp, "RuleMismatch", "the first projection is a base term")


def r_sigma_op_snd(node, sig):
    A, a, B, opS, opA, opB, p, c = _sigma_op_elim_common(node, sig)
    c = _as(c, TmOf)
    _same_tm(sig, c.ctx, c.tm, Snd(p))
    expected = Twist(a, opA, opB, Fst(p))
    lk = ctx_lookup_types(c.ctx, sig)
    if isinstance(normalize_ty(expected, lk, sig), Twist):
        _need(c.disp, "RuleMismatch", "the second projection is a displayed term")
    _same_ty(sig, c.ctx, c.ty, expected)


def r_sigma_op_eta(node, sig):
    ps = _premises(node, 3)
    c = _as(node.conclusion, TmEq)
    A, a, B, opS, opA, opB = _op_sigma_parts(node, sig, c.ctx)
    pp = _as(ps[2], TmOf, 2)
    _same_ctx(sig, pp.ctx, c.ctx, 2)
    _same_ty(sig, c.ctx, pp.ty, opS, 2)
    _need(alpha_eq(c.lhs, Pair(Fst(pp.tm), Snd(pp.tm))) or
          alpha_eq(c.rhs, Pair(Fst(pp.tm), Snd(pp.tm))), "RuleMismatch",
          "conclusion is not the eta equation")
    _same_tm(sig, c.ctx, c.lhs, c.rhs)
    _same_ty(sig, c.ctx, c.ty, opS)


def r_sigma_op_beta_1(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmEq)
    A, a, B, opS, opA, opB = _op_sigma_parts(node, sig, c.ctx)
    pu = _as(ps[2], TmOf, 2)
    pv = _as(ps[3], TmOf, 3)
    _same_ty(sig, c.ctx, pu.ty, opA, 2)
    _same_ty(sig, c.ctx, pv.ty, Twist(a, opA, opB, pu.tm), 3)
    _need(alpha_eq(c.lhs, Fst(Pair(pu.tm, pv.tm))), "RuleMismatch",
          "lhs is not fst of an opposite pair")
    _same_tm(sig, c.ctx, c.rhs, pu.tm)
    _same_ty(sig, c.ctx, c.ty, opA)


def r_sigma_op_beta_2(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmEq)
    A, a, B, opS, opA, opB = _op_sigma_parts(node, sig, c.ctx)
    pu = _as(ps[2], TmOf, 2)
    pv = _as(ps[3], TmOf, 3)
    _same_ty(sig, c.ctx, pu.ty, opA, 2)
    _same_ty(sig, c.ctx, pv.ty, Twist(a, opA, opB, pu.tm), 3)
    _need(alpha_eq(c.lhs, Snd(Pair(pu.tm, pv.tm))), "RuleMismatch",
          "lhs is not snd of an opposite pair")
    _same_tm(sig, c.ctx, c.rhs, pv.tm)
    _same_ty(sig, c.ctx, c.ty, Twist(a, opA, opB, pu.tm))


def _swap_parts(node, sig, ctx):
    """Premises: X, Y type formations and the Z formation over x:X, y:Y^op."""
    pX = _as(node.children[0].conclusion, TyWF, 0)
    pY = _as(node.children[1].conclusion, TyWF, 1)
    pZ = _as(node.children[2].conclusion, TyWF, 2)
    _same_ctx(sig, pX.ctx, ctx, 0)
    _same_ctx(sig, pY.ctx, ctx, 1)
    ents = _entries(sig, pZ.ctx)
    _need(len(ents) >= 2, "ContextShapeError", "swap body context too short", 2)
    (kx, x, tx), (ky, y, ty_) = ents[-2], ents[-1]
    _need(kx == "ext", "ContextShapeError", "x binder has wrong polarity", 2)
    _same_ctx(sig, ctx_from_entries(ents[:-2]), ctx, 2)
    _same_ty(sig, ctx, tx, pX.ty, 2)
    _same_ty(sig, pZ.ctx, ty_, OpTy(pY.ty), 2)
    return pX.ty, pY.ty, x, y, pZ.ty


def _swap_types(sig, ctx, X, Y, x, y, Z):
    lk = ctx_lookup_types(ctx, sig)
    lhs_ty = normalize_ty(OpTy(Sigma(x, X, SigmaTw(y, Y, Z))), lk, sig)
    rhs_ty = normalize_ty(Sigma(y, OpTy(Y), SigmaTw(x, OpTy(X), OpTy(Z))), lk, sig)
    return lhs_ty, rhs_ty


def r_swap(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmOf)
    X, Y, x, y, Z = _swap_parts(node, sig, c.ctx)
    pp = _as(ps[3], TmOf, 3)
    _same_ctx(sig, pp.ctx, c.ctx, 3)
    lhs_ty, rhs_ty = _swap_types(sig, c.ctx, X, Y, x, y, Z)
    _same_ty(sig, c.ctx, pp.ty, lhs_ty, 3)
    _same_tm(sig, c.ctx, c.tm, Swap(pp.tm))
    _same_ty(sig, c.ctx, c.ty, rhs_ty)


def r_swap_inv(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmOf)
    X, Y, x, y, Z = _swap_parts(node, sig, c.ctx)
    pp = _as(ps[3], TmOf, 3)
    _same_ctx(sig, pp.ctx, c.ctx, 3)
    lhs_ty, rhs_ty = _swap_types(sig, c.ctx, X, Y, x, y, Z)
    _same_ty(sig, c.ctx, pp.ty, rhs_ty, 3)
    _same_tm(sig, c.ctx, c.tm, SwapInv(pp.tm))
    _same_ty(sig, c.ctx, c.ty, lhs_ty)


def r_swap_eta_1(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmEq)
    X, Y, x, y, Z = _swap_parts(node, sig, c.ctx)
    pp = _as(ps[3], TmOf, 3)
    lhs_ty, rhs_ty = _swap_types(sig, c.ctx, X, Y, x, y, Z)
    _same_ty(sig, c.ctx, pp.ty, lhs_ty, 3)
    _need(alpha_eq(c.lhs, SwapInv(Swap(pp.tm))), "RuleMismatch",
          "lhs is not swap-inv of swap")
    _same_tm(sig, c.ctx, c.rhs, pp.tm)
    _same_ty(sig, c.ctx, c.ty, lhs_ty)


def r_swap_eta_2(node, sig):
    ps = _premises(node, 4)
    c = _as(node.conclusion, TmEq)
    X, Y, x, y, Z = _swap_parts(node, sig, c.ctx)
    pp = _as(ps[3], TmOf, 3)
    lhs_ty, rhs_ty = _swap_types(sig, c.ctx, X, Y, x, y, Z)
    _same_ty(sig, c.ctx, pp.ty, rhs_ty, 3)
    _need(alpha_eq(c.lhs, Swap(SwapInv(pp.tm))), "RuleMismatch",
          "lhs is not swap of swap-inv")
    _same_tm(sig, c.ctx, c.rhs, pp.tm)
    _same_ty(sig, c.ctx, c.ty, rhs_ty)


# ---------------------------------------------------------------------------
# Pi term rules
# ---------------------------------------------------------------------------

def _pi_of(sig, ctx, ty, premise=None):
    lk = ctx_lookup_types(ctx, sig)
    t = normalize_ty(ty, lk, sig)
    _need(isinstance(t, Pi), "RuleMismatch", "expected a pi type", premise)
    return t


def _generic_arg(binder):
    return Var(binder) if isinstance(binder, str) else TupleTm(tuple(binder))


def r_pi_intro(node, sig):
    ps = _premises(node, 1)
    pb = _as(ps[0], TmOf, 0)
    c = _as(node.conclusion, TmOf)
    pi = _pi_of(sig, c.ctx, c.ty)
    ents = _entries(sig, pb.ctx, 0)
    _need(len(ents) >= 1, "ContextShapeError", "introduction body context is empty", 0)
    kind, binder, bty = ents[-1]
    _need(kind in ("ext-", "ext"), "ContextShapeError",
          "pi binder has wrong polarity", 0)
    _need(len(binder_names(binder)) == len(binder_names(pi.binder)),
          "RuleMismatch", "binder arities disagree", 0)
    _same_ctx(sig, ctx_from_entries(ents[:-1]), c.ctx, 0)
    _same_ty(sig, pb.ctx, bty, pi.dom, 0)
    cod = subst_binder(pi.cod, pi.binder, _generic_arg(binder))
    _same_ty(sig, pb.ctx, pb.ty, cod, 0)
    _need(not (pb.disp or c.disp), "RuleMismatch", "base rule")
    _same_tm(sig, c.ctx, c.tm, Lam(binder, pb.tm))


def r_pi_app(node, sig):
    ps = _premises(node, 1)
    pf = _as(ps[0], TmOf, 0)
    c = _as(node.conclusion, TmOf)
    pi = _pi_of(sig, pf.ctx, pf.ty, 0)
    _same_ctx(sig, c.ctx, ExtMinus(pf.ctx, pi.binder, pi.dom))
    _same_tm(sig, c.ctx, c.tm, App(pf.tm, _generic_arg(pi.binder)))
    _same_ty(sig, c.ctx, c.ty, pi.cod)
    _need(not (pf.disp or c.disp), "RuleMismatch", "base rule")


def r_pi_elim(node, sig):
    ps = _premises(node, 2)
    pf = _as(ps[0], TmOf, 0)
    pt = _as(ps[1], TmOf, 1)
    c = _as(node.conclusion, TmOf)
    pi = _pi_of(sig, pf.ctx, pf.ty, 0)
    _same_ctx(sig, c.ctx, pf.ctx, 0)
    _same_ctx(sig, pt.ctx, op_ctx(c.ctx, sig), 1)
    _same_ty(sig, pt.ctx, pt.ty, OpTy(pi.dom), 1)
    _need(not (pf.disp or pt.disp or c.disp), "RuleMismatch", "base rule")
    _same_tm(sig, c.ctx, c.tm, App(pf.tm, pt.tm))
    _same_ty(sig, c.ctx, c.ty, subst_binder(pi.cod, pi.binder, pt.tm))


def r_pi_beta(node, sig):
    ps = _premises(node, 1)
    pb = _as(ps[0], TmOf, 0)
    c = _as(node.conclusion, TmEq)
    _same_ctx(sig, c.ctx, pb.ctx, 0)
    _need(isinstance(c.lhs, App) and isinstance(c.lhs.fn, Lam), "RuleMismatch",
          "lhs is not a beta redex")
    lam = c.lhs.fn
    _need(alpha_eq(c.lhs.arg, _generic_arg(lam.binder)), "RuleMismatch",
          "beta rule applies at the generic argument")
    _same_tm(sig, c.ctx, lam.body, pb.tm)
    _same_tm(sig, c.ctx, c.rhs, pb.tm)
    _same_ty(sig, c.ctx, c.ty, pb.ty)


def r_pi_eta(node, sig):
    ps = _premises(node, 1)
    pf = _as(ps[0], TmOf, 0)
    c = _as(node.conclusion, TmEq)
    pi = _pi_of(sig, pf.ctx, pf.ty, 0)
    _same_ctx(sig, c.ctx, pf.ctx, 0)
    want = Lam(pi.binder, App(pf.tm, _generic_arg(pi.binder)))
    _need(alpha_eq(c.lhs, want) or alpha_eq(c.rhs, want), "RuleMismatch",
          "conclusion is not the eta equation")
    _same_tm(sig, c.ctx, c.lhs, c.rhs)
    _same_ty(sig, c.ctx, c.ty, pf.ty)


def _funtw_of(sig, ctx, ty, premise=None):
    """Match the displayed function type Ā -> B; returns (A, B)."""
    lk = ctx_lookup_types(ctx, sig)
    t = normalize_ty(ty, lk, sig)
    _need(isinstance(t, Twist) and isinstance(t.binder_ty, UU)
          and isinstance(t.body, Pi) and isinstance(t.arg, TyTm)
          and isinstance(t.body.dom, ElTy) and t.body.dom.tm == Var(t.binder)
          and t.binder not in free_vars(t.body.cod),
          "RuleMismatch", "expected a twisted function type", premise)
    return t.arg.ty, t.body.cod


def r_funtw_intro(node, sig):
    ps = _premises(node, 3)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    pb = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TmOf)
    _same_ctx(sig, pA.ctx, c.ctx, 0)
    _same_ctx(sig, pB.ctx, c.ctx, 1)
    _need(c.disp, "RuleMismatch", "a twisted function is a displayed term")
    A, B = _funtw_of(sig, c.ctx, c.ty)
    _same_ty(sig, c.ctx, A, pA.ty, 0)
    _same_ty(sig, c.ctx, B, pB.ty, 1)
    _need(isinstance(c.tm, Lam), "RuleMismatch", "conclusion term is not a lambda")
    _same_ctx(sig, pb.ctx, Ext(c.ctx, c.tm.binder, pA.ty), 2)
    _same_ty(sig, pb.ctx, pb.ty, pB.ty, 2)
    _same_tm(sig, pb.ctx, c.tm.body, pb.tm)
    _need(not pb.disp, "RuleMismatch", "the body is a base term", 2)


def r_funtw_app(node, sig):
    ps = _premises(node, 3)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    pf = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TmOf)
    _need(pf.disp, "RuleMismatch", "the function premise is displayed", 2)
    A, B = _funtw_of(sig, pf.ctx, pf.ty, 2)
    _same_ctx(sig, pA.ctx, pf.ctx, 0)
    _same_ty(sig, pf.ctx, A, pA.ty, 0)
    _same_ty(sig, pf.ctx, B, pB.ty, 1)
    ents = _entries(sig, c.ctx)
    kind, a, ta = ents[-1]
    _need(kind == "ext", "ContextShapeError", "application context must extend by the domain")
    _same_ctx(sig, ctx_from_entries(ents[:-1]), pf.ctx)
    _same_ty(sig, pf.ctx, ta, pA.ty)
    _same_tm(sig, c.ctx, c.tm, App(pf.tm, Var(a)))
    _same_ty(sig, c.ctx, c.ty, pB.ty)
    _need(not c.disp, "RuleMismatch", "the application is a base term")


def r_funtw_beta(node, sig):
    ps = _premises(node, 3)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    pb = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TmEq)
    ents = _entries(sig, c.ctx)
    kind, a, ta = ents[-1]
    _need(kind == "ext", "ContextShapeError", "beta context must extend by the domain")
    gamma = ctx_from_entries(ents[:-1])
    _same_ctx(sig, pA.ctx, gamma, 0)
    _same_ty(sig, gamma, ta, pA.ty, 0)
    _same_ctx(sig, pb.ctx, c.ctx, 2)
    _same_ty(sig, c.ctx, pb.ty, pB.ty, 2)
    _need(isinstance(c.lhs, App) and isinstance(c.lhs.fn, Lam), "RuleMismatch",
          "lhs is not a beta redex")
    _need(alpha_eq(c.lhs.arg, Var(a)), "RuleMismatch",
          "beta rule applies at the generic argument")
    _same_tm(sig, c.ctx, c.rhs, pb.tm)
    _same_ty(sig, c.ctx, c.ty, pB.ty)


def r_funtw_eta(node, sig):
    ps = _premises(node, 3)
    pA = _as(ps[0], TyWF, 0)
    pB = _as(ps[1], TyWF, 1)
    pf = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TmEq)
    _need(pf.disp and c.disp, "RuleMismatch", "eta for twisted functions is displayed")
    A, B = _funtw_of(sig, pf.ctx, pf.ty, 2)
    _same_ctx(sig, c.ctx, pf.ctx, 2)
    x = "x"
    want_l = Lam(x, App(pf.tm, Var(x)))
    _need(alpha_eq(c.lhs, want_l) or alpha_eq(c.rhs, want_l), "RuleMismatch",
          "conclusion is not the eta equation")
    _same_tm(sig, c.ctx, c.lhs, c.rhs)
    _same_ty(sig, c.ctx, c.ty, pf.ty)


# ---------------------------------------------------------------------------
# Hom term rules
# ---------------------------------------------------------------------------

def r_hom_intro(node, sig):
    ps = _premises(node, 1)
    pA = _as(ps[0], TyWF, 0)
    _need(not pA.disp, "RuleMismatch", "the subject is a base type", 0)
    c = _as(node.conclusion, TmOf)
    _need(c.disp, "RuleMismatch", "reflexivity is a displayed term")
    ents = _entries(sig, c.ctx)
    _need(len(ents) >= 1, "ContextShapeError", "introduction context is empty")
    kind, a, ta = ents[-1]
    _need(kind == "ext" and isinstance(a, str), "ContextShapeError",
          "introduction context must end with a plain extension")
    gamma = ctx_from_entries(ents[:-1])
    _same_ctx(sig, gamma, pA.ctx, 0)
    _same_ty(sig, gamma, ta, pA.ty, 0)
    _same_tm(sig, c.ctx, c.tm, Refl(Var(a)))
    _same_ty(sig, c.ctx, c.ty, tw_hom(pA.ty, Var(a), Var(a)))


def _hom_elim_parts(node, sig):
    """Common premise analysis for hom elimination and computation."""
    ps = _premises(node, 4)
    pA = _as(ps[0], TyWF, 0)
    pX = _as(ps[1], TyWF, 1)
    pD = _as(ps[2], TyWF, 2)
    pd = _as(ps[3], TmOf, 3)
    _need(not (pA.disp or pX.disp), "RuleMismatch", "subject premises are base types")
    # the X premise fixes Gamma and the name of the diagonal variable
    entsX = _entries(sig, pX.ctx)
    _need(len(entsX) >= 1, "ContextShapeError", "X premise context is empty", 1)
    kX, a, tA = entsX[-1]
    _need(kX == "ext" and isinstance(a, str), "ContextShapeError",
          "X premise context must end with the eliminated variable", 1)
    gamma = ctx_from_entries(entsX[:-1])
    _same_ctx(sig, gamma, pA.ctx, 1)
    _same_ty(sig, gamma, tA, pA.ty, 1)
    # the motive context: Gamma, b:A, a:A ⋊⋉ f:Hom(ā,b), x:X^op
    entsD = _entries(sig, pD.ctx)
    _need(len(entsD) == len(entsX) + 3, "ContextShapeError",
          "motive context has the wrong length", 2)
    (kb, b, tb), (ka, a2, ta2), (kf, f, tf), (kx, x, tx) = entsD[-4:]
    _need(kb == "ext" and ka == "ext" and kf == "twist" and kx in ("ext", "ext-"),
          "ContextShapeError", "motive context entries have the wrong shapes", 2)
    _need(a2 == a, "ContextShapeError",
          "the eliminated variable must keep its name in the motive", 2)
    _same_ctx(sig, ctx_from_entries(entsD[:-4]), gamma, 2)
    _same_ty(sig, gamma, tb, pA.ty, 2)
    _same_ty(sig, gamma, ta2, pA.ty, 2)
    _same_ty(sig, pD.ctx, tf, tw_hom(pA.ty, Var(a), Var(b)), 2)
    _same_ty(sig, pD.ctx, tx, OpTy(pX.ty), 2)
    # the computation premise: Gamma, a:A, x:X ⊢ d ⋊ D[ā/b, Refl/f, x̄/x]
    want_dctx = Ext(Ext(gamma, a, pA.ty), x, pX.ty)
    _same_ctx(sig, pd.ctx, want_dctx, 3)
    ddiag = diagonal_refl_subst(pD.ty, b, a, f, x)
    _same_ty(sig, pd.ctx, pd.ty, ddiag, 3)
    _need(pd.disp or is_base_headed(
        normalize_ty(ddiag, ctx_lookup_types(pd.ctx, sig), sig)),
        "RuleMismatch", "the seed term must be displayed over the diagonal", 3)
    return gamma, pA.ty, pX.ty, pD.ty, pd.tm, b, a, f, x


def r_hom_elim(node, sig):
    gamma, A, X, D, d, b, a, f, x = _hom_elim_parts(node, sig)
    c = _as(node.conclusion, TmOf)
    _need(c.disp, "RuleMismatch", "elimination produces a displayed term")
    want_ctx = Ext(ExtDisp(Ext(Ext(gamma, b, A), a, A), f,
                           Twist(a, A, Hom(A, Var(a), Var(b)), Var(a)), True), x, X)
    _same_ctx(sig, c.ctx, want_ctx)
    _same_tm(sig, c.ctx, c.tm, JTerm(Var(f), Var(x), d))
    _same_ty(sig, c.ctx, c.ty, D)


def r_hom_comp(node, sig):
    gamma, A, X, D, d, b, a, f, x = _hom_elim_parts(node, sig)
    c = _as(node.conclusion, TmEq)
    want_ctx = Ext(Ext(gamma, a, A), x, X)
    _same_ctx(sig, c.ctx, want_ctx)
    _need(alpha_eq(c.lhs, JTerm(Refl(Var(a)), Var(x), d)), "RuleMismatch",
          "lhs is not the elimination at reflexivity")
    _same_tm(sig, c.ctx, c.rhs, d)
    _same_ty(sig, c.ctx, c.ty, diagonal_refl_subst(D, b, a, f, x))


def r_dfunext(node, sig):
    ps = _premises(node, 3)
    pF = _as(ps[0], TmOf, 0)
    pG = _as(ps[1], TmOf, 1)
    pt = _as(ps[2], TmOf, 2)
    c = _as(node.conclusion, TmOf)
    pi = _pi_of(sig, pF.ctx, pF.ty, 0)
    _same_ctx(sig, pF.ctx, c.ctx, 0)
    _same_ctx(sig, pG.ctx, c.ctx, 1)
    _same_ty(sig, c.ctx, pG.ty, pF.ty, 1)
    ents = _entries(sig, pt.ctx, 2)
    _need(len(ents) >= 1, "ContextShapeError", "witness context is empty", 2)
    kind, binder, bty = ents[-1]
    _need(kind in ("ext-", "ext"), "ContextShapeError",
          "witness binder has wrong polarity", 2)
    _same_ctx(sig, ctx_from_entries(ents[:-1]), c.ctx, 2)
    _same_ty(sig, pt.ctx, bty, pi.dom, 2)
    gen = _generic_arg(binder)
    cod = subst_binder(pi.cod, pi.binder, gen)
    want_t_ty = tw_hom(cod, App(pF.tm, gen), App(pG.tm, gen))
    _same_ty(sig, pt.ctx, pt.ty, want_t_ty, 2)
    _need(isinstance(c.tm, DFunext), "RuleMismatch", "conclusion is not dfunext")
    _same_tm(sig, c.ctx, c.tm.arg, pt.tm)
    _same_ty(sig, c.ctx, c.ty, tw_hom(pF.ty, pF.tm, pG.tm))
    lk = ctx_lookup_types(c.ctx, sig)
    if isinstance(normalize_ty(tw_hom(pF.ty, pF.tm, pG.tm), lk, sig), Twist):
        _need(c.disp, "RuleMismatch", "the extensionality witness is displayed")


# ---------------------------------------------------------------------------
# Term equalities
# ---------------------------------------------------------------------------

def r_tm_eq_norm(node, sig):
    _premises(node, 0)
    c = _as(node.conclusion, TmEq)
    ok, _ = check_tm_eq(c.ctx, c.lhs, c.rhs, sig)
    _need(ok, "RuleMismatch", "terms do not share a normal form")


def r_tm_eq_sym(node, sig):
    ps = _premises(node, 1)
    p = _as(ps[0], TmEq, 0)
    c = _as(node.conclusion, TmEq)
    _same_ctx(sig, c.ctx, p.ctx)
    _need(alpha_eq(c.lhs, p.rhs) and alpha_eq(c.rhs, p.lhs), "RuleMismatch",
          "conclusion is not the symmetric premise")
    _same_ty(sig, c.ctx, c.ty, p.ty)


def r_tm_eq_trans(node, sig):
    ps = _premises(node, 2)
    p1 = _as(ps[0], TmEq, 0)
    p2 = _as(ps[1], TmEq, 1)
    c = _as(node.conclusion, TmEq)
    _same_ctx(sig, c.ctx, p1.ctx, 0)
    _same_ctx(sig, c.ctx, p2.ctx, 1)
    _need(alpha_eq(p1.rhs, p2.lhs), "RuleMismatch", "middle terms disagree")
    _need(alpha_eq(c.lhs, p1.lhs) and alpha_eq(c.rhs, p2.rhs), "RuleMismatch",
          "endpoints disagree")
    _same_ty(sig, c.ctx, c.ty, p1.ty)


def r_tm_conv(node, sig):
    ps = _premises(node, 2)
    p = _as(ps[0], TmEq, 0)
    pe = _as(ps[1], TyEq, 1)
    c = _as(node.conclusion, TmEq)
    _same_ctx(sig, c.ctx, p.ctx, 0)
    _same_tm(sig, c.ctx, c.lhs, p.lhs)
    _same_tm(sig, c.ctx, c.rhs, p.rhs)
    ok1 = alpha_eq(pe.lhs, p.ty) and alpha_eq(pe.rhs, c.ty)
    ok2 = alpha_eq(pe.rhs, p.ty) and alpha_eq(pe.lhs, c.ty)
    _need(ok1 or ok2, "RuleMismatch", "the equality does not connect the types", 1)


RULES = {
    "ctx-empty": r_ctx_empty,
    "ctx-ext": r_ctx_ext,
    "ctx-ext-minus": r_ctx_ext_minus,
    "ctx-ext-disp": r_ctx_ext_disp,
    "ctx-ext-twist": r_ctx_ext_twist,
    "ctx-op": r_ctx_op,
    "ctx-eq-op-op": r_ctx_eq_op_op,
    "ctx-eq-op-empty": r_ctx_eq_op_empty,
    "ctx-eq-ext-disp": r_ctx_eq_ext_disp,
    "ctx-eq-closed-ext": r_ctx_eq_closed_ext,
    "ctx-eq-norm": r_ctx_eq_norm,
    "ty-const": r_ty_const,
    "ty-uu": r_ty_uu,
    "ty-set": r_ty_set,
    "ty-code": r_ty_code,
    "sigma-form": r_sigma_form,
    "pi-form": r_pi_form,
    "hom-form": r_hom_form,
    "hom-form-inst": r_hom_form_inst,
    "hom-set": r_hom_set,
    "op-form": r_op_form,
    "ty-disp": r_ty_disp,
    "twist": r_twist,
    "ty-eq-op-inv": r_ty_eq_op_inv,
    "ty-eq-hom-op": r_ty_eq_hom_op,
    "ty-eq-set-op": r_ty_eq_set_op,
    "ty-eq-twist-weak": r_ty_eq_twist_weak,
    "ty-eq-univalence": r_ty_eq_univalence,
    "ty-eq-norm": r_ty_eq_norm,
    "ty-eq-sym": r_ty_eq_sym,
    "ty-eq-trans": r_ty_eq_trans,
    "uu-code": r_uu_code,
    "set-code": r_set_code,
    "set-in-uu": r_set_in_uu,
    "var": r_var,
    "weak": r_weak,
    "subst": r_subst,
    "perm": r_perm,
    "perm-twist": r_perm_twist,
    "conv-ctx": r_conv_ctx,
    "conv-ty": r_conv_ty,
    "tm-disp": r_tm_disp,
    "tm-undisp": r_tm_undisp,
    "sigma-pair": r_sigma_pair,
    "sigma-fst": r_sigma_fst,
    "sigma-snd": r_sigma_snd,
    "sigma-eta": r_sigma_eta,
    "sigma-beta-1": r_sigma_beta_1,
    "sigma-beta-2": r_sigma_beta_2,
    "sigma-op-pair": r_sigma_op_pair,
    "sigma-op-fst": r_sigma_op_fst,
    "sigma-op-snd": r_sigma_op_snd,
    "sigma-op-eta": r_sigma_op_eta,
    "sigma-op-beta-1": r_sigma_op_beta_1,
    "sigma-op-beta-2": r_sigma_op_beta_2,
    "swap": r_swap,
    "swap-inv": r_swap_inv,
    "swap-eta-1": r_swap_eta_1,
    "swap-eta-2": r_swap_eta_2,
    "pi-intro": r_pi_intro,
    "pi-app": r_pi_app,
    "pi-elim": r_pi_elim,
    "pi-beta": r_pi_beta,
    "pi-eta": r_pi_eta,
    "funtw-intro": r_funtw_intro,
    "funtw-app": r_funtw_app,
    "funtw-beta": r_funtw_beta,
    "funtw-eta": r_funtw_eta,
    "hom-intro": r_hom_intro,
    "hom-elim": r_hom_elim,
    "hom-comp": r_hom_comp,
    "dfunext": r_dfunext,
    "tm-eq-norm": r_tm_eq_norm,
    "tm-eq-sym": r_tm_eq_sym,
    "tm-eq-trans": r_tm_eq_trans,
    "tm-conv": r_tm_conv,
}


def check_node(node: Derivation, sig: Signature = EMPTY_SIG) -> dict:
    """Validate one derivation node against its named rule."""
    fn = RULES.get(node.rule)
    if fn is None:
        return {"rule": node.rule, "status": "fail", "error": "RuleMismatch",
                "detail": f"unknown rule {node.rule}"}
    try:
        fn(node, sig)
    except _Fail as exc:
        return {"rule": node.rule, "status": "fail", "error": exc.kind,
                "detail": exc.detail, "premise": exc.premise}
    except (ScopeError, TwistFlagViolation) as exc:
        return {"rule": node.rule, "status": "fail",
                "error": type(exc).__name__, "detail": str(exc)}
    except KernelError as exc:
        return {"rule": node.rule, "status": "fail", "error": "KernelError",
                "detail": str(exc)}
    return {"rule": node.rule, "status": "pass"}


def check_derivation(tree: Derivation, sig: Signature = EMPTY_SIG) -> dict:
    """Check every node of a derivation tree; aggregate a report.

    Shared subtrees (the same node object reachable along several paths)
    are checked once."""
    failures = []
    count = 0
    seen = set()

    def walk(node, path):
        nonlocal count
        if id(node) in seen:
            return
        seen.add(id(node))
        count += 1
        for i, ch in enumerate(node.children):
            walk(ch, path + (i,))
        res = check_node(node, sig)
        if res["status"] != "pass":
            failures.append({"path": list(path), **res})

    walk(tree, ())
    return {"status": "pass" if not failures else "fail",
            "nodes": count, "failures": failures,
            "conclusion": repr(tree.conclusion)}
