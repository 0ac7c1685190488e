"""Builders for the shipped derivation corpus.

Three corpora are produced:
  * the diagonal directed-equality derivation (the motivating example),
  * the four Yoneda trees: the evaluation map, the elimination-built
    inverse, and both round-trip directions,
  * one passing and one failing derivation per rule of the checker.

Every tree is validated while being built, so regenerating the corpus is
itself a test of the checker.  The CLI ships the emitted .ttt files as
package data.
"""

from __future__ import annotations

import dataclasses

from .kernel.elaborate import elab_ctx, elab_tm, elab_ty
from .kernel.normalize import Signature, op_ctx, tw_hom
from .kernel.rules import RULES, check_derivation, check_node
from .kernel.sexp import emit_file
from .kernel.syntax import (
    App, ConstTy, CtxEq, CtxWF, Derivation, DFunext, ElTy, Empty, Ext,
    ExtDisp, ExtMinus, Fst, Hom, JTerm, Lam, OpCtx, OpTy, Pair, Pi, Refl,
    SetU, Sigma, SigmaTw, Snd, Swap, SwapInv, TmEq, TmOf, Twist, TupleTm,
    TyEq, TyTm, TyWF, UU, Var,
)


def D(rule, concl, *children):
    return Derivation(rule, concl, tuple(children))


# ---------------------------------------------------------------------------
# Shared material
# ---------------------------------------------------------------------------

SIG = Signature().declare("A", "ty")
A = ConstTy("A")
ASET = Pi("x0", A, SetU())

CTX_F = Ext(Empty(), "F", ASET)                      # F : A -> Set
G = Ext(CTX_F, "a", A)                               # ... a : A
FA = ElTy(App(Var("F"), Var("a")))
FX = ElTy(App(Var("F"), Var("x")))
SIGY = Sigma("x", A, Hom(A, Var("a"), Var("x")))     # Σ_{x:A} Hom(a,x)
YFA = Pi(("x", "f"), SIGY, FX)                       # the representable-transformations set
PHI_TM = App(Var("phi"), Pair(Var("a"), Refl(Var("a"))))
TWH = Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a"))   # Hom(ā, x)
J_RR = JTerm(Var("f"), Var("r"), Var("r"))
J_PHI = JTerm(Var("f"), PHI_TM, PHI_TM)
J_REFL = JTerm(Var("f"), Var("phi"), Refl(PHI_TM))
W1 = Ext(G, "phi", YFA)


def example_4_1_trees():
    """The diagonal directed-equality type: Hom-Form, Twist, Subst."""
    n_empty = D("ctx-empty", CtxWF(Empty()))
    n_a = D("ty-const", TyWF(Empty(), A), n_empty)
    hom_ctx = Ext(Ext(Empty(), "b", A), "a", OpTy(A))
    n_hom = D("hom-form", TyWF(hom_ctx, Hom(A, Var("a"), Var("b"))), n_a)
    tw_ctx = Ext(Ext(Empty(), "b", A), "a", A)
    tw_ty = Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a"))
    n_twist = D("twist", TyWF(tw_ctx, tw_ty, disp=True), n_hom)
    diag_ctx = Ext(Empty(), "a", A)
    n_var = elab_tm(diag_ctx, Var("a"), A, SIG)
    diag_ty = Twist("a2", A, Hom(A, Var("a2"), Var("a")), Var("a"))
    n_diag = D("subst", TyWF(diag_ctx, diag_ty, disp=True), n_twist, n_var)
    return [("diagonal-hom", n_diag)]


# ---------------------------------------------------------------------------
# The Yoneda trees
# ---------------------------------------------------------------------------

def phi_tree():
    """Evaluation at reflexivity: F, a, phi ⊢ phi(a, Refl_a) : F a."""
    op_w1 = OpCtx(W1)
    p_dom = elab_ty(op_w1, A, SIG)
    p_cod = elab_ty(Ext(op_w1, "x", A), Hom(A, Var("a"), Var("x")), SIG)
    n_u = elab_tm(op_w1, Var("a"), OpTy(A), SIG)
    # Refl over the opposite of (F, a), then weakened by phi
    op_g = OpCtx(G)
    prefix = Ext(Empty(), "F", OpTy(ASET))
    n_refl = D("hom-intro",
               TmOf(op_g, Refl(Var("a")), tw_hom(OpTy(A), Var("a"), Var("a")),
                    disp=True),
               elab_ty(prefix, OpTy(A), SIG))
    n_v = D("weak",
            TmOf(op_w1, Refl(Var("a")), tw_hom(OpTy(A), Var("a"), Var("a")),
                 disp=True),
            n_refl, elab_ty(G, YFA, SIG))
    n_pair = D("sigma-op-pair",
               TmOf(op_w1, Pair(Var("a"), Refl(Var("a"))), OpTy(SIGY)),
               p_dom, p_cod, n_u, n_v)
    n_phi_var = elab_tm(W1, Var("phi"), YFA, SIG)
    return D("pi-elim", TmOf(W1, PHI_TM, FA), n_phi_var, n_pair)


def _psi_elim_premises():
    """The four premises of the directed-equality elimination used by the
    inverse map: subject A, extra variable r : F a, motive F x."""
    p1 = elab_ty(CTX_F, A, SIG)
    p2 = elab_ty(G, FA, SIG)
    # motive well-formedness over the repackaged context, transported back
    w_packed = Ext(ExtMinus(G, ("x", "f"), SIGY), "r", OpTy(FA))
    n_motive_packed = elab_ty(w_packed, FX, SIG)
    ctx5 = Ext(ExtDisp(Ext(Ext(CTX_F, "x", A), "a", A), "f", TWH, True),
               "r", OpTy(FA))
    p3 = D("perm-twist", TyWF(ctx5, FX), n_motive_packed)
    dctx = Ext(G, "r", FA)
    p4 = D("tm-disp", TmOf(dctx, Var("r"), FA, disp=True),
           elab_tm(dctx, Var("r"), FA, SIG))
    return p1, p2, p3, p4


def psi_inner_tree():
    """F, a, r ⋉⁻ (x,f) ⊢ j(f,r,r) : F x, by elimination then repackaging."""
    p1, p2, p3, p4 = _psi_elim_premises()
    ctx5p = Ext(ExtDisp(Ext(Ext(CTX_F, "x", A), "a", A), "f", TWH, True), "r", FA)
    n_elim = D("hom-elim", TmOf(ctx5p, J_RR, FX, disp=True), p1, p2, p3, p4)
    n_und = D("tm-undisp", TmOf(ctx5p, J_RR, FX), n_elim)
    w2 = Ext(ExtMinus(G, ("x", "f"), SIGY), "r", FA)
    n_pt = D("perm-twist", TmOf(w2, J_RR, FX), n_und)
    w3 = ExtMinus(Ext(G, "r", FA), ("x", "f"), SIGY)
    return D("perm", TmOf(w3, J_RR, FX), n_pt)


def psi_tree():
    """F, a, r ⊢ λ(x,f). j(f,r,r) : Y(F,a)."""
    n_perm = psi_inner_tree()
    return D("pi-intro", TmOf(Ext(G, "r", FA), Lam(("x", "f"), J_RR), YFA), n_perm)


def phi_psi_tree():
    """The computation-rule direction: evaluating the elimination-built
    transformation at (a, Refl_a) gives back r."""
    p1, p2, p3, p4 = _psi_elim_premises()
    dctx = Ext(G, "r", FA)
    n_comp = D("hom-comp",
               TmEq(dctx, JTerm(Refl(Var("a")), Var("r"), Var("r")), Var("r"),
                    FA, disp=True), p1, p2, p3, p4)
    applied = App(Lam(("x", "f"), J_RR), Pair(Var("a"), Refl(Var("a"))))
    n_beta = D("tm-eq-norm",
               TmEq(dctx, applied, JTerm(Refl(Var("a")), Var("r"), Var("r")),
                    FA, disp=True))
    return D("tm-eq-trans", TmEq(dctx, applied, Var("r"), FA, disp=True),
             n_beta, n_comp)


def psi_phi_tree():
    """The extensionality direction: dfunext(j_Refl) witnesses that the
    round trip on transformations is the identity."""
    gdf = W1
    p_f = elab_tm(gdf, Var("phi"), YFA, SIG)

    # pG: the composite transformation λ(x,f). j(f, phi(a,Refl_a), phi(a,Refl_a))
    n_inner = psi_inner_tree()          # over F, a, r ⋉⁻ (x,f)
    ctx_g1 = ExtMinus(Ext(Ext(G, "phi", YFA), "r", FA), ("x", "f"), SIGY)
    n_w_g = D("weak", TmOf(ctx_g1, J_RR, FX), n_inner, elab_ty(G, YFA, SIG))
    e_phi_xf = ExtMinus(gdf, ("x", "f"), SIGY)
    n_phi_w = D("weak", TmOf(e_phi_xf, PHI_TM, FA), phi_tree(),
                elab_ty(op_ctx(W1, SIG), SIGY, SIG))
    n_subst_g = D("subst", TmOf(e_phi_xf, J_PHI, FX), n_w_g, n_phi_w)
    p_g = D("pi-intro", TmOf(gdf, Lam(("x", "f"), J_PHI), YFA), n_subst_g)

    # the seed: Refl at phi(a, Refl_a), by substitution into hom-intro
    ctx_w = Ext(gdf, "w", FA)
    n_refl_w = D("hom-intro",
                 TmOf(ctx_w, Refl(Var("w")), tw_hom(FA, Var("w"), Var("w")),
                      disp=True),
                 elab_ty(gdf, FA, SIG))
    n_seed = D("subst",
               TmOf(gdf, Refl(PHI_TM), Hom(FA, PHI_TM, PHI_TM), disp=True),
               n_refl_w, phi_tree())

    # the motive Hom_{Fx}(phi(x,f), j_phi) over the repackaged context
    w_t = Ext(ExtMinus(G, ("x", "f"), SIGY), "phi", YFA)
    n_s_prem = elab_ty(w_t, FX, SIG)
    phixf = App(Var("phi"), TupleTm(("x", "f")))
    n_lhs = D("pi-elim", TmOf(w_t, phixf, OpTy(FX)),
              elab_tm(w_t, Var("phi"), YFA, SIG),
              elab_tm(OpCtx(w_t), TupleTm(("x", "f")), OpTy(SIGY), SIG))
    # j_phi over the same context: weaken phi last, then substitute r
    ctx_t1 = Ext(ExtMinus(Ext(G, "r", FA), ("x", "f"), SIGY), "phi", YFA)
    n_w_t = D("weak", TmOf(ctx_t1, J_RR, FX), psi_inner_tree(),
              elab_ty(ExtMinus(Ext(G, "r", FA), ("x", "f"), SIGY), YFA, SIG))
    n_phi_w2 = D("weak", TmOf(w_t, PHI_TM, FA), phi_tree(),
                 elab_ty(OpCtx(G), SIGY, SIG))
    n_rhs = D("subst", TmOf(w_t, J_PHI, FX), n_w_t, n_phi_w2)
    motive = Hom(FX, phixf, J_PHI)
    n_motive_packed = D("hom-form-inst", TyWF(w_t, motive),
                        n_s_prem, n_lhs, n_rhs)
    ctx5phi = Ext(ExtDisp(Ext(Ext(CTX_F, "x", A), "a", A), "f", TWH, True),
                  "phi", OpTy(YFA))
    n_motive = D("perm-twist", TyWF(ctx5phi, motive), n_motive_packed)

    # the inner elimination producing j_Refl
    p1 = elab_ty(CTX_F, A, SIG)
    p2 = elab_ty(G, YFA, SIG)
    ctx5phi_p = Ext(ExtDisp(Ext(Ext(CTX_F, "x", A), "a", A), "f", TWH, True),
                    "phi", YFA)
    n_elim2 = D("hom-elim", TmOf(ctx5phi_p, J_REFL, motive, disp=True),
                p1, p2, n_motive, n_seed)
    n_pt2 = D("perm-twist", TmOf(w_t, J_REFL, motive, disp=True), n_elim2)
    n_perm2 = D("perm", TmOf(e_phi_xf, J_REFL, motive, disp=True), n_pt2)

    concl_ty = Hom(YFA, Var("phi"), Lam(("x", "f"), J_PHI))
    return D("dfunext", TmOf(gdf, DFunext(J_REFL), concl_ty, disp=True),
             p_f, p_g, n_perm2)


def yoneda_trees():
    return [
        ("yoneda-eval", phi_tree()),
        ("yoneda-inverse", psi_tree()),
        ("yoneda-roundtrip-comp", phi_psi_tree()),
        ("yoneda-roundtrip-ext", psi_phi_tree()),
    ]


# ---------------------------------------------------------------------------
# Per-rule corpus: one passing and one failing derivation per rule
# ---------------------------------------------------------------------------

SIG2 = (Signature().declare("A", "ty").declare("B", "ty").declare("S", "set")
        .declare("Z0", "ty").declare("W0", "ty"))
B = ConstTy("B")
S = ConstTy("S")
Z0 = ConstTy("Z0")


def _mangle(j):
    """A conclusion that no rule accepts in place of j: swap in a spare
    constant type used nowhere else."""
    bogus = ConstTy("W0")
    if isinstance(j, TyWF):
        return dataclasses.replace(j, ty=bogus)
    if isinstance(j, TmOf):
        return dataclasses.replace(j, ty=bogus)
    if isinstance(j, TyEq):
        return dataclasses.replace(j, rhs=bogus)
    if isinstance(j, TmEq):
        return dataclasses.replace(j, rhs=Var("zz_missing"))
    if isinstance(j, CtxWF):
        return CtxWF(Ext(j.ctx, "zz", bogus) if not isinstance(j.ctx, Empty)
                     else Ext(Empty(), "zz", bogus))
    if isinstance(j, CtxEq):
        return CtxEq(j.lhs, Ext(j.rhs, "zz", bogus))
    raise AssertionError(j)


def derive_tw_arrow_wf(dom, cod):
    """TyWF_d(empty, dom̄ -> cod): the twisted function type, by twisting
    the function type of universe variables and substituting the codes."""
    n_empty = D("ctx-empty", CtxWF(Empty()))
    cB = Ext(Empty(), "Bv", UU())
    n_cB = D("ctx-ext", CtxWF(cB), n_empty, D("ty-uu", TyWF(Empty(), UU()), n_empty))
    cBA = Ext(cB, "Av", OpTy(UU()))
    n_uu_cb = D("ty-uu", TyWF(cB, UU()), n_cB)
    n_cBA = D("ctx-ext", CtxWF(cBA), n_cB, D("op-form", TyWF(cB, OpTy(UU())), n_uu_cb))
    pity = Pi("x", ElTy(Var("Av")), ElTy(Var("Bv")))
    # pi-form premises
    n_op_cBA = D("ctx-op", CtxWF(OpCtx(cBA)), n_cBA)
    n_av = D("var", TmOf(OpCtx(cBA), Var("Av"), UU()), n_op_cBA)
    n_dom = D("ty-code", TyWF(OpCtx(cBA), ElTy(Var("Av"))), n_av)
    ext_min = ExtMinus(cBA, "x", ElTy(Var("Av")))
    n_ext_min = D("ctx-ext-minus", CtxWF(ext_min), n_cBA, n_dom)
    n_bv = D("var", TmOf(ext_min, Var("Bv"), UU()), n_ext_min)
    n_cod = D("ty-code", TyWF(ext_min, ElTy(Var("Bv"))), n_bv)
    n_pi = D("pi-form", TyWF(cBA, pity), n_dom, n_cod)
    cBA_cov = Ext(cB, "Av", UU())
    tw = Twist("Av", UU(), pity, Var("Av"))
    n_tw = D("twist", TyWF(cBA_cov, tw, disp=True), n_pi)
    # substitute the code of dom for Av, then of cod for Bv
    n_code_dom = D("uu-code", TmOf(cB, TyTm(dom), UU()),
                   D("ty-const", TyWF(cB, dom), n_cB))
    tw1 = Twist("Av", UU(), pity, TyTm(dom))
    n_s1 = D("subst", TyWF(cB, tw1, disp=True), n_tw, n_code_dom)
    n_code_cod = D("uu-code", TmOf(Empty(), TyTm(cod), UU()),
                   D("ty-const", TyWF(Empty(), cod), n_empty))
    tw2 = Twist("Av", UU(), Pi("x", ElTy(Var("Av")), ElTy(TyTm(cod))), TyTm(dom))
    return D("subst", TyWF(Empty(), tw2, disp=True), n_s1, n_code_cod)


def rule_corpus():
    """(rule, passing tree, failing tree) for every rule of the checker.

    The failing variant corrupts the root conclusion; the generator
    asserts both outcomes, so regeneration re-validates the checker."""
    out = []

    def add(rule, good, bad=None):
        assert good.rule == rule, rule
        res = check_derivation(good, SIG2)
        assert res["status"] == "pass", (rule, res["failures"][:2])
        if bad is None:
            bad = Derivation(rule, _mangle(good.conclusion), good.children)
        assert bad.rule == rule
        assert check_node(bad, SIG2)["status"] == "fail", rule
        out.append((rule, good, bad))

    n_empty = D("ctx-empty", CtxWF(Empty()))
    n_A = D("ty-const", TyWF(Empty(), A), n_empty)
    n_B = D("ty-const", TyWF(Empty(), B), n_empty)
    n_S = D("ty-const", TyWF(Empty(), S), n_empty)
    cA = Ext(Empty(), "a", A)
    n_cA = D("ctx-ext", CtxWF(cA), n_empty, n_A)

    add("ctx-empty", n_empty)
    add("ctx-ext", n_cA)
    n_A_op = D("ty-const", TyWF(OpCtx(Empty()), A),
               D("ctx-op", CtxWF(OpCtx(Empty())), n_empty))
    cm = ExtMinus(Empty(), "m", A)
    add("ctx-ext-minus", D("ctx-ext-minus", CtxWF(cm), n_empty, n_A_op))
    cd = ExtDisp(Empty(), "d", B, False)
    add("ctx-ext-disp", D("ctx-ext-disp", CtxWF(cd), n_empty,
                          D("ty-disp", TyWF(Empty(), B, disp=True), n_B)))
    # twist-marked extension
    cb = Ext(Empty(), "x", A)
    n_cb = D("ctx-ext", CtxWF(cb), n_empty, n_A)
    cba = Ext(cb, "a", A)
    n_cba = D("ctx-ext", CtxWF(cba), n_cb, D("ty-const", TyWF(cb, A), n_cb))
    n_homxa = D("hom-form", TyWF(Ext(cb, "a", OpTy(A)), Hom(A, Var("a"), Var("x"))),
                n_A)
    spread = ExtDisp(cba, "f", Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")),
                     True)
    n_spread = D("ctx-ext-twist", CtxWF(spread), n_cba, n_homxa)
    add("ctx-ext-twist", n_spread,
        D("ctx-ext-twist",
          CtxWF(ExtDisp(cba, "f",
                        Twist("a", A, Hom(A, Var("a"), Var("x")), Var("x")), True)),
          n_cba, n_homxa))
    add("ctx-op", D("ctx-op", CtxWF(OpCtx(cA)), n_cA))
    add("ctx-eq-op-op", D("ctx-eq-op-op", CtxEq(OpCtx(OpCtx(cA)), cA), n_cA),
        D("ctx-eq-op-op", CtxEq(OpCtx(cA), cA), n_cA))
    add("ctx-eq-op-empty", D("ctx-eq-op-empty", CtxEq(OpCtx(Empty()), Empty())),
        D("ctx-eq-op-empty", CtxEq(OpCtx(cA), cA)))
    add("ctx-eq-ext-disp",
        D("ctx-eq-ext-disp", CtxEq(ExtDisp(Empty(), "a", A, False), cA), n_A))
    add("ctx-eq-closed-ext",
        D("ctx-eq-closed-ext", CtxEq(cA, ExtMinus(Empty(), "a", A)), n_A, n_empty))
    add("ctx-eq-norm", D("ctx-eq-norm", CtxEq(OpCtx(OpCtx(cA)), cA)),
        D("ctx-eq-norm", CtxEq(OpCtx(cA), cA)))

    add("ty-const", n_A, D("ty-const", TyWF(Empty(), ConstTy("missing")), n_empty))
    add("ty-uu", D("ty-uu", TyWF(Empty(), UU()), n_empty))
    add("ty-set", D("ty-set", TyWF(Empty(), SetU()), n_empty))
    n_codeA = D("uu-code", TmOf(Empty(), TyTm(A), UU()), n_A)
    add("uu-code", n_codeA)
    n_codeS = D("set-code", TmOf(Empty(), TyTm(S), SetU()), n_S)
    add("set-code", n_codeS,
        D("set-code", TmOf(Empty(), TyTm(A), SetU()), n_A))
    add("set-in-uu", D("set-in-uu", TmOf(Empty(), TyTm(S), UU()), n_codeS),
        D("set-in-uu", TmOf(Empty(), TyTm(A), UU()), n_codeA))
    add("ty-code", D("ty-code", TyWF(Empty(), ElTy(TyTm(A))), n_codeA))

    n_B_over = D("ty-const", TyWF(cA, B), n_cA)
    sig_ab = Sigma("a", A, B)
    add("sigma-form", D("sigma-form", TyWF(Empty(), sig_ab), n_A, n_B_over))
    pi_ab = Pi("a", A, B)
    n_B_min = D("ty-const", TyWF(ExtMinus(Empty(), "a", A), B),
                D("ctx-ext-minus", CtxWF(ExtMinus(Empty(), "a", A)), n_empty, n_A_op))
    add("pi-form", D("pi-form", TyWF(Empty(), pi_ab), n_A_op, n_B_min))
    hom_ctx = Ext(Ext(Empty(), "b", A), "a", OpTy(A))
    n_hom = D("hom-form", TyWF(hom_ctx, Hom(A, Var("a"), Var("b"))), n_A)
    add("hom-form", n_hom,
        D("hom-form", TyWF(Ext(Ext(Empty(), "b", A), "a", A),
                           Hom(A, Var("a"), Var("b"))), n_A))
    # hom at terms
    cs = Ext(Empty(), "s0", S)
    n_cs = D("ctx-ext", CtxWF(cs), n_empty, n_S)
    n_s0 = D("var", TmOf(cs, Var("s0"), S), n_cs)
    n_s0op = D("conv-ty", TmOf(cs, Var("s0"), OpTy(S)), n_s0,
               D("ty-eq-norm", TyEq(cs, S, OpTy(S))))
    n_S_cs = D("ty-const", TyWF(cs, S), n_cs)
    add("hom-form-inst",
        D("hom-form-inst", TyWF(cs, Hom(S, Var("s0"), Var("s0"))),
          n_S_cs, n_s0op, n_s0))
    add("hom-set",
        D("hom-set", TmOf(hom_ctx, TyTm(Hom(A, Var("a"), Var("b"))), SetU()), n_A))
    add("op-form", D("op-form", TyWF(Empty(), OpTy(A)), n_A))
    add("ty-disp", D("ty-disp", TyWF(Empty(), A, disp=True), n_A))
    tw_ty = Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a"))
    add("twist", D("twist", TyWF(Ext(Ext(Empty(), "b", A), "a", A), tw_ty,
                                 disp=True), n_hom))

    add("ty-eq-op-inv", D("ty-eq-op-inv", TyEq(Empty(), OpTy(OpTy(A)), A), n_A),
        D("ty-eq-op-inv", TyEq(Empty(), OpTy(A), A), n_A))
    add("ty-eq-hom-op",
        D("ty-eq-hom-op", TyEq(hom_ctx, OpTy(Hom(A, Var("a"), Var("b"))),
                               Hom(A, Var("a"), Var("b")))),
        D("ty-eq-hom-op", TyEq(Empty(), OpTy(A), A)))
    add("ty-eq-set-op", D("ty-eq-set-op", TyEq(Empty(), OpTy(S), S), n_codeS),
        D("ty-eq-set-op", TyEq(Empty(), OpTy(A), A), n_codeA))
    n_C_over = D("ty-const", TyWF(Empty(), B), n_empty)
    add("ty-eq-twist-weak",
        D("ty-eq-twist-weak",
          TyEq(cA, Twist("a", A, B, Var("a")), B, disp=True), n_A, n_C_over),
        D("ty-eq-twist-weak",
          TyEq(cA, Twist("a", A, Hom(A, Var("a"), Var("a")), Var("a")), B,
               disp=True), n_A, n_C_over))
    n_codeS_op = D("set-code", TmOf(OpCtx(Empty()), TyTm(S), SetU()),
                   D("ty-const", TyWF(OpCtx(Empty()), S),
                     D("ctx-op", CtxWF(OpCtx(Empty())), n_empty)))
    add("ty-eq-univalence",
        D("ty-eq-univalence",
          TyEq(Empty(), Hom(SetU(), TyTm(S), TyTm(S)),
               Pi("x", ElTy(TyTm(S)), ElTy(TyTm(S)))), n_codeS_op, n_codeS),
        D("ty-eq-univalence",
          TyEq(Empty(), Hom(SetU(), TyTm(S), TyTm(S)),
               Pi("x", ElTy(TyTm(S)), ElTy(TyTm(A)))), n_codeS_op, n_codeS))
    add("ty-eq-norm", D("ty-eq-norm", TyEq(Empty(), OpTy(OpTy(A)), A)),
        D("ty-eq-norm", TyEq(Empty(), OpTy(A), A)))
    n_eq1 = D("ty-eq-norm", TyEq(Empty(), OpTy(OpTy(A)), A))
    add("ty-eq-sym", D("ty-eq-sym", TyEq(Empty(), A, OpTy(OpTy(A))), n_eq1))
    add("ty-eq-trans", D("ty-eq-trans", TyEq(Empty(), OpTy(OpTy(A)), A), n_eq1,
                         D("ty-eq-norm", TyEq(Empty(), A, A))))

    n_varA = D("var", TmOf(cA, Var("a"), A), n_cA)
    add("var", n_varA, D("var", TmOf(cA, Var("zz"), A), n_cA))
    cAB = Ext(cA, "c", B)
    n_cAB = D("ctx-ext", CtxWF(cAB), n_cA, n_B_over)
    add("weak", D("weak", TmOf(cAB, Var("a"), A), n_varA, n_B_over),
        D("weak", TmOf(Ext(cA, "a", B), Var("a"), A), n_varA, n_B_over))
    # substitution: the diagonal hom (Example 4.1)
    diag = example_4_1_trees()[0][1]
    add("subst", diag,
        Derivation("subst", dataclasses.replace(
            diag.conclusion, ty=Twist("a2", A, Hom(A, Var("a2"), Var("a2")),
                                      Var("a"))), diag.children))
    cBA2 = Ext(Ext(Empty(), "c", B), "a", A)
    n_varA2 = D("weak", TmOf(cAB, Var("a"), A), n_varA, n_B_over)
    add("perm", D("perm", TmOf(cBA2, Var("a"), A), n_varA2),
        D("perm", TmOf(cBA2, Var("a"), B), n_varA2))
    # perm-twist on the representable package
    n_f = D("var", TmOf(spread, Var("f"),
                        Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")),
                        disp=True), n_spread)
    packed = ExtMinus(cA, ("x", "f"), Sigma("x", A, Hom(A, Var("a"), Var("x"))))
    add("perm-twist",
        D("perm-twist", TmOf(packed, Var("f"),
                             Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")),
                             disp=True), n_f),
        D("perm-twist", TmOf(ExtMinus(cA, ("x", "f"),
                                      Sigma("x", A, Hom(A, Var("x"), Var("a")))),
                             Var("f"),
                             Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")),
                             disp=True), n_f))
    n_ctx_eq = D("ctx-eq-ext-disp", CtxEq(ExtDisp(Empty(), "a", A, False), cA), n_A)
    n_var_disp = D("var", TmOf(ExtDisp(Empty(), "a", A, False), Var("a"), A),
                   D("ctx-ext-disp", CtxWF(ExtDisp(Empty(), "a", A, False)),
                     n_empty, D("ty-disp", TyWF(Empty(), A, disp=True), n_A)))
    add("conv-ctx", D("conv-ctx", TmOf(cA, Var("a"), A), n_var_disp, n_ctx_eq))
    n_seteq = D("ty-eq-set-op", TyEq(cs, OpTy(S), S),
                D("set-code", TmOf(cs, TyTm(S), SetU()), n_S_cs))
    add("conv-ty", D("conv-ty", TmOf(cs, Var("s0"), OpTy(S)), n_s0, n_seteq))
    add("tm-disp", D("tm-disp", TmOf(cA, Var("a"), A, disp=True), n_varA))
    n_refl = D("hom-intro", TmOf(cA, Refl(Var("a")),
                                 tw_hom(A, Var("a"), Var("a")), disp=True), n_A)
    add("tm-undisp",
        D("tm-undisp", TmOf(cA, Var("a"), A),
          D("tm-disp", TmOf(cA, Var("a"), A, disp=True), n_varA)),
        D("tm-undisp", TmOf(cA, Refl(Var("a")), tw_hom(A, Var("a"), Var("a"))),
          n_refl))

    # sigma terms over u:A, v:B
    cuv = Ext(Ext(Empty(), "u", A), "v", B)
    n_cu = D("ctx-ext", CtxWF(Ext(Empty(), "u", A)), n_empty, n_A)
    n_cuv = D("ctx-ext", CtxWF(cuv), n_cu,
              D("ty-const", TyWF(Ext(Empty(), "u", A), B), n_cu))
    n_A_uv = D("ty-const", TyWF(cuv, A), n_cuv)
    n_B_uv = D("ty-const", TyWF(Ext(cuv, "a", A), B),
               D("ctx-ext", CtxWF(Ext(cuv, "a", A)), n_cuv, n_A_uv))
    nu = D("var", TmOf(cuv, Var("u"), A), n_cuv)
    nv = D("var", TmOf(cuv, Var("v"), B), n_cuv)
    add("sigma-pair", D("sigma-pair", TmOf(cuv, Pair(Var("u"), Var("v")), sig_ab),
                        n_A_uv, n_B_uv, nu, nv))
    cp = Ext(Empty(), "p", sig_ab)
    n_cp = D("ctx-ext", CtxWF(cp), n_empty,
             D("sigma-form", TyWF(Empty(), sig_ab), n_A, n_B_over))
    n_A_p = D("ty-const", TyWF(cp, A), n_cp)
    n_B_p = D("ty-const", TyWF(Ext(cp, "a", A), B),
              D("ctx-ext", CtxWF(Ext(cp, "a", A)), n_cp, n_A_p))
    np_ = D("var", TmOf(cp, Var("p"), sig_ab), n_cp)
    add("sigma-fst", D("sigma-fst", TmOf(cp, Fst(Var("p")), A), n_A_p, n_B_p, np_))
    add("sigma-snd", D("sigma-snd", TmOf(cp, Snd(Var("p")), B), n_A_p, n_B_p, np_))
    add("sigma-eta", D("sigma-eta",
                       TmEq(cp, Pair(Fst(Var("p")), Snd(Var("p"))), Var("p"),
                            sig_ab), n_A_p, n_B_p, np_))
    add("sigma-beta-1", D("sigma-beta-1",
                          TmEq(cuv, Fst(Pair(Var("u"), Var("v"))), Var("u"), A),
                          n_A_uv, n_B_uv, nu, nv))
    add("sigma-beta-2", D("sigma-beta-2",
                          TmEq(cuv, Snd(Pair(Var("u"), Var("v"))), Var("v"), B),
                          n_A_uv, n_B_uv, nu, nv))

    # opposite sigma terms: q : (Sigma a:A. B)^op bound in the context
    op_sig = OpTy(sig_ab)
    cq = Ext(Empty(), "q", op_sig)
    n_cq = D("ctx-ext", CtxWF(cq), n_empty,
             D("op-form", TyWF(Empty(), op_sig),
               D("sigma-form", TyWF(Empty(), sig_ab), n_A, n_B_over)))
    n_A_q = D("ty-const", TyWF(cq, A), n_cq)
    n_B_q = D("ty-const", TyWF(Ext(cq, "a", A), B),
              D("ctx-ext", CtxWF(Ext(cq, "a", A)), n_cq, n_A_q))
    nq = D("var", TmOf(cq, Var("q"), op_sig), n_cq)
    add("sigma-op-fst", D("sigma-op-fst", TmOf(cq, Fst(Var("q")), OpTy(A)),
                          n_A_q, n_B_q, nq))
    add("sigma-op-snd",
        D("sigma-op-snd",
          TmOf(cq, Snd(Var("q")), Twist("a", OpTy(A), OpTy(B), Fst(Var("q"))),
               disp=True), n_A_q, n_B_q, nq))
    add("sigma-op-eta", D("sigma-op-eta",
                          TmEq(cq, Pair(Fst(Var("q")), Snd(Var("q"))), Var("q"),
                               op_sig), n_A_q, n_B_q, nq))
    # opposite pair: components op-u : A^op, op-v twisted over it
    cov = Ext(Ext(Empty(), "ou", OpTy(A)), "ov", Twist("a", OpTy(A), OpTy(B),
                                                       Var("ou")))
    n_cou = D("ctx-ext", CtxWF(Ext(Empty(), "ou", OpTy(A))), n_empty,
              D("op-form", TyWF(Empty(), OpTy(A)), n_A))
    # the twisted entry type is B^op weakened, which is vacuous: collapse to B^op
    n_ov_ty = D("ty-disp",
                TyWF(Ext(Empty(), "ou", OpTy(A)),
                     Twist("a", OpTy(A), OpTy(B), Var("ou")), disp=True),
                D("op-form", TyWF(Ext(Empty(), "ou", OpTy(A)), OpTy(B)),
                  D("ty-const", TyWF(Ext(Empty(), "ou", OpTy(A)), B), n_cou)))
    n_cov = D("ctx-ext-disp", CtxWF(ExtDisp(Ext(Empty(), "ou", OpTy(A)), "ov",
                                            Twist("a", OpTy(A), OpTy(B),
                                                  Var("ou")), False)),
              n_cou, n_ov_ty)
    cov = ExtDisp(Ext(Empty(), "ou", OpTy(A)), "ov",
                  Twist("a", OpTy(A), OpTy(B), Var("ou")), False)
    n_A_ov = D("ty-const", TyWF(cov, A), n_cov)
    n_B_ov = D("ty-const", TyWF(Ext(cov, "a", A), B),
               D("ctx-ext", CtxWF(Ext(cov, "a", A)), n_cov, n_A_ov))
    n_ou = D("var", TmOf(cov, Var("ou"), OpTy(A)), n_cov)
    n_ov = D("var", TmOf(cov, Var("ov"),
                         Twist("a", OpTy(A), OpTy(B), Var("ou")), disp=True),
             n_cov)
    add("sigma-op-pair",
        D("sigma-op-pair", TmOf(cov, Pair(Var("ou"), Var("ov")), op_sig),
          n_A_ov, n_B_ov, n_ou, n_ov))
    add("sigma-op-beta-1",
        D("sigma-op-beta-1",
          TmEq(cov, Fst(Pair(Var("ou"), Var("ov"))), Var("ou"), OpTy(A)),
          n_A_ov, n_B_ov, n_ou, n_ov))
    add("sigma-op-beta-2",
        D("sigma-op-beta-2",
          TmEq(cov, Snd(Pair(Var("ou"), Var("ov"))), Var("ov"),
               Twist("a", OpTy(A), OpTy(B), Var("ou"))),
          n_A_ov, n_B_ov, n_ou, n_ov))

    # swap rules over a packaged double sigma
    inner_sw = Sigma("x", A, SigmaTw("y", B, Z0))
    csw = Ext(Empty(), "p", OpTy(inner_sw))
    n_Z0 = D("ty-const", TyWF(Ext(Ext(Empty(), "x", A), "y", OpTy(B)), Z0),
             D("ctx-ext", CtxWF(Ext(Ext(Empty(), "x", A), "y", OpTy(B))),
               D("ctx-ext", CtxWF(Ext(Empty(), "x", A)), n_empty, n_A),
               D("op-form", TyWF(Ext(Empty(), "x", A), OpTy(B)),
                 D("ty-const", TyWF(Ext(Empty(), "x", A), B),
                   D("ctx-ext", CtxWF(Ext(Empty(), "x", A)), n_empty, n_A)))))
    n_inner_tw = D("twist", TyWF(Ext(Ext(Empty(), "x", A), "y", B),
                                 Twist("y", B, Z0, Var("y")), disp=True), n_Z0)
    # context for swap: bind p at the opposite of the packaged sigma.
    # well-formedness of the packaged type follows from its normal form:
    # (Σ x:A. Σ^⋈ y:B. Z0)^op; we justify the binding via ty-eq-norm on
    # formation of an equal normal form
    swap_src_norm = SigmaTw("x", OpTy(A), Sigma("y", OpTy(B), OpTy(Z0)))
    n_csw = D("ctx-ext", CtxWF(Ext(Empty(), "p", swap_src_norm)), n_empty,
              _swap_src_wf(n_empty, n_A))
    csw = Ext(Empty(), "p", swap_src_norm)
    n_A_sw = D("ty-const", TyWF(csw, A), n_csw)
    n_B_sw = D("ty-const", TyWF(csw, B), n_csw)
    n_Z_sw = D("ty-const", TyWF(Ext(Ext(csw, "x", A), "y", OpTy(B)), Z0),
               D("ctx-ext", CtxWF(Ext(Ext(csw, "x", A), "y", OpTy(B))),
                 D("ctx-ext", CtxWF(Ext(csw, "x", A)), n_csw, n_A_sw),
                 D("op-form", TyWF(Ext(csw, "x", A), OpTy(B)),
                   D("ty-const", TyWF(Ext(csw, "x", A), B),
                     D("ctx-ext", CtxWF(Ext(csw, "x", A)), n_csw, n_A_sw)))))
    npsw = D("var", TmOf(csw, Var("p"), swap_src_norm), n_csw)
    swap_tgt = Sigma("y", OpTy(B), SigmaTw("x", OpTy(A), OpTy(Z0)))
    add("swap", D("swap", TmOf(csw, Swap(Var("p")), swap_tgt),
                  n_A_sw, n_B_sw, n_Z_sw, npsw))
    cswi = Ext(Empty(), "r0", swap_tgt)
    n_cswi = D("ctx-ext", CtxWF(cswi), n_empty, _swap_tgt_wf(n_empty, n_A))
    n_A_swi = D("ty-const", TyWF(cswi, A), n_cswi)
    n_B_swi = D("ty-const", TyWF(cswi, B), n_cswi)
    n_Z_swi = D("ty-const", TyWF(Ext(Ext(cswi, "x", A), "y", OpTy(B)), Z0),
                D("ctx-ext", CtxWF(Ext(Ext(cswi, "x", A), "y", OpTy(B))),
                  D("ctx-ext", CtxWF(Ext(cswi, "x", A)), n_cswi, n_A_swi),
                  D("op-form", TyWF(Ext(cswi, "x", A), OpTy(B)),
                    D("ty-const", TyWF(Ext(cswi, "x", A), B),
                      D("ctx-ext", CtxWF(Ext(cswi, "x", A)), n_cswi, n_A_swi)))))
    nrsw = D("var", TmOf(cswi, Var("r0"), swap_tgt), n_cswi)
    add("swap-inv", D("swap-inv", TmOf(cswi, SwapInv(Var("r0")), swap_src_norm),
                      n_A_swi, n_B_swi, n_Z_swi, nrsw))
    add("swap-eta-1", D("swap-eta-1",
                        TmEq(csw, SwapInv(Swap(Var("p"))), Var("p"),
                             swap_src_norm), n_A_sw, n_B_sw, n_Z_sw, npsw))
    add("swap-eta-2", D("swap-eta-2",
                        TmEq(cswi, Swap(SwapInv(Var("r0"))), Var("r0"),
                             swap_tgt), n_A_swi, n_B_swi, n_Z_swi, nrsw))

    # pi terms
    ext = ExtMinus(Empty(), "x", A)
    n_ext = D("ctx-ext-minus", CtxWF(ext), n_empty, n_A_op)
    n_x = D("var", TmOf(ext, Var("x"), A), n_ext)
    pi_aa = Pi("x", A, A)
    n_lam = D("pi-intro", TmOf(Empty(), Lam("x", Var("x")), pi_aa), n_x)
    add("pi-intro", n_lam)
    add("pi-app", D("pi-app", TmOf(ext, App(Lam("x", Var("x")), Var("x")), A),
                    n_lam))
    n_c = D("ctx-ext", CtxWF(Ext(Empty(), "c", A)), n_empty, n_A)
    n_lam_w = D("weak", TmOf(Ext(Empty(), "c", A), Lam("x", Var("x")), pi_aa),
                n_lam, n_A)
    n_arg = D("var", TmOf(OpCtx(Ext(Empty(), "c", A)), Var("c"), OpTy(A)),
              D("ctx-op", CtxWF(OpCtx(Ext(Empty(), "c", A))), n_c))
    add("pi-elim",
        D("pi-elim", TmOf(Ext(Empty(), "c", A),
                          App(Lam("x", Var("x")), Var("c")), A), n_lam_w, n_arg))
    add("pi-beta", D("pi-beta", TmEq(ext, App(Lam("x", Var("x")), Var("x")),
                                     Var("x"), A), n_x))
    add("pi-eta", D("pi-eta",
                    TmEq(Empty(), Lam("x", App(Lam("x", Var("x")), Var("x"))),
                         Lam("x", Var("x")), pi_aa), n_lam))

    # twisted function terms
    twab = tw_arrow(A, B)
    n_twab_wf = derive_tw_arrow_wf(A, B)
    ccb = Ext(Empty(), "cb", B)
    n_ccb = D("ctx-ext", CtxWF(ccb), n_empty, n_B)
    n_A_cb = D("ty-const", TyWF(ccb, A), n_ccb)
    n_B_cb = D("ty-const", TyWF(ccb, B), n_ccb)
    n_body = D("weak", TmOf(Ext(ccb, "q", A), Var("cb"), B),
               D("var", TmOf(ccb, Var("cb"), B), n_ccb), n_A_cb)
    add("funtw-intro",
        D("funtw-intro", TmOf(ccb, Lam("q", Var("cb")), twab, disp=True),
          n_A_cb, n_B_cb, n_body))
    cg_ = ExtDisp(Empty(), "g", twab, False)
    n_cg = D("ctx-ext-disp", CtxWF(cg_), n_empty, n_twab_wf)
    n_A_g = D("ty-const", TyWF(cg_, A), n_cg)
    n_B_g = D("ty-const", TyWF(cg_, B), n_cg)
    n_g = D("var", TmOf(cg_, Var("g"), twab, disp=True), n_cg)
    add("funtw-app",
        D("funtw-app", TmOf(Ext(cg_, "q", A), App(Var("g"), Var("q")), B),
          n_A_g, n_B_g, n_g))
    add("funtw-beta",
        D("funtw-beta", TmEq(Ext(ccb, "q", A), App(Lam("q", Var("cb")), Var("q")),
                             Var("cb"), B), n_A_cb, n_B_cb, n_body))
    add("funtw-eta",
        D("funtw-eta", TmEq(cg_, Lam("x", App(Var("g"), Var("x"))), Var("g"),
                            twab, disp=True), n_A_g, n_B_g, n_g))

    # hom terms
    add("hom-intro", n_refl)
    he = _hom_elim_nodes(n_empty, n_A, n_cA)
    add("hom-elim", he["elim"],
        Derivation("hom-elim", he["bad_concl"], he["elim"].children))
    add("hom-comp", he["comp"])
    # dfunext from the Yoneda corpus
    dfx = psi_phi_tree()
    add("dfunext", dfx,
        Derivation("dfunext", dataclasses.replace(dfx.conclusion, tm=Var("zz")),
                   dfx.children))

    add("tm-eq-norm",
        D("tm-eq-norm", TmEq(cuv, Fst(Pair(Var("u"), Var("v"))), Var("u"), A)),
        D("tm-eq-norm", TmEq(cuv, Var("u"), Var("v"), A)))
    n_eq_t = D("tm-eq-norm", TmEq(cuv, Fst(Pair(Var("u"), Var("v"))), Var("u"), A))
    add("tm-eq-sym",
        D("tm-eq-sym", TmEq(cuv, Var("u"), Fst(Pair(Var("u"), Var("v"))), A),
          n_eq_t))
    add("tm-eq-trans",
        D("tm-eq-trans", TmEq(cuv, Fst(Pair(Var("u"), Var("v"))), Var("u"), A),
          n_eq_t, D("tm-eq-norm", TmEq(cuv, Var("u"), Var("u"), A))))
    n_eq_s = D("tm-eq-norm", TmEq(cs, Var("s0"), Var("s0"), S))
    add("tm-conv", D("tm-conv", TmEq(cs, Var("s0"), Var("s0"), OpTy(S)),
                     n_eq_s, n_seteq))

    covered = {r for r, _, _ in out}
    missing = set(RULES) - covered
    assert not missing, f"rules without corpus coverage: {sorted(missing)}"
    return out


def _swap_src_wf(n_empty, n_A):
    """TyWF(empty, (Σ x:A. Σ^⋈ y:B. Z0)^op) stated in normal form, justified
    by formation of the unnormalized type plus conversion."""
    n_B = D("ty-const", TyWF(Empty(), ConstTy("B")), n_empty)
    cx = Ext(Empty(), "x", A)
    n_cx = D("ctx-ext", CtxWF(cx), n_empty, n_A)
    n_Z = D("ty-const", TyWF(Ext(cx, "y", OpTy(B)), Z0),
            D("ctx-ext", CtxWF(Ext(cx, "y", OpTy(B))), n_cx,
              D("op-form", TyWF(cx, OpTy(B)),
                D("ty-const", TyWF(cx, B), n_cx))))
    n_tw = D("twist", TyWF(Ext(cx, "y", B), Twist("y", B, Z0, Var("y")),
                           disp=True), n_Z)
    # the packaged type: Σ x:A. (Σ y:B^op. Z0^op)^op, i.e. SigmaTw
    inner = SigmaTw("y", B, Z0)
    n_inner = _sigma_tw_wf(n_empty, n_A, cx, n_cx)
    n_sig = D("sigma-form", TyWF(Empty(), Sigma("x", A, inner)), n_A, n_inner)
    return D("op-form", TyWF(Empty(), OpTy(Sigma("x", A, inner))), n_sig)


def _sigma_tw_wf(n_empty, n_A, cx, n_cx):
    """TyWF(x:A ⊢ Σ^⋈ y:B. Z0): the packaged opposite sigma, formed as the
    opposite of Σ y:B^op. Z0^op."""
    B_ = ConstTy("B")
    n_Bop = D("op-form", TyWF(cx, OpTy(B_)), D("ty-const", TyWF(cx, B_), n_cx))
    cxy = Ext(cx, "y", OpTy(B_))
    n_cxy = D("ctx-ext", CtxWF(cxy), n_cx, n_Bop)
    n_Z0op = D("op-form", TyWF(cxy, OpTy(Z0)), D("ty-const", TyWF(cxy, Z0), n_cxy))
    n_sig = D("sigma-form", TyWF(cx, Sigma("y", OpTy(B_), OpTy(Z0))), n_Bop, n_Z0op)
    return D("op-form", TyWF(cx, SigmaTw("y", B_, Z0)), n_sig)


def _swap_tgt_wf(n_empty, n_A):
    """TyWF(empty, Σ y:B^op. Σ^⋈ x:A^op. Z0^op)."""
    B_ = ConstTy("B")
    n_Bop = D("op-form", TyWF(Empty(), OpTy(B_)),
              D("ty-const", TyWF(Empty(), B_), n_empty))
    cy = Ext(Empty(), "y", OpTy(B_))
    n_cy = D("ctx-ext", CtxWF(cy), n_empty, n_Bop)
    n_Aop = D("op-form", TyWF(cy, OpTy(A)), D("ty-const", TyWF(cy, A), n_cy))
    cyx = Ext(cy, "x", OpTy(OpTy(A)))
    n_cyx = D("ctx-ext", CtxWF(cyx), n_cy,
              D("op-form", TyWF(cy, OpTy(OpTy(A))), n_Aop))
    n_Z0op2 = D("op-form", TyWF(cyx, OpTy(OpTy(Z0))),
                D("op-form", TyWF(cyx, OpTy(Z0)),
                  D("ty-const", TyWF(cyx, Z0), n_cyx)))
    n_sig_in = D("sigma-form", TyWF(cy, Sigma("x", OpTy(OpTy(A)), OpTy(OpTy(Z0)))),
                 D("op-form", TyWF(cy, OpTy(OpTy(A))), n_Aop), n_Z0op2)
    n_stw = D("op-form", TyWF(cy, SigmaTw("x", OpTy(A), OpTy(Z0))), n_sig_in)
    return D("sigma-form",
             TyWF(Empty(), Sigma("y", OpTy(B_), SigmaTw("x", OpTy(A), OpTy(Z0)))),
             n_Bop, n_stw)


def _hom_elim_nodes(n_empty, n_A, n_cA):
    """Elimination and computation nodes with a constant motive."""
    B_ = ConstTy("B")
    diag_ctx = Ext(Empty(), "a", A)
    n_X = D("ty-const", TyWF(diag_ctx, B_), n_cA)
    twh = Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a"))
    cb = Ext(Empty(), "b", A)
    n_cb = D("ctx-ext", CtxWF(cb), n_empty, n_A)
    cba = Ext(cb, "a", A)
    n_cba = D("ctx-ext", CtxWF(cba), n_cb, D("ty-const", TyWF(cb, A), n_cb))
    n_hom = D("hom-form", TyWF(Ext(cb, "a", OpTy(A)), Hom(A, Var("a"), Var("b"))),
              n_A)
    tw5 = ExtDisp(cba, "f", twh, True)
    n_tw5 = D("ctx-ext-twist", CtxWF(tw5), n_cba, n_hom)
    ctx5 = Ext(tw5, "x", OpTy(B_))
    n_ctx5 = D("ctx-ext", CtxWF(ctx5), n_tw5,
               D("op-form", TyWF(tw5, OpTy(B_)),
                 D("ty-const", TyWF(tw5, B_), n_tw5)))
    n_D = D("ty-const", TyWF(ctx5, B_), n_ctx5)
    dctx = Ext(diag_ctx, "x", B_)
    n_dctx = D("ctx-ext", CtxWF(dctx), n_cA, n_X)
    n_d = D("tm-disp", TmOf(dctx, Var("x"), B_, disp=True),
            D("var", TmOf(dctx, Var("x"), B_), n_dctx))
    ctx5p = Ext(tw5, "x", B_)
    elim = D("hom-elim", TmOf(ctx5p, JTerm(Var("f"), Var("x"), Var("x")), B_,
                              disp=True), n_A, n_X, n_D, n_d)
    comp = D("hom-comp", TmEq(dctx, JTerm(Refl(Var("a")), Var("x"), Var("x")),
                              Var("x"), B_, disp=True), n_A, n_X, n_D, n_d)
    bad_concl = dataclasses.replace(elim.conclusion, ty=A)
    return {"elim": elim, "comp": comp, "bad_concl": bad_concl}


# ---------------------------------------------------------------------------
# Negative corpus: the named bad hom-elimination (missing twist mark)
# ---------------------------------------------------------------------------

def bad_hom_elim_tree():
    """A hom-elimination whose motive context lacks the twist mark; the
    checker rejects it with a context-shape error."""
    n_empty = D("ctx-empty", CtxWF(Empty()))
    n_A = D("ty-const", TyWF(Empty(), A), n_empty)
    cA = Ext(Empty(), "a", A)
    n_cA = D("ctx-ext", CtxWF(cA), n_empty, n_A)
    nodes = _hom_elim_nodes(n_empty, n_A, n_cA)
    elim = nodes["elim"]
    # remove the twist mark from the conclusion and motive contexts
    def strip(ctx):
        if isinstance(ctx, ExtDisp):
            return ExtDisp(strip(ctx.ctx), ctx.name, ctx.ty, False)
        if isinstance(ctx, Ext):
            return Ext(strip(ctx.ctx), ctx.name, ctx.ty)
        return ctx
    bad_children = list(elim.children)
    p3 = bad_children[2]
    bad_children[2] = Derivation(
        "ty-const", dataclasses.replace(p3.conclusion, ctx=strip(p3.conclusion.ctx)),
        (D("ctx-ext-disp", CtxWF(strip(p3.conclusion.ctx).ctx), *()),))
    concl = dataclasses.replace(elim.conclusion, ctx=strip(elim.conclusion.ctx))
    return Derivation("hom-elim", concl, tuple(bad_children))


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def corpus_files():
    """name -> file text for every shipped corpus file."""
    files = {}
    files["example_4_1.ttt"] = emit_file(SIG, example_4_1_trees())
    files["yoneda.ttt"] = emit_file(SIG, yoneda_trees())
    rules = rule_corpus()
    files["rules_pass.ttt"] = emit_file(SIG2, [(f"rule-{r}", g) for r, g, _ in rules])
    files["negative/rules_fail.ttt"] = emit_file(
        SIG2, [(f"rule-{r}-bad", b) for r, _, b in rules])
    files["negative/bad-hom-elim.ttt"] = emit_file(SIG2, [("bad-hom-elim",
                                                           bad_hom_elim_tree())])
    return files


def write_corpus(dest):
    import pathlib
    dest = pathlib.Path(dest)
    (dest / "negative").mkdir(parents=True, exist_ok=True)
    for name, text in corpus_files().items():
        (dest / name).write_text(text)
    return sorted(corpus_files())
