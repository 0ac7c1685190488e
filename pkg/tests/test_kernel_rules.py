import pytest

from twistt.kernel.syntax import (
    App, ConstTy, CtxEq, CtxWF, Derivation, ElTy, Empty, Ext, ExtDisp,
    ExtMinus, Fst, Hom, JTerm, Lam, OpCtx, OpTy, Pair, Pi, Refl, SetU, Sigma,
    SigmaTw, Snd, Swap, SwapInv, TmEq, TmOf, Twist, TupleTm, TyEq, TyTm, TyWF,
    UU, Var,
)
from twistt.kernel.normalize import Signature, tw_hom
from twistt.kernel.rules import check_derivation, check_node

SIG = Signature().declare("A", "ty").declare("B", "ty").declare("S", "set")
A = ConstTy("A")
B = ConstTy("B")
S = ConstTy("S")


def D(rule, conclusion, *children):
    return Derivation(rule, conclusion, tuple(children))


def ok(node, sig=SIG):
    res = check_derivation(node, sig)
    assert res["status"] == "pass", res["failures"]
    return res


def bad(node, sig=SIG, error=None):
    res = check_derivation(node, sig)
    assert res["status"] == "fail"
    if error is not None:
        assert any(f["error"] == error for f in res["failures"]), res["failures"]
    return res


# -- basic contexts

N_EMPTY = D("ctx-empty", CtxWF(Empty()))
N_A = D("ty-const", TyWF(Empty(), A), N_EMPTY)


def ctx1(name="a", ty=A):
    return Ext(Empty(), name, ty)


N_CTX_A = D("ctx-ext", CtxWF(ctx1()), N_EMPTY, N_A)


def test_ctx_empty():
    ok(N_EMPTY)
    bad(D("ctx-empty", CtxWF(ctx1())))


def test_ctx_ext():
    ok(N_CTX_A)
    # unfresh name
    twice = Ext(ctx1(), "a", A)
    bad(D("ctx-ext", CtxWF(twice), N_CTX_A,
          D("ty-const", TyWF(ctx1(), A), N_CTX_A)), error="SideConditionError")


def test_ty_const_undeclared():
    bad(D("ty-const", TyWF(Empty(), ConstTy("missing")), N_EMPTY),
        error="SideConditionError")


def test_ctx_op_and_eq():
    n = D("ctx-op", CtxWF(OpCtx(ctx1())), N_CTX_A)
    ok(n)
    ok(D("ctx-eq-op-op", CtxEq(OpCtx(OpCtx(ctx1())), ctx1()), N_CTX_A))
    bad(D("ctx-eq-op-op", CtxEq(OpCtx(ctx1()), ctx1()), N_CTX_A))
    ok(D("ctx-eq-op-empty", CtxEq(OpCtx(Empty()), Empty())))
    ok(D("ctx-eq-norm", CtxEq(OpCtx(OpCtx(ctx1())), ctx1())))
    bad(D("ctx-eq-norm", CtxEq(OpCtx(ctx1()), ctx1())))


def test_closed_ext_eq():
    ok(D("ctx-eq-closed-ext", CtxEq(Ext(Empty(), "a", A), ExtMinus(Empty(), "a", A)),
         N_A, N_EMPTY))
    open_ty = ElTy(App(Var("F"), Var("g")))
    bad(D("ctx-eq-closed-ext",
          CtxEq(Ext(ctx1("g"), "a", open_ty), ExtMinus(ctx1("g"), "a", open_ty)),
          D("ty-const", TyWF(Empty(), A), N_EMPTY), N_CTX_A))


# -- Example 4.1: the diagonal hom derivation (three steps after formation)

HOM_CTX = Ext(Ext(Empty(), "b", A), "a", OpTy(A))
N_HOM = D("hom-form", TyWF(HOM_CTX, Hom(A, Var("a"), Var("b"))), N_A)

TW_CTX = Ext(Ext(Empty(), "b", A), "a", A)
TW_TY = Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a"))
N_TWIST = D("twist", TyWF(TW_CTX, TW_TY, disp=True), N_HOM)

DIAG_CTX = Ext(Empty(), "a", A)
DIAG_TY = Twist("a2", A, Hom(A, Var("a2"), Var("a")), Var("a"))
N_CTX_DIAG = D("ctx-ext", CtxWF(DIAG_CTX), N_EMPTY, N_A)
N_VAR_A = D("var", TmOf(DIAG_CTX, Var("a"), A), N_CTX_DIAG)
N_DIAG = D("subst", TyWF(DIAG_CTX, DIAG_TY, disp=True), N_TWIST, N_VAR_A)


def test_example_4_1_diagonal_hom():
    ok(N_HOM)
    ok(N_TWIST)
    ok(N_DIAG)


def test_twist_wrong_polarity():
    # twisting a variable that was not introduced at the opposite type
    bad_hom = D("hom-form", TyWF(Ext(Ext(Empty(), "b", A), "a", A),
                                 Hom(A, Var("a"), Var("b"))), N_A)
    assert check_node(bad_hom, SIG)["status"] == "fail"


def test_hom_form_requires_op_entry():
    c = Ext(Ext(Empty(), "b", A), "a", A)
    bad(D("hom-form", TyWF(c, Hom(A, Var("a"), Var("b"))), N_A))


def test_var_rule():
    ok(N_VAR_A)
    # wrong type
    bad(D("var", TmOf(DIAG_CTX, Var("a"), B), N_CTX_DIAG))
    # unbound
    bad(D("var", TmOf(DIAG_CTX, Var("zz"), A), N_CTX_DIAG), error="ScopeError")
    # weakened occurrence is fine
    two = Ext(DIAG_CTX, "c", B)
    n_two = D("ctx-ext", CtxWF(two), N_CTX_DIAG, D("ty-const", TyWF(DIAG_CTX, B), N_CTX_DIAG))
    ok(D("var", TmOf(two, Var("a"), A), n_two))


def test_hom_intro():
    concl = TmOf(DIAG_CTX, Refl(Var("a")), tw_hom(A, Var("a"), Var("a")), disp=True)
    ok(D("hom-intro", concl, N_A))
    # base-flag instead of displayed must fail
    bad(D("hom-intro", TmOf(DIAG_CTX, Refl(Var("a")), tw_hom(A, Var("a"), Var("a"))), N_A))


def test_weak():
    premise = N_VAR_A
    two = Ext(DIAG_CTX, "c", B)
    n_b = D("ty-const", TyWF(DIAG_CTX, B), N_CTX_DIAG)
    ok(D("weak", TmOf(two, Var("a"), A), premise, n_b))
    # inserting a non-fresh name
    bad(D("weak", TmOf(Ext(DIAG_CTX, "a", B), Var("a"), A), premise, n_b))


def test_perm():
    # two independent entries exchange
    c1 = Ext(Ext(Empty(), "a", A), "c", B)
    c2 = Ext(Ext(Empty(), "c", B), "a", A)
    n_c1 = D("ctx-ext", CtxWF(c1), N_CTX_DIAG, D("ty-const", TyWF(DIAG_CTX, B), N_CTX_DIAG))
    j1 = D("var", TmOf(c1, Var("a"), A), n_c1)
    ok(D("perm", TmOf(c2, Var("a"), A), j1))
    # dependent entries must not exchange
    dep = Ext(Ext(Empty(), "a", A), "h", tw_hom(A, Var("a"), Var("a")))
    n_dep = D("hom-intro", TmOf(dep and Ext(Empty(), "a", A), Refl(Var("a")),
                                tw_hom(A, Var("a"), Var("a")), disp=True), N_A)
    j2 = D("weak", TmOf(Ext(DIAG_CTX, "c", B), Var("a"), A), N_VAR_A,
           D("ty-const", TyWF(DIAG_CTX, B), N_CTX_DIAG))
    swapped_dep = Ext(Ext(Empty(), "h", tw_hom(A, Var("a"), Var("a"))), "a", A)
    bad(D("perm", TmOf(swapped_dep, Var("a"), A), j2))


def test_ty_eq_rules():
    ok(D("ty-eq-op-inv", TyEq(Empty(), OpTy(OpTy(A)), A), N_A))
    bad(D("ty-eq-op-inv", TyEq(Empty(), OpTy(A), A), N_A))
    ok(D("ty-eq-hom-op", TyEq(HOM_CTX, OpTy(Hom(A, Var("a"), Var("b"))),
                              Hom(A, Var("a"), Var("b")))))
    ok(D("ty-eq-norm", TyEq(Empty(), OpTy(OpTy(A)), A)))
    bad(D("ty-eq-norm", TyEq(Empty(), OpTy(A), A)))
    n_s = D("ty-const", TyWF(Empty(), S), N_EMPTY)
    n_code = D("set-code", TmOf(Empty(), TyTm(S), SetU()), n_s)
    ok(n_code)
    ok(D("ty-eq-set-op", TyEq(Empty(), OpTy(S), S), n_code))


def test_univalence_rule():
    n_s = D("ty-const", TyWF(Empty(), S), N_EMPTY)
    n_code = D("set-code", TmOf(Empty(), TyTm(S), SetU()), n_s)
    n_code_op = D("set-code", TmOf(OpCtx(Empty()), TyTm(S), SetU()),
                  D("ty-const", TyWF(OpCtx(Empty()), S),
                    D("ctx-op", CtxWF(OpCtx(Empty())), N_EMPTY)))
    concl = TyEq(Empty(), Hom(SetU(), TyTm(S), TyTm(S)),
                 Pi("x", ElTy(TyTm(S)), ElTy(TyTm(S))))
    ok(D("ty-eq-univalence", concl, n_code_op, n_code))
    # non-set codes are rejected
    n_a_code = D("uu-code", TmOf(Empty(), TyTm(A), UU()), N_A)
    bad(D("ty-eq-univalence",
          TyEq(Empty(), Hom(SetU(), TyTm(A), TyTm(A)),
               Pi("x", ElTy(TyTm(A)), ElTy(TyTm(A)))), n_a_code, n_a_code))


def test_sigma_rules():
    n_b_over = D("ty-const", TyWF(ctx1(), B), N_CTX_A)
    sig_ty = Sigma("a", A, B)
    n_u = D("var", TmOf(ctx1("u0", A), Var("u0"), A),
            D("ctx-ext", CtxWF(ctx1("u0", A)), N_EMPTY, N_A))
    # use context with u0: A and v0: B to build a pair
    c_uv = Ext(Ext(Empty(), "u0", A), "v0", B)
    n_cuv = D("ctx-ext", CtxWF(c_uv),
              D("ctx-ext", CtxWF(ctx1("u0", A)), N_EMPTY, N_A),
              D("ty-const", TyWF(ctx1("u0", A), B),
                D("ctx-ext", CtxWF(ctx1("u0", A)), N_EMPTY, N_A)))
    n_A_uv = D("ty-const", TyWF(c_uv, A), n_cuv)
    n_B_over_uv = D("ty-const", TyWF(Ext(c_uv, "a", A), B),
                    D("ctx-ext", CtxWF(Ext(c_uv, "a", A)), n_cuv, n_A_uv))
    nu = D("var", TmOf(c_uv, Var("u0"), A), n_cuv)
    nv = D("var", TmOf(c_uv, Var("v0"), B), n_cuv)
    pair = D("sigma-pair", TmOf(c_uv, Pair(Var("u0"), Var("v0")), sig_ty),
             n_A_uv, n_B_over_uv, nu, nv)
    ok(pair)
    ok(D("sigma-beta-1", TmEq(c_uv, Fst(Pair(Var("u0"), Var("v0"))), Var("u0"), A),
         n_A_uv, n_B_over_uv, nu, nv))
    ok(D("sigma-beta-2", TmEq(c_uv, Snd(Pair(Var("u0"), Var("v0"))), Var("v0"), B),
         n_A_uv, n_B_over_uv, nu, nv))
    np = D("var", TmOf(ctx1("p0", sig_ty), Var("p0"), sig_ty),
           D("ctx-ext", CtxWF(ctx1("p0", sig_ty)), N_EMPTY,
             D("sigma-form", TyWF(Empty(), sig_ty), N_A, n_b_over)))
    n_A_p = D("ty-const", TyWF(ctx1("p0", sig_ty), A),
              D("ctx-ext", CtxWF(ctx1("p0", sig_ty)), N_EMPTY,
                D("sigma-form", TyWF(Empty(), sig_ty), N_A, n_b_over)))
    n_B_p = D("ty-const", TyWF(Ext(ctx1("p0", sig_ty), "a", A), B),
              D("ctx-ext", CtxWF(Ext(ctx1("p0", sig_ty), "a", A)),
                D("ctx-ext", CtxWF(ctx1("p0", sig_ty)), N_EMPTY,
                  D("sigma-form", TyWF(Empty(), sig_ty), N_A, n_b_over)), n_A_p))
    ok(D("sigma-fst", TmOf(ctx1("p0", sig_ty), Fst(Var("p0")), A), n_A_p, n_B_p, np))
    ok(D("sigma-snd", TmOf(ctx1("p0", sig_ty), Snd(Var("p0")), B), n_A_p, n_B_p, np))
    ok(D("sigma-eta", TmEq(ctx1("p0", sig_ty),
                           Pair(Fst(Var("p0")), Snd(Var("p0"))), Var("p0"), sig_ty),
         n_A_p, n_B_p, np))
    bad(D("sigma-fst", TmOf(ctx1("p0", sig_ty), Fst(Var("p0")), B), n_A_p, n_B_p, np))


def test_pi_rules():
    # Tm(⋄, A -> A): identity function
    n_a_op = D("ty-const", TyWF(OpCtx(Empty()), A),
               D("ctx-op", CtxWF(OpCtx(Empty())), N_EMPTY))
    ext = ExtMinus(Empty(), "x", A)
    n_ext = D("ctx-ext-minus", CtxWF(ext), N_EMPTY, n_a_op)
    n_a_over = D("ty-const", TyWF(ext, A), n_ext)
    n_x = D("var", TmOf(ext, Var("x"), A), n_ext)
    pi_ty = Pi("x", A, A)
    lam = D("pi-intro", TmOf(Empty(), Lam("x", Var("x")), pi_ty), n_x)
    ok(lam)
    ok(D("pi-app", TmOf(ext, App(Lam("x", Var("x")), Var("x")), A), lam))
    ok(D("pi-beta", TmEq(ext, App(Lam("x", Var("x")), Var("x")), Var("x"), A), n_x))
    ok(D("pi-eta", TmEq(Empty(), Lam("x", App(Lam("x", Var("x")), Var("x"))),
                        Lam("x", Var("x")), pi_ty), lam))
    # application at a closed term via pi-elim
    n_c = D("ctx-ext", CtxWF(ctx1("c", A)), N_EMPTY, N_A)
    n_f = D("weak", TmOf(ctx1("c", A), Lam("x", Var("x")), pi_ty), lam, N_A)
    n_arg = D("var", TmOf(OpCtx(ctx1("c", A)), Var("c"), OpTy(A)),
              D("ctx-op", CtxWF(OpCtx(ctx1("c", A))), n_c))
    ok(D("pi-elim", TmOf(ctx1("c", A), App(Lam("x", Var("x")), Var("c")), A),
         n_f, n_arg))
    bad(D("pi-elim", TmOf(ctx1("c", A), App(Lam("x", Var("x")), Var("c")), B),
          n_f, n_arg))


def test_tm_eq_norm_and_admin():
    s = App(Lam("x", Var("x")), Var("u"))
    c = ctx1("u", A)
    ok(D("tm-eq-norm", TmEq(c, s, Var("u"), A)))
    bad(D("tm-eq-norm", TmEq(c, Var("u"), Var("w"), A)))
    e1 = D("tm-eq-norm", TmEq(c, s, Var("u"), A))
    ok(D("tm-eq-sym", TmEq(c, Var("u"), s, A), e1))
    ok(D("tm-eq-trans", TmEq(c, s, Var("u"), A), e1,
         D("tm-eq-norm", TmEq(c, Var("u"), Var("u"), A))))


def test_hom_elim_and_comp():
    # A the subject; X := B (constant); D := B (constant motive)
    gamma = Empty()
    n_X = D("ty-const", TyWF(DIAG_CTX, B), N_CTX_DIAG)
    ctx5 = Ext(ExtDisp(Ext(Ext(gamma, "b", A), "a", A), "f",
                       Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a")), True),
               "x", OpTy(B))
    n_D = D("ty-const", TyWF(ctx5, B), _ctx5_wf(ctx5))
    dctx = Ext(DIAG_CTX, "x", B)
    n_dctx = D("ctx-ext", CtxWF(dctx), N_CTX_DIAG, n_X)
    n_d = D("tm-disp", TmOf(dctx, Var("x"), B, disp=True),
            D("var", TmOf(dctx, Var("x"), B), n_dctx))
    ctx5p = Ext(ExtDisp(Ext(Ext(gamma, "b", A), "a", A), "f",
                        Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a")), True),
                "x", B)
    concl = TmOf(ctx5p, JTerm(Var("f"), Var("x"), Var("x")), B, disp=True)
    ok(D("hom-elim", concl, N_A, n_X, n_D, n_d))
    comp = TmEq(dctx, JTerm(Refl(Var("a")), Var("x"), Var("x")), Var("x"), B, disp=True)
    ok(D("hom-comp", comp, N_A, n_X, n_D, n_d))
    # negative control: motive context lacking the twist flag
    ctx5_noflag = Ext(ExtDisp(Ext(Ext(gamma, "b", A), "a", A), "f",
                              Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a")),
                              False),
                      "x", OpTy(B))
    n_D_bad = D("ty-const", TyWF(ctx5_noflag, B), _ctx5_wf(ctx5_noflag))
    bad(D("hom-elim", TmOf(ctx5p, JTerm(Var("f"), Var("x"), Var("x")), B, disp=True),
          N_A, n_X, n_D_bad, n_d), error="ContextShapeError")


def _ctx5_wf(ctx5):
    # well-formedness subtree for the elimination context (shape only used
    # as a premise holder for ty-const).
    cb = Ext(Empty(), "b", A)
    n_cb = D("ctx-ext", CtxWF(cb), N_EMPTY, N_A)
    cba = Ext(cb, "a", A)
    n_cba = D("ctx-ext", CtxWF(cba), n_cb, D("ty-const", TyWF(cb, A), n_cb))
    n_hom = D("hom-form", TyWF(Ext(cb, "a", OpTy(A)), Hom(A, Var("a"), Var("b"))), N_A)
    tw = ExtDisp(cba, "f", Twist("a", A, Hom(A, Var("a"), Var("b")), Var("a")),
                 True if isinstance(ctx5.ctx, ExtDisp) and ctx5.ctx.twist_flag else False)
    n_tw = D("ctx-ext-twist", CtxWF(tw), n_cba, n_hom)
    n_B = D("ty-const", TyWF(tw, B), n_tw)
    if isinstance(ctx5.ty, OpTy):
        n_B = D("op-form", TyWF(tw, OpTy(B)), n_B)
    return D("ctx-ext", CtxWF(ctx5), n_tw, n_B)


def test_perm_twist():
    # spread: x:A, a:A ⋊⋉ f:Hom(ā,x) ⊢ f ⋊ Hom(ā,x)
    spread = ExtDisp(Ext(Ext(Empty(), "x", A), "a", A), "f",
                     Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")), True)
    packed = ExtMinus(Ext(Empty(), "a", A), ("x", "f"),
                      Sigma("x", A, Hom(A, Var("a"), Var("x"))))
    cb = Ext(Empty(), "x", A)
    n_cb = D("ctx-ext", CtxWF(cb), N_EMPTY, N_A)
    cba = Ext(cb, "a", A)
    n_cba = D("ctx-ext", CtxWF(cba), n_cb, D("ty-const", TyWF(cb, A), n_cb))
    n_hom = D("hom-form", TyWF(Ext(cb, "a", OpTy(A)), Hom(A, Var("a"), Var("x"))), N_A)
    n_spread = D("ctx-ext-twist", CtxWF(spread), n_cba, n_hom)
    j = D("var", TmOf(spread, Var("f"),
                      Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")), disp=True),
          n_spread)
    ok(j)
    moved = D("perm-twist",
              TmOf(packed, Var("f"),
                   Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")), disp=True), j)
    ok(moved)
    # wrong packaging: sigma over the wrong hom orientation
    packed_bad = ExtMinus(Ext(Empty(), "a", A), ("x", "f"),
                          Sigma("x", A, Hom(A, Var("x"), Var("a"))))
    bad(D("perm-twist",
          TmOf(packed_bad, Var("f"),
               Twist("a", A, Hom(A, Var("a"), Var("x")), Var("a")), disp=True), j))
