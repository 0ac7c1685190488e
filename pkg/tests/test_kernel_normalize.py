import random

import pytest

from twistt.kernel.syntax import (
    App, ConstTy, ElTy, Empty, Ext, ExtDisp, ExtMinus, Fst, Hom, JTerm, Lam,
    OpCtx, OpTy, Pair, Pi, Refl, SetU, Sigma, SigmaTw, Snd, Swap, SwapInv,
    TupleTm, TyTm, UU, Var, alpha_eq, free_vars,
)
from twistt.kernel.subst import diagonal_refl_subst, subst1
from twistt.kernel.normalize import (
    Signature,
    check_ctx_eq,
    check_tm_eq,
    check_ty_eq,
    ctx_entries,
    normalize_ctx,
    normalize_tm,
    normalize_ty,
    tw_arrow,
    tw_hom,
)

SIG = Signature().declare("A", "ty").declare("S", "set")
A = ConstTy("A")
S = ConstTy("S")


def test_op_involution():
    t = OpTy(OpTy(OpTy(A)))
    assert normalize_ty(t, sig=SIG) == OpTy(A)
    ok, trace = check_ty_eq(Empty(), OpTy(OpTy(A)), A, SIG)
    assert ok and "op-inv" in trace


def test_op_set_drops():
    assert normalize_ty(OpTy(S), sig=SIG) == S
    assert normalize_ty(OpTy(Hom(A, Var("a"), Var("b"))), sig=SIG) == \
        Hom(A, Var("a"), Var("b"))


def test_op_nondiscrete_stuck():
    ok, trace = check_ty_eq(Empty(), OpTy(A), A, SIG)
    assert not ok


def test_hom_op_flip():
    t = Hom(OpTy(A), Var("x"), Var("y"))
    assert normalize_ty(t, sig=SIG) == Hom(A, Var("y"), Var("x"))


def test_univalence_rewrite():
    t = Hom(SetU(), Var("a"), Var("b"))
    n = normalize_ty(t, sig=SIG)
    assert isinstance(n, Pi)
    assert n.dom == ElTy(Var("a")) and n.cod == ElTy(Var("b"))


def test_twist_weak():
    t = ConstTy("C")
    tw = normalize_ty(
        __import__("twistt.kernel.syntax", fromlist=["Twist"]).Twist("b", A, t, Var("b")),
        sig=SIG.declare("C", "ty"))
    assert tw == t


def test_twist_discrete_collapse():
    sig = Signature().declare("S", "set")
    th = tw_hom(S, Var("u"), Var("w"))
    n = normalize_ty(th, sig=sig)
    assert n == Hom(S, Var("u"), Var("w"))


def test_tw_hom_nondiscrete_stays():
    th = tw_hom(A, Var("u"), Var("w"))
    n = normalize_ty(th, sig=SIG)
    from twistt.kernel.syntax import Twist
    assert isinstance(n, Twist)


def test_op_sigma_packs():
    t = OpTy(Sigma("a", A, Hom(A, Var("a"), Var("b"))))
    n = normalize_ty(t, sig=SIG)
    assert isinstance(n, SigmaTw)
    assert n.dom == OpTy(A)
    # the cod is the op of a hom, which drops
    assert isinstance(n.cod, Hom)


def test_op_sigma_tw_unpacks():
    t = OpTy(SigmaTw("a", OpTy(A), Hom(A, Var("b"), Var("a"))))
    n = normalize_ty(t, sig=SIG)
    assert isinstance(n, Sigma)
    assert n.dom == A


def test_beta_rules():
    assert normalize_tm(Fst(Pair(Var("u"), Var("v")))) == Var("u")
    assert normalize_tm(Snd(Pair(Var("u"), Var("v")))) == Var("v")
    assert normalize_tm(App(Lam("x", Var("x")), Var("t"))) == Var("t")
    assert normalize_tm(JTerm(Refl(Var("a")), Var("x"), Var("d"))) == Var("d")
    assert normalize_tm(SwapInv(Swap(Var("p")))) == Var("p")
    assert normalize_tm(Swap(SwapInv(Var("p")))) == Var("p")


def test_eta_rules():
    assert normalize_tm(Pair(Fst(Var("p")), Snd(Var("p")))) == Var("p")
    assert normalize_tm(Lam("x", App(Var("f"), Var("x")))) == Var("f")
    assert normalize_tm(Lam(("x", "y"), App(Var("f"), TupleTm(("x", "y"))))) == Var("f")
    # no eta when the binder occurs in the function part
    t = Lam("x", App(App(Var("f"), Var("x")), Var("x")))
    assert isinstance(normalize_tm(t), Lam)


def test_pattern_beta():
    t = App(Lam(("x", "f"), JTerm(Var("f"), Var("r"), Var("r"))),
            Pair(Var("a"), Refl(Var("a"))))
    n = normalize_tm(t)
    # pattern beta then hom-comp
    assert n == Var("r")


def test_subst_capture_avoidance():
    # [a/b] into Sigma(a, A, Hom(A, a, b)) must rename the binder
    t = Sigma("a", A, Hom(A, Var("a"), Var("b")))
    r = subst1(t, "b", Var("a"))
    assert isinstance(r, Sigma)
    assert r.binder != "a"
    assert alpha_eq(r, Sigma("z", A, Hom(A, Var("z"), Var("a"))))


def test_diagonal_refl_subst_simple():
    # D = F b, independent of f and x: becomes F a
    D = ElTy(App(Var("F"), Var("b")))
    out = diagonal_refl_subst(D, "b", "a", "f", "x")
    assert out == ElTy(App(Var("F"), Var("a")))


def test_diagonal_refl_subst_unused():
    D = ConstTy("D0")
    assert diagonal_refl_subst(D, "b", "a", "f", "x") == D


def test_diagonal_refl_subst_jmotive():
    # D = Hom_{Fb}(phi(b,f), j_phi) collapses along [a/b, Refl/f] by hom-comp
    phi_bf = App(Var("phi"), TupleTm(("b", "f")))
    j_phi = JTerm(Var("f"), phi_bf, phi_bf)
    D = Hom(ElTy(App(Var("F"), Var("b"))), phi_bf, j_phi)
    out = diagonal_refl_subst(D, "b", "a", "f", "x")
    lk = {"F": Pi("q", A, SetU()), "phi": Pi("z", ConstTy("Z"), ElTy(App(Var("F"), Var("z"))))}
    n = normalize_ty(out, lk, SIG)
    want_arg = App(Var("phi"), Pair(Var("a"), Refl(Var("a"))))
    assert isinstance(n, Hom)
    assert n.lhs == want_arg and n.rhs == want_arg


def test_ctx_op_push():
    G = Ext(Ext(Empty(), "F", ConstTy("T")), "a", A)
    n = normalize_ctx(OpCtx(G), SIG.declare("T", "ty"))
    ents = ctx_entries(n)
    # closed types collapse ext- back to ext
    assert [k for k, _, _ in ents] == ["ext", "ext"]
    assert ents[0][2] == OpTy(ConstTy("T"))
    assert ents[1][2] == OpTy(A)


def test_ctx_op_open_type_stays_minus():
    G = Ext(Ext(Empty(), "a", A), "x", ElTy(App(Var("F"), Var("a"))))
    n = normalize_ctx(OpCtx(G), SIG)
    ents = ctx_entries(n)
    assert ents is not None
    assert ents[1][0] == "ext-"


def test_ctx_op_involution():
    G = Ext(ExtMinus(Empty(), "a", A), "x", ConstTy("X0"))
    sig = Signature().declare("A", "ty").declare("X0", "ty")
    ok, _ = check_ctx_eq(OpCtx(OpCtx(G)), G, sig)
    assert ok


def test_ctx_disp_collapse():
    G = ExtDisp(Empty(), "a", A, False)
    ok, _ = check_ctx_eq(G, Ext(Empty(), "a", A), SIG)
    assert ok


def test_ctx_twist_flag_blocks_op():
    inner = ExtDisp(Ext(Empty(), "a", A), "f", tw_hom(A, Var("a"), Var("a")), True)
    n = normalize_ctx(OpCtx(inner), SIG)
    assert isinstance(n, OpCtx)
    assert ctx_entries(n) is None


def test_closed_ext_collapse():
    G = ExtMinus(Ext(Empty(), "g", ConstTy("G0")), "a", A)
    sig = Signature().declare("A", "ty").declare("G0", "ty")
    n = normalize_ctx(G, sig)
    ents = ctx_entries(n)
    assert [k for k, _, _ in ents] == ["ext", "ext"]


def test_check_tm_eq_symmetry_transitivity():
    s = App(Lam("x", Var("x")), Var("u"))
    t = Var("u")
    w = Fst(Pair(Var("u"), Var("v")))
    ok1, _ = check_tm_eq(Empty(), s, t)
    ok2, _ = check_tm_eq(Empty(), t, s)
    ok3, _ = check_tm_eq(Empty(), s, w)
    assert ok1 and ok2 and ok3


# -- generated expression corpus for idempotence and local confluence

def _gen_ty(rng, depth, vars_):
    if depth == 0:
        return rng.choice([A, S, SetU(), ConstTy("B0")])
    k = rng.randrange(8)
    if k == 0:
        return OpTy(_gen_ty(rng, depth - 1, vars_))
    if k == 1:
        return Sigma(rng.choice("abz"), _gen_ty(rng, depth - 1, vars_),
                     _gen_ty(rng, depth - 1, vars_))
    if k == 2:
        return Pi(rng.choice("abz"), _gen_ty(rng, depth - 1, vars_),
                  _gen_ty(rng, depth - 1, vars_))
    if k == 3:
        return Hom(_gen_ty(rng, depth - 1, vars_), _gen_tm(rng, depth - 1, vars_),
                   _gen_tm(rng, depth - 1, vars_))
    if k == 4:
        from twistt.kernel.syntax import Twist
        return Twist(rng.choice("abz"), _gen_ty(rng, depth - 1, vars_),
                     _gen_ty(rng, depth - 1, vars_), _gen_tm(rng, depth - 1, vars_))
    if k == 5:
        return SigmaTw(rng.choice("abz"), _gen_ty(rng, depth - 1, vars_),
                       _gen_ty(rng, depth - 1, vars_))
    if k == 6:
        return ElTy(_gen_tm(rng, depth - 1, vars_))
    return _gen_ty(rng, depth - 1, vars_)


def _gen_tm(rng, depth, vars_):
    if depth == 0:
        return Var(rng.choice(vars_))
    k = rng.randrange(10)
    if k == 0:
        return Pair(_gen_tm(rng, depth - 1, vars_), _gen_tm(rng, depth - 1, vars_))
    if k == 1:
        return Fst(_gen_tm(rng, depth - 1, vars_))
    if k == 2:
        return Snd(_gen_tm(rng, depth - 1, vars_))
    if k == 3:
        return Lam(rng.choice(vars_), _gen_tm(rng, depth - 1, vars_))
    if k == 4:
        return App(_gen_tm(rng, depth - 1, vars_), _gen_tm(rng, depth - 1, vars_))
    if k == 5:
        return Refl(_gen_tm(rng, depth - 1, vars_))
    if k == 6:
        return JTerm(_gen_tm(rng, depth - 1, vars_), _gen_tm(rng, depth - 1, vars_),
                     _gen_tm(rng, depth - 1, vars_))
    if k == 7:
        return Swap(_gen_tm(rng, depth - 1, vars_))
    if k == 8:
        return SwapInv(_gen_tm(rng, depth - 1, vars_))
    return TyTm(_gen_ty(rng, depth - 1, vars_))


def test_normalize_idempotent_on_generated():
    rng = random.Random(7)
    sig = Signature().declare("A", "ty").declare("S", "set").declare("B0", "ty")
    for _ in range(400):
        t = _gen_ty(rng, rng.randint(1, 4), "xyuv")
        n = normalize_ty(t, sig=sig)
        assert normalize_ty(n, sig=sig) == n
    for _ in range(400):
        t = _gen_tm(rng, rng.randint(1, 4), "xyuv")
        n = normalize_tm(t, sig=sig)
        assert normalize_tm(n, sig=sig) == n
