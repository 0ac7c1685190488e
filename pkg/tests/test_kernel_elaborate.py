import pytest

from twistt.kernel.syntax import (
    App, ConstTy, Empty, Ext, Fst, JTerm, Lam, Pair, Pi, Refl, Snd, TmEq,
    TmOf, TyWF, Var,
)
from twistt.kernel.normalize import Signature, tw_hom
from twistt.kernel.elaborate import ElaborationIncomplete, elaborate
from twistt.kernel.rules import check_derivation
from twistt.kernel.sexp import emit_file, parse_file

SIG = Signature().declare("A", "ty").declare("B", "ty")
A = ConstTy("A")
B = ConstTy("B")


def test_identity_function():
    tree = elaborate(TmOf(Empty(), Lam("a", Var("a")), Pi("a", A, A)), SIG)
    assert check_derivation(tree, SIG)["status"] == "pass"


def test_fst_pair_beta():
    ctx = Ext(Ext(Empty(), "u", A), "v", B)
    tree = elaborate(TmEq(ctx, Fst(Pair(Var("u"), Var("v"))), Var("u"), A), SIG)
    assert tree.rule == "sigma-beta-1"
    assert check_derivation(tree, SIG)["status"] == "pass"


def test_refl_elaborates():
    ctx = Ext(Empty(), "a", A)
    tree = elaborate(TmOf(ctx, Refl(Var("a")), tw_hom(A, Var("a"), Var("a")),
                          disp=True), SIG)
    assert tree.rule == "hom-intro"


def test_hom_elim_is_incomplete():
    ctx = Ext(Empty(), "a", A)
    with pytest.raises(ElaborationIncomplete):
        elaborate(TmOf(ctx, JTerm(Var("f"), Var("x"), Var("d")), B, disp=True), SIG)


def test_sexp_roundtrip():
    tree = elaborate(TmOf(Empty(), Lam("a", Var("a")), Pi("a", A, A)), SIG)
    text = emit_file(SIG, [("identity", tree)])
    sig2, trees = parse_file(text)
    assert len(trees) == 1
    name, tree2 = trees[0]
    assert name == "identity"
    assert check_derivation(tree2, sig2)["status"] == "pass"
    # byte-stable printing
    assert emit_file(sig2, trees) == text
