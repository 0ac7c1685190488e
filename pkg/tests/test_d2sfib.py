import pytest

from twistt.fincat import (
    FunctorData,
    arrow_category_ex,
    arrow_projections,
    chain_cat,
    check_functor,
    compose_functors,
    discrete_cat,
    empty_cat,
    find_isomorphism,
    find_isomorphism_over,
    identity_functor,
    make_functor,
    opposite,
    product_ex,
    terminal_cat,
    walking_arrow,
)
from twistt.indexed import (
    constant_indexed,
    fibrewise_opposite,
    groth_cov,
    make_indexed,
)
from twistt.d2sfib import (
    CartFunctor,
    D2SFib,
    D2SFibError,
    DepProfMap,
    apply_phi,
    check_cart_functor,
    check_d2sfib,
    d2sfib_passes,
    embed_prof,
    hom_profunctor,
    ICatMorphism,
    make_depprof,
    pullback_d2sfib,
    roundtrip_epsilon,
    straighten_d2sfib,
    unstraighten,
)


def constant_terminal_depprof(A, B):
    bop = groth_cov(fibrewise_opposite(B))
    C = constant_indexed(bop.total, terminal_cat())
    return make_depprof(A, B, C)


def test_unstraighten_constant_terminal():
    w = walking_arrow()
    B = constant_indexed(w, discrete_cat(2))
    P = constant_terminal_depprof(w, B)
    u = unstraighten(P)
    ab = groth_cov(B)
    assert find_isomorphism(u.fib.total, ab.total) is not None
    assert d2sfib_passes(check_d2sfib(u.fib))


def test_unstraighten_object_count():
    P = hom_profunctor(walking_arrow())
    u = unstraighten(P)
    total_fibre_objects = sum(
        P.C.fibres[o].n_objects for o in P.bop.total.objects()
    )
    assert u.fib.total.n_objects == total_fibre_objects == 3


def test_example_3_8_arrow_category():
    """The unstraightened hom profunctor of the walking arrow is its arrow
    category, with projection <cod, dom>."""
    w = walking_arrow()
    P = hom_profunctor(w)
    u = unstraighten(P)
    ar = arrow_category_ex(w)
    assert u.fib.total.n_objects == 3 and u.fib.total.n_morphisms == 6
    assert find_isomorphism(u.fib.total, ar.cat) is not None
    pr = product_ex(w, w)
    cod_dom = arrow_projections(ar, pr, cod_first=True)
    # q lands in A ⋉ A whose total is literally A x A here
    assert u.fib.ab.total == pr.cat
    pair = find_isomorphism_over(u.fib.total, ar.cat, u.fib.q, cod_dom)
    assert pair is not None


def test_unstraighten_passes_check():
    for P in [hom_profunctor(walking_arrow()), hom_profunctor(chain_cat(3))]:
        u = unstraighten(P)
        assert d2sfib_passes(check_d2sfib(u.fib))


def arrow_span_d2sfib():
    """The arrow-category span of the walking arrow, assembled by hand with
    its canonical cleavages (postcompose / precompose)."""
    w = walking_arrow()
    B = constant_indexed(w, w)
    ab = groth_cov(B)
    ar = arrow_category_ex(w)
    # q = <cod, dom> into A ⋉ A; the total of A ⋉ const_A is literally A x A
    pr = product_ex(w, w)
    assert ab.total == pr.cat
    q = arrow_projections(ar, pr, cod_first=True)
    q = FunctorData(ar.cat, ab.total, q.obj_map, q.mor_map)
    E = ar.cat
    local_lifts = {}
    op_lifts = {}
    for e in E.objects():  # e is a morphism f of w
        fcod, fdom = w.cod[e], w.dom[e]
        for beta in w.morphisms():
            if w.cod[beta] != fdom:
                continue
            # cartesian lift: (id_cod, beta): f∘beta -> f
            src = w.comp[(e, beta)]
            local_lifts[(e, beta)] = ar.squares.index((src, e, w.identity[fcod], beta))
        for alpha in w.morphisms():
            if w.dom[alpha] != fcod:
                continue
            tgt = w.comp[(alpha, e)]
            op_lifts[(e, alpha)] = ar.squares.index((e, tgt, alpha, w.identity[fdom]))
    return D2SFib(w, B, ab, q, local_lifts, op_lifts)


def test_arrow_span_is_d2sfib():
    f = arrow_span_d2sfib()
    assert d2sfib_passes(check_d2sfib(f))


def test_corrupted_cleavage_fails_named_condition():
    f = arrow_span_d2sfib()
    E = f.total
    # replace one opcartesian lift by a parallel non-lift morphism
    bad_op = dict(f.op_lifts)
    key = next((e, al) for (e, al) in bad_op
               if not f.A.is_identity(al) and not E.is_identity(bad_op[(e, al)]))
    e, al = key
    m = bad_op[key]
    bad_op[key] = E.identity[E.dom[m]]
    g = D2SFib(f.A, f.B, f.ab, f.q, f.local_lifts, bad_op)
    report = check_d2sfib(g)
    assert not d2sfib_passes(report)
    failed = {r["condition"] for r in report if r["status"] == "fail"}
    assert "4" in failed


def test_corrupted_local_cleavage_fails():
    f = arrow_span_d2sfib()
    E = f.total
    bad_local = dict(f.local_lifts)
    key = next((e, be) for (e, be) in bad_local
               if not E.is_identity(bad_local[(e, be)]))
    m = bad_local[key]
    bad_local[key] = E.identity[E.cod[m]]
    g = D2SFib(f.A, f.B, f.ab, f.q, bad_local, f.op_lifts)
    report = check_d2sfib(g)
    assert not d2sfib_passes(report)
    failed = {r["condition"] for r in report if r["status"] == "fail"}
    assert "3" in failed


def test_straighten_unstraighten_table_identity():
    for P in [hom_profunctor(walking_arrow()),
              constant_terminal_depprof(walking_arrow(),
                                        constant_indexed(walking_arrow(), discrete_cat(2)))]:
        u = unstraighten(P)
        S = straighten_d2sfib(u.fib)
        assert S.C == P.C
        assert S.A == P.A and S.B == P.B


def test_straighten_arrow_span_fibres():
    f = arrow_span_d2sfib()
    S = straighten_d2sfib(f)
    w = walking_arrow()
    # fibre at (b=1, a=0) is the singleton {f}
    o = S.bop.obj(1, 0)
    assert S.C.fibres[o].n_objects == 1
    # fibre at (b=0, a=1) is empty: no morphisms 1 -> 0
    o2 = S.bop.obj(0, 1)
    assert S.C.fibres[o2].n_objects == 0


def test_straighten_empty_fibre():
    w = walking_arrow()
    B = constant_indexed(w, terminal_cat())
    bop = groth_cov(fibrewise_opposite(B))
    fibres = [empty_cat() if o == 0 else terminal_cat() for o in bop.total.objects()]

    def re(m):
        src = fibres[bop.total.dom[m]]
        tgt = fibres[bop.total.cod[m]]
        if src.n_objects == 0:
            return FunctorData(src, tgt, (), ())
        return identity_functor(src)

    reindex = [re(m) for m in bop.total.morphisms()]
    try:
        C = make_indexed(bop.total, fibres, reindex)
    except Exception:
        pytest.skip("no strict family with this empty-fibre pattern on this base")
    P = make_depprof(w, B, C)
    u = unstraighten(P)
    S = straighten_d2sfib(u.fib)
    assert S.C.fibres[0].n_objects == 0


def test_roundtrip_epsilon_arrow_span():
    f = arrow_span_d2sfib()
    eps, eps_inv = roundtrip_epsilon(f)
    assert d2sfib_passes(check_cart_functor(eps))
    assert d2sfib_passes(check_cart_functor(eps_inv))


def test_roundtrip_epsilon_on_unstraightening():
    P = hom_profunctor(walking_arrow())
    u = unstraighten(P)
    eps, eps_inv = roundtrip_epsilon(u.fib)
    assert d2sfib_passes(check_cart_functor(eps))


def test_apply_phi_identity():
    P = hom_profunctor(walking_arrow())
    comps = tuple(identity_functor(P.C.fibres[o]) for o in P.bop.total.objects())
    cf = apply_phi(DepProfMap(P, P, comps))
    assert cf.phi == identity_functor(cf.phi.source)
    assert d2sfib_passes(check_cart_functor(cf))


def test_apply_phi_composition():
    # phi: hom fibres -> constant terminal fibres; composition with identity
    P = hom_profunctor(walking_arrow())
    Q = constant_terminal_depprof(P.A, P.B)
    comps = tuple(
        FunctorData(P.C.fibres[o], terminal_cat(),
                    tuple(0 for _ in P.C.fibres[o].objects()),
                    tuple(0 for _ in P.C.fibres[o].morphisms()))
        for o in P.bop.total.objects()
    )
    phi = DepProfMap(P, Q, comps)
    cf = apply_phi(phi)
    assert d2sfib_passes(check_cart_functor(cf))
    ident = DepProfMap(P, P, tuple(identity_functor(P.C.fibres[o])
                                   for o in P.bop.total.objects()))
    cf2 = apply_phi(ident)
    composed = compose_functors(cf.phi, cf2.phi)
    assert composed == cf.phi


def test_cart_functor_negative():
    P = hom_profunctor(walking_arrow())
    u = unstraighten(P)
    E = u.fib.total
    # a functor permuting nothing but breaking lift preservation cannot be
    # built easily by permutation here; instead check the report machinery
    # rejects a wrong target assignment by mutating the cleavage of the target
    bad_op = dict(u.fib.op_lifts)
    key = next((e, al) for (e, al) in bad_op if not E.is_identity(bad_op[(e, al)]))
    (e0, al0) = key
    g = D2SFib(u.fib.A, u.fib.B, u.fib.ab, u.fib.q, u.fib.local_lifts,
               {**bad_op, key: E.identity[e0]})
    cf = CartFunctor(identity_functor(E), u.fib, g)
    report = check_cart_functor(cf)
    assert not d2sfib_passes(report)


def test_embed_prof_roundtrip():
    w = walking_arrow()
    pr = product_ex(w, opposite(w))
    fibres = [discrete_cat(1) for _ in pr.cat.objects()]
    reindex = [identity_functor(discrete_cat(1)) for _ in pr.cat.morphisms()]
    prof = make_indexed(pr.cat, fibres, reindex)
    P = embed_prof(w, w, prof)
    assert P.C.fibres == prof.fibres
    assert P.C.reindex == prof.reindex


def test_pullback_identity():
    P = hom_profunctor(walking_arrow())
    u = unstraighten(P)
    f = u.fib
    m = ICatMorphism(identity_functor(f.A),
                     tuple(identity_functor(f.B.fibres[a]) for a in f.A.objects()))
    pb = pullback_d2sfib(f, m, f.B)
    assert d2sfib_passes(check_d2sfib(pb))
    assert find_isomorphism(pb.total, f.total) is not None


def test_pullback_point():
    w = walking_arrow()
    P = hom_profunctor(w)
    u = unstraighten(P)
    f = u.fib
    pt = terminal_cat()
    Bpt = constant_indexed(pt, w)
    m = ICatMorphism(make_functor(pt, w, (1,), (1,)),
                     (identity_functor(w),))
    pb = pullback_d2sfib(f, m, Bpt)
    assert d2sfib_passes(check_d2sfib(pb))
    # fibre over the point 1: objects (a=1-coord fixed) -> hom(x, 1) pieces:
    # (b=1, a=0, f) and (b=1, a=1, id1): 2 objects
    assert pb.total.n_objects == 2


def test_pullback_commutes_with_unstraighten():
    w = walking_arrow()
    P = hom_profunctor(w)
    f = unstraighten(P).fib
    pt = terminal_cat()
    Bpt = constant_indexed(pt, w)
    m = ICatMorphism(make_functor(pt, w, (1,), (1,)),
                     (identity_functor(w),))
    pb = pullback_d2sfib(f, m, Bpt)
    S = straighten_d2sfib(pb)
    u2 = unstraighten(S)
    eps, _ = roundtrip_epsilon(pb)
    assert eps.phi.target == u2.fib.total
