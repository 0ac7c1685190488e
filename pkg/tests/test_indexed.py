import pytest

from twistt.fincat import (
    FunctorData,
    arrow_category_ex,
    arrow_projections,
    chain_cat,
    check_functor,
    discrete_cat,
    find_isomorphism,
    identity_functor,
    make_functor,
    opposite,
    product_ex,
    terminal_cat,
    walking_arrow,
)
from twistt.indexed import (
    IndexedCatError,
    canonical_op_cleavage,
    check_indexed,
    check_op_cleavage,
    constant_indexed,
    fibrewise_opposite,
    groth_contra,
    groth_cov,
    is_cartesian,
    is_opcartesian,
    is_split_fibration,
    is_split_opfibration,
    make_indexed,
    reindex_indexed,
    straighten_opfib,
)


def indexed_walking_over_walking():
    """Base the walking arrow, both fibres the walking arrow, reindex id."""
    w = walking_arrow()
    return make_indexed(w, [w, w], [identity_functor(w)] * 3)


def indexed_nontrivial():
    """Base walking arrow; fibre over 0 is discrete 2, over 1 the walking
    arrow; reindexing collapses nothing: i -> object i."""
    w = walking_arrow()
    d2 = discrete_cat(2)
    re_f = make_functor(d2, w, (0, 1), (0, 1))
    return make_indexed(w, [d2, w], [identity_functor(d2), identity_functor(w), re_f])


def test_constant_terminal_total_iso_base():
    for base in [walking_arrow(), chain_cat(3)]:
        gr = groth_cov(constant_indexed(base, terminal_cat()))
        assert find_isomorphism(gr.total, base) is not None


def test_terminal_base_total_iso_fibre():
    C = walking_arrow()
    gr = groth_cov(constant_indexed(terminal_cat(), C))
    assert find_isomorphism(gr.total, C) is not None


def test_groth_product_case():
    gr = groth_cov(indexed_walking_over_walking())
    assert gr.total.n_objects == 4 and gr.total.n_morphisms == 9
    check_functor(gr.projection)


def test_groth_projection_is_split_opfibration():
    B = indexed_nontrivial()
    gr = groth_cov(B)
    cl = is_split_opfibration(gr.projection, prefer_canonical=gr.canonical_oplift)
    assert cl is not None
    check_op_cleavage(cl)
    assert cl.lifts == canonical_op_cleavage(gr).lifts


def test_dom_cod_not_opfibration():
    w = walking_arrow()
    ar = arrow_category_ex(w)
    pr = product_ex(w, w)
    dc = arrow_projections(ar, pr)
    assert is_split_opfibration(dc) is None


def test_dom_cod_not_fibration():
    w = walking_arrow()
    ar = arrow_category_ex(w)
    pr = product_ex(w, w)
    dc = arrow_projections(ar, pr)
    assert is_split_fibration(dc) is None


def test_identity_functor_trivial_cleavages():
    w = walking_arrow()
    idf = identity_functor(w)
    opcl = is_split_opfibration(idf)
    assert opcl is not None
    check_op_cleavage(opcl)
    assert is_split_fibration(idf) is not None


def test_cod_is_split_fibration():
    w = walking_arrow()
    ar = arrow_category_ex(w)
    cod_f = FunctorData(ar.cat, w, tuple(w.cod[f] for f in w.morphisms()),
                        tuple(s[2] for s in ar.squares))
    check_functor(cod_f)
    cl = is_split_fibration(cod_f)
    assert cl is not None


def test_dom_is_split_opfibration():
    w = walking_arrow()
    ar = arrow_category_ex(w)
    dom_f = FunctorData(ar.cat, w, tuple(w.dom[f] for f in w.morphisms()),
                        tuple(s[3] for s in ar.squares))
    check_functor(dom_f)
    assert is_split_opfibration(dom_f) is not None


def test_straighten_roundtrip_table_identity():
    for B in [indexed_walking_over_walking(), indexed_nontrivial(),
              constant_indexed(chain_cat(3), discrete_cat(2))]:
        gr = groth_cov(B)
        S = straighten_opfib(gr.projection, canonical_op_cleavage(gr))
        assert S == B


def test_straighten_identity_functor():
    w = walking_arrow()
    S = straighten_opfib(identity_functor(w), is_split_opfibration(identity_functor(w)))
    for a in w.objects():
        assert S.fibres[a].n_objects == 1 and S.fibres[a].n_morphisms == 1


def test_unstraighten_straighten_iso_over_base():
    B = indexed_nontrivial()
    gr = groth_cov(B)
    cl = is_split_opfibration(gr.projection, prefer_canonical=gr.canonical_oplift)
    S = straighten_opfib(gr.projection, cl)
    gr2 = groth_cov(S)
    pair = find_isomorphism(gr2.total, gr.total)
    assert pair is not None


def test_groth_contra_definitional():
    w = walking_arrow()
    G = constant_indexed(opposite(w), discrete_cat(2))
    res = groth_contra(G)
    assert res.total == opposite(groth_cov(fibrewise_opposite(G)).total)
    # constant fibres: total isomorphic to base x fibre
    pr = product_ex(w, discrete_cat(2))
    assert find_isomorphism(res.total, pr.cat) is not None


def test_groth_contra_terminal_base():
    C = walking_arrow()
    G = constant_indexed(terminal_cat(), C)
    res = groth_contra(G)
    assert find_isomorphism(res.total, C) is not None


def test_reindex_indexed_identity():
    B = indexed_nontrivial()
    assert reindex_indexed(B, identity_functor(B.base)) == B


def test_reindex_indexed_constant():
    B = indexed_nontrivial()
    w = B.base
    const0 = make_functor(terminal_cat(), w, (0,), (0,))
    B2 = reindex_indexed(B, const0)
    assert B2.fibres == (B.fibres[0],)


def test_reindex_commutes_with_groth():
    # pullback square for groth_cov along a functor, up to isomorphism
    B = indexed_nontrivial()
    w = B.base
    F = make_functor(terminal_cat(), w, (1,), (1,))
    B2 = reindex_indexed(B, F)
    gr2 = groth_cov(B2)
    gr = groth_cov(B)
    # the fibre of gr over object 1 is B.fibres[1]; gr2 total should agree
    assert find_isomorphism(gr2.total, B.fibres[1]) is not None


def test_fibrewise_opposite_involution():
    B = indexed_nontrivial()
    assert fibrewise_opposite(fibrewise_opposite(B)) == B


def test_opcartesian_identity():
    w = walking_arrow()
    idf = identity_functor(w)
    for m in w.morphisms():
        assert is_opcartesian(idf, m)
        assert is_cartesian(idf, m)


def test_check_indexed_rejects_nonstrict():
    # swap along one leg of a composable chain breaks strictness
    d2 = discrete_cat(2)
    swap = make_functor(d2, d2, (1, 0), (1, 0))
    c3 = chain_cat(3)
    re = [identity_functor(d2)] * c3.n_morphisms
    mor_index = {(c3.dom[m], c3.cod[m]): m for m in c3.morphisms()}
    re[mor_index[(0, 1)]] = swap
    with pytest.raises(IndexedCatError):
        make_indexed(c3, [d2, d2, d2], re)
