import itertools
import random

import pytest

from twistt.fincat import (
    BadIdentity,
    BudgetExceeded,
    FinCat,
    MissingComposite,
    NonAssociative,
    arrow_category,
    arrow_category_ex,
    arrow_projections,
    chain_cat,
    check_category,
    check_functor,
    compose_functors,
    discrete_cat,
    empty_cat,
    enumerate_functors,
    find_isomorphism,
    fincat_to_spec,
    functor_category,
    functor_category_ex,
    identity_functor,
    is_discrete,
    make_fincat,
    natural_transformations,
    opposite,
    parallel_pair,
    product,
    product_ex,
    square_poset,
    terminal_cat,
    twisted_arrow_category,
    validate_fincat,
    walking_arrow,
)


def test_validate_terminal():
    cat = validate_fincat({"objects": 1, "morphisms": [{"dom": 0, "cod": 0}],
                           "identities": [0], "comp": []})
    assert cat.n_objects == 1 and cat.n_morphisms == 1


def test_validate_walking_arrow():
    cat = validate_fincat({
        "objects": 2,
        "morphisms": [{"dom": 0, "cod": 0}, {"dom": 1, "cod": 1}, {"dom": 0, "cod": 1}],
        "identities": [0, 1],
        "comp": [],
    })
    assert cat == walking_arrow()


def test_validate_missing_composite():
    # An idempotent-free endomorphism with no declared self-composite.
    with pytest.raises(MissingComposite):
        validate_fincat({
            "objects": 1,
            "morphisms": [{"dom": 0, "cod": 0}, {"dom": 0, "cod": 0}],
            "identities": [0],
            "comp": [],
        })


def test_validate_bad_identity():
    with pytest.raises(BadIdentity):
        # identity of object 0 points at a non-endomorphism
        validate_fincat({
            "objects": 2,
            "morphisms": [{"dom": 0, "cod": 1}, {"dom": 1, "cod": 1}],
            "identities": [0, 1],
            "comp": [],
        })


def test_validate_non_associative():
    # Two endomorphisms with a deliberately broken composition table.
    with pytest.raises((NonAssociative, BadIdentity, MissingComposite)):
        validate_fincat({
            "objects": 1,
            "morphisms": [{"dom": 0, "cod": 0}, {"dom": 0, "cod": 0}, {"dom": 0, "cod": 0}],
            "identities": [0],
            "comp": [[1, 1, 2], [2, 1, 0], [1, 2, 1], [2, 2, 2]],
        })


def test_spec_roundtrip():
    for cat in [walking_arrow(), chain_cat(3), square_poset(), parallel_pair()]:
        assert validate_fincat(fincat_to_spec(cat)) == cat


def test_opposite_involution():
    for cat in [terminal_cat(), walking_arrow(), chain_cat(3), square_poset(), parallel_pair()]:
        op = opposite(cat)
        check_category(op)
        assert opposite(op) == cat


def test_opposite_walking_arrow_reverses():
    op = opposite(walking_arrow())
    assert op.dom[2] == 1 and op.cod[2] == 0


def test_opposite_terminal():
    assert opposite(terminal_cat()) == terminal_cat()


def test_product_counts():
    w = walking_arrow()
    p = product(w, w)
    check_category(p)
    assert p.n_objects == 4 and p.n_morphisms == 9
    for C, D in [(walking_arrow(), chain_cat(3)), (discrete_cat(2), parallel_pair())]:
        assert product(C, D).n_morphisms == C.n_morphisms * D.n_morphisms


def test_product_with_terminal_isomorphic():
    w = walking_arrow()
    p = product(terminal_cat(), w)
    assert find_isomorphism(p, w) is not None


def test_product_projections_valid():
    pr = product_ex(walking_arrow(), chain_cat(3))
    check_functor(pr.proj_left)
    check_functor(pr.proj_right)


def test_functor_category_walking_arrow():
    fc = functor_category(walking_arrow(), walking_arrow())
    check_category(fc)
    assert fc.n_objects == 3 and fc.n_morphisms == 6


def test_functor_category_terminal_source():
    for C in [walking_arrow(), chain_cat(3)]:
        fc = functor_category(terminal_cat(), C)
        assert find_isomorphism(fc, C) is not None


def test_functor_category_discrete():
    fc = functor_category(discrete_cat(2), discrete_cat(3))
    assert is_discrete(fc) and fc.n_objects == 9
    fc2 = functor_category(discrete_cat(2), discrete_cat(2))
    assert is_discrete(fc2) and fc2.n_objects == 4


def test_arrow_category_walking_arrow():
    ar = arrow_category(walking_arrow())
    check_category(ar)
    assert ar.n_objects == 3 and ar.n_morphisms == 6


def test_arrow_category_discrete():
    ar = arrow_category(discrete_cat(3))
    assert is_discrete(ar) and ar.n_objects == 3


def test_arrow_category_object_count():
    for C in [walking_arrow(), chain_cat(3), square_poset()]:
        assert arrow_category(C).n_objects == C.n_morphisms
        assert twisted_arrow_category(C).n_objects == C.n_morphisms


def test_twisted_arrow_walking_arrow():
    tw = twisted_arrow_category(walking_arrow())
    check_category(tw)
    assert tw.n_objects == 3 and tw.n_morphisms == 5
    # cospan shape: id0 -> f <- id1, f the only non-identity target
    non_id = [m for m in tw.morphisms() if not tw.is_identity(m)]
    assert len(non_id) == 2
    assert {tw.cod[m] for m in non_id} == {2}
    assert {tw.dom[m] for m in non_id} == {0, 1}


def test_twisted_vs_arrow_not_isomorphic():
    w = walking_arrow()
    assert find_isomorphism(arrow_category(w), twisted_arrow_category(w)) is None


def test_opposite_twisted_arrow_differs_from_arrow():
    w = walking_arrow()
    assert find_isomorphism(opposite(twisted_arrow_category(w)), arrow_category(w)) is None


def test_arrow_category_of_walking_arrow_is_chain3():
    assert find_isomorphism(arrow_category(walking_arrow()), chain_cat(3)) is not None


def test_find_isomorphism_identity():
    w = walking_arrow()
    F, G = find_isomorphism(w, w)
    assert compose_functors(G, F) == identity_functor(w)
    assert compose_functors(F, G) == identity_functor(w)


def test_find_isomorphism_none():
    assert find_isomorphism(walking_arrow(), discrete_cat(2)) is None


def test_is_discrete():
    assert is_discrete(discrete_cat(3))
    assert not is_discrete(walking_arrow())


def test_enumerate_functors_budget():
    big = discrete_cat(10)
    with pytest.raises(BudgetExceeded):
        enumerate_functors(big, big, budget=100)


def test_enumerate_functors_chain():
    fs = enumerate_functors(walking_arrow(), walking_arrow())
    assert len(fs) == 3
    for F in fs:
        check_functor(F)


def test_natural_transformations_poset():
    fs = enumerate_functors(walking_arrow(), walking_arrow())
    total = sum(len(natural_transformations(F, G)) for F in fs for G in fs)
    assert total == 6


def test_arrow_projections_commute():
    w = walking_arrow()
    ar = arrow_category_ex(w)
    pr = product_ex(w, w)
    dc = arrow_projections(ar, pr)
    check_functor(dc)
    cd = arrow_projections(ar, pr, cod_first=True)
    check_functor(cd)
    assert dc.obj_map != cd.obj_map


def test_empty_cat():
    e = empty_cat()
    check_category(e)
    assert product(e, walking_arrow()).n_objects == 0


def _random_poset_cat(rng, n):
    """A random poset category on n objects (guaranteed associative)."""
    rel = [[False] * n for _ in range(n)]
    for i in range(n):
        rel[i][i] = True
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                rel[i][j] = True
    # transitive closure
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if rel[i][k] and rel[k][j]:
                    rel[i][j] = True
    mors = [(a, b) for a in range(n) for b in range(n) if rel[a][b]]
    idx = {m: k for k, m in enumerate(mors)}
    comp = {}
    for k2, (b1, c) in enumerate(mors):
        for k1, (a, b2) in enumerate(mors):
            if b2 == b1:
                comp[(k2, k1)] = idx[(a, c)]
    return FinCat(n, tuple(m[0] for m in mors), tuple(m[1] for m in mors),
                  tuple(idx[(a, a)] for a in range(n)), comp)


def test_property_random_posets():
    rng = random.Random(20260809)
    for _ in range(25):
        C = _random_poset_cat(rng, rng.randint(1, 4))
        check_category(C)
        assert opposite(opposite(C)) == C
        assert arrow_category(C).n_objects == C.n_morphisms
        ar = arrow_category(C)
        tw = twisted_arrow_category(C)
        check_category(ar)
        check_category(tw)
