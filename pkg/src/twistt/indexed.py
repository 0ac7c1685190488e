"""Strict indexed categories, Grothendieck constructions, and split
(op)fibrations.

An IndexedCat is a strict functor from a finite base into finite
categories: reindexing along an identity is an identity table and
reindexing along a composite is the composite of the tables.

Index conventions for groth_cov are chosen so that straightening the
canonical projection recovers the input tables literally: total objects
are enumerated (a, b) with a major, and total morphisms (alpha, beta, b)
with alpha major, then beta, then the source fibre object b.  The fibre
of the total over a then lists exactly the objects and morphisms of
B(a) in their own index order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import (
    BudgetExceeded,
    DEFAULT_BUDGET,
    FinCat,
    FinCatError,
    FunctorData,
    check_category,
    check_functor,
    compose_functors,
    identity_functor,
    opposite,
)


class IndexedCatError(FinCatError):
    pass


@dataclass(frozen=True, eq=True)
class IndexedCat:
    """A strict functor base -> Cat given by fibre and reindexing tables."""

    base: FinCat
    fibres: tuple[FinCat, ...]
    reindex: tuple[FunctorData, ...]

    def fibre(self, a: int) -> FinCat:
        return self.fibres[a]

    def re(self, m: int) -> FunctorData:
        return self.reindex[m]


def check_indexed(B: IndexedCat) -> None:
    base = B.base
    if len(B.fibres) != base.n_objects or len(B.reindex) != base.n_morphisms:
        raise IndexedCatError("fibre/reindex table lengths disagree with base")
    for cat in B.fibres:
        check_category(cat)
    for m in base.morphisms():
        F = B.reindex[m]
        if F.source != B.fibres[base.dom[m]] or F.target != B.fibres[base.cod[m]]:
            raise IndexedCatError(f"reindex({m}) has wrong endpoints")
        check_functor(F)
    for a in base.objects():
        if B.reindex[base.identity[a]] != identity_functor(B.fibres[a]):
            raise IndexedCatError(f"reindex(id_{a}) is not the identity functor")
    for (g, f), gf in base.comp.items():
        if B.reindex[gf] != compose_functors(B.reindex[g], B.reindex[f]):
            raise IndexedCatError(f"strictness fails on pair (g={g}, f={f})")


def make_indexed(base: FinCat, fibres, reindex) -> IndexedCat:
    B = IndexedCat(base, tuple(fibres), tuple(reindex))
    check_indexed(B)
    return B


def constant_indexed(base: FinCat, fibre: FinCat) -> IndexedCat:
    return IndexedCat(
        base,
        tuple(fibre for _ in base.objects()),
        tuple(identity_functor(fibre) for _ in base.morphisms()),
    )


def fibrewise_opposite(B: IndexedCat) -> IndexedCat:
    """op∘B : fibres become opposites, reindexing tables are unchanged."""
    fibres = tuple(opposite(c) for c in B.fibres)
    reindex = tuple(
        FunctorData(fibres[B.base.dom[m]], fibres[B.base.cod[m]], F.obj_map, F.mor_map)
        for m, F in enumerate(B.reindex)
    )
    return IndexedCat(B.base, fibres, reindex)


def reindex_indexed(B: IndexedCat, F: FunctorData) -> IndexedCat:
    """Precompose an indexed category with a functor into its base."""
    if F.target != B.base:
        raise IndexedCatError("reindex_indexed: functor does not land in the base")
    return IndexedCat(
        F.source,
        tuple(B.fibres[F.obj_map[a]] for a in F.source.objects()),
        tuple(B.reindex[F.mor_map[m]] for m in F.source.morphisms()),
    )


# ---------------------------------------------------------------------------
# Covariant and contravariant Grothendieck constructions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrothResult:
    total: FinCat
    projection: FunctorData
    indexed: IndexedCat
    objs: tuple[tuple[int, int], ...]            # (a, b)
    mors: tuple[tuple[int, int, int], ...]       # (alpha, beta, b) with B(alpha)(b) == dom(beta)

    def obj(self, a: int, b: int) -> int:
        return self._oidx[(a, b)]

    def mor(self, alpha: int, beta: int, b: int) -> int:
        return self._midx[(alpha, beta, b)]

    def obj_decode(self, o: int) -> tuple[int, int]:
        return self.objs[o]

    def mor_decode(self, m: int) -> tuple[int, int, int]:
        return self.mors[m]

    def __post_init__(self):
        object.__setattr__(self, "_oidx", {ob: i for i, ob in enumerate(self.objs)})
        object.__setattr__(self, "_midx", {mo: i for i, mo in enumerate(self.mors)})

    def canonical_oplift(self, e: int, alpha: int) -> int:
        """The canonical opcartesian lift (alpha, id) at a total object."""
        a, b = self.objs[e]
        B = self.indexed
        b2 = B.reindex[alpha].obj_map[b]
        return self.mor(alpha, B.fibres[B.base.cod[alpha]].identity[b2], b)


def groth_cov(B: IndexedCat) -> GrothResult:
    """The covariant Grothendieck construction with its projection.

    A morphism (a, b) -> (a', b') is a pair (alpha: a -> a',
    beta: B(alpha)(b) -> b' in B(a')); it is stored as (alpha, beta, b)."""
    base = B.base
    objs = tuple((a, b) for a in base.objects() for b in B.fibres[a].objects())
    oidx = {ob: i for i, ob in enumerate(objs)}
    mors = []
    for alpha in base.morphisms():
        a0, a1 = base.dom[alpha], base.cod[alpha]
        F = B.reindex[alpha]
        fib1 = B.fibres[a1]
        for beta in fib1.morphisms():
            for b in B.fibres[a0].objects():
                if F.obj_map[b] == fib1.dom[beta]:
                    mors.append((alpha, beta, b))
    mors = tuple(mors)
    midx = {mo: i for i, mo in enumerate(mors)}
    dom = tuple(oidx[(base.dom[al], b)] for (al, be, b) in mors)
    cod = tuple(oidx[(base.cod[al], B.fibres[base.cod[al]].cod[be])] for (al, be, b) in mors)
    identity = tuple(
        midx[(base.identity[a], B.fibres[a].identity[b], b)]
        for (a, b) in objs
    )
    comp = {}
    for k2, (al2, be2, b2) in enumerate(mors):
        for k1, (al1, be1, b1) in enumerate(mors):
            # compose (al2, be2) after (al1, be1): sources must chain
            if base.cod[al1] != base.dom[al2]:
                continue
            if B.fibres[base.cod[al1]].cod[be1] != b2:
                continue
            al = base.comp[(al2, al1)]
            fib2 = B.fibres[base.cod[al2]]
            be = fib2.comp[(be2, B.reindex[al2].mor_map[be1])]
            comp[(k2, k1)] = midx[(al, be, b1)]
    total = FinCat(len(objs), dom, cod, identity, comp)
    check_category(total)
    proj = FunctorData(total, base,
                       tuple(a for (a, b) in objs),
                       tuple(al for (al, be, b) in mors))
    return GrothResult(total, proj, B, objs, mors)


@dataclass(frozen=True)
class ContraGrothResult:
    """Contravariant Grothendieck construction of G over base^op.

    Defined, not axiomatized, as opposite(groth_cov(fibrewise_opposite(G)));
    the projection lands in opposite(G.base), i.e. the original base."""

    total: FinCat
    projection: FunctorData
    indexed: IndexedCat        # the input G, over the opposite base
    cov: GrothResult           # groth_cov(fibrewise_opposite(G))

    def obj(self, a: int, b: int) -> int:
        return self.cov.obj(a, b)

    def obj_decode(self, o: int) -> tuple[int, int]:
        return self.cov.obj_decode(o)

    def mor_decode(self, m: int) -> tuple[int, int, int]:
        return self.cov.mor_decode(m)


def groth_contra(G: IndexedCat) -> ContraGrothResult:
    """Contravariant Grothendieck construction.

    G must be indexed over the OPPOSITE of the intended base: for a base
    A one passes G : A^op -> Cat and obtains total -> A."""
    cov = groth_cov(fibrewise_opposite(G))
    total = opposite(cov.total)
    proj = FunctorData(total, opposite(G.base), cov.projection.obj_map, cov.projection.mor_map)
    check_functor(proj)
    return ContraGrothResult(total, proj, G, cov)


# ---------------------------------------------------------------------------
# Split opfibrations: recognition, cleavages, straightening
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpCleavage:
    """Chosen opcartesian lifts: (object e of the total, alpha out of q(e))
    -> the lift morphism in the total."""

    q: FunctorData
    lifts: dict[tuple[int, int], int]

    def lift(self, e: int, alpha: int) -> int:
        return self.lifts[(e, alpha)]

    def target(self, e: int, alpha: int) -> int:
        return self.q.source.cod[self.lifts[(e, alpha)]]


@dataclass(frozen=True)
class Cleavage:
    """Chosen cartesian lifts: (object e, beta into q(e)) -> lift morphism
    (ending at e)."""

    q: FunctorData
    lifts: dict[tuple[int, int], int]

    def lift(self, e: int, beta: int) -> int:
        return self.lifts[(e, beta)]

    def source(self, e: int, beta: int) -> int:
        return self.q.source.dom[self.lifts[(e, beta)]]


def is_opcartesian(q: FunctorData, m: int) -> bool:
    """Exhaustive check of the opcartesian universal property of m for q."""
    E, B = q.source, q.target
    e, e1 = E.dom[m], E.cod[m]
    alpha = q.mor_map[m]
    for beta in B.morphisms():
        if B.dom[beta] != B.cod[alpha]:
            continue
        comp_ba = B.comp[(beta, alpha)]
        for m2 in E.morphisms():
            if E.dom[m2] != e or q.mor_map[m2] != comp_ba:
                continue
            fillers = [
                u for u in E.morphisms()
                if E.dom[u] == e1 and q.mor_map[u] == beta and E.comp[(u, m)] == m2
            ]
            if len(fillers) != 1:
                return False
    return True


def is_cartesian(q: FunctorData, m: int) -> bool:
    """Dual universal property, via the opposite functor."""
    return is_opcartesian(FunctorData(opposite(q.source), opposite(q.target),
                                      q.obj_map, q.mor_map), m)


def _search_split_cleavage(q: FunctorData, budget: int, prefer_canonical=None):
    """Backtracking search for a split choice of opcartesian lifts of q.

    prefer_canonical, when given, maps (e, alpha) to a preferred candidate
    tried first, which makes the search deterministic-and-canonical on
    Grothendieck projections."""
    E, B = q.source, q.target
    bg = 0
    pairs = []
    cands: dict[tuple[int, int], list[int]] = {}
    for e in E.objects():
        a = q.obj_map[e]
        for alpha in B.morphisms():
            if B.dom[alpha] != a:
                continue
            if alpha == B.identity[a]:
                continue
            cs = [m for m in E.morphisms()
                  if E.dom[m] == e and q.mor_map[m] == alpha and is_opcartesian(q, m)]
            if not cs:
                return None
            if prefer_canonical is not None:
                p = prefer_canonical(e, alpha)
                if p in cs:
                    cs = [p] + [c for c in cs if c != p]
            cands[(e, alpha)] = cs
            pairs.append((e, alpha))

    chosen: dict[tuple[int, int], int] = {}
    for e in E.objects():
        chosen[(e, B.identity[q.obj_map[e]])] = E.identity[e]

    def consistent(key, m):
        chosen[key] = m
        ok = _split_consistent(q, chosen)
        if not ok:
            del chosen[key]
        return ok

    def backtrack(i):
        nonlocal bg
        if i == len(pairs):
            return True
        key = pairs[i]
        for m in cands[key]:
            bg += 1
            if bg > budget:
                raise BudgetExceeded("split cleavage search exceeded budget")
            if consistent(key, m):
                if backtrack(i + 1):
                    return True
                del chosen[key]
        return False

    if not backtrack(0):
        return None
    return OpCleavage(q, dict(chosen))


def _split_consistent(q: FunctorData, chosen) -> bool:
    """Check the splitness equations on all pairs currently chosen."""
    E, B = q.source, q.target
    for (e, alpha), m in chosen.items():
        for beta in B.morphisms():
            if B.dom[beta] != B.cod[alpha]:
                continue
            comp_key = (e, B.comp[(beta, alpha)])
            step_key = (E.cod[m], beta)
            if comp_key in chosen and step_key in chosen:
                if chosen[comp_key] != E.comp[(chosen[step_key], m)]:
                    return False
    return True


def is_split_opfibration(q: FunctorData, budget: int = DEFAULT_BUDGET,
                         prefer_canonical=None):
    """Search for a split opcleavage of q; None certifies there is none."""
    return _search_split_cleavage(q, budget, prefer_canonical)


def is_split_fibration(q: FunctorData, budget: int = DEFAULT_BUDGET):
    """Dual of is_split_opfibration, computed on the opposite functor."""
    qop = FunctorData(opposite(q.source), opposite(q.target), q.obj_map, q.mor_map)
    op_cl = _search_split_cleavage(qop, budget)
    if op_cl is None:
        return None
    return Cleavage(q, dict(op_cl.lifts))


def check_op_cleavage(cl: OpCleavage) -> None:
    """Validate an opcleavage: endpoints, opcartesianness, splitness."""
    q = cl.q
    E, B = q.source, q.target
    for e in E.objects():
        a = q.obj_map[e]
        for alpha in B.morphisms():
            if B.dom[alpha] != a:
                continue
            if (e, alpha) not in cl.lifts:
                raise IndexedCatError(f"opcleavage missing lift at (e={e}, alpha={alpha})")
            m = cl.lifts[(e, alpha)]
            if E.dom[m] != e or q.mor_map[m] != alpha:
                raise IndexedCatError(f"lift at (e={e}, alpha={alpha}) has wrong endpoints")
            if not is_opcartesian(q, m):
                raise IndexedCatError(f"lift at (e={e}, alpha={alpha}) is not opcartesian")
            if alpha == B.identity[a] and m != E.identity[e]:
                raise IndexedCatError(f"identity lift at e={e} is not the identity")
    for (e, alpha), m in cl.lifts.items():
        for beta in B.morphisms():
            if B.dom[beta] != B.cod[alpha]:
                continue
            m2 = cl.lifts[(E.cod[m], beta)]
            if cl.lifts[(e, B.comp[(beta, alpha)])] != E.comp[(m2, m)]:
                raise IndexedCatError(
                    f"splitness fails at (e={e}, alpha={alpha}, beta={beta})")


def canonical_op_cleavage(gr: GrothResult) -> OpCleavage:
    """The canonical split opcleavage (alpha, id) of a groth_cov projection."""
    lifts = {}
    E, B = gr.total, gr.indexed.base
    for e in E.objects():
        a = gr.objs[e][0]
        for alpha in B.morphisms():
            if B.dom[alpha] == a:
                lifts[(e, alpha)] = gr.canonical_oplift(e, alpha)
    return OpCleavage(gr.projection, lifts)


def straighten_opfib(q: FunctorData, cl: OpCleavage) -> IndexedCat:
    """Straighten a split opfibration into an indexed category.

    Fibre objects/morphisms are listed in increasing total index; with the
    canonical cleavage on a groth_cov projection this recovers the input
    indexed category table-identically."""
    E, B = q.source, q.target
    fib_objs = [[e for e in E.objects() if q.obj_map[e] == a] for a in B.objects()]
    fib_mors = [
        [m for m in E.morphisms() if q.mor_map[m] == B.identity[a]]
        for a in B.objects()
    ]
    fibres = []
    for a in B.objects():
        objs, morsl = fib_objs[a], fib_mors[a]
        oi = {e: i for i, e in enumerate(objs)}
        mi = {m: i for i, m in enumerate(morsl)}
        dom = tuple(oi[E.dom[m]] for m in morsl)
        cod = tuple(oi[E.cod[m]] for m in morsl)
        identity = tuple(mi[E.identity[e]] for e in objs)
        comp = {
            (mi[g], mi[f]): mi[E.comp[(g, f)]]
            for g in morsl for f in morsl if E.cod[f] == E.dom[g]
        }
        fibres.append(FinCat(len(objs), dom, cod, identity, comp))
    reindex = []
    for alpha in B.morphisms():
        a0, a1 = B.dom[alpha], B.cod[alpha]
        oi0 = {e: i for i, e in enumerate(fib_objs[a0])}
        oi1 = {e: i for i, e in enumerate(fib_objs[a1])}
        mi1 = {m: i for i, m in enumerate(fib_mors[a1])}
        obj_map = tuple(oi1[E.cod[cl.lifts[(e, alpha)]]] for e in fib_objs[a0])
        mor_map = []
        for m in fib_mors[a0]:
            e, d = E.dom[m], E.cod[m]
            le, ld = cl.lifts[(e, alpha)], cl.lifts[(d, alpha)]
            rhs = E.comp[(ld, m)]
            fillers = [
                u for u in fib_mors[a1]
                if E.dom[u] == E.cod[le] and E.comp[(u, le)] == rhs
            ]
            if len(fillers) != 1:
                raise IndexedCatError(
                    f"no unique transport of fibre morphism {m} along alpha={alpha}")
            mor_map.append(mi1[fillers[0]])
        reindex.append(FunctorData(fibres[a0], fibres[a1], obj_map, tuple(mor_map)))
    return make_indexed(B, fibres, reindex)
