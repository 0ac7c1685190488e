"""Finite categories as dense integer tables.

Objects and morphisms of a category are the integers 0..n-1, and every
piece of structure (dom, cod, identities, composition) is a finite table.
This buys canonical structural equality: two categories are "the same"
exactly when their tables are equal, which is what the strict/split
semantics downstream needs for judgmental equalities.

Index conventions used by the constructions here are load-bearing (the
straightening round trips in `twistt.indexed` rely on them) and are
documented on each constructor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

DEFAULT_BUDGET = 10**6


class FinCatError(Exception):
    """Base class for errors raised by this module."""


class MissingComposite(FinCatError):
    pass


class NonAssociative(FinCatError):
    pass


class BadIdentity(FinCatError):
    pass


class BadFunctor(FinCatError):
    pass


class BadNatTrans(FinCatError):
    pass


class BudgetExceeded(FinCatError):
    pass


@dataclass(frozen=True, eq=True)
class FinCat:
    """A finite category.

    dom/cod index per-morphism endpoints, identity gives the identity
    morphism per object, and comp maps exactly the composable pairs
    (g, f) with cod(f) == dom(g) to their composite g∘f.
    """

    n_objects: int
    dom: tuple[int, ...]
    cod: tuple[int, ...]
    identity: tuple[int, ...]
    comp: dict[tuple[int, int], int]

    @property
    def n_morphisms(self) -> int:
        return len(self.dom)

    def objects(self):
        return range(self.n_objects)

    def morphisms(self):
        return range(self.n_morphisms)

    def compose(self, g: int, f: int) -> int:
        """g∘f; requires cod(f) == dom(g)."""
        return self.comp[(g, f)]

    def is_identity(self, m: int) -> bool:
        return self.identity[self.dom[m]] == m

    def hom(self, a: int, b: int) -> list[int]:
        return [m for m in self.morphisms() if self.dom[m] == a and self.cod[m] == b]

    def is_iso(self, m: int) -> bool:
        a, b = self.dom[m], self.cod[m]
        for n in self.hom(b, a):
            if self.comp[(n, m)] == self.identity[a] and self.comp[(m, n)] == self.identity[b]:
                return True
        return False


def make_fincat(n_objects, dom, cod, identity, comp) -> FinCat:
    """Build and validate a FinCat from raw tables."""
    cat = FinCat(n_objects, tuple(dom), tuple(cod), tuple(identity), dict(comp))
    check_category(cat)
    return cat


def check_category(cat: FinCat) -> None:
    """Exhaustively check the category axioms; raise on the first failure."""
    n, m = cat.n_objects, cat.n_morphisms
    if len(cat.cod) != m or len(cat.identity) != n:
        raise FinCatError("table lengths disagree")
    for f in cat.morphisms():
        if not (0 <= cat.dom[f] < n and 0 <= cat.cod[f] < n):
            raise FinCatError(f"morphism {f} has endpoints out of range")
    for a in cat.objects():
        i = cat.identity[a]
        if not (0 <= i < m) or cat.dom[i] != a or cat.cod[i] != a:
            raise BadIdentity(f"identity of object {a} is not an endomorphism of it")
    for (g, f), gf in cat.comp.items():
        if cat.cod[f] != cat.dom[g]:
            raise MissingComposite(f"comp defined on non-composable pair (g={g}, f={f})")
        if not (0 <= gf < m) or cat.dom[gf] != cat.dom[f] or cat.cod[gf] != cat.cod[g]:
            raise MissingComposite(f"composite of (g={g}, f={f}) has wrong endpoints")
    for g in cat.morphisms():
        for f in cat.morphisms():
            if cat.cod[f] == cat.dom[g] and (g, f) not in cat.comp:
                raise MissingComposite(f"missing composite for composable pair (g={g}, f={f})")
    for a in cat.objects():
        i = cat.identity[a]
        for f in cat.morphisms():
            if cat.dom[f] == a and cat.comp[(f, i)] != f:
                raise BadIdentity(f"right unit law fails at (f={f}, id_{a})")
            if cat.cod[f] == a and cat.comp[(i, f)] != f:
                raise BadIdentity(f"left unit law fails at (id_{a}, f={f})")
    for h in cat.morphisms():
        for g in cat.morphisms():
            if cat.cod[g] != cat.dom[h]:
                continue
            hg = cat.comp[(h, g)]
            for f in cat.morphisms():
                if cat.cod[f] != cat.dom[g]:
                    continue
                if cat.comp[(hg, f)] != cat.comp[(h, cat.comp[(g, f)])]:
                    raise NonAssociative(f"associativity fails on triple (h={h}, g={g}, f={f})")


def validate_fincat(spec: dict) -> FinCat:
    """Validate a raw category table (the JSON file format) into a FinCat.

    Format: {"objects": N, "morphisms": [{"dom": i, "cod": j}, ...],
    "identities": [mor index per object], "comp": [[g, f, gf], ...]}.
    Identity composites may be omitted from "comp"; they are derived.
    """
    n = spec["objects"]
    mors = spec["morphisms"]
    dom = tuple(m["dom"] for m in mors)
    cod = tuple(m["cod"] for m in mors)
    identity = tuple(spec["identities"])
    comp = {}
    for g, f, gf in spec.get("comp", []):
        comp[(g, f)] = gf
    # Derive unit composites not listed explicitly.
    for a in range(n):
        if a >= len(identity):
            raise BadIdentity(f"no identity listed for object {a}")
        i = identity[a]
        for f in range(len(dom)):
            if dom[f] == a:
                comp.setdefault((f, i), f)
            if cod[f] == a:
                comp.setdefault((i, f), f)
    return make_fincat(n, dom, cod, identity, comp)


def fincat_to_spec(cat: FinCat) -> dict:
    """Inverse of validate_fincat, with comp entries sorted canonically."""
    return {
        "objects": cat.n_objects,
        "morphisms": [{"dom": cat.dom[f], "cod": cat.cod[f]} for f in cat.morphisms()],
        "identities": list(cat.identity),
        "comp": sorted([g, f, gf] for (g, f), gf in cat.comp.items()),
    }


# ---------------------------------------------------------------------------
# Functors and natural transformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=True)
class FunctorData:
    source: FinCat
    target: FinCat
    obj_map: tuple[int, ...]
    mor_map: tuple[int, ...]

    def on_obj(self, a: int) -> int:
        return self.obj_map[a]

    def on_mor(self, f: int) -> int:
        return self.mor_map[f]


def check_functor(F: FunctorData) -> None:
    C, D = F.source, F.target
    if len(F.obj_map) != C.n_objects or len(F.mor_map) != C.n_morphisms:
        raise BadFunctor("functor tables have wrong lengths")
    for f in C.morphisms():
        if D.dom[F.mor_map[f]] != F.obj_map[C.dom[f]] or D.cod[F.mor_map[f]] != F.obj_map[C.cod[f]]:
            raise BadFunctor(f"endpoints not preserved at morphism {f}")
    for a in C.objects():
        if F.mor_map[C.identity[a]] != D.identity[F.obj_map[a]]:
            raise BadFunctor(f"identity not preserved at object {a}")
    for (g, f), gf in C.comp.items():
        if D.comp[(F.mor_map[g], F.mor_map[f])] != F.mor_map[gf]:
            raise BadFunctor(f"composition not preserved at pair (g={g}, f={f})")


def make_functor(source: FinCat, target: FinCat, obj_map, mor_map) -> FunctorData:
    F = FunctorData(source, target, tuple(obj_map), tuple(mor_map))
    check_functor(F)
    return F


def identity_functor(C: FinCat) -> FunctorData:
    return FunctorData(C, C, tuple(C.objects()), tuple(C.morphisms()))


def compose_functors(G: FunctorData, F: FunctorData) -> FunctorData:
    """G∘F; requires F.target == G.source."""
    if F.target != G.source:
        raise BadFunctor("composition of functors with mismatched endpoints")
    return FunctorData(
        F.source, G.target,
        tuple(G.obj_map[a] for a in F.obj_map),
        tuple(G.mor_map[f] for f in F.mor_map),
    )


def constant_functor(C: FinCat, D: FinCat, d: int) -> FunctorData:
    return FunctorData(C, D, tuple(d for _ in C.objects()), tuple(D.identity[d] for _ in C.morphisms()))


@dataclass(frozen=True, eq=True)
class NatTransData:
    source: FunctorData
    target: FunctorData
    components: tuple[int, ...]


def check_nat_trans(t: NatTransData) -> None:
    F, G = t.source, t.target
    if F.source != G.source or F.target != G.target:
        raise BadNatTrans("transformation between non-parallel functors")
    C, D = F.source, F.target
    for a in C.objects():
        c = t.components[a]
        if D.dom[c] != F.obj_map[a] or D.cod[c] != G.obj_map[a]:
            raise BadNatTrans(f"component at object {a} has wrong endpoints")
    for f in C.morphisms():
        a, b = C.dom[f], C.cod[f]
        if D.comp[(t.components[b], F.mor_map[f])] != D.comp[(G.mor_map[f], t.components[a])]:
            raise BadNatTrans(f"naturality square fails at morphism {f}")


def make_nat_trans(F: FunctorData, G: FunctorData, components) -> NatTransData:
    t = NatTransData(F, G, tuple(components))
    check_nat_trans(t)
    return t


def natural_transformations(F: FunctorData, G: FunctorData) -> list[tuple[int, ...]]:
    """All natural transformations F => G, as component tuples in
    lexicographic order."""
    C, D = F.source, F.target
    per_obj = [D.hom(F.obj_map[a], G.obj_map[a]) for a in C.objects()]
    out = []
    for comps in itertools.product(*per_obj):
        ok = True
        for f in C.morphisms():
            a, b = C.dom[f], C.cod[f]
            if D.comp[(comps[b], F.mor_map[f])] != D.comp[(G.mor_map[f], comps[a])]:
                ok = False
                break
        if ok:
            out.append(comps)
    return out


# ---------------------------------------------------------------------------
# Functor enumeration (budgeted backtracking)
# ---------------------------------------------------------------------------

class _Budget:
    def __init__(self, limit: int, what: str):
        self.limit = limit
        self.spent = 0
        self.what = what

    def tick(self, n: int = 1):
        self.spent += n
        if self.spent > self.limit:
            raise BudgetExceeded(f"{self.what}: exceeded budget of {self.limit} candidates")


def enumerate_functors(C: FinCat, D: FinCat, budget: int = DEFAULT_BUDGET,
                       bijective: bool = False, obj_maps=None):
    """All functors C -> D, in lexicographic order of (obj_map, mor_map).

    With bijective=True only isomorphism candidates (bijective on objects
    and morphisms) are produced.  obj_maps optionally restricts the object
    maps tried.  Raises BudgetExceeded when the search visits more than
    `budget` candidate assignments.
    """
    b = _Budget(budget, "functor enumeration")
    non_id = [f for f in C.morphisms() if not C.is_identity(f)]
    results = []
    if obj_maps is None:
        if bijective:
            if C.n_objects != D.n_objects or C.n_morphisms != D.n_morphisms:
                return []
            obj_maps = itertools.permutations(range(D.n_objects))
        else:
            obj_maps = itertools.product(range(D.n_objects), repeat=C.n_objects)
    for om in obj_maps:
        b.tick()
        mm = [None] * C.n_morphisms
        for a in C.objects():
            mm[C.identity[a]] = D.identity[om[a]]
        cands = []
        feasible = True
        for f in non_id:
            hs = D.hom(om[C.dom[f]], om[C.cod[f]])
            if not hs:
                feasible = False
                break
            cands.append(hs)
        if not feasible:
            continue

        def backtrack(i: int):
            if i == len(non_id):
                F = FunctorData(C, D, tuple(om), tuple(mm))
                if bijective and len(set(F.mor_map)) != C.n_morphisms:
                    return
                results.append(F)
                return
            f = non_id[i]
            for h in cands[i]:
                b.tick()
                mm[f] = h
                if _partial_ok(C, D, mm, f):
                    backtrack(i + 1)
            mm[f] = None

        backtrack(0)
    return results


def _partial_ok(C: FinCat, D: FinCat, mm, just_set: int) -> bool:
    """Check all composition constraints whose three morphisms are assigned
    and that involve the just-assigned morphism."""
    for (g, f), gf in C.comp.items():
        if just_set not in (g, f, gf):
            continue
        a, b_, c = mm[g], mm[f], mm[gf]
        if a is None or b_ is None or c is None:
            continue
        if D.comp[(a, b_)] != c:
            return False
    return True


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def opposite(C: FinCat) -> FinCat:
    """The opposite category on the same index sets.

    Because the index sets are reused, opposite(opposite(C)) == C holds as
    structural identity of tables.
    """
    comp = {(f, g): gf for (g, f), gf in C.comp.items()}
    return FinCat(C.n_objects, C.cod, C.dom, C.identity, comp)


def opposite_functor(F: FunctorData) -> FunctorData:
    """F^op : C^op -> D^op; same tables, opposite endpoints."""
    return FunctorData(opposite(F.source), opposite(F.target), F.obj_map, F.mor_map)


@dataclass(frozen=True)
class ProductResult:
    cat: FinCat
    left: FinCat
    right: FinCat
    proj_left: FunctorData
    proj_right: FunctorData

    def obj(self, c: int, d: int) -> int:
        return c * self.right.n_objects + d

    def mor(self, f: int, g: int) -> int:
        return f * self.right.n_morphisms + g

    def obj_decode(self, o: int) -> tuple[int, int]:
        return divmod(o, self.right.n_objects)

    def mor_decode(self, m: int) -> tuple[int, int]:
        return divmod(m, self.right.n_morphisms)


def product_ex(C: FinCat, D: FinCat) -> ProductResult:
    """Product category; object (c,d) has index c*|D| + d, morphism (f,g)
    has index f*|mor D| + g."""
    no = C.n_objects * D.n_objects
    dom, cod = [], []
    for f in C.morphisms():
        for g in D.morphisms():
            dom.append(C.dom[f] * D.n_objects + D.dom[g])
            cod.append(C.cod[f] * D.n_objects + D.cod[g])
    identity = tuple(
        C.identity[c] * D.n_morphisms + D.identity[d]
        for c in C.objects() for d in D.objects()
    )
    comp = {}
    for (g1, f1), h1 in C.comp.items():
        for (g2, f2), h2 in D.comp.items():
            comp[(g1 * D.n_morphisms + g2, f1 * D.n_morphisms + f2)] = h1 * D.n_morphisms + h2
    cat = FinCat(no, tuple(dom), tuple(cod), identity, comp)
    pl = FunctorData(cat, C,
                     tuple(c for c in C.objects() for _ in D.objects()),
                     tuple(f for f in C.morphisms() for _ in D.morphisms()))
    pr = FunctorData(cat, D,
                     tuple(d for _ in C.objects() for d in D.objects()),
                     tuple(g for _ in C.morphisms() for g in D.morphisms()))
    return ProductResult(cat, C, D, pl, pr)


def product(C: FinCat, D: FinCat) -> FinCat:
    return product_ex(C, D).cat


def pairing_functor(F: FunctorData, G: FunctorData, prod: ProductResult) -> FunctorData:
    """<F, G> : E -> C x D for parallel F: E -> C, G: E -> D."""
    E = F.source
    return FunctorData(
        E, prod.cat,
        tuple(prod.obj(F.obj_map[a], G.obj_map[a]) for a in E.objects()),
        tuple(prod.mor(F.mor_map[f], G.mor_map[f]) for f in E.morphisms()),
    )


@dataclass(frozen=True)
class FunctorCategoryResult:
    cat: FinCat
    functors: list[FunctorData]
    transformations: list[tuple[int, int, tuple[int, ...]]]  # (src functor, tgt functor, components)


def functor_category_ex(C: FinCat, D: FinCat, budget: int = DEFAULT_BUDGET) -> FunctorCategoryResult:
    """The category [C, D]: objects all functors C -> D, morphisms all
    natural transformations, enumerated in a fixed order.

    Morphisms are grouped by (source functor, target functor) pairs in
    lexicographic order, with component tuples in lexicographic order
    within each pair."""
    functors = enumerate_functors(C, D, budget)
    trans = []
    for i, F in enumerate(functors):
        for j, G in enumerate(functors):
            for comps in natural_transformations(F, G):
                trans.append((i, j, comps))
    dom = tuple(t[0] for t in trans)
    cod = tuple(t[1] for t in trans)
    index = {t: k for k, t in enumerate(trans)}
    identity = tuple(
        index[(i, i, tuple(D.identity[F.obj_map[a]] for a in C.objects()))]
        for i, F in enumerate(functors)
    )
    comp = {}
    for k2, (i2, j2, c2) in enumerate(trans):
        for k1, (i1, j1, c1) in enumerate(trans):
            if j1 != i2:
                continue
            comps = tuple(D.comp[(c2[a], c1[a])] for a in C.objects())
            comp[(k2, k1)] = index[(i1, j2, comps)]
    cat = FinCat(len(functors), dom, cod, identity, comp)
    return FunctorCategoryResult(cat, functors, trans)


def functor_category(C: FinCat, D: FinCat, budget: int = DEFAULT_BUDGET) -> FinCat:
    return functor_category_ex(C, D, budget).cat


@dataclass(frozen=True)
class ArrowResult:
    cat: FinCat
    base: FinCat
    squares: list[tuple[int, int, int, int]]  # (f, f', beta, alpha)

    def obj_of_mor(self, f: int) -> int:
        return f


def arrow_category_ex(C: FinCat) -> ArrowResult:
    """The arrow category C^->.

    Objects are the morphisms of C (same indices).  A morphism
    (f: a -> b) -> (f': a' -> b') is a pair (beta: b -> b', alpha: a -> a')
    with beta∘f = f'∘alpha; morphisms are enumerated in lexicographic
    (f, f', beta, alpha) order."""
    squares = []
    for f in C.morphisms():
        for f2 in C.morphisms():
            for beta in C.morphisms():
                if C.dom[beta] != C.cod[f] or C.cod[beta] != C.cod[f2]:
                    continue
                for alpha in C.morphisms():
                    if C.dom[alpha] != C.dom[f] or C.cod[alpha] != C.dom[f2]:
                        continue
                    if C.comp[(beta, f)] == C.comp[(f2, alpha)]:
                        squares.append((f, f2, beta, alpha))
    index = {s: k for k, s in enumerate(squares)}
    dom = tuple(s[0] for s in squares)
    cod = tuple(s[1] for s in squares)
    identity = tuple(index[(f, f, C.identity[C.cod[f]], C.identity[C.dom[f]])] for f in C.morphisms())
    comp = {}
    for k2, (g1, g2, b2, a2) in enumerate(squares):
        for k1, (f1, f2, b1, a1) in enumerate(squares):
            if f2 != g1:
                continue
            comp[(k2, k1)] = index[(f1, g2, C.comp[(b2, b1)], C.comp[(a2, a1)])]
    return ArrowResult(FinCat(C.n_morphisms, dom, cod, identity, comp), C, squares)


def arrow_category(C: FinCat) -> FinCat:
    return arrow_category_ex(C).cat


def arrow_projections(ar: ArrowResult, prod: ProductResult, cod_first: bool = False) -> FunctorData:
    """<dom,cod> (or <cod,dom>) : C^-> -> C x C."""
    C = ar.base
    if cod_first:
        om = tuple(prod.obj(C.cod[f], C.dom[f]) for f in C.morphisms())
        mm = tuple(prod.mor(s[2], s[3]) for s in ar.squares)
    else:
        om = tuple(prod.obj(C.dom[f], C.cod[f]) for f in C.morphisms())
        mm = tuple(prod.mor(s[3], s[2]) for s in ar.squares)
    return FunctorData(ar.cat, prod.cat, om, mm)


@dataclass(frozen=True)
class TwistedArrowResult:
    cat: FinCat
    base: FinCat
    cells: list[tuple[int, int, int, int]]  # (f, f', beta, alpha) with beta∘f∘alpha = f'


def twisted_arrow_category_ex(C: FinCat) -> TwistedArrowResult:
    """The twisted arrow category C^tw.

    Objects are morphisms of C; a morphism f -> f' is a pair
    (beta: b -> b', alpha: a' -> a) with beta∘f∘alpha = f'."""
    cells = []
    for f in C.morphisms():
        for f2 in C.morphisms():
            for beta in C.morphisms():
                if C.dom[beta] != C.cod[f] or C.cod[beta] != C.cod[f2]:
                    continue
                for alpha in C.morphisms():
                    if C.cod[alpha] != C.dom[f] or C.dom[alpha] != C.dom[f2]:
                        continue
                    if C.comp[(C.comp[(beta, f)], alpha)] == f2:
                        cells.append((f, f2, beta, alpha))
    index = {s: k for k, s in enumerate(cells)}
    dom = tuple(s[0] for s in cells)
    cod = tuple(s[1] for s in cells)
    identity = tuple(index[(f, f, C.identity[C.cod[f]], C.identity[C.dom[f]])] for f in C.morphisms())
    comp = {}
    for k2, (g1, g2, b2, a2) in enumerate(cells):
        for k1, (f1, f2, b1, a1) in enumerate(cells):
            if f2 != g1:
                continue
            comp[(k2, k1)] = index[(f1, g2, C.comp[(b2, b1)], C.comp[(a1, a2)])]
    return TwistedArrowResult(FinCat(C.n_morphisms, dom, cod, identity, comp), C, cells)


def twisted_arrow_category(C: FinCat) -> FinCat:
    return twisted_arrow_category_ex(C).cat


def is_discrete(C: FinCat) -> bool:
    return all(C.is_identity(m) for m in C.morphisms())


def find_isomorphism(C: FinCat, D: FinCat, budget: int = DEFAULT_BUDGET):
    """Exhaustively search for an isomorphism C ≅ D.

    Returns a pair (F, G) of mutually inverse functors, or None when no
    isomorphism exists (a certified absence: the search is complete)."""
    if C.n_objects != D.n_objects or C.n_morphisms != D.n_morphisms:
        return None
    for F in enumerate_functors(C, D, budget, bijective=True):
        G = invert_functor(F)
        return (F, G)
    return None


def find_isomorphism_over(C: FinCat, D: FinCat, pC: FunctorData, pD: FunctorData,
                          budget: int = DEFAULT_BUDGET):
    """Isomorphism C ≅ D commuting with projections pC: C -> B, pD: D -> B."""
    if C.n_objects != D.n_objects or C.n_morphisms != D.n_morphisms:
        return None
    for F in enumerate_functors(C, D, budget, bijective=True):
        if compose_functors(pD, F) == pC:
            return (F, invert_functor(F))
    return None


def invert_functor(F: FunctorData) -> FunctorData:
    """Inverse of a bijective-on-objects-and-morphisms functor."""
    obj_inv = [0] * F.target.n_objects
    for a, fa in enumerate(F.obj_map):
        obj_inv[fa] = a
    mor_inv = [0] * F.target.n_morphisms
    for f, ff in enumerate(F.mor_map):
        mor_inv[ff] = f
    G = FunctorData(F.target, F.source, tuple(obj_inv), tuple(mor_inv))
    check_functor(G)
    return G


# ---------------------------------------------------------------------------
# Catalog of small categories used throughout the tests and generators
# ---------------------------------------------------------------------------

def discrete_cat(n: int) -> FinCat:
    return FinCat(n, tuple(range(n)), tuple(range(n)), tuple(range(n)),
                  {(i, i): i for i in range(n)})


def terminal_cat() -> FinCat:
    return discrete_cat(1)


def empty_cat() -> FinCat:
    return FinCat(0, (), (), (), {})


def walking_arrow() -> FinCat:
    # objects 0, 1; morphisms id0, id1, f: 0 -> 1
    return make_fincat(
        2, (0, 1, 0), (0, 1, 1), (0, 1),
        {(0, 0): 0, (1, 1): 1, (2, 0): 2, (1, 2): 2},
    )


def chain_cat(n: int) -> FinCat:
    """The poset 0 <= 1 <= ... <= n-1 as a category."""
    mors = [(a, b) for a in range(n) for b in range(n) if a <= b]
    index = {m: k for k, m in enumerate(mors)}
    dom = tuple(m[0] for m in mors)
    cod = tuple(m[1] for m in mors)
    identity = tuple(index[(a, a)] for a in range(n))
    comp = {}
    for k2, (b1, c) in enumerate(mors):
        for k1, (a, b2) in enumerate(mors):
            if b2 == b1:
                comp[(k2, k1)] = index[(a, c)]
    return FinCat(n, dom, cod, identity, comp)


def parallel_pair() -> FinCat:
    # objects 0, 1; morphisms id0, id1, f, g: 0 -> 1
    return make_fincat(
        2, (0, 1, 0, 0), (0, 1, 1, 1), (0, 1),
        {(0, 0): 0, (1, 1): 1, (2, 0): 2, (1, 2): 2, (3, 0): 3, (1, 3): 3},
    )


def span_cat() -> FinCat:
    # objects 0, 1, 2; morphisms 0 -> 1 and 0 -> 2
    return make_fincat(
        3, (0, 1, 2, 0, 0), (0, 1, 2, 1, 2), (0, 1, 2),
        {(0, 0): 0, (1, 1): 1, (2, 2): 2,
         (3, 0): 3, (1, 3): 3, (4, 0): 4, (2, 4): 4},
    )


def cospan_cat() -> FinCat:
    # objects 0, 1, 2; morphisms 0 -> 2 and 1 -> 2
    return make_fincat(
        3, (0, 1, 2, 0, 1), (0, 1, 2, 2, 2), (0, 1, 2),
        {(0, 0): 0, (1, 1): 1, (2, 2): 2,
         (3, 0): 3, (2, 3): 3, (4, 1): 4, (2, 4): 4},
    )


def square_poset() -> FinCat:
    """The commutative square: the poset of subsets of a 2-element set."""
    objs = [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]
    idx = {o: i for i, o in enumerate(objs)}
    mors = [(a, b) for a in objs for b in objs if a <= b]
    midx = {m: k for k, m in enumerate(mors)}
    dom = tuple(idx[m[0]] for m in mors)
    cod = tuple(idx[m[1]] for m in mors)
    identity = tuple(midx[(o, o)] for o in objs)
    comp = {}
    for k2, (b1, c) in enumerate(mors):
        for k1, (a, b2) in enumerate(mors):
            if b2 == b1:
                comp[(k2, k1)] = midx[(a, c)]
    return FinCat(4, dom, cod, identity, comp)
