"""Dependent profunctors and dependent 2-sided fibrations.

A dependent profunctor is a triple (A, B, C): a finite category A, a
strict indexed category B over A, and a strict indexed category C over
the total category of the mixed-variance Grothendieck construction
A ⋉ B^op.  Its unstraightening is a functor into A ⋉ B carrying split
cleavage data; `check_d2sfib` verifies the four defining conditions of
such a structure and `straighten_d2sfib` / `roundtrip_epsilon` realize
the equivalence back.

Morphisms of an unstraightened total are 6-tuples
(alpha, beta, b, c, c', theta) sorted lexicographically:
alpha: a -> a' in A, beta: B(alpha)(b) -> b' in B(a'), c a fibre object
over (a, b), c' over (a', b'), and theta a morphism of the fibre
C(a', B(alpha)b) from C(alpha, id)(c) to C(id, beta)(c').  With this
ordering, straightening the canonical unstraightening recovers the
original fibre tables literally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import (
    DEFAULT_BUDGET,
    FinCat,
    FinCatError,
    FunctorData,
    check_category,
    check_functor,
    compose_functors,
    identity_functor,
)
from .indexed import (
    GrothResult,
    IndexedCat,
    IndexedCatError,
    check_indexed,
    constant_indexed,
    fibrewise_opposite,
    groth_cov,
    is_cartesian,
    is_opcartesian,
    make_indexed,
)


class D2SFibError(FinCatError):
    pass


class LemmaViolation(D2SFibError):
    pass


# ---------------------------------------------------------------------------
# Dependent profunctors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DepProf:
    """A dependent profunctor (A, B, C) with C over the total of A ⋉ B^op."""

    A: FinCat
    B: IndexedCat
    bop: GrothResult     # groth_cov(fibrewise_opposite(B))
    C: IndexedCat

    def fibre(self, a: int, b: int) -> FinCat:
        return self.C.fibres[self.bop.obj(a, b)]


def make_depprof(A: FinCat, B: IndexedCat, C: IndexedCat) -> DepProf:
    if B.base != A:
        raise D2SFibError("B is not indexed over A")
    bop = groth_cov(fibrewise_opposite(B))
    if C.base != bop.total:
        raise D2SFibError("C is not indexed over the total of A ⋉ B^op")
    check_indexed(B)
    check_indexed(C)
    return DepProf(A, B, bop, C)


@dataclass(frozen=True)
class DepProfMap:
    """A strict natural transformation between dependent profunctors that
    share the same (A, B): one fibre functor per object of A ⋉ B^op."""

    source: DepProf
    target: DepProf
    components: tuple[FunctorData, ...]


def check_depprof_map(phi: DepProfMap) -> None:
    P, Q = phi.source, phi.target
    if (P.A, P.B) != (Q.A, Q.B):
        raise D2SFibError("dependent profunctor map must fix (A, B)")
    base = P.bop.total
    if len(phi.components) != base.n_objects:
        raise D2SFibError("wrong number of components")
    for o in base.objects():
        comp = phi.components[o]
        if comp.source != P.C.fibres[o] or comp.target != Q.C.fibres[o]:
            raise D2SFibError(f"component at {o} has wrong endpoints")
        check_functor(comp)
    for w in base.morphisms():
        o0, o1 = base.dom[w], base.cod[w]
        lhs = compose_functors(Q.C.reindex[w], phi.components[o0])
        rhs = compose_functors(phi.components[o1], P.C.reindex[w])
        if lhs != rhs:
            raise D2SFibError(f"naturality fails at base morphism {w}")


# ---------------------------------------------------------------------------
# D2SFibs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class D2SFib:
    """A functor q into A ⋉ B together with split cleavage data.

    local_lifts[(e, beta)] is the chosen cartesian lift ending at e of a
    fibre morphism beta: b -> q2(e) in B(p(e)); op_lifts[(e, alpha)] is
    the chosen opcartesian lift starting at e of alpha: p(e) -> a'."""

    A: FinCat
    B: IndexedCat
    ab: GrothResult      # groth_cov(B)
    q: FunctorData       # total -> ab.total
    local_lifts: dict[tuple[int, int], int]
    op_lifts: dict[tuple[int, int], int]

    @property
    def total(self) -> FinCat:
        return self.q.source

    def p_obj(self, e: int) -> int:
        return self.ab.obj_decode(self.q.obj_map[e])[0]

    def q2_obj(self, e: int) -> int:
        return self.ab.obj_decode(self.q.obj_map[e])[1]

    def p_mor(self, m: int) -> int:
        return self.ab.mor_decode(self.q.mor_map[m])[0]

    def oplift_target(self, e: int, alpha: int) -> int:
        return self.total.cod[self.op_lifts[(e, alpha)]]

    def locallift_source(self, e: int, beta: int) -> int:
        return self.total.dom[self.local_lifts[(e, beta)]]

    def p_functor(self) -> FunctorData:
        return compose_functors(self.ab.projection, self.q)


def fibre_subcategory(f: D2SFib, a: int):
    """The fibre of p over a as (objects, morphisms) lists of total indices."""
    E = f.total
    objs = [e for e in E.objects() if f.p_obj(e) == a]
    ida = f.A.identity[a]
    mors = [m for m in E.morphisms() if f.p_mor(m) == ida]
    return objs, mors


def _local_fibre_functor(f: D2SFib, a: int):
    """q restricted over a, as a FunctorData fibre(C)_a -> B(a), plus the
    index maps back into the total."""
    objs, mors = fibre_subcategory(f, a)
    E = f.total
    oi = {e: i for i, e in enumerate(objs)}
    mi = {m: i for i, m in enumerate(mors)}
    dom = tuple(oi[E.dom[m]] for m in mors)
    cod = tuple(oi[E.cod[m]] for m in mors)
    identity = tuple(mi[E.identity[e]] for e in objs)
    comp = {(mi[g], mi[h]): mi[E.comp[(g, h)]]
            for g in mors for h in mors if E.cod[h] == E.dom[g]}
    Ca = FinCat(len(objs), dom, cod, identity, comp)
    Ba = f.B.fibres[a]
    om = tuple(f.q2_obj(e) for e in objs)
    mm = tuple(f.ab.mor_decode(f.q.mor_map[m])[1] for m in mors)
    qa = FunctorData(Ca, Ba, om, mm)
    return qa, objs, mors


def check_d2sfib(f: D2SFib) -> list[dict]:
    """Verify conditions 3 to 6 of the definition of a D2SFib.

    Returns a report: one entry per condition with status pass/fail and a
    witness for failures.  Nothing is assumed: cartesianness, splitness,
    and the interchange identity are all re-derived exhaustively."""
    report = []
    E, A, B = f.total, f.A, f.B

    # -- condition 3: each q|a is a split fibration with the given lifts
    fail3 = None
    for a in A.objects():
        qa, objs, mors = _local_fibre_functor(f, a)
        oi = {e: i for i, e in enumerate(objs)}
        mi = {m: i for i, m in enumerate(mors)}
        Ba = B.fibres[a]
        for e in objs:
            for beta in Ba.morphisms():
                if Ba.cod[beta] != f.q2_obj(e):
                    continue
                key = (e, beta)
                if key not in f.local_lifts:
                    fail3 = {"at": key, "reason": "missing local lift"}
                    break
                m = f.local_lifts[key]
                if m not in mi:
                    fail3 = {"at": key, "reason": "local lift not a fibre morphism"}
                    break
                dec = f.ab.mor_decode(f.q.mor_map[m])
                if E.cod[m] != e or dec[1] != beta:
                    fail3 = {"at": key, "reason": "local lift has wrong image or target"}
                    break
                if not is_cartesian(qa, mi[m]):
                    fail3 = {"at": key, "reason": "local lift not cartesian in the fibre"}
                    break
                if beta == Ba.identity[f.q2_obj(e)] and m != E.identity[e]:
                    fail3 = {"at": key, "reason": "identity lift is not an identity"}
                    break
            if fail3:
                break
        if fail3:
            break
        # splitness of the local cleavage
        for e in objs:
            for beta in Ba.morphisms():
                if Ba.cod[beta] != f.q2_obj(e):
                    continue
                e1 = f.locallift_source(e, beta)
                for gamma in Ba.morphisms():
                    if Ba.cod[gamma] != Ba.dom[beta]:
                        continue
                    lhs = f.local_lifts[(e, Ba.comp[(beta, gamma)])]
                    rhs = E.comp[(f.local_lifts[(e, beta)], f.local_lifts[(e1, gamma)])]
                    if lhs != rhs:
                        fail3 = {"at": (e, beta, gamma), "reason": "local cleavage not split"}
                        break
                if fail3:
                    break
            if fail3:
                break
        if fail3:
            break
    report.append({"condition": "3", "status": "fail" if fail3 else "pass",
                   "witness": fail3})

    # -- condition 4: p is a split opfibration with the given lifts
    p = f.p_functor()
    fail4 = None
    for e in E.objects():
        a = f.p_obj(e)
        for alpha in A.morphisms():
            if A.dom[alpha] != a:
                continue
            key = (e, alpha)
            if key not in f.op_lifts:
                fail4 = {"at": key, "reason": "missing opcartesian lift"}
                break
            m = f.op_lifts[key]
            if E.dom[m] != e or p.mor_map[m] != alpha:
                fail4 = {"at": key, "reason": "oplift has wrong source or image"}
                break
            if not is_opcartesian(p, m):
                fail4 = {"at": key, "reason": "oplift not opcartesian"}
                break
            if alpha == A.identity[a] and m != E.identity[e]:
                fail4 = {"at": key, "reason": "identity oplift is not an identity"}
                break
        if fail4:
            break
    if not fail4:
        for (e, alpha), m in f.op_lifts.items():
            for alpha2 in A.morphisms():
                if A.dom[alpha2] != A.cod[alpha]:
                    continue
                lhs = f.op_lifts[(e, A.comp[(alpha2, alpha)])]
                rhs = E.comp[(f.op_lifts[(E.cod[m], alpha2)], m)]
                if lhs != rhs:
                    fail4 = {"at": (e, alpha, alpha2), "reason": "opcleavage not split"}
                    break
            if fail4:
                break
    report.append({"condition": "4", "status": "fail" if fail4 else "pass",
                   "witness": fail4})

    # -- condition 5: q maps chosen oplifts to the canonical lifts of pi
    fail5 = None
    if not fail4:
        for (e, alpha), m in f.op_lifts.items():
            want = f.ab.canonical_oplift(f.q.obj_map[e], alpha)
            if f.q.mor_map[m] != want:
                fail5 = {"at": (e, alpha),
                         "reason": "image of oplift is not the canonical lift"}
                break
    report.append({"condition": "5", "status": "fail" if fail5 else "pass",
                   "witness": fail5})

    # -- condition 6: the interchange morphism is an identity
    fail6 = None
    if not (fail3 or fail4 or fail5):
        for e in E.objects():
            a = f.p_obj(e)
            Ba = B.fibres[a]
            for alpha in A.morphisms():
                if A.dom[alpha] != a:
                    continue
                a1 = A.cod[alpha]
                Bal = B.reindex[alpha]
                for beta in Ba.morphisms():
                    if Ba.cod[beta] != f.q2_obj(e):
                        continue
                    bse = f.locallift_source(e, beta)             # beta* e
                    lhs = f.oplift_target(bse, alpha)             # alpha_! beta* e
                    ae = f.oplift_target(e, alpha)                # alpha_! e
                    rhs = f.locallift_source(ae, Bal.mor_map[beta])
                    if lhs != rhs:
                        fail6 = {"at": (e, alpha, beta),
                                 "reason": "interchange objects differ"}
                        break
                    # the canonical comparison morphism must be the identity
                    chi = E.comp[(f.op_lifts[(e, alpha)], f.local_lifts[(e, beta)])]
                    u = _unique_filler_through_oplift(f, bse, alpha, chi)
                    if u is None:
                        fail6 = {"at": (e, alpha, beta), "reason": "no factorization"}
                        break
                    phi = _unique_filler_through_cartlift(f, ae, Bal.mor_map[beta], u)
                    if phi != E.identity[lhs]:
                        fail6 = {"at": (e, alpha, beta),
                                 "reason": "interchange morphism is not an identity"}
                        break
                if fail6:
                    break
            if fail6:
                break
    elif fail3 or fail4 or fail5:
        fail6 = {"reason": "not checked: an earlier condition failed"}
    report.append({"condition": "6", "status": "fail" if fail6 else "pass",
                   "witness": fail6})
    return report


def _unique_filler_through_oplift(f: D2SFib, e: int, alpha: int, chi: int):
    """The unique p-vertical u with u ∘ oplift(e, alpha) == chi.

    Uniqueness among p-vertical fillers is exactly what opcartesianness of
    the lift guarantees."""
    E = f.total
    m = f.op_lifts[(e, alpha)]
    ida1 = f.A.identity[f.A.cod[alpha]]
    out = None
    for u in E.morphisms():
        if E.dom[u] != E.cod[m] or f.p_mor(u) != ida1:
            continue
        if E.comp[(u, m)] == chi:
            if out is not None:
                return None
            out = u
    return out


def _is_q_vertical(f: D2SFib, m: int) -> bool:
    """True when q(m) is an identity of A ⋉ B."""
    return f.ab.total.is_identity(f.q.mor_map[m])


def _unique_filler_through_cartlift(f: D2SFib, e: int, beta: int, u: int):
    """The unique q-vertical phi with cartlift(e, beta) ∘ phi == u.

    The quantification must be over q-vertical fillers: cartesianness of
    the lift in the fibre gives uniqueness per factorization of the
    q-image, and the canonical comparison uses the identity factor."""
    E = f.total
    m = f.local_lifts[(e, beta)]
    out = None
    for phi in E.morphisms():
        if E.cod[phi] != E.dom[m] or E.dom[phi] != E.dom[u]:
            continue
        if not _is_q_vertical(f, phi):
            continue
        if E.comp[(m, phi)] == u:
            if out is not None:
                return None
            out = phi
    return out


def d2sfib_passes(report: list[dict]) -> bool:
    return all(entry["status"] == "pass" for entry in report)


# ---------------------------------------------------------------------------
# Unstraightening
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnstraightenResult:
    fib: D2SFib
    prof: DepProf
    objs: tuple[tuple[int, int, int], ...]
    mors: tuple[tuple[int, int, int, int, int, int], ...]

    def obj(self, a: int, b: int, c: int) -> int:
        return self._oidx[(a, b, c)]

    def obj_decode(self, o: int) -> tuple[int, int, int]:
        return self.objs[o]

    def mor(self, key) -> int:
        return self._midx[key]

    def mor_decode(self, m: int):
        return self.mors[m]

    def __post_init__(self):
        object.__setattr__(self, "_oidx", {t: i for i, t in enumerate(self.objs)})
        object.__setattr__(self, "_midx", {t: i for i, t in enumerate(self.mors)})


def _w1(P: DepProf, alpha: int, b: int) -> int:
    """(alpha, id): (a, b) -> (a', B(alpha)b) in A ⋉ B^op."""
    a1 = P.A.cod[alpha]
    b1 = P.B.reindex[alpha].obj_map[b]
    return P.bop.mor(alpha, P.B.fibres[a1].identity[b1], b)


def _w2(P: DepProf, a1: int, beta: int) -> int:
    """(id, beta): (a', b') -> (a', B(alpha)b) in A ⋉ B^op, for
    beta: B(alpha)b -> b' in B(a')."""
    b1 = P.B.fibres[a1].cod[beta]
    return P.bop.mor(P.A.identity[a1], beta, b1)


def unstraighten(P: DepProf) -> UnstraightenResult:
    """The unstraightening of a dependent profunctor, with the canonical
    split cleavages; the result passes check_d2sfib by construction (and
    the caller is free to re-verify)."""
    A, B, C = P.A, P.B, P.C
    ab = groth_cov(B)
    objs = []
    for a in A.objects():
        for b in B.fibres[a].objects():
            for c in C.fibres[P.bop.obj(a, b)].objects():
                objs.append((a, b, c))
    objs = tuple(objs)
    oidx = {t: i for i, t in enumerate(objs)}

    mors = []
    for alpha in A.morphisms():
        a0, a1 = A.dom[alpha], A.cod[alpha]
        Bal = B.reindex[alpha]
        for beta in B.fibres[a1].morphisms():
            for b in B.fibres[a0].objects():
                if Bal.obj_map[b] != B.fibres[a1].dom[beta]:
                    continue
                b1 = B.fibres[a1].cod[beta]
                F1 = C.reindex[_w1(P, alpha, b)]          # C(a,b) -> C(a', B(al)b)
                F2 = C.reindex[_w2(P, a1, beta)]          # C(a',b') -> C(a', B(al)b)
                mid = C.fibres[P.bop.obj(a1, Bal.obj_map[b])]
                for c in C.fibres[P.bop.obj(a0, b)].objects():
                    for c1 in C.fibres[P.bop.obj(a1, b1)].objects():
                        src, tgt = F1.obj_map[c], F2.obj_map[c1]
                        for theta in mid.morphisms():
                            if mid.dom[theta] == src and mid.cod[theta] == tgt:
                                mors.append((alpha, beta, b, c, c1, theta))
    mors = tuple(sorted(mors))
    midx = {t: i for i, t in enumerate(mors)}

    dom = tuple(oidx[(A.dom[al], b, c)] for (al, be, b, c, c1, th) in mors)
    cod = tuple(
        oidx[(A.cod[al], B.fibres[A.cod[al]].cod[be], c1)]
        for (al, be, b, c, c1, th) in mors
    )
    identity = tuple(
        midx[(A.identity[a], B.fibres[a].identity[b], b, c, c,
              C.fibres[P.bop.obj(a, b)].identity[c])]
        for (a, b, c) in objs
    )

    comp = {}
    for k2, (al2, be2, b2, c2, c2p, th2) in enumerate(mors):
        for k1, (al1, be1, b1, c1, c1p, th1) in enumerate(mors):
            if A.cod[al1] != A.dom[al2]:
                continue
            if B.fibres[A.cod[al1]].cod[be1] != b2 or c1p != c2:
                continue
            al = A.comp[(al2, al1)]
            a2 = A.cod[al2]
            Bal2 = B.reindex[al2]
            be = B.fibres[a2].comp[(be2, Bal2.mor_map[be1])]
            # u1 = (al2, id) at B(al1)b ; u2 = (id, B(al2)(be1))
            mid_b = B.reindex[al1].obj_map[b1]        # B(al1) b
            u1 = _w1(P, al2, mid_b)
            u2 = _w2(P, a2, Bal2.mor_map[be1])
            G1 = C.reindex[u1]
            G2 = C.reindex[u2]
            fib = C.fibres[P.bop.obj(a2, B.reindex[al].obj_map[b1])]
            th = fib.comp[(G2.mor_map[th2], G1.mor_map[th1])]
            comp[(k2, k1)] = midx[(al, be, b1, c1, c2p, th)]

    total = FinCat(len(objs), dom, cod, identity, comp)
    check_category(total)
    q = FunctorData(total, ab.total,
                    tuple(ab.obj(a, b) for (a, b, c) in objs),
                    tuple(ab.mor(al, be, b) for (al, be, b, c, c1, th) in mors))
    check_functor(q)

    local_lifts = {}
    op_lifts = {}
    for e, (a, b1, c) in enumerate(objs):
        Ba = B.fibres[a]
        for beta in Ba.morphisms():
            if Ba.cod[beta] != b1:
                continue
            b0 = Ba.dom[beta]
            c0 = C.reindex[_w2(P, a, beta)].obj_map[c]
            local_lifts[(e, beta)] = midx[(A.identity[a], beta, b0, c0, c,
                                           C.fibres[P.bop.obj(a, b0)].identity[c0])]
        for alpha in A.morphisms():
            if A.dom[alpha] != a:
                continue
            a1 = A.cod[alpha]
            bb = B.reindex[alpha].obj_map[b1]
            cc = C.reindex[_w1(P, alpha, b1)].obj_map[c]
            op_lifts[(e, alpha)] = midx[(alpha, B.fibres[a1].identity[bb], b1, c, cc,
                                         C.fibres[P.bop.obj(a1, bb)].identity[cc])]

    fib = D2SFib(A, B, ab, q, local_lifts, op_lifts)
    return UnstraightenResult(fib, P, objs, mors)


# ---------------------------------------------------------------------------
# Straightening
# ---------------------------------------------------------------------------

def verify_interchange_lemma(f: D2SFib) -> None:
    """Morphism-level commuting square: for composable (alpha, beta) the
    two fibre-functor composites agree on objects and morphisms.

    Quantifies over q-vertical morphisms m of the fibre over (a, cod beta)."""
    A, B, E = f.A, f.B, f.total
    for a in A.objects():
        Ba = B.fibres[a]
        for alpha in A.morphisms():
            if A.dom[alpha] != a:
                continue
            Bal = B.reindex[alpha]
            for beta in Ba.morphisms():
                target = f.ab.obj(a, Ba.cod[beta])
                for m in E.morphisms():
                    if not _is_q_vertical(f, m) or f.q.obj_map[E.dom[m]] != target:
                        continue
                    lhs = _oplift_transport(f, alpha, _cartlift_transport(f, beta, m))
                    rhs = _cartlift_transport(f, Bal.mor_map[beta],
                                              _oplift_transport(f, alpha, m))
                    if lhs != rhs:
                        raise LemmaViolation(
                            f"interchange square fails at (alpha={alpha}, beta={beta}, m={m})")


def _oplift_transport(f: D2SFib, alpha: int, m: int) -> int:
    """Image of a fibre morphism m under the opreindexing functor alpha_!."""
    E = f.total
    e, d = E.dom[m], E.cod[m]
    le, ld = f.op_lifts[(e, alpha)], f.op_lifts[(d, alpha)]
    rhs = E.comp[(ld, m)]
    a1 = f.A.cod[alpha]
    id1 = f.A.identity[a1]
    out = None
    for u in E.morphisms():
        if E.dom[u] != E.cod[le] or E.cod[u] != E.cod[ld]:
            continue
        if f.p_mor(u) != id1:
            continue
        if E.comp[(u, le)] == rhs:
            if out is not None:
                raise D2SFibError(f"oplift transport not unique at (alpha={alpha}, m={m})")
            out = u
    if out is None:
        raise D2SFibError(f"oplift transport missing at (alpha={alpha}, m={m})")
    return out


def _cartlift_transport(f: D2SFib, beta: int, m: int) -> int:
    """Image of a q-vertical fibre morphism m under the reindexing beta^*."""
    E = f.total
    e, d = E.dom[m], E.cod[m]
    le, ld = f.local_lifts[(e, beta)], f.local_lifts[(d, beta)]
    rhs = E.comp[(m, le)]
    out = None
    for u in E.morphisms():
        if E.dom[u] != E.dom[le] or E.cod[u] != E.dom[ld]:
            continue
        if not _is_q_vertical(f, u):
            continue
        if E.comp[(ld, u)] == rhs:
            if out is not None:
                raise D2SFibError(f"cart lift transport not unique at (beta={beta}, m={m})")
            out = u
    if out is None:
        raise D2SFibError(f"cart lift transport missing at (beta={beta}, m={m})")
    return out


def straighten_d2sfib(f: D2SFib) -> DepProf:
    """Take fibres: recover the dependent profunctor of a checked D2SFib.

    Re-verifies the interchange lemma exhaustively (LemmaViolation if it
    fails, which is unreachable for inputs passing check_d2sfib)."""
    verify_interchange_lemma(f)
    A, B, E = f.A, f.B, f.total
    bop = groth_cov(fibrewise_opposite(B))

    fib_objs = {}
    fib_mors = {}
    fibres = []
    for o in bop.total.objects():
        a, b = bop.obj_decode(o)
        idab = f.ab.obj(a, b)
        objs = [e for e in E.objects() if f.q.obj_map[e] == idab]
        idm = f.ab.mor(A.identity[a], B.fibres[a].identity[b], b)
        mors = [m for m in E.morphisms() if f.q.mor_map[m] == idm]
        fib_objs[o], fib_mors[o] = objs, mors
        oi = {e: i for i, e in enumerate(objs)}
        mi = {m: i for i, m in enumerate(mors)}
        dom = tuple(oi[E.dom[m]] for m in mors)
        cod = tuple(oi[E.cod[m]] for m in mors)
        identity = tuple(mi[E.identity[e]] for e in objs)
        comp = {(mi[g], mi[h]): mi[E.comp[(g, h)]]
                for g in mors for h in mors if E.cod[h] == E.dom[g]}
        fibres.append(FinCat(len(objs), dom, cod, identity, comp))

    reindex = []
    for w in bop.total.morphisms():
        alpha, g, b = bop.mor_decode(w)
        o0 = bop.total.dom[w]
        o1 = bop.total.cod[w]
        a1 = A.cod[alpha]
        # g is a morphism of B(a1) with cod(g) = B(alpha)(b); the reindexing
        # is g^* ∘ alpha_! on the fibres.
        oi0 = {e: i for i, e in enumerate(fib_objs[o0])}
        oi1 = {e: i for i, e in enumerate(fib_objs[o1])}
        mi1 = {m: i for i, m in enumerate(fib_mors[o1])}
        obj_map = []
        for e in fib_objs[o0]:
            ae = f.oplift_target(e, alpha)
            obj_map.append(oi1[f.locallift_source(ae, g)])
        mor_map = []
        for m in fib_mors[o0]:
            u = _cartlift_transport(f, g, _oplift_transport(f, alpha, m))
            mor_map.append(mi1[u])
        src = fibres[o0]
        tgt = fibres[o1]
        reindex.append(FunctorData(src, tgt, tuple(obj_map), tuple(mor_map)))

    C = make_indexed(bop.total, fibres, reindex)
    return DepProf(A, B, bop, C)


# ---------------------------------------------------------------------------
# Cartesian functors and the round-trip equivalence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CartFunctor:
    phi: FunctorData
    source: D2SFib
    target: D2SFib


def check_cart_functor(cf: CartFunctor) -> list[dict]:
    """Verify the two conditions of a cartesian functor between D2SFibs,
    plus the derived identity q' ∘ phi = q."""
    phi, f, g = cf.phi, cf.source, cf.target
    report = []
    err = None
    try:
        check_functor(phi)
    except FinCatError as exc:
        err = {"reason": str(exc)}
    report.append({"condition": "functor", "status": "fail" if err else "pass",
                   "witness": err})
    if err:
        return report

    fail1 = None
    for (e, alpha), m in f.op_lifts.items():
        want = g.op_lifts.get((phi.obj_map[e], alpha))
        if phi.mor_map[m] != want:
            fail1 = {"at": (e, alpha), "reason": "chosen oplift not preserved"}
            break
    report.append({"condition": "1", "status": "fail" if fail1 else "pass",
                   "witness": fail1})

    fail2 = None
    for (e, beta), m in f.local_lifts.items():
        want = g.local_lifts.get((phi.obj_map[e], beta))
        if phi.mor_map[m] != want:
            fail2 = {"at": (e, beta), "reason": "chosen cartesian lift not preserved"}
            break
    report.append({"condition": "2", "status": "fail" if fail2 else "pass",
                   "witness": fail2})

    over = compose_functors(g.q, phi) == f.q
    report.append({"condition": "over", "status": "pass" if over else "fail",
                   "witness": None if over else {"reason": "q' ∘ phi differs from q"}})
    return report


def apply_phi(phi: DepProfMap) -> CartFunctor:
    """The unstraightening of a map of dependent profunctors."""
    check_depprof_map(phi)
    P, Q = phi.source, phi.target
    up = unstraighten(P)
    uq = unstraighten(Q)
    obj_map = tuple(
        uq.obj(a, b, phi.components[P.bop.obj(a, b)].obj_map[c])
        for (a, b, c) in up.objs
    )
    mor_map = []
    for (al, be, b, c, c1, th) in up.mors:
        a0, a1 = P.A.dom[al], P.A.cod[al]
        o0 = P.bop.obj(a0, b)
        o1 = P.bop.obj(a1, P.B.fibres[a1].cod[be])
        omid = P.bop.obj(a1, P.B.reindex[al].obj_map[b])
        mor_map.append(uq.mor((
            al, be, b,
            phi.components[o0].obj_map[c],
            phi.components[o1].obj_map[c1],
            phi.components[omid].mor_map[th],
        )))
    F = FunctorData(up.fib.total, uq.fib.total, obj_map, tuple(mor_map))
    check_functor(F)
    return CartFunctor(F, up.fib, uq.fib)


def roundtrip_epsilon(f: D2SFib) -> tuple[CartFunctor, CartFunctor]:
    """epsilon: C -> unstraighten(straighten(f)) and its inverse, with both
    composites verified to be identity functors table-exactly."""
    P = straighten_d2sfib(f)
    u = unstraighten(P)
    E = f.total
    A, B = f.A, f.B

    fib_obj_index = {}
    for o in P.bop.total.objects():
        a, b = P.bop.obj_decode(o)
        idab = f.ab.obj(a, b)
        objs = [e for e in E.objects() if f.q.obj_map[e] == idab]
        for i, e in enumerate(objs):
            fib_obj_index[e] = (a, b, i)
    fib_mor_index = {}
    for o in P.bop.total.objects():
        a, b = P.bop.obj_decode(o)
        idm = f.ab.mor(A.identity[a], B.fibres[a].identity[b], b)
        mors = [m for m in E.morphisms() if f.q.mor_map[m] == idm]
        for i, m in enumerate(mors):
            fib_mor_index[m] = i

    obj_map = tuple(u.obj(*fib_obj_index[e]) for e in E.objects())
    mor_map = []
    for m in E.morphisms():
        al, be, b = f.ab.mor_decode(f.q.mor_map[m])
        e, e1 = E.dom[m], E.cod[m]
        chi = m
        # factor through the oplift of alpha at e, then the cartesian lift
        # of beta at e1; theta is the remaining vertical morphism.
        ale = f.oplift_target(e, al)
        uu = _unique_filler_through_oplift(f, e, al, chi)
        if uu is None:
            raise D2SFibError(f"epsilon: no factorization for morphism {m}")
        theta = _unique_filler_through_cartlift(f, e1, be, uu)
        if theta is None:
            raise D2SFibError(f"epsilon: no vertical comparison for morphism {m}")
        _, _, ci = fib_obj_index[e]
        _, _, c1i = fib_obj_index[e1]
        mor_map.append(u.mor((al, be, b, ci, c1i, fib_mor_index[theta])))
    eps = FunctorData(E, u.fib.total, obj_map, tuple(mor_map))
    check_functor(eps)

    inv_obj = [0] * u.fib.total.n_objects
    for e in E.objects():
        inv_obj[obj_map[e]] = e
    inv_mor = [None] * u.fib.total.n_morphisms
    for k, (al, be, b, ci, c1i, thi) in enumerate(u.mors):
        a0 = A.dom[al]
        a1 = A.cod[al]
        o0 = P.bop.obj(a0, b)
        o1 = P.bop.obj(a1, B.fibres[a1].cod[be])
        omid = P.bop.obj(a1, B.reindex[al].obj_map[b])
        idab0 = f.ab.obj(a0, b)
        objs0 = [e for e in E.objects() if f.q.obj_map[e] == idab0]
        idab1 = f.ab.obj(a1, B.fibres[a1].cod[be])
        objs1 = [e for e in E.objects() if f.q.obj_map[e] == idab1]
        idmmid = f.ab.mor(A.identity[a1], B.fibres[a1].identity[B.reindex[al].obj_map[b]],
                          B.reindex[al].obj_map[b])
        morsmid = [m for m in E.morphisms() if f.q.mor_map[m] == idmmid]
        e = objs0[ci]
        e1 = objs1[c1i]
        theta = morsmid[thi]
        inv_mor[k] = E.comp[(f.local_lifts[(e1, be)], E.comp[(theta, f.op_lifts[(e, al)])])]
    eps_inv = FunctorData(u.fib.total, E, tuple(inv_obj), tuple(inv_mor))
    check_functor(eps_inv)

    if compose_functors(eps_inv, eps) != identity_functor(E):
        raise D2SFibError("epsilon⁻¹ ∘ epsilon is not the identity")
    if compose_functors(eps, eps_inv) != identity_functor(u.fib.total):
        raise D2SFibError("epsilon ∘ epsilon⁻¹ is not the identity")
    return (CartFunctor(eps, f, u.fib), CartFunctor(eps_inv, u.fib, f))


# ---------------------------------------------------------------------------
# Embedding of ordinary profunctors, and pullbacks
# ---------------------------------------------------------------------------

def embed_prof(A: FinCat, Bcat: FinCat, prof: IndexedCat) -> DepProf:
    """Embed an ordinary profunctor A x B^op -> Cat (given as an indexed
    category over product(A, opposite(B)).cat) as a dependent profunctor
    over (A, const_B).

    With the index conventions here, the total of A ⋉ const_B^op equals
    the product category literally, so the embedding is table-identity."""
    from .fincat import opposite as op_, product_ex
    B = constant_indexed(A, Bcat)
    bop = groth_cov(fibrewise_opposite(B))
    pr = product_ex(A, op_(Bcat))
    if bop.total != pr.cat:
        raise D2SFibError("embedding mismatch: A ⋉ const_B^op differs from A x B^op")
    if prof.base != pr.cat:
        raise D2SFibError("profunctor is not indexed over A x B^op")
    C = IndexedCat(bop.total, prof.fibres, prof.reindex)
    return DepProf(A, B, bop, C)


def hom_profunctor(A: FinCat) -> DepProf:
    """The hom profunctor of A, as a dependent profunctor over (A, const_A):
    fibres are the discrete hom-sets, reindexing acts by composition on
    both sides."""
    from .fincat import discrete_cat, opposite as op_, product_ex

    pr = product_ex(A, op_(A))
    fibres = []
    homs = []
    for o in pr.cat.objects():
        y, x = pr.obj_decode(o)   # (target coordinate, source coordinate)
        hs = A.hom(x, y)
        homs.append(hs)
        fibres.append(discrete_cat(len(hs)))
    reindex = []
    for m in pr.cat.morphisms():
        f_, g_ = pr.mor_decode(m)    # f in A, g in A^op (i.e. reversed in A)
        o0, o1 = pr.cat.dom[m], pr.cat.cod[m]
        h0, h1 = homs[o0], homs[o1]
        obj_map = []
        for h in h0:
            composite = A.comp[(A.comp[(f_, h)], g_)]
            obj_map.append(h1.index(composite))
        reindex.append(FunctorData(fibres[o0], fibres[o1], tuple(obj_map),
                                   tuple(fibres[o1].identity[i] for i in obj_map)))
    prof = make_indexed(pr.cat, fibres, reindex)
    return embed_prof(A, A, prof)


@dataclass(frozen=True)
class ICatMorphism:
    """A strict morphism (A', B') -> (A, B) of indexed categories:
    a functor on bases and a strictly natural family of fibre functors."""

    F: FunctorData                       # A' -> A
    G: tuple[FunctorData, ...]           # per object a': B'(a') -> B(F a')


def check_icat_morphism(m: ICatMorphism, Bsrc: IndexedCat, Btgt: IndexedCat) -> None:
    if m.F.source != Bsrc.base or m.F.target != Btgt.base:
        raise D2SFibError("base functor has wrong endpoints")
    check_functor(m.F)
    for a in Bsrc.base.objects():
        g = m.G[a]
        if g.source != Bsrc.fibres[a] or g.target != Btgt.fibres[m.F.obj_map[a]]:
            raise D2SFibError(f"fibre functor at {a} has wrong endpoints")
        check_functor(g)
    for al in Bsrc.base.morphisms():
        a0, a1 = Bsrc.base.dom[al], Bsrc.base.cod[al]
        lhs = compose_functors(m.G[a1], Bsrc.reindex[al])
        rhs = compose_functors(Btgt.reindex[m.F.mor_map[al]], m.G[a0])
        if lhs != rhs:
            raise D2SFibError(f"strict naturality fails at base morphism {al}")


def groth_functor(m: ICatMorphism, src: GrothResult, tgt: GrothResult) -> FunctorData:
    """⋉(F, G): the induced functor on covariant Grothendieck totals."""
    obj_map = tuple(
        tgt.obj(m.F.obj_map[a], m.G[a].obj_map[b]) for (a, b) in src.objs
    )
    mor_map = tuple(
        tgt.mor(m.F.mor_map[al], m.G[src.indexed.base.cod[al]].mor_map[be],
                m.G[src.indexed.base.dom[al]].obj_map[b])
        for (al, be, b) in src.mors
    )
    out = FunctorData(src.total, tgt.total, obj_map, mor_map)
    check_functor(out)
    return out


def pullback_d2sfib(f: D2SFib, m: ICatMorphism, Bsrc: IndexedCat) -> D2SFib:
    """Strict pullback of a D2SFib along a strict morphism of indexed
    categories, with the induced cleavages."""
    check_icat_morphism(m, Bsrc, f.B)
    A1 = Bsrc.base
    ab1 = groth_cov(Bsrc)
    into = groth_functor(m, ab1, f.ab)
    E = f.total

    objs = [(x, e) for x in ab1.total.objects() for e in E.objects()
            if into.obj_map[x] == f.q.obj_map[e]]
    oidx = {t: i for i, t in enumerate(objs)}
    mors = [(w, n) for w in ab1.total.morphisms() for n in E.morphisms()
            if into.mor_map[w] == f.q.mor_map[n]]
    midx = {t: i for i, t in enumerate(mors)}
    dom = tuple(oidx[(ab1.total.dom[w], E.dom[n])] for (w, n) in mors)
    cod = tuple(oidx[(ab1.total.cod[w], E.cod[n])] for (w, n) in mors)
    identity = tuple(midx[(ab1.total.identity[x], E.identity[e])] for (x, e) in objs)
    comp = {}
    for k2, (w2, n2) in enumerate(mors):
        for k1, (w1, n1) in enumerate(mors):
            if ab1.total.cod[w1] != ab1.total.dom[w2] or E.cod[n1] != E.dom[n2]:
                continue
            comp[(k2, k1)] = midx[(ab1.total.comp[(w2, w1)], E.comp[(n2, n1)])]
    total = FinCat(len(objs), dom, cod, identity, comp)
    check_category(total)
    q1 = FunctorData(total, ab1.total,
                     tuple(x for (x, e) in objs),
                     tuple(w for (w, n) in mors))
    check_functor(q1)

    local_lifts = {}
    op_lifts = {}
    for i, (x, e) in enumerate(objs):
        a1, b1 = ab1.obj_decode(x)
        Ba1 = Bsrc.fibres[a1]
        for beta in Ba1.morphisms():
            if Ba1.cod[beta] != b1:
                continue
            w = ab1.mor(A1.identity[a1], beta, Ba1.dom[beta])
            n = f.local_lifts[(e, m.G[a1].mor_map[beta])]
            local_lifts[(i, beta)] = midx[(w, n)]
        for alpha in A1.morphisms():
            if A1.dom[alpha] != a1:
                continue
            w = ab1.canonical_oplift(x, alpha)
            n = f.op_lifts[(e, m.F.mor_map[alpha])]
            op_lifts[(i, alpha)] = midx[(w, n)]

    return D2SFib(A1, Bsrc, ab1, q1, local_lifts, op_lifts)
