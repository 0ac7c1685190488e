"""Capture-avoiding substitution on types and terms.

Substitution is simultaneous: a mapping from variable names to terms.
Pattern binders are substituted wholesale: replacing a pattern (x, f) by
a term t rewrites the tuple term to t and each component occurrence to
the matching projection of t.
"""

from __future__ import annotations

from .syntax import (
    App, Binder, ConstTm, ConstTy, DFunext, ElTy, Fst, Hom, JTerm, KernelError,
    Lam, OpTy, Pair, Pi, Refl, ScopeError, SetU, Sigma, SigmaTw, Snd, Swap,
    SwapInv, Twist, TupleTm, TyTm, UU, Var, binder_names, free_vars, fresh_name,
)


class TwistFlagViolation(KernelError):
    pass


def _avoid(sub: dict) -> set:
    out = set()
    for t in sub.values():
        out |= free_vars(t)
    return out


def _under_binder(sub: dict, binder: Binder):
    """Restrict a substitution under a binder and rename it if needed to
    avoid capture.  Returns (new_binder, sub', renaming-of-body or None)."""
    names = binder_names(binder)
    sub2 = {k: v for k, v in sub.items() if k not in names}
    if not sub2:
        return binder, sub2, None
    clash = _avoid(sub2) & set(names)
    if not clash:
        return binder, sub2, None
    taken = _avoid(sub2) | set(sub2.keys()) | set(names)
    renaming = {}
    new_names = []
    for n in names:
        if n in clash:
            n2 = fresh_name(n, taken)
            taken.add(n2)
            renaming[n] = Var(n2)
            new_names.append(n2)
        else:
            new_names.append(n)
    new_binder = new_names[0] if isinstance(binder, str) else tuple(new_names)
    return new_binder, sub2, renaming


def subst(e, sub: dict):
    """Apply a simultaneous substitution {name: term} to a type or term."""
    if not sub:
        return e
    if isinstance(e, Var):
        return sub.get(e.name, e)
    if isinstance(e, TupleTm):
        if all(n not in sub for n in e.names):
            return e
        vals = [sub.get(n, Var(n)) for n in e.names]
        if all(isinstance(v, Var) for v in vals):
            return TupleTm(tuple(v.name for v in vals))
        if len(vals) == 2 and isinstance(vals[0], Fst) and isinstance(vals[1], Snd) \
                and vals[0].pair == vals[1].pair:
            return vals[0].pair
        if len(vals) == 2 and all(n in sub for n in e.names):
            return Pair(vals[0], vals[1])
        raise ScopeError(f"partial substitution into pattern tuple {e.names}")
    if isinstance(e, (ConstTy, ConstTm, UU, SetU)):
        return e
    if isinstance(e, (Sigma, SigmaTw, Pi)):
        b2, sub2, ren = _under_binder(sub, e.binder)
        cod = e.cod if ren is None else subst(e.cod, ren)
        return type(e)(b2, subst(e.dom, sub), subst(cod, sub2))
    if isinstance(e, Hom):
        return Hom(subst(e.subject, sub), subst(e.lhs, sub), subst(e.rhs, sub))
    if isinstance(e, OpTy):
        return OpTy(subst(e.ty, sub))
    if isinstance(e, Twist):
        b2, sub2, ren = _under_binder(sub, e.binder)
        body = e.body if ren is None else subst(e.body, ren)
        return Twist(b2, subst(e.binder_ty, sub), subst(body, sub2), subst(e.arg, sub))
    if isinstance(e, ElTy):
        return ElTy(subst(e.tm, sub))
    if isinstance(e, Pair):
        return Pair(subst(e.fst, sub), subst(e.snd, sub))
    if isinstance(e, Fst):
        return Fst(subst(e.pair, sub))
    if isinstance(e, Snd):
        return Snd(subst(e.pair, sub))
    if isinstance(e, Lam):
        b2, sub2, ren = _under_binder(sub, e.binder)
        body = e.body if ren is None else subst(e.body, ren)
        return Lam(b2, subst(body, sub2))
    if isinstance(e, App):
        return App(subst(e.fn, sub), subst(e.arg, sub))
    if isinstance(e, Refl):
        return Refl(subst(e.arg, sub))
    if isinstance(e, JTerm):
        return JTerm(subst(e.hom, sub), subst(e.x, sub), subst(e.d, sub))
    if isinstance(e, Swap):
        return Swap(subst(e.arg, sub))
    if isinstance(e, SwapInv):
        return SwapInv(subst(e.arg, sub))
    if isinstance(e, DFunext):
        return DFunext(subst(e.arg, sub))
    if isinstance(e, TyTm):
        return TyTm(subst(e.ty, sub))
    raise KernelError(f"subst: unknown node {e!r}")


def subst1(e, name: str, replacement):
    return subst(e, {name: replacement})


def pattern_substitution(binder: Binder, replacement) -> dict:
    """The substitution replacing a (possibly pattern) binder by a term."""
    names = binder_names(binder)
    if isinstance(binder, str):
        return {binder: replacement}
    if len(names) == 2:
        if isinstance(replacement, Pair):
            return {names[0]: replacement.fst, names[1]: replacement.snd}
        return {names[0]: Fst(replacement), names[1]: Snd(replacement)}
    raise ScopeError(f"unsupported pattern arity {len(names)}")


def subst_binder(e, binder: Binder, replacement):
    """Substitute a term for a (possibly pattern) binder in e."""
    return subst(e, pattern_substitution(binder, replacement))


def diagonal_refl_subst(D, b: str, a: str, f: str, x: str):
    """The simultaneous substitution [a/b, Refl_a/f, x/x] used by the
    computation rule of directed-equality elimination.

    D is a type over the context ending ... b:A ⋉ a:A ⋊⋉ f ⋉ x:X^op; the
    result lives over ... a:A ⋉ x:X."""
    return subst(D, {b: Var(a), f: Refl(Var(a))})
