"""S-expression reader and printer for derivation files.

A derivation file is a sequence of top-level forms:

    (sig (ty A) (set S) (tm c TYPE))     declare constants
    (derivation NAME TREE)               a named, checked derivation

    TREE     ::= (RULE JUDGMENT TREE*)
    JUDGMENT ::= (ctx-wf CTX) | (ctx-eq CTX CTX)
               | (ty-wf CTX TY) | (ty-wf-d CTX TY)
               | (tm CTX TM TY) | (tm-d CTX TM TY)
               | (ty-eq CTX TY TY) | (ty-eq-d CTX TY TY)
               | (tm-eq CTX TM TM TY) | (tm-eq-d CTX TM TM TY)
    CTX      ::= empty | (ext CTX NAME TY) | (ext- CTX NAME TY)
               | (extd CTX NAME TY) | (extt CTX NAME TY) | (op-ctx CTX)
    NAME     ::= symbol | (pat symbol symbol)
    TY       ::= symbol | uu | set | (sigma NAME TY TY) | (sigma-tw NAME TY TY)
               | (pi NAME TY TY) | (hom TY TM TM) | (op TY)
               | (tw symbol TY TY TM) | (el TM)
               | (arrow TY TY) | (tw-arrow TY TY) | (tw-hom TY TM TM)
    TM       ::= symbol | (const symbol) | (pair TM TM) | (fst TM) | (snd TM)
               | (lam NAME TM) | (app TM TM) | (refl TM) | (j TM TM TM)
               | (swap TM) | (swap-inv TM) | (dfunext TM) | (code TY)
               | (tuple symbol symbol)

Bare symbols are type constants in type position and variables in term
position.
"""

from __future__ import annotations

from .normalize import Signature, tw_arrow, tw_hom
from .syntax import (
    App, ConstTm, ConstTy, CtxEq, CtxWF, Derivation, DFunext, ElTy, Empty,
    Ext, ExtDisp, ExtMinus, Fst, Hom, JTerm, KernelError, Lam, OpCtx, OpTy,
    Pair, Pi, Refl, SetU, Sigma, SigmaTw, Snd, Swap, SwapInv, Twist, TupleTm,
    TyEq, TyTm, TyWF, TmEq, TmOf, UU, Var, binder_names,
)


class ParseError(KernelError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{msg}{where}")


# ---------------------------------------------------------------------------
# Tokenizer / reader
# ---------------------------------------------------------------------------

class _Sym(str):
    pass


def _tokenize(text):
    line, col = 1, 0
    i = 0
    out = []
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 0
            i += 1
            continue
        col += 1
        if ch in " \t\r":
            i += 1
            continue
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            out.append((ch, line, col))
            i += 1
            continue
        j = i
        while j < len(text) and text[j] not in " \t\r\n();":
            j += 1
        out.append((_Sym(text[i:j]), line, col))
        col += j - i - 1
        i = j
    return out


def read_forms(text):
    """All top-level s-expressions in a string."""
    toks = _tokenize(text)
    pos = [0]

    def read_one():
        if pos[0] >= len(toks):
            raise ParseError("unexpected end of input")
        tok, line, col = toks[pos[0]]
        pos[0] += 1
        if tok == "(":
            items = []
            while True:
                if pos[0] >= len(toks):
                    raise ParseError("unclosed parenthesis", line, col)
                if toks[pos[0]][0] == ")":
                    pos[0] += 1
                    return items
                items.append(read_one())
        if tok == ")":
            raise ParseError("unexpected )", line, col)
        return tok

    forms = []
    while pos[0] < len(toks):
        forms.append(read_one())
    return forms


# ---------------------------------------------------------------------------
# Parsing into syntax
# ---------------------------------------------------------------------------

def _head(form):
    if not isinstance(form, list) or not form or not isinstance(form[0], str):
        raise ParseError(f"expected a headed form, got {form!r}")
    return form[0]


def parse_name(form):
    if isinstance(form, str):
        return str(form)
    if _head(form) == "pat":
        return tuple(str(s) for s in form[1:])
    raise ParseError(f"bad binder {form!r}")


def parse_ctx(form):
    if isinstance(form, str):
        if form == "empty":
            return Empty()
        raise ParseError(f"unknown context symbol {form}")
    h = _head(form)
    if h == "op-ctx":
        return OpCtx(parse_ctx(form[1]))
    if h in ("ext", "ext-", "extd", "extt"):
        ctx = parse_ctx(form[1])
        name = parse_name(form[2])
        ty = parse_ty(form[3])
        if h == "ext":
            return Ext(ctx, name, ty)
        if h == "ext-":
            return ExtMinus(ctx, name, ty)
        if h == "extd":
            return ExtDisp(ctx, name, ty, False)
        return ExtDisp(ctx, name, ty, True)
    raise ParseError(f"unknown context form {h}")


def parse_ty(form):
    if isinstance(form, str):
        if form == "uu":
            return UU()
        if form == "set":
            return SetU()
        return ConstTy(str(form))
    h = _head(form)
    if h == "sigma":
        return Sigma(parse_name(form[1]), parse_ty(form[2]), parse_ty(form[3]))
    if h == "sigma-tw":
        return SigmaTw(parse_name(form[1]), parse_ty(form[2]), parse_ty(form[3]))
    if h == "pi":
        return Pi(parse_name(form[1]), parse_ty(form[2]), parse_ty(form[3]))
    if h == "hom":
        return Hom(parse_ty(form[1]), parse_tm(form[2]), parse_tm(form[3]))
    if h == "op":
        return OpTy(parse_ty(form[1]))
    if h == "tw":
        return Twist(str(form[1]), parse_ty(form[2]), parse_ty(form[3]),
                     parse_tm(form[4]))
    if h == "el":
        return ElTy(parse_tm(form[1]))
    if h == "arrow":
        from .normalize import arrow
        return arrow(parse_ty(form[1]), parse_ty(form[2]))
    if h == "tw-arrow":
        return tw_arrow(parse_ty(form[1]), parse_ty(form[2]))
    if h == "tw-hom":
        return tw_hom(parse_ty(form[1]), parse_tm(form[2]), parse_tm(form[3]))
    raise ParseError(f"unknown type form {h}")


def parse_tm(form):
    if isinstance(form, str):
        return Var(str(form))
    h = _head(form)
    if h == "const":
        return ConstTm(str(form[1]))
    if h == "pair":
        return Pair(parse_tm(form[1]), parse_tm(form[2]))
    if h == "fst":
        return Fst(parse_tm(form[1]))
    if h == "snd":
        return Snd(parse_tm(form[1]))
    if h == "lam":
        return Lam(parse_name(form[1]), parse_tm(form[2]))
    if h == "app":
        return App(parse_tm(form[1]), parse_tm(form[2]))
    if h == "refl":
        return Refl(parse_tm(form[1]))
    if h == "j":
        return JTerm(parse_tm(form[1]), parse_tm(form[2]), parse_tm(form[3]))
    if h == "swap":
        return Swap(parse_tm(form[1]))
    if h == "swap-inv":
        return SwapInv(parse_tm(form[1]))
    if h == "dfunext":
        return DFunext(parse_tm(form[1]))
    if h == "code":
        return TyTm(parse_ty(form[1]))
    if h == "tuple":
        return TupleTm(tuple(str(s) for s in form[1:]))
    raise ParseError(f"unknown term form {h}")


def parse_judgment(form):
    h = _head(form)
    if h == "ctx-wf":
        return CtxWF(parse_ctx(form[1]))
    if h == "ctx-eq":
        return CtxEq(parse_ctx(form[1]), parse_ctx(form[2]))
    if h in ("ty-wf", "ty-wf-d"):
        return TyWF(parse_ctx(form[1]), parse_ty(form[2]), disp=h.endswith("-d"))
    if h in ("tm", "tm-d"):
        return TmOf(parse_ctx(form[1]), parse_tm(form[2]), parse_ty(form[3]),
                    disp=h.endswith("-d"))
    if h in ("ty-eq", "ty-eq-d"):
        return TyEq(parse_ctx(form[1]), parse_ty(form[2]), parse_ty(form[3]),
                    disp=h.endswith("-d"))
    if h in ("tm-eq", "tm-eq-d"):
        return TmEq(parse_ctx(form[1]), parse_tm(form[2]), parse_tm(form[3]),
                    parse_ty(form[4]), disp=h.endswith("-d"))
    raise ParseError(f"unknown judgment form {h}")


def parse_tree(form, defs=None):
    rule = _head(form)
    if rule == "ref":
        name = str(form[1])
        if defs is None or name not in defs:
            raise ParseError(f"reference to unknown definition {name}")
        return defs[name]
    if len(form) < 2:
        raise ParseError(f"rule {rule} lacks a conclusion")
    concl = parse_judgment(form[1])
    children = tuple(parse_tree(f, defs) for f in form[2:])
    return Derivation(str(rule), concl, children)


def parse_file(text):
    """Parse a derivation file.  Returns (signature, [(name, tree)]).

    (def NAME TREE) forms bind shared subderivations usable as (ref NAME)
    in later trees; references restore the shared structure."""
    sig = Signature()
    trees = []
    defs = {}
    for form in read_forms(text):
        h = _head(form)
        if h == "sig":
            for decl in form[1:]:
                dh = _head(decl)
                if dh in ("ty", "set"):
                    sig.declare(str(decl[1]), dh)
                elif dh == "tm":
                    sig.declare(str(decl[1]), "tm", parse_ty(decl[2]))
                else:
                    raise ParseError(f"unknown declaration {dh}")
        elif h == "def":
            defs[str(form[1])] = parse_tree(form[2], defs)
        elif h == "derivation":
            trees.append((str(form[1]), parse_tree(form[2], defs)))
        else:
            raise ParseError(f"unknown top-level form {h}")
    return sig, trees


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _emit_name(n):
    if isinstance(n, str):
        return n
    return "(pat " + " ".join(n) + ")"


def emit_ctx(c):
    if isinstance(c, Empty):
        return "empty"
    if isinstance(c, OpCtx):
        return f"(op-ctx {emit_ctx(c.ctx)})"
    if isinstance(c, Ext):
        return f"(ext {emit_ctx(c.ctx)} {_emit_name(c.name)} {emit_ty(c.ty)})"
    if isinstance(c, ExtMinus):
        return f"(ext- {emit_ctx(c.ctx)} {_emit_name(c.name)} {emit_ty(c.ty)})"
    if isinstance(c, ExtDisp):
        tag = "extt" if c.twist_flag else "extd"
        return f"({tag} {emit_ctx(c.ctx)} {_emit_name(c.name)} {emit_ty(c.ty)})"
    raise KernelError(f"emit_ctx: {c!r}")


def emit_ty(t):
    if isinstance(t, ConstTy):
        return t.name
    if isinstance(t, UU):
        return "uu"
    if isinstance(t, SetU):
        return "set"
    if isinstance(t, Sigma):
        return f"(sigma {_emit_name(t.binder)} {emit_ty(t.dom)} {emit_ty(t.cod)})"
    if isinstance(t, SigmaTw):
        return f"(sigma-tw {_emit_name(t.binder)} {emit_ty(t.dom)} {emit_ty(t.cod)})"
    if isinstance(t, Pi):
        return f"(pi {_emit_name(t.binder)} {emit_ty(t.dom)} {emit_ty(t.cod)})"
    if isinstance(t, Hom):
        return f"(hom {emit_ty(t.subject)} {emit_tm(t.lhs)} {emit_tm(t.rhs)})"
    if isinstance(t, OpTy):
        return f"(op {emit_ty(t.ty)})"
    if isinstance(t, Twist):
        return (f"(tw {t.binder} {emit_ty(t.binder_ty)} "
                f"{emit_ty(t.body)} {emit_tm(t.arg)})")
    if isinstance(t, ElTy):
        return f"(el {emit_tm(t.tm)})"
    raise KernelError(f"emit_ty: {t!r}")


def emit_tm(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ConstTm):
        return f"(const {t.name})"
    if isinstance(t, Pair):
        return f"(pair {emit_tm(t.fst)} {emit_tm(t.snd)})"
    if isinstance(t, Fst):
        return f"(fst {emit_tm(t.pair)})"
    if isinstance(t, Snd):
        return f"(snd {emit_tm(t.pair)})"
    if isinstance(t, Lam):
        return f"(lam {_emit_name(t.binder)} {emit_tm(t.body)})"
    if isinstance(t, App):
        return f"(app {emit_tm(t.fn)} {emit_tm(t.arg)})"
    if isinstance(t, Refl):
        return f"(refl {emit_tm(t.arg)})"
    if isinstance(t, JTerm):
        return f"(j {emit_tm(t.hom)} {emit_tm(t.x)} {emit_tm(t.d)})"
    if isinstance(t, Swap):
        return f"(swap {emit_tm(t.arg)})"
    if isinstance(t, SwapInv):
        return f"(swap-inv {emit_tm(t.arg)})"
    if isinstance(t, DFunext):
        return f"(dfunext {emit_tm(t.arg)})"
    if isinstance(t, TyTm):
        return f"(code {emit_ty(t.ty)})"
    if isinstance(t, TupleTm):
        return "(tuple " + " ".join(t.names) + ")"
    raise KernelError(f"emit_tm: {t!r}")


def emit_judgment(j):
    if isinstance(j, CtxWF):
        return f"(ctx-wf {emit_ctx(j.ctx)})"
    if isinstance(j, CtxEq):
        return f"(ctx-eq {emit_ctx(j.lhs)} {emit_ctx(j.rhs)})"
    if isinstance(j, TyWF):
        tag = "ty-wf-d" if j.disp else "ty-wf"
        return f"({tag} {emit_ctx(j.ctx)} {emit_ty(j.ty)})"
    if isinstance(j, TmOf):
        tag = "tm-d" if j.disp else "tm"
        return f"({tag} {emit_ctx(j.ctx)} {emit_tm(j.tm)} {emit_ty(j.ty)})"
    if isinstance(j, TyEq):
        tag = "ty-eq-d" if j.disp else "ty-eq"
        return f"({tag} {emit_ctx(j.ctx)} {emit_ty(j.lhs)} {emit_ty(j.rhs)})"
    if isinstance(j, TmEq):
        tag = "tm-eq-d" if j.disp else "tm-eq"
        return (f"({tag} {emit_ctx(j.ctx)} {emit_tm(j.lhs)} "
                f"{emit_tm(j.rhs)} {emit_ty(j.ty)})")
    raise KernelError(f"emit_judgment: {j!r}")


def emit_tree(tree, indent=0, shared=None):
    pad = " " * indent
    if shared and id(tree) in shared:
        return f"{pad}(ref {shared[id(tree)]})"
    head = f"{pad}({tree.rule} {emit_judgment(tree.conclusion)}"
    if not tree.children:
        return head + ")"
    parts = [head]
    for ch in tree.children:
        parts.append(emit_tree(ch, indent + 2, shared))
    return "\n".join(parts) + ")"


def emit_signature(sig):
    parts = []
    for name, decl in sorted(sig.consts.items()):
        if decl.kind in ("ty", "set"):
            parts.append(f"({decl.kind} {name})")
        else:
            parts.append(f"(tm {name} {emit_ty(decl.ty)})")
    return "(sig " + " ".join(parts) + ")" if parts else "(sig)"


def _shared_subtrees(named_trees):
    """Subtrees reachable more than once (by object identity), in
    dependency order, for emission as defs."""
    counts = {}
    order = []

    def walk(node):
        if id(node) in counts:
            counts[id(node)] += 1
            return
        counts[id(node)] = 1
        for ch in node.children:
            walk(ch)
        order.append(node)

    for _, tree in named_trees:
        walk(tree)
    roots = {id(t) for _, t in named_trees}
    shared = {}
    for node in order:
        if counts[id(node)] > 1 and node.children and id(node) not in roots:
            shared[id(node)] = f"d{len(shared)}"
    return shared, order


def emit_file(sig, named_trees):
    chunks = [emit_signature(sig)]
    shared, order = _shared_subtrees(named_trees)
    emitted = set()
    for node in order:
        if id(node) in shared and id(node) not in emitted:
            emitted.add(id(node))
            inner = {k: v for k, v in shared.items() if k != id(node)}
            chunks.append(f"(def {shared[id(node)]}\n"
                          f"{emit_tree(Derivation(node.rule, node.conclusion, node.children), 2, inner)})")
    for name, tree in named_trees:
        chunks.append(f"(derivation {name}\n{emit_tree(tree, 2, shared)})")
    return "\n\n".join(chunks) + "\n"
