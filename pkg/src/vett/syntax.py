"""Abstract syntax for the five syntactic classes and their contexts.

The calculus has mutually recursive classes: categories, objects
(unary functors), sets (profunctors), elements (natural transformations)
and a meta layer of dependent types and terms.  Binders are named; every
traversal that moves a term under or out of a binder freshens the bound
names with a global counter, so capture is impossible and alpha
equivalence is a paired traversal (`alpha_eq`).

Transformation contexts are alternating sequences
``a0:C0, x1:R1, a1:C1, ..., xn:Rn, an:Cn`` beginning and ending with an
object variable.  The boundary projections d-/d+, the underline coercion
to set contexts and horizontal composition are defined here; everything
downstream (substitution, checking, conversion, evaluation) consumes
them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields
from typing import Optional, Tuple

from .errors import (
    BoundaryMismatch, ContextSplitError, DuplicateName, LinearityError,
    ScopeError, Span,
)


# ---------------------------------------------------------------------------
# fresh names


_counter = itertools.count(1)


def fresh(hint: str) -> str:
    base = hint.split("#", 1)[0] or "v"
    return f"{base}#{next(_counter)}"


def hint_of(name: str) -> str:
    return name.split("#", 1)[0] or "v"


# ---------------------------------------------------------------------------
# node base


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


class Cat(Node):
    pass


class Obj(Node):
    pass


class Set_(Node):
    pass


class Elt(Node):
    pass


class MTy(Node):
    pass


class MTm(Node):
    pass


# --- categories ------------------------------------------------------------


@dataclass(frozen=True)
class CBase(Cat):
    name: str


@dataclass(frozen=True)
class CUnquote(Cat):
    term: "MTm"


@dataclass(frozen=True)
class CProd(Cat):
    left: Cat
    right: Cat


@dataclass(frozen=True)
class CUnit(Cat):
    pass


@dataclass(frozen=True)
class CGraph(Cat):
    """Graph (tabulator) of a profunctor; binds aname/bname in body."""

    aname: str
    acat: Cat
    bname: str
    bcat: Cat
    body: "Set_"


@dataclass(frozen=True)
class CPshNeg(Cat):
    cat: Cat


@dataclass(frozen=True)
class CPshPos(Cat):
    cat: Cat


# --- objects ---------------------------------------------------------------


@dataclass(frozen=True)
class OVar(Obj):
    name: str


@dataclass(frozen=True)
class OApp(Obj):
    """Application of a functor-typed meta term to an object."""

    fn: "MTm"
    arg: Obj


@dataclass(frozen=True)
class OPair(Obj):
    left: Obj
    right: Obj


@dataclass(frozen=True)
class OUnit(Obj):
    pass


@dataclass(frozen=True)
class OProj1(Obj):
    obj: Obj


@dataclass(frozen=True)
class OProj2(Obj):
    obj: Obj


@dataclass(frozen=True)
class OTriple(Obj):
    """Graph introduction (a-, a+, s)."""

    neg: Obj
    pos: Obj
    elt: "Elt"


@dataclass(frozen=True)
class OProjNeg(Obj):
    obj: Obj


@dataclass(frozen=True)
class OProjPos(Obj):
    obj: Obj


@dataclass(frozen=True)
class OProjElt(Obj):
    # Grammar fidelity only: the classifier of pi_e is a Set, so the
    # checker accepts the element-layer EProjElt and rejects this form.
    obj: Obj


@dataclass(frozen=True)
class OPshLam(Obj):
    """Presheaf introduction; binds hint in body.

    positive=False: object of Psh- cat, body over (hint ; ambient var).
    positive=True: object of Psh+ cat, body over (ambient var ; hint).
    """

    positive: bool
    hint: str
    cat: Cat
    body: "Set_"


# --- sets ------------------------------------------------------------------


@dataclass(frozen=True)
class SHom(Set_):
    cat: Cat
    src: Obj
    tgt: Obj


@dataclass(frozen=True)
class STensor(Set_):
    """Tensor (coend); binds hint as left's covariant / right's contravariant var."""

    hint: str
    cat: Cat
    left: Set_
    right: Set_


@dataclass(frozen=True)
class SRHom(Set_):
    """Covariant hom dom |>(hint:cat) cod.

    dom is over (d+Xi ; hint), cod over (d-Xi ; hint).
    """

    hint: str
    cat: Cat
    dom: Set_
    cod: Set_


@dataclass(frozen=True)
class SLHom(Set_):
    """Contravariant hom cod <|(hint:cat) dom.

    dom is over (hint ; d-Xi), cod over (hint ; d+Xi).
    """

    hint: str
    cat: Cat
    cod: Set_
    dom: Set_


@dataclass(frozen=True)
class SOne(Set_):
    pass


@dataclass(frozen=True)
class SProd(Set_):
    left: Set_
    right: Set_


@dataclass(frozen=True)
class SApp(Set_):
    """Application of a profunctor-typed meta term to two objects."""

    fn: "MTm"
    src: Obj
    tgt: Obj


@dataclass(frozen=True)
class SMemNeg(Set_):
    """a in p  (p an object of a negative presheaf category)."""

    obj: Obj
    psh: Obj


@dataclass(frozen=True)
class SMemPos(Set_):
    """p ni b  (p an object of a positive presheaf category)."""

    psh: Obj
    obj: Obj


# --- elements --------------------------------------------------------------


@dataclass(frozen=True)
class Motive(Node):
    """A set binder over a pair of object variables of the same category."""

    aname: str
    bname: str
    cat: Cat
    body: Set_


@dataclass(frozen=True)
class EVar(Elt):
    name: str


@dataclass(frozen=True)
class ERefl(Elt):
    obj: Obj


@dataclass(frozen=True)
class EHomElim(Elt):
    """ind_hom(hint. cont; b1, scrut, b2) with an optional stored motive.

    The motive is a binder over two fresh object variables; it never
    mentions the ambient transformation context, so substitution leaves
    it untouched.  The checker fills it in when the surface term omits it
    and the endpoints are variables.
    """

    hint: str
    cont: Elt
    b1: Obj
    scrut: Elt
    b2: Obj
    motive: Optional[Motive] = None


@dataclass(frozen=True)
class ETensorPair(Elt):
    obj: Obj
    left: Elt
    right: Elt


@dataclass(frozen=True)
class ETensorElim(Elt):
    scrut: Elt
    xname: str
    bname: str
    yname: str
    cont: Elt


@dataclass(frozen=True)
class ERLam(Elt):
    xname: str
    aname: str
    body: Elt


@dataclass(frozen=True)
class ERApp(Elt):
    """fn |>[obj] arg: function context to the left of the argument's."""

    fn: Elt
    arg: Elt
    obj: Obj


@dataclass(frozen=True)
class ELLam(Elt):
    xname: str
    aname: str
    body: Elt


@dataclass(frozen=True)
class ELApp(Elt):
    """fn <|[obj] arg: argument context to the LEFT of the function's."""

    fn: Elt
    arg: Elt
    obj: Obj


@dataclass(frozen=True)
class EPair(Elt):
    left: Elt
    right: Elt


@dataclass(frozen=True)
class EFst(Elt):
    elt: Elt


@dataclass(frozen=True)
class ESnd(Elt):
    elt: Elt


@dataclass(frozen=True)
class EUnit(Elt):
    pass


@dataclass(frozen=True)
class EProjElt(Elt):
    obj: Obj


@dataclass(frozen=True)
class ENatInst(Elt):
    """M ^ b: instantiation of a natural element at an object."""

    fn: MTm
    obj: Obj


# --- meta types ------------------------------------------------------------


@dataclass(frozen=True)
class TPi(MTy):
    hint: str
    dom: MTy
    cod: MTy


@dataclass(frozen=True)
class TSigma(MTy):
    hint: str
    dom: MTy
    cod: MTy


@dataclass(frozen=True)
class TId(MTy):
    ty: MTy
    lhs: MTm
    rhs: MTm


@dataclass(frozen=True)
class TSmallCat(MTy):
    pass


@dataclass(frozen=True)
class TCat(MTy):
    pass


@dataclass(frozen=True)
class TFun(MTy):
    dom: Cat
    cod: Cat


@dataclass(frozen=True)
class TProf(MTy):
    dom: Cat
    cod: Cat


@dataclass(frozen=True)
class TForall(MTy):
    """Natural elements: forall hint:cat. body, body over the single variable."""

    hint: str
    cat: Cat
    body: Set_


# --- meta terms ------------------------------------------------------------


@dataclass(frozen=True)
class MVar(MTm):
    name: str


@dataclass(frozen=True)
class MLam(MTm):
    hint: str
    body: MTm


@dataclass(frozen=True)
class MApp(MTm):
    fn: MTm
    arg: MTm


@dataclass(frozen=True)
class MPair(MTm):
    left: MTm
    right: MTm


@dataclass(frozen=True)
class MFst(MTm):
    term: MTm


@dataclass(frozen=True)
class MSnd(MTm):
    term: MTm


@dataclass(frozen=True)
class MRefl(MTm):
    term: MTm


@dataclass(frozen=True)
class MJ(MTm):
    """J eliminator: motive binds (yname : A, pname : Id A a y)."""

    yname: str
    pname: str
    motive: MTy
    base: MTm
    scrut: MTm


@dataclass(frozen=True)
class MQuote(MTm):
    cat: Cat


@dataclass(frozen=True)
class MFunLam(MTm):
    hint: str
    cat: Cat
    body: Obj


@dataclass(frozen=True)
class MProfLam(MTm):
    aname: str
    acat: Cat
    bname: str
    bcat: Cat
    body: Set_


@dataclass(frozen=True)
class MNatLam(MTm):
    hint: str
    cat: Optional[Cat]
    body: Elt


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class SetCtx:
    pass


@dataclass(frozen=True)
class SingleCtx(SetCtx):
    name: str
    cat: Cat

    @property
    def d_minus(self):
        return (self.name, self.cat)

    @property
    def d_plus(self):
        return (self.name, self.cat)


@dataclass(frozen=True)
class DoubleCtx(SetCtx):
    nname: str
    ncat: Cat
    pname: str
    pcat: Cat

    @property
    def d_minus(self):
        return (self.nname, self.ncat)

    @property
    def d_plus(self):
        return (self.pname, self.pcat)


@dataclass(frozen=True)
class TransCtx:
    """objs has length n+1, elts length n; entry i of elts sits between
    object variables i and i+1."""

    objs: Tuple[Tuple[str, Cat], ...]
    elts: Tuple[Tuple[str, Set_], ...] = ()

    def __post_init__(self):
        if len(self.objs) != len(self.elts) + 1:
            raise ValueError("malformed transformation context")
        names = [n for n, _ in self.objs] + [n for n, _ in self.elts]
        if len(set(names)) != len(names):
            raise DuplicateName("repeated variable name in transformation context")

    def __len__(self) -> int:
        return len(self.elts)

    @property
    def obj_names(self):
        return [n for n, _ in self.objs]

    @property
    def elt_names(self):
        return [n for n, _ in self.elts]

    def slice(self, i: int, j: int) -> "TransCtx":
        """Sub-context from object variable i to object variable j."""
        if not (0 <= i <= j <= len(self.elts)):
            raise ContextIndexError(f"bad slice {i}..{j}")
        return TransCtx(self.objs[i:j + 1], self.elts[i:j])

    def elt_index(self, name: str) -> int:
        for k, (n, _) in enumerate(self.elts):
            if n == name:
                return k
        raise ScopeError(f"element variable {name} not in context")


class ContextIndexError(Exception):
    pass


def d_minus(phi: TransCtx) -> SingleCtx:
    name, cat = phi.objs[0]
    return SingleCtx(name, cat)


def d_plus(phi: TransCtx) -> SingleCtx:
    name, cat = phi.objs[-1]
    return SingleCtx(name, cat)


def underline(phi: TransCtx) -> SetCtx:
    if len(phi.elts) == 0:
        name, cat = phi.objs[0]
        return SingleCtx(name, cat)
    (nn, nc) = phi.objs[0]
    (pn, pc) = phi.objs[-1]
    return DoubleCtx(nn, nc, pn, pc)


def hcomp_ctx(phi: TransCtx, psi: TransCtx) -> TransCtx:
    pn, pc = phi.objs[-1]
    qn, qc = psi.objs[0]
    if pn != qn or not alpha_eq(pc, qc):
        raise BoundaryMismatch(
            f"cannot append contexts: pivot {pn} does not match {qn}")
    return TransCtx(phi.objs + psi.objs[1:], phi.elts + psi.elts)


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class DBaseCat:
    name: str
    small: bool = True
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DConst:
    name: str
    ty: MTy
    kind: str = "element"  # functor | profunctor | element
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DDef:
    name: str
    ty: MTy
    term: MTm
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DAssert:
    name: str
    phi: TransCtx
    lhs: Elt
    rhs: Elt
    at: Set_
    syntactic_only: bool = False
    span: Optional[Span] = field(default=None, compare=False, repr=False)


class Signature:
    """Ordered list of declarations with unique names."""

    def __init__(self, decls=()):
        self.decls = []
        self._by_name = {}
        for d in decls:
            self.add(d)

    def add(self, decl):
        name = decl.name
        if name in self._by_name:
            raise DuplicateName(f"duplicate declaration of {name}", span=decl.span)
        self.decls.append(decl)
        self._by_name[name] = decl
        return decl

    def lookup(self, name):
        return self._by_name.get(name)

    def base_cats(self):
        return [d for d in self.decls if isinstance(d, DBaseCat)]

    def copy(self) -> "Signature":
        sig = Signature()
        sig.decls = list(self.decls)
        sig._by_name = dict(self._by_name)
        return sig


# ---------------------------------------------------------------------------
# smallness


def is_small(cat: Cat, sig: Signature, gamma=None) -> bool:
    if isinstance(cat, CBase):
        d = sig.lookup(cat.name)
        return isinstance(d, DBaseCat) and d.small
    if isinstance(cat, CUnit):
        return True
    if isinstance(cat, CProd):
        return is_small(cat.left, sig, gamma) and is_small(cat.right, sig, gamma)
    if isinstance(cat, CGraph):
        return is_small(cat.acat, sig, gamma) and is_small(cat.bcat, sig, gamma)
    if isinstance(cat, (CPshNeg, CPshPos)):
        return False
    if isinstance(cat, CUnquote):
        term = cat.term
        if isinstance(term, MQuote):
            return is_small(term.cat, sig, gamma)
        if isinstance(term, MVar):
            if gamma is not None and isinstance(gamma.get(term.name),
                                                TSmallCat):
                return True
            d = sig.lookup(term.name)
            ty = getattr(d, "ty", None)
            if isinstance(ty, TSmallCat):
                return True
            if isinstance(d, DDef) and isinstance(d.term, MQuote):
                return is_small(d.term.cat, sig, gamma)
        return False
    raise TypeError(f"not a category expression: {cat!r}")


# ---------------------------------------------------------------------------
# alpha equivalence

# names of binder-introducing fields per node class: for each class a list of
# (bound-name-field-tuple, body-fields-in-scope).
_BINDER_SPEC = {
    CGraph: [(("aname", "bname"), ("body",))],
    OPshLam: [(("hint",), ("body",))],
    STensor: [(("hint",), ("left", "right"))],
    SRHom: [(("hint",), ("dom", "cod"))],
    SLHom: [(("hint",), ("cod", "dom"))],
    Motive: [(("aname", "bname"), ("body",))],
    EHomElim: [(("hint",), ("cont",))],
    ETensorElim: [(("xname", "bname", "yname"), ("cont",))],
    ERLam: [(("xname", "aname"), ("body",))],
    ELLam: [(("xname", "aname"), ("body",))],
    TPi: [(("hint",), ("cod",))],
    TSigma: [(("hint",), ("cod",))],
    TForall: [(("hint",), ("body",))],
    MLam: [(("hint",), ("body",))],
    MJ: [(("yname", "pname"), ("motive",))],
    MFunLam: [(("hint",), ("body",))],
    MProfLam: [(("aname", "bname"), ("body",))],
    MNatLam: [(("hint",), ("body",))],
}

_VAR_CLASSES = (OVar, EVar, MVar)


def _binder_info(cls):
    spec = _BINDER_SPEC.get(cls, [])
    bound_fields = set()
    scoped = {}
    for names, bodies in spec:
        for nf in names:
            bound_fields.add(nf)
        for bf in bodies:
            scoped[bf] = names
    return bound_fields, scoped


def alpha_eq(a, b, _env=None) -> bool:
    """Alpha equivalence across any syntactic class (free names are rigid)."""
    if _env is None:
        _env = ({}, {})
    lmap, rmap = _env
    if a is b and not lmap:
        return True
    if type(a) is not type(b):
        return False
    if isinstance(a, _VAR_CLASSES):
        if a.name in lmap:
            return lmap[a.name] == b.name and rmap.get(b.name) == a.name
        return a.name == b.name and b.name not in rmap
    if isinstance(a, (str, bool, int)) or a is None:
        return a == b
    if not isinstance(a, Node):
        return a == b
    bound_fields, scoped = _binder_info(type(a))
    for f in fields(a):
        if not f.compare:
            continue
        name = f.name
        if name in bound_fields:
            continue
        va, vb = getattr(a, name), getattr(b, name)
        if name in scoped:
            lm = dict(lmap)
            rm = dict(rmap)
            for nf in scoped[name]:
                na, nb = getattr(a, nf), getattr(b, nf)
                lm[na] = nb
                rm[nb] = na
            if (va is None) != (vb is None):
                return False
            if va is not None and not alpha_eq(va, vb, (lm, rm)):
                return False
        else:
            if isinstance(va, Node) or isinstance(vb, Node):
                if (va is None) != (vb is None):
                    return False
                if va is not None and not alpha_eq(va, vb, (lmap, rmap)):
                    return False
            elif va != vb:
                return False
    return True


# ---------------------------------------------------------------------------
# free variables


def ordered_fv_elt(e: Elt, bound=frozenset()):
    """Free element variables of e, in context order, with multiplicity.

    The traversal order matches the horizontal composition order of the
    typing rules: right-hom application lists the function part first,
    left-hom application lists the argument first, tensor elimination
    interleaves the scrutinee between the continuation's uses split at
    its bound variables.
    """
    if isinstance(e, EVar):
        return [] if e.name in bound else [e.name]
    if isinstance(e, (ERefl, EUnit, ENatInst, EProjElt)):
        return []
    if isinstance(e, EHomElim):
        return ordered_fv_elt(e.scrut, bound)
    if isinstance(e, ERApp):
        return ordered_fv_elt(e.fn, bound) + ordered_fv_elt(e.arg, bound)
    if isinstance(e, ELApp):
        return ordered_fv_elt(e.arg, bound) + ordered_fv_elt(e.fn, bound)
    if isinstance(e, ETensorPair):
        return ordered_fv_elt(e.left, bound) + ordered_fv_elt(e.right, bound)
    if isinstance(e, ETensorElim):
        inner = ordered_fv_elt(e.cont, bound)
        try:
            i = inner.index(e.xname)
            j = inner.index(e.yname)
        except ValueError:
            # the continuation drops a bound variable; report its own uses
            pre = [n for n in inner if n not in (e.xname, e.yname)]
            return pre[:0] + ordered_fv_elt(e.scrut, bound) + pre
        pre, post = inner[:i], inner[j + 1:]
        return pre + ordered_fv_elt(e.scrut, bound) + post
    if isinstance(e, ERLam):
        inner = ordered_fv_elt(e.body, bound | {e.xname})
        return inner
    if isinstance(e, ELLam):
        return ordered_fv_elt(e.body, bound | {e.xname})
    if isinstance(e, EPair):
        return ordered_fv_elt(e.left, bound)
    if isinstance(e, (EFst, ESnd)):
        return ordered_fv_elt(e.elt, bound)
    raise TypeError(f"not an element: {e!r}")


def split_slices(phi: TransCtx, fv_lists, span=None):
    """Slice boundaries for a multi-part elimination over phi.

    fv_lists holds, in composition order, the ordered free element
    variables of each part.  Since every part occupies a contiguous
    sub-context and consecutive parts share an object variable, the
    concatenation must reproduce phi's element variables exactly and in
    order; the returned (i, j) pairs index object variables, so part k is
    phi.slice(i_k, j_k).
    """
    names = phi.elt_names
    concat = [n for lst in fv_lists for n in lst]
    if concat != names:
        pos = {n: k for k, n in enumerate(names)}
        unknown = [n for n in concat if n not in pos]
        if unknown:
            raise ScopeError(
                f"element variable {unknown[0]} not in context", span=span, phi=phi)
        counts = {}
        for n in concat:
            counts[n] = counts.get(n, 0) + 1
        dup = [n for n, k in counts.items() if k > 1]
        if dup:
            raise LinearityError(
                f"element variable {dup[0]} is used more than once",
                span=span, phi=phi)
        missing = [n for n in names if n not in counts]
        if missing:
            raise LinearityError(
                f"element variable {missing[0]} is not used",
                span=span, phi=phi)
        raise ContextSplitError(
            "element variables are used out of context order: "
            f"expected {', '.join(names)}; found {', '.join(concat)}",
            span=span, phi=phi)
    slices = []
    cursor = 0
    for lst in fv_lists:
        slices.append((cursor, cursor + len(lst)))
        cursor += len(lst)
    return slices


def free_names(node, _bound=frozenset()):
    """All free variable names (any sort) occurring in a node."""
    out = set()
    if node is None or isinstance(node, (str, bool, int)):
        return out
    if isinstance(node, _VAR_CLASSES):
        if node.name not in _bound:
            out.add(node.name)
        return out
    if not isinstance(node, Node):
        return out
    bound_fields, scoped = _binder_info(type(node))
    for f in fields(node):
        if not f.compare or f.name in bound_fields:
            continue
        v = getattr(node, f.name)
        if f.name in scoped:
            extra = frozenset(getattr(node, nf) for nf in scoped[f.name])
            out |= free_names(v, _bound | extra)
        else:
            out |= free_names(v, _bound)
    return out
