"""Substitution calculi: object substitutions, transformation
substitutions and meta-term substitutions, with their actions on every
syntactic class.

Because a well-formed term only uses a context variable in the slots its
typing rule licenses, the clause-by-clause actions from the boundary
routing (d-/d+/underline) coincide with simultaneous named replacement
of the substitution's entries.  The engine below performs that
replacement capture-avoidingly (every binder is freshened on the way
down).  The routing operations themselves (horizontal composition,
boundary projections, inversion) are kept as first-class operations:
the checker and the law tests use them directly.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Dict, Tuple

from .errors import BoundaryMismatch, DecompositionFailure
from .syntax import (
    CGraph, EHomElim, ELLam, ERLam, ETensorElim, EVar, MFunLam, MJ, MLam,
    MNatLam, MProfLam, Motive, MVar, Node, OPshLam, OVar, SLHom, SRHom,
    STensor, SingleCtx, TForall, TPi, TSigma, TransCtx, alpha_eq, fresh,
)

# sort of each bound-name field, per binder class
_BINDER_SORTS = {
    CGraph: {"aname": "obj", "bname": "obj"},
    OPshLam: {"hint": "obj"},
    STensor: {"hint": "obj"},
    SRHom: {"hint": "obj"},
    SLHom: {"hint": "obj"},
    Motive: {"aname": "obj", "bname": "obj"},
    EHomElim: {"hint": "obj"},
    ETensorElim: {"xname": "elt", "bname": "obj", "yname": "elt"},
    ERLam: {"xname": "elt", "aname": "obj"},
    ELLam: {"xname": "elt", "aname": "obj"},
    TPi: {"hint": "meta"},
    TSigma: {"hint": "meta"},
    TForall: {"hint": "obj"},
    MLam: {"hint": "meta"},
    MJ: {"yname": "meta", "pname": "meta"},
    MFunLam: {"hint": "obj"},
    MProfLam: {"aname": "obj", "bname": "obj"},
    MNatLam: {"hint": "obj"},
}

# which fields are in scope of the binders, per binder class
_SCOPED_FIELDS = {
    CGraph: ("body",),
    OPshLam: ("body",),
    STensor: ("left", "right"),
    SRHom: ("dom", "cod"),
    SLHom: ("cod", "dom"),
    Motive: ("body",),
    EHomElim: ("cont",),
    ETensorElim: ("cont",),
    ERLam: ("body",),
    ELLam: ("body",),
    TPi: ("cod",),
    TSigma: ("cod",),
    TForall: ("body",),
    MLam: ("body",),
    MJ: ("motive",),
    MFunLam: ("body",),
    MProfLam: ("body",),
    MNatLam: ("body",),
}

_SORT_VAR = {"obj": OVar, "elt": EVar, "meta": MVar}


def substitute(node, omap: Dict[str, object] = None,
               emap: Dict[str, object] = None,
               mmap: Dict[str, object] = None):
    """Simultaneous capture-avoiding substitution across any class."""
    omap = omap or {}
    emap = emap or {}
    mmap = mmap or {}
    if not (omap or emap or mmap):
        return node
    return _subst(node, omap, emap, mmap)


def freshen(node):
    """Alpha-rename every binder in the node to a globally fresh name."""
    return _subst(node, {}, {}, {})


def _subst(node, omap, emap, mmap):
    if node is None or isinstance(node, (str, bool, int)):
        return node
    if isinstance(node, OVar):
        return omap.get(node.name, node)
    if isinstance(node, EVar):
        return emap.get(node.name, node)
    if isinstance(node, MVar):
        return mmap.get(node.name, node)
    if not isinstance(node, Node):
        return node
    cls = type(node)
    sorts = _BINDER_SORTS.get(cls, {})
    scoped = _SCOPED_FIELDS.get(cls, ())
    kwargs = {}
    inner = None
    renames = {}
    if sorts:
        inner = (dict(omap), dict(emap), dict(mmap))
        for bf, sort in sorts.items():
            old = getattr(node, bf)
            new = fresh(old)
            renames[bf] = new
            which = {"obj": 0, "elt": 1, "meta": 2}[sort]
            inner[which][old] = _SORT_VAR[sort](new)
    for f in fields(node):
        name = f.name
        if name == "span":
            continue
        v = getattr(node, name)
        if name in renames:
            kwargs[name] = renames[name]
        elif name in scoped:
            io, ie, im = inner
            kwargs[name] = _subst(v, io, ie, im)
        else:
            kwargs[name] = _subst(v, omap, emap, mmap)
    return cls(**kwargs, span=node.span)


# ---------------------------------------------------------------------------
# object substitutions (xi)


@dataclass(frozen=True)
class OSubstSingle:
    name: str
    obj: object

    @property
    def d_minus(self):
        return (self.name, self.obj)

    d_plus = d_minus

    def as_map(self):
        return {self.name: self.obj}


@dataclass(frozen=True)
class OSubstDouble:
    nname: str
    nobj: object
    pname: str
    pobj: object

    @property
    def d_minus(self):
        return (self.nname, self.nobj)

    @property
    def d_plus(self):
        return (self.pname, self.pobj)

    def as_map(self):
        return {self.nname: self.nobj, self.pname: self.pobj}


def subst_obj(b, xi):
    """Action of an object substitution on an object."""
    return substitute(b, omap=xi.as_map())


def subst_set(P, xi):
    """Action of an object substitution on a set (profunctor restriction)."""
    return substitute(P, omap=xi.as_map())


# ---------------------------------------------------------------------------
# transformation substitutions (phi)


@dataclass(frozen=True)
class TransSubst:
    """Aligned with a domain TransCtx: objs[i] instantiates domain object
    variable i, elts[k] the domain element variable k.  Entries are
    (domain-name, term) pairs."""

    objs: Tuple[Tuple[str, object], ...]
    elts: Tuple[Tuple[str, object], ...] = ()

    def __post_init__(self):
        if len(self.objs) != len(self.elts) + 1:
            raise ValueError("malformed transformation substitution")

    def __len__(self):
        return len(self.elts)

    @property
    def d_minus(self):
        return self.objs[0]

    @property
    def d_plus(self):
        return self.objs[-1]

    def underline(self):
        if not self.elts:
            name, obj = self.objs[0]
            return OSubstSingle(name, obj)
        (nn, no) = self.objs[0]
        (pn, po) = self.objs[-1]
        return OSubstDouble(nn, no, pn, po)

    def maps(self):
        omap = {n: o for n, o in self.objs}
        emap = {n: e for n, e in self.elts}
        return omap, emap


def subst_elt(s, phi: TransSubst):
    """Action of a transformation substitution on an element."""
    omap, emap = phi.maps()
    return substitute(s, omap=omap, emap=emap)


def d_minus_subst(phi: TransSubst) -> OSubstSingle:
    name, obj = phi.objs[0]
    return OSubstSingle(name, obj)


def d_plus_subst(phi: TransSubst) -> OSubstSingle:
    name, obj = phi.objs[-1]
    return OSubstSingle(name, obj)


def underline_subst(phi: TransSubst):
    return phi.underline()


def id_subst(phi: TransCtx) -> TransSubst:
    return TransSubst(
        tuple((n, OVar(n)) for n, _ in phi.objs),
        tuple((n, EVar(n)) for n, _ in phi.elts),
    )


def id_osubst(xi):
    if isinstance(xi, SingleCtx):
        return OSubstSingle(xi.name, OVar(xi.name))
    return OSubstDouble(xi.nname, OVar(xi.nname), xi.pname, OVar(xi.pname))


def hcomp_subst(phi: TransSubst, psi: TransSubst) -> TransSubst:
    (pn, po) = phi.objs[-1]
    (qn, qo) = psi.objs[0]
    if pn != qn or not alpha_eq(po, qo):
        raise BoundaryMismatch(
            f"cannot append substitutions: pivot {pn} does not match {qn}")
    return TransSubst(phi.objs + psi.objs[1:], phi.elts + psi.elts)


def invert_decompose(phi: TransSubst, psi1: TransCtx, psi2: TransCtx):
    """Unique split of phi :: psi1 ⌄ psi2 into phi1 :: psi1 and phi2 :: psi2."""
    n1, n2 = len(psi1.elts), len(psi2.elts)
    if len(phi.elts) != n1 + n2:
        raise DecompositionFailure(
            f"substitution of length {len(phi.elts)} cannot target contexts "
            f"of lengths {n1} and {n2}")
    names = [n for n, _ in phi.objs]
    expected = psi1.obj_names + psi2.obj_names[1:]
    if names != expected:
        raise DecompositionFailure("substitution entries do not match the contexts")
    phi1 = TransSubst(phi.objs[:n1 + 1], phi.elts[:n1])
    phi2 = TransSubst(phi.objs[n1:], phi.elts[n1:])
    return phi1, phi2


def vcomp_subst(phi: TransSubst, psi: TransSubst) -> TransSubst:
    """phi[psi]: postcompose phi with psi (psi targets phi's source)."""
    omap, emap = psi.maps()
    return TransSubst(
        tuple((n, substitute(o, omap=omap, emap=emap)) for n, o in phi.objs),
        tuple((n, substitute(e, omap=omap, emap=emap)) for n, e in phi.elts),
    )


def vcomp_osubst(xi, zeta):
    m = zeta.as_map()
    if isinstance(xi, OSubstSingle):
        return OSubstSingle(xi.name, substitute(xi.obj, omap=m))
    return OSubstDouble(xi.nname, substitute(xi.nobj, omap=m),
                        xi.pname, substitute(xi.pobj, omap=m))


# ---------------------------------------------------------------------------
# meta-term substitutions (gamma)


def subst_term(node, gamma: Dict[str, object]):
    """Action of a meta-term substitution on any class."""
    return substitute(node, mmap=dict(gamma))


def subst_ctx(phi: TransCtx, omap=None, emap=None, mmap=None) -> TransCtx:
    """Apply a substitution to the classifiers stored in a context."""
    return TransCtx(
        tuple((n, substitute(c, omap, emap, mmap)) for n, c in phi.objs),
        tuple((n, substitute(r, omap, emap, mmap)) for n, r in phi.elts),
    )
