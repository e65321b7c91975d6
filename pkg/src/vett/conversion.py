"""Definitional equality: normalization and conversion checking.

Normalization is beta reduction (including definition unfolding at the
meta layer) followed by type-directed eta expansion at negative types,
so normal forms are eta-long.  Equality of categories, objects, sets and
meta terms is decided by comparing normal forms up to alpha.

Element equality is only semi-decided: after normalizing both sides the
checker repeatedly transforms the shared transformation context using
the two eta laws that act on contexts — a variable of tensor type is
replaced by its components, and a hom-typed variable between two object
variables is contracted to a single object variable with the element
variable becoming an identity.  Each transformation strictly shrinks the
total size of the context's classifiers, so the loop terminates.  If the
terms still differ, the answer is NotEqual when no eliminator is stuck
on a neutral scrutinee and Unknown otherwise.
"""

from __future__ import annotations

from typing import Optional

from .errors import FuelExhausted
from .syntax import (
    CBase, CGraph, CProd, CPshNeg, CPshPos, CUnit, CUnquote, DConst, DDef,
    DoubleCtx, EFst, EHomElim, ELApp, ELLam, ENatInst, EPair, EProjElt,
    ERApp, ERefl, ERLam, ESnd, ETensorElim, ETensorPair, EUnit, EVar,
    MApp, MFst, MFunLam, MJ, MLam, MNatLam, MPair, MProfLam, MQuote,
    MRefl, MSnd, MVar, Motive, OApp, OPair, OProj1, OProj2, OProjElt,
    OProjNeg, OProjPos, OPshLam, OTriple, OUnit, OVar, SApp, SHom, SLHom,
    SMemNeg, SMemPos, SOne, SProd, SRHom, STensor, SetCtx, SingleCtx,
    TCat, TForall, TFun, TId, TPi, TProf, TSigma, TSmallCat, TransCtx,
    alpha_eq, d_minus, d_plus, fresh, hint_of, is_small, ordered_fv_elt,
    split_slices, underline,
)
from .subst import substitute


class _CannotInfer(Exception):
    """Internal: a neutral spine's type could not be recovered."""


EQUAL = "equal"
NOT_EQUAL = "not_equal"
UNKNOWN = "unknown"


def _o(node, name, obj):
    return substitute(node, omap={name: obj})


def _m(node, name, term):
    return substitute(node, mmap={name: term})


class Conv:
    """Conversion engine over a fixed signature."""

    def __init__(self, sig, fuel: int = 256):
        self.sig = sig
        self.fuel = fuel
        self._budget: Optional[int] = None
        self._def_cache = {}
        self._incomplete = False

    # -- fuel -----------------------------------------------------------

    def _entry(self):
        if self._budget is None:
            self._budget = self.fuel * 64
            return True
        return False

    def _tick(self):
        if self._budget is not None:
            self._budget -= 1
            if self._budget <= 0:
                raise FuelExhausted("conversion fuel exhausted")

    def _exit(self, top):
        if top:
            self._budget = None

    # -- signature lookups ------------------------------------------------

    def _lookup_type(self, gamma, name):
        if name in gamma:
            return gamma[name]
        d = self.sig.lookup(name)
        if isinstance(d, (DConst, DDef)):
            return d.ty
        return None

    # ------------------------------------------------------------------
    # beta / delta reduction (untyped, per class)

    def red_meta(self, t):
        if isinstance(t, MVar):
            d = self.sig.lookup(t.name)
            if isinstance(d, DDef):
                if t.name not in self._def_cache:
                    self._def_cache[t.name] = self.red_meta(d.term)
                return self._def_cache[t.name]
            return t
        if isinstance(t, MApp):
            f = self.red_meta(t.fn)
            a = self.red_meta(t.arg)
            if isinstance(f, MLam):
                self._tick()
                return self.red_meta(_m(f.body, f.hint, a))
            return MApp(f, a, span=t.span)
        if isinstance(t, MFst):
            u = self.red_meta(t.term)
            if isinstance(u, MPair):
                self._tick()
                return u.left
            return MFst(u, span=t.span)
        if isinstance(t, MSnd):
            u = self.red_meta(t.term)
            if isinstance(u, MPair):
                self._tick()
                return u.right
            return MSnd(u, span=t.span)
        if isinstance(t, MJ):
            s = self.red_meta(t.scrut)
            if isinstance(s, MRefl):
                self._tick()
                return self.red_meta(t.base)
            return MJ(t.yname, t.pname, t.motive, self.red_meta(t.base), s,
                      span=t.span)
        if isinstance(t, MPair):
            return MPair(self.red_meta(t.left), self.red_meta(t.right),
                         span=t.span)
        if isinstance(t, MRefl):
            return MRefl(self.red_meta(t.term), span=t.span)
        if isinstance(t, MLam):
            return MLam(t.hint, self.red_meta(t.body), span=t.span)
        if isinstance(t, MQuote):
            return MQuote(self.red_cat(t.cat), span=t.span)
        if isinstance(t, MFunLam):
            return MFunLam(t.hint, self.red_cat(t.cat), self.red_obj(t.body),
                           span=t.span)
        if isinstance(t, MProfLam):
            return MProfLam(t.aname, self.red_cat(t.acat), t.bname,
                            self.red_cat(t.bcat), self.red_set(t.body),
                            span=t.span)
        if isinstance(t, MNatLam):
            cat = self.red_cat(t.cat) if t.cat is not None else None
            return MNatLam(t.hint, cat, self.red_elt(t.body), span=t.span)
        return t

    def red_cat(self, c):
        if isinstance(c, CUnquote):
            m = self.red_meta(c.term)
            if isinstance(m, MQuote):
                self._tick()
                return self.red_cat(m.cat)
            return CUnquote(m, span=c.span)
        if isinstance(c, CProd):
            return CProd(self.red_cat(c.left), self.red_cat(c.right),
                         span=c.span)
        if isinstance(c, CGraph):
            return CGraph(c.aname, self.red_cat(c.acat), c.bname,
                          self.red_cat(c.bcat), self.red_set(c.body),
                          span=c.span)
        if isinstance(c, CPshNeg):
            return CPshNeg(self.red_cat(c.cat), span=c.span)
        if isinstance(c, CPshPos):
            return CPshPos(self.red_cat(c.cat), span=c.span)
        return c

    def red_obj(self, a):
        if isinstance(a, OApp):
            f = self.red_meta(a.fn)
            b = self.red_obj(a.arg)
            if isinstance(f, MFunLam):
                self._tick()
                return self.red_obj(_o(f.body, f.hint, b))
            return OApp(f, b, span=a.span)
        if isinstance(a, OProj1):
            b = self.red_obj(a.obj)
            if isinstance(b, OPair):
                self._tick()
                return b.left
            return OProj1(b, span=a.span)
        if isinstance(a, OProj2):
            b = self.red_obj(a.obj)
            if isinstance(b, OPair):
                self._tick()
                return b.right
            return OProj2(b, span=a.span)
        if isinstance(a, OProjNeg):
            b = self.red_obj(a.obj)
            if isinstance(b, OTriple):
                self._tick()
                return b.neg
            return OProjNeg(b, span=a.span)
        if isinstance(a, OProjPos):
            b = self.red_obj(a.obj)
            if isinstance(b, OTriple):
                self._tick()
                return b.pos
            return OProjPos(b, span=a.span)
        if isinstance(a, OProjElt):
            return OProjElt(self.red_obj(a.obj), span=a.span)
        if isinstance(a, OPair):
            return OPair(self.red_obj(a.left), self.red_obj(a.right),
                         span=a.span)
        if isinstance(a, OTriple):
            return OTriple(self.red_obj(a.neg), self.red_obj(a.pos),
                           self.red_elt(a.elt), span=a.span)
        if isinstance(a, OPshLam):
            return OPshLam(a.positive, a.hint, self.red_cat(a.cat),
                           self.red_set(a.body), span=a.span)
        return a

    def red_set(self, P):
        if isinstance(P, SHom):
            return SHom(self.red_cat(P.cat), self.red_obj(P.src),
                        self.red_obj(P.tgt), span=P.span)
        if isinstance(P, STensor):
            return STensor(P.hint, self.red_cat(P.cat), self.red_set(P.left),
                           self.red_set(P.right), span=P.span)
        if isinstance(P, SRHom):
            return SRHom(P.hint, self.red_cat(P.cat), self.red_set(P.dom),
                         self.red_set(P.cod), span=P.span)
        if isinstance(P, SLHom):
            return SLHom(P.hint, self.red_cat(P.cat), self.red_set(P.cod),
                         self.red_set(P.dom), span=P.span)
        if isinstance(P, SProd):
            return SProd(self.red_set(P.left), self.red_set(P.right),
                         span=P.span)
        if isinstance(P, SApp):
            f = self.red_meta(P.fn)
            if isinstance(f, MProfLam):
                self._tick()
                return self.red_set(substitute(
                    f.body, omap={f.aname: self.red_obj(P.src),
                                  f.bname: self.red_obj(P.tgt)}))
            return SApp(f, self.red_obj(P.src), self.red_obj(P.tgt),
                        span=P.span)
        if isinstance(P, SMemNeg):
            p = self.red_obj(P.psh)
            if isinstance(p, OPshLam) and not p.positive:
                self._tick()
                return self.red_set(_o(p.body, p.hint, self.red_obj(P.obj)))
            return SMemNeg(self.red_obj(P.obj), p, span=P.span)
        if isinstance(P, SMemPos):
            p = self.red_obj(P.psh)
            if isinstance(p, OPshLam) and p.positive:
                self._tick()
                return self.red_set(_o(p.body, p.hint, self.red_obj(P.obj)))
            return SMemPos(p, self.red_obj(P.obj), span=P.span)
        return P

    def red_elt(self, e):
        if isinstance(e, ERApp):
            f = self.red_elt(e.fn)
            if isinstance(f, ERLam):
                self._tick()
                return self.red_elt(substitute(
                    f.body, omap={f.aname: self.red_obj(e.obj)},
                    emap={f.xname: self.red_elt(e.arg)}))
            return ERApp(f, self.red_elt(e.arg), self.red_obj(e.obj),
                         span=e.span)
        if isinstance(e, ELApp):
            f = self.red_elt(e.fn)
            if isinstance(f, ELLam):
                self._tick()
                return self.red_elt(substitute(
                    f.body, omap={f.aname: self.red_obj(e.obj)},
                    emap={f.xname: self.red_elt(e.arg)}))
            return ELApp(f, self.red_elt(e.arg), self.red_obj(e.obj),
                         span=e.span)
        if isinstance(e, EFst):
            u = self.red_elt(e.elt)
            if isinstance(u, EPair):
                self._tick()
                return u.left
            return EFst(u, span=e.span)
        if isinstance(e, ESnd):
            u = self.red_elt(e.elt)
            if isinstance(u, EPair):
                self._tick()
                return u.right
            return ESnd(u, span=e.span)
        if isinstance(e, ETensorElim):
            s = self.red_elt(e.scrut)
            if isinstance(s, ETensorPair):
                self._tick()
                return self.red_elt(substitute(
                    e.cont, omap={e.bname: s.obj},
                    emap={e.xname: s.left, e.yname: s.right}))
            return ETensorElim(s, e.xname, e.bname, e.yname,
                               self.red_elt(e.cont), span=e.span)
        if isinstance(e, EHomElim):
            s = self.red_elt(e.scrut)
            if isinstance(s, ERefl):
                self._tick()
                return self.red_elt(_o(e.cont, e.hint, s.obj))
            motive = e.motive
            if motive is not None:
                motive = Motive(motive.aname, motive.bname,
                                self.red_cat(motive.cat),
                                self.red_set(motive.body))
            return EHomElim(e.hint, self.red_elt(e.cont),
                            self.red_obj(e.b1), s, self.red_obj(e.b2),
                            motive, span=e.span)
        if isinstance(e, ENatInst):
            f = self.red_meta(e.fn)
            if isinstance(f, MNatLam):
                self._tick()
                return self.red_elt(_o(f.body, f.hint, self.red_obj(e.obj)))
            return ENatInst(f, self.red_obj(e.obj), span=e.span)
        if isinstance(e, EProjElt):
            b = self.red_obj(e.obj)
            if isinstance(b, OTriple):
                self._tick()
                return self.red_elt(b.elt)
            return EProjElt(b, span=e.span)
        if isinstance(e, ERefl):
            return ERefl(self.red_obj(e.obj), span=e.span)
        if isinstance(e, ETensorPair):
            return ETensorPair(self.red_obj(e.obj), self.red_elt(e.left),
                               self.red_elt(e.right), span=e.span)
        if isinstance(e, ERLam):
            return ERLam(e.xname, e.aname, self.red_elt(e.body), span=e.span)
        if isinstance(e, ELLam):
            return ELLam(e.xname, e.aname, self.red_elt(e.body), span=e.span)
        if isinstance(e, EPair):
            return EPair(self.red_elt(e.left), self.red_elt(e.right),
                         span=e.span)
        return e

    # ------------------------------------------------------------------
    # normalization (beta + eta-long), type directed

    def norm_cat(self, gamma, c):
        top = self._entry()
        try:
            return self._ncat(gamma, self.red_cat(c))
        finally:
            self._exit(top)

    def _ncat(self, gamma, c):
        if isinstance(c, CProd):
            return CProd(self._ncat(gamma, c.left), self._ncat(gamma, c.right))
        if isinstance(c, CGraph):
            a, b = fresh(c.aname), fresh(c.bname)
            acat = self._ncat(gamma, c.acat)
            bcat = self._ncat(gamma, c.bcat)
            body = substitute(c.body, omap={c.aname: OVar(a), c.bname: OVar(b)})
            return CGraph(a, acat, b, bcat,
                          self._nset(gamma, DoubleCtx(a, acat, b, bcat), body))
        if isinstance(c, CPshNeg):
            return CPshNeg(self._ncat(gamma, c.cat))
        if isinstance(c, CPshPos):
            return CPshPos(self._ncat(gamma, c.cat))
        if isinstance(c, CUnquote):
            m = self.red_meta(c.term)
            if isinstance(m, MQuote):
                return self._ncat(gamma, self.red_cat(m.cat))
            m2, _ = self._eta_meta_neutral(gamma, m)
            return CUnquote(m2)
        return c

    def norm_mty(self, gamma, A):
        top = self._entry()
        try:
            return self._nmty(gamma, A)
        finally:
            self._exit(top)

    def _nmty(self, gamma, A):
        if isinstance(A, TPi):
            x = fresh(A.hint)
            dom = self._nmty(gamma, A.dom)
            cod = _m(A.cod, A.hint, MVar(x))
            return TPi(x, dom, self._nmty({**gamma, x: dom}, cod))
        if isinstance(A, TSigma):
            x = fresh(A.hint)
            dom = self._nmty(gamma, A.dom)
            cod = _m(A.cod, A.hint, MVar(x))
            return TSigma(x, dom, self._nmty({**gamma, x: dom}, cod))
        if isinstance(A, TId):
            ty = self._nmty(gamma, A.ty)
            return TId(ty, self._nmeta(gamma, A.lhs, ty),
                       self._nmeta(gamma, A.rhs, ty))
        if isinstance(A, TFun):
            return TFun(self._ncat(gamma, A.dom), self._ncat(gamma, A.cod))
        if isinstance(A, TProf):
            return TProf(self._ncat(gamma, A.dom), self._ncat(gamma, A.cod))
        if isinstance(A, TForall):
            a = fresh(A.hint)
            cat = self._ncat(gamma, A.cat)
            body = _o(A.body, A.hint, OVar(a))
            return TForall(a, cat, self._nset(gamma, SingleCtx(a, cat), body))
        return A

    def norm_meta(self, gamma, t, A):
        top = self._entry()
        try:
            return self._nmeta(gamma, t, self._nmty(gamma, A))
        finally:
            self._exit(top)

    def _nmeta(self, gamma, t, A):
        """A must already be normal."""
        t = self.red_meta(t)
        if isinstance(A, TPi):
            x = fresh(A.hint)
            body = (_m(t.body, t.hint, MVar(x)) if isinstance(t, MLam)
                    else MApp(t, MVar(x)))
            cod = _m(A.cod, A.hint, MVar(x))
            return MLam(x, self._nmeta({**gamma, x: A.dom}, body,
                                       self._nmty({**gamma, x: A.dom}, cod)))
        if isinstance(A, TSigma):
            tl = t.left if isinstance(t, MPair) else MFst(t)
            tr = t.right if isinstance(t, MPair) else MSnd(t)
            l = self._nmeta(gamma, tl, A.dom)
            cod = self._nmty(gamma, _m(A.cod, A.hint, tl))
            return MPair(l, self._nmeta(gamma, tr, cod))
        if isinstance(A, TFun):
            a = fresh(t.hint if isinstance(t, MFunLam) else "a")
            body = (_o(t.body, t.hint, OVar(a)) if isinstance(t, MFunLam)
                    else OApp(t, OVar(a)))
            return MFunLam(a, A.dom,
                           self._nobj(gamma, SingleCtx(a, A.dom), body, A.cod))
        if isinstance(A, TProf):
            a, b = fresh("a"), fresh("b")
            if isinstance(t, MProfLam):
                body = substitute(t.body,
                                  omap={t.aname: OVar(a), t.bname: OVar(b)})
            else:
                body = SApp(t, OVar(a), OVar(b))
            xi = DoubleCtx(a, A.dom, b, A.cod)
            return MProfLam(a, A.dom, b, A.cod, self._nset(gamma, xi, body))
        if isinstance(A, TForall):
            a = fresh(A.hint)
            if isinstance(t, MNatLam):
                body = _o(t.body, t.hint, OVar(a))
            else:
                body = ENatInst(t, OVar(a))
            phi = TransCtx(((a, A.cat),))
            ty = self._nset(gamma, SingleCtx(a, A.cat),
                            _o(A.body, A.hint, OVar(a)))
            return MNatLam(a, A.cat, self._nelt(gamma, phi, body, ty))
        if isinstance(A, (TSmallCat, TCat)):
            if isinstance(t, MQuote):
                return MQuote(self._ncat(gamma, t.cat))
            t2, _ = self._eta_meta_neutral(gamma, t)
            return MQuote(CUnquote(t2))
        if isinstance(A, TId):
            if isinstance(t, MRefl):
                return MRefl(self._nmeta(gamma, t.term, A.ty))
            t2, _ = self._eta_meta_neutral(gamma, t)
            return t2
        t2, _ = self._eta_meta_neutral(gamma, t)
        return t2

    def _eta_meta_neutral(self, gamma, t):
        """Normalize a beta-normal neutral spine, returning (term, type?)."""
        if isinstance(t, MVar):
            return t, self._lookup_type(gamma, t.name)
        if isinstance(t, MApp):
            f, fty = self._eta_meta_neutral(gamma, t.fn)
            if isinstance(fty, TPi):
                a = self._nmeta(gamma, t.arg, self._nmty(gamma, fty.dom))
                return MApp(f, a), self._nmty(gamma, _m(fty.cod, fty.hint, a))
            return MApp(f, self.red_meta(t.arg)), None
        if isinstance(t, MFst):
            u, ty = self._eta_meta_neutral(gamma, t.term)
            if isinstance(ty, TSigma):
                return MFst(u), self._nmty(gamma, ty.dom)
            return MFst(u), None
        if isinstance(t, MSnd):
            u, ty = self._eta_meta_neutral(gamma, t.term)
            if isinstance(ty, TSigma):
                return MSnd(u), self._nmty(gamma, _m(ty.cod, ty.hint, MFst(u)))
            return MSnd(u), None
        if isinstance(t, MJ):
            s, sty = self._eta_meta_neutral(gamma, t.scrut)
            if isinstance(sty, TId):
                y, p = fresh(t.yname), fresh(t.pname)
                g2 = {**gamma, y: sty.ty,
                      p: TId(sty.ty, sty.lhs, MVar(y))}
                motive = substitute(t.motive,
                                    mmap={t.yname: MVar(y), t.pname: MVar(p)})
                nm = self._nmty(g2, motive)
                baty = self._nmty(gamma, substitute(
                    t.motive, mmap={t.yname: sty.lhs,
                                    t.pname: MRefl(sty.lhs)}))
                base = self._nmeta(gamma, t.base, baty)
                res = self._nmty(gamma, substitute(
                    t.motive, mmap={t.yname: sty.rhs, t.pname: t.scrut}))
                return MJ(y, p, nm, base, s), res
            return MJ(t.yname, t.pname, t.motive,
                      self.red_meta(t.base), s), None
        return self.red_meta(t), None

    # -- objects ----------------------------------------------------------

    def norm_obj(self, gamma, sctx: SingleCtx, a, C):
        top = self._entry()
        try:
            return self._nobj(gamma, sctx, a, self.norm_cat(gamma, C))
        finally:
            self._exit(top)

    def _nobj(self, gamma, sctx, a, C):
        """C must already be normal."""
        a = self.red_obj(a)
        if isinstance(C, CProd):
            l = a.left if isinstance(a, OPair) else OProj1(a)
            r = a.right if isinstance(a, OPair) else OProj2(a)
            return OPair(self._nobj(gamma, sctx, l, C.left),
                         self._nobj(gamma, sctx, r, C.right))
        if isinstance(C, CUnit):
            return OUnit()
        if isinstance(C, CGraph):
            neg = a.neg if isinstance(a, OTriple) else OProjNeg(a)
            pos = a.pos if isinstance(a, OTriple) else OProjPos(a)
            elt = a.elt if isinstance(a, OTriple) else EProjElt(a)
            nn = self._nobj(gamma, sctx, neg, C.acat)
            np = self._nobj(gamma, sctx, pos, C.bcat)
            ty = substitute(C.body, omap={C.aname: nn, C.bname: np})
            phi = TransCtx(((sctx.name, sctx.cat),))
            return OTriple(nn, np, self._nelt(gamma, phi, elt, ty))
        if isinstance(C, CPshNeg):
            h = fresh(a.hint if isinstance(a, OPshLam) else "a")
            if isinstance(a, OPshLam) and not a.positive:
                body = _o(a.body, a.hint, OVar(h))
            else:
                body = SMemNeg(OVar(h), a)
            xi = DoubleCtx(h, C.cat, sctx.name, sctx.cat)
            return OPshLam(False, h, C.cat, self._nset(gamma, xi, body))
        if isinstance(C, CPshPos):
            h = fresh(a.hint if isinstance(a, OPshLam) else "b")
            if isinstance(a, OPshLam) and a.positive:
                body = _o(a.body, a.hint, OVar(h))
            else:
                body = SMemPos(a, OVar(h))
            xi = DoubleCtx(sctx.name, sctx.cat, h, C.cat)
            return OPshLam(True, h, C.cat, self._nset(gamma, xi, body))
        # base or unquoted category: neutral spine
        a2, _ = self._infer_obj_neutral(gamma, sctx, a, soft=True)
        return a2

    def _infer_obj_neutral(self, gamma, sctx, a, soft=False):
        """Normalize a beta-normal neutral object, returning (obj, cat?)."""
        if isinstance(a, OVar):
            if a.name == sctx.name:
                return a, self._ncat(gamma, sctx.cat)
            if soft:
                return a, None
            raise _CannotInfer(a.name)
        if isinstance(a, OApp):
            f = self.red_meta(a.fn)
            f2, fty = self._eta_meta_neutral(gamma, f)
            if isinstance(fty, TFun):
                dom = self._ncat(gamma, fty.dom)
                arg = self._nobj(gamma, sctx, a.arg, dom)
                return OApp(f2, arg), self._ncat(gamma, fty.cod)
            if soft:
                return OApp(f2, self.red_obj(a.arg)), None
            raise _CannotInfer("functor application head")
        if isinstance(a, OProj1):
            b, C = self._infer_obj_neutral(gamma, sctx, a.obj, soft)
            if isinstance(C, CProd):
                return OProj1(b), C.left
            if soft:
                return OProj1(b), None
            raise _CannotInfer("first projection")
        if isinstance(a, OProj2):
            b, C = self._infer_obj_neutral(gamma, sctx, a.obj, soft)
            if isinstance(C, CProd):
                return OProj2(b), C.right
            if soft:
                return OProj2(b), None
            raise _CannotInfer("second projection")
        if isinstance(a, OProjNeg):
            b, C = self._infer_obj_neutral(gamma, sctx, a.obj, soft)
            if isinstance(C, CGraph):
                return OProjNeg(b), C.acat
            if soft:
                return OProjNeg(b), None
            raise _CannotInfer("graph projection")
        if isinstance(a, OProjPos):
            b, C = self._infer_obj_neutral(gamma, sctx, a.obj, soft)
            if isinstance(C, CGraph):
                return OProjPos(b), C.bcat
            if soft:
                return OProjPos(b), None
            raise _CannotInfer("graph projection")
        if soft:
            self._incomplete = True
            return a, None
        raise _CannotInfer(type(a).__name__)

    # -- sets -------------------------------------------------------------

    def norm_set(self, gamma, xi: SetCtx, P):
        top = self._entry()
        try:
            return self._nset(gamma, xi, P)
        finally:
            self._exit(top)

    def _nset(self, gamma, xi, P):
        P = self.red_set(P)
        dn, dc = xi.d_minus
        pn, pc = xi.d_plus
        if isinstance(P, SHom):
            C = self._ncat(gamma, P.cat)
            return SHom(C, self._nobj(gamma, SingleCtx(dn, dc), P.src, C),
                        self._nobj(gamma, SingleCtx(pn, pc), P.tgt, C))
        if isinstance(P, STensor):
            D = self._ncat(gamma, P.cat)
            h = fresh(P.hint)
            l = _o(P.left, P.hint, OVar(h))
            r = _o(P.right, P.hint, OVar(h))
            return STensor(h, D,
                           self._nset(gamma, DoubleCtx(dn, dc, h, D), l),
                           self._nset(gamma, DoubleCtx(h, D, pn, pc), r))
        if isinstance(P, SRHom):
            C = self._ncat(gamma, P.cat)
            h = fresh(P.hint)
            dom = _o(P.dom, P.hint, OVar(h))
            cod = _o(P.cod, P.hint, OVar(h))
            return SRHom(h, C,
                         self._nset(gamma, DoubleCtx(pn, pc, h, C), dom),
                         self._nset(gamma, DoubleCtx(dn, dc, h, C), cod))
        if isinstance(P, SLHom):
            C = self._ncat(gamma, P.cat)
            h = fresh(P.hint)
            dom = _o(P.dom, P.hint, OVar(h))
            cod = _o(P.cod, P.hint, OVar(h))
            return SLHom(h, C,
                         self._nset(gamma, DoubleCtx(h, C, pn, pc), cod),
                         self._nset(gamma, DoubleCtx(h, C, dn, dc), dom))
        if isinstance(P, SProd):
            return SProd(self._nset(gamma, xi, P.left),
                         self._nset(gamma, xi, P.right))
        if isinstance(P, SApp):
            f, fty = self._eta_meta_neutral(gamma, P.fn)
            if isinstance(fty, TProf):
                return SApp(f,
                            self._nobj(gamma, SingleCtx(dn, dc), P.src,
                                       self._ncat(gamma, fty.dom)),
                            self._nobj(gamma, SingleCtx(pn, pc), P.tgt,
                                       self._ncat(gamma, fty.cod)))
            self._incomplete = True
            return SApp(f, self.red_obj(P.src), self.red_obj(P.tgt))
        if isinstance(P, SMemNeg):
            try:
                p, C = self._infer_obj_neutral(gamma, SingleCtx(pn, pc), P.psh)
            except _CannotInfer:
                self._incomplete = True
                return SMemNeg(self.red_obj(P.obj), self.red_obj(P.psh))
            if isinstance(C, CPshNeg):
                return SMemNeg(self._nobj(gamma, SingleCtx(dn, dc),
                                          P.obj, C.cat), p)
            self._incomplete = True
            return SMemNeg(self.red_obj(P.obj), p)
        if isinstance(P, SMemPos):
            try:
                p, C = self._infer_obj_neutral(gamma, SingleCtx(dn, dc), P.psh)
            except _CannotInfer:
                self._incomplete = True
                return SMemPos(self.red_obj(P.psh), self.red_obj(P.obj))
            if isinstance(C, CPshPos):
                return SMemPos(p, self._nobj(gamma, SingleCtx(pn, pc),
                                             P.obj, C.cat))
            self._incomplete = True
            return SMemPos(p, self.red_obj(P.obj))
        return P  # SOne

    # -- elements ---------------------------------------------------------

    def norm_elt(self, gamma, phi: TransCtx, s, R):
        top = self._entry()
        try:
            return self._nelt(gamma, phi, s, R)
        finally:
            self._exit(top)

    def _nelt(self, gamma, phi, s, R):
        self._tick()
        R = self._nset(gamma, underline(phi), R)
        s = self.red_elt(s)
        if isinstance(R, SRHom):
            x, a = fresh("x"), fresh(R.hint)
            if isinstance(s, ERLam):
                body = substitute(s.body, omap={s.aname: OVar(a)},
                                  emap={s.xname: EVar(x)})
            else:
                body = ERApp(s, EVar(x), OVar(a))
            dom = _o(R.dom, R.hint, OVar(a))
            cod = _o(R.cod, R.hint, OVar(a))
            phi2 = TransCtx(phi.objs + ((a, R.cat),),
                            phi.elts + ((x, dom),))
            return ERLam(x, a, self._nelt(gamma, phi2, body, cod))
        if isinstance(R, SLHom):
            x, a = fresh("x"), fresh(R.hint)
            if isinstance(s, ELLam):
                body = substitute(s.body, omap={s.aname: OVar(a)},
                                  emap={s.xname: EVar(x)})
            else:
                body = ELApp(s, EVar(x), OVar(a))
            dom = _o(R.dom, R.hint, OVar(a))
            cod = _o(R.cod, R.hint, OVar(a))
            phi2 = TransCtx(((a, R.cat),) + phi.objs,
                            ((x, dom),) + phi.elts)
            return ELLam(x, a, self._nelt(gamma, phi2, body, cod))
        if isinstance(R, SProd):
            l = s.left if isinstance(s, EPair) else EFst(s)
            r = s.right if isinstance(s, EPair) else ESnd(s)
            return EPair(self._nelt(gamma, phi, l, R.left),
                         self._nelt(gamma, phi, r, R.right))
        if isinstance(R, SOne):
            return EUnit()
        # positive type: introductions and neutrals
        if isinstance(s, ERefl):
            C = R.cat if isinstance(R, SHom) else None
            dn, dc = phi.objs[0]
            if C is None:
                self._incomplete = True
                return s
            return ERefl(self._nobj(gamma, SingleCtx(dn, dc), s.obj, C))
        if isinstance(s, ETensorPair) and isinstance(R, STensor):
            sl = split_slices(phi, [ordered_fv_elt(s.left),
                                    ordered_fv_elt(s.right)])
            psi_s = phi.slice(*sl[0])
            psi_t = phi.slice(*sl[1])
            pn, pc = psi_s.objs[-1]
            b = self._nobj(gamma, SingleCtx(pn, pc), s.obj, R.cat)
            return ETensorPair(
                b,
                self._nelt(gamma, psi_s, s.left, _o(R.left, R.hint, b)),
                self._nelt(gamma, psi_t, s.right, _o(R.right, R.hint, b)))
        if isinstance(s, EHomElim):
            return self._nelt_homelim(gamma, phi, s)
        if isinstance(s, ETensorElim):
            return self._nelt_tensorelim(gamma, phi, s, R)
        # neutral spine
        try:
            s2, _ = self._infer_neutral(gamma, phi, s)
            return s2
        except _CannotInfer:
            self._incomplete = True
            return s

    def _nelt_homelim(self, gamma, phi, s):
        motive = s.motive
        if motive is not None:
            C = self._ncat(gamma, motive.cat)
        else:
            try:
                _, sty = self._infer_neutral(gamma, phi, s.scrut)
            except _CannotInfer:
                sty = None
            if not isinstance(sty, SHom):
                self._incomplete = True
                return s
            C = sty.cat
        dn, dc = phi.objs[0]
        pn, pc = phi.objs[-1]
        b1 = self._nobj(gamma, SingleCtx(dn, dc), s.b1, C)
        b2 = self._nobj(gamma, SingleCtx(pn, pc), s.b2, C)
        scrut = self._nelt(gamma, phi, s.scrut, SHom(C, b1, b2))
        if motive is not None:
            am, bm = fresh(motive.aname), fresh(motive.bname)
            mbody = substitute(motive.body,
                               omap={motive.aname: OVar(am),
                                     motive.bname: OVar(bm)})
            nmotive = Motive(am, bm, C,
                             self._nset(gamma, DoubleCtx(am, C, bm, C), mbody))
            a = fresh(s.hint)
            cty = substitute(nmotive.body, omap={am: OVar(a), bm: OVar(a)})
        else:
            nmotive = None
            a = fresh(s.hint)
            cty = None
        cont = _o(s.cont, s.hint, OVar(a))
        if cty is not None:
            cont = self._nelt(gamma, TransCtx(((a, C),)), cont, cty)
        else:
            self._incomplete = True
            cont = self.red_elt(cont)
        return EHomElim(a, cont, b1, scrut, b2, nmotive)

    def _nelt_tensorelim(self, gamma, phi, s, R):
        inner = ordered_fv_elt(s.cont)
        try:
            i = inner.index(s.xname)
        except ValueError:
            self._incomplete = True
            return s
        if i + 1 >= len(inner) or inner[i + 1] != s.yname:
            self._incomplete = True
            return s
        pre, post = inner[:i], inner[i + 2:]
        sl = split_slices(phi, [pre, ordered_fv_elt(s.scrut), post])
        i0, j0 = sl[1]
        phi_m = phi.slice(*sl[1])
        try:
            scrut, sty = self._infer_neutral(gamma, phi_m, s.scrut)
        except _CannotInfer:
            self._incomplete = True
            return ETensorElim(self.red_elt(s.scrut), s.xname, s.bname,
                               s.yname, self.red_elt(s.cont))
        if not isinstance(sty, STensor):
            self._incomplete = True
            return ETensorElim(scrut, s.xname, s.bname, s.yname,
                               self.red_elt(s.cont))
        x, b, y = fresh(s.xname), fresh(s.bname), fresh(s.yname)
        P = _o(sty.left, sty.hint, OVar(b))
        Q = _o(sty.right, sty.hint, OVar(b))
        phi_c = TransCtx(
            phi.objs[:i0 + 1] + ((b, sty.cat),) + phi.objs[j0:],
            phi.elts[:i0] + ((x, P), (y, Q)) + phi.elts[j0:])
        cont = substitute(s.cont, omap={s.bname: OVar(b)},
                          emap={s.xname: EVar(x), s.yname: EVar(y)})
        return ETensorElim(scrut, x, b, y, self._nelt(gamma, phi_c, cont, R))

    def _infer_neutral(self, gamma, phi, n):
        """Normalize a beta-normal neutral element spine over exactly phi,
        returning (element, normal type over underline(phi))."""
        if isinstance(n, EVar):
            if len(phi.elts) == 1 and phi.elts[0][0] == n.name:
                return n, self._nset(gamma, underline(phi), phi.elts[0][1])
            raise _CannotInfer(n.name)
        if isinstance(n, ERApp):
            sl = split_slices(phi, [ordered_fv_elt(n.fn),
                                    ordered_fv_elt(n.arg)])
            phi_f = phi.slice(*sl[0])
            phi_a = phi.slice(*sl[1])
            fn, fty = self._infer_neutral(gamma, phi_f, n.fn)
            if not isinstance(fty, SRHom):
                raise _CannotInfer("right application head")
            pn, pc = phi_a.objs[-1]
            a = self._nobj(gamma, SingleCtx(pn, pc), n.obj, fty.cat)
            arg = self._nelt(gamma, phi_a, n.arg, _o(fty.dom, fty.hint, a))
            ty = self._nset(gamma, underline(phi), _o(fty.cod, fty.hint, a))
            return ERApp(fn, arg, a), ty
        if isinstance(n, ELApp):
            sl = split_slices(phi, [ordered_fv_elt(n.arg),
                                    ordered_fv_elt(n.fn)])
            phi_a = phi.slice(*sl[0])
            phi_f = phi.slice(*sl[1])
            fn, fty = self._infer_neutral(gamma, phi_f, n.fn)
            if not isinstance(fty, SLHom):
                raise _CannotInfer("left application head")
            dn, dc = phi_a.objs[0]
            a = self._nobj(gamma, SingleCtx(dn, dc), n.obj, fty.cat)
            arg = self._nelt(gamma, phi_a, n.arg, _o(fty.dom, fty.hint, a))
            ty = self._nset(gamma, underline(phi), _o(fty.cod, fty.hint, a))
            return ELApp(fn, arg, a), ty
        if isinstance(n, EFst):
            u, ty = self._infer_neutral(gamma, phi, n.elt)
            if isinstance(ty, SProd):
                return EFst(u), ty.left
            raise _CannotInfer("first projection")
        if isinstance(n, ESnd):
            u, ty = self._infer_neutral(gamma, phi, n.elt)
            if isinstance(ty, SProd):
                return ESnd(u), ty.right
            raise _CannotInfer("second projection")
        if isinstance(n, ENatInst):
            f = self.red_meta(n.fn)
            f2, fty = self._eta_meta_neutral(gamma, f)
            fty = self._nmty(gamma, fty) if fty is not None else None
            if not isinstance(fty, TForall) or phi.elts:
                raise _CannotInfer("natural element instantiation")
            dn, dc = phi.objs[0]
            b = self._nobj(gamma, SingleCtx(dn, dc), n.obj, fty.cat)
            ty = self._nset(gamma, underline(phi), _o(fty.body, fty.hint, b))
            return ENatInst(f2, b), ty
        if isinstance(n, EProjElt):
            if phi.elts:
                raise _CannotInfer("graph element projection")
            dn, dc = phi.objs[0]
            b, C = self._infer_obj_neutral(gamma, SingleCtx(dn, dc),
                                           self.red_obj(n.obj))
            if not isinstance(C, CGraph):
                raise _CannotInfer("graph element projection")
            ty = substitute(C.body, omap={C.aname: OProjNeg(b),
                                          C.bname: OProjPos(b)})
            return EProjElt(b), self._nset(gamma, underline(phi), ty)
        if isinstance(n, EHomElim) and n.motive is not None:
            s2 = self._nelt_homelim(gamma, phi, n)
            m = s2.motive if isinstance(s2, EHomElim) else n.motive
            ty = substitute(m.body, omap={m.aname: s2.b1, m.bname: s2.b2}) \
                if isinstance(s2, EHomElim) else None
            if ty is None:
                raise _CannotInfer("hom eliminator")
            return s2, self._nset(gamma, underline(phi), ty)
        raise _CannotInfer(type(n).__name__)

    # ------------------------------------------------------------------
    # equality

    def equal_cat(self, gamma, c, d) -> bool:
        return alpha_eq(self.norm_cat(gamma, c), self.norm_cat(gamma, d))

    def equal_obj(self, gamma, sctx, a, b, C) -> bool:
        return alpha_eq(self.norm_obj(gamma, sctx, a, C),
                        self.norm_obj(gamma, sctx, b, C))

    def equal_set(self, gamma, xi, P, Q) -> bool:
        return alpha_eq(self.norm_set(gamma, xi, P),
                        self.norm_set(gamma, xi, Q))

    def equal_mty(self, gamma, A, B) -> bool:
        return alpha_eq(self.norm_mty(gamma, A), self.norm_mty(gamma, B))

    def equal_meta(self, gamma, s, t, A) -> bool:
        return alpha_eq(self.norm_meta(gamma, s, A),
                        self.norm_meta(gamma, t, A))

    def equal_elt(self, gamma, phi, s, t, R) -> str:
        top = self._entry()
        self._incomplete = False
        try:
            return self._eq_elt(gamma, phi, s, t, R, self.fuel)
        except FuelExhausted:
            return UNKNOWN
        finally:
            self._exit(top)

    def _eq_elt(self, gamma, phi, s, t, R, depth):
        if depth <= 0:
            raise FuelExhausted("context transformation depth exhausted")
        sn = self._nelt(gamma, phi, s, R)
        tn = self._nelt(gamma, phi, t, R)
        if alpha_eq(sn, tn):
            return EQUAL
        # descend under eta-long introduction forms so that context
        # transformations can reach hom- and tensor-typed binders
        Rn = self._nset(gamma, underline(phi), R)
        if (isinstance(Rn, SRHom) and isinstance(sn, ERLam)
                and isinstance(tn, ERLam)):
            x, a = fresh("x"), fresh(Rn.hint)
            dom = _o(Rn.dom, Rn.hint, OVar(a))
            cod = _o(Rn.cod, Rn.hint, OVar(a))
            phi2 = TransCtx(phi.objs + ((a, Rn.cat),),
                            phi.elts + ((x, dom),))
            sb = substitute(sn.body, omap={sn.aname: OVar(a)},
                            emap={sn.xname: EVar(x)})
            tb = substitute(tn.body, omap={tn.aname: OVar(a)},
                            emap={tn.xname: EVar(x)})
            return self._eq_elt(gamma, phi2, sb, tb, cod, depth - 1)
        if (isinstance(Rn, SLHom) and isinstance(sn, ELLam)
                and isinstance(tn, ELLam)):
            x, a = fresh("x"), fresh(Rn.hint)
            dom = _o(Rn.dom, Rn.hint, OVar(a))
            cod = _o(Rn.cod, Rn.hint, OVar(a))
            phi2 = TransCtx(((a, Rn.cat),) + phi.objs,
                            ((x, dom),) + phi.elts)
            sb = substitute(sn.body, omap={sn.aname: OVar(a)},
                            emap={sn.xname: EVar(x)})
            tb = substitute(tn.body, omap={tn.aname: OVar(a)},
                            emap={tn.xname: EVar(x)})
            return self._eq_elt(gamma, phi2, sb, tb, cod, depth - 1)
        if (isinstance(Rn, SProd) and isinstance(sn, EPair)
                and isinstance(tn, EPair)):
            vl = self._eq_elt(gamma, phi, sn.left, tn.left, Rn.left,
                              depth - 1)
            vr = self._eq_elt(gamma, phi, sn.right, tn.right, Rn.right,
                              depth - 1)
            if vl == EQUAL and vr == EQUAL:
                return EQUAL
            if NOT_EQUAL in (vl, vr):
                return NOT_EQUAL
            return UNKNOWN
        step = self._transform_ctx(gamma, phi)
        if step is not None:
            phi2, omap, emap = step
            s2 = substitute(sn, omap=omap, emap=emap)
            t2 = substitute(tn, omap=omap, emap=emap)
            R2 = substitute(R, omap=omap, emap=emap)
            return self._eq_elt(gamma, phi2, s2, t2, R2, depth - 1)
        if self._incomplete or _has_neutral_elim(sn) or _has_neutral_elim(tn):
            return UNKNOWN
        return NOT_EQUAL

    def _transform_ctx(self, gamma, phi):
        """Find the leftmost context variable the element eta laws can
        eliminate; returns (new phi, object map, element map) or None."""
        for k, (zname, zty) in enumerate(phi.elts):
            xi = underline(phi.slice(k, k + 1))
            ztyn = self._nset(gamma, xi, zty)
            if isinstance(ztyn, STensor):
                x = fresh("x")
                b = fresh(ztyn.hint)
                y = fresh("y")
                P = _o(ztyn.left, ztyn.hint, OVar(b))
                Q = _o(ztyn.right, ztyn.hint, OVar(b))
                objs = phi.objs[:k + 1] + ((b, ztyn.cat),) + phi.objs[k + 1:]
                elts = phi.elts[:k] + ((x, P), (y, Q)) + phi.elts[k + 1:]
                emap = {zname: ETensorPair(OVar(b), EVar(x), EVar(y))}
                return TransCtx(objs, elts), {}, emap
            if (isinstance(ztyn, SHom)
                    and isinstance(ztyn.src, OVar)
                    and isinstance(ztyn.tgt, OVar)
                    and ztyn.src.name == phi.objs[k][0]
                    and ztyn.tgt.name == phi.objs[k + 1][0]):
                g = fresh(phi.objs[k][0])
                omap = {phi.objs[k][0]: OVar(g), phi.objs[k + 1][0]: OVar(g)}
                emap = {zname: ERefl(OVar(g))}
                objs = (phi.objs[:k] + ((g, phi.objs[k][1]),)
                        + phi.objs[k + 2:])
                elts = tuple(
                    (n, substitute(ty, omap=omap, emap=emap))
                    for n, ty in phi.elts[:k] + phi.elts[k + 1:])
                return TransCtx(objs, elts), omap, emap
        return None


def _has_neutral_elim(e) -> bool:
    """True if e contains an eliminator stuck on a neutral scrutinee."""
    if not hasattr(e, "__dataclass_fields__"):
        return False
    if isinstance(e, EHomElim) and not isinstance(e.scrut, ERefl):
        return True
    if isinstance(e, ETensorElim) and not isinstance(e.scrut, ETensorPair):
        return True
    return any(_has_neutral_elim(getattr(e, f))
               for f in e.__dataclass_fields__ if f != "span")


# ---------------------------------------------------------------------------
# generalized unit eliminator


def gen_unit_elim(phi: TransCtx, psi: TransCtx, hint: str, cont, xname: str):
    """Eliminate a hom-typed variable x sitting between contexts phi and
    psi: builds the element that checks over phi, x : Hom(d+phi, d-psi),
    psi by currying psi's entries into right homs and phi's into left
    homs until the primitive eliminator (single variable on both sides)
    applies."""
    if len(phi.elts) > 0:
        (bname, _) = phi.objs[0]
        (yname, _) = phi.elts[0]
        rest = TransCtx(phi.objs[1:], phi.elts[1:])
        inner = gen_unit_elim(rest, psi, hint, ELLam(yname, bname, cont),
                              xname)
        return ELApp(inner, EVar(yname), OVar(bname))
    if len(psi.elts) > 0:
        (yname, _) = psi.elts[-1]
        (bname, _) = psi.objs[-1]
        rest = TransCtx(psi.objs[:-1], psi.elts[:-1])
        inner = gen_unit_elim(phi, rest, hint, ERLam(yname, bname, cont),
                              xname)
        return ERApp(inner, EVar(yname), OVar(bname))
    return EHomElim(hint, cont, OVar(phi.objs[0][0]), EVar(xname),
                    OVar(psi.objs[0][0]))
