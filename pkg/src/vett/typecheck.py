"""Bidirectional typechecker for the five judgment forms.

Objects and meta terms both infer and check; sets and categories are
well-formedness checked; elements check against a set, with synthesis
for variables, applications, projections, instantiations and annotated
eliminators.  Element checking enforces the ordered-linear discipline:
at every multi-part eliminator the transformation context is split by
the ordered free element variables of the parts (`split_slices`), so a
variable used twice, dropped, or used out of context order is reported
as a LinearityError / ContextSplitError at the node that misuses it.

All checking functions return elaborated terms: binders are freshened,
and hom eliminators get their motive filled in (by generalizing the
expected type over the variable endpoints) when the surface term omits
it.  Downstream consumers (conversion on assertions, model evaluation)
rely on elaborated input.
"""

from __future__ import annotations

from .conversion import Conv
from .errors import (
    Diagnostic, EndpointMismatch, FullGeneralityError, LinearityError,
    NotSmall, ProjectionOnNonProduct, ScopeError, TypeMismatch,
    UniverseMismatch, VariableMismatch, VarianceError, VettError,
)
from .syntax import (
    CBase, CGraph, CProd, CPshNeg, CPshPos, CUnit, CUnquote, DAssert,
    DBaseCat, DConst, DDef, DoubleCtx, EFst, EHomElim, ELApp, ELLam,
    ENatInst, EPair, EProjElt, ERApp, ERefl, ERLam, ESnd, ETensorElim,
    ETensorPair, EUnit, EVar, MApp, MFst, MFunLam, MJ, MLam, MNatLam,
    MPair, MProfLam, MQuote, MRefl, MSnd, MVar, Motive, OApp, OPair,
    OProj1, OProj2, OProjElt, OProjNeg, OProjPos, OPshLam, OTriple, OUnit,
    OVar, SApp, SHom, SLHom, SMemNeg, SMemPos, SOne, SProd, SRHom,
    STensor, Signature, SingleCtx, TCat, TForall, TFun, TId, TPi, TProf,
    TSigma, TSmallCat, TransCtx, alpha_eq, d_minus, d_plus, fresh,
    is_small, ordered_fv_elt, split_slices, underline,
)
from .subst import substitute


def _show(node) -> str:
    try:
        from .frontend import pretty
        return pretty(node)
    except Exception:
        return repr(node)


def format_ctx(phi) -> str:
    if not isinstance(phi, TransCtx):
        return repr(phi)
    parts = []
    for k, (n, c) in enumerate(phi.objs):
        parts.append(f"{n} : {_show(c)}")
        if k < len(phi.elts):
            en, et = phi.elts[k]
            parts.append(f"{en} : {_show(et)}")
    return ", ".join(parts)


def generalize_set(P, negname, posname, newneg, newpos):
    """Replace the context variables of a set by fresh ones, routing the
    replacement by variance: negname in contravariant object slots,
    posname in covariant ones.  This is the inverse of the substitution
    P[b1/a; b2/b] at variable endpoints, well-defined even when the two
    context variables coincide (single-variable contexts)."""
    def neg(o):
        return substitute(o, omap={negname: OVar(newneg)})

    def pos(o):
        return substitute(o, omap={posname: OVar(newpos)})

    if isinstance(P, SHom):
        return SHom(P.cat, neg(P.src), pos(P.tgt))
    if isinstance(P, SApp):
        return SApp(P.fn, neg(P.src), pos(P.tgt))
    if isinstance(P, SMemNeg):
        return SMemNeg(neg(P.obj), pos(P.psh))
    if isinstance(P, SMemPos):
        return SMemPos(neg(P.psh), pos(P.obj))
    if isinstance(P, SOne):
        return P
    if isinstance(P, SProd):
        return SProd(generalize_set(P.left, negname, posname, newneg, newpos),
                     generalize_set(P.right, negname, posname, newneg, newpos))
    if isinstance(P, STensor):
        h = fresh(P.hint)
        l = substitute(P.left, omap={P.hint: OVar(h)})
        r = substitute(P.right, omap={P.hint: OVar(h)})
        return STensor(h, P.cat,
                       generalize_set(l, negname, h, newneg, h),
                       generalize_set(r, h, posname, h, newpos))
    if isinstance(P, SRHom):
        h = fresh(P.hint)
        dom = substitute(P.dom, omap={P.hint: OVar(h)})
        cod = substitute(P.cod, omap={P.hint: OVar(h)})
        return SRHom(h, P.cat,
                     generalize_set(dom, posname, h, newpos, h),
                     generalize_set(cod, negname, h, newneg, h))
    if isinstance(P, SLHom):
        h = fresh(P.hint)
        dom = substitute(P.dom, omap={P.hint: OVar(h)})
        cod = substitute(P.cod, omap={P.hint: OVar(h)})
        return SLHom(h, P.cat,
                     generalize_set(cod, h, posname, h, newpos),
                     generalize_set(dom, h, negname, h, newneg))
    raise FullGeneralityError(f"cannot generalize over {type(P).__name__}")


class Checker:
    def __init__(self, sig: Signature = None, fuel: int = 256):
        self.sig = sig if sig is not None else Signature()
        self.conv = Conv(self.sig, fuel)

    # ------------------------------------------------------------------
    # categories

    def check_cat(self, gamma, c):
        if isinstance(c, CBase):
            d = self.sig.lookup(c.name)
            if isinstance(d, DBaseCat):
                return c
            if isinstance(d, (DConst, DDef)) or c.name in gamma:
                # a name of type SmallCat/Cat used in category position
                return self.check_cat(gamma, CUnquote(MVar(c.name),
                                                      span=c.span))
            raise ScopeError(f"unknown category {c.name}", span=c.span)
        if isinstance(c, CUnit):
            return c
        if isinstance(c, CProd):
            return CProd(self.check_cat(gamma, c.left),
                         self.check_cat(gamma, c.right), span=c.span)
        if isinstance(c, (CPshNeg, CPshPos)):
            inner = self.check_cat(gamma, c.cat)
            if not is_small(self.conv.norm_cat(gamma, inner), self.sig, gamma):
                raise NotSmall(
                    "presheaf categories are formed over small categories "
                    f"only, but {_show(inner)} is not small", span=c.span)
            return type(c)(inner, span=c.span)
        if isinstance(c, CGraph):
            acat = self.check_cat(gamma, c.acat)
            bcat = self.check_cat(gamma, c.bcat)
            for cc in (acat, bcat):
                if not is_small(self.conv.norm_cat(gamma, cc), self.sig, gamma):
                    raise NotSmall(
                        f"graph categories are formed over small categories "
                        f"only, but {_show(cc)} is not small", span=c.span)
            a, b = fresh(c.aname), fresh(c.bname)
            body = substitute(c.body, omap={c.aname: OVar(a), c.bname: OVar(b)})
            body = self.check_set(gamma, DoubleCtx(a, acat, b, bcat), body)
            return CGraph(a, acat, b, bcat, body, span=c.span)
        if isinstance(c, CUnquote):
            t, ty = self.infer_meta(gamma, c.term)
            tyn = self.conv.norm_mty(gamma, ty)
            if not isinstance(tyn, (TSmallCat, TCat)):
                raise UniverseMismatch(
                    f"only terms of type SmallCat or Cat can be used as "
                    f"categories; this one has type {_show(tyn)}",
                    span=c.span)
            return CUnquote(t, span=c.span)
        raise TypeMismatch(f"not a category expression: {c!r}", span=c.span)

    # ------------------------------------------------------------------
    # objects

    def infer_obj(self, gamma, sctx: SingleCtx, a):
        if isinstance(a, OVar):
            if a.name == sctx.name:
                return a, sctx.cat
            raise VariableMismatch(
                f"object expressions are unary in the context variable: "
                f"expected {sctx.name}, found {a.name}", span=a.span)
        if isinstance(a, OApp):
            fn, fty = self.infer_meta(gamma, a.fn)
            ftyn = self.conv.norm_mty(gamma, fty)
            if not isinstance(ftyn, TFun):
                raise TypeMismatch(
                    f"applied a term of type {_show(ftyn)} to an object; "
                    "a functor was expected", span=a.span)
            arg = self.check_obj(gamma, sctx, a.arg, ftyn.dom)
            return OApp(fn, arg, span=a.span), ftyn.cod
        if isinstance(a, OPair):
            l, lc = self.infer_obj(gamma, sctx, a.left)
            r, rc = self.infer_obj(gamma, sctx, a.right)
            return OPair(l, r, span=a.span), CProd(lc, rc)
        if isinstance(a, OUnit):
            return a, CUnit()
        if isinstance(a, OProj1):
            b, C = self.infer_obj(gamma, sctx, a.obj)
            Cn = self.conv.norm_cat(gamma, C)
            if not isinstance(Cn, CProd):
                raise ProjectionOnNonProduct(
                    f"first projection of an object of {_show(Cn)}",
                    span=a.span)
            return OProj1(b, span=a.span), Cn.left
        if isinstance(a, OProj2):
            b, C = self.infer_obj(gamma, sctx, a.obj)
            Cn = self.conv.norm_cat(gamma, C)
            if not isinstance(Cn, CProd):
                raise ProjectionOnNonProduct(
                    f"second projection of an object of {_show(Cn)}",
                    span=a.span)
            return OProj2(b, span=a.span), Cn.right
        if isinstance(a, (OProjNeg, OProjPos)):
            b, C = self.infer_obj(gamma, sctx, a.obj)
            Cn = self.conv.norm_cat(gamma, C)
            if not isinstance(Cn, CGraph):
                raise TypeMismatch(
                    f"graph projection of an object of {_show(Cn)}",
                    span=a.span)
            cat = Cn.acat if isinstance(a, OProjNeg) else Cn.bcat
            return type(a)(b, span=a.span), cat
        if isinstance(a, OProjElt):
            raise VarianceError(
                "the element projection of a graph object is an element, "
                "not an object", span=a.span)
        if isinstance(a, OPshLam):
            cat = self.check_cat(gamma, a.cat)
            if not is_small(self.conv.norm_cat(gamma, cat), self.sig, gamma):
                raise NotSmall(
                    f"presheaf binders range over small categories only, "
                    f"but {_show(cat)} is not small", span=a.span)
            h = fresh(a.hint)
            body = substitute(a.body, omap={a.hint: OVar(h)})
            if a.positive:
                xi = DoubleCtx(sctx.name, sctx.cat, h, cat)
            else:
                xi = DoubleCtx(h, cat, sctx.name, sctx.cat)
            body = self.check_set(gamma, xi, body)
            out = OPshLam(a.positive, h, cat, body, span=a.span)
            return out, (CPshPos(cat) if a.positive else CPshNeg(cat))
        if isinstance(a, OTriple):
            raise TypeMismatch(
                "cannot infer the graph category of a triple; check it "
                "against a graph category", span=a.span)
        raise TypeMismatch(f"not an object expression: {a!r}", span=a.span)

    def check_obj(self, gamma, sctx: SingleCtx, a, C):
        Cn = self.conv.norm_cat(gamma, C)
        if isinstance(a, OPair) and isinstance(Cn, CProd):
            return OPair(self.check_obj(gamma, sctx, a.left, Cn.left),
                         self.check_obj(gamma, sctx, a.right, Cn.right),
                         span=a.span)
        if isinstance(a, OUnit):
            if isinstance(Cn, CUnit):
                return a
            raise TypeMismatch(
                f"the empty object lives in the unit category, not "
                f"{_show(Cn)}", span=a.span)
        if isinstance(a, OTriple):
            if not isinstance(Cn, CGraph):
                raise TypeMismatch(
                    f"a graph triple cannot live in {_show(Cn)}", span=a.span)
            neg = self.check_obj(gamma, sctx, a.neg, Cn.acat)
            pos = self.check_obj(gamma, sctx, a.pos, Cn.bcat)
            ty = substitute(Cn.body, omap={Cn.aname: neg, Cn.bname: pos})
            phi = TransCtx(((sctx.name, sctx.cat),))
            elt = self.check_elt(gamma, phi, a.elt, ty)
            return OTriple(neg, pos, elt, span=a.span)
        if isinstance(a, OPshLam) and isinstance(Cn, (CPshNeg, CPshPos)):
            if a.positive != isinstance(Cn, CPshPos):
                raise VarianceError(
                    "presheaf abstraction variance does not match its "
                    "category", span=a.span)
            out, ac = self.infer_obj(gamma, sctx, a)
            if not self.conv.equal_cat(gamma, ac, Cn):
                raise TypeMismatch(
                    f"presheaf abstraction over {_show(ac)} checked against "
                    f"{_show(Cn)}", span=a.span)
            return out
        out, ac = self.infer_obj(gamma, sctx, a)
        if not self.conv.equal_cat(gamma, ac, Cn):
            raise TypeMismatch(
                f"object of {_show(ac)} where an object of {_show(Cn)} was "
                "expected", span=a.span)
        return out

    # ------------------------------------------------------------------
    # sets

    def check_set(self, gamma, xi, P):
        dn, dc = xi.d_minus
        pn, pc = xi.d_plus
        if isinstance(P, SHom):
            cat = self.check_cat(gamma, P.cat)
            src = self.check_obj(gamma, SingleCtx(dn, dc), P.src, cat)
            tgt = self.check_obj(gamma, SingleCtx(pn, pc), P.tgt, cat)
            return SHom(cat, src, tgt, span=P.span)
        if isinstance(P, STensor):
            cat = self.check_cat(gamma, P.cat)
            if not is_small(self.conv.norm_cat(gamma, cat), self.sig, gamma):
                raise NotSmall(
                    f"tensors are taken over small categories only, but "
                    f"{_show(cat)} is not small", span=P.span)
            h = fresh(P.hint)
            l = substitute(P.left, omap={P.hint: OVar(h)})
            r = substitute(P.right, omap={P.hint: OVar(h)})
            l = self.check_set(gamma, DoubleCtx(dn, dc, h, cat), l)
            r = self.check_set(gamma, DoubleCtx(h, cat, pn, pc), r)
            return STensor(h, cat, l, r, span=P.span)
        if isinstance(P, SRHom):
            cat = self.check_cat(gamma, P.cat)
            if not is_small(self.conv.norm_cat(gamma, pc), self.sig, gamma):
                raise NotSmall(
                    "a right hom requires the covariant boundary category "
                    f"{_show(pc)} to be small", span=P.span)
            h = fresh(P.hint)
            dom = substitute(P.dom, omap={P.hint: OVar(h)})
            cod = substitute(P.cod, omap={P.hint: OVar(h)})
            dom = self.check_set(gamma, DoubleCtx(pn, pc, h, cat), dom)
            cod = self.check_set(gamma, DoubleCtx(dn, dc, h, cat), cod)
            return SRHom(h, cat, dom, cod, span=P.span)
        if isinstance(P, SLHom):
            cat = self.check_cat(gamma, P.cat)
            if not is_small(self.conv.norm_cat(gamma, dc), self.sig, gamma):
                raise NotSmall(
                    "a left hom requires the contravariant boundary category "
                    f"{_show(dc)} to be small", span=P.span)
            h = fresh(P.hint)
            dom = substitute(P.dom, omap={P.hint: OVar(h)})
            cod = substitute(P.cod, omap={P.hint: OVar(h)})
            dom = self.check_set(gamma, DoubleCtx(h, cat, dn, dc), dom)
            cod = self.check_set(gamma, DoubleCtx(h, cat, pn, pc), cod)
            return SLHom(h, cat, cod, dom, span=P.span)
        if isinstance(P, SOne):
            return P
        if isinstance(P, SProd):
            return SProd(self.check_set(gamma, xi, P.left),
                         self.check_set(gamma, xi, P.right), span=P.span)
        if isinstance(P, SApp):
            fn, fty = self.infer_meta(gamma, P.fn)
            ftyn = self.conv.norm_mty(gamma, fty)
            if not isinstance(ftyn, TProf):
                raise TypeMismatch(
                    f"applied a term of type {_show(ftyn)} to two objects; "
                    "a profunctor was expected", span=P.span)
            src = self.check_obj(gamma, SingleCtx(dn, dc), P.src, ftyn.dom)
            tgt = self.check_obj(gamma, SingleCtx(pn, pc), P.tgt, ftyn.cod)
            return SApp(fn, src, tgt, span=P.span)
        if isinstance(P, SMemNeg):
            psh, pcat = self.infer_obj(gamma, SingleCtx(pn, pc), P.psh)
            pcn = self.conv.norm_cat(gamma, pcat)
            if isinstance(pcn, CPshPos):
                raise VarianceError(
                    "membership in a positive presheaf is written with the "
                    "presheaf on the left", span=P.span)
            if not isinstance(pcn, CPshNeg):
                raise TypeMismatch(
                    f"membership requires a presheaf, found an object of "
                    f"{_show(pcn)}", span=P.span)
            obj = self.check_obj(gamma, SingleCtx(dn, dc), P.obj, pcn.cat)
            return SMemNeg(obj, psh, span=P.span)
        if isinstance(P, SMemPos):
            psh, pcat = self.infer_obj(gamma, SingleCtx(dn, dc), P.psh)
            pcn = self.conv.norm_cat(gamma, pcat)
            if isinstance(pcn, CPshNeg):
                raise VarianceError(
                    "membership in a negative presheaf is written with the "
                    "presheaf on the right", span=P.span)
            if not isinstance(pcn, CPshPos):
                raise TypeMismatch(
                    f"membership requires a presheaf, found an object of "
                    f"{_show(pcn)}", span=P.span)
            obj = self.check_obj(gamma, SingleCtx(pn, pc), P.obj, pcn.cat)
            return SMemPos(psh, obj, span=P.span)
        raise TypeMismatch(f"not a set expression: {P!r}", span=P.span)

    # ------------------------------------------------------------------
    # elements

    def infer_elt(self, gamma, phi: TransCtx, e):
        if isinstance(e, EVar):
            self._require_single_use(phi, e)
            return e, phi.elts[0][1]
        if isinstance(e, ERefl):
            if phi.elts:
                raise LinearityError(
                    "an identity element uses no element variables, but the "
                    f"context provides {', '.join(phi.elt_names)}",
                    span=e.span, phi=phi)
            b, C = self.infer_obj(gamma, d_minus(phi), e.obj)
            return ERefl(b, span=e.span), SHom(C, b, b)
        if isinstance(e, ERApp):
            sl = split_slices(phi, [ordered_fv_elt(e.fn),
                                    ordered_fv_elt(e.arg)], span=e.span)
            phi_f = phi.slice(*sl[0])
            phi_a = phi.slice(*sl[1])
            fn, fty = self.infer_elt(gamma, phi_f, e.fn)
            ftyn = self.conv.norm_set(gamma, underline(phi_f), fty)
            if not isinstance(ftyn, SRHom):
                raise TypeMismatch(
                    f"right application of an element of {_show(ftyn)}",
                    span=e.span, phi=phi)
            a = self.check_obj(gamma, d_plus(phi_a), e.obj, ftyn.cat)
            arg = self.check_elt(gamma, phi_a, e.arg,
                                 substitute(ftyn.dom, omap={ftyn.hint: a}))
            return (ERApp(fn, arg, a, span=e.span),
                    substitute(ftyn.cod, omap={ftyn.hint: a}))
        if isinstance(e, ELApp):
            sl = split_slices(phi, [ordered_fv_elt(e.arg),
                                    ordered_fv_elt(e.fn)], span=e.span)
            phi_a = phi.slice(*sl[0])
            phi_f = phi.slice(*sl[1])
            fn, fty = self.infer_elt(gamma, phi_f, e.fn)
            ftyn = self.conv.norm_set(gamma, underline(phi_f), fty)
            if not isinstance(ftyn, SLHom):
                raise TypeMismatch(
                    f"left application of an element of {_show(ftyn)}",
                    span=e.span, phi=phi)
            a = self.check_obj(gamma, d_minus(phi_a), e.obj, ftyn.cat)
            arg = self.check_elt(gamma, phi_a, e.arg,
                                 substitute(ftyn.dom, omap={ftyn.hint: a}))
            return (ELApp(fn, arg, a, span=e.span),
                    substitute(ftyn.cod, omap={ftyn.hint: a}))
        if isinstance(e, EFst):
            u, ty = self.infer_elt(gamma, phi, e.elt)
            tyn = self.conv.norm_set(gamma, underline(phi), ty)
            if not isinstance(tyn, SProd):
                raise ProjectionOnNonProduct(
                    f"first projection of an element of {_show(tyn)}",
                    span=e.span, phi=phi)
            return EFst(u, span=e.span), tyn.left
        if isinstance(e, ESnd):
            u, ty = self.infer_elt(gamma, phi, e.elt)
            tyn = self.conv.norm_set(gamma, underline(phi), ty)
            if not isinstance(tyn, SProd):
                raise ProjectionOnNonProduct(
                    f"second projection of an element of {_show(tyn)}",
                    span=e.span, phi=phi)
            return ESnd(u, span=e.span), tyn.right
        if isinstance(e, ENatInst):
            if phi.elts:
                raise LinearityError(
                    "instantiating a natural element uses no element "
                    f"variables, but the context provides "
                    f"{', '.join(phi.elt_names)}", span=e.span, phi=phi)
            fn, fty = self.infer_meta(gamma, e.fn)
            ftyn = self.conv.norm_mty(gamma, fty)
            if not isinstance(ftyn, TForall):
                raise TypeMismatch(
                    f"instantiated a term of type {_show(ftyn)}; a natural "
                    "element was expected", span=e.span, phi=phi)
            b = self.check_obj(gamma, d_minus(phi), e.obj, ftyn.cat)
            return (ENatInst(fn, b, span=e.span),
                    substitute(ftyn.body, omap={ftyn.hint: b}))
        if isinstance(e, EProjElt):
            if phi.elts:
                raise LinearityError(
                    "projecting a graph element uses no element variables, "
                    f"but the context provides {', '.join(phi.elt_names)}",
                    span=e.span, phi=phi)
            b, C = self.infer_obj(gamma, d_minus(phi), e.obj)
            Cn = self.conv.norm_cat(gamma, C)
            if not isinstance(Cn, CGraph):
                raise TypeMismatch(
                    f"element projection of an object of {_show(Cn)}",
                    span=e.span, phi=phi)
            ty = substitute(Cn.body, omap={Cn.aname: OProjNeg(b),
                                           Cn.bname: OProjPos(b)})
            return EProjElt(b, span=e.span), ty
        if isinstance(e, EHomElim):
            if e.motive is None:
                raise FullGeneralityError(
                    "cannot infer the type of a hom eliminator without a "
                    "motive annotation", span=e.span, phi=phi)
            out = self._check_homelim(gamma, phi, e, None)
            ty = substitute(out.motive.body,
                            omap={out.motive.aname: out.b1,
                                  out.motive.bname: out.b2})
            return out, ty
        if isinstance(e, ETensorPair):
            return self._infer_tensor_pair(gamma, phi, e)
        if isinstance(e, EUnit):
            return e, SOne()
        raise TypeMismatch(
            f"cannot infer a type for this element; check it against an "
            "expected set", span=e.span, phi=phi)

    def _require_single_use(self, phi, e):
        if len(phi.elts) != 1 or phi.elts[0][0] != e.name:
            if e.name not in phi.elt_names:
                raise ScopeError(f"element variable {e.name} not in context",
                                 span=e.span, phi=phi)
            unused = [n for n in phi.elt_names if n != e.name]
            raise LinearityError(
                f"element variable{'s' if len(unused) > 1 else ''} "
                f"{', '.join(unused)} not used", span=e.span, phi=phi)

    def _infer_tensor_pair(self, gamma, phi, e):
        sl = split_slices(phi, [ordered_fv_elt(e.left),
                                ordered_fv_elt(e.right)], span=e.span)
        psi_s = phi.slice(*sl[0])
        psi_t = phi.slice(*sl[1])
        pivot = psi_s.objs[-1][0]
        if not (isinstance(e.obj, OVar) and e.obj.name == pivot):
            raise TypeMismatch(
                "cannot infer a tensor type unless the witness object is "
                "the pivot context variable; check the pair against an "
                "expected tensor", span=e.span, phi=phi)
        D = psi_s.objs[-1][1]
        if not is_small(self.conv.norm_cat(gamma, D), self.sig, gamma):
            raise NotSmall(
                f"tensors are taken over small categories only, but "
                f"{_show(D)} is not small", span=e.span, phi=phi)
        l, lty = self.infer_elt(gamma, psi_s, e.left)
        r, rty = self.infer_elt(gamma, psi_t, e.right)
        h = fresh("m")
        P = generalize_set(lty, psi_s.objs[0][0], pivot,
                           psi_s.objs[0][0], h)
        Q = generalize_set(rty, pivot, psi_t.objs[-1][0],
                           h, psi_t.objs[-1][0])
        return (ETensorPair(e.obj, l, r, span=e.span),
                STensor(h, D, P, Q))

    def _check_homelim(self, gamma, phi, e, R):
        """Check (R given) or synthesize (R None, motive required) a hom
        eliminator; returns the elaborated node."""
        if e.motive is not None:
            C = self.check_cat(gamma, e.motive.cat)
        else:
            _, C = self.infer_obj(gamma, d_minus(phi), e.b1)
        b1 = self.check_obj(gamma, d_minus(phi), e.b1, C)
        b2 = self.check_obj(gamma, d_plus(phi), e.b2, C)
        scrut = self.check_elt(gamma, phi, e.scrut, SHom(C, b1, b2))
        am, bm = fresh("am"), fresh("bm")
        if e.motive is not None:
            body = substitute(e.motive.body,
                              omap={e.motive.aname: OVar(am),
                                    e.motive.bname: OVar(bm)})
            body = self.check_set(gamma, DoubleCtx(am, C, bm, C), body)
            motive = Motive(am, bm, C, body)
            if R is not None:
                inst = substitute(body, omap={am: b1, bm: b2})
                if not self.conv.equal_set(gamma, underline(phi), inst, R):
                    raise TypeMismatch(
                        f"the motive instantiates to {_show(inst)}, but "
                        f"{_show(R)} was expected", span=e.span, phi=phi)
        else:
            xi = underline(phi)
            nn, pn = xi.d_minus[0], xi.d_plus[0]
            if not (isinstance(b1, OVar) and b1.name == nn
                    and isinstance(b2, OVar) and b2.name == pn):
                raise FullGeneralityError(
                    "cannot infer a motive: the eliminator's endpoints must "
                    "be the context's boundary variables; annotate the "
                    "eliminator with an explicit motive", span=e.span,
                    phi=phi)
            body = generalize_set(R, nn, pn, am, bm)
            body = self.check_set(gamma, DoubleCtx(am, C, bm, C), body)
            motive = Motive(am, bm, C, body)
        a = fresh(e.hint)
        cty = substitute(motive.body, omap={am: OVar(a), bm: OVar(a)})
        cont = substitute(e.cont, omap={e.hint: OVar(a)})
        cont = self.check_elt(gamma, TransCtx(((a, C),)), cont, cty)
        return EHomElim(a, cont, b1, scrut, b2, motive, span=e.span)

    def check_elt(self, gamma, phi: TransCtx, e, R):
        if isinstance(e, EHomElim):
            out = self._check_homelim(gamma, phi, e, R)
            if out.motive is not None and e.motive is None:
                pass  # motive built from R, no further comparison needed
            return out
        if isinstance(e, ETensorElim):
            return self._check_tensor_elim(gamma, phi, e, R)
        if isinstance(e, (ERLam, ELLam, ETensorPair, EPair, EUnit, ERefl)):
            Rn = self.conv.norm_set(gamma, underline(phi), R)
            if isinstance(e, ERLam):
                if not isinstance(Rn, SRHom):
                    raise TypeMismatch(
                        f"right abstraction checked against {_show(Rn)}",
                        span=e.span, phi=phi)
                x, a = fresh(e.xname), fresh(e.aname)
                dom = substitute(Rn.dom, omap={Rn.hint: OVar(a)})
                cod = substitute(Rn.cod, omap={Rn.hint: OVar(a)})
                phi2 = TransCtx(phi.objs + ((a, Rn.cat),),
                                phi.elts + ((x, dom),))
                body = substitute(e.body, omap={e.aname: OVar(a)},
                                  emap={e.xname: EVar(x)})
                return ERLam(x, a, self.check_elt(gamma, phi2, body, cod),
                             span=e.span)
            if isinstance(e, ELLam):
                if not isinstance(Rn, SLHom):
                    raise TypeMismatch(
                        f"left abstraction checked against {_show(Rn)}",
                        span=e.span, phi=phi)
                x, a = fresh(e.xname), fresh(e.aname)
                dom = substitute(Rn.dom, omap={Rn.hint: OVar(a)})
                cod = substitute(Rn.cod, omap={Rn.hint: OVar(a)})
                phi2 = TransCtx(((a, Rn.cat),) + phi.objs,
                                ((x, dom),) + phi.elts)
                body = substitute(e.body, omap={e.aname: OVar(a)},
                                  emap={e.xname: EVar(x)})
                return ELLam(x, a, self.check_elt(gamma, phi2, body, cod),
                             span=e.span)
            if isinstance(e, ETensorPair):
                if not isinstance(Rn, STensor):
                    raise TypeMismatch(
                        f"tensor pair checked against {_show(Rn)}",
                        span=e.span, phi=phi)
                sl = split_slices(phi, [ordered_fv_elt(e.left),
                                        ordered_fv_elt(e.right)],
                                  span=e.span)
                psi_s = phi.slice(*sl[0])
                psi_t = phi.slice(*sl[1])
                b = self.check_obj(gamma, d_plus(psi_s), e.obj, Rn.cat)
                l = self.check_elt(gamma, psi_s, e.left,
                                   substitute(Rn.left, omap={Rn.hint: b}))
                r = self.check_elt(gamma, psi_t, e.right,
                                   substitute(Rn.right, omap={Rn.hint: b}))
                return ETensorPair(b, l, r, span=e.span)
            if isinstance(e, EPair):
                if not isinstance(Rn, SProd):
                    raise TypeMismatch(
                        f"pair checked against {_show(Rn)}", span=e.span,
                        phi=phi)
                return EPair(self.check_elt(gamma, phi, e.left, Rn.left),
                             self.check_elt(gamma, phi, e.right, Rn.right),
                             span=e.span)
            if isinstance(e, EUnit):
                if not isinstance(Rn, SOne):
                    raise TypeMismatch(
                        f"the trivial element checked against {_show(Rn)}",
                        span=e.span, phi=phi)
                return e
            # ERefl
            if not isinstance(Rn, SHom):
                raise TypeMismatch(
                    f"an identity element checked against {_show(Rn)}",
                    span=e.span, phi=phi)
            if phi.elts:
                raise LinearityError(
                    "an identity element uses no element variables, but the "
                    f"context provides {', '.join(phi.elt_names)}",
                    span=e.span, phi=phi)
            b = self.check_obj(gamma, d_minus(phi), e.obj, Rn.cat)
            sc = d_minus(phi)
            if not (self.conv.equal_obj(gamma, sc, b, Rn.src, Rn.cat)
                    and self.conv.equal_obj(gamma, sc, b, Rn.tgt, Rn.cat)):
                raise EndpointMismatch(
                    f"identity at {_show(b)} checked against "
                    f"{_show(Rn)}", span=e.span, phi=phi)
            return ERefl(b, span=e.span)
        out, ty = self.infer_elt(gamma, phi, e)
        if not self.conv.equal_set(gamma, underline(phi), ty, R):
            raise TypeMismatch(
                f"element of {_show(ty)} where an element of {_show(R)} was "
                "expected", span=e.span, phi=phi)
        return out

    def _check_tensor_elim(self, gamma, phi, e, R):
        inner = ordered_fv_elt(e.cont)
        if inner.count(e.xname) != 1 or inner.count(e.yname) != 1:
            raise LinearityError(
                "a tensor eliminator must use each bound variable exactly "
                "once in its continuation", span=e.span, phi=phi)
        i = inner.index(e.xname)
        if i + 1 >= len(inner) or inner[i + 1] != e.yname:
            raise LinearityError(
                "the bound variables of a tensor eliminator must be used "
                "adjacently and in order in its continuation", span=e.span,
                phi=phi)
        pre, post = inner[:i], inner[i + 2:]
        sl = split_slices(phi, [pre, ordered_fv_elt(e.scrut), post],
                          span=e.span)
        i0, j0 = sl[1]
        phi_m = phi.slice(*sl[1])
        scrut, sty = self.infer_elt(gamma, phi_m, e.scrut)
        styn = self.conv.norm_set(gamma, underline(phi_m), sty)
        if not isinstance(styn, STensor):
            raise TypeMismatch(
                f"tensor elimination of an element of {_show(styn)}",
                span=e.span, phi=phi)
        x, b, y = fresh(e.xname), fresh(e.bname), fresh(e.yname)
        P = substitute(styn.left, omap={styn.hint: OVar(b)})
        Q = substitute(styn.right, omap={styn.hint: OVar(b)})
        phi_c = TransCtx(
            phi.objs[:i0 + 1] + ((b, styn.cat),) + phi.objs[j0:],
            phi.elts[:i0] + ((x, P), (y, Q)) + phi.elts[j0:])
        cont = substitute(e.cont, omap={e.bname: OVar(b)},
                          emap={e.xname: EVar(x), e.yname: EVar(y)})
        cont = self.check_elt(gamma, phi_c, cont, R)
        return ETensorElim(scrut, x, b, y, cont, span=e.span)

    # ------------------------------------------------------------------
    # meta layer

    def check_meta_type(self, gamma, A):
        if isinstance(A, (TPi, TSigma)):
            dom = self.check_meta_type(gamma, A.dom)
            x = fresh(A.hint)
            cod = substitute(A.cod, mmap={A.hint: MVar(x)})
            cod = self.check_meta_type({**gamma, x: dom}, cod)
            return type(A)(x, dom, cod, span=A.span)
        if isinstance(A, TId):
            ty = self.check_meta_type(gamma, A.ty)
            return TId(ty, self.check_meta(gamma, A.lhs, ty),
                       self.check_meta(gamma, A.rhs, ty), span=A.span)
        if isinstance(A, (TSmallCat, TCat)):
            return A
        if isinstance(A, (TFun, TProf)):
            return type(A)(self.check_cat(gamma, A.dom),
                           self.check_cat(gamma, A.cod), span=A.span)
        if isinstance(A, TForall):
            cat = self.check_cat(gamma, A.cat)
            a = fresh(A.hint)
            body = substitute(A.body, omap={A.hint: OVar(a)})
            body = self.check_set(gamma, SingleCtx(a, cat), body)
            return TForall(a, cat, body, span=A.span)
        raise TypeMismatch(f"not a type expression: {A!r}", span=A.span)

    def infer_meta(self, gamma, t):
        if isinstance(t, MVar):
            if t.name in gamma:
                return t, gamma[t.name]
            d = self.sig.lookup(t.name)
            if isinstance(d, (DConst, DDef)):
                return t, d.ty
            raise ScopeError(f"unknown name {t.name}", span=t.span)
        if isinstance(t, MApp):
            fn, fty = self.infer_meta(gamma, t.fn)
            ftyn = self.conv.norm_mty(gamma, fty)
            if not isinstance(ftyn, TPi):
                raise TypeMismatch(
                    f"applied a term of type {_show(ftyn)}", span=t.span)
            arg = self.check_meta(gamma, t.arg, ftyn.dom)
            return (MApp(fn, arg, span=t.span),
                    substitute(ftyn.cod, mmap={ftyn.hint: arg}))
        if isinstance(t, MFst):
            u, ty = self.infer_meta(gamma, t.term)
            tyn = self.conv.norm_mty(gamma, ty)
            if not isinstance(tyn, TSigma):
                raise ProjectionOnNonProduct(
                    f"first projection of a term of {_show(tyn)}",
                    span=t.span)
            return MFst(u, span=t.span), tyn.dom
        if isinstance(t, MSnd):
            u, ty = self.infer_meta(gamma, t.term)
            tyn = self.conv.norm_mty(gamma, ty)
            if not isinstance(tyn, TSigma):
                raise ProjectionOnNonProduct(
                    f"second projection of a term of {_show(tyn)}",
                    span=t.span)
            return (MSnd(u, span=t.span),
                    substitute(tyn.cod, mmap={tyn.hint: MFst(u)}))
        if isinstance(t, MRefl):
            u, ty = self.infer_meta(gamma, t.term)
            return MRefl(u, span=t.span), TId(ty, u, u)
        if isinstance(t, MQuote):
            cat = self.check_cat(gamma, t.cat)
            small = is_small(self.conv.norm_cat(gamma, cat), self.sig, gamma)
            return (MQuote(cat, span=t.span),
                    TSmallCat() if small else TCat())
        if isinstance(t, MFunLam):
            cat = self.check_cat(gamma, t.cat)
            a = fresh(t.hint)
            body = substitute(t.body, omap={t.hint: OVar(a)})
            body, cod = self.infer_obj(gamma, SingleCtx(a, cat), body)
            return MFunLam(a, cat, body, span=t.span), TFun(cat, cod)
        if isinstance(t, MProfLam):
            acat = self.check_cat(gamma, t.acat)
            bcat = self.check_cat(gamma, t.bcat)
            a, b = fresh(t.aname), fresh(t.bname)
            body = substitute(t.body, omap={t.aname: OVar(a),
                                            t.bname: OVar(b)})
            body = self.check_set(gamma, DoubleCtx(a, acat, b, bcat), body)
            return (MProfLam(a, acat, b, bcat, body, span=t.span),
                    TProf(acat, bcat))
        if isinstance(t, MNatLam):
            if t.cat is None:
                raise TypeMismatch(
                    "cannot infer the category of a natural-element "
                    "abstraction; check it against a quantified type",
                    span=t.span)
            cat = self.check_cat(gamma, t.cat)
            a = fresh(t.hint)
            body = substitute(t.body, omap={t.hint: OVar(a)})
            phi = TransCtx(((a, cat),))
            body, R = self.infer_elt(gamma, phi, body)
            return MNatLam(a, cat, body, span=t.span), TForall(a, cat, R)
        if isinstance(t, MJ):
            scrut, sty = self.infer_meta(gamma, t.scrut)
            styn = self.conv.norm_mty(gamma, sty)
            if not isinstance(styn, TId):
                raise TypeMismatch(
                    f"identity elimination of a term of {_show(styn)}",
                    span=t.span)
            y, p = fresh(t.yname), fresh(t.pname)
            motive = substitute(t.motive, mmap={t.yname: MVar(y),
                                                t.pname: MVar(p)})
            g2 = {**gamma, y: styn.ty, p: TId(styn.ty, styn.lhs, MVar(y))}
            motive = self.check_meta_type(g2, motive)
            base_ty = substitute(motive, mmap={y: styn.lhs,
                                               p: MRefl(styn.lhs)})
            base = self.check_meta(gamma, t.base, base_ty)
            res = substitute(motive, mmap={y: styn.rhs, p: scrut})
            return MJ(y, p, motive, base, scrut, span=t.span), res
        raise TypeMismatch(
            "cannot infer a type for this term; check it against an "
            "expected type", span=t.span)

    def check_meta(self, gamma, t, A):
        An = self.conv.norm_mty(gamma, A)
        if isinstance(t, MLam):
            if not isinstance(An, TPi):
                raise TypeMismatch(
                    f"abstraction checked against {_show(An)}", span=t.span)
            x = fresh(t.hint)
            body = substitute(t.body, mmap={t.hint: MVar(x)})
            cod = substitute(An.cod, mmap={An.hint: MVar(x)})
            body = self.check_meta({**gamma, x: An.dom}, body, cod)
            return MLam(x, body, span=t.span)
        if isinstance(t, MPair):
            if not isinstance(An, TSigma):
                raise TypeMismatch(
                    f"pair checked against {_show(An)}", span=t.span)
            l = self.check_meta(gamma, t.left, An.dom)
            r = self.check_meta(gamma, t.right,
                                substitute(An.cod, mmap={An.hint: l}))
            return MPair(l, r, span=t.span)
        if isinstance(t, MNatLam) and isinstance(An, TForall):
            if t.cat is not None:
                cat = self.check_cat(gamma, t.cat)
                if not self.conv.equal_cat(gamma, cat, An.cat):
                    raise TypeMismatch(
                        f"abstraction over {_show(cat)} checked against a "
                        f"quantifier over {_show(An.cat)}", span=t.span)
            a = fresh(t.hint)
            body = substitute(t.body, omap={t.hint: OVar(a)})
            ty = substitute(An.body, omap={An.hint: OVar(a)})
            phi = TransCtx(((a, An.cat),))
            body = self.check_elt(gamma, phi, body, ty)
            return MNatLam(a, An.cat, body, span=t.span)
        if isinstance(t, MFunLam) and isinstance(An, TFun):
            cat = self.check_cat(gamma, t.cat)
            if not self.conv.equal_cat(gamma, cat, An.dom):
                raise TypeMismatch(
                    f"functor abstraction over {_show(cat)} checked against "
                    f"{_show(An)}", span=t.span)
            a = fresh(t.hint)
            body = substitute(t.body, omap={t.hint: OVar(a)})
            body = self.check_obj(gamma, SingleCtx(a, An.dom), body, An.cod)
            return MFunLam(a, An.dom, body, span=t.span)
        if isinstance(t, MQuote):
            cat = self.check_cat(gamma, t.cat)
            if isinstance(An, TSmallCat):
                if not is_small(self.conv.norm_cat(gamma, cat), self.sig, gamma):
                    raise UniverseMismatch(
                        f"{_show(cat)} is not small", span=t.span)
                return MQuote(cat, span=t.span)
            if isinstance(An, TCat):
                return MQuote(cat, span=t.span)
            raise TypeMismatch(
                f"quoted category checked against {_show(An)}", span=t.span)
        if isinstance(t, MRefl) and isinstance(An, TId):
            u = self.check_meta(gamma, t.term, An.ty)
            if not (self.conv.equal_meta(gamma, u, An.lhs, An.ty)
                    and self.conv.equal_meta(gamma, u, An.rhs, An.ty)):
                raise TypeMismatch(
                    f"reflexivity at {_show(u)} checked against "
                    f"{_show(An)}", span=t.span)
            return MRefl(u, span=t.span)
        out, ty = self.infer_meta(gamma, t)
        if not self.conv.equal_mty(gamma, ty, An):
            if (isinstance(self.conv.norm_mty(gamma, ty), TCat)
                    and isinstance(An, TSmallCat)):
                raise UniverseMismatch(
                    "a large category cannot be used where a small one is "
                    "required", span=t.span)
            raise TypeMismatch(
                f"term of type {_show(ty)} where {_show(An)} was expected",
                span=t.span)
        return out

    # ------------------------------------------------------------------
    # contexts

    def check_transctx(self, gamma, phi: TransCtx) -> TransCtx:
        objs = tuple((n, self.check_cat(gamma, c)) for n, c in phi.objs)
        elts = []
        for k, (n, R) in enumerate(phi.elts):
            an, ac = objs[k]
            bn, bc = objs[k + 1]
            elts.append((n, self.check_set(gamma, DoubleCtx(an, ac, bn, bc),
                                           R)))
        return TransCtx(objs, tuple(elts))


def check_signature(decls, fuel: int = 256):
    """Check a list of declarations in order, accumulating diagnostics
    and skipping declarations that fail; returns the signature of the
    declarations that checked together with the diagnostics."""
    sig = Signature()
    checker = Checker(sig, fuel)
    diags = []
    for d in decls:
        try:
            if isinstance(d, DBaseCat):
                sig.add(d)
            elif isinstance(d, DConst):
                ty = checker.check_meta_type({}, d.ty)
                sig.add(DConst(d.name, ty, d.kind, d.span))
            elif isinstance(d, DDef):
                ty = checker.check_meta_type({}, d.ty)
                tm = checker.check_meta({}, d.term, ty)
                sig.add(DDef(d.name, ty, tm, d.span))
            elif isinstance(d, DAssert):
                phi = checker.check_transctx({}, d.phi)
                at = checker.check_set({}, underline(phi), d.at)
                lhs = checker.check_elt({}, phi, d.lhs, at)
                rhs = checker.check_elt({}, phi, d.rhs, at)
                sig.add(DAssert(d.name, phi, lhs, rhs, at,
                                d.syntactic_only, d.span))
            else:
                raise TypeMismatch(f"unknown declaration {d!r}")
        except VettError as err:
            diags.append(Diagnostic.from_error(err, getattr(d, "span", None),
                                               phi_printer=format_ctx))
        # conversion caches are per-signature-state; reset definitions
        checker.conv._def_cache.clear()
    return sig, diags


def run_assertion(checker: Checker, da: DAssert) -> str:
    """Dispatch an elaborated equality assertion to conversion; returns
    'pass', 'fail' or 'unknown'.  The syntactic_only flag is a directive
    to skip model evaluation, not to weaken the equality check."""
    verdict = checker.conv.equal_elt({}, da.phi, da.lhs, da.rhs, da.at)
    return {"equal": "pass", "not_equal": "fail",
            "unknown": "unknown"}[verdict]
