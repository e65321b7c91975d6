"""Substitution calculus laws, verified exhaustively at bounded size.

The enumeration fixes one base category A and two postulated natural
elements c1, c2 : forall a : A. Hom A a a.  Contexts are the hom chains
a0 : A, x1 : Hom A a0 a1, a1 : A, ... with up to three element
variables; substitutions between them assign each element variable
either an element variable of the target (slice of length one) or a
closed hom over the pivot (refl, c1, c2; slice of length zero).  Every
such substitution is enumerated, so the law checks below are exhaustive
over this family.
"""

import itertools

from vett.frontend import parse_expr
from vett.subst import (
    OSubstDouble, OSubstSingle, TransSubst, d_minus_subst, d_plus_subst,
    hcomp_subst, id_subst, invert_decompose, subst_elt, substitute,
    underline_subst, vcomp_subst,
)
from vett.syntax import (
    CBase, ENatInst, ERefl, ETensorPair, EVar, MVar, OVar, SHom, STensor,
    TransCtx, alpha_eq,
)

A = CBase("A")


def hom(x, y):
    return SHom(A, OVar(x), OVar(y))


def chain_ctx(prefix: str, n: int) -> TransCtx:
    objs = tuple((f"{prefix}a{i}", A) for i in range(n + 1))
    elts = tuple((f"{prefix}x{i}", hom(f"{prefix}a{i - 1}", f"{prefix}a{i}"))
                 for i in range(1, n + 1))
    return TransCtx(objs, elts)


def closed_homs(pivot: str):
    """Elements of Hom A pivot pivot over the empty slice at pivot."""
    return [ERefl(OVar(pivot)),
            ENatInst(MVar("c1"), OVar(pivot)),
            ENatInst(MVar("c2"), OVar(pivot))]


def enumerate_subs(dom: TransCtx, cod: TransCtx):
    """All substitutions instantiating dom by entries over cod."""
    m, n = len(dom.elts), len(cod.elts)
    out = []
    # monotone boundary indices with steps of 0 or 1, covering all of cod
    for steps in itertools.product((0, 1), repeat=m):
        if sum(steps) != n:
            continue
        js = [0]
        for s in steps:
            js.append(js[-1] + s)
        objs = tuple((dom.objs[i][0], OVar(cod.objs[js[i]][0]))
                     for i in range(m + 1))
        slots = []
        for i, s in enumerate(steps):
            if s == 1:
                slots.append([EVar(cod.elts[js[i + 1] - 1][0])])
            else:
                slots.append(closed_homs(cod.objs[js[i]][0]))
        for choice in itertools.product(*slots):
            elts = tuple((dom.elts[i][0], choice[i]) for i in range(m))
            out.append(TransSubst(objs, elts))
    return out


def sub_eq(phi: TransSubst, psi: TransSubst) -> bool:
    return (len(phi.objs) == len(psi.objs)
            and len(phi.elts) == len(psi.elts)
            and all(a == b and alpha_eq(x, y)
                    for (a, x), (b, y) in zip(phi.objs, psi.objs))
            and all(a == b and alpha_eq(x, y)
                    for (a, x), (b, y) in zip(phi.elts, psi.elts)))


MAX = 3
CTXS = {(p, n): chain_ctx(p, n)
        for p in ("d", "c", "e", "f") for n in range(MAX + 1)}


def all_subs(pd, pc):
    """[(dom, cod, sub)] for all context sizes with the given prefixes."""
    out = []
    for m in range(MAX + 1):
        for n in range(m + 1):
            dom, cod = CTXS[(pd, m)], CTXS[(pc, n)]
            for s in enumerate_subs(dom, cod):
                out.append((dom, cod, s))
    return out


# ---------------------------------------------------------------------------
# vertical composition: unit and associativity


def check_vertical_units():
    count = 0
    for dom, cod, phi in all_subs("d", "c"):
        assert sub_eq(vcomp_subst(phi, id_subst(cod)), phi)
        assert sub_eq(vcomp_subst(id_subst(dom), phi), phi)
        count += 1
    return count


def check_vertical_assoc():
    count = 0
    for m in range(MAX + 1):
        for n in range(m + 1):
            for p in range(n + 1):
                for q in range(p + 1):
                    dm, cn = CTXS[("d", m)], CTXS[("c", n)]
                    ep, fq = CTXS[("e", p)], CTXS[("f", q)]
                    for phi in enumerate_subs(dm, cn):
                        for psi in enumerate_subs(cn, ep):
                            for chi in enumerate_subs(ep, fq):
                                lhs = vcomp_subst(vcomp_subst(phi, psi), chi)
                                rhs = vcomp_subst(phi, vcomp_subst(psi, chi))
                                assert sub_eq(lhs, rhs)
                                count += 1
    return count


def sample_elts(phi: TransCtx):
    """A few canonical elements over a hom-chain context: the single
    variable for chains of length one, nested tensor pairs otherwise."""
    names = phi.elt_names
    if len(names) == 0:
        return closed_homs(phi.objs[0][0])
    e = EVar(names[0])
    for k in range(1, len(names)):
        e = ETensorPair(OVar(phi.objs[k][0]), e, EVar(names[k]))
    return [e]


def check_vertical_action():
    """Functoriality of the action: s[phi][psi] = s[phi . psi]."""
    count = 0
    for m in range(MAX + 1):
        for n in range(m + 1):
            for p in range(n + 1):
                dm, cn, ep = CTXS[("d", m)], CTXS[("c", n)], CTXS[("e", p)]
                for s in sample_elts(dm):
                    for phi in enumerate_subs(dm, cn):
                        for psi in enumerate_subs(cn, ep):
                            one = subst_elt(subst_elt(s, phi), psi)
                            two = subst_elt(s, vcomp_subst(phi, psi))
                            assert alpha_eq(one, two)
                            count += 1
    return count


def test_vertical_unit_laws():
    assert check_vertical_units() > 0


def test_vertical_associativity():
    assert check_vertical_assoc() > 0


def test_vertical_action_functoriality():
    assert check_vertical_action() > 0


# ---------------------------------------------------------------------------
# horizontal composition: unit, associativity, decomposition


def empty_sub_at(phi: TransSubst, side: str) -> TransSubst:
    name, obj = (phi.objs[0] if side == "left" else phi.objs[-1])
    return TransSubst(((name, obj),), ())


def split_prefix(dom: TransCtx, k: int):
    """dom = slice(0..k) glued with slice(k..end)."""
    return dom.slice(0, k), dom.slice(k, len(dom.elts))


def check_horizontal_laws():
    count = 0
    for m in range(MAX + 1):
        for n in range(m + 1):
            dom, cod = CTXS[("d", m)], CTXS[("c", n)]
            for phi in enumerate_subs(dom, cod):
                # units: gluing the empty substitution at either boundary
                left = TransSubst((phi.objs[0],), ())
                right = TransSubst((phi.objs[-1],), ())
                assert sub_eq(hcomp_subst(left, phi), phi)
                assert sub_eq(hcomp_subst(phi, right), phi)
                # decomposition inverts gluing at every split point
                for k in range(m + 1):
                    d1, d2 = split_prefix(dom, k)
                    phi1 = TransSubst(phi.objs[:k + 1], phi.elts[:k])
                    phi2 = TransSubst(phi.objs[k:], phi.elts[k:])
                    glued = hcomp_subst(phi1, phi2)
                    assert sub_eq(glued, phi)
                    back1, back2 = invert_decompose(glued, d1, d2)
                    assert sub_eq(back1, phi1) and sub_eq(back2, phi2)
                    count += 1
    return count


def check_horizontal_assoc():
    count = 0
    for m in range(MAX + 1):
        dom, cod = CTXS[("d", m)], CTXS[("c", m)]
        sub = enumerate_subs(dom, cod)[0]  # the variable-to-variable one
        for i in range(m + 1):
            for j in range(i, m + 1):
                p1 = TransSubst(sub.objs[:i + 1], sub.elts[:i])
                p2 = TransSubst(sub.objs[i:j + 1], sub.elts[i:j])
                p3 = TransSubst(sub.objs[j:], sub.elts[j:])
                lhs = hcomp_subst(hcomp_subst(p1, p2), p3)
                rhs = hcomp_subst(p1, hcomp_subst(p2, p3))
                assert sub_eq(lhs, rhs)
                count += 1
    return count


def test_horizontal_unit_and_decomposition():
    assert check_horizontal_laws() > 0


def test_horizontal_associativity():
    assert check_horizontal_assoc() > 0


# ---------------------------------------------------------------------------
# boundary projections commute with composition


def check_boundary_compat():
    count = 0
    for m in range(MAX + 1):
        for n in range(m + 1):
            for p in range(n + 1):
                dm, cn, ep = CTXS[("d", m)], CTXS[("c", n)], CTXS[("e", p)]
                for phi in enumerate_subs(dm, cn):
                    for psi in enumerate_subs(cn, ep):
                        comp = vcomp_subst(phi, psi)
                        omap, emap = psi.maps()
                        for proj in (d_minus_subst, d_plus_subst):
                            one = proj(comp)
                            two = proj(phi)
                            assert one.name == two.name
                            assert alpha_eq(
                                one.obj,
                                substitute(two.obj, omap=omap, emap=emap))
                        u1 = underline_subst(comp)
                        u2 = underline_subst(phi)
                        assert type(u1) is type(u2)
                        count += 1
    return count


def test_boundary_projections_commute():
    assert check_boundary_compat() > 0


# ---------------------------------------------------------------------------
# the basic capture-avoiding engine


def test_substitute_avoids_capture():
    e = parse_expr("elt", "rlam x a. f |>[a] x")
    out = substitute(e, emap={"f": EVar("x")})
    # the free x must not be captured by the binder x
    assert alpha_eq(out, parse_expr("elt", "rlam w a. x |>[a] w"))


def test_substitute_object_names_under_binders():
    P = parse_expr("set", "Hom C a m *(m : C) Hom C m b")
    out = substitute(P, omap={"a": OVar("q")})
    assert alpha_eq(out, parse_expr("set", "Hom C q m *(m : C) Hom C m b"))
    # substituting the bound name's own hint must not touch bound uses
    out2 = substitute(P, omap={"m": OVar("q")})
    assert alpha_eq(out2, P)
