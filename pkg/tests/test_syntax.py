"""Core syntax: alpha equivalence, contexts, boundaries and the ordered
free-variable discipline."""

import pytest

from vett.errors import (BoundaryMismatch, ContextSplitError, DuplicateName,
                         LinearityError, ScopeError)
from vett.frontend import parse_expr
from vett.syntax import (
    CBase, DoubleCtx, EVar, OVar, SHom, SingleCtx, TransCtx, alpha_eq,
    d_minus, d_plus, fresh, hcomp_ctx, hint_of, ordered_fv_elt, split_slices,
    underline,
)


def elt(src):
    return parse_expr("elt", src)


def set_(src):
    return parse_expr("set", src)


# ---------------------------------------------------------------------------
# fresh names


def test_fresh_names_are_distinct_and_keep_hints():
    a, b = fresh("x"), fresh("x")
    assert a != b
    assert hint_of(a) == "x" and hint_of(b) == "x"
    assert hint_of("plain") == "plain"


# ---------------------------------------------------------------------------
# alpha equivalence


def test_alpha_eq_reflexive_on_parsed_terms():
    for src in ["rlam x a. x", "pair(b, s, t)",
                "ind_tensor(h; x, m, y. pair(m, x, y))",
                "ind_hom((u, v) : C. Hom C u v; m. refl m; a, f, b)"]:
        assert alpha_eq(elt(src), elt(src))


def test_alpha_eq_ignores_bound_names():
    assert alpha_eq(elt("rlam x a. x"), elt("rlam y b. y"))
    assert alpha_eq(elt("llam x a. x |>[q] z"), elt("llam w c. w |>[q] z"))
    assert alpha_eq(set_("Hom C a m *(m : C) Hom C m b"),
                    set_("Hom C a n *(n : C) Hom C n b"))


def test_alpha_eq_free_names_are_rigid():
    assert not alpha_eq(elt("rlam x a. y"), elt("rlam x a. z"))
    assert not alpha_eq(set_("Hom C a b"), set_("Hom C a c"))
    assert not alpha_eq(set_("Hom C a b"), set_("Hom D a b"))


def test_alpha_eq_rejects_variable_capture_swaps():
    # binder must not be identified with a free variable of the other side
    assert not alpha_eq(elt("rlam x a. x"), elt("rlam y b. x"))
    assert not alpha_eq(elt("rlam x a. z"), elt("rlam z b. z"))


def test_alpha_eq_distinguishes_structure():
    assert not alpha_eq(elt("rlam x a. x"), elt("llam x a. x"))
    assert not alpha_eq(elt("fst z"), elt("snd z"))
    assert not alpha_eq(set_("P a b"), set_("Q a b"))


# ---------------------------------------------------------------------------
# transformation contexts


def hom(x, y):
    return SHom(CBase("A"), OVar(x), OVar(y))


def ctx(*names):
    """Alternating context a0, x0 : Hom a0 a1, a1, ... over A."""
    objs = tuple((n, CBase("A")) for n in names)
    elts = tuple((f"x{names[i]}{names[i + 1]}", hom(names[i], names[i + 1]))
                 for i in range(len(names) - 1))
    return TransCtx(objs, elts)


def test_transctx_shape_is_enforced():
    with pytest.raises(ValueError):
        TransCtx((), ())
    with pytest.raises(ValueError):
        TransCtx((("a", CBase("A")),), (("x", hom("a", "a")),))
    with pytest.raises(DuplicateName):
        TransCtx((("a", CBase("A")), ("a", CBase("A"))),
                 (("x", hom("a", "a")),))


def test_boundaries_and_underline():
    phi = ctx("a", "b", "c")
    assert d_minus(phi) == SingleCtx("a", CBase("A"))
    assert d_plus(phi) == SingleCtx("c", CBase("A"))
    u = underline(phi)
    assert isinstance(u, DoubleCtx)
    assert u.d_minus == ("a", CBase("A")) and u.d_plus == ("c", CBase("A"))
    single = underline(ctx("a"))
    assert isinstance(single, SingleCtx)
    assert single.d_minus == single.d_plus == ("a", CBase("A"))


def test_hcomp_ctx_requires_matching_pivot():
    phi, psi = ctx("a", "b"), ctx("b", "c")
    glued = hcomp_ctx(phi, psi)
    assert glued.obj_names == ["a", "b", "c"]
    assert len(glued) == 2
    with pytest.raises(BoundaryMismatch):
        hcomp_ctx(ctx("a", "b"), ctx("c", "d"))


def test_slice_bounds():
    phi = ctx("a", "b", "c")
    assert phi.slice(0, 1).elt_names == ["xab"]
    assert phi.slice(1, 1).elt_names == []
    with pytest.raises(Exception):
        phi.slice(2, 1)


# ---------------------------------------------------------------------------
# ordered free variables


def test_ordered_fv_application_order():
    # right application: function first; left application: argument first
    assert ordered_fv_elt(elt("f |>[q] x")) == ["f", "x"]
    assert ordered_fv_elt(elt("f <|[q] x")) == ["x", "f"]
    assert ordered_fv_elt(elt("pair(m, x, y)")) == ["x", "y"]
    assert ordered_fv_elt(elt("rlam x a. f |>[a] x")) == ["f"]
    assert ordered_fv_elt(elt("llam x a. f <|[a] x")) == ["f"]


def test_ordered_fv_tensor_elim_interleaves_scrutinee():
    e = elt("ind_tensor(h; x, m, y. (f |>[m] x) |>[q] y)")
    assert ordered_fv_elt(e) == ["f", "h"]
    e = elt("ind_tensor(h; x, m, y. pair(m, x, g <|[m] y))")
    assert ordered_fv_elt(e) == ["h", "g"]


def test_split_slices_accepts_exact_cover():
    phi = ctx("a", "b", "c")
    assert split_slices(phi, [["xab"], ["xbc"]]) == [(0, 1), (1, 2)]
    assert split_slices(phi, [[], ["xab", "xbc"]]) == [(0, 0), (0, 2)]


def test_split_slices_classifies_failures():
    phi = ctx("a", "b", "c")
    with pytest.raises(LinearityError):
        split_slices(phi, [["xab"], ["xab", "xbc"]])   # duplicated
    with pytest.raises(LinearityError):
        split_slices(phi, [["xab"], []])             # dropped
    with pytest.raises(ContextSplitError):
        split_slices(phi, [["xbc"], ["xab"]])         # transposed
    with pytest.raises(ScopeError):
        split_slices(phi, [["xab"], ["zz"]])         # unknown
