"""Concrete syntax: parse/pretty roundtrips, diagnostics and spans."""

import pytest
from hypothesis import given, settings, strategies as st

from vett.frontend import parse_expr, parse_source, pretty, pretty_decl
from vett.errors import ParseError
from vett.syntax import (
    CBase, CProd, CUnit, EFst, ELApp, ELLam, EPair, ERApp, ERefl, ERLam,
    ESnd, ETensorElim, ETensorPair, EUnit, EVar, OVar, SHom, SLHom, SOne,
    SProd, SRHom, STensor, alpha_eq,
)

from conftest import check_source, corpus_files


# ---------------------------------------------------------------------------
# golden roundtrips


ELT_SAMPLES = [
    "x",
    "refl a",
    "()",
    "(fst z, snd z)",
    "rlam x a. x",
    "llam x a. x",
    "f |>[q] x",
    "f <|[q] x",
    "(f |>[q] x) |>[r] y",
    "pair(m, x, y)",
    "ind_tensor(h; x, m, y. pair(m, x, y))",
    "ind_hom(m. refl m; a, f, b)",
    "ind_hom((u, v) : C. Hom C u v; m. refl m; a, f, b)",
    "M ^ a",
    "rlam x a. rlam y b. (f |>[a] x) |>[b] y",
]

SET_SAMPLES = [
    "Hom C a b",
    "P a b",
    "1",
    "Hom C a b & P a b",
    "Hom C a m *(m : C) Hom C m b",
    "P a b |>(b : C) Q a b",
    "Q a b <|(a : C) P a b",
    "(P a m *(m : C) Q m b) |>(b : C) S a b",
    "a in p",
    "p ni a",
]

OBJ_SAMPLES = [
    "a", "()", "(a, b)", "p1 a", "p2 a", "F a", "pi- g", "pi+ g",
    "(a, b, s)", "plam-(a : C. P a b)", "plam+(b : C. P a b)",
]

CAT_SAMPLES = [
    "C", "1", "C * D", "Psh- C", "Psh+ C",
    "Graph(a : C, b : D. P a b)", "splice M",
]

MTY_SAMPLES = [
    "SmallCat", "Cat", "Fun C D", "Prof C D",
    "forall a : C. Hom C a a",
    "(x : SmallCat) -> Cat",
    "(x : SmallCat) * SmallCat",
    "Id SmallCat M N",
]

MTM_SAMPLES = [
    "M", "fun x. x", "funlam a : C. a", "proflam a : C, b : C. Hom C a b",
    "natlam a : C. refl a", "quote C", "fst M", "snd M", "refl M",
    "(M, N)", "J(y p. SmallCat; M; E)",
]


@pytest.mark.parametrize("kind,samples", [
    ("elt", ELT_SAMPLES), ("set", SET_SAMPLES), ("obj", OBJ_SAMPLES),
    ("cat", CAT_SAMPLES), ("mtype", MTY_SAMPLES), ("mterm", MTM_SAMPLES),
])
def test_parse_pretty_roundtrip_samples(kind, samples):
    for src in samples:
        node = parse_expr(kind, src)
        printed = pretty(node)
        back = parse_expr(kind, printed)
        assert alpha_eq(node, back), f"{src!r} -> {printed!r}"
        assert pretty(back) == printed, f"print unstable on {src!r}"


def test_parse_errors_carry_spans():
    with pytest.raises(ParseError) as exc:
        parse_expr("elt", "rlam x . x")
    assert exc.value.span is not None

    decls, diags = parse_source("small category C\ndef oops : := x\n",
                                "f.vett")
    assert diags
    assert "f.vett" in diags[0].render()


def test_keywords_are_reserved():
    # J is the identity-elimination form, not an identifier
    with pytest.raises(ParseError):
        parse_expr("cat", "J")


def test_parse_source_reports_all_decls():
    decls, diags = parse_source(
        "small category C\n"
        "functor F : C -> C\n"
        "profunctor P : C -|-> C\n"
        "def idC : forall a : C. Hom C a a := natlam a. refl a\n"
        "assert t : a : C |- refl a == refl a : Hom C a a\n")
    assert not diags
    assert [type(d).__name__ for d in decls] == [
        "DBaseCat", "DConst", "DConst", "DDef", "DAssert"]


# ---------------------------------------------------------------------------
# corpus roundtrip (acceptance criterion: alpha-stable on every decl)


def roundtrip_decl(d) -> bool:
    printed = pretty_decl(d)
    decls, diags = parse_source(printed)
    if diags or len(decls) != 1:
        return False
    return pretty_decl(decls[0]) == printed


def test_corpus_declarations_roundtrip():
    total = 0
    for path in corpus_files():
        with open(path) as fh:
            decls, diags = parse_source(fh.read(), path)
        assert not diags
        for d in decls:
            assert roundtrip_decl(d), f"{path}: {d.name}"
            total += 1
    assert total > 0


def test_checked_declarations_roundtrip():
    # pretty-printing must also undo the checker's internal renaming
    for path in corpus_files():
        with open(path) as fh:
            decls, sig = check_source(fh.read(), path)
        for d in sig.decls:
            assert roundtrip_decl(d), f"{path}: {d.name}"


# ---------------------------------------------------------------------------
# property-based roundtrip on generated syntax


# the toolchain treats names as one namespace across sorts (the checker
# freshens every binder, so internally a name never serves two sorts);
# generated terms therefore draw object and element names from disjoint
# pools, and binder groups use distinct names within one group
NAMES = ["a", "b", "c"]
EVARS = ["s", "t", "u"]
ENAMES = st.sampled_from(["x", "y", "z"])
ONAMES = st.sampled_from(["a", "b", "c"])
EYNAMES = st.sampled_from(["w", "v"])
CATS = st.sampled_from([CBase("C"), CBase("D"), CUnit(),
                        CProd(CBase("C"), CBase("D"))])
OBJS = st.sampled_from([OVar(n) for n in NAMES])


def sets(depth):
    base = st.one_of(
        st.builds(SHom, CATS, OBJS, OBJS),
        st.just(SOne()),
    )
    if depth == 0:
        return base
    sub = sets(depth - 1)
    return st.one_of(
        base,
        st.builds(STensor, st.sampled_from(NAMES), CATS, sub, sub),
        st.builds(SRHom, st.sampled_from(NAMES), CATS, sub, sub),
        st.builds(SLHom, st.sampled_from(NAMES), CATS, sub, sub),
        st.builds(SProd, sub, sub),
    )


def elts(depth):
    base = st.one_of(
        st.sampled_from([EVar(n) for n in EVARS]),
        st.builds(ERefl, OBJS),
        st.just(EUnit()),
    )
    if depth == 0:
        return base
    sub = elts(depth - 1)
    return st.one_of(
        base,
        st.builds(ERLam, ENAMES, ONAMES, sub),
        st.builds(ELLam, ENAMES, ONAMES, sub),
        st.builds(ERApp, fn=sub, arg=sub, obj=OBJS),
        st.builds(ELApp, fn=sub, arg=sub, obj=OBJS),
        st.builds(ETensorPair, obj=OBJS, left=sub, right=sub),
        st.builds(ETensorElim, scrut=sub, xname=ENAMES, bname=ONAMES,
                  yname=EYNAMES, cont=sub),
        st.builds(EPair, sub, sub),
        st.builds(EFst, sub),
        st.builds(ESnd, sub),
    )


@settings(max_examples=200, deadline=None)
@given(sets(3))
def test_roundtrip_property_sets(P):
    back = parse_expr("set", pretty(P))
    assert alpha_eq(P, back)


@settings(max_examples=200, deadline=None)
@given(elts(3))
def test_roundtrip_property_elts(e):
    back = parse_expr("elt", pretty(e))
    assert alpha_eq(e, back)
