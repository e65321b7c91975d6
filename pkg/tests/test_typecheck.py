"""Type checker: positive checking, error taxonomy, and the ordered-
linear variable discipline.

The rejection suite enumerates deliberately non-linear or ill-ordered
element terms — nested tensor pairs whose variable sequence duplicates,
drops, or permutes the element variables of the ambient context — and
requires every one to be rejected with a linearity or context-split
error, never accepted and never misreported as a type mismatch.
"""

import itertools

import pytest

from vett.errors import (ContextSplitError, EndpointMismatch, LinearityError,
                         ScopeError, TypeMismatch, VettError)
from vett.frontend import parse_expr, parse_source
from vett.syntax import (CBase, ETensorPair, EVar, OVar, TransCtx)
from vett.typecheck import Checker, check_signature

from conftest import check_source


SIG_SRC = """\
small category A
profunctor P : A -|-> A
profunctor Q : A -|-> A
def c1 : forall a : A. Hom A a a := natlam a. refl a
"""


@pytest.fixture(scope="module")
def checker():
    _, sig = check_source(SIG_SRC)
    return Checker(sig)


A = CBase("A")


def pctx(n: int) -> TransCtx:
    """o0 : A, v1 : P o0 o1, o1 : A, ..., vn : P o(n-1) on, on : A."""
    objs = tuple((f"o{i}", A) for i in range(n + 1))
    elts = tuple((f"v{i}", parse_expr("set", f"P o{i - 1} o{i}"))
                 for i in range(1, n + 1))
    return TransCtx(objs, elts)


def chain_type(n: int):
    """The right-nested tensor P o0 m1 * (P m1 m2 * ... * P m(n-1) on)."""
    def build(i, lo):
        if i == n:
            return f"P {lo} o{n}"
        return f"(P {lo} m{i} *(m{i} : A) {build(i + 1, f'm{i}')})"
    return parse_expr("set", build(1, "o0"))


def chain_pair(seq):
    """Right-nested tensor pair over the variables v_seq."""
    def build(i):
        if i == len(seq) - 1:
            return EVar(f"v{seq[i]}")
        return ETensorPair(OVar(f"o{i + 1}"), EVar(f"v{seq[i]}"), build(i + 1))
    return build(0)


# ---------------------------------------------------------------------------
# positive checking


def test_identity_chain_pairs_check(checker):
    for n in range(1, 5):
        checker.check_elt({}, pctx(n), chain_pair(range(1, n + 1)),
                          chain_type(n))


def test_tensor_elim_identity_checks(checker):
    phi = TransCtx(
        ((("a"), A), ("b", A)),
        (("h", parse_expr("set", "P a m *(m : A) P m b")),))
    e = parse_expr("elt", "ind_tensor(h; x, m, y. pair(m, x, y))")
    checker.check_elt({}, phi, e, parse_expr("set",
                                             "P a m *(m : A) P m b"))


def test_tensor_elim_in_mid_context(checker):
    # the scrutinee slice sits strictly inside a larger context
    phi = TransCtx(
        (("a", A), ("b", A), ("c", A)),
        (("w", parse_expr("set", "P a b")),
         ("h", parse_expr("set", "Q b m *(m : A) Q m c"))))
    e = parse_expr(
        "elt", "pair(b, w, ind_tensor(h; x, m, y. pair(m, x, y)))")
    ty = parse_expr(
        "set", "P a k *(k : A) (Q k m *(m : A) Q m c)")
    checker.check_elt({}, phi, e, ty)


def test_lambdas_and_applications_check(checker):
    phi = TransCtx((("a", A), ("b", A)),
                   (("f", parse_expr("set", "P a b")),))
    checker.check_elt({}, phi, parse_expr("elt", "rlam y c. pair(b, f, y)"),
                      parse_expr("set",
                                 "Q b c |>(c : A) (P a m *(m : A) Q m c)"))
    checker.check_elt({}, phi, parse_expr("elt", "llam y c. pair(a, y, f)"),
                      parse_expr("set",
                                 "(Q c m *(m : A) P m b) <|(c : A) Q c a"))


def test_natural_elements_instantiate(checker):
    phi = TransCtx((("a", A),), ())
    checker.check_elt({}, phi, parse_expr("elt", "c1 ^ a"),
                      parse_expr("set", "Hom A a a"))


# ---------------------------------------------------------------------------
# error taxonomy outside linearity


def test_scope_error_on_unknown_variable(checker):
    with pytest.raises(ScopeError):
        checker.check_elt({}, pctx(1), EVar("nope"),
                          parse_expr("set", "P o0 o1"))


def test_type_mismatch_on_wrong_profunctor(checker):
    with pytest.raises((TypeMismatch, EndpointMismatch)):
        checker.check_elt({}, pctx(1), EVar("v1"),
                          parse_expr("set", "Q o0 o1"))


def test_signature_diagnostics_are_reported():
    decls, diags = parse_source(
        "small category A\n"
        "def bad : forall a : A. Hom A a a := natlam a. a\n")
    assert not diags
    sig, diags = check_signature(decls)
    assert diags
    assert diags[0].span is not None and diags[0].span.line == 2


# ---------------------------------------------------------------------------
# the rejection suite: non-linear and ill-ordered terms


def bad_sequences():
    """Variable sequences that duplicate, drop or permute the context."""
    out = []
    for n in (2, 3):
        for k in range(1, n + 1):
            for seq in itertools.product(range(1, n + 1), repeat=k):
                if list(seq) != list(range(1, n + 1)):
                    out.append((n, seq))
    for seq in itertools.permutations(range(1, 5)):
        if list(seq) != [1, 2, 3, 4]:
            out.append((4, seq))
    return out


def classify_rejections(checker):
    """Check every bad term; returns {error class name: count}."""
    outcomes = {}
    for n, seq in bad_sequences():
        try:
            checker.check_elt({}, pctx(n), chain_pair(seq), chain_type(n))
            label = "accepted"
        except (LinearityError, ContextSplitError) as err:
            label = type(err).__name__
        except VettError as err:
            label = f"wrong error: {type(err).__name__}"
        outcomes[label] = outcomes.get(label, 0) + 1
    return outcomes


def test_nonlinear_terms_all_rejected(checker):
    outcomes = classify_rejections(checker)
    total = sum(outcomes.values())
    assert total >= 50
    assert set(outcomes) <= {"LinearityError", "ContextSplitError"}, outcomes
    # both failure modes are exercised
    assert outcomes.get("LinearityError", 0) > 0
    assert outcomes.get("ContextSplitError", 0) > 0


def test_rejection_modes_match_the_defect(checker):
    # duplication and dropping are linearity failures
    with pytest.raises(LinearityError):
        checker.check_elt({}, pctx(2), chain_pair([1, 1]), chain_type(2))
    with pytest.raises(LinearityError):
        checker.check_elt({}, pctx(2), EVar("v1"),
                          parse_expr("set", "P o0 o1"))
    # transposition is an ordering failure
    with pytest.raises(ContextSplitError):
        checker.check_elt({}, pctx(2), chain_pair([2, 1]), chain_type(2))
