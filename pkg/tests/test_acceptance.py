"""Acceptance gate: the seven end-to-end guarantees of the toolchain,
each one runnable (and failing loudly) on its own.

1.  The bundled corpus is complete: every declaration checks and every
    asserted equality — the Yoneda and co-Yoneda roundtrips, the
    naturality consequence, the Fubini associativity roundtrips and the
    generalized unit-elimination beta/eta family at side-context sizes
    up to two — is decided Equal, in under 60 seconds.
2.  Every beta/eta rule of the equational theory holds on at least 20
    generated well-typed instances, with subject reduction and
    normal-form agreement.
3.  The substitution laws (vertical and horizontal unit/associativity,
    action functoriality, boundary compatibility) hold exhaustively for
    contexts of up to three element variables, in under 30 seconds.
4.  Everything evaluable in the three bundled finite models is natural,
    and every equality the decider accepts holds semantically.
5.  On the walking arrow, Hom tensored with Hom has fiber cardinalities
    (1, 1, 0, 1) and composition gives an explicit fiberwise bijection
    onto Hom, confirmed by an independent brute-force oracle.
6.  At least 50 deliberately non-linear or ill-ordered terms are all
    rejected, each with a linearity or context-split error.
7.  Parsing after pretty-printing is alpha-stable on 100% of the corpus
    declarations.
"""

import time

import pytest

from vett.corpus import FAIL, PASS, SKIP, UNKNOWN, run_corpus
from vett.frontend import parse_source
from vett.typecheck import Checker

import test_conversion
import test_finmodel
import test_subst
import test_typecheck
from conftest import CORPUS_DIR, check_source, corpus_files, model_files
from test_frontend import roundtrip_decl


@pytest.fixture(scope="module")
def corpus_report():
    t0 = time.perf_counter()
    report = run_corpus(CORPUS_DIR)
    report.elapsed = time.perf_counter() - t0
    return report


REQUIRED_ASSERTS = {
    # representable Yoneda / co-Yoneda roundtrips and their presheaf forms
    "yoneda_rl", "yoneda_lr", "yoneda_hom_rl", "yoneda_hom_lr",
    "coyoneda_rl", "coyoneda_lr", "coyoneda_hom_rl", "coyoneda_hom_lr",
    # naturality as a consequence of linearity
    "naturality",
    # Fubini: all five tensor reassociation roundtrips
    "fubini1_rt1", "fubini1_rt2", "fubini2_rt1", "fubini2_rt2",
    "fubini3_rt1", "fubini3_rt2", "fubini4_rt1", "fubini4_rt2",
    "fubini5_rt1", "fubini5_rt2",
    # generalized unit elimination, side contexts of size 0..2 per side
    "gue_beta_00", "gue_beta_01", "gue_beta_10", "gue_beta_11",
    "gue_eta_00", "gue_eta_01", "gue_eta_10", "gue_eta_11",
}


def test_criterion_1_corpus_complete(corpus_report):
    r = corpus_report
    c = r.counts
    assert c[FAIL] == 0 and c[UNKNOWN] == 0, r.text()
    assert r.ok
    decided = {e.entry for e in r.entries
               if "@" not in e.entry and e.entry != "check"}
    missing = REQUIRED_ASSERTS - decided
    assert not missing, f"corpus lacks required equalities: {missing}"
    assert all(e.status == PASS for e in r.entries
               if e.entry in REQUIRED_ASSERTS)
    assert r.elapsed < 60, f"corpus run took {r.elapsed:.1f}s"


def test_criterion_2_beta_eta_rules():
    counts = test_conversion.all_rule_counts()
    expected = {
        "SmallCat-beta", "SmallCat-eta", "Cat-beta", "Cat-eta",
        "Fctor-beta", "Fctor-eta", "Prof-beta", "Prof-eta",
        "NatElt-beta", "NatElt-eta",
        "NegPresheaf-beta", "NegPresheaf-eta",
        "PosPresheaf-beta", "PosPresheaf-eta",
        "Graph-beta-neg", "Graph-beta-pos", "Graph-beta-elt", "Graph-eta",
        "One-eta-obj", "Prod-beta-obj", "Prod-eta-obj",
        "CovHom-beta", "CovHom-eta", "ConHom-beta", "ConHom-eta",
        "Unit-beta", "Unit-eta", "Tensor-beta", "Tensor-eta",
        "One-eta-elt", "Prod-beta-elt", "Prod-eta-elt",
    }
    assert set(counts) == expected
    bad = {k: v for k, v in counts.items() if v < 20}
    assert not bad, f"rules with fewer than 20 instances: {bad}"


def test_criterion_3_substitution_laws():
    t0 = time.perf_counter()
    assert test_subst.check_vertical_units() > 0
    assert test_subst.check_vertical_assoc() > 0
    assert test_subst.check_vertical_action() > 0
    assert test_subst.check_horizontal_laws() > 0
    assert test_subst.check_horizontal_assoc() > 0
    assert test_subst.check_boundary_compat() > 0
    elapsed = time.perf_counter() - t0
    assert elapsed < 30, f"substitution law suite took {elapsed:.1f}s"


def test_criterion_4_model_soundness(corpus_report):
    model_entries = [e for e in corpus_report.entries if "@" in e.entry]
    assert model_entries
    assert all(e.status in (PASS, SKIP) for e in model_entries)
    # each bundled model contributes genuinely evaluated (non-skip) work
    for model in ("walking_arrow", "poset3", "monoid_pair"):
        passed = [e for e in model_entries
                  if e.entry.endswith(f"@{model}") and e.status == PASS]
        assert passed, f"nothing evaluated in {model}"


def test_criterion_5_hom_tensor_hom():
    model = test_finmodel.read_model(
        [p for p in model_files() if "walking_arrow" in p][0])
    C = model.cats["C"]
    cards = test_finmodel.check_hom_tensor_hom(C)   # asserts the bijection
    assert (cards[("0", "0")], cards[("0", "1")],
            cards[("1", "0")], cards[("1", "1")]) == (1, 1, 0, 1)
    assert all(cards[k] == len(C.homset(*k)) for k in cards)


def test_criterion_6_linearity_rejection():
    _, sig = check_source(test_typecheck.SIG_SRC)
    outcomes = test_typecheck.classify_rejections(Checker(sig))
    total = sum(outcomes.values())
    assert total >= 50
    assert set(outcomes) <= {"LinearityError", "ContextSplitError"}, (
        f"unexpected outcomes: {outcomes}")


def test_criterion_7_roundtrip_stability():
    total = 0
    for path in corpus_files():
        with open(path) as fh:
            decls, diags = parse_source(fh.read(), path)
        assert not diags
        for d in decls:
            assert roundtrip_decl(d), f"{path}: {d.name}"
            total += 1
    assert total >= len(REQUIRED_ASSERTS)
