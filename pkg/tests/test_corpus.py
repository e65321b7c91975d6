"""The corpus runner: bundled corpus health, report semantics,
determinism, and failure reporting."""

import json
import os
import shutil

import pytest

from vett.corpus import FAIL, PASS, SKIP, UNKNOWN, discover, run_corpus

from conftest import CORPUS_DIR, ROOT


@pytest.fixture(scope="module")
def report():
    return run_corpus(CORPUS_DIR)


def test_discovery_finds_corpus_and_models():
    files, models = discover(CORPUS_DIR)
    assert len(files) >= 8
    assert all(f.endswith(".vett") for f in files)
    assert len(models) == 3


def test_bundled_corpus_is_clean(report):
    c = report.counts
    assert report.ok
    assert c[FAIL] == 0 and c[UNKNOWN] == 0
    assert c[PASS] > 0
    # every file contributes a check entry that passed
    checks = [e for e in report.entries if e.entry == "check"]
    assert len(checks) >= 8
    assert all(e.status == PASS for e in checks)


def test_every_assertion_is_decided(report):
    # conversion entries are the ones with no model suffix
    asserts = [e for e in report.entries
               if e.entry != "check" and "@" not in e.entry]
    assert asserts
    assert all(e.status == PASS for e in asserts)


def test_model_entries_cover_all_three_models(report):
    models = {e.entry.split("@", 1)[1] for e in report.entries
              if "@" in e.entry}
    assert models == {"walking_arrow", "poset3", "monoid_pair"}
    statuses = {e.status for e in report.entries if "@" in e.entry}
    assert statuses <= {PASS, SKIP}


def test_skips_carry_a_reason(report):
    skips = [e for e in report.entries if e.status == SKIP]
    assert skips and all(e.detail for e in skips)


def test_report_output_is_deterministic(report):
    again = run_corpus(CORPUS_DIR, jobs=4)
    assert again.text() == report.text()
    assert json.loads(again.json()) == json.loads(report.json())
    data = json.loads(report.json())
    assert data["ok"] is True
    assert data["counts"]["FAIL"] == 0


def test_syntactic_only_skips_model_entries():
    rep = run_corpus(CORPUS_DIR, syntactic_only=True)
    assert rep.ok
    assert all(e.status == SKIP for e in rep.entries if "@" in e.entry)


def test_failing_assertion_is_reported(tmp_path):
    bad = tmp_path / "bad.vett"
    bad.write_text(
        "small category A\n"
        "element TB : forall a : A. Hom A a a\n"
        "assert syntactic wrong : a : A |- TB ^ a == refl a : Hom A a a\n"
        "assert syntactic right : a : A |- refl a == refl a : Hom A a a\n")
    rep = run_corpus(str(tmp_path))
    assert not rep.ok
    by_entry = {e.entry: e.status for e in rep.entries
                if "@" not in e.entry}
    assert by_entry["wrong"] == FAIL
    assert by_entry["right"] == PASS
    assert by_entry["check"] == PASS


def test_ill_typed_file_fails_check(tmp_path):
    (tmp_path / "broken.vett").write_text(
        "small category A\n"
        "def bad : forall a : A. Hom A a a := natlam a. a\n")
    rep = run_corpus(str(tmp_path))
    assert not rep.ok
    checks = [e for e in rep.entries if e.entry == "check"]
    assert checks[0].status == FAIL and checks[0].detail
