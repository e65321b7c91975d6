"""Command-line interface: exit codes, output shapes, determinism."""

import json
import os

import pytest

from vett.cli import main

from conftest import CORPUS_DIR, MODELS_DIR, ROOT

YONEDA = os.path.join(CORPUS_DIR, "yoneda.vett")
COMP = os.path.join(CORPUS_DIR, "comp.vett")
ARROW = os.path.join(MODELS_DIR, "walking_arrow.vmodel")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_corpus_files(capsys):
    code, out, err = run(capsys, "check", YONEDA, COMP)
    assert code == 0
    assert f"{YONEDA}: ok" in out
    assert f"{COMP}: ok" in out
    assert "assert" in out           # verdicts are listed


def test_check_parallel_output_is_ordered(capsys):
    code1, out1, _ = run(capsys, "check", YONEDA, COMP)
    code2, out2, _ = run(capsys, "check", "--jobs", "4", YONEDA, COMP)
    assert (code1, out1) == (code2, out2)


def test_check_failure_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.vett"
    bad.write_text("small category A\n"
                   "element TB : forall a : A. Hom A a a\n"
                   "assert syntactic w : a : A |- TB ^ a == refl a"
                   " : Hom A a a\n")
    code, out, err = run(capsys, "check", str(bad))
    assert code == 1
    assert "w: fail" in out


def test_check_missing_file_is_usage_error(capsys):
    code, out, err = run(capsys, "check", "/nonexistent/x.vett")
    assert code == 1 or code == 2
    # no file arguments at all is a usage error
    code2, _, _ = run(capsys, "check")
    assert code2 == 2


def test_norm_prints_normal_form(capsys, tmp_path):
    f = tmp_path / "d.vett"
    f.write_text("small category C\n"
                 "def idC : forall a : C. Hom C a a"
                 " := natlam a. ind_hom(m. refl m; a, refl a, a)\n")
    code, out, err = run(capsys, "norm", str(f), "--def", "idC")
    assert code == 0
    assert "idC : forall a : C. Hom C a a" in out
    assert ":= natlam a : C. refl a" in out


def test_norm_unknown_def(capsys):
    code, out, err = run(capsys, "norm", YONEDA, "--def", "nosuch")
    assert code == 1 and "nosuch" in err


def test_eval_prints_family_table(capsys, tmp_path):
    f = tmp_path / "d.vett"
    f.write_text("small category A\n"
                 "def idA : forall a : A. Hom A a a := natlam a. refl a\n")
    code, out, err = run(capsys, "eval", str(f), "--model", ARROW,
                         "--def", "idA")
    assert code == 0
    assert "idA : forall a : A. Hom A a a" in out
    assert "a = 0: i0" in out and "a = 1: i1" in out


def test_corpus_text_report(capsys):
    code, out, err = run(capsys, "corpus", CORPUS_DIR)
    assert code == 0
    lines = [l for l in out.splitlines() if "\t" in l]
    assert lines and all(len(l.split("\t")) == 3 for l in lines)
    assert out.splitlines()[-1].startswith("total ")
    assert " 0 failed" in out and " 0 unknown" in out


def test_corpus_json_report(capsys):
    code, out, err = run(capsys, "corpus", CORPUS_DIR, "--json-report",
                         "--syntactic-only")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["counts"]["FAIL"] == 0
    assert all(set(e) == {"path", "entry", "status", "detail"}
               for e in data["entries"])


def test_corpus_failure_exit_code(capsys, tmp_path):
    (tmp_path / "bad.vett").write_text(
        "small category A\n"
        "element TB : forall a : A. Hom A a a\n"
        "assert syntactic w : a : A |- TB ^ a == refl a : Hom A a a\n")
    code, out, err = run(capsys, "corpus", str(tmp_path))
    assert code == 1
    assert "1 failed" in out


def test_usage_errors(capsys):
    assert run(capsys, "nosuchcmd")[0] == 2
    assert run(capsys, "corpus")[0] == 2
    assert run(capsys, "eval", YONEDA, "--def", "x")[0] == 2  # no --model
