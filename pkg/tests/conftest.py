import glob
import os

import pytest

from vett.frontend import parse_source
from vett.typecheck import check_signature

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS_DIR = os.path.join(ROOT, "corpus")
MODELS_DIR = os.path.join(ROOT, "models")


def corpus_files():
    return sorted(glob.glob(os.path.join(CORPUS_DIR, "*.vett")))


def model_files():
    return sorted(glob.glob(os.path.join(MODELS_DIR, "*.vmodel")))


def check_source(src, filename="<test>", fuel=256):
    """Parse and type-check a signature; fails the test on diagnostics."""
    decls, diags = parse_source(src, filename)
    assert not diags, "\n".join(d.render() for d in diags)
    sig, diags = check_signature(decls, fuel=fuel)
    assert not diags, "\n".join(d.render() for d in diags)
    return decls, sig


@pytest.fixture(scope="session")
def corpus_paths():
    paths = corpus_files()
    assert paths, "corpus directory is empty"
    return paths


@pytest.fixture(scope="session")
def model_paths():
    paths = model_files()
    assert len(paths) == 3, "expected exactly three bundled models"
    return paths
