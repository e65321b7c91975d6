"""Finite models: loader validation, fiber computation against an
independent oracle, action equivariance, and failure modes.

The tensor oracle below recomputes Hom-tensor-Hom fibers from first
principles: it enumerates composable pairs and quotients them by the
middle action using a union-find, entirely independent of the
evaluator's own quotient construction.  On the walking-arrow category
the fibers must have cardinalities (1, 1, 0, 1) — the same as Hom —
and composition must induce a bijection class-by-class.
"""

import itertools

import pytest

from vett.errors import CapExceeded, ModelError, Unevaluable
from vett.finmodel import Caps, Evaluator, load_model
from vett.frontend import parse_expr
from vett.syntax import CBase, ENatInst, MVar, OVar, TransCtx
from vett.typecheck import Checker

from conftest import check_source, model_files


def read_model(path):
    with open(path) as fh:
        return load_model(fh.read(), path)


@pytest.fixture(scope="module")
def models(model_paths):
    return {m.name.rsplit("/", 1)[-1].split(".")[0]: m
            for m in map(read_model, model_paths)}


# ---------------------------------------------------------------------------
# loading and validation


def test_bundled_models_load(models):
    assert set(models) == {"walking_arrow", "poset3", "monoid_pair"}
    for m in models.values():
        assert set("ABCDG") <= set(m.cats)
        assert m.functors and m.profunctors


GOOD_CAT = """\
category A
  objects : 0 1
  hom 0 0 : i0
  hom 0 1 : ar
  hom 1 1 : i1
  id 0 : i0
  id 1 : i1
  comp ar i1 = ar
  comp i0 ar = ar
  comp i0 i0 = i0
  comp i1 i1 = i1
"""


def test_minimal_model_loads():
    m = load_model(GOOD_CAT)
    A = m.cats["A"]
    assert A.homset("0", "1") == ["ar"]
    assert A.compose(("0", "0", "i0"), ("0", "1", "ar")) == ("0", "1", "ar")


@pytest.mark.parametrize("mutation,needle", [
    ("id 0 : i0", "identity"),                       # drop an identity
    ("comp i0 ar = ar", "composition"),              # drop a composite
    ("hom 1 1 : i1", "identity"),                    # identity not in hom
])
def test_broken_categories_rejected(mutation, needle):
    broken = GOOD_CAT.replace(mutation + "\n", "")
    with pytest.raises(ModelError):
        load_model(broken)


def test_wrong_composition_rejected():
    broken = GOOD_CAT.replace("comp i0 ar = ar", "comp i0 ar = i1")
    with pytest.raises(ModelError):
        load_model(broken)


def test_duplicate_morphism_name_rejected():
    broken = GOOD_CAT.replace("hom 0 1 : ar", "hom 0 1 : i0")
    with pytest.raises(ModelError):
        load_model(broken)


def test_object_cap_enforced():
    lines = ["category A", "  objects : " + " ".join(map(str, range(6)))]
    for k in range(6):
        lines.append(f"  hom {k} {k} : e{k}")
        lines.append(f"  id {k} : e{k}")
    for k in range(6):
        lines.append(f"  comp e{k} e{k} = e{k}")
    with pytest.raises(CapExceeded):
        load_model("\n".join(lines) + "\n")


def test_broken_functor_rejected():
    src = GOOD_CAT + """\
functor F : A -> A
  obj 0 = 0
  obj 1 = 0
  mor i0 = i0
  mor i1 = i0
  mor ar = ar
"""
    # ar : 0 -> 1 must land in Hom(F0, F1) = Hom(0, 0)
    with pytest.raises(ModelError):
        load_model(src)


def test_broken_profunctor_action_rejected():
    src = GOOD_CAT + """\
profunctor P : A -|-> A
  fiber 0 0 : p
  fiber 0 1 : q
  fiber 1 1 : r
  lact i0 p = p
  lact i0 q = q
  lact ar r = q
  lact i1 r = r
  ract p i0 = p
  ract p ar = p
  ract q i1 = q
  ract r i1 = r
"""
    # ract p ar must land in fiber(0, 1), not fiber(0, 0)
    with pytest.raises(ModelError):
        load_model(src)


# ---------------------------------------------------------------------------
# the tensor oracle (criterion: composition is a fiberwise bijection)


def tensor_classes(C, a, b):
    """Fibers of Hom(a,-) tensored with Hom(-,b), by brute force.

    Elements are composable pairs (m, f, g); the equivalence is
    generated by (m, f;h, g) ~ (m', f, h;g) for h : m -> m', computed
    with a union-find.
    """
    pairs = [(m, f, g) for m in C.objects
             for f in C.homset(a, m) for g in C.homset(m, b)]
    parent = {p: p for p in pairs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    def union(p, q):
        parent[find(p)] = find(q)

    for (m, m2, h) in C.morphisms():
        for f in C.homset(a, m):
            for g in C.homset(m2, b):
                fh = C.compose((a, m, f), (m, m2, h))[2]
                hg = C.compose((m, m2, h), (m2, b, g))[2]
                union((m2, fh, g), (m, f, hg))
    classes = {}
    for p in pairs:
        classes.setdefault(find(p), []).append(p)
    return list(classes.values())


def composite_of_class(C, a, b, cls):
    """The common composite of a quotient class; asserts it is common."""
    outs = {C.compose((a, m, f), (m, b, g))[2] for (m, f, g) in cls}
    assert len(outs) == 1, "composition not constant on a quotient class"
    return outs.pop()


def check_hom_tensor_hom(C):
    """Oracle facts + the composition bijection, for one category."""
    cards = {}
    for a in C.objects:
        for b in C.objects:
            classes = tensor_classes(C, a, b)
            cards[(a, b)] = len(classes)
            composites = [composite_of_class(C, a, b, cls)
                          for cls in classes]
            # composition is injective on classes and onto Hom(a, b)
            assert len(set(composites)) == len(composites)
            assert sorted(composites) == sorted(C.homset(a, b))
    return cards


def test_walking_arrow_tensor_fibers(models):
    C = models["walking_arrow"].cats["C"]
    cards = check_hom_tensor_hom(C)
    assert (cards[("0", "0")], cards[("0", "1")],
            cards[("1", "0")], cards[("1", "1")]) == (1, 1, 0, 1)
    assert all(cards[k] == len(C.homset(*k)) for k in cards)


def test_tensor_bijection_all_models(models):
    for m in models.values():
        for cat in ("A", "C"):
            check_hom_tensor_hom(m.cats[cat])


def test_evaluator_fiber_matches_oracle(models):
    _, sig = check_source("small category C\n")
    ten = parse_expr("set", "Hom C a m *(m : C) Hom C m b")
    hom = parse_expr("set", "Hom C a b")
    for m in models.values():
        ev = Evaluator(sig, m)
        C = m.cats["C"]
        for a in C.objects:
            for b in C.objects:
                got = ev.fiber(ten, {"a": a}, {"b": b})
                want = tensor_classes(C, a, b)
                assert len(got) == len(want), (m.name, a, b)
                assert len(ev.fiber(hom, {"a": a}, {"b": b})) == len(want)


# ---------------------------------------------------------------------------
# families, naturality, failure modes


def test_identity_family_is_natural(models):
    _, sig = check_source("small category A\n")
    A = CBase("A")
    phi = TransCtx((("a", A), ("b", A)),
                   (("f", parse_expr("set", "Hom A a b")),))
    R = parse_expr("set", "Hom A a b")
    for m in models.values():
        ev = Evaluator(sig, m)
        T = {key: key[1] for key, _, _ in ev.instantiations(phi)}
        assert ev.naturality_check(phi, R, T)


def test_nonequivariant_family_is_rejected(models):
    _, sig = check_source("small category A\n")
    A = CBase("A")
    phi = TransCtx((("a", A), ("b", A)),
                   (("f", parse_expr("set", "Hom A a b")),))
    R = parse_expr("set", "Hom A a b")
    ev = Evaluator(sig, models["monoid_pair"])
    T = {key: key[1] for key, _, _ in ev.instantiations(phi)}
    # send the non-identity loop to the identity: breaks equivariance
    cat = models["monoid_pair"].cats["A"]
    x = cat.objects[0]
    loops = cat.homset(x, x)
    assert len(loops) == 2
    bad = dict(T)
    bad[(x, loops[1], x)] = loops[0]
    assert not ev.naturality_check(phi, R, bad)


def test_evaluated_elements_are_natural(models):
    _, sig = check_source(
        "small category A\n"
        "def idA : forall a : A. Hom A a a := natlam a. refl a\n")
    A = CBase("A")
    phi = TransCtx((("a", A),), ())
    R = parse_expr("set", "Hom A a a")
    for m in models.values():
        ev = Evaluator(sig, m)
        T = ev.eval_elt(phi, ENatInst(MVar("idA"), OVar("a")), R)
        assert ev.naturality_check(phi, R, T)
        # every instance denotes the identity morphism
        for key, val in T.items():
            assert val == m.cats["A"].ident(key[0])[2]


def test_semantic_equal_on_convertible_terms(models):
    _, sig = check_source("small category A\n")
    ck = Checker(sig)
    A = CBase("A")
    phi = TransCtx((("a", A),), ())
    R = parse_expr("set", "Hom A a a")
    s = ck.check_elt({}, phi, parse_expr("elt", "refl a"), R)
    t = ck.check_elt({}, phi,
                     parse_expr("elt", "ind_hom(m. refl m; a, refl a, a)"),
                     R)
    for m in models.values():
        assert Evaluator(sig, m).semantic_equal(phi, R, s, t)


def test_postulated_elements_are_unevaluable(models):
    _, sig = check_source(
        "small category A\n"
        "element TB : forall a : A. Hom A a a\n")
    A = CBase("A")
    phi = TransCtx((("a", A),), ())
    ev = Evaluator(sig, models["walking_arrow"])
    with pytest.raises(Unevaluable):
        ev.eval_elt(phi, ENatInst(MVar("TB"), OVar("a")),
                    parse_expr("set", "Hom A a a"))


def test_presheaf_categories_are_unevaluable(models):
    ev = Evaluator(check_source("small category A\n")[1],
                   models["walking_arrow"])
    with pytest.raises(Unevaluable):
        ev.eval_cat(parse_expr("cat", "Psh- A"))
