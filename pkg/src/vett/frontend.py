"""Surface syntax: lexer, parser and pretty printer.

Declarations:

    small category C
    category D
    functor F : C -> D
    profunctor R : C -|-> D
    element name : mtype
    def name : mtype := mterm
    assert [syntactic] name : a : C, x : Set, b : C |- elt == elt : Set

Comments run from ``--`` to end of line.  The unicode spellings of the
connectives are accepted and normalized by the lexer.

The pretty printer emits surface syntax that reparses to an
alpha-equivalent term; machine-generated fresh names (``a#42``) are
renamed back to readable, non-capturing identifiers on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Diagnostic, ParseError, Span, VettError
from .subst import freshen
from .syntax import (
    CBase, CGraph, CProd, CPshNeg, CPshPos, CUnit, CUnquote, DAssert,
    DBaseCat, DConst, DDef, EFst, EHomElim, ELApp, ELLam, ENatInst, EPair,
    EProjElt, ERApp, ERefl, ERLam, ESnd, ETensorElim, ETensorPair, EUnit,
    EVar, MApp, MFst, MFunLam, MJ, MLam, MNatLam, MPair, MProfLam, MQuote,
    MRefl, MSnd, MVar, Motive, Node, OApp, OPair, OProj1, OProj2, OProjElt,
    OProjNeg, OProjPos, OPshLam, OTriple, OUnit, OVar, SApp, SHom, SLHom,
    SMemNeg, SMemPos, SOne, SProd, SRHom, STensor, TCat, TForall, TFun,
    TId, TPi, TProf, TSigma, TSmallCat, TransCtx, free_names, hint_of,
)

# ---------------------------------------------------------------------------
# lexer

_KEYWORDS = {
    "small", "category", "functor", "profunctor", "element", "def",
    "assert", "syntactic", "Hom", "Fun", "Prof", "SmallCat", "Cat", "Id",
    "forall", "fun", "funlam", "proflam", "natlam", "quote", "J", "refl",
    "ind_hom", "ind_tensor", "pair", "rlam", "llam", "fst", "snd", "in",
    "ni", "p1", "p2", "pie", "splice", "Graph",
}

_PUNCT = [
    "-|->", ":=", "->", "==", "|-", "|>", "<|", "(", ")", "[", "]", ",",
    ".", ":", ";", "*", "&", "^", "=",
]

_UNICODE = {
    "⊙": "*",      # tensor
    "▷": "|>",     # right hom / application
    "◁": "<|",     # left hom / application
    "∀": "forall",
    "⊢": "|-",
    "×": "*",
}


@dataclass(frozen=True)
class Token:
    kind: str   # "name", "keyword", "number", punctuation itself, "eof"
    text: str
    span: Span


def lex(src: str, filename: str = "<input>"):
    toks = []
    line, col = 1, 1
    i, n = 0, len(src)

    def span(l0, c0, l1, c1):
        return Span(filename, l0, c0, l1, c1)

    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if ch in _UNICODE:
            t = _UNICODE[ch]
            kind = "keyword" if t == "forall" else t
            toks.append(Token(kind, t, span(line, col, line, col + 1)))
            i += 1
            col += 1
            continue
        if src.startswith("Psh-", i):
            toks.append(Token("Psh-", "Psh-", span(line, col, line, col + 4)))
            i += 4
            col += 4
            continue
        if src.startswith("Psh+", i):
            toks.append(Token("Psh+", "Psh+", span(line, col, line, col + 4)))
            i += 4
            col += 4
            continue
        for tri in ("pi-", "pi+", "plam-", "plam+"):
            if src.startswith(tri, i):
                toks.append(Token(tri, tri,
                                  span(line, col, line, col + len(tri))))
                i += len(tri)
                col += len(tri)
                break
        else:
            for p in _PUNCT:
                if src.startswith(p, i):
                    toks.append(Token(p, p,
                                      span(line, col, line, col + len(p))))
                    i += len(p)
                    col += len(p)
                    break
            else:
                if ch.isalpha() or ch == "_":
                    j = i
                    while j < n and (src[j].isalnum() or src[j] in "_'"):
                        j += 1
                    word = src[i:j]
                    kind = "keyword" if word in _KEYWORDS else "name"
                    toks.append(Token(kind, word,
                                      span(line, col, line, col + j - i)))
                    col += j - i
                    i = j
                elif ch.isdigit():
                    j = i
                    while j < n and src[j].isdigit():
                        j += 1
                    toks.append(Token("number", src[i:j],
                                      span(line, col, line, col + j - i)))
                    col += j - i
                    i = j
                else:
                    raise ParseError(f"unexpected character {ch!r}",
                                     span=span(line, col, line, col + 1))
    toks.append(Token("eof", "", span(line, col, line, col)))
    return toks


# ---------------------------------------------------------------------------
# parser

_DECL_STARTS = {"small", "category", "functor", "profunctor", "element",
                "def", "assert"}


class Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    # -- primitives -------------------------------------------------------

    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def eat(self, kind, text=None):
        if not self.at(kind, text):
            got = self.peek()
            want = text or kind
            raise ParseError(f"expected {want!r}, found {got.text!r}",
                             span=got.span)
        return self.next()

    def name(self) -> str:
        return self.eat("name").text

    def fail(self, msg):
        raise ParseError(msg, span=self.peek().span)

    # -- categories -------------------------------------------------------

    def cat(self):
        left = self.cat_atom()
        while self.at("*"):
            # in category position, `*` is always the binary product
            self.next()
            left = CProd(left, self.cat_atom(), span=left.span)
        return left

    def cat_atom(self):
        t = self.peek()
        if t.kind == "number" and t.text == "1":
            self.next()
            return CUnit(span=t.span)
        if t.kind == "name":
            self.next()
            return CBase(t.text, span=t.span)
        if t.kind == "Psh-":
            self.next()
            return CPshNeg(self.cat_atom(), span=t.span)
        if t.kind == "Psh+":
            self.next()
            return CPshPos(self.cat_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "Graph":
            self.next()
            self.eat("(")
            a = self.name()
            self.eat(":")
            acat = self.cat()
            self.eat(",")
            b = self.name()
            self.eat(":")
            bcat = self.cat()
            self.eat(".")
            body = self.set_()
            self.eat(")")
            return CGraph(a, acat, b, bcat, body, span=t.span)
        if t.kind == "keyword" and t.text == "splice":
            self.next()
            return CUnquote(self.mterm_atom(), span=t.span)
        if t.kind == "(":
            self.next()
            c = self.cat()
            self.eat(")")
            return c
        self.fail("expected a category")

    # -- objects ----------------------------------------------------------

    def obj(self):
        t = self.peek()
        if (t.kind == "name" and self.peek(1).kind in
                ("name", "(", "number") and self._starts_obj(self.peek(1))):
            # functor application F a
            self.next()
            return OApp(MVar(t.text, span=t.span), self.obj_atom(),
                        span=t.span)
        return self.obj_atom()

    def _starts_obj(self, t: Token) -> bool:
        return (t.kind in ("name", "(", "pi-", "pi+", "plam-", "plam+", "[")
                or (t.kind == "keyword"
                    and t.text in ("splice", "p1", "p2")))

    def obj_atom(self):
        t = self.peek()
        if t.kind == "name":
            self.next()
            return OVar(t.text, span=t.span)
        if t.kind == "keyword" and t.text == "p1":
            self.next()
            return OProj1(self.obj_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "p2":
            self.next()
            return OProj2(self.obj_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "pie":
            self.next()
            return OProjElt(self.obj_atom(), span=t.span)
        if t.kind == "pi-":
            self.next()
            return OProjNeg(self.obj_atom(), span=t.span)
        if t.kind == "pi+":
            self.next()
            return OProjPos(self.obj_atom(), span=t.span)
        if t.kind in ("plam-", "plam+"):
            self.next()
            self.eat("(")
            h = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(".")
            body = self.set_()
            self.eat(")")
            return OPshLam(t.kind == "plam+", h, c, body, span=t.span)
        if t.kind == "[":
            self.next()
            fn = self.mterm()
            self.eat("]")
            return OApp(fn, self.obj_atom(), span=t.span)
        if t.kind == "(":
            self.next()
            if self.at(")"):
                self.next()
                return OUnit(span=t.span)
            first = self.obj()
            if self.at(","):
                self.next()
                second = self.obj()
                if self.at(","):
                    self.next()
                    elt = self.elt()
                    self.eat(")")
                    return OTriple(first, second, elt, span=t.span)
                self.eat(")")
                return OPair(first, second, span=t.span)
            self.eat(")")
            return first
        self.fail("expected an object")

    # -- sets ---------------------------------------------------------------

    def set_(self):
        left = self.set_rhom()
        while self.at("<|"):
            self.next()
            self.eat("(")
            h = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(")")
            right = self.set_rhom()
            left = SLHom(h, c, left, right, span=left.span)
        return left

    def set_rhom(self):
        left = self.set_tensor()
        if self.at("|>"):
            self.next()
            self.eat("(")
            h = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(")")
            cod = self.set_rhom()
            return SRHom(h, c, left, cod, span=left.span)
        return left

    def set_tensor(self):
        left = self.set_prod()
        if self.at("*") and self.peek(1).kind == "(":
            self.next()
            self.eat("(")
            h = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(")")
            right = self.set_tensor()
            return STensor(h, c, left, right, span=left.span)
        return left

    def set_prod(self):
        left = self.set_atom()
        while self.at("&"):
            self.next()
            left = SProd(left, self.set_atom(), span=left.span)
        return left

    def set_atom(self):
        t = self.peek()
        if t.kind == "number" and t.text == "1":
            self.next()
            return SOne(span=t.span)
        if t.kind == "keyword" and t.text == "Hom":
            self.next()
            c = self.cat_atom()
            a = self.obj_atom()
            b = self.obj_atom()
            return SHom(c, a, b, span=t.span)
        # membership: try an object followed by `in` / `ni`
        save = self.i
        try:
            o = self.obj()
            if self.at("keyword", "in"):
                self.next()
                return SMemNeg(o, self.obj_atom(), span=t.span)
            if self.at("keyword", "ni"):
                self.next()
                return SMemPos(o, self.obj_atom(), span=t.span)
        except ParseError:
            pass
        self.i = save
        if t.kind == "name":
            # profunctor application  R a b
            self.next()
            a = self.obj_atom()
            b = self.obj_atom()
            return SApp(MVar(t.text, span=t.span), a, b, span=t.span)
        if t.kind == "[":
            self.next()
            fn = self.mterm()
            self.eat("]")
            a = self.obj_atom()
            b = self.obj_atom()
            return SApp(fn, a, b, span=t.span)
        if t.kind == "(":
            self.next()
            s = self.set_()
            self.eat(")")
            return s
        self.fail("expected a set")

    # -- elements -----------------------------------------------------------

    def elt(self):
        t = self.peek()
        if t.kind == "keyword" and t.text == "rlam":
            self.next()
            x = self.name()
            a = self.name()
            self.eat(".")
            return ERLam(x, a, self.elt(), span=t.span)
        if t.kind == "keyword" and t.text == "llam":
            self.next()
            x = self.name()
            a = self.name()
            self.eat(".")
            return ELLam(x, a, self.elt(), span=t.span)
        left = self.elt_atom()
        while self.at("|>") or self.at("<|"):
            op = self.next()
            self.eat("[")
            o = self.obj()
            self.eat("]")
            arg = self.elt_atom()
            cls = ERApp if op.kind == "|>" else ELApp
            left = cls(left, arg, o, span=left.span)
        return left

    def elt_atom(self):
        t = self.peek()
        if t.kind == "name":
            self.next()
            if self.at("^"):
                self.next()
                return ENatInst(MVar(t.text, span=t.span), self.obj_atom(),
                                span=t.span)
            return EVar(t.text, span=t.span)
        if t.kind == "[":
            self.next()
            fn = self.mterm()
            self.eat("]")
            self.eat("^")
            return ENatInst(fn, self.obj_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "refl":
            self.next()
            return ERefl(self.obj_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "fst":
            self.next()
            return EFst(self.elt_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "snd":
            self.next()
            return ESnd(self.elt_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "pie":
            self.next()
            return EProjElt(self.obj_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "pair":
            self.next()
            self.eat("(")
            b = self.obj()
            self.eat(",")
            l = self.elt()
            self.eat(",")
            r = self.elt()
            self.eat(")")
            return ETensorPair(b, l, r, span=t.span)
        if t.kind == "keyword" and t.text == "ind_tensor":
            self.next()
            self.eat("(")
            s = self.elt()
            self.eat(";")
            x = self.name()
            self.eat(",")
            b = self.name()
            self.eat(",")
            y = self.name()
            self.eat(".")
            cont = self.elt()
            self.eat(")")
            return ETensorElim(s, x, b, y, cont, span=t.span)
        if t.kind == "keyword" and t.text == "ind_hom":
            self.next()
            self.eat("(")
            motive = None
            if self.at("("):
                # optional motive: ((a, b) : C. P);
                self.next()
                a = self.name()
                self.eat(",")
                b = self.name()
                self.eat(")")
                self.eat(":")
                c = self.cat()
                self.eat(".")
                body = self.set_()
                motive = Motive(a, b, c, body)
                self.eat(";")
            h = self.name()
            self.eat(".")
            cont = self.elt()
            self.eat(";")
            b1 = self.obj()
            self.eat(",")
            scrut = self.elt()
            self.eat(",")
            b2 = self.obj()
            self.eat(")")
            return EHomElim(h, cont, b1, scrut, b2, motive, span=t.span)
        if t.kind == "(":
            self.next()
            if self.at(")"):
                self.next()
                return EUnit(span=t.span)
            first = self.elt()
            if self.at(","):
                self.next()
                second = self.elt()
                self.eat(")")
                return EPair(first, second, span=t.span)
            self.eat(")")
            return first
        self.fail("expected an element")

    # -- meta types -----------------------------------------------------------

    def mtype(self):
        t = self.peek()
        if (t.kind == "(" and self.peek(1).kind == "name"
                and self.peek(2).kind == ":"):
            # dependent binder (x : A) -> B  or  (x : A) * B
            self.next()
            x = self.name()
            self.eat(":")
            dom = self.mtype()
            self.eat(")")
            if self.at("*"):
                self.next()
                return TSigma(x, dom, self.mtype(), span=t.span)
            self.eat("->")
            return TPi(x, dom, self.mtype(), span=t.span)
        if t.kind == "keyword" and t.text == "forall":
            self.next()
            a = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(".")
            return TForall(a, c, self.set_(), span=t.span)
        left = self.mtype_atom()
        if self.at("->"):
            self.next()
            return TPi("_x", left, self.mtype(), span=t.span)
        return left

    def mtype_atom(self):
        t = self.peek()
        if t.kind == "keyword" and t.text == "SmallCat":
            self.next()
            return TSmallCat(span=t.span)
        if t.kind == "keyword" and t.text == "Cat":
            self.next()
            return TCat(span=t.span)
        if t.kind == "keyword" and t.text == "Fun":
            self.next()
            return TFun(self.cat_atom(), self.cat_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "Prof":
            self.next()
            return TProf(self.cat_atom(), self.cat_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "Id":
            self.next()
            ty = self.mtype_atom()
            return TId(ty, self.mterm_atom(), self.mterm_atom(), span=t.span)
        if t.kind == "(":
            self.next()
            ty = self.mtype()
            self.eat(")")
            return ty
        self.fail("expected a type")

    # -- meta terms -----------------------------------------------------------

    def mterm(self):
        t = self.peek()
        if t.kind == "keyword" and t.text == "fun":
            self.next()
            x = self.name()
            self.eat(".")
            return MLam(x, self.mterm(), span=t.span)
        if t.kind == "keyword" and t.text == "funlam":
            self.next()
            a = self.name()
            self.eat(":")
            c = self.cat()
            self.eat(".")
            return MFunLam(a, c, self.obj(), span=t.span)
        if t.kind == "keyword" and t.text == "proflam":
            self.next()
            a = self.name()
            self.eat(":")
            ca = self.cat()
            self.eat(",")
            b = self.name()
            self.eat(":")
            cb = self.cat()
            self.eat(".")
            return MProfLam(a, ca, b, cb, self.set_(), span=t.span)
        if t.kind == "keyword" and t.text == "natlam":
            self.next()
            a = self.name()
            c = None
            if self.at(":"):
                self.next()
                c = self.cat()
            self.eat(".")
            return MNatLam(a, c, self.elt(), span=t.span)
        left = self.mterm_atom()
        while self._starts_mterm_atom():
            left = MApp(left, self.mterm_atom(), span=t.span)
        return left

    def _starts_mterm_atom(self) -> bool:
        t = self.peek()
        return (t.kind in ("name", "(")
                or (t.kind == "keyword"
                    and t.text in ("fst", "snd", "refl", "quote", "J")))

    def mterm_atom(self):
        t = self.peek()
        if t.kind == "name":
            self.next()
            return MVar(t.text, span=t.span)
        if t.kind == "keyword" and t.text == "fst":
            self.next()
            return MFst(self.mterm_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "snd":
            self.next()
            return MSnd(self.mterm_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "refl":
            self.next()
            return MRefl(self.mterm_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "quote":
            self.next()
            return MQuote(self.cat_atom(), span=t.span)
        if t.kind == "keyword" and t.text == "J":
            self.next()
            self.eat("(")
            y = self.name()
            p = self.name()
            self.eat(".")
            motive = self.mtype()
            self.eat(";")
            base = self.mterm()
            self.eat(";")
            scrut = self.mterm()
            self.eat(")")
            return MJ(y, p, motive, base, scrut, span=t.span)
        if t.kind == "(":
            self.next()
            first = self.mterm()
            if self.at(","):
                self.next()
                second = self.mterm()
                self.eat(")")
                return MPair(first, second, span=t.span)
            self.eat(")")
            return first
        self.fail("expected a term")

    # -- contexts and declarations ------------------------------------------

    def transctx(self) -> TransCtx:
        objs = []
        elts = []
        expect_obj = True
        while True:
            nm = self.name()
            self.eat(":")
            if expect_obj:
                objs.append((nm, self.cat()))
            else:
                elts.append((nm, self.set_()))
            expect_obj = not expect_obj
            if self.at(","):
                self.next()
                continue
            break
        if expect_obj:
            self.fail("a transformation context must end with an object "
                      "variable")
        return TransCtx(tuple(objs), tuple(elts))

    def decl(self):
        t = self.peek()
        if t.kind == "keyword" and t.text == "small":
            self.next()
            self.eat("keyword", "category")
            return DBaseCat(self.name(), small=True, span=t.span)
        if t.kind == "keyword" and t.text == "category":
            self.next()
            return DBaseCat(self.name(), small=False, span=t.span)
        if t.kind == "keyword" and t.text == "functor":
            self.next()
            nm = self.name()
            self.eat(":")
            dom = self.cat()
            self.eat("->")
            cod = self.cat()
            return DConst(nm, TFun(dom, cod), "functor", span=t.span)
        if t.kind == "keyword" and t.text == "profunctor":
            self.next()
            nm = self.name()
            self.eat(":")
            dom = self.cat()
            self.eat("-|->")
            cod = self.cat()
            return DConst(nm, TProf(dom, cod), "profunctor", span=t.span)
        if t.kind == "keyword" and t.text == "element":
            self.next()
            nm = self.name()
            self.eat(":")
            return DConst(nm, self.mtype(), "element", span=t.span)
        if t.kind == "keyword" and t.text == "def":
            self.next()
            nm = self.name()
            self.eat(":")
            ty = self.mtype()
            self.eat(":=")
            return DDef(nm, ty, self.mterm(), span=t.span)
        if t.kind == "keyword" and t.text == "assert":
            self.next()
            syntactic = False
            if self.at("keyword", "syntactic"):
                self.next()
                syntactic = True
            nm = self.name()
            self.eat(":")
            phi = self.transctx()
            self.eat("|-")
            lhs = self.elt()
            self.eat("==")
            rhs = self.elt()
            self.eat(":")
            at = self.set_()
            return DAssert(nm, phi, lhs, rhs, at, syntactic, span=t.span)
        self.fail("expected a declaration")

    def decls(self):
        """Parse a whole file, recovering at declaration boundaries."""
        out = []
        diags = []
        while not self.at("eof"):
            start = self.i
            try:
                out.append(self.decl())
            except VettError as err:
                diags.append(Diagnostic.from_error(err))
                self._skip_to_decl(start)
        return out, diags

    def _skip_to_decl(self, start: int):
        # if the error landed on the keyword opening the next declaration,
        # resume there rather than discarding it
        if self.i > start and self._at_decl_start():
            return
        self.next()
        while not self.at("eof") and not self._at_decl_start():
            self.next()

    def _at_decl_start(self) -> bool:
        t = self.peek()
        if t.kind != "keyword" or t.text not in _DECL_STARTS:
            return False
        if t.text == "small":
            return self.peek(1).kind == "keyword" \
                and self.peek(1).text == "category"
        return True


def parse_source(src: str, filename: str = "<input>"):
    """Parse a .vett source file; returns (decls, diagnostics)."""
    try:
        toks = lex(src, filename)
    except ParseError as err:
        return [], [Diagnostic.from_error(err)]
    return Parser(toks).decls()


def parse_expr(kind: str, src: str, filename: str = "<input>"):
    """Parse a single expression of the given class ('cat', 'obj', 'set',
    'elt', 'mtype', 'mterm', 'ctx'); raises ParseError on junk."""
    p = Parser(lex(src, filename))
    node = {"cat": p.cat, "obj": p.obj, "set": p.set_, "elt": p.elt,
            "mtype": p.mtype, "mterm": p.mterm, "ctx": p.transctx}[kind]()
    p.eat("eof")
    return node


# ---------------------------------------------------------------------------
# pretty printer


class _Printer:
    def __init__(self, used):
        self.env = {}
        self.used = set(used) | _KEYWORDS

    def bind(self, name: str) -> str:
        base = hint_of(name)
        if not base.isidentifier():
            base = "v"
        cand = base
        k = 1
        while cand in self.used:
            k += 1
            cand = f"{base}{k}"
        self.used.add(cand)
        self.env[name] = cand
        return cand

    def var(self, name: str) -> str:
        return self.env.get(name, hint_of(name) if "#" in name else name)

    # -- categories --

    def cat(self, c) -> str:
        if isinstance(c, CProd):
            return f"{self.cat_atom(c.left)} * {self.cat_atom(c.right)}"
        return self.cat_atom(c)

    def cat_atom(self, c) -> str:
        if isinstance(c, CBase):
            return self.var(c.name)
        if isinstance(c, CUnit):
            return "1"
        if isinstance(c, CPshNeg):
            return f"Psh- {self.cat_atom(c.cat)}"
        if isinstance(c, CPshPos):
            return f"Psh+ {self.cat_atom(c.cat)}"
        if isinstance(c, CGraph):
            a = self.bind(c.aname)
            b = self.bind(c.bname)
            return (f"Graph({a} : {self.cat(c.acat)}, {b} : "
                    f"{self.cat(c.bcat)}. {self.set(c.body)})")
        if isinstance(c, CUnquote):
            if isinstance(c.term, MVar):
                return f"splice {self.var(c.term.name)}"
            return f"splice ({self.mterm(c.term)})"
        return f"({self.cat(c)})"

    # -- objects --

    def obj(self, a) -> str:
        if isinstance(a, OApp):
            if isinstance(a.fn, MVar):
                return f"{self.var(a.fn.name)} {self.obj_atom(a.arg)}"
            return f"[{self.mterm(a.fn)}] {self.obj_atom(a.arg)}"
        return self.obj_atom(a)

    def obj_atom(self, a) -> str:
        if isinstance(a, OVar):
            return self.var(a.name)
        if isinstance(a, OUnit):
            return "()"
        if isinstance(a, OPair):
            return f"({self.obj(a.left)}, {self.obj(a.right)})"
        if isinstance(a, OTriple):
            return (f"({self.obj(a.neg)}, {self.obj(a.pos)}, "
                    f"{self.elt(a.elt)})")
        if isinstance(a, OProj1):
            return f"p1 {self.obj_atom(a.obj)}"
        if isinstance(a, OProj2):
            return f"p2 {self.obj_atom(a.obj)}"
        if isinstance(a, OProjNeg):
            return f"pi- {self.obj_atom(a.obj)}"
        if isinstance(a, OProjPos):
            return f"pi+ {self.obj_atom(a.obj)}"
        if isinstance(a, OProjElt):
            return f"(pie {self.obj_atom(a.obj)})"
        if isinstance(a, OPshLam):
            h = self.bind(a.hint)
            tag = "plam+" if a.positive else "plam-"
            return f"{tag}({h} : {self.cat(a.cat)}. {self.set(a.body)})"
        return f"({self.obj(a)})"

    # -- sets --

    def set(self, P) -> str:
        if isinstance(P, SLHom):
            h = self.bind(P.hint)
            left = self.set_rhom(P.cod) if not isinstance(P.cod, SLHom) \
                else self.set(P.cod)
            return f"{left} <|({h} : {self.cat(P.cat)}) {self.set_rhom(P.dom)}"
        return self.set_rhom(P)

    def set_rhom(self, P) -> str:
        if isinstance(P, SRHom):
            h = self.bind(P.hint)
            dom = self.set_tensor(P.dom)
            return f"{dom} |>({h} : {self.cat(P.cat)}) {self.set_rhom(P.cod)}"
        return self.set_tensor(P)

    def set_tensor(self, P) -> str:
        if isinstance(P, STensor):
            h = self.bind(P.hint)
            left = self.set_prod(P.left)
            return f"{left} *({h} : {self.cat(P.cat)}) {self.set_tensor(P.right)}"
        return self.set_prod(P)

    def set_prod(self, P) -> str:
        if isinstance(P, SProd):
            return f"{self.set_prod(P.left)} & {self.set_atom(P.right)}"
        return self.set_atom(P)

    def set_atom(self, P) -> str:
        if isinstance(P, SOne):
            return "1"
        if isinstance(P, SHom):
            return (f"Hom {self.cat_atom(P.cat)} {self.obj_atom(P.src)} "
                    f"{self.obj_atom(P.tgt)}")
        if isinstance(P, SApp):
            fn = (self.var(P.fn.name) if isinstance(P.fn, MVar)
                  else f"[{self.mterm(P.fn)}]")
            return f"{fn} {self.obj_atom(P.src)} {self.obj_atom(P.tgt)}"
        if isinstance(P, SMemNeg):
            return f"{self.obj_atom(P.obj)} in {self.obj_atom(P.psh)}"
        if isinstance(P, SMemPos):
            return f"{self.obj_atom(P.psh)} ni {self.obj_atom(P.obj)}"
        return f"({self.set(P)})"

    # -- elements --

    def elt(self, e) -> str:
        if isinstance(e, ERLam):
            x = self.bind(e.xname)
            a = self.bind(e.aname)
            return f"rlam {x} {a}. {self.elt(e.body)}"
        if isinstance(e, ELLam):
            x = self.bind(e.xname)
            a = self.bind(e.aname)
            return f"llam {x} {a}. {self.elt(e.body)}"
        if isinstance(e, ERApp):
            return (f"{self.elt_app(e.fn)} |>[{self.obj(e.obj)}] "
                    f"{self.elt_atom(e.arg)}")
        if isinstance(e, ELApp):
            return (f"{self.elt_app(e.fn)} <|[{self.obj(e.obj)}] "
                    f"{self.elt_atom(e.arg)}")
        return self.elt_atom(e)

    def elt_app(self, e) -> str:
        if isinstance(e, (ERApp, ELApp)):
            return self.elt(e)
        return self.elt_atom(e)

    def elt_atom(self, e) -> str:
        if isinstance(e, EVar):
            return self.var(e.name)
        if isinstance(e, EUnit):
            return "()"
        if isinstance(e, ERefl):
            return f"refl {self.obj_atom(e.obj)}"
        if isinstance(e, EFst):
            return f"fst {self.elt_atom(e.elt)}"
        if isinstance(e, ESnd):
            return f"snd {self.elt_atom(e.elt)}"
        if isinstance(e, EPair):
            return f"({self.elt(e.left)}, {self.elt(e.right)})"
        if isinstance(e, EProjElt):
            return f"pie {self.obj_atom(e.obj)}"
        if isinstance(e, ENatInst):
            if isinstance(e.fn, MVar):
                return f"{self.var(e.fn.name)} ^ {self.obj_atom(e.obj)}"
            return f"[{self.mterm(e.fn)}] ^ {self.obj_atom(e.obj)}"
        if isinstance(e, ETensorPair):
            return (f"pair({self.obj(e.obj)}, {self.elt(e.left)}, "
                    f"{self.elt(e.right)})")
        if isinstance(e, ETensorElim):
            s = self.elt(e.scrut)
            x = self.bind(e.xname)
            b = self.bind(e.bname)
            y = self.bind(e.yname)
            return f"ind_tensor({s}; {x}, {b}, {y}. {self.elt(e.cont)})"
        if isinstance(e, EHomElim):
            motive = ""
            if e.motive is not None:
                m = e.motive
                a = self.bind(m.aname)
                b = self.bind(m.bname)
                motive = (f"({a}, {b}) : {self.cat(m.cat)}. "
                          f"{self.set(m.body)}; ")
            h = self.bind(e.hint)
            return (f"ind_hom({motive}{h}. {self.elt(e.cont)}; "
                    f"{self.obj(e.b1)}, {self.elt(e.scrut)}, "
                    f"{self.obj(e.b2)})")
        return f"({self.elt(e)})"

    # -- meta types --

    def mtype(self, A) -> str:
        if isinstance(A, TPi):
            x = self.bind(A.hint)
            return f"({x} : {self.mtype(A.dom)}) -> {self.mtype(A.cod)}"
        if isinstance(A, TSigma):
            x = self.bind(A.hint)
            return f"({x} : {self.mtype(A.dom)}) * {self.mtype(A.cod)}"
        if isinstance(A, TForall):
            a = self.bind(A.hint)
            return f"forall {a} : {self.cat(A.cat)}. {self.set(A.body)}"
        return self.mtype_atom(A)

    def mtype_atom(self, A) -> str:
        if isinstance(A, TSmallCat):
            return "SmallCat"
        if isinstance(A, TCat):
            return "Cat"
        if isinstance(A, TFun):
            return f"Fun {self.cat_atom(A.dom)} {self.cat_atom(A.cod)}"
        if isinstance(A, TProf):
            return f"Prof {self.cat_atom(A.dom)} {self.cat_atom(A.cod)}"
        if isinstance(A, TId):
            return (f"Id {self.mtype_atom(A.ty)} {self.mterm_atom(A.lhs)} "
                    f"{self.mterm_atom(A.rhs)}")
        return f"({self.mtype(A)})"

    # -- meta terms --

    def mterm(self, t) -> str:
        if isinstance(t, MLam):
            x = self.bind(t.hint)
            return f"fun {x}. {self.mterm(t.body)}"
        if isinstance(t, MFunLam):
            a = self.bind(t.hint)
            return f"funlam {a} : {self.cat(t.cat)}. {self.obj(t.body)}"
        if isinstance(t, MProfLam):
            a = self.bind(t.aname)
            b = self.bind(t.bname)
            return (f"proflam {a} : {self.cat(t.acat)}, {b} : "
                    f"{self.cat(t.bcat)}. {self.set(t.body)}")
        if isinstance(t, MNatLam):
            a = self.bind(t.hint)
            cat = f" : {self.cat(t.cat)}" if t.cat is not None else ""
            return f"natlam {a}{cat}. {self.elt(t.body)}"
        if isinstance(t, MApp):
            fn = self.mterm(t.fn) if isinstance(t.fn, MApp) \
                else self.mterm_atom(t.fn)
            return f"{fn} {self.mterm_atom(t.arg)}"
        return self.mterm_atom(t)

    def mterm_atom(self, t) -> str:
        if isinstance(t, MVar):
            return self.var(t.name)
        if isinstance(t, MFst):
            return f"fst {self.mterm_atom(t.term)}"
        if isinstance(t, MSnd):
            return f"snd {self.mterm_atom(t.term)}"
        if isinstance(t, MRefl):
            return f"refl {self.mterm_atom(t.term)}"
        if isinstance(t, MQuote):
            return f"quote {self.cat_atom(t.cat)}"
        if isinstance(t, MPair):
            return f"({self.mterm(t.left)}, {self.mterm(t.right)})"
        if isinstance(t, MJ):
            y = self.bind(t.yname)
            p = self.bind(t.pname)
            return (f"J({y} {p}. {self.mtype(t.motive)}; "
                    f"{self.mterm(t.base)}; {self.mterm(t.scrut)})")
        return f"({self.mterm(t)})"

    # -- contexts --

    def ctx(self, phi: TransCtx) -> str:
        parts = []
        for k, (n, c) in enumerate(phi.objs):
            nm = self.bind(n)
            parts.append(f"{nm} : {self.cat(c)}")
            if k < len(phi.elts):
                en, et = phi.elts[k]
                em = self.bind(en)
                parts.append(f"{em} : {self.set(et)}")
        return ", ".join(parts)


def _dispatch(pr: _Printer, node):
    from .syntax import Cat, Obj, Set_, Elt, MTy, MTm
    if isinstance(node, Cat):
        return pr.cat(node)
    if isinstance(node, Obj):
        return pr.obj(node)
    if isinstance(node, Set_):
        return pr.set(node)
    if isinstance(node, Elt):
        return pr.elt(node)
    if isinstance(node, MTy):
        return pr.mtype(node)
    if isinstance(node, MTm):
        return pr.mterm(node)
    if isinstance(node, TransCtx):
        return pr.ctx(node)
    if isinstance(node, Motive):
        a = pr.bind(node.aname)
        b = pr.bind(node.bname)
        return f"({a}, {b}) : {pr.cat(node.cat)}. {pr.set(node.body)}"
    raise TypeError(f"cannot pretty-print {type(node).__name__}")


def _fresh_ctx(phi: TransCtx) -> TransCtx:
    return TransCtx(tuple((n, freshen(c)) for n, c in phi.objs),
                    tuple((n, freshen(r)) for n, r in phi.elts))


def pretty(node) -> str:
    """Render any expression class back to surface syntax."""
    if isinstance(node, TransCtx):
        return pretty_ctx(node)
    if isinstance(node, Node):
        # renaming every binder apart up front lets the printer use one
        # flat rename table without risking capture between sibling scopes
        pr = _Printer(free_names(node))
        return _dispatch(pr, freshen(node))
    return _dispatch(_Printer(set()), node)


def pretty_ctx(phi: TransCtx) -> str:
    used = set()
    for _, c in phi.objs:
        used |= free_names(c)
    for _, r in phi.elts:
        used |= free_names(r)
    used -= set(phi.obj_names) | set(phi.elt_names)
    return _Printer(used).ctx(_fresh_ctx(phi))


def pretty_decl(d) -> str:
    if isinstance(d, DBaseCat):
        return (f"small category {d.name}" if d.small
                else f"category {d.name}")
    if isinstance(d, DConst):
        ty = freshen(d.ty)
        pr = _Printer(free_names(ty))
        if d.kind == "functor" and isinstance(ty, TFun):
            return (f"functor {d.name} : {pr.cat(ty.dom)} -> "
                    f"{pr.cat(ty.cod)}")
        if d.kind == "profunctor" and isinstance(ty, TProf):
            return (f"profunctor {d.name} : {pr.cat(ty.dom)} -|-> "
                    f"{pr.cat(ty.cod)}")
        return f"element {d.name} : {pr.mtype(ty)}"
    if isinstance(d, DDef):
        used = free_names(d.ty) | free_names(d.term)
        ty = _Printer(used).mtype(freshen(d.ty))
        return f"def {d.name} : {ty} := {_Printer(used).mterm(freshen(d.term))}"
    if isinstance(d, DAssert):
        used = set()
        for _, c in d.phi.objs:
            used |= free_names(c)
        for _, r in d.phi.elts:
            used |= free_names(r)
        used |= free_names(d.lhs) | free_names(d.rhs) | free_names(d.at)
        used -= set(d.phi.obj_names) | set(d.phi.elt_names)
        pr = _Printer(used)
        ctx = pr.ctx(_fresh_ctx(d.phi))
        syn = "syntactic " if d.syntactic_only else ""
        return (f"assert {syn}{d.name} : {ctx} |- {pr.elt(freshen(d.lhs))} "
                f"== {pr.elt(freshen(d.rhs))} : {pr.set(freshen(d.at))}")
    raise TypeError(f"cannot pretty-print declaration {type(d).__name__}")
