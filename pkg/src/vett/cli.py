"""Command-line interface.

Subcommands:

* ``check FILE...`` — parse and type-check files, deciding their
  equality assertions; prints diagnostics and verdicts.
* ``norm FILE --def NAME`` — print the normal form of a definition in
  canonical surface syntax.
* ``eval FILE --model M.vmodel --def NAME`` — print the finite family a
  definition denotes in a model, as a table.
* ``corpus DIR`` — run the corpus suite (see :mod:`vett.corpus`).

Exit codes: 0 on success, 1 on check/suite failures, 2 on usage errors.
All output is deterministic byte-for-byte for fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from . import corpus as corpus_mod
from .errors import VettError
from .finmodel import Evaluator, load_model
from .frontend import parse_source, pretty
from .syntax import (DAssert, DDef, ENatInst, MNatLam, MVar, OVar, TForall,
                     TransCtx)
from .typecheck import check_signature, Checker, run_assertion


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vett",
        description="Type checker, equality decider and finite-model "
                    "evaluator for a language of categories, functors, "
                    "profunctors and transformations.")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="type-check files and decide their "
                                     "assertions")
    c.add_argument("files", nargs="+", metavar="FILE")
    c.add_argument("--fuel", type=int, default=256)
    c.add_argument("--jobs", type=int, default=1)

    n = sub.add_parser("norm", help="print the normal form of a definition")
    n.add_argument("file", metavar="FILE")
    n.add_argument("--def", dest="defname", required=True, metavar="NAME")
    n.add_argument("--fuel", type=int, default=256)

    e = sub.add_parser("eval", help="evaluate a definition in a finite "
                                    "model")
    e.add_argument("file", metavar="FILE")
    e.add_argument("--model", required=True, metavar="M.vmodel")
    e.add_argument("--def", dest="defname", required=True, metavar="NAME")
    e.add_argument("--fuel", type=int, default=256)

    r = sub.add_parser("corpus", help="run a corpus directory")
    r.add_argument("root", metavar="DIR")
    r.add_argument("--model", action="append", default=None,
                   metavar="M.vmodel",
                   help="use these model files instead of the bundled ones")
    r.add_argument("--fuel", type=int, default=256)
    r.add_argument("--syntactic-only", action="store_true")
    r.add_argument("--json-report", action="store_true")
    r.add_argument("--jobs", type=int, default=1)
    return p


def _load_checked(path: str, fuel: int):
    """Parse and check one file; returns (decls, sig, diagnostics)."""
    with open(path) as fh:
        src = fh.read()
    decls, diags = parse_source(src, path)
    if diags:
        return decls, None, diags
    sig, diags = check_signature(decls, fuel=fuel)
    return decls, sig, diags


def _check_one(path: str, fuel: int):
    lines, failed = [], False
    try:
        decls, sig, diags = _load_checked(path, fuel)
    except OSError as err:
        return [f"{path}: error: {err}"], True
    for d in diags:
        lines.append(d.render())
        failed = True
    if sig is not None:
        checker = Checker(sig, fuel=fuel)
        for d in decls:
            if isinstance(d, DAssert):
                verdict = run_assertion(checker, sig.lookup(d.name))
                lines.append(f"{path}: assert {d.name}: {verdict}")
                if verdict != "pass":
                    failed = True
        if not failed:
            lines.append(f"{path}: ok ({len(decls)} declarations)")
    return lines, failed


def cmd_check(args) -> int:
    if args.jobs > 1 and len(args.files) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(
                lambda p: _check_one(p, args.fuel), args.files))
    else:
        results = [_check_one(p, args.fuel) for p in args.files]
    code = 0
    for lines, failed in results:          # input order preserved
        for line in lines:
            print(line)
        if failed:
            code = 1
    return code


def _find_def(decls, sig, name):
    d = sig.lookup(name)
    if not isinstance(d, DDef):
        raise VettError(f"no definition named {name}")
    return d


def cmd_norm(args) -> int:
    decls, sig, diags = _load_checked(args.file, args.fuel)
    if diags:
        for d in diags:
            print(d.render(), file=sys.stderr)
        return 1
    d = _find_def(decls, sig, args.defname)
    checker = Checker(sig, fuel=args.fuel)
    term = checker.conv.red_meta(d.term)
    if isinstance(d.ty, TForall) and isinstance(term, MNatLam):
        phi = TransCtx(((d.ty.hint, d.ty.cat),), ())
        body = checker.conv.norm_elt(
            {}, phi, ENatInst(MVar(d.name), OVar(d.ty.hint)), d.ty.body)
        term = MNatLam(d.ty.hint, d.ty.cat, body)
    print(f"{d.name} : {pretty(d.ty)}")
    print(f"  := {pretty(term)}")
    return 0


def _render_value(v) -> str:
    if isinstance(v, tuple):
        if v and all(isinstance(kv, tuple) and len(kv) == 2
                     and isinstance(kv[0], tuple) for kv in v):
            # a finite function: entries ((object, element) -> value)
            rows = ", ".join(f"{_render_value(k)} -> {_render_value(w)}"
                             for k, w in v)
            return "{" + rows + "}"
        return "(" + ", ".join(_render_value(x) for x in v) + ")"
    return str(v)


def cmd_eval(args) -> int:
    decls, sig, diags = _load_checked(args.file, args.fuel)
    if diags:
        for d in diags:
            print(d.render(), file=sys.stderr)
        return 1
    d = _find_def(decls, sig, args.defname)
    if not isinstance(d.ty, TForall):
        raise VettError(f"{args.defname} is not a natural element")
    with open(args.model) as fh:
        model = load_model(fh.read(), args.model)
    ev = Evaluator(sig, model, fuel=args.fuel)
    phi = TransCtx(((d.ty.hint, d.ty.cat),), ())
    fam = ev.eval_elt(phi, ENatInst(MVar(d.name), OVar(d.ty.hint)),
                      d.ty.body)
    print(f"{d.name} : {pretty(d.ty)}")
    for key in sorted(fam, key=str):
        val = fam[key]
        head = f"{d.ty.hint.split('#')[0]} = {key[0]}"
        if isinstance(val, tuple) and val and all(
                isinstance(kv, tuple) and len(kv) == 2
                and isinstance(kv[0], tuple) for kv in val):
            print(f"{head}:")
            for k, w in val:
                print(f"  {_render_value(k)} -> {_render_value(w)}")
        else:
            print(f"{head}: {_render_value(val)}")
    return 0


def cmd_corpus(args) -> int:
    report = corpus_mod.run_corpus(
        args.root, model_paths=args.model, fuel=args.fuel,
        syntactic_only=args.syntactic_only, jobs=args.jobs)
    if args.json_report:
        sys.stdout.write(report.json())
    else:
        sys.stdout.write(report.text())
        c = report.counts
        print(f"total {len(report.entries)}: {c['PASS']} passed, "
              f"{c['FAIL']} failed, {c['SKIP']} skipped, "
              f"{c['UNKNOWN']} unknown")
    return 0 if report.ok else 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 0 if not err.code else 2
    try:
        if args.cmd == "check":
            return cmd_check(args)
        if args.cmd == "norm":
            return cmd_norm(args)
        if args.cmd == "eval":
            return cmd_eval(args)
        return cmd_corpus(args)
    except VettError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
