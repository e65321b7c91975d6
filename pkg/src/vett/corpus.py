"""Corpus runner.

Type-checks ``.vett`` files, decides their equality assertions with the
conversion engine, and cross-validates everything evaluable in the
bundled finite models: natural elements must pass the exhaustive
naturality check and asserted equalities must denote equal families.

Report lines use the machine-readable format ``PATH<TAB>ENTRY<TAB>STATUS``
with statuses ``PASS``, ``FAIL``, ``SKIP`` and ``UNKNOWN``; lines are
sorted by path so output is deterministic regardless of parallelism.
"""

from __future__ import annotations

import glob
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (CapExceeded, IllDefinedOnQuotient, ModelError,
                     Unevaluable, VettError)
from .finmodel import Evaluator, Model, load_model
from .frontend import parse_source
from .syntax import (DAssert, DDef, ENatInst, MVar, OVar, TForall, TransCtx)
from .typecheck import check_signature, Checker, run_assertion

PASS = "PASS"
FAIL = "FAIL"
SKIP = "SKIP"
UNKNOWN = "UNKNOWN"

_VERDICT = {"pass": PASS, "fail": FAIL, "unknown": UNKNOWN}


@dataclass(frozen=True)
class Entry:
    """One report line: an expectation of one corpus file."""

    path: str
    entry: str
    status: str
    detail: str = ""


@dataclass
class Report:
    entries: List[Entry]
    models: List[str]

    @property
    def counts(self) -> Dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIP: 0, UNKNOWN: 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def ok(self) -> bool:
        c = self.counts
        return c[FAIL] == 0 and c[UNKNOWN] == 0

    def text(self) -> str:
        return "".join(f"{e.path}\t{e.entry}\t{e.status}\n"
                       for e in self.entries)

    def json(self) -> str:
        return json.dumps(
            {"models": self.models,
             "entries": [{"path": e.path, "entry": e.entry,
                          "status": e.status, "detail": e.detail}
                         for e in self.entries],
             "counts": self.counts,
             "ok": self.ok},
            indent=2, sort_keys=True) + "\n"


def discover(root: str) -> Tuple[List[str], List[str]]:
    """Corpus files under ``root`` and bundled model files.

    Models are looked up in ``root/models`` and, failing that, in a
    ``models`` directory next to ``root``.
    """
    if os.path.isfile(root):
        files = [root]
        base = os.path.dirname(root) or "."
    else:
        files = sorted(glob.glob(os.path.join(root, "*.vett")))
        base = root
    for cand in (os.path.join(base, "models"),
                 os.path.join(base, os.pardir, "models")):
        if os.path.isdir(cand):
            return files, sorted(glob.glob(os.path.join(cand, "*.vmodel")))
    return files, []


def load_models(paths: Sequence[str]) -> List[Tuple[str, Model]]:
    out = []
    for p in paths:
        name = os.path.splitext(os.path.basename(p))[0]
        with open(p) as fh:
            out.append((name, load_model(fh.read(), p)))
    return out


def _model_entries(path, decls, sig, mname, model, fuel):
    """Naturality of every def and semantic equality of every assertion,
    as far as the model can evaluate them."""
    entries = []
    ev = Evaluator(sig, model, fuel=fuel)
    for d in decls:
        if isinstance(d, DDef) and isinstance(d.ty, TForall):
            name = f"{d.name}@{mname}"
            phi = TransCtx(((d.ty.hint, d.ty.cat),), ())
            inst = ENatInst(MVar(d.name), OVar(d.ty.hint))
            try:
                fam = ev.eval_elt(phi, inst, d.ty.body)
                natural = ev.naturality_check(phi, d.ty.body, fam)
                entries.append(Entry(path, name, PASS if natural else FAIL,
                                     "" if natural else "not natural"))
            except (Unevaluable, CapExceeded) as err:
                entries.append(Entry(path, name, SKIP, str(err)))
        elif isinstance(d, DAssert):
            name = f"{d.name}@{mname}"
            da = sig.lookup(d.name)
            if da is None or not isinstance(da, DAssert):
                continue
            if da.syntactic_only:
                entries.append(Entry(path, name, SKIP,
                                     "marked syntactic"))
                continue
            try:
                lf = ev.eval_elt(da.phi, da.lhs, da.at)
                rf = ev.eval_elt(da.phi, da.rhs, da.at)
                good = (lf == rf
                        and ev.naturality_check(da.phi, da.at, lf)
                        and ev.naturality_check(da.phi, da.at, rf))
                entries.append(Entry(
                    path, name, PASS if good else FAIL,
                    "" if good else "sides denote different families"))
            except (Unevaluable, CapExceeded,
                    IllDefinedOnQuotient) as err:
                entries.append(Entry(path, name, SKIP, str(err)))
    return entries


def run_file(path: str, models: Sequence[Tuple[str, Model]],
             fuel: int = 256, syntactic_only: bool = False) -> List[Entry]:
    with open(path) as fh:
        src = fh.read()
    decls, diags = parse_source(src, path)
    if not diags:
        sig, diags = check_signature(decls, fuel=fuel)
    if diags:
        return [Entry(path, "check", FAIL, diags[0].render())]
    entries = [Entry(path, "check", PASS)]
    checker = Checker(sig, fuel=fuel)
    for d in decls:
        if isinstance(d, DAssert):
            da = sig.lookup(d.name)
            entries.append(
                Entry(path, d.name, _VERDICT[run_assertion(checker, da)]))
    for mname, model in models:
        if syntactic_only:
            entries.extend(
                Entry(path, f"{d.name}@{mname}", SKIP, "syntactic only")
                for d in decls if isinstance(d, (DDef, DAssert)))
        else:
            entries.extend(
                _model_entries(path, decls, sig, mname, model, fuel))
    return entries


def run_corpus(root: str, model_paths: Optional[Sequence[str]] = None,
               fuel: int = 256, syntactic_only: bool = False,
               jobs: int = 1) -> Report:
    files, found = discover(root)
    paths = list(model_paths) if model_paths else found
    models = load_models(paths)

    def work(path):
        try:
            return run_file(path, models, fuel, syntactic_only)
        except VettError as err:
            return [Entry(path, "check", FAIL, str(err))]

    if jobs > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(work, files))
    else:
        chunks = [work(p) for p in files]
    entries = [e for chunk in sorted(chunks, key=lambda c: c[0].path if c
                                     else "") for e in chunk]
    return Report(entries, [name for name, _ in models])
