"""Command-line front end.

Exit codes: 0 when every requested check passes, 1 when a check fails (or a
search finds nothing), 2 when the input cannot be read.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from importlib import resources
from typing import Any, Dict, List, Optional, Sequence

from gmpy2 import mpq

from . import diffmod as dm
from . import hopf
from .coherence import (
    action_from_json,
    check_data_naturality,
    check_hexagon,
    check_torsion,
    check_torsion_exchange,
    extend_iso,
    verify_associativity,
)
from .coherence.io import iso_to_json
from .field import ParseError, parse_ratfunc
from .semigroup import (
    AbelianPresentation,
    FreeProduct,
    FreeProductWord,
    Word,
    exchange_schedule,
    multiply,
    normalize_word,
    word_length,
)

SCHEMA = 1


class InputError(Exception):
    """Malformed input; reported with exit code 2."""


class Report:
    def __init__(self, argv: Sequence[str]):
        self.argv = list(argv)
        self.checks: List[dict] = []
        self.results: Dict[str, Any] = {}
        self.start = time.perf_counter()

    def check(self, name: str, status: str, witness: Any = None, **info) -> None:
        if status == "fail" and witness is None:
            raise AssertionError("a failing check needs a witness")
        entry = {"name": name, "status": status, **info}
        if witness is not None:
            entry["witness"] = witness
        self.checks.append(entry)

    def status(self) -> str:
        if any(c["status"] in ("fail", "none-found") for c in self.checks):
            return "fail"
        return "pass"

    def exit_code(self) -> int:
        return 0 if self.status() == "pass" else 1

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.argv, "status": self.status(), "checks": self.checks,
                "results": self.results, "wall_time": round(time.perf_counter() - self.start, 6)}

    def text(self) -> str:
        lines = []
        for key, val in self.results.items():
            lines.append(f"{key}: {val if isinstance(val, str) else json.dumps(val, separators=(',', ':'))}")
        for c in self.checks:
            extra = ""
            if "witness" in c:
                extra = " " + json.dumps(c["witness"], separators=(",", ":"))[:400]
            lines.append(f"{c['status'].upper():10s} {c['name']}{extra}")
        return "\n".join(lines)


# -- input helpers ------------------------------------------------------------------

def _json_arg(text: str, what: str) -> Any:
    if text.startswith("@"):
        return _load_file(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {exc}") from None


def _load_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None


def _guard(fn, what: str):
    try:
        return fn()
    except InputError:
        raise
    except (ParseError, ValueError, KeyError, TypeError, IndexError, ArithmeticError) as exc:
        raise InputError(f"{what}: {exc}") from None


def _pres(text: str) -> AbelianPresentation:
    return _guard(lambda: AbelianPresentation.from_json(_json_arg(text, "--pres")), "--pres")


def _word(pres: AbelianPresentation, text: str, what: str) -> Word:
    return _guard(lambda: pres.word(_json_arg(text, what)), what)


def fixture_path(name: str):
    base = resources.files("tannakit") / "fixtures"
    for sub in ("paper", "extra"):
        p = base / sub / f"{name}.json"
        if p.is_file():
            return p
    raise InputError(f"unknown fixture {name!r}")


def load_fixture(name: str) -> dict:
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


def fixture_names() -> List[str]:
    base = resources.files("tannakit") / "fixtures"
    names = []
    for sub in ("paper", "extra"):
        names += sorted(p.name[:-5] for p in (base / sub).iterdir() if p.name.endswith(".json"))
    return names


# -- semigroup ------------------------------------------------------------------------

def cmd_semigroup(args, rep: Report) -> None:
    pres = _pres(args.pres) if args.pres else None
    if args.op == "normalize":
        raw = _json_arg(args.word, "--word")
        w = _guard(lambda: normalize_word(pres, raw), "--word")
        rep.results["word"] = w.to_json()
    elif args.op == "multiply":
        w = multiply(_word(pres, args.w1, "--w1"), _word(pres, args.w2, "--w2"))
        rep.results["word"] = w.to_json()
    elif args.op == "length":
        rep.results["length"] = word_length(_word(pres, args.word, "--word"))
    elif args.op == "schedule":
        steps = exchange_schedule(_word(pres, args.w1, "--w1"), _word(pres, args.w2, "--w2"))
        rep.results["schedule"] = [s.to_json() for s in steps]
    elif args.op == "fp-normalize":
        factors = _json_arg(args.factors, "--factors")
        fp = _guard(lambda: FreeProduct.of({k: AbelianPresentation.from_json(v) for k, v in factors.items()}),
                    "--factors")
        w = _guard(lambda: FreeProductWord.from_json(fp, _json_arg(args.blocks, "--blocks")), "--blocks")
        rep.results["word"] = w.to_json()


def _semigroup_text(rep: Report) -> Optional[str]:
    if set(rep.results) == {"word"}:
        return json.dumps(rep.results["word"], separators=(",", ":"))
    if set(rep.results) == {"length"}:
        return str(rep.results["length"])
    return None


# -- coherence ------------------------------------------------------------------------

COHERENCE_CHECKS = ("naturality", "hexagon", "torsion", "torsion-exchange", "associativity")


def _action_payload(doc: dict) -> dict:
    return doc["data"] if "data" in doc and "presentation" not in doc else doc


def run_action_checks(doc: dict, rep: Report, checks: Sequence[str], max_len: int) -> Dict[str, str]:
    data = _guard(lambda: action_from_json(_action_payload(doc)), "action data")
    C = data.coeffs
    runners = {
        "naturality": lambda: check_data_naturality(data),
        "hexagon": lambda: check_hexagon(data),
        "torsion": lambda: check_torsion(data),
        "torsion-exchange": lambda: check_torsion_exchange(data),
        "associativity": lambda: verify_associativity(data, max_len),
    }
    statuses = {}
    for name in checks:
        failures = runners[name]()
        if failures:
            witness = {"first": failures[0], "count": len(failures)}
            if name == "hexagon":
                witness["exchange"] = {f"({i},{j})": iso_to_json(eta, C) for (i, j), eta in sorted(data.exchange.items())}
            rep.check(name, "fail", witness)
        else:
            rep.check(name, "pass")
        statuses[name] = "fail" if failures else "pass"
    return statuses


def cmd_coherence(args, rep: Report) -> None:
    doc = _load_file(args.file)
    if args.op == "check":
        checks = args.checks.split(",") if args.checks else list(COHERENCE_CHECKS)
        unknown = set(checks) - set(COHERENCE_CHECKS)
        if unknown:
            raise InputError(f"unknown checks {sorted(unknown)}")
        max_len = args.max_len if args.max_len is not None else doc.get("max_len", 2)
        run_action_checks(doc, rep, checks, max_len)
    elif args.op == "extend":
        data = _guard(lambda: action_from_json(_action_payload(doc)), "action data")
        pres = data.presentation
        eta = extend_iso(data, _word(pres, args.w1, "--w1"), _word(pres, args.w2, "--w2"))
        rep.results["c"] = {"src": [f.name for f in eta.src], "tgt": [f.name for f in eta.tgt],
                            **iso_to_json(eta, data.coeffs)}


# -- diffmod --------------------------------------------------------------------------

def _module(path: str, field: dm.DiffField | None = None) -> dm.DiffModule:
    doc = _load_file(path)
    return _guard(lambda: dm.DiffModule.from_json(doc, field), path)


def _matrix(F: dm.DiffField, text: str) -> list:
    rows = _json_arg(text, "--matrix")
    return _guard(lambda: [[parse_ratfunc(str(x), F.vars) for x in r] for r in rows], "--matrix")


def _fmt_matrix(m) -> list:
    return [[str(x) for x in row] for row in m]


def run_contiguity(doc: dict, rep: Report, corrected: bool) -> Dict[str, str]:
    F = _guard(lambda: dm.DiffField.from_json(doc["field"]), "field")
    M = dm.DiffModule(F, [[parse_ratfunc(x, F.vars) for x in r] for r in doc["matrix"]])
    table = doc["corrected"] if corrected else doc["gauge"]
    statuses = {}
    for name, rows in table.items():
        C = [[parse_ratfunc(x, F.vars) for x in r] for r in rows]
        orient = dm.contiguity_orientations(M, C, name)
        ok = orient["gauge(A,C)=sigma(A)"]
        if ok:
            rep.check(f"contiguity {name}", "pass", orientation="gauge(A,C)=sigma(A)")
        else:
            resid = dm.gauge_residual(M, dm.twist(M, name), C)
            rep.check(f"contiguity {name}", "fail", {"orientations": orient, "residual": _fmt_matrix(resid)})
        statuses[name] = "pass" if ok else "fail"
    return statuses


def run_commute(doc: dict, rep: Report, s1, s2, n_range) -> str:
    F = dm.shift_scale_field()
    _, tx2, tx3 = dm.commute_modules(F)
    for label, mod in (("tx2", tx2), ("tx3", tx3)):
        want = parse_ratfunc(doc[label], F.vars) if doc else None
        if want is not None:
            if mod.matrix[0][0] == want:
                rep.check(f"twist {label}", "pass", value=str(mod.matrix[0][0]))
            else:
                rep.check(f"twist {label}", "fail", {"computed": str(mod.matrix[0][0]), "expected": doc[label]})
    rows = dm.commute_up_to_gauge(s1, s2, n_range)
    bad = [r for r in rows if not r["equivalent"]]
    uniform = dm.uniform_condition(s1, s2)
    rep.results["commute"] = rows
    rep.results["uniform_condition"] = uniform
    if bad:
        rep.check("commute up to gauge", "fail", {"not_equivalent": bad})
        return "fail"
    rep.check("commute up to gauge", "pass")
    return "pass"


def _n_range(text: str) -> List[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad --n-range {text!r}") from None


def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad {what} {text!r}") from None


def cmd_diffmod(args, rep: Report) -> None:
    op = args.op
    if op == "contiguity":
        run_contiguity(load_fixture("contiguity"), rep, args.corrected)
        return
    if op == "commute-check":
        s1, s2 = _fraction(args.s1, "--s1"), _fraction(args.s2, "--s2")
        if s2.denominator != 1 or s2 in (0, 1):
            raise InputError("--s2 must be an integer other than 0 and 1")
        run_commute(load_fixture("commute-check"), rep, s1, int(s2), _n_range(args.n_range))
        return
    M = _module(args.file)
    F = M.field
    if op == "twist":
        try:
            rep.results["module"] = _fmt_matrix(dm.twist(M, args.endo).matrix)
        except dm.UnknownEndomorphism as exc:
            raise InputError(str(exc)) from None
    elif op == "gauge":
        C = _matrix(F, args.matrix)
        rep.results["module"] = _fmt_matrix(_guard(lambda: dm.gauge(M, C).matrix, "--matrix"))
    elif op == "verify":
        N = _module(args.file2, F)
        C = _matrix(F, args.matrix)
        ok = _guard(lambda: dm.verify_gauge_equiv(M, N, C), "--matrix")
        if ok:
            rep.check("gauge equivalence", "pass")
        else:
            rep.check("gauge equivalence", "fail", {"residual": _fmt_matrix(dm.gauge_residual(M, N, C))})
    elif op == "solve":
        N = _module(args.file2, F)
        C = _guard(lambda: dm.solve_gauge(M, N, args.deg, args.denom), "solve")
        if C is None:
            rep.check("solve gauge", "none-found")
        else:
            rep.check("solve gauge", "pass")
            rep.results["gauge"] = _fmt_matrix(C)


# -- hopf -----------------------------------------------------------------------------

def random_element(H: hopf.GLnDiffHopf, rng: random.Random, max_len: int, degree: int, terms: int = 3) -> hopf.GPoly:
    gens = [g for g in H.generators(max_len)]
    f = hopf.GPoly(H.pres)
    for _ in range(terms):
        t = hopf.GPoly.const(H.pres, mpq(rng.randint(-3, 3), rng.randint(1, 3)))
        for _ in range(rng.randint(0, degree)):
            t = t * rng.choice(gens)
        f = f + t
    return f


def cmd_hopf(args, rep: Report) -> None:
    pres = _pres(args.pres) if args.pres else AbelianPresentation(1, ())
    if args.op == "check-axioms":
        H = hopf.GLnDiffHopf(args.n, pres)
        rng = random.Random(args.seed)
        elems = H.generators(args.max_len) + [random_element(H, rng, args.max_len, 2) for _ in range(args.random)]
        failures = H.check_axioms(elems)
        if failures:
            rep.check("hopf axioms", "fail", {"first": failures[0], "count": len(failures)})
        else:
            rep.check("hopf axioms", "pass", elements=len(elems))
    elif args.op == "ord":
        f = _guard(lambda: hopf.GPoly.from_json(pres, _json_arg(args.poly, "--poly")), "--poly")
        rep.results["ord"] = _guard(lambda: hopf.ord_(f), "--poly")
    elif args.op == "filtration":
        try:
            R = hopf.L_filtration(args.n, args.r, args.s, args.p, pres, cap=args.cap)
        except hopf.BasisTooLarge as exc:
            raise InputError(str(exc)) from None
        rep.results["filtration"] = {"dim": R.dim, "words": [list(w) for w in R.words],
                                     "basis": [str(b) for b in R.basis]}
        for name, ok in (("subcomodule certificate", R.certificate), ("equivariance", R.equivariance),
                         ("dimension", R.dim_check)):
            if ok is None:
                continue
            fails = [f for f in R.failures if f["check"] in name]
            rep.check(name, "pass" if ok else "fail", None if ok else {"failures": fails or R.failures})


# -- bundled examples -------------------------------------------------------------------

def run_fixture(name: str, rep: Report, args) -> Dict[str, str] | str:
    doc = load_fixture(name)
    kind = doc["kind"]
    if kind == "action":
        checks = list(doc["expected"])
        return run_action_checks(doc, rep, checks, doc.get("max_len", 2))
    if kind == "contiguity":
        return run_contiguity(doc, rep, getattr(args, "corrected", False))
    if kind == "commute":
        s1 = _fraction(args.s1, "--s1") if getattr(args, "s1", None) else Fraction(doc["s1"])
        s2 = _fraction(args.s2, "--s2") if getattr(args, "s2", None) else Fraction(doc["s2"])
        if s2.denominator != 1 or s2 in (0, 1):
            raise InputError("--s2 must be an integer other than 0 and 1")
        n_range = _n_range(args.n_range) if getattr(args, "n_range", None) else \
            list(range(doc["n_range"][0], doc["n_range"][1] + 1))
        return run_commute(doc, rep, s1, int(s2), n_range)
    raise InputError(f"fixture {name!r} has unknown kind {kind!r}")


def cmd_paper_examples(args, rep: Report) -> None:
    if args.names:
        for name in args.names:
            run_fixture(name, rep, args)
        return
    # suite mode: each fixture is compared with its pinned expectation
    table = []
    for name in fixture_names():
        sub = Report([name])
        got = run_fixture(name, sub, argparse.Namespace())
        want = load_fixture(name)["expected"]
        match = got == want
        table.append({"fixture": name, "expected": want, "actual": got, "match": match})
        if match:
            rep.check(name, "pass", expected=want)
        else:
            rep.check(name, "fail", {"expected": want, "actual": got, "checks": sub.checks})
    rep.results["table"] = table


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tannakit", description="Semigroup actions, difference modules and their checks.")
    p.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    p.add_argument("--json-out", metavar="PATH", help="also write the JSON report to PATH")
    sub = p.add_subparsers(dest="command", required=True)

    sg = sub.add_parser("semigroup", help="words in N^n x Z/n_1 x ... x Z/n_r")
    sg.add_argument("op", choices=["normalize", "multiply", "length", "schedule", "fp-normalize"])
    sg.add_argument("--pres", help='presentation, e.g. \'{"free":2,"torsion":[3]}\'')
    sg.add_argument("--word", help="generator indices (normalize) or exponent vector (length)")
    sg.add_argument("--w1")
    sg.add_argument("--w2")
    sg.add_argument("--factors", help="free product factors: {id: presentation}")
    sg.add_argument("--blocks", help='[{"factor": id, "word": [...]}, ...]')

    co = sub.add_parser("coherence", help="check finite action data")
    co.add_argument("op", choices=["check", "extend"])
    co.add_argument("file")
    co.add_argument("--checks", help="comma separated subset of " + ",".join(COHERENCE_CHECKS))
    co.add_argument("--max-len", type=int)
    co.add_argument("--w1")
    co.add_argument("--w2")

    d = sub.add_parser("diffmod", help="differential modules")
    d.add_argument("op", choices=["twist", "gauge", "verify", "solve", "contiguity", "commute-check"])
    d.add_argument("file", nargs="?")
    d.add_argument("file2", nargs="?")
    d.add_argument("--endo")
    d.add_argument("--matrix", help="gauge matrix as JSON rows of strings, or @file")
    d.add_argument("--deg", type=int, default=1)
    d.add_argument("--denom", default="1")
    d.add_argument("--corrected", action="store_true")
    d.add_argument("--s1", default="1/2")
    d.add_argument("--s2", default="2")
    d.add_argument("--n-range", default="-3:3")

    h = sub.add_parser("hopf", help="GL_n difference Hopf algebra")
    h.add_argument("op", choices=["check-axioms", "ord", "filtration"])
    h.add_argument("--pres")
    h.add_argument("--n", type=int, default=2)
    h.add_argument("--r", type=int, default=0)
    h.add_argument("--s", type=int, default=1)
    h.add_argument("--p", type=int, default=1)
    h.add_argument("--max-len", type=int, default=1)
    h.add_argument("--random", type=int, default=20)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--cap", type=int, default=20000)
    h.add_argument("--poly", help="GPoly JSON")

    pe = sub.add_parser("paper-examples", help="run the bundled fixtures")
    pe.add_argument("names", nargs="*", help="fixtures to run; all with pinned expectations if omitted")
    pe.add_argument("--corrected", action="store_true")
    pe.add_argument("--s1")
    pe.add_argument("--s2")
    pe.add_argument("--n-range")
    return p


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputError("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    rep = Report(argv)
    try:
        if args.command == "semigroup":
            need = {"normalize": ("pres", "word"), "multiply": ("pres", "w1", "w2"), "length": ("pres", "word"),
                    "schedule": ("pres", "w1", "w2"), "fp-normalize": ("factors", "blocks")}[args.op]
            _require(args, *need)
            cmd_semigroup(args, rep)
        elif args.command == "coherence":
            if args.op == "extend":
                _require(args, "w1", "w2")
            cmd_coherence(args, rep)
        elif args.command == "diffmod":
            if args.op in ("twist", "gauge", "verify", "solve"):
                _require(args, "file")
            if args.op in ("verify", "solve"):
                _require(args, "file2")
            if args.op == "twist":
                _require(args, "endo")
            if args.op in ("gauge", "verify"):
                _require(args, "matrix")
            cmd_diffmod(args, rep)
        elif args.command == "hopf":
            if args.op == "ord":
                _require(args, "poly")
            cmd_hopf(args, rep)
        else:
            cmd_paper_examples(args, rep)
    except InputError as exc:
        print(f"tannakit: error: {exc}", file=sys.stderr)
        return 2
    payload = rep.to_json()
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        text = _semigroup_text(rep) if args.command == "semigroup" else None
        print(text if text is not None else rep.text())
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
