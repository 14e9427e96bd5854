"""Command line front end: ``cubar <command> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Optional

from .chaincore import verify_dd_zero
from .coeff import RingSpec, WeightVector, span_is_unit
from .cubeexpr import Base
from .cwcalc import (CWHomologyInput, TrivialCoefficientWarning, integral_homology,
                     theorem4_predict)
from .gridmodel import (BUILTIN_MODELS, GridModel, connecting_and_les_check, load_builtin,
                        sd_homology_check)
from .homotopylab import (PrismHomotopy, verify_prism_identity, verify_sd_homotopy,
                          verify_sd_naturality)
from .reduce import INF, parse_variant, point_theory_table, variant_matrices, variant_name

SUITES = ("thm1", "lemma2", "lemma3", "eq7", "les", "sd-lemma4")


class InputError(ValueError):
    """Invalid command line input (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    ring: RingSpec
    weight: Optional[WeightVector]
    L: Optional[int]
    model: Optional[str]
    beta: object
    degrees: list


def parse_degrees(text: str) -> list:
    """``0..6``, ``3`` or ``0,2,4``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--degrees: cannot parse {text!r}") from None
    if not out or min(out) < 0:
        raise InputError("--degrees: need a non-empty range of non-negative degrees")
    return out


def parse_weight(text: str, ring: RingSpec, L: Optional[int] = None) -> WeightVector:
    try:
        w = WeightVector(ring, tuple(Fraction(x.strip()) if "/" in x else int(x)
                                     for x in text.split(",")))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--weight: {exc}") from None
    if L is not None and w.L != L:
        raise InputError(f"--weight has {len(w)} entries but --L {L} needs {L + 1}")
    return w


def parse_ring(text: str) -> RingSpec:
    try:
        return RingSpec.parse(text)
    except ValueError as exc:
        raise InputError(f"--ring: {exc}") from None


def resolve_model(spec: str, L: int) -> GridModel:
    if spec in BUILTIN_MODELS:
        return load_builtin(spec, L)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"--model: {spec!r} is neither a built-in model "
                         f"({', '.join(BUILTIN_MODELS)}) nor a file")
    try:
        return GridModel.from_json(path.read_text(), path.stem).with_L(L)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"--model {spec}: {exc}") from None


def _group(h) -> dict:
    d = h.to_json()
    d["text"] = str(h)
    return d


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CUBAR_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands

def cmd_homology(args) -> tuple:
    ring = parse_ring(args.ring)
    w = parse_weight(args.weight, ring, args.L)
    beta = parse_variant(args.beta) if args.beta is not None else parse_variant(args.variant)
    degrees = parse_degrees(args.degrees)
    model = resolve_model(args.model, w.L)
    bm = variant_matrices(model, w, beta, max(degrees))
    rows = [{"degree": n, "group": _group(bm.homology(n))} for n in degrees]
    report = {"command": args.command, "model": args.model, "ring": str(ring),
              "weight": [str(x) for x in w.entries], "L": w.L, "variant": variant_name(beta),
              "degrees": rows, "stats": bm.stats()}
    if model.L >= 2:
        report["note"] = ("finite model with faces at i/L; its homology is not "
                          "claimed to be that of the underlying space")
    return report, 0


def cmd_point_table(args) -> tuple:
    ring = parse_ring(args.ring)
    w = parse_weight(args.weight, ring, args.L)
    beta = parse_variant(args.beta) if args.beta is not None else parse_variant(args.variant)
    degrees = parse_degrees(args.degrees)
    table = point_theory_table(w, max(degrees), beta, cross_check=args.cross_check)
    return {"command": "point-table", "ring": str(ring), "weight": [str(x) for x in w.entries],
            "variant": variant_name(beta),
            "degrees": [{"degree": n, "group": _group(table[n])} for n in degrees]}, 0


def _load_cw_input(args, n_max: int) -> tuple:
    if args.input:
        path = Path(args.input)
        if not path.exists():
            raise InputError(f"--input: no such file {args.input!r}")
        data = json.loads(path.read_text())
        if isinstance(data, dict) and "top_cells" in data:
            return integral_homology(GridModel.from_json(data, path.stem), n_max), path.stem
        try:
            return CWHomologyInput.from_json(data), path.stem
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"--input {args.input}: {exc}") from None
    if args.model:
        return integral_homology(resolve_model(args.model, 1), n_max), args.model
    raise InputError("cw-predict needs --input or --model")


def cmd_cw_predict(args) -> tuple:
    try:
        a, b = (int(x) for x in args.weight.split(","))
    except ValueError:
        raise InputError("--weight for cw-predict is a pair a,b of integers") from None
    if gcd(a, b) != 1:
        raise InputError(f"gcd({a}, {b}) != 1: the formula does not apply")
    degrees = parse_degrees(args.degrees)
    data, source = _load_cw_input(args, max(degrees))
    report = {"command": "cw-predict", "source": source, "a": a, "b": b,
              "integral": [_group(h) for h in data.integral_H]}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TrivialCoefficientWarning)
        rows = [{"degree": n, "group": _group(theorem4_predict(data, a, b, n))}
                for n in degrees]
    report["degrees"] = rows
    if caught:
        report["warning"] = str(caught[0].message)
    return report, 0


def cmd_normalize(args) -> tuple:
    if args.beta is None:
        args.beta = "inf"
    return cmd_homology(args)


# verification suites

def _random_weight(rng, L: int) -> WeightVector:
    return WeightVector.of(tuple(rng.randint(-3, 3) for _ in range(L + 1)))


def _suite_thm1(args, rng) -> list:
    cases = []
    for _ in range(args.cases or 200):
        n, L = rng.randint(1, 5), rng.randint(1, 4)
        cases.append((Base.random(rng, n, 2, 1), _random_weight(rng, L)))

    def run(case):
        T, w = case
        cert = verify_dd_zero(T, w)
        expected = T.arity * (T.arity - 1) * (w.L + 1) ** 2
        out = cert.to_json()
        out["degree"], out["L"] = T.arity, w.L
        if cert.terms != expected:
            out["status"] = "fail"
            out["term_count_expected"] = expected
        return out
    return _pmap(run, cases)


def _suite_lemma2(args, rng) -> list:
    fixed = parse_weight(args.weight, RingSpec.integers()) if args.weight else None
    if fixed is not None and not span_is_unit(fixed)[0]:
        return [{"identity": "lemma2", "status": "expected-unconstructible",
                 "weight": [str(x) for x in fixed.entries],
                 "reason": "no span witness: the weight entries do not generate the unit ideal"}]
    cases = []
    while len(cases) < (args.cases or 50):
        n = rng.randint(0, 3)
        w = fixed or _random_weight(rng, rng.randint(1, 3))
        if not span_is_unit(w)[0]:
            continue
        cases.append((Base.random(rng, n, 2, 2), w))
    step = Fraction(args.lattice_step) if args.lattice_step else None

    def run(case):
        T, w = case
        out = verify_prism_identity(T, PrismHomotopy.from_weight(w), step).to_json()
        out["degree"], out["weight"] = T.arity, [str(x) for x in w.entries]
        return out
    return _pmap(run, cases)


def _ab_cases(args, rng, count):
    fixed = None
    if args.weight:
        w = parse_weight(args.weight, RingSpec.integers(), 1)
        fixed = tuple(int(x) for x in w.entries)
    pairs = [(a, b) for a in range(-4, 5) for b in range(-4, 5)]
    return [fixed or rng.choice(pairs) for _ in range(count)]


def _suite_lemma3(args, rng) -> list:
    cases = [(Base.random(rng, rng.randint(0, 3), 2, 2), ab)
             for ab in _ab_cases(args, rng, args.cases or 50)]
    step = Fraction(args.lattice_step) if args.lattice_step else None

    def run(case):
        T, (a, b) = case
        out = verify_sd_naturality(T, a, b, lattice_step=step).to_json()
        out["degree"], out["weight"] = T.arity, [a, b]
        return out
    return _pmap(run, cases)


def _suite_eq7(args, rng) -> list:
    cases = [(Base.random(rng, rng.randint(0, 2), 2, 2), ab, tilde)
             for ab in _ab_cases(args, rng, args.cases or 20) for tilde in (False, True)]
    step = Fraction(args.lattice_step) if args.lattice_step else None

    def run(case):
        T, (a, b), tilde = case
        out = verify_sd_homotopy(T, a, b, tilde, step).to_json()
        out["degree"], out["weight"] = T.arity, [a, b]
        return out
    return _pmap(run, cases)


def _suite_les(args, rng) -> list:
    weights = [parse_weight(args.weight, RingSpec.integers(), 1)] if args.weight else \
        [WeightVector.of((1, -1)), WeightVector.of((2, 3))]
    out = []
    for name in ("interval-pair", "d2-pair"):
        m = load_builtin(name)
        for w in weights:
            r = connecting_and_les_check(m.generators(), m.sub_generators(), w)
            d = r.to_json()
            out.append({"identity": "les", "model": name, "weight": [str(x) for x in w.entries],
                        "status": "ok" if r.exact else "fail", "slots": d["slots"],
                        "connecting_nonzero": d["connecting_nonzero"]})
    return out


def _suite_sd_lemma4(args, rng) -> list:
    ab = [tuple(int(x) for x in args.weight.split(","))] if args.weight else [(2, 3), (1, -1)]
    out = []
    for a, b in ab:
        if gcd(a, b) != 1:
            out.append({"identity": "sd-lemma4", "status": "expected-unconstructible",
                        "weight": [a, b], "reason": "a^k and b^k are not coprime"})
            continue
        for name, pad in (("point", 3), ("s1", None)):
            rep = sd_homology_check(load_builtin(name), a, b, 1, pad_to=pad)
            d = rep.to_json()
            d["model"] = name
            out.append(d)
    return out


def cmd_verify(args) -> tuple:
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    rng = random.Random(args.seed)
    runner = {"thm1": _suite_thm1, "lemma2": _suite_lemma2, "lemma3": _suite_lemma3,
              "eq7": _suite_eq7, "les": _suite_les, "sd-lemma4": _suite_sd_lemma4}[args.suite]
    results = runner(args, rng)
    failed = [r for r in results if r["status"] == "fail"]
    status = "fail" if failed else ("expected-unconstructible" if results and all(
        r["status"] == "expected-unconstructible" for r in results) else "pass")
    report = {"command": "verify", "suite": args.suite, "seed": args.seed,
              "status": status, "cases": len(results), "failed": len(failed),
              "failures": failed[:5]}
    if args.details:
        report["results"] = results
    return report, 1 if failed else 0


# ---------------------------------------------------------------------------
# output

def render_text(report: dict) -> str:
    lines = []
    head = {k: v for k, v in report.items()
            if k not in ("degrees", "results", "failures", "integral", "stats", "timing")}
    lines.append(" ".join(f"{k}={v}" for k, v in head.items()))
    if "integral" in report:
        lines.append("integral: " + ", ".join(g["text"] for g in report["integral"]))
    for row in report.get("degrees", []):
        lines.append(f"H_{row['degree']} = {row['group']['text']}")
    for f in report.get("failures", []):
        lines.append("FAIL " + json.dumps(f, sort_keys=True))
    if "timing" in report:
        lines.append(f"time {report['timing']['seconds']:.3f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubar", description="Weighted cubical homology toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    common.set_defaults(fmt="json")
    common.add_argument("--timing", action="store_true", help="add wall-clock time")
    sub = p.add_subparsers(dest="command", required=True)

    def homology_args(sp, default_variant):
        sp.add_argument("--model", default="point")
        sp.add_argument("--ring", default="Z")
        sp.add_argument("--weight", default="1,-1")
        sp.add_argument("--L", type=int, default=None)
        sp.add_argument("--variant", default=default_variant,
                        help="raw, normalized or beta=<k>")
        sp.add_argument("--beta", default=None, help="cut degree k or inf")
        sp.add_argument("--degrees", default="0..3")

    homology_args(sub.add_parser("homology", parents=[common]), "raw")
    homology_args(sub.add_parser("normalize", parents=[common]), "normalized")

    sp = sub.add_parser("point-table", parents=[common])
    sp.add_argument("--ring", default="Z")
    sp.add_argument("--weight", default="1,1")
    sp.add_argument("--L", type=int, default=None)
    sp.add_argument("--variant", default="raw")
    sp.add_argument("--beta", default=None)
    sp.add_argument("--degrees", default="0..12")
    sp.add_argument("--cross-check", action="store_true")

    sp = sub.add_parser("cw-predict", parents=[common])
    sp.add_argument("--weight", required=True)
    sp.add_argument("--degrees", default="0..6")
    sp.add_argument("--input", default=None)
    sp.add_argument("--model", default=None)

    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("--suite", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=None)
    sp.add_argument("--weight", default=None)
    sp.add_argument("--lattice-step", default=None)
    sp.add_argument("--details", action="store_true", help="include every case")
    return p


COMMANDS = {"homology": cmd_homology, "normalize": cmd_normalize,
            "point-table": cmd_point_table, "cw-predict": cmd_cw_predict, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"cubar {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    if args.fmt == "text":
        print(render_text(report))
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
