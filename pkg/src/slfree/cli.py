"""Command-line front end.

Subcommands: realize, verify, decompose, endo, iso, dual, oracle, classify.
All input and output is JSON with rationals as strings.  Exit codes: 0 for
a clean verdict, 1 for a mathematical failure (relation violation, failed
oracle check), 2 for malformed input or usage errors.

Defaults come from flags, then SLFREE_* environment variables, then the
built-in values; identical input, configuration and seed produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import jsonio
from .expmod import orbit_partition, realize, summand
from .homsolver import end_profile, iso_exp, iso_generic, classify as classify_specs
from .superfree import dual as module_dual, verify_relations
from .weylsim import Oracle, relation_check_truncated, uh_free_census

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _env_int(name, default):
    val = os.environ.get(name)
    if val is None:
        return default
    try:
        return int(val)
    except ValueError:
        raise InputError(f"environment variable {name} must be an integer, got {val!r}")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def _load_spec(path):
    try:
        return jsonio.spec_from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid spec in {path}: {exc}")


def _load_module_or_spec(path):
    data = _load_json(path)
    try:
        if "pairs" in data:
            return jsonio.module_from_json(data)
        return realize(jsonio.spec_from_json(data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid module or spec in {path}: {exc}")


def _default_trunc(m):
    return 12 if m <= 2 else 8


def _emit(args, payload) -> None:
    text = jsonio.dumps(payload)
    out = args.out or os.environ.get("SLFREE_OUT")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------

def cmd_realize(args):
    spec = _load_spec(args.spec)
    _emit(args, jsonio.module_to_json(realize(spec)))
    return EXIT_OK


def cmd_verify(args):
    mod = _load_module_or_spec(args.input)
    report = verify_relations(mod)
    _emit(args, report.to_json())
    return EXIT_OK if report.ok else EXIT_MATH


def cmd_decompose(args):
    spec = _load_spec(args.spec)
    part = orbit_partition(spec)
    classes = []
    for p in range(part.s):
        classes.append({
            "p": p,
            "residues": [list(r) for r in part.classes[p]],
            "shadow": [list(r) for r in part.shadow[p]],
            "summand": jsonio.module_to_json(summand(spec, p)),
        })
    _emit(args, {"s": part.s, "indecomposable": part.s == 1, "classes": classes})
    return EXIT_OK


def cmd_endo(args):
    spec = _load_spec(args.spec)
    profile = end_profile(spec, args.degree)
    _emit(args, {
        "dim": profile.dim,
        "s": spec.s,
        "idempotents": profile.idempotents,
        "degree": args.degree,
    })
    return EXIT_OK


def cmd_iso(args):
    s1 = _load_spec(args.spec1)
    s2 = _load_spec(args.spec2)
    if args.method == "theorem":
        verdict = iso_exp(s1, s2)
        payload = {
            "isomorphic": verdict.isomorphic,
            "witness_support": sorted(verdict.witness_support)
            if verdict.witness_support is not None else None,
            "method": "theorem",
            "D": args.degree,
            "conclusive": True,
        }
    else:
        witness = iso_generic(realize(s1), realize(s2), degree=args.degree,
                              seed=args.seed, samples=args.samples)
        payload = {
            "isomorphic": witness is not None,
            "witness_support": None,
            "method": "generic",
            "D": args.degree,
            "conclusive": witness is not None,
        }
    _emit(args, payload)
    return EXIT_OK


def cmd_dual(args):
    mod = _load_module_or_spec(args.input)
    _emit(args, jsonio.module_to_json(module_dual(mod)))
    return EXIT_OK


def cmd_oracle(args):
    spec = _load_spec(args.spec)
    trunc = args.trunc
    if trunc is None and "SLFREE_TRUNC" in os.environ:
        trunc = _env_int("SLFREE_TRUNC", None)
    if trunc is None:
        trunc = _default_trunc(spec.m)
    oracle = Oracle.for_spec(spec, trunc)
    try:
        relations = relation_check_truncated(oracle)
    except ValueError as exc:
        raise InputError(str(exc))
    payload = {
        "basis_order": "parity-major, then lexicographic in the exponent",
        "relations": relations.to_json(),
    }
    ok = relations.ok
    if args.census:
        census = uh_free_census(spec, trunc)
        payload["census"] = census.to_json()
        ok = ok and census.ok
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_MATH


def cmd_classify(args):
    data = _load_json(args.specs)
    if not isinstance(data, list):
        raise InputError("classify expects a JSON array of specs")
    try:
        specs = [jsonio.spec_from_json(d) for d in data]
        result = classify_specs(specs)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc))
    _emit(args, {
        "classes": result.classes,
        "canonical": [
            {"a": [jsonio.rat_to_str(x) for x in a], "S": sorted(s)}
            for (a, s) in result.canonical
        ],
    })
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slfree",
        description="Exact analysis of U(h)-free rank-(k|k) modules over sl(m|1)",
    )
    parser.add_argument("--format", choices=["json"], default="json",
                        help="output format (json only)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, degree=False, seed=False, trunc=False):
        p.add_argument("--out", help="write the JSON result to this path")
        if degree:
            p.add_argument("--degree", type=int,
                           default=_env_int("SLFREE_DEGREE", 2),
                           help="entry degree bound (default 2)")
        if seed:
            p.add_argument("--seed", type=int,
                           default=_env_int("SLFREE_SEED", 0),
                           help="seed for the randomized search (default 0)")
        if trunc:
            p.add_argument("--trunc", type=int, default=None,
                           help="truncation window (default 12, or 8 for three slots)")

    p = sub.add_parser("realize", help="build the companion-pair module of a spec")
    p.add_argument("spec")
    common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="run the full relation sweep")
    p.add_argument("input", help="spec or module JSON")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="residue classes and direct summands")
    p.add_argument("spec")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("endo", help="endomorphism dimension and idempotents")
    p.add_argument("spec")
    common(p, degree=True)
    p.set_defaults(func=cmd_endo)

    p = sub.add_parser("iso", help="decide isomorphism of two specs")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("--method", choices=["theorem", "generic"], default="theorem")
    p.add_argument("--samples", type=int, default=64)
    common(p, degree=True, seed=True)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("dual", help="the transposed-mate dual module")
    p.add_argument("input", help="spec or module JSON")
    common(p)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("oracle", help="independent truncated relation check")
    p.add_argument("spec")
    p.add_argument("--census", action="store_true",
                   help="also run the free-rank census")
    common(p, trunc=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("classify", help="partition specs into isomorphism classes")
    p.add_argument("specs", help="JSON array of specs")
    common(p)
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
