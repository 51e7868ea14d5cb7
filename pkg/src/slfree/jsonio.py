"""JSON wire formats.

Every rational travels as a string ("5", "-3/2"); no floating point appears
anywhere.  Polynomials are sparse term lists [[exponents...], coefficient],
sorted by exponent tuple so serialization is canonical.  Permutations are
1-based on the wire.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .expmod import ExpModuleSpec
from .gpm import GPM, CompanionPair
from .polyring import Poly, rat
from .superfree import FreeModule


def rat_to_str(x: Fraction) -> str:
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_from_json(v) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise ValueError(f"rationals must be strings or integers, got {v!r}")
    return rat(v)


def poly_to_json(p: Poly) -> list:
    return [[list(e), rat_to_str(c)] for e, c in sorted(p.terms.items())]


def poly_from_json(m: int, data) -> Poly:
    terms = {}
    for e, c in data:
        terms[tuple(int(x) for x in e)] = rat_from_json(c)
    return Poly(m, terms)


def gpm_to_json(g: GPM) -> dict:
    return {
        "size": g.size,
        "var": g.var,
        "perm": [r + 1 for r in g.perm],
        "entries": [{"coef": rat_to_str(c), "deg": d} for (c, d) in g.entries],
    }


def gpm_from_json(d: dict) -> GPM:
    return GPM(
        int(d["size"]),
        int(d["var"]),
        [int(r) - 1 for r in d["perm"]],
        [(rat_from_json(e["coef"]), int(e["deg"])) for e in d["entries"]],
    )


def module_to_json(mod: FreeModule) -> dict:
    return {
        "m": mod.m,
        "ell": mod.ell,
        "pairs": [
            {"A": gpm_to_json(p.a), "Acomp": gpm_to_json(p.acomp)}
            for p in mod.pairs
        ],
    }


def module_from_json(d: dict) -> FreeModule:
    pairs = [
        CompanionPair(gpm_from_json(p["A"]), gpm_from_json(p["Acomp"]))
        for p in d["pairs"]
    ]
    return FreeModule(int(d["m"]), pairs)


def spec_to_json(spec: ExpModuleSpec) -> dict:
    return {
        "m": spec.m,
        "a": [rat_to_str(x) for x in spec.a],
        "k": list(spec.k),
        "S": sorted(spec.S),
    }


def spec_from_json(d: dict) -> ExpModuleSpec:
    return ExpModuleSpec(
        int(d["m"]),
        tuple(rat_from_json(x) for x in d["a"]),
        tuple(int(x) for x in d["k"]),
        frozenset(int(x) for x in d.get("S", [])),
    )


def dumps(obj) -> str:
    """Canonical serialization: stable key order, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
