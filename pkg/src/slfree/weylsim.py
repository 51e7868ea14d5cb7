"""Independent truncated differential-operator oracle.

The generators act on the span of x^b xi^eps e^g, |b| <= N, through the
case table of the twisted embedding into the Weyl superalgebra: polynomial
multiplications, twisted derivatives (the exponent pulls down a copy of
dg/dx_i), and the odd pair xi, d/dxi.  Everything is exact; truncation only
marks columns whose image would leave the window as invalid, and no check
ever consumes an invalid column.

This realization is built straight from the case table, never from the
companion-pair matrices, so agreement between the two is a genuine
cross-validation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import liealg
from .expmod import ExpModuleSpec, MonomialExpSpec, annihilator_witness, block_U, block_V
from .gpm import CompanionPair
from .polyring import Poly, rat
from .superfree import FreeModule, rank_one_module


# ---------------------------------------------------------------------------
# the case table
# ---------------------------------------------------------------------------

def phi_image(elem, S):
    """Image of a spanning-set element as [(coefficient, atom product)].

    Atoms are applied right to left: ("x", i) multiplies, ("dx", i) is the
    twisted derivative, ("xi",) and ("dxi",) are the odd pair.  The empty
    product is the constant term.
    """
    S = frozenset(S)
    tag = elem[0]
    if tag == "h":
        i = elem[1]
        if i not in S:
            return [(Fraction(1), (("x", i), ("dx", i))), (Fraction(1), (("xi",), ("dxi",)))]
        return [
            (Fraction(-1), (("x", i), ("dx", i))),
            (Fraction(-1), ()),
            (Fraction(1), (("xi",), ("dxi",))),
        ]
    if tag == "e":
        _, i, j = elem
        if i not in S and j not in S:
            return [(Fraction(1), (("x", i), ("dx", j)))]
        if i in S and j not in S:
            return [(Fraction(1), (("dx", i), ("dx", j)))]
        if i not in S and j in S:
            return [(Fraction(-1), (("x", i), ("x", j)))]
        return [(Fraction(-1), (("x", j), ("dx", i)))]
    if tag == "e+":
        i = elem[1]
        if i not in S:
            return [(Fraction(1), (("x", i), ("dxi",)))]
        return [(Fraction(1), (("dx", i), ("dxi",)))]
    if tag == "e-":
        i = elem[1]
        if i not in S:
            return [(Fraction(1), (("xi",), ("dx", i)))]
        return [(Fraction(-1), (("x", i), ("xi",)))]
    raise ValueError(f"unknown basis element {elem}")


def apply_twisted(atoms, b, eps, partials):
    """Apply an atom product to x^b xi^eps e^g, exactly and untruncated.

    `partials` lists dg/dx_i as exponent dicts.  Returns {(b', eps'): coeff}.
    """
    terms = {(tuple(b), eps): Fraction(1)}
    for atom in reversed(atoms):
        nxt = {}

        def put(key, c):
            if not c:
                return
            s = nxt.get(key)
            s = c if s is None else s + c
            if s:
                nxt[key] = s
            else:
                nxt.pop(key, None)

        kind = atom[0]
        for (bb, ee), c in terms.items():
            if kind == "x":
                i = atom[1] - 1
                put((bb[:i] + (bb[i] + 1,) + bb[i + 1:], ee), c)
            elif kind == "dx":
                i = atom[1] - 1
                if bb[i]:
                    put((bb[:i] + (bb[i] - 1,) + bb[i + 1:], ee), c * bb[i])
                for t, g in partials[atom[1] - 1].items():
                    put((tuple(u + v for u, v in zip(bb, t)), ee), c * g)
            elif kind == "xi":
                if ee == 0:
                    put((bb, 1), c)
            elif kind == "dxi":
                if ee == 1:
                    put((bb, 0), c)
            else:
                raise ValueError(f"unknown atom {atom}")
        terms = nxt
    return terms


# ---------------------------------------------------------------------------
# truncated actions
# ---------------------------------------------------------------------------

@dataclass
class TruncAction:
    """Sparse action on the truncated basis; None columns would overflow."""

    elem: tuple
    cols: list


class Oracle:
    """Truncated model of one exponent datum (power sum, monomial, or a
    general polynomial twist)."""

    def __init__(self, m: int, gx: dict, S, N: int):
        self.m = m
        self.S = frozenset(S)
        self.N = N
        self.gx = {tuple(e): rat(c) for e, c in gx.items() if rat(c)}
        self.partials = []
        for i in range(m):
            d = {}
            for e, c in self.gx.items():
                if e[i]:
                    d[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
            self.partials.append(d)
        self.basis = [
            (b, eps)
            for eps in (0, 1)
            for b in sorted(_monomials_leq(m, N))
        ]
        self.index = {be: i for i, be in enumerate(self.basis)}
        self._actions = {}

    @classmethod
    def for_spec(cls, spec: ExpModuleSpec, N: int) -> "Oracle":
        gx = {}
        for i, (a, k) in enumerate(zip(spec.a, spec.k)):
            e = [0] * spec.m
            e[i] = k
            gx[tuple(e)] = a
        return cls(spec.m, gx, spec.S, N)

    @classmethod
    def for_monomial(cls, mono: MonomialExpSpec, N: int) -> "Oracle":
        return cls(mono.m, {mono.lvec: mono.alpha}, mono.S, N)

    @classmethod
    def for_poly(cls, m: int, gx: dict, S, N: int) -> "Oracle":
        return cls(m, gx, S, N)

    # -- degree bookkeeping --------------------------------------------------

    def _atom_raise(self, atom) -> int:
        if atom[0] == "x":
            return 1
        if atom[0] == "dx":
            d = self.partials[atom[1] - 1]
            return max([-1] + [sum(e) for e in d])
        return 0

    def generator_raise(self, elem) -> int:
        out = 0
        for _, atoms in phi_image(elem, self.S):
            out = max(out, sum(self._atom_raise(a) for a in atoms))
        return out

    def delta_max(self) -> int:
        return max(self.generator_raise(x) for x in liealg.basis(self.m))

    # -- actions ---------------------------------------------------------------

    def action(self, elem) -> TruncAction:
        if elem not in self._actions:
            cols = []
            for (b, eps) in self.basis:
                acc = {}
                for coeff, atoms in phi_image(elem, self.S):
                    for key, c in apply_twisted(atoms, b, eps, self.partials).items():
                        s = acc.get(key, Fraction(0)) + coeff * c
                        if s:
                            acc[key] = s
                        else:
                            acc.pop(key, None)
                if any(sum(bb) > self.N for (bb, _) in acc):
                    cols.append(None)
                else:
                    cols.append([(self.index[key], c) for key, c in acc.items()])
            self._actions[elem] = TruncAction(elem, cols)
        return self._actions[elem]

    def apply(self, elem, vec: dict) -> dict:
        """Apply to a sparse vector {basis index: coeff}; consuming an
        invalid column is a hard error, never a silent truncation."""
        action = self.action(elem)
        out = {}
        for idx, c in vec.items():
            col = action.cols[idx]
            if col is None:
                raise ArithmeticError(
                    f"guard-band violation: column {self.basis[idx]} invalid for {elem}"
                )
            for row, a in col:
                s = out.get(row, Fraction(0)) + c * a
                if s:
                    out[row] = s
                else:
                    del out[row]
        return out


def _monomials_leq(m: int, N: int):
    return [e for e in itertools.product(*[range(N + 1)] * m) if sum(e) <= N]


# ---------------------------------------------------------------------------
# relation sweep
# ---------------------------------------------------------------------------

@dataclass
class OracleReport:
    checked: int
    failures: list
    guard: int
    rows_checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "guard": self.guard,
            "rows_checked": self.rows_checked,
            "failed": [
                {"X": liealg.format_element(x), "Y": liealg.format_element(y),
                 "row": list(b), "parity": eps}
                for (x, y, (b, eps)) in self.failures
            ],
        }


def relation_check_truncated(oracle: Oracle) -> OracleReport:
    """Verify every super-commutator on all rows inside the guard band."""
    dmax = oracle.delta_max()
    guard = 2 * dmax
    if oracle.N < guard:
        raise ValueError(f"truncation {oracle.N} below the guard band {guard}")
    elems = liealg.basis(oracle.m)
    rows = [i for i, (b, _) in enumerate(oracle.basis) if sum(b) <= oracle.N - guard]
    failures = []
    checked = 0
    for a, x in enumerate(elems):
        for y in elems[a:]:
            ordered = [(x, y)] if x == y else [(x, y), (y, x)]
            for (u, v) in ordered:
                checked += 1
                sign = (-1) ** (liealg.parity(u) * liealg.parity(v))
                combo = liealg.gl_bracket(u, v, oracle.m)
                for idx in rows:
                    vec = {idx: Fraction(1)}
                    lhs = oracle.apply(u, oracle.apply(v, vec))
                    rhs = oracle.apply(v, oracle.apply(u, vec))
                    res = dict(lhs)
                    for key, c in rhs.items():
                        s = res.get(key, Fraction(0)) - sign * c
                        if s:
                            res[key] = s
                        else:
                            res.pop(key, None)
                    for z, cz in combo.items():
                        for key, c in oracle.apply(z, vec).items():
                            s = res.get(key, Fraction(0)) - cz * c
                            if s:
                                res[key] = s
                            else:
                                res.pop(key, None)
                    if res:
                        failures.append((u, v, oracle.basis[idx]))
                        break
    return OracleReport(checked, failures, guard, len(rows))


# ---------------------------------------------------------------------------
# the two explicit intertwiners
# ---------------------------------------------------------------------------

def _falling(base: Poly, n: int) -> Poly:
    out = Poly.one(base.m)
    for t in range(n):
        out = out * (base - Poly.const(base.m, t))
    return out


def _rising(base: Poly, n: int) -> Poly:
    out = Poly.one(base.m)
    for t in range(n):
        out = out * (base + Poly.const(base.m, t))
    return out


def theta_check(m: int, a, S, N: int) -> bool:
    """Linear-twist intertwiner: map x^b to a product of falling factorials
    off the twist set and rising ones on it, and compare both actions.

    Checks every generator on every column the oracle can evaluate."""
    a = tuple(rat(x) for x in a)
    S = frozenset(S)
    spec = ExpModuleSpec(m, a, (1,) * m, S)
    oracle = Oracle.for_spec(spec, N)
    a_twisted = tuple(a[i - 1] if i in S else 1 / a[i - 1] for i in range(1, m + 1))
    target = rank_one_module(a_twisted, frozenset(range(1, m + 1)) - S)

    def theta(b, eps):
        out = Poly.one(m)
        for i in range(1, m + 1):
            hv = Poly.var(m, i)
            n = b[i - 1]
            if i not in S:
                base = hv if eps == 0 else hv - Poly.one(m)
                out = out * _falling(base, n).scale(a[i - 1] ** -n)
            else:
                base = hv + Poly.one(m) if eps == 0 else hv
                out = out * _rising(base, n).scale((-1 / a[i - 1]) ** n)
        vec = [Poly.zero(m), Poly.zero(m)]
        vec[eps] = out
        return vec

    for x in liealg.basis(m):
        action = oracle.action(x)
        for idx, (b, eps) in enumerate(oracle.basis):
            if action.cols[idx] is None:
                continue
            lhs = [Poly.zero(m), Poly.zero(m)]
            for row, c in action.cols[idx]:
                bb, ee = oracle.basis[row]
                img = theta(bb, ee)
                lhs = [u + v.scale(c) for u, v in zip(lhs, img)]
            rhs = target.op(x).apply(theta(b, eps))
            if lhs != rhs:
                return False
    return True


def phi_sl11_check(a, k: int, S, N: int) -> bool:
    """Single-slot intertwiner onto the circulant-block module; the image
    coefficients are falling (plain twist) or rising (marked twist)
    factorial chains with the k-step."""
    a = rat(a)
    S = frozenset(S)
    if S not in (frozenset(), frozenset({1})):
        raise ValueError("twist set must be empty or {1}")
    spec = ExpModuleSpec(1, (a,), (k,), S)
    oracle = Oracle.for_spec(spec, N)
    ak = a * k
    if not S:
        block = block_U(ak, 1, k - 1, 1)
    else:
        block = block_V(ak, 1, 1, k - 1)
    target = FreeModule(1, [CompanionPair.of(block)])
    h1 = Poly.var(1, 1)

    def image(b, eps):
        q, p = divmod(b, k)
        coeff = Poly.one(1)
        for j in range(q):
            if not S:
                off = p + k * j if eps == 0 else p + 1 + k * j
                coeff = coeff * (h1 - Poly.const(1, off))
            else:
                off = p + 1 + k * j if eps == 0 else p + k * j
                coeff = coeff * (h1 + Poly.const(1, off))
        scale = (1 / ak) ** q if not S else (-1 / ak) ** q
        vec = [Poly.zero(1) for _ in range(2 * k)]
        vec[p if eps == 0 else k + p] = coeff.scale(scale)
        return vec

    for x in liealg.basis(1):
        action = oracle.action(x)
        for idx, ((b,), eps) in enumerate(oracle.basis):
            if action.cols[idx] is None:
                continue
            lhs = [Poly.zero(1) for _ in range(2 * k)]
            for row, c in action.cols[idx]:
                (bb,), ee = oracle.basis[row]
                lhs = [u + v.scale(c) for u, v in zip(lhs, image(bb, ee))]
            rhs = target.op(x).apply(image(b, eps))
            if lhs != rhs:
                return False
    return True


# ---------------------------------------------------------------------------
# free-rank census
# ---------------------------------------------------------------------------

@dataclass
class CensusReport:
    classes: int
    expected_classes: int
    class_dims: dict
    ok: bool

    def to_json(self) -> dict:
        return {
            "classes": self.classes,
            "expected_classes": self.expected_classes,
            "class_dims": {str(k): v for k, v in sorted(self.class_dims.items())},
            "ok": self.ok,
        }


def uh_free_census(spec: ExpModuleSpec, N: int) -> CensusReport:
    """Check that the Cartan span of each x^r xi^eps recovers exactly the
    truncated residue-class subspace, one class per (residue, parity)."""
    oracle = Oracle.for_spec(spec, N)
    m = spec.m
    ok = True
    class_dims = {}
    grid = [tuple(r) for r in itertools.product(*[range(ki) for ki in spec.k])]
    for eps in (0, 1):
        for r in grid:
            expected = {
                (b, eps)
                for (b, e2) in oracle.basis
                if e2 == eps and all((bi - ri) % ki == 0 for bi, ri, ki in zip(b, r, spec.k))
            }
            reached = {(r, eps)}
            frontier = [(r, eps)]
            while frontier:
                key = frontier.pop()
                idx = oracle.index[key]
                for i in range(1, m + 1):
                    col = oracle.action(liealg.h(i)).cols[idx]
                    if col is None:
                        continue
                    img = {oracle.basis[row]: c for row, c in col}
                    if not set(img) <= expected:
                        ok = False
                        continue
                    for new_key, c in img.items():
                        if new_key != key and c and new_key not in reached:
                            reached.add(new_key)
                            frontier.append(new_key)
            class_dims[(r, eps)] = len(reached)
            if reached != expected:
                ok = False
    return CensusReport(
        classes=len(class_dims),
        expected_classes=2 * spec.K,
        class_dims=class_dims,
        ok=ok and len(class_dims) == 2 * spec.K,
    )


def monomial_torsion_check(mono: MonomialExpSpec, N: int) -> bool:
    """For a monomial datum with a vanishing exponent slot, confirm the
    quadratic witness annihilates every x^b within the window."""
    zero_slots = [i for i in range(1, mono.m + 1) if mono.lvec[i - 1] == 0]
    if not zero_slots:
        raise ValueError("no vanishing exponent slot")
    oracle = Oracle.for_monomial(mono, N)
    for i in zero_slots:
        h_action = oracle.action(liealg.h(i))
        for idx, (b, eps) in enumerate(oracle.basis):
            if eps != 0 or h_action.cols[idx] is None:
                continue
            witness = annihilator_witness(mono, i, b)
            # evaluate witness(h_i) on the basis vector through the oracle
            vec = {idx: Fraction(1)}
            coeffs = _uni_coeffs_in_slot(witness, i)
            acc = {}
            power = dict(vec)
            for c in coeffs:
                for key, v in power.items():
                    s = acc.get(key, Fraction(0)) + c * v
                    if s:
                        acc[key] = s
                    else:
                        acc.pop(key, None)
                power = oracle.apply(liealg.h(i), power)
            if acc:
                return False
    return True


def _uni_coeffs_in_slot(p: Poly, i: int):
    """Coefficients of p as a polynomial in h_i alone (p must only use h_i)."""
    out = {}
    for e, c in p.terms.items():
        if any(v for j, v in enumerate(e) if j != i - 1):
            raise ValueError("polynomial involves other slots")
        out[e[i - 1]] = c
    return [out.get(d, Fraction(0)) for d in range(max(out) + 1)]
