"""U(h)-free rank-(l|l) modules presented by companion pairs.

A module is the column space Q[h]^l (+) Q[h]^l (even part first) on which
the generators act through shift-twisted operators: finite sums of terms
(M(h), z) acting as f |-> M(h) * (shift_z f), where shift_z substitutes
h - z.  Composition obeys (M, z)(N, w) = (M * shift_z(N), z + w) and the
parity of a product adds mod 2.

The odd generator at slot i acts by the block [[0, A_i], [0, 0]] twisted by
the inverse complementary shift, its partner by [[0, 0], [A_i^comp, 0]]
twisted by the complementary shift; even off-diagonal generators are never
stored, they are derived as anticommutators of odd ones.
"""

from __future__ import annotations

from fractions import Fraction

from . import liealg
from .gpm import GPM, CompanionPair
from .polyring import Poly, delta_i_shift, shift_add, shift_apply, UniPoly, substitute_sum, exact_divide


# ---------------------------------------------------------------------------
# sparse matrices of polynomials: dict (row, col) -> nonzero Poly
# ---------------------------------------------------------------------------

def mat_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for rc, p in b.items():
        q = out.get(rc)
        if q is None:
            out[rc] = p
        else:
            s = q + p
            if s.is_zero():
                del out[rc]
            else:
                out[rc] = s
    return out


def mat_neg(a: dict) -> dict:
    return {rc: -p for rc, p in a.items()}


def mat_scale(a: dict, c) -> dict:
    if c == 0:
        return {}
    return {rc: p.scale(c) for rc, p in a.items()}


def mat_mul(a: dict, b: dict) -> dict:
    by_row = {}
    for (r, c), p in b.items():
        by_row.setdefault(r, []).append((c, p))
    out = {}
    for (r, s), p in a.items():
        for c, q in by_row.get(s, ()):
            prod = p * q
            if prod.is_zero():
                continue
            key = (r, c)
            acc = out.get(key)
            if acc is None:
                out[key] = prod
            else:
                acc = acc + prod
                if acc.is_zero():
                    del out[key]
                else:
                    out[key] = acc
    return out


def mat_shift(z: tuple, a: dict) -> dict:
    out = {}
    for rc, p in a.items():
        q = shift_apply(z, p)
        if not q.is_zero():
            out[rc] = q
    return out


def mat_apply(a: dict, vec: list) -> list:
    out = [Poly.zero(vec[0].m) for _ in vec] if vec else []
    for (r, c), p in a.items():
        out[r] = out[r] + p * vec[c]
    return out


# ---------------------------------------------------------------------------
# twisted operators
# ---------------------------------------------------------------------------

class TwistedOperator:
    """Finite sum of (matrix, shift) terms of a fixed parity."""

    __slots__ = ("m", "n", "parity", "terms")

    def __init__(self, m: int, n: int, parity: int, terms=None):
        self.m = m
        self.n = n
        self.parity = parity % 2
        clean = {}
        if terms:
            for z, mat in terms.items():
                mat = {rc: p for rc, p in mat.items() if not p.is_zero()}
                if mat:
                    clean[tuple(z)] = mat
        self.terms = clean

    @classmethod
    def zero(cls, m: int, n: int, parity: int = 0) -> "TwistedOperator":
        return cls(m, n, parity)

    @classmethod
    def single(cls, m: int, n: int, parity: int, mat: dict, z: tuple) -> "TwistedOperator":
        return cls(m, n, parity, {tuple(z): mat})

    def _check(self, other: "TwistedOperator"):
        if self.m != other.m or self.n != other.n:
            raise ValueError("operator dimensions differ")

    def __add__(self, other: "TwistedOperator") -> "TwistedOperator":
        self._check(other)
        if self.terms and other.terms and self.parity != other.parity:
            raise ValueError("cannot add operators of different parity")
        terms = {z: dict(mat) for z, mat in self.terms.items()}
        for z, mat in other.terms.items():
            terms[z] = mat_add(terms.get(z, {}), mat)
        parity = self.parity if self.terms else other.parity
        return TwistedOperator(self.m, self.n, parity, terms)

    def __neg__(self) -> "TwistedOperator":
        return TwistedOperator(
            self.m, self.n, self.parity,
            {z: mat_neg(mat) for z, mat in self.terms.items()},
        )

    def __sub__(self, other: "TwistedOperator") -> "TwistedOperator":
        return self + (-other)

    def scale(self, c) -> "TwistedOperator":
        return TwistedOperator(
            self.m, self.n, self.parity,
            {z: mat_scale(mat, c) for z, mat in self.terms.items()},
        )

    def compose(self, other: "TwistedOperator") -> "TwistedOperator":
        """Operator product: (M, z)(N, w) = (M * shift_z(N), z + w)."""
        self._check(other)
        terms = {}
        for z, mat in self.terms.items():
            for w, nat in other.terms.items():
                prod = mat_mul(mat, mat_shift(z, nat))
                if not prod:
                    continue
                key = shift_add(z, w)
                acc = terms.get(key)
                terms[key] = prod if acc is None else mat_add(acc, prod)
        return TwistedOperator(self.m, self.n, (self.parity + other.parity) % 2, terms)

    def apply(self, vec: list) -> list:
        """Apply to a module element (list of 2l polynomials)."""
        if len(vec) != self.n:
            raise ValueError("vector length does not match operator size")
        out = [Poly.zero(self.m) for _ in range(self.n)]
        for z, mat in self.terms.items():
            shifted = [shift_apply(z, f) for f in vec]
            img = mat_apply(mat, shifted)
            out = [a + b for a, b in zip(out, img)]
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def nonzero_entry_count(self) -> int:
        return sum(len(mat) for mat in self.terms.values())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TwistedOperator)
            and self.m == other.m
            and self.n == other.n
            and self.terms == other.terms
            and (self.is_zero() or other.is_zero() or self.parity == other.parity)
        )

    def __repr__(self):
        return f"TwistedOperator(n={self.n}, parity={self.parity}, shifts={sorted(self.terms)})"


def super_bracket(p: TwistedOperator, q: TwistedOperator) -> TwistedOperator:
    """[p, q} = pq - (-1)^(|p||q|) qp for parity-homogeneous operators."""
    sign = (-1) ** (p.parity * q.parity)
    pq = p.compose(q)
    qp = q.compose(p).scale(sign)
    return pq - qp


def block_shape_ok(op: TwistedOperator, ell: int) -> bool:
    """Even operators are block diagonal, odd ones block anti-diagonal."""
    for mat in op.terms.values():
        for (r, c) in mat:
            same_block = (r < ell) == (c < ell)
            if op.parity == 0 and not same_block:
                return False
            if op.parity == 1 and same_block:
                return False
    return True


# ---------------------------------------------------------------------------
# the modules
# ---------------------------------------------------------------------------

class FreeModule:
    """Rank-(l|l) module datum: one companion pair per slot 1..m."""

    __slots__ = ("m", "ell", "pairs", "_ops")

    def __init__(self, m: int, pairs):
        pairs = tuple(pairs)
        if m < 1 or len(pairs) != m:
            raise ValueError("need exactly one companion pair per slot")
        ell = pairs[0].a.size
        for i, pair in enumerate(pairs, start=1):
            if not isinstance(pair, CompanionPair):
                raise TypeError("pairs must be CompanionPair instances")
            if pair.a.size != ell:
                raise ValueError("companion pairs have inconsistent sizes")
            if pair.a.var != i or pair.acomp.var != i:
                raise ValueError(f"pair {i} must be over variable h{i}")
        self.m = m
        self.ell = ell
        self.pairs = pairs
        self._ops = {}

    @property
    def dim(self) -> int:
        return 2 * self.ell

    def zero_vector(self) -> list:
        return [Poly.zero(self.m) for _ in range(self.dim)]

    def basis_vector(self, idx: int) -> list:
        v = self.zero_vector()
        v[idx] = Poly.one(self.m)
        return v

    # -- generator actions --------------------------------------------------

    def op_h(self, i: int) -> TwistedOperator:
        if not 1 <= i <= self.m:
            raise ValueError(f"index {i} out of range 1..{self.m}")
        key = ("h", i)
        if key not in self._ops:
            hv = Poly.var(self.m, i)
            mat = {(r, r): hv for r in range(self.dim)}
            self._ops[key] = TwistedOperator.single(self.m, self.dim, 0, mat, (0,) * self.m)
        return self._ops[key]

    def op_e_odd(self, i: int, direction: int) -> TwistedOperator:
        """direction +1: top-right block A_i with the inverse complementary
        shift; direction -1: bottom-left block A_i^comp with the
        complementary shift."""
        if not 1 <= i <= self.m:
            raise ValueError(f"index {i} out of range 1..{self.m}")
        if direction not in (+1, -1):
            raise ValueError("direction must be +1 or -1")
        key = ("eo", i, direction)
        if key not in self._ops:
            ell = self.ell
            if direction == +1:
                block = self.pairs[i - 1].a.dense(self.m)
                mat = {(r, c + ell): p for (r, c), p in block.items()}
                z = delta_i_shift(self.m, i, power=-1)
            else:
                block = self.pairs[i - 1].acomp.dense(self.m)
                mat = {(r + ell, c): p for (r, c), p in block.items()}
                z = delta_i_shift(self.m, i, power=+1)
            self._ops[key] = TwistedOperator.single(self.m, self.dim, 1, mat, z)
        return self._ops[key]

    def op_e_even(self, i: int, j: int) -> TwistedOperator:
        """Derived action of the even element at (i, j), i != j: the
        anticommutator of the raising odd at i and the lowering odd at j."""
        if i == j:
            raise ValueError("even generators need i != j; the diagonal is carried by op_h")
        key = ("e", i, j)
        if key not in self._ops:
            self._ops[key] = super_bracket(self.op_e_odd(i, +1), self.op_e_odd(j, -1))
        return self._ops[key]

    def op(self, x) -> TwistedOperator:
        tag = x[0]
        if tag == "h":
            return self.op_h(x[1])
        if tag == "e":
            return self.op_e_even(x[1], x[2])
        if tag == "e+":
            return self.op_e_odd(x[1], +1)
        if tag == "e-":
            return self.op_e_odd(x[1], -1)
        raise ValueError(f"unknown basis element {x}")

    def op_combo(self, combo: dict) -> TwistedOperator:
        out = TwistedOperator.zero(self.m, self.dim, liealg.combo_parity(combo) or 0)
        for x, c in combo.items():
            out = out + self.op(x).scale(c)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeModule)
            and self.m == other.m
            and self.ell == other.ell
            and self.pairs == other.pairs
        )

    def __repr__(self):
        return f"FreeModule(m={self.m}, ell={self.ell})"


def rank_one_module(a, twist) -> FreeModule:
    """Rank-(1|1) module with slot entry a_i * h_i on the twist set and a_i
    off it."""
    m = len(a)
    pairs = []
    for i in range(1, m + 1):
        coef = a[i - 1]
        deg = 1 if i in twist else 0
        pairs.append(CompanionPair.of(GPM(1, i, (0,), [(coef, deg)])))
    return FreeModule(m, pairs)


# ---------------------------------------------------------------------------
# relation verification
# ---------------------------------------------------------------------------

class RelationReport:
    """Outcome of the full super-commutator sweep over ordered pairs."""

    __slots__ = ("checked", "failures")

    def __init__(self, checked: int, failures):
        self.checked = checked
        self.failures = list(failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "failed": [
                {
                    "X": liealg.format_element(x),
                    "Y": liealg.format_element(y),
                    "residual_nonzero_terms": n,
                }
                for (x, y, n) in self.failures
            ],
        }

    def __repr__(self):
        return f"RelationReport(checked={self.checked}, failed={len(self.failures)})"


def verify_relations(module: FreeModule) -> RelationReport:
    """Check every ordered pair of spanning-set elements against the
    structure constants; failures are reported, never raised."""
    elems = liealg.basis(module.m)
    ops = {x: module.op(x) for x in elems}
    failures = []
    checked = 0
    for a, x in enumerate(elems):
        for y in elems[a:]:
            pq = ops[x].compose(ops[y])
            qp = ops[y].compose(ops[x])
            sign = (-1) ** (liealg.parity(x) * liealg.parity(y))
            ordered = [(x, y, pq, qp)] if x == y else [(x, y, pq, qp), (y, x, qp, pq)]
            for (u, v, uv, vu) in ordered:
                checked += 1
                residual = uv - vu.scale(sign) - module.op_combo(liealg.gl_bracket(u, v, module.m))
                if not residual.is_zero():
                    failures.append((u, v, residual.nonzero_entry_count()))
    return RelationReport(checked, failures)


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def dual(module: FreeModule) -> FreeModule:
    """The module on transposed mates: slot i carries (A_i^comp)^T with
    companion A_i^T."""
    new_pairs = []
    for pair in module.pairs:
        new_pairs.append(CompanionPair(pair.acomp.transpose(), pair.a.transpose()))
    return FreeModule(module.m, new_pairs)


# ---------------------------------------------------------------------------
# decomposition along the permutation combinatorics
# ---------------------------------------------------------------------------

def _orbits_under(generators, n: int):
    """Connected components of 0..n-1 under a set of permutations."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for g in generators:
        for x in range(n):
            union(x, g[x])
    groups = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def _restrict_gpm(g: GPM, rows, cols) -> GPM:
    """Submatrix of a GPM on given row/column index lists (order preserved)."""
    row_pos = {r: k for k, r in enumerate(rows)}
    perm = []
    entries = []
    for c in cols:
        r = g.perm[c]
        if r not in row_pos:
            raise ValueError("index sets are not aligned with the permutation")
        perm.append(row_pos[r])
        entries.append(g.entries[c])
    return GPM(len(cols), g.var, perm, entries)


def orbit_split(module: FreeModule):
    """Split off the direct summands visible in the permutation data.

    The even indices break into orbits of the group generated by all products
    pi_i o pi_j^(-1); the odd indices paired with an orbit I are its common
    preimage pi_i^(-1)(I), which does not depend on i.  Each part carries the
    restricted companion pairs.  Returns [(even index tuple, FreeModule)].
    """
    ell = module.ell
    perms = [pair.a.perm for pair in module.pairs]
    inv_perms = []
    for p in perms:
        inv = [0] * ell
        for c, r in enumerate(p):
            inv[r] = c
        inv_perms.append(inv)
    generators = []
    for i in range(1, module.m):
        generators.append(tuple(perms[i][inv_perms[0][x]] for x in range(ell)))
    components = _orbits_under(generators, ell)

    out = []
    for comp in components:
        evens = list(comp)
        odd_sets = [sorted(inv_perms[i][x] for x in evens) for i in range(module.m)]
        assert all(s == odd_sets[0] for s in odd_sets), "odd pairing depends on the slot"
        odds = odd_sets[0]
        new_pairs = []
        for pair in module.pairs:
            a = _restrict_gpm(pair.a, evens, odds)
            acomp = _restrict_gpm(pair.acomp, odds, evens)
            new_pairs.append(CompanionPair(a, acomp))
        out.append((tuple(evens), FreeModule(module.m, new_pairs)))
    return out


# ---------------------------------------------------------------------------
# principal filtration membership
# ---------------------------------------------------------------------------

def filtration_member_check(module: FreeModule, F: UniPoly) -> bool:
    """Whether scaling the even part by F(H + m - 1) and the odd part by
    F(H), H = h_1 + ... + h_m, yields a subspace closed under every
    generator (checked by exact divisibility of all images)."""
    m, ell = module.m, module.ell
    f_even = substitute_sum(F, m - 1, m)
    f_odd = substitute_sum(F, 0, m)
    if f_even.is_zero():
        return True  # the zero subspace is trivially closed
    factors = [f_even] * ell + [f_odd] * ell
    elems = liealg.basis(m)
    for idx in range(2 * ell):
        vec = module.zero_vector()
        vec[idx] = factors[idx]
        for x in elems:
            img = module.op(x).apply(vec)
            for out_idx, component in enumerate(img):
                if component.is_zero():
                    continue
                if exact_divide(component, factors[out_idx]) is None:
                    return False
    return True
