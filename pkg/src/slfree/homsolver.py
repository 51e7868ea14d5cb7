"""Exact Hom/End spaces, idempotent analysis, and isomorphism criteria.

A graded homomorphism between two modules presented by companion pairs is a
block-diagonal pair (W1, W4) of polynomial matrices with

    W1 * A_i = B_i * shift(W4)        for every slot i,

where the shift moves every variable except h_i.  Because the slot matrices
have exactly one nonzero entry per row and column, each scalar equation of
this family couples one entry of W1 with one entry of W4.  The solver walks
these couplings: entries fall into connected components, every entry of a
component is a linear image of a chosen root entry, and divisibility or
degree overflow along the walk contributes linear constraints on the root's
coefficients.  The nullspace of those constraints enumerates the component's
contribution to the Hom space exactly.

Off-diagonal (parity-reversing) blocks satisfy one-sided equations
W * GPM = 0, which force every entry to vanish; the solver derives this
entry by entry rather than assuming it.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .expmod import ExpModuleSpec, orbit_partition, realize
from .gpm import GPM
from .polyring import Poly, delta_i_shift, exact_divide, rat
from .superfree import FreeModule, mat_mul, mat_shift


# ---------------------------------------------------------------------------
# monomial bookkeeping
# ---------------------------------------------------------------------------

def monomials_upto(m: int, degree: int):
    """Exponent tuples of total degree <= degree, lexicographic order."""
    ranges = [range(degree + 1)] * m
    return [e for e in itertools.product(*ranges) if sum(e) <= degree]


# symbolic polynomials: dict exponent -> tuple of Fractions (linear form in
# the root unknowns); all vectors in one component share a length.

def _vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vscale(u, c):
    return tuple(a * c for a in u)


def _sym_scale(sym: dict, c) -> dict:
    if c == 0:
        return {}
    return {e: _vscale(v, c) for e, v in sym.items()}


def _sym_mul_var(sym: dict, i: int) -> dict:
    out = {}
    for e, v in sym.items():
        ne = e[: i - 1] + (e[i - 1] + 1,) + e[i:]
        out[ne] = v
    return out


def _sym_div_var(sym: dict, i: int):
    """Divide by h_i; monomials without h_i must vanish (constraints)."""
    out = {}
    constraints = []
    for e, v in sym.items():
        if e[i - 1] == 0:
            constraints.append(v)
        else:
            ne = e[: i - 1] + (e[i - 1] - 1,) + e[i:]
            out[ne] = v
    return out, constraints


def _sym_shift(sym: dict, z: tuple) -> dict:
    """Substitute h_j -> h_j - z_j, coefficients staying linear forms."""
    cur = sym
    for j, zj in enumerate(z):
        if zj == 0:
            continue
        nxt = {}
        for e, v in cur.items():
            n = e[j]
            if n == 0:
                nxt[e] = _vadd(nxt[e], v) if e in nxt else v
                continue
            for t in range(n + 1):
                c = Fraction(math.comb(n, t) * (-zj) ** (n - t))
                if not c:
                    continue
                ne = e[:j] + (t,) + e[j + 1:]
                w = _vscale(v, c)
                nxt[ne] = _vadd(nxt[ne], w) if ne in nxt else w
        cur = {e: v for e, v in nxt.items() if any(v)}
    return cur


def _sym_truncate(sym: dict, degree: int):
    """Drop monomials above the degree bound, returning them as constraints."""
    out = {}
    constraints = []
    for e, v in sym.items():
        if sum(e) > degree:
            constraints.append(v)
        else:
            out[e] = v
    return out, constraints


def _sym_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, v in b.items():
        if e in out:
            w = tuple(x - y for x, y in zip(out[e], v))
            if any(w):
                out[e] = w
            else:
                del out[e]
        else:
            out[e] = _vscale(v, -1)
    return out


def _nullspace(rows, width: int):
    """Basis of the solution space of rows . x = 0, exact over Q."""
    mat = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -mat[row_idx][fc]
        basis.append(tuple(vec))
    return basis


# ---------------------------------------------------------------------------
# the Hom solver
# ---------------------------------------------------------------------------

@dataclass
class HomBasis:
    source: FreeModule
    target: FreeModule
    degree: int
    pairs: list              # [(w1, w4)] as sparse dicts (r, c) -> Poly
    odd_pairs: list | None = None   # only filled by the full-block solve

    @property
    def dim(self) -> int:
        return len(self.pairs)


def _edge_data(source: FreeModule, target: FreeModule):
    """Per slot: inverse permutations and entry tables of A (source) and B
    (target)."""
    data = []
    for i in range(1, source.m + 1):
        a = source.pairs[i - 1].a
        b = target.pairs[i - 1].a
        inv_a = [0] * a.size
        for c, r in enumerate(a.perm):
            inv_a[r] = c
        inv_b = [0] * b.size
        for c, r in enumerate(b.perm):
            inv_b[r] = c
        data.append((a, b, inv_a, inv_b))
    return data


def solve_hom(source: FreeModule, target: FreeModule, degree: int, full: bool = False) -> HomBasis:
    """Basis of graded homomorphisms with entries of total degree <= degree.

    With full=True the parity-reversing blocks are solved as well and
    reported in `odd_pairs` (the one-sided equations force them to vanish,
    but the solver derives that)."""
    if source.m != target.m or source.ell != target.ell:
        raise ValueError("modules must share ambient rank and half-rank")
    if degree < 0:
        raise ValueError("degree bound must be nonnegative")
    m, ell = source.m, source.ell
    monos = monomials_upto(m, degree)
    nroot = len(monos)
    edges = _edge_data(source, target)

    values = {}      # node -> symbolic poly; node = (kind, p, q), kind 0=W1, 1=W4
    assigned_via = {}

    def partner(node, i):
        kind, p, q = node
        a, b, inv_a, inv_b = edges[i]
        if kind == 0:
            return (1, inv_b[p], inv_a[q])
        return (0, b.perm[p], a.perm[q])

    def edge_entries(node, i):
        """(aent, bent) of the slot-i equation this node participates in."""
        kind, p, q = node
        a, b, inv_a, inv_b = edges[i]
        if kind == 0:
            return a.entries[inv_a[q]], b.entries[inv_b[p]]
        return a.entries[q], b.entries[p]

    def transport(node, i, sym, constraints):
        """Value of partner(node, i) forced by the slot-i equation."""
        kind = node[0]
        aent, bent = edge_entries(node, i)
        hvar = i + 1
        if kind == 0:
            # W4 = shift(aent * W1 / bent), shift moving all vars but h_i
            cur = _sym_scale(sym, aent[0])
            if aent[1]:
                cur = _sym_mul_var(cur, hvar)
            if bent[1]:
                cur, cons = _sym_div_var(cur, hvar)
                constraints.extend(cons)
            cur = _sym_scale(cur, 1 / bent[0])
            cur = _sym_shift(cur, delta_i_shift(m, hvar, power=1))
        else:
            # W1 = bent * unshift(W4) / aent
            cur = _sym_shift(sym, delta_i_shift(m, hvar, power=-1))
            cur = _sym_scale(cur, bent[0])
            if bent[1]:
                cur = _sym_mul_var(cur, hvar)
            if aent[1]:
                cur, cons = _sym_div_var(cur, hvar)
                constraints.extend(cons)
            cur = _sym_scale(cur, 1 / aent[0])
        cur, cons = _sym_truncate(cur, degree)
        constraints.extend(cons)
        return cur

    def residual(node, i, constraints):
        """Both endpoint values known: push the equation into constraints."""
        kind, p, q = node
        w1_node = node if kind == 0 else partner(node, i)
        w4_node = partner(w1_node, i)
        aent, bent = edge_entries(w1_node, i)
        hvar = i + 1
        lhs = _sym_scale(values[w1_node], aent[0])
        if aent[1]:
            lhs = _sym_mul_var(lhs, hvar)
        rhs = _sym_shift(values[w4_node], delta_i_shift(m, hvar, power=-1))
        rhs = _sym_scale(rhs, bent[0])
        if bent[1]:
            rhs = _sym_mul_var(rhs, hvar)
        constraints.extend(_sym_sub(lhs, rhs).values())

    all_nodes = [(kind, p, q) for kind in (0, 1) for p in range(ell) for q in range(ell)]
    pairs = []
    seen = set()
    for start in all_nodes:
        if start in seen:
            continue
        # breadth-first transport from a fresh root
        constraints = []
        values[start] = {e: tuple(Fraction(1 if t == s else 0) for t in range(nroot))
                         for s, e in enumerate(monos)}
        comp = [start]
        seen.add(start)
        queue = [start]
        while queue:
            node = queue.pop()
            for i in range(m):
                other = partner(node, i)
                if other not in seen:
                    values[other] = transport(node, i, values[node], constraints)
                    assigned_via[other] = (node, i)
                    seen.add(other)
                    comp.append(other)
                    queue.append(other)
                elif assigned_via.get(other) != (node, i) and assigned_via.get(node) != (other, i):
                    residual(node, i, constraints)

        for vec in _nullspace(constraints, nroot):
            w1, w4 = {}, {}
            for node in comp:
                kind, p, q = node
                terms = {}
                for e, lin in values[node].items():
                    c = sum(a * b for a, b in zip(lin, vec))
                    if c:
                        terms[e] = c
                if terms:
                    (w1 if kind == 0 else w4)[(p, q)] = Poly(m, terms)
            pairs.append((w1, w4))
        for node in comp:
            del values[node]

    basis = HomBasis(source, target, degree, pairs)
    if full:
        basis.odd_pairs = _solve_odd_blocks(source, target, degree)
    return basis


def _solve_odd_blocks(source: FreeModule, target: FreeModule, degree: int):
    """Parity-reversing blocks W2, W3: W3 * A_i = 0 and W2 * A_i^comp = 0.

    Every equation reads (entry) * (nonzero slot entry) = 0, and the slot
    permutation sweeps each entry of the unknown block, so the only solution
    is zero; any entry the sweep missed would survive as a free generator."""
    ell = source.ell
    free_w2 = {(p, q) for p in range(ell) for q in range(ell)}
    free_w3 = set(free_w2)
    for i in range(source.m):
        a = source.pairs[i].a
        acomp = source.pairs[i].acomp
        for c in range(ell):
            for p in range(ell):
                free_w3.discard((p, a.perm[c]))
                free_w2.discard((p, acomp.perm[c]))
    out = []
    monos = monomials_upto(source.m, degree)
    for (p, q) in sorted(free_w3):
        for e in monos:
            out.append(("W3", (p, q), e))
    for (p, q) in sorted(free_w2):
        for e in monos:
            out.append(("W2", (p, q), e))
    return out


def intertwines(source: FreeModule, target: FreeModule, w1: dict, w4: dict) -> bool:
    """Re-substitution check of the defining family W1 A_i = B_i shift(W4)."""
    m = source.m
    for i in range(1, m + 1):
        a = source.pairs[i - 1].a.dense(m)
        b = target.pairs[i - 1].a.dense(m)
        lhs = mat_mul(w1, a)
        rhs = mat_mul(b, mat_shift(delta_i_shift(m, i, power=-1), w4))
        if lhs != rhs:
            return False
    return True


def co_intertwines(source: FreeModule, target: FreeModule, w1: dict, w4: dict) -> bool:
    """The companion-side family W4 A_i^comp = B_i^comp shift^(-1)(W1)."""
    m = source.m
    for i in range(1, m + 1):
        a = source.pairs[i - 1].acomp.dense(m)
        b = target.pairs[i - 1].acomp.dense(m)
        lhs = mat_mul(w4, a)
        rhs = mat_mul(b, mat_shift(delta_i_shift(m, i, power=1), w1))
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# determinants and generic isomorphism search
# ---------------------------------------------------------------------------

def poly_mat_det(mat: dict, n: int, m: int) -> Poly:
    """Fraction-free elimination determinant of a sparse Poly matrix."""
    rows = [[Poly.zero(m) for _ in range(n)] for _ in range(n)]
    for (r, c), p in mat.items():
        rows[r][c] = p
    sign = 1
    prev = Poly.one(m)
    for k in range(n - 1):
        if rows[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not rows[i][k].is_zero()), None)
            if swap is None:
                return Poly.zero(m)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = rows[k][k] * rows[i][j] - rows[i][k] * rows[k][j]
                q = exact_divide(num, prev)
                assert q is not None, "fraction-free elimination lost exactness"
                rows[i][j] = q
            rows[i][k] = Poly.zero(m)
        prev = rows[k][k]
    det = rows[n - 1][n - 1]
    return det.scale(sign) if sign < 0 else det


def _is_unit(p: Poly) -> bool:
    return p.is_constant() and not p.is_zero()


@dataclass
class IsoWitness:
    forward: bool           # True: source -> target, False: target -> source
    w1: dict
    w4: dict
    coefficients: tuple


def find_unit_pair(basis: HomBasis, seed: int = 0, samples: int = 64):
    """Search combinations of a Hom basis for a pair with unit determinants."""
    if not basis.pairs:
        return None
    n = basis.source.ell
    m = basis.source.m
    dim = len(basis.pairs)
    rng = random.Random(seed)
    candidates = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    candidates.append((1,) * dim)
    while len(candidates) < dim + 1 + samples:
        candidates.append(tuple(rng.randint(-3, 3) for _ in range(dim)))
    for coeffs in candidates:
        if not any(coeffs):
            continue
        w1, w4 = {}, {}
        for c, (b1, b4) in zip(coeffs, basis.pairs):
            if not c:
                continue
            for tgt, src in ((w1, b1), (w4, b4)):
                for rc, p in src.items():
                    q = tgt.get(rc)
                    q = p.scale(c) if q is None else q + p.scale(c)
                    if q.is_zero():
                        tgt.pop(rc, None)
                    else:
                        tgt[rc] = q
        if _is_unit(poly_mat_det(w1, n, m)) and _is_unit(poly_mat_det(w4, n, m)):
            return coeffs, w1, w4
    return None


def iso_generic(source: FreeModule, target: FreeModule, degree: int = 2,
                seed: int = 0, samples: int = 64):
    """Seeded search for an invertible homomorphism; a hit proves the two
    modules isomorphic, exhaustion is inconclusive."""
    for forward, (s, t) in ((True, (source, target)), (False, (target, source))):
        hit = find_unit_pair(solve_hom(s, t, degree), seed=seed, samples=samples)
        if hit is not None:
            coeffs, w1, w4 = hit
            return IsoWitness(forward, w1, w4, coeffs)
    return None


# ---------------------------------------------------------------------------
# endomorphism profile and idempotents
# ---------------------------------------------------------------------------

def _const_pair(w1: dict, w4: dict, ell: int):
    out = []
    for mat in (w1, w4):
        dense = [[Fraction(0)] * ell for _ in range(ell)]
        for (r, c), p in mat.items():
            if not p.is_constant():
                raise ArithmeticError("degree-zero basis has a nonconstant entry")
            dense[r][c] = p.constant_value()
        out.append(dense)
    return tuple(out)


def _pair_mul(x, y, ell):
    out = []
    for xm, ym in zip(x, y):
        prod = [[Fraction(0)] * ell for _ in range(ell)]
        for r in range(ell):
            xr = xm[r]
            pr = prod[r]
            for s in range(ell):
                c = xr[s]
                if c:
                    ys = ym[s]
                    for t in range(ell):
                        if ys[t]:
                            pr[t] += c * ys[t]
        out.append(prod)
    return tuple(out)


def _pair_flat(x):
    return tuple(v for mat in x for row in mat for v in row)


def _pair_combo(pairs, coeffs, ell):
    out = tuple([[Fraction(0)] * ell for _ in range(ell)] for _ in range(2))
    for c, p in zip(coeffs, pairs):
        if not c:
            continue
        for om, pm in zip(out, p):
            for r in range(ell):
                for t in range(ell):
                    if pm[r][t]:
                        om[r][t] += c * pm[r][t]
    return out


def _in_span(rref_rows, pivot_cols, vec):
    v = list(vec)
    for row, pc in zip(rref_rows, pivot_cols):
        if v[pc]:
            f = v[pc]
            v = [a - f * b for a, b in zip(v, row)]
    return not any(v)


def _rref(vectors):
    rows = [list(v) for v in vectors]
    pivots = []
    out = []
    for row in rows:
        v = list(row)
        for done, pc in zip(out, pivots):
            if v[pc]:
                f = v[pc]
                v = [a - f * b for a, b in zip(v, done)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is None:
            continue
        v = [x / v[nz] for x in v]
        out.append(v)
        pivots.append(nz)
    return out, pivots


def _uni_gcd(a, b):
    a, b = list(a), list(b)

    def strip(p):
        while p and not p[-1]:
            p.pop()
        return p

    a, b = strip(a), strip(b)
    while b:
        # remainder of a by b
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, c in enumerate(b):
                a[off + i] -= f * c
            a = strip(a)
        a, b = b, a
    return a


def _rational_roots(coeffs):
    """All rational roots of a Q-polynomial, found by integer root bounds."""
    den = math.lcm(*[c.denominator for c in coeffs])
    ints = [int(c * den) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    low = 0
    while ints[low] == 0:
        low += 1
    roots = {Fraction(0)} if low else set()
    ints = ints[low:]
    a0, an = abs(ints[0]), abs(ints[-1])
    ps = {d for d in range(1, a0 + 1) if a0 % d == 0}
    qs = {d for d in range(1, an + 1) if an % d == 0}

    def value(x):
        acc = Fraction(0)
        for c in reversed(ints):
            acc = acc * x + c
        return acc

    for p in ps:
        for q in qs:
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if value(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def count_idempotents(basis0: HomBasis):
    """Number of idempotents of the constant-entry endomorphism algebra.

    Finds a complete family of orthogonal primitive idempotents through the
    spectral projectors of a generic element, verifies every axiom it uses,
    and returns 2**(family size)."""
    ell = basis0.source.ell
    pairs = [_const_pair(w1, w4, ell) for (w1, w4) in basis0.pairs]
    t = len(pairs)
    if t == 0:
        raise ArithmeticError("endomorphism algebra without identity")
    ident = tuple([[Fraction(1 if r == c else 0) for c in range(ell)] for r in range(ell)]
                  for _ in range(2))
    flat = [_pair_flat(p) for p in pairs]
    rref_rows, pivot_cols = _rref(flat)
    if len(rref_rows) != t:
        raise ArithmeticError("degree-zero basis is linearly dependent")
    if not _in_span(rref_rows, pivot_cols, _pair_flat(ident)):
        raise ArithmeticError("identity missing from the endomorphism algebra")
    # closure and commutativity of the algebra
    for x, y in itertools.product(pairs, repeat=2):
        xy = _pair_mul(x, y, ell)
        if not _in_span(rref_rows, pivot_cols, _pair_flat(xy)):
            raise ArithmeticError("degree-zero endomorphisms are not closed under product")
        if xy != _pair_mul(y, x, ell):
            raise ArithmeticError("degree-zero endomorphism algebra is not commutative")

    attempts = [tuple(Fraction(j + 1) for j in range(t)),
                tuple(Fraction((j + 1) ** 2) for j in range(t)),
                tuple(Fraction(2 ** j) for j in range(t))]
    rng = random.Random(0)
    attempts += [tuple(Fraction(rng.randint(1, 50)) for _ in range(t)) for _ in range(5)]

    for coeffs in attempts:
        g = _pair_combo(pairs, coeffs, ell)
        powers = [ident]
        for _ in range(t):
            powers.append(_pair_mul(powers[-1], g, ell))
        # first linear dependence among the powers gives the minimal polynomial
        minpoly = None
        for d in range(1, t + 1):
            rows = [list(_pair_flat(p)) for p in powers[: d + 1]]
            width = len(rows[0])
            null = _nullspace([tuple(r[i] for r in rows) for i in range(width)], d + 1)
            if null:
                vec = null[0]
                if vec[d] == 0:
                    continue
                minpoly = [c / vec[d] for c in vec]
                break
        if minpoly is None:
            continue
        deriv = [c * i for i, c in enumerate(minpoly)][1:]
        if len(_uni_gcd(minpoly, deriv)) > 1:
            continue  # repeated eigenvalue: retry with another generic element
        roots = [r for r in _rational_roots(minpoly)]
        if len(roots) != len(minpoly) - 1 or len(roots) != t:
            continue
        projectors = []
        for lam in roots:
            proj = ident
            for mu in roots:
                if mu == lam:
                    continue
                shifted = tuple([[g[b][r][c] - (mu if r == c else 0) for c in range(ell)]
                                 for r in range(ell)] for b in range(2))
                proj = _pair_mul(proj, shifted, ell)
                proj = tuple([[v / (lam - mu) for v in row] for row in mat] for mat in proj)
            projectors.append(proj)
        total = projectors[0]
        for proj in projectors[1:]:
            total = tuple([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m1, m2)]
                          for m1, m2 in zip(total, proj))
        if total != ident:
            continue
        ok = True
        for a, pa in enumerate(projectors):
            if _pair_mul(pa, pa, ell) != pa or not _in_span(rref_rows, pivot_cols, _pair_flat(pa)):
                ok = False
            for pb in projectors[a + 1:]:
                prod = _pair_mul(pa, pb, ell)
                if any(any(any(row) for row in mat) for mat in prod):
                    ok = False
        if not ok:
            continue
        # every subset sum is idempotent; with t primitives spanning the
        # algebra there are exactly 2^t idempotents
        for rset in itertools.product((0, 1), repeat=t):
            e = _pair_combo(projectors, [Fraction(x) for x in rset], ell)
            if _pair_mul(e, e, ell) != e:
                raise ArithmeticError("subset sum of primitives failed idempotency")
        return 2 ** t
    raise ArithmeticError("no generic element separated the algebra")


def orbit_projectors(spec: ExpModuleSpec, mod: FreeModule):
    """The projectors onto the residue-class summands, fully verified.

    Each class contributes the pair of indicator matrices of its even and
    odd index sets; the function checks that every pair intertwines the
    generator actions, that the family is orthogonal idempotents, and that
    it sums to the identity."""
    from .expmod import residue_index

    part = orbit_partition(spec)
    idx = residue_index(spec.k)
    m = spec.m
    one = Poly.one(m)
    projectors = []
    for p in range(part.s):
        w1 = {(idx[r], idx[r]): one for r in part.classes[p]}
        w4 = {(idx[r], idx[r]): one for r in part.shadow[p]}
        if not (intertwines(mod, mod, w1, w4) and co_intertwines(mod, mod, w1, w4)):
            raise ArithmeticError("residue-class projector is not an endomorphism")
        projectors.append((w1, w4))
    evens = [set(r for (r, _) in w1) for (w1, _) in projectors]
    odds = [set(r for (r, _) in w4) for (_, w4) in projectors]
    for seen in (evens, odds):
        flat = [r for s in seen for r in s]
        if len(flat) != mod.ell or len(set(flat)) != mod.ell:
            raise ArithmeticError("projector family does not resolve the identity")
    return projectors


def _is_commutative(basis0: HomBasis) -> bool:
    ell = basis0.source.ell
    pairs = [_const_pair(w1, w4, ell) for (w1, w4) in basis0.pairs]
    return all(
        _pair_mul(x, y, ell) == _pair_mul(y, x, ell)
        for x, y in itertools.combinations(pairs, 2)
    )


@dataclass
class EndProfile:
    dim: int
    idempotents: int


def end_profile(spec: ExpModuleSpec, degree: int) -> EndProfile:
    """Hom-space dimension at the degree bound, and the idempotent count of
    the lattice generated by the residue-class projectors.

    Whenever the constant-entry endomorphism algebra is commutative (always
    the case with two or more slots) that lattice exhausts its idempotents,
    and the exhaustive spectral count is asserted to agree."""
    mod = realize(spec)
    basis = solve_hom(mod, mod, degree)
    basis0 = basis if degree == 0 else solve_hom(mod, mod, 0)
    projectors = orbit_projectors(spec, mod)
    count = 2 ** len(projectors)
    flat = [_pair_flat(_const_pair(w1, w4, mod.ell)) for (w1, w4) in basis0.pairs]
    rref_rows, pivot_cols = _rref(flat)
    for w1, w4 in projectors:
        vec = _pair_flat(_const_pair(w1, w4, mod.ell))
        if not _in_span(rref_rows, pivot_cols, vec):
            raise ArithmeticError("projector escaped the solved degree-0 algebra")
    if _is_commutative(basis0):
        exhaustive = count_idempotents(basis0)
        if exhaustive != count:
            raise ArithmeticError(
                f"projector lattice ({count}) disagrees with the exhaustive "
                f"idempotent count ({exhaustive})"
            )
    return EndProfile(dim=basis.dim, idempotents=count)


def indecomposable(spec: ExpModuleSpec) -> bool:
    return spec.s == 1


# ---------------------------------------------------------------------------
# weighted projective equivalence and the flip group
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def weight_relation_lattice(k) -> list:
    """Integer basis of {c : sum c_i k_i = 0}, by unimodular column moves."""
    m = len(k)
    cols = [[1 if r == c else 0 for r in range(m)] for c in range(m)]
    vec = list(k)
    for i in range(1, m):
        a, b = vec[0], vec[i]
        if b == 0:
            continue
        g, x, y = _xgcd(a, b)
        c0 = [x * u + y * v for u, v in zip(cols[0], cols[i])]
        ci = [(-b // g) * u + (a // g) * v for u, v in zip(cols[0], cols[i])]
        cols[0], cols[i] = c0, ci
        vec[0], vec[i] = g, 0
    return [tuple(c) for c in cols[1:]]


def wps_equiv(ratios, k) -> bool:
    """Whether ratios_i = lambda^(k_i) has a solution lambda != 0, decided
    on the relation lattice without producing lambda."""
    ratios = tuple(rat(x) for x in ratios)
    if len(ratios) != len(k):
        raise ValueError("ratio and weight lengths differ")
    if any(x == 0 for x in ratios):
        raise ValueError("ratios must be nonzero")
    for c in weight_relation_lattice(k):
        prod = Fraction(1)
        for x, e in zip(ratios, c):
            prod *= x ** e
        if prod != 1:
            return False
    return True


def flip_coordinates(k) -> frozenset:
    """Slots where the reciprocal flip is available (weight 2)."""
    return frozenset(i for i, ki in enumerate(k, start=1) if ki == 2)


def gk_act(support, a, k) -> tuple:
    """Apply the reciprocal flip a_i -> -1/(4 a_i) on the support slots."""
    support = frozenset(support)
    if not support <= flip_coordinates(k):
        raise ValueError("flip support must sit on weight-2 slots")
    return tuple(
        Fraction(-1, 4) / x if (i in support) else x
        for i, x in enumerate(a, start=1)
    )


def s_twist(a, S) -> tuple:
    """Componentwise: keep on the twist set, invert off it."""
    return tuple(x if (i in S) else 1 / x for i, x in enumerate(a, start=1))


# ---------------------------------------------------------------------------
# isomorphism decisions
# ---------------------------------------------------------------------------

@dataclass
class IsoVerdict:
    isomorphic: bool
    witness_support: frozenset | None


def iso_sl11(a, k: int, S1, b, l: int, S2) -> bool:
    """Single-slot case: the classes depend only on the exponent and, for
    exponents other than 2, on the twist set."""
    if k != l:
        return False
    return frozenset(S1) == frozenset(S2) or k == 2


def iso_exp(spec1: ExpModuleSpec, spec2: ExpModuleSpec) -> IsoVerdict:
    """Theorem-path isomorphism decision for power-sum specs."""
    if spec1.m != spec2.m:
        raise ValueError("specs have different ambient ranks")
    if spec1.m == 1:
        ok = iso_sl11(spec1.a[0], spec1.k[0], spec1.S, spec2.a[0], spec2.k[0], spec2.S)
        return IsoVerdict(ok, spec1.S ^ spec2.S if ok else None)
    if spec1.k != spec2.k:
        return IsoVerdict(False, None)
    diff = spec1.S ^ spec2.S
    if any(spec1.k[i - 1] != 2 for i in diff):
        return IsoVerdict(False, None)
    flipped = gk_act(diff, spec1.a, spec1.k)
    num = s_twist(flipped, spec2.S)
    den = s_twist(spec2.a, spec2.S)
    ratios = tuple(x / y for x, y in zip(num, den))
    ok = wps_equiv(ratios, spec1.k)
    return IsoVerdict(ok, frozenset(diff) if ok else None)


@dataclass
class ClassifyResult:
    classes: list            # lists of indices into the input spec list
    canonical: list          # per input: (a after flips, residual twist set)


def classify(specs) -> ClassifyResult:
    specs = list(specs)
    if not specs:
        return ClassifyResult([], [])
    m, k = specs[0].m, specs[0].k
    for sp in specs:
        if sp.m != m or sp.k != k:
            raise ValueError("all specs must share the ambient rank and weights")
    parent = list(range(len(specs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            if iso_exp(specs[i], specs[j]).isomorphic:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(len(specs)):
        groups.setdefault(find(i), []).append(i)
    classes = sorted(groups.values(), key=lambda g: g[0])

    flips = flip_coordinates(k)
    canonical = []
    for sp in specs:
        support = sp.S & flips
        canonical.append((gk_act(support, sp.a, k), frozenset(sp.S - flips)))
    return ClassifyResult(classes, canonical)
