"""Generalized permutation matrices over Q[h_i] and companion pairs.

A generalized permutation matrix (GPM) has exactly one nonzero entry in each
row and each column, so it factors uniquely as permutation * diagonal.  We
store the factored form: `perm[c]` is the 0-based row of the single nonzero
entry of column c, and `entries[c]` is that entry as a pair (coef, deg) with
deg in {0, 1}, meaning coef or coef*h_var.

The entry shape is restricted at construction: a GPM A admits a companion
mate Acomp with A*Acomp = Acomp*A = h_var * I exactly when every entry is a
nonzero scalar or a nonzero scalar times h_var, and then
Acomp = h_var * A^(-1) is again of this shape.
"""

from __future__ import annotations

from fractions import Fraction

from .polyring import Poly, rat


class NotGPMError(ValueError):
    """Raised when a dense matrix is not a generalized permutation matrix."""


class EntryShapeError(ValueError):
    """Raised when an entry is not a scalar or scalar multiple of h_var."""


def _check_perm(perm):
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("perm is not a bijection on 0..n-1")


class GPM:
    __slots__ = ("size", "var", "perm", "entries")

    def __init__(self, size: int, var: int, perm, entries):
        if size < 1:
            raise ValueError("size must be positive")
        if var < 1:
            raise ValueError("variable index must be >= 1")
        perm = tuple(perm)
        if len(perm) != size:
            raise ValueError("perm length does not match size")
        _check_perm(perm)
        ents = []
        for coef, deg in entries:
            coef = rat(coef)
            if coef == 0:
                raise EntryShapeError("zero entry in a GPM")
            if deg not in (0, 1):
                raise EntryShapeError("entry degree must be 0 or 1")
            ents.append((coef, deg))
        if len(ents) != size:
            raise ValueError("entry list length does not match size")
        self.size = size
        self.var = var
        self.perm = perm
        self.entries = tuple(ents)

    @classmethod
    def identity(cls, size: int, var: int) -> "GPM":
        return cls(size, var, range(size), [(1, 0)] * size)

    @classmethod
    def scalar(cls, size: int, var: int, coef, deg: int = 0) -> "GPM":
        return cls(size, var, range(size), [(coef, deg)] * size)

    @classmethod
    def from_dense(cls, rows, var: int) -> "GPM":
        """Factor a dense matrix of Poly entries into a GPM.

        Raises NotGPMError if some row or column does not contain exactly one
        nonzero entry, EntryShapeError if an entry is not alpha or alpha*h_var.
        """
        n = len(rows)
        perm = [None] * n
        ents = [None] * n
        row_used = [False] * n
        for c in range(n):
            hits = [r for r in range(n) if not rows[r][c].is_zero()]
            if len(hits) != 1:
                raise NotGPMError(f"column {c} has {len(hits)} nonzero entries")
            r = hits[0]
            if row_used[r]:
                raise NotGPMError(f"row {r} has more than one nonzero entry")
            row_used[r] = True
            perm[c] = r
            ents[c] = _admissible_entry(rows[r][c], var)
        if not all(row_used):
            raise NotGPMError("some row has no nonzero entry")
        return cls(n, var, perm, ents)

    def entry(self, c: int):
        """(coef, deg) of the single nonzero entry in column c."""
        return self.entries[c]

    def entry_poly(self, c: int, m: int) -> Poly:
        coef, deg = self.entries[c]
        if deg == 0:
            return Poly.const(m, coef)
        return Poly.var(m, self.var).scale(coef)

    def factor(self):
        """Unique factorization: (1-based permutation, diagonal entries).

        Column c of the matrix carries its nonzero entry in row perm(c); the
        diagonal factor lists those entries in column order.
        """
        perm_1based = tuple(r + 1 for r in self.perm)
        diag = [self.entry_poly(c, max(self.var, 1)) for c in range(self.size)]
        return perm_1based, diag

    def companion(self) -> "GPM":
        """The mate with A * companion(A) = companion(A) * A = h_var * I."""
        inv = [0] * self.size
        for c, r in enumerate(self.perm):
            inv[r] = c
        ents = [None] * self.size
        for c in range(self.size):
            coef, deg = self.entries[c]
            # entry at (c, perm[c]) of the mate: h/coef for scalars, 1/coef else
            ents[self.perm[c]] = (1 / coef, 1 - deg)
        return GPM(self.size, self.var, inv, ents)

    def transpose(self) -> "GPM":
        inv = [0] * self.size
        for c, r in enumerate(self.perm):
            inv[r] = c
        ents = [self.entries[inv[c]] for c in range(self.size)]
        return GPM(self.size, self.var, inv, ents)

    def dense(self, m: int) -> dict:
        """Sparse dense form: dict (row, col) -> Poly in m ambient variables."""
        if self.var > m:
            raise ValueError("ambient variable count too small for this GPM")
        return {(self.perm[c], c): self.entry_poly(c, m) for c in range(self.size)}

    def to_rows(self, m: int):
        rows = [[Poly.zero(m) for _ in range(self.size)] for _ in range(self.size)]
        for (r, c), p in self.dense(m).items():
            rows[r][c] = p
        return rows

    def det(self, m: int) -> Poly:
        sign = _perm_sign(self.perm)
        d = Poly.const(m, sign)
        for c in range(self.size):
            d = d * self.entry_poly(c, m)
        return d

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GPM)
            and self.size == other.size
            and self.var == other.var
            and self.perm == other.perm
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.size, self.var, self.perm, self.entries))

    def __repr__(self):
        return f"GPM(size={self.size}, var=h{self.var}, perm={self.perm}, entries={self.entries})"


def _admissible_entry(p: Poly, var: int):
    """Extract (coef, deg) from a Poly of the form alpha or alpha*h_var."""
    if p.is_zero():
        raise EntryShapeError("zero entry")
    if len(p.terms) != 1:
        raise EntryShapeError(f"entry {p!r} is not a monomial in h{var}")
    exp, coef = next(iter(p.terms.items()))
    deg = sum(exp)
    if deg == 0:
        return (coef, 0)
    if deg == 1 and exp[var - 1] == 1:
        return (coef, 1)
    raise EntryShapeError(f"entry {p!r} is not alpha or alpha*h{var}")


def _perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for s in range(len(perm)):
        if seen[s]:
            continue
        length = 0
        j = s
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def gpm_mul_dense(a: GPM, b: GPM, m: int) -> dict:
    """Product a*b as a sparse dict (row, col) -> Poly."""
    if a.size != b.size:
        raise ValueError("size mismatch")
    out = {}
    for c in range(b.size):
        # column c of b hits row b.perm[c]; that row is column b.perm[c] of a
        mid = b.perm[c]
        r = a.perm[mid]
        out[(r, c)] = a.entry_poly(mid, m) * b.entry_poly(c, m)
    return out


def verify_companion(a: GPM, acomp: GPM) -> bool:
    """Check a*acomp = acomp*a = h_var * I exactly."""
    if a.size != acomp.size or a.var != acomp.var:
        return False
    m = a.var
    hv = Poly.var(m, a.var)
    for x, y in ((a, acomp), (acomp, a)):
        prod = gpm_mul_dense(x, y, m)
        for (r, c), p in prod.items():
            if r != c or p != hv:
                return False
        if len(prod) != a.size:
            return False
    return True


class CompanionPair:
    """A GPM together with its mate; the product identity is checked."""

    __slots__ = ("a", "acomp")

    def __init__(self, a: GPM, acomp: GPM, check: bool = True):
        if check and not verify_companion(a, acomp):
            raise ValueError("matrices do not satisfy the companion identity")
        self.a = a
        self.acomp = acomp

    @classmethod
    def of(cls, a: GPM) -> "CompanionPair":
        return cls(a, a.companion(), check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, CompanionPair) and self.a == other.a and self.acomp == other.acomp

    def __repr__(self):
        return f"CompanionPair({self.a!r}, {self.acomp!r})"
