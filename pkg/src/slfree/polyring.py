"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials live in Q[h_1, ..., h_m].  Coefficients are `fractions.Fraction`
(always reduced, positive denominator), terms are stored sparsely as a dict
mapping exponent tuples to nonzero coefficients, so equality is structural.

The ring carries a family of shift automorphisms: an integer vector z acts by
f(h) |-> f(h - z).  The single-variable shift in slot i (step +1) is the
automorphism h_i |-> h_i - 1; the complementary shift moves every slot except
i.  Composition of shifts is addition of vectors.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb


def rat(x) -> Fraction:
    """Coerce an int, string ("2", "-3/2") or Fraction to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Poly:
    """Sparse polynomial in m variables with Fraction coefficients.

    `terms` maps exponent tuples (length m, nonnegative ints) to nonzero
    Fractions.  Zero coefficients are never stored.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms=None):
        if m < 0:
            raise ValueError("variable count must be nonnegative")
        self.m = m
        clean = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != m:
                    raise ValueError("exponent tuple length does not match variable count")
                c = rat(c)
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean

    @classmethod
    def zero(cls, m: int) -> "Poly":
        return cls(m)

    @classmethod
    def const(cls, m: int, c) -> "Poly":
        c = rat(c)
        return cls(m, {(0,) * m: c} if c else None)

    @classmethod
    def one(cls, m: int) -> "Poly":
        return cls.const(m, 1)

    @classmethod
    def var(cls, m: int, i: int) -> "Poly":
        """The variable h_i (1-based index)."""
        if not 1 <= i <= m:
            raise ValueError(f"variable index {i} out of range 1..{m}")
        exp = [0] * m
        exp[i - 1] = 1
        return cls(m, {tuple(exp): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i - 1] for e in self.terms)

    def coefficient(self, exp) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def _check_m(self, other: "Poly"):
        if self.m != other.m:
            raise ValueError(f"ambient variable counts differ: {self.m} vs {other.m}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_m(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        r = Poly.__new__(Poly)
        r.m = self.m
        r.terms = terms
        return r

    def __neg__(self) -> "Poly":
        r = Poly.__new__(Poly)
        r.m = self.m
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check_m(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = terms.get(e)
                if s is None:
                    terms[e] = c
                else:
                    s = s + c
                    if s:
                        terms[e] = s
                    else:
                        del terms[e]
        r = Poly.__new__(Poly)
        r.m = self.m
        r.terms = terms
        return r

    def scale(self, c) -> "Poly":
        c = rat(c)
        r = Poly.__new__(Poly)
        r.m = self.m
        r.terms = {e: v * c for e, v in self.terms.items()} if c else {}
        return r

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def sorted_terms(self):
        """Terms in descending lexicographic exponent order (canonical)."""
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"h{i + 1}" + (f"^{p}" if p > 1 else "")
                for i, p in enumerate(e) if p
            )
            if mono:
                parts.append(f"({c})*{mono}" if c != 1 else mono)
            else:
                parts.append(f"({c})")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Shift automorphisms.  A shift vector z (tuple of ints, length m) acts on a
# polynomial by f(h) |-> f(h - z); composition is vector addition.
# ---------------------------------------------------------------------------

def sigma_shift(m: int, i: int, power: int = 1) -> tuple:
    """Shift vector of the automorphism h_i |-> h_i - power."""
    if not 1 <= i <= m:
        raise ValueError(f"index {i} out of range 1..{m}")
    z = [0] * m
    z[i - 1] = power
    return tuple(z)


def delta_shift(m: int, power: int = 1) -> tuple:
    """Shift vector moving every slot by `power` (product of all slot shifts)."""
    return (power,) * m


def delta_i_shift(m: int, i: int, power: int = 1) -> tuple:
    """Shift vector moving every slot except slot i by `power`."""
    if not 1 <= i <= m:
        raise ValueError(f"index {i} out of range 1..{m}")
    return tuple(power if j != i - 1 else 0 for j in range(m))


def shift_of(m: int, name: str, i: int | None = None, power: int = 1) -> tuple:
    """Named shift vector: "sigma" (slot i), "delta" (all), "delta_i" (all but i)."""
    if name == "sigma":
        return sigma_shift(m, i, power)
    if name == "delta":
        return delta_shift(m, power)
    if name == "delta_i":
        return delta_i_shift(m, i, power)
    raise ValueError(f"unknown shift name {name!r}")


def shift_add(z: tuple, w: tuple) -> tuple:
    if len(z) != len(w):
        raise ValueError("shift vectors of different lengths")
    return tuple(a + b for a, b in zip(z, w))


def shift_neg(z: tuple) -> tuple:
    return tuple(-a for a in z)


def _binomials(n: int):
    return [comb(n, t) for t in range(n + 1)]


def shift_apply(z: tuple, p: Poly) -> Poly:
    """Apply the shift z to p, i.e. substitute h_j |-> h_j - z_j for all j."""
    if len(z) != p.m:
        raise ValueError(f"shift length {len(z)} does not match variable count {p.m}")
    terms = p.terms
    for j, zj in enumerate(z):
        if zj == 0:
            continue
        new_terms = {}
        for e, c in terms.items():
            n = e[j]
            if n == 0:
                s = new_terms.get(e)
                new_terms[e] = c if s is None else s + c
                continue
            # (h_j - z_j)^n expanded binomially
            binom = _binomials(n)
            for t in range(n + 1):
                coeff = c * binom[t] * Fraction((-zj) ** (n - t))
                if not coeff:
                    continue
                ne = e[:j] + (t,) + e[j + 1:]
                s = new_terms.get(ne)
                if s is None:
                    new_terms[ne] = coeff
                else:
                    s = s + coeff
                    if s:
                        new_terms[ne] = s
                    else:
                        del new_terms[ne]
        terms = {e: c for e, c in new_terms.items() if c}
    r = Poly.__new__(Poly)
    r.m = p.m
    r.terms = dict(terms)
    return r


# ---------------------------------------------------------------------------
# Exact division.
# ---------------------------------------------------------------------------

def exact_divide(p: Poly, q: Poly):
    """Return r with p = q*r if q divides p exactly, else None.

    Uses single-divisor reduction in lexicographic order; for an exact
    multiple the leading term of the remainder is always divisible by the
    leading term of q, so a failed leading-term division certifies q does
    not divide p.
    """
    p._check_m(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return Poly.zero(p.m)
    q_lead = max(q.terms)
    q_lead_c = q.terms[q_lead]
    rem = dict(p.terms)
    quot = {}
    while rem:
        lead = max(rem)
        if any(a < b for a, b in zip(lead, q_lead)):
            return None
        t_exp = tuple(a - b for a, b in zip(lead, q_lead))
        t_c = rem[lead] / q_lead_c
        quot[t_exp] = t_c
        for e, c in q.terms.items():
            ne = tuple(a + b for a, b in zip(t_exp, e))
            s = rem.get(ne, Fraction(0)) - t_c * c
            if s:
                rem[ne] = s
            else:
                rem.pop(ne, None)
    r = Poly.__new__(Poly)
    r.m = p.m
    r.terms = quot
    return r


# ---------------------------------------------------------------------------
# Single-variable polynomials (coefficient lists) and their multivariate
# specializations.
# ---------------------------------------------------------------------------

class UniPoly:
    """Polynomial in one abstract variable X over Q, dense coefficient list."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [rat(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "UniPoly":
        return cls([])

    @classmethod
    def one(cls) -> "UniPoly":
        return cls([1])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots) -> "UniPoly":
        f = cls.one()
        for r in roots:
            f = f * cls([-rat(r), 1])
        return f

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return UniPoly(a)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if not self.coeffs or not other.coeffs:
            return UniPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, value: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*X^{i}" for i, c in enumerate(self.coeffs) if c)


def substitute_sum(F: UniPoly, offset, m: int) -> Poly:
    """Evaluate F at (h_1 + ... + h_m + offset) as a Poly in m variables."""
    arg = Poly.const(m, offset)
    for i in range(1, m + 1):
        arg = arg + Poly.var(m, i)
    acc = Poly.zero(m)
    for c in reversed(F.coeffs):
        acc = acc * arg + Poly.const(m, c)
    return acc
