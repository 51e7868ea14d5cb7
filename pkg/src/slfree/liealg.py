"""Spanning set and structure constants of sl(m|1).

Basis elements are encoded as tuples: ("h", i) for the Cartan elements,
("e", i, j) for even off-diagonal elements (i != j in 1..m), ("e+", i) for
the odd raising elements and ("e-", i) for the odd lowering elements.

Brackets are computed inside gl(m|1), where [e_IJ, e_KL} = delta_JK e_IL
- (-1)^((|I|+|J|)(|K|+|L|)) delta_LI e_KJ, and projected back onto the
spanning set; diagonal contributions always combine into the ("h", i)
elements because brackets are supertrace-free.
"""

from __future__ import annotations

from fractions import Fraction

BAR = 0  # gl index of the odd row/column; 1..m are the even ones


def h(i: int):
    return ("h", i)


def e(i: int, j: int):
    if i == j:
        raise ValueError("even basis elements require i != j")
    return ("e", i, j)


def e_raise(i: int):
    return ("e+", i)


def e_lower(i: int):
    return ("e-", i)


def parity(x) -> int:
    return 1 if x[0] in ("e+", "e-") else 0


def basis(m: int):
    """The spanning set, in a fixed deterministic order."""
    out = [h(i) for i in range(1, m + 1)]
    out += [e(i, j) for i in range(1, m + 1) for j in range(1, m + 1) if i != j]
    out += [e_raise(i) for i in range(1, m + 1)]
    out += [e_lower(i) for i in range(1, m + 1)]
    return out


def check_element(x, m: int):
    tag = x[0]
    if tag == "h":
        if not 1 <= x[1] <= m:
            raise ValueError(f"index out of range in {x}")
    elif tag == "e":
        _, i, j = x
        if i == j or not (1 <= i <= m and 1 <= j <= m):
            raise ValueError(f"bad even element {x}")
    elif tag in ("e+", "e-"):
        if not 1 <= x[1] <= m:
            raise ValueError(f"index out of range in {x}")
    else:
        raise ValueError(f"unknown basis element {x}")


def format_element(x) -> str:
    tag = x[0]
    if tag == "h":
        return f"h{x[1]}"
    if tag == "e":
        return f"e({x[1]},{x[2]})"
    if tag == "e+":
        return f"e({x[1]},odd)"
    return f"e(odd,{x[1]})"


def _to_gl(x) -> dict:
    """Expand a basis element into gl(m|1) matrix units {(I, J): coeff}."""
    tag = x[0]
    if tag == "h":
        i = x[1]
        return {(i, i): Fraction(1), (BAR, BAR): Fraction(1)}
    if tag == "e":
        return {(x[1], x[2]): Fraction(1)}
    if tag == "e+":
        return {(x[1], BAR): Fraction(1)}
    return {(BAR, x[1]): Fraction(1)}


def _gl_parity(idx: int) -> int:
    return 1 if idx == BAR else 0


def _unit_parity(ij) -> int:
    return (_gl_parity(ij[0]) + _gl_parity(ij[1])) % 2


def _gl_bracket_units(ij, kl) -> dict:
    """Super bracket of matrix units e_IJ, e_KL."""
    i, j = ij
    k, l = kl
    out = {}
    if j == k:
        out[(i, l)] = out.get((i, l), Fraction(0)) + 1
    if l == i:
        sign = -Fraction((-1) ** (_unit_parity(ij) * _unit_parity(kl)))
        out[(k, j)] = out.get((k, j), Fraction(0)) + sign
    return {u: c for u, c in out.items() if c}


def _project(glcombo: dict, m: int) -> dict:
    """Rewrite a gl(m|1) combination in the sl(m|1) spanning set.

    Diagonal parts must satisfy the supertrace condition coeff(BAR,BAR) =
    sum_i coeff(i,i); a mismatch indicates an internal inconsistency.
    """
    out = {}
    diag = [Fraction(0)] * (m + 1)
    for (i, j), c in glcombo.items():
        if i == j:
            diag[i] += c
            continue
        if i == BAR:
            key = e_lower(j)
        elif j == BAR:
            key = e_raise(i)
        else:
            key = e(i, j)
        out[key] = out.get(key, Fraction(0)) + c
    if diag[BAR] != sum(diag[1:]):
        raise ArithmeticError("diagonal part is not expressible in the spanning set")
    for i in range(1, m + 1):
        if diag[i]:
            out[h(i)] = out.get(h(i), Fraction(0)) + diag[i]
    return {k: c for k, c in out.items() if c}


def gl_bracket(x, y, m: int) -> dict:
    """Super bracket [x, y} of two spanning-set elements, as a combination.

    Returns a dict mapping spanning-set elements to Fraction coefficients.
    """
    check_element(x, m)
    check_element(y, m)
    acc = {}
    for ij, cx in _to_gl(x).items():
        for kl, cy in _to_gl(y).items():
            for u, c in _gl_bracket_units(ij, kl).items():
                acc[u] = acc.get(u, Fraction(0)) + cx * cy * c
    acc = {u: c for u, c in acc.items() if c}
    return _project(acc, m)


def combo_parity(combo: dict) -> int | None:
    """Parity of a homogeneous combination; None for the zero combination."""
    parities = {parity(x) for x in combo}
    if not parities:
        return None
    if len(parities) > 1:
        raise ArithmeticError("combination is not parity homogeneous")
    return parities.pop()
