"""Power-sum exponential modules and their companion-pair realizations.

A spec (m, a, k, S) stands for the module generated by e^(a_1 x_1^k_1 + ...
+ a_m x_m^k_m) with the twist set S.  Its rank is (K|K), K = prod k_i, and
the realization indexes both parity halves by the residue grid
Z/k_1 x ... x Z/k_m in lexicographic order.  Slot i acts through a block
diagonal of identical two-block circulant pieces; the induced permutation
of residues adds +1 to slot i of the residue off the twist set and -1 on it.

The residue grid splits into classes by the signed coordinate sum mod
s = gcd(k); the class of label p supports one direct summand, realized by
shrunken blocks and a four-way block rule at the last slot.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .gpm import GPM, CompanionPair
from .polyring import Poly, rat
from .superfree import FreeModule


@dataclass(frozen=True)
class ExpModuleSpec:
    m: int
    a: tuple
    k: tuple
    S: frozenset

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        object.__setattr__(self, "a", tuple(rat(x) for x in self.a))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        object.__setattr__(self, "S", frozenset(int(x) for x in self.S))
        if len(self.a) != self.m or len(self.k) != self.m:
            raise ValueError("a and k must have length m")
        if any(x == 0 for x in self.a):
            raise ValueError("coefficients must be nonzero")
        if any(x < 1 for x in self.k):
            raise ValueError("exponents must be >= 1")
        if not self.S <= set(range(1, self.m + 1)):
            raise ValueError("twist set must be a subset of 1..m")

    @property
    def K(self) -> int:
        return math.prod(self.k)

    @property
    def s(self) -> int:
        return math.gcd(*self.k)

    def __repr__(self):
        return f"ExpModuleSpec(m={self.m}, a={self.a}, k={self.k}, S={sorted(self.S)})"


@dataclass(frozen=True)
class MonomialExpSpec:
    """A single-monomial exponent datum alpha * x^lvec; entries of lvec may
    be zero, which is exactly the non-free regime probed by the oracle."""

    m: int
    alpha: Fraction
    lvec: tuple
    S: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alpha", rat(self.alpha))
        object.__setattr__(self, "lvec", tuple(int(x) for x in self.lvec))
        object.__setattr__(self, "S", frozenset(int(x) for x in self.S))
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if len(self.lvec) != self.m:
            raise ValueError("exponent vector must have length m")
        if any(x < 0 for x in self.lvec):
            raise ValueError("exponents must be >= 0")


# ---------------------------------------------------------------------------
# residue grid
# ---------------------------------------------------------------------------

def residues(k) -> list:
    """All residue tuples of the grid, in lexicographic order."""
    return [tuple(r) for r in itertools.product(*[range(ki) for ki in k])]


def residue_index(k) -> dict:
    return {r: i for i, r in enumerate(residues(k))}


def norm_S(r, S) -> int:
    """Signed coordinate sum: slots off the twist set count +, on it -."""
    return sum(v if (i + 1) not in S else -v for i, v in enumerate(r))


def residue_step(spec: ExpModuleSpec, i: int, r: tuple) -> tuple:
    """Image of residue r under the slot-i permutation of the realization."""
    step = -1 if i in spec.S else +1
    out = list(r)
    out[i - 1] = (out[i - 1] + step) % spec.k[i - 1]
    return tuple(out)


def residue_perm(spec: ExpModuleSpec, i: int) -> dict:
    """The slot-i residue permutation as a mapping on the whole grid."""
    if not 1 <= i <= spec.m:
        raise ValueError(f"index {i} out of range 1..{spec.m}")
    return {r: residue_step(spec, i, r) for r in residues(spec.k)}


# ---------------------------------------------------------------------------
# the circulant building blocks
# ---------------------------------------------------------------------------

def block_U(alpha, var: int, i: int, j: int) -> GPM:
    """Two-block piece with identity of size i below the diagonal and
    (h/alpha) I_j in the upper right corner; size i + j."""
    alpha = rat(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if i < 0 or j < 0 or i + j < 1:
        raise ValueError("block sizes must be nonnegative with positive sum")
    perm = [j + c for c in range(i)] + [c for c in range(j)]
    entries = [(Fraction(1), 0)] * i + [(1 / alpha, 1)] * j
    return GPM(i + j, var, perm, entries)


def block_V(alpha, var: int, i: int, j: int) -> GPM:
    """Two-block piece with alpha I_i below the diagonal and -h I_j in the
    upper right corner; size i + j."""
    alpha = rat(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    if i < 0 or j < 0 or i + j < 1:
        raise ValueError("block sizes must be nonnegative with positive sum")
    perm = [j + c for c in range(i)] + [c for c in range(j)]
    entries = [(alpha, 0)] * i + [(Fraction(-1), 1)] * j
    return GPM(i + j, var, perm, entries)


def _block_diag(blocks) -> GPM:
    size = sum(b.size for b in blocks)
    var = blocks[0].var
    perm = []
    entries = []
    base = 0
    for b in blocks:
        if b.var != var:
            raise ValueError("blocks over different variables")
        perm.extend(base + r for r in b.perm)
        entries.extend(b.entries)
        base += b.size
    return GPM(size, var, perm, entries)


def slot_block(spec: ExpModuleSpec, i: int, shrink: int = 1) -> GPM:
    """The repeated block of slot i; sizes divide by `shrink` when building
    summand matrices."""
    tail = math.prod(spec.k[i:])  # prod of k_j for j > i
    if tail % shrink:
        raise ValueError("shrink factor does not divide the tail product")
    p = tail // shrink
    alpha = spec.a[i - 1] * spec.k[i - 1]
    if i in spec.S:
        return block_V(alpha, i, p, (spec.k[i - 1] - 1) * p)
    return block_U(alpha, i, (spec.k[i - 1] - 1) * p, p)


def realize(spec: ExpModuleSpec) -> FreeModule:
    """The rank-(K|K) companion-pair realization of the spec."""
    pairs = []
    for i in range(1, spec.m + 1):
        copies = math.prod(spec.k[: i - 1])
        block = slot_block(spec, i)
        a_i = _block_diag([block] * copies)
        pairs.append(CompanionPair.of(a_i))
    return FreeModule(spec.m, pairs)


# ---------------------------------------------------------------------------
# orbit partition of the residue grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitPartition:
    s: int
    classes: tuple    # classes[p] = lex-sorted tuple of residues, p = 0..s-1
    shadow: tuple     # the common preimage classes under the slot permutations

    def class_of(self, r) -> int:
        for p, cls in enumerate(self.classes):
            if r in cls:
                return p
        raise KeyError(r)


def orbit_partition(spec: ExpModuleSpec) -> OrbitPartition:
    """Classes of the signed-sum residue invariant mod s = gcd(k).

    Verifies internally that the preimage classes do not depend on the slot
    used to transport them, and that the difference permutations act
    transitively on every class.
    """
    s = spec.s
    grid = residues(spec.k)
    classes = [[] for _ in range(s)]
    for r in grid:
        classes[norm_S(r, spec.S) % s].append(r)
    classes = [tuple(sorted(c)) for c in classes]

    # preimage classes, transported through each slot in turn
    perms = [residue_perm(spec, i) for i in range(1, spec.m + 1)]
    invs = [{v: u for u, v in p.items()} for p in perms]
    shadow = []
    for cls in classes:
        candidates = [tuple(sorted(inv[r] for r in cls)) for inv in invs]
        if any(c != candidates[0] for c in candidates):
            raise ArithmeticError("preimage class depends on the transporting slot")
        shadow.append(candidates[0])

    # transitivity of the difference permutations on each class
    for cls in classes:
        if not cls:
            raise ArithmeticError("empty residue class")
        reached = {cls[0]}
        frontier = [cls[0]]
        while frontier:
            r = frontier.pop()
            for t in range(spec.m - 1):
                forward = perms[t][invs[t + 1][r]]
                backward = perms[t + 1][invs[t][r]]
                for nxt in (forward, backward):
                    if nxt not in reached:
                        reached.add(nxt)
                        frontier.append(nxt)
        if reached != set(cls):
            raise ArithmeticError("difference group is not transitive on a class")

    return OrbitPartition(s, tuple(classes), tuple(shadow))


def summand(spec: ExpModuleSpec, p: int) -> FreeModule:
    """The direct summand supported on the class of label p.

    For s = 1 this is the whole realization.  Otherwise all blocks shrink by
    s and the last slot follows a four-way rule keyed by the signed sum of
    the leading residue prefix.
    """
    s = spec.s
    if s == 1:
        if p != 0:
            raise ValueError("class label out of range")
        return realize(spec)
    if not 0 <= p < s:
        raise ValueError("class label out of range")
    m = spec.m
    pairs = []
    for i in range(1, m):
        copies = math.prod(spec.k[: i - 1])
        block = slot_block(spec, i, shrink=s)
        pairs.append(CompanionPair.of(_block_diag([block] * copies)))

    km = spec.k[m - 1]
    alpha = spec.a[m - 1] * km
    size = km // s
    blocks = []
    for r in residues(spec.k[: m - 1]):
        w = norm_S(r, spec.S)
        if m not in spec.S:
            if (w - p) % s == 0:
                blocks.append(block_U(alpha, m, size - 1, 1))
            else:
                blocks.append(GPM.identity(size, m))
        else:
            if (w - (p - 1)) % s == 0:
                blocks.append(block_V(alpha, m, 1, size - 1))
            else:
                blocks.append(GPM.scalar(size, m, -1, deg=1))
    pairs.append(CompanionPair.of(_block_diag(blocks)))
    return FreeModule(m, pairs)


def annihilator_witness(mono: MonomialExpSpec, i: int, b) -> Poly:
    """Torsion witness (h_i - b_i)(h_i + b_i + 1) for a monomial datum whose
    exponent vanishes in slot i."""
    if not 1 <= i <= mono.m:
        raise ValueError(f"index {i} out of range 1..{mono.m}")
    if mono.lvec[i - 1] != 0:
        raise ValueError("witness requires a vanishing exponent in the chosen slot")
    b_i = int(b[i - 1]) if isinstance(b, (tuple, list)) else int(b)
    hv = Poly.var(mono.m, i)
    return (hv - Poly.const(mono.m, b_i)) * (hv + Poly.const(mono.m, b_i + 1))
