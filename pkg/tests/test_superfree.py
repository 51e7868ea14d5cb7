import random
from fractions import Fraction

import pytest

from slfree import liealg
from slfree.gpm import GPM, CompanionPair
from slfree.polyring import Poly, UniPoly, delta_i_shift, sigma_shift
from slfree.superfree import (
    FreeModule,
    TwistedOperator,
    block_shape_ok,
    dual,
    filtration_member_check,
    orbit_split,
    rank_one_module,
    super_bracket,
    verify_relations,
)


def H(m, i):
    return Poly.var(m, i)


def C(m, v):
    return Poly.const(m, v)


def ident_mat(m, n, scale=None):
    p = Poly.one(m) if scale is None else scale
    return {(r, r): p for r in range(n)}


# -- twisted operator algebra --------------------------------------------------

def test_compose_adds_shifts():
    m, n = 2, 2
    a = TwistedOperator.single(m, n, 0, ident_mat(m, n), (1, 0))
    b = TwistedOperator.single(m, n, 0, ident_mat(m, n), (0, -1))
    ab = a.compose(b)
    assert ab.terms == {(1, -1): ident_mat(m, n)}


def test_compose_untwisted_is_matrix_product():
    m, n = 1, 2
    ma = {(0, 1): H(m, 1), (1, 0): C(m, 2)}
    mb = {(0, 0): H(m, 1), (1, 1): C(m, 3)}
    a = TwistedOperator.single(m, n, 0, ma, (0,))
    b = TwistedOperator.single(m, n, 0, mb, (0,))
    ab = a.compose(b)
    assert ab.terms == {(0,): {(0, 1): H(m, 1).scale(3), (1, 0): H(m, 1).scale(2)}}


def test_compose_shift_convention():
    # (M, e1) after (h1*I, 0) gives ((h1 - 1)*M, e1)
    m, n = 1, 1
    mat = {(0, 0): C(m, 1)}
    a = TwistedOperator.single(m, n, 0, mat, (1,))
    b = TwistedOperator.single(m, n, 0, {(0, 0): H(m, 1)}, (0,))
    ab = a.compose(b)
    assert ab.terms == {(1,): {(0, 0): H(m, 1) - C(m, 1)}}


def test_bracket_even_self_vanishes():
    m, n = 2, 2
    p = TwistedOperator.single(m, n, 0, {(0, 1): H(m, 1)}, (1, 0))
    assert super_bracket(p, p).is_zero()


def test_bracket_odd_symmetric():
    m, n = 1, 2
    p = TwistedOperator.single(m, n, 1, {(0, 1): H(m, 1)}, (1,))
    q = TwistedOperator.single(m, n, 1, {(1, 0): C(m, 2)}, (-1,))
    assert super_bracket(p, q) == super_bracket(q, p)


def test_compose_associative_sampled():
    rng = random.Random(7)
    m, n = 2, 2

    def rand_poly():
        return Poly(m, {
            (rng.randint(0, 1), rng.randint(0, 1)): Fraction(rng.randint(-2, 2))
            for _ in range(2)
        })

    def rand_op():
        terms = {}
        for _ in range(2):
            z = (rng.randint(-1, 1), rng.randint(-1, 1))
            mat = {(rng.randint(0, 1), rng.randint(0, 1)): rand_poly() for _ in range(2)}
            mat = {rc: p for rc, p in mat.items() if not p.is_zero()}
            if mat:
                terms[z] = mat
        return TwistedOperator(m, n, 0, terms)

    for _ in range(25):
        a, b, c = rand_op(), rand_op(), rand_op()
        assert a.compose(b).compose(c) == a.compose(b.compose(c))


# -- generator actions ---------------------------------------------------------

def test_op_h_action():
    mod = rank_one_module([Fraction(1)], set())
    op = mod.op_h(1)
    assert op.terms == {(0,): ident_mat(1, 2, H(1, 1))}
    v = mod.basis_vector(0)
    assert op.apply(v)[0] == H(1, 1)


def test_op_h_commute():
    mod = rank_one_module([Fraction(1), Fraction(2)], {1})
    a, b = mod.op_h(1), mod.op_h(2)
    assert a.compose(b) == b.compose(a)


def test_odd_raise_structure():
    # twist slot: top-right block a_i h_i with the inverse complementary shift
    mod = rank_one_module([Fraction(3), Fraction(2)], {1})
    op = mod.op_e_odd(1, +1)
    z = delta_i_shift(2, 1, power=-1)
    assert op.terms == {z: {(0, 1): H(2, 1).scale(3)}}
    assert op.parity == 1


def test_odd_raise_squares_to_zero():
    mod = rank_one_module([Fraction(1), Fraction(1)], set())
    op = mod.op_e_odd(1, +1)
    assert op.compose(op).is_zero()


def test_odd_anticommutator_is_cartan():
    mod = rank_one_module([Fraction(5)], {1})
    anti = super_bracket(mod.op_e_odd(1, +1), mod.op_e_odd(1, -1))
    assert anti == mod.op_h(1)


def test_even_action_closed_form():
    # slots (i, j) = (1, 2) with 1 on and 2 off the twist set:
    # (a1/a2) diag(h1(h2+1), (h1-1)h2) with shift sigma_1 sigma_2^(-1)
    a1, a2 = Fraction(3), Fraction(7)
    mod = rank_one_module([a1, a2], {1})
    op = mod.op_e_even(1, 2)
    z = (1, -1)
    ratio = a1 / a2
    h1, h2 = H(2, 1), H(2, 2)
    expected = {
        (0, 0): (h1 * (h2 + C(2, 1))).scale(ratio),
        (1, 1): ((h1 - C(2, 1)) * h2).scale(ratio),
    }
    assert op.terms == {z: expected}
    assert op.parity == 0


def test_parity_bookkeeping_and_block_shapes():
    mod = rank_one_module([Fraction(1), Fraction(-2)], {2})
    for x in liealg.basis(2):
        op = mod.op(x)
        assert op.parity == liealg.parity(x)
        assert block_shape_ok(op, mod.ell)
    comp = mod.op_e_odd(1, +1).compose(mod.op_e_odd(2, -1))
    assert comp.parity == 0


# -- relation verification -----------------------------------------------------

@pytest.mark.parametrize("twist", [set(), {1}, {2}, {1, 2}])
def test_rank_one_relations_pass(twist):
    mod = rank_one_module([Fraction(1), Fraction(2)], twist)
    report = verify_relations(mod)
    assert report.ok
    assert report.checked == len(liealg.basis(2)) ** 2


def test_corrupted_module_fails():
    good = GPM(1, 1, (0,), [(Fraction(1), 0)])
    bad_mate = GPM(1, 1, (0,), [(Fraction(2), 1)])  # not the companion of good
    pair1 = CompanionPair(good, bad_mate, check=False)
    pair2 = CompanionPair.of(GPM(1, 2, (0,), [(Fraction(1), 0)]))
    mod = FreeModule(2, [pair1, pair2])
    report = verify_relations(mod)
    assert not report.ok


def test_report_json_shape():
    mod = rank_one_module([Fraction(1)], set())
    rep = verify_relations(mod).to_json()
    assert set(rep) == {"checked", "failed"}
    assert rep["failed"] == []


# -- duality -------------------------------------------------------------------

def test_dual_rank_one_formula():
    a = Fraction(5)
    mod = rank_one_module([a], {1})  # A = [a h1]
    d = dual(mod)
    # mate of [a h1] is [1/a]; its transpose is itself
    assert d.pairs[0].a == GPM(1, 1, (0,), [(1 / a, 0)])
    assert d.pairs[0].acomp == GPM(1, 1, (0,), [(a, 1)])


def test_dual_involution_and_relations():
    mod = rank_one_module([Fraction(2), Fraction(-3, 2)], {2})
    assert dual(dual(mod)) == mod
    assert verify_relations(dual(mod)).ok


# -- orbit split ---------------------------------------------------------------

def test_orbit_split_identity_perms():
    # two slots with identity permutations at size 2: no mixing, 2 parts
    pairs = [
        CompanionPair.of(GPM(2, 1, (0, 1), [(Fraction(1), 0), (Fraction(2), 1)])),
        CompanionPair.of(GPM(2, 2, (0, 1), [(Fraction(1), 1), (Fraction(3), 0)])),
    ]
    mod = FreeModule(2, pairs)
    parts = orbit_split(mod)
    assert [idx for idx, _ in parts] == [(0,), (1,)]
    for _, sub in parts:
        assert sub.ell == 1
        assert verify_relations(sub).ok


def test_orbit_split_reassembles_original():
    # one cyclic slot, one identity slot at size 3: a single part
    cyc = GPM(3, 1, (1, 2, 0), [(1, 0), (1, 0), (Fraction(1, 2), 1)])
    idd = GPM(3, 2, (0, 1, 2), [(1, 1), (1, 1), (1, 1)])
    mod = FreeModule(2, [CompanionPair.of(cyc), CompanionPair.of(idd)])
    parts = orbit_split(mod)
    assert len(parts) == 1
    assert parts[0][0] == (0, 1, 2)
    assert parts[0][1].pairs[0].a == cyc


# -- filtration membership -----------------------------------------------------

def test_filtration_trivial_member():
    mod = rank_one_module([Fraction(1), Fraction(4)], {1})
    assert filtration_member_check(mod, UniPoly.one())


def test_filtration_linear_member():
    mod = rank_one_module([Fraction(1), Fraction(4)], set())
    assert filtration_member_check(mod, UniPoly.from_roots([5]))


def test_filtration_chain_strictness():
    mod = rank_one_module([Fraction(2)], {1})
    chain = [UniPoly.one(), UniPoly.from_roots([0]), UniPoly.from_roots([0, 1])]
    for F in chain:
        assert filtration_member_check(mod, F)
    from slfree.polyring import exact_divide, substitute_sum
    for small, big in zip(chain, chain[1:]):
        q = exact_divide(substitute_sum(big, 0, 1), substitute_sum(small, 0, 1))
        assert q is not None and not q.is_constant()


def test_filtration_rejects_non_member_scaling():
    # scale the even part by F(H) instead of F(H + m - 1): not closed for m >= 2
    mod = rank_one_module([Fraction(1), Fraction(1)], set())
    m = mod.m
    F = UniPoly.from_roots([5])
    from slfree.polyring import exact_divide, substitute_sum
    f_wrong = substitute_sum(F, 0, m)  # both halves scaled by F(H)
    factors = [f_wrong, f_wrong]
    ok = True
    for idx in range(2):
        vec = mod.zero_vector()
        vec[idx] = factors[idx]
        for x in liealg.basis(m):
            for out_idx, comp in enumerate(mod.op(x).apply(vec)):
                if not comp.is_zero() and exact_divide(comp, factors[out_idx]) is None:
                    ok = False
    assert not ok
