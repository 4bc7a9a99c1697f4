import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from conftest import chi, step
from predual.corefn import INF, Exponents, SimpleFunction, dilate, to_real
from predual.hspace import (
    HDecomposition,
    dual_lower_bound,
    hnorm_sandwich,
    pairing_bound_check,
    scale_optimized_bound,
    synthesize,
    transport,
    trivial_decomposition,
    validate,
    witness_family,
    zorko_to_h,
)
from predual.norms import amalgam_norm, lebesgue_norm
from predual.verify import LIGHT, random_ordered, random_simple_function

Q = Fraction
E243 = Exponents(2, 4, 3)
TWO_THIRDS = mpf(2) ** (mpf(2) / 3)


def same(f, g, tol=1e-28):
    return lebesgue_norm(f - g, 1) <= tol * max(1, lebesgue_norm(g, 1))


# -- validation and synthesis -------------------------------------------------------

def test_validate_examples():
    ok = validate(HDecomposition(E243, ((1, 1, chi((0, 1))),)))
    assert ok.valid and ok.total == 1
    bad = validate(HDecomposition(E243, ((1, 1, chi((0, 1)).scale(2)),)))
    assert not bad.valid and "exceeds 1" in bad.failures[0]
    empty = HDecomposition(E243, ())
    assert validate(empty).valid and empty.cost == 0
    assert synthesize(empty, 1).is_zero()


def test_synthesize_examples():
    assert same(synthesize(HDecomposition(E243, ((3, 1, chi((0, 1))),))), chi((0, 1)).scale(3))
    dec = HDecomposition(Exponents(1, INF, 2), ((mpmath.sqrt(2), 2, chi((0, 1))),))
    assert same(synthesize(dec), chi((0, 2)))
    opposite = HDecomposition(E243, ((1, 1, chi((0, 1))), (-1, 1, chi((0, 1)))))
    assert synthesize(opposite).is_zero()


def test_trivial_decomposition_examples():
    dec = trivial_decomposition(chi((0, 1)).scale(3), E243)
    (c, rho, atom), = dec.terms
    assert mpmath.almosteq(c, 3, 1e-30) and rho == 1 and same(atom, chi((0, 1)))
    (c, _, _), = trivial_decomposition(chi((0, 2)), E243).terms
    assert mpmath.almosteq(c, mpf(2) ** (mpf(3) / 4), 1e-30)


@pytest.mark.parametrize("seed", range(10))
def test_trivial_reconstruction(seed):
    rng = random.Random(seed)
    f, e = random_simple_function(rng, rng.choice((1, 2))), random_ordered(rng)
    dec = trivial_decomposition(f, e)
    assert same(synthesize(dec), f) and validate(dec).valid


# -- upper bounds ---------------------------------------------------------------------

def test_scale_optimized_examples():
    dec, cost = scale_optimized_bound(chi((0, 1)), E243)
    assert cost == 1 and dec.terms[0][1] == 1
    dec, cost = scale_optimized_bound(chi((0, 2)), E243)
    assert mpmath.almosteq(cost, TWO_THIRDS, 1e-30) and dec.terms[0][1] == 2
    _, cost = scale_optimized_bound(chi((0, 1)).scale(Q(7, 2)), E243)
    assert mpmath.almosteq(cost, mpf(7) / 2, 1e-30)


@pytest.mark.parametrize("seed", range(8))
def test_scale_optimized_is_valid_and_below_trivial(seed):
    rng = random.Random(50 + seed)
    f, e = random_simple_function(rng, 1), random_ordered(rng)
    dec, cost = scale_optimized_bound(f, e, cfg=LIGHT)
    assert validate(dec).valid
    assert same(synthesize(dec), f, 1e-25)
    assert cost <= amalgam_norm(f, e.q_conj, e.p_conj, 1) * (1 + mpf(10) ** -30)


def test_transport_preserves_cost_and_dilates():
    f = step((1, [[0, "1/2"]]), (-3, [[1, 2]]))
    dec, _ = scale_optimized_bound(f, E243, cfg=LIGHT)
    moved = transport(dec, Q(5, 3))
    assert moved.cost == dec.cost
    assert same(synthesize(moved), dilate(f, Q(5, 3), E243.alpha_conj), 1e-25)


# -- lower bounds ----------------------------------------------------------------------

def test_dual_lower_bound_examples():
    b = dual_lower_bound(chi((0, 1)), E243, [chi((0, 1))])
    assert b.lower == 1 and b.certified
    g = chi((0, 2)).scale(mpf(2) ** (-mpf(1) / 3))
    b = dual_lower_bound(chi((0, 2)), E243, [g])
    assert mpmath.almosteq(b.lower, TWO_THIRDS, 1e-28) and b.certified
    b = dual_lower_bound(chi((0, 1)), E243, [chi((5, 6))])
    assert b.lower == 0 and b.witness is None


def test_witness_family_is_deterministic():
    f = step((1, [[0, 1]]), (-2, [[1, 3]]))
    assert witness_family(f, E243, seed=3) == witness_family(f, E243, seed=3)


@pytest.mark.parametrize("f,expected", [
    (chi((0, 1)), mpf(1)),
    (chi((0, 2)), TWO_THIRDS),
    (chi((0, 1)).scale(3), mpf(3)),
])
def test_sandwich_is_tight(f, expected):
    res = hnorm_sandwich(f, E243)
    assert mpmath.almosteq(res.lower, expected, 1e-28)
    assert mpmath.almosteq(res.upper, expected, 1e-28)
    assert res.certified_lower and mpmath.almosteq(res.certified_value, expected, 1e-28)


@pytest.mark.parametrize("seed", range(5))
def test_sandwich_order_random(seed):
    rng = random.Random(300 + seed)
    f, e = random_simple_function(rng, 1), random_ordered(rng)
    res = hnorm_sandwich(f, e, cfg=LIGHT)
    assert res.certified_value <= res.lower <= res.upper * (1 + mpf(10) ** -25)


def test_sandwich_rejects_zero_and_unordered():
    with pytest.raises(ValueError):
        hnorm_sandwich(SimpleFunction.zero(1), E243)
    with pytest.raises(ValueError, match="requires q <= alpha <= p"):
        hnorm_sandwich(chi((0, 1)), Exponents(3, 2, 2))


# -- duality chain ------------------------------------------------------------------------

def test_pairing_chain_examples():
    r = pairing_bound_check(HDecomposition(E243, ((1, 1, chi((0, 1))),)), chi((0, 1)))
    assert r.ok and r.total_lhs == 1 and mpmath.almosteq(r.total_rhs, 1, 1e-30)
    dec = HDecomposition(Exponents(1, INF, 2), ((mpmath.sqrt(2), 2, chi((0, 1))),))
    r = pairing_bound_check(dec, chi((0, 2)))
    assert r.ok
    assert mpmath.almosteq(r.total_lhs, 2, 1e-30) and mpmath.almosteq(r.total_rhs, 2, 1e-30)
    r = pairing_bound_check(HDecomposition(E243, ((1, 1, chi((0, 1))),)), chi((4, 5)))
    assert r.ok and r.total_lhs == 0


def test_pairing_chain_detects_invalid_atom():
    dec = HDecomposition(E243, ((1, 1, chi((0, 1)).scale(2)),))
    r = pairing_bound_check(dec, chi((0, 1)))
    assert not r.ok


# -- Morrey atoms --------------------------------------------------------------------------

E2I4 = Exponents(2, INF, 4)


def test_worked_morrey_atom():
    a = chi((-1, 1)).scale(mpf(2) ** (-mpf(3) / 4))
    dec = zorko_to_h([(1, a, 0, 1)], E2I4)
    (c, rho, atom), = dec.terms
    assert rho == 1
    assert mpmath.almosteq(c, 2 * mpf(2) ** (-mpf(1) / 4), 1e-30)
    assert mpmath.almosteq(dec.atom_norms()[0], mpf(2) ** (-mpf(1) / 2), 1e-25)
    assert same(synthesize(dec), a)


def test_zero_morrey_atom_is_dropped():
    assert zorko_to_h([(1, SimpleFunction.zero(1), 0, 1)], E2I4).terms == ()


def test_morrey_atom_gates():
    with pytest.raises(ValueError, match="exceeds the Morrey bound"):
        zorko_to_h([(1, chi((-1, 1)), 0, 1)], E2I4)
    with pytest.raises(ValueError, match="leaves the ball"):
        zorko_to_h([(1, chi((0, 3)).scale(Q(1, 100)), 0, 1)], E2I4)
    with pytest.raises(ValueError, match="p = inf"):
        zorko_to_h([], E243)


def test_morrey_atom_in_two_dimensions():
    e = Exponents(2, INF, 3)
    a = chi((-Q(1, 2), Q(1, 2)), (-Q(1, 2), Q(1, 2))).scale(Q(1, 10))
    dec = zorko_to_h([(1, a, (0, 0), 1)], e)
    assert validate(dec).valid and same(synthesize(dec), a)


def test_morrey_atom_constant_insufficient_near_q_one():
    # a constant atom on a ball straddling three unit cells; with q close to 1
    # the (q', 1) norm of 2^-d C^-1 u exceeds 1
    e = Exponents(Q(11, 10), INF, 4)
    expo = 1 / to_real(e.alpha) - 1 / to_real(e.q)
    ball = chi((-Q(1, 2), Q(3, 2)))
    a = ball.scale(mpf(2) ** expo / lebesgue_norm(ball, e.q_conj))
    dec = zorko_to_h([(1, a, Q(1, 2), 1)], e)
    assert dec.atom_norms()[0] > 1
    assert not validate(dec).valid
