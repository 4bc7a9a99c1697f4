import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from conftest import chi, raw_terms, step
from predual.corefn import INF, Exponents, SimpleFunction, disjointify, to_real
from predual.norms import (
    amalgam_norm,
    golden_section_max,
    holder_check,
    lebesgue_norm,
    morrey_norm,
    weak_norm,
)

Q = Fraction
EXPS = [1, Q(3, 2), 2, 3, 4, INF]


def brute_amalgam(f, q, p, rho):
    """Enumerate every lattice cube meeting the support (d = 1, 2)."""
    rho = Fraction(rho)
    bps = f.breakpoints
    ranges = [range(math.floor(a[0] / rho), math.ceil(a[-1] / rho)) for a in bps]
    local = []
    for k in ranges[0] if f.dim == 1 else [(i, j) for i in ranges[0] for j in ranges[1]]:
        k = (k,) if f.dim == 1 else k
        lo = [ki * rho for ki in k]
        hi = [(ki + 1) * rho for ki in k]
        if q == INF:
            vals = [abs(v) for v, b in f.terms if b.overlap_volume(lo, hi) > 0]
            local.append(max(vals, default=mpf(0)))
        else:
            mass = mpmath.fsum(abs(v) ** to_real(q) * to_real(b.overlap_volume(lo, hi))
                               for v, b in f.terms)
            local.append(mass ** (1 / to_real(q)))
    if p == INF:
        return max(local, default=mpf(0))
    return mpmath.fsum(x ** to_real(p) for x in local) ** (1 / to_real(p))


def scan_morrey(f, q, lam, n=400):
    """Float scan over centres and radii; a lower bound for the supremum."""
    lo, hi = float(f.breakpoints[0][0]), float(f.breakpoints[0][-1])
    pieces = [(abs(float(v)) ** q, float(b.lo[0]), float(b.hi[0])) for v, b in f.terms]
    best = 0.0
    for i in range(n + 1):
        x = lo + (hi - lo) * i / n
        for j in range(1, n + 1):
            r = (hi - lo) * j / n
            mass = sum(w * max(0.0, min(b, x + r) - max(a, x - r)) for w, a, b in pieces)
            best = max(best, r ** ((lam - 1) / q) * mass ** (1 / q))
    return best


# -- Lebesgue and weak ----------------------------------------------------------

@pytest.mark.parametrize("q", EXPS)
def test_lebesgue_unit_indicator(q):
    assert lebesgue_norm(chi((0, 1)), q) == 1


def test_lebesgue_two_level():
    f = step((2, [[0, "1/2"]]), (1, [["1/2", 1]]))
    assert mpmath.almosteq(lebesgue_norm(f, 2), mpmath.sqrt(mpf(5) / 2), 1e-30)
    assert lebesgue_norm(f, INF) == 2


def test_weak_examples():
    assert weak_norm(chi((0, 1)), 2) == 1
    f = step((2, [[0, "1/2"]]), (1, [["1/2", 1]]))
    assert mpmath.almosteq(weak_norm(f, 2), mpmath.sqrt(2), 1e-30)
    assert weak_norm(SimpleFunction.zero(1), 2) == 0


def test_weak_rejects_infinite_alpha():
    with pytest.raises(ValueError):
        weak_norm(chi((0, 1)), INF)


@settings(max_examples=80, deadline=None)
@given(raw_terms(), st.sampled_from([1, Q(3, 2), 2, 3]))
def test_weak_norm_matches_level_scan(terms, alpha):
    f = disjointify(terms, 1)
    if f.is_zero():
        return
    # t |{|f| > t}|^(1/alpha) on levels just below each value of |f|
    best = mpf(0)
    for v in {abs(v) for v, _ in f.terms}:
        t = v * (1 - mpf(10) ** -25)
        meas = mpmath.fsum(to_real(b.volume) for w, b in f.terms if abs(w) > t)
        best = max(best, t * meas ** (1 / to_real(alpha)))
    assert mpmath.almosteq(weak_norm(f, alpha), best, 1e-20)


# -- amalgam --------------------------------------------------------------------

def test_amalgam_examples():
    f = chi((0, 3))
    assert mpmath.almosteq(amalgam_norm(f, 2, 4, 1), mpf(3) ** 0.25, 1e-30)
    assert mpmath.almosteq(amalgam_norm(f, 2, 4, 2), mpf(5) ** 0.25, 1e-30)
    for q in EXPS:
        for p in EXPS:
            assert amalgam_norm(chi((0, 1)), q, p, 1) == 1


def test_amalgam_negative_lattice_cells():
    f = step((1, [["-3/2", "1/2"]]))
    # cells [-2,-1) and [0,1) get mass 1/2, [-1,0) gets 1
    expected = (mpf(1) / 4 + 1 + mpf(1) / 4) ** 0.5
    assert mpmath.almosteq(amalgam_norm(f, 2, 2, 1), lebesgue_norm(f, 2), 1e-30)
    assert mpmath.almosteq(amalgam_norm(f, 1, 2, 1), expected, 1e-30)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 2).flatmap(lambda d: raw_terms(d)), st.sampled_from(EXPS),
       st.sampled_from(EXPS), st.sampled_from([Q(1, 3), Q(1, 2), 1, Q(3, 2), 2, 5]))
def test_amalgam_matches_brute_force(terms, q, p, rho):
    f = disjointify(terms, terms[0][1].dim)
    if f.is_zero():
        return
    assert mpmath.almosteq(amalgam_norm(f, q, p, rho), brute_amalgam(f, q, p, rho), 1e-25)


def test_amalgam_large_rho_is_cheap():
    # cost does not grow with the number of lattice cells
    f = step((1, [[0, "1/1000"]]), (2, [[999, 1000]]))
    assert mpmath.almosteq(amalgam_norm(f, 2, 2, Q(1, 10 ** 6)), lebesgue_norm(f, 2), 1e-25)


# -- Hölder -------------------------------------------------------------------------

def test_holder_equality_case():
    lhs, rhs = holder_check(chi((0, 2)), chi((0, 2)), Exponents(2, 4, 3), 1)
    assert mpmath.almosteq(lhs, 2, 1e-30) and mpmath.almosteq(rhs, 2, 1e-30)


def test_holder_disjoint_and_unit():
    lhs, rhs = holder_check(chi((0, 1)), chi((1, 2)), Exponents(2, 4, 3), 1)
    assert lhs == 0 and rhs > 0
    lhs, rhs = holder_check(chi((0, 1)), chi((0, 1)), Exponents(3, 6, 4), 1)
    assert lhs == 1 and mpmath.almosteq(rhs, 1, 1e-30)


# -- Morrey -------------------------------------------------------------------------

def test_morrey_unit_indicator():
    est = morrey_norm(chi((0, 1)), 1, Q(1, 2))
    assert mpmath.almosteq(est.value, mpmath.sqrt(2), 1e-25)
    assert est.best_witness == {"center": (Q(1, 2),), "radius": Q(1, 2)} and est.exact


def test_morrey_zero():
    assert morrey_norm(SimpleFunction.zero(1), 2, Q(1, 2)).value == 0


def test_morrey_near_critical_lambda():
    # r^(-1/100) min(2r, 1) peaks at r = 1/2 with value 2^(1/100), slightly above ||f||_1
    est = morrey_norm(chi((0, 1)), 1, Q(99, 100))
    assert mpmath.almosteq(est.value, mpf(2) ** (mpf(1) / 100), 1e-25)
    assert est.value > lebesgue_norm(chi((0, 1)), 1)


@pytest.mark.parametrize("seed", range(6))
def test_morrey_agrees_with_scan(seed):
    import random
    from predual.verify import random_simple_function
    rng = random.Random(seed)
    f = random_simple_function(rng, 1, denominator=2, span=2)
    q, lam = rng.choice((1, 2, 3)), rng.choice((0.25, 0.5, 0.75))
    est = float(morrey_norm(f, q, Q(lam)).value)
    scan = scan_morrey(f, q, lam)
    assert est >= scan * (1 - 1e-9)
    assert est <= scan * (1 + 2e-2)


def test_morrey_cube_window_in_d2():
    est = morrey_norm(chi((0, 1), (0, 1)), 2, 1, window="cube")
    # side-1 cube: r^((1-2)/2) * 1 at r = 1/2
    assert mpmath.almosteq(est.value, mpmath.sqrt(2), 1e-20)
    with pytest.raises(ValueError):
        morrey_norm(chi((0, 1), (0, 1)), 2, 1, window="ball")


def test_morrey_domain():
    with pytest.raises(ValueError):
        morrey_norm(chi((0, 1)), 2, 1)
    with pytest.raises(ValueError):
        morrey_norm(chi((0, 1)), INF, Q(1, 2))


def test_golden_section_finds_interior_max():
    v, x = golden_section_max(lambda t: (-(t - 0.3) ** 2, t), -1, 1, 60)
    assert abs(x - 0.3) < 1e-9
