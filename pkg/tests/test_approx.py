import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import chi, step
from predual.approx import (
    SampledFunction,
    approx_amalgam_norm,
    convolve,
    mollifier,
    mollifier_convergence,
    quadrature_tolerance,
    sample,
    transported_atoms,
)
from predual.corefn import INF, Exponents, SimpleFunction, integrate
from predual.hspace import scale_optimized_bound
from predual.norms import amalgam_norm
from predual.verify import LIGHT, random_ordered, random_simple_function

Q = Fraction


def test_sample_examples():
    np.testing.assert_array_equal(sample(chi((0, 1)), 0.25).samples, [1, 1, 1, 1])
    np.testing.assert_array_equal(sample(step((2, [[0, "1/2"]])), 0.5).samples, [2])


def test_sample_integral_exact_on_aligned_grid():
    f = step((2, [["-1/2", "1/4"]]), (-1, [["1/4", 2]]), (3, [[3, "13/4"]]))
    F = sample(f, 1 / 8)
    assert math.isclose(F.samples.sum() * F.step, float(integrate(f)), rel_tol=1e-14)


def test_convolve_tent():
    h = 1e-3
    F = sample(chi((0, 1)), h)
    T = convolve(F, F)
    x = T.midpoints()
    tent = np.clip(1 - np.abs(x - 1), 0, None)
    assert np.max(np.abs(T.samples - tent)) <= 2 * h
    # cell centres add, so the output grid sits half a cell to the right
    assert math.isclose(T.origin, h / 2) and abs(T.end - 2) <= 2 * h


def test_convolve_with_unit_spike_shifts():
    h = 1 / 64
    F = sample(step((1, [[0, "1/2"]]), (3, [["1/2", 1]])), h)
    spike = SampledFunction(0.25, h, [1 / h])
    out = convolve(F, spike)
    # F shifted by the spike position; each jump may land one cell off,
    # so the L1 error is at most h times the total variation 1 + 2 + 3
    back = sample(step((1, [["1/4", "3/4"]]), (3, [["3/4", "5/4"]])), h, origin=out.origin)
    assert approx_amalgam_norm(out - back, 1, 1) <= 6 * h + 1e-12


def test_convolve_zero():
    G = mollifier("box", 0.5, 0.01)
    out = convolve(sample(SimpleFunction.zero(1), 0.01), G)
    assert approx_amalgam_norm(out, 2, 2) == 0


def test_mollifier_shapes():
    h = 1 / 128
    np.testing.assert_allclose(mollifier("box", 1, h).samples, np.ones(128))
    m = mollifier("box", 0.25, h)
    np.testing.assert_allclose(m.samples, 4 * np.ones(32))
    assert m.origin == 0 and math.isclose(m.end, 0.25)
    for eps in (0.03, 0.2, 1.3):
        assert abs(mollifier("triangle", eps, 1e-3).l1() - 1) <= 1e-12
    with pytest.raises(ValueError):
        mollifier("gauss", 1, h)


def test_approx_amalgam_examples():
    F = sample(chi((0, 3)), 1e-3)
    assert abs(approx_amalgam_norm(F, 2, 4, 1.0) - 3 ** 0.25) <= 1e-2
    assert approx_amalgam_norm(sample(SimpleFunction.zero(1), 1e-3), 2, 4) == 0
    for q, p in ((1, INF), (2, 4), (3, 3)):
        assert abs(approx_amalgam_norm(sample(chi((0, 1)), 1e-3), q, p) - 1) <= 1e-2


@pytest.mark.parametrize("seed", range(10))
def test_approx_amalgam_matches_exact(seed):
    rng = random.Random(seed)
    f = random_simple_function(rng, 1)
    q, p = rng.choice((1, 1.5, 2, 3, INF)), rng.choice((1, 2, 4, INF))
    rho = rng.choice((0.5, 1.0, 2.0))
    F = sample(f, 1 / 64)
    exact = float(amalgam_norm(f, Q(q) if q != INF else q, p, Q(rho)))
    # breakpoints on Z/4 align with the grid, so the step reading is exact
    assert math.isclose(approx_amalgam_norm(F, q, p, rho), exact, rel_tol=1e-12)


def test_quadrature_tolerance_scales_with_h():
    f = chi((0, 1))
    t1 = quadrature_tolerance(sample(f, 1e-2), 2, 2)
    t2 = quadrature_tolerance(sample(f, 1e-4), 2, 2)
    assert math.isclose(t1 / t2, 10, rel_tol=1e-2)


def test_mollifier_convergence_closed_form():
    rows = mollifier_convergence(chi((0, 1)), Exponents(2, 2, 2), [0.25, 1 / 16], 1e-3, "box")
    for eps, err in rows:
        assert abs(err / math.sqrt(2 * eps / 3) - 1) <= 0.02


@pytest.mark.parametrize("kind", ["box", "triangle"])
def test_mollifier_convergence_monotone(kind):
    rows = mollifier_convergence(chi((0, 1)), Exponents(2, 4, 3), [0.5, 0.25, 0.125, 0.0625],
                                 1e-3, kind)
    errs = [e for _, e in rows]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_mollifier_convergence_hypotheses():
    with pytest.raises(ValueError, match="q > 1"):
        mollifier_convergence(chi((0, 1)), Exponents(1, 2, 2), [0.5], 1e-3)
    with pytest.raises(ValueError):
        mollifier_convergence(chi((0, 1), (0, 1)), Exponents(2, 2, 2), [0.5], 1e-3)


@pytest.mark.parametrize("seed", range(6))
def test_module_bound(seed):
    rng = random.Random(seed)
    f, e = random_simple_function(rng, 1, span=2), random_ordered(rng)
    h = 1 / 256
    phi = mollifier(rng.choice(("box", "triangle")), rng.choice((0.05, 0.3)), h)
    F = sample(f, h)
    conv = convolve(F, phi)
    lhs = approx_amalgam_norm(conv, e.q_conj, e.p_conj)
    rhs = approx_amalgam_norm(F, e.q_conj, e.p_conj) * phi.l1()
    assert lhs <= rhs + 5 * quadrature_tolerance(conv, e.q_conj, e.p_conj)


@pytest.mark.parametrize("seed", range(4))
def test_transported_atoms(seed):
    rng = random.Random(seed)
    f, e = random_simple_function(rng, 1, span=2), random_ordered(rng)
    dec, cost = scale_optimized_bound(f, e, cfg=LIGHT)
    coefs, scales, atoms, norms, tols = transported_atoms(dec, "box", 0.2, 1 / 256)
    assert math.isclose(sum(abs(c) for c in coefs), float(cost), rel_tol=1e-9)
    assert list(scales) == [rho for _, rho, _ in dec.terms]
    assert all(n <= 1 + 5 * t for n, t in zip(norms, tols))
