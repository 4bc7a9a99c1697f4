"""Seeded property batteries over random step functions.

Every property draws its inputs from ``random.Random(f"{seed}:{name}:{i}")``
so a failing case can be replayed from the report alone.
"""
from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mpf

from .approx import (
    approx_amalgam_norm,
    convolve,
    mollifier,
    mollifier_convergence,
    quadrature_tolerance,
    sample,
    transported_atoms,
)
from .corefn import (
    INF,
    Box,
    Exponents,
    SimpleFunction,
    conjugate,
    dilate,
    disjointify,
    exponent_str,
    indicator,
    integrate,
    multiply,
    pairing,
    rational_power,
    reciprocal,
    to_real,
)
from .fofana import GridConfig, auto_grid, fofana_norm
from .hspace import (
    HDecomposition,
    hnorm_sandwich,
    pairing_bound_check,
    scale_optimized_bound,
    synthesize,
    trivial_decomposition,
    validate,
    zorko_to_h,
)
from .norms import amalgam_norm, holder_check, lebesgue_norm, weak_norm

SUITES = ("core", "fofana", "hspace", "approx")
EXPONENTS = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3),
             Fraction(4), Fraction(6), INF)
LIGHT = GridConfig(points_per_decade=8, refine_iters=12, refine_top=3)


# --------------------------------------------------------------------------
# random inputs
# --------------------------------------------------------------------------

def random_simple_function(rng: random.Random, dim: int = 1, n_boxes: int | None = None,
                           denominator: int = 4, span: int = 3, positive: bool = False,
                           signed: bool = True) -> SimpleFunction:
    """Random nonzero step function on boxes with endpoints in ``Z/denominator``."""
    while True:
        n = n_boxes or rng.randint(1, 4 if dim == 1 else 3)
        low = 0 if positive else -span * denominator
        terms = []
        for _ in range(n):
            lo, hi = [], []
            for _ in range(dim):
                a = rng.randint(low, span * denominator - 1)
                b = rng.randint(a + 1, min(a + 2 * denominator, span * denominator + denominator))
                lo.append(Fraction(a, denominator))
                hi.append(Fraction(b, denominator))
            v = Fraction(rng.randint(1, 9), rng.choice((1, 2, 3)))
            if signed and rng.random() < 0.4:
                v = -v
            terms.append((to_real(v), Box(tuple(lo), tuple(hi))))
        f = disjointify(terms, dim)
        if not f.is_zero():
            return f


def random_exponent(rng: random.Random, finite: bool = False) -> Fraction:
    choices = [e for e in EXPONENTS if not (finite and e == INF)]
    return rng.choice(choices)


def random_ordered(rng: random.Random) -> Exponents:
    q, a, p = sorted(rng.choice(EXPONENTS) for _ in range(3))
    return Exponents(q, p, a)


def random_rho(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.randint(1, 12))


def close(a, b, rel: float) -> bool:
    a, b = to_real(a), to_real(b)
    return abs(a - b) <= rel * max(abs(a), abs(b)) + mpf(10) ** -30


def leq(a, b, slack: float) -> bool:
    return to_real(a) <= to_real(b) * (1 + slack) + slack


# --------------------------------------------------------------------------
# properties
# --------------------------------------------------------------------------

@dataclass
class Check:
    ok: bool
    lhs: object = None
    rhs: object = None
    inputs: str = ""


@dataclass(frozen=True)
class Property:
    name: str
    suite: str
    statement: str
    fn: Callable[[random.Random], Check]
    weight: float = 1.0


PROPERTIES: list[Property] = []


def prop(name, suite, statement, weight=1.0):
    def register(fn):
        PROPERTIES.append(Property(name, suite, statement, fn, weight))
        return fn
    return register


def _fmt(*parts):
    return "; ".join(str(p) for p in parts)


@prop("dilation group law", "core", "St_a St_b f = St_ab f")
def _group_law(rng):
    f = random_simple_function(rng, dim=rng.choice((1, 2)))
    r1, r2, beta = random_rho(rng), random_rho(rng), random_exponent(rng)
    twice, once = dilate(dilate(f, r1, beta), r2, beta), dilate(f, r1 * r2, beta)
    ok = [b for _, b in twice.terms] == [b for _, b in once.terms] and all(
        close(v, w, 1e-12) for (v, _), (w, _) in zip(twice.terms, once.terms))
    return Check(ok, twice, once, _fmt(f, r1, r2, exponent_str(beta)))


@prop("adjoint identity", "core", "<St^(a)_r f, g> = <f, St^(a')_(1/r) g>")
def _adjoint(rng):
    d = rng.choice((1, 2))
    f, g = random_simple_function(rng, d), random_simple_function(rng, d)
    rho, alpha = random_rho(rng), random_exponent(rng)
    lhs = pairing(dilate(f, rho, alpha), g)
    rhs = pairing(f, dilate(g, 1 / rho, conjugate(alpha)))
    return Check(close(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, g, rho, exponent_str(alpha)))


@prop("canonical form", "core", "disjointify is idempotent and keeps the integral")
def _canonical(rng):
    d = rng.choice((1, 2))
    raw = [(to_real(rng.randint(-5, 5)), b) for _, b in
           random_simple_function(rng, d).terms + random_simple_function(rng, d).terms]
    # overlapping boxes on purpose
    raw += [(to_real(1), b) for _, b in random_simple_function(rng, d, signed=False).terms]
    f = disjointify(raw, d)
    direct = mpmath.fsum(v * to_real(b.volume) for v, b in raw)
    ok = disjointify(f.terms, d) == f and close(integrate(f), direct, 1e-25)
    return Check(ok, integrate(f), direct, _fmt(raw))


@prop("product symmetry", "core", "fg = gf and <f, g> = <g, f>")
def _symmetry(rng):
    d = rng.choice((1, 2))
    f, g = random_simple_function(rng, d), random_simple_function(rng, d)
    ok = multiply(f, g) == multiply(g, f) and pairing(f, g) == pairing(g, f)
    return Check(ok, pairing(f, g), pairing(g, f), _fmt(f, g))


@prop("amalgam degeneracy", "core", "||f||_{q,q} = ||f||_q")
def _degeneracy(rng):
    f, q = random_simple_function(rng, rng.choice((1, 2))), random_exponent(rng)
    lhs, rhs = amalgam_norm(f, q, q, 1), lebesgue_norm(f, q)
    return Check(close(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, exponent_str(q)))


@prop("local exponent monotonicity", "core", "||f||_{q,p} <= ||f||_{q1,p} for q < q1")
def _mono_local(rng):
    f = random_simple_function(rng, rng.choice((1, 2)))
    q, q1 = sorted(rng.sample(EXPONENTS, 2))
    p = random_exponent(rng)
    lhs, rhs = amalgam_norm(f, q, p, 1), amalgam_norm(f, q1, p, 1)
    return Check(leq(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, q, q1, p))


@prop("global exponent monotonicity", "core", "||f||_{q,p} <= ||f||_{q,p1} for p1 < p")
def _mono_global(rng):
    f = random_simple_function(rng, rng.choice((1, 2)))
    p1, p = sorted(rng.sample(EXPONENTS, 2))
    q = random_exponent(rng)
    lhs, rhs = amalgam_norm(f, q, p, 1), amalgam_norm(f, q, p1, 1)
    return Check(leq(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, q, p1, p))


@prop("weak below strong", "core", "||f||_{alpha,inf} <= ||f||_alpha")
def _chebyshev(rng):
    f, alpha = random_simple_function(rng, rng.choice((1, 2))), random_exponent(rng, finite=True)
    lhs, rhs = weak_norm(f, alpha), lebesgue_norm(f, alpha)
    return Check(leq(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, alpha))


@prop("amalgam scaling identity", "core",
      "||St^(a)_r f||_{q,p} = r^(-d(1/a-1/q)) _(1/r)||f||_{q,p}")
def _scaling(rng):
    f = random_simple_function(rng, rng.choice((1, 2)))
    q, p, alpha = (random_exponent(rng) for _ in range(3))
    rho = random_rho(rng)
    lhs = amalgam_norm(dilate(f, rho, alpha), q, p, 1)
    rhs = rational_power(rho, -f.dim * (reciprocal(alpha) - reciprocal(q))) \
        * amalgam_norm(f, q, p, 1 / rho)
    return Check(close(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, q, p, alpha, rho))


@prop("L^alpha isometry", "core", "||St^(a)_r f||_a = ||f||_a")
def _isometry(rng):
    f, alpha, rho = random_simple_function(rng, rng.choice((1, 2))), random_exponent(rng), random_rho(rng)
    lhs, rhs = lebesgue_norm(dilate(f, rho, alpha), alpha), lebesgue_norm(f, alpha)
    return Check(close(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, alpha, rho))


@prop("absolute homogeneity", "core", "||c f|| = |c| ||f|| for every norm")
def _homogeneity(rng):
    f = random_simple_function(rng, rng.choice((1, 2)))
    c = to_real(Fraction(rng.randint(-20, 20) or 1, rng.randint(1, 7)))
    q, p = random_exponent(rng), random_exponent(rng)
    pairs = [(lebesgue_norm(f.scale(c), q), abs(c) * lebesgue_norm(f, q)),
             (amalgam_norm(f.scale(c), q, p, Fraction(1, 2)), abs(c) * amalgam_norm(f, q, p, Fraction(1, 2))),
             (weak_norm(f.scale(c), 2), abs(c) * weak_norm(f, 2))]
    ok = all(close(a, b, 1e-12) for a, b in pairs)
    return Check(ok, [a for a, _ in pairs], [b for _, b in pairs], _fmt(f, c, q, p))


@prop("Hölder inequality", "core", "||fg||_1 <= _r||f||_{q,p} _r||g||_{q',p'}")
def _holder(rng):
    d = rng.choice((1, 2))
    f, g = random_simple_function(rng, d), random_simple_function(rng, d)
    exps = Exponents(random_exponent(rng), random_exponent(rng), 2)
    rho = random_rho(rng)
    lhs, rhs = holder_check(f, g, exps, rho)
    return Check(leq(lhs, rhs, 1e-12), lhs, rhs, _fmt(f, g, exps, rho))


# fofana -------------------------------------------------------------------

@prop("grid supremum", "fofana", "every evaluated Phi(rho) <= estimate, equality at the witness",
      weight=0.1)
def _grid_sup(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    est = fofana_norm(f, exps, cfg=LIGHT)
    ok = all(pt.phi <= est.certified_lower for pt in est.curve) and any(
        pt.rho == est.best_witness and pt.phi == est.certified_lower for pt in est.curve)
    return Check(ok, max(pt.phi for pt in est.curve), est.certified_lower, _fmt(f, exps))


@prop("Fofana dilation isometry", "fofana", "||St^(a)_r f||_{q,p,a} = ||f||_{q,p,a}", weight=0.1)
def _fofana_isometry(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    rho0 = rng.choice((Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(3)))
    grid = auto_grid(f, exps, LIGHT)
    a = fofana_norm(f, exps, grid, cfg=LIGHT).certified_lower
    b = fofana_norm(dilate(f, rho0, exps.alpha), exps, grid.scaled(rho0), cfg=LIGHT).certified_lower
    return Check(close(a, b, 1e-10), a, b, _fmt(f, exps, rho0))


@prop("amalgam below Fofana", "fofana", "||f||_{q,p} <= ||f||_{q,p,alpha}", weight=0.1)
def _inclusion(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    est = fofana_norm(f, exps, cfg=LIGHT)
    lhs = amalgam_norm(f, exps.q, exps.p, 1)
    return Check(lhs <= est.certified_lower, lhs, est.certified_lower, _fmt(f, exps))


def _degenerate(rng, which):
    f = random_simple_function(rng, rng.choice((1, 2)), positive=True)
    q, p = sorted(rng.sample(EXPONENTS, 2))
    exps = Exponents(q, p, q if which == "q" else p)
    est = fofana_norm(f, exps, cfg=LIGHT)
    target = lebesgue_norm(f, exps.alpha)
    return Check(est.exact and close(est.certified_lower, target, 1e-12),
                 est.certified_lower, target, _fmt(f, exps))


@prop("degenerate alpha = q", "fofana", "||f||_{q,p,q} = ||f||_q, attained", weight=0.1)
def _degenerate_q(rng):
    return _degenerate(rng, "q")


@prop("degenerate alpha = p", "fofana", "||f||_{q,p,p} = ||f||_p, attained", weight=0.1)
def _degenerate_p(rng):
    return _degenerate(rng, "p")


@prop("Fofana homogeneity", "fofana", "||c f||_{q,p,alpha} = |c| ||f||_{q,p,alpha}", weight=0.1)
def _fofana_homogeneity(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    c = to_real(Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice((-1, 1)))
    a = fofana_norm(f.scale(c), exps, cfg=LIGHT).certified_lower
    b = abs(c) * fofana_norm(f, exps, cfg=LIGHT).certified_lower
    return Check(close(a, b, 1e-12), a, b, _fmt(f, exps, c))


# hspace -------------------------------------------------------------------

def _decompositions(rng, f, exps):
    yield trivial_decomposition(f, exps)
    yield scale_optimized_bound(f, exps, cfg=LIGHT)[0]


@prop("reconstruction", "hspace", "synthesize(trivial_decomposition(f)) = f", weight=0.5)
def _reconstruction(rng):
    f, exps = random_simple_function(rng, rng.choice((1, 2))), random_ordered(rng)
    g = synthesize(trivial_decomposition(f, exps))
    ok = [b for _, b in g.terms] == [b for _, b in f.terms] and all(
        close(v, w, 1e-12) for (v, _), (w, _) in zip(g.terms, f.terms))
    return Check(ok, g, f, _fmt(f, exps))


@prop("sandwich order", "hspace", "duality lower bound <= decomposition cost", weight=0.05)
def _sandwich(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    res = hnorm_sandwich(f, exps, cfg=LIGHT)
    return Check(res.lower <= res.upper + 1e-10, res.lower, res.upper, _fmt(f, exps))


@prop("decomposition transport", "hspace",
      "scaling every rho_n by r decomposes St^(a')_r f at the same cost", weight=0.1)
def _transport(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    rho0 = random_rho(rng)
    dec = scale_optimized_bound(f, exps, cfg=LIGHT)[0]
    moved = dec.dilated(rho0)
    g, target = synthesize(moved), dilate(f, rho0, exps.alpha_conj)
    diff = lebesgue_norm(g - target, 1)
    ok = moved.cost == dec.cost and validate(moved).valid and diff <= 1e-12 * lebesgue_norm(target, 1)
    return Check(ok, diff, 0, _fmt(f, exps, rho0))


@prop("trivial bound", "hspace", "upper bound <= ||f||_{q',p'}", weight=0.1)
def _trivial(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    upper = scale_optimized_bound(f, exps, cfg=LIGHT)[1]
    bound = amalgam_norm(f, exps.q_conj, exps.p_conj, 1)
    return Check(upper <= bound + 1e-12, upper, bound, _fmt(f, exps))


@prop("atom bound", "hspace", "every atom of a constructed decomposition has ||f_n||_{q',p'} <= 1",
      weight=0.1)
def _atom_bound(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    reports = [validate(dec) for dec in _decompositions(rng, f, exps)]
    if _FAULTS.get("atom-norm"):
        bad = HDecomposition(exps, ((1, 1, indicator([[0, 1]]).scale(2)),))
        reports.append(validate(bad))
    worst = max(n for r in reports for n in r.atom_norms)
    return Check(all(r.valid for r in reports), worst, 1, _fmt(f, exps))


@prop("duality chain", "hspace", "|<f, g>| <= sum|c_n| max_n ||St^(a)_(1/rho_n) g||_{q,p}",
      weight=0.1)
def _duality(rng):
    f, exps = random_simple_function(rng, 1), random_ordered(rng)
    g = random_simple_function(rng, 1)
    reports = [pairing_bound_check(dec, g) for dec in _decompositions(rng, f, exps)]
    ok = all(r.ok for r in reports)
    return Check(ok, [r.total_lhs for r in reports], [r.total_rhs for r in reports], _fmt(f, g, exps))


@prop("Morrey atom conversion", "hspace",
      "ball atoms become decomposition atoms with ||2^-d C^-1 u||_{q',1} <= 1", weight=0.5)
def _zorko(rng):
    exps = Exponents(2, INF, 4)
    center = Fraction(rng.randint(-8, 8), 4)
    radius = Fraction(rng.randint(1, 8), 4)
    cut = sorted({center - radius, center + radius,
                  *(center - radius + Fraction(rng.randint(1, 15), 8) * radius for _ in range(2))})
    cut = [c for c in cut if center - radius <= c <= center + radius]
    a = disjointify([(to_real(rng.randint(-4, 4) or 1), Box((lo,), (hi,)))
                     for lo, hi in zip(cut, cut[1:])], 1)
    bound = (2 * to_real(radius)) ** (to_real(Fraction(1, 4) - Fraction(1, 2)))
    a = a.scale(bound / lebesgue_norm(a, 2) * to_real(rng.uniform(0.3, 1.0)))
    dec = zorko_to_h([(1, a, center, radius)], exps, tol=1e-9)
    norm = dec.atom_norms()[0]
    return Check(norm <= 1 + 1e-12, norm, 1, _fmt(a, center, radius))


# approx -------------------------------------------------------------------

def _random_step_1d(rng):
    return random_simple_function(rng, 1, denominator=rng.choice((2, 4)), span=2)


@prop("L1-module bound", "approx", "||f * phi||_{q',p'} <= ||f||_{q',p'} ||phi||_1", weight=0.1)
def _module(rng):
    f, exps = _random_step_1d(rng), random_ordered(rng)
    h = 1 / 256
    phi = mollifier(rng.choice(("box", "triangle")), rng.choice((0.05, 0.2, 0.7)), h)
    F = sample(f, h)
    conv = convolve(F, phi)
    lhs = approx_amalgam_norm(conv, exps.q_conj, exps.p_conj, 1.0)
    rhs = approx_amalgam_norm(F, exps.q_conj, exps.p_conj, 1.0) * phi.l1()
    tol = quadrature_tolerance(conv, exps.q_conj, exps.p_conj, 1.0)
    return Check(lhs <= rhs + 5 * tol, lhs, rhs + 5 * tol, _fmt(f, exps))


@prop("transported atoms", "approx",
      "atoms f_n * St^(1)_(1/rho_n) phi / ||phi||_1 keep ||.||_{q',p'} <= 1", weight=0.1)
def _transported(rng):
    f, exps = _random_step_1d(rng), random_ordered(rng)
    dec = scale_optimized_bound(f, exps, cfg=LIGHT)[0]
    _, _, _, norms, tols = transported_atoms(dec, "box", rng.choice((0.1, 0.3)), 1 / 256)
    ok = all(n <= 1 + 5 * t for n, t in zip(norms, tols))
    return Check(ok, norms, [1 + 5 * t for t in tols], _fmt(f, exps))


@prop("mollifier convergence", "approx", "||f * phi_eps - f||_{q',p'} decreases along dyadic eps",
      weight=0.1)
def _convergence(rng):
    a = Fraction(rng.randint(-4, 4), 2)
    length = Fraction(rng.randint(1, 4), 2)
    f = indicator([[a, a + length]])
    q = rng.choice((Fraction(3, 2), Fraction(2), Fraction(3)))
    exps = Exponents(q, 2 * q, q)
    eps = [float(length) / 2 ** k for k in range(1, 5)]
    errs = [e for _, e in mollifier_convergence(f, exps, eps, 1e-3, rng.choice(("box", "triangle")))]
    return Check(all(x > y for x, y in zip(errs, errs[1:])), errs, None, _fmt(f, exps))


# --------------------------------------------------------------------------
# runner
# --------------------------------------------------------------------------

_FAULTS: dict[str, bool] = {}


@dataclass
class PropertyResult:
    name: str
    suite: str
    statement: str
    run: int
    passed: int
    failures: list[dict] = field(default_factory=list)


@dataclass
class VerifyReport:
    suite: str
    seed: int
    cases_run: int
    results: list[PropertyResult]
    wall_time: float

    @property
    def failures(self) -> list[dict]:
        return [f for r in self.results for f in r.failures]

    @property
    def ok(self) -> bool:
        return not self.failures


def _run_property(args) -> PropertyResult:
    p, seed, n, faults = args
    _FAULTS.clear()
    _FAULTS.update(faults)
    res = PropertyResult(p.name, p.suite, p.statement, 0, 0)
    for i in range(n):
        rng = random.Random(f"{seed}:{p.name}:{i}")
        try:
            chk = p.fn(rng)
        except Exception as exc:  # a crash is a failed case, not a harness error
            chk = Check(False, repr(exc), None, "")
        res.run += 1
        if chk.ok:
            res.passed += 1
        else:
            res.failures.append({"property": p.name, "seed": seed, "case": i,
                                 "inputs": chk.inputs, "lhs": str(chk.lhs), "rhs": str(chk.rhs)})
    return res


def worker_count() -> int:
    raw = os.environ.get("FOFANA_THREADS", "0").strip() or "0"
    n = int(raw)
    if n <= 0:
        return os.cpu_count() or 1
    return n


def select(suite: str) -> list[Property]:
    if suite == "all":
        return list(PROPERTIES)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return [p for p in PROPERTIES if p.suite == suite]


def run_suite(suite: str = "all", seed: int = 42, cases: int = 200,
              faults: dict[str, bool] | None = None, workers: int | None = None) -> VerifyReport:
    """Run every property of ``suite``; each runs ``max(1, round(cases * weight))`` cases."""
    props = select(suite)
    faults = dict(faults or {})
    jobs = [(p, seed, max(1, round(cases * p.weight)), faults) for p in props]
    workers = worker_count() if workers is None else workers
    start = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_property, jobs))
    else:
        results = [_run_property(j) for j in jobs]
    return VerifyReport(suite, seed, sum(r.run for r in results), results,
                        time.perf_counter() - start)
