"""Lebesgue, weak-Lebesgue, amalgam and Morrey norms of step functions.

Amalgam norms are exact: the lattice of side ``rho`` is intersected with the
refinement grid of ``f`` one axis at a time, and lattice cells that sit
inside a single grid interval are counted rather than enumerated, so the cost
does not grow as ``rho -> 0``.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

import mpmath
from mpmath import mpf

from .corefn import (
    INF,
    Exponents,
    SimpleFunction,
    conjugate,
    multiply,
    real_power,
    rational_power,
    to_exponent,
    to_fraction,
    to_real,
)

__all__ = [
    "NormEstimate",
    "lebesgue_norm",
    "weak_norm",
    "amalgam_norm",
    "cube_norms",
    "morrey_norm",
    "holder_check",
    "golden_section_max",
]

INVPHI = (math.sqrt(5) - 1) / 2


@dataclass
class NormEstimate:
    """Result of a supremum search.

    ``certified_lower`` is the largest value actually evaluated, hence a lower
    bound of the supremum; ``exact`` is set only when an analytic argument
    shows that the supremum is attained on the evaluated set.
    """

    certified_lower: mpf
    best_witness: Any
    evaluated_points: int
    exact: bool = False
    window: str | None = None
    curve: list = field(default_factory=list, repr=False)

    @property
    def value(self) -> mpf:
        return self.certified_lower


def _check_exponent(e, name="q"):
    e = to_exponent(e)
    if e != INF and e < 1:
        raise ValueError(f"exponent {name}={e} must lie in [1, inf]")
    return e


def lebesgue_norm(f: SimpleFunction, q) -> mpf:
    q = _check_exponent(q)
    if f.is_zero():
        return mpf(0)
    if q == INF:
        return f.max_abs()
    total = mpmath.fsum(real_power(abs(v), q) * to_real(b.volume) for v, b in f.terms)
    return real_power(total, 1 / q)


def weak_norm(f: SimpleFunction, alpha) -> mpf:
    """``sup_t t * |{|f| > t}|**(1/alpha)``, attained at the values of ``|f|``.

    The threshold factor ``t`` is included; without it the supremum is
    infinite for every nonzero ``f``.
    """
    alpha = to_exponent(alpha)
    if alpha == INF or alpha < 1:
        raise ValueError(f"weak norm needs 1 <= alpha < inf, got {alpha}")
    measure: dict[mpf, Fraction] = {}
    for v, b in f.terms:
        measure[abs(v)] = measure.get(abs(v), Fraction(0)) + b.volume
    best, level = mpf(0), Fraction(0)
    for v in sorted(measure, reverse=True):
        level += measure[v]
        best = max(best, v * real_power(to_real(level), 1 / alpha))
    return best


# --------------------------------------------------------------------------
# amalgam norms
# --------------------------------------------------------------------------

def _axis_classes(bps: Sequence[Fraction], rho: Fraction) -> list[tuple[int, dict[int, Fraction]]]:
    """Group the lattice cells ``[k rho, (k+1) rho)`` meeting ``[bps[0], bps[-1])``.

    Returns ``(count, {interval index j: overlap length})`` pairs; cells lying
    inside one interval ``[bps[j], bps[j+1])`` share a class.
    """
    classes = []
    mixed = set()
    for x in bps:
        k, r = divmod(x, rho)
        if r != 0:
            mixed.add(int(k))
    for j in range(len(bps) - 1):
        a, b = bps[j], bps[j + 1]
        first = -((-a) // rho)           # ceil(a / rho)
        last = b // rho                  # cells k with (k+1) rho <= b
        n = int(last - first)
        if n > 0:
            classes.append((n, {j: rho}))
    for k in sorted(mixed):
        lo, hi = k * rho, (k + 1) * rho
        j0 = max(bisect.bisect_right(bps, lo) - 1, 0)
        overlap = {}
        for j in range(j0, len(bps) - 1):
            a, b = bps[j], bps[j + 1]
            if a >= hi:
                break
            length = min(b, hi) - max(a, lo)
            if length > 0:
                overlap[j] = length
        if overlap:
            classes.append((1, overlap))
    return classes


def cube_norms(f: SimpleFunction, q, rho=1) -> Iterator[tuple[int, mpf]]:
    """Yield ``(multiplicity, ||f chi_{I^rho_k}||_q)`` over nonzero lattice cubes."""
    q = _check_exponent(q)
    rho = to_fraction(rho)
    if rho <= 0:
        raise ValueError("lattice scale rho must be positive")
    if f.is_zero():
        return
    cells = f.cell_values
    if q == INF:
        weights = {idx: abs(v) for idx, v in cells.items()}
    else:
        weights = {idx: real_power(abs(v), q) for idx, v in cells.items()}
    per_axis = [_axis_classes(bps, rho) for bps in f.breakpoints]
    for combo in itertools.product(*per_axis):
        count = math.prod(c for c, _ in combo)
        if q == INF:
            norm = mpf(0)
            for idx in itertools.product(*(o.keys() for _, o in combo)):
                w = weights.get(idx)
                if w is not None and w > norm:
                    norm = w
        else:
            mass = mpf(0)
            for items in itertools.product(*(o.items() for _, o in combo)):
                w = weights.get(tuple(j for j, _ in items))
                if w is not None:
                    mass += w * to_real(math.prod((ln for _, ln in items), start=Fraction(1)))
            norm = real_power(mass, 1 / q) if mass else mpf(0)
        if norm:
            yield count, norm


def amalgam_norm(f: SimpleFunction, q, p, rho=1) -> mpf:
    """``_rho||f||_{q,p}``: the l^p norm of the local L^q norms on the lattice
    of cubes ``prod_j [k_j rho, (k_j + 1) rho)``."""
    p = _check_exponent(p, "p")
    norms = list(cube_norms(f, q, rho))
    if not norms:
        return mpf(0)
    if p == INF:
        return max(n for _, n in norms)
    total = mpmath.fsum(c * real_power(n, p) for c, n in norms)
    return real_power(total, 1 / p)


def holder_check(f: SimpleFunction, g: SimpleFunction, exps: Exponents, rho=1) -> tuple[mpf, mpf]:
    """Both sides of ``||fg||_1 <= _rho||f||_{q,p} * _rho||g||_{q',p'}``."""
    lhs = lebesgue_norm(multiply(f, g), 1)
    rhs = amalgam_norm(f, exps.q, exps.p, rho) * amalgam_norm(g, exps.q_conj, exps.p_conj, rho)
    return lhs, rhs


# --------------------------------------------------------------------------
# Morrey norms
# --------------------------------------------------------------------------

def golden_section_max(fun, a: float, b: float, iters: int) -> tuple[float, Any]:
    """Golden-section search for a maximum of ``fun`` on ``[a, b]``.

    ``fun`` returns ``(value, payload)``; the best evaluated pair is returned,
    so the result is a valid lower bound whether or not ``fun`` is unimodal.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    best = max(fc, fd, key=lambda t: t[0])
    for _ in range(iters):
        if fc[0] >= fd[0]:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fun(c)
            cand = fc
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fun(d)
            cand = fd
        if cand[0] > best[0]:
            best = cand
    return best


def _window_mass(weights, center: Sequence[Fraction], r: Fraction) -> mpf:
    lo = [c - r for c in center]
    hi = [c + r for c in center]
    return mpmath.fsum(w * to_real(b.overlap_volume(lo, hi)) for w, b in weights)


def _snap(x: float) -> Fraction:
    return Fraction(x).limit_denominator(1 << 40)


def morrey_norm(f: SimpleFunction, q, lam, window: str = "ball",
                refine_iters: int = 30, refine_top: int = 4) -> NormEstimate:
    """Lower bound for ``sup_{x, r} r**((lam - d)/q) * ||f chi_{W(x, r)}||_q``.

    ``window="ball"`` uses intervals ``(x - r, x + r)`` and needs ``d = 1``;
    ``window="cube"`` uses cubes of side ``2r`` in any dimension.
    Candidates come from pairs of box endpoints, followed by coordinate-wise
    golden-section refinement of the best ones.
    """
    q = _check_exponent(q)
    if q == INF:
        raise ValueError("Morrey norm needs finite q")
    lam = to_fraction(lam)
    d = f.dim
    if not 0 < lam < d:
        raise ValueError(f"Morrey parameter lambda must lie in (0, {d}), got {lam}")
    if window not in ("ball", "cube"):
        raise ValueError(f"unknown window {window!r}")
    if window == "ball" and d != 1:
        raise ValueError("ball windows are only exact in d = 1; use window='cube'")
    if f.is_zero():
        return NormEstimate(mpf(0), None, 0, exact=True, window=window)

    weights = [(real_power(abs(v), q), b) for v, b in f.terms]
    expo = (lam - d) / q
    inv_q = 1 / q
    count = 0

    def objective(center, r):
        nonlocal count
        count += 1
        mass = _window_mass(weights, center, r)
        if not mass:
            return mpf(0)
        return rational_power(r, expo) * real_power(mass, inv_q)

    bps = f.breakpoints
    radii = sorted({(b - a) / 2 for axis in bps for a, b in itertools.combinations(axis, 2)})
    candidates = {}
    for r in radii:
        centers_axis = []
        for axis in bps:
            cs = {e + s for e in axis for s in (r, -r)}
            cs.update((a + b) / 2 for a, b in itertools.combinations(axis, 2) if b - a <= 2 * r)
            centers_axis.append(sorted(cs))
        for center in itertools.product(*centers_axis):
            val = objective(center, r)
            if val > 0:
                candidates[(center, r)] = val

    ranked = sorted(candidates.items(), key=lambda kv: (-kv[1], kv[0][1], kv[0][0]))
    best_val, best_arg = ranked[0][1], ranked[0][0]

    for (center, r), val in ranked[:refine_top]:
        center = list(center)
        for _ in range(2):
            # radius on a log scale, then each center coordinate
            def along_r(t, center=tuple(center)):
                rr = _snap(math.exp(t))
                return objective(center, rr), (center, rr)
            v, (c_new, r_new) = golden_section_max(
                along_r, math.log(float(r)) - 1.0, math.log(float(r)) + 1.0, refine_iters)
            if v > val:
                val, r = v, r_new
            for j in range(d):
                def along_x(t, j=j, r=r, center=tuple(center)):
                    c = list(center)
                    c[j] = _snap(t)
                    return objective(tuple(c), r), (tuple(c), r)
                v, (c_new, _) = golden_section_max(
                    along_x, float(center[j] - r), float(center[j] + r), refine_iters)
                if v > val:
                    val, center = v, list(c_new)
            if val > best_val:
                best_val, best_arg = val, (tuple(center), r)

    # a single box in d = 1 is maximised by the window equal to the box
    exact = d == 1 and len(f.terms) == 1
    center, r = best_arg
    return NormEstimate(best_val, {"center": center, "radius": r}, count,
                        exact=exact, window=window)
