"""Fofana norm ``sup_rho rho**(d(1/alpha - 1/q)) * _rho||f||_{q,p}`` by scale search.

The supremum over a continuum of scales is reported as the best evaluated
value (a lower bound).  Grids are built from rational multipliers of
``rho_min`` so that scaling a grid by ``rho0`` maps evaluation points exactly
onto the points used for ``St^(alpha)_{rho0} f``; the two estimates then agree
to working precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from mpmath import mpf

from .corefn import (
    INF,
    Exponents,
    SimpleFunction,
    reciprocal,
    rational_power,
    support_extent,
    to_fraction,
)
from .norms import NormEstimate, amalgam_norm, golden_section_max

__all__ = [
    "GridConfig",
    "ScaleGrid",
    "PhiPoint",
    "auto_grid",
    "phi",
    "phi_curve",
    "fofana_norm",
]

_MULT_DENOM = 10 ** 9


@dataclass(frozen=True)
class GridConfig:
    points_per_decade: int = 64
    refine_iters: int = 40
    harmonic_limit: int = 4
    refine_top: int = 8


@lru_cache(maxsize=None)
def _multiplier(ratio: Fraction, t: float) -> Fraction:
    """Rational approximation of ``ratio**t``; depends only on (ratio, t)."""
    if t == 0:
        return Fraction(1)
    if t == 1:
        return ratio
    return Fraction(float(ratio) ** t).limit_denominator(_MULT_DENOM)


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric grid ``rho_min * 10**(i/points_per_decade)`` up to ``rho_max``,
    plus ``mandatory_points`` that are always evaluated."""

    rho_min: Fraction
    rho_max: Fraction
    points_per_decade: int = 64
    mandatory_points: tuple[Fraction, ...] = ()

    def __post_init__(self):
        lo, hi = to_fraction(self.rho_min), to_fraction(self.rho_max)
        if not 0 < lo < hi:
            raise ValueError(f"need 0 < rho_min < rho_max, got {lo}, {hi}")
        if self.points_per_decade < 4:
            raise ValueError("points_per_decade must be at least 4")
        mand = tuple(sorted({to_fraction(r) for r in self.mandatory_points}))
        if any(r <= 0 for r in mand):
            raise ValueError("mandatory scales must be positive")
        object.__setattr__(self, "rho_min", lo)
        object.__setattr__(self, "rho_max", hi)
        object.__setattr__(self, "mandatory_points", mand)

    def points(self) -> list[Fraction]:
        n = math.floor(self.points_per_decade * math.log10(self.rho_max / self.rho_min))
        pts = {self.rho_min, self.rho_max, *self.mandatory_points}
        for i in range(1, n + 1):
            r = self.rho_min * _multiplier(Fraction(10), i / self.points_per_decade)
            if r < self.rho_max:
                pts.add(r)
        return sorted(pts)

    def scaled(self, rho0) -> "ScaleGrid":
        rho0 = to_fraction(rho0)
        return ScaleGrid(self.rho_min * rho0, self.rho_max * rho0, self.points_per_decade,
                         tuple(r * rho0 for r in self.mandatory_points))


@dataclass(frozen=True)
class PhiPoint:
    rho: Fraction
    amalgam: mpf
    phi: mpf


def _weight_exponent(d: int, exps: Exponents) -> Fraction:
    return d * (reciprocal(exps.alpha) - reciprocal(exps.q))


def phi(f: SimpleFunction, exps: Exponents, rho) -> PhiPoint:
    rho = to_fraction(rho)
    a = amalgam_norm(f, exps.q, exps.p, rho)
    return PhiPoint(rho, a, rational_power(rho, _weight_exponent(f.dim, exps)) * a)


def auto_grid(f: SimpleFunction, exps: Exponents | None = None,
              cfg: GridConfig = GridConfig()) -> ScaleGrid:
    """Grid spanning ``[h/4, 4M]`` with the scales where the supremum is known
    to be attained in the degenerate cases added as mandatory points.

    ``h`` is the smallest box edge and ``M`` the largest of the support's side
    lengths and endpoint magnitudes.  Mandatory points: ``1``, ``ceil`` of the
    largest side, the largest endpoint (every lattice cube of that side holds
    a positive-orthant support entirely), and ``1/(nD)`` for the common
    denominator ``D`` of the endpoints.
    """
    if f.is_zero():
        raise ValueError("empty support")
    ext = support_extent(f)
    h = min(s for _, b in f.terms for s in b.sides)
    extent = max(ext.sides)
    reach = max(max(abs(x) for x in ext.lo), max(abs(x) for x in ext.hi))
    big = max(extent, reach)
    D = f.common_denominator
    mandatory = {Fraction(1), Fraction(math.ceil(extent)), Fraction(math.ceil(big))}
    if reach > 0:
        mandatory.add(max(ext.hi))
    mandatory.update(Fraction(1, n * D) for n in range(1, cfg.harmonic_limit + 1))
    if len(f.terms) == 1:
        mandatory.update(f.terms[0][1].sides)
    mandatory = {r for r in mandatory if r > 0}
    return ScaleGrid(h / 4, 4 * big, cfg.points_per_decade, tuple(sorted(mandatory)))


def phi_curve(f: SimpleFunction, exps: Exponents, grid: ScaleGrid | Iterable) -> list[PhiPoint]:
    points = grid.points() if isinstance(grid, ScaleGrid) else sorted(map(to_fraction, grid))
    if f.is_zero():
        return [PhiPoint(r, mpf(0), mpf(0)) for r in points]
    return [phi(f, exps, r) for r in points]


def _local_maxima(curve: Sequence[PhiPoint]) -> list[int]:
    idx = []
    for i in range(1, len(curve) - 1):
        left, mid, right = curve[i - 1].phi, curve[i].phi, curve[i + 1].phi
        if mid >= left and mid >= right and (mid > left or mid > right):
            idx.append(i)
    return idx


def _attained(f: SimpleFunction, exps: Exponents, evaluated: Iterable[Fraction]) -> bool:
    """True when the supremum is provably attained at one of ``evaluated``."""
    evaluated = list(evaluated)
    ext = support_extent(f)
    if exps.alpha == exps.q and all(x >= 0 for x in ext.lo):
        # Phi(rho) <= ||f||_q, with equality once [0, rho)^d holds the support
        if any(r >= max(ext.hi) for r in evaluated):
            return True
    if exps.alpha == exps.p:
        # Phi(rho) <= ||f||_p, with equality when f is constant on every cube
        endpoints = [x for axis in f.breakpoints for x in axis]
        if any(all((x / r).denominator == 1 for x in endpoints) for r in evaluated):
            return True
    if len(f.terms) == 1:
        box = f.terms[0][1]
        s = box.sides[0]
        # any cube of side s has Phi <= |c| s**(d/alpha); lattice-aligned ones attain it
        if all(t == s for t in box.sides) and all((x / s).denominator == 1 for x in box.lo):
            if s in evaluated:
                return True
    return False


def fofana_norm(f: SimpleFunction, exps: Exponents, grid: ScaleGrid | None = None,
                refine_iters: int | None = None, cfg: GridConfig = GridConfig()) -> NormEstimate:
    """Lower bound for ``||f||_{q,p,alpha}``.

    Evaluates ``Phi`` on ``grid`` (default :func:`auto_grid`), then refines
    the largest local maxima by golden-section search in ``log rho`` between
    their grid neighbours.  Ties go to the scale closest to 1 in ``log rho``,
    then to the smaller one.
    """
    exps.require_ordered()
    if f.is_zero():
        return NormEstimate(mpf(0), None, 0, exact=True)
    if grid is None:
        grid = auto_grid(f, exps, cfg)
    iters = cfg.refine_iters if refine_iters is None else refine_iters
    curve = phi_curve(f, exps, grid)
    evaluated = {pt.rho: pt for pt in curve}

    if iters > 0:
        maxima = sorted(_local_maxima(curve), key=lambda i: (-curve[i].phi, curve[i].rho))
        for i in maxima[:cfg.refine_top]:
            a, b = curve[i - 1].rho, curve[i + 1].rho
            ratio = b / a

            def along(t, a=a, ratio=ratio):
                r = a * _multiplier(ratio, t)
                pt = evaluated.get(r)
                if pt is None:
                    pt = evaluated[r] = phi(f, exps, r)
                return pt.phi, pt

            golden_section_max(along, 0.0, 1.0, iters)

    pts = sorted(evaluated.values(), key=lambda pt: pt.rho)
    best = max(pts, key=lambda pt: (pt.phi, -abs(math.log(pt.rho)), -pt.rho))
    return NormEstimate(best.phi, best.rho, len(pts),
                        exact=_attained(f, exps, evaluated), curve=pts)
