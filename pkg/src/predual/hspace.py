"""Atomic decompositions ``f = sum_n c_n St^(alpha')_{rho_n} f_n`` with
``||f_n||_{q',p'} <= 1``, and two-sided estimates of the norm
``||f||_H = inf sum_n |c_n|``.

Upper bounds come from explicit finite decompositions, lower bounds from the
duality ``|<f, g>| <= ||f||_H * ||g||_{q,p,alpha}``.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mpf

from .corefn import (
    INF,
    Box,
    Exponents,
    SimpleFunction,
    dilate,
    disjointify,
    indicator,
    linear_combine,
    pairing,
    rational_power,
    reciprocal,
    support_extent,
    to_fraction,
    to_real,
)
from .fofana import GridConfig, ScaleGrid, auto_grid, fofana_norm
from .norms import NormEstimate, amalgam_norm, lebesgue_norm

__all__ = [
    "ATOM_TOL",
    "HDecomposition",
    "ValidationReport",
    "SandwichResult",
    "DualBound",
    "validate",
    "synthesize",
    "trivial_decomposition",
    "scale_optimized_bound",
    "dual_lower_bound",
    "witness_family",
    "hnorm_sandwich",
    "pairing_bound_check",
    "zorko_to_h",
    "transport",
]

ATOM_TOL = 1e-12
PARTITIONS = ("identity", "dyadic", "level")


@dataclass(frozen=True)
class HDecomposition:
    """Finite list of terms ``(c, rho, atom)``."""

    exps: Exponents
    terms: tuple[tuple[mpf, Fraction, SimpleFunction], ...] = ()

    def __post_init__(self):
        terms = tuple((to_real(c), to_fraction(r), a) for c, r, a in self.terms)
        object.__setattr__(self, "terms", terms)

    @property
    def cost(self) -> mpf:
        """``sum_n |c_n|``."""
        return mpmath.fsum(abs(c) for c, _, _ in self.terms)

    def atom_norms(self) -> list[mpf]:
        return [amalgam_norm(a, self.exps.q_conj, self.exps.p_conj, 1) for _, _, a in self.terms]

    def dilated(self, rho0) -> "HDecomposition":
        """Decomposition of ``St^(alpha')_{rho0} f``: every scale times ``rho0``."""
        rho0 = to_fraction(rho0)
        return HDecomposition(self.exps, tuple((c, rho0 * r, a) for c, r, a in self.terms))


@dataclass
class ValidationReport:
    valid: bool
    total: mpf
    atom_norms: list[mpf]
    failures: list[str] = field(default_factory=list)


def validate(dec: HDecomposition, tol: float = ATOM_TOL) -> ValidationReport:
    """Check ``rho_n > 0`` and ``||f_n||_{q',p'} <= 1`` for every term."""
    failures = []
    norms = dec.atom_norms()
    for n, ((c, rho, atom), nrm) in enumerate(zip(dec.terms, norms)):
        if rho <= 0:
            failures.append(f"term {n}: scale {rho} is not positive")
        if nrm > 1 + tol:
            failures.append(f"term {n}: atom norm {mpmath.nstr(nrm, 12)} exceeds 1")
    return ValidationReport(not failures, dec.cost, norms, failures)


def synthesize(dec: HDecomposition, dim: int | None = None) -> SimpleFunction:
    """``sum c_n St^(alpha')_{rho_n} f_n``; an empty decomposition needs ``dim``."""
    if not dec.terms:
        if dim is None:
            raise ValueError("cannot infer the dimension of an empty decomposition")
        return SimpleFunction.zero(dim)
    beta = dec.exps.alpha_conj
    return linear_combine((c, dilate(a, rho, beta)) for c, rho, a in dec.terms)


def trivial_decomposition(f: SimpleFunction, exps: Exponents) -> HDecomposition:
    """Single term ``(||f||_{q',p'}, 1, f / ||f||_{q',p'})``."""
    if f.is_zero():
        raise ValueError("zero function has the empty decomposition")
    c = amalgam_norm(f, exps.q_conj, exps.p_conj, 1)
    return HDecomposition(exps, ((c, Fraction(1), f.scale(1 / c)),))


# --------------------------------------------------------------------------
# upper bounds
# --------------------------------------------------------------------------

def _partition(f: SimpleFunction, strategy: str) -> list[SimpleFunction]:
    if strategy == "identity":
        return [f]
    if strategy == "level":
        by_value: dict[mpf, list] = {}
        for v, b in f.terms:
            by_value.setdefault(v, []).append((v, b))
        return [SimpleFunction(f.dim, tuple(ts)) for _, ts in sorted(by_value.items())]
    if strategy == "dyadic":
        ext = support_extent(f)
        side = Fraction(2) ** (math.ceil(math.log2(max(ext.sides))) - 1)
        ranges = [range(math.floor(a / side), math.ceil(b / side)) for a, b in zip(ext.lo, ext.hi)]
        pieces = []
        for k in itertools.product(*ranges):
            piece = f.restrict(Box.cube([ki * side for ki in k], side))
            if not piece.is_zero():
                pieces.append(piece)
        return pieces
    raise ValueError(f"unknown partition strategy {strategy!r}")


def _best_scale(h: SimpleFunction, exps: Exponents, grid: ScaleGrid) -> tuple[mpf, Fraction]:
    """Minimise ``||St^(alpha')_{1/rho} h||_{q',p'} = rho**w * _rho||h||_{q',p'}``."""
    w = h.dim * (reciprocal(exps.alpha_conj) - reciprocal(exps.q_conj))
    best = None
    for rho in grid.points():
        val = rational_power(rho, w) * amalgam_norm(h, exps.q_conj, exps.p_conj, rho)
        if best is None or val < best[0]:
            best = (val, rho)
    return best


def scale_optimized_bound(f: SimpleFunction, exps: Exponents, grid: ScaleGrid | None = None,
                          strategies: Sequence[str] = PARTITIONS,
                          cfg: GridConfig = GridConfig()) -> tuple[HDecomposition, mpf]:
    """Cheapest decomposition found over partition strategies and scales.

    Each piece ``h`` of a partition becomes one term: the scale ``rho*`` that
    minimises the atom norm of ``St^(alpha')_{1/rho} h`` on the grid, with
    ``c`` that minimum.  The identity strategy at ``rho = 1`` reproduces the
    trivial decomposition, so the result never exceeds it.
    """
    exps.require_ordered()
    if f.is_zero():
        raise ValueError("zero function has the empty decomposition")
    if grid is None:
        grid = auto_grid(f, exps, cfg)
    beta = exps.alpha_conj
    best = None
    for strategy in strategies:
        terms = []
        for h in _partition(f, strategy):
            c, rho = _best_scale(h, exps, grid)
            terms.append((c, rho, dilate(h, 1 / rho, beta).scale(1 / c)))
        dec = HDecomposition(exps, tuple(terms))
        if best is None or dec.cost < best.cost:
            best = dec
    return best, best.cost


# --------------------------------------------------------------------------
# lower bounds
# --------------------------------------------------------------------------

@dataclass
class DualBound:
    """``max_g |<f, g>| / ||g||_{q,p,alpha}`` over a witness family.

    ``lower`` divides by the Fofana estimate of each witness, which is itself
    a lower bound, so it is only guaranteed when ``certified`` is set.
    ``certified_value`` is the maximum over witnesses with an exact norm.
    """

    lower: mpf
    witness: SimpleFunction | None
    certified: bool
    certified_value: mpf
    witness_norm: NormEstimate | None = None


def dual_lower_bound(f: SimpleFunction, exps: Exponents, witnesses: Iterable[SimpleFunction],
                     grid: ScaleGrid | None = None, cfg: GridConfig = GridConfig()) -> DualBound:
    exps.require_ordered()
    best = DualBound(mpf(0), None, False, mpf(0))
    for g in witnesses:
        if g.is_zero():
            raise ValueError("witnesses must be nonzero")
        pair = abs(pairing(f, g))
        if pair == 0:
            continue
        est = fofana_norm(g, exps, grid, cfg=cfg)
        _offer(best, pair / est.certified_lower, g, est)
    return best


def _offer(best: DualBound, quotient: mpf, g, est: NormEstimate) -> None:
    if quotient > best.lower or (quotient == best.lower and est.exact and not best.certified):
        best.lower, best.witness, best.certified, best.witness_norm = quotient, g, est.exact, est
    if est.exact and quotient > best.certified_value:
        best.certified_value = quotient


def witness_family(f: SimpleFunction, exps: Exponents, seed: int = 0,
                   n_random: int = 2, max_boxes: int = 6) -> list[SimpleFunction]:
    """Deterministic witnesses: ``f``, ``sign(f)|f|**(q-1)``, the support box,
    single boxes of ``f`` and seeded random sign patterns on its boxes."""
    out = [f]
    if exps.q != INF and exps.q != 1:
        out.append(f.map_values(lambda v: mpmath.sign(v) * abs(v) ** to_real(exps.q - 1)))
    out.append(f.map_values(mpmath.sign))
    out.append(indicator(support_extent(f)))
    largest = sorted(f.terms, key=lambda t: (-t[1].volume, t[1].lo))[:max_boxes]
    out.extend(indicator(b) for _, b in largest)
    rng = random.Random(seed)
    for _ in range(n_random):
        g = disjointify([(rng.choice((-1, 1)) * mpmath.sign(v), b) for v, b in f.terms], f.dim)
        if not g.is_zero():
            out.append(g)
    unique, seen = [], set()
    for g in out:
        if g.terms and g not in seen:
            seen.add(g)
            unique.append(g)
    return unique


@dataclass
class SandwichResult:
    lower: mpf
    upper: mpf
    best_decomposition: HDecomposition
    best_witness: SimpleFunction | None
    certified_lower: bool
    certified_value: mpf


def hnorm_sandwich(f: SimpleFunction, exps: Exponents, cfg: GridConfig = GridConfig(),
                   strategies: Sequence[str] = PARTITIONS, seed: int = 0,
                   dilation_count: int = 6) -> SandwichResult:
    """Bracket ``||f||_H`` between a duality lower bound and a decomposition cost.

    Dilates ``St^(alpha)_rho g`` of every witness reuse the estimate of ``g``
    on the matching scaled grid, which equals it by dilation invariance.
    """
    exps.require_ordered()
    if f.is_zero():
        raise ValueError("sandwich needs a nonzero function")
    grid = auto_grid(f, exps, cfg)
    trivial = trivial_decomposition(f, exps)
    optimized, cost = scale_optimized_bound(f, exps, grid, strategies, cfg)
    dec = optimized if cost <= trivial.cost else trivial

    pts = grid.points()
    step = max(1, len(pts) // dilation_count)
    scales = sorted({Fraction(1), *pts[::step]})
    best = DualBound(mpf(0), None, False, mpf(0))
    for g in witness_family(f, exps, seed):
        est = fofana_norm(g, exps, cfg=cfg)
        if est.certified_lower == 0:
            continue
        for rho in scales:
            gd = dilate(g, rho, exps.alpha) if rho != 1 else g
            pair = abs(pairing(f, gd))
            if pair:
                _offer(best, pair / est.certified_lower, gd, est)
    return SandwichResult(best.lower, dec.cost, dec, best.witness, best.certified,
                          best.certified_value)


@dataclass
class PairingReport:
    ok: bool
    terms: list[dict]
    total_lhs: mpf
    total_rhs: mpf
    failures: list[str] = field(default_factory=list)


def _leq(a, b, tol):
    return a <= b * (1 + tol) + tol


def pairing_bound_check(dec: HDecomposition, g: SimpleFunction, tol: float = 1e-12) -> PairingReport:
    """Check, term by term, the chain
    ``|<St^(alpha')_rho f_n, g>| = |<f_n, St^(alpha)_{1/rho} g>|
    <= ||f_n||_{q',p'} * ||St^(alpha)_{1/rho} g||_{q,p}``
    and the total ``|<f, g>| <= sum|c_n| * max_n ||St^(alpha)_{1/rho_n} g||_{q,p}``."""
    exps = dec.exps
    rows, failures = [], []
    sup_g = mpf(0)
    for n, (c, rho, atom) in enumerate(dec.terms):
        left = pairing(dilate(atom, rho, exps.alpha_conj), g)
        g_back = dilate(g, 1 / rho, exps.alpha)
        moved = pairing(atom, g_back)
        g_norm = amalgam_norm(g_back, exps.q, exps.p, 1)
        atom_norm = amalgam_norm(atom, exps.q_conj, exps.p_conj, 1)
        rhs = atom_norm * g_norm
        sup_g = max(sup_g, g_norm)
        rows.append({"lhs": abs(left), "adjoint": abs(moved), "rhs": rhs})
        if abs(left - moved) > tol * max(1, abs(left)):
            failures.append(f"term {n}: adjoint identity {left} != {moved}")
        if not _leq(abs(left), rhs, tol):
            failures.append(f"term {n}: Hölder step {abs(left)} > {rhs}")
    if dec.terms:
        total_lhs = abs(pairing(synthesize(dec), g))
    else:
        total_lhs = mpf(0)
    total_rhs = dec.cost * sup_g
    if not _leq(total_lhs, total_rhs, tol):
        failures.append(f"total: {total_lhs} > {total_rhs}")
    return PairingReport(not failures, rows, total_lhs, total_rhs, failures)


# --------------------------------------------------------------------------
# Morrey-type atoms
# --------------------------------------------------------------------------

def unit_ball_volume(d: int) -> mpf:
    return mpmath.pi ** (mpf(d) / 2) / mpmath.gamma(mpf(d) / 2 + 1)


def _inside_ball(box: Box, center: Sequence[Fraction], r: Fraction) -> bool:
    """Closed-ball containment of the box, checked exactly on its far corner."""
    far = sum(max(abs(l - c), abs(h - c)) ** 2 for l, h, c in zip(box.lo, box.hi, center))
    return far <= r * r


def zorko_to_h(atoms: Sequence[tuple], exps: Exponents, tol: float = 1e-12) -> HDecomposition:
    """Rewrite ``sum_k c_k a_k`` over ball-supported atoms as a decomposition.

    Each atom ``a`` lives in a ball ``B(x, r)`` with
    ``||a||_{q'} <= |B|**(1/alpha - 1/q)``.  With ``u = St^(alpha')_{1/r} a``
    and ``C = |B(0,1)|**(1/alpha - 1/q)`` the term becomes
    ``(2**d C c, r, 2**-d C**-1 u)``.  Atom norms of the result are not
    asserted here; run :func:`validate` on it.
    """
    if exps.p != INF:
        raise ValueError("Morrey atoms need p = inf")
    if not exps.q < exps.alpha:
        raise ValueError("Morrey atoms need q < alpha")
    expo = reciprocal(exps.alpha) - reciprocal(exps.q)
    terms = []
    for c, a, center, radius in atoms:
        radius = to_fraction(radius)
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        if a.is_zero():
            continue
        d = a.dim
        if isinstance(center, (int, float, str, Fraction)):
            center = (center,)
        center = tuple(to_fraction(x) for x in center)
        if not all(_inside_ball(b, center, radius) for _, b in a.terms):
            raise ValueError(f"atom support leaves the ball B({center}, {radius})")
        ball = unit_ball_volume(d) * to_real(radius) ** d
        bound = ball ** to_real(expo)
        norm = lebesgue_norm(a, exps.q_conj)
        if norm > bound * (1 + tol):
            raise ValueError(f"atom norm {mpmath.nstr(norm, 12)} exceeds the Morrey bound "
                             f"{mpmath.nstr(bound, 12)}")
        C = unit_ball_volume(d) ** to_real(expo)
        u = dilate(a, 1 / radius, exps.alpha_conj)
        terms.append((2 ** d * C * to_real(c), radius, u.scale(1 / (2 ** d * C))))
    return HDecomposition(exps, tuple(terms))


def transport(dec: HDecomposition, rho0) -> HDecomposition:
    """Same terms with every scale multiplied by ``rho0``; a decomposition of
    ``St^(alpha')_{rho0} f`` with identical cost."""
    return dec.dilated(rho0)
