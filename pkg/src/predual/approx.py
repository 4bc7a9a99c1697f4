"""Sampled one-dimensional functions for convolution statements.

Convolutions leave the class of step functions, so this layer works in
float64 on a uniform grid of step ``h``.  A :class:`SampledFunction` is read
as the step function equal to ``samples[i]`` on
``[origin + i h, origin + (i+1) h)``; norms of it are computed exactly for
that reading, and the distance to the underlying smooth object is what
:func:`quadrature_tolerance` estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .corefn import INF, Exponents, SimpleFunction, support_extent, to_exponent
from .hspace import HDecomposition

__all__ = [
    "SampledFunction",
    "sample",
    "convolve",
    "mollifier",
    "approx_amalgam_norm",
    "quadrature_tolerance",
    "mollifier_convergence",
    "transported_atoms",
]


@dataclass(frozen=True)
class SampledFunction:
    origin: float
    step: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    @property
    def end(self) -> float:
        return self.origin + self.step * len(self.samples)

    def midpoints(self) -> np.ndarray:
        return self.origin + self.step * (np.arange(len(self.samples)) + 0.5)

    def l1(self) -> float:
        return float(np.abs(self.samples).sum() * self.step)

    def scale(self, c: float) -> "SampledFunction":
        return SampledFunction(self.origin, self.step, c * self.samples)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        return _align_add(self, other, -1.0)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        return _align_add(self, other, 1.0)


def _align_add(a: SampledFunction, b: SampledFunction, sign: float) -> SampledFunction:
    if not math.isclose(a.step, b.step, rel_tol=1e-12):
        raise ValueError("step mismatch")
    h = a.step
    shift = (b.origin - a.origin) / h
    k = round(shift)
    if abs(shift - k) > 1e-6:
        raise ValueError("grids are not aligned")
    start = min(0, k)
    stop = max(len(a.samples), k + len(b.samples))
    out = np.zeros(stop - start)
    out[-start:-start + len(a.samples)] += a.samples
    out[k - start:k - start + len(b.samples)] += sign * b.samples
    return SampledFunction(a.origin + start * h, h, out)


def sample(f: SimpleFunction, h: float, origin: float | None = None) -> SampledFunction:
    """Midpoint samples of a one-dimensional step function on a grid covering
    its support.  ``origin`` fixes the grid phase (defaults to the left end)."""
    if f.dim != 1:
        raise ValueError("sampling is implemented for d = 1 only")
    if not h > 0:
        raise ValueError("step must be positive")
    if f.is_zero():
        return SampledFunction(0.0 if origin is None else origin, h, np.zeros(0))
    ext = support_extent(f)
    lo, hi = float(ext.lo[0]), float(ext.hi[0])
    if origin is None:
        origin = lo
    first = math.floor((lo - origin) / h + 1e-9)
    last = math.ceil((hi - origin) / h - 1e-9)
    start = origin + first * h
    mids = start + h * (np.arange(last - first) + 0.5)
    values = np.zeros(len(mids))
    for v, box in f.terms:
        a, b = float(box.lo[0]), float(box.hi[0])
        values[(mids >= a) & (mids < b)] = float(v)
    return SampledFunction(start, h, values)


def convolve(F: SampledFunction, G: SampledFunction) -> SampledFunction:
    """Riemann approximation ``h * sum_j F_j G_{k-j}`` of ``F * G``.

    Cell centres add, so output cell ``k`` is centred at
    ``F.origin + G.origin + (k + 1) h``.
    """
    if not math.isclose(F.step, G.step, rel_tol=1e-12):
        raise ValueError("step mismatch")
    h = F.step
    if len(F.samples) == 0 or len(G.samples) == 0:
        return SampledFunction(F.origin + G.origin, h, np.zeros(0))
    return SampledFunction(F.origin + G.origin + h / 2, h,
                           h * np.convolve(F.samples, G.samples))


def mollifier(kind: str, eps: float, h: float) -> SampledFunction:
    """``phi_eps = eps**-1 phi(x / eps)`` for ``phi`` the unit box ``chi_[0,1)``
    or the unit-mass triangle on ``[-1, 1]``, renormalised to mass one."""
    if not eps > 0:
        raise ValueError("mollifier width must be positive")
    if kind == "box":
        lo, hi = 0.0, eps
        shape = lambda t: np.where((t >= 0) & (t < 1), 1.0, 0.0)
    elif kind == "triangle":
        lo, hi = -eps, eps
        shape = lambda t: np.clip(1 - np.abs(t), 0.0, None)
    else:
        raise ValueError(f"unknown mollifier {kind!r}")
    n = max(1, round((hi - lo) / h))
    origin = lo
    mids = origin + h * (np.arange(n) + 0.5)
    vals = shape(mids / eps) / eps
    mass = vals.sum() * h
    if mass == 0:
        raise ValueError("mollifier narrower than the sampling step")
    return SampledFunction(origin, h, vals / mass)


def approx_amalgam_norm(F: SampledFunction, q, p, rho: float = 1.0) -> float:
    """``_rho||F||_{q,p}`` for the step-function reading of ``F``.

    Cells are split at lattice points ``k rho``; each fragment goes to its
    lattice cube.
    """
    q, p = to_exponent(q), to_exponent(p)
    if not rho > 0:
        raise ValueError("lattice scale rho must be positive")
    vals = np.abs(F.samples)
    if len(vals) == 0 or not vals.any():
        return 0.0
    h = F.step
    edges = F.origin + h * np.arange(len(vals) + 1)
    k0, k1 = math.floor(edges[0] / rho), math.ceil(edges[-1] / rho)
    lattice = rho * np.arange(k0, k1 + 1)
    cuts = np.union1d(edges, lattice[(lattice > edges[0]) & (lattice < edges[-1])])
    lengths = np.diff(cuts)
    mids = (cuts[:-1] + cuts[1:]) / 2
    keep = lengths > 0
    lengths, mids = lengths[keep], mids[keep]
    cell = np.clip(np.floor((mids - F.origin) / h).astype(int), 0, len(vals) - 1)
    cube = np.floor(mids / rho).astype(int) - k0
    if q == INF:
        local = np.zeros(k1 - k0 + 1)
        np.maximum.at(local, cube, vals[cell])
    else:
        qf = float(q)
        local = np.bincount(cube, weights=vals[cell] ** qf * lengths, minlength=k1 - k0 + 1)
        local = local ** (1 / qf)
    if p == INF:
        return float(local.max())
    pf = float(p)
    return float((local ** pf).sum() ** (1 / pf))


def quadrature_tolerance(F: SampledFunction, q, p, rho: float = 1.0) -> float:
    """Error allowance for a sampled amalgam norm.

    Misplacing one cell of width ``h`` at a jump changes a local L^q norm by
    at most ``max|F| * h**(1/q)``; there is one such cell per cube boundary,
    combined in l^p over the cubes meeting the support.
    """
    q, p = to_exponent(q), to_exponent(p)
    if len(F.samples) == 0:
        return 0.0
    h = F.step
    big = float(np.abs(F.samples).max())
    per_cube = big * (1.0 if q == INF else h ** (1 / float(q)))
    cubes = math.ceil((F.end - F.origin) / rho) + 1
    return per_cube * (1.0 if p == INF else cubes ** (1 / float(p)))


def mollifier_convergence(f: SimpleFunction, exps: Exponents, eps_list: Sequence[float],
                          h: float, kind: str = "box") -> list[tuple[float, float]]:
    """``(eps, ||f * phi_eps - f||_{q',p'})`` for each ``eps``."""
    if f.dim != 1:
        raise ValueError("mollification is implemented for d = 1 only")
    if not exps.q > 1:
        raise ValueError("mollifier convergence needs q > 1")
    F = sample(f, h)
    rows = []
    for eps in eps_list:
        phi = mollifier(kind, float(eps), h)
        conv = convolve(F, phi)
        diff = conv - sample(f, h, origin=conv.origin)
        rows.append((eps, approx_amalgam_norm(diff, exps.q_conj, exps.p_conj, 1.0)))
    return rows


def transported_atoms(dec: HDecomposition, kind: str, eps: float, h: float):
    """Atoms of the decomposition of ``f * phi_eps`` obtained by moving the
    mollifier inside each dilation:
    ``(St_rho f_n) * phi = St_rho[f_n * St^(1)_{1/rho} phi]``.

    Returns ``(coefficients, scales, atoms, atom_norms, tolerances)`` with
    atoms ``f_n * phi_{eps/rho_n} / ||phi||_1`` in sampled form.
    """
    exps = dec.exps
    coefs, scales, atoms, norms, tols = [], [], [], [], []
    for c, rho, atom in dec.terms:
        phi = mollifier(kind, eps / float(rho), h)
        mass = phi.l1()
        A = convolve(sample(atom, h), phi).scale(1 / mass)
        coefs.append(float(c) * mass)
        scales.append(rho)
        atoms.append(A)
        norms.append(approx_amalgam_norm(A, exps.q_conj, exps.p_conj, 1.0))
        tols.append(quadrature_tolerance(A, exps.q_conj, exps.p_conj, 1.0))
    return coefs, scales, atoms, norms, tols
