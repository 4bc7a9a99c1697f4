"""Exact step functions on rational boxes and the dilation group acting on them.

Geometry is exact (``fractions.Fraction``); values are ``mpmath.mpf`` at
:data:`PRECISION_BITS` bits, since dilation factors ``rho**(-d/beta)`` are
irrational in general.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence, Union

import gmpy2
import mpmath
from mpmath import mpf

PRECISION_BITS = 113
if mpmath.mp.prec < PRECISION_BITS:
    mpmath.mp.prec = PRECISION_BITS

INF = math.inf

Real = Union[int, float, str, Fraction, mpf]
Exponent = Union[Fraction, float]  # a Fraction, or math.inf


class DimensionError(ValueError):
    pass


# --------------------------------------------------------------------------
# scalar helpers
# --------------------------------------------------------------------------

def to_fraction(x) -> Fraction:
    """Parse ``x`` (int, Fraction, decimal or "a/b" string, float) exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"not a finite rational: {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, mpf):
        if not mpmath.isfinite(x):
            raise ValueError(f"not a finite rational: {x!r}")
        man, exp = x.man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"cannot interpret {x!r} as a rational")


def to_real(x) -> mpf:
    """Convert to a working-precision real."""
    if isinstance(x, mpf):
        return x
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        return to_real(Fraction(x))
    return mpf(x)


def to_exponent(x) -> Exponent:
    """Parse an extended-real exponent: a rational or ``inf``."""
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return INF
    return to_fraction(x)


def reciprocal(e: Exponent) -> Fraction:
    """1/e with 1/inf = 0."""
    return Fraction(0) if e == INF else 1 / Fraction(e)


def conjugate(e: Exponent) -> Exponent:
    """Hölder conjugate: 1/e + 1/e' = 1, with 1 <-> inf."""
    if e == INF:
        return Fraction(1)
    e = Fraction(e)
    if e == 1:
        return INF
    return e / (e - 1)


def exponent_str(e: Exponent) -> str:
    return "inf" if e == INF else str(e)


def rational_power(x: Fraction, e: Fraction) -> mpf:
    """``x**e`` for rational ``x > 0``, exact whenever the result is rational."""
    x, e = Fraction(x), Fraction(e)
    if x <= 0:
        raise ValueError("rational_power needs a positive base")
    if e == 0 or x == 1:
        return mpf(1)
    if e.denominator == 1:
        return to_real(x ** e.numerator)
    num, den = x.numerator, x.denominator
    rn, ok_n = gmpy2.iroot(num, e.denominator)
    if ok_n:
        rd, ok_d = gmpy2.iroot(den, e.denominator)
        if ok_d:
            return to_real(Fraction(int(rn), int(rd)) ** e.numerator)
    return to_real(x) ** to_real(e)


def real_power(v: mpf, e: Exponent) -> mpf:
    """``v**e`` for real ``v >= 0`` and finite rational ``e``."""
    e = Fraction(e)
    if e.denominator == 1:
        return v ** e.numerator
    if v == 0:
        return mpf(0)
    return v ** to_real(e)


# --------------------------------------------------------------------------
# boxes
# --------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Box:
    """Half-open axis-aligned box ``prod_j [lo_j, hi_j)`` with rational corners."""

    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def __post_init__(self):
        lo = tuple(to_fraction(v) for v in self.lo)
        hi = tuple(to_fraction(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DimensionError("box corners must have the same positive length")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError(f"degenerate box: lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence]) -> "Box":
        intervals = list(intervals)
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @classmethod
    def cube(cls, corner: Sequence, side) -> "Box":
        side = to_fraction(side)
        corner = tuple(to_fraction(c) for c in corner)
        return cls(corner, tuple(c + side for c in corner))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple[Fraction, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def volume(self) -> Fraction:
        return math.prod(self.sides, start=Fraction(1))

    def intersect(self, other: "Box") -> "Box | None":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(h <= l for l, h in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def overlap_volume(self, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> Fraction:
        vol = Fraction(1)
        for a, b, c, d in zip(self.lo, self.hi, lo, hi):
            length = min(b, d) - max(a, c)
            if length <= 0:
                return Fraction(0)
            vol *= length
        return vol

    def contains(self, x: Sequence) -> bool:
        return all(l <= xi < h for l, h, xi in zip(self.lo, self.hi, x))

    def scaled(self, rho: Fraction) -> "Box":
        return Box(tuple(rho * v for v in self.lo), tuple(rho * v for v in self.hi))

    def __str__(self):
        return "x".join(f"[{l},{h})" for l, h in zip(self.lo, self.hi))


# --------------------------------------------------------------------------
# simple functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SimpleFunction:
    """Finite sum ``sum_i v_i * chi_{B_i}`` over pairwise disjoint boxes.

    Build instances with :func:`disjointify`, :func:`indicator` or the
    algebra below; the raw constructor trusts its input to be canonical.
    """

    dim: int
    terms: tuple[tuple[mpf, Box], ...] = ()

    @classmethod
    def zero(cls, dim: int) -> "SimpleFunction":
        return cls(dim, ())

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, x: Sequence) -> mpf:
        x = tuple(to_fraction(xi) for xi in x)
        for v, box in self.terms:
            if box.contains(x):
                return v
        return mpf(0)

    def __len__(self):
        return len(self.terms)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "SimpleFunction"):
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "SimpleFunction"):
        return linear_combine([(1, self), (-1, other)])

    def __mul__(self, c):
        if isinstance(c, SimpleFunction):
            return multiply(self, c)
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c) -> "SimpleFunction":
        c = to_real(c)
        if c == 0:
            return SimpleFunction.zero(self.dim)
        return SimpleFunction(self.dim, tuple((c * v, b) for v, b in self.terms))

    def map_values(self, fn) -> "SimpleFunction":
        """Apply ``fn`` to every value, dropping terms that become zero."""
        terms = tuple((to_real(fn(v)), b) for v, b in self.terms)
        return SimpleFunction(self.dim, tuple(t for t in terms if t[0] != 0))

    def abs(self) -> "SimpleFunction":
        return self.map_values(abs)

    def restrict(self, box: Box) -> "SimpleFunction":
        """``f * chi_box``."""
        out = []
        for v, b in self.terms:
            inter = b.intersect(box)
            if inter is not None:
                out.append((v, inter))
        return SimpleFunction(self.dim, tuple(sorted(out, key=_term_key)))

    def max_abs(self) -> mpf:
        return max((abs(v) for v, _ in self.terms), default=mpf(0))

    @cached_property
    def breakpoints(self) -> tuple[tuple[Fraction, ...], ...]:
        """Sorted distinct box endpoints along each axis."""
        axes = [set() for _ in range(self.dim)]
        for _, box in self.terms:
            for j in range(self.dim):
                axes[j].add(box.lo[j])
                axes[j].add(box.hi[j])
        return tuple(tuple(sorted(a)) for a in axes)

    @cached_property
    def cell_values(self) -> dict[tuple[int, ...], mpf]:
        """Values on the product refinement grid spanned by :attr:`breakpoints`.

        Keys are per-axis interval indices ``j`` meaning ``[x_j, x_{j+1})``.
        """
        bps = self.breakpoints
        cells: dict[tuple[int, ...], mpf] = {}
        for v, box in self.terms:
            ranges = [range(bps[j].index(box.lo[j]), bps[j].index(box.hi[j]))
                      for j in range(self.dim)]
            for idx in itertools.product(*ranges):
                cells[idx] = v
        return cells

    @cached_property
    def common_denominator(self) -> int:
        return math.lcm(*(x.denominator for axis in self.breakpoints for x in axis)) \
            if self.terms else 1

    def __str__(self):
        if not self.terms:
            return f"0 (d={self.dim})"
        return " + ".join(f"{mpmath.nstr(v, 8)}*chi{b}" for v, b in self.terms)


def _term_key(term):
    return term[1].lo, term[1].hi


def _check_dim(dims: Iterable[int]) -> int:
    dims = set(dims)
    if len(dims) > 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop() if dims else 0


def indicator(box: Box | Sequence[Sequence]) -> SimpleFunction:
    """Characteristic function of a box, given as a Box or a list of [lo, hi]."""
    if not isinstance(box, Box):
        box = Box.from_intervals(box)
    return SimpleFunction(box.dim, ((mpf(1), box),))


def _pairwise_disjoint(boxes: Sequence[Box]) -> bool:
    return all(a.intersect(b) is None for a, b in itertools.combinations(boxes, 2))


def disjointify(terms: Iterable[tuple[Real, Box]], dim: int | None = None) -> SimpleFunction:
    """Canonical form of ``sum_i v_i chi_{B_i}`` for possibly overlapping boxes.

    Overlapping inputs are resolved on the per-axis product refinement of all
    box endpoints; already disjoint inputs keep their boxes.
    """
    terms = [(to_real(v), b) for v, b in terms]
    d = _check_dim([b.dim for _, b in terms] + ([dim] if dim is not None else []))
    if d == 0:
        raise DimensionError("dimension of an empty function must be given")
    boxes = [b for _, b in terms]
    if _pairwise_disjoint(boxes):
        out = [(v, b) for v, b in terms if v != 0]
        return SimpleFunction(d, tuple(sorted(out, key=_term_key)))

    axes = [sorted({x for b in boxes for x in (b.lo[j], b.hi[j])}) for j in range(d)]
    acc: dict[tuple[int, ...], mpf] = {}
    for v, b in terms:
        ranges = [range(bisect.bisect_left(axes[j], b.lo[j]),
                        bisect.bisect_left(axes[j], b.hi[j])) for j in range(d)]
        for idx in itertools.product(*ranges):
            acc[idx] = acc.get(idx, mpf(0)) + v
    out = []
    for idx, v in acc.items():
        if v != 0:
            out.append((v, Box(tuple(axes[j][i] for j, i in enumerate(idx)),
                               tuple(axes[j][i + 1] for j, i in enumerate(idx)))))
    return SimpleFunction(d, tuple(sorted(out, key=_term_key)))


def linear_combine(pairs: Iterable[tuple[Real, SimpleFunction]]) -> SimpleFunction:
    pairs = list(pairs)
    d = _check_dim(f.dim for _, f in pairs)
    terms = [(to_real(c) * v, b) for c, f in pairs for v, b in f.terms]
    return disjointify(terms, dim=d)


def multiply(f: SimpleFunction, g: SimpleFunction) -> SimpleFunction:
    d = _check_dim([f.dim, g.dim])
    out = []
    for v, a in f.terms:
        for w, b in g.terms:
            inter = a.intersect(b)
            if inter is not None:
                out.append((v * w, inter))
    return SimpleFunction(d, tuple(sorted(out, key=_term_key)))


def integrate(f: SimpleFunction) -> mpf:
    return mpmath.fsum(v * to_real(b.volume) for v, b in f.terms)


def pairing(f: SimpleFunction, g: SimpleFunction) -> mpf:
    """``<f, g> = integral of f*g``."""
    return integrate(multiply(f, g))


def dilate(f: SimpleFunction, rho, beta) -> SimpleFunction:
    """``St^(beta)_rho f = rho**(-d/beta) * f(x/rho)``: boxes scale by ``rho``."""
    rho = to_fraction(rho)
    if rho <= 0:
        raise ValueError("dilation factor must be positive")
    beta = to_exponent(beta)
    factor = rational_power(rho, -f.dim * reciprocal(beta))
    return SimpleFunction(f.dim, tuple((factor * v, b.scaled(rho)) for v, b in f.terms))


def support_extent(f: SimpleFunction) -> Box:
    """Smallest box containing the support."""
    if f.is_zero():
        raise ValueError("empty support")
    bps = f.breakpoints
    return Box(tuple(a[0] for a in bps), tuple(a[-1] for a in bps))


@dataclass(frozen=True)
class Exponents:
    """A triple ``(q, p, alpha)`` of extended reals in ``[1, inf]``.

    Conjugates ``q', p', alpha'`` are exact rationals (or ``inf``).
    Ordering ``q <= alpha <= p`` is not enforced here; operations on Fofana
    and pre-dual norms call :meth:`require_ordered`.
    """

    q: Exponent
    p: Exponent
    alpha: Exponent

    def __post_init__(self):
        for name in ("q", "p", "alpha"):
            e = to_exponent(getattr(self, name))
            if e != INF and e < 1:
                raise ValueError(f"exponent {name}={e} must lie in [1, inf]")
            object.__setattr__(self, name, e)

    @property
    def q_conj(self) -> Exponent:
        return conjugate(self.q)

    @property
    def p_conj(self) -> Exponent:
        return conjugate(self.p)

    @property
    def alpha_conj(self) -> Exponent:
        return conjugate(self.alpha)

    def conjugates(self) -> "Exponents":
        return Exponents(self.q_conj, self.p_conj, self.alpha_conj)

    @property
    def ordered(self) -> bool:
        return self.q <= self.alpha <= self.p

    def require_ordered(self) -> None:
        if not self.ordered:
            raise ValueError(
                f"requires q <= alpha <= p, got q={exponent_str(self.q)}, "
                f"alpha={exponent_str(self.alpha)}, p={exponent_str(self.p)}")

    def __str__(self):
        return f"(q={exponent_str(self.q)}, p={exponent_str(self.p)}, alpha={exponent_str(self.alpha)})"
