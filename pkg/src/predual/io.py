"""JSON formats for step functions and decompositions.

Function::

    {"dimension": 1,
     "terms": [{"coef": "3/2", "box": [["0", "1/2"]]}, ...]}

Decomposition::

    {"exponents": {"q": "2", "p": "4", "alpha": "3"},
     "terms": [{"c": "1.5874...", "rho": "2", "atom": <function>}, ...]}

Coefficients are decimal or ``"a/b"`` strings (plain JSON numbers are also
accepted); box endpoints must be rational.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mpf

from .corefn import Box, Exponents, SimpleFunction, disjointify, exponent_str, to_fraction, to_real
from .hspace import HDecomposition

REAL_DIGITS = 36


class SpecError(ValueError):
    """Malformed function or decomposition document."""


def format_real(x) -> str:
    return mpmath.nstr(to_real(x), REAL_DIGITS, min_fixed=-6, max_fixed=20)


def parse_real(s) -> mpf:
    if isinstance(s, bool):
        raise SpecError(f"not a number: {s!r}")
    if isinstance(s, (int, float)):
        return mpf(repr(s)) if isinstance(s, float) else mpf(s)
    try:
        return to_real(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"not a number: {s!r}") from exc


def parse_rational(s) -> Fraction:
    try:
        if isinstance(s, float):
            return Fraction(repr(s))
        return to_fraction(s)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"not a rational: {s!r}") from exc


def function_from_dict(doc: dict) -> SimpleFunction:
    try:
        dim = int(doc["dimension"])
        raw_terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError("function needs 'dimension' and 'terms'") from exc
    if not 1 <= dim <= 3:
        raise SpecError(f"dimension must be 1, 2 or 3, got {dim}")
    terms = []
    for t in raw_terms:
        try:
            coef, box = t["coef"], t["box"]
        except (KeyError, TypeError) as exc:
            raise SpecError("each term needs 'coef' and 'box'") from exc
        if len(box) != dim or any(len(iv) != 2 for iv in box):
            raise SpecError(f"box {box!r} does not match dimension {dim}")
        try:
            b = Box.from_intervals([(parse_rational(a), parse_rational(c)) for a, c in box])
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        terms.append((parse_real(coef), b))
    return disjointify(terms, dim=dim)


def function_to_dict(f: SimpleFunction) -> dict:
    return {
        "dimension": f.dim,
        "terms": [{"coef": format_real(v),
                   "box": [[str(a), str(b)] for a, b in zip(box.lo, box.hi)]}
                  for v, box in f.terms],
    }


def load_function(path) -> SimpleFunction:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    return function_from_dict(doc)


def exponents_to_dict(exps: Exponents) -> dict:
    return {"q": exponent_str(exps.q), "p": exponent_str(exps.p), "alpha": exponent_str(exps.alpha)}


def decomposition_to_dict(dec: HDecomposition) -> dict:
    return {
        "exponents": exponents_to_dict(dec.exps),
        "terms": [{"c": format_real(c), "rho": str(rho), "atom": function_to_dict(a)}
                  for c, rho, a in dec.terms],
    }


def decomposition_from_dict(doc: dict) -> HDecomposition:
    try:
        e = doc["exponents"]
        exps = Exponents(e["q"], e["p"], e["alpha"])
        terms = tuple((parse_real(t["c"]), parse_rational(t["rho"]), function_from_dict(t["atom"]))
                      for t in doc["terms"])
    except (KeyError, TypeError) as exc:
        raise SpecError("decomposition needs 'exponents' and 'terms'") from exc
    return HDecomposition(exps, terms)
