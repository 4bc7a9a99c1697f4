import json
from fractions import Fraction

import pytest
from hypothesis import strategies as st
from mpmath import mpf

from predual.corefn import Box, disjointify, indicator, to_real

Q = Fraction

endpoint = st.integers(-12, 11).map(lambda k: Q(k, 4))


@st.composite
def boxes(draw, dim=1):
    lo, hi = [], []
    for _ in range(dim):
        a = draw(endpoint)
        b = a + Q(draw(st.integers(1, 8)), 4)
        lo.append(a)
        hi.append(b)
    return Box(tuple(lo), tuple(hi))


@st.composite
def raw_terms(draw, dim=1):
    n = draw(st.integers(1, 4))
    return [(draw(st.integers(-5, 5)), draw(boxes(dim))) for _ in range(n)]


# criterion number -> (ok, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def step(*pieces, dim=1):
    """``step((v, [[lo, hi]]), ...)`` with rational endpoints."""
    return disjointify([(to_real(Fraction(v) if not isinstance(v, (float, mpf)) else v),
                         Box.from_intervals(b)) for v, b in pieces], dim)


def chi(*intervals):
    return indicator([list(iv) for iv in intervals])


@pytest.fixture
def write_function(tmp_path):
    def write(doc, name="f.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
