"""Unit tests for the characteristic 2 quadratic and cubic solvers."""

import pytest

from ptrinom.field import build_extension, build_field
from ptrinom.poly import SparsePoly
from ptrinom.solvers import (
    RootReport,
    brute_force_roots,
    cubic_oracle_mismatches,
    cubic_unique_char2,
    quadratic_char2,
    quadratic_oracle_mismatches,
)


def _quadratic(ctx, u, v):
    terms = [(2, 1)]
    if u:
        terms.append((1, ctx.gf(u)))
    if v:
        terms.append((0, ctx.gf(v)))
    return SparsePoly(terms)


def test_root_report_checks_count():
    """Tests the count must match the listed roots."""
    with pytest.raises(ValueError):
        RootReport(2, [1])


def test_brute_force_roots():
    """Tests x^2 + x + 1 has the primitive cube roots of F_16 as roots."""
    ctx = build_field(2, 2)
    h = SparsePoly([(0, 1), (1, 1), (2, 1)])
    roots = brute_force_roots(ctx, h)
    assert roots.count == 2
    assert all(ctx.gf(x) ** 3 == 1 for x in roots.roots)
    assert brute_force_roots(ctx, h, domain=3).roots == roots.roots
    assert brute_force_roots(ctx, h, domain=5).count == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_quadratic_char2_matches_brute_force(n):
    """Tests root sets for every (u, v) over F_{2^n}."""
    ctx = build_extension(2, n)
    for u in range(ctx.order):
        for v in range(ctx.order):
            solved = quadratic_char2(ctx, u, v)
            assert solved == brute_force_roots(ctx, _quadratic(ctx, u, v)), (u, v)


def test_quadratic_char2_square_root():
    """Tests u = 0 gives the unique square root."""
    ctx = build_extension(2, 5)
    v = ctx.gf(7)
    (root,) = quadratic_char2(ctx, 0, v).roots
    assert ctx.gf(root) ** 2 == v


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_quadratic_oracle(n):
    """Tests the trace criterion counts roots correctly."""
    assert quadratic_oracle_mismatches(build_extension(2, n)) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_cubic_oracle(n):
    """Tests uniqueness and the 0 or 3 roots dichotomy."""
    mismatches = cubic_oracle_mismatches(build_extension(2, n))
    assert mismatches == {"unique": [], "dichotomy": []}


def test_cubic_unique_char2():
    """Tests x^3 + 1 over F_4 and F_8."""
    # Three cube roots of unity in F_4, one in F_8.
    assert not cubic_unique_char2(build_extension(2, 2), 0, 1)
    assert cubic_unique_char2(build_extension(2, 3), 0, 1)
    with pytest.raises(ValueError):
        cubic_unique_char2(build_extension(2, 3), 1, 0)


def test_solvers_require_characteristic_two():
    """Tests odd characteristic is rejected."""
    ctx = build_field(3, 1)
    with pytest.raises(ValueError):
        quadratic_char2(ctx, 1, 1)
    with pytest.raises(ValueError):
        cubic_unique_char2(ctx, 1, 1)
    with pytest.raises(ValueError):
        quadratic_oracle_mismatches(ctx)
