"""Characteristic 2 quadratic and cubic solvability with brute-force oracles."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import galois
import numpy as np

from ptrinom.field import Elt, FieldCtx, absolute_trace, mu_subgroup
from ptrinom.poly import SparsePoly, eval_poly

logger = logging.getLogger(__name__)


@dataclass
class RootReport:
    count: int
    roots: List[int]

    def __post_init__(self) -> None:
        if self.count != len(self.roots):
            raise ValueError(
                f"Count {self.count} does not match {len(self.roots)} roots."
            )


def _require_char2(ctx: FieldCtx) -> None:
    if ctx.p != 2:
        raise ValueError(f"Requires characteristic 2 but is {ctx.p}.")


def brute_force_roots(
    ctx: FieldCtx, poly: SparsePoly, domain: Union[str, int] = "field"
) -> RootReport:
    """Returns every root of poly in the field, or in mu_d for integer domain."""
    if domain == "field":
        points = ctx.elements()
    else:
        points = mu_subgroup(ctx, int(domain))
    values = eval_poly(ctx, poly, points)
    roots = sorted(int(x) for x in points[values == 0])
    return RootReport(len(roots), roots)


def _solve_affine(
    matrix: galois.FieldArray, rhs: galois.FieldArray
) -> Optional[galois.FieldArray]:
    """Returns one solution y of matrix @ y = rhs over GF(p), or None."""
    size = matrix.shape[1]
    augmented = np.concatenate((matrix, rhs[:, np.newaxis]), axis=1)
    reduced = augmented.row_reduce()
    solution = type(matrix).Zeros(size)
    for row in reduced:
        pivots = np.flatnonzero(row[:size] != 0)
        if pivots.size == 0:
            if row[size] != 0:
                return None
            continue
        solution[pivots[0]] = row[size]
    return solution


def linear_map_matrix(ctx: FieldCtx, u: Elt) -> galois.FieldArray:
    """Row images of x -> x^2 + u x over GF(2)."""
    _require_char2(ctx)
    basis = ctx.from_vectors(ctx.prime_field.Identity(ctx.n))
    return ctx.to_vectors(basis ** 2 + ctx.gf(u) * basis)


def quadratic_char2(ctx: FieldCtx, u: Elt, v: Elt) -> RootReport:
    """Roots of x^2 + u x + v in F_{2^n}.

    For u != 0 there are two roots when Tr(v / u^2) = 0 and none otherwise;
    they are found as a particular solution of the linear map x^2 + u x = v
    plus its kernel {0, u}. For u = 0 the single root is v^{2^{n-1}}.
    """
    _require_char2(ctx)
    u, v = ctx.gf(u), ctx.gf(v)
    if u == 0:
        return RootReport(1, [int(v ** (2 ** (ctx.n - 1)))])
    if absolute_trace(ctx, v / u ** 2) != 0:
        return RootReport(0, [])

    matrix = linear_map_matrix(ctx, u)
    particular = _solve_affine(matrix.T, ctx.to_vectors(v))
    if particular is None:
        raise ArithmeticError(
            f"Linear solve disagrees with the trace test at u={int(u)}, v={int(v)}."
        )
    # The kernel of x -> x^2 + u x is {0, u}.
    x0 = ctx.from_vectors(particular)
    return RootReport(2, sorted([int(x0), int(x0 + u)]))


def cubic_unique_char2(ctx: FieldCtx, a: Elt, b: Elt) -> bool:
    """True iff x^3 + a x + b (b != 0) has exactly one root in F_{2^n}.

    Raises:
        ValueError: If b = 0.
    """
    _require_char2(ctx)
    a, b = ctx.gf(a), ctx.gf(b)
    if b == 0:
        raise ValueError("Requires b != 0.")
    return bool(absolute_trace(ctx, a ** 3 / b ** 2 + ctx.one()) != 0)


def quadratic_oracle_mismatches(ctx: FieldCtx) -> List[Tuple[int, int]]:
    """Returns (u, v) where the trace criterion disagrees with root counting."""
    _require_char2(ctx)
    xs = ctx.elements()
    squares = xs ** 2
    size = ctx.order
    mismatches = []
    for u_index in range(size):
        u = ctx.gf(u_index)
        counts = np.bincount(ctx.indices(squares + u * xs), minlength=size)
        if u_index == 0:
            expected = np.ones(size, dtype=np.int64)
        else:
            traces = absolute_trace(ctx, xs / u ** 2)
            expected = np.where(traces == 0, 2, 0)
        for v_index in np.flatnonzero(counts != expected):
            mismatches.append((u_index, int(v_index)))
    logger.info("Quadratic oracle over %s: %d mismatches", ctx, len(mismatches))
    return mismatches


def cubic_oracle_mismatches(ctx: FieldCtx) -> Dict[str, List[Tuple[int, int]]]:
    """Checks the cubic criterion against root counting for all (a, b != 0).

    Returns the pairs where uniqueness disagrees and the pairs where a
    non-unique cubic does not have 0 or 3 roots.
    """
    _require_char2(ctx)
    xs = ctx.elements()
    cubes = xs ** 3
    size = ctx.order
    nonzero = xs[1:]
    mismatches = {"unique": [], "dichotomy": []}
    for a_index in range(size):
        a = ctx.gf(a_index)
        counts = np.bincount(ctx.indices(cubes + a * xs), minlength=size)[1:]
        unique = absolute_trace(ctx, a ** 3 / nonzero ** 2 + ctx.one()) != 0
        for position in np.flatnonzero(unique != (counts == 1)):
            mismatches["unique"].append((a_index, position + 1))
        for position in np.flatnonzero(~unique & (counts != 0) & (counts != 3)):
            mismatches["dichotomy"].append((a_index, position + 1))
    logger.info(
        "Cubic oracle over %s: %d uniqueness, %d dichotomy mismatches",
        ctx, len(mismatches["unique"]), len(mismatches["dichotomy"])
    )
    return mismatches
