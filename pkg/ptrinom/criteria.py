"""Reference permutation criteria from the literature, with brute-force sweeps."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from ptrinom.field import (
    Elt,
    FieldCtx,
    frobenius_q,
    is_square,
    mu_subgroup,
    power,
)
from ptrinom.poly import SparsePoly, eval_poly, field_coefficient

logger = logging.getLogger(__name__)


HOU_B_ZERO = "b_zero"
HOU_CONJUGATE_RATIO = "conjugate_ratio"
HOU_NORM_RELATION = "norm_relation"


@dataclass(frozen=True)
class HouDisagreement:
    """A pair (a, b) where hou_criterion and brute force differ.

    condition names the clause that accepted the pair, or is None when the
    criterion rejected it. discriminant is the index of 1 - 4a/b^2, or None
    when b = 0.
    """
    a: int
    b: int
    brute_force: bool
    condition: Optional[str]
    discriminant: Optional[int]


def hou_polynomial(ctx: FieldCtx, a: Elt, b: Elt) -> SparsePoly:
    """Returns f = a x + b x^q + x^{2q-1}, dropping zero terms."""
    q = ctx.q
    terms = [(2 * q - 1, ctx.gf(1))]
    if int(a):
        terms.append((1, ctx.gf(a)))
    if int(b):
        terms.append((q, ctx.gf(b)))
    return SparsePoly(terms)


def _square_in_subfield(ctx: FieldCtx, x: Elt) -> bool:
    return ctx.is_in_subfield(x) and is_square(ctx, x, in_subfield=True)


def hou_discriminant(ctx: FieldCtx, a: Elt, b: Elt) -> Optional[Elt]:
    """Returns 1 - 4a/b^2, or None when b = 0."""
    gf = ctx.gf
    a, b = gf(a), gf(b)
    if b == 0:
        return None
    return gf(1) - gf(4 % ctx.p) * a / b ** 2


def hou_condition(ctx: FieldCtx, a: Elt, b: Elt) -> Optional[str]:
    """Returns the clause of Hou's criterion accepting (a, b), or None.

    The constants are read literally in characteristic 3, so the value 3
    in the b = 0 clause and the term 3a in the norm relation are both 0.
    A zero discriminant counts as a square.
    """
    if ctx.p != 3:
        raise ValueError(f"Requires characteristic 3 but is {ctx.p}.")
    gf = ctx.gf
    a, b = gf(a), gf(b)
    q = ctx.q
    three = gf(3 % 3)

    if b == 0:
        value = power(ctx, -a, (q + 1) // 2)
        if value == -gf(1) or value == three:
            return HOU_B_ZERO
        return None

    if a == 0:
        return None
    if not _square_in_subfield(ctx, hou_discriminant(ctx, a, b)):
        return None
    if a == power(ctx, b, 1 - q):
        return HOU_CONJUGATE_RATIO
    if b ** 2 - a ** 2 * power(ctx, b, q - 1) - three * a == 0:
        return HOU_NORM_RELATION
    return None


def hou_criterion(ctx: FieldCtx, a: Elt, b: Elt) -> bool:
    """Hou's conditions for a x + b x^q + x^{2q-1} to permute F_{q^2}, q = 3^k."""
    return hou_condition(ctx, a, b) is not None


def hou_disagreements(
    ctx: FieldCtx, progress: bool = False
) -> List[HouDisagreement]:
    """Compares hou_criterion with brute force over all (a, b)."""
    xs = ctx.elements()
    q = ctx.q
    base = power(ctx, xs, 2 * q - 1)
    conjugates = power(ctx, xs, q)
    size = ctx.order
    flagged = []
    for b_index in tqdm(range(size), disable=not progress, desc="hou"):
        b = ctx.gf(b_index)
        partial = base + b * conjugates
        for a_index in range(size):
            a = ctx.gf(a_index)
            images = ctx.indices(partial + a * xs)
            brute = np.unique(images).size == size
            condition = hou_condition(ctx, a, b)
            if (condition is not None) != brute:
                discriminant = hou_discriminant(ctx, a, b)
                flagged.append(HouDisagreement(
                    a_index, b_index, bool(brute), condition,
                    None if discriminant is None else int(discriminant),
                ))
    logger.info(
        "Hou criterion over %s: %d of %d pairs disagree with brute force",
        ctx, len(flagged), size * size
    )
    return flagged


def zieve_selfreciprocal_criterion(
    ctx: FieldCtx, r: int, h: SparsePoly
) -> Optional[bool]:
    """Zieve's criterion for x^r h(x^{q-1}) when h is self-reciprocal.

    Applies when h(0) != 0 and (x^d h(1/x))^q = beta h(x^q) for some
    beta in mu_{q+1}, d = deg h, i.e. c_{d-j}^q = beta c_j for all j.
    Returns None when it does not apply.
    """
    if h.is_laurent or h.coefficient(0) == 0:
        return None
    q = ctx.q
    d = h.degree
    coeffs = {e: field_coefficient(ctx, c) for e, c in h.terms}
    zero = ctx.gf(0)
    beta = frobenius_q(ctx, coeffs[d]) / coeffs[0]
    if power(ctx, beta, q + 1) != 1:
        return None
    for j in range(d + 1):
        left = frobenius_q(ctx, coeffs.get(d - j, zero))
        if left != beta * coeffs.get(j, zero):
            return None

    values = eval_poly(ctx, h, mu_subgroup(ctx, q + 1))
    return (
        math.gcd(r, q - 1) == 1
        and math.gcd(r - d, q + 1) == 1
        and not bool(np.any(values == 0))
    )


def _cube_class(ctx: FieldCtx, u: Elt, epsilon: Elt) -> int:
    """Returns i in {0, 1, 2} with u^{(Q-1)/3} = epsilon^i."""
    coset = power(ctx, u, (ctx.order - 1) // 3)
    for i in range(3):
        if coset == epsilon ** i:
            return i
    raise ValueError(f"Element {int(u)} has no cube class.")


def lee_park_criterion(
    ctx: FieldCtx, n: int, a: Elt, b: Elt, c: Elt
) -> bool:
    """Lee and Park's conditions for x^n h(x^{(Q-1)/3}), h = a x^2 + b x + c.

    The criterion is read over the whole field F_Q of ctx. The logarithms
    modulo 3 come from the cube classes of the ratios, with alpha = gen.

    Raises:
        ValueError: If 3 does not divide Q - 1.
    """
    size = ctx.order - 1
    if size % 3:
        raise ValueError(f"Requires 3 | Q - 1 but Q - 1 = {size}.")
    gf = ctx.gf
    a, b, c = gf(a), gf(b), gf(c)
    epsilon = mu_subgroup(ctx, 3)[1]

    if math.gcd(n, size // 3) != 1:
        return False
    h = [a * epsilon ** (2 * i) + b * epsilon ** i + c for i in range(3)]
    if any(value == 0 for value in h):
        return False
    first = _cube_class(ctx, h[0] / h[1], epsilon)
    second = _cube_class(ctx, h[1] / h[2], epsilon)
    return first == second and first != n % 3


def lee_park_polynomial(
    ctx: FieldCtx, n: int, a: Elt, b: Elt, c: Elt
) -> SparsePoly:
    """Returns x^n h(x^{(Q-1)/3}) with exponents reduced into [1, Q - 1]."""
    size = ctx.order - 1
    s = size // 3
    merged = {}
    for degree, coeff in ((2, a), (1, b), (0, c)):
        if int(coeff) == 0:
            continue
        exponent = (n + degree * s - 1) % size + 1
        merged[exponent] = merged.get(exponent, ctx.gf(0)) + ctx.gf(coeff)
    return SparsePoly((e, v) for e, v in merged.items() if v != 0)
