"""Permutation tests over F_{q^2} and over the subgroups mu_d."""

import enum
import logging
import math
import multiprocessing
import random
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import sympy
from tqdm import tqdm

from ptrinom.field import Elt, FieldCtx, mu_subgroup, power
from ptrinom.poly import (
    DenominatorVanishes,
    FracPoly,
    SparsePoly,
    Trinomial,
    eval_poly,
    field_coefficient,
)

logger = logging.getLogger(__name__)

# Largest field enumerated element by element.
FULL_FIELD_LIMIT = 2 ** 24
CHUNK_SIZE = 2 ** 20


class FieldTooLarge(ValueError):
    pass


class ImageOutsideSubgroup(ValueError):
    pass


class EngineDisagreement(AssertionError):
    pass


class Method(str, enum.Enum):
    FULL_FIELD = "full_field"
    LEMMA1 = "lemma1"


@dataclass(frozen=True)
class PermVerdict:
    """Outcome of a permutation test.

    The witness, when present, holds the indices of two distinct elements
    with equal images.
    """
    is_permutation: bool
    method: Method
    witness: Optional[Tuple[int, int]] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.is_permutation


def _first_collision(images: np.ndarray) -> Tuple[int, int]:
    """Returns (i, j), i < j, with images[i] == images[j] and j minimal."""
    order = np.argsort(images, kind="stable")
    ranked = images[order]
    repeats = np.flatnonzero(ranked[1:] == ranked[:-1]) + 1
    second = int(order[repeats].min())
    first = int(np.argmax(images == images[second]))
    return first, second


def _evaluate_range(args) -> np.ndarray:
    ctx, poly, start, stop = args
    values = eval_poly(ctx, poly, ctx.elements(start, stop))
    return ctx.indices(values)


def is_permutation_full(
    ctx: FieldCtx,
    f: Union[Trinomial, SparsePoly],
    workers: int = 1,
    progress: bool = False
) -> PermVerdict:
    """Decides whether f permutes the whole field by evaluating it everywhere.

    Images are marked in a presence bitmap. On failure the witness is the
    collision whose larger index is smallest, paired with the first
    element sharing its image.

    Raises:
        FieldTooLarge: If the field has more than FULL_FIELD_LIMIT elements.
    """
    size = ctx.order
    if size > FULL_FIELD_LIMIT:
        raise FieldTooLarge(
            f"{ctx} has {size} elements, above the limit {FULL_FIELD_LIMIT}."
        )
    chunks = [
        (ctx, f, start, min(start + CHUNK_SIZE, size))
        for start in range(0, size, CHUNK_SIZE)
    ]
    if workers > 1 and len(chunks) > 1:
        with multiprocessing.Pool(workers) as pool:
            pieces = list(tqdm(
                pool.imap(_evaluate_range, chunks),
                total=len(chunks), disable=not progress, desc=str(ctx)
            ))
    else:
        pieces = [
            _evaluate_range(chunk)
            for chunk in tqdm(chunks, disable=not progress, desc=str(ctx))
        ]
    images = np.concatenate(pieces)

    marks = np.zeros(size, dtype=bool)
    marks[images] = True
    if marks.all():
        return PermVerdict(True, Method.FULL_FIELD)
    return PermVerdict(
        False, Method.FULL_FIELD, _first_collision(images), "collision"
    )


def _positions_in(mu: Elt, values: Elt) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (positions, inside) locating values among the listed mu."""
    mu_indices = np.asarray(mu.view(np.ndarray), dtype=np.int64)
    value_indices = np.asarray(values.view(np.ndarray), dtype=np.int64)
    order = np.argsort(mu_indices)
    ranked = mu_indices[order]
    slots = np.clip(np.searchsorted(ranked, value_indices), 0, len(ranked) - 1)
    inside = ranked[slots] == value_indices
    return order[slots], inside


def _mu_bijection(
    mu: Elt, values: Elt
) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Checks that values (listed along mu) hit every element of mu once.

    Returns the verdict and, on failure, the positions of a collision.

    Raises:
        ImageOutsideSubgroup: If some value is not in mu.
    """
    positions, inside = _positions_in(mu, values)
    if not inside.all():
        outside = int(np.flatnonzero(~inside)[0])
        raise ImageOutsideSubgroup(
            f"Image {int(values[outside])} of position {outside} is not in "
            f"the subgroup of order {len(mu)}."
        )
    marks = np.zeros(len(mu), dtype=bool)
    marks[positions] = True
    if marks.all():
        return True, None
    return False, _first_collision(positions)


def values_on_mu(ctx: FieldCtx, g: FracPoly, d: Optional[int] = None) -> np.ndarray:
    """Returns the indices of g(x) for x along mu_d (default d = q + 1).

    Raises:
        DenominatorVanishes: If the denominator of g has a zero on mu_d.
    """
    d = ctx.q + 1 if d is None else d
    mu = mu_subgroup(ctx, d)
    den = eval_poly(ctx, g.den, mu)
    zeros = np.flatnonzero(den == 0)
    if zeros.size:
        raise DenominatorVanishes(
            int(mu[zeros[0]]),
            f"Denominator {g.den} vanishes at element {int(mu[zeros[0]])} "
            f"of the subgroup of order {d}."
        )
    return ctx.indices(eval_poly(ctx, g.num, mu) / den)


def permutes_mu(ctx: FieldCtx, g: FracPoly, d: int) -> PermVerdict:
    """Decides whether g permutes mu_d.

    The witness holds element indices of two points of mu_d with equal
    images under g.

    Raises:
        DenominatorVanishes: If the denominator of g has a zero on mu_d.
        ImageOutsideSubgroup: If g maps a point of mu_d outside mu_d.
    """
    mu = mu_subgroup(ctx, d)
    values = ctx.gf(values_on_mu(ctx, g, d))
    bijective, collision = _mu_bijection(mu, values)
    if bijective:
        return PermVerdict(True, Method.LEMMA1)
    i, j = collision
    return PermVerdict(
        False, Method.LEMMA1, (int(mu[i]), int(mu[j])), "collision on mu"
    )


def fractional_form(r: int, h: SparsePoly, q: int) -> FracPoly:
    """Returns x^r h(x)^{q-1} written as a ratio valid on mu_{q+1}.

    On mu_{q+1} we have x^q = 1/x, so for h with prime subfield
    coefficients h(x)^{q-1} = h(1/x) / h(x). Since x^{q+1} = 1 the
    exponent r is taken modulo q + 1.
    """
    if not h.has_integer_coefficients:
        raise ValueError("Requires h with prime subfield coefficients.")
    r = r % (q + 1)
    low = h.low_degree
    den = SparsePoly((e - low, c) for e, c in h.terms)
    num = SparsePoly((r - e - low, c) for e, c in h.terms)
    g = FracPoly.cleared(num, den)
    return FracPoly(g.num, g.den, g.shift - low)


def assemble(ctx: FieldCtx, r: int, h: SparsePoly, d: int) -> SparsePoly:
    """Returns f = x^r h(x^{(p^n - 1)/d}) with exponents in [1, p^n - 1]."""
    size = ctx.order - 1
    s = size // d
    merged = {}
    for e, c in h.terms:
        exponent = (r + e * s - 1) % size + 1
        merged[exponent] = (
            merged.get(exponent, ctx.gf(0)) + field_coefficient(ctx, c)
        )
    return SparsePoly((e, c) for e, c in merged.items() if c != 0)


def lemma1_check(
    ctx: FieldCtx, r: int, h: SparsePoly, d: Optional[int] = None
) -> PermVerdict:
    """Decides whether f = x^r h(x^s), s = (p^n - 1)/d, permutes the field.

    f permutes iff gcd(r, s) = 1 and x^r h(x)^s permutes mu_d. For
    d = q + 1 with integer coefficients the second condition goes through
    fractional_form and permutes_mu; otherwise g is evaluated directly.

    The witness holds field element indices (x1, x2) with f(x1) = f(x2).
    When h vanishes somewhere on mu_d, f has a second root and the
    witness is (0, x2).
    """
    size = ctx.order - 1
    if d is None:
        d = ctx.q + 1
    if r < 1:
        raise ValueError(f"Exponent r must be positive but is {r}.")
    if size % d:
        raise ValueError(
            f"Requires d | p^n - 1 but d = {d} and p^n - 1 = {size}."
        )
    s = size // d
    gcd = math.gcd(r, s)

    mu = mu_subgroup(ctx, d)
    h_values = eval_poly(ctx, h, mu)
    roots = np.flatnonzero(h_values == 0)
    if roots.size:
        root = int(roots[0])
        return PermVerdict(
            False, Method.LEMMA1,
            (0, int(ctx.gen ** root)),
            f"h vanishes on mu_{d}"
        )

    if ctx.n % 2 == 0 and d == ctx.q + 1 and h.has_integer_coefficients:
        g = fractional_form(r, h, ctx.q)
        verdict = permutes_mu(ctx, g, d)
        collision = None
        if not verdict.is_permutation:
            positions, _ = _positions_in(mu, ctx.gf(list(verdict.witness)))
            collision = (int(positions[0]), int(positions[1]))
    else:
        values = power(ctx, mu, r) * h_values ** s
        bijective, collision = _mu_bijection(mu, values)

    if gcd != 1:
        zeta = ctx.gen ** (size // gcd)
        return PermVerdict(
            False, Method.LEMMA1, (1, int(zeta)), f"gcd(r, {s}) = {gcd}"
        )
    if collision is None:
        return PermVerdict(True, Method.LEMMA1)

    # Lift the mu_d collision to two elements of the field.
    i, j = collision
    x1 = ctx.gen ** i
    x2 = ctx.gen ** j
    f = assemble(ctx, r, h, d)
    omega = eval_poly(ctx, f, x1) / eval_poly(ctx, f, x2)
    z = omega ** (pow(r, -1, s) if s > 1 else 0)
    return PermVerdict(
        False, Method.LEMMA1, (int(x1), int(z * x2)), f"collision on mu_{d}"
    )


def _random_instance(
    ctx: FieldCtx, rng: random.Random, divisors: List[int]
) -> Tuple[int, SparsePoly, int]:
    d = rng.choice(divisors)
    r = rng.randint(1, ctx.order - 1)
    width = rng.randint(1, min(3, d))
    exponents = rng.sample(range(d), width)
    h = SparsePoly(
        ((e, rng.randint(1, ctx.p - 1)) for e in exponents), p=ctx.p
    )
    return r, h, d


def crossvalidate_lemma1(
    ctx: FieldCtx,
    samples: int = 500,
    seed: int = 20170101,
    progress: bool = False
) -> List[Tuple[int, SparsePoly, int]]:
    """Compares lemma1_check with is_permutation_full on random (r, h, d).

    Returns the triples where the two verdicts differ.
    """
    rng = random.Random(seed)
    divisors = [int(d) for d in sympy.divisors(ctx.order - 1)]
    mismatches = []
    for _ in tqdm(range(samples), disable=not progress, desc=str(ctx)):
        r, h, d = _random_instance(ctx, rng, divisors)
        fast = lemma1_check(ctx, r, h, d)
        slow = is_permutation_full(ctx, assemble(ctx, r, h, d))
        if fast.is_permutation != slow.is_permutation:
            logger.error(
                "Engines disagree on r=%d h=%s d=%d over %s", r, h, d, ctx
            )
            mismatches.append((r, h, d))
    logger.info(
        "Cross-validated %d triples over %s: %d mismatches",
        samples, ctx, len(mismatches)
    )
    return mismatches


def witness_holds(
    ctx: FieldCtx, f: Union[Trinomial, SparsePoly], witness: Tuple[int, int]
) -> bool:
    """Returns True if the witness is two distinct elements with f equal."""
    x1, x2 = witness
    if x1 == x2:
        return False
    values = eval_poly(ctx, f, ctx.gf([x1, x2]))
    return bool(values[0] == values[1])
