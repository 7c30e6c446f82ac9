"""Multiplicative equivalence of trinomials and fractional polynomials."""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ptrinom.field import FieldCtx
from ptrinom.perm import values_on_mu
from ptrinom.poly import FracPoly, Trinomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquivWitness:
    """f(x) = g(x^d) with gcd(d, modulus) = 1."""
    d: int
    modulus: int

    def __post_init__(self) -> None:
        if math.gcd(self.d, self.modulus) != 1:
            raise ValueError(
                f"Witness {self.d} is not coprime to {self.modulus}."
            )

    def inverse(self) -> "EquivWitness":
        if self.modulus == 1:
            return self
        return EquivWitness(pow(self.d, -1, self.modulus), self.modulus)

    def compose(self, other: "EquivWitness") -> "EquivWitness":
        return EquivWitness(self.d * other.d % self.modulus, self.modulus)


def _signed_residues(f: Trinomial, modulus: int, d: int = 1) -> Counter:
    return Counter((e * d % modulus, s) for e, s in f.terms)


def _congruence_solutions(a: int, b: int, modulus: int) -> List[int]:
    """All d in [0, modulus) with a d = b (mod modulus)."""
    t = math.gcd(a, modulus)
    if b % t:
        return []
    step = modulus // t
    base = (b // t) * pow(a // t, -1, step) % step if step > 1 else 0
    return [base + j * step for j in range(t)]


def mult_equivalent(
    ctx: FieldCtx, f: Trinomial, g: Trinomial
) -> Optional[EquivWitness]:
    """Returns the smallest d coprime to q^2 - 1 with f(x) = g(x^d).

    Decided on (exponent, sign) multisets: the smallest exponent of g must
    land on one of the exponents of f, which leaves few candidates for d.
    """
    if f.ctx != ctx or g.ctx != ctx:
        raise ValueError("Both trinomials must be over the given field.")
    modulus = ctx.order - 1
    target = _signed_residues(f, modulus)
    anchor = g.exps[-1] % modulus
    candidates = set()
    for e, _ in f.terms:
        candidates.update(_congruence_solutions(anchor, e % modulus, modulus))
    for d in sorted(candidates):
        if d == 0 or math.gcd(d, modulus) != 1:
            continue
        if _signed_residues(g, modulus, d) == target:
            return EquivWitness(d, modulus)
    return None


def invariant_key(f: Trinomial) -> Tuple:
    """A key preserved by every exponent twist x -> x^d, gcd(d, q^2 - 1) = 1."""
    modulus = f.ctx.order - 1
    return tuple(sorted((math.gcd(e, modulus), s) for e, s in f.terms))


def frac_matches(ctx: FieldCtx, g1: FracPoly, g2: FracPoly, d: int) -> bool:
    """Returns True if g2(x) = g1(x^d) for every x in mu_{q+1}."""
    order = ctx.q + 1
    first = values_on_mu(ctx, g1)
    second = values_on_mu(ctx, g2)
    twisted = first[(d * np.arange(order)) % order]
    return bool(np.array_equal(twisted, second))


def frac_equivalent(
    ctx: FieldCtx, g1: FracPoly, g2: FracPoly
) -> Optional[EquivWitness]:
    """Returns the smallest d coprime to q + 1 with g2(x) = g1(x^d) on mu_{q+1}.

    Raises:
        DenominatorVanishes: If either denominator has a zero on mu_{q+1}.
    """
    order = ctx.q + 1
    first = values_on_mu(ctx, g1)
    second = values_on_mu(ctx, g2)
    positions = np.arange(order)
    for d in range(1, order):
        if math.gcd(d, order) != 1:
            continue
        if np.array_equal(first[(d * positions) % order], second):
            return EquivWitness(d, order)
    return None


@dataclass
class EquivalenceClass:
    representative: Trinomial
    members: List[Trinomial]
    witnesses: Dict[int, int]


def _rank(f: Trinomial) -> Tuple[int, ...]:
    return tuple(sorted(f.exps))


def classify_inequivalent(
    ctx: FieldCtx, items: Sequence[Trinomial]
) -> List[EquivalenceClass]:
    """Partitions items under mult_equivalent.

    Each class is represented by its member with the lexicographically
    smallest exponent triple. witnesses maps a member's position in items
    to d with member(x) = representative(x^d).
    """
    buckets: Dict[Tuple, List[int]] = {}
    for position, f in enumerate(items):
        buckets.setdefault(invariant_key(f), []).append(position)

    classes: List[List[int]] = []
    for positions in buckets.values():
        local: List[List[int]] = []
        for position in positions:
            for group in local:
                if mult_equivalent(ctx, items[position], items[group[0]]):
                    group.append(position)
                    break
            else:
                local.append([position])
        classes.extend(local)

    result = []
    for group in classes:
        representative = min((items[i] for i in group), key=_rank)
        witnesses = {}
        for i in group:
            witness = mult_equivalent(ctx, items[i], representative)
            witnesses[i] = witness.d
        result.append(
            EquivalenceClass(representative, [items[i] for i in group], witnesses)
        )
    result.sort(key=lambda cls: _rank(cls.representative))
    logger.info("Classified %d trinomials into %d classes", len(items), len(result))
    return result
