"""Exhaustive search for permutation trinomials x^r h(x^{q-1}) via mu_{q+1}."""

import itertools
import logging
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ptrinom.equivalence import invariant_key, mult_equivalent
from ptrinom.families import FamilySpec, families_for_char, instantiate
from ptrinom.field import FieldCtx, build_field, mu_subgroup
from ptrinom.perm import _positions_in, fractional_form, is_permutation_full
from ptrinom.poly import DegenerateInstance, SparsePoly, Trinomial, render_frac

logger = logging.getLogger(__name__)

# Largest q + 1 swept.
SEARCH_LIMIT = 2 ** 12 + 1

SIGNS = Tuple[int, int]


@dataclass(frozen=True)
class SearchSpace:
    """Candidates x^r (1 + s1 x^{m(q-1)} + s2 x^{n(q-1)}) over F_{q^2}."""
    p: int
    k: int
    r_values: Tuple[int, ...] = ()
    signs: str = "plus"

    @classmethod
    def default(cls, p: int, k: int, signs: Optional[str] = None) -> "SearchSpace":
        q = p ** k
        if signs is None:
            signs = "plus" if p == 2 else "all"
        return cls(p, k, tuple(range(1, q + 2)), signs)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def sign_choices(self) -> List[SIGNS]:
        if self.p == 2 or self.signs == "plus":
            return [(1, 1)]
        return list(itertools.product((-1, 1), repeat=2))

    def pairs(self) -> List[Tuple[int, int]]:
        """All (m, n) with 0 < m < n <= q + 1."""
        top = self.q + 1
        return [(m, n) for m in range(1, top) for n in range(m + 1, top + 1)]

    @property
    def size(self) -> int:
        return len(self.r_values) * len(self.pairs()) * len(self.sign_choices)


@dataclass(frozen=True)
class SearchHit:
    r: int
    m: int
    n: int
    signs: SIGNS

    def h(self) -> SparsePoly:
        return SparsePoly([(0, 1), (self.m, self.signs[0]), (self.n, self.signs[1])])

    def trinomial(self, ctx: FieldCtx) -> Trinomial:
        q = ctx.q
        exps = (self.r, self.r + self.m * (q - 1), self.r + self.n * (q - 1))
        return Trinomial(ctx, exps, (1,) + self.signs)


@dataclass
class SearchResult:
    space: SearchSpace
    hits: List[SearchHit]
    vanishing: int
    degenerate: int
    elapsed_s: float


def _sweep_block(args) -> Tuple[List[SearchHit], int, int]:
    """Sweeps one block of r for every (m, n, signs)."""
    p, k, modulus, r_block, space = args
    ctx = build_field(p, k, modulus)
    q = ctx.q
    order = q + 1
    mu = mu_subgroup(ctx, order)
    positions = np.arange(order)
    inverse_positions = (-positions) % order
    r_values = np.array(
        [r for r in r_block if math.gcd(r, q - 1) == 1], dtype=np.int64
    )
    powers = {e: mu ** e for e in range(order + 1)}
    one = ctx.gf(1)

    hits, vanishing, degenerate = [], 0, 0
    for m, n in space.pairs():
        if n == order:
            # x^{(q+1)(q-1)} = 1 on F_{q^2}^*, so the last term merges with 1.
            degenerate += len(r_block) * len(space.sign_choices)
            continue
        for s1, s2 in space.sign_choices:
            h_values = one + ctx.gf(s1 % p) * powers[m] + ctx.gf(s2 % p) * powers[n]
            if np.any(h_values == 0):
                vanishing += len(r_block)
                continue
            if r_values.size == 0:
                continue
            ratios = h_values[inverse_positions] / h_values
            logs, _ = _positions_in(mu, ratios)
            images = (r_values[:, np.newaxis] * positions + logs) % order
            bijective = np.all(np.sort(images, axis=1) == positions, axis=1)
            for r in r_values[bijective]:
                hits.append(SearchHit(int(r), m, n, (s1, s2)))
    return hits, vanishing, degenerate


def search_space(
    space: SearchSpace,
    modulus: Optional[Sequence[int]] = None,
    workers: int = 1,
    progress: bool = False
) -> SearchResult:
    """Returns every candidate in the space that permutes F_{q^2}.

    Each candidate costs O(q) through the mu_{q+1} test. Candidates with h
    vanishing on mu_{q+1}, or with n = q + 1, are excluded and counted.
    Hits are ordered by (r, m, n, signs) regardless of worker count.
    """
    if space.q + 1 > SEARCH_LIMIT:
        raise ValueError(
            f"Requires q + 1 <= {SEARCH_LIMIT} but q + 1 = {space.q + 1}."
        )
    if any(not 1 <= r <= space.q + 1 for r in space.r_values):
        raise ValueError(f"Exponents r must lie in [1, {space.q + 1}].")
    ctx = build_field(space.p, space.k, modulus)
    logger.info(
        "Searching %d candidates over %s (%d workers)", space.size, ctx, workers
    )
    start = time.perf_counter()
    count = max(1, workers)
    blocks = [space.r_values[i::count] for i in range(count)]
    tasks = [(space.p, space.k, ctx.modulus, block, space) for block in blocks if block]
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers) as pool:
            parts = list(tqdm(
                pool.imap(_sweep_block, tasks), total=len(tasks),
                disable=not progress, desc="search"
            ))
    else:
        parts = [
            _sweep_block(task)
            for task in tqdm(tasks, disable=not progress, desc="search")
        ]

    hits = sorted(
        (hit for part, _, _ in parts for hit in part),
        key=lambda hit: (hit.r, hit.m, hit.n, hit.signs)
    )
    result = SearchResult(
        space, hits,
        sum(part[1] for part in parts), sum(part[2] for part in parts),
        time.perf_counter() - start,
    )
    logger.info(
        "Found %d hits over %s in %.2fs (%d vanishing, %d degenerate)",
        len(hits), ctx, result.elapsed_s, result.vanishing, result.degenerate
    )
    return result


def oracle_hits(
    space: SearchSpace,
    modulus: Optional[Sequence[int]] = None,
    progress: bool = False
) -> List[SearchHit]:
    """Returns the hits of the space by checking each candidate in full."""
    ctx = build_field(space.p, space.k, modulus)
    hits = []
    candidates = [
        (r, m, n, signs)
        for r in space.r_values
        for m, n in space.pairs() if n != space.q + 1
        for signs in space.sign_choices
    ]
    for r, m, n, signs in tqdm(candidates, disable=not progress, desc="oracle"):
        hit = SearchHit(r, m, n, signs)
        if is_permutation_full(ctx, hit.trinomial(ctx)).is_permutation:
            hits.append(hit)
    return sorted(hits, key=lambda hit: (hit.r, hit.m, hit.n, hit.signs))


@dataclass
class Explanation:
    hit: SearchHit
    family: Optional[str] = None
    l: Optional[int] = None
    d: Optional[int] = None
    frac: Optional[str] = None


def known_instances(
    ctx: FieldCtx, known: Iterable[FamilySpec]
) -> Dict[Tuple, List[Tuple[FamilySpec, int, Trinomial]]]:
    """Instantiates families over ctx for l in [0, q - 2], bucketed by invariant."""
    k = ctx.k
    buckets: Dict[Tuple, List[Tuple[FamilySpec, int, Trinomial]]] = {}
    for spec in known:
        if spec.char != ctx.p:
            continue
        for l in (range(ctx.q - 1) if spec.uses_l else [0]):
            try:
                f = instantiate(spec, k, l)
                f = Trinomial(ctx, f.exps, f.signs)
            except DegenerateInstance:
                continue
            buckets.setdefault(invariant_key(f), []).append((spec, l, f))
    return buckets


def novelty_filter(
    hits: Sequence[SearchHit],
    known: Optional[Sequence[FamilySpec]],
    ctx: FieldCtx
) -> Tuple[List[Explanation], List[Explanation]]:
    """Splits hits into those equivalent to a known family member and the rest.

    Unexplained hits carry their fractional polynomial in display form.
    """
    if known is None:
        known = families_for_char(ctx.p)
    buckets = known_instances(ctx, known)
    explained, unexplained = [], []
    for hit in hits:
        f = hit.trinomial(ctx)
        match = None
        for spec, l, g in buckets.get(invariant_key(f), []):
            witness = mult_equivalent(ctx, f, g)
            if witness is not None:
                match = Explanation(hit, spec.id.value, l, witness.d)
                break
        if match is None:
            frac = fractional_form(hit.r, hit.h(), ctx.q)
            unexplained.append(Explanation(hit, frac=render_frac(frac)))
        else:
            explained.append(match)
    logger.info(
        "%d hits explained by known families, %d unexplained",
        len(explained), len(unexplained)
    )
    return explained, unexplained
