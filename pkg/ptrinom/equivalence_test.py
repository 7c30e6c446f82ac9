"""Unit tests for multiplicative equivalence and classification."""

import math

import numpy as np
import pytest

from ptrinom.equivalence import (
    EquivWitness,
    classify_inequivalent,
    frac_equivalent,
    frac_matches,
    invariant_key,
    mult_equivalent,
)
from ptrinom.families import FRACTIONAL_FAMILIES, get_family, instantiate
from ptrinom.field import build_field
from ptrinom.perm import fractional_form, is_permutation_full
from ptrinom.poly import (
    DegenerateInstance,
    DenominatorVanishes,
    Trinomial,
    parse_frac,
)

ZIEVE_FRAC = "(x^3+x^2+1)/(x^3+x+1)"
TAB1_FRAC = "(x^5+x+1)/(x^5+x^4+1)"


def _instances(ids, k=4, l=0):
    return {family_id: instantiate(get_family(family_id), k, l) for family_id in ids}


def test_equiv_witness():
    """Tests witness validation, inverse and composition."""
    witness = EquivWitness(166, 255)
    assert witness.inverse() == EquivWitness(106, 255)
    assert witness.compose(witness.inverse()).d == 1
    with pytest.raises(ValueError):
        EquivWitness(3, 255)


def test_exponent_sets_at_q16():
    """Tests the reduced exponents of the fractional families at q = 16."""
    instances = _instances(f.value for f in FRACTIONAL_FAMILIES)
    exps = {family_id: set(f.exps) for family_id, f in instances.items()}
    assert exps == {
        "zieve_t1": {3, 18, 48},
        "tab1": {3, 63, 243},
        "th3": {3, 48, 243},
        "rem2": {2, 32, 242},
        "tab2": {2, 62, 242},
        "th4": {1, 46, 241},
        "th5": {1, 61, 226},
    }


def test_mult_equivalent_th3_tab1():
    """Tests the two rows at q = 16, l = 0 are twists of each other."""
    ctx = build_field(2, 4)
    f = _instances(["th3", "tab1"])
    forward = mult_equivalent(ctx, f["th3"], f["tab1"])
    backward = mult_equivalent(ctx, f["tab1"], f["th3"])
    assert forward.d == 166
    assert backward.d == 106
    assert forward.inverse() == backward


def test_mult_equivalent_identity_and_failure():
    """Tests d = 1 for equal trinomials and None for different invariants."""
    ctx = build_field(2, 4)
    f = _instances(["th3", "th4"])
    assert mult_equivalent(ctx, f["th3"], f["th3"]).d == 1
    assert mult_equivalent(ctx, f["th3"], f["th4"]) is None


def test_mult_equivalent_respects_signs():
    """Tests twists must carry signs with their exponents."""
    ctx = build_field(3, 1)
    f = Trinomial(ctx, (1, 3, 5), (1, 1, -1))
    g = Trinomial(ctx, (1, 3, 5), (1, -1, 1))
    assert mult_equivalent(ctx, f, g) is None
    assert mult_equivalent(ctx, f, f).d == 1


def test_mult_equivalent_rejects_other_fields():
    """Tests both trinomials must live over the given field."""
    with pytest.raises(ValueError):
        mult_equivalent(
            build_field(2, 3), instantiate(get_family("th3"), 4),
            instantiate(get_family("th3"), 4)
        )


def test_invariant_key():
    """Tests the key agrees on equivalent trinomials."""
    f = _instances(["th3", "tab1", "rem2"])
    assert invariant_key(f["th3"]) == invariant_key(f["tab1"])
    assert invariant_key(f["th3"]) != invariant_key(f["rem2"])


def test_classify_six_classes():
    """Tests the seven fractional families at q = 16 give six classes."""
    ctx = build_field(2, 4)
    ids = [f.value for f in FRACTIONAL_FAMILIES]
    items = list(_instances(ids).values())
    classes = classify_inequivalent(ctx, items)
    assert len(classes) == 6
    sizes = sorted(len(cls.members) for cls in classes)
    assert sizes == [1, 1, 1, 1, 1, 2]
    for cls in classes:
        for position, d in cls.witnesses.items():
            witness = mult_equivalent(ctx, items[position], cls.representative)
            assert witness.d == d


def test_classify_representative_is_smallest():
    """Tests the TH3 and TAB1 class is represented by the smaller triple."""
    ctx = build_field(2, 4)
    f = _instances(["tab1", "th3"])
    (cls,) = classify_inequivalent(ctx, [f["tab1"], f["th3"]])
    assert cls.representative == f["th3"]
    assert cls.witnesses == {0: 106, 1: 1}


def test_frac_equivalent_pointwise_coincidence():
    """Tests the two displayed fractions agree on mu_17 without twisting."""
    ctx = build_field(2, 4)
    witness = frac_equivalent(ctx, parse_frac(TAB1_FRAC), parse_frac(ZIEVE_FRAC))
    assert witness.d == 1
    assert frac_matches(ctx, parse_frac(TAB1_FRAC), parse_frac(ZIEVE_FRAC), 1)


def test_frac_equivalent_reciprocal_is_inversion():
    """Tests 1/g(x) = g(1/x) on mu_17, so the twist is d = q."""
    ctx = build_field(2, 4)
    g = parse_frac(ZIEVE_FRAC)
    witness = frac_equivalent(ctx, g, g.reciprocal())
    assert witness.d == 16
    assert frac_matches(ctx, g, g.reciprocal(), 16)
    assert not frac_matches(ctx, g, g.reciprocal(), 1)


def test_frac_equivalent_denominator_vanishes():
    """Tests a denominator with a root on mu_5 raises."""
    ctx = build_field(2, 2)
    with pytest.raises(DenominatorVanishes):
        frac_equivalent(ctx, parse_frac("(x)/(x+1)"), parse_frac(ZIEVE_FRAC))


def _random_trinomial(ctx):
    """Draws x^r h(x^{q-1}) with h = 1 +- x^m +- x^n and no exponent = 0."""
    modulus = ctx.order - 1
    while True:
        r = int(np.random.randint(1, modulus))
        picks = np.random.choice(np.arange(1, ctx.q + 1), 2, replace=False)
        m, n = sorted(int(e) for e in picks)
        exps = [(r + e * (ctx.q - 1)) % modulus for e in (0, m, n)]
        if 0 in exps:
            continue
        signs = [1, 1, 1]
        if ctx.p == 3:
            signs = [1] + [int(s) for s in np.random.choice([1, -1], 2)]
        try:
            return Trinomial(ctx, exps, signs)
        except DegenerateInstance:
            continue


def _random_unit(modulus):
    while True:
        d = int(np.random.randint(1, modulus))
        if math.gcd(d, modulus) == 1:
            return d


def _twist(f, d):
    """Returns f(x^d)."""
    modulus = f.ctx.order - 1
    return Trinomial(f.ctx, [e * d % modulus for e in f.exps], f.signs)


FIELDS = [(2, 2), (2, 3), (3, 1), (3, 2)]


@pytest.mark.parametrize(["p", "k"], FIELDS)
def test_mult_equivalent_is_an_equivalence(p, k):
    """Tests reflexivity, symmetry and transitivity on random twists."""
    np.random.seed(5)
    ctx = build_field(p, k)
    modulus = ctx.order - 1
    for _ in range(20):
        f = _random_trinomial(ctx)
        assert mult_equivalent(ctx, f, f) == EquivWitness(1, modulus)

        d1, d2 = _random_unit(modulus), _random_unit(modulus)
        g = _twist(f, d1)
        h = _twist(g, d2)
        forward = mult_equivalent(ctx, g, f)
        assert forward is not None
        assert _twist(f, forward.d) == g
        backward = mult_equivalent(ctx, f, g)
        assert backward is not None
        assert _twist(g, backward.d) == f
        assert mult_equivalent(ctx, h, g) is not None
        assert mult_equivalent(ctx, h, f) is not None


@pytest.mark.parametrize(["p", "k"], FIELDS)
def test_equivalent_trinomials_share_permutation_status(p, k):
    """Tests x -> x^d with gcd(d, q^2 - 1) = 1 preserves bijectivity."""
    np.random.seed(6)
    ctx = build_field(p, k)
    for _ in range(20):
        f = _random_trinomial(ctx)
        g = _twist(f, _random_unit(ctx.order - 1))
        assert (
            is_permutation_full(ctx, f).is_permutation
            == is_permutation_full(ctx, g).is_permutation
        )


@pytest.mark.parametrize(["p", "k"], FIELDS)
def test_twist_carries_over_to_fractions(p, k):
    """Tests f(x^d) has fraction g(x^d) on mu_{q+1}, d taken mod q + 1."""
    np.random.seed(7)
    ctx = build_field(p, k)
    checked = 0
    for _ in range(30):
        f = _random_trinomial(ctx)
        d = _random_unit(ctx.order - 1)
        g = _twist(f, d)
        g_f = fractional_form(*f.lemma1_form(), ctx.q)
        g_g = fractional_form(*g.lemma1_form(), ctx.q)
        try:
            assert frac_matches(ctx, g_f, g_g, d % (ctx.q + 1))
            assert frac_equivalent(ctx, g_f, g_g) is not None
        except DenominatorVanishes:
            continue
        checked += 1
    assert checked > 0
