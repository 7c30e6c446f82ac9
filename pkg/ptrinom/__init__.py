from ptrinom.field import (
    FieldCtx,
    build_field,
    arith,
    power,
    frobenius_q,
    trace_norm,
    trace_power_reduction,
    mu_subgroup,
    is_square
)
from ptrinom.poly import (
    SparsePoly,
    FracPoly,
    Trinomial,
    normalize_exponents,
    eval_poly,
    eval_frac,
    parse_poly,
    parse_frac
)
from ptrinom.perm import (
    PermVerdict,
    is_permutation_full,
    permutes_mu,
    lemma1_check,
    fractional_form
)
from ptrinom.families import (
    FamilyId,
    FamilySpec,
    VerificationReport,
    get_family,
    instantiate,
    verify_family
)
from ptrinom.equivalence import (
    mult_equivalent,
    frac_equivalent,
    classify_inequivalent
)
from ptrinom.search import SearchSpace, search_space, novelty_filter
