"""Trinomial families as data, with instantiation and batch verification."""

import enum
import functools
import logging
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)
from tqdm import tqdm

from ptrinom.field import build_field
from ptrinom.perm import (
    EngineDisagreement,
    Method,
    PermVerdict,
    fractional_form,
    is_permutation_full,
    lemma1_check,
    permutes_mu,
    values_on_mu,
)
from ptrinom.poly import (
    DegenerateInstance,
    DenominatorVanishes,
    FracPoly,
    SparsePoly,
    Trinomial,
    parse_frac,
)

logger = logging.getLogger(__name__)

Q, L = sympy.symbols("q l")
_TRANSFORMATIONS = standard_transformations + (
    convert_xor, implicit_multiplication_application
)


class FamilyId(str, enum.Enum):
    # Characteristic 2
    LQC_T48 = "lqc_t48"
    HOU_Q = "hou_q"
    LQC_ODD = "lqc_odd"
    DQ = "dq"
    ZIEVE_T1 = "zieve_t1"
    TAB1 = "tab1"
    REM2 = "rem2"
    TAB2 = "tab2"
    TH3 = "th3"
    TH4 = "th4"
    TH5 = "th5"
    # Characteristic 3
    C3_3P1 = "c3_3p1"
    C3_3P2 = "c3_3p2"
    COR1 = "cor1"
    COR2 = "cor2"
    CONJ1A = "conj1a"
    CONJ1B = "conj1b"
    CONJ1C = "conj1c"
    # Fractional polynomial claims on mu_{q+1}
    CONJ2A = "conj2a"
    CONJ2B = "conj2b"
    CONJ2C = "conj2c"


class ClaimKind(str, enum.Enum):
    IFF = "iff"
    SUFFICIENT = "sufficient"
    CONJECTURED = "conjectured"
    CITED = "cited"


class Relation(str, enum.Enum):
    """How the displayed fraction relates to fractional_form of the row."""
    SAME = "same"
    RECIPROCAL = "reciprocal"


# Conditions are conjunctions of small atoms on (k, l, q).

@dataclass(frozen=True)
class KEven:
    def holds(self, k: int, l: int, q: int) -> bool:
        return k % 2 == 0

    def __str__(self) -> str:
        return "k even"


@dataclass(frozen=True)
class KOdd:
    def holds(self, k: int, l: int, q: int) -> bool:
        return k % 2 == 1

    def __str__(self) -> str:
        return "k odd"


@dataclass(frozen=True)
class KPositive:
    def holds(self, k: int, l: int, q: int) -> bool:
        return k > 0

    def __str__(self) -> str:
        return "k positive"


@dataclass(frozen=True)
class KCoprime:
    """gcd(m, k) = 1."""
    m: int

    def holds(self, k: int, l: int, q: int) -> bool:
        return math.gcd(self.m, k) == 1

    def __str__(self) -> str:
        return f"gcd({self.m},k)=1"


@dataclass(frozen=True)
class KResidue:
    """k mod modulus lies in residues (or outside them if negated)."""
    residues: Tuple[int, ...]
    modulus: int
    negated: bool = False

    def holds(self, k: int, l: int, q: int) -> bool:
        inside = k % self.modulus in self.residues
        return not inside if self.negated else inside

    def __str__(self) -> str:
        residues = ",".join(str(r) for r in self.residues)
        relation = "!≡" if self.negated else "≡"
        return f"k{relation}{residues} mod {self.modulus}"


@dataclass(frozen=True)
class GcdQMinus1:
    """gcd(a*l + b, q - 1) = 1."""
    a: int
    b: int

    def holds(self, k: int, l: int, q: int) -> bool:
        return math.gcd(self.a * l + self.b, q - 1) == 1

    def __str__(self) -> str:
        coefficient = "" if self.a == 1 else str(self.a)
        return f"gcd({coefficient}l+{self.b},q-1)=1"


@dataclass(frozen=True)
class Condition:
    atoms: Tuple = ()

    def holds(self, k: int, l: int, q: int) -> bool:
        return all(atom.holds(k, l, q) for atom in self.atoms)

    def __str__(self) -> str:
        return " && ".join(str(atom) for atom in self.atoms) or "true"


@dataclass(frozen=True)
class FamilySpec:
    """A trinomial family with exponents as printed formulas in (q, l).

    For families of the form x^r h(x^{q-1}) with a fixed h, r0 and h give
    r = r0 + (q + 1) l, and frac is the displayed fractional polynomial.
    """
    id: FamilyId
    char: int
    exponents: Tuple[str, str, str]
    signs: Tuple[int, int, int]
    condition: Condition
    claim_kind: ClaimKind
    r0: Optional[int] = None
    h: Optional[SparsePoly] = None
    frac: Optional[str] = None
    relation: Relation = Relation.SAME
    uses_l: bool = True
    source: str = ""

    def r(self, q: int, l: int) -> int:
        if self.r0 is None:
            raise ValueError(f"Family {self.id.value} has no fixed h.")
        return self.r0 + (q + 1) * l

    @property
    def display_frac(self) -> Optional[FracPoly]:
        return None if self.frac is None else parse_frac(self.frac)


@dataclass(frozen=True)
class FracClaim:
    """A claim that a fixed fraction permutes mu_{q+1} for q = p^k."""
    id: FamilyId
    char: int
    frac: str
    condition: Condition
    claim_kind: ClaimKind = ClaimKind.CONJECTURED


def _h(*terms: Tuple[int, int]) -> SparsePoly:
    return SparsePoly(terms)


FAMILIES: Tuple[FamilySpec, ...] = (
    FamilySpec(
        FamilyId.LQC_T48, 2, ("1", "q", "q^2/2-q/2+1"), (1, 1, 1),
        Condition((KCoprime(3),)), ClaimKind.CITED, uses_l=False,
        source="known",
    ),
    FamilySpec(
        FamilyId.HOU_Q, 2, ("1", "q", "2q-1"), (1, 1, 1),
        Condition((KPositive(),)), ClaimKind.CITED, uses_l=False,
        source="known",
    ),
    FamilySpec(
        FamilyId.LQC_ODD, 2, ("1", "q+2", "q^2/2+q/2+1"), (1, 1, 1),
        Condition((KOdd(),)), ClaimKind.CITED, uses_l=False,
        source="known",
    ),
    FamilySpec(
        FamilyId.DQ, 2, ("1", "lq-(l-1)", "q^2-lq+l"), (1, 1, 1),
        Condition((KPositive(),)), ClaimKind.CITED,
        source="known",
    ),
    FamilySpec(
        FamilyId.ZIEVE_T1, 2, ("lq+l+3", "(l+1)q+l+2", "(l+3)q+l"), (1, 1, 1),
        Condition((GcdQMinus1(2, 3),)), ClaimKind.IFF,
        r0=3, h=_h((0, 1), (1, 1), (3, 1)),
        frac="(x^3+x^2+1)/(x^3+x+1)", source="known",
    ),
    FamilySpec(
        FamilyId.TAB1, 2, ("lq+l+3", "(l+4)q+l-1", "(l-1)q+l+4"), (1, 1, 1),
        Condition((KEven(), GcdQMinus1(2, 3))), ClaimKind.SUFFICIENT,
        r0=3, h=_h((-1, 1), (0, 1), (4, 1)),
        frac="(x^5+x+1)/(x^5+x^4+1)", relation=Relation.RECIPROCAL,
        source="theorem",
    ),
    FamilySpec(
        FamilyId.REM2, 2, ("lq+l+2", "(l+2)q+l", "(l-1)q+l+3"), (1, 1, 1),
        Condition((KCoprime(3), GcdQMinus1(1, 1))), ClaimKind.SUFFICIENT,
        r0=2, h=_h((-1, 1), (0, 1), (2, 1)),
        frac="(x^4+x^3+x)/(x^3+x+1)", source="remark",
    ),
    FamilySpec(
        FamilyId.TAB2, 2, ("lq+l+2", "(l+4)q+l-2", "(l-1)q+l+3"), (1, 1, 1),
        Condition((KResidue((2, 4), 6), GcdQMinus1(1, 1))),
        ClaimKind.SUFFICIENT,
        r0=2, h=_h((-1, 1), (0, 1), (4, 1)),
        frac="(x^6+x^2+x)/(x^5+x^4+1)", relation=Relation.RECIPROCAL,
        source="theorem",
    ),
    FamilySpec(
        FamilyId.TH3, 2, ("lq+l+3", "(l+3)q+l", "(l-1)q+l+4"), (1, 1, 1),
        Condition((KResidue((2,), 4, negated=True), GcdQMinus1(2, 3))),
        ClaimKind.SUFFICIENT,
        r0=3, h=_h((-1, 1), (0, 1), (3, 1)),
        frac="(x^5+x^4+x)/(x^4+x+1)", source="theorem",
    ),
    FamilySpec(
        FamilyId.TH4, 2, ("lq+l+1", "(l+3)q+l-2", "(l-1)q+l+2"), (1, 1, 1),
        Condition((KEven(), GcdQMinus1(2, 1))), ClaimKind.SUFFICIENT,
        r0=1, h=_h((-1, 1), (0, 1), (3, 1)),
        frac="(x^4+x^3+1)/(x^5+x^2+x)", source="theorem",
    ),
    FamilySpec(
        FamilyId.TH5, 2, ("lq+l+1", "(l+4)q+l-3", "(l-2)q+l+3"), (1, 1, 1),
        Condition((KCoprime(3), GcdQMinus1(2, 1))), ClaimKind.SUFFICIENT,
        r0=1, h=_h((-2, 1), (0, 1), (4, 1)),
        frac="(x^6+x^4+1)/(x^7+x^3+x)", source="theorem",
    ),
    FamilySpec(
        FamilyId.C3_3P1, 3, ("1", "2q-1", "q^2-2q+2"), (1, -1, 1),
        Condition((KResidue((0,), 4, negated=True),)), ClaimKind.SUFFICIENT,
        r0=1, h=_h((-2, 1), (0, 1), (2, -1)),
        frac="(x^5+x^3-x)/(-x^4+x^2+1)", uses_l=False, source="theorem",
    ),
    FamilySpec(
        FamilyId.C3_3P2, 3, ("1", "3q-2", "q^2-q+1"), (1, 1, -1),
        Condition((KOdd(),)), ClaimKind.SUFFICIENT,
        r0=1, h=_h((-1, -1), (0, 1), (3, 1)),
        frac="(-x^4+x^3+1)/(x^5+x^2-x)", uses_l=False, source="theorem",
    ),
    # Signs follow r = lq+l+1 and h = 1-x^2+x^{-2}; the printed row with
    # signs (+, +, -) is the trinomial of conj1c.
    FamilySpec(
        FamilyId.COR1, 3, ("lq+l+1", "(l+2)q+l-1", "(l-2)q+l+3"), (1, -1, 1),
        Condition((KResidue((0,), 4, negated=True), GcdQMinus1(2, 1))),
        ClaimKind.SUFFICIENT,
        r0=1, h=_h((-2, 1), (0, 1), (2, -1)),
        frac="(x^5+x^3-x)/(-x^4+x^2+1)", source="corollary",
    ),
    FamilySpec(
        FamilyId.COR2, 3, ("lq+l+1", "(l+3)q+l-2", "(l-1)q+l+2"), (1, 1, -1),
        Condition((KOdd(), GcdQMinus1(2, 1))), ClaimKind.SUFFICIENT,
        r0=1, h=_h((-1, -1), (0, 1), (3, 1)),
        frac="(-x^4+x^3+1)/(x^5+x^2-x)", source="corollary",
    ),
    FamilySpec(
        FamilyId.CONJ1A, 3, ("lq+l+5", "(l+5)q+l", "(l-1)q+l+6"), (1, 1, -1),
        Condition((KEven(), GcdQMinus1(2, 5))), ClaimKind.CONJECTURED,
        r0=5, h=_h((-1, -1), (0, 1), (5, 1)),
        frac="(-x^7+x^6+x)/(x^6+x-1)", source="conjecture",
    ),
    FamilySpec(
        FamilyId.CONJ1B, 3, ("lq+l+1", "(l+4)q+l-3", "(l-2)q+l+3"), (1, -1, 1),
        Condition((GcdQMinus1(2, 1),)), ClaimKind.CONJECTURED,
        r0=1, h=_h((-2, 1), (0, 1), (4, -1)),
        frac="(x^6+x^4-1)/(-x^7+x^3+x)", source="conjecture",
    ),
    FamilySpec(
        FamilyId.CONJ1C, 3, ("lq+l+1", "(l+2)q+l-1", "(l-2)q+l+3"), (1, 1, -1),
        Condition((KResidue((2,), 4, negated=True), GcdQMinus1(2, 1))),
        ClaimKind.CONJECTURED,
        r0=1, h=_h((-2, -1), (0, 1), (2, 1)),
        frac="(-x^5+x^3+x)/(x^4+x^2-1)", source="conjecture",
    ),
)

FRACTION_CLAIMS: Tuple[FracClaim, ...] = (
    FracClaim(
        FamilyId.CONJ2A, 3, "(-x^7+x^3+x)/(x^6+x^4-1)", Condition((KEven(),))
    ),
    FracClaim(FamilyId.CONJ2B, 3, "(x^6+x^4-1)/(-x^7+x^3+x)", Condition()),
    FracClaim(
        FamilyId.CONJ2C, 3, "(-x^5+x^3+x)/(x^4+x^2-1)",
        Condition((KResidue((2,), 4, negated=True),))
    ),
)

# Rows of the comparison table over F_{2^{2k}}: known rows, then new rows.
TABLE_ROWS: Tuple[FamilyId, ...] = (
    FamilyId.LQC_T48, FamilyId.HOU_Q, FamilyId.LQC_ODD, FamilyId.DQ,
    FamilyId.ZIEVE_T1,
    FamilyId.TAB1, FamilyId.REM2, FamilyId.TAB2, FamilyId.TH3, FamilyId.TH4,
    FamilyId.TH5,
)

# Families whose displayed fractions are compared for equivalence.
FRACTIONAL_FAMILIES: Tuple[FamilyId, ...] = (
    FamilyId.TAB1, FamilyId.TAB2, FamilyId.TH3, FamilyId.TH4, FamilyId.TH5,
    FamilyId.ZIEVE_T1, FamilyId.REM2,
)

_BY_ID: Dict[FamilyId, Union[FamilySpec, FracClaim]] = {
    item.id: item for item in FAMILIES + FRACTION_CLAIMS
}


def get_family(family_id: Union[str, FamilyId]) -> Union[FamilySpec, FracClaim]:
    """Looks up a family or fraction claim by its id, e.g. "th3"."""
    try:
        return _BY_ID[FamilyId(family_id)]
    except ValueError:
        raise ValueError(
            f"Unknown family {family_id!r}. Known: "
            f"{', '.join(f.value for f in FamilyId)}."
        ) from None


def families_for_char(p: int) -> List[FamilySpec]:
    return [spec for spec in FAMILIES if spec.char == p]


@functools.lru_cache(maxsize=None)
def exponent_expr(text: str) -> sympy.Expr:
    """Parses a printed exponent such as "(l-1)q+l+4" into q, l."""
    return parse_expr(
        text, local_dict={"q": Q, "l": L}, transformations=_TRANSFORMATIONS
    )


@functools.lru_cache(maxsize=None)
def raw_exponents(spec: FamilySpec, k: int, l: int) -> Tuple[int, ...]:
    q = spec.char ** k
    values = []
    for text in spec.exponents:
        value = exponent_expr(text).subs({Q: q, L: l})
        if not value.is_integer:
            raise ValueError(
                f"Exponent {text} is not an integer at q = {q}, l = {l}."
            )
        values.append(int(value))
    return tuple(values)


def instantiate(spec: FamilySpec, k: int, l: int = 0) -> Trinomial:
    """Returns the family member over F_{q^2}, q = char^k.

    Raises:
        DegenerateInstance: If two exponents coincide after reduction, or
            one reduces to a constant.
    """
    if l < 0:
        raise ValueError(f"Parameter l must be nonnegative but is {l}.")
    ctx = build_field(spec.char, k)
    return Trinomial(ctx, raw_exponents(spec, k, l), spec.signs)


def conditions_hold(
    spec: Union[FamilySpec, FracClaim], k: int, l: int = 0
) -> bool:
    return spec.condition.holds(k, l, spec.char ** k)


def expectation(
    claim_kind: ClaimKind, holds: bool
) -> Optional[bool]:
    """The asserted verdict for an instance, or None when nothing is claimed."""
    if claim_kind == ClaimKind.IFF:
        return holds
    if claim_kind in (ClaimKind.SUFFICIENT, ClaimKind.CONJECTURED) and holds:
        return True
    return None


@dataclass
class VerificationReport:
    """Outcome of checking one (family, k, l) instance."""
    family: str
    p: int
    k: int
    l: int
    q: int
    conditions_hold: bool
    verdict: Optional[PermVerdict]
    method: str
    elapsed_ms: float
    expected: Optional[bool] = None
    degenerate: bool = False
    detail: Optional[str] = None

    @property
    def is_permutation(self) -> Optional[bool]:
        return None if self.verdict is None else self.verdict.is_permutation

    @property
    def witness(self) -> Optional[Tuple[int, int]]:
        return None if self.verdict is None else self.verdict.witness

    @property
    def passed(self) -> bool:
        if self.degenerate or self.expected is None:
            return True
        return self.is_permutation == self.expected


def _check_trinomial(f: Trinomial, mode: str) -> PermVerdict:
    if mode == "full":
        return is_permutation_full(f.ctx, f)
    form = f.lemma1_form()
    if form is None:
        if mode == "lemma1":
            logger.info("%s has no x^r h(x^{q-1}) form, checking in full", f)
        return is_permutation_full(f.ctx, f)
    fast = lemma1_check(f.ctx, *form)
    if mode == "both":
        slow = is_permutation_full(f.ctx, f)
        if fast.is_permutation != slow.is_permutation:
            raise EngineDisagreement(
                f"lemma1 says {fast.is_permutation} but full field says "
                f"{slow.is_permutation} for {f!r}."
            )
    return fast


def _check_displayed(spec: FamilySpec, k: int, l: int) -> PermVerdict:
    """Checks gcd(r, q - 1) = 1 and that the displayed fraction permutes mu_{q+1}."""
    if spec.frac is None or spec.r0 is None:
        raise ValueError(f"Family {spec.id.value} has no displayed fraction.")
    ctx = build_field(spec.char, k)
    r = spec.r(ctx.q, l)
    if math.gcd(r, ctx.q - 1) != 1:
        return PermVerdict(
            False, Method.LEMMA1, None, f"gcd(r, q - 1) = {math.gcd(r, ctx.q - 1)}"
        )
    try:
        return permutes_mu(ctx, spec.display_frac, ctx.q + 1)
    except DenominatorVanishes as error:
        return PermVerdict(False, Method.LEMMA1, None, str(error))


def verify_instance(spec: FamilySpec, k: int, l: int, mode: str) -> VerificationReport:
    """Checks one member of a family.

    Modes lemma1, full and both check the trinomial itself; fraction checks
    the displayed fractional polynomial on mu_{q+1} together with the gcd
    condition on r.
    """
    if mode not in ("lemma1", "full", "both", "fraction"):
        raise ValueError(
            f"Mode must be lemma1, full, both or fraction but is {mode}."
        )
    q = spec.char ** k
    holds = conditions_hold(spec, k, l)
    start = time.perf_counter()
    try:
        f = instantiate(spec, k, l)
    except DegenerateInstance as error:
        logger.info("%s at k=%d, l=%d is degenerate: %s", spec.id.value, k, l, error)
        return VerificationReport(
            spec.id.value, spec.char, k, l, q, holds, None, mode,
            1000 * (time.perf_counter() - start), degenerate=True,
            detail=str(error),
        )
    if mode == "fraction":
        verdict = _check_displayed(spec, k, l)
    else:
        verdict = _check_trinomial(f, mode)
    report = VerificationReport(
        spec.id.value, spec.char, k, l, q, holds, verdict,
        mode if mode in ("both", "fraction") else verdict.method.value,
        1000 * (time.perf_counter() - start),
        expected=expectation(spec.claim_kind, holds),
        detail=str(f),
    )
    if not report.passed:
        logger.warning(
            "%s at k=%d, l=%d: expected %s but verdict is %s (witness %s)",
            spec.id.value, k, l, report.expected, report.is_permutation,
            report.witness,
        )
    return report


def verify_fraction_claim(claim: FracClaim, k: int) -> VerificationReport:
    """Checks whether the claimed fraction permutes mu_{q+1} over F_{q^2}."""
    ctx = build_field(claim.char, k)
    holds = conditions_hold(claim, k)
    start = time.perf_counter()
    try:
        verdict = permutes_mu(ctx, parse_frac(claim.frac), ctx.q + 1)
        detail = claim.frac
    except DenominatorVanishes as error:
        verdict = PermVerdict(False, Method.LEMMA1, None, str(error))
        detail = str(error)
    return VerificationReport(
        claim.id.value, claim.char, k, 0, ctx.q, holds, verdict,
        Method.LEMMA1.value, 1000 * (time.perf_counter() - start),
        expected=expectation(claim.claim_kind, holds), detail=detail,
    )


def _verify_task(args) -> VerificationReport:
    spec, k, l, mode = args
    if isinstance(spec, FracClaim):
        return verify_fraction_claim(spec, k)
    return verify_instance(spec, k, l, mode)


def verify_family(
    spec: Union[FamilySpec, FracClaim],
    k_range: Iterable[int],
    l_range: Iterable[int] = range(11),
    mode: str = "lemma1",
    negative: bool = False,
    workers: int = 1,
    progress: bool = False
) -> List[VerificationReport]:
    """Checks every (k, l) in range, ordered by (k, l).

    Instances whose conditions fail are only visited when negative is set;
    their verdicts are asserted for iff claims alone.
    """
    l_values = list(l_range) if getattr(spec, "uses_l", False) else [0]
    tasks = [
        (spec, k, l, mode)
        for k in k_range for l in l_values
        if negative or conditions_hold(spec, k, l)
    ]
    logger.info("Verifying %s on %d instances", spec.id.value, len(tasks))
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers) as pool:
            reports = list(tqdm(
                pool.imap(_verify_task, tasks), total=len(tasks),
                disable=not progress, desc=spec.id.value
            ))
    else:
        reports = [
            _verify_task(task)
            for task in tqdm(tasks, disable=not progress, desc=spec.id.value)
        ]
    return sorted(reports, key=lambda report: (report.k, report.l))


def coherence_failures(
    spec: FamilySpec, k: int, l_values: Sequence[int] = (0, 1, 2)
) -> List[int]:
    """Returns the l where fractional_form of the row differs from frac on mu.

    Both sides are compared pointwise on mu_{q+1} after applying the
    family's display relation. Instances with h vanishing on mu_{q+1} are
    skipped since neither side is defined there.
    """
    if spec.frac is None or spec.r0 is None:
        return []
    ctx = build_field(spec.char, k)
    displayed = spec.display_frac
    if spec.relation == Relation.RECIPROCAL:
        displayed = displayed.reciprocal()
    failures = []
    for l in l_values:
        derived = fractional_form(spec.r(ctx.q, l), spec.h, ctx.q)
        try:
            same = np.array_equal(
                values_on_mu(ctx, derived), values_on_mu(ctx, displayed)
            )
        except DenominatorVanishes:
            continue
        if not same:
            failures.append(l)
    return failures
