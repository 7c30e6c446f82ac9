"""Sparse Laurent polynomials, trinomials and fractional polynomials."""

import re
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from ptrinom.field import Elt, FieldCtx, power

COEFF = Union[int, galois.FieldArray]
TERM = Tuple[int, COEFF]


class DegenerateInstance(ValueError):
    pass


class DenominatorVanishes(ZeroDivisionError):
    """Raised when a denominator evaluates to zero at some element."""
    def __init__(self, element: int, message: Optional[str] = None) -> None:
        self.element = element
        super().__init__(
            message or f"Denominator vanishes at element {element}."
        )


def _is_zero(coeff: COEFF) -> bool:
    return int(coeff) == 0


def _signed_residue(value: int, p: int) -> int:
    value %= p
    return value - p if 2 * value > p else value


def _canonical_coeff(coeff: COEFF, p: Optional[int]) -> COEFF:
    """Stores prime subfield elements as signed ints, e.g. 2 in GF(3) as -1.

    Plain ints are reduced only when the characteristic p is known.
    """
    if isinstance(coeff, galois.FieldArray):
        char = type(coeff).characteristic
        if p is not None and p != char:
            raise ValueError(
                f"Coefficient {coeff} lies in characteristic {char} but p = {p}."
            )
        if int(coeff) < char:
            return _signed_residue(int(coeff), char)
        return coeff
    if p is not None:
        return _signed_residue(int(coeff), p)
    return int(coeff)


def _coeff_key(coeff: COEFF) -> Tuple[str, int]:
    if isinstance(coeff, galois.FieldArray):
        return "elt", int(coeff)
    return "int", int(coeff)


class SparsePoly:
    """A Laurent polynomial stored as (exponent, coefficient) terms.

    Coefficients are either integers, read in the prime subfield of
    whatever field the polynomial is evaluated over, or field elements.
    Field elements of the prime subfield are stored as signed integers, so
    equality and rendering do not depend on how a coefficient was built.
    With p given, integer coefficients are reduced modulo p as well.
    """
    def __init__(self, terms: Iterable[TERM], p: Optional[int] = None) -> None:
        terms = [(int(e), _canonical_coeff(c, p)) for e, c in terms]
        exponents = [e for e, _ in terms]
        if len(set(exponents)) != len(exponents):
            raise ValueError(f"Exponents must be distinct but are {exponents}.")
        if any(_is_zero(c) for _, c in terms):
            raise ValueError("Coefficients must be nonzero.")
        self._terms = tuple(sorted(terms, key=lambda term: term[0]))

    @classmethod
    def from_dict(cls, terms: dict) -> "SparsePoly":
        return cls(terms.items())

    @classmethod
    def one(cls) -> "SparsePoly":
        return cls([(0, 1)])

    @classmethod
    def monomial(cls, exponent: int, coeff: COEFF = 1) -> "SparsePoly":
        return cls([(exponent, coeff)])

    @property
    def terms(self) -> Tuple[TERM, ...]:
        return self._terms

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(e for e, _ in self._terms)

    @property
    def coefficients(self) -> Tuple[COEFF, ...]:
        return tuple(c for _, c in self._terms)

    @property
    def degree(self) -> int:
        return self._terms[-1][0]

    @property
    def low_degree(self) -> int:
        return self._terms[0][0]

    @property
    def is_laurent(self) -> bool:
        return self.low_degree < 0

    @property
    def has_integer_coefficients(self) -> bool:
        return not any(
            isinstance(c, galois.FieldArray) for c in self.coefficients
        )

    def coefficient(self, exponent: int) -> COEFF:
        for e, c in self._terms:
            if e == exponent:
                return c
        return 0

    def shift(self, s: int) -> "SparsePoly":
        """Returns x^s times this polynomial."""
        return SparsePoly((e + s, c) for e, c in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def _key(self):
        return tuple((e, _coeff_key(c)) for e, c in self._terms)

    def __repr__(self) -> str:
        return f"SparsePoly({render_poly(self)!r})"

    def __str__(self) -> str:
        return render_poly(self)


class FracPoly:
    """A ratio num/den of sparse polynomials, meant to be read on mu_{q+1}.

    The shift records the power x^shift that was multiplied into both
    numerator and denominator to clear negative exponents.
    """
    def __init__(self, num: SparsePoly, den: SparsePoly, shift: int = 0) -> None:
        if len(den) == 0:
            raise ValueError("Denominator is identically zero.")
        self._num = num
        self._den = den
        self._shift = shift

    @classmethod
    def cleared(cls, num: SparsePoly, den: SparsePoly) -> "FracPoly":
        """Multiplies through by a power of x so all exponents are >= 0."""
        low = min(num.low_degree, den.low_degree)
        shift = -low if low < 0 else 0
        return cls(num.shift(shift), den.shift(shift), shift)

    @property
    def num(self) -> SparsePoly:
        return self._num

    @property
    def den(self) -> SparsePoly:
        return self._den

    @property
    def shift(self) -> int:
        return self._shift

    def reciprocal(self) -> "FracPoly":
        return FracPoly(self._den, self._num, self._shift)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FracPoly):
            return NotImplemented
        return (self._num, self._den) == (other.num, other.den)

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def __repr__(self) -> str:
        return f"FracPoly({render_frac(self)!r})"

    def __str__(self) -> str:
        return render_frac(self)


def normalize_exponents(raw_exps: Sequence[int], q2m1: int) -> Tuple[int, ...]:
    """Maps each exponent into [1, q2m1] without changing x^e on F_{q^2}.

    Raises:
        DegenerateInstance: If an exponent e <= 0 is divisible by q2m1, so
            the monomial would become a constant.
    """
    reduced = []
    for e in raw_exps:
        if e <= 0 and e % q2m1 == 0:
            raise DegenerateInstance(
                f"Exponent {e} is a multiple of {q2m1} and not positive."
            )
        reduced.append((e - 1) % q2m1 + 1)
    return tuple(reduced)


class Trinomial:
    """A trinomial x^a +- x^b +- x^c over F_{q^2} with a > b > c >= 1."""
    def __init__(
        self,
        ctx: FieldCtx,
        exps: Sequence[int],
        signs: Sequence[int] = (1, 1, 1)
    ) -> None:
        if len(exps) != 3 or len(signs) != 3:
            raise ValueError("A trinomial needs exactly three terms.")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"Signs must be 1 or -1 but are {tuple(signs)}.")

        exps = normalize_exponents(exps, ctx.order - 1)
        if len(set(exps)) != 3:
            raise DegenerateInstance(
                f"Exponents {exps} collide after reduction mod {ctx.order - 1}."
            )
        ordered = sorted(zip(exps, signs), reverse=True)
        self._ctx = ctx
        self._exps = tuple(e for e, _ in ordered)
        self._signs = tuple(int(s) for _, s in ordered)

    @property
    def ctx(self) -> FieldCtx:
        return self._ctx

    @property
    def exps(self) -> Tuple[int, int, int]:
        return self._exps

    @property
    def signs(self) -> Tuple[int, int, int]:
        return self._signs

    @property
    def terms(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(zip(self._exps, self._signs))

    def as_sparse(self) -> SparsePoly:
        return SparsePoly(self.terms, p=self._ctx.p)

    def lemma1_form(self) -> Optional[Tuple[int, SparsePoly]]:
        """Returns (r, h) with f = x^r h(x^{q-1}), or None if f has no such form.

        r is the smallest exponent and h has nonnegative exponents.
        """
        step = self._ctx.q - 1
        low = self._exps[-1]
        if any((e - low) % step for e in self._exps):
            return None
        h = SparsePoly(
            (((e - low) // step, s) for e, s in self.terms), p=self._ctx.p
        )
        return low, h

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trinomial):
            return NotImplemented
        return (self._ctx, self.terms) == (other.ctx, other.terms)

    def __hash__(self) -> int:
        return hash((self._ctx, self.terms))

    def __repr__(self) -> str:
        return f"Trinomial({self}, over {self._ctx})"

    def __str__(self) -> str:
        return render_poly(self.as_sparse())


def field_coefficient(ctx: FieldCtx, coeff: COEFF) -> Elt:
    if isinstance(coeff, galois.FieldArray):
        return ctx.gf(int(coeff))
    return ctx.gf(int(coeff) % ctx.p)


def eval_poly(
    ctx: FieldCtx, poly: Union[SparsePoly, Trinomial], x: Elt
) -> Elt:
    """Evaluates a polynomial at a scalar or an array of elements.

    Raises:
        NegativeExponentAtZero: If a negative exponent meets x = 0.
    """
    if isinstance(poly, Trinomial):
        poly = poly.as_sparse()
    x = ctx.gf(x)
    total = ctx.gf.Zeros(x.shape)
    for e, c in poly.terms:
        total = total + field_coefficient(ctx, c) * power(ctx, x, e)
    return total


def eval_frac(ctx: FieldCtx, g: FracPoly, x: Elt) -> Elt:
    """Evaluates num(x) / den(x).

    Raises:
        DenominatorVanishes: At the first x (in array order) where den is 0.
    """
    x = ctx.gf(x)
    den = eval_poly(ctx, g.den, x)
    zeros = np.flatnonzero(np.atleast_1d(den == 0))
    if zeros.size:
        bad = np.atleast_1d(x)[zeros[0]]
        raise DenominatorVanishes(int(bad))
    return eval_poly(ctx, g.num, x) / den


def _render_coeff(coeff: COEFF) -> Tuple[str, str]:
    if isinstance(coeff, galois.FieldArray):
        return "+", f"[{int(coeff)}]"
    value = int(coeff)
    sign = "-" if value < 0 else "+"
    magnitude = abs(value)
    return sign, "" if magnitude == 1 else str(magnitude)


def render_poly(poly: SparsePoly) -> str:
    """Renders terms in descending order, e.g. x^5+x^4+x or -x^7+x^3+x."""
    if len(poly) == 0:
        return "0"
    pieces = []
    for e, c in reversed(poly.terms):
        sign, magnitude = _render_coeff(c)
        if e == 0:
            body = magnitude or "1"
        elif e == 1:
            body = f"{magnitude}x"
        else:
            body = f"{magnitude}x^{e}"
        pieces.append((sign, body))
    text = "".join(f"{sign}{body}" for sign, body in pieces)
    return text[1:] if text.startswith("+") else text


def render_frac(g: FracPoly) -> str:
    return f"({render_poly(g.num)})/({render_poly(g.den)})"


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coeff>\d+)?\s*\*?\s*"
    r"(?:(?P<x>x)(?:\s*\^\s*\{?\(?\s*(?P<exp>-?\d+)\s*\)?\}?)?)?"
)


def parse_poly(text: str, p: Optional[int] = None) -> SparsePoly:
    """Parses the textual form used in reports, e.g. "-x^7+x^3+x".

    With p given, coefficients are reduced modulo p and terms that vanish
    are dropped.
    """
    terms: List[TERM] = []
    position = 0
    text = text.strip()
    while position < len(text):
        match = _TERM.match(text, position)
        if match is None or match.end() == position or (
            match.group("coeff") is None and match.group("x") is None
        ):
            raise ValueError(f"Cannot parse polynomial {text!r} at {position}.")
        if terms and match.group("sign") is None:
            raise ValueError(f"Missing sign before term in {text!r}.")
        value = int(match.group("coeff") or 1)
        if match.group("sign") == "-":
            value = -value
        if match.group("x") is None:
            exponent = 0
        else:
            exponent = int(match.group("exp") or 1)
        terms.append((exponent, value))
        position = match.end()
    merged = {}
    for e, c in terms:
        merged[e] = merged.get(e, 0) + c
    if p is not None:
        merged = {e: c % p for e, c in merged.items()}
    return SparsePoly(((e, c) for e, c in merged.items() if c != 0), p=p)


def parse_frac(text: str, p: Optional[int] = None) -> FracPoly:
    """Parses "(num)/(den)"; a bare polynomial is read over denominator 1."""
    text = text.strip()
    match = re.fullmatch(r"\((?P<num>[^()]*)\)\s*/\s*\((?P<den>[^()]*)\)", text)
    if match is None:
        return FracPoly(parse_poly(text, p), SparsePoly.one())
    return FracPoly(
        parse_poly(match.group("num"), p), parse_poly(match.group("den"), p)
    )
