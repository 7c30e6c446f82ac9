"""Finite fields F_{p^n} with their quadratic subfield structure."""

import functools
import logging
from typing import Dict, Optional, Sequence, Tuple, Type, Union

import galois
import numpy as np

logger = logging.getLogger(__name__)

# Largest k (with n = 2k) accepted by build_field for each characteristic.
MAX_K = {2: 12, 3: 8}

Elt = galois.FieldArray
MODULUS = Tuple[int, ...]


class UnsupportedField(ValueError):
    pass


class DegreeOverflow(UnsupportedField):
    pass


class ReducibleModulus(ValueError):
    pass


class NegativeExponentAtZero(ZeroDivisionError):
    pass


class FieldCtx:
    """Immutable description of F_{p^n} used by every other module.

    Elements are galois FieldArray values. The index of an element is its
    integer representation, i.e. the radix-p encoding of its coefficients
    in the polynomial basis 1, t, t^2, ... of the defining modulus.
    """
    def __init__(self, gf: Type[galois.FieldArray]) -> None:
        self._gf = gf
        self._p = int(gf.characteristic)
        self._n = int(gf.degree)
        self._prime = galois.GF(self._p)
        self._modulus = tuple(
            int(c) for c in gf.irreducible_poly.coeffs[::-1]
        )
        self._gen = gf.primitive_element

        # Row i holds the coefficient vector of (basis_i)^p
        if self._n == 1:
            self._frob = self._prime.Identity(1)
        else:
            basis = gf.Vector(self._prime.Identity(self._n))
            self._frob = (basis ** self._p).vector()

        self._frob_q = None
        if self._n % 2 == 0:
            self._frob_q = self._prime.Identity(self._n)
            for _ in range(self._n // 2):
                self._frob_q = self._frob_q @ self._frob

    @property
    def gf(self) -> Type[galois.FieldArray]:
        return self._gf

    @property
    def prime_field(self) -> Type[galois.FieldArray]:
        return self._prime

    @property
    def p(self) -> int:
        return self._p

    @property
    def n(self) -> int:
        return self._n

    @property
    def order(self) -> int:
        """Number of elements p^n."""
        return self._p ** self._n

    @property
    def k(self) -> int:
        if self._n % 2:
            raise ValueError(
                f"F_{self._p}^{self._n} has no quadratic subfield structure."
            )
        return self._n // 2

    @property
    def q(self) -> int:
        """Order of the subfield F_q with q^2 = p^n."""
        return self._p ** self.k

    @property
    def modulus(self) -> MODULUS:
        """Coefficients of the defining modulus, constant term first."""
        return self._modulus

    @property
    def gen(self) -> Elt:
        return self._gen

    @property
    def frob_table(self) -> galois.FieldArray:
        """Matrix of x -> x^p acting on coefficient rows (galois order)."""
        return self._frob

    @property
    def frob_q_table(self) -> galois.FieldArray:
        if self._frob_q is None:
            raise ValueError(f"Degree {self._n} is odd, x -> x^q is undefined.")
        return self._frob_q

    def zero(self) -> Elt:
        return self._gf(0)

    def one(self) -> Elt:
        return self._gf(1)

    def element(self, value: Union[int, Sequence[int]]) -> Elt:
        """Returns the element with the given index or ascending coefficients."""
        if isinstance(value, (int, np.integer)):
            if not 0 <= value < self.order:
                raise ValueError(
                    f"Index must be in [0, {self.order}) but is {value}."
                )
            return self._gf(int(value))
        coeffs = [int(c) % self._p for c in value]
        if len(coeffs) != self._n:
            raise ValueError(
                f"Expected {self._n} coefficients but received {len(coeffs)}."
            )
        return self.from_vectors(self._prime(coeffs[::-1]))

    def index(self, x: Elt) -> int:
        return int(x)

    def indices(self, x: Elt) -> np.ndarray:
        return np.asarray(x.view(np.ndarray), dtype=np.int64)

    def coeffs(self, x: Elt) -> Tuple[int, ...]:
        """Coefficients of a scalar element, constant term first."""
        return tuple(int(c) for c in self.to_vectors(x)[::-1])

    def to_vectors(self, x: Elt) -> galois.FieldArray:
        if self._n == 1:
            return self._prime(x.view(np.ndarray))[..., np.newaxis]
        return x.vector()

    def from_vectors(self, vectors: galois.FieldArray) -> Elt:
        if self._n == 1:
            return self._gf(vectors.view(np.ndarray)[..., 0])
        return self._gf.Vector(vectors)

    def apply_linear(self, x: Elt, matrix: galois.FieldArray) -> Elt:
        """Applies an F_p-linear map given by its row images."""
        return self.from_vectors(self.to_vectors(x) @ matrix)

    def elements(self, start: int = 0, stop: Optional[int] = None) -> Elt:
        stop = self.order if stop is None else stop
        return self._gf.Range(start, stop)

    def is_in_subfield(self, x: Elt) -> bool:
        return bool(np.all(frobenius_q(self, x) == x))

    def __reduce__(self):
        return build_extension, (self._p, self._n, self._modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldCtx):
            return NotImplemented
        return (self._p, self._n, self._modulus) == (
            other.p, other.n, other.modulus
        )

    def __hash__(self) -> int:
        return hash((self._p, self._n, self._modulus))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self._p}, n={self._n}, modulus={self._modulus})"

    def __str__(self) -> str:
        return f"F_{self.order}"


def build_extension(
    p: int, n: int, modulus: Optional[Sequence[int]] = None
) -> FieldCtx:
    """Returns the field F_{p^n} for any degree n >= 1.

    Args:
        p: Characteristic, 2 or 3.
        n: Extension degree over F_p.
        modulus: Optional monic modulus of degree n, constant term first.
            When absent the lexicographically smallest monic irreducible
            polynomial is used.

    Raises:
        UnsupportedField: If p is not 2 or 3.
        ReducibleModulus: If the given modulus is reducible over F_p.
    """
    if modulus is not None:
        modulus = tuple(int(c) % p for c in modulus)
    return _build_extension(p, n, modulus)


@functools.lru_cache(maxsize=None)
def _build_extension(p: int, n: int, modulus: Optional[MODULUS]) -> FieldCtx:
    if p not in MAX_K:
        raise UnsupportedField(
            f"Characteristic must be one of {sorted(MAX_K)} but is {p}."
        )
    if n < 1:
        raise ValueError(f"Degree must be positive but is {n}.")

    prime = galois.GF(p)
    if modulus is None:
        if n == 1:
            gf = prime
        else:
            irreducible = galois.irreducible_poly(p, n, method="min")
            gf = _field_class(p, n, irreducible)
    else:
        if len(modulus) != n + 1:
            raise ValueError(
                f"Modulus must have degree {n} but has degree {len(modulus) - 1}."
            )
        if modulus[-1] != 1:
            raise ValueError(f"Modulus {modulus} is not monic.")
        irreducible = galois.Poly(list(modulus), field=prime, order="asc")
        if not irreducible.is_irreducible():
            raise ReducibleModulus(
                f"Modulus {irreducible} is reducible over GF({p})."
            )
        gf = prime if n == 1 else _field_class(p, n, irreducible)

    ctx = FieldCtx(gf)
    logger.debug(
        "Built %s with modulus %s and generator %d", ctx, ctx.modulus, int(ctx.gen)
    )
    return ctx


def _field_class(p: int, n: int, irreducible: galois.Poly):
    generator = galois.primitive_element(irreducible, method="min")
    return galois.GF(
        p ** n, irreducible_poly=irreducible, primitive_element=generator
    )


def build_field(
    p: int, k: int, modulus: Optional[Sequence[int]] = None
) -> FieldCtx:
    """Returns F_{q^2} with q = p^k, bounded to desk scale.

    Raises:
        UnsupportedField: If p is not 2 or 3.
        DegreeOverflow: If k is outside 1 <= k <= MAX_K[p].
        ReducibleModulus: If the given modulus is reducible.
    """
    if p not in MAX_K:
        raise UnsupportedField(
            f"Characteristic must be one of {sorted(MAX_K)} but is {p}."
        )
    if not 1 <= k <= MAX_K[p]:
        raise DegreeOverflow(
            f"Requires 1 <= k <= {MAX_K[p]} for p = {p} but k = {k}."
        )
    return build_extension(p, 2 * k, modulus)


def power(ctx: FieldCtx, x: Elt, e: int) -> Elt:
    """Returns x^e with the exponent reduced modulo p^n - 1.

    0^e = 0 for e > 0 and 0^0 = 1.

    Raises:
        NegativeExponentAtZero: If e < 0 and x contains zero.
    """
    x = ctx.gf(x)
    if e < 0 and np.any(x == 0):
        raise NegativeExponentAtZero(f"0 raised to negative exponent {e}.")
    if e == 0:
        return x ** 0
    reduced = e % (ctx.order - 1)
    if reduced == 0:
        reduced = ctx.order - 1
    return x ** reduced


def arith(
    ctx: FieldCtx,
    a: Elt,
    b: Optional[Elt],
    op: str,
    e: Optional[int] = None
) -> Elt:
    """Element arithmetic by operation name.

    Args:
        ctx: The field.
        a: First operand.
        b: Second operand, ignored for "inv" and "pow".
        op: One of "add", "sub", "mul", "inv", "pow".
        e: Exponent for "pow".

    Raises:
        ZeroDivisionError: On inversion of zero or 0^e with e < 0.
    """
    a = ctx.gf(a)
    if op == "add":
        return a + ctx.gf(b)
    if op == "sub":
        return a - ctx.gf(b)
    if op == "mul":
        return a * ctx.gf(b)
    if op == "inv":
        if np.any(a == 0):
            raise ZeroDivisionError("Cannot invert zero.")
        return a ** -1
    if op == "pow":
        if e is None:
            raise ValueError("Operation pow requires an exponent.")
        return power(ctx, a, e)
    raise ValueError(f"Unknown operation {op}.")


def frobenius(ctx: FieldCtx, x: Elt) -> Elt:
    """Returns x^p through the precomputed linear map."""
    return ctx.apply_linear(ctx.gf(x), ctx.frob_table)


def frobenius_q(ctx: FieldCtx, x: Elt) -> Elt:
    """Returns the conjugate x^q of x over F_q."""
    return ctx.apply_linear(ctx.gf(x), ctx.frob_q_table)


def trace_norm(ctx: FieldCtx, x: Elt) -> Tuple[Elt, Elt]:
    """Returns Tr(x) = x + x^q and N(x) = x^{q+1}."""
    x = ctx.gf(x)
    conjugate = frobenius_q(ctx, x)
    return x + conjugate, x * conjugate


def absolute_trace(ctx: FieldCtx, x: Elt) -> Elt:
    """Returns the trace of x down to the prime field, as a field element."""
    x = ctx.gf(x)
    total = x.copy()
    conjugate = x
    for _ in range(ctx.n - 1):
        conjugate = frobenius(ctx, conjugate)
        total = total + conjugate
    return total


def trace_power_reduction(e: int, t: Elt, n: Elt) -> Elt:
    """Returns Tr(x^e) from t = Tr(x) and n = N(x) in characteristic 3.

    Args:
        e: One of 2, 5, 8.
        t: Relative trace of some x.
        n: Relative norm of the same x.
    """
    if type(t).characteristic != 3:
        raise ValueError(
            f"Requires characteristic 3 but is {type(t).characteristic}."
        )
    if e == 2:
        return t ** 2 + n
    if e == 5:
        return t ** 5 + n * t ** 3 - n ** 2 * t
    if e == 8:
        return (t ** 8 + n * t ** 6 - n ** 2 * t ** 4 - n ** 3 * t ** 2
                - n ** 4)
    raise ValueError(f"Exponent must be one of 2, 5, 8 but is {e}.")


def trace_identity_failures(ctx: FieldCtx) -> Dict[int, int]:
    """Counts elements where trace_power_reduction differs from Tr(x^e)."""
    xs = ctx.elements()
    t, n = trace_norm(ctx, xs)
    failures = {}
    for e in (2, 5, 8):
        direct, _ = trace_norm(ctx, xs ** e)
        failures[e] = int(np.count_nonzero(direct != trace_power_reduction(e, t, n)))
    logger.info("Trace identities over %s: %s failures", ctx, failures)
    return failures


def mu_subgroup(ctx: FieldCtx, d: int) -> Elt:
    """Returns the d-th roots of unity as powers of gen^{(p^n - 1)/d}.

    Raises:
        ValueError: If d does not divide p^n - 1.
    """
    if d < 1 or (ctx.order - 1) % d:
        raise ValueError(
            f"Requires d | p^n - 1 but d = {d} and p^n - 1 = {ctx.order - 1}."
        )
    step = (ctx.order - 1) // d
    return ctx.gen ** (step * np.arange(d, dtype=np.int64))


def is_square(ctx: FieldCtx, x: Elt, in_subfield: bool = False) -> bool:
    """Returns True if x is a square in F_q (in_subfield) or in F_{p^n}.

    Raises:
        ValueError: In characteristic 2, or if in_subfield is set and x is
            not in F_q.
    """
    if ctx.p == 2:
        raise ValueError("Every element is a square in characteristic 2.")
    x = ctx.gf(x)
    if in_subfield:
        if not ctx.is_in_subfield(x):
            raise ValueError(f"Element {int(x)} is not in F_{ctx.q}.")
        size = ctx.q
    else:
        size = ctx.order
    return bool(x == 0 or x ** ((size - 1) // 2) == 1)
