"""Exact multivariate Laurent polynomials over the rationals.

Polynomials live in ``Q[x_1^{+-1}, ..., x_n^{+-1}]``.  Every public index is
1-based.  Coefficients are :class:`fractions.Fraction`, so arithmetic never
loses precision no matter how large the numbers grow.

Permutations are image tuples ``(sigma(1), ..., sigma(n))``.  A permutation
acts on a tuple by ``sigma(x) = (x_{sigma(1)}, ..., x_{sigma(n)})``, and the
product ``sigma tau`` is ordinary composition ``i -> sigma(tau(i))``, which
makes ``(sigma tau)(x) = tau(sigma(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _itertools_permutations
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence, Union

Exponent = tuple[int, ...]
Permutation = tuple[int, ...]
Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands disagree on the number of variables."""


class EvaluationError(ArithmeticError):
    """A zero coordinate was raised to a negative power."""


def as_fraction(value: object) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


# ---------------------------------------------------------------------------
# permutations


def check_permutation(sigma: Sequence[int], n: int | None = None) -> Permutation:
    sigma = tuple(int(v) for v in sigma)
    if n is not None and len(sigma) != n:
        raise DimensionError(f"permutation has size {len(sigma)}, expected {n}")
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{len(sigma)}")
    return sigma


def identity_perm(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def perm_inverse(sigma: Permutation) -> Permutation:
    inv = [0] * len(sigma)
    for i, image in enumerate(sigma, start=1):
        inv[image - 1] = i
    return tuple(inv)


def perm_compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """The product ``sigma tau``: ``i -> sigma(tau(i))``."""
    if len(sigma) != len(tau):
        raise DimensionError("permutations of different sizes")
    return tuple(sigma[tau[i] - 1] for i in range(len(tau)))


def act(sigma: Permutation, vector: Sequence) -> tuple:
    """``sigma(v)`` with ``sigma(v)_i = v_{sigma(i)}``."""
    if len(sigma) != len(vector):
        raise DimensionError("permutation and vector sizes differ")
    return tuple(vector[image - 1] for image in sigma)


def perm_cycles(sigma: Permutation) -> list[tuple[int, ...]]:
    """Cycles of ``sigma``, each starting at its smallest element."""
    seen: set[int] = set()
    cycles = []
    for start in range(1, len(sigma) + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = sigma[start - 1]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = sigma[nxt - 1]
        cycles.append(tuple(cycle))
    return cycles


def orbit_of(sigma: Permutation, i: int) -> tuple[int, ...]:
    for cycle in perm_cycles(sigma):
        if i in cycle:
            return tuple(sorted(cycle))
    raise ValueError(f"index {i} out of range")


def cycle_notation(sigma: Permutation) -> str:
    parts = ["(" + " ".join(map(str, c)) + ")" for c in perm_cycles(sigma) if len(c) > 1]
    return "".join(parts) if parts else "id"


def all_permutations(n: int) -> Iterator[Permutation]:
    """All permutations of 1..n in lexicographic order of image tuples."""
    return _itertools_permutations(range(1, n + 1))


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """An immutable Laurent polynomial in ``n`` variables.

    ``terms`` maps exponent tuples to nonzero rational coefficients.  Stored
    zero coefficients are dropped on construction; iteration and
    serialization follow lexicographic order of exponents.
    """

    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], object] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != n:
                raise DimensionError(f"exponent {e} has length {len(e)}, expected {n}")
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._n = n
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponent, Fraction]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "LaurentPoly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c: object = 1) -> "LaurentPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c: object = 1) -> "LaurentPoly":
        exponent = tuple(exponent)
        return cls(len(exponent), {exponent: c})

    @classmethod
    def variable(cls, n: int, k: int) -> "LaurentPoly":
        _check_index(k, n)
        e = [0] * n
        e[k - 1] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    # basic accessors ---------------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[tuple[Exponent, Fraction], ...]:
        return tuple(sorted(self._terms.items()))

    def items(self):
        return self._terms.items()

    def coeff(self, exponent: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def support(self) -> list[Exponent]:
        return sorted(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self._n in self._terms)

    def is_polynomial(self) -> bool:
        return all(min(e, default=0) >= 0 for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self._n, Fraction(0))

    # comparison -------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, LaurentPoly):
            return self._n == other._n and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other: object) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other._n != self._n:
                raise DimensionError(f"{self._n} vs {other._n} variables")
            return other
        return LaurentPoly.constant(self._n, as_fraction(other))

    def __add__(self, other: object) -> "LaurentPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self._n, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self._n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> "LaurentPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "LaurentPoly":
        return (-self) + other

    def scale(self, c: object) -> "LaurentPoly":
        c = as_fraction(c)
        if not c:
            return LaurentPoly.zero(self._n)
        return LaurentPoly._raw(self._n, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other: object) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        if other._n != self._n:
            raise DimensionError(f"{self._n} vs {other._n} variables")
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw(self._n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int) or isinstance(k, bool):
            raise TypeError("exponent must be an integer")
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers are only defined for monomials")
            ((e, c),) = self._terms.items()
            return LaurentPoly._raw(self._n, {tuple(v * k for v in e): c**k})
        result = LaurentPoly.constant(self._n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, exponent: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exponent``."""
        exponent = tuple(exponent)
        if len(exponent) != self._n:
            raise DimensionError("shift vector has wrong length")
        return LaurentPoly._raw(
            self._n,
            {tuple(a + b for a, b in zip(e, exponent)): c for e, c in self._terms.items()},
        )

    # degrees ----------------------------------------------------------------
    def deg_max(self, k: int) -> int:
        _check_index(k, self._n)
        return max((e[k - 1] for e in self._terms), default=0)

    def deg_min(self, k: int) -> int:
        _check_index(k, self._n)
        return min((e[k - 1] for e in self._terms), default=0)

    # structural operations --------------------------------------------------
    def permute(self, sigma: Sequence[int]) -> "LaurentPoly":
        """Return ``F(sigma(x))``."""
        sigma = check_permutation(sigma, self._n)
        out = {}
        for e, c in self._terms.items():
            new = [0] * self._n
            for i, image in enumerate(sigma):
                new[image - 1] = e[i]
            out[tuple(new)] = c
        return LaurentPoly._raw(self._n, out)

    def evaluate(self, point: Sequence[object]) -> Fraction:
        if len(point) != self._n:
            raise DimensionError("point has wrong length")
        pt = [as_fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    if not v and k < 0:
                        raise EvaluationError("zero coordinate raised to a negative power")
                    term *= v**k
            total += term
        return total

    def substitute(self, images: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """Compose: replace ``x_i`` by ``images[i-1]``.

        Images raised to negative powers must be monomials.
        """
        if len(images) != self._n:
            raise DimensionError("need one image per variable")
        if not images:
            return self
        m = images[0].n
        cache: dict[tuple[int, int], LaurentPoly] = {}

        def power(i: int, k: int) -> LaurentPoly:
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        total = LaurentPoly.zero(m)
        for e, c in self._terms.items():
            term = LaurentPoly.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def map_coefficients(self, fn) -> "LaurentPoly":
        return LaurentPoly(self._n, {e: fn(c) for e, c in self._terms.items()})

    # serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self._n,
            "terms": [
                {"e": list(e), "num": str(c.numerator), "den": str(c.denominator)}
                for e, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentPoly":
        try:
            n = int(data["n"])
            terms = {}
            for t in data["terms"]:
                e = tuple(int(v) for v in t["e"])
                c = Fraction(int(t["num"]), int(t.get("den", "1")))
                terms[e] = terms.get(e, 0) + c
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed Laurent polynomial JSON: {exc}") from exc
        return cls(n, terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({self._n}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = [f"x{i}" for i in range(1, self._n + 1)]
        return format_poly(self, names)


def format_poly(F: LaurentPoly, names: Sequence[str]) -> str:
    pieces = []
    for e, c in sorted(F.items(), key=lambda item: (-sum(item[0]), tuple(-v for v in item[0]))):
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
        )
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _check_index(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise IndexError(f"variable index {k} outside 1..{n}")


# ---------------------------------------------------------------------------
# functional interface


def add(a: LaurentPoly, b: LaurentPoly | Scalar) -> LaurentPoly:
    return a + b


def mul(a: LaurentPoly, b: LaurentPoly | Scalar) -> LaurentPoly:
    return a * b


def scalar_mul(a: LaurentPoly, c: Scalar) -> LaurentPoly:
    return a.scale(c)


def power(a: LaurentPoly, k: int) -> LaurentPoly:
    return a**k


def deg_max(h: LaurentPoly, k: int) -> int:
    return h.deg_max(k)


def deg_min(h: LaurentPoly, k: int) -> int:
    return h.deg_min(k)


def permute(F: LaurentPoly, sigma: Sequence[int]) -> LaurentPoly:
    return F.permute(sigma)


def eval_rational(F: LaurentPoly, point: Sequence[object]) -> Fraction:
    return F.evaluate(point)


def monomial_value(exponent: Sequence[int], point: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for v, k in zip(point, exponent):
        if k:
            if not v and k < 0:
                raise EvaluationError("zero coordinate raised to a negative power")
            out *= v**k
    return out


@dataclass(frozen=True)
class TypedLaurent:
    """``F = T / x^d`` with ``x_i`` not dividing ``T``; ``eta_i = deg of x_i in T``."""

    T: LaurentPoly
    d: Exponent
    eta: Exponent

    @property
    def n(self) -> int:
        return self.T.n

    def reconstruct(self) -> LaurentPoly:
        return self.T.shift(tuple(-v for v in self.d))

    def type_str(self) -> str:
        return f"{list(self.eta)}/{list(self.d)}"


def normalize_type(F: LaurentPoly) -> TypedLaurent:
    n = F.n
    if F.is_zero():
        return TypedLaurent(F, (0,) * n, (0,) * n)
    d = tuple(-F.deg_min(k) for k in range(1, n + 1))
    T = F.shift(d)
    eta = tuple(T.deg_max(k) for k in range(1, n + 1))
    return TypedLaurent(T, d, eta)


def slice_poly(T: LaurentPoly | TypedLaurent, k: int, i: int) -> LaurentPoly:
    """The slice ``f_{k,i}``: terms of ``T`` with ``x_k``-degree ``i``, that power removed."""
    if isinstance(T, TypedLaurent):
        T = T.T
    _check_index(k, T.n)
    out = {}
    for e, c in T.items():
        if e[k - 1] == i:
            new = list(e)
            new[k - 1] = 0
            out[tuple(new)] = c
    return LaurentPoly._raw(T.n, out)


slice = slice_poly  # noqa: A001 - short public alias


def all_slices(T: LaurentPoly, k: int) -> dict[int, LaurentPoly]:
    """All nonzero slices of ``T`` along ``x_k`` keyed by degree."""
    buckets: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in T.items():
        new = list(e)
        new[k - 1] = 0
        buckets.setdefault(e[k - 1], {})[tuple(new)] = c
    return {i: LaurentPoly._raw(T.n, t) for i, t in buckets.items()}


def divide_exact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly | None:
    """Return ``q`` with ``q*b == a`` when ``b`` divides ``a`` as Laurent polynomials.

    Uses multivariate division with respect to lexicographic order; the
    remainder is zero exactly when the division is exact.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.n != b.n:
        raise DimensionError("operands disagree on variable count")
    if a.is_zero():
        return LaurentPoly.zero(a.n)
    # clear monomial content so both sides are honest polynomials; an exact
    # Laurent quotient of a polynomial by a content-free one is a polynomial
    beta = tuple(-b.deg_min(k) for k in range(1, b.n + 1))
    alpha = tuple(-a.deg_min(k) for k in range(1, a.n + 1))
    bb = b.shift(beta)
    rem = a.shift(alpha)
    lead_e, lead_c = max(bb.items())
    quotient: dict[Exponent, Fraction] = {}
    while rem:
        e, c = max(rem.items())
        qe = tuple(x - y for x, y in zip(e, lead_e))
        if min(qe) < 0:
            return None
        qc = c / lead_c
        quotient[qe] = quotient.get(qe, 0) + qc
        rem = rem - bb.shift(qe).scale(qc)
    shift_back = tuple(bt - al for bt, al in zip(beta, alpha))
    return LaurentPoly(a.n, quotient).shift(shift_back)


def is_divisible(a: LaurentPoly, b: LaurentPoly) -> bool:
    return divide_exact(a, b) is not None


def poly_from_coeffs(n: int, coeffs: Iterable[object], k: int) -> LaurentPoly:
    """Univariate ``sum_i c_i x_k^i`` embedded in ``n`` variables."""
    terms = {}
    for i, c in enumerate(coeffs):
        e = [0] * n
        e[k - 1] = i
        terms[tuple(e)] = c
    return LaurentPoly(n, terms)
