"""Seedlets, exchange polynomials and cluster symmetric maps.

A cluster symmetric map ``psi = (sigma, s, omega)`` sends ``x`` to
``sigma(x)`` with the coordinate that holds ``x_s`` (position
``t = sigma^{-1}(s)``) replaced by ``P(x) / x_s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .laurent import (
    DimensionError,
    LaurentPoly,
    Permutation,
    act,
    as_fraction,
    check_permutation,
    identity_perm,
    normalize_type,
    perm_compose,
    perm_inverse,
)


class DomainError(ValueError):
    """Input violates a mathematical precondition; the message names it."""


def _pos(v: int) -> int:
    return v if v > 0 else 0


def _parse_int_coeff(value: object, params: Mapping[str, object] | None) -> int:
    if isinstance(value, str) and params and value.strip() in params:
        value = params[value.strip()]
    c = as_fraction(value)
    if c.denominator != 1:
        raise DomainError(f"mutation polynomial coefficient {c} is not an integer")
    return int(c)


@dataclass(frozen=True)
class Seedlet:
    """Direction-``s`` mutation data ``(b, r, Z)`` with ``b_s = 0``."""

    s: int
    b: tuple[int, ...]
    r: int
    Z: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "Z", tuple(int(v) for v in self.Z))
        n = len(self.b)
        if not 1 <= self.s <= n:
            raise DomainError(f"direction s={self.s} outside 1..{n}")
        if self.b[self.s - 1] != 0:
            raise DomainError(f"seedlet requires b_s = 0 (b_{self.s} = {self.b[self.s - 1]})")
        if self.r < 1:
            raise DomainError(f"seedlet requires r >= 1 (r = {self.r})")
        if len(self.Z) != self.r + 1:
            raise DomainError(f"Z must have r+1 = {self.r + 1} coefficients, got {len(self.Z)}")
        if min(self.Z) < 0:
            raise DomainError("Z must have nonnegative integer coefficients")
        if self.Z[0] <= 0 or self.Z[-1] <= 0:
            raise DomainError("seedlet requires z_0 > 0 and z_r > 0")

    @property
    def n(self) -> int:
        return len(self.b)

    def to_json(self) -> dict:
        return {"s": self.s, "b": list(self.b), "r": self.r, "Z": [str(z) for z in self.Z]}

    @classmethod
    def from_json(cls, data: Mapping, params: Mapping[str, object] | None = None) -> "Seedlet":
        try:
            Z = tuple(_parse_int_coeff(z, params) for z in data["Z"])
            return cls(int(data["s"]), tuple(int(v) for v in data["b"]), int(data["r"]), Z)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed seedlet JSON: {exc}") from exc


def exchange_poly(omega: Seedlet) -> LaurentPoly:
    """``P = sum_i z_i x^{i[b]_+ + (r-i)[-b]_+}``."""
    plus = [_pos(v) for v in omega.b]
    minus = [_pos(-v) for v in omega.b]
    terms = {}
    for i, z in enumerate(omega.Z):
        if z:
            e = tuple(i * p + (omega.r - i) * m for p, m in zip(plus, minus))
            terms[e] = terms.get(e, 0) + z
    return LaurentPoly(omega.n, terms)


def negate_b(omega: Seedlet) -> Seedlet:
    """``(-b, r, u^r Z(1/u))``; the exchange polynomial is unchanged."""
    return Seedlet(omega.s, tuple(-v for v in omega.b), omega.r, tuple(reversed(omega.Z)))


@dataclass(frozen=True)
class ClusterSymmetricMap:
    sigma: Permutation
    s: int
    omega: Seedlet
    _P: LaurentPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        sigma = check_permutation(self.sigma)
        object.__setattr__(self, "sigma", sigma)
        if self.omega.s != self.s:
            raise DomainError(f"seedlet direction {self.omega.s} differs from map direction {self.s}")
        if len(sigma) != self.omega.n:
            raise DimensionError("permutation size differs from seedlet size")
        object.__setattr__(self, "_P", exchange_poly(self.omega))

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def t(self) -> int:
        """Position receiving ``P/x_s``: ``sigma^{-1}(s)``."""
        return perm_inverse(self.sigma)[self.s - 1]

    @property
    def P(self) -> LaurentPoly:
        return self._P

    def key(self) -> tuple:
        """Identifies the map as a function: ``(sigma, s, P)``."""
        return (self.sigma, self.s, tuple(sorted(self._P.items())))

    def same_function(self, other: "ClusterSymmetricMap") -> bool:
        return self.key() == other.key()

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "seedlet": self.omega.to_json()}

    @classmethod
    def from_json(cls, data: Mapping, params: Mapping[str, object] | None = None) -> "ClusterSymmetricMap":
        try:
            omega = Seedlet.from_json(data["seedlet"], params)
            return cls(tuple(int(v) for v in data["sigma"]), omega.s, omega)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed map JSON: {exc}") from exc

    def __str__(self) -> str:
        from .laurent import cycle_notation

        return (
            f"psi[sigma={cycle_notation(self.sigma)}, s={self.s}, "
            f"b={list(self.omega.b)}, r={self.omega.r}, Z={list(self.omega.Z)}]"
        )


def mutation_map(omega: Seedlet) -> ClusterSymmetricMap:
    """The plain mutation ``mu_s`` (identity permutation)."""
    return ClusterSymmetricMap(identity_perm(omega.n), omega.s, omega)


def apply_numeric(psi: ClusterSymmetricMap, x: Sequence[object]) -> tuple[Fraction, ...]:
    if len(x) != psi.n:
        raise DimensionError("point has wrong length")
    pt = tuple(as_fraction(v) for v in x)
    xs = pt[psi.s - 1]
    if not xs:
        raise DomainError(f"x_{psi.s} = 0: the exchange relation divides by x_s")
    out = list(act(psi.sigma, pt))
    out[psi.t - 1] = psi.P.evaluate(pt) / xs
    return tuple(out)


def apply_integer(psi: ClusterSymmetricMap, x: Sequence[int]) -> tuple[int, ...] | None:
    """Integer-only fast path; ``None`` if the new coordinate is not integral."""
    xs = x[psi.s - 1]
    if xs == 0:
        raise DomainError(f"x_{psi.s} = 0: the exchange relation divides by x_s")
    value = 0
    for e, c in psi.P.items():
        term = int(c)
        for v, k in zip(x, e):
            if k:
                term *= v**k
        value += term
    q, rem = divmod(value, xs)
    if rem:
        return None
    out = [x[i - 1] for i in psi.sigma]
    out[psi.t - 1] = q
    return tuple(out)


@dataclass(frozen=True)
class RationalFunctionTuple:
    """Components ``num_i / den_i`` with polynomial numerators and denominators."""

    components: tuple[tuple[LaurentPoly, LaurentPoly], ...]

    def evaluate(self, point: Sequence[object]) -> tuple[Fraction, ...]:
        return tuple(num.evaluate(point) / den.evaluate(point) for num, den in self.components)

    def __str__(self) -> str:
        parts = []
        for num, den in self.components:
            parts.append(str(num) if den == 1 else f"({num})/({den})")
        return "(" + ", ".join(parts) + ")"


def apply_symbolic(psi: ClusterSymmetricMap) -> RationalFunctionTuple:
    n = psi.n
    one = LaurentPoly.constant(n, 1)
    comps = []
    for i in range(1, n + 1):
        if i == psi.t:
            comps.append((psi.P, LaurentPoly.variable(n, psi.s)))
        else:
            comps.append((LaurentPoly.variable(n, psi.sigma[i - 1]), one))
    return RationalFunctionTuple(tuple(comps))


def inverse(psi: ClusterSymmetricMap) -> ClusterSymmetricMap:
    """``psi^{-1} = psi_{sigma^{-1}, t, (sigma(b), r, Z)}``."""
    t = psi.t
    b = act(psi.sigma, psi.omega.b)
    omega = Seedlet(t, b, psi.omega.r, psi.omega.Z)
    return ClusterSymmetricMap(perm_inverse(psi.sigma), t, omega)


def conjugate(psi: ClusterSymmetricMap, tau: Sequence[int]) -> ClusterSymmetricMap:
    """The map under which ``F(tau(x))`` is invariant whenever ``F`` is invariant under ``psi``.

    Returns ``psi_{tau sigma tau^{-1}, tau(s), (tau^{-1}(b), r, Z)}``.
    """
    tau = check_permutation(tau, psi.n)
    tau_inv = perm_inverse(tau)
    new_s = tau[psi.s - 1]
    b = act(tau_inv, psi.omega.b)
    sigma = perm_compose(perm_compose(tau, psi.sigma), tau_inv)
    return ClusterSymmetricMap(sigma, new_s, Seedlet(new_s, b, psi.omega.r, psi.omega.Z))


def pullback_cleared(F: LaurentPoly, psi: ClusterSymmetricMap) -> tuple[LaurentPoly, int]:
    """Return ``(G, m)`` with ``F(psi(x)) = P^m * G`` and ``G`` a Laurent polynomial.

    ``m`` is the smallest ``x_t``-exponent of ``F``, so every power of ``P``
    appearing in ``G`` is nonnegative.
    """
    if F.n != psi.n:
        raise DimensionError("polynomial and map sizes differ")
    if F.is_zero():
        return F, 0
    n, t, s = psi.n, psi.t, psi.s
    m = F.deg_min(t)
    sigma = psi.sigma
    groups: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for e, c in F.items():
        k = e[t - 1]
        new = [0] * n
        for i in range(n):
            if i != t - 1:
                new[sigma[i] - 1] += e[i]
        new[s - 1] -= k
        bucket = groups.setdefault(k - m, {})
        key = tuple(new)
        bucket[key] = bucket.get(key, 0) + c
    G = LaurentPoly.zero(n)
    power = LaurentPoly.constant(n, 1)
    for p in range(0, max(groups) + 1):
        if p in groups:
            G = G + power * LaurentPoly(n, groups[p])
        power = power * psi.P
    return G, m


def pullback(F: LaurentPoly, psi: ClusterSymmetricMap) -> RationalFunctionTuple | LaurentPoly:
    """``F(psi(x))`` as a Laurent polynomial when it is one, else numerator/denominator."""
    G, m = pullback_cleared(F, psi)
    if m >= 0:
        return G * psi.P**m
    from .laurent import divide_exact

    q = divide_exact(G, psi.P ** (-m))
    if q is not None:
        return q
    return RationalFunctionTuple(((G, psi.P ** (-m)),))


def is_invariant(F: LaurentPoly, psi: ClusterSymmetricMap) -> bool:
    """Exact test of ``F(psi(x)) == F(x)`` as rational functions.

    ``F(psi(x))`` equals ``P^m G`` with ``G`` Laurent, where ``m`` is the
    least ``x_t``-exponent of ``F``.  Both sides are brought to Laurent form by
    multiplying with ``P^{-m}`` when ``m < 0``.
    """
    G, m = pullback_cleared(F, psi)
    if m >= 0:
        return G * psi.P**m == F
    return G == F * psi.P ** (-m)


def invariance_type_conditions(F: LaurentPoly, psi: ClusterSymmetricMap) -> list[str]:
    """Necessary type conditions for invariance that ``F`` fails (empty if none)."""
    typed = normalize_type(F)
    t, s = psi.t, psi.s
    issues = []
    if act(psi.sigma, typed.d) != typed.d:
        issues.append("d = sigma(d)")
    if not (typed.eta[s - 1] == typed.eta[t - 1] == 2 * typed.d[s - 1] == 2 * typed.d[t - 1]):
        issues.append("eta_s = eta_t = 2 d_s = 2 d_t")
    return issues
