"""Finding every non-trivial cluster symmetric pair of a given Laurent polynomial.

A pair ``(psi, dt)`` means ``F / x^dt`` is invariant under ``psi``.  The search
follows the slice characterisation: for each admissible ``(s, sigma)`` the
exchange polynomial is forced by one slice ratio, extracted as an exact root,
verified on every other slice and finally rebuilt as a seedlet.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .csm import ClusterSymmetricMap, DomainError, Seedlet, negate_b
from .laurent import (
    LaurentPoly,
    all_permutations,
    cycle_notation,
    divide_exact,
    normalize_type,
    perm_cycles,
    perm_inverse,
    slice_poly,
)
from .seed import Seed, seed_search


# ---------------------------------------------------------------- exact roots


def _int_root(v: int, m: int) -> int | None:
    if v < 0:
        if m % 2 == 0:
            return None
        r = _int_root(-v, m)
        return None if r is None else -r
    if v in (0, 1):
        return v
    lo, hi = 0, 1 << (v.bit_length() // m + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**m <= v:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**m == v else None


def rational_root(c: Fraction, m: int) -> Fraction | None:
    num = _int_root(c.numerator, m)
    den = _int_root(c.denominator, m)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def poly_root(P: LaurentPoly, m: int) -> LaurentPoly | None:
    """``Q`` with ``Q^m = P`` and positive leading coefficient, or ``None``.

    Terms of ``Q`` are produced in increasing lex order: the lex-least term
    of ``P - Q_partial^m`` pins down the next term of ``Q``.
    """
    if m < 1:
        raise ValueError("root order must be positive")
    if m == 1:
        return P
    if P.is_zero():
        return P
    n = P.n
    e0, c0 = min(P.items())
    if any(v % m for v in e0):
        return None
    q0 = rational_root(c0, m)
    if q0 is None:
        return None
    if q0 < 0 and m % 2 == 0:
        q0 = -q0
    lead = tuple(v // m for v in e0)
    top = [P.deg_max(k) for k in range(1, n + 1)]
    bottom = [P.deg_min(k) for k in range(1, n + 1)]
    Q = LaurentPoly.monomial(lead, q0)
    scale = m * q0 ** (m - 1)
    shift = tuple((m - 1) * v for v in lead)
    while True:
        rem = P - Q**m
        if rem.is_zero():
            return Q
        e, c = min(rem.items())
        new_e = tuple(a - b for a, b in zip(e, shift))
        if any(m * v > t or m * v < b for v, t, b in zip(new_e, top, bottom)):
            return None
        if new_e <= max(Q.support()):
            return None
        Q = Q + LaurentPoly.monomial(new_e, c / scale)


# ---------------------------------------------------------------- parametric d-tilde


@dataclass(frozen=True)
class ParametricD:
    """``dt`` with ``d + dt`` constant on sigma-orbits.

    ``forced`` is the common value of ``d + dt`` on the orbit of ``s``; every
    other orbit carries a free integer named ``d<min index>``.
    """

    d: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]
    forced_orbit: int
    forced: int

    @property
    def names(self) -> list[str]:
        return [f"d{orbit[0]}" for i, orbit in enumerate(self.orbits) if i != self.forced_orbit]

    def free_orbits(self) -> list[tuple[int, ...]]:
        return [o for i, o in enumerate(self.orbits) if i != self.forced_orbit]

    def instantiate(self, values: Sequence[int] | dict[str, int]) -> tuple[int, ...]:
        """``dt`` for given totals of ``d + dt`` on the free orbits."""
        if not isinstance(values, dict):
            values = dict(zip(self.names, values))
        total = [0] * len(self.d)
        for idx, orbit in enumerate(self.orbits):
            value = self.forced if idx == self.forced_orbit else values[f"d{orbit[0]}"]
            for i in orbit:
                total[i - 1] = value
        return tuple(t - d for t, d in zip(total, self.d))

    def contains(self, dt: Sequence[int]) -> bool:
        total = [a + b for a, b in zip(dt, self.d)]
        for idx, orbit in enumerate(self.orbits):
            values = {total[i - 1] for i in orbit}
            if len(values) != 1:
                return False
            if idx == self.forced_orbit and values != {self.forced}:
                return False
        return True

    def admits_zero(self) -> bool:
        return self.contains((0,) * len(self.d))

    def pattern(self) -> str:
        parts = [""] * len(self.d)
        for idx, orbit in enumerate(self.orbits):
            for i in orbit:
                off = self.d[i - 1]
                if idx == self.forced_orbit:
                    parts[i - 1] = str(self.forced - off)
                else:
                    name = f"d{orbit[0]}"
                    parts[i - 1] = name if off == 0 else f"{name}{-off:+d}"
        return "(" + ", ".join(parts) + ")"

    def to_json(self) -> dict:
        return {"pattern": self.pattern(), "free": self.names}


def parametric_d(sigma: Sequence[int], s: int, d: Sequence[int], value: int) -> ParametricD:
    cycles = sorted(perm_cycles(tuple(sigma)), key=min)
    orbits = tuple(tuple(sorted(c)) for c in cycles)
    forced_orbit = next(i for i, o in enumerate(orbits) if s in o)
    return ParametricD(tuple(d), orbits, forced_orbit, value)


# ---------------------------------------------------------------- seedlet reconstruction


def seedlet_from_exchange(P: LaurentPoly, s: int) -> Seedlet | None:
    """A seedlet at direction ``s`` whose exchange polynomial is ``P``.

    The support must lie on one lattice segment from ``r[-b]_+`` to
    ``r[b]_+``; the smallest ``r`` consistent with the support is used and
    ``b`` is oriented so its first nonzero entry is positive.
    """
    n = P.n
    if P.is_zero() or not P.is_polynomial():
        return None
    if any(c.denominator != 1 or c <= 0 for _, c in P.items()):
        return None
    if P.is_constant():
        c = int(P.constant_value())
        if c < 2:
            return None
        return Seedlet(s, (0,) * n, 1, (1, c - 1))
    support = P.support()
    A, C = min(support), max(support)
    if any(min(a, c) for a, c in zip(A, C)):
        return None
    D = tuple(c - a for a, c in zip(A, C))
    if D[s - 1] != 0:
        return None
    g = 0
    for v in D:
        g = gcd(g, v)
    prim = tuple(v // g for v in D)
    k = next(i for i, v in enumerate(prim) if v)
    steps = {}
    step = g
    for e in support:
        diff = tuple(x - a for x, a in zip(e, A))
        if diff[k] % prim[k]:
            return None
        lam = diff[k] // prim[k]
        if tuple(lam * v for v in prim) != diff or not 0 <= lam <= g:
            return None
        steps[e] = lam
        step = gcd(step, lam)
    r = g // step
    b = tuple(v * step for v in prim)
    Z = [0] * (r + 1)
    for e, lam in steps.items():
        Z[lam // step] = int(P.coeff(e))
    first = next(v for v in b if v)
    omega = Seedlet(s, b, r, tuple(Z))
    return omega if first > 0 else negate_b(omega)


def w_bounds_hold(omega: Seedlet, sigma: Sequence[int], eta: Sequence[int]) -> bool:
    """``min(eta_k, eta_{sigma^-1 k}) >= eta_s r |b_k| / 2 >= |eta_k - eta_{sigma^-1 k}|`` for all ``k``."""
    inv = perm_inverse(tuple(sigma))
    eta_s = eta[omega.s - 1]
    for k in range(1, len(eta) + 1):
        a, b = eta[k - 1], eta[inv[k - 1] - 1]
        mid = eta_s * omega.r * abs(omega.b[k - 1])
        if not (2 * min(a, b) >= mid >= 2 * abs(a - b)):
            return False
    return True


# ---------------------------------------------------------------- the search


@dataclass(frozen=True)
class ClusterSymmetricPair:
    map: ClusterSymmetricMap
    dtilde: ParametricD

    @property
    def twin(self) -> Seedlet:
        return negate_b(self.map.omega)

    def instance(self, values: Sequence[int] | dict[str, int]) -> tuple[int, ...]:
        return self.dtilde.instantiate(values)

    def to_json(self) -> dict:
        return {
            "sigma": list(self.map.sigma),
            "sigma_cycles": cycle_notation(self.map.sigma),
            "s": self.map.s,
            "seedlet": self.map.omega.to_json(),
            "twin": self.twin.to_json(),
            "exchange_poly": self.map.P.to_json(),
            "dtilde": self.dtilde.to_json(),
        }


@dataclass(frozen=True)
class TrivialFamily:
    """Directions ``s`` with ``eta_s = 0`` and the permutations fixing ``T`` that give trivial pairs."""

    zero_directions: tuple[int, ...]
    admissible: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]

    def to_json(self) -> dict:
        return {
            "zero_directions": list(self.zero_directions),
            "admissible": [{"s": s, "sigmas": [list(p) for p in perms]} for s, perms in self.admissible],
        }


@dataclass(frozen=True)
class PairReport:
    F: LaurentPoly
    eta: tuple[int, ...]
    d: tuple[int, ...]
    pairs: tuple[ClusterSymmetricPair, ...]
    trivial: TrivialFamily

    def inverse_index(self) -> dict[int, int]:
        """Positions of pairs whose maps are mutually inverse (as functions)."""
        from .csm import inverse

        keys = {p.map.key(): i for i, p in enumerate(self.pairs)}
        out = {}
        for i, p in enumerate(self.pairs):
            j = keys.get(inverse(p.map).key())
            if j is not None:
                out[i] = j
        return out

    def to_json(self) -> dict:
        inv = self.inverse_index()
        rows = []
        for i, p in enumerate(self.pairs):
            row = p.to_json()
            row["inverse_row"] = inv.get(i)
            rows.append(row)
        return {
            "poly": self.F.to_json(),
            "eta": list(self.eta),
            "d": list(self.d),
            "pairs": rows,
            "trivial": self.trivial.to_json(),
        }


def _slices(T: LaurentPoly, k: int, top: int) -> list[LaurentPoly]:
    return [slice_poly(T, k, i) for i in range(top + 1)]


def _candidate(
    T: LaurentPoly, eta: tuple[int, ...], s: int, sigma: tuple[int, ...]
) -> LaurentPoly | None:
    """The exchange polynomial forced by the slices, or ``None`` if none works."""
    t = perm_inverse(sigma)[s - 1]
    eta_s = eta[s - 1]
    m = eta_s // 2
    fs = _slices(T, s, eta_s)
    ft = [f.permute(sigma) for f in _slices(T, t, eta_s)]
    zero_s = {k for k in range(eta_s + 1) if fs[eta_s - k].is_zero()}
    zero_t = {k for k in range(eta_s + 1) if ft[k].is_zero()}
    if zero_s != zero_t:
        return None
    K = [k for k in range(eta_s + 1) if k not in zero_s]
    k0 = max(k for k in K if k < m)
    quotient = divide_exact(ft[k0], fs[eta_s - k0])
    if quotient is None:
        return None
    P = poly_root(quotient, m - k0)
    if P is None or P.is_zero():
        return None
    if min(c for _, c in P.items()) < 0:
        P = -P
    for k in K:
        lhs, rhs = ft[k], fs[eta_s - k]
        if k < m:
            ok = lhs == rhs * P ** (m - k)
        elif k == m:
            ok = lhs == rhs
        else:
            ok = lhs * P ** (k - m) == rhs
        if not ok:
            return None
    return P


def find_pairs(F: LaurentPoly) -> PairReport:
    typed = normalize_type(F)
    T, eta, d = typed.T, typed.eta, typed.d
    n = F.n
    S = [i for i in range(1, n + 1) if eta[i - 1] and eta[i - 1] % 2 == 0]
    pairs: list[ClusterSymmetricPair] = []
    seen = set()
    perms = list(all_permutations(n))
    for s in S:
        for sigma in perms:
            t = perm_inverse(sigma)[s - 1]
            if t not in S or eta[t - 1] != eta[s - 1]:
                continue
            P = _candidate(T, eta, s, sigma)
            if P is None:
                continue
            omega = seedlet_from_exchange(P, s)
            if omega is None or not w_bounds_hold(omega, sigma, eta):
                continue
            psi = ClusterSymmetricMap(sigma, s, omega)
            if psi.key() in seen:
                continue
            seen.add(psi.key())
            pairs.append(ClusterSymmetricPair(psi, parametric_d(sigma, s, d, eta[s - 1] // 2)))
    return PairReport(F, eta, d, tuple(pairs), trivial_family(T, eta))


def trivial_family(T: LaurentPoly, eta: Sequence[int]) -> TrivialFamily:
    n = T.n
    zero = tuple(i for i in range(1, n + 1) if eta[i - 1] == 0)
    admissible = []
    if zero:
        fixing = [sigma for sigma in all_permutations(n) if T.permute(sigma) == T]
        for s in zero:
            ok = tuple(sigma for sigma in fixing if perm_inverse(sigma)[s - 1] in zero)
            admissible.append((s, ok))
    return TrivialFamily(zero, tuple(admissible))


def cluster_symmetric_set_of(F: LaurentPoly) -> list[ClusterSymmetricMap]:
    return [p.map for p in find_pairs(F).pairs if p.dtilde.admits_zero()]


def find_cs_seed(F: LaurentPoly, entry_bound: int = 3) -> Seed | None:
    maps = cluster_symmetric_set_of(F)
    if not maps:
        return None
    found = seed_search(maps, entry_bound, limit=1)
    return found[0] if found else None


def format_pairs_table(report: PairReport) -> str:
    """Aligned text table of the pairs, one row per map."""
    header = ["#", "sigma", "image", "s", "b", "r", "Z", "twin b", "twin Z", "dtilde", "inverse"]
    inv = report.inverse_index()
    rows = []
    for i, p in enumerate(report.pairs):
        om, tw = p.map.omega, p.twin
        rows.append(
            [
                str(i + 1),
                cycle_notation(p.map.sigma),
                str(list(p.map.sigma)),
                str(p.map.s),
                str(list(om.b)),
                str(om.r),
                str(list(om.Z)),
                str(list(tw.b)),
                str(list(tw.Z)),
                p.dtilde.pattern(),
                "-" if i not in inv else str(inv[i] + 1),
            ]
        )
    widths = [max(len(h), *(len(r[c]) for r in rows)) if rows else len(h) for c, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    lines.append(f"eta = {list(report.eta)}, d = {list(report.d)}")
    if report.trivial.zero_directions:
        lines.append(f"trivial pairs exist for directions {list(report.trivial.zero_directions)}")
    return "\n".join(lines)
