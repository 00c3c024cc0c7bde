"""Homogeneous linear system whose kernel is the space of invariant Laurent polynomials.

For a map ``psi = (sigma, s, omega)`` and a candidate type ``eta/d`` the
unknowns are the coefficients ``a_j`` of ``F = x^{-d} sum_{j in N} a_j x^j``
with ``N`` the box ``0 <= j <= eta``.  Invariance is equivalent to the slice
relations

    f_{t, d_s-k}(sigma x) = P^k f_{s, d_s+k}(x)        (forward)
    f_{s, d_s-k}(x)       = P^k f_{t, d_s+k}(sigma x)  (reverse)

for ``k = 0..d_s``; comparing coefficients of every monomial gives the rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .csm import ClusterSymmetricMap, DomainError, Seedlet, inverse, is_invariant
from .laurent import (
    DimensionError,
    LaurentPoly,
    act,
    normalize_type,
    orbit_of,
    perm_inverse,
    slice_poly,
)


class PreconditionError(DomainError):
    """A necessary type condition for invariance fails, so no invariant of that type exists."""


# ---------------------------------------------------------------- index set


class MonomialIndexSet:
    """All ``j`` with ``0 <= j_i <= eta_i`` in lexicographic order."""

    def __init__(self, eta: Sequence[int]):
        self.eta = tuple(int(v) for v in eta)
        if min(self.eta, default=0) < 0:
            raise ValueError("eta must be nonnegative")
        self.vectors: list[tuple[int, ...]] = list(
            itertools.product(*(range(e + 1) for e in self.eta))
        )
        self.position = {j: p for p, j in enumerate(self.vectors)}

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, j: object) -> bool:
        return j in self.position

    def index(self, j: tuple[int, ...]) -> int:
        return self.position[j]


@dataclass
class LinearSystem:
    index: MonomialIndexSet
    rows: list[dict[int, Fraction]]
    case_counts: dict[str, int] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return len(self.index)

    def extend(self, other: "LinearSystem") -> "LinearSystem":
        if other.index.eta != self.index.eta:
            raise DimensionError("systems over different index sets")
        counts = dict(self.case_counts)
        for key, v in other.case_counts.items():
            counts[key] = counts.get(key, 0) + v
        return LinearSystem(self.index, self.rows + other.rows, counts)


@dataclass(frozen=True)
class KernelBasis:
    index: MonomialIndexSet
    vectors: tuple[tuple[Fraction, ...], ...]

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dimension(self) -> int:
        return len(self.vectors)


# ---------------------------------------------------------------- building blocks


def power_coeffs(Z: Sequence[object], k: int) -> list[Fraction]:
    """Coefficients ``c_{k,0..kr}`` of ``Z(u)^k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    Zf = [Fraction(z) for z in Z]
    out = [Fraction(1)]
    for _ in range(k):
        nxt = [Fraction(0)] * (len(out) + len(Zf) - 1)
        for i, a in enumerate(out):
            if a:
                for j, z in enumerate(Zf):
                    nxt[i + j] += a * z
        out = nxt
    return out


def shift_vector(omega: Seedlet, k: int, l: int, i: int) -> tuple[int, ...]:
    """``l[b]_+ + (kr-l)[-b]_+ - i e_s``."""
    kr = k * omega.r
    v = [l * max(b, 0) + (kr - l) * max(-b, 0) for b in omega.b]
    v[omega.s - 1] -= i
    return tuple(v)


def check_type_conditions(psi: ClusterSymmetricMap, eta: Sequence[int], d: Sequence[int]) -> None:
    n = psi.n
    if len(eta) != n or len(d) != n:
        raise DimensionError("eta and d must have length n")
    if min(eta) < 0:
        raise PreconditionError("eta must be nonnegative")
    s, t = psi.s, psi.t
    if tuple(act(psi.sigma, d)) != tuple(d):
        raise PreconditionError(f"violated: d = sigma(d) (d={list(d)}, sigma={list(psi.sigma)})")
    if not (eta[s - 1] == eta[t - 1] == 2 * d[s - 1] == 2 * d[t - 1]):
        raise PreconditionError(
            f"violated: eta_s = eta_t = 2 d_s = 2 d_t with s={s}, t={t} "
            f"(eta_s={eta[s - 1]}, eta_t={eta[t - 1]}, d_s={d[s - 1]})"
        )


def _direction_rows(
    sigma: tuple[int, ...],
    s: int,
    omega: Seedlet,
    index: MonomialIndexSet,
    ds: int,
    counts: dict[str, int],
) -> list[dict[int, Fraction]]:
    """Rows of ``f_{t, ds-k}(sigma x) = P^k f_{s, ds+k}(x)`` for ``k = 0..ds``."""
    n = len(sigma)
    t = perm_inverse(sigma)[s - 1]
    rows: list[dict[int, Fraction]] = []
    for k in range(ds + 1):
        coeffs = power_coeffs(omega.Z, k)
        shifts = [(shift_vector(omega, k, l, 2 * k), c) for l, c in enumerate(coeffs) if c]
        lhs: dict[tuple[int, ...], int] = {}
        rhs: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for p, j in enumerate(index.vectors):
            if j[t - 1] == ds - k:
                # the monomial x^j of f_{t, .} becomes x^m under sigma, where m_{sigma(i)} = j_i
                m = [0] * n
                for i in range(n):
                    m[sigma[i] - 1] = j[i]
                m[s - 1] = ds - k
                lhs[tuple(m)] = p
            if j[s - 1] == ds + k:
                for shift, c in shifts:
                    m = tuple(a + b for a, b in zip(j, shift))
                    bucket = rhs.setdefault(m, {})
                    bucket[p] = bucket.get(p, 0) + c
        for m in sorted(set(lhs) | set(rhs)):
            row: dict[int, Fraction] = {}
            if m in rhs:
                for p, c in rhs[m].items():
                    if c:
                        row[p] = -c
            if m in lhs:
                p = lhs[m]
                row[p] = row.get(p, 0) + 1
                if not row[p]:
                    del row[p]
                case = "both" if m in rhs else "left_only"
            else:
                case = "right_only"
            counts[case] = counts.get(case, 0) + 1
            if row:
                rows.append(row)
    return rows


def build_hle(psi: ClusterSymmetricMap, eta: Sequence[int], d: Sequence[int]) -> LinearSystem:
    eta = tuple(int(v) for v in eta)
    d = tuple(int(v) for v in d)
    check_type_conditions(psi, eta, d)
    index = MonomialIndexSet(eta)
    ds = d[psi.s - 1]
    counts: dict[str, int] = {}
    rows = _direction_rows(psi.sigma, psi.s, psi.omega, index, ds, counts)
    back = inverse(psi)
    rows += _direction_rows(back.sigma, back.s, back.omega, index, ds, counts)
    return LinearSystem(index, rows, counts)


def build_joint(maps: Sequence[ClusterSymmetricMap], eta: Sequence[int], d: Sequence[int]) -> LinearSystem:
    """Stacked system for invariance under every map at once."""
    if not maps:
        raise ValueError("need at least one map")
    system = build_hle(maps[0], eta, d)
    for psi in maps[1:]:
        system = system.extend(build_hle(psi, eta, d))
    return system


# ---------------------------------------------------------------- exact elimination


def _reduce_into(pivots: dict[int, dict[int, Fraction]], row: dict[int, Fraction]) -> None:
    row = dict(row)
    while row:
        c = min(row)
        prow = pivots.get(c)
        if prow is None:
            lead = row[c]
            if lead != 1:
                row = {k: v / lead for k, v in row.items()}
            pivots[c] = row
            return
        f = row[c]
        for k, v in prow.items():
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)


def rref(rows: Iterable[dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Fully reduced row echelon form, keyed by pivot column."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        if row:
            _reduce_into(pivots, row)
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for k in sorted(k for k in row if k != c and k in pivots):
            f = row.get(k)
            if not f:
                continue
            for kk, v in pivots[k].items():
                nv = row.get(kk, 0) - f * v
                if nv:
                    row[kk] = nv
                else:
                    row.pop(kk, None)
    return pivots


def nullspace(rows: Iterable[dict[int, Fraction]], width: int) -> list[tuple[Fraction, ...]]:
    """Canonical nullspace basis: the RREF of any basis, so it depends only on the space."""
    pivots = rref(rows)
    free = [c for c in range(width) if c not in pivots]
    column_entries: dict[int, list[tuple[int, Fraction]]] = {f: [] for f in free}
    for p, row in pivots.items():
        for k, v in row.items():
            if k != p:
                column_entries[k].append((p, v))
    raw = []
    for f in free:
        vec = {f: Fraction(1)}
        for p, v in column_entries[f]:
            vec[p] = -v
        raw.append(vec)
    return canonical_basis(raw, width)


def canonical_basis(vectors: Iterable[dict[int, Fraction]], width: int) -> list[tuple[Fraction, ...]]:
    reduced = rref(vectors)
    out = []
    for c in sorted(reduced):
        dense = [Fraction(0)] * width
        for k, v in reduced[c].items():
            dense[k] = v
        out.append(tuple(dense))
    return out


def solve_kernel(system: LinearSystem) -> KernelBasis:
    return KernelBasis(system.index, tuple(nullspace(system.rows, system.width)))


def same_span(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]], width: int) -> bool:
    def as_dicts(vs):
        return [{i: Fraction(v) for i, v in enumerate(vec) if v} for vec in vs]

    return canonical_basis(as_dicts(a), width) == canonical_basis(as_dicts(b), width)


# ---------------------------------------------------------------- assembly


@dataclass(frozen=True)
class InvariantElement:
    poly: LaurentPoly
    eta: tuple[int, ...]
    d: tuple[int, ...]
    top_support: bool

    def to_json(self) -> dict:
        return {
            "poly": self.poly.to_json(),
            "eta": list(self.eta),
            "d": list(self.d),
            "full_support": self.top_support,
        }


@dataclass(frozen=True)
class InvariantReport:
    eta: tuple[int, ...]
    d: tuple[int, ...]
    elements: tuple[InvariantElement, ...]
    kernel: KernelBasis

    @property
    def dimension(self) -> int:
        return len(self.elements)

    @property
    def generic_full_support(self) -> bool:
        """Whether a generic kernel element has a term of top degree in every variable with ``eta_i > 0``."""
        return all(_has_degree(self.kernel, i, self.eta[i]) for i in range(len(self.eta)) if self.eta[i])

    @property
    def generic_exact_type(self) -> bool:
        """Whether a generic kernel element is of type exactly ``eta/d``."""
        return self.generic_full_support and all(
            _has_degree(self.kernel, i, 0) for i in range(len(self.eta))
        )

    @property
    def filtered_dimension(self) -> int:
        return self.dimension if self.kernel.dimension and self.generic_full_support else 0

    def to_json(self) -> dict:
        return {
            "eta": list(self.eta),
            "d": list(self.d),
            "dimension": self.dimension,
            "filtered_dimension": self.filtered_dimension,
            "basis": [e.to_json() for e in self.elements],
        }


def _has_degree(kernel: KernelBasis, i: int, value: int) -> bool:
    vecs = kernel.index.vectors
    return any(v and vecs[p][i] == value for vec in kernel.vectors for p, v in enumerate(vec))


def assemble(kernel: KernelBasis, d: Sequence[int]) -> list[InvariantElement]:
    n = len(kernel.index.eta)
    neg_d = tuple(-v for v in d)
    out = []
    for vec in kernel.vectors:
        terms = {kernel.index.vectors[p]: v for p, v in enumerate(vec) if v}
        F = LaurentPoly(n, terms).shift(neg_d)
        typed = normalize_type(F)
        top = all(
            any(j[i] == kernel.index.eta[i] for j in terms) for i in range(n) if kernel.index.eta[i]
        )
        out.append(InvariantElement(F, typed.eta, typed.d, top))
    return out


def invariants_for(psi: ClusterSymmetricMap, eta: Sequence[int], d: Sequence[int]) -> InvariantReport:
    return invariants_for_maps([psi], eta, d)


def invariants_for_maps(
    maps: Sequence[ClusterSymmetricMap], eta: Sequence[int], d: Sequence[int]
) -> InvariantReport:
    """Invariants common to all maps (the intersection of the individual kernels)."""
    kernel = solve_kernel(build_joint(maps, eta, d))
    return InvariantReport(tuple(eta), tuple(d), tuple(assemble(kernel, d)), kernel)


# ---------------------------------------------------------------- type feasibility


def eta_bounds_hold(psi: ClusterSymmetricMap, eta: Sequence[int], d: Sequence[int] | None = None) -> bool:
    """The necessary conditions on ``eta`` (and ``d`` if given) for a nonzero invariant of that type."""
    s, t = psi.s, psi.t
    eta_s = eta[s - 1]
    if eta_s != eta[t - 1] or eta_s % 2:
        return False
    if d is not None:
        if tuple(act(psi.sigma, d)) != tuple(d) or 2 * d[s - 1] != eta_s:
            return False
    inv = perm_inverse(psi.sigma)
    r = psi.omega.r
    for k in range(1, psi.n + 1):
        a, b = eta[k - 1], eta[inv[k - 1] - 1]
        mid = eta_s * r * abs(psi.omega.b[k - 1])
        if not 2 * min(a, b) >= mid >= 2 * abs(a - b):
            return False
    return True


def feasible_eta(psi: ClusterSymmetricMap, d: Sequence[int], realized: bool = True) -> list[tuple[int, ...]]:
    """All ``eta`` passing the degree bounds for the given ``d``.

    With ``realized=True`` only those ``eta`` for which an invariant of exact
    type ``eta/d`` exists are kept (decided by solving the linear system).
    """
    d = tuple(int(v) for v in d)
    s = psi.s
    eta_s = 2 * d[s - 1]
    if tuple(act(psi.sigma, d)) != d or d[s - 1] < 0:
        return []
    cap = eta_s + (eta_s * psi.omega.r * sum(abs(b) for b in psi.omega.b)) // 2
    ranges = []
    for k in range(1, psi.n + 1):
        if k in (s, psi.t):
            ranges.append((eta_s,))
        else:
            ranges.append(range(cap + 1))
    out = []
    for eta in itertools.product(*ranges):
        if not eta_bounds_hold(psi, eta, d):
            continue
        if realized and not invariants_for(psi, eta, d).generic_exact_type:
            continue
        out.append(tuple(eta))
    return out


def generic_eta(psi: ClusterSymmetricMap, d: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Type ``(eta, d)`` of a generic invariant with denominator at most ``x^d``.

    The kernel is solved once over the largest box the degree bounds allow;
    a generic combination of the basis has the union of the basis supports.
    Returns ``None`` when only constants survive.
    """
    d = tuple(int(v) for v in d)
    s = psi.s
    eta_s = 2 * d[s - 1]
    if tuple(act(psi.sigma, d)) != d or eta_s <= 0:
        return None
    cap = eta_s + (eta_s * psi.omega.r * sum(abs(b) for b in psi.omega.b)) // 2
    box = tuple(eta_s if k in (s, psi.t) else cap for k in range(1, psi.n + 1))
    report = invariants_for(psi, box, d)
    support = {
        report.kernel.index.vectors[p] for vec in report.kernel.vectors for p, v in enumerate(vec) if v
    }
    if not support:
        return None
    F = LaurentPoly(psi.n, {e: 1 for e in support}).shift(tuple(-v for v in d))
    typed = normalize_type(F)
    if not any(typed.eta):
        return None
    return typed.eta, typed.d


def pair_feasibility(psi1: ClusterSymmetricMap, psi2: ClusterSymmetricMap, eta: Sequence[int]) -> bool:
    """False when two maps provably share no invariant with ``eta_s != 0`` (``s`` of the first map)."""
    if psi1.n != psi2.n:
        raise DimensionError("maps of different sizes")
    s, sp = psi1.s, psi2.s
    if eta[s - 1] == 0:
        return True
    b, bp = psi1.omega.b, psi2.omega.b
    sigma, tau = psi1.sigma, psi2.sigma
    t = psi1.t
    first = max(abs(b[sp - 1]), abs(b[sigma[sp - 1] - 1]))
    second = max(
        abs(bp[s - 1]),
        abs(bp[tau[s - 1] - 1]),
        abs(bp[t - 1]),
        abs(bp[tau[t - 1] - 1]),
    )
    return 4 >= psi1.omega.r * psi2.omega.r * first * second


# ---------------------------------------------------------------- identity case and d normalisation


def identity_case_express(F: LaurentPoly, psi: ClusterSymmetricMap) -> tuple[LaurentPoly, tuple[int, ...]]:
    """Write an invariant of ``psi = (id, s, omega)`` through ``g = (P + x_s^2)/x_s``.

    Returns ``(H, c)`` with ``F = x^{-c} H(x)|_{x_s -> g}``; ``c_s = 0`` and
    ``H`` is a polynomial in which the ``s``-th variable stands for ``g``.
    """
    if any(v != i + 1 for i, v in enumerate(psi.sigma)):
        raise DomainError("identity_case_express needs sigma = id")
    if not is_invariant(F, psi):
        raise DomainError("F is not invariant under the map")
    n, s = psi.n, psi.s
    typed = normalize_type(F)
    ds = typed.d[s - 1]
    T = typed.T
    g = LaurentPoly.variable(n, s)
    P = psi.P
    # Newton sums p_q = u^q + v^q in e1 = u + v = g, e2 = uv = P
    newton = [LaurentPoly.constant(n, 2), g]
    for q in range(2, ds + 1):
        newton.append(g * newton[q - 1] - P * newton[q - 2])
    H = slice_poly(T, s, ds)
    for q in range(1, ds + 1):
        H = H + slice_poly(T, s, ds + q) * newton[q]
    c = list(typed.d)
    c[s - 1] = 0
    return H, tuple(c)


def expand_identity_case(H: LaurentPoly, c: Sequence[int], psi: ClusterSymmetricMap) -> LaurentPoly:
    """Inverse of :func:`identity_case_express`: substitute ``g`` back."""
    n, s = psi.n, psi.s
    g = (psi.P + LaurentPoly.variable(n, s) ** 2) * LaurentPoly.monomial(
        tuple(-1 if i == s - 1 else 0 for i in range(n))
    )
    images = [LaurentPoly.variable(n, i) for i in range(1, n + 1)]
    images[s - 1] = g
    return H.substitute(images).shift(tuple(-v for v in c))


def normalize_d(F: LaurentPoly, psi: ClusterSymmetricMap) -> LaurentPoly:
    """Multiply by ``x^{d - d_s e_{sigma,s}}`` so ``d`` vanishes off the orbit of ``s``."""
    typed = normalize_type(F)
    orbit = set(orbit_of(psi.sigma, psi.s))
    shift = tuple(0 if i + 1 in orbit else v for i, v in enumerate(typed.d))
    return F.shift(shift)
