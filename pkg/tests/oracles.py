"""Independent reference computations used by the tests.

Nothing here goes through the linear-system builder or the pair search: the
invariant oracle expands ``F(psi(x)) - F(x)`` term by term and takes an
exact nullspace with sympy; the pair oracle scans every bounded candidate.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import sympy

from csym.csm import ClusterSymmetricMap, Seedlet, exchange_poly, is_invariant
from csym.laurent import LaurentPoly, all_permutations, normalize_type, perm_inverse


# ---------------------------------------------------------------- random data


def random_seedlet(rng: random.Random, n: int, s: int, bmax: int = 1, rmax: int = 2, zmax: int = 3) -> Seedlet:
    b = [rng.randint(-bmax, bmax) for _ in range(n)]
    b[s - 1] = 0
    r = rng.randint(1, rmax)
    Z = [rng.randint(0, zmax) for _ in range(r + 1)]
    Z[0] = max(Z[0], 1)
    Z[-1] = max(Z[-1], 1)
    return Seedlet(s, tuple(b), r, tuple(Z))


def random_map(rng: random.Random, n: int, **kw) -> ClusterSymmetricMap:
    sigma = list(range(1, n + 1))
    rng.shuffle(sigma)
    s = rng.randint(1, n)
    return ClusterSymmetricMap(tuple(sigma), s, random_seedlet(rng, n, s, **kw))


def random_poly(rng: random.Random, n: int, terms: int = 4, lo: int = -2, hi: int = 2, cmax: int = 5) -> LaurentPoly:
    data = {}
    for _ in range(terms):
        e = tuple(rng.randint(lo, hi) for _ in range(n))
        data[e] = Fraction(rng.choice([-1, 1]) * rng.randint(1, cmax), rng.randint(1, 3))
    return LaurentPoly(n, data)


def random_type(rng: random.Random, psi: ClusterSymmetricMap, top: int = 2) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(eta, d)`` meeting the type equalities, with ``eta_i <= top``."""
    n = psi.n
    from csym.laurent import perm_cycles

    d = [0] * n
    for cycle in perm_cycles(psi.sigma):
        value = 1 if psi.s in cycle else rng.randint(0, 1)
        for i in cycle:
            d[i - 1] = value
    eta = [rng.randint(0, top) for _ in range(n)]
    eta[psi.s - 1] = eta[psi.t - 1] = 2 * d[psi.s - 1]
    return tuple(eta), tuple(d)


# ---------------------------------------------------------------- invariant oracle


def invariant_oracle(psi: ClusterSymmetricMap, eta, d) -> list[tuple[Fraction, ...]]:
    """Nullspace of ``a -> P^K (F_a(psi x) - F_a(x))`` over the type box, by direct expansion."""
    n = psi.n
    box = list(itertools.product(*(range(e + 1) for e in eta)))
    P = psi.P
    t = psi.t
    K = max(d[t - 1], 0)
    columns = []
    for j in box:
        e = tuple(a - b for a, b in zip(j, d))
        # x^e at psi(x): x_{sigma(i)}^{e_i} for i != t, and (P / x_s)^{e_t}
        moved = [0] * n
        for i in range(n):
            if i == t - 1:
                moved[psi.s - 1] -= e[i]
            else:
                moved[psi.sigma[i] - 1] += e[i]
        lhs = LaurentPoly.monomial(tuple(moved)) * P ** (K + e[t - 1])
        rhs = LaurentPoly.monomial(e) * P**K
        columns.append(lhs - rhs)
    monos = sorted({m for col in columns for m in col.support()})
    index = {m: i for i, m in enumerate(monos)}
    M = sympy.zeros(len(monos), len(box))
    for c, col in enumerate(columns):
        for m, v in col.items():
            M[index[m], c] = sympy.Rational(v.numerator, v.denominator)
    basis = M.nullspace() if monos else [sympy.eye(len(box))[:, i] for i in range(len(box))]
    return [tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in v) for v in basis]


# ---------------------------------------------------------------- pair oracle

_PRIME = 2_147_483_629


def _inv(a: int) -> int:
    return pow(a % _PRIME, _PRIME - 2, _PRIME)


def _eval_mod(F: LaurentPoly, point) -> int | None:
    total = 0
    for e, c in F.items():
        v = c.numerator % _PRIME * _inv(c.denominator) % _PRIME
        for x, k in zip(point, e):
            v = v * pow(x if k >= 0 else _inv(x), abs(k), _PRIME) % _PRIME
        total = (total + v) % _PRIME
    return total


def candidate_seedlets(n: int, s: int, eta, sigma, zmax: int):
    """Every seedlet at ``s`` within the degree window, with ``Z`` entries at most ``zmax``."""
    inv = perm_inverse(sigma)
    eta_s = eta[s - 1]
    for r in range(1, 5):
        ranges = []
        for k in range(1, n + 1):
            a, b = eta[k - 1], eta[inv[k - 1] - 1]
            if k == s:
                ranges.append((0,))
                continue
            ranges.append(
                [v for v in range(-4, 5) if 2 * min(a, b) >= eta_s * r * abs(v) >= 2 * abs(a - b)]
            )
        for bvec in itertools.product(*ranges):
            inner = itertools.product(range(zmax + 1), repeat=r - 1)
            for mid in inner:
                for z0 in range(1, zmax + 1):
                    for zr in range(1, zmax + 1):
                        yield Seedlet(s, bvec, r, (z0, *mid, zr))


def pair_oracle(F: LaurentPoly, zmax: int = 2, box=range(-2, 5), rng=None):
    """All ``(sigma, s, P, dt)`` with ``F / x^dt`` invariant, ``eta_s > 0``, over bounded candidates."""
    rng = rng or random.Random(0)
    n = F.n
    eta = normalize_type(F).eta
    found = set()
    point = [rng.randrange(2, _PRIME - 1) for _ in range(n)]
    base = _eval_mod(F, point)
    if base == 0:
        point = [rng.randrange(2, _PRIME - 1) for _ in range(n)]
        base = _eval_mod(F, point)
    boxes = np.array(list(itertools.product(box, repeat=n)), dtype=np.int64)
    for sigma in all_permutations(n):
        for s in range(1, n + 1):
            if eta[s - 1] == 0:
                continue
            seen = set()
            for omega in candidate_seedlets(n, s, eta, sigma, zmax):
                psi = ClusterSymmetricMap(sigma, s, omega)
                if psi.key() in seen:
                    continue
                seen.add(psi.key())
                Pv = _eval_mod(exchange_poly(omega), point)
                image = [point[sigma[i] - 1] for i in range(n)]
                image[psi.t - 1] = Pv * _inv(point[s - 1]) % _PRIME
                if 0 in image:
                    continue
                moved = _eval_mod(F, image)
                # F(psi x) / psi(x)^dt == F(x) / x^dt  <=>  moved * prod(x/psi x)^dt == base
                ratios = [point[i] * _inv(image[i]) % _PRIME for i in range(n)]
                vals = np.full(len(boxes), moved, dtype=object)
                for i in range(n):
                    powers = {k: pow(ratios[i] if k >= 0 else _inv(ratios[i]), abs(k), _PRIME) for k in box}
                    vals = vals * np.array([powers[k] for k in boxes[:, i]], dtype=object) % _PRIME
                for idx in np.nonzero(vals == base)[0]:
                    dt = tuple(int(v) for v in boxes[idx])
                    if is_invariant(F.shift(tuple(-v for v in dt)), psi):
                        found.add((psi.key(), dt))
    return found


def random_pair_input(rng: random.Random) -> LaurentPoly:
    """A polynomial with ``eta_i <= 4``: usually a shifted invariant of a random map, sometimes random."""
    from csym.hle import invariants_for

    n = rng.randint(2, 3)
    if rng.random() < 0.2:
        return random_poly(rng, n, terms=rng.randint(2, 5), lo=0, hi=2, cmax=3)
    for _ in range(50):
        psi = random_map(rng, n, bmax=1, rmax=2, zmax=2)
        eta, d = random_type(rng, psi, top=4)
        if max(eta) > 4:
            continue
        report = invariants_for(psi, eta, d)
        useful = [e.poly for e in report.elements if any(e.eta)]
        if not useful:
            continue
        F = LaurentPoly.zero(n)
        for G in useful:
            F = F + G * rng.randint(1, 3)
        shift = tuple(rng.randint(-1, 1) for _ in range(n))
        F = F.shift(shift)
        if max(normalize_type(F).eta) <= 4:
            return F
    return random_poly(rng, n, terms=3, lo=0, hi=2, cmax=3)


def pairs_instances(report, zmax: int = 2, box=range(-2, 5)):
    """Instantiations of ``find_pairs`` output inside the oracle's search window."""
    out = set()
    n = report.F.n
    for p in report.pairs:
        if max(p.map.omega.Z) > zmax or p.map.omega.r > 4 or max(map(abs, p.map.omega.b)) > 4:
            # only maps the oracle can see: some seedlet for the same P must fit the window
            if not _fits_window(p.map, zmax):
                continue
        for dt in itertools.product(box, repeat=n):
            if p.dtilde.contains(dt):
                out.add((p.map.key(), dt))
    return out


def _fits_window(psi: ClusterSymmetricMap, zmax: int) -> bool:
    P = psi.P
    for omega in _same_exchange(psi.omega, zmax):
        if exchange_poly(omega) == P:
            return True
    return False


def _same_exchange(omega: Seedlet, zmax: int):
    """Seedlets with the same exchange polynomial: refine ``r`` by divisors of the step."""
    from math import gcd

    g = 0
    for v in omega.b:
        g = gcd(g, v)
    for m in range(1, 5):
        r = omega.r * m
        if r > 4:
            break
        if any(v % m for v in omega.b):
            continue
        b = tuple(v // m for v in omega.b)
        Z = [0] * (r + 1)
        for i, z in enumerate(omega.Z):
            Z[i * m] = z
        if max(Z) <= zmax and all(abs(v) * r <= 4 for v in b):
            yield Seedlet(omega.s, b, r, tuple(Z))
