"""Positive integer solutions of Markov-cluster type equations.

Built-in rank-2 and rank-3 tables, mutation-orbit enumeration, an
independent brute-force solver, height descent and the comparison of orbit
against solution set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .csm import ClusterSymmetricMap, DomainError, apply_integer, is_invariant
from .laurent import LaurentPoly, identity_perm, normalize_type
from .seed import Seed, seedlet_of


class DescentError(DomainError):
    """Height failed to drop; would contradict the descent argument at this point."""


@dataclass(frozen=True)
class EquationInstance:
    name: str
    F: LaurentPoly
    params: tuple[int, ...]
    c: Fraction
    generators: tuple[ClusterSymmetricMap, ...]
    d: tuple[int, ...] = field(init=False)
    T: LaurentPoly = field(init=False, repr=False)

    def __post_init__(self) -> None:
        typed = normalize_type(self.F)
        object.__setattr__(self, "d", typed.d)
        object.__setattr__(self, "T", typed.T)

    @property
    def n(self) -> int:
        return self.F.n

    def is_solution(self, x: Sequence[int]) -> bool:
        if any(v <= 0 for v in x):
            return False
        return self.F.evaluate(x) == self.c

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "poly": self.F.to_json(),
            "params": list(self.params),
            "c": str(self.c),
            "d": list(self.d),
        }


def mutations_of(seed: Seed) -> tuple[ClusterSymmetricMap, ...]:
    ident = identity_perm(seed.n)
    return tuple(ClusterSymmetricMap(ident, s, seedlet_of(seed, s)) for s in range(1, seed.n + 1))


def make_instance(name: str, seed: Seed, F: LaurentPoly, params: Sequence[int]) -> EquationInstance:
    gens = mutations_of(seed)
    for g in gens:
        if not is_invariant(F, g):
            raise DomainError(f"{name}: polynomial is not invariant under mu_{g.s}")
    c = F.evaluate((1,) * F.n)
    return EquationInstance(name, F, tuple(params), c, gens)


# ---------------------------------------------------------------- built-in tables


def _vars(n: int) -> list[LaurentPoly]:
    return [LaurentPoly.variable(n, k) for k in range(1, n + 1)]


def _over(T: LaurentPoly, d: Sequence[int]) -> LaurentPoly:
    return T.shift(tuple(-v for v in d))


Row = Callable[..., tuple[Seed, LaurentPoly]]


def _r2_1() -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    return Seed(((0, 2), (-2, 0)), (1, 1), ((1, 1), (1, 1))), _over(x**2 + y**2 + 1, (1, 1))


def _r2_2(k1: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 2), (-1, 0)), (2, 1), ((1, k1, 1), (1, 1)))
    return seed, _over(x**2 + y**2 + k1 * y + 1, (1, 1))


def _r2_3(k1: int, k2: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-1, 0)), (2, 2), ((1, k1, 1), (1, k2, 1)))
    return seed, _over(x**2 + y**2 + k1 * y + k2 * x + 1, (1, 1))


def _r2_4() -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-4, 0)), (1, 1), ((1, 1), (1, 1)))
    return seed, _over(x**2 + y**4 + 2 * x + 1, (1, 2))


def _r2_5(k: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-2, 0)), (2, 1), ((1, k, 1), (1, 1)))
    return seed, _over(x**2 + y**4 + k * y**2 + 2 * x + 1, (1, 2))


def _r2_6(k1: int, k2: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-1, 0)), (4, 1), ((1, k1, k2, k1, 1), (1, 1)))
    Z1 = 1 + k1 * y + k2 * y**2 + k1 * y**3 + y**4
    return seed, _over(x**2 + 2 * x + k1 * x * y + Z1, (1, 2))


def _r2_7() -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-3, 0)), (1, 1), ((1, 1), (1, 1)))
    P1 = 1 + y**3
    return seed, _over((x**2 + 2 * x + P1) * (y + 1) + x * y**3, (1, 2))


def _r2_8(k1: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-1, 0)), (3, 1), ((1, k1, k1, 1), (1, 1)))
    Z1 = 1 + k1 * y + k1 * y**2 + y**3
    return seed, _over((x**2 + 2 * x + Z1) * (y + 1) + x * y * (y**2 + k1), (1, 2))


def _r2_9() -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-2, 0)), (1, 1), ((1, 1), (1, 1)))
    return seed, _over(x * y**2 + y**2 + x**2 + 2 * x + 1, (1, 1))


def _r2_10(k1: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-1, 0)), (2, 1), ((1, k1, 1), (1, 1)))
    return seed, _over(x * y**2 + y**2 + k1 * y + x**2 + 2 * x + 1, (1, 1))


def _r2_11() -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 1), (-1, 0)), (1, 1), ((1, 1), (1, 1)))
    return seed, _over(x**2 + y**2 + 2 * x + 2 * y + x**2 * y + x * y**2 + 1, (1, 1))


def _r2_12(k1: int, k2: int) -> tuple[Seed, LaurentPoly]:
    x, y = _vars(2)
    seed = Seed(((0, 0), (0, 0)), (2, 2), ((1, k1, 1), (1, k2, 1)))
    return seed, _over((x**2 + 2 + k1) * (y**2 + 2 + k2), (1, 1))


def _r3(B, R, Z, T, d) -> tuple[Seed, LaurentPoly]:
    return Seed(B, R, Z), _over(T, d)


def _r3_1() -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 2, -2), (-2, 0, 2), (2, -2, 0))
    return _r3(B, (1, 1, 1), ((1, 1),) * 3, x**2 + y**2 + z**2, (1, 1, 1))


def _r3_2(k3: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 2, -1), (-2, 0, 1), (2, -2, 0))
    Z = ((1, 1), (1, 1), (1, k3, 1))
    return _r3(B, (1, 1, 2), Z, x**2 + y**2 + z**2 + k3 * x * y, (1, 1, 1))


def _r3_3(k1: int, k3: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 2, -1), (-1, 0, 1), (1, -2, 0))
    Z = ((1, k1, 1), (1, 1), (1, k3, 1))
    return _r3(B, (2, 1, 2), Z, x**2 + y**2 + z**2 + k1 * y * z + k3 * x * y, (1, 1, 1))


def _r3_4(k1: int, k2: int, k3: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 1, -1), (-1, 0, 1), (1, -1, 0))
    Z = ((1, k1, 1), (1, k2, 1), (1, k3, 1))
    T = x**2 + y**2 + z**2 + k1 * y * z + k2 * z * x + k3 * x * y
    return _r3(B, (2, 2, 2), Z, T, (1, 1, 1))


def _r3_5() -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 1, -1), (-4, 0, 2), (4, -2, 0))
    T = x**2 + y**4 + z**4 + 2 * x * y**2 + 2 * x * z**2
    return _r3(B, (1, 1, 1), ((1, 1),) * 3, T, (1, 2, 2))


def _r3_6(k: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 1, -1), (-2, 0, 2), (2, -2, 0))
    Z = ((1, k, 1), (1, 1), (1, 1))
    T = x**2 + y**4 + z**4 + 2 * x * y**2 + k * y**2 * z**2 + 2 * x * z**2
    return _r3(B, (2, 1, 1), Z, T, (1, 2, 2))


def _r3_7(k1: int, k2: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 1, -1), (-1, 0, 2), (1, -2, 0))
    Z = ((1, k1, k2, k1, 1), (1, 1), (1, 1))
    zZ = z**4 + k1 * y * z**3 + k2 * y**2 * z**2 + k1 * y**3 * z + y**4
    T = x**2 + 2 * x * (y**2 + z**2) + k1 * x * y * z + zZ
    return _r3(B, (4, 1, 1), Z, T, (1, 2, 2))


def _r3_8() -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 4, -4), (-1, 0, 2), (1, -2, 0))
    return _r3(B, (1, 1, 1), ((1, 1),) * 3, x**4 + y**2 + z**2 + 2 * y * z, (2, 1, 1))


def _r3_9(k2: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 2, -4), (-1, 0, 2), (1, -1, 0))
    Z = ((1, 1), (1, k2, 1), (1, 1))
    T = x**4 + k2 * x**2 * z + y**2 + z**2 + 2 * y * z
    return _r3(B, (1, 2, 1), Z, T, (2, 1, 1))


def _r3_10(k2: int, k3: int) -> tuple[Seed, LaurentPoly]:
    x, y, z = _vars(3)
    B = ((0, 2, -2), (-1, 0, 1), (1, -1, 0))
    Z = ((1, 1), (1, k2, 1), (1, k3, 1))
    T = x**4 + k3 * x**2 * y + k2 * x**2 * z + y**2 + z**2 + 2 * y * z
    return _r3(B, (1, 2, 2), Z, T, (2, 1, 1))


@dataclass(frozen=True)
class TableRow:
    build: Row
    params: tuple[str, ...]


TABLES: dict[str, dict[int, TableRow]] = {
    "rank2": {
        1: TableRow(_r2_1, ()),
        2: TableRow(_r2_2, ("k1",)),
        3: TableRow(_r2_3, ("k1", "k2")),
        4: TableRow(_r2_4, ()),
        5: TableRow(_r2_5, ("k",)),
        6: TableRow(_r2_6, ("k1", "k2")),
        7: TableRow(_r2_7, ()),
        8: TableRow(_r2_8, ("k1",)),
        9: TableRow(_r2_9, ()),
        10: TableRow(_r2_10, ("k1",)),
        11: TableRow(_r2_11, ()),
        12: TableRow(_r2_12, ("k1", "k2")),
    },
    "rank3": {
        1: TableRow(_r3_1, ()),
        2: TableRow(_r3_2, ("k3",)),
        3: TableRow(_r3_3, ("k1", "k3")),
        4: TableRow(_r3_4, ("k1", "k2", "k3")),
        5: TableRow(_r3_5, ()),
        6: TableRow(_r3_6, ("k",)),
        7: TableRow(_r3_7, ("k1", "k2")),
        8: TableRow(_r3_8, ()),
        9: TableRow(_r3_9, ("k2",)),
        10: TableRow(_r3_10, ("k2", "k3")),
    },
}


def param_names(table: str, i: int) -> tuple[str, ...]:
    return _row(table, i).params


def _row(table: str, i: int) -> TableRow:
    if table not in TABLES:
        raise DomainError(f"unknown table {table!r}; expected rank2 or rank3")
    if i not in TABLES[table]:
        raise DomainError(f"{table} has rows 1..{len(TABLES[table])}, got {i}")
    return TABLES[table][i]


def builtin(table: str, i: int, params: Sequence[int] = ()) -> tuple[Seed, EquationInstance]:
    """Seed and equation of one table row with its parameters substituted."""
    row = _row(table, i)
    params = tuple(params)
    if len(params) != len(row.params):
        raise DomainError(f"{table}:{i} takes {len(row.params)} parameter(s) {list(row.params)}, got {len(params)}")
    for name, v in zip(row.params, params):
        if int(v) != v or v < 0:
            raise DomainError(f"parameter {name} must be a nonnegative integer, got {v}")
    params = tuple(int(v) for v in params)
    seed, F = row.build(*params)
    return seed, make_instance(f"{table}:{i}", seed, F, params)


def parameter_grid(table: str, i: int, values: Iterable[int]) -> list[tuple[int, ...]]:
    values = list(values)
    return list(product(values, repeat=len(param_names(table, i))))


# ---------------------------------------------------------------- height, orbit


def height(eq: EquationInstance, x: Sequence[int]) -> Fraction:
    return max(Fraction(v) ** e for v, e in zip(x, eq.d))


def _neighbours(eq: EquationInstance, x: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for k, g in enumerate(eq.generators, start=1):
        y = apply_integer(g, x)
        if y is None:
            raise DomainError(f"non-integral image of {x} under generator {k}")
        out.append((k, y))
    return out


def orbit_enumerate(eq: EquationInstance, start: Sequence[int], height_bound: int | Fraction) -> list[tuple[int, ...]]:
    """All tuples reachable from ``start`` without exceeding the height bound (sorted)."""
    start = tuple(int(v) for v in start)
    if not eq.is_solution(start):
        raise DomainError(f"{start} is not a positive solution of F = {eq.c}")
    H = Fraction(height_bound)
    if height(eq, start) > H:
        raise DomainError("height bound is below the height of the start point")
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for _, y in _neighbours(eq, x):
            if y not in seen and min(y) > 0 and height(eq, y) <= H:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


# ---------------------------------------------------------------- brute force


def _cleared_coeffs(eq: EquationInstance, k: int) -> dict[tuple[int, ...], list[int]]:
    """``T - c x^d`` as a polynomial in ``x_k``: rest-exponent -> integer coefficients by power."""
    G = eq.T - LaurentPoly.monomial(eq.d, eq.c)
    scale = 1
    for _, c in G.items():
        scale = scale * c.denominator // np.gcd(scale, c.denominator)
    G = G.scale(scale)
    deg = max(e[k - 1] for e in G.support())
    out: dict[tuple[int, ...], list[int]] = {}
    for e, c in G.items():
        rest = e[: k - 1] + e[k:]
        out.setdefault(rest, [0] * (deg + 1))[e[k - 1]] += int(c)
    return out


def brute_force_solutions(eq: EquationInstance, bound: int) -> list[tuple[int, ...]]:
    """All positive solutions with every coordinate at most ``bound``.

    One variable of least degree is solved for over the grid of the others:
    floating point proposes candidate roots (with neighbours), exact integer
    evaluation decides.
    """
    n = eq.n
    if bound < 1:
        return []
    eta = normalize_type(eq.F).eta
    k = min(range(1, n + 1), key=lambda i: (eta[i - 1], i))
    terms = _cleared_coeffs(eq, k)
    deg = len(next(iter(terms.values()))) - 1
    axes = [np.arange(1, bound + 1, dtype=np.int64) for _ in range(n - 1)]
    grids = [g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")] if axes else []
    size = grids[0].size if grids else 1
    # magnitude guard for exact int64 evaluation
    top = sum(abs(c) for coeffs in terms.values() for c in coeffs) * bound ** int(sum(eta))
    dtype = np.int64 if top < 2**62 else object
    exact_grids = [g.astype(dtype) for g in grids]
    coeffs_i = _coeff_arrays(terms, exact_grids, dtype, size)
    if deg <= 2:
        coeffs_f = _coeff_arrays(terms, [g.astype(np.float64) for g in grids], np.float64, size)
        cand = _quadratic_candidates(coeffs_f, bound)
    else:
        cand = [np.full(size, v, dtype=np.int64) for v in range(1, bound + 1)]
    found = set()
    for v in cand:
        vv = v.astype(dtype)
        total = np.zeros(size, dtype=dtype)
        for c in reversed(coeffs_i):
            total = total * vv + c
        hit = np.nonzero((total == 0) & (v >= 1) & (v <= bound))[0]
        for pos in hit:
            rest = tuple(int(g[pos]) for g in grids)
            found.add(rest[: k - 1] + (int(v[pos]),) + rest[k - 1 :])
    return sorted(found)


def _coeff_arrays(terms, grids, dtype, size):
    deg = len(next(iter(terms.values()))) - 1
    arrays = [np.zeros(size, dtype=dtype) for _ in range(deg + 1)]
    for rest, coeffs in terms.items():
        mono = np.ones(size, dtype=dtype)
        for g, e in zip(grids, rest):
            if e:
                mono = mono * g**e
        for j, c in enumerate(coeffs):
            if c:
                arrays[j] = arrays[j] + c * mono
    return arrays


def _quadratic_candidates(coeffs, bound):
    size = coeffs[0].shape
    zero = np.zeros(size)
    c = coeffs[0]
    b = coeffs[1] if len(coeffs) > 1 else zero
    a = coeffs[2] if len(coeffs) > 2 else zero
    with np.errstate(all="ignore"):
        disc = np.maximum(b * b - 4 * a * c, 0.0)
        sq = np.sqrt(disc)
        q = -0.5 * (b + np.where(b >= 0, sq, -sq))
        r1 = np.where(a != 0, q / a, np.where(b != 0, -c / b, 0.0))
        r2 = np.where(q != 0, c / q, 0.0)
    out = []
    for r in (r1, r2):
        r = np.nan_to_num(r, nan=0.0, posinf=0.0, neginf=0.0)
        base = np.rint(np.clip(r, -1, bound + 1)).astype(np.int64)
        out.extend([base - 1, base, base + 1])
    return out


# ---------------------------------------------------------------- descent


def descend(eq: EquationInstance, x: Sequence[int]) -> list[int]:
    """Generator indices taking ``x`` down to the all-ones solution.

    At each step the generators acting on coordinates that attain the height
    are tried first; when none lowers the height, a breadth-first search
    inside the current height level finishes the descent.
    """
    x = tuple(int(v) for v in x)
    if not eq.is_solution(x):
        raise DomainError(f"{x} is not a positive solution of F = {eq.c}")
    ones = (1,) * eq.n
    word: list[int] = []
    while x != ones:
        h = height(eq, x)
        powers = [Fraction(v) ** e for v, e in zip(x, eq.d)]
        order = sorted(range(eq.n), key=lambda i: (-powers[i], i))
        step = None
        for i in order:
            y = apply_integer(eq.generators[i], x)
            if y is not None and min(y) > 0 and height(eq, y) < h:
                step = (i + 1, y)
                break
        if step is None:
            tail = _finish(eq, x, h)
            if tail is None:
                raise DescentError(f"height does not drop at {x} (height {h})")
            word.extend(tail)
            return word
        word.append(step[0])
        x = step[1]
    return word


def _finish(eq: EquationInstance, x: tuple[int, ...], h: Fraction) -> list[int] | None:
    ones = (1,) * eq.n
    prev: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {x: None}
    queue = deque([x])
    while queue:
        cur = queue.popleft()
        if cur == ones:
            path = []
            while prev[cur] is not None:
                cur, k = prev[cur]
                path.append(k)
            return path[::-1]
        for k, y in _neighbours(eq, cur):
            if y not in prev and min(y) > 0 and height(eq, y) <= h:
                prev[y] = (cur, k)
                queue.append(y)
    return None


def replay(eq: EquationInstance, word: Sequence[int]) -> tuple[int, ...]:
    """Apply the reversed word to the all-ones point (mutations are involutions)."""
    x = (1,) * eq.n
    for k in reversed(word):
        x = apply_integer(eq.generators[k - 1], x)
    return x


# ---------------------------------------------------------------- orbit versus solutions


@dataclass(frozen=True)
class OrbitReport:
    name: str
    params: tuple[int, ...]
    bound: int
    orbit: tuple[tuple[int, ...], ...]
    solutions: tuple[tuple[int, ...], ...]

    @property
    def missing_from_orbit(self) -> list[tuple[int, ...]]:
        return sorted(set(self.solutions) - set(self.orbit))

    @property
    def not_solutions(self) -> list[tuple[int, ...]]:
        return sorted(set(self.orbit) - set(self.solutions))

    @property
    def equal(self) -> bool:
        return set(self.orbit) == set(self.solutions)

    def to_json(self) -> dict:
        return {
            "equation": self.name,
            "params": list(self.params),
            "bound": self.bound,
            "equal": self.equal,
            "orbit_size": len(self.orbit),
            "solution_count": len(self.solutions),
            "missing_from_orbit": [list(x) for x in self.missing_from_orbit],
            "not_solutions": [list(x) for x in self.not_solutions],
        }


def verify_orbit_equals_solutions(eq: EquationInstance, bound: int) -> OrbitReport:
    H = max(Fraction(bound) ** e for e in eq.d)
    orbit = [x for x in orbit_enumerate(eq, (1,) * eq.n, H) if max(x) <= bound]
    solutions = brute_force_solutions(eq, bound)
    return OrbitReport(eq.name, eq.params, bound, tuple(orbit), tuple(solutions))
