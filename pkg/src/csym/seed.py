"""Generalized cluster seeds ``(B, R, Z)`` and their cluster symmetric sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterator, Mapping, Sequence

import numpy as np

from .csm import ClusterSymmetricMap, DomainError, Seedlet, exchange_poly
from .laurent import LaurentPoly, all_permutations, as_fraction, check_permutation

Matrix = tuple[tuple[int, ...], ...]

MAX_SYMMETRY_RANK = 8


def _matrix(B: Sequence[Sequence[int]]) -> Matrix:
    M = tuple(tuple(int(v) for v in row) for row in B)
    n = len(M)
    if any(len(row) != n for row in M):
        raise DomainError("exchange matrix must be square")
    return M


def find_symmetrizer(B: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """Minimal positive integers ``S`` with ``diag(S) B`` skew-symmetric, or ``None``."""
    M = _matrix(B)
    n = len(M)
    if any(M[i][i] for i in range(n)):
        return None
    ratio: list[Fraction | None] = [None] * n
    for root in range(n):
        if ratio[root] is not None:
            continue
        ratio[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                a, b = M[i][j], M[j][i]
                if a == 0 and b == 0:
                    continue
                if a == 0 or b == 0 or (a > 0) == (b > 0):
                    return None
                # s_i b_ij = -s_j b_ji
                sj = ratio[i] * a / -b
                if ratio[j] is None:
                    ratio[j] = sj
                    stack.append(j)
                elif ratio[j] != sj:
                    return None
    # scale each connected component to minimal integers
    comp = _components(M)
    out = [0] * n
    for members in comp:
        den = lcm(*(ratio[i].denominator for i in members))
        ints = [int(ratio[i] * den) for i in members]
        g = 0
        for v in ints:
            g = gcd(g, v)
        for i, v in zip(members, ints):
            out[i] = v // g
    return tuple(out)


def _components(M: Matrix) -> list[list[int]]:
    n = len(M)
    seen = [False] * n
    comps = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack, members = [root], []
        while stack:
            i = stack.pop()
            members.append(i)
            for j in range(n):
                if not seen[j] and (M[i][j] or M[j][i]):
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(members))
    return comps


def is_reciprocal(Z: Sequence[int]) -> bool:
    Z = list(Z)
    return bool(Z) and Z[0] == 1 and Z[-1] == 1 and Z == Z[::-1] and min(Z) >= 0


@dataclass(frozen=True)
class Seed:
    B: Matrix
    R: tuple[int, ...]
    Z: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        B = _matrix(self.B)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "R", tuple(int(r) for r in self.R))
        object.__setattr__(self, "Z", tuple(tuple(int(z) for z in Zk) for Zk in self.Z))
        n = len(B)
        if len(self.R) != n or len(self.Z) != n:
            raise DomainError("B, R and Z sizes differ")
        if min(self.R, default=1) < 1:
            raise DomainError("mutation degrees must be positive")
        for k, (r, Zk) in enumerate(zip(self.R, self.Z), start=1):
            if len(Zk) != r + 1:
                raise DomainError(f"Z_{k} must have degree r_{k} = {r}")
            if not is_reciprocal(Zk):
                raise DomainError(f"Z_{k} violates the reciprocity condition z_0 = z_r = 1, z_t = z_(r-t)")
        if find_symmetrizer(B) is None:
            raise DomainError("B is not skew-symmetrizable")

    @property
    def n(self) -> int:
        return len(self.B)

    def column(self, s: int) -> tuple[int, ...]:
        return tuple(row[s - 1] for row in self.B)

    def to_json(self) -> dict:
        return {
            "B": [list(row) for row in self.B],
            "R": list(self.R),
            "Z": [[str(z) for z in Zk] for Zk in self.Z],
        }

    @classmethod
    def from_json(cls, data: Mapping, params: Mapping[str, object] | None = None) -> "Seed":
        try:
            Z = []
            for Zk in data["Z"]:
                row = []
                for z in Zk:
                    if isinstance(z, str) and params and z.strip() in params:
                        z = params[z.strip()]
                    c = as_fraction(z)
                    if c.denominator != 1:
                        raise DomainError(f"mutation polynomial coefficient {c} is not an integer")
                    row.append(int(c))
                Z.append(tuple(row))
            return cls(tuple(tuple(r) for r in data["B"]), tuple(data["R"]), tuple(Z))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed seed JSON: {exc}") from exc

    def __str__(self) -> str:
        rows = "; ".join(" ".join(f"{v:>2}" for v in row) for row in self.B)
        return f"B=[{rows}] R={list(self.R)} Z={[list(z) for z in self.Z]}"


def seedlet_of(seed: Seed, s: int, negate: bool = False) -> Seedlet:
    """``pi_s`` of the seed (or of ``-B`` when ``negate``)."""
    b = seed.column(s)
    if negate:
        b = tuple(-v for v in b)
    return Seedlet(s, b, seed.R[s - 1], seed.Z[s - 1])


def exchange_polys(seed: Seed) -> tuple[LaurentPoly, ...]:
    return tuple(exchange_poly(seedlet_of(seed, s)) for s in range(1, seed.n + 1))


def mutate_matrix(B: Matrix, R: Sequence[int], s: int) -> Matrix:
    n = len(B)
    k = s - 1
    rs = R[k]
    out = []
    for i in range(n):
        row = []
        bis = B[i][k]
        for j in range(n):
            if i == k or j == k:
                row.append(-B[i][j])
            else:
                bsj = B[k][j]
                row.append(B[i][j] + rs * (max(bis, 0) * bsj + bis * max(-bsj, 0)))
        out.append(tuple(row))
    return tuple(out)


def mutate(seed: Seed, s: int) -> Seed:
    if not 1 <= s <= seed.n:
        raise DomainError(f"direction {s} outside 1..{seed.n}")
    return Seed(mutate_matrix(seed.B, seed.R, s), seed.R, seed.Z)


def permute_matrix(B: Matrix, sigma: Sequence[int]) -> Matrix:
    return tuple(tuple(B[si - 1][sj - 1] for sj in sigma) for si in sigma)


def permute_seed(seed: Seed, sigma: Sequence[int]) -> Seed:
    sigma = check_permutation(sigma, seed.n)
    return Seed(
        permute_matrix(seed.B, sigma),
        tuple(seed.R[i - 1] for i in sigma),
        tuple(seed.Z[i - 1] for i in sigma),
    )


def negate(seed: Seed) -> Seed:
    return Seed(tuple(tuple(-v for v in row) for row in seed.B), seed.R, seed.Z)


@dataclass(frozen=True)
class SeedSymmetry:
    sigma: tuple[int, ...]
    s: int
    sign: int

    def to_map(self, seed: Seed) -> ClusterSymmetricMap:
        return ClusterSymmetricMap(self.sigma, self.s, seedlet_of(seed, self.s))

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "s": self.s, "sign": self.sign}


def _neg(B: Matrix) -> Matrix:
    return tuple(tuple(-v for v in row) for row in B)


def symmetry_sign(seed: Seed, sigma: Sequence[int], s: int) -> int | None:
    """``+1``/``-1`` if ``sigma mu_s`` maps the seed to ``(+-B, R, Z)``, else ``None``."""
    n = seed.n
    if any(seed.R[sigma[i] - 1] != seed.R[i] or seed.Z[sigma[i] - 1] != seed.Z[i] for i in range(n)):
        return None
    image = permute_matrix(mutate_matrix(seed.B, seed.R, s), sigma)
    if image == seed.B:
        return 1
    if image == _neg(seed.B):
        return -1
    return None


def cluster_symmetric_set(seed: Seed) -> list[SeedSymmetry]:
    """All ``sigma mu_s`` with ``sigma mu_s(B, R, Z) = (+-B, R, Z)``, by exhaustive search."""
    n = seed.n
    if n > MAX_SYMMETRY_RANK:
        raise DomainError(f"exhaustive symmetry search is limited to n <= {MAX_SYMMETRY_RANK}")
    out = []
    mutated = [mutate_matrix(seed.B, seed.R, s) for s in range(1, n + 1)]
    negB = _neg(seed.B)
    for sigma in all_permutations(n):
        if any(seed.R[sigma[i] - 1] != seed.R[i] or seed.Z[sigma[i] - 1] != seed.Z[i] for i in range(n)):
            continue
        for s in range(1, n + 1):
            image = permute_matrix(mutated[s - 1], sigma)
            if image == seed.B:
                out.append(SeedSymmetry(sigma, s, 1))
            elif image == negB:
                out.append(SeedSymmetry(sigma, s, -1))
    return out


def corresponds(psi: ClusterSymmetricMap, seed: Seed) -> bool:
    if psi.n != seed.n:
        return False
    if symmetry_sign(seed, psi.sigma, psi.s) is None:
        return False
    omega = psi.omega
    for neg in (False, True):
        pi = seedlet_of(seed, psi.s, negate=neg)
        if (pi.b, pi.r, pi.Z) == (omega.b, omega.r, omega.Z):
            return True
    return False


# ---------------------------------------------------------------- bounded seed search


def _reciprocal_polys(r: int, bound: int) -> list[tuple[int, ...]]:
    half = r // 2  # free middle coefficients z_1..z_{floor(r/2)}
    free = [range(0, bound + 1)] * max(half, 0)
    out = []
    for mid in itertools.product(*free):
        Z = [0] * (r + 1)
        Z[0] = Z[r] = 1
        for t, v in enumerate(mid, start=1):
            Z[t] = Z[r - t] = v
        out.append(tuple(Z))
    return out


def seed_search(
    maps: Sequence[ClusterSymmetricMap],
    entry_bound: int = 3,
    limit: int | None = None,
) -> list[Seed]:
    """Seeds with ``|b_ij| <= E`` to which every map corresponds.

    The column ``s`` of ``B`` and ``(r_s, Z_s)`` are dictated by each map (up
    to the global sign of ``B``); remaining entries range over sign-compatible
    pairs ``(b_ij, b_ji)`` and remaining ``(r_k, Z_k)`` over reciprocal
    polynomials bounded by the data present in the maps.  Enumeration order is
    deterministic: sign ``+`` first, then entries lexicographically.
    """
    if not maps:
        return []
    n = maps[0].n
    if any(m.n != n for m in maps):
        raise DomainError("maps have different sizes")
    if entry_bound < 1:
        raise ValueError("entry bound must be >= 1")
    for m in maps:
        if not is_reciprocal(m.omega.Z):
            return []
        if max(abs(v) for v in m.omega.b) > entry_bound:
            return []

    r_max = max(max(m.omega.r for m in maps), max(len(m.omega.Z) - 1 for m in maps))
    z_max = max(max(m.omega.Z) for m in maps)

    results: list[Seed] = []
    for signs in itertools.product((1, -1), repeat=len(maps)):
        fixed: dict[tuple[int, int], int] = {}
        fixed_rz: dict[int, tuple[int, tuple[int, ...]]] = {}
        ok = True
        for m, e in zip(maps, signs):
            s = m.s
            for i, v in enumerate(m.omega.b):
                key = (i, s - 1)
                if fixed.get(key, e * v) != e * v:
                    ok = False
                fixed[key] = e * v
            rz = (m.omega.r, m.omega.Z)
            if fixed_rz.get(s - 1, rz) != rz:
                ok = False
            fixed_rz[s - 1] = rz
        if not ok:
            continue
        for seed in _enumerate_seeds(n, fixed, fixed_rz, entry_bound, r_max, z_max, maps):
            if all(corresponds(m, seed) for m in maps):
                if seed not in results:
                    results.append(seed)
                    if limit is not None and len(results) >= limit:
                        return results
    return results


def _pair_options(a_fixed: int | None, b_fixed: int | None, E: int) -> list[tuple[int, int]]:
    values = [0] + [v for k in range(1, E + 1) for v in (k, -k)]
    opts = []
    for a in values if a_fixed is None else [a_fixed]:
        for b in values if b_fixed is None else [b_fixed]:
            if (a == 0) != (b == 0):
                continue
            if a and (a > 0) == (b > 0):
                continue
            opts.append((a, b))
    return sorted(opts, key=lambda p: (abs(p[0]), -p[0], abs(p[1]), -p[1]))


_CHUNK = 250_000


def _enumerate_seeds(
    n: int,
    fixed: dict[tuple[int, int], int],
    fixed_rz: dict[int, tuple[int, tuple[int, ...]]],
    E: int,
    r_max: int,
    z_max: int,
    maps: Sequence[ClusterSymmetricMap] = (),
) -> Iterator[Seed]:
    if any(fixed.get((i, i), 0) for i in range(n)):
        return
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    options = [np.array(_pair_options(fixed.get((i, j)), fixed.get((j, i)), E), dtype=np.int64) for i, j in pairs]
    if any(len(o) == 0 for o in options):
        return
    rz_options = []
    for k in range(n):
        if k in fixed_rz:
            rz_options.append([fixed_rz[k]])
        else:
            rz_options.append([(r, Z) for r in range(1, r_max + 1) for Z in _reciprocal_polys(r, z_max)])
    R_choices = sorted({tuple(r for r, _ in rz) for rz in itertools.product(*rz_options)})

    # the trailing pairs are vectorised, the leading ones looped over
    sizes = [len(o) for o in options]
    split, inner = len(pairs), 1
    while split > 0 and inner * sizes[split - 1] <= _CHUNK:
        split -= 1
        inner *= sizes[split]
    inner_idx = np.unravel_index(np.arange(inner), sizes[split:]) if split < len(pairs) else ()

    for outer in itertools.product(*(range(k) for k in sizes[:split])):
        cand = np.zeros((inner, n, n), dtype=np.int64)
        for p, o in zip(pairs[:split], outer):
            i, j = p
            cand[:, i, j], cand[:, j, i] = options[pairs.index(p)][o]
        for q, (i, j) in enumerate(pairs[split:]):
            chosen = options[split + q][inner_idx[q]]
            cand[:, i, j], cand[:, j, i] = chosen[:, 0], chosen[:, 1]
        masks = {}
        for R in R_choices:
            ok = np.ones(inner, dtype=bool)
            for m in maps:
                ok &= _symmetric_mask(cand, R, m.sigma, m.s)
            masks[R] = ok
        any_ok = np.zeros(inner, dtype=bool)
        for ok in masks.values():
            any_ok |= ok
        for idx in np.flatnonzero(any_ok):
            Bt = tuple(tuple(int(v) for v in row) for row in cand[idx])
            if find_symmetrizer(Bt) is None:
                continue
            for rz in itertools.product(*rz_options):
                R = tuple(r for r, _ in rz)
                if masks[R][idx]:
                    yield Seed(Bt, R, tuple(Zk for _, Zk in rz))


def _symmetric_mask(cand: np.ndarray, R: Sequence[int], sigma: Sequence[int], s: int) -> np.ndarray:
    """Vectorised test of ``sigma mu_s(B) = +-B`` over a stack of matrices."""
    k = s - 1
    col = cand[:, :, k]
    row = cand[:, k, :]
    add = R[k] * (
        np.maximum(col, 0)[:, :, None] * row[:, None, :] + col[:, :, None] * np.maximum(-row, 0)[:, None, :]
    )
    mutated = cand + add
    mutated[:, k, :] = -cand[:, k, :]
    mutated[:, :, k] = -cand[:, :, k]
    perm = np.asarray(sigma) - 1
    image = mutated[:, perm][:, :, perm]
    same = (image == cand).all(axis=(1, 2))
    opposite = (image == -cand).all(axis=(1, 2))
    return same | opposite


# ---------------------------------------------------------------- classification


RANK3_MATRICES: dict[str, Matrix] = {
    "A2": ((0, 2, -2), (-2, 0, 2), (2, -2, 0)),
    "A3": ((0, 1, -1), (-4, 0, 2), (4, -2, 0)),
    "A4": ((0, 4, -4), (-1, 0, 2), (1, -2, 0)),
}

# (|b12|, |b21|, r1, r2) for each row of the rank-2 table; row 12 is B = 0
RANK2_KEYS: dict[int, tuple[int, int, int, int]] = {
    1: (2, 2, 1, 1),
    2: (2, 1, 2, 1),
    3: (1, 1, 2, 2),
    4: (1, 4, 1, 1),
    5: (1, 2, 2, 1),
    6: (1, 1, 4, 1),
    7: (1, 3, 1, 1),
    8: (1, 1, 3, 1),
    9: (1, 2, 1, 1),
    10: (1, 1, 2, 1),
    11: (1, 1, 1, 1),
}


def _times_R(seed: Seed) -> Matrix:
    return tuple(tuple(b * seed.R[j] for j, b in enumerate(row)) for row in seed.B)


def classify_rank3(seed: Seed) -> str:
    """Permutation-equivalence class of ``BR`` among A1..A5, or ``trivial-ring``."""
    if seed.n != 3:
        raise DomainError("classify_rank3 needs a rank-3 seed")
    for s in (1, 2, 3):
        if symmetry_sign(seed, (1, 2, 3), s) is None:
            raise DomainError(f"precondition violated: mu_{s} is not in the cluster symmetric set")
    BR = _times_R(seed)
    if all(v == 0 for row in BR for v in row):
        return "A1"
    for label, A in RANK3_MATRICES.items():
        for sigma in all_permutations(3):
            P = permute_matrix(A, sigma)
            if P == BR or P == _neg(BR):
                return label
    nonzero = {(i, j) for i in range(3) for j in range(3) if BR[i][j]}
    if len(nonzero) == 2:
        (i, j), (k, l) = sorted(nonzero)
        if (k, l) == (j, i):
            return "A5"
    return "trivial-ring"


@dataclass(frozen=True)
class Rank2Class:
    row: int | None
    sigma: tuple[int, ...]
    sign: int

    @property
    def trivial(self) -> bool:
        return self.row is None

    def label(self) -> str:
        if self.row is None:
            return "trivial-ring"
        return f"row {self.row} (sigma={list(self.sigma)}, sign={'+' if self.sign > 0 else '-'})"


def classify_rank2(seed: Seed) -> Rank2Class:
    """Row of the rank-2 table this seed is permutation equivalent to (up to the sign of ``B``)."""
    if seed.n != 2:
        raise DomainError("classify_rank2 needs a rank-2 seed")
    b12, b21 = seed.B[0][1], seed.B[1][0]
    r1, r2 = seed.R
    if b12 == 0 and b21 == 0:
        return Rank2Class(12, (1, 2), 1)
    if r1 * r2 * abs(b12 * b21) > 4:
        return Rank2Class(None, (1, 2), 1)
    for sigma in ((1, 2), (2, 1)):
        if sigma == (1, 2):
            key, top = (abs(b12), abs(b21), r1, r2), b12
        else:
            key, top = (abs(b21), abs(b12), r2, r1), b21
        for row, ref in RANK2_KEYS.items():
            if key == ref:
                return Rank2Class(row, sigma, 1 if top > 0 else -1)
    return Rank2Class(None, (1, 2), 1)
