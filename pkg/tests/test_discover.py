import random
from fractions import Fraction

import pytest

from csym.csm import ClusterSymmetricMap, Seedlet, exchange_poly, is_invariant
from csym.discover import (
    find_cs_seed,
    find_pairs,
    format_pairs_table,
    parametric_d,
    poly_root,
    rational_root,
    seedlet_from_exchange,
    w_bounds_hold,
)
from csym.laurent import LaurentPoly
from csym.seed import corresponds

from oracles import pair_oracle, pairs_instances, random_pair_input, random_seedlet

L = LaurentPoly
x1, x2, x3, x4 = (L.variable(4, k) for k in range(1, 5))


def T1(a, b):
    return a * x2 * x3**2 + x1**2 * x4 + b * x2**2 * x4


def T2(a, b):
    return (x1 * x2 + a * x3**2 + b * b * x4**2) * (x1 + x2) + b * x4 * (x1**2 + x2**2) + a * b * x3**2 * x4


T3 = x1**2 * x4**2 + x2**2 * x3**2 + x1 * x3**3 + x2**3 * x4


def rows(report):
    return [(p.map.sigma, p.map.s, p.map.omega.b, p.map.omega.Z, p.dtilde.pattern()) for p in report.pairs]


def test_roots():
    u = L.variable(2, 1)
    assert poly_root((1 + u) ** 2, 2) == 1 + u
    assert poly_root(L.monomial((2, 4)), 2) == L.monomial((1, 2))
    assert poly_root(9 + 30 * u + 25 * u**2, 2) == 3 + 5 * u
    assert poly_root(1 + u + u**2, 2) is None
    assert rational_root(Fraction(27, 8), 3) == Fraction(3, 2)
    assert rational_root(Fraction(2), 2) is None


def test_parametric_d():
    pd = parametric_d((1, 4, 3, 2), 1, (0, 0, 0, 0), 1)
    assert pd.pattern() == "(1, d2, d3, d2)"
    assert pd.instantiate([5, 7]) == (1, 5, 7, 5)
    assert pd.contains((1, 2, 0, 2)) and not pd.contains((1, 2, 0, 3))
    assert not pd.admits_zero()


def test_seedlet_reconstruction():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 4)
        om = random_seedlet(rng, n, rng.randint(1, n), bmax=2, rmax=3)
        P = exchange_poly(om)
        rec = seedlet_from_exchange(P, om.s)
        assert rec is not None and exchange_poly(rec) == P
    assert seedlet_from_exchange(2 + L.variable(2, 1) ** 2, 2) == Seedlet(2, (2, 0), 1, (2, 1))
    assert seedlet_from_exchange(L.constant(2, 3), 1) == Seedlet(1, (0, 0), 1, (1, 2))
    assert seedlet_from_exchange(L.constant(2, 1), 1) is None


def test_w_bounds():
    om = Seedlet(1, (0, 1, -2, 1), 1, (1, 1))
    assert w_bounds_hold(om, (1, 4, 3, 2), (2, 2, 2, 1))
    assert not w_bounds_hold(Seedlet(1, (0, 3, -2, 1), 1, (1, 1)), (1, 4, 3, 2), (2, 2, 2, 1))


@pytest.mark.parametrize("a,b", [(3, 5), (1, 2)])
def test_t1_pairs(a, b):
    rep = find_pairs(T1(a, b))
    assert rows(rep) == [((1, 4, 3, 2), 1, (0, 1, -2, 1), (a, b), "(1, d2, d3, d2)")]
    p = rep.pairs[0]
    assert p.twin == Seedlet(1, (0, -1, 2, -1), 1, (b, a))
    for dt in [(1, 0, 0, 0), (1, 2, -1, 2)]:
        assert is_invariant(T1(a, b).shift(tuple(-v for v in dt)), p.map)


def test_t2_pairs():
    rep = find_pairs(T2(2, 3))
    assert sorted(rows(rep)) == sorted(
        [
            ((1, 2, 3, 4), 1, (0, 1, -2, 1), (2, 3), "(1, d2, d3, d4)"),
            ((2, 1, 3, 4), 1, (0, 1, -2, 1), (2, 3), "(1, 1, d3, d4)"),
            ((1, 2, 3, 4), 2, (1, 0, -2, 1), (2, 3), "(d1, 1, d3, d4)"),
            ((2, 1, 3, 4), 2, (1, 0, -2, 1), (2, 3), "(1, 1, d3, d4)"),
        ]
    )


def test_t2_degenerate_parameters_have_more_symmetry():
    assert len(find_pairs(T2(1, 1)).pairs) > 4


def test_t3_pairs_and_seed():
    rep = find_pairs(T3)
    assert rows(rep) == [
        ((1, 4, 3, 2), 1, (0, 1, -2, 1), (1, 1), "(1, d2, d3, d2)"),
        ((2, 3, 4, 1), 1, (0, 1, -2, 1), (1, 1), "(1, 1, 1, 1)"),
        ((3, 2, 1, 4), 4, (1, -2, 1, 0), (1, 1), "(d1, d2, d1, 1)"),
        ((4, 1, 2, 3), 4, (1, -2, 1, 0), (1, 1), "(1, 1, 1, 1)"),
    ]
    assert rep.inverse_index()[1] == 3
    F3 = T3.shift((-1, -1, -1, -1))
    seed = find_cs_seed(F3)
    assert seed is not None
    assert seed.B == ((0, -1, 2, -1), (1, 0, -3, 2), (-2, 3, 0, -1), (1, -2, 1, 0))
    for p in find_pairs(F3).pairs:
        if p.dtilde.admits_zero():
            assert corresponds(p.map, seed)
    table = format_pairs_table(rep)
    assert "(1 2 3 4)" in table and "(1, d2, d3, d2)" in table


def test_t1_seed_only_for_reciprocal_coefficients():
    assert find_cs_seed(T1(3, 5).shift((-1, -1, -1, -1))) is None
    seed = find_cs_seed(T1(1, 1).shift((-1, -1, -1, -1)))
    assert seed is not None
    assert corresponds(find_pairs(T1(1, 1)).pairs[0].map, seed)


def test_trivial_family():
    y1, y2, y3 = (L.variable(3, k) for k in (1, 2, 3))
    rep = find_pairs(y1**2 + y2**2 + 1)
    assert rep.trivial.zero_directions == (3,)


def test_pairs_match_oracle_sample():
    rng = random.Random(7)
    for _ in range(5):
        F = random_pair_input(rng)
        assert pairs_instances(find_pairs(F)) == pair_oracle(F)
