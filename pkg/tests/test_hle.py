import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csym.csm import ClusterSymmetricMap, Seedlet, is_invariant
from csym.hle import (
    PreconditionError,
    build_hle,
    eta_bounds_hold,
    expand_identity_case,
    feasible_eta,
    generic_eta,
    identity_case_express,
    invariants_for,
    normalize_d,
    nullspace,
    pair_feasibility,
    power_coeffs,
    same_span,
    shift_vector,
    solve_kernel,
)
from csym.laurent import LaurentPoly, normalize_type

from oracles import invariant_oracle, random_map, random_type

L = LaurentPoly


def x(n, k):
    return L.variable(n, k)


def quadratic_map():
    return ClusterSymmetricMap((1, 2, 3), 2, Seedlet(2, (1, 0, -2), 1, (1, 1)))


def somos5(Z=(3, 5)):
    return ClusterSymmetricMap((2, 3, 4, 5, 1), 1, Seedlet(1, (0, 1, -1, -1, 1), 1, Z))


def fordy_marsh():
    return ClusterSymmetricMap((2, 3, 1), 1, Seedlet(1, (0, 1, 1), 1, (1, 1)))


def in_span(F, report):
    """Whether F is a rational combination of the report's elements."""
    polys = [e.poly for e in report.elements]
    monos = sorted({m for p in polys + [F] for m in p.support()})
    vecs = [{i: p.coeff(m) for i, m in enumerate(monos) if p.coeff(m)} for p in polys]
    both = vecs + [{i: F.coeff(m) for i, m in enumerate(monos) if F.coeff(m)}]
    from csym.hle import rref

    return len(rref(both)) == len(rref(vecs))


def test_power_coeffs():
    assert power_coeffs([3, 5], 0) == [1]
    assert power_coeffs([1, 1], 2) == [1, 2, 1]
    assert power_coeffs([3, 5], 2) == [9, 30, 25]
    with pytest.raises(ValueError):
        power_coeffs([1, 1], -1)


def test_shift_vector():
    om = Seedlet(1, (0, 1, -2, 1), 1, (1, 1))
    assert shift_vector(om, 1, 0, 2) == (-2, 0, 2, 0)
    assert shift_vector(om, 0, 0, 0) == (0, 0, 0, 0)
    assert shift_vector(Seedlet(2, (0, 0, 0), 1, (1, 1)), 1, 1, 3) == (0, -3, 0)


def test_quadratic_map_dimension_seven():
    rep = invariants_for(quadratic_map(), (1, 2, 2), (0, 1, 0))
    assert rep.dimension == 7
    x1, x2, x3 = (x(3, k) for k in (1, 2, 3))
    F2 = (x1 + x2**2 + x3**2) * L.monomial((0, -1, 0))
    assert in_span(F2, rep)
    for m in [(0, 0, 0), (0, 0, 1), (0, 0, 2), (1, 0, 0), (1, 0, 1), (1, 0, 2)]:
        assert in_span(L.monomial(m), rep)


def test_solve_kernel_edge_cases():
    assert len(nullspace([], 3)) == 3
    rows = [{0: Fraction(1)}, {1: Fraction(1)}]
    assert nullspace(rows, 2) == []


@pytest.mark.parametrize("Z", [(1, 1), (3, 5), (5, 3)])
def test_somos5_dimensions(Z):
    psi = somos5(Z)
    ones = (1,) * 5
    r0 = invariants_for(psi, (2, 2, 2, 2, 2), ones)
    assert r0.filtered_dimension == 0
    assert invariants_for(psi, (2, 2, 3, 2, 2), ones).filtered_dimension == 2
    assert invariants_for(psi, (2, 3, 3, 3, 2), ones).filtered_dimension == 3
    for e in invariants_for(psi, (2, 3, 3, 3, 2), ones).elements:
        assert is_invariant(e.poly, psi)


def test_somos5_printed_invariants():
    x1, x2, x3, x4, x5 = (x(5, k) for k in range(1, 6))
    T1 = x1 * x2**2 * x5**2 + x1**2 * x4**2 * x5 + 5 * (x1 * x3**2 * x4**2 + x2**2 * x3**2 * x5) + 3 * x2 * x3**3 * x4
    T2 = x1**2 * x3 * x5**2 + 5 * (x1 * x2 * x4**3 + x1 * x3**3 * x5 + x2**3 * x4 * x5) + 3 * x2**2 * x3 * x4**2
    rep = invariants_for(somos5(), (2, 3, 4, 3, 2), (1,) * 5)
    assert rep.dimension == 3
    den = L.monomial((-1,) * 5)
    for T in (T1, T2):
        assert is_invariant(T * den, somos5())
        assert in_span(T * den, rep)


def test_precondition_refused():
    with pytest.raises(PreconditionError, match="eta_s"):
        build_hle(quadratic_map(), (1, 1, 2), (0, 1, 0))
    with pytest.raises(PreconditionError, match="sigma"):
        build_hle(somos5(), (2,) * 5, (1, 0, 1, 1, 1))


def test_identity_generator_in_kernel():
    psi = ClusterSymmetricMap((1, 2, 3), 2, Seedlet(2, (0, 0, 0), 1, (1, 2)))
    rep = invariants_for(psi, (0, 2, 0), (0, 1, 0))
    g = (psi.P + x(3, 2) ** 2) * L.monomial((0, -1, 0))
    assert in_span(g, rep)


def test_fordy_marsh_types():
    psi = fordy_marsh()
    assert generic_eta(psi, (1, 1, 1)) == ((2, 2, 2), (1, 1, 1))
    assert generic_eta(psi, (2, 2, 2)) == ((4, 4, 4), (2, 2, 2))
    x1, x2, x3 = (x(3, k) for k in (1, 2, 3))
    den = L.monomial((-1, -1, -1))
    F1 = (x1**2 * x3 + x1 * x2**2 + x1 * x3**2 + x2**2 * x3 + x2) * den
    F2 = (x2 * x1**2 + x1 + x2 * x3**2 + x3) * den
    assert is_invariant(F1, psi) and is_invariant(F2, psi)
    rep = invariants_for(psi, (2, 2, 2), (1, 1, 1))
    assert rep.dimension == 3 and in_span(F1, rep) and in_span(F2, rep)
    assert (2, 2, 2) in feasible_eta(psi, (1, 1, 1), realized=False)
    assert not eta_bounds_hold(psi, (2, 2, 0), (1, 1, 1))


def test_pair_feasibility():
    mk = lambda s, b: ClusterSymmetricMap((1, 2, 3), s, Seedlet(s, b, 1, (1, 1)))
    m1, m2 = mk(1, (0, -2, 2)), mk(2, (2, 0, -2))
    assert pair_feasibility(m1, m2, (2, 2, 2))
    a = ClusterSymmetricMap((1, 2), 1, Seedlet(1, (0, 3), 1, (1, 1)))
    b = ClusterSymmetricMap((1, 2), 2, Seedlet(2, (2, 0), 1, (1, 1)))
    assert not pair_feasibility(a, b, (2, 2))
    z = ClusterSymmetricMap((1, 2), 1, Seedlet(1, (0, 0), 1, (1, 1)))
    assert pair_feasibility(z, z, (2, 2))


def test_identity_case_round_trip():
    psi = quadratic_map()
    x1, x2, x3 = (x(3, k) for k in (1, 2, 3))
    F2 = (x1 + x2**2 + x3**2) * L.monomial((0, -1, 0))
    H, c = identity_case_express(F2, psi)
    assert H == x2 and c == (0, 0, 0)
    G = F2 * F2 + 3 * x1 * F2
    H, c = identity_case_express(G, psi)
    assert expand_identity_case(H, c, psi) == G
    with pytest.raises(Exception):
        identity_case_express(x2, psi)


def test_normalize_d():
    psi = quadratic_map()
    x1, x2, x3 = (x(3, k) for k in (1, 2, 3))
    F2 = (x1 + x2**2 + x3**2) * L.monomial((0, -1, 0))
    G = F2 * L.monomial((-1, 0, -2))
    N = normalize_d(G, psi)
    assert normalize_type(N).d == (0, 1, 0)
    assert is_invariant(N, psi)
    assert normalize_d(F2, psi) == F2


def test_oracle_agreement_sample():
    rng = random.Random(3)
    for _ in range(15):
        psi = random_map(rng, rng.randint(2, 3))
        eta, d = random_type(rng, psi)
        sys = build_hle(psi, eta, d)
        assert same_span(solve_kernel(sys).vectors, invariant_oracle(psi, eta, d), sys.width)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_produced_invariants_respect_bounds(seed):
    rng = random.Random(seed)
    psi = random_map(rng, rng.randint(2, 3), bmax=1, rmax=2)
    eta, d = random_type(rng, psi, top=3)
    for e in invariants_for(psi, eta, d).elements:
        assert is_invariant(e.poly, psi)
        if any(e.eta):
            assert eta_bounds_hold(psi, e.eta, e.d)
