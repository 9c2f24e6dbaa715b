import cmath
import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghz_qunits.angles import BellValue
from ghz_qunits.errors import CapExceededError
from ghz_qunits.lhv import (
    CongruenceSystem,
    LhvStrategy,
    ProductConstraint,
    achievable_values,
    enumerate_consistent,
    mixture_correlation,
    solve_congruences,
    strategy_value,
    to_congruences,
)
from ghz_qunits.paradox import MENU, PHI, PHI_PRIME, lhv_constraints


def naive(dim, parties, menu, constraints, probe=None):
    """Plain nested enumeration: (sorted solutions, probe exponents)."""
    k = len(menu)
    sols, vals = [], set()
    for vec in product(range(dim), repeat=parties * k):
        ok = all(
            sum(vec[l * k + menu.index(s)] for l, s in enumerate(c.choice)) % dim
            == c.exponent % dim
            for c in constraints
        )
        if ok:
            sols.append(vec)
            if probe is not None:
                vals.add(sum(vec[l * k + menu.index(s)] for l, s in enumerate(probe)) % dim)
    return sols, vals


GHZ3 = lhv_constraints(3)


def strat(dim, *rows, menu=("a",)):
    return LhvStrategy(dim, menu, rows)


# -- strategy values --------------------------------------------------------


def test_strategy_value_examples():
    assert strategy_value(strat(3, (0,), (0,), (0,)), "aaa") == BellValue(0, 3)
    assert strategy_value(strat(3, (1,), (1,), (1,)), "aaa") == BellValue(0, 3)
    assert strategy_value(strat(3, (2,), (2,), (1,)), "aaa") == BellValue(2, 3)


def test_strategy_value_unknown_label():
    with pytest.raises(KeyError):
        strategy_value(strat(3, (0,), (0,)), ("a", "zz"))


def test_strategy_validation():
    with pytest.raises(ValueError):
        strat(3, (3,))
    with pytest.raises(ValueError):
        LhvStrategy(3, ("a", "b"), ((0,),))


# -- congruence systems -----------------------------------------------------


def test_to_congruences_ghz3():
    system = to_congruences(3, 3, GHZ3, MENU)
    assert system.n_vars == 6
    assert system.variables[:2] == [(0, PHI), (0, PHI_PRIME)]
    # columns: x1 y1 x2 y2 x3 y3
    rows = set(zip(system.matrix, system.rhs))
    assert rows == {
        ((1, 0, 1, 0, 0, 1), 2),  # x1 + x2 + y3
        ((0, 1, 1, 0, 1, 0), 2),  # y1 + x2 + x3
        ((1, 0, 0, 1, 1, 0), 2),  # x1 + y2 + x3
        ((0, 1, 0, 1, 0, 1), 0),  # y1 + y2 + y3
    }


def test_to_congruences_trivial():
    assert to_congruences(3, 2, [], menu=("a",)).matrix == ()
    single = to_congruences(5, 1, [ProductConstraint(("a",), 4)])
    assert single.matrix == ((1,),) and single.rhs == (4,)


def test_solve_single_row():
    system = CongruenceSystem(5, 3, ("a",), ((0, 1, 0),), (3,))
    sol = solve_congruences(system)
    assert sol.consistent and sol.count == 5**2
    assert sol.particular.vector[1] == 3


def test_solve_ghz3():
    sol = solve_congruences(to_congruences(3, 3, GHZ3, MENU))
    brute, _ = naive(3, 3, list(MENU), GHZ3)
    assert len(brute) == 9
    assert sol.consistent and sol.count == 9
    assert sol.contains(sol.particular.vector)


def test_solve_contradiction():
    system = CongruenceSystem(3, 1, ("a",), ((1,), (1,)), (0, 1))
    sol = solve_congruences(system)
    assert sol.status == "inconsistent" and sol.count == 0
    assert sol.values_at((1,)) == frozenset()


def test_composite_modulus_needs_lattice_reduction():
    # 2x = 1 has no solution mod 4; 2x = 2 has two
    bad = CongruenceSystem(4, 1, ("a",), ((2,),), (1,))
    assert not solve_congruences(bad).consistent
    good = CongruenceSystem(4, 1, ("a",), ((2,),), (2,))
    sol = solve_congruences(good)
    assert sol.count == 2
    assert sol.values_at((1,)) == {1, 3}
    # 2x + 3y = 1, 4x + 0y... mod 6
    sys6 = CongruenceSystem(6, 2, ("a",), ((2, 3), (4, 0)), (1, 2))
    sol = solve_congruences(sys6)
    sols = [v for v in product(range(6), repeat=2)
            if (2 * v[0] + 3 * v[1]) % 6 == 1 and (4 * v[0]) % 6 == 2]
    assert sol.count == len(sols)
    assert all(sol.contains(v) for v in sols)


def _span(sol, n):
    """All particular + integer combinations of the kernel generators."""
    out = set()
    gens = sol.kernel_basis
    for coeffs in product(range(n), repeat=len(gens)):
        v = list(sol.particular.vector)
        for c, g in zip(coeffs, gens):
            v = [(a + c * b) % n for a, b in zip(v, g)]
        out.add(tuple(v))
    return out


@st.composite
def systems(draw):
    n = draw(st.integers(2, 6))
    m = draw(st.integers(1, 3))
    menu = ("a", "b")
    constraints = draw(st.lists(
        st.builds(ProductConstraint,
                  st.lists(st.sampled_from(menu), min_size=m, max_size=m).map(tuple),
                  st.integers(0, n - 1)),
        max_size=5,
    ))
    probe = tuple(draw(st.lists(st.sampled_from(menu), min_size=m, max_size=m)))
    return n, m, menu, constraints, probe


@settings(max_examples=150, deadline=None)
@given(systems())
def test_solver_matches_naive_enumeration(case):
    n, m, menu, constraints, probe = case
    system = to_congruences(n, m, constraints, menu)
    sol = solve_congruences(system)
    sols, vals = naive(n, m, list(menu), constraints, probe)
    assert sol.count == len(sols)
    assert sol.consistent == bool(sols)
    assert set(sol.values_at(system.row_for(probe))) == vals
    if sols and len(sol.kernel_basis) <= 4:
        assert _span(sol, n) == set(sols)
    got = [s.vector for s in enumerate_consistent(n, m, constraints, menu)]
    assert got == sols  # lexicographic order
    assert {b.exponent for b in achievable_values(n, m, constraints, probe, menu)} == vals


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3),
                                    min_size=1, max_size=4), st.data())
def test_general_integer_matrices(n, matrix, data):
    rhs = data.draw(st.lists(st.integers(0, n - 1), min_size=len(matrix), max_size=len(matrix)))
    system = CongruenceSystem(n, 3, ("a",), tuple(map(tuple, matrix)), tuple(rhs))
    sol = solve_congruences(system)
    brute = [v for v in product(range(n), repeat=3)
             if all(sum(a * x for a, x in zip(row, v)) % n == b for row, b in zip(matrix, rhs))]
    assert sol.count == len(brute)
    if brute:
        assert sol.contains(sol.particular.vector)
        for g in sol.kernel_basis:
            assert all(sum(a * x for a, x in zip(row, g)) % n == 0 for row in matrix)


# -- enumeration ------------------------------------------------------------


def test_enumerate_unconstrained():
    out = enumerate_consistent(2, 2, [], menu=("a",))
    assert [s.vector for s in out] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_enumerate_ghz3():
    out = enumerate_consistent(3, 3, GHZ3, MENU)
    assert len(out) == 9
    assert all(strategy_value(s, (PHI,) * 3) == BellValue(0, 3) for s in out)


def test_enumerate_contradiction():
    cons = [ProductConstraint(("a",), 0), ProductConstraint(("a",), 1)]
    assert enumerate_consistent(3, 1, cons) == []


def test_enumerate_cap():
    with pytest.raises(CapExceededError, match="solve_congruences"):
        enumerate_consistent(7, 7, lhv_constraints(7), MENU)


# -- achievable values ------------------------------------------------------


def test_achievable_ghz3():
    assert achievable_values(3, 3, GHZ3, (PHI,) * 3, MENU) == {BellValue(0, 3)}


def test_achievable_unconstrained():
    vals = achievable_values(4, 2, [], ("a", "a"), menu=("a",))
    assert vals == {BellValue(e, 4) for e in range(4)}


def test_achievable_inconsistent():
    cons = [ProductConstraint(("a",), 0), ProductConstraint(("a",), 1)]
    assert achievable_values(3, 1, cons, ("a",)) == frozenset()


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_ghz_families_force_one(n):
    cons = lhv_constraints(n)
    sol = solve_congruences(to_congruences(n, n, cons, MENU))
    assert sol.consistent
    assert achievable_values(n, n, cons, (PHI,) * n, MENU) == {BellValue(0, n)}


@pytest.mark.parametrize("n", range(3, 13))
def test_multiplying_constraints_reproduces_product_identity(n):
    system = to_congruences(n, n, lhv_constraints(n), MENU)
    single = system.matrix[:n]
    rowsum = [sum(col) for col in zip(*single)]
    probe = system.row_for((PHI,) * n)
    base = system.row_for((PHI_PRIME,) * n)
    assert rowsum == [b + (n - 1) * p for p, b in zip(probe, base)]
    # mod n: prod I(phi') == prod I(phi)^{-(n-1)} == prod I(phi)
    assert [r % n for r in rowsum] == [(b - p) % n for p, b in zip(probe, base)]
    assert sum(system.rhs[:n]) % n == 0


# -- mixtures ---------------------------------------------------------------


def test_mixture_single():
    s = strat(3, (1,), (1,), (2,))
    assert abs(mixture_correlation([(s, 1.0)], "aaa") - cmath.exp(2j * math.pi / 3)) <= 1e-12


def test_mixture_half_half():
    s1, s2 = strat(3, (1,)), strat(3, (2,))
    z = mixture_correlation([(s1, 0.5), (s2, 0.5)], "a")
    assert abs(z - (-0.5)) <= 1e-12


def test_mixture_uniform_ghz3():
    sols = enumerate_consistent(3, 3, GHZ3, MENU)
    z = mixture_correlation([(s, 1 / 9) for s in sols], (PHI,) * 3)
    assert abs(z - 1) <= 1e-12


def test_mixture_weight_checks():
    s = strat(3, (1,))
    with pytest.raises(ValueError):
        mixture_correlation([(s, 0.5)], "a")
    with pytest.raises(ValueError):
        mixture_correlation([(s, 1.5), (s, -0.5)], "a")


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.lists(st.integers(0, 4), min_size=1, max_size=5), st.data())
def test_unit_modulus_mixture_is_deterministic(n, exps, data):
    weights = data.draw(st.lists(st.integers(1, 10), min_size=len(exps), max_size=len(exps)))
    total = sum(weights)
    mix = [(strat(n, (e % n,)), w / total) for e, w in zip(exps, weights)]
    z = mixture_correlation(mix, "a")
    assert abs(z) <= 1 + 1e-12
    if abs(abs(z) - 1) <= 1e-12:
        assert len({e % n for e in exps}) == 1
