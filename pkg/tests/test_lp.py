from fractions import Fraction

import pytest

from chainforge import lp


def test_simple_minimization():
    # min x + y  s.t. x + y >= 2, x <= 3
    value, x = lp.solve_lp([1, 1], [([1, 1], ">=", 2), ([1, 0], "<=", 3)])
    assert value == 2


def test_equality_and_fractional_optimum():
    # min 3a + 2b  s.t. a + b == 1  ->  b = 1
    value, x = lp.solve_lp([3, 2], [([1, 1], "==", 1)])
    assert value == 2
    assert x == [0, 1]


def test_infeasible():
    with pytest.raises(lp.Infeasible):
        lp.solve_lp([1], [([1], "<=", 1), ([1], ">=", 2)])


def test_negative_rhs_normalization():
    # x - y == -1 with min x + y  ->  (0, 1)
    value, x = lp.solve_lp([1, 1], [([1, -1], "==", -1)])
    assert value == 1
    assert x == [0, 1]


def test_exact_fractions():
    value, x = lp.solve_lp(
        [Fraction(1, 3), Fraction(1, 7)],
        [([1, 1], ">=", Fraction(5, 2)), ([1, -1], "<=", 0)],
    )
    # all mass on the cheaper variable, x <= y slack
    assert value == Fraction(5, 2) * Fraction(1, 7)
    assert x == [0, Fraction(5, 2)]


def test_beale_degenerate_instance():
    # Beale's cycling example; the Bland fallback must terminate at -1/20.
    rows = [
        ([Fraction(1, 4), -60, Fraction(-1, 25), 9], "<=", 0),
        ([Fraction(1, 2), -90, Fraction(-1, 50), 3], "<=", 0),
        ([0, 0, 1, 0], "<=", 1),
    ]
    value, _ = lp.solve_lp([Fraction(-3, 4), 150, Fraction(-1, 50), 6], rows)
    assert value == Fraction(-1, 20)


def test_against_float_reference():
    scipy_opt = pytest.importorskip("scipy.optimize")
    import random

    rng = random.Random(5)
    for _ in range(40):
        n, m = rng.randint(2, 5), rng.randint(1, 4)
        costs = [Fraction(rng.randint(1, 9), rng.randint(1, 3)) for _ in range(n)]
        rows = []
        for _ in range(m):
            coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
            rows.append((coeffs, rng.choice(["<=", ">=", "=="]), Fraction(rng.randint(-3, 6))))
        try:
            value, x = lp.solve_lp(costs, rows)
        except lp.Infeasible:
            value = None
        except lp.Unbounded:
            continue
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for coeffs, sense, rhs in rows:
            fc = [float(c) for c in coeffs]
            if sense == "<=":
                a_ub.append(fc)
                b_ub.append(float(rhs))
            elif sense == ">=":
                a_ub.append([-c for c in fc])
                b_ub.append(-float(rhs))
            else:
                a_eq.append(fc)
                b_eq.append(float(rhs))
        res = scipy_opt.linprog(
            [float(c) for c in costs],
            A_ub=a_ub or None,
            b_ub=b_ub or None,
            A_eq=a_eq or None,
            b_eq=b_eq or None,
            bounds=[(0, None)] * n,
            method="highs",
        )
        if value is None:
            assert not res.success
        else:
            assert res.success
            assert abs(res.fun - float(value)) < 1e-7
