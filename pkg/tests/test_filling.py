from fractions import Fraction

import pytest

from chainforge.complexes import Chain, WeightedComplex
from chainforge.corpus import (
    circle_complex,
    circle_cycle,
    circle_metric,
    random_chain,
    random_complex,
    rng_for,
    wheel_complex,
    wheel_rim_cycle,
)
from chainforge.filling import (
    Infeasible,
    cone_fill,
    cover_balls,
    decompose_cycle,
    filling_radius,
    filling_volume,
    isoperimetric_fill,
)
from chainforge.flatnorm import MassMeasure, mass
from chainforge.metric import FiniteMetricSpace, build_rips
from conftest import triangle_complex
from oracles import brute_filling_volume_gf2


def point_measure(positions, masses):
    """Unit-vertex measure on an edgeless complex over an explicit metric."""
    n = len(positions)
    dist = [[abs(a - b) for b in positions] for a in positions]
    space = FiniteMetricSpace([[Fraction(x) for x in row] for row in dist])
    K = WeightedComplex({0: [(i,) for i in range(n)]}, metric=space)
    chain = Chain(K, 0, {(i,): m for i, m in enumerate(masses) if m})
    return MassMeasure.of_chain(chain), space


def test_cover_single_unit_atom_radius_two():
    mu, space = point_measure([0, 100], [1, 0])
    cover = cover_balls(mu, space, Fraction(1, 2))
    assert cover.centers == (0,)
    assert cover.radii == (Fraction(2),)


def test_cover_two_far_atoms():
    mu, space = point_measure([0, 100], [1, 1])
    cover = cover_balls(mu, space, Fraction(1, 2))
    assert set(cover.centers) == {0, 1}
    assert cover.radii == (Fraction(2), Fraction(2))


def test_cover_postconditions_random():
    rng = rng_for(77)
    for _ in range(30):
        positions = sorted({rng.randint(0, 60) for _ in range(rng.randint(2, 8))})
        masses = [Fraction(rng.randint(1, 5)) for _ in positions]
        mu, space = point_measure(positions, masses)
        cover = cover_balls(mu, space, Fraction(1, 2))
        cover.verify(space)  # raises on any violated postcondition
        assert 5 * sum(
            (mu.ball(space, y, r) for y, r in zip(cover.centers, cover.radii)),
            Fraction(0),
        ) >= mu.total()


def test_cover_rejects_too_large_F():
    # A single long, light edge: its anchor vertex can never absorb enough
    # measure within any admissible radius when F is too large.
    space = FiniteMetricSpace([[0, 10], [10, 0]])
    K = WeightedComplex.from_simplices([(0, 1)], weights={(0, 1): Fraction(1, 100)}, metric=space)
    mu = MassMeasure.of_chain(Chain.single(K, (0, 1)))
    with pytest.raises(ValueError, match="too large"):
        cover_balls(mu, space, Fraction(1, 2))
    # unit-length edge at F = 1/2 is fine (the guaranteed regime)
    space2 = FiniteMetricSpace([[0, 1], [1, 0]])
    K2 = WeightedComplex.from_simplices([(0, 1)], weights={(0, 1): 1}, metric=space2)
    mu2 = MassMeasure.of_chain(Chain.single(K2, (0, 1)))
    cover_balls(mu2, space2, Fraction(1, 2)).verify(space2)


def test_decompose_single_ball_single_piece():
    K = circle_complex(12)
    L = circle_cycle(K)
    d = decompose_cycle(L, 2)
    assert len(d.pieces) == 1
    assert d.remainder.is_zero()
    assert d.total_piece_mass() == mass(L.lift().reduce_mod(2))


def test_decompose_two_far_circles():
    n = 8
    # two octagons of circumference 8 placed 100 apart (block metric)
    base = circle_metric(n)
    size = 2 * n
    dist = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            dist[i][j] = base.d(i, j)
            dist[n + i][n + j] = base.d(i, j)
            dist[i][n + j] = dist[n + j][i] = Fraction(100)
    space = FiniteMetricSpace(dist)
    edges = {}
    for block in (0, n):
        for i in range(n):
            e = tuple(sorted((block + i, block + (i + 1) % n)))
            edges[e] = Fraction(1)
    K = WeightedComplex.from_simplices(list(edges), weights=edges, metric=space)
    L = Chain(K, 1, {e: 1 for e in edges}, 2)
    d = decompose_cycle(L, 2)
    assert len(d.pieces) == 2
    assert d.remainder.is_zero()
    supports = [frozenset(v for s in pc.chain.coeffs for v in s) for pc in d.pieces]
    assert {frozenset(range(n)), frozenset(range(n, 2 * n))} == set(supports)


def test_decompose_bounds_hold():
    for n in (12, 24):
        K = circle_complex(n)
        L = circle_cycle(K)
        d = decompose_cycle(L, 2)
        metric = K.metric
        for pc in d.pieces:
            verts = sorted({v for s in pc.chain.coeffs for v in s})
            diam = max(
                (metric.d(a, b) for i, a in enumerate(verts) for b in verts[i + 1 :]),
                default=Fraction(0),
            )
            assert diam <= 8 * mass(pc.chain)
        assert d.total_piece_mass() + mass(d.remainder) == mass(L.lift().reduce_mod(2))


def test_cone_fill_apex_on_cycle():
    K = triangle_complex(Fraction(1, 2))
    L = Chain.single(K, (0, 1, 2)).boundary()
    T = cone_fill(L, 0)  # degenerate cones drop; the surviving one is sigma
    assert T.coeffs == {(0, 1, 2): 1}
    assert (T.boundary() - L).is_zero()


def test_cone_fill_hexagon_wheel():
    K = wheel_complex(6)
    L = wheel_rim_cycle(K, 6)
    T = cone_fill(L, 6)
    assert len(T.coeffs) == 6
    assert (T.boundary() - L).is_zero()


def test_cone_fill_euclidean_mass_bound():
    # Planar wheel with coordinates: cone mass <= R * mass(L).
    import math

    n = 6
    coords = {i: (Fraction(math.cos(2 * math.pi * i / n)).limit_denominator(10**6),
                  Fraction(math.sin(2 * math.pi * i / n)).limit_denominator(10**6))
              for i in range(n)}
    coords[n] = (Fraction(0), Fraction(0))
    tris = [tuple(sorted((i, (i + 1) % n, n))) for i in range(n)]
    K = WeightedComplex.from_simplices(tris, coords=coords)
    rim = [tuple(sorted((i, (i + 1) % n))) for i in range(n)]
    L = Chain(K, 1, {e: 1 for e in rim}, 2)
    T = cone_fill(L, n)
    R = Fraction(1)  # apex at distance 1 from every rim vertex
    assert mass(T) <= R * mass(L)


def test_cone_fill_missing_simplex_error():
    K = circle_complex(6)
    L = circle_cycle(K)
    with pytest.raises(ValueError, match="missing cone simplex"):
        cone_fill(L, 0)


def test_isoperimetric_fill_zero_cycle():
    K = circle_complex(6)
    cert = isoperimetric_fill(Chain.zero(K, 1), 2)
    assert cert.mass_ratio == 0.0
    assert cert.filling.is_zero()


def test_isoperimetric_fill_hexagon_cross_checked():
    # The hexagon on its circle complex: the greedy certificate stays within
    # a bounded factor of the exact optimum from the GF(2) minimizer.
    n = 6
    space = circle_metric(n)
    ambient = build_rips(space, space.diameter(), 2)
    L = Chain(ambient, 1, {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}, 2)
    greedy = isoperimetric_fill(L, 2)
    greedy.verify()
    exact = filling_volume(L, 2, mode="exact")
    assert mass(exact.filling) <= mass(greedy.filling)
    assert mass(greedy.filling) <= 8 * mass(exact.filling)


def test_filling_radius_zero_cycle_and_small_cycle():
    K = triangle_complex(Fraction(1, 2))
    r, cert = filling_radius(Chain.zero(K, 1).reduce_mod(2), K)
    assert r == 0
    L = Chain.single(K, (0, 1, 2)).boundary().reduce_mod(2)
    r, cert = filling_radius(L, K)
    # bounded within its own support's immediate neighborhood: the smallest
    # candidate radius, here half the longest edge of the filling triangle
    assert r == Fraction(1, 2)
    cert.verify()


def test_filling_radius_infeasible():
    K = circle_complex(6)  # no 2-simplices at all
    with pytest.raises(Infeasible, match="not null-homologous"):
        filling_radius(circle_cycle(K), K)


def test_filling_radius_circle_exact_sixth():
    n = 12
    space = circle_metric(n)
    ambient = build_rips(space, space.diameter(), 2)
    L = Chain(ambient, 1, {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}, 2)
    r, cert = filling_radius(L, ambient, profile=True)
    assert r == Fraction(n, 6)
    assert cert.meta["profile"]
    cert.verify()


def test_filling_radius_monotone_under_ambient_growth():
    n = 12
    space = circle_metric(n)
    small = build_rips(space, Fraction(4), 2)  # just enough to kill the class
    large = build_rips(space, space.diameter(), 2)
    cycle = {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}
    r_small, _ = filling_radius(Chain(small, 1, cycle, 2), small)
    r_large, _ = filling_radius(Chain(large, 1, cycle, 2), large)
    assert r_large <= r_small


def test_filling_volume_matches_enumeration():
    rng = rng_for(93)
    checked = 0
    while checked < 8:
        K = random_complex(rng, 6, rng.randint(2, 5))
        if len(K.simplices(2)) > 6:
            continue
        S = random_chain(rng, K, 2, max_coeff=1)
        if S.dim < 2 or not S.coeffs:
            continue
        L = S.boundary().reduce_mod(2)
        if L.is_zero():
            continue
        cert = filling_volume(L, 2, mode="exact")
        oracle = brute_filling_volume_gf2(L)
        assert oracle is not None
        assert mass(cert.filling) == oracle
        checked += 1


def test_filling_volume_prefers_cheap_triangle():
    K = triangle_complex(Fraction(1, 2))
    L = Chain.single(K, (0, 1, 2)).boundary().reduce_mod(2)
    cert = filling_volume(L, 2, mode="exact")
    assert cert.filling.coeffs == {(0, 1, 2): 1}


def test_filling_volume_mod3():
    K = triangle_complex(Fraction(1, 2))
    L = Chain.single(K, (0, 1, 2)).boundary()
    cert = filling_volume(L, 3, mode="exact")
    cert.verify()
    assert mass(cert.filling) == Fraction(1, 2)


def test_filling_volume_greedy_upper_bounds_exact():
    n = 6
    space = circle_metric(n)
    ambient = build_rips(space, space.diameter(), 2)
    L = Chain(ambient, 1, {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}, 2)
    exact = filling_volume(L, 2, mode="exact")
    greedy = filling_volume(L, 2, mode="greedy")
    assert mass(exact.filling) <= mass(greedy.filling)
