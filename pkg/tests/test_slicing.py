from fractions import Fraction

import pytest

from chainforge.complexes import Chain
from chainforge.corpus import random_chain, random_complex, random_vertex_function, rng_for
from chainforge.flatnorm import mass_p
from chainforge.slicing import (
    VertexFunction,
    restrict,
    restriction_bound_diagnostic,
    slice_chain,
    slice_spectrum,
)
from conftest import path_complex


def arc_function(K, n_edges, step=Fraction(1)):
    return VertexFunction.on(K, {i: i * step for i in range(n_edges + 1)})


def test_restrict_trivial_ranges(unit_path):
    u = arc_function(unit_path, 3)
    T = Chain(unit_path, 1, {e: 1 for e in unit_path.simplices(1)})
    assert restrict(T, u, Fraction(100)) == T
    assert restrict(T, u, Fraction(0)).is_zero()


def test_restrict_unit_interval_half():
    K = path_complex(3, Fraction(1, 3))
    u = arc_function(K, 3, Fraction(1, 3))
    T = Chain(K, 1, {e: 1 for e in K.simplices(1)})
    r = restrict(T, u, Fraction(1, 2))
    assert r.coeffs == {(0, 1): 1}


def test_slice_of_cycle_is_boundary_of_restriction():
    rng = rng_for(19)
    for _ in range(20):
        K = random_complex(rng, 6, 4)
        S = random_chain(rng, K, 2)
        if S.dim < 2 or not S.coeffs:
            continue
        T = S.boundary()  # a cycle
        u = VertexFunction.on(K, random_vertex_function(rng, K))
        r = Fraction(rng.randint(-8, 8), 2) + Fraction(1, 7)  # avoid criticals
        assert slice_chain(T, u, r) == restrict(T, u, r).boundary()


def test_slice_out_of_range_is_zero(unit_path):
    u = arc_function(unit_path, 3)
    T = Chain(unit_path, 1, {e: 1 for e in unit_path.simplices(1)})
    assert slice_chain(T, u, Fraction(50)).is_zero()
    with pytest.raises(ValueError, match="dimension 0"):
        slice_chain(Chain.single(unit_path, (0,)), u, 1)


def test_slice_unit_path_cut_point():
    K = path_complex(3, Fraction(1, 3))
    u = arc_function(K, 3, Fraction(1, 3))
    T = Chain(K, 1, {e: 1 for e in K.simplices(1)})
    piece = slice_chain(T, u, Fraction(1, 2))
    assert piece.coeffs == {(1,): 1}


def test_anticommutation_identity():
    rng = rng_for(37)
    for _ in range(60):
        K = random_complex(rng, 6, 4)
        T = random_chain(rng, K, 2)
        if T.dim < 2 or not T.coeffs:
            continue
        u = VertexFunction.on(K, random_vertex_function(rng, K))
        r = Fraction(rng.randint(-6, 6)) + Fraction(1, 11)
        assert slice_chain(T, u, r).boundary() == -slice_chain(T.boundary(), u, r)


def test_restriction_idempotent_monotone_additive():
    rng = rng_for(53)
    for _ in range(30):
        K = random_complex(rng, 6, 3)
        T = random_chain(rng, K, 1, max_coeff=5)
        if not T.coeffs:
            continue
        u = VertexFunction.on(K, random_vertex_function(rng, K))
        r1 = Fraction(rng.randint(-4, 4)) + Fraction(1, 13)
        r2 = r1 + Fraction(rng.randint(0, 5))
        a = restrict(T, u, r1)
        assert restrict(a, u, r1) == a
        assert a.support() <= restrict(T, u, r2).support()
        p = rng.choice((2, 3))
        assert mass_p(a, p) + mass_p(T - a, p) == mass_p(T, p)


def test_spectrum_constant_function_empty(unit_path):
    T = Chain(unit_path, 1, {e: 1 for e in unit_path.simplices(1)})
    u = VertexFunction.on(unit_path, {v: Fraction(5) for v in unit_path.vertices()})
    spec = slice_spectrum(T, u)
    assert spec.entries == ()
    assert u.lip == 0


def test_spectrum_interval_count_bound():
    rng = rng_for(61)
    K = random_complex(rng, 6, 4)
    T = random_chain(rng, K, 1)
    vals = {v: Fraction(i) for i, v in enumerate(K.vertices())}  # injective
    u = VertexFunction.on(K, vals)
    spec = slice_spectrum(T, u)
    assert len(spec.entries) <= K.n_vertices - 1


def test_unit_speed_path_coarea_ratio_is_one():
    K = path_complex(3)
    u = arc_function(K, 3)
    assert u.lip == 1
    T = Chain(K, 1, {e: 1 for e in K.simplices(1)})
    spec = slice_spectrum(T, u, p=2)
    assert len(spec.entries) == 3
    assert spec.weighted_mass == spec.lip_mass_bound == 3
    assert spec.ratio() == 1


def test_restriction_bound_diagnostic_reports_ratio():
    # Logged diagnostic only: the discrete sublevel rule need not respect the
    # sharp constant, so nothing is asserted about the ratio being <= 1.
    K = path_complex(3)
    u = arc_function(K, 3)
    T = Chain(K, 1, {e: 1 for e in K.simplices(1)})
    diag = restriction_bound_diagnostic(T, u, 2, 0, 3)
    assert diag["integral"] == 0 + 1 + 2  # restriction grows edge by edge
    assert diag["reference"] == (3 + 1) * 3
    assert diag["ratio"] == Fraction(1, 4)
