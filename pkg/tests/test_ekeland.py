from fractions import Fraction

import pytest

from chainforge.complexes import Chain, WeightedComplex
from chainforge.corpus import circle_metric, wheel_complex, wheel_rim_cycle
from chainforge.ekeland import density_profile, quasi_minimize, support_distance
from chainforge.filling import cone_fill, filling_volume
from chainforge.flatnorm import mass
from chainforge.metric import build_rips


def tetra_with_cheap_face():
    """Full 3-simplex where the face (0,1,2) is far cheaper than the cone
    over its boundary through vertex 3."""
    return WeightedComplex.from_simplices(
        [(0, 1, 2, 3)],
        weights={
            (0, 1, 2, 3): Fraction(1),
            (0, 1, 2): Fraction(1, 2),
            (0, 1, 3): Fraction(5),
            (0, 2, 3): Fraction(5),
            (1, 2, 3): Fraction(5),
            (0, 1): 1, (0, 2): 1, (1, 2): 1, (0, 3): 1, (1, 3): 1, (2, 3): 1,
        },
    )


def test_quasi_minimize_converges_to_cheap_face():
    K = tetra_with_cheap_face()
    L = Chain(K, 1, {(0, 1): 1, (1, 2): 1, (0, 2): 1}, 2)
    seed = cone_fill(L, 3)
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), seed)
    assert qm.chain.coeffs == {(0, 1, 2): 1}
    assert qm.certificate
    assert qm.trace[0] == 15 and qm.trace[-1] == Fraction(1, 2)
    assert all(a > b for a, b in zip(qm.trace, qm.trace[1:]))


def test_epsilon_range_validated():
    K = tetra_with_cheap_face()
    L = Chain(K, 1, {(0, 1): 1, (1, 2): 1, (0, 2): 1}, 2)
    seed = cone_fill(L, 3)
    for bad in (0, Fraction(3, 4), -1):
        with pytest.raises(ValueError, match="epsilon"):
            quasi_minimize(L, K, 2, bad, seed)


def test_infeasible_seed_rejected():
    K = tetra_with_cheap_face()
    L = Chain(K, 1, {(0, 1): 1, (1, 2): 1, (0, 2): 1}, 2)
    not_a_filling = Chain(K, 2, {(0, 1, 3): 1}, 2)
    with pytest.raises(ValueError, match="not a filling"):
        quasi_minimize(L, K, 2, Fraction(1, 2), not_a_filling)


def test_zero_cycle_stays_zero():
    K = tetra_with_cheap_face()
    L = Chain.zero(K, 1, 2)
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), Chain.zero(K, 2, 2))
    assert qm.chain.is_zero()


def test_mass_bound_against_seed():
    n = 12
    space = circle_metric(n)
    ambient = build_rips(space, space.diameter(), 3)
    L = Chain(ambient, 1, {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}, 2)
    seed = filling_volume(L, 2, mode="greedy").filling
    qm = quasi_minimize(L, ambient, 2, Fraction(1, 2), seed)
    assert mass(qm.chain) <= 3 * mass(seed)
    assert mass(qm.chain) <= mass(seed)


def test_local_certificate_holds_at_output():
    K = tetra_with_cheap_face()
    L = Chain(K, 1, {(0, 1): 1, (1, 2): 1, (0, 2): 1}, 2)
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), cone_fill(L, 3))
    eps = qm.epsilon
    for t in K.simplices(3):
        move = Chain.single(K, t, 1, 2).boundary()
        cand = qm.chain + move
        assert mass(cand) + eps * mass(cand - qm.chain) >= mass(qm.chain)


def test_density_profile_nondecreasing():
    K = wheel_complex(6)
    L = wheel_rim_cycle(K, 6)
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), cone_fill(L, 6))
    prof = density_profile(qm, [6], [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    masses = [row["mass"] for row in prof["rows"]]
    assert masses == sorted(masses)
    assert masses[0] > 0  # the hub carries its star immediately
    assert prof["exponent"] == 2


def test_density_profile_validates_inputs():
    K = wheel_complex(6)
    L = wheel_rim_cycle(K, 6)
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), cone_fill(L, 6))
    with pytest.raises(ValueError, match="support"):
        density_profile(qm, [99], [Fraction(1, 4)])
    with pytest.raises(ValueError, match="tau"):
        density_profile(qm, [6], [Fraction(5)])


def test_support_distance_of_cone():
    K = wheel_complex(6)
    L = wheel_rim_cycle(K, 6)
    T = cone_fill(L, 6)
    assert support_distance(T, L) == 1  # hub sits at distance 1 from the rim
    qm = quasi_minimize(L, K, 2, Fraction(1, 2), T)
    assert support_distance(qm.chain, L) <= support_distance(T, L)
