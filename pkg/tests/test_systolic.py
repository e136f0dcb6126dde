import pytest

from chainforge.complexes import WeightedComplex
from chainforge.corpus import (
    flat_torus,
    hex_torus,
    klein_bottle,
    rp2_minimal,
    tetrahedron_sphere,
)
from chainforge.flatnorm import mass
from chainforge.systolic import (
    ClosedManifoldComplex,
    EdgeSignatures,
    fundamental_class,
    loewner_check,
    orientable,
    systole,
    systole_by_enumeration,
    verify_chain,
)


def test_closed_check_accepts_surfaces():
    for K in (tetrahedron_sphere(), flat_torus(3), rp2_minimal(), klein_bottle(4)):
        M = ClosedManifoldComplex(K)
        assert M.n == 2


def test_closed_check_rejects_disk():
    disk = WeightedComplex.from_simplices([(0, 1, 2), (0, 2, 3)])
    with pytest.raises(ValueError, match="incidence != 2"):
        ClosedManifoldComplex(disk)


def test_fundamental_class_examples():
    for K in (tetrahedron_sphere(), flat_torus(3), rp2_minimal(), klein_bottle(4)):
        M = ClosedManifoldComplex(K)
        fc = fundamental_class(M)
        assert fc.boundary().is_zero()
        assert set(fc.coeffs.values()) == {1}
        assert mass(fc) == M.volume()


def test_betti_numbers():
    assert EdgeSignatures(tetrahedron_sphere()).betti == 0
    assert EdgeSignatures(flat_torus(3)).betti == 2
    assert EdgeSignatures(rp2_minimal()).betti == 1
    assert EdgeSignatures(klein_bottle(4)).betti == 2


def test_systole_sphere_infinite():
    rep = systole(ClosedManifoldComplex(tetrahedron_sphere()))
    assert rep.sys is None
    assert rep.witness is None


@pytest.mark.parametrize("k", [3, 4])
def test_systole_flat_torus(k):
    rep = systole(ClosedManifoldComplex(flat_torus(k)))
    assert rep.sys == k
    sigs = EdgeSignatures(flat_torus(k))
    # recomputed nontriviality of the witness on the same mesh
    rep2 = systole(ClosedManifoldComplex(flat_torus(k)))
    assert rep2.witness is not None and not rep2.witness.boundary().coeffs


def test_systole_rp2_is_three():
    rep = systole(ClosedManifoldComplex(rp2_minimal()))
    assert rep.sys == 3
    assert rep.witness is not None


def test_systole_against_enumeration_oracle():
    for K in (rp2_minimal(), flat_torus(3)):
        rep = systole(ClosedManifoldComplex(K))
        assert rep.sys == systole_by_enumeration(K)
    assert systole_by_enumeration(tetrahedron_sphere()) is None


def test_systole_requires_surface():
    from chainforge.corpus import circle_complex

    with pytest.raises(ValueError, match="n = 2"):
        systole(ClosedManifoldComplex(circle_complex(6)))


def test_orientability():
    assert orientable(ClosedManifoldComplex(tetrahedron_sphere()))
    assert orientable(ClosedManifoldComplex(flat_torus(3)))
    assert not orientable(ClosedManifoldComplex(rp2_minimal()))
    assert not orientable(ClosedManifoldComplex(klein_bottle(4)))


def test_verify_chain_torus3():
    rep = verify_chain(ClosedManifoldComplex(flat_torus(3)))
    assert rep.sys == 3
    assert rep.vol == 9
    assert rep.fillrad is not None and rep.fillrad > 0
    assert rep.passes["sys_le_6fillrad_plus_slack"]
    assert set(rep.ratios) == {
        "sys_over_6fillrad",
        "6fillrad_over_fillvol_root",
        "fillvol_root_over_vol_root",
        "fillrad_over_vol_root",
    }
    assert rep.meta["constants"]["gamma_k"].startswith("empirical-envelope")


def test_verify_chain_circle_sharp_sixth():
    from chainforge.corpus import circle_complex

    rep = verify_chain(ClosedManifoldComplex(circle_complex(12)))
    # 1-manifold: sys is the circumference, and fillrad hits the sharp C/6
    assert rep.sys == 12
    assert rep.fillrad == 2
    assert rep.passes["sys_le_6fillrad_plus_slack"]


def test_loewner_square_hex_thin():
    res = loewner_check(ClosedManifoldComplex(flat_torus(3)))
    assert res["passes"] and res["sys"] == 3
    res = loewner_check(ClosedManifoldComplex(hex_torus(4)))
    assert res["passes"]
    assert res["ratio"] >= 0.9  # the extremal flat metric
    res = loewner_check(ClosedManifoldComplex(flat_torus(3, 9)))
    assert res["passes"] and res["ratio"] < 0.5


def test_loewner_rejects_non_torus():
    with pytest.raises(ValueError, match="torus"):
        loewner_check(ClosedManifoldComplex(tetrahedron_sphere()))
    with pytest.raises(ValueError, match="torus"):
        loewner_check(ClosedManifoldComplex(rp2_minimal()))
    with pytest.raises(ValueError, match="torus"):
        loewner_check(ClosedManifoldComplex(klein_bottle(4)))
