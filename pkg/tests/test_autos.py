import random
from fractions import Fraction

import pytest

from kmnil.autos import (
    BElt,
    NotDiagramAutomorphism,
    NotInvertible,
    ZeroTorusEntry,
    compose,
    diagram_lift,
    exp_ad,
    gamma0_borel,
    heisenberg_aut_check,
    homomorphism_from_generators,
    identity_map,
    is_automorphism,
    torus_action,
)
from kmnil.gcm import diagram_automorphisms
from kmnil.gcm import compose as perm_compose
from kmnil.liealg import LieElt
from kmnil.roots import RootVec

from conftest import A2, A11, A22, HYP2, HYP3, borel, nil


def random_elt(alg, beta, rnd):
    x = alg.zero(beta)
    for e in alg.basis_elts(beta):
        x = x + e.scale(Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)))
    return x


def test_torus_examples():
    alg = nil(A2, 3)
    assert torus_action(alg, [1, 1]) == identity_map(alg)
    m = torus_action(alg, [2, 3])
    assert m.images["01"] == BElt((), {"01": Fraction(6)})
    assert is_automorphism(m)
    assert is_automorphism(torus_action(alg, [2, 1]))
    with pytest.raises(ZeroTorusEntry):
        torus_action(alg, [0, 1])


def test_torus_random_is_automorphism():
    alg = nil(HYP2, 6)
    rnd = random.Random(1)
    for _ in range(5):
        t = [Fraction(rnd.choice([-3, -2, -1, 1, 2, 3]), rnd.randint(1, 4)) for _ in range(2)]
        assert is_automorphism(torus_action(alg, t))


def test_exp_ad_examples():
    alg = nil(A2, 3)
    e0, e1 = alg.generator(0), alg.generator(1)
    assert exp_ad(alg, alg.zero(RootVec((1, 0)))) == identity_map(alg)
    m = exp_ad(alg, e0)
    assert m.images["1"] == BElt((), {"1": Fraction(1), "01": Fraction(1)})
    assert compose(exp_ad(alg, e0), exp_ad(alg, -e0)) == identity_map(alg)


@pytest.mark.parametrize("G,N", [(HYP2, 6), (A11, 6), (HYP3, 5)])
def test_exp_ad_inverse_and_height_raising(G, N):
    alg = nil(G, N)
    rnd = random.Random(5)
    for beta in [b for b in alg.degrees() if b.height <= 2]:
        x = random_elt(alg, beta, rnd)
        m = exp_ad(alg, x)
        assert compose(m, exp_ad(alg, -x)) == identity_map(alg)
        for lab, img in m.images.items():
            h = alg.label_degree[lab].height
            rest = {k: c - (1 if k == lab else 0) for k, c in img.x.items()}
            assert all(alg.label_degree[k].height > h for k, c in rest.items() if c)
        assert is_automorphism(m)


def test_diagram_lift_examples():
    alg = nil(A2, 3)
    assert diagram_lift(alg, (0, 1)) == identity_map(alg)
    s = diagram_lift(alg, (1, 0))
    assert s.images["01"] == BElt((), {"01": Fraction(-1)})
    assert compose(s, s) == identity_map(alg)
    with pytest.raises(NotDiagramAutomorphism):
        diagram_lift(nil([[2, -2], [-1, 2]], 4), (1, 0))


@pytest.mark.parametrize("G,N", [(HYP3, 5), ([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], 5)])
def test_diagram_lifts_compose(G, N):
    alg = nil(G, N)
    auts = diagram_automorphisms(alg.gcm)
    assert len(auts) == 6
    lifts = {s: diagram_lift(alg, s) for s in auts}
    for s1 in auts:
        assert is_automorphism(lifts[s1])
        for s2 in auts:
            assert compose(lifts[s1], lifts[s2]) == lifts[perm_compose(s1, s2)]


def test_gamma0_examples():
    bor = borel(A11, 4)
    assert gamma0_borel(bor) == identity_map(bor.nil, bor)
    m = gamma0_borel(bor, [[2]], [[3], [-1]])
    assert is_automorphism(m)
    bor2 = borel(A2, 3)
    m = gamma0_borel(bor2, None, None)
    assert m == identity_map(bor2.nil, bor2) and "zero" in m.note
    with pytest.raises(NotInvertible):
        gamma0_borel(bor, [[0]], None)


def test_gamma0_fixes_generators_and_acts_on_center():
    bor = borel(A22, 6)
    m = gamma0_borel(bor, [[Fraction(-1, 2)]], [[1], [2]])
    assert is_automorphism(m)
    for i in range(2):
        lab = bor.nil.basis[RootVec(tuple(int(k == i) for k in range(2)))][0]
        assert m.images[lab] == BElt((Fraction(0),) * bor.h_dim, {lab: Fraction(1)})
    c = BElt(bor.center_basis[0], {})
    assert m(c) == c.scale(Fraction(-1, 2))


def test_non_injective_map_is_rejected():
    alg = nil(A2, 3)
    m = homomorphism_from_generators(alg, [{"0": 1}, {"0": 1}])
    res = is_automorphism(m)
    assert not res and res.witness == {"degree": [1, 1], "reason": "rank drop"}


def test_bracket_failure_gives_pair_witness():
    alg = nil(A2, 3)
    imgs = dict(identity_map(alg).images)
    imgs["01"] = BElt((), {"01": Fraction(2)})
    from kmnil.autos import TruncMap

    res = is_automorphism(TruncMap(alg, imgs))
    assert not res and res.witness["pair"] == ["1", "0"]


@pytest.mark.parametrize("G,N", [(A2, 3), (HYP2, 6), (A11, 6)])
def test_conjugation_law(G, N):
    alg = nil(G, N)
    rnd = random.Random(11)
    degs = [b for b in alg.degrees() if b.height <= 3]
    for _ in range(20):
        t = [Fraction(rnd.choice([-2, -1, 1, 2, 3]), rnd.randint(1, 3)) for _ in range(alg.n)]
        x = random_elt(alg, rnd.choice(degs), rnd)
        T = torus_action(alg, t)
        Tinv = torus_action(alg, [1 / s for s in t])
        tx = LieElt(x.degree, T(x).x)
        assert compose(T, compose(exp_ad(alg, x), Tinv)) == exp_ad(alg, tx)


def test_heisenberg_fixture():
    rep = heisenberg_aut_check(seed=0, trials=10)
    assert rep["status"] == "pass"
    assert rep["identity"] and rep["singular_rejected"]
    assert all(rep["subgroups"].values())
