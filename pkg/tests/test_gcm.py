import itertools
import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kmnil.gcm import (
    Affine,
    Decomposable,
    DiagonalNotTwo,
    Finite,
    Indefinite,
    NotSymmetrizable,
    PositiveOffDiagonal,
    ZeroPatternAsymmetric,
    affine_marks,
    by_label,
    catalog,
    classify,
    compose,
    diagram_automorphisms,
    load_gcm_json,
    symmetrizer,
    validate_gcm,
)
from kmnil.qlinalg import QMatrix

from conftest import A2, A11, A22, B2_SHAPED, HYP2, NONSYM


def test_validate_examples():
    assert validate_gcm(A2).size == 2
    with pytest.raises(PositiveOffDiagonal) as e:
        validate_gcm([[2, 1], [-1, 2]])
    assert e.value.indices == (0, 1)
    with pytest.raises(Decomposable):
        validate_gcm([[2, -1, 0], [-1, 2, 0], [0, 0, 2]])
    with pytest.raises(DiagonalNotTwo):
        validate_gcm([[3, -1], [-1, 2]])
    with pytest.raises(ZeroPatternAsymmetric):
        validate_gcm([[2, 0], [-1, 2]])


def test_symmetrizer_examples():
    assert symmetrizer(A2) == (1, 1)
    assert symmetrizer(A22) == (1, 4)
    assert symmetrizer(B2_SHAPED) == (1, 2)


def test_nonsymmetrizable_cycle():
    with pytest.raises(NotSymmetrizable) as e:
        symmetrizer(NONSYM)
    cyc = e.value.cycle
    assert cyc[0] == cyc[-1] and len(cyc) == 4


def test_classify_examples():
    t = classify(A2)
    assert isinstance(t, Finite) and t.label == "A2"
    t = classify(A11)
    assert isinstance(t, Affine) and t.label == "A1~1" and t.marks == (1, 1)
    assert classify(HYP2).label == "INDEFINITE"
    assert isinstance(classify(NONSYM), Indefinite)


def test_classify_nodes_follow_canonical_numbering():
    # G2 with the short root first, B2 with the short root second
    assert classify([[2, -3], [-1, 2]]).to_canonical == (1, 2)
    assert classify([[2, -1], [-3, 2]]).to_canonical == (2, 1)
    t = classify(A22)
    assert t.label == "A2~2" and t.epsilon == 1 and t.epsilon_index == 1


@pytest.mark.parametrize("n", range(2, 10))
def test_catalog_entries_classify_to_themselves(n):
    for entry in catalog(n):
        t = classify(entry.matrix)
        assert t.label == entry.label
        assert list(t.to_canonical) == (list(range(1, n + 1)) if entry.kind == "finite" else list(range(n)))


@pytest.mark.parametrize(
    "label,marks",
    [
        ("A2~1", (1, 1, 1)),
        ("B3~1", (1, 1, 2, 2)),
        ("C2~1", (1, 2, 1)),
        ("G2~1", (1, 3, 2)),
        ("F4~1", (1, 2, 3, 4, 2)),
        ("E6~1", (1, 1, 2, 3, 2, 1, 2)),
        ("E8~1", (1, 2, 4, 6, 5, 4, 3, 2, 3)),
        ("A2~2", (2, 1)),
        ("A4~2", (2, 2, 1)),
        ("D3~2", (1, 1, 1)),
        ("D4~3", (1, 1, 2)),
    ],
)
def test_affine_marks_catalog(label, marks):
    G = by_label(label)
    m, cm, delta = affine_marks(G)
    assert m == marks
    assert all(x == 0 for x in QMatrix(G.tolist()) @ list(m))
    assert all(x == 0 for x in QMatrix(G.transpose().tolist()) @ list(cm))
    assert delta.coords == m


def test_affine_marks_examples():
    assert affine_marks(A11)[0] == (1, 1)
    assert affine_marks([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])[0] == (1, 1, 1)
    assert affine_marks(A22)[0] == (2, 1)


def test_diagram_automorphism_examples():
    assert diagram_automorphisms(A2) == [(0, 1), (1, 0)]
    assert diagram_automorphisms(B2_SHAPED) == [(0, 1)]
    assert diagram_automorphisms(A11) == [(0, 1), (1, 0)]


@st.composite
def gcms(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    # random spanning tree keeps the matrix indecomposable
    for j in range(1, n):
        i = draw(st.integers(0, j - 1))
        a[i][j] = -draw(st.integers(1, 3))
        a[j][i] = -draw(st.integers(1, 3))
    for i, j in itertools.combinations(range(n), 2):
        if a[i][j] == 0 and draw(st.booleans()):
            a[i][j] = -draw(st.integers(1, 3))
            a[j][i] = -draw(st.integers(1, 3))
    return a


@settings(max_examples=80, deadline=None)
@given(gcms())
def test_diagram_automorphisms_form_a_group(a):
    G = validate_gcm(a)
    n = G.size
    auts = diagram_automorphisms(G)
    brute = [p for p in itertools.permutations(range(n)) if all(G[p[i], p[j]] == G[i, j] for i in range(n) for j in range(n))]
    assert auts == brute
    assert tuple(range(n)) in auts
    s = set(auts)
    for x in auts:
        assert tuple(sorted(range(n), key=lambda i: x[i])) in s
        for y in auts:
            assert compose(x, y) in s


@settings(max_examples=80, deadline=None)
@given(gcms())
def test_symmetrizer_identity(a):
    try:
        d = symmetrizer(a)
    except NotSymmetrizable:
        return
    n = len(a)
    assert all(x > 0 for x in d)
    assert all(d[i] * a[i][j] == d[j] * a[j][i] for i in range(n) for j in range(n))


@settings(max_examples=40, deadline=None)
@given(gcms(max_n=4), st.randoms(use_true_random=False))
def test_classification_is_permutation_invariant(a, rnd):
    n = len(a)
    p = list(range(n))
    rnd.shuffle(p)
    b = [[a[p[i]][p[j]] for j in range(n)] for i in range(n)]
    ta, tb = classify(a), classify(b)
    assert ta.label == tb.label
    if isinstance(ta, Affine):
        assert tb.marks == tuple(ta.marks[p[i]] for i in range(n))


def test_load_gcm_json(tmp_path):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"matrix": A22}))
    assert load_gcm_json(f).tolist() == A22
