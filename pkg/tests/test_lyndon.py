import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmnil.lyndon import (
    is_lyndon,
    label_word,
    lyndon_words,
    multiset_words,
    poly_bracket,
    standard_factorization,
    standard_poly,
    witt_dimension,
    word_label,
)


def lyndon_by_rotation(w):
    return all(w < w[k:] + w[:k] for k in range(1, len(w)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=9))
def test_duval_matches_rotation_definition(w):
    assert is_lyndon(w) == lyndon_by_rotation(tuple(w))


contents = st.lists(st.integers(0, 4), min_size=2, max_size=3).filter(lambda c: 0 < sum(c) <= 8)


@settings(max_examples=100, deadline=None)
@given(contents)
def test_witt_formula_counts_lyndon_words(c):
    words = lyndon_words(c)
    brute = [w for w in set(itertools.permutations([a for a, k in enumerate(c) for _ in range(k)])) if lyndon_by_rotation(w)]
    assert sorted(brute) == words
    assert witt_dimension(c) == len(words)


def left_normed(w):
    p = {w[:1]: 1}
    for a in w[1:]:
        p = poly_bracket(p, {(a,): 1})
    return p


def dynkin(p):
    out = {}
    for w, c in p.items():
        for v, d in left_normed(w).items():
            out[v] = out.get(v, 0) + c * d
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("c", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (1, 1, 1), (2, 1, 1), (1, 2, 2)])
def test_standard_polys_are_lie_and_unitriangular(c):
    n = sum(c)
    for w in lyndon_words(c):
        p = standard_poly(w)
        # Dynkin-Specht-Wever: a homogeneous p of degree n is Lie iff its Dynkin image is n*p
        assert dynkin(p) == {k: n * v for k, v in p.items()}
        assert p[w] == 1
        assert all(v >= w for v in p)
        u, v = standard_factorization(w)
        assert u + v == w and is_lyndon(u) and is_lyndon(v)


def test_labels_round_trip():
    assert word_label((0, 1, 11)) == "01b"
    assert label_word("01b") == (0, 1, 11)
    with pytest.raises(ValueError):
        label_word("0-1")


def test_multiset_words_sorted_and_complete():
    ws = list(multiset_words((2, 1)))
    assert ws == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
